use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hypercast(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypercast"))
        .args(args)
        .current_dir(dir)
        .env_remove("HYPERCAST_SEED")
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("lattice.cfg"),
        "scenario = lattice-mincut\nL = 10\nrho = 1\nW = 2\nseeds = 0..4\n",
    )
    .unwrap();
    let out = hypercast(&["run", "lattice.cfg", "--out", "res", "--jobs", "2"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));

    let csv = fs::read_to_string(dir.path().join("res/lattice-mincut.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("N,L,rho,W,M,mMax,totalRate,cMin,eCost,eBound,eRelCost,seed"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4);
    assert!(!csv.contains('\r'));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("res/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["rngAlgorithm"], "chacha8/rand_chacha-0.3/seed_from_u64");
    assert_eq!(manifest["config"]["seeds"], serde_json::json!([0, 1, 2, 3]));
    assert_eq!(manifest["seedSource"], "config");
    assert!(manifest["codeVersion"].is_string());
}

#[test]
fn env_seed_override_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("disk.cfg"),
        "scenario = disk-convergence\nL = 8\nrho = 1\nW = 2\nK = 3\nseeds = 0..10\n",
    )
    .unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hypercast"))
        .args(["run", "disk.cfg", "--out", "a", "--sample-dest", "10"])
        .current_dir(dir.path())
        .env("HYPERCAST_SEED", "7,3")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = fs::read_to_string(dir.path().join("a/disk-convergence.csv")).unwrap();
    let seeds: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(11).unwrap()).collect();
    assert_eq!(seeds, ["3", "7"]);
    for line in csv.lines().skip(1) {
        assert_eq!(line.split(',').nth(18), Some("true"), "{line}");
    }

    let out = hypercast(&["replay", "a/manifest.json", "--out", "b", "--jobs", "1"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(csv, fs::read_to_string(dir.path().join("b/disk-convergence.csv")).unwrap());
}

#[test]
fn invalid_config_fails_with_message() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.cfg"), "W = 0.5\nrho = 1\n").unwrap();
    let out = hypercast(&["run", "bad.cfg"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("W must exceed rho"), "{}", stderr(&out));

    fs::write(dir.path().join("typo.cfg"), "L = 10\nrhoo = 1\n").unwrap();
    let out = hypercast(&["run", "typo.cfg"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn theta_warning_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("sweep.cfg"),
        "scenario = relcost-sweep\ntheta = 1.5\nL = 10\nseeds = 0\n",
    )
    .unwrap();
    let out = hypercast(&["run", "sweep.cfg", "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stderr(&out).contains("warning"));
    let manifest = fs::read_to_string(dir.path().join("o/manifest.json")).unwrap();
    assert!(manifest.contains("theta = 1.5"));
}

#[test]
fn generated_networks_feed_mincut() {
    let dir = tempfile::tempdir().unwrap();
    let out = hypercast(&["gen-lattice", "-L", "10", "--rho", "1", "-W", "2", "-o", "lat.json"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let out = hypercast(&["mincut", "lat.json"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let cut: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cut["value"], 4);
    assert_eq!(cut["estimate"], false);

    let out = hypercast(
        &["gen-disk", "-N", "300", "-L", "6", "--rho", "1", "-W", "2", "--seed", "5", "--rates"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["kind"], "disk");
    assert_eq!(doc["nodes"].as_array().unwrap().len(), 300);
    assert_eq!(doc["rng"]["seed"], 5);
    fs::write(dir.path().join("disk.json"), &out.stdout).unwrap();
    let out = hypercast(&["mincut", "disk.json", "--sample-dest", "5"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let cut: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cut["estimate"], true);
}

#[test]
fn help_documents_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let out = hypercast(&["run", "--help"], dir.path());
    let text = String::from_utf8_lossy(&out.stdout);
    for key in ["scenario", "destSampling", "maxRounds", "HYPERCAST_SEED"] {
        assert!(text.contains(key), "{key} missing from help");
    }
}
