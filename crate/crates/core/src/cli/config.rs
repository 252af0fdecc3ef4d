//! Line-based experiment configuration: `key = value`, `#` starts a comment.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    LatticeMincut,
    DiskConvergence,
    RelcostSweep,
    RlncValidate,
    ChernoffCheck,
}

impl Scenario {
    pub const ALL: [Scenario; 5] = [
        Scenario::LatticeMincut,
        Scenario::DiskConvergence,
        Scenario::RelcostSweep,
        Scenario::RlncValidate,
        Scenario::ChernoffCheck,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::LatticeMincut => "lattice-mincut",
            Scenario::DiskConvergence => "disk-convergence",
            Scenario::RelcostSweep => "relcost-sweep",
            Scenario::RlncValidate => "rlnc-validate",
            Scenario::ChernoffCheck => "chernoff-check",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Scenario::ALL.iter().map(|s| s.name()).collect();
                format!("unknown scenario '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphKind {
    Lattice,
    Disk,
}

impl FromStr for GraphKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "lattice" => Ok(GraphKind::Lattice),
            "disk" => Ok(GraphKind::Disk),
            _ => Err(format!("graph must be 'lattice' or 'disk', got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DestSampling {
    All,
    Sample(usize),
}

impl FromStr for DestSampling {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "all" {
            return Ok(DestSampling::All);
        }
        match s.parse::<usize>() {
            Ok(k) if k > 0 => Ok(DestSampling::Sample(k)),
            _ => Err(format!("destSampling must be 'all' or a positive count, got '{s}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    #[serde(rename = "L")]
    pub sizes: Vec<usize>,
    pub rho: Vec<f64>,
    #[serde(rename = "W")]
    pub border_width: f64,
    pub theta: f64,
    #[serde(rename = "K")]
    pub prefactor: f64,
    pub seeds: Vec<u64>,
    #[serde(rename = "G")]
    pub generation: usize,
    #[serde(rename = "maxRounds")]
    pub max_rounds: usize,
    #[serde(rename = "destSampling")]
    pub dest_sampling: DestSampling,
    pub output: String,
    pub r: f64,
    pub delta: f64,
    pub mu: f64,
    pub graph: GraphKind,
    pub trace: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            scenario: Scenario::LatticeMincut,
            sizes: vec![10],
            rho: vec![1.0],
            border_width: 2.0,
            theta: 0.5,
            prefactor: 1.0,
            seeds: (0..10).collect(),
            generation: 16,
            max_rounds: 64,
            dest_sampling: DestSampling::All,
            output: "out".into(),
            r: 0.4,
            delta: 0.5,
            mu: 200.0,
            graph: GraphKind::Lattice,
            trace: false,
        }
    }
}

/// Key, default and meaning of every configuration entry.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("scenario", "lattice-mincut", "lattice-mincut | disk-convergence | relcost-sweep | rlnc-validate | chernoff-check"),
    ("L", "10", "side lengths, comma separated"),
    ("rho", "1", "radio ranges, comma separated"),
    ("W", "2", "border width, must exceed every rho"),
    ("theta", "0.5", "density exponent, M = K L^theta"),
    ("K", "1", "density prefactor"),
    ("seeds", "0..10", "seed list (a,b,c) or half-open range a..b"),
    ("G", "16", "RLNC generation size"),
    ("maxRounds", "64", "RLNC round limit"),
    ("destSampling", "all", "all | k (k sampled destinations, rows flagged estimate)"),
    ("output", "out", "output directory"),
    ("r", "0.4", "embedded lattice step (disk) / cell size (chernoff-check)"),
    ("delta", "0.5", "chernoff-check deviation"),
    ("mu", "200", "chernoff-check node density"),
    ("graph", "lattice", "topology for relcost-sweep and rlnc-validate: lattice | disk"),
    ("trace", "false", "write per-round RLNC rank traces"),
];

/// Parsed configuration plus non-fatal findings.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub config: ExperimentConfig,
    pub warnings: Vec<String>,
}

pub fn parse_config(text: &str) -> Result<ParsedConfig> {
    let mut cfg = ExperimentConfig::default();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |message: String| Error::Config { line, message };
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| err(format!("expected 'key = value', got '{content}'")))?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(err(format!("missing value for '{key}'")));
        }
        if !KEYS.iter().any(|&(k, _, _)| k == key) {
            return Err(err(format!("unknown key '{key}'")));
        }
        if !seen.insert(key.to_string()) {
            return Err(err(format!("duplicate key '{key}'")));
        }
        set_key(&mut cfg, key, value).map_err(err)?;
    }
    let warnings = validate(&cfg)?;
    Ok(ParsedConfig {
        config: cfg,
        warnings,
    })
}

fn set_key(cfg: &mut ExperimentConfig, key: &str, value: &str) -> Result<(), String> {
    match key {
        "scenario" => cfg.scenario = value.parse()?,
        "L" => cfg.sizes = parse_list(key, value)?,
        "rho" => cfg.rho = parse_list(key, value)?,
        "W" => cfg.border_width = parse_num(key, value)?,
        "theta" => cfg.theta = parse_num(key, value)?,
        "K" => cfg.prefactor = parse_num(key, value)?,
        "seeds" => cfg.seeds = parse_seeds(value)?,
        "G" => cfg.generation = parse_num(key, value)?,
        "maxRounds" => cfg.max_rounds = parse_num(key, value)?,
        "destSampling" => cfg.dest_sampling = value.parse()?,
        "output" => cfg.output = value.to_string(),
        "r" => cfg.r = parse_num(key, value)?,
        "delta" => cfg.delta = parse_num(key, value)?,
        "mu" => cfg.mu = parse_num(key, value)?,
        "graph" => cfg.graph = value.parse()?,
        "trace" => cfg.trace = parse_num(key, value)?,
        _ => unreachable!("key list checked by the caller"),
    }
    Ok(())
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value '{value}' for '{key}'"))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, String> {
    value
        .split(',')
        .map(|item| parse_num(key, item.trim()))
        .collect()
}

/// `1,2,5` or the half-open range `0..10`.
pub fn parse_seeds(value: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = value.split_once("..") {
        let a: u64 = parse_num("seeds", a.trim())?;
        let b: u64 = parse_num("seeds", b.trim())?;
        if b <= a {
            return Err(format!("empty seed range {a}..{b}"));
        }
        return Ok((a..b).collect());
    }
    parse_list("seeds", value)
}

/// Checks cross-key constraints; returns warnings for settings that run but
/// fall outside the regime the results are meant for.
pub fn validate(cfg: &ExperimentConfig) -> Result<Vec<String>> {
    let bad = Error::InvalidParameter;
    if cfg.sizes.is_empty() || cfg.rho.is_empty() || cfg.seeds.is_empty() {
        return Err(bad("L, rho and seeds must be non-empty".into()));
    }
    if let Some(rho) = cfg.rho.iter().find(|&&r| !(r > 0.0 && r.is_finite())) {
        return Err(bad(format!("rho must be positive, got {rho}")));
    }
    if cfg.rho.iter().any(|&r| cfg.border_width <= r) {
        return Err(bad(format!(
            "W must exceed rho (W = {}, rho = {})",
            cfg.border_width,
            cfg.rho.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
        )));
    }
    if !cfg.theta.is_finite() || !(cfg.prefactor > 0.0 && cfg.prefactor.is_finite()) {
        return Err(bad("theta must be finite and K positive".into()));
    }
    if cfg.generation == 0 {
        return Err(bad("G must be at least 1".into()));
    }
    if !(cfg.r > 0.0) || !(cfg.mu > 0.0) || !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(bad("need r > 0, mu > 0 and 0 < delta < 1".into()));
    }
    if cfg.sizes.iter().any(|&l| l < 2) {
        return Err(bad("every L must be at least 2".into()));
    }

    let mut warnings = Vec::new();
    let lattice_graph = match cfg.scenario {
        Scenario::LatticeMincut => true,
        Scenario::RelcostSweep | Scenario::RlncValidate => cfg.graph == GraphKind::Lattice,
        _ => false,
    };
    if lattice_graph {
        if let Some(l) = cfg.sizes.iter().find(|&&l| l as f64 <= 2.0 * cfg.border_width) {
            return Err(bad(format!("lattice side L = {l} must exceed 2W")));
        }
    }
    let theta_matters = match cfg.scenario {
        Scenario::DiskConvergence => true,
        Scenario::RelcostSweep | Scenario::RlncValidate => cfg.graph == GraphKind::Disk,
        _ => false,
    };
    if theta_matters && cfg.theta <= 0.0 && cfg.scenario != Scenario::RelcostSweep {
        warnings.push(format!(
            "theta = {} gives a density that does not grow with L",
            cfg.theta
        ));
    }
    if cfg.scenario == Scenario::RelcostSweep && !(cfg.theta > 0.0 && cfg.theta < 1.0) {
        warnings.push(format!(
            "theta = {} lies outside 0 < theta < 1, where the relative cost is expected to converge",
            cfg.theta
        ));
    }
    Ok(warnings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config() {
        let p = parse_config("scenario = lattice-mincut\nL = 10\nrho = 1\nW = 2").unwrap();
        assert_eq!(p.config.scenario, Scenario::LatticeMincut);
        assert_eq!(p.config.sizes, vec![10]);
        assert_eq!(p.config.rho, vec![1.0]);
        assert!(p.warnings.is_empty());
    }

    #[test]
    fn border_must_exceed_range() {
        let e = parse_config("W = 0.5\nrho = 1").unwrap_err();
        assert!(e.to_string().contains("W must exceed rho"), "{e}");
    }

    #[test]
    fn theta_above_one_warns() {
        let p = parse_config("scenario = relcost-sweep\ngraph = disk\ntheta = 1.5\nL = 10").unwrap();
        assert_eq!(p.warnings.len(), 1);
        assert!(p.warnings[0].contains("theta"));
        let p = parse_config("scenario = relcost-sweep\ntheta = 1.5").unwrap();
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn errors_cite_lines() {
        let e = parse_config("L = 10\n\n# comment\nbogus = 3").unwrap_err();
        assert!(matches!(e, Error::Config { line: 4, .. }), "{e}");
        let e = parse_config("L = 10\nL = 12").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }));
        let e = parse_config("rho 1").unwrap_err();
        assert!(matches!(e, Error::Config { line: 1, .. }));
        let e = parse_config("L = 10\nG = many").unwrap_err();
        assert!(e.to_string().starts_with("line 2:"), "{e}");
        assert!(parse_config("scenario = nope").is_err());
    }

    #[test]
    fn lists_ranges_and_comments() {
        let text = "scenario = disk-convergence # trailing\nL = 20, 30,40\nrho = 1\nseeds = 3..6\ndestSampling = 25\ntrace = true";
        let c = parse_config(text).unwrap().config;
        assert_eq!(c.sizes, vec![20, 30, 40]);
        assert_eq!(c.seeds, vec![3, 4, 5]);
        assert_eq!(c.dest_sampling, DestSampling::Sample(25));
        assert!(c.trace);
        assert_eq!(parse_seeds("7, 1").unwrap(), vec![7, 1]);
        assert!(parse_seeds("5..5").is_err());
    }

    #[test]
    fn lattice_needs_room_for_borders() {
        assert!(parse_config("L = 4\nW = 2").is_err());
        assert!(parse_config("scenario = disk-convergence\nL = 4\nW = 2").is_ok());
    }

    #[test]
    fn defaults_cover_every_key() {
        let d = ExperimentConfig::default();
        let json = serde_json::to_value(&d).unwrap();
        for (key, _, _) in KEYS {
            assert!(json.get(key).is_some(), "{key}");
        }
        let back: ExperimentConfig = serde_json::from_value(json).unwrap();
        assert_eq!(back, d);
    }
}
