//! Scenario execution and artifact writing.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{validate, DestSampling, ExperimentConfig, GraphKind, ParsedConfig, Scenario};
use crate::error::{Error, Result};
use crate::metrics::{chernoff_mmin_bound, cost_report};
use crate::mincut::{
    embedded_lattice_bound, min_cut_broadcast, occupancy_of_points, BroadcastOptions, Destinations,
};
use crate::rates::assign_rates;
use crate::rlnc::{run_broadcast, SimParams, SimReport};
use crate::topology::{
    generate_lattice, generate_random_disk, seeded_rng, Network, Point, SourcePlacement,
    RNG_ALGORITHM,
};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const MANIFEST_VERSION: u32 = 1;

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Overrides the config's `output` directory.
    pub out_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    /// Overrides `destSampling`.
    pub sample_dest: Option<usize>,
    /// Replaces the config's seed list (from `HYPERCAST_SEED`).
    pub seeds: Option<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    pub manifest_version: u32,
    pub tool: String,
    pub code_version: String,
    pub rng_algorithm: String,
    /// Effective configuration, overrides applied; replaying it reproduces
    /// every output row.
    pub config: ExperimentConfig,
    pub seed_source: String,
    pub warnings: Vec<String>,
    pub outputs: Vec<String>,
    pub summary: Vec<SummaryLine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SummaryLine {
    #[serde(rename = "L")]
    pub side: usize,
    pub rho: f64,
    pub runs: usize,
    pub label: String,
    /// Sample mean over the runs that produced a value.
    pub value: f64,
    /// Half-width of the normal 95% confidence interval of the mean.
    pub ci95: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub out_dir: PathBuf,
    pub csv_path: PathBuf,
}

/// Rendered artifacts of one run, before anything touches the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub csv: String,
    pub extra_files: Vec<(String, String)>,
    pub summary: Vec<SummaryLine>,
}

#[derive(Debug, Clone, Copy)]
struct Job {
    side: usize,
    rho: f64,
    seed: u64,
}

fn jobs_of(cfg: &ExperimentConfig) -> Vec<Job> {
    let mut jobs = Vec::new();
    for &side in &cfg.sizes {
        for &rho in &cfg.rho {
            for &seed in &cfg.seeds {
                jobs.push(Job { side, rho, seed });
            }
        }
    }
    jobs.sort_by(|a, b| {
        a.side
            .cmp(&b.side)
            .then(a.rho.partial_cmp(&b.rho).unwrap_or(Ordering::Equal))
            .then(a.seed.cmp(&b.seed))
    });
    jobs.dedup_by(|a, b| a.side == b.side && a.rho == b.rho && a.seed == b.seed);
    jobs
}

/// Disk population giving expected degree `K L^θ` at range `ρ`.
pub fn disk_node_count(side: usize, rho: f64, theta: f64, prefactor: f64) -> usize {
    let l = side as f64;
    (prefactor * l.powf(theta) * l * l / (std::f64::consts::PI * rho * rho)).round() as usize
}

pub const CUT_HEADER: &str = "N,L,rho,W,M,mMax,totalRate,cMin,eCost,eBound,eRelCost,seed,kind,cMinOverM,mMaxOverM,mMin,latticeBound,connected,estimate,argminT";

#[derive(Debug, Clone, PartialEq)]
pub struct CutRow {
    pub n: usize,
    pub side: usize,
    pub rho: f64,
    pub w: f64,
    pub m: u64,
    pub m_max: usize,
    pub total_rate: u64,
    pub c_min: u64,
    pub e_cost: Option<f64>,
    pub e_bound: f64,
    pub e_rel_cost: Option<f64>,
    pub seed: u64,
    pub kind: &'static str,
    pub m_min: Option<u32>,
    pub lattice_bound: Option<u64>,
    pub connected: bool,
    pub estimate: bool,
    pub argmin: usize,
}

impl CutRow {
    pub fn c_min_over_m(&self) -> f64 {
        self.c_min as f64 / self.m as f64
    }

    fn to_csv(&self) -> String {
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.side,
            self.rho,
            self.w,
            self.m,
            self.m_max,
            self.total_rate,
            self.c_min,
            opt(self.e_cost.map(|x| x.to_string())),
            self.e_bound,
            opt(self.e_rel_cost.map(|x| x.to_string())),
            self.seed,
            self.kind,
            self.c_min_over_m(),
            self.m_max as f64 / self.m as f64,
            opt(self.m_min.map(|x| x.to_string())),
            opt(self.lattice_bound.map(|x| x.to_string())),
            self.connected,
            self.estimate,
            self.argmin
        )
    }
}

fn build_network(cfg: &ExperimentConfig, kind: GraphKind, job: Job) -> Result<Network> {
    match kind {
        GraphKind::Lattice => {
            let net = generate_lattice(job.side, job.rho, cfg.border_width)?;
            if cfg.scenario == Scenario::LatticeMincut {
                let source = seeded_rng(job.seed).gen_range(0..net.len());
                net.with_source(source)
            } else {
                Ok(net)
            }
        }
        GraphKind::Disk => {
            let n = disk_node_count(job.side, job.rho, cfg.theta, cfg.prefactor);
            generate_random_disk(
                n,
                job.side as f64,
                job.rho,
                cfg.border_width,
                job.seed,
                SourcePlacement::Center,
            )
        }
    }
}

fn cut_graph_kind(cfg: &ExperimentConfig) -> GraphKind {
    match cfg.scenario {
        Scenario::LatticeMincut => GraphKind::Lattice,
        Scenario::DiskConvergence => GraphKind::Disk,
        _ => cfg.graph,
    }
}

pub fn cut_row(cfg: &ExperimentConfig, side: usize, rho: f64, seed: u64) -> Result<CutRow> {
    let kind = cut_graph_kind(cfg);
    let job = Job { side, rho, seed };
    let net = build_network(cfg, kind, job)?;
    let hg = net.hypergraph();
    let ra = assign_rates(&net)?;
    let destinations = match cfg.dest_sampling {
        DestSampling::All => Destinations::All,
        DestSampling::Sample(count) => Destinations::Sample { count, seed },
    };
    let cut = min_cut_broadcast(
        &hg,
        &ra,
        net.source(),
        BroadcastOptions {
            destinations,
            ..Default::default()
        },
    )?;
    let m_max = hg.max_degree();
    let (e_cost, e_rel_cost) = match cost_report(&hg, &ra, cut.value) {
        Ok(c) => (Some(c.e_cost), Some(c.e_rel_cost)),
        Err(Error::Disconnected(_)) => (None, None),
        Err(e) => return Err(e),
    };
    let bound = match kind {
        GraphKind::Disk if 2.0 * cfg.r < rho && cfg.r < cfg.border_width - rho => {
            Some(embedded_lattice_bound(&net, cfg.r)?)
        }
        _ => None,
    };
    Ok(CutRow {
        n: net.len(),
        side,
        rho,
        w: cfg.border_width,
        m: ra.increased_rate(),
        m_max,
        total_rate: ra.total(),
        c_min: cut.value,
        e_cost,
        e_bound: net.len() as f64 / m_max.max(1) as f64,
        e_rel_cost,
        seed,
        kind: match kind {
            GraphKind::Lattice => "lattice",
            GraphKind::Disk => "disk",
        },
        m_min: bound.as_ref().map(|b| b.m_min),
        lattice_bound: bound.map(|b| b.value),
        connected: cut.value > 0,
        estimate: cut.estimate,
        argmin: cut.argmin,
    })
}

pub const RLNC_HEADER: &str =
    "seed,G,rounds,transmissions,receptions,innovative,innovationRatio,decodedAll,L,rho,N,connected";

pub fn rlnc_run(cfg: &ExperimentConfig, side: usize, rho: f64, seed: u64) -> Result<(Network, Option<SimReport>)> {
    let net = build_network(cfg, cfg.graph, Job { side, rho, seed })?;
    let hg = net.hypergraph();
    let ra = assign_rates(&net)?;
    let mut params = SimParams::new(cfg.generation, cfg.max_rounds, seed);
    params.trace = cfg.trace;
    match run_broadcast(&hg, &ra, net.source(), params) {
        Ok(report) => Ok((net, Some(report))),
        Err(Error::Disconnected(_)) => Ok((net, None)),
        Err(e) => Err(e),
    }
}

fn rlnc_csv_row(cfg: &ExperimentConfig, job: Job, n: usize, report: Option<&SimReport>) -> String {
    match report {
        Some(r) => format!("{},{},{},{},true", r.csv_row(), job.side, job.rho, n),
        None => format!(
            "{},{},0,0,0,0,0,false,{},{},{},false",
            job.seed, cfg.generation, job.side, job.rho, n
        ),
    }
}

fn trace_csv(report: &SimReport) -> Option<String> {
    let trace = report.trace.as_ref()?;
    let mut out = String::from("round,node,rank,sent\n");
    for (round, ranks) in trace.ranks.iter().enumerate() {
        for (node, rank) in ranks.iter().enumerate() {
            let sent = if round == 0 { 0 } else { trace.sent[round - 1][node] };
            let _ = writeln!(out, "{round},{node},{rank},{sent}");
        }
    }
    Some(out)
}

pub const CHERNOFF_HEADER: &str =
    "L,r,mu,delta,seed,N,cells,fullCells,mMin,fullCellMin,threshold,hit,bound";

#[derive(Debug, Clone, PartialEq)]
pub struct ChernoffDraw {
    pub side: usize,
    pub seed: u64,
    pub n: usize,
    pub cells: usize,
    pub full_cells: usize,
    pub m_min: u32,
    pub full_cell_min: Option<u32>,
    pub threshold: f64,
    pub hit: bool,
    pub bound: f64,
}

/// One occupancy draw of `round(μ L²)` uniform points on `[0, L]²`.
pub fn chernoff_draw(side: usize, r: f64, mu: f64, delta: f64, seed: u64) -> Result<ChernoffDraw> {
    let l = side as f64;
    let bound = chernoff_mmin_bound(l, r, mu, delta)?;
    let n = (mu * l * l).round() as usize;
    let mut rng = seeded_rng(seed);
    let points = (0..n).map(move |_| Point::new(rng.gen_range(0.0..l), rng.gen_range(0.0..l)));
    let lattice = occupancy_of_points(points, l, r, None)?;
    let threshold = (1.0 - delta) * mu * r * r;
    let full_cell_min = lattice.full_cell_min();
    Ok(ChernoffDraw {
        side,
        seed,
        n,
        cells: lattice.cell_count(),
        full_cells: lattice.full_cell_count(),
        m_min: lattice.m_min(),
        full_cell_min,
        threshold,
        hit: full_cell_min.is_some_and(|m| m as f64 <= threshold),
        bound: bound.raw,
    })
}

impl ChernoffDraw {
    fn to_csv(&self, r: f64, mu: f64, delta: f64) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.side,
            r,
            mu,
            delta,
            self.seed,
            self.n,
            self.cells,
            self.full_cells,
            self.m_min,
            self.full_cell_min.map(|m| m.to_string()).unwrap_or_default(),
            self.threshold,
            self.hit,
            self.bound
        )
    }
}

fn summarize<T>(
    jobs: &[Job],
    items: &[T],
    label: &str,
    value: impl Fn(&T) -> Option<f64>,
) -> Vec<SummaryLine> {
    let mut groups: Vec<(Job, Vec<f64>)> = Vec::new();
    for (job, item) in jobs.iter().zip(items) {
        match groups.last_mut() {
            Some((j, _)) if j.side == job.side && j.rho == job.rho => {}
            _ => groups.push((*job, Vec::new())),
        }
        if let Some(v) = value(item) {
            groups.last_mut().expect("pushed above").1.push(v);
        }
    }
    groups
        .into_iter()
        .map(|(job, values)| {
            let n = values.len() as f64;
            let mean = if values.is_empty() { 0.0 } else { values.iter().sum::<f64>() / n };
            let ci95 = if values.len() < 2 {
                0.0
            } else {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
                1.96 * (var / n).sqrt()
            };
            SummaryLine {
                side: job.side,
                rho: job.rho,
                runs: values.len(),
                label: label.to_string(),
                value: mean,
                ci95,
            }
        })
        .collect()
}

/// Runs every job of `cfg` and renders the artifacts in (L, rho, seed)
/// order, independent of the thread count.
pub fn render(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let jobs = jobs_of(cfg);
    let mut csv = String::new();
    let mut extra_files = Vec::new();
    let summary;
    match cfg.scenario {
        Scenario::LatticeMincut | Scenario::DiskConvergence | Scenario::RelcostSweep => {
            let rows: Vec<CutRow> = jobs
                .par_iter()
                .map(|j| cut_row(cfg, j.side, j.rho, j.seed))
                .collect::<Result<_>>()?;
            csv.push_str(CUT_HEADER);
            csv.push('\n');
            for row in &rows {
                csv.push_str(&row.to_csv());
                csv.push('\n');
            }
            summary = if cfg.scenario == Scenario::RelcostSweep {
                summarize(&jobs, &rows, "mean eRelCost", |r| r.e_rel_cost)
            } else {
                summarize(&jobs, &rows, "mean cMin/M", |r| Some(r.c_min_over_m()))
            };
        }
        Scenario::RlncValidate => {
            let runs: Vec<(Network, Option<SimReport>)> = jobs
                .par_iter()
                .map(|j| rlnc_run(cfg, j.side, j.rho, j.seed))
                .collect::<Result<_>>()?;
            csv.push_str(RLNC_HEADER);
            csv.push('\n');
            for (job, (net, report)) in jobs.iter().zip(&runs) {
                csv.push_str(&rlnc_csv_row(cfg, *job, net.len(), report.as_ref()));
                csv.push('\n');
                if let Some(trace) = report.as_ref().and_then(trace_csv) {
                    extra_files.push((
                        format!("trace_L{}_rho{}_seed{}.csv", job.side, job.rho, job.seed),
                        trace,
                    ));
                }
            }
            summary = summarize(&jobs, &runs, "decoded fraction", |(_, r)| {
                Some(r.as_ref().map_or(0.0, |r| r.decoded_all as u8 as f64))
            });
        }
        Scenario::ChernoffCheck => {
            let draws: Vec<ChernoffDraw> = jobs
                .par_iter()
                .map(|j| chernoff_draw(j.side, cfg.r, cfg.mu, cfg.delta, j.seed))
                .collect::<Result<_>>()?;
            csv.push_str(CHERNOFF_HEADER);
            csv.push('\n');
            for d in &draws {
                csv.push_str(&d.to_csv(cfg.r, cfg.mu, cfg.delta));
                csv.push('\n');
            }
            summary = summarize(&jobs, &draws, "hit frequency", |d| Some(d.hit as u8 as f64));
        }
    }
    Ok(Artifacts {
        csv,
        extra_files,
        summary,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Applies the overrides, runs the scenario and writes `<scenario>.csv`
/// plus the manifest into the output directory.
pub fn run_experiment(parsed: ParsedConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let ParsedConfig {
        config: mut cfg,
        mut warnings,
    } = parsed;
    let mut seed_source = "config".to_string();
    if let Some(seeds) = &opts.seeds {
        cfg.seeds = seeds.clone();
        seed_source = "HYPERCAST_SEED".into();
    }
    if let Some(k) = opts.sample_dest {
        cfg.dest_sampling = if k == 0 {
            DestSampling::All
        } else {
            DestSampling::Sample(k)
        };
    }
    for w in validate(&cfg)? {
        if !warnings.contains(&w) {
            warnings.push(w);
        }
    }
    execute(cfg, warnings, seed_source, opts)
}

/// Reruns the configuration stored in a manifest.
pub fn replay(manifest_path: &Path, opts: &RunOptions) -> Result<RunOutcome> {
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    if manifest.manifest_version != MANIFEST_VERSION {
        return Err(Error::invalid(format!(
            "unsupported manifest version {}",
            manifest.manifest_version
        )));
    }
    let warnings = validate(&manifest.config)?;
    let opts = RunOptions {
        out_dir: opts.out_dir.clone(),
        jobs: opts.jobs,
        ..Default::default()
    };
    execute(manifest.config, warnings, manifest.seed_source, &opts)
}

fn execute(
    cfg: ExperimentConfig,
    warnings: Vec<String>,
    seed_source: String,
    opts: &RunOptions,
) -> Result<RunOutcome> {
    let out_dir = opts
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(&cfg.output));
    let artifacts = match opts.jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start {n} worker threads: {e}")))?
            .install(|| render(&cfg))?,
        None => render(&cfg)?,
    };

    fs::create_dir_all(&out_dir).map_err(|e| Error::io(&out_dir, e))?;
    let csv_name = format!("{}.csv", cfg.scenario);
    let csv_path = out_dir.join(&csv_name);
    write_file(&csv_path, &artifacts.csv)?;
    let mut outputs = vec![csv_name];
    for (name, contents) in &artifacts.extra_files {
        write_file(&out_dir.join(name), contents)?;
        outputs.push(name.clone());
    }

    let manifest = Manifest {
        manifest_version: MANIFEST_VERSION,
        tool: env!("CARGO_PKG_NAME").into(),
        code_version: env!("CARGO_PKG_VERSION").into(),
        rng_algorithm: RNG_ALGORITHM.into(),
        config: cfg,
        seed_source,
        warnings,
        outputs,
        summary: artifacts.summary,
    };
    let mut json = serde_json::to_string_pretty(&manifest)?;
    json.push('\n');
    write_file(&out_dir.join(MANIFEST_FILE), &json)?;
    Ok(RunOutcome {
        manifest,
        out_dir,
        csv_path,
    })
}
