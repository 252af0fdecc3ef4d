use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hypercast::cli::config::{parse_seeds, KEYS};
use hypercast::cli::{parse_config, replay, run_experiment, RunOptions, RunOutcome};
use hypercast::mincut::{min_cut_broadcast, BroadcastOptions, Destinations};
use hypercast::rates::assign_rates;
use hypercast::topology::{
    generate_lattice, generate_random_disk, Network, NetworkDocument, RngInfo, SourcePlacement,
};
use hypercast::{Error, Result};

fn config_help() -> String {
    let mut s = String::from("Config file format: one `key = value` per line, `#` starts a comment.\n\nKeys (default):\n");
    for (key, default, meaning) in KEYS {
        s.push_str(&format!("  {key:<13} ({default}) {meaning}\n"));
    }
    s.push_str("\nHYPERCAST_SEED (same syntax as `seeds`) overrides the seed list.");
    s
}

#[derive(Parser)]
#[command(name = "hypercast", version, about = "Broadcast min-cut and network coding experiments on wireless hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    #[command(after_help = config_help())]
    Run {
        config: PathBuf,
        /// Output directory (overrides `output`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Evaluate only K sampled destinations per min-cut (0 = all).
        #[arg(long, value_name = "K")]
        sample_dest: Option<usize>,
    },
    /// Rerun the configuration recorded in a run manifest.
    Replay {
        manifest: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Write an L x L integer lattice as network JSON.
    GenLattice {
        #[arg(short = 'L', long = "side")]
        side: usize,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(short = 'W', long = "border", default_value_t = 2.0)]
        border: f64,
        /// Include the IREN/IRON rates.
        #[arg(long)]
        rates: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Write a uniform random unit-disk network as network JSON.
    GenDisk {
        #[arg(short = 'N', long = "nodes")]
        nodes: usize,
        #[arg(short = 'L', long = "side")]
        side: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(short = 'W', long = "border", default_value_t = 2.0)]
        border: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Source node id (default: node nearest the center).
        #[arg(long)]
        source: Option<usize>,
        #[arg(long)]
        rates: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Broadcast min-cut of a network JSON file; prints the cut witness.
    Mincut {
        network: PathBuf,
        /// Source node (default: the one stored in the file).
        #[arg(long)]
        source: Option<usize>,
        /// Evaluate only K sampled destinations.
        #[arg(long, value_name = "K")]
        sample_dest: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn emit(net: &Network, seed: Option<u64>, with_rates: bool, output: Option<&Path>) -> Result<()> {
    let mut doc = net.to_document();
    doc.rng = seed.map(RngInfo::new);
    if with_rates {
        let ra = assign_rates(net)?;
        doc.increased_rate = Some(ra.increased_rate());
        doc.rates = Some(ra.rates().to_vec());
    }
    let mut json = serde_json::to_string(&doc)?;
    json.push('\n');
    match output {
        Some(path) => fs::write(path, json).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => std::io::stdout()
            .write_all(json.as_bytes())
            .map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            }),
    }
}

fn report(outcome: &RunOutcome) {
    for w in &outcome.manifest.warnings {
        eprintln!("warning: {w}");
    }
    for s in &outcome.manifest.summary {
        println!(
            "L={} rho={} runs={} {} = {:.4} ± {:.4}",
            s.side, s.rho, s.runs, s.label, s.value, s.ci95
        );
    }
    println!("wrote {}", outcome.csv_path.display());
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            config,
            out,
            jobs,
            sample_dest,
        } => {
            let text = fs::read_to_string(&config).map_err(|e| Error::Io {
                path: config.clone(),
                source: e,
            })?;
            let parsed = parse_config(&text)?;
            let seeds = match std::env::var("HYPERCAST_SEED") {
                Ok(v) => Some(
                    parse_seeds(v.trim())
                        .map_err(|m| Error::InvalidParameter(format!("HYPERCAST_SEED: {m}")))?,
                ),
                Err(_) => None,
            };
            let opts = RunOptions {
                out_dir: out,
                jobs,
                sample_dest,
                seeds,
            };
            report(&run_experiment(parsed, &opts)?);
        }
        Command::Replay { manifest, out, jobs } => {
            let opts = RunOptions {
                out_dir: out,
                jobs,
                ..Default::default()
            };
            report(&replay(&manifest, &opts)?);
        }
        Command::GenLattice {
            side,
            rho,
            border,
            rates,
            output,
        } => {
            let net = generate_lattice(side, rho, border)?;
            emit(&net, None, rates, output.as_deref())?;
        }
        Command::GenDisk {
            nodes,
            side,
            rho,
            border,
            seed,
            source,
            rates,
            output,
        } => {
            let placement = source.map_or(SourcePlacement::Center, SourcePlacement::Node);
            let net = generate_random_disk(nodes, side, rho, border, seed, placement)?;
            emit(&net, Some(seed), rates, output.as_deref())?;
        }
        Command::Mincut {
            network,
            source,
            sample_dest,
            seed,
        } => {
            let text = fs::read_to_string(&network).map_err(|e| Error::Io {
                path: network.clone(),
                source: e,
            })?;
            let doc: NetworkDocument = serde_json::from_str(&text)?;
            let mut net = Network::from_document(&doc)?;
            if let Some(s) = source {
                net = net.with_source(s)?;
            }
            let hg = net.hypergraph();
            let ra = assign_rates(&net)?;
            let destinations = match sample_dest {
                Some(count) => Destinations::Sample { count, seed },
                None => Destinations::All,
            };
            let opts = BroadcastOptions {
                destinations,
                ..Default::default()
            };
            let cut = min_cut_broadcast(&hg, &ra, net.source(), opts)?;
            let mut json = serde_json::to_string(&cut.to_document())?;
            json.push('\n');
            print!("{json}");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
