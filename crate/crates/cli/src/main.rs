//! `qae`: runs autoencoder experiments from TOML configs or bundled presets.

mod config;
mod presets;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qae_core::disc::helstrom_bound;
use qae_core::encoder::perfect_encoder;
use qae_core::photonic::{gate_library, GateName};
use qae_core::qlin::{parse_matrix, write_matrix};
use qae_core::tomo::chi_of_unitary;
use qae_core::train::Shots;
use qae_core::Matrix;

#[derive(Parser)]
#[command(name = "qae", version, about = "Quantum autoencoder experiments on a two-qubit photonic device")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file or bundled preset.
    Run(RunArgs),
    /// List bundled presets, or print one.
    Presets { name: Option<String> },
    /// Print the analytic perfect-encoder cost for a config's ensemble.
    Encode { config: String },
    /// Print the minimum-error bound for a config's discrimination problem.
    Bound { config: String },
    /// Export library gates in the matrix text format.
    Gates {
        /// One gate; all gates when omitted.
        name: Option<String>,
        /// Write `<gate>.txt` files here instead of printing.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the process matrix of a library gate or matrix file as CSV grids.
    Chi { gate: String },
}

#[derive(Args)]
struct RunArgs {
    /// Config file path or preset name.
    config: String,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for restarts and gate searches.
    #[arg(long)]
    jobs: Option<usize>,
    /// Exact overlaps instead of sampled ones.
    #[arg(long, conflicts_with = "shots")]
    exact: bool,
    /// Shots per overlap estimate.
    #[arg(long)]
    shots: Option<u64>,
    /// Override the number of restarts.
    #[arg(long)]
    runs: Option<usize>,
    /// Output root; files go to `<out>/<name>/`.
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => run_cmd(args),
        Command::Presets { name: None } => {
            for (name, text) in presets::PRESETS {
                println!("{name:<16} {}", presets::description(text));
            }
            Ok(())
        }
        Command::Presets { name: Some(n) } => {
            let text = presets::get(&n).ok_or_else(|| anyhow!("{n}: no such preset"))?;
            print!("{text}");
            Ok(())
        }
        Command::Encode { config } => {
            let (_, cfg) = config::load(&config)?;
            let section = cfg.ensemble.as_ref().ok_or_else(|| anyhow!("ensemble: section required"))?;
            let (e, reference) = section.build()?;
            let sol = perfect_encoder(&e, &reference)?;
            println!("cost {}", sol.achieved_cost);
            println!("rank {} latent_dim {} lossless {}", sol.rank, sol.latent_dim, sol.lossless);
            Ok(())
        }
        Command::Bound { config } => {
            let (_, cfg) = config::load(&config)?;
            let section = cfg.problem.as_ref().ok_or_else(|| anyhow!("problem: section required"))?;
            let built = section.build()?;
            println!("bound {}", helstrom_bound(&built.physical)?.p_error);
            if let Some(p) = &built.interval_average {
                println!("interval_average_bound {}", helstrom_bound(p)?.p_error);
            }
            Ok(())
        }
        Command::Gates { name, out } => {
            let gates: Vec<GateName> = match name {
                Some(n) => vec![n.parse().map_err(|e| anyhow!("{e}"))?],
                None => GateName::ALL.to_vec(),
            };
            for g in gates {
                let text = write_matrix(&gate_library::<f64>(g));
                match &out {
                    Some(dir) => {
                        std::fs::create_dir_all(dir)?;
                        let path = dir.join(format!("{g}.txt"));
                        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
                    }
                    None => print!("# {g}\n{text}"),
                }
            }
            Ok(())
        }
        Command::Chi { gate } => {
            let u: Matrix = match gate.parse::<GateName>() {
                Ok(g) => gate_library(g),
                Err(_) => {
                    let text = std::fs::read_to_string(&gate).with_context(|| format!("{gate}: not a gate or readable file"))?;
                    parse_matrix(&text)?
                }
            };
            let (re, im) = run::chi_grids(&chi_of_unitary(&u)?)?;
            print!("# real\n{re}# imaginary\n{im}");
            Ok(())
        }
    }
}

fn run_cmd(args: RunArgs) -> Result<()> {
    let (name, cfg) = config::load(&args.config)?;
    let over = run::Overrides {
        seed: args.seed,
        shots: match (args.exact, args.shots) {
            (true, _) => Some(Shots::Exact),
            (false, Some(n)) => Some(Shots::Count(n)),
            (false, None) => None,
        },
        runs: args.runs,
    };
    if args.runs == Some(0) {
        bail!("--runs: must be at least 1");
    }
    let dir = args.out.join(&name);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(args.jobs.unwrap_or(0)).build()?;
    let summary = pool.install(|| run::run(&name, &cfg, &over, &dir))?;
    for key in ["final_cost_mean", "final_cost_best", "bound", "cost", "process_fidelity"] {
        if let Some(v) = summary.get(key).filter(|v| !v.is_null()) {
            println!("{key} {v}");
        }
    }
    println!("wrote {}", dir.display());
    Ok(())
}
