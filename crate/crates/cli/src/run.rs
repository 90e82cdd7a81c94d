//! Executes an experiment and writes its data files.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use qae_core::disc::helstrom_bound;
use qae_core::encoder::{max_trash_fidelity, perfect_encoder};
use qae_core::photonic::{device_unitary, gate_library, solve_device_params, DeviceParams};
use qae_core::qlin::write_matrix;
use qae_core::qstate::ensemble_density;
use qae_core::tomo::{chi_of_unitary, pauli_basis, process_fidelity, ProcessMatrix};
use qae_core::train::{mean_std, train_restarts, Objective, Shots, TraceStats, TrainConfig, TrainTrace};
use qae_core::Matrix;

use crate::config::{ExperimentConfig, Kind, PARTITION};

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub shots: Option<Shots>,
    pub runs: Option<usize>,
}

/// Runs `cfg`, writing into `dir`. Returns the summary that was written.
pub fn run(name: &str, cfg: &ExperimentConfig, over: &Overrides, dir: &Path) -> Result<Value> {
    let mut cfg = cfg.clone();
    if let Some(s) = over.seed {
        cfg.seed = s;
    }
    if let Some(r) = over.runs {
        cfg.runs = r;
    }
    let mut train_cfg = cfg.train_config()?;
    if let Some(s) = over.shots {
        train_cfg.shots = s;
    }
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let body = match cfg.kind {
        Kind::Encode => encode(&cfg, dir)?,
        Kind::Train => train(&cfg, &train_cfg, dir)?,
        Kind::Discriminate => discriminate(&cfg, &train_cfg, dir)?,
        Kind::Tomography => gate(&cfg, dir, true)?,
        Kind::SolveGate => gate(&cfg, dir, false)?,
    };
    let mut summary = json!({
        "name": name,
        "kind": cfg.kind_str(),
        "description": cfg.description,
        "seed": cfg.seed,
    });
    summary.as_object_mut().unwrap().extend(body.as_object().cloned().unwrap_or_default());
    write_file(&dir.join("summary.json"), &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    if let Some(min) = cfg.gate.as_ref().map(|g| g.min_fidelity) {
        let f = summary["process_fidelity"].as_f64().unwrap_or(0.0);
        if f < min {
            bail!("process fidelity {f} below min_fidelity {min}");
        }
    }
    Ok(summary)
}

impl ExperimentConfig {
    fn kind_str(&self) -> &'static str {
        match self.kind {
            Kind::Encode => "encode",
            Kind::Train => "train",
            Kind::Tomography => "tomography",
            Kind::Discriminate => "discriminate",
            Kind::SolveGate => "solve-gate",
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn csv_out(path: PathBuf, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w).and_then(|_| w.flush()).with_context(|| format!("writing {}", path.display()))
}

fn encode(cfg: &ExperimentConfig, dir: &Path) -> Result<Value> {
    let (e, reference) = cfg.ensemble.as_ref().expect("checked").build()?;
    let sol = perfect_encoder(&e, &reference)?;
    let best = max_trash_fidelity(&ensemble_density(&e), PARTITION)?;
    write_file(&dir.join("encoder.txt"), &write_matrix(&sol.unitary))?;
    Ok(json!({
        "cost": sol.achieved_cost,
        "cost_bound": 1.0 - best,
        "rank": sol.rank,
        "latent_dim": sol.latent_dim,
        "lossless": sol.lossless,
    }))
}

fn write_traces(traces: &[TrainTrace<f64>], dir: &Path) -> Result<Value> {
    for (i, t) in traces.iter().enumerate() {
        csv_out(dir.join(format!("trace_{i}.csv")), |w| t.write_csv(w))?;
    }
    csv_out(dir.join("trace_stats.csv"), |w| TraceStats::from_traces(traces).write_csv(w))?;
    let finals: Vec<f64> = traces.iter().map(|t| t.final_cost).collect();
    let (mean, std) = mean_std(&finals);
    let best = finals.iter().copied().fold(f64::INFINITY, f64::min);
    let runs: Vec<Value> = traces
        .iter()
        .map(|t| {
            json!({
                "seed": t.seed,
                "iterations": t.records.len(),
                "final_cost": t.final_cost,
                "final_params": t.final_params.to_array().to_vec(),
                "anneal_iterations": t.anneal_iterations,
            })
        })
        .collect();
    Ok(json!({
        "param_labels": DeviceParams::<f64>::labels().to_vec(),
        "final_cost_mean": mean,
        "final_cost_std": std,
        "final_cost_best": best,
        "runs": runs,
    }))
}

fn shots_json(s: Shots) -> Value {
    match s {
        Shots::Exact => json!("exact"),
        Shots::Count(n) => json!(n),
    }
}

fn merge(mut a: Value, b: Value) -> Value {
    a.as_object_mut().unwrap().extend(b.as_object().cloned().unwrap_or_default());
    a
}

fn train(cfg: &ExperimentConfig, tc: &TrainConfig<f64>, dir: &Path) -> Result<Value> {
    let section = cfg.ensemble.as_ref().expect("checked");
    let (e, reference) = section.build()?;
    let obj = Objective::encoding(&e, &reference, section.trash)?;
    let traces = train_restarts(tc, &obj, cfg.runs)?;
    let best = max_trash_fidelity(&ensemble_density(&e), PARTITION)?;
    let head = json!({
        "trash": section.trash,
        "shots": shots_json(tc.shots),
        "cost_bound": 1.0 - best,
        "perfect_encoder_cost": perfect_encoder(&e, &reference)?.achieved_cost,
    });
    Ok(merge(head, write_traces(&traces, dir)?))
}

fn discriminate(cfg: &ExperimentConfig, tc: &TrainConfig<f64>, dir: &Path) -> Result<Value> {
    let section = cfg.problem.as_ref().expect("checked");
    let built = section.build()?;
    let bound = helstrom_bound(&built.physical)?.p_error;
    let interval = match &built.interval_average {
        Some(p) => json!(helstrom_bound(p)?.p_error),
        None => Value::Null,
    };
    let obj = Objective::discrimination(&built.problem, PARTITION, &built.target_a, &built.target_b, section.trash)?;
    let traces = train_restarts(tc, &obj, cfg.runs)?;
    let head = json!({
        "trash": section.trash,
        "shots": shots_json(tc.shots),
        "bound": bound,
        "interval_average_bound": interval,
    });
    Ok(merge(head, write_traces(&traces, dir)?))
}

/// Real and imaginary parts of `χ` as labelled CSV grids.
pub fn chi_grids(chi: &ProcessMatrix<f64>) -> Result<(String, String)> {
    let basis = pauli_basis::<f64>(2)?;
    let n = chi.dim();
    let header: Vec<String> = (0..n).map(|m| basis.label(m)).collect();
    let grid = |part: fn(&qae_core::Complex) -> f64| {
        let mut s = format!(",{}\n", header.join(","));
        for (i, label) in header.iter().enumerate() {
            let row: Vec<String> = (0..n).map(|j| part(&chi.chi[(i, j)]).to_string()).collect();
            s += &format!("{label},{}\n", row.join(","));
        }
        s
    };
    Ok((grid(|z| z.re), grid(|z| z.im)))
}

fn write_chi(chi: &ProcessMatrix<f64>, dir: &Path, stem: &str) -> Result<()> {
    let (re, im) = chi_grids(chi)?;
    write_file(&dir.join(format!("{stem}_re.csv")), &re)?;
    write_file(&dir.join(format!("{stem}_im.csv")), &im)?;
    write_file(&dir.join(format!("{stem}.txt")), &write_matrix(&chi.chi))
}

fn gate(cfg: &ExperimentConfig, dir: &Path, tomography: bool) -> Result<Value> {
    let g = cfg.gate.as_ref().expect("checked");
    let name = g.gate_name()?;
    let target: Matrix = gate_library(name);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let solved = solve_device_params(&target, g.starts, g.iters, &mut rng)?;
    let u = device_unitary(&solved.params);
    let ideal = chi_of_unitary(&target)?;
    let actual = chi_of_unitary(&u)?;
    let fidelity = process_fidelity(&actual, &ideal)?;
    write_file(&dir.join("solved_unitary.txt"), &write_matrix(&u))?;
    if tomography {
        write_chi(&ideal, dir, "chi_ideal")?;
        write_chi(&actual, dir, "chi_solved")?;
    }
    Ok(json!({
        "gate": name.as_str(),
        "process_fidelity": fidelity,
        "residual": solved.residual,
        "param_labels": DeviceParams::<f64>::labels().to_vec(),
        "final_params": solved.params.to_array().to_vec(),
    }))
}
