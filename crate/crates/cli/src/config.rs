//! Experiment configuration files (TOML).

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use qae_core::disc::DiscriminationProblem;
use qae_core::encoder::ReferenceState;
use qae_core::photonic::{DeviceParams, GateName};
use qae_core::qlin::{Partition, PureState};
use qae_core::qstate::{alpha_state, AlphaTriple, BasisLabel, Ensemble, TrashQubit};
use qae_core::train::{Init, Shots, TrainConfig};
use qae_core::Complex;

use crate::presets;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Encode,
    Train,
    Tomography,
    Discriminate,
    SolveGate,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    /// Names the output directory; defaults to the file stem or preset name.
    pub name: Option<String>,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub seed: u64,
    /// Independent training restarts.
    #[serde(default = "one")]
    pub runs: usize,
    pub ensemble: Option<EnsembleSection>,
    pub problem: Option<ProblemSection>,
    pub train: Option<TrainSection>,
    pub gate: Option<GateSection>,
}

fn one() -> usize {
    1
}

/// `[re, im]`, or a bare real number.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
pub enum Amp {
    Real(f64),
    Pair([f64; 2]),
}

impl Amp {
    fn value(self) -> Complex {
        match self {
            Amp::Real(re) => Complex::new(re, 0.0),
            Amp::Pair([re, im]) => Complex::new(re, im),
        }
    }
}

/// One basis term such as `["RV", 0.0, -0.25]` or `["RH", 0.25]`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Term {
    Real(String, f64),
    Complex(String, f64, f64),
}

/// A two-qubit pure state in physical order `RH, RV, LH, LV`. Exactly one
/// form must be given; amplitudes are normalized on load.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub terms: Option<Vec<Term>>,
    pub amplitudes: Option<Vec<Amp>>,
    /// `[α₁, α₂, α₃]` in radians.
    pub alphas: Option<[f64; 3]>,
    /// `[α₁, α₂, α₃]` in units of π.
    pub alpha_pi: Option<[f64; 3]>,
    /// `cos θ|first⟩ + sin θ|second⟩`.
    pub theta_degrees: Option<f64>,
    /// Expands to the two endpoint states `θ = lo` and `θ = hi`.
    pub theta_range: Option<[f64; 2]>,
    /// Basis pair for the theta forms, default `["RH", "RV"]`.
    pub basis: Option<[String; 2]>,
    pub prior: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSection {
    #[serde(default)]
    pub trash: TrashQubit,
    /// Trash reference state, default `|0⟩` (`|R⟩` or `|H⟩`).
    pub reference: Option<Vec<Amp>>,
    #[serde(default)]
    pub states: Vec<StateEntry>,
    /// Alternative to per-state `prior`, one weight per entry.
    pub priors: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    #[serde(default)]
    pub trash: TrashQubit,
    #[serde(default)]
    pub group_a: Vec<StateEntry>,
    #[serde(default)]
    pub group_b: Vec<StateEntry>,
    /// Trash states the two groups are sent to, default `|0⟩` and `|1⟩`.
    pub target_a: Option<Vec<Amp>>,
    pub target_b: Option<Vec<Amp>>,
    /// Points per `theta_range` for the interval-average bound.
    #[serde(default = "default_samples")]
    pub interval_samples: usize,
}

fn default_samples() -> usize {
    41
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainSection {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub max_outer: Option<usize>,
    pub patience: Option<usize>,
    pub stall_tol: Option<f64>,
    pub warmup: Option<usize>,
    pub max_iters: Option<usize>,
    /// Shots per overlap estimate; `exact = true` uses exact overlaps.
    pub shots: Option<u64>,
    #[serde(default)]
    pub exact: bool,
    /// Sixteen starting parameters; random when absent.
    pub init_params: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateSection {
    pub gate: String,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default = "default_iters")]
    pub iters: usize,
    #[serde(default = "default_min_fidelity")]
    pub min_fidelity: f64,
}

fn default_starts() -> usize {
    16
}

fn default_iters() -> usize {
    500
}

fn default_min_fidelity() -> f64 {
    0.999
}

/// Loads a config file, or a bundled preset when no such file exists.
pub fn load(spec: &str) -> Result<(String, ExperimentConfig)> {
    let path = Path::new(spec);
    let (stem, text) = if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("run").to_string();
        (stem, text)
    } else if let Some(text) = presets::get(spec) {
        (spec.to_string(), text.to_string())
    } else {
        bail!("{spec}: no such file or preset (see `qae presets`)");
    };
    let cfg = parse(&text).with_context(|| format!("in {spec}"))?;
    let name = cfg.name.clone().unwrap_or(stem);
    Ok((name, cfg))
}

pub fn parse(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| anyhow!("{}", e.to_string().trim_end()))?;
    cfg.check()?;
    Ok(cfg)
}

impl ExperimentConfig {
    fn check(&self) -> Result<()> {
        let need = |present: bool, section: &str| {
            if present {
                Ok(())
            } else {
                Err(anyhow!("{section}: section required for kind {:?}", self.kind))
            }
        };
        match self.kind {
            Kind::Encode | Kind::Train => need(self.ensemble.is_some(), "ensemble")?,
            Kind::Discriminate => need(self.problem.is_some(), "problem")?,
            Kind::Tomography | Kind::SolveGate => need(self.gate.is_some(), "gate")?,
        }
        if self.runs == 0 {
            bail!("runs: must be at least 1");
        }
        Ok(())
    }

    pub fn train_config(&self) -> Result<TrainConfig<f64>> {
        let t = self.train.clone().unwrap_or_default();
        let d = TrainConfig::<f64>::default();
        let init = match &t.init_params {
            None => Init::Random,
            Some(p) => Init::Params(DeviceParams::from_slice(p).map_err(|e| anyhow!("train.init_params: {e}"))?),
        };
        let shots = match (t.exact, t.shots) {
            (true, Some(_)) => bail!("train: give either exact = true or shots, not both"),
            (false, Some(n)) => Shots::Count(n),
            (true, None) => Shots::Exact,
            (false, None) => d.shots,
        };
        let cfg = TrainConfig {
            a: t.a.unwrap_or(d.a),
            b: t.b.unwrap_or(d.b),
            max_outer: t.max_outer.unwrap_or(d.max_outer),
            patience: t.patience.unwrap_or(d.patience),
            stall_tol: t.stall_tol.unwrap_or(d.stall_tol),
            warmup: t.warmup.unwrap_or(d.warmup),
            max_iters: t.max_iters.unwrap_or(d.max_iters),
            shots,
            seed: self.seed,
            init,
        };
        cfg.validate().map_err(|e| anyhow!("train: {e}"))?;
        Ok(cfg)
    }
}

fn label(s: &str, key: &str) -> Result<BasisLabel> {
    s.parse().map_err(|_| anyhow!("{key}: unknown basis label {s:?} (expected RH, RV, LH or LV)"))
}

fn amps_state(amps: &[Amp], dim: usize, key: &str) -> Result<PureState<f64>> {
    if amps.len() != dim {
        bail!("{key}: {} amplitudes, expected {dim}", amps.len());
    }
    PureState::new(amps.iter().map(|a| a.value()).collect()).map_err(|e| anyhow!("{key}: {e}"))
}

fn theta_state(deg: f64, basis: &Option<[String; 2]>, key: &str) -> Result<PureState<f64>> {
    let [p, q] = match basis {
        Some([p, q]) => [label(p, key)?, label(q, key)?],
        None => [BasisLabel::RH, BasisLabel::RV],
    };
    if p == q {
        bail!("{key}.basis: the two labels must differ");
    }
    let t = deg.to_radians();
    let mut v = vec![Complex::new(0.0, 0.0); 4];
    v[p.index()] = Complex::new(t.cos(), 0.0);
    v[q.index()] = Complex::new(t.sin(), 0.0);
    PureState::new(v).map_err(|e| anyhow!("{key}: {e}"))
}

impl StateEntry {
    /// Physical-order states this entry stands for (two for `theta_range`).
    pub fn states(&self, key: &str) -> Result<Vec<PureState<f64>>> {
        let forms = [
            self.terms.is_some(),
            self.amplitudes.is_some(),
            self.alphas.is_some(),
            self.alpha_pi.is_some(),
            self.theta_degrees.is_some(),
            self.theta_range.is_some(),
        ];
        if forms.iter().filter(|&&f| f).count() != 1 {
            bail!("{key}: give exactly one of terms, amplitudes, alphas, alpha_pi, theta_degrees, theta_range");
        }
        if self.basis.is_some() && self.theta_degrees.is_none() && self.theta_range.is_none() {
            bail!("{key}.basis: only valid with theta_degrees or theta_range");
        }
        if let Some(terms) = &self.terms {
            let mut v = vec![Complex::new(0.0, 0.0); 4];
            for t in terms {
                let (l, z) = match t {
                    Term::Real(l, re) => (l, Complex::new(*re, 0.0)),
                    Term::Complex(l, re, im) => (l, Complex::new(*re, *im)),
                };
                v[label(l, key)?.index()] += z;
            }
            return Ok(vec![PureState::new(v).map_err(|e| anyhow!("{key}: {e}"))?]);
        }
        if let Some(a) = &self.amplitudes {
            return Ok(vec![amps_state(a, 4, key)?]);
        }
        if let Some([a1, a2, a3]) = self.alphas {
            let t = AlphaTriple::new(a1, a2, a3).map_err(|e| anyhow!("{key}.alphas: {e}"))?;
            return Ok(vec![alpha_state(&t)]);
        }
        if let Some(a) = self.alpha_pi {
            let t = AlphaTriple::from_pi_units(a).map_err(|e| anyhow!("{key}.alpha_pi: {e}"))?;
            return Ok(vec![alpha_state(&t)]);
        }
        if let Some(d) = self.theta_degrees {
            return Ok(vec![theta_state(d, &self.basis, key)?]);
        }
        let [lo, hi] = self.theta_range.expect("one form present");
        Ok(vec![theta_state(lo, &self.basis, key)?, theta_state(hi, &self.basis, key)?])
    }

    /// `samples` evenly spaced states across a `theta_range`, or the entry's
    /// own states otherwise.
    pub fn sampled_states(&self, samples: usize, key: &str) -> Result<Vec<PureState<f64>>> {
        match self.theta_range {
            Some([lo, hi]) if samples >= 2 => (0..samples)
                .map(|i| theta_state(lo + (hi - lo) * i as f64 / (samples - 1) as f64, &self.basis, key))
                .collect(),
            _ => self.states(key),
        }
    }
}

/// Expands entries; a member's prior is split evenly over its states.
/// Without any priors, every state gets equal weight `1/total`.
fn weighted(entries: &[StateEntry], key: &str, expand: impl Fn(&StateEntry, &str) -> Result<Vec<PureState<f64>>>) -> Result<Vec<(PureState<f64>, Option<f64>)>> {
    let mut out = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let k = format!("{key}[{i}]");
        let states = expand(e, &k)?;
        let n = states.len() as f64;
        out.extend(states.into_iter().map(|s| (s, e.prior.map(|p| p / n))));
    }
    Ok(out)
}

fn priors_of(items: &[(PureState<f64>, Option<f64>)], key: &str) -> Result<Option<Vec<f64>>> {
    let given = items.iter().filter(|(_, p)| p.is_some()).count();
    match given {
        0 => Ok(None),
        n if n == items.len() => Ok(Some(items.iter().map(|(_, p)| p.unwrap()).collect())),
        _ => bail!("{key}: give a prior for every state or for none"),
    }
}

impl EnsembleSection {
    /// Trash-major ensemble and reference.
    pub fn build(&self) -> Result<(Ensemble<f64>, ReferenceState<f64>)> {
        if self.states.is_empty() {
            bail!("ensemble: empty");
        }
        let mut entries = self.states.clone();
        if let Some(p) = &self.priors {
            if p.len() != entries.len() {
                bail!("ensemble.priors: {} values for {} states", p.len(), entries.len());
            }
            if entries.iter().any(|e| e.prior.is_some()) {
                bail!("ensemble.priors: per-state prior also given");
            }
            for (e, &w) in entries.iter_mut().zip(p) {
                e.prior = Some(w);
            }
        }
        let items = weighted(&entries, "ensemble.states", |e, k| e.states(k))?;
        let priors = priors_of(&items, "ensemble.states")?;
        let states = items.into_iter().map(|(s, _)| s).collect();
        let e = Ensemble::from_physical(states, priors, self.trash).map_err(|e| anyhow!("ensemble: {e}"))?;
        let reference = match &self.reference {
            Some(a) => ReferenceState::new(amps_state(a, 2, "ensemble.reference")?),
            None => ReferenceState::ground(2),
        };
        Ok((e, reference))
    }
}

pub struct BuiltProblem {
    /// Physical order.
    pub physical: DiscriminationProblem<f64>,
    /// Trash-major order.
    pub problem: DiscriminationProblem<f64>,
    pub target_a: PureState<f64>,
    pub target_b: PureState<f64>,
    /// Interval-average variant, when any member is a `theta_range`.
    pub interval_average: Option<DiscriminationProblem<f64>>,
}

impl ProblemSection {
    fn assemble(
        &self,
        expand: impl Fn(&StateEntry, &str) -> Result<Vec<PureState<f64>>> + Copy,
    ) -> Result<DiscriminationProblem<f64>> {
        let a = weighted(&self.group_a, "problem.group_a", expand)?;
        let b = weighted(&self.group_b, "problem.group_b", expand)?;
        let mut all = a.clone();
        all.extend(b.iter().cloned());
        let strip = |g: Vec<(PureState<f64>, Option<f64>)>| g.into_iter().map(|(s, _)| s).collect::<Vec<_>>();
        let p = match priors_of(&all, "problem")? {
            None => DiscriminationProblem::uniform(strip(a), strip(b)),
            Some(_) => DiscriminationProblem::new(
                a.into_iter().map(|(s, p)| (s, p.unwrap())).collect(),
                b.into_iter().map(|(s, p)| (s, p.unwrap())).collect(),
            ),
        };
        p.map_err(|e| anyhow!("problem: {e}"))
    }

    pub fn build(&self) -> Result<BuiltProblem> {
        if self.group_a.is_empty() || self.group_b.is_empty() {
            bail!("problem: each group needs at least one state");
        }
        let physical = self.assemble(|e, k| e.states(k))?;
        let ranged = self.group_a.iter().chain(&self.group_b).any(|e| e.theta_range.is_some());
        let interval_average = if ranged {
            let n = self.interval_samples;
            Some(self.assemble(move |e, k| e.sampled_states(n, k))?)
        } else {
            None
        };
        let target = |t: &Option<Vec<Amp>>, i: usize, key: &str| match t {
            Some(a) => amps_state(a, 2, key),
            None => Ok(PureState::basis(2, i)),
        };
        let target_a = target(&self.target_a, 0, "problem.target_a")?;
        let target_b = target(&self.target_b, 1, "problem.target_b")?;
        let trash = self.trash;
        Ok(BuiltProblem {
            problem: physical.map_states(|s| trash.reorder_state(s)),
            physical,
            target_a,
            target_b,
            interval_average,
        })
    }
}

impl GateSection {
    pub fn gate_name(&self) -> Result<GateName> {
        self.gate.parse().map_err(|_| {
            let names: Vec<_> = GateName::ALL.iter().map(|g| g.as_str()).collect();
            anyhow!("gate.gate: unknown gate {:?} (expected one of {})", self.gate, names.join(", "))
        })
    }
}

pub const PARTITION: Partition = Partition::TWO_QUBITS;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_named() {
        let err = parse("kind = \"train\"\nbogus = 1\n").unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
        let err = parse("kind = \"train\"\n[ensemble]\nstates = [{ terms = [[\"RH\", 1.0]], colour = 2 }]\n")
            .unwrap_err()
            .to_string();
        assert!(err.contains("colour"), "{err}");
    }

    #[test]
    fn missing_sections_are_reported() {
        let err = parse("kind = \"discriminate\"\n").unwrap_err().to_string();
        assert!(err.contains("problem"), "{err}");
    }

    #[test]
    fn state_forms() {
        let cfg = parse(
            r#"
kind = "encode"
[ensemble]
trash = "polarization"
states = [
  { terms = [["RH", 1.0], ["RV", 0.0, 1.0]] },
  { amplitudes = [0, 0, 0, [1, 0]] },
  { alpha_pi = [0.5, 0.0, 0.0] },
  { theta_degrees = 90.0, basis = ["RH", "LV"] },
]
"#,
        )
        .unwrap();
        let (e, _) = cfg.ensemble.unwrap().build().unwrap();
        assert_eq!(e.len(), 4);
        let s = e.states()[0].amplitudes();
        // Polarization trash swaps RV and LH.
        assert!((s[2] - Complex::new(0.0, 0.5f64.sqrt())).norm() < 1e-15);
    }

    #[test]
    fn empty_ensemble() {
        let cfg = parse("kind = \"train\"\n[ensemble]\nstates = []\n").unwrap();
        assert_eq!(cfg.ensemble.unwrap().build().unwrap_err().to_string(), "ensemble: empty");
    }

    #[test]
    fn ambiguous_state_is_rejected() {
        let cfg = parse("kind = \"encode\"\n[ensemble]\nstates = [{ theta_degrees = 1.0, alpha_pi = [0, 0, 0] }]\n").unwrap();
        let err = cfg.ensemble.unwrap().build().unwrap_err().to_string();
        assert!(err.contains("ensemble.states[0]"), "{err}");
    }

    #[test]
    fn ranges_expand_to_endpoints() {
        let cfg = parse(
            r#"
kind = "discriminate"
[problem]
group_a = [{ theta_range = [-2.0, 2.0] }]
group_b = [{ theta_range = [58.0, 62.0] }]
"#,
        )
        .unwrap();
        let p = cfg.problem.unwrap().build().unwrap();
        assert_eq!(p.physical.group_a().len(), 2);
        assert!((p.physical.prior_a() - 0.5).abs() < 1e-15);
        let avg = p.interval_average.unwrap();
        assert_eq!(avg.group_a().len(), 41);
        assert!((avg.prior_a() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn train_section_maps_to_config() {
        let cfg = parse("kind = \"train\"\nseed = 4\n[ensemble]\nstates = [{ terms = [[\"RH\", 1]] }]\n[train]\nshots = 100\na = 0.2\n").unwrap();
        let t = cfg.train_config().unwrap();
        assert_eq!((t.shots, t.seed, t.a), (Shots::Count(100), 4, 0.2));
        let bad = parse("kind = \"train\"\n[ensemble]\nstates = []\n[train]\nshots = 5\nexact = true\n").unwrap();
        assert!(bad.train_config().is_err());
    }
}
