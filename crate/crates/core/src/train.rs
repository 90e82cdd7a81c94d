//! Coordinate-wise perturbative training of the device parameters, with annealing.

use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::disc::{check_targets, DiscriminationProblem};
use crate::encoder::ReferenceState;
use crate::error::{Error, Result};
use crate::photonic::{device_unitary, DeviceParams};
use crate::qlin::{trash_overlap, ComplexMatrix, Partition, PureState};
use crate::qstate::{Ensemble, TrashQubit};
use crate::scalar::Real;

/// How overlaps are estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shots {
    Exact,
    Count(u64),
}

impl Default for Shots {
    fn default() -> Self {
        Shots::Count(3000)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Init<T> {
    /// Uniform in `[0, 2π)` per coordinate, drawn from the run's rng.
    Random,
    Params(DeviceParams<T>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig<T> {
    /// Perturbation size.
    pub a: T,
    /// Learning scale.
    pub b: T,
    /// Number of anneal events after which training stops.
    pub max_outer: usize,
    /// Window length, in iterations, for the anneal check.
    pub patience: usize,
    pub stall_tol: T,
    /// Iterations before the first anneal check.
    pub warmup: usize,
    pub shots: Shots,
    pub seed: u64,
    pub init: Init<T>,
    pub max_iters: usize,
}

impl<T: Real> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            a: T::lit(0.5),
            b: T::lit(1.0),
            max_outer: 10,
            patience: 10,
            stall_tol: T::lit(1e-4),
            warmup: 300,
            shots: Shots::default(),
            seed: 0,
            init: Init::Random,
            max_iters: 1000,
        }
    }
}

impl<T: Real> TrainConfig<T> {
    pub fn exact() -> Self {
        Self {
            shots: Shots::Exact,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |v: T| v > T::zero() && v.is_finite();
        if !pos(self.a) || !pos(self.b) {
            return Err(Error::Param("a and b must be positive".into()));
        }
        if self.patience == 0 {
            return Err(Error::Param("patience must be at least 1".into()));
        }
        if self.shots == Shots::Count(0) {
            return Err(Error::Param("shots must be at least 1".into()));
        }
        if !(self.stall_tol >= T::zero()) {
            return Err(Error::Param("stall_tol must be non-negative".into()));
        }
        if let Init::Params(p) = &self.init {
            if !p.is_finite() {
                return Err(Error::Param("non-finite initial parameter".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IterationRecord<T> {
    pub iteration: usize,
    /// Estimated cost `1 − (x₊ + x₋)/2`.
    pub cost: T,
    pub a: T,
    pub b: T,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainTrace<T> {
    pub records: Vec<IterationRecord<T>>,
    pub final_params: DeviceParams<T>,
    /// Exact cost at the final parameters, whatever the shot setting.
    pub final_cost: T,
    /// Iterations after which `a` and `b` were reduced.
    pub anneal_iterations: Vec<usize>,
    pub seed: u64,
}

impl<T: Real> TrainTrace<T> {
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "iteration,cost,a,b,k")?;
        for r in &self.records {
            writeln!(w, "{},{},{},{},{}", r.iteration, r.cost, r.a, r.b, r.k)?;
        }
        Ok(())
    }
}

/// Weighted pure inputs, each with the trash state it should leave behind.
///
/// Inputs and targets are in trash-major order; `layout` maps the physical
/// device unitary into that order.
#[derive(Debug, Clone)]
pub struct Objective<T> {
    inputs: Vec<(PureState<T>, T, PureState<T>)>,
    partition: Partition,
    layout: TrashQubit,
}

impl<T: Real> Objective<T> {
    /// Every state should leave the trash in `reference`.
    pub fn encoding(e: &Ensemble<T>, reference: &ReferenceState<T>, layout: TrashQubit) -> Result<Self> {
        check_layout(e.partition(), layout)?;
        if reference.dim() != e.partition().dim_a {
            return Err(Error::Dimension(format!(
                "reference of dimension {} for a trash of dimension {}",
                reference.dim(),
                e.partition().dim_a
            )));
        }
        let inputs = e.iter().map(|(s, p)| (s.clone(), p, reference.state().clone())).collect();
        Ok(Self {
            inputs,
            partition: e.partition(),
            layout,
        })
    }

    /// Group a toward `target_a`, group b toward the orthogonal `target_b`.
    pub fn discrimination(
        p: &DiscriminationProblem<T>,
        dims: Partition,
        target_a: &PureState<T>,
        target_b: &PureState<T>,
        layout: TrashQubit,
    ) -> Result<Self> {
        check_layout(dims, layout)?;
        check_targets(dims, target_a, target_b)?;
        if p.dim() != dims.dim() {
            return Err(Error::Dimension(format!("problem of dimension {} on {}x{}", p.dim(), dims.dim_a, dims.dim_b)));
        }
        let side = |g: &[(PureState<T>, T)], t: &PureState<T>| {
            g.iter().map(|(s, w)| (s.clone(), *w, t.clone())).collect::<Vec<_>>()
        };
        let mut inputs = side(p.group_a(), target_a);
        inputs.extend(side(p.group_b(), target_b));
        Ok(Self {
            inputs,
            partition: dims,
            layout,
        })
    }

    pub fn partition(&self) -> Partition {
        self.partition
    }

    /// Exact overlap of each input with its target under `u` (physical order).
    pub fn overlaps(&self, u: &ComplexMatrix<T>) -> Vec<T> {
        let u = self.layout.reorder_operator(u);
        self.inputs
            .iter()
            .map(|(s, _, t)| trash_overlap(&u.mul_vec(s.amplitudes()), t, self.partition))
            .collect()
    }

    /// Weighted mean overlap, sampled per input when `shots` is a count.
    pub fn mean_overlap<R: Rng + ?Sized>(&self, u: &ComplexMatrix<T>, shots: Shots, rng: &mut R) -> T {
        self.overlaps(u)
            .into_iter()
            .zip(&self.inputs)
            .map(|(x, (_, w, _))| *w * sample_overlap(x, shots, rng))
            .sum()
    }

    pub fn cost(&self, params: &DeviceParams<T>) -> T {
        let u = device_unitary(params);
        let kept: T = self.overlaps(&u).into_iter().zip(&self.inputs).map(|(x, (_, w, _))| *w * x).sum();
        (T::one() - kept).max(T::zero())
    }
}

fn check_layout(dims: Partition, layout: TrashQubit) -> Result<()> {
    if layout == TrashQubit::Polarization && dims != Partition::TWO_QUBITS {
        return Err(Error::Dimension("polarization trash needs a two-qubit partition".into()));
    }
    if dims.dim() != 4 {
        return Err(Error::Dimension(format!("the device acts on 4 dimensions, not {}", dims.dim())));
    }
    Ok(())
}

/// `⟨ψ|Tr_B(U|φ⟩⟨φ|U†)|ψ⟩`.
pub fn overlap_probability<T: Real>(
    u: &ComplexMatrix<T>,
    state: &PureState<T>,
    reference: &ReferenceState<T>,
    dims: Partition,
) -> Result<T> {
    if u.rows() != dims.dim() || u.cols() != dims.dim() || state.dim() != dims.dim() || reference.dim() != dims.dim_a {
        return Err(Error::Dimension(format!(
            "{}x{} operator, state of dimension {}, reference of dimension {} on {}x{}",
            u.rows(),
            u.cols(),
            state.dim(),
            reference.dim(),
            dims.dim_a,
            dims.dim_b
        )));
    }
    let p = trash_overlap(&u.mul_vec(state.amplitudes()), reference.state(), dims);
    Ok(p.max(T::zero()).min(T::one()))
}

/// `k/shots` with `k ~ Binomial(shots, p)`, or `p` itself in exact mode.
pub fn sample_overlap<T: Real, R: Rng + ?Sized>(p: T, shots: Shots, rng: &mut R) -> T {
    match shots {
        Shots::Exact => p,
        Shots::Count(n) => {
            let p = p.as_f64().clamp(0.0, 1.0);
            let k = Binomial::new(n, p).expect("probability in [0, 1]").sample(rng);
            T::lit(k as f64 / n as f64)
        }
    }
}

/// One step: measure at `p_k ± a`, then move `p_k` by `(b/a)(x₊ − x₋)`.
/// Returns the new parameters with `x₊` and `x₋`.
#[allow(clippy::too_many_arguments)]
pub fn spsa_iteration<T: Real, R: Rng + ?Sized>(
    params: &DeviceParams<T>,
    k: usize,
    a: T,
    b: T,
    objective: &Objective<T>,
    shots: Shots,
    rng: &mut R,
) -> (DeviceParams<T>, T, T) {
    let pk = params.get(k);
    let xp = objective.mean_overlap(&device_unitary(&params.with(k, pk + a)), shots, rng);
    let xm = objective.mean_overlap(&device_unitary(&params.with(k, pk - a)), shots, rng);
    let next = if xp == xm { *params } else { params.with(k, pk + b / a * (xp - xm)) };
    (next, xp, xm)
}

/// Full training loop.
///
/// After `warmup` iterations, every `patience` iterations the window's mean
/// cost is compared with the previous window's; if it has not dropped by more than `stall_tol`,
/// `a ← a/1.2` and `b ← b/1.1`. Training stops after `max_outer` such events
/// or `max_iters` iterations.
pub fn train<T: Real>(cfg: &TrainConfig<T>, objective: &Objective<T>) -> Result<TrainTrace<T>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = match &cfg.init {
        Init::Random => DeviceParams::random(&mut rng),
        Init::Params(p) => *p,
    };
    let (mut a, mut b) = (cfg.a, cfg.b);
    let mut records = Vec::with_capacity(cfg.max_iters);
    let mut anneal_iterations = Vec::new();
    let mut prev_window: Option<T> = None;
    let two = T::lit(2.0);
    for iteration in 0..cfg.max_iters {
        if anneal_iterations.len() >= cfg.max_outer {
            break;
        }
        let k = rng.random_range(0..DeviceParams::<T>::LEN);
        let (next, xp, xm) = spsa_iteration(&params, k, a, b, objective, cfg.shots, &mut rng);
        params = next;
        records.push(IterationRecord {
            iteration,
            cost: T::one() - (xp + xm) / two,
            a,
            b,
            k,
        });
        let checked = records.len().saturating_sub(cfg.warmup);
        if checked > 0 && checked % cfg.patience == 0 {
            let window = &records[records.len() - cfg.patience..];
            let mean = window.iter().map(|r| r.cost).sum::<T>() / T::lit(cfg.patience as f64);
            if let Some(prev) = prev_window {
                if mean >= prev - cfg.stall_tol {
                    a /= T::lit(1.2);
                    b /= T::lit(1.1);
                    anneal_iterations.push(iteration);
                }
            }
            prev_window = Some(mean);
        }
    }
    Ok(TrainTrace {
        final_cost: objective.cost(&params),
        final_params: params.canonical(),
        records,
        anneal_iterations,
        seed: cfg.seed,
    })
}

/// Restarts with seeds `cfg.seed + i`, run in parallel. Results are in seed order.
pub fn train_restarts<T: Real>(cfg: &TrainConfig<T>, objective: &Objective<T>, runs: usize) -> Result<Vec<TrainTrace<T>>> {
    cfg.validate()?;
    (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            let c = TrainConfig {
                seed: cfg.seed.wrapping_add(i),
                ..cfg.clone()
            };
            train(&c, objective)
        })
        .collect()
}

/// Per-iteration mean and population standard deviation of the recorded cost.
/// Runs that stopped early contribute their last cost thereafter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStats<T> {
    pub mean: Vec<T>,
    pub std: Vec<T>,
}

impl<T: Real> TraceStats<T> {
    pub fn from_traces(traces: &[TrainTrace<T>]) -> Self {
        let len = traces.iter().map(|t| t.records.len()).max().unwrap_or(0);
        let n = T::lit(traces.len().max(1) as f64);
        let mut mean = Vec::with_capacity(len);
        let mut std = Vec::with_capacity(len);
        for i in 0..len {
            let vals: Vec<T> = traces
                .iter()
                .filter_map(|t| t.records.get(i).or(t.records.last()).map(|r| r.cost))
                .collect();
            let m = vals.iter().copied().sum::<T>() / n;
            let v = vals.iter().map(|x| (*x - m).powi(2)).sum::<T>() / n;
            mean.push(m);
            std.push(v.sqrt());
        }
        Self { mean, std }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "iteration,mean,std")?;
        for (i, (m, s)) in self.mean.iter().zip(&self.std).enumerate() {
            writeln!(w, "{i},{m},{s}")?;
        }
        Ok(())
    }
}

/// Mean and population standard deviation of a set of values.
pub fn mean_std<T: Real>(v: &[T]) -> (T, T) {
    let n = T::lit(v.len().max(1) as f64);
    let m = v.iter().copied().sum::<T>() / n;
    let s = (v.iter().map(|x| (*x - m).powi(2)).sum::<T>() / n).sqrt();
    (m, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::{infidelity_cost, perfect_encoder};
    use crate::photonic::{gate_library, solve_device_params, GateName};
    use crate::qlin::{random_state, ComplexMatrix};
    use crate::qstate::{two_qubit_state, BasisLabel};
    use crate::scalar::C;

    fn pair() -> Ensemble<f64> {
        Ensemble::from_physical(
            vec![
                two_qubit_state(&[(BasisLabel::RH, C::new(1.0, 0.0))]).unwrap(),
                two_qubit_state(&[(BasisLabel::LV, C::new(1.0, 0.0))]).unwrap(),
            ],
            None,
            TrashQubit::Path,
        )
        .unwrap()
    }

    #[test]
    fn overlap_examples() {
        let dims = Partition::TWO_QUBITS;
        let r = ReferenceState::ground(2);
        let id = ComplexMatrix::<f64>::identity(4);
        assert!((overlap_probability(&id, &PureState::basis(4, 0), &r, dims).unwrap() - 1.0).abs() < 1e-15);
        assert!(overlap_probability(&id, &PureState::basis(4, 2), &r, dims).unwrap().abs() < 1e-15);
        // Second qubit controls the first: |11⟩ → |01⟩.
        let cnot = gate_library::<f64>(GateName::CnotPolCtrlPath);
        assert!((overlap_probability(&cnot, &PureState::basis(4, 3), &r, dims).unwrap() - 1.0).abs() < 1e-15);
        assert!(overlap_probability(&id, &PureState::basis(2, 0), &r, dims).is_err());
    }

    #[test]
    fn overlaps_average_to_the_cost() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let e = pair();
        let r = ReferenceState::ground(2);
        let obj = Objective::encoding(&e, &r, TrashQubit::Path).unwrap();
        for _ in 0..50 {
            let p = DeviceParams::random(&mut rng);
            let u = device_unitary(&p);
            let direct = 1.0 - obj.mean_overlap(&u, Shots::Exact, &mut rng);
            assert!((direct - infidelity_cost(&u, &e, &r).unwrap()).abs() < 1e-12);
            assert!((obj.cost(&p) - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn sampling_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(sample_overlap(1.0, Shots::Count(7), &mut rng), 1.0);
        assert_eq!(sample_overlap(0.0, Shots::Count(7), &mut rng), 0.0);
        assert_eq!(sample_overlap(0.37, Shots::Exact, &mut rng), 0.37);
        let m = (0..100).map(|_| sample_overlap(0.5, Shots::Count(10_000), &mut rng)).sum::<f64>() / 100.0;
        assert!((m - 0.5).abs() < 0.02);
    }

    #[test]
    fn update_rule_arithmetic() {
        let (xp, xm, a, b) = (0.9, 0.8, 0.1, 0.05);
        assert!((b / a * (xp - xm) - 0.05f64).abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let obj = Objective::encoding(&pair(), &ReferenceState::ground(2), TrashQubit::Path).unwrap();
        let p = DeviceParams::random(&mut rng);
        for k in 0..16 {
            let (next, xp, xm) = spsa_iteration(&p, k, 0.2, 0.1, &obj, Shots::Exact, &mut rng);
            let (old, new) = (p.to_array(), next.to_array());
            for j in 0..16 {
                if j == k {
                    assert!((new[j] - old[j] - 0.5 * (xp - xm)).abs() < 1e-12);
                } else {
                    assert_eq!(new[j], old[j]);
                }
            }
        }
    }

    #[test]
    fn finite_difference_sign_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let obj = Objective::encoding(&pair(), &ReferenceState::ground(2), TrashQubit::Path).unwrap();
        let a = 0.05;
        let mut checked = 0;
        for _ in 0..100 {
            let p = DeviceParams::random(&mut rng);
            let k = rng.random_range(0..16);
            let (_, xp, xm) = spsa_iteration(&p, k, a, 0.1, &obj, Shots::Exact, &mut rng);
            let h = 1e-6;
            let d = ((1.0 - obj.cost(&p.with(k, p.get(k) + h))) - (1.0 - obj.cost(&p.with(k, p.get(k) - h)))) / (2.0 * h);
            if (xp - xm).abs() / (2.0 * a) > 1e-3 && d.abs() > 1e-3 {
                assert_eq!((xp - xm).signum(), d.signum());
                checked += 1;
            }
        }
        assert!(checked > 50);
    }

    #[test]
    fn optimum_is_a_fixed_point() {
        let r = ReferenceState::ground(2);
        let one = Ensemble::from_physical(
            vec![two_qubit_state(&[(BasisLabel::RH, C::new(1.0, 0.0))]).unwrap()],
            None,
            TrashQubit::Path,
        )
        .unwrap();
        let obj = Objective::encoding(&one, &r, TrashQubit::Path).unwrap();
        assert!(obj.cost(&DeviceParams::identity()) < 1e-15);
        for a in [0.3, 1e-2] {
            let cfg = TrainConfig {
                a,
                init: Init::Params(DeviceParams::identity()),
                ..TrainConfig::exact()
            };
            assert!(train(&cfg, &obj).unwrap().final_cost <= 1e-6);
        }

        let e = pair();
        let sol = perfect_encoder(&e, &r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let solved = solve_device_params(&sol.unitary, 8, 400, &mut rng).unwrap();
        let obj = Objective::encoding(&e, &r, TrashQubit::Path).unwrap();
        assert!(obj.cost(&solved.params) < 1e-8);
        for k in 0..16 {
            let (_, xp, xm) = spsa_iteration(&solved.params, k, 1e-3, 0.15, &obj, Shots::Exact, &mut rng);
            assert!((0.15 / 1e-3 * (xp - xm)).abs() <= 0.15 * 1e-2);
        }
    }

    #[test]
    fn trace_invariants_and_determinism() {
        let obj = Objective::encoding(&pair(), &ReferenceState::ground(2), TrashQubit::Path).unwrap();
        let cfg = TrainConfig {
            seed: 11,
            shots: Shots::Count(500),
            ..TrainConfig::default()
        };
        let t1 = train(&cfg, &obj).unwrap();
        let t2 = train(&cfg, &obj).unwrap();
        assert_eq!(t1, t2);
        assert!(t1.anneal_iterations.len() <= cfg.max_outer);
        for w in t1.records.windows(2) {
            assert!(w[1].a <= w[0].a && w[1].b <= w[0].b);
        }
        for r in &t1.records {
            assert!((0.0..=1.0).contains(&r.cost));
            let n = t1.anneal_iterations.iter().filter(|&&i| i < r.iteration).count() as i32;
            assert!((r.a - cfg.a / 1.2f64.powi(n)).abs() < 1e-12);
            assert!((r.b - cfg.b / 1.1f64.powi(n)).abs() < 1e-12);
        }
        let mut csv = Vec::new();
        t1.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("iteration,cost,a,b,k\n"));
        assert_eq!(text.lines().count(), t1.records.len() + 1);
    }

    #[test]
    fn restarts_are_ordered_and_reproducible() {
        let obj = Objective::encoding(&pair(), &ReferenceState::ground(2), TrashQubit::Path).unwrap();
        let cfg = TrainConfig {
            max_iters: 50,
            seed: 7,
            ..TrainConfig::exact()
        };
        let runs = train_restarts(&cfg, &obj, 4).unwrap();
        for (i, r) in runs.iter().enumerate() {
            assert_eq!(r.seed, 7 + i as u64);
            let solo = train(&TrainConfig { seed: r.seed, ..cfg.clone() }, &obj).unwrap();
            assert_eq!(&solo, r);
        }
        let stats = TraceStats::from_traces(&runs);
        assert_eq!(stats.mean.len(), 50);
    }

    #[test]
    fn rejects_bad_config() {
        let obj = Objective::encoding(&pair(), &ReferenceState::ground(2), TrashQubit::Path).unwrap();
        for cfg in [
            TrainConfig { a: 0.0, ..TrainConfig::exact() },
            TrainConfig { b: -1.0, ..TrainConfig::exact() },
            TrainConfig { patience: 0, ..TrainConfig::exact() },
            TrainConfig { shots: Shots::Count(0), ..TrainConfig::default() },
        ] {
            assert!(matches!(train(&cfg, &obj), Err(Error::Param(_))));
        }
    }

    #[test]
    fn discrimination_objective_matches_group_cost() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let dims = Partition::TWO_QUBITS;
        let g = |rng: &mut ChaCha8Rng| (0..2).map(|_| random_state::<f64, _>(4, rng)).collect::<Vec<_>>();
        let p = DiscriminationProblem::uniform(g(&mut rng), g(&mut rng)).unwrap();
        let (ta, tb) = (PureState::basis(2, 0), PureState::basis(2, 1));
        let obj = Objective::discrimination(&p, dims, &ta, &tb, TrashQubit::Path).unwrap();
        let params = DeviceParams::random(&mut rng);
        let want = crate::disc::group_encoding_cost(&device_unitary(&params), &p, dims, &ta, &tb).unwrap();
        assert!((obj.cost(&params) - want).abs() < 1e-12);
    }
}
