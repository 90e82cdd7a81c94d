//! Universal two-qubit gate on path ⊗ polarization: wave-plate stages, the
//! interferometer block formulas, numeric parameter inversion and the gate library.
//!
//! Path is the major qubit (`|R⟩ = 0`, `|L⟩ = 1`), so a 4×4 operator splits into
//! 2×2 polarization blocks `[[U_RR, U_RL], [U_LR, U_LL]]`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optim::{minimize_bfgs, BfgsOptions};
use crate::qlin::ComplexMatrix;
use crate::scalar::{c, cr, Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlateKind {
    Quarter,
    Half,
}

/// Jones matrix of an ideal wave plate with its fast axis at `theta`.
///
/// `HWP(θ) = [[cos 2θ, sin 2θ], [sin 2θ, −cos 2θ]]`,
/// `QWP(θ) = e^{−iπ/4}·[[cos²θ + i sin²θ, (1−i) sinθ cosθ], [(1−i) sinθ cosθ, sin²θ + i cos²θ]]`.
pub fn wave_plate<T: Real>(kind: PlateKind, theta: T) -> ComplexMatrix<T> {
    match kind {
        PlateKind::Half => {
            let (s, c2) = (theta + theta).sin_cos();
            ComplexMatrix::from_rows(&[&[cr(c2), cr(s)], &[cr(s), cr(-c2)]])
        }
        PlateKind::Quarter => {
            let (s, co) = theta.sin_cos();
            let i = C::<T>::i();
            let off = (C::<T>::one() - i).scale(s * co);
            let m = ComplexMatrix::from_rows(&[
                &[cr(co * co) + i.scale(s * s), off],
                &[off, cr(s * s) + i.scale(co * co)],
            ]);
            m.scale(Complex::from_polar(T::one(), -T::FRAC_PI_4()))
        }
    }
}

/// One polarization stage: QWP, HWP, QWP and a phase shifter.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageParams<T> {
    pub qwp1: T,
    pub hwp: T,
    pub qwp2: T,
    pub phase: T,
}

impl<T: Real> StageParams<T> {
    /// Plates at zero with phase π/2, which realizes the 2×2 identity
    /// (`QWP(0)·HWP(0)·QWP(0) = −i·I`).
    pub fn identity() -> Self {
        Self {
            qwp1: T::zero(),
            hwp: T::zero(),
            qwp2: T::zero(),
            phase: T::FRAC_PI_2(),
        }
    }

    pub fn to_array(self) -> [T; 4] {
        [self.qwp1, self.hwp, self.qwp2, self.phase]
    }

    pub fn from_array(a: [T; 4]) -> Self {
        Self {
            qwp1: a[0],
            hwp: a[1],
            qwp2: a[2],
            phase: a[3],
        }
    }

    /// Every angle wrapped into `[0, 2π)`.
    pub fn canonical(self) -> Self {
        Self::from_array(self.to_array().map(wrap_angle))
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }
}

fn wrap_angle<T: Real>(x: T) -> T {
    let tau = T::TAU();
    let r = x % tau;
    let r = if r < T::zero() { r + tau } else { r };
    if r >= tau {
        T::zero()
    } else {
        r
    }
}

/// `e^{i·phase}·QWP(qwp2)·HWP(hwp)·QWP(qwp1)`.
pub fn stage_unitary<T: Real>(p: &StageParams<T>) -> ComplexMatrix<T> {
    let m = &(&wave_plate(PlateKind::Quarter, p.qwp2) * &wave_plate(PlateKind::Half, p.hwp))
        * &wave_plate(PlateKind::Quarter, p.qwp1);
    m.scale(Complex::from_polar(T::one(), p.phase))
}

/// The sixteen device parameters: stages `V₁`, `V₂`, `V_R`, `V_L`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceParams<T> {
    pub v1: StageParams<T>,
    pub v2: StageParams<T>,
    pub vr: StageParams<T>,
    pub vl: StageParams<T>,
}

impl<T: Real> DeviceParams<T> {
    pub const LEN: usize = 16;

    pub fn identity() -> Self {
        let s = StageParams::identity();
        Self {
            v1: s,
            v2: s,
            vr: s,
            vl: s,
        }
    }

    /// Flat layout: `v1, v2, vr, vl`, each as `qwp1, hwp, qwp2, phase`.
    pub fn to_array(&self) -> [T; 16] {
        let mut out = [T::zero(); 16];
        for (chunk, stage) in out.chunks_exact_mut(4).zip([self.v1, self.v2, self.vr, self.vl]) {
            chunk.copy_from_slice(&stage.to_array());
        }
        out
    }

    pub fn from_slice(a: &[T]) -> Result<Self> {
        if a.len() != 16 {
            return Err(Error::Param(format!("{} device parameters, expected 16", a.len())));
        }
        let stage = |i: usize| StageParams::from_array([a[4 * i], a[4 * i + 1], a[4 * i + 2], a[4 * i + 3]]);
        let d = Self {
            v1: stage(0),
            v2: stage(1),
            vr: stage(2),
            vl: stage(3),
        };
        if !d.is_finite() {
            return Err(Error::Param("non-finite device parameter".into()));
        }
        Ok(d)
    }

    pub fn get(&self, k: usize) -> T {
        self.to_array()[k]
    }

    pub fn with(&self, k: usize, value: T) -> Self {
        let mut a = self.to_array();
        a[k] = value;
        Self::from_slice(&a).expect("16 parameters")
    }

    pub fn canonical(&self) -> Self {
        Self {
            v1: self.v1.canonical(),
            v2: self.v2.canonical(),
            vr: self.vr.canonical(),
            vl: self.vl.canonical(),
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.v1, self.v2, self.vr, self.vl].iter().all(|s| s.is_finite())
    }

    /// Uniform in `[0, 2π)` per coordinate.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let a: Vec<T> = (0..16).map(|_| T::lit(rng.random::<f64>() * 2.0 * PI)).collect();
        Self::from_slice(&a).expect("16 parameters")
    }

    /// Human-readable labels matching [`Self::to_array`].
    pub fn labels() -> [&'static str; 16] {
        [
            "v1.qwp1", "v1.hwp", "v1.qwp2", "v1.phase", "v2.qwp1", "v2.hwp", "v2.qwp2", "v2.phase",
            "vr.qwp1", "vr.hwp", "vr.qwp2", "vr.phase", "vl.qwp1", "vl.hwp", "vl.qwp2", "vl.phase",
        ]
    }
}

/// 4×4 unitary from the interferometer block formulas:
/// `U_RR = ½V₂(V_R+V_L)V₁`, `U_LL = ½(V_R+V_L)`, `U_RL = −(i/2)V₂(V_R−V_L)`,
/// `U_LR = (i/2)(V_R−V_L)V₁`.
pub fn synthesize<T: Real>(
    v1: &ComplexMatrix<T>,
    v2: &ComplexMatrix<T>,
    vr: &ComplexMatrix<T>,
    vl: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    for v in [v1, v2, vr, vl] {
        if (v.rows(), v.cols()) != (2, 2) {
            return Err(Error::Dimension(format!("{}x{} stage, expected 2x2", v.rows(), v.cols())));
        }
        v.ensure_unitary()?;
    }
    Ok(synthesize_unchecked(v1, v2, vr, vl))
}

fn synthesize_unchecked<T: Real>(
    v1: &ComplexMatrix<T>,
    v2: &ComplexMatrix<T>,
    vr: &ComplexMatrix<T>,
    vl: &ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let half = T::lit(0.5);
    let sum = (vr + vl).scale_real(half);
    let diff = (vr - vl).scale_real(half);
    let i = C::<T>::i();
    let u_rr = &(v2 * &sum) * v1;
    let u_rl = (v2 * &diff).scale(-i);
    let u_lr = (&diff * v1).scale(i);
    ComplexMatrix::from_blocks(&u_rr, &u_rl, &u_lr, &sum)
}

/// Symmetric beam splitter on the path qubit, lifted to path ⊗ polarization.
pub fn beam_splitter<T: Real>() -> ComplexMatrix<T> {
    let r = c::<T>(FRAC_1_SQRT_2, 0.0);
    let ir = c::<T>(0.0, FRAC_1_SQRT_2);
    let path = ComplexMatrix::from_rows(&[&[r, ir], &[ir, r]]);
    crate::qlin::tensor(&path, &ComplexMatrix::identity(2))
}

/// Mirror pair `−i(|L⟩⟨R| + |R⟩⟨L|)` lifted to path ⊗ polarization.
pub fn mirror<T: Real>() -> ComplexMatrix<T> {
    let z = C::<T>::zero();
    let mi = c::<T>(0.0, -1.0);
    let path = ComplexMatrix::from_rows(&[&[z, mi], &[mi, z]]);
    crate::qlin::tensor(&path, &ComplexMatrix::identity(2))
}

/// The same unitary as [`synthesize`], as the explicit optical product
/// `(V₂⊕I)·U_BS·(V_R⊕V_L)·U_mirror·U_BS·(V₁⊕I)`.
pub fn interferometer_product<T: Real>(
    v1: &ComplexMatrix<T>,
    v2: &ComplexMatrix<T>,
    vr: &ComplexMatrix<T>,
    vl: &ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let id = ComplexMatrix::identity(2);
    let bs = beam_splitter();
    let factors = [
        ComplexMatrix::direct_sum(v2, &id),
        bs.clone(),
        ComplexMatrix::direct_sum(vr, vl),
        mirror(),
        bs,
        ComplexMatrix::direct_sum(v1, &id),
    ];
    factors
        .iter()
        .skip(1)
        .fold(factors[0].clone(), |acc, f| &acc * f)
}

pub fn device_unitary<T: Real>(d: &DeviceParams<T>) -> ComplexMatrix<T> {
    synthesize_unchecked(
        &stage_unitary(&d.v1),
        &stage_unitary(&d.v2),
        &stage_unitary(&d.vr),
        &stage_unitary(&d.vl),
    )
}

/// `1 − |Tr(A†B)|/n`: zero iff `A` and `B` agree up to a global phase.
pub fn phase_insensitive_distance<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> T {
    let n = T::lit(a.rows() as f64);
    T::one() - hs_inner(a, b).norm() / n
}

/// `Tr(A†B)`.
fn hs_inner<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> C<T> {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| x.conj() * y)
        .sum()
}

/// Outcome of a multi-start parameter search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solved<P, T> {
    pub params: P,
    /// Phase-insensitive distance to the target.
    pub residual: T,
    /// Index of the winning start.
    pub start: usize,
}

/// Runs `starts` independent local searches in parallel and keeps the best
/// (lowest index on ties). Start seeds are drawn from `rng` up front, so the
/// result is independent of scheduling.
fn multistart<T: Real, R: Rng + ?Sized>(
    dim: usize,
    starts: usize,
    iters: usize,
    rng: &mut R,
    objective: impl Fn(&[T]) -> T + Sync,
) -> (Vec<T>, T, usize) {
    let seeds: Vec<u64> = (0..starts.max(1)).map(|_| rng.random()).collect();
    let opts = BfgsOptions {
        max_iters: iters,
        target: T::lit(1e-15),
        grad_tol: T::lit(1e-13),
    };
    let runs: Vec<(Vec<T>, T)> = seeds
        .par_iter()
        .map(|&seed| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            let x0: Vec<T> = (0..dim).map(|_| T::lit(r.random::<f64>() * 2.0 * PI)).collect();
            minimize_bfgs(&objective, &x0, opts)
        })
        .collect();
    let (idx, (x, fx)) = runs
        .into_iter()
        .enumerate()
        .fold(None, |best: Option<(usize, (Vec<T>, T))>, (i, run)| match best {
            Some((bi, b)) if b.1 <= run.1 => Some((bi, b)),
            _ => Some((i, run)),
        })
        .expect("at least one start");
    (x, fx, idx)
}

/// Finds device parameters reproducing `target` up to global phase.
///
/// Minimizes `1 − |Tr(target†·U(p))|²/16` by BFGS from `starts` random
/// initial points; the reported residual is `1 − |Tr(target†·U(p))|/4`.
pub fn solve_device_params<T: Real, R: Rng + ?Sized>(
    target: &ComplexMatrix<T>,
    starts: usize,
    iters: usize,
    rng: &mut R,
) -> Result<Solved<DeviceParams<T>, T>> {
    if (target.rows(), target.cols()) != (4, 4) {
        return Err(Error::Dimension("device target must be 4x4".into()));
    }
    target.ensure_unitary()?;
    let sixteen = T::lit(16.0);
    let (x, _, start) = multistart(16, starts, iters, rng, |p: &[T]| {
        let d = DeviceParams::from_slice(p).unwrap_or_default();
        T::one() - hs_inner(target, &device_unitary(&d)).norm_sqr() / sixteen
    });
    let params = DeviceParams::from_slice(&x)?.canonical();
    let residual = phase_insensitive_distance(target, &device_unitary(&params)).max(T::zero());
    Ok(Solved { params, residual, start })
}

/// Single-stage analogue of [`solve_device_params`], exact (phase-sensitive):
/// the phase shifter makes each stage cover all of U(2).
pub fn solve_stage_params<T: Real, R: Rng + ?Sized>(
    target: &ComplexMatrix<T>,
    starts: usize,
    iters: usize,
    rng: &mut R,
) -> Result<Solved<StageParams<T>, T>> {
    if (target.rows(), target.cols()) != (2, 2) {
        return Err(Error::Dimension("stage target must be 2x2".into()));
    }
    target.ensure_unitary()?;
    let dist = |p: &StageParams<T>| {
        let d = &stage_unitary(p) - target;
        d.frobenius_norm().powi(2)
    };
    let (x, _, start) = multistart(4, starts, iters, rng, |p: &[T]| {
        dist(&StageParams::from_array([p[0], p[1], p[2], p[3]]))
    });
    let params = StageParams::from_array([x[0], x[1], x[2], x[3]]).canonical();
    let residual = (&stage_unitary(&params) - target).max_abs();
    Ok(Solved { params, residual, start })
}

/// Named two-qubit gates, in path ⊗ polarization order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateName {
    Identity,
    /// Polarization V flips the path.
    CnotPolCtrlPath,
    /// Path L flips the polarization.
    CnotPathCtrlPol,
    Cz,
    /// Hadamard on the path when polarization is V.
    ChPolCtrlPath,
    /// Hadamard on the polarization when the path is L.
    ChPathCtrlPol,
    Swap,
    SqrtSwap,
    ISwap,
}

impl GateName {
    pub const ALL: [GateName; 9] = [
        GateName::Identity,
        GateName::CnotPolCtrlPath,
        GateName::CnotPathCtrlPol,
        GateName::Cz,
        GateName::ChPolCtrlPath,
        GateName::ChPathCtrlPol,
        GateName::Swap,
        GateName::SqrtSwap,
        GateName::ISwap,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GateName::Identity => "identity",
            GateName::CnotPolCtrlPath => "cnot_pol_ctrl_path",
            GateName::CnotPathCtrlPol => "cnot_path_ctrl_pol",
            GateName::Cz => "cz",
            GateName::ChPolCtrlPath => "ch_pol_ctrl_path",
            GateName::ChPathCtrlPol => "ch_path_ctrl_pol",
            GateName::Swap => "swap",
            GateName::SqrtSwap => "sqrt_swap",
            GateName::ISwap => "iswap",
        }
    }
}

impl fmt::Display for GateName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.to_ascii_lowercase().replace('-', "_");
        GateName::ALL
            .into_iter()
            .find(|g| g.as_str() == key)
            .ok_or_else(|| Error::Parse(format!("unknown gate {s:?}")))
    }
}

/// Exact matrix of a library gate.
pub fn gate_library<T: Real>(g: GateName) -> ComplexMatrix<T> {
    let h = FRAC_1_SQRT_2;
    let perm = |p: [usize; 4]| {
        ComplexMatrix::from_fn(4, 4, |i, j| if p[j] == i { C::one() } else { C::zero() })
    };
    // Identity outside the 2-dimensional subspace {a, b}, `block` inside it.
    let controlled = |a: usize, b: usize, block: [[f64; 2]; 2]| {
        let mut m = ComplexMatrix::identity(4);
        let idx = [a, b];
        for (r, &i) in idx.iter().enumerate() {
            for (s, &j) in idx.iter().enumerate() {
                m[(i, j)] = c(block[r][s], 0.0);
            }
        }
        m
    };
    match g {
        GateName::Identity => ComplexMatrix::identity(4),
        GateName::CnotPolCtrlPath => perm([0, 3, 2, 1]),
        GateName::CnotPathCtrlPol => perm([0, 1, 3, 2]),
        GateName::Cz => ComplexMatrix::diag_real(&[T::one(), T::one(), T::one(), -T::one()]),
        GateName::ChPolCtrlPath => controlled(1, 3, [[h, h], [h, -h]]),
        GateName::ChPathCtrlPol => controlled(2, 3, [[h, h], [h, -h]]),
        GateName::Swap => perm([0, 2, 1, 3]),
        GateName::SqrtSwap => {
            let p = c::<T>(0.5, 0.5);
            let m = c::<T>(0.5, -0.5);
            let mut u = ComplexMatrix::identity(4);
            u[(1, 1)] = p;
            u[(2, 2)] = p;
            u[(1, 2)] = m;
            u[(2, 1)] = m;
            u
        }
        GateName::ISwap => {
            let mut u = ComplexMatrix::identity(4);
            u[(1, 1)] = C::zero();
            u[(2, 2)] = C::zero();
            u[(1, 2)] = C::i();
            u[(2, 1)] = C::i();
            u
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::{random_unitary, PureState};
    use crate::qstate::BasisLabel;
    use rand::SeedableRng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn equal_up_to_phase(a: &ComplexMatrix<f64>, b: &ComplexMatrix<f64>, tol: f64) -> bool {
        phase_insensitive_distance(a, b).abs() <= tol
    }

    #[test]
    fn half_wave_plate_examples() {
        let h = PureState::<f64>::basis(2, 0);
        let out = h.evolve(&wave_plate(PlateKind::Half, 0.0)).unwrap();
        assert!((out.inner(&h).norm() - 1.0).abs() < 1e-15);
        let out = h.evolve(&wave_plate(PlateKind::Half, PI / 4.0)).unwrap();
        assert!((out.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quarter_wave_plate_aligned_axis() {
        let q = wave_plate::<f64>(PlateKind::Quarter, 0.0);
        assert!(q[(0, 1)].norm() < 1e-16 && q[(1, 0)].norm() < 1e-16);
        let rel = q[(1, 1)] / q[(0, 0)];
        assert!((rel - C::<f64>::i()).norm() < 1e-15);
    }

    #[test]
    fn plate_algebra() {
        let mut r = rng(1);
        for _ in 0..100 {
            let t: f64 = r.random::<f64>() * 2.0 * PI;
            let q = wave_plate(PlateKind::Quarter, t);
            let h = wave_plate(PlateKind::Half, t);
            assert!(q.is_unitary(1e-14) && h.is_unitary(1e-14));
            assert!(equal_up_to_phase(&(&q * &q), &h, 1e-14));
            assert!(equal_up_to_phase(&(&h * &h), &ComplexMatrix::identity(2), 1e-14));
            let q4 = &(&q * &q) * &(&q * &q);
            assert!(equal_up_to_phase(&q4, &ComplexMatrix::identity(2), 1e-14));
            let det = h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)];
            assert!((det.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn stage_examples() {
        let id = stage_unitary(&StageParams::<f64>::identity());
        assert!(id.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        let neg = StageParams {
            phase: StageParams::<f64>::identity().phase + PI,
            ..StageParams::identity()
        };
        let m = stage_unitary(&neg);
        assert!(m.max_abs_diff(&ComplexMatrix::identity(2).scale_real(-1.0)) < 1e-15);
        let mut r = rng(2);
        for _ in 0..100 {
            let p = StageParams::from_array([0; 4].map(|_: i32| r.random::<f64>() * 7.0));
            assert!(stage_unitary(&p).unitarity_error() <= 1e-13);
        }
    }

    #[test]
    fn stage_solver_finds_identity() {
        let s = solve_stage_params(&ComplexMatrix::<f64>::identity(2), 4, 200, &mut rng(3)).unwrap();
        assert!(s.residual <= 1e-8, "{}", s.residual);
    }

    #[test]
    fn stages_cover_u2() {
        let mut r = rng(4);
        for _ in 0..100 {
            let target = random_unitary::<f64, _>(2, &mut r);
            let s = solve_stage_params(&target, 4, 300, &mut r).unwrap();
            assert!(s.residual <= 1e-6, "{}", s.residual);
        }
    }

    #[test]
    fn canonical_wraps_into_range() {
        let p = StageParams { qwp1: -0.5, hwp: 7.0, qwp2: 2.0 * PI, phase: 1.0 }.canonical();
        for x in p.to_array() {
            assert!((0.0..2.0 * PI).contains(&x));
        }
        assert!((p.qwp1 - (2.0 * PI - 0.5)).abs() < 1e-15);
        assert_eq!(p.qwp2, 0.0);
    }

    #[test]
    fn synthesize_examples() {
        let id = ComplexMatrix::<f64>::identity(2);
        let u = synthesize(&id, &id, &id, &id).unwrap();
        assert_eq!(u.max_abs_diff(&ComplexMatrix::identity(4)), 0.0);

        let u = synthesize(&id, &id, &id, &id.scale_real(-1.0)).unwrap();
        let z = ComplexMatrix::zeros(2, 2);
        let want = ComplexMatrix::from_blocks(&z, &id.scale(-C::i()), &id.scale(C::i()), &z);
        assert!(u.max_abs_diff(&want) < 1e-15);

        let bad = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(matches!(synthesize(&bad, &id, &id, &id), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn beam_splitter_mirror_identity() {
        let bs = beam_splitter::<f64>();
        let p = &(&bs * &mirror()) * &bs;
        assert!(p.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn device_examples() {
        let u = device_unitary(&DeviceParams::<f64>::identity());
        assert!(u.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);

        let mut d = DeviceParams::<f64>::identity();
        d.vr.phase += PI;
        let u = device_unitary(&d);
        let id = ComplexMatrix::identity(2);
        let z = ComplexMatrix::zeros(2, 2);
        let want = ComplexMatrix::from_blocks(&z, &id.scale(C::i()), &id.scale(-C::i()), &z);
        assert!(u.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn device_params_layout() {
        let a: Vec<f64> = (0..16).map(|i| i as f64 / 10.0).collect();
        let d = DeviceParams::from_slice(&a).unwrap();
        assert_eq!(d.to_array().to_vec(), a);
        assert_eq!(d.vr.qwp1, 0.8);
        assert_eq!(d.with(5, 9.0).v2.hwp, 9.0);
        assert!(DeviceParams::<f64>::from_slice(&a[..15]).is_err());
        assert!(DeviceParams::from_slice(&[f64::NAN; 16]).is_err());
    }

    #[test]
    fn gate_library_actions() {
        for g in GateName::ALL {
            assert!(gate_library::<f64>(g).is_unitary(1e-15), "{g}");
            assert_eq!(g.as_str().parse::<GateName>().unwrap(), g);
        }
        assert_eq!(gate_library::<f64>(GateName::Identity), ComplexMatrix::identity(4));
        let ket = |l: BasisLabel| PureState::<f64>::basis(4, l.index());
        let swap = gate_library(GateName::Swap);
        assert_eq!(ket(BasisLabel::RV).evolve(&swap).unwrap(), ket(BasisLabel::LH));
        let cnot = gate_library(GateName::CnotPolCtrlPath);
        assert_eq!(ket(BasisLabel::RV).evolve(&cnot).unwrap(), ket(BasisLabel::LV));
        assert_eq!(ket(BasisLabel::RH).evolve(&cnot).unwrap(), ket(BasisLabel::RH));
        let cnot = gate_library(GateName::CnotPathCtrlPol);
        assert_eq!(ket(BasisLabel::LH).evolve(&cnot).unwrap(), ket(BasisLabel::LV));
        let sq = gate_library::<f64>(GateName::SqrtSwap);
        assert!((&sq * &sq).max_abs_diff(&swap) < 1e-15);
    }

    #[test]
    fn solver_reaches_identity_and_swap() {
        let s = solve_device_params(&ComplexMatrix::<f64>::identity(4), 4, 500, &mut rng(5)).unwrap();
        assert!(s.residual <= 1e-8, "{}", s.residual);
        let target = gate_library::<f64>(GateName::Swap);
        let s = solve_device_params(&target, 8, 500, &mut rng(6)).unwrap();
        assert!(s.residual <= 1e-3, "{}", s.residual);
    }

    #[test]
    fn solver_is_deterministic() {
        let target = gate_library::<f64>(GateName::Cz);
        let a = solve_device_params(&target, 4, 100, &mut rng(7)).unwrap();
        let b = solve_device_params(&target, 4, 100, &mut rng(7)).unwrap();
        assert_eq!(a, b);
    }
}
