//! Minimum-error discrimination between two weighted groups of pure states.

use crate::error::{Error, Result};
use crate::qlin::{herm_eig, trash_overlap, ComplexMatrix, Partition, PureState};
use crate::qstate::validate_priors;
use crate::scalar::{Real, C};

/// Two groups of pure states; priors over both groups together sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationProblem<T> {
    group_a: Vec<(PureState<T>, T)>,
    group_b: Vec<(PureState<T>, T)>,
}

impl<T: Real> DiscriminationProblem<T> {
    pub fn new(group_a: Vec<(PureState<T>, T)>, group_b: Vec<(PureState<T>, T)>) -> Result<Self> {
        if group_a.is_empty() || group_b.is_empty() {
            return Err(Error::Empty("discrimination group"));
        }
        let dim = group_a[0].0.dim();
        if group_a.iter().chain(&group_b).any(|(s, _)| s.dim() != dim) {
            return Err(Error::Dimension("group states differ in dimension".into()));
        }
        let priors: Vec<T> = group_a.iter().chain(&group_b).map(|(_, p)| *p).collect();
        validate_priors(&priors, priors.len())?;
        Ok(Self { group_a, group_b })
    }

    /// Equal priors over all members.
    pub fn uniform(group_a: Vec<PureState<T>>, group_b: Vec<PureState<T>>) -> Result<Self> {
        let p = T::one() / T::lit((group_a.len() + group_b.len()) as f64);
        Self::new(
            group_a.into_iter().map(|s| (s, p)).collect(),
            group_b.into_iter().map(|s| (s, p)).collect(),
        )
    }

    pub fn group_a(&self) -> &[(PureState<T>, T)] {
        &self.group_a
    }

    pub fn group_b(&self) -> &[(PureState<T>, T)] {
        &self.group_b
    }

    pub fn dim(&self) -> usize {
        self.group_a[0].0.dim()
    }

    pub fn prior_a(&self) -> T {
        self.group_a.iter().map(|(_, p)| *p).sum()
    }

    /// `Σ P_ai|Ψ_ai⟩⟨Ψ_ai| − Σ P_bi|Ψ_bi⟩⟨Ψ_bi|`.
    pub fn difference_operator(&self) -> ComplexMatrix<T> {
        let n = self.dim();
        let acc = |g: &[(PureState<T>, T)]| {
            g.iter().fold(ComplexMatrix::zeros(n, n), |m, (s, p)| &m + &s.projector().scale_real(*p))
        };
        &acc(&self.group_a) - &acc(&self.group_b)
    }

    /// Maps every member through `f` (e.g. a qubit reordering).
    pub fn map_states(&self, f: impl Fn(&PureState<T>) -> PureState<T>) -> Self {
        let m = |g: &[(PureState<T>, T)]| g.iter().map(|(s, p)| (f(s), *p)).collect();
        Self {
            group_a: m(&self.group_a),
            group_b: m(&self.group_b),
        }
    }
}

#[derive(Debug, Clone)]
pub struct HelstromResult<T> {
    pub p_error: T,
    /// Projector onto the positive eigenspace of the difference operator.
    pub projector_a: ComplexMatrix<T>,
    pub projector_b: ComplexMatrix<T>,
}

/// Optimal two-outcome measurement and its error probability.
///
/// Eigenvalues within round-off of zero go to `Π_b`.
pub fn helstrom_bound<T: Real>(p: &DiscriminationProblem<T>) -> Result<HelstromResult<T>> {
    let m = p.difference_operator();
    let eig = herm_eig(&m)?;
    let n = p.dim();
    let cutoff = T::epsilon() * T::lit(64.0) * T::one().max(m.max_abs());
    let v = &eig.eigenvectors;
    let mut projector_a = ComplexMatrix::zeros(n, n);
    for (k, _) in eig.eigenvalues.iter().enumerate().filter(|(_, &l)| l > cutoff) {
        let col = v.column(k);
        let proj = ComplexMatrix::from_fn(n, n, |i, j| col[i] * col[j].conj());
        projector_a = &projector_a + &proj;
    }
    let gain = (&m * &projector_a).trace().re;
    let projector_b = &ComplexMatrix::identity(n) - &projector_a;
    Ok(HelstromResult {
        p_error: (p.prior_a() - gain).max(T::zero()),
        projector_a,
        projector_b,
    })
}

/// Error probability of the classifier that answers "a" on `Π_a`.
pub fn classification_error<T: Real>(p: &DiscriminationProblem<T>, projector_a: &ComplexMatrix<T>) -> T {
    let n = p.dim();
    let projector_b = &ComplexMatrix::identity(n) - projector_a;
    let miss = |s: &PureState<T>, m: &ComplexMatrix<T>| {
        let v = m.mul_vec(s.amplitudes());
        s.amplitudes().iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<C<T>>().re
    };
    p.group_a.iter().map(|(s, w)| *w * miss(s, &projector_b)).sum::<T>()
        + p.group_b.iter().map(|(s, w)| *w * miss(s, projector_a)).sum::<T>()
}

/// Priors `[P_a1, P_a2, P_b1, P_b2]` for the mirrored family.
pub type FourPriors<T> = [T; 4];

/// `|Ψ_a1,a2⟩ = cos θ|0⟩ + sin θ|1⟩`, `|Ψ_b1,b2⟩ = cos θ|0⟩ − sin θ|1⟩` at `θ₁`, `θ₂`.
pub fn symmetric_family<T: Real>(theta1: T, theta2: T, priors: FourPriors<T>) -> Result<DiscriminationProblem<T>> {
    let st = |t: T, sign: T| {
        PureState::new(vec![
            C::new(t.cos(), T::zero()),
            C::new(sign * t.sin(), T::zero()),
        ])
        .expect("unit state")
    };
    let one = T::one();
    DiscriminationProblem::new(
        vec![(st(theta1, one), priors[0]), (st(theta2, one), priors[1])],
        vec![(st(theta1, -one), priors[2]), (st(theta2, -one), priors[3])],
    )
}

/// Expression under the square root in the closed-form eigenvalues:
/// `1 − 4P_a1P_b1cos²2θ₁ − 4P_a2P_b2cos²2θ₂ + 2((P_a1P_a2 + P_b1P_b2)cos(2θ₁−2θ₂)
///  − (P_a2P_b1 + P_a1P_b2)cos(2θ₁+2θ₂)) − 2CD`, with `C = P_a1+P_b1`, `D = P_a2+P_b2`.
pub fn closed_form_radicand<T: Real>(theta1: T, theta2: T, priors: FourPriors<T>) -> T {
    let [pa1, pa2, pb1, pb2] = priors;
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let (t1, t2) = (two * theta1, two * theta2);
    let c = pa1 + pb1;
    let d = pa2 + pb2;
    T::one() - four * pa1 * pb1 * t1.cos().powi(2) - four * pa2 * pb2 * t2.cos().powi(2)
        + two * ((pa1 * pa2 + pb1 * pb2) * (t1 - t2).cos() - (pa2 * pb1 + pa1 * pb2) * (t1 + t2).cos())
        - two * c * d
}

/// Minimum error for the mirrored family from the closed-form eigenvalues
/// `λ± = ½(A + B ± √radicand)`: `P_error = P_a − Σ max(λ±, 0)`.
///
/// With `λ₋ ≤ 0` (always the case for equal priors) this is `½(1 − √radicand)`.
pub fn closed_form_perror<T: Real>(theta1: T, theta2: T, priors: FourPriors<T>) -> T {
    let [pa1, pa2, pb1, pb2] = priors;
    let a = pa1 - pb1;
    let b = pa2 - pb2;
    let root = closed_form_radicand(theta1, theta2, priors).max(T::zero()).sqrt();
    let half = T::lit(0.5);
    let lp = half * (a + b + root);
    let lm = half * (a + b - root);
    (pa1 + pa2 - lp.max(T::zero()) - lm.max(T::zero())).max(T::zero())
}

/// Equal-prior closed form in terms of overlaps:
/// `½(1 − ½√(2 − |⟨a1|b1⟩|² − |⟨a2|b2⟩|² + 2|⟨a1|a2⟩|² − 2|⟨a1|b2⟩|²))`.
pub fn equal_prior_perror<T: Real>(a1: &PureState<T>, a2: &PureState<T>, b1: &PureState<T>, b2: &PureState<T>) -> T {
    let two = T::lit(2.0);
    let r = two - a1.overlap(b1) - a2.overlap(b2) + two * a1.overlap(a2) - two * a1.overlap(b2);
    T::lit(0.5) * (T::one() - T::lit(0.5) * r.max(T::zero()).sqrt())
}

/// Projective measurement `|Φ_a⟩ = (|0⟩+|1⟩)/√2`, `|Φ_b⟩ = (|0⟩−|1⟩)/√2`,
/// optimal for the mirrored family with equal priors and angles in `(0, π/2)`.
pub fn optimal_symmetric_measurement<T: Real>() -> (PureState<T>, PureState<T>) {
    (
        PureState::from_real(&[1.0, 1.0]).expect("unit state"),
        PureState::from_real(&[1.0, -1.0]).expect("unit state"),
    )
}

/// Discrimination cost of an encoder: group a should leave the trash in
/// `target_a`, group b in the orthogonal `target_b`.
///
/// States are taken in trash-major order on `dims`.
pub fn group_encoding_cost<T: Real>(
    u: &ComplexMatrix<T>,
    p: &DiscriminationProblem<T>,
    dims: Partition,
    target_a: &PureState<T>,
    target_b: &PureState<T>,
) -> Result<T> {
    check_targets(dims, target_a, target_b)?;
    if p.dim() != dims.dim() || u.rows() != dims.dim() || u.cols() != dims.dim() {
        return Err(Error::Dimension(format!(
            "problem of dimension {} with a {}x{} encoder on a {}x{} bipartition",
            p.dim(),
            u.rows(),
            u.cols(),
            dims.dim_a,
            dims.dim_b
        )));
    }
    let success = |g: &[(PureState<T>, T)], t: &PureState<T>| -> T {
        g.iter()
            .map(|(s, w)| *w * trash_overlap(&u.mul_vec(s.amplitudes()), t, dims))
            .sum()
    };
    Ok(T::one() - success(&p.group_a, target_a) - success(&p.group_b, target_b))
}

pub(crate) fn check_targets<T: Real>(dims: Partition, a: &PureState<T>, b: &PureState<T>) -> Result<()> {
    if a.dim() != dims.dim_a || b.dim() != dims.dim_a {
        return Err(Error::Dimension("targets must live on the trash subsystem".into()));
    }
    let ov = a.inner(b).norm();
    if ov > T::tolerances().norm.sqrt() {
        return Err(Error::NonOrthogonalTargets(ov.as_f64()));
    }
    Ok(())
}

/// Same problem with every member's prior scaled so each group sums to ½.
pub fn balanced<T: Real>(p: &DiscriminationProblem<T>) -> Result<DiscriminationProblem<T>> {
    let pa = p.prior_a();
    let pb = T::one() - pa;
    if pa.is_zero() || pb.is_zero() {
        return Err(Error::Priors("a group has zero total prior".into()));
    }
    let half = T::lit(0.5);
    DiscriminationProblem::new(
        p.group_a.iter().map(|(s, w)| (s.clone(), *w * half / pa)).collect(),
        p.group_b.iter().map(|(s, w)| (s.clone(), *w * half / pb)).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qlin::{random_state, random_unitary, trace_norm};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn theta_state(deg: f64) -> PureState<f64> {
        let t = deg.to_radians();
        PureState::from_real(&[t.cos(), t.sin()]).unwrap()
    }

    /// Independent 2×2 oracle: closed-form eigenvalues of a real symmetric matrix.
    fn oracle_2x2(p: &DiscriminationProblem<f64>) -> f64 {
        let m = p.difference_operator();
        let (a, b, d) = (m[(0, 0)].re, m[(0, 1)].re, m[(1, 1)].re);
        let mean = 0.5 * (a + d);
        let rad = (0.25 * (a - d).powi(2) + b * b).sqrt();
        p.prior_a() - (mean + rad).max(0.0) - (mean - rad).max(0.0)
    }

    fn fig5a() -> DiscriminationProblem<f64> {
        DiscriminationProblem::uniform(
            vec![theta_state(4.0), theta_state(-4.0)],
            vec![theta_state(64.0), theta_state(56.0)],
        )
        .unwrap()
    }

    #[test]
    fn helstrom_examples() {
        let p = DiscriminationProblem::uniform(vec![PureState::<f64>::basis(2, 0)], vec![PureState::basis(2, 1)]).unwrap();
        let h = helstrom_bound(&p).unwrap();
        assert!(h.p_error.abs() < 1e-15);
        assert!(h.projector_a.max_abs_diff(&PureState::<f64>::basis(2, 0).projector()) < 1e-15);

        let s = theta_state(20.0);
        let p = DiscriminationProblem::uniform(vec![s.clone(), s.clone()], vec![s.clone(), s]).unwrap();
        assert!((helstrom_bound(&p).unwrap().p_error - 0.5).abs() < 1e-15);

        let p = fig5a();
        let h = helstrom_bound(&p).unwrap();
        assert!((h.p_error - 0.0712013479566227).abs() < 1e-12, "{}", h.p_error);
        assert!((h.p_error - oracle_2x2(&p)).abs() < 1e-14);
        let tn = trace_norm(&p.difference_operator()).unwrap();
        assert!((tn - 0.8575973040867547).abs() < 1e-12);
        assert!((h.p_error - 0.5 * (1.0 - tn)).abs() < 1e-14);
    }

    #[test]
    fn projectors_are_a_measurement_that_attains_the_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let group = |rng: &mut ChaCha8Rng| (0..2).map(|_| random_state::<f64, _>(3, rng)).collect::<Vec<_>>();
            let p = DiscriminationProblem::uniform(group(&mut rng), group(&mut rng)).unwrap();
            let h = helstrom_bound(&p).unwrap();
            let pa = &h.projector_a;
            assert!((pa * pa).max_abs_diff(pa) < 1e-12);
            assert!(pa.is_hermitian(1e-14));
            assert!((pa + &h.projector_b).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-15);
            assert!((classification_error(&p, pa) - h.p_error).abs() < 1e-10);
            assert!((0.0..=0.5 + 1e-12).contains(&h.p_error));
        }
    }

    #[test]
    fn closed_form_matches_eigen_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let q = [0.25; 4];
        for _ in 0..500 {
            let t1: f64 = rng.random::<f64>() * std::f64::consts::PI - FRAC_PI_2;
            let t2: f64 = rng.random::<f64>() * std::f64::consts::PI - FRAC_PI_2;
            let (t1, t2) = if t1 > t2 { (t1, t2) } else { (t2, t1) };
            let p = symmetric_family(t1, t2, q).unwrap();
            let general = helstrom_bound(&p).unwrap().p_error;
            assert!((closed_form_perror(t1, t2, q) - general).abs() < 1e-10);
            let g = p.group_a();
            let h = p.group_b();
            let eq = equal_prior_perror(&g[0].0, &g[1].0, &h[0].0, &h[1].0);
            assert!((eq - general).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_with_unequal_priors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let mut w: [f64; 4] = [0.0; 4].map(|_: f64| rng.random::<f64>());
            let s: f64 = w.iter().sum();
            w.iter_mut().for_each(|x| *x /= s);
            let t1: f64 = rng.random::<f64>() * 3.0 - 1.5;
            let t2: f64 = rng.random::<f64>() * 3.0 - 1.5;
            let p = symmetric_family(t1, t2, w).unwrap();
            assert!((closed_form_perror(t1, t2, w) - oracle_2x2(&p)).abs() < 1e-10);
            assert!(closed_form_radicand(t1, t2, w) >= -1e-12);
        }
    }

    #[test]
    fn closed_form_special_cases() {
        let q = [0.25; 4];
        // Groups {|1⟩, |0⟩} and {−|1⟩, |0⟩} coincide up to sign.
        assert!((closed_form_perror(FRAC_PI_2, 0.0, q) - 0.5).abs() < 1e-15);
        let p = symmetric_family(FRAC_PI_4, -FRAC_PI_4, q).unwrap();
        assert!((closed_form_perror(FRAC_PI_4, -FRAC_PI_4, q) - helstrom_bound(&p).unwrap().p_error).abs() < 1e-12);
    }

    #[test]
    fn symmetric_measurement_is_optimal() {
        let (pa, pb) = optimal_symmetric_measurement::<f64>();
        let sum = &pa.projector() + &pb.projector();
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);

        let q = [0.25; 4];
        let (t1, t2) = (60f64.to_radians(), 4f64.to_radians());
        let p = symmetric_family(t1, t2, q).unwrap();
        let achieved = classification_error(&p, &pa.projector());
        assert!((achieved - closed_form_perror(t1, t2, q)).abs() < 1e-10);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..200 {
            let t1 = rng.random::<f64>() * FRAC_PI_2;
            let t2 = rng.random::<f64>() * FRAC_PI_2;
            let p = symmetric_family(t1, t2, q).unwrap();
            assert!((classification_error(&p, &pa.projector()) - closed_form_perror(t1, t2, q)).abs() < 1e-10);
        }

        // |+⟩ versus |−⟩ are perfectly distinguishable.
        let p = symmetric_family(FRAC_PI_4, FRAC_PI_4, q).unwrap();
        assert!(classification_error(&p, &pa.projector()).abs() < 1e-15);
    }

    #[test]
    fn encoding_cost_examples() {
        let dims = Partition::TWO_QUBITS;
        let (t0, t1) = (PureState::<f64>::basis(2, 0), PureState::basis(2, 1));
        let p = DiscriminationProblem::uniform(vec![PureState::basis(4, 0)], vec![PureState::basis(4, 2)]).unwrap();
        let id = ComplexMatrix::identity(4);
        assert!(group_encoding_cost(&id, &p, dims, &t0, &t1).unwrap().abs() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let s = random_state::<f64, _>(4, &mut rng);
        let same = DiscriminationProblem::uniform(vec![s.clone()], vec![s]).unwrap();
        for _ in 0..20 {
            let u = random_unitary(4, &mut rng);
            assert!(group_encoding_cost(&u, &same, dims, &t0, &t1).unwrap() >= 0.5 - 1e-12);
        }

        let plus = PureState::from_real(&[1.0, 1.0]).unwrap();
        assert!(matches!(
            group_encoding_cost(&id, &p, dims, &t0, &plus),
            Err(Error::NonOrthogonalTargets(_))
        ));
    }

    #[test]
    fn encoding_never_beats_the_bound() {
        let dims = Partition::TWO_QUBITS;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let group = |rng: &mut ChaCha8Rng| (0..2).map(|_| random_state::<f64, _>(4, rng)).collect::<Vec<_>>();
            let p = DiscriminationProblem::uniform(group(&mut rng), group(&mut rng)).unwrap();
            let u = random_unitary(4, &mut rng);
            let ta = random_state::<f64, _>(2, &mut rng);
            let tb = PureState::new(vec![-ta.amplitudes()[1].conj(), ta.amplitudes()[0].conj()]).unwrap();
            let cost = group_encoding_cost(&u, &p, dims, &ta, &tb).unwrap();
            assert!(cost >= helstrom_bound(&p).unwrap().p_error - 1e-9);
        }
    }

    #[test]
    fn balanced_rescales_groups() {
        let p = DiscriminationProblem::new(
            vec![(PureState::<f64>::basis(2, 0), 0.6)],
            vec![(PureState::basis(2, 1), 0.1), (PureState::basis(2, 0), 0.3)],
        )
        .unwrap();
        let b = balanced(&p).unwrap();
        assert!((b.prior_a() - 0.5).abs() < 1e-15);
    }
}
