//! Cyclic Jacobi methods: Hermitian eigendecomposition and one-sided SVD.

use num_traits::Zero;

use super::{ComplexMatrix, PureState};
use crate::error::{Error, Result};
use crate::scalar::{cr, Real, C};

const MAX_SWEEPS: usize = 100;

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct EigenResult<T> {
    pub eigenvalues: Vec<T>,
    /// Column `i` is the eigenvector for `eigenvalues[i]`; the matrix is unitary.
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> EigenResult<T> {
    pub fn eigenvector(&self, i: usize) -> Vec<C<T>> {
        self.eigenvectors.column(i)
    }

    /// `V·f(Λ)·V†`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let d: Vec<T> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let v = &self.eigenvectors;
        let n = v.rows();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..d.len())
                .map(|k| v[(i, k)] * v[(j, k)].conj() * d[k])
                .sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.reconstruct_with(|x| x)
    }
}

/// Rotation `J = [[c, s·w], [−s·w̄, c]]` with `|w| = 1` that zeroes the
/// off-diagonal of `J†·[[app, b], [b̄, aqq]]·J`.
fn jacobi_rotation<T: Real>(app: T, aqq: T, b: C<T>) -> (T, T, C<T>) {
    let mag = b.norm();
    let w = b.unscale(mag);
    let theta = (aqq - app) / (mag + mag);
    let t = if theta >= T::zero() {
        T::one() / (theta + (theta * theta + T::one()).sqrt())
    } else {
        -T::one() / (-theta + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    (c, t * c, w)
}

/// Applies `M ← M·J` on columns `p`, `q`.
fn rotate_columns<T: Real>(m: &mut ComplexMatrix<T>, p: usize, q: usize, c: T, s: T, w: C<T>) {
    let sw = w.scale(s);
    for k in 0..m.rows() {
        let mp = m[(k, p)];
        let mq = m[(k, q)];
        m[(k, p)] = mp.scale(c) - mq * sw.conj();
        m[(k, q)] = mp * sw + mq.scale(c);
    }
}

/// Applies `M ← J†·M` on rows `p`, `q`.
fn rotate_rows<T: Real>(m: &mut ComplexMatrix<T>, p: usize, q: usize, c: T, s: T, w: C<T>) {
    let sw = w.scale(s);
    for k in 0..m.cols() {
        let mp = m[(p, k)];
        let mq = m[(q, k)];
        m[(p, k)] = mp.scale(c) - sw * mq;
        m[(q, k)] = sw.conj() * mp + mq.scale(c);
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Input must be Hermitian within the eigensolver tolerance; the Hermitian
/// part is what gets diagonalized.
pub fn herm_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<EigenResult<T>> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let herm = m.hermiticity_error();
    let scale = T::one().max(m.max_abs());
    if herm > T::tolerances().eig_input * scale {
        return Err(Error::NotHermitian(herm.as_f64()));
    }
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let eps = T::epsilon();
    let floor = a.frobenius_norm() * eps * eps;

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let mag = b.norm();
                if mag <= floor || mag <= eps * (app.abs() * aqq.abs()).sqrt() * T::lit(0.5) {
                    continue;
                }
                rotated = true;
                let (c, s, w) = jacobi_rotation(app, aqq, b);
                rotate_columns(&mut a, p, q, c, s, w);
                rotate_rows(&mut a, p, q, c, s, w);
                a[(p, q)] = C::zero();
                a[(q, p)] = C::zero();
                a[(p, p)] = cr(a[(p, p)].re);
                a[(q, q)] = cr(a[(q, q)].re);
                rotate_columns(&mut v, p, q, c, s, w);
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).expect("finite eigenvalues"));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenResult {
        eigenvalues,
        eigenvectors,
    })
}

/// Singular values of an arbitrary matrix, sorted descending.
///
/// One-sided (Hestenes) Jacobi: columns are orthogonalized pairwise and the
/// singular values are the resulting column norms. Small singular values
/// keep full relative accuracy, which the rank test depends on.
pub fn singular_values<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    // Work on the orientation with fewer columns.
    let mut x = if m.cols() > m.rows() { m.adjoint() } else { m.clone() };
    let n = x.cols();
    let eps = T::epsilon();
    let col_dot = |x: &ComplexMatrix<T>, i: usize, j: usize| -> C<T> {
        (0..x.rows()).map(|k| x[(k, i)].conj() * x[(k, j)]).sum()
    };
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = col_dot(&x, p, p).re;
                let beta = col_dot(&x, q, q).re;
                let gamma = col_dot(&x, p, q);
                let mag = gamma.norm();
                if mag <= eps * (alpha * beta).sqrt() || mag <= T::min_positive_value() {
                    continue;
                }
                rotated = true;
                let (c, s, w) = jacobi_rotation(alpha, beta, gamma);
                rotate_columns(&mut x, p, q, c, s, w);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = (0..n).map(|j| col_dot(&x, j, j).re.max(T::zero()).sqrt()).collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    sv
}

/// Maximum number of linearly independent vectors among `states`: the count of
/// singular values of the stacked state matrix above `tol·σ_max`.
pub fn max_lin_independent<T: Real>(states: &[PureState<T>], tol: T) -> Result<usize> {
    let first = states.first().ok_or(Error::Empty("state list"))?;
    let dim = first.dim();
    if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
        return Err(Error::Dimension(format!(
            "state of dimension {} in a dimension-{dim} set",
            bad.dim()
        )));
    }
    if tol <= T::zero() {
        return Err(Error::Param("rank tolerance must be positive".into()));
    }
    let stacked = ComplexMatrix::from_fn(dim, states.len(), |i, j| states[j].amplitudes()[i]);
    let sv = singular_values(&stacked);
    let cutoff = sv[0] * tol;
    Ok(sv.iter().filter(|&&s| s > cutoff).count())
}

/// `‖M‖₁`: sum of |eigenvalues| for Hermitian input, of singular values otherwise.
pub fn trace_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(Error::Dimension("trace norm of a non-square matrix".into()));
    }
    if m.is_hermitian(T::tolerances().eig_input) {
        Ok(herm_eig(m)?.eigenvalues.iter().map(|x| x.abs()).sum())
    } else {
        Ok(singular_values(m).into_iter().sum())
    }
}

/// Eigen-decomposition of a PSD matrix plus the level below which eigenvalues
/// are round-off and count as zero.
fn psd_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<(EigenResult<T>, T)> {
    let eig = herm_eig(m)?;
    let min = eig.eigenvalues.last().copied().unwrap_or(T::zero());
    let scale = T::one().max(m.max_abs());
    if min < -T::tolerances().psd * scale {
        return Err(Error::NotPsd(min.as_f64()));
    }
    let floor = T::epsilon() * T::lit(64.0 * m.rows() as f64) * scale;
    Ok((eig, floor))
}

/// Principal square root of a PSD matrix. Eigenvalues down to `−psd` tolerance
/// are clipped to zero; anything more negative is rejected.
pub fn matrix_sqrt_psd<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let (eig, floor) = psd_eig(m)?;
    Ok(eig.reconstruct_with(|x| if x > floor { x.sqrt() } else { T::zero() }))
}

/// `Σ √λ` over eigenvalues above round-off: trace of the PSD square root.
pub(crate) fn trace_sqrt_psd<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    let (eig, floor) = psd_eig(m)?;
    Ok(eig.eigenvalues.iter().filter(|&&x| x > floor).map(|&x| x.sqrt()).sum())
}

/// Column `j` of `m` as a state, for unit-norm columns such as eigenvectors.
pub(crate) fn column_state<T: Real>(m: &ComplexMatrix<T>, j: usize) -> PureState<T> {
    PureState::new(m.column(j)).expect("unit column")
}
