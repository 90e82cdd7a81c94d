//! Dense complex linear algebra for small systems.

mod eig;
mod io;
mod matrix;
mod state;

pub use eig::{
    herm_eig, matrix_sqrt_psd, max_lin_independent, singular_values, trace_norm, EigenResult,
};
pub(crate) use eig::{column_state, trace_sqrt_psd};
pub use io::{parse_matrix, write_matrix};
pub use matrix::{tensor, ComplexMatrix};
pub use state::PureState;

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Which factor of a bipartite `A ⊗ B` space to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    /// The major (trash) factor.
    A,
    /// The minor (latent) factor.
    B,
}

/// Dimensions of a bipartite space, trash-major: global index `a·dim_b + b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partition {
    pub dim_a: usize,
    pub dim_b: usize,
}

impl Partition {
    pub const TWO_QUBITS: Partition = Partition { dim_a: 2, dim_b: 2 };

    pub fn new(dim_a: usize, dim_b: usize) -> Self {
        Self { dim_a, dim_b }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }
}

/// Partial trace of `m` over one factor of `dims`.
pub fn partial_trace<T: Real>(
    m: &ComplexMatrix<T>,
    dims: Partition,
    over: Subsystem,
) -> Result<ComplexMatrix<T>> {
    let n = dims.dim();
    if !m.is_square() || m.rows() != n {
        return Err(Error::Dimension(format!(
            "{}x{} matrix on a {}x{} bipartition",
            m.rows(),
            m.cols(),
            dims.dim_a,
            dims.dim_b
        )));
    }
    let (da, db) = (dims.dim_a, dims.dim_b);
    Ok(match over {
        Subsystem::B => ComplexMatrix::from_fn(da, da, |a, a2| {
            (0..db).map(|b| m[(a * db + b, a2 * db + b)]).sum()
        }),
        Subsystem::A => ComplexMatrix::from_fn(db, db, |b, b2| {
            (0..da).map(|a| m[(a * db + b, a * db + b2)]).sum()
        }),
    })
}

/// `⟨ψ|Tr_B(|χ⟩⟨χ|)|ψ⟩` without forming any density matrix.
pub(crate) fn trash_overlap<T: Real>(chi: &[C<T>], reference: &PureState<T>, dims: Partition) -> T {
    let r = reference.amplitudes();
    (0..dims.dim_b)
        .map(|b| {
            (0..dims.dim_a)
                .map(|a| r[a].conj() * chi[a * dims.dim_b + b])
                .sum::<C<T>>()
                .norm_sqr()
        })
        .sum()
}

/// Haar-distributed unitary via Gram–Schmidt QR of a complex Gaussian matrix.
pub fn random_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    loop {
        let mut cols: Vec<Vec<C<T>>> = (0..n)
            .map(|_| {
                (0..n)
                    .map(|_| {
                        let re: f64 = rng.sample(StandardNormal);
                        let im: f64 = rng.sample(StandardNormal);
                        Complex::new(T::lit(re), T::lit(im))
                    })
                    .collect()
            })
            .collect();
        if gram_schmidt(&mut cols) {
            let mut u = ComplexMatrix::zeros(n, n);
            for (j, col) in cols.iter().enumerate() {
                u.set_column(j, col);
            }
            return u;
        }
    }
}

/// Random density matrix of rank ≤ `rank` from Haar-random mixtures.
pub fn random_density<T: Real, R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> ComplexMatrix<T> {
    let weights: Vec<T> = (0..rank).map(|_| T::lit(rng.random::<f64>() + 1e-3)).collect();
    let total: T = weights.iter().copied().sum();
    let mut rho = ComplexMatrix::zeros(n, n);
    for w in weights {
        let psi = random_state(n, rng);
        rho = &rho + &psi.projector().scale_real(w / total);
    }
    rho
}

/// Haar-random pure state.
pub fn random_state<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> PureState<T> {
    loop {
        let amps: Vec<C<T>> = (0..n)
            .map(|_| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex::new(T::lit(re), T::lit(im))
            })
            .collect();
        if let Ok(s) = PureState::new(amps) {
            return s;
        }
    }
}

/// Modified Gram–Schmidt in place. Returns false on (near) linear dependence.
pub(crate) fn gram_schmidt<T: Real>(cols: &mut [Vec<C<T>>]) -> bool {
    for j in 0..cols.len() {
        for i in 0..j {
            let (done, rest) = cols.split_at_mut(j);
            let proj: C<T> = done[i]
                .iter()
                .zip(rest[0].iter())
                .map(|(a, b)| a.conj() * b)
                .sum();
            for (x, q) in rest[0].iter_mut().zip(done[i].iter()) {
                *x -= q * proj;
            }
        }
        let norm = cols[j].iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if norm < T::lit(1e-10) || norm.is_zero() {
            return false;
        }
        for x in cols[j].iter_mut() {
            *x = x.unscale(norm);
        }
    }
    true
}
