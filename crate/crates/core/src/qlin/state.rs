use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};

/// Unit-norm state vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState<T> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    /// Normalizes `amplitudes`; the all-zero vector is rejected.
    pub fn new(amplitudes: Vec<C<T>>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::Empty("state amplitudes"));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if norm <= T::min_positive_value() || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self {
            amplitudes: amplitudes.into_iter().map(|a| a.unscale(norm)).collect(),
        })
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(
            amplitudes
                .iter()
                .map(|&x| Complex::new(T::lit(x), T::zero()))
                .collect(),
        )
    }

    /// Computational basis vector `|index⟩`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dim {dim}");
        let mut amplitudes = vec![C::zero(); dim];
        amplitudes[index] = C::new(T::one(), T::zero());
        Self { amplitudes }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C<T> {
        assert_eq!(self.dim(), other.dim(), "inner product dimension mismatch");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &Self) -> T {
        self.inner(other).norm_sqr()
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix<T> {
        let a = &self.amplitudes;
        ComplexMatrix::from_fn(a.len(), a.len(), |i, j| a[i] * a[j].conj())
    }

    /// `U|ψ⟩`, renormalized to absorb round-off.
    pub fn evolve(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        if u.cols() != self.dim() || u.rows() != self.dim() {
            return Err(Error::Dimension(format!(
                "{}x{} operator on a dimension-{} state",
                u.rows(),
                u.cols(),
                self.dim()
            )));
        }
        Self::new(u.mul_vec(&self.amplitudes))
    }

    pub fn with_phase(&self, phase: T) -> Self {
        let p = Complex::from_polar(T::one(), phase);
        Self {
            amplitudes: self.amplitudes.iter().map(|&a| a * p).collect(),
        }
    }

    /// `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &Self) -> Self {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|&a| other.amplitudes.iter().map(move |&b| a * b))
            .collect();
        Self { amplitudes }
    }

    pub fn cast<U: Real>(&self) -> PureState<U> {
        PureState {
            amplitudes: self
                .amplitudes
                .iter()
                .map(|z| Complex::new(U::lit(z.re.as_f64()), U::lit(z.im.as_f64())))
                .collect(),
        }
    }
}
