//! Numerical tolerances, kept in one place.

/// All acceptance thresholds used by validation and comparison routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances<T> {
    /// `max|U†U − I|` for a matrix to count as unitary.
    pub unitary: T,
    /// `max|M − M†|` for a density matrix.
    pub hermitian: T,
    /// `|Tr ρ − 1|` for a density matrix.
    pub trace: T,
    /// Smallest eigenvalue allowed in a density or PSD input.
    pub psd: T,
    /// Hermiticity accepted by the eigensolver.
    pub eig_input: T,
    /// Relative singular-value cutoff for linear independence.
    pub rank: T,
    /// `|Σ|a|² − 1|` for a pure state / `|Σp − 1|` for priors.
    pub norm: T,
}

pub const F64: Tolerances<f64> = Tolerances {
    unitary: 1e-12,
    hermitian: 1e-12,
    trace: 1e-12,
    psd: 1e-10,
    eig_input: 1e-10,
    rank: 1e-8,
    norm: 1e-12,
};

pub const F32: Tolerances<f32> = Tolerances {
    unitary: 1e-5,
    hermitian: 1e-5,
    trace: 1e-5,
    psd: 1e-5,
    eig_input: 1e-5,
    rank: 1e-4,
    norm: 1e-5,
};
