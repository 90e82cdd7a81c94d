//! Process matrices of unitary channels in the Pauli basis, and process fidelity.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qlin::{matrix_sqrt_psd, tensor, trace_sqrt_psd, ComplexMatrix};
use crate::scalar::{Real, C};

/// Tensor words over `I, X, Y, Z`, leftmost qubit major, `I…I` first.
#[derive(Debug, Clone)]
pub struct PauliBasis<T> {
    pub n_qubits: usize,
    pub operators: Vec<ComplexMatrix<T>>,
}

impl<T: Real> PauliBasis<T> {
    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Label of operator `m`, e.g. `"IX"`.
    pub fn label(&self, m: usize) -> String {
        (0..self.n_qubits)
            .rev()
            .map(|q| ['I', 'X', 'Y', 'Z'][(m / 4usize.pow(q as u32)) % 4])
            .collect()
    }
}

fn single_qubit_paulis<T: Real>() -> [ComplexMatrix<T>; 4] {
    let o = C::<T>::one();
    let z = C::<T>::zero();
    let i = C::<T>::i();
    [
        ComplexMatrix::identity(2),
        ComplexMatrix::from_rows(&[&[z, o], &[o, z]]),
        ComplexMatrix::from_rows(&[&[z, -i], &[i, z]]),
        ComplexMatrix::from_rows(&[&[o, z], &[z, -o]]),
    ]
}

pub fn pauli_basis<T: Real>(n: usize) -> Result<PauliBasis<T>> {
    if n == 0 {
        return Err(Error::Param("Pauli basis needs at least one qubit".into()));
    }
    let single = single_qubit_paulis::<T>();
    let mut ops = single.to_vec();
    for _ in 1..n {
        ops = ops
            .iter()
            .flat_map(|a| single.iter().map(move |b| tensor(a, b)))
            .collect();
    }
    Ok(PauliBasis {
        n_qubits: n,
        operators: ops,
    })
}

/// `χ` with `ρ ↦ Σ χ_mn E_m ρ E_n†`, normalized to unit trace.
#[derive(Debug, Clone, Serialize)]
pub struct ProcessMatrix<T> {
    pub chi: ComplexMatrix<T>,
}

impl<T: Real> ProcessMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(chi: ComplexMatrix<T>) -> Result<Self> {
        let tol = T::tolerances();
        if !chi.is_square() {
            return Err(Error::Dimension("process matrix must be square".into()));
        }
        let herm = chi.hermiticity_error();
        if herm > tol.eig_input {
            return Err(Error::NotHermitian(herm.as_f64()));
        }
        let tr = chi.trace();
        if (tr.re - T::one()).abs() > tol.psd || tr.im.abs() > tol.psd {
            return Err(Error::Param(format!("process matrix trace {tr} differs from 1")));
        }
        let min = crate::qlin::herm_eig(&chi)?.eigenvalues.last().copied().unwrap_or(T::zero());
        if min < -tol.psd {
            return Err(Error::NotPsd(min.as_f64()));
        }
        Ok(Self { chi })
    }

    pub fn dim(&self) -> usize {
        self.chi.rows()
    }

    /// Applies the channel to a density matrix.
    pub fn apply(&self, basis: &PauliBasis<T>, rho: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if basis.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "{}-element basis for a {}x{} process matrix",
                basis.len(),
                self.dim(),
                self.dim()
            )));
        }
        let d = basis.operators[0].rows();
        let mut out = ComplexMatrix::zeros(d, d);
        let left: Vec<_> = basis.operators.iter().map(|e| e * rho).collect();
        let adj: Vec<_> = basis.operators.iter().map(|e| e.adjoint()).collect();
        for (m, lm) in left.iter().enumerate() {
            for (n, en) in adj.iter().enumerate() {
                let w = self.chi[(m, n)];
                if w.norm() == T::zero() {
                    continue;
                }
                out = &out + &(lm * en).scale(w);
            }
        }
        Ok(out)
    }
}

/// Pauli coefficients `c_m = Tr(E_m†U)/2ⁿ`.
pub fn pauli_coefficients<T: Real>(u: &ComplexMatrix<T>, basis: &PauliBasis<T>) -> Vec<C<T>> {
    let d = T::lit(u.rows() as f64);
    basis
        .operators
        .iter()
        .map(|e| {
            e.as_slice()
                .iter()
                .zip(u.as_slice())
                .map(|(a, b)| a.conj() * b)
                .sum::<C<T>>()
                .unscale(d)
        })
        .collect()
}

fn qubit_count(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!("dimension {dim} is not a qubit register")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// `χ = c·c†` for a unitary channel.
pub fn chi_of_unitary<T: Real>(u: &ComplexMatrix<T>) -> Result<ProcessMatrix<T>> {
    u.ensure_unitary()?;
    let basis = pauli_basis(qubit_count(u.rows())?)?;
    let coef = pauli_coefficients(u, &basis);
    let chi = ComplexMatrix::from_fn(coef.len(), coef.len(), |m, n| coef[m] * coef[n].conj());
    Ok(ProcessMatrix { chi })
}

/// `Tr√(√χ_exp·χ·√χ_exp)`.
pub fn process_fidelity<T: Real>(chi_exp: &ProcessMatrix<T>, chi_ideal: &ProcessMatrix<T>) -> Result<T> {
    if chi_exp.dim() != chi_ideal.dim() {
        return Err(Error::Dimension("process matrices differ in size".into()));
    }
    let root = matrix_sqrt_psd(&chi_exp.chi)?;
    let inner = &(&root * &chi_ideal.chi) * &root;
    trace_sqrt_psd(&inner.hermitian_part())
}

/// Closed form for two unitary channels: `|⟨c_a|c_b⟩| = |Tr(A†B)|/d`.
pub fn unitary_process_fidelity<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<T> {
    let basis = pauli_basis(qubit_count(a.rows())?)?;
    let ca = pauli_coefficients(a, &basis);
    let cb = pauli_coefficients(b, &basis);
    Ok(ca
        .iter()
        .zip(&cb)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex<T>>()
        .norm())
}
