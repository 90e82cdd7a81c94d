//! Autoencoder cost, the maximum-fidelity bound and the analytic lossless encoder.

use crate::error::{Error, Result};
use crate::qlin::{
    column_state, herm_eig, max_lin_independent, partial_trace, tensor, trash_overlap,
    ComplexMatrix, Partition, PureState, Subsystem,
};
use crate::qstate::{ensemble_density, Ensemble};
use crate::scalar::Real;

/// Fixed pure state on the trash subsystem that the encoded trash is compared against.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceState<T> {
    state: PureState<T>,
}

impl<T: Real> ReferenceState<T> {
    pub fn new(state: PureState<T>) -> Self {
        Self { state }
    }

    /// `|0⟩` on a trash space of dimension `dim_a`.
    pub fn ground(dim_a: usize) -> Self {
        Self::new(PureState::basis(dim_a, 0))
    }

    pub fn state(&self) -> &PureState<T> {
        &self.state
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }
}

/// Result of the analytic encoder construction.
#[derive(Debug, Clone)]
pub struct EncoderSolution<T> {
    /// Encoder in trash-major order.
    pub unitary: ComplexMatrix<T>,
    pub achieved_cost: T,
    /// Maximum number of linearly independent input states.
    pub rank: usize,
    pub latent_dim: usize,
    pub lossless: bool,
}

fn check_dims<T: Real>(u: &ComplexMatrix<T>, dims: Partition, reference: &ReferenceState<T>) -> Result<()> {
    if u.rows() != dims.dim() || u.cols() != dims.dim() {
        return Err(Error::Dimension(format!(
            "{}x{} unitary for a dimension-{} ensemble",
            u.rows(),
            u.cols(),
            dims.dim()
        )));
    }
    if reference.dim() != dims.dim_a {
        return Err(Error::Dimension(format!(
            "reference of dimension {} for a dimension-{} trash space",
            reference.dim(),
            dims.dim_a
        )));
    }
    Ok(())
}

/// `⟨ψ|Tr_B(UρU†)|ψ⟩` for a density `ρ`.
pub fn trash_fidelity<T: Real>(
    u: &ComplexMatrix<T>,
    rho: &ComplexMatrix<T>,
    dims: Partition,
    reference: &ReferenceState<T>,
) -> Result<T> {
    check_dims(u, dims, reference)?;
    let trash = partial_trace(&rho.conjugate_by(u), dims, Subsystem::B)?;
    let psi = reference.state().amplitudes();
    let v = trash.mul_vec(psi);
    Ok(psi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<crate::scalar::C<T>>().re)
}

/// `J(U) = 1 − ⟨ψ|Tr_B(UρU†)|ψ⟩`.
pub fn infidelity_cost<T: Real>(
    u: &ComplexMatrix<T>,
    e: &Ensemble<T>,
    reference: &ReferenceState<T>,
) -> Result<T> {
    let rho = ensemble_density(e);
    Ok(T::one() - trash_fidelity(u, &rho, e.partition(), reference)?)
}

/// Same cost, accumulated state by state: `1 − Σ pᵢ⟨ψ|Tr_B(U|φᵢ⟩⟨φᵢ|U†)|ψ⟩`.
pub fn infidelity_cost_by_state<T: Real>(
    u: &ComplexMatrix<T>,
    e: &Ensemble<T>,
    reference: &ReferenceState<T>,
) -> Result<T> {
    check_dims(u, e.partition(), reference)?;
    let kept: T = e
        .iter()
        .map(|(s, p)| p * trash_overlap(&u.mul_vec(s.amplitudes()), reference.state(), e.partition()))
        .sum();
    Ok(T::one() - kept)
}

/// `⟨Ψ|UρU†|Ψ⟩` for a pure state `Ψ` on the whole space.
pub fn output_fidelity<T: Real>(u: &ComplexMatrix<T>, rho: &ComplexMatrix<T>, psi: &PureState<T>) -> Result<T> {
    if u.rows() != psi.dim() || rho.rows() != psi.dim() {
        return Err(Error::Dimension("operator and state dimensions differ".into()));
    }
    let v = rho.conjugate_by(u).mul_vec(psi.amplitudes());
    Ok(psi.amplitudes().iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<crate::scalar::C<T>>().re)
}

/// Largest eigenvalue of `ρ`: the best `⟨Ψ|UρU†|Ψ⟩` any unitary can reach.
pub fn max_fidelity_bound<T: Real>(rho: &ComplexMatrix<T>) -> Result<T> {
    rho.ensure_density()?;
    Ok(herm_eig(rho)?.eigenvalues[0])
}

/// Sum of the `dim_b` largest eigenvalues of `ρ`: the best trash fidelity
/// `⟨ψ|Tr_B(UρU†)|ψ⟩` any unitary can reach, since `|ψ⟩⟨ψ| ⊗ I` has rank `dim_b`.
pub fn max_trash_fidelity<T: Real>(rho: &ComplexMatrix<T>, dims: Partition) -> Result<T> {
    rho.ensure_density()?;
    if rho.rows() != dims.dim() {
        return Err(Error::Dimension(format!("{}x{} density on {}x{}", rho.rows(), rho.cols(), dims.dim_a, dims.dim_b)));
    }
    Ok(herm_eig(rho)?.eigenvalues.iter().take(dims.dim_b).copied().sum::<T>().min(T::one()))
}

/// Orthonormal frame whose first column is `s` (up to phase), taken from the
/// eigenvectors of the rank-one projector `|s⟩⟨s|`.
fn projector_frame<T: Real>(s: &PureState<T>) -> ComplexMatrix<T> {
    herm_eig(&s.projector())
        .expect("projector is Hermitian")
        .eigenvectors
}

/// Unitary `W·V†` mapping `source` onto `target` up to a global phase, where
/// `W` and `V` are eigenvector frames of the two projectors.
pub fn align_unitary<T: Real>(target: &PureState<T>, source: &PureState<T>) -> Result<ComplexMatrix<T>> {
    if target.dim() != source.dim() {
        return Err(Error::Dimension(format!(
            "aligning a dimension-{} state onto dimension {}",
            source.dim(),
            target.dim()
        )));
    }
    let w = projector_frame(target);
    let v = projector_frame(source);
    Ok(&w * &v.adjoint())
}

/// `R ≤ N_B`: the ensemble admits a lossless encoder.
pub fn compressible<T: Real>(e: &Ensemble<T>, tol: T) -> Result<bool> {
    Ok(max_lin_independent(e.states(), tol)? <= e.partition().dim_b)
}

/// Analytic encoder `U = (U_A ⊗ I_B)·U_AB`.
///
/// `U_AB` diagonalizes the ensemble density with eigenvalues descending, so
/// the `dim_b` largest land in the first trash block; `U_A` rotates the first
/// trash basis vector onto the reference. When the rank fits in the latent
/// space the cost is zero; otherwise the same construction is returned with
/// whatever cost it achieves.
pub fn perfect_encoder<T: Real>(e: &Ensemble<T>, reference: &ReferenceState<T>) -> Result<EncoderSolution<T>> {
    let dims = e.partition();
    if reference.dim() != dims.dim_a {
        return Err(Error::Dimension(format!(
            "reference of dimension {} for a dimension-{} trash space",
            reference.dim(),
            dims.dim_a
        )));
    }
    let rho = ensemble_density(e);
    let eig = herm_eig(&rho)?;
    let u_ab = eig.eigenvectors.adjoint();
    let e_max = PureState::basis(dims.dim_a, 0);
    let u_a = align_unitary(reference.state(), &e_max)?;
    let unitary = &tensor(&u_a, &ComplexMatrix::identity(dims.dim_b)) * &u_ab;
    let achieved_cost = infidelity_cost(&unitary, e, reference)?;
    let rank = max_lin_independent(e.states(), T::tolerances().rank)?;
    Ok(EncoderSolution {
        unitary,
        achieved_cost,
        rank,
        latent_dim: dims.dim_b,
        lossless: rank <= dims.dim_b,
    })
}

/// Principal eigenvector of `ρ` as a state.
pub fn dominant_eigenstate<T: Real>(rho: &ComplexMatrix<T>) -> Result<PureState<T>> {
    Ok(column_state(&herm_eig(rho)?.eigenvectors, 0))
}
