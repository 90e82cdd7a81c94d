//! Two-qubit path ⊗ polarization states, the random-α family and weighted ensembles.
//!
//! Physical ordering is path-first: `|RH⟩, |RV⟩, |LH⟩, |LV⟩` map to indices
//! 0..4 with `|R⟩ = |H⟩ = |0⟩`. Algorithms work in trash-major order, so when
//! the polarization qubit is the trash the two qubits are swapped on the way in
//! (see [`TrashQubit`]).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlin::{max_lin_independent, ComplexMatrix, Partition, PureState};
use crate::scalar::{Real, C};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Path {
    R,
    L,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

/// One of the four product basis states `|path, polarization⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisLabel {
    pub path: Path,
    pub polarization: Polarization,
}

impl BasisLabel {
    pub const RH: BasisLabel = BasisLabel::new(Path::R, Polarization::H);
    pub const RV: BasisLabel = BasisLabel::new(Path::R, Polarization::V);
    pub const LH: BasisLabel = BasisLabel::new(Path::L, Polarization::H);
    pub const LV: BasisLabel = BasisLabel::new(Path::L, Polarization::V);
    pub const ALL: [BasisLabel; 4] = [Self::RH, Self::RV, Self::LH, Self::LV];

    pub const fn new(path: Path, polarization: Polarization) -> Self {
        Self { path, polarization }
    }

    pub fn index(self) -> usize {
        let p = match self.path {
            Path::R => 0,
            Path::L => 1,
        };
        let q = match self.polarization {
            Polarization::H => 0,
            Polarization::V => 1,
        };
        2 * p + q
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{:?}", self.path, self.polarization)
    }
}

impl FromStr for BasisLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RH" => Ok(Self::RH),
            "RV" => Ok(Self::RV),
            "LH" => Ok(Self::LH),
            "LV" => Ok(Self::LV),
            _ => Err(Error::Parse(format!("unknown basis label {s:?}"))),
        }
    }
}

/// Which physical qubit is discarded as trash.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrashQubit {
    /// Trash = path, latent = polarization. Physical order is already trash-major.
    #[default]
    Path,
    /// Trash = polarization, latent = path. Requires a qubit swap.
    Polarization,
}

/// Index permutation exchanging the two qubits of a 2 ⊗ 2 space.
const SWAP_INDEX: [usize; 4] = [0, 2, 1, 3];

impl TrashQubit {
    /// Maps a physical (path-first) state to trash-major order. Self-inverse.
    pub fn reorder_state<T: Real>(self, s: &PureState<T>) -> PureState<T> {
        match self {
            TrashQubit::Path => s.clone(),
            TrashQubit::Polarization => {
                assert_eq!(s.dim(), 4, "qubit swap needs a two-qubit state");
                let a = s.amplitudes();
                PureState::new(SWAP_INDEX.iter().map(|&i| a[i]).collect()).expect("unit state")
            }
        }
    }

    /// `S·U·S` for the qubit swap `S` (identity for path trash). Self-inverse.
    pub fn reorder_operator<T: Real>(self, u: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        match self {
            TrashQubit::Path => u.clone(),
            TrashQubit::Polarization => {
                assert_eq!((u.rows(), u.cols()), (4, 4), "qubit swap needs a 4x4 operator");
                ComplexMatrix::from_fn(4, 4, |i, j| u[(SWAP_INDEX[i], SWAP_INDEX[j])])
            }
        }
    }
}

impl FromStr for TrashQubit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "path" => Ok(Self::Path),
            "polarization" | "polarisation" => Ok(Self::Polarization),
            _ => Err(Error::Parse(format!("unknown trash qubit {s:?}"))),
        }
    }
}

/// Normalized two-qubit state from amplitudes keyed by basis label.
/// Repeated labels accumulate.
pub fn two_qubit_state<T: Real>(amplitudes: &[(BasisLabel, C<T>)]) -> Result<PureState<T>> {
    let mut v = vec![C::<T>::zero(); 4];
    for &(label, amp) in amplitudes {
        v[label.index()] += amp;
    }
    PureState::new(v)
}

/// Three angles in `[0, π]` parameterizing the random two-qubit family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaTriple<T> {
    pub alpha1: T,
    pub alpha2: T,
    pub alpha3: T,
}

impl<T: Real> AlphaTriple<T> {
    pub fn new(alpha1: T, alpha2: T, alpha3: T) -> Result<Self> {
        let pi = T::PI();
        for a in [alpha1, alpha2, alpha3] {
            if !(a >= T::zero() && a <= pi) {
                return Err(Error::Param(format!("alpha {a} outside [0, π]")));
            }
        }
        Ok(Self {
            alpha1,
            alpha2,
            alpha3,
        })
    }

    /// Angles given in units of π.
    pub fn from_pi_units(a: [f64; 3]) -> Result<Self> {
        Self::new(T::lit(a[0] * PI), T::lit(a[1] * PI), T::lit(a[2] * PI))
    }
}

/// `cos α₁ sin α₂|00⟩ + cos α₁ cos α₂|01⟩ + sin α₁ sin α₃|10⟩ + sin α₁ cos α₃|11⟩`.
pub fn alpha_state<T: Real>(a: &AlphaTriple<T>) -> PureState<T> {
    let (s1, c1) = a.alpha1.sin_cos();
    let (s2, c2) = a.alpha2.sin_cos();
    let (s3, c3) = a.alpha3.sin_cos();
    let amps = [c1 * s2, c1 * c2, s1 * s3, s1 * c3]
        .into_iter()
        .map(|x| Complex::new(x, T::zero()))
        .collect();
    PureState::new(amps).expect("alpha state has unit norm")
}

/// Uniform draw of each angle from `[0, π]`.
pub fn sample_alpha<T: Real, R: Rng + ?Sized>(rng: &mut R) -> AlphaTriple<T> {
    let mut draw = || T::lit(rng.random::<f64>() * PI);
    AlphaTriple {
        alpha1: draw(),
        alpha2: draw(),
        alpha3: draw(),
    }
}

/// Draws `count` alpha states, redrawing until they are linearly independent
/// (a probability-one event).
pub fn sample_independent_alpha_states<T: Real, R: Rng + ?Sized>(
    count: usize,
    rng: &mut R,
) -> (Vec<AlphaTriple<T>>, Vec<PureState<T>>) {
    loop {
        let triples: Vec<_> = (0..count).map(|_| sample_alpha(rng)).collect();
        let states: Vec<_> = triples.iter().map(alpha_state).collect();
        if max_lin_independent(&states, T::tolerances().rank) == Ok(count) {
            return (triples, states);
        }
    }
}

/// Weighted set of pure states on a trash ⊗ latent space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble<T> {
    states: Vec<PureState<T>>,
    priors: Vec<T>,
    partition: Partition,
}

impl<T: Real> Ensemble<T> {
    /// States must already be in trash-major order. `None` priors means uniform.
    pub fn new(states: Vec<PureState<T>>, priors: Option<Vec<T>>, partition: Partition) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::Empty("ensemble"));
        }
        let dim = partition.dim();
        if let Some(s) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::Dimension(format!(
                "state of dimension {} in a {}x{} ensemble",
                s.dim(),
                partition.dim_a,
                partition.dim_b
            )));
        }
        let tol = T::tolerances();
        if let Some(s) = states.iter().find(|s| (s.norm() - T::one()).abs() > tol.norm) {
            return Err(Error::Param(format!("state norm {} is not 1", s.norm())));
        }
        let priors = match priors {
            Some(p) => {
                validate_priors(&p, states.len())?;
                p
            }
            None => vec![T::one() / T::lit(states.len() as f64); states.len()],
        };
        Ok(Self {
            states,
            priors,
            partition,
        })
    }

    /// Two-qubit ensemble from physical (path-first) states.
    pub fn from_physical(
        states: Vec<PureState<T>>,
        priors: Option<Vec<T>>,
        trash: TrashQubit,
    ) -> Result<Self> {
        if states.iter().any(|s| s.dim() != 4) {
            return Err(Error::Dimension("two-qubit ensemble needs dimension-4 states".into()));
        }
        let reordered = states.iter().map(|s| trash.reorder_state(s)).collect();
        Self::new(reordered, priors, Partition::TWO_QUBITS)
    }

    pub fn states(&self) -> &[PureState<T>] {
        &self.states
    }

    pub fn priors(&self) -> &[T] {
        &self.priors
    }

    pub fn partition(&self) -> Partition {
        self.partition
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PureState<T>, T)> {
        self.states.iter().zip(self.priors.iter().copied())
    }
}

pub(crate) fn validate_priors<T: Real>(p: &[T], n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::Priors(format!("{} priors for {n} states", p.len())));
    }
    if let Some(x) = p.iter().find(|x| !(**x >= T::zero())) {
        return Err(Error::Priors(format!("negative prior {x}")));
    }
    let total: T = p.iter().copied().sum();
    if (total - T::one()).abs() > T::tolerances().norm {
        return Err(Error::Priors(format!("priors sum to {total}, not 1")));
    }
    Ok(())
}

/// `ρ = Σ pᵢ|φᵢ⟩⟨φᵢ|`.
pub fn ensemble_density<T: Real>(e: &Ensemble<T>) -> ComplexMatrix<T> {
    let n = e.partition.dim();
    e.iter().fold(ComplexMatrix::zeros(n, n), |acc, (s, p)| {
        &acc + &s.projector().scale_real(p)
    })
}
