//! Quantum autoencoder toolkit.
//!
//! Every numeric routine is generic over the scalar type ([`Real`], `f32` or
//! `f64`); the aliases below fix the working precision to `f64`.

pub mod disc;
pub mod encoder;
pub mod error;
pub mod optim;
pub mod photonic;
pub mod qlin;
pub mod qstate;
pub mod scalar;
pub mod tol;
pub mod tomo;
pub mod train;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex = num_complex::Complex<f64>;
pub type Matrix = qlin::ComplexMatrix<f64>;
pub type State = qlin::PureState<f64>;
pub type Ensemble = qstate::Ensemble<f64>;
pub type Reference = encoder::ReferenceState<f64>;
pub type DeviceParams = photonic::DeviceParams<f64>;
pub type StageParams = photonic::StageParams<f64>;
pub type TrainConfig = train::TrainConfig<f64>;
pub type TrainTrace = train::TrainTrace<f64>;
pub type ProcessMatrix = tomo::ProcessMatrix<f64>;
pub type DiscriminationProblem = disc::DiscriminationProblem<f64>;

pub type Matrix32 = qlin::ComplexMatrix<f32>;
pub type State32 = qlin::PureState<f32>;
