//! bellcert-core: exact oracles and certified global upper bounds for singlet
//! extraction from block-diagonal CHSH states.
//!
//! The crate builds a family of two-qudit states (three Jordan blocks per
//! side) whose CHSH score is 2 + (2√2−2)ν, evaluates the exact singlet
//! fidelity any pair of local extraction channels can reach on them, and
//! proves — by closed-form bounds, a Lipschitz branch-and-bound certifier and
//! an eigenvalue certificate on the residual cube — that for the published
//! parameters no extraction strategy beats the trivial fidelity ½.
//!
//! All numerics are generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); the `*64` aliases below fix `f64`, which every shipped
//! driver uses.

pub mod bounds;
pub mod certifier;
pub mod chsh;
pub mod error;
pub mod linalg;
pub mod qubit;
pub mod sample;
pub mod scalar;
pub mod search;

pub use error::{Error, Result};
pub use scalar::Real;

/// Concrete `f64` aliases for the main public types.
pub type BlochVector64 = qubit::BlochVector<f64>;
pub type ExtremalChannelParams64 = qubit::ExtremalChannelParams<f64>;
pub type KrausPair64 = qubit::KrausPair<f64>;
pub type AffineChannel64 = qubit::AffineChannel<f64>;
pub type TwoQubitOperator64 = qubit::TwoQubitOperator<f64>;
pub type StateFamilyParams64 = chsh::StateFamilyParams<f64>;
pub type Strategy64 = chsh::Strategy<f64>;
pub type ReducedPoint64 = bounds::ReducedPoint<f64>;
pub type ResidualCertificate64 = bounds::ResidualCertificate<f64>;
pub type HyperBox5 = certifier::HyperBox<f64, 5>;
pub type Aabb5 = certifier::Aabb<f64, 5>;
pub type CertificateReport5 = certifier::CertificateReport<f64, 5>;
pub type Checkpoint5 = certifier::Checkpoint<f64, 5>;
pub type ScanConfig64 = search::ScanConfig<f64>;
pub type ScanRow64 = search::ScanRow<f64>;
pub type Reproduction64 = search::Reproduction<f64>;
