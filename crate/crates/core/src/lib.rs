//! Numerical spectral geometry for the p-Laplacian on discrete manifolds.
//!
//! The crate computes first Dirichlet and first nonzero closed eigenvalues of
//! the p-Laplacian on triangle meshes and curves by constrained
//! Rayleigh-quotient descent, performs Schwarz symmetrization onto the model
//! sphere, and measures the isoperimetric, coarea and rearrangement
//! inequalities that relate the two.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases at the crate root fix `f64`.

pub mod battery;
pub mod error;
pub mod harness;
pub mod isoperim;
pub mod linalg;
pub mod manifold;
pub mod pspectral;
pub mod rearrange;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Mesh = manifold::Mesh<f64>;
pub type Domain<'m> = manifold::Domain<'m, f64>;
pub type CapGeometry = manifold::CapGeometry<f64>;
pub type PExponent = pspectral::PExponent<f64>;
pub type ScalarField<'m> = pspectral::ScalarField<'m, f64>;
pub type EigenResult<'m> = pspectral::EigenResult<'m, f64>;
pub type SolverOptions = pspectral::SolverOptions<f64>;
pub type DistributionProfile = rearrange::DistributionProfile<f64>;
pub type RadialProfile = rearrange::RadialProfile<f64>;
pub type LevelSetCurve = isoperim::LevelSetCurve<f64>;
pub type SweepRecord = harness::SweepRecord<f64>;
