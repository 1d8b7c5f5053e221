//! End-to-end experiments: eigenvalue comparison with the model sphere,
//! pinching sweeps over the ellipsoid family and an audit of the
//! symmetrization argument on computed eigenfunctions.

mod audit;
mod sweep;

pub use audit::{audit_eigenfunction, audit_field, lemma_chain_audit, AuditStep, ChainAudit, StepKind, AUDIT_THRESHOLDS};
pub use sweep::{matei_check, pinching_sweep, trend, trend_violation, SweepRecord, MIN_CURVATURE};
