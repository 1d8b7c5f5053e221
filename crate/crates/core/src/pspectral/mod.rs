//! Discrete p-Laplacian: Rayleigh quotients, the closed-manifold constraint,
//! first eigenpairs and one-dimensional radial reductions.

mod constraint;
mod field;
mod nodal;
mod radial;
mod rayleigh;
mod solver;

pub use constraint::{constraint_residual, project_constraint};
pub use field::{PExponent, ScalarField, P_MAX, P_MIN};
pub use nodal::{nodal_domains, NodalDomains};
pub use radial::{solve_radial_1d, RadialProblem};
pub use rayleigh::{p_energy, p_mass, rayleigh_quotient, Region};
pub use solver::{closed_eigen, dirichlet_eigen, EigenResult, SolverOptions};
