//! Distribution functions, Schwarz symmetrization onto the model sphere and
//! the equimeasurability, Polya-Szego and coarea checks.

mod checks;
mod distribution;
mod profile;

pub use checks::{coarea_check, lp_equimeasurability, polya_szego_check, Comparison, PolyaSzego, CHECK_LEVELS};
pub(crate) use checks::threshold_grid;
pub use distribution::{distribution, DistributionProfile};
pub(crate) use profile::radius_for;
pub use profile::{symmetrize, symmetrize_levels, RadialProfile};
