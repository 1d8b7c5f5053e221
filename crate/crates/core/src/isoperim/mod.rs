//! Level-set boundary measures and the Gromov / Croke isoperimetric comparisons.

mod area;
mod gromov;
mod level;

pub use area::{superlevel_area, superlevel_integrals};
pub use gromov::{croke_profile, gromov_ratio, gromov_sample, CrokeProfile, GromovSample, Histogram, HISTOGRAM_BINS};
pub use level::{level_boundary_measure, level_set, LevelSetCurve};
