//! Colorability (the ideal Kochen-Specker contradiction) and minimum defect
//! (its per-trial form under errors).

mod coloring;
mod defect;
mod validate;

pub use coloring::{
    brute_force_coloring, find_coloring, BruteForceReport, Coloring, ColoringError, ColoringReport,
    VectorAssignment, BRUTE_FORCE_MAX_VECTORS,
};
pub use defect::{
    min_defect, DefectBreakdown, DefectError, DefectReport, SlotAssignment, SlotLayout, SlotLink,
    DEFECT_MAX_DIMENSION,
};
pub use validate::validate_orthogonality;
