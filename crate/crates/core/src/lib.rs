//! Kochen-Specker sets, their uncolorability, and the error-rate inequality
//! `Mδ + Nε < 1` that turns the ideal contradiction into a testable bound.
//!
//! * [`scalar`] and [`model`]: exact rays in ℚ(√k), contexts, `(n, N, M)`.
//! * [`format`] and [`catalog`]: the `ksset 1` text format and bundled sets.
//! * [`engine`]: coloring search, brute-force oracle, minimum defect.
//! * [`bounds`]: margins, the δ lower bound, critical independent-error rate.
//! * [`sim`]: seeded Monte Carlo of the independent-flip model.

pub mod bounds;
pub mod catalog;
pub mod engine;
pub mod format;
pub mod model;
pub mod scalar;
pub mod sim;

pub use engine::{find_coloring, min_defect, validate_orthogonality};
pub use format::{parse_set, serialize_set};
pub use model::{build_stats, KsSet, SetStats};
