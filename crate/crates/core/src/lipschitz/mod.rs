//! 1-Lipschitz maps between finite spaces, their two error-relaxed families,
//! and the net/projection tools used to approximate maps on doubling spaces.

mod cover;
mod doubling;
mod enumerate;
mod map;
pub(crate) mod search;

pub use cover::EXACT_COVER_MAX_POINTS;
pub use doubling::{
    doubling_exponent, nearest_gap_bound_check, nearest_point_map, separated_net, GapCheck,
};
pub(crate) use enumerate::for_each_assignment;
pub use enumerate::{
    enumerate_family, enumerate_family_unpruned, hausdorff_kyfan_families, FamilyKind, MapFamily,
    RangeLimit, SearchOptions,
};
pub use map::{almost_lipschitz_min_mass_defect, lipschitz_defect, LipschitzWitness, PointMap};
pub(crate) use cover::ConflictGraph;
