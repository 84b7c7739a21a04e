//! Explicit deformation paths between 12-point configurations and their
//! verification by dense sampling.

pub mod bottleneck;
pub mod m5;
pub mod m6;
pub mod path;

pub use bottleneck::{
    bottleneck_bracket, bottleneck_radii, bottleneck_radius, critical_radius_lower_bound,
    modified_m5_path, modified_m5_radius, BottleneckResult, FeasibilityBracket,
};
pub use m5::{m5_path, m5_path_from, zeta_gap};
pub use m6::{bisector_clearance_check, bisector_distances, m6_path, polar_increment, M6Variant};
pub use path::{verify_path, DeformationPath, PathReport, Segment};
