//! Geometry of holomorphic self-maps of the unit disk: level sets of the
//! density quotient and of the hyperbolic-distance gap, with hyperbolic
//! convexity checks driven by explicit second-variation formulas.

pub mod convexity;
pub mod geodesic;
pub mod hyp_core;
pub mod level_set;
pub mod map_dsl;
pub mod render;
pub mod suites;

pub use geodesic::{geodesic_through, orthogonal_geodesic, segment_sample, Geodesic};
pub use hyp_core::{hyp_distance, nu_f, BoundaryPoint, DiskPoint, MoebiusAutomorphism};
pub use level_set::{extract_region, membership, potential_u, LevelSpec, PhiKind};
pub use map_dsl::{parse, MapExpr};
