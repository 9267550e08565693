//! Towers: leveled trees truncated to the lower cone of one top node.

mod build;
mod degree;
pub mod io;
#[allow(clippy::module_inception)]
mod tower;

pub use build::{ball_tower, level_subtower, regular_node_id, regular_tower, BallTower, LevelSubtower};
pub use degree::{degree_profile, entropy_from_degrees, DegreeEntry, DegreeProfile};
pub use tower::{validate_tower, Node, RawNode, RawTower, Tower};
