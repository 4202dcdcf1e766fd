//! Bundled example designs for the designed initial condition.
//!
//! These are hand-made stand-ins, not the canonical recipes of the same
//! names, which were never published. Each forms a coherent multi-type
//! structure from a single seed particle. Load your own designs with
//! [`crate::parse_recipe`].

use crate::recipe::{parse_recipe, Recipe};

pub const NAMES: [&str; 3] = ["swinger", "rotary", "walker-follower"];

/// An oscillating pair of interleaved clusters.
pub const SWINGER: &str = "\
120 * (80.0, 4.0, 10.0, 0.9, 0.2, 40.0, 0.05, 0.4)
80 * (60.0, 8.0, 16.0, 0.6, 0.8, 20.0, 0.1, 0.9)
";

/// A dense core circled by a faster, strongly aligning ring.
pub const ROTARY: &str = "\
100 * (50.0, 2.0, 6.0, 1.0, 0.1, 60.0, 0.02, 0.2)
100 * (120.0, 10.0, 14.0, 0.4, 0.9, 10.0, 0.05, 1.0)
";

/// A fast, aligned leading group trailed by a cohesive follower group.
pub const WALKER_FOLLOWER: &str = "\
90 * (70.0, 12.0, 20.0, 0.3, 1.0, 15.0, 0.02, 1.0)
60 * (150.0, 6.0, 18.0, 0.8, 0.5, 30.0, 0.05, 0.6)
50 * (40.0, 3.0, 8.0, 1.0, 0.2, 50.0, 0.1, 0.3)
";

/// Looks up a bundled design.
pub fn by_name(name: &str) -> Option<Recipe> {
    let text = match name {
        "swinger" => SWINGER,
        "rotary" => ROTARY,
        "walker-follower" => WALKER_FOLLOWER,
        _ => return None,
    };
    Some(parse_recipe(text).expect("bundled design parses"))
}
