//! Competition functions: who transmits when two active particles of
//! different types collide.

use rand::Rng;

use super::config::Competition;
use crate::kinetics::Vec2;

/// What a competition function may look at for one particle.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CompetitorContext {
    pub pos: Vec2,
    pub vel: Vec2,
    /// Number of entries in the carried recipe.
    pub recipe_len: usize,
    /// Same-type particles within the fixed majority radius (self excluded).
    pub same_type_nearby: usize,
    /// Same-type count over all-particle count within the particle's own
    /// perception range (self excluded; 0 when nothing is in range).
    pub relative_density: f64,
}

impl CompetitorContext {
    pub fn speed(&self) -> f64 {
        self.vel.norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Winner {
    First,
    Second,
}

impl Winner {
    pub fn flip(self) -> Winner {
        match self {
            Winner::First => Winner::Second,
            Winner::Second => Winner::First,
        }
    }
}

/// Half-angle of the rear cone for the `behind` rule (total width 90°).
const BEHIND_HALF_ANGLE: f64 = std::f64::consts::FRAC_PI_4;

/// True when `hitter` sits inside the 90° cone pointing opposite to
/// `target`'s velocity, i.e. it approached `target` from behind.
pub fn is_behind(hitter: &CompetitorContext, target: &CompetitorContext) -> bool {
    let offset = hitter.pos - target.pos;
    let (d, s) = (offset.norm(), target.vel.norm());
    if d == 0.0 || s == 0.0 {
        return false;
    }
    offset.dot(-target.vel) >= d * s * BEHIND_HALF_ANGLE.cos()
}

/// Picks a winner. Exact ties in deterministic rules are broken by a fair coin.
pub fn compete<R: Rng + ?Sized>(
    a: &CompetitorContext,
    b: &CompetitorContext,
    rule: Competition,
    rng: &mut R,
) -> Winner {
    let by_score = |sa: f64, sb: f64, rng: &mut R| {
        if sa > sb {
            Winner::First
        } else if sb > sa {
            Winner::Second
        } else {
            coin(rng)
        }
    };
    match rule {
        Competition::Faster => by_score(a.speed(), b.speed(), rng),
        Competition::Slower => by_score(-a.speed(), -b.speed(), rng),
        Competition::Behind => match (is_behind(a, b), is_behind(b, a)) {
            (true, false) => Winner::First,
            (false, true) => Winner::Second,
            _ => coin(rng),
        },
        Competition::Majority => {
            by_score(a.same_type_nearby as f64, b.same_type_nearby as f64, rng)
        }
        Competition::MajorityProbabilistic => {
            let total = a.same_type_nearby + b.same_type_nearby;
            if total == 0 {
                coin(rng)
            } else if rng.random_range(0..total) < a.same_type_nearby {
                Winner::First
            } else {
                Winner::Second
            }
        }
        Competition::MajorityRelative => by_score(a.relative_density, b.relative_density, rng),
        Competition::RecipeLength => by_score(a.recipe_len as f64, b.recipe_len as f64, rng),
        Competition::RecipeLengthThenMajority => {
            if a.recipe_len != b.recipe_len {
                by_score(a.recipe_len as f64, b.recipe_len as f64, rng)
            } else {
                by_score(a.same_type_nearby as f64, b.same_type_nearby as f64, rng)
            }
        }
        Competition::RecipeLengthTimesMajority => by_score(
            (a.recipe_len * a.same_type_nearby) as f64,
            (b.recipe_len * b.same_type_nearby) as f64,
            rng,
        ),
    }
}

fn coin<R: Rng + ?Sized>(rng: &mut R) -> Winner {
    if rng.random_bool(0.5) {
        Winner::First
    } else {
        Winner::Second
    }
}
