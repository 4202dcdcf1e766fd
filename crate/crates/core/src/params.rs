//! Kinetic parameter sets.
//!
//! A particle type is fully described by eight numbers. Every constructor and
//! every mutation path funnels through [`KineticParams::clamped`], so values
//! outside the admissible box never exist inside the engine.

use serde::{Deserialize, Serialize};

/// Number of kinetic parameters per type.
pub const PARAM_COUNT: usize = 8;

/// Admissible `(min, max)` for each parameter, in storage order
/// `(R, Vn, Vm, c1, c2, c3, c4, c5)`.
pub const PARAM_RANGES: [(f64, f64); PARAM_COUNT] = [
    (0.0, 300.0),
    (0.0, 20.0),
    (0.0, 40.0),
    (0.0, 1.0),
    (0.0, 1.0),
    (0.0, 100.0),
    (0.0, 0.5),
    (0.0, 1.0),
];

/// Largest perception radius any particle can have.
pub const MAX_PERCEPTION: f64 = 300.0;

pub const PARAM_NAMES: [&str; PARAM_COUNT] = ["R", "Vn", "Vm", "c1", "c2", "c3", "c4", "c5"];

/// One particle type's kinetic parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KineticParams {
    /// Perception radius (pixels).
    pub perception: f64,
    /// Normal speed (pixels/step).
    pub normal_speed: f64,
    /// Maximum speed (pixels/step).
    pub max_speed: f64,
    /// Cohesive force strength.
    pub cohesion: f64,
    /// Aligning force strength.
    pub alignment: f64,
    /// Separating force strength.
    pub separation: f64,
    /// Probability of a random steering kick per step.
    pub randomness: f64,
    /// Tendency to return to normal speed.
    pub self_propulsion: f64,
}

impl KineticParams {
    /// Builds a parameter set from values in storage order, clamping each
    /// into its admissible range. NaN becomes the lower bound.
    pub fn clamped(values: [f64; PARAM_COUNT]) -> Self {
        let mut v = values;
        for (x, &(lo, hi)) in v.iter_mut().zip(PARAM_RANGES.iter()) {
            *x = clamp_one(*x, lo, hi);
        }
        Self::from_array_unchecked(v)
    }

    fn from_array_unchecked(v: [f64; PARAM_COUNT]) -> Self {
        Self {
            perception: v[0],
            normal_speed: v[1],
            max_speed: v[2],
            cohesion: v[3],
            alignment: v[4],
            separation: v[5],
            randomness: v[6],
            self_propulsion: v[7],
        }
    }

    pub fn to_array(&self) -> [f64; PARAM_COUNT] {
        [
            self.perception,
            self.normal_speed,
            self.max_speed,
            self.cohesion,
            self.alignment,
            self.separation,
            self.randomness,
            self.self_propulsion,
        ]
    }

    /// Re-applies the range clamp.
    pub fn clamp(&self) -> Self {
        Self::clamped(self.to_array())
    }

    pub fn is_within_bounds(&self) -> bool {
        self.to_array()
            .iter()
            .zip(PARAM_RANGES.iter())
            .all(|(&x, &(lo, hi))| x >= lo && x <= hi)
    }
}

fn clamp_one(x: f64, lo: f64, hi: f64) -> f64 {
    if x.is_nan() {
        lo
    } else {
        // `+ 0.0` folds -0.0 into 0.0
        x.clamp(lo, hi) + 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn out_of_range_values_are_clamped() {
        let p = KineticParams::clamped([400.0, -1.0, 40.0, 2.0, 0.5, 150.0, 0.7, f64::NAN]);
        assert_eq!(p.to_array(), [300.0, 0.0, 40.0, 1.0, 0.5, 100.0, 0.5, 0.0]);
        assert!(p.is_within_bounds());
    }

    proptest! {
        #[test]
        fn clamp_is_idempotent(v in proptest::array::uniform8(-500.0f64..500.0)) {
            let once = KineticParams::clamped(v);
            prop_assert_eq!(once.clamp(), once);
            prop_assert!(once.is_within_bounds());
        }
    }
}
