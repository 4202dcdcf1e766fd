use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kinetics::KineticsConfig;

/// How colliding pairs are found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionMode {
    /// Threshold scales with the larger perception radius of the pair
    /// (reproduces the older, perception-dependent detector).
    Original,
    /// Fixed contact radius.
    Revised,
}

/// Rule deciding which of two colliding active particles transmits its recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Competition {
    Faster,
    Slower,
    Behind,
    Majority,
    MajorityProbabilistic,
    MajorityRelative,
    RecipeLength,
    RecipeLengthThenMajority,
    RecipeLengthTimesMajority,
}

impl Competition {
    pub const ALL: [Competition; 9] = [
        Competition::Faster,
        Competition::Slower,
        Competition::Behind,
        Competition::Majority,
        Competition::MajorityProbabilistic,
        Competition::MajorityRelative,
        Competition::RecipeLength,
        Competition::RecipeLengthThenMajority,
        Competition::RecipeLengthTimesMajority,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Competition::Faster => "faster",
            Competition::Slower => "slower",
            Competition::Behind => "behind",
            Competition::Majority => "majority",
            Competition::MajorityProbabilistic => "majority_probabilistic",
            Competition::MajorityRelative => "majority_relative",
            Competition::RecipeLength => "recipe_length",
            Competition::RecipeLengthThenMajority => "recipe_length_then_majority",
            Competition::RecipeLengthTimesMajority => "recipe_length_times_majority",
        }
    }

    /// Deterministic selectors fall back to a fair coin only on exact ties.
    pub fn is_deterministic(self) -> bool {
        self != Competition::MajorityProbabilistic
    }
}

impl FromStr for Competition {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Competition::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ConfigError::UnknownCompetition(s.to_string()))
    }
}

impl fmt::Display for Competition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Recipe mutation probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MutationRates {
    /// Probability that a transmitted recipe mutates.
    pub transmission: f64,
    /// Per active particle per step.
    pub spontaneous: f64,
}

impl MutationRates {
    pub const LOW: MutationRates = MutationRates {
        transmission: 1e-3,
        spontaneous: 1e-5,
    };
    pub const HIGH: MutationRates = MutationRates {
        transmission: 1e-1,
        spontaneous: 1e-3,
    };
}

/// Periodic exogenous perturbations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PerturbationSchedule {
    /// Steps between events; `None` disables perturbations.
    pub interval: Option<u64>,
    /// Radius of a deactivation disc, as a fraction of the side length.
    pub disc_radius_fraction: f64,
    /// Fraction of particles relocated by a scatter event.
    pub scatter_fraction: f64,
}

impl Default for PerturbationSchedule {
    fn default() -> Self {
        Self {
            interval: None,
            disc_radius_fraction: 0.2,
            scatter_fraction: 0.1,
        }
    }
}

impl PerturbationSchedule {
    pub fn every(interval: u64) -> Self {
        Self {
            interval: Some(interval),
            ..Self::default()
        }
    }

    pub fn is_due(&self, t: u64) -> bool {
        matches!(self.interval, Some(k) if k > 0 && t > 0 && t % k == 0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EcoConfig {
    /// Re-differentiation probability per active particle per step.
    pub redifferentiation: f64,
    pub mutation: MutationRates,
    pub competition: Competition,
    pub collision: CollisionMode,
    /// Contact distance in revised mode.
    pub collision_radius: f64,
    /// Perception radius attributed to passive particles in original mode.
    pub passive_perception: f64,
    /// Probability that a mutation event appends a random entry.
    pub add_rate: f64,
    /// Neighborhood radius for same-type counting.
    pub majority_radius: f64,
    pub perturbation: PerturbationSchedule,
    pub kinetics: KineticsConfig,
}

impl Default for EcoConfig {
    fn default() -> Self {
        Self {
            redifferentiation: 0.005,
            mutation: MutationRates::LOW,
            competition: Competition::MajorityRelative,
            collision: CollisionMode::Revised,
            collision_radius: 10.0,
            passive_perception: 10.0,
            add_rate: 0.1,
            majority_radius: 30.0,
            perturbation: PerturbationSchedule::default(),
            kinetics: KineticsConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{name} must be a probability in [0, 1], got {value}")]
    Probability { name: &'static str, value: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("unknown competition function `{0}`")]
    UnknownCompetition(String),
    #[error("unknown condition `{0}` (expected original-low, original-high, revised-low or revised-high)")]
    UnknownCondition(String),
}

impl EcoConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let probs = [
            ("redifferentiation", self.redifferentiation),
            ("mutation.transmission", self.mutation.transmission),
            ("mutation.spontaneous", self.mutation.spontaneous),
            ("add_rate", self.add_rate),
            ("perturbation.disc_radius_fraction", self.perturbation.disc_radius_fraction),
            ("perturbation.scatter_fraction", self.perturbation.scatter_fraction),
        ];
        for (name, value) in probs {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Probability { name, value });
            }
        }
        let positives = [
            ("collision_radius", self.collision_radius),
            ("passive_perception", self.passive_perception),
            ("majority_radius", self.majority_radius),
        ];
        for (name, value) in positives {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ConfigError::NonPositive { name, value });
            }
        }
        Ok(())
    }

    pub fn for_condition(condition: Condition) -> Self {
        condition.config()
    }
}

/// The four named experimental conditions: collision detector × mutation
/// level, with perturbations on exactly for the high-mutation ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    #[serde(rename = "original-low")]
    OriginalLow,
    #[serde(rename = "original-high")]
    OriginalHigh,
    #[serde(rename = "revised-low")]
    RevisedLow,
    #[serde(rename = "revised-high")]
    RevisedHigh,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition::OriginalLow,
        Condition::OriginalHigh,
        Condition::RevisedLow,
        Condition::RevisedHigh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Condition::OriginalLow => "original-low",
            Condition::OriginalHigh => "original-high",
            Condition::RevisedLow => "revised-low",
            Condition::RevisedHigh => "revised-high",
        }
    }

    pub fn is_high(self) -> bool {
        matches!(self, Condition::OriginalHigh | Condition::RevisedHigh)
    }

    pub fn collision(self) -> CollisionMode {
        match self {
            Condition::OriginalLow | Condition::OriginalHigh => CollisionMode::Original,
            Condition::RevisedLow | Condition::RevisedHigh => CollisionMode::Revised,
        }
    }

    pub fn config(self) -> EcoConfig {
        let high = self.is_high();
        EcoConfig {
            mutation: if high { MutationRates::HIGH } else { MutationRates::LOW },
            collision: self.collision(),
            add_rate: 0.5,
            perturbation: if high {
                PerturbationSchedule::every(2000)
            } else {
                PerturbationSchedule::default()
            },
            ..EcoConfig::default()
        }
    }
}

impl FromStr for Condition {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Condition::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| ConfigError::UnknownCondition(s.to_string()))
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
