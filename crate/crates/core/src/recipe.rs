//! Recipes: the genome of a swarm, and their line-oriented text form.
//!
//! ```text
//! 97 * (226.76, 3.11, 9.61, 0.15, 0.88, 43.35, 0.44, 1.0)
//! 38 * (57.47, 9.99, 35.18, 0.15, 0.37, 30.96, 0.05, 0.31)
//! ```
//!
//! Each line is one type: its designed particle count, then the eight kinetic
//! parameters in `(R, Vn, Vm, c1, c2, c3, c4, c5)` order.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{KineticParams, PARAM_COUNT, PARAM_RANGES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecipeEntry {
    pub count: u32,
    pub params: KineticParams,
}

/// Ordered, non-empty list of `(count, params)` entries. Every count is at least 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<RecipeEntry>", into = "Vec<RecipeEntry>")]
pub struct Recipe {
    entries: Vec<RecipeEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecipeError {
    #[error("recipe has no entries")]
    Empty,
    #[error("line {line}: malformed entry: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("line {line}: count must be positive, got {count}")]
    NonPositiveCount { line: usize, count: i64 },
    #[error("line {line}: expected {PARAM_COUNT} parameters, found {found}")]
    Arity { line: usize, found: usize },
    #[error("entry {index}: count must be positive")]
    ZeroCount { index: usize },
}

impl Recipe {
    pub fn new(entries: Vec<RecipeEntry>) -> Result<Self, RecipeError> {
        if entries.is_empty() {
            return Err(RecipeError::Empty);
        }
        if let Some(index) = entries.iter().position(|e| e.count == 0) {
            return Err(RecipeError::ZeroCount { index });
        }
        let entries = entries
            .into_iter()
            .map(|e| RecipeEntry {
                count: e.count,
                params: e.params.clamp(),
            })
            .collect();
        Ok(Self { entries })
    }

    /// A one-type recipe.
    pub fn single(count: u32, params: KineticParams) -> Self {
        Self::new(vec![RecipeEntry { count: count.max(1), params }]).expect("non-empty")
    }

    pub fn entries(&self) -> &[RecipeEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn total_count(&self) -> u64 {
        self.entries.iter().map(|e| e.count as u64).sum()
    }

    pub fn params(&self, index: usize) -> &KineticParams {
        &self.entries[index].params
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }
}

impl TryFrom<Vec<RecipeEntry>> for Recipe {
    type Error = RecipeError;

    fn try_from(entries: Vec<RecipeEntry>) -> Result<Self, Self::Error> {
        Recipe::new(entries)
    }
}

impl From<Recipe> for Vec<RecipeEntry> {
    fn from(r: Recipe) -> Self {
        r.entries
    }
}

/// Shortest decimal that parses back to the same `f64`, always with a
/// fractional part (`1.0`, never `1` or `1e0`).
pub fn format_param(x: f64) -> String {
    let s = format!("{x}");
    if s.contains('.') {
        s
    } else {
        format!("{s}.0")
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{} * (", e.count)?;
            for (k, v) in e.params.to_array().iter().enumerate() {
                if k > 0 {
                    f.write_str(", ")?;
                }
                f.write_str(&format_param(*v))?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl FromStr for Recipe {
    type Err = RecipeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_recipe(s)
    }
}

pub fn serialize_recipe(recipe: &Recipe) -> String {
    recipe.to_string()
}

/// Parses the line format. Blank lines are skipped; out-of-range parameter
/// values are clamped rather than rejected.
pub fn parse_recipe(text: &str) -> Result<Recipe, RecipeError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        entries.push(parse_line(line, idx + 1)?);
    }
    Recipe::new(entries)
}

fn parse_line(line: &str, lineno: usize) -> Result<RecipeEntry, RecipeError> {
    let malformed = |reason: &str| RecipeError::Malformed {
        line: lineno,
        reason: reason.to_string(),
    };
    let (count_part, rest) = line.split_once('*').ok_or_else(|| malformed("missing `*`"))?;
    let count_str = count_part.trim();
    if count_str.is_empty()
        || !count_str
            .trim_start_matches(['-', '+'])
            .chars()
            .all(|c| c.is_ascii_digit())
    {
        return Err(malformed("count is not an integer"));
    }
    let count: i64 = count_str
        .parse()
        .map_err(|_| malformed("count is not an integer"))?;
    if count <= 0 {
        return Err(RecipeError::NonPositiveCount { line: lineno, count });
    }
    let count = u32::try_from(count).map_err(|_| malformed("count too large"))?;

    let body = rest.trim();
    let inner = body
        .strip_prefix('(')
        .and_then(|b| b.strip_suffix(')'))
        .ok_or_else(|| malformed("parameters must be enclosed in parentheses"))?;
    let fields: Vec<&str> = inner.split(',').map(str::trim).collect();
    if fields.len() != PARAM_COUNT {
        return Err(RecipeError::Arity {
            line: lineno,
            found: if inner.trim().is_empty() { 0 } else { fields.len() },
        });
    }
    let mut values = [0.0; PARAM_COUNT];
    for (slot, field) in values.iter_mut().zip(fields) {
        *slot = parse_decimal(field)
            .ok_or_else(|| malformed(&format!("`{field}` is not a plain decimal")))?;
    }
    Ok(RecipeEntry {
        count,
        params: KineticParams::clamped(values),
    })
}

/// Plain decimals only: optional sign, digits, optional fraction.
fn parse_decimal(s: &str) -> Option<f64> {
    let unsigned = s.strip_prefix(['-', '+']).unwrap_or(s);
    let (int, frac) = unsigned.split_once('.').unwrap_or((unsigned, ""));
    let digits_ok = |p: &str| p.chars().all(|c| c.is_ascii_digit());
    if (int.is_empty() && frac.is_empty()) || !digits_ok(int) || !digits_ok(frac) {
        return None;
    }
    s.parse().ok()
}

/// Uniform draw over the admissible parameter box.
pub fn random_params<R: Rng + ?Sized>(rng: &mut R) -> KineticParams {
    let mut v = [0.0; PARAM_COUNT];
    for (x, &(lo, hi)) in v.iter_mut().zip(PARAM_RANGES.iter()) {
        *x = lo + (hi - lo) * rng.random::<f64>();
    }
    KineticParams::clamped(v)
}

/// `n_types` independent uniform parameter sets, each with `count_per_type` particles.
pub fn random_recipe<R: Rng + ?Sized>(rng: &mut R, n_types: usize, count_per_type: u32) -> Recipe {
    assert!(n_types >= 1, "a recipe needs at least one type");
    let entries = (0..n_types)
        .map(|_| RecipeEntry {
            count: count_per_type.max(1),
            params: random_params(rng),
        })
        .collect();
    Recipe::new(entries).expect("non-empty")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;
    use proptest::prelude::*;

    const EXAMPLE: &str = "97 * (226.76, 3.11, 9.61, 0.15, 0.88, 43.35, 0.44, 1.0)\n\
38 * (57.47, 9.99, 35.18, 0.15, 0.37, 30.96, 0.05, 0.31)\n\
56 * (15.25, 13.58, 3.82, 0.3, 0.8, 39.51, 0.43, 0.65)\n\
31 * (113.21, 18.25, 38.21, 0.62, 0.46, 15.78, 0.49, 0.61)";

    #[test]
    fn parses_single_line() {
        let r = parse_recipe("97 * (226.76, 3.11, 9.61, 0.15, 0.88, 43.35, 0.44, 1.0)").unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.entries()[0].count, 97);
        assert_eq!(r.params(0).perception, 226.76);
        assert_eq!(r.params(0).self_propulsion, 1.0);
    }

    #[test]
    fn empty_text_is_an_error() {
        assert_eq!(parse_recipe(""), Err(RecipeError::Empty));
        assert_eq!(parse_recipe("\n\n  \n"), Err(RecipeError::Empty));
    }

    #[test]
    fn all_zero_parameters_are_valid() {
        let r = parse_recipe("5 * (0, 0, 0, 0, 0, 0, 0, 0)").unwrap();
        assert_eq!(r.entries()[0].count, 5);
        assert_eq!(r.params(0).to_array(), [0.0; 8]);
    }

    #[test]
    fn serializes_example_line() {
        let p = KineticParams::clamped([57.47, 9.99, 35.18, 0.15, 0.37, 30.96, 0.05, 0.31]);
        let r = Recipe::single(38, p);
        assert_eq!(
            serialize_recipe(&r),
            "38 * (57.47, 9.99, 35.18, 0.15, 0.37, 30.96, 0.05, 0.31)"
        );
    }

    #[test]
    fn four_entry_example_round_trips_verbatim() {
        let r = parse_recipe(EXAMPLE).unwrap();
        assert_eq!(r.len(), 4);
        let text = serialize_recipe(&r);
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text, EXAMPLE);
        let counts: Vec<u32> = r.entries().iter().map(|e| e.count).collect();
        assert_eq!(counts, vec![97, 38, 56, 31]);
    }

    #[test]
    fn error_paths_report_line_numbers() {
        let bad_arity = "1 * (1, 2, 3, 4, 5, 6, 7, 0.1)\n\n2 * (1, 2, 3)";
        assert_eq!(parse_recipe(bad_arity), Err(RecipeError::Arity { line: 3, found: 3 }));
        assert_eq!(
            parse_recipe("0 * (1, 2, 3, 4, 5, 6, 7, 0.1)"),
            Err(RecipeError::NonPositiveCount { line: 1, count: 0 })
        );
        assert_eq!(
            parse_recipe("-3 * (1, 2, 3, 4, 5, 6, 7, 0.1)"),
            Err(RecipeError::NonPositiveCount { line: 1, count: -3 })
        );
        assert!(matches!(
            parse_recipe("garbage"),
            Err(RecipeError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_recipe("1 * (1e2, 2, 3, 4, 5, 6, 7, 0.1)"),
            Err(RecipeError::Malformed { line: 1, .. })
        ));
        assert!(matches!(
            parse_recipe("1 * 1, 2, 3, 4, 5, 6, 7, 0.1"),
            Err(RecipeError::Malformed { .. })
        ));
    }

    #[test]
    fn parsed_values_are_clamped() {
        let r = parse_recipe("3 * (999, -4, 41, 1.5, 0.5, 100.0, 0.9, 1.0)").unwrap();
        assert_eq!(r.params(0).to_array(), [300.0, 0.0, 40.0, 1.0, 0.5, 100.0, 0.5, 1.0]);
    }

    #[test]
    fn crlf_lines_accepted() {
        let r = parse_recipe("1 * (1, 2, 3, 0.4, 0.5, 6, 0.1, 0.2)\r\n2 * (1, 2, 3, 0.4, 0.5, 6, 0.1, 0.2)\r\n");
        assert_eq!(r.unwrap().len(), 2);
    }

    #[test]
    fn random_recipe_is_deterministic_and_in_range() {
        let a = random_recipe(&mut SimRng::new(42), 1, 1);
        let b = random_recipe(&mut SimRng::new(42), 1, 1);
        assert_eq!(a, b);
        assert!(a.params(0).is_within_bounds());
        let c = random_recipe(&mut SimRng::new(3), 3, 10);
        assert_eq!(c.len(), 3);
        assert_eq!(c.total_count(), 30);
    }

    fn arb_recipe() -> impl Strategy<Value = Recipe> {
        let entry = (1u32..10_000, proptest::array::uniform8(-10.0f64..400.0)).prop_map(|(count, v)| {
            RecipeEntry {
                count,
                params: KineticParams::clamped(v),
            }
        });
        proptest::collection::vec(entry, 1..8).prop_map(|e| Recipe::new(e).unwrap())
    }

    proptest! {
        #[test]
        fn codec_round_trip(r in arb_recipe()) {
            prop_assert_eq!(parse_recipe(&serialize_recipe(&r)).unwrap(), r);
        }
    }
}
