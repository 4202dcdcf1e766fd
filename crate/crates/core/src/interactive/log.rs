//! Operator log: one JSON record per line.

use serde::{Deserialize, Serialize};

use super::session::TileId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Operator {
    Mutate { tile: TileId },
    Mix { a: TileId, b: TileId },
    Replicate { tile: TileId },
    Kill { tile: TileId },
    Random,
    NiecSelect { tiles: Vec<TileId> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpRecord {
    pub wall_ms: u64,
    /// Session step at which the operator was applied.
    pub step: u64,
    #[serde(flatten)]
    pub op: Operator,
    /// Tiles created by the operator.
    pub created: Vec<TileId>,
    /// Session RNG draws consumed so far.
    pub rng_draws: u64,
}

pub fn write_log(records: &[OpRecord]) -> String {
    records
        .iter()
        .map(|r| serde_json::to_string(r).expect("serializable") + "\n")
        .collect()
}

pub fn read_log(text: &str) -> Result<Vec<OpRecord>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}
