//! Human-steered evolution: a population of independently simulated swarm
//! tiles and the operators a user applies to them.

mod log;
mod session;

pub use log::{read_log, write_log, OpRecord, Operator};
pub use session::{
    mix_recipes, mutate_swarm_recipe, random_swarm_recipe, Mode, Session, SessionConfig, SessionError, Stamp,
    SwarmTile, TileId,
};
