//! Benchmark environments.

mod counterexample;
pub mod delivery;
pub mod gridworld;

pub use counterexample::cmdp_a;
pub use delivery::{Delivery, DeliveryConfig, DeliveryState, Order};
pub use gridworld::{
    format_dataset, generate_dataset, generate_map, parse_dataset, parse_map, DatasetSpec, Direction, GeneratorParams,
    GridMap, GridState, Gridworld, GridworldConfig, Tile, TrapMode, GRIDWORLD_LARGE_MINI, GRIDWORLD_SMALL_MINI,
};
