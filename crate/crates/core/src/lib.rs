//! Grid path planning with R*, the randomized sparse-waypoint variant of weighted A*.
//!
//! * [`grid`]: 8-connected grids, the octile metric, paths and the map text format.
//! * [`ring`]: midpoint-circle successor rings and successor sampling.
//! * [`classic`]: A*, budgeted weighted A* and a Dijkstra oracle.
//! * [`rstar`]: the R* planner, its parameter bounds and start/goal-derived parameters.
//! * [`mapgen`]: random rectangle and tetromino obstacle maps with task placement.
//! * [`experiment`]: corpora, parameter sweeps, CSV records and reports.
//!
//! With the default `parallel` feature, sweeps run on a rayon pool; without it they run
//! sequentially.

pub mod classic;
pub mod experiment;
pub mod grid;
pub mod mapgen;
pub mod ring;
pub mod rstar;

pub use classic::{
    astar, dijkstra_oracle, reachable, weighted_astar, LocalPlanner, Outcome, Path, SearchError,
    SearchLimits, SearchResult, SearchStats, Weight,
};
pub use grid::{
    load_map, octile_dist, path_length, save_map, Cell, CornerRule, Cost, Grid, GridError,
    MapParseError, PathError, C_D, C_HV,
};
pub use ring::{enumerate_ring, ring_cells, sample_successors, RingOffsets};
pub use rstar::{
    auto_params, reconstruct, rstar_plan, rstar_plan_traced, validate_params, ParamViolation,
    RStarError, RStarParams, RStarResult, RStarStats, TraceEvent, TraceRecord,
};

/// Seeded random stream used for successor sampling and map generation.
pub type SearchRng = rand_chacha::ChaCha8Rng;
