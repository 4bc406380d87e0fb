//! Configuration files, deterministic initial-data generators, CSV time
//! series, and binary field snapshots.
//!
//! All outputs are deterministic given (config, seed): generators draw
//! from a seeded ChaCha stream in a fixed order, series are written with
//! 17 significant digits (lossless for f64), and snapshots are raw
//! little-endian payloads.

mod config;
mod generate;
mod series;
mod snapshot;

pub use config::{
    load_config, parse_config, save_config, write_config, DetectConfig, GeneratorKind, GridConfig,
    InitialConfig, OutputConfig, RunConfig,
};
pub use generate::{generate_initial, perturbed_constant_director, random_smooth, taylor_green};
pub use series::{read_series, series_header, write_series};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
