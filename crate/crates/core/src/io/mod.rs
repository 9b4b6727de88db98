//! Persistence: binary checkpoints, TOML run configuration, CSV tables.

mod checkpoint;
mod config;
mod table;

pub use checkpoint::{Checkpoint, MAGIC};
pub use config::{DiagnosticsSection, GridSection, OutputSection, RunConfig, SolverSection};
pub use table::{
    fmt_f64, timeseries_header, timeseries_row, write_holder_bins, write_holder_series, TimeseriesWriter,
};
