//! Experiment specs, presets, table runs and output formatting for the `covmc` binary.

pub mod emit;
pub mod error;
pub mod presets;
pub mod run;
pub mod spec;

pub use emit::{emit, Format};
pub use error::{HarnessError, Result};
pub use run::{run_experiment, Cell, Report, TableRow};
pub use spec::ExperimentSpec;
