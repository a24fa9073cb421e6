//! File formats, configuration, the experiment pipeline and reports on top
//! of `hexent-core`.

pub mod config;
pub mod error;
pub mod formats;
pub mod pipeline;
pub mod presets;
pub mod report;
pub mod store;

use std::path::Path;

pub use config::ExperimentConfig;
pub use error::{Error, Result};
pub use pipeline::{run_pipeline, PipelineRun};
pub use report::{emit_report, ExperimentReport};

/// Run the pipeline and write every artifact and report file to `out`.
pub fn run_to_directory(config: &ExperimentConfig, out: &Path) -> Result<PipelineRun> {
    let run = run_pipeline(config)?;
    store::save_simulation(&run.simulation, out)?;
    store::save_matrices(&run.matrices, out)?;
    emit_report(&run.report, &run.matrices, out)?;
    Ok(run)
}
