//! Experiment configuration, parameter sweeps and output files.

mod config;
mod experiment;
mod output;

pub use config::{
    expand_sweep, DiagnosticsConfig, ExperimentConfig, SolverOptions, SweepSpec, BOUNDARY_MARGIN,
    MIN_CELLS_PER_PERIOD,
};
pub use experiment::{
    dispersion_proxy, entropy_study, initial_state, overlay, prepare, run_experiment,
    run_experiment_with, run_homogenized, run_sweep, simulate, EntropyStudy, ExperimentRecord,
    Overlay, PreparedRun, RecordStatus,
};
pub use output::{
    emit_outputs, read_speeds, summarize, summarize_records, write_speeds, ErrorStats, SpeedRow,
    Summary, SPEEDS_HEADER,
};
