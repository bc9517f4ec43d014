//! Configuration ingestion, sweep orchestration and output files.

mod config;
mod output;
mod run;
mod svg;

pub use config::{
    ConcentrationMode, ConfigError, GeometrySpec, MeshSpec, OutputSpec, RunConfig, SweepParameter,
    SweepPoint, SweepSpec,
};
pub use output::{
    csv_header, csv_row, emit_outputs, manifest, plot_data, sweep_csv, PlotData, PlotRow,
    TOOL_VERSION,
};
pub use run::{
    check_report, discretize, mesh_options, reference_mol_per_l, run_sweep, solve_point,
    solve_point_equilibrium, PointFailure, PointSolution, RunError, SweepOutcome, SweepRecord,
};
pub use svg::{line_plot, Series};
