//! Instance generators, experiment runs, reports and plots.

mod generate;
mod plot;
mod report;
mod scaling;

pub use generate::{generate, random_points3, regulus_rulings, Instance, InstanceSpec, DEFAULT_Q};
pub use plot::{bar_svg, emit_plots, loglog_svg, render, FitLine, Series};
pub use report::{Assertion, CensusRow, ExperimentReport, PartitionRow, RichRow, RichTable};
pub use scaling::{
    fit_tolerance, loglog_fit, run_quadruple_scaling, run_quadruple_scaling_with, scaling_row, Fit, ScalingReport,
    ScalingRow, UNIT_SQUARE_QUADRUPLES,
};
