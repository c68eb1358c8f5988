//! Sweeps, exact-vs-CV comparisons, collapse location and file output
//! shared by the command-line front end.

pub mod compare;
pub mod config;
pub mod output;
pub mod sweep;

pub use compare::{
    compare_point, compare_spectra, density_overlap, deviation_scaling, fit_power_law,
    ground_offset, ComparisonReport, LevelDeviation, OverlapEntry, ScalingFit,
};
pub use config::{OutputFormat, RunConfig, SweepSpec, SweptParameter};
pub use sweep::{
    gap_curve, locate_collapse, locate_collapse_refined, locate_gap_minimum, sweep_coupling,
    sweep_point, CollapseEstimate, GapPoint, SweepRecord,
};
