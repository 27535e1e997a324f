//! Experiment orchestration: configuration, runners, threshold bisection and rate reports.

mod bisection;
mod config;
mod report;
mod run;
mod scan;

pub use bisection::{threshold_bisection, threshold_exponent, BisectionStatus, ThresholdResult, Trial, MAX_EXPANSIONS};
pub use config::{
    BisectionConfig, ExperimentConfig, GridConfig, Mode, PhysicsConfig, SweepConfig, TimeConfig, CONFIG_VERSION,
};
pub use report::{fit_report, FitReport, FitRow, SeriesBundle, FIT_T_MIN};
pub use run::{
    dns_verdict, run, run_dispersive, run_dns, run_dns_from, run_linear, run_threshold, run_verify_multipliers,
    threshold_sweep, ExperimentOutput, DISPERSIVE_TIMES, RESONANT_TB,
};
pub use scan::{multiplier_scan, MultiplierScan, SCAN_COLUMNS, SCAN_NUS, SCAN_SHEAR_MAX};
