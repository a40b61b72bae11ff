//! Library surface of the command-line tool, split out so integration tests
//! can drive commands in-process.

pub mod commands;
pub mod config;

pub use commands::{run, run_decompose, run_scan, run_simulate, run_verify, Outcome};
pub use config::{
    CommandKind, GaugeCfg, InitCfg, MetropolisCfg, MinimizeCfg, OutputCfg, OutputFormat, Overrides,
    Resolved, RunConfig, ScanCfg, SpinCfg,
};
