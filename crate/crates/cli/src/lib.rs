//! Batch driver for the stability analyses: runs any subset of methods on a
//! model file and writes CSV tables plus a self-contained `summary.json`.

pub mod analysis;
pub mod config;
pub mod format;

pub use analysis::{concordance_from_summary, render_concordance, run, RunOutput, Summary, SUMMARY_FILE};
pub use config::{parse_methods, AnalysisConfig, Method};
