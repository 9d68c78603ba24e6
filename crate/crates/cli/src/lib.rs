//! Library side of the `diagcount` binary: grid parsing, the bundled bound
//! suite and report emission.

pub mod grid;
pub mod report;
pub mod suite;

pub use grid::Grid;
pub use report::{Fixed, Report, ReportRow, Summary};
pub use suite::{evaluate, run_suite, Manifest, Preset, SuiteEntry, SuiteError, SuiteOptions, BUNDLED_MANIFEST};
