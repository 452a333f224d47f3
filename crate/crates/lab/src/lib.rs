//! File formats, command-line runner and figure reproduction on top of `qwalk-core`.

pub mod cli;
pub mod config;
pub mod error;
pub mod figure1;
pub mod io;
pub mod report;
pub mod svg;

pub use error::{LabError, LabResult};
pub use figure1::{run_figure1, Figure1Config, Figure1Output};
