//! File formats, parallel drivers and the `gkp` command line for
//! [`gkp_core`].
//!
//! Everything numerical lives in the core crate; this crate adds what needs
//! `std`: JSON and CSV output, the binary grid format, rayon-backed trial
//! loops and argument parsing.

pub mod cli;
pub mod formats;
pub mod parallel;
pub mod report;

pub use cli::{run, Cli, CliError};
pub use parallel::{oracle_check_parallel, simulate_parallel};
pub use report::{Envelope, VERSION};
