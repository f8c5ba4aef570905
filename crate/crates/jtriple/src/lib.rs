//! File formats and command line front end for `jtriple-core`.
//!
//! Every randomized command takes `--seed` and produces byte-identical output
//! for identical inputs.

pub mod cli;
pub mod io;

pub use cli::run;
