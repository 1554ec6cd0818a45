//! Reproducible experiment front end: config parsing, subcommand dispatch,
//! seeded determinism, and CSV/JSON artifact emission.

mod config;
mod output;
mod run;

pub use config::{parse_config, ExperimentConfig};
pub use run::run;
