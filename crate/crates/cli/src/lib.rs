//! Configuration files, report formats and the runner behind the `lognls`
//! command.
//!
//! * [`config`]: the TOML run configuration and its canonical echo.
//! * [`record`]: `report.json`, `series.csv` and `summary.csv`.
//! * [`runner`]: single runs and directory suites.
//! * [`check`]: the built-in property suite.

pub mod check;
pub mod config;
pub mod record;
pub mod runner;

pub use config::{parse_config, ConfigError, RunConfig};
pub use record::{RunRecord, Status};
