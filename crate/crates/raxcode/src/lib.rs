//! Channel files, experiment configs, result tables and the command
//! implementations behind the `raxcode` binary.

pub mod channel_file;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use channel_file::{load_channel, parse_channel, write_channel, ChannelFileError};
pub use commands::{execute, Command};
pub use config::{Experiment, Format};
pub use error::{CliError, CliResult};
pub use output::{write_atomic, Cell, Table};
