//! Model files, commands, and output records.

mod model;
mod record;
mod run;

pub use model::{parse_model, serialize_model, ModelFile, ParsedModel, FORMAT_VERSION};
pub use record::{format_float, Record, ResultRecord};
pub use run::{run_command, Algorithm, Command, RunOptions, CHECK_LIMIT, CHECK_TOLERANCE};
