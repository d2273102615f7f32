//! JSON bundle formats and the `mirrorext` command line on top of
//! [`mirrorext_core`].

pub mod bundle;
pub mod cli;
pub mod render;

pub use bundle::{load_bundle, parse_bundle, render_bundle, save_bundle, Bundle, Kind, LoadError, Payload};
pub use cli::{run_command, CommandOutput};
