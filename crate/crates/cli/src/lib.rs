//! Command-line front end for `drfcheck-core`.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::Path;

use drfcheck_core::inequality::{FunctionalDef, LinearFunctional};

pub use commands::{execute, run, Cli, Command, Rendered};
pub use config::RunConfig;
pub use error::{Category, CliError};
pub use report::Report;

/// The VBC functional as shipped in `functionals/vbc.json`.
pub const BUNDLED_VBC: &str = include_str!("../functionals/vbc.json");

/// Parses and compiles a functional definition. Returns warnings alongside.
pub fn parse_functional(text: &str) -> Result<(LinearFunctional, Vec<String>), CliError> {
    let def: FunctionalDef = serde_json::from_str(text)
        .map_err(|e| CliError::config(format!("invalid functional: {e}")))?;
    let mut warnings = Vec::new();
    if def.terms.is_empty() {
        warnings.push(format!(
            "functional {:?} has no terms; its value is always 0",
            def.name
        ));
    }
    let f = LinearFunctional::compile(&def).map_err(CliError::as_config)?;
    Ok((f, warnings))
}

pub fn load_functional(path: &Path) -> Result<(LinearFunctional, Vec<String>), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read functional {}: {e}", path.display())))?;
    parse_functional(&text)
        .map_err(|e| CliError::config(format!("{}: {}", path.display(), e.message)))
}
