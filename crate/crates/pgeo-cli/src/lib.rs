//! Command-line front end: model files in, text or JSON reports out.
//!
//! ```text
//! pgeo <command> <model> [--vector EXPR] [--omega-series] [--null] [--absolute]
//!      [--format text|json] [--seed N] [--starts N] [--steps N] [--on-limit]
//! ```
//!
//! Exit codes: 0 on success, 1 when the model is invalid or a checked claim is
//! false, 2 when a symbolic verdict stays undecided.

#![allow(clippy::needless_range_loop)]

pub mod commands;
pub mod model;
pub mod report;

use clap::{Parser, ValueEnum};
use std::path::PathBuf;

pub use commands::{run, Flags, COMMANDS};
pub use model::{load, parse_model, to_model_file, LoadError, Model};
pub use report::{Report, Status, SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(
    name = "pgeo",
    version,
    about = "Penrose limits and homogeneous geodesics on model files"
)]
pub struct Cli {
    /// One of: curvature, killing-check, limit, hereditary, check-algebra,
    /// geodesic-vector, search-geodesics, structure, coset-metric, classify,
    /// transport, scaling.
    pub command: String,
    /// Path to a model file.
    pub model: PathBuf,
    /// Vector or vector field, written in the model's basis or coordinates.
    #[arg(long)]
    pub vector: Option<String>,
    /// Also show the Ω-rescaled metric and its order-zero part.
    #[arg(long)]
    pub omega_series: bool,
    #[arg(long)]
    pub null: bool,
    #[arg(long)]
    pub absolute: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub starts: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    /// Run `transport` on the Penrose limit.
    #[arg(long)]
    pub on_limit: bool,
}

impl Cli {
    pub fn flags(&self) -> Flags {
        Flags {
            vector: self.vector.clone(),
            omega_series: self.omega_series,
            null: self.null,
            absolute: self.absolute,
            seed: self.seed,
            starts: self.starts,
            steps: self.steps,
            on_limit: self.on_limit,
        }
    }
}

/// Runs a full invocation and returns what to print and the exit code.
pub fn execute<I, T>(args: I) -> (String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            return (e.render().to_string(), code);
        }
    };
    let report = match load(&cli.model) {
        Ok(m) => run(&cli.command, &m, &cli.flags()),
        Err(e) => {
            let mut r = Report::new(&cli.command, &cli.model.display().to_string());
            r.status(Status::Error);
            r.line(format!("error: {e}"));
            r.set("error", serde_json::json!(e.to_string()));
            r
        }
    };
    let out = match cli.format {
        Format::Text => report.render_text(),
        Format::Json => format!("{:#}\n", report.to_json()),
    };
    (out, report.exit_code())
}
