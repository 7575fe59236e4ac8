use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where and how a subcommand writes its artifact.
pub struct Sink {
    pub subcommand: &'static str,
    pub format: Format,
    pub out: Option<PathBuf>,
    config_hash: String,
    seed: Option<u64>,
}

impl Sink {
    pub fn new(subcommand: &'static str, config: &ExperimentConfig) -> Self {
        Self {
            subcommand,
            format: config.format.unwrap_or_default(),
            out: config.out.clone(),
            config_hash: config.hash(),
            seed: config.seed,
        }
    }

    fn seed_text(&self) -> String {
        self.seed.map_or_else(|| "none".into(), |s| s.to_string())
    }

    /// The `#` line opening every CSV artifact.
    pub fn header_line(&self) -> String {
        format!(
            "# mixlit {VERSION} subcommand={} config_hash={} seed={}\n",
            self.subcommand,
            self.config_hash,
            self.seed_text()
        )
    }

    fn provenance(&self) -> Value {
        json!({
            "tool": "mixlit",
            "version": VERSION,
            "subcommand": self.subcommand,
            "config_hash": self.config_hash,
            "seed": self.seed,
        })
    }

    /// Writes `csv` (after the header and any `#` notes) or `data` as JSON.
    pub fn emit<T: Serialize>(&self, notes: &[String], csv: &str, data: &T) -> Result<(), CliError> {
        let text = match self.format {
            Format::Csv => {
                let mut s = self.header_line();
                for note in notes {
                    s.push_str("# ");
                    s.push_str(note);
                    s.push('\n');
                }
                s.push_str(csv);
                s
            }
            Format::Json => {
                let doc = json!({
                    "provenance": self.provenance(),
                    "notes": notes,
                    "data": data,
                });
                let mut s = serde_json::to_string_pretty(&doc).expect("output serializes");
                s.push('\n');
                s
            }
        };
        match &self.out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}
