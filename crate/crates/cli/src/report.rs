use std::path::PathBuf;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::Sink;

/// One summarised artifact.
#[derive(Debug, Serialize, PartialEq)]
pub struct ArtifactSummary {
    pub file: String,
    pub subcommand: String,
    pub config_hash: String,
    pub seed: String,
    pub columns: String,
    pub rows: usize,
    pub last_row: String,
}

fn provenance_field<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.split_whitespace()
        .find_map(|w| w.strip_prefix(key)?.strip_prefix('='))
}

/// Reads a CSV artifact written by this tool.
pub fn summarise(file: &str, text: &str) -> Result<ArtifactSummary, CliError> {
    let mut lines = text.lines();
    let first = lines.next().unwrap_or_default();
    if !first.starts_with("# mixlit ") {
        return Err(CliError::Config(format!(
            "{file}: no provenance header, not a mixlit CSV"
        )));
    }
    let field = |k| provenance_field(first, k).unwrap_or("?").to_string();
    let mut data = lines.filter(|l| !l.starts_with('#') && !l.is_empty());
    let columns = data.next().unwrap_or_default().replace(',', ";");
    let mut rows = 0;
    let mut last_row = String::new();
    for line in data {
        rows += 1;
        last_row = line.to_string();
    }
    Ok(ArtifactSummary {
        file: file.to_string(),
        subcommand: field("subcommand"),
        config_hash: field("config_hash"),
        seed: field("seed"),
        columns,
        rows,
        last_row: last_row.replace(',', ";"),
    })
}

/// Summary table over earlier CSV artifacts, one row per file.
pub fn run(config: &ExperimentConfig, files: &[PathBuf]) -> Result<(), CliError> {
    if files.is_empty() {
        return Err(CliError::Config("report needs at least one CSV file".into()));
    }
    let mut out = Vec::new();
    for path in files {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        out.push(summarise(&path.display().to_string(), &text)?);
    }
    let mut csv = String::from("file,subcommand,config_hash,seed,columns,rows,last_row\n");
    for s in &out {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            s.file.replace(',', ";"),
            s.subcommand,
            s.config_hash,
            s.seed,
            s.columns,
            s.rows,
            s.last_row
        ));
    }
    Sink::new("report", config).emit(&[], &csv, &out)
}
