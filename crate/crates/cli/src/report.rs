use std::fmt::Write as _;

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Flat `key=value` lines.
    Records,
    /// `#`-prefixed metadata lines, then a header and data rows.
    Csv,
}

/// Output of one subcommand. The tool version, seed and resolved
/// configuration are always written ahead of the payload.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub seed: u64,
    pub config: Vec<(String, String)>,
    pub fields: Vec<(String, String)>,
    /// Replaces the default one-row CSV built from `fields`.
    pub table: Option<(String, Vec<String>)>,
}

impl Report {
    pub fn new(command: &'static str, seed: u64) -> Self {
        Self { command, seed, config: Vec::new(), fields: Vec::new(), table: None }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn field(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        let prefix = match format {
            Format::Records => "",
            Format::Csv => "# ",
        };
        let _ = writeln!(out, "{prefix}tool=gmnl {}", gmnl::VERSION);
        let _ = writeln!(out, "{prefix}command={}", self.command);
        let _ = writeln!(out, "{prefix}seed={}", self.seed);
        for (k, v) in &self.config {
            let _ = writeln!(out, "{prefix}config.{k}={v}");
        }
        match format {
            Format::Records => {
                for (k, v) in &self.fields {
                    let _ = writeln!(out, "{k}={v}");
                }
            }
            Format::Csv => match &self.table {
                Some((header, rows)) => {
                    let _ = writeln!(out, "{header}");
                    for r in rows {
                        let _ = writeln!(out, "{r}");
                    }
                }
                None => {
                    let keys: Vec<_> = self.fields.iter().map(|(k, _)| csv_escape(k)).collect();
                    let vals: Vec<_> = self.fields.iter().map(|(_, v)| csv_escape(v)).collect();
                    let _ = writeln!(out, "{}", keys.join(","));
                    let _ = writeln!(out, "{}", vals.join(","));
                }
            },
        }
        out
    }
}

pub fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
