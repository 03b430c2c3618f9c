//! Report files. Every file embeds the hash of the run configuration.

use std::fs;
use std::path::{Path, PathBuf};

use eigenlevel::analysis::Table;
use eigenlevel::levelset::format_float;
use serde::Serialize;

use crate::config::{CliError, CliResult, RunConfig};
use crate::plot::{render, Chart};

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    config_hash: &'a str,
    config: &'a RunConfig,
    pass: Option<bool>,
    report: &'a R,
}

pub fn json_text<R: Serialize>(config: &RunConfig, pass: Option<bool>, report: &R) -> String {
    let hash = config.hash();
    let env = Envelope {
        config_hash: &hash,
        config,
        pass,
        report,
    };
    let mut text = serde_json::to_string_pretty(&env).expect("report serializes");
    text.push('\n');
    text
}

pub fn csv_text(hash: &str, table: &Table) -> String {
    let mut out = format!("# config_hash={hash}\n");
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let cells: Vec<String> = row.iter().map(|&v| format_float(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Writes the files of one report into a directory.
pub struct ReportWriter {
    dir: PathBuf,
    plot: bool,
}

/// Paths written for one report.
#[derive(Clone, Debug, Default)]
pub struct Written {
    pub json: PathBuf,
    pub csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

impl ReportWriter {
    pub fn new(dir: &Path, plot: bool) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.to_path_buf(), e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            plot,
        })
    }

    pub fn path(&self, file: &str) -> PathBuf {
        self.dir.join(file)
    }

    pub fn write_text(&self, path: &Path, text: &str) -> CliResult<()> {
        write(path, text)
    }

    pub fn write<R: Serialize>(
        &self,
        stem: &str,
        config: &RunConfig,
        pass: Option<bool>,
        report: &R,
        table: Option<&Table>,
        chart: Option<&Chart>,
    ) -> CliResult<Written> {
        let hash = config.hash();
        let json = self.dir.join(format!("{stem}.json"));
        write(&json, &json_text(config, pass, report))?;
        let mut out = Written {
            json,
            ..Written::default()
        };
        if let Some(table) = table {
            let path = self.dir.join(format!("{stem}.csv"));
            write(&path, &csv_text(&hash, table))?;
            out.csv = Some(path);
        }
        if let (true, Some(chart)) = (self.plot, chart) {
            let path = self.dir.join(format!("{stem}.svg"));
            write(&path, &render(chart, &hash))?;
            out.svg = Some(path);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_hash_header_and_17_digits() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![1.0 / 3.0, -2.0]);
        let text = csv_text("deadbeef", &t);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# config_hash=deadbeef");
        assert_eq!(lines[1], "a,b");
        let first = lines[2].split(',').next().unwrap();
        let mantissa: String = first
            .split('e')
            .next()
            .unwrap()
            .chars()
            .filter(char::is_ascii_digit)
            .collect();
        assert_eq!(mantissa.len(), 17);
        assert_eq!(first.parse::<f64>().unwrap(), 1.0 / 3.0);
    }
}
