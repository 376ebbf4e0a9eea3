//! Output helpers: CSV tables with fixed formatting and pretty JSON reports.

use std::fs::File;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// CSV writer with LF line endings; floats use the shortest round-trip form.
pub struct Table {
    writer: csv::Writer<File>,
}

impl Table {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self, CliError> {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        writer.write_record(header)?;
        Ok(Self { writer })
    }

    pub fn row<I, S>(&mut self, cells: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(cells)?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.writer.flush()?;
        Ok(())
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
