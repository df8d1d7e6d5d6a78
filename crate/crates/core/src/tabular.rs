//! Delimited text input shared by the time-series and case-table readers.
//!
//! The field delimiter is detected from the header row (semicolon, then tab,
//! then comma). A decimal comma is accepted in numeric fields whenever the
//! field delimiter is not itself a comma.

use std::path::Path;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    /// 1-based line number in the source text.
    pub line: u64,
    pub fields: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct Table {
    pub delimiter: u8,
    pub headers: Vec<String>,
    pub rows: Vec<Row>,
}

pub fn detect_delimiter(header: &str) -> u8 {
    if header.contains(';') {
        b';'
    } else if header.contains('\t') {
        b'\t'
    } else {
        b','
    }
}

impl Table {
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.strip_prefix('\u{feff}').unwrap_or(text);
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i as u64 + 1, l.trim_end_matches('\r')))
            .filter(|(_, l)| !l.trim().is_empty());
        let Some((_, header_line)) = lines.next() else {
            return Err(Error::Parse {
                line: 1,
                message: "missing header row".into(),
            });
        };
        let delimiter = detect_delimiter(header_line);
        let split = |l: &str| -> Vec<String> {
            l.split(delimiter as char)
                .map(|f| f.trim().to_owned())
                .collect()
        };
        let headers = split(header_line);
        let mut rows = Vec::new();
        for (line, l) in lines {
            let fields = split(l);
            if fields.len() != headers.len() {
                return Err(Error::Parse {
                    line,
                    message: format!("expected {} fields, found {}", headers.len(), fields.len()),
                });
            }
            rows.push(Row { line, fields });
        }
        Ok(Self {
            delimiter,
            headers,
            rows,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Index of the column named `name` (case-insensitive).
    pub fn column(&self, name: &str) -> Result<usize> {
        self.find_column(name)
            .ok_or_else(|| Error::MissingColumn(name.to_owned()))
    }

    pub fn find_column(&self, name: &str) -> Option<usize> {
        self.headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
    }

    pub fn number(&self, row: &Row, column: usize) -> Result<f64> {
        parse_number(&row.fields[column], self.delimiter, row.line)
    }
}

/// Parses a decimal number, normalizing a decimal comma unless the field
/// delimiter is a comma.
pub fn parse_number(field: &str, delimiter: u8, line: u64) -> Result<f64> {
    let normalized;
    let text = if delimiter != b',' && field.contains(',') {
        normalized = field.replace(',', ".");
        normalized.as_str()
    } else {
        field
    };
    text.trim().parse::<f64>().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse `{field}` as a number"),
    })
}
