//! Output assembly and atomic commit.
//!
//! Commands render every output into memory first; nothing touches the
//! filesystem until all of them rendered, and each file then lands via
//! write-to-temp plus rename.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

#[derive(Debug, Default)]
pub struct Outputs {
    files: Vec<(PathBuf, String)>,
    stdout: String,
}

impl Outputs {
    pub fn file(&mut self, path: impl Into<PathBuf>, contents: String) {
        self.files.push((path.into(), contents));
    }

    /// Writes to `path` when given, otherwise to standard output.
    pub fn file_or_stdout(&mut self, path: Option<&Path>, contents: String) {
        match path {
            Some(p) => self.file(p, contents),
            None => self.stdout.push_str(&contents),
        }
    }

    pub fn paths(&self) -> impl Iterator<Item = &Path> {
        self.files.iter().map(|(p, _)| p.as_path())
    }

    pub fn commit(self) -> Result<()> {
        for (path, contents) in &self.files {
            write_atomic(path, contents.as_bytes())?;
        }
        if !self.stdout.is_empty() {
            let mut out = std::io::stdout().lock();
            out.write_all(self.stdout.as_bytes())?;
            out.flush()?;
        }
        Ok(())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::Builder::new()
        .prefix(".demat-")
        .tempfile_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Comma-separated rows with a header; numbers use the shortest
/// representation that round-trips.
#[derive(Debug)]
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Self { buf }
    }

    pub fn row(&mut self, fields: &[Field<'_>]) {
        for (i, f) in fields.iter().enumerate() {
            if i > 0 {
                self.buf.push(',');
            }
            match f {
                Field::Num(v) => write!(self.buf, "{}", if *v == 0.0 { 0.0 } else { *v }).unwrap(),
                Field::Int(v) => write!(self.buf, "{v}").unwrap(),
                Field::Text(s) => self.buf.push_str(s),
                Field::Bool(b) => self.buf.push_str(if *b { "true" } else { "false" }),
                Field::Empty => {}
            }
        }
        self.buf.push('\n');
    }

    pub fn line(&mut self, text: &str) {
        self.buf.push_str(text);
        self.buf.push('\n');
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

#[derive(Debug, Clone, Copy)]
pub enum Field<'a> {
    Num(f64),
    Int(i64),
    Text(&'a str),
    Bool(bool),
    Empty,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_shortest_roundtrip_numbers() {
        let mut csv = Csv::new(&["a", "b", "c"]);
        csv.row(&[Field::Num(0.1 + 0.2), Field::Int(3), Field::Text("x")]);
        csv.row(&[Field::Num(1e-7), Field::Empty, Field::Bool(true)]);
        assert_eq!(
            csv.finish(),
            "a,b,c\n0.30000000000000004,3,x\n0.0000001,,true\n"
        );
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.csv");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        let leftovers: Vec<_> = std::fs::read_dir(path.parent().unwrap()).unwrap().collect();
        assert_eq!(leftovers.len(), 1);
    }
}
