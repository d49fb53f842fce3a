//! CSV tables with a versioned schema line.
//!
//! Every file starts with `# schema: <name>`, optionally followed by
//! `# generated: <unix seconds>`, then a header row. Floating-point values
//! are written with 17 significant digits so they round-trip exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::error::{Error, Result};
use crate::fairness::FairnessReport;
use crate::norms::Strategy;

pub const FAIRNESS_SCHEMA: &str = "dgnorms.fairness/1";
pub const PAIRWISE_SCHEMA: &str = "dgnorms.pairwise/1";
pub const REPUTATION_SCHEMA: &str = "dgnorms.reputation/1";
pub const ABM_SCHEMA: &str = "dgnorms.abm/1";

/// Lossless decimal form of a probability or payoff.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Columns shared by fairness and agent-based tables.
pub fn fairness_columns() -> Vec<String> {
    let mut cols: Vec<String> = ["norm", "role", "beta", "Z", "epsilon", "c_r", "mu"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend(Strategy::ALL.iter().map(|s| format!("phi_{s}")));
    cols.extend(Strategy::ALL.iter().map(|s| format!("fF_{s}")));
    cols.push("F_total".into());
    cols
}

/// One fairness row, without the trailing status column.
pub fn fairness_fields(r: &FairnessReport) -> Vec<String> {
    let p = &r.params;
    let mut f = vec![
        r.norm.to_string(),
        r.role.to_string(),
        fmt_f64(p.beta()),
        p.z().to_string(),
        fmt_f64(p.epsilon()),
        fmt_f64(p.cost_report()),
        fmt_f64(p.mu()),
    ];
    f.extend(r.phi.iter().map(|v| fmt_f64(*v)));
    f.extend(r.f_fair.iter().map(|v| fmt_f64(*v)));
    f.push(fmt_f64(r.total));
    f
}

/// Writes a schema line, an optional timestamp line and the header row.
pub struct TableWriter<W: Write> {
    inner: csv::Writer<W>,
    width: usize,
}

impl TableWriter<File> {
    /// Creates `path`, including missing parent directories.
    pub fn create(path: &Path, schema: &str, columns: &[String], timestamp: bool) -> Result<Self> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        TableWriter::new(File::create(path)?, schema, columns, timestamp)
    }
}

impl<W: Write> TableWriter<W> {
    pub fn new(mut out: W, schema: &str, columns: &[String], timestamp: bool) -> Result<Self> {
        writeln!(out, "# schema: {schema}")?;
        if timestamp {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
            writeln!(out, "# generated: {secs}")?;
        }
        let mut inner = csv::Writer::from_writer(out);
        inner.write_record(columns)?;
        Ok(TableWriter {
            inner,
            width: columns.len(),
        })
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> Result<()> {
        if fields.len() != self.width {
            return Err(Error::Schema(format!(
                "row has {} fields, header has {}",
                fields.len(),
                self.width
            )));
        }
        self.inner.write_record(fields.iter().map(|s| s.as_ref()))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        self.inner.into_inner().map_err(|e| Error::Io(e.to_string()))
    }
}

/// A table read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub schema: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let mut reader = BufReader::new(File::open(path)?);
        let mut first = String::new();
        reader.read_line(&mut first)?;
        let schema = first
            .trim_end()
            .strip_prefix("# schema: ")
            .ok_or_else(|| Error::Schema(format!("{} does not start with a schema line", path.display())))?
            .to_string();
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(reader);
        let header = rdr.headers()?.iter().map(|s| s.to_string()).collect();
        let rows = rdr
            .records()
            .map(|r| r.map(|rec| rec.iter().map(|s| s.to_string()).collect()))
            .collect::<std::result::Result<_, _>>()?;
        Ok(Table { schema, header, rows })
    }

    pub fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::Schema(format!("missing column `{name}`")))
    }

    /// Values of a numeric column.
    pub fn f64_column(&self, name: &str) -> Result<Vec<f64>> {
        let k = self.column(name)?;
        self.rows
            .iter()
            .map(|r| {
                r[k].parse::<f64>().map_err(|e| Error::Parse {
                    input: r[k].clone(),
                    reason: e.to_string(),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn layout() {
        let cols = vec!["a".to_string(), "b".to_string()];
        let mut w = TableWriter::new(Vec::new(), "test/1", &cols, false).unwrap();
        w.row(&["x", "0.5"]).unwrap();
        assert!(w.row(&["only one"]).is_err());
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        assert_eq!(text, "# schema: test/1\na,b\nx,0.5\n");

        let w = TableWriter::new(Vec::new(), "test/1", &cols, true).unwrap();
        let text = String::from_utf8(w.finish().unwrap()).unwrap();
        assert!(text.lines().nth(1).unwrap().starts_with("# generated: "));
    }

    #[test]
    fn fairness_header_width() {
        let c = fairness_columns();
        assert_eq!(c.len(), 7 + 8 + 8 + 1);
        assert_eq!(c[7], "phi_FFR");
        assert_eq!(c[22], "fF_NNS");
    }

    #[test]
    fn read_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/t.csv");
        let cols = vec!["k".to_string(), "v".to_string()];
        let mut w = TableWriter::create(&path, "test/2", &cols, true).unwrap();
        w.row(&["1001/1001".to_string(), fmt_f64(0.1)]).unwrap();
        w.finish().unwrap();
        let t = Table::read(&path).unwrap();
        assert_eq!(t.schema, "test/2");
        assert_eq!(t.f64_column("v").unwrap(), vec![0.1]);
        assert!(matches!(t.column("w"), Err(Error::Schema(_))));
    }

    proptest! {
        #[test]
        fn floats_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            prop_assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }
}
