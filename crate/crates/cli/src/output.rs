//! Artifact files. Every float is written with 17 significant digits so the
//! text round-trips to the same f64 and identical runs give identical bytes.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use polariton_core::TrajectorySeries;
use serde::Serialize;

use crate::config::OutputFormat;
use crate::summary::RunSummary;

pub const SERIES_COLUMNS: [&str; 5] = ["t_s", "x_center_m", "x_width_m", "kappa_rad_per_m", "norm"];
pub const GRID_COLUMNS: [&str; 3] = ["x_m", "t_s", "density"];

#[derive(Debug, Clone)]
pub enum Artifact {
    Series { name: String, series: TrajectorySeries },
    /// Density on x × t, stored t-outer: `density[i_t * x.len() + i_x]`.
    Grid { name: String, x: Vec<f64>, t: Vec<f64>, density: Vec<f64> },
    Table { name: String, columns: Vec<String>, rows: Vec<Vec<f64>> },
}

impl Artifact {
    pub fn name(&self) -> &str {
        match self {
            Artifact::Series { name, .. } | Artifact::Grid { name, .. } | Artifact::Table { name, .. } => name,
        }
    }
}

/// `{:.16e}`, i.e. 17 significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// serde_json formatter that writes floats with 17 significant digits.
struct PreciseFormatter(serde_json::ser::PrettyFormatter<'static>);

impl serde_json::ser::Formatter for PreciseFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with 17-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, PreciseFormatter(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory JSON serialisation");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[derive(Debug, thiserror::Error)]
#[error("cannot write {}: {source}", path.display())]
pub struct OutputError {
    pub path: PathBuf,
    #[source]
    pub source: io::Error,
}

/// Writes artifacts into one directory and remembers what it wrote.
pub struct OutputWriter {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl OutputWriter {
    pub fn create(dir: &Path) -> Result<Self, OutputError> {
        fs::create_dir_all(dir).map_err(|source| OutputError { path: dir.to_path_buf(), source })?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Deletes everything written so far.
    pub fn rollback(&mut self) {
        for path in self.written.drain(..) {
            if let Err(e) = fs::remove_file(&path) {
                log::warn!("could not remove partial output {}: {e}", path.display());
            }
        }
    }

    fn write_file(&mut self, file_name: &str, body: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Result<String, OutputError> {
        let path = self.dir.join(file_name);
        let result = File::create(&path).and_then(|f| {
            self.written.push(path.clone());
            let mut w = BufWriter::new(f);
            body(&mut w)?;
            w.flush()
        });
        result.map_err(|source| OutputError { path, source })?;
        Ok(file_name.to_string())
    }

    /// Writes one artifact in the requested formats; returns the file names.
    pub fn write_artifact(&mut self, artifact: &Artifact, format: OutputFormat) -> Result<Vec<String>, OutputError> {
        let mut names = Vec::new();
        if format.csv() {
            names.push(self.write_file(&format!("{}.csv", artifact.name()), |w| write_csv(w, artifact))?);
        }
        if format.json() {
            let text = artifact_json(artifact);
            names.push(self.write_file(&format!("{}.json", artifact.name()), |w| w.write_all(text.as_bytes()))?);
        }
        Ok(names)
    }

    pub fn write_summary(&mut self, summary: &RunSummary) -> Result<String, OutputError> {
        let text = to_json(summary);
        self.write_file("summary.json", |w| w.write_all(text.as_bytes()))
    }
}

fn write_row(w: &mut dyn Write, values: &[f64]) -> io::Result<()> {
    let line: Vec<String> = values.iter().map(|&v| format_float(v)).collect();
    writeln!(w, "{}", line.join(","))
}

pub fn write_csv(w: &mut dyn Write, artifact: &Artifact) -> io::Result<()> {
    match artifact {
        Artifact::Series { series, .. } => {
            let z = series.z_center.as_ref();
            let mut header = SERIES_COLUMNS.join(",");
            if z.is_some() {
                header.push_str(",z_center_m");
            }
            writeln!(w, "{header}")?;
            for i in 0..series.len() {
                let mut row = vec![series.times[i], series.center[i], series.width[i], series.kappa[i], series.norm[i]];
                if let Some(z) = z {
                    row.push(z[i]);
                }
                write_row(w, &row)?;
            }
        }
        Artifact::Grid { x, t, density, .. } => {
            writeln!(w, "{}", GRID_COLUMNS.join(","))?;
            for (it, &tv) in t.iter().enumerate() {
                for (ix, &xv) in x.iter().enumerate() {
                    write_row(w, &[xv, tv, density[it * x.len() + ix]])?;
                }
            }
        }
        Artifact::Table { columns, rows, .. } => {
            writeln!(w, "{}", columns.join(","))?;
            for row in rows {
                write_row(w, row)?;
            }
        }
    }
    Ok(())
}

fn artifact_json(artifact: &Artifact) -> String {
    use serde_json::{Map, Value};
    let arr = |v: &[f64]| Value::Array(v.iter().map(|&x| float_value(x)).collect());
    let mut obj = Map::new();
    match artifact {
        Artifact::Series { series, .. } => {
            obj.insert("t_s".into(), arr(&series.times));
            obj.insert("x_center_m".into(), arr(&series.center));
            obj.insert("x_width_m".into(), arr(&series.width));
            obj.insert("kappa_rad_per_m".into(), arr(&series.kappa));
            obj.insert("norm".into(), arr(&series.norm));
            if let Some(z) = &series.z_center {
                obj.insert("z_center_m".into(), arr(z));
            }
        }
        Artifact::Grid { x, t, density, .. } => {
            obj.insert("x_m".into(), arr(x));
            obj.insert("t_s".into(), arr(t));
            let rows = density.chunks(x.len().max(1)).map(arr).collect();
            obj.insert("density".into(), Value::Array(rows));
        }
        Artifact::Table { columns, rows, .. } => {
            obj.insert("columns".into(), Value::Array(columns.iter().map(|c| Value::String(c.clone())).collect()));
            obj.insert("rows".into(), Value::Array(rows.iter().map(|r| arr(r)).collect()));
        }
    }
    to_json(&Value::Object(obj))
}

fn float_value(x: f64) -> serde_json::Value {
    serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        for v in [0.1, 1.0 / 3.0, 5.9840e3, -1.2345678901234567e-300, 7.48e8] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17);
        }
    }

    #[test]
    fn json_uses_precise_floats() {
        let text = to_json(&serde_json::json!({"a": 0.1, "b": [1.5], "c": f64::NAN}));
        assert!(text.contains("1.0000000000000001e-1") || text.contains("1.0000000000000000e-1"));
        assert!(text.contains("1.5000000000000000e0"));
        assert!(text.contains("null"));
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn grid_rows_are_t_outer() {
        let grid = Artifact::Grid {
            name: "g".into(),
            x: vec![0.0, 1.0, 2.0],
            t: vec![0.0, 10.0],
            density: vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &grid).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x_m,t_s,density");
        assert_eq!(lines.len(), 1 + 6);
        assert!(lines[4].starts_with("0.0000000000000000e0,1.0000000000000000e1,4.0"));
    }

    #[test]
    fn rollback_removes_files() {
        let dir = tempfile::tempdir().unwrap();
        let mut w = OutputWriter::create(dir.path()).unwrap();
        let table = Artifact::Table { name: "t".into(), columns: vec!["a".into()], rows: vec![vec![1.0]] };
        let names = w.write_artifact(&table, OutputFormat::Both).unwrap();
        assert_eq!(names, vec!["t.csv", "t.json"]);
        assert!(dir.path().join("t.csv").exists());
        w.rollback();
        assert!(!dir.path().join("t.csv").exists());
        assert!(!dir.path().join("t.json").exists());
    }
}
