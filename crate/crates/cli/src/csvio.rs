//! Data-series output shared by the subcommands.
//!
//! Every table starts with a `# format_version: 1` comment so downstream
//! readers can detect layout changes. Floats are printed with `{:.16e}`
//! (17 significant digits), which round-trips `f64` exactly; reruns of the
//! same command produce byte-identical files.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use ddes_core::HistoryState;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum SeriesFormat {
    Csv,
    Json,
}

impl SeriesFormat {
    pub fn extension(self) -> &'static str {
        match self {
            SeriesFormat::Csv => "csv",
            SeriesFormat::Json => "json",
        }
    }
}

/// A rectangular table: integer key columns (step indices, pair numbers)
/// followed by float value columns.
pub struct Table {
    key_names: Vec<&'static str>,
    value_names: Vec<String>,
    rows: Vec<(Vec<i64>, Vec<f64>)>,
}

impl Table {
    pub fn new(key_names: &[&'static str], value_names: Vec<String>) -> Self {
        Table {
            key_names: key_names.to_vec(),
            value_names,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, keys: Vec<i64>, values: Vec<f64>) {
        debug_assert_eq!(keys.len(), self.key_names.len());
        debug_assert_eq!(values.len(), self.value_names.len());
        self.rows.push((keys, values));
    }

    pub fn write(&self, path: &Path, format: SeriesFormat) -> io::Result<()> {
        match format {
            SeriesFormat::Csv => self.write_csv(path),
            SeriesFormat::Json => self.write_json(path),
        }
    }

    fn write_csv(&self, path: &Path) -> io::Result<()> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "# format_version: {FORMAT_VERSION}")?;
        let header: Vec<&str> = self
            .key_names
            .iter()
            .copied()
            .chain(self.value_names.iter().map(|s| s.as_str()))
            .collect();
        writeln!(out, "{}", header.join(","))?;
        for (keys, values) in &self.rows {
            let mut fields: Vec<String> = keys.iter().map(|k| k.to_string()).collect();
            fields.extend(values.iter().map(|v| format!("{v:.16e}")));
            writeln!(out, "{}", fields.join(","))?;
        }
        out.flush()
    }

    fn write_json(&self, path: &Path) -> io::Result<()> {
        let columns: Vec<&str> = self
            .key_names
            .iter()
            .copied()
            .chain(self.value_names.iter().map(|s| s.as_str()))
            .collect();
        let rows: Vec<Vec<serde_json::Value>> = self
            .rows
            .iter()
            .map(|(keys, values)| {
                keys.iter()
                    .map(|k| serde_json::json!(k))
                    .chain(values.iter().map(|v| serde_json::json!(v)))
                    .collect()
            })
            .collect();
        let doc = serde_json::json!({
            "format_version": FORMAT_VERSION,
            "columns": columns,
            "rows": rows,
        });
        write_json_value(path, &doc)
    }
}

/// Serializes any JSON-ready document with a stable pretty layout and a
/// trailing newline.
pub fn write_json_value(path: &Path, value: &serde_json::Value) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()
}

pub fn channel_names(channels: usize) -> Vec<String> {
    (1..=channels).map(|i| format!("x{i}")).collect()
}

/// Builds the state-trajectory table with rows `m, x1, .., xN` covering
/// `window_start..=horizon`.
pub fn trajectory_table(
    traj: &ddes_core::Trajectory,
    channels: usize,
    window_start: i64,
    horizon: i64,
) -> Table {
    let mut table = Table::new(&["m"], channel_names(channels));
    for m in window_start..=horizon {
        let values = (0..channels).map(|i| traj.value(i, m)).collect();
        table.push(vec![m], values);
    }
    table
}

/// Reads an initial window back out of a CSV written by `trajectory_table`
/// (or any file with an `m,x1,..,xN` layout). Rows outside
/// `[window_start, 0]` are ignored, so a full trajectory or orbit file can
/// be fed straight back in; the window itself must be fully covered.
pub fn read_initial_window(
    path: &Path,
    channels: usize,
    window_start: i64,
) -> Result<HistoryState, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut rows: std::collections::BTreeMap<i64, Vec<f64>> = Default::default();
    let mut saw_header = false;
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if !saw_header {
            saw_header = true;
            if fields.first() != Some(&"m") {
                return Err(format!(
                    "{}: expected an `m,x1,..` header, found `{line}`",
                    path.display()
                ));
            }
            continue;
        }
        if fields.len() != channels + 1 {
            return Err(format!(
                "{} line {}: expected {} fields, found {}",
                path.display(),
                lineno + 1,
                channels + 1,
                fields.len()
            ));
        }
        let m: i64 = fields[0].trim().parse().map_err(|_| {
            format!(
                "{} line {}: bad step index `{}`",
                path.display(),
                lineno + 1,
                fields[0]
            )
        })?;
        if m < window_start || m > 0 {
            continue;
        }
        let values: Vec<f64> = fields[1..]
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("{} line {}: bad value `{f}`", path.display(), lineno + 1))
            })
            .collect::<Result<_, _>>()?;
        rows.insert(m, values);
    }
    let mut samples = vec![Vec::with_capacity((1 - window_start) as usize); channels];
    for m in window_start..=0 {
        let row = rows.get(&m).ok_or_else(|| {
            format!(
                "{}: no row for step {m}; the file must cover [{}, 0]",
                path.display(),
                window_start
            )
        })?;
        for (i, v) in row.iter().enumerate() {
            samples[i].push(*v);
        }
    }
    HistoryState::new(window_start, samples).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_through_the_window_reader() {
        let dir = std::env::temp_dir().join(format!("ddes-csvio-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("traj.csv");

        let mut table = Table::new(&["m"], channel_names(2));
        for m in -2..=3_i64 {
            table.push(vec![m], vec![0.1 * m as f64 + 0.3, (m as f64).sin()]);
        }
        table.write(&path, SeriesFormat::Csv).unwrap();

        let state = read_initial_window(&path, 2, -2).unwrap();
        for m in -2..=0_i64 {
            assert_eq!(state.value(0, m), 0.1 * m as f64 + 0.3);
            assert_eq!(state.value(1, m), (m as f64).sin());
        }

        let err = read_initial_window(&path, 2, -5).unwrap_err();
        assert!(err.contains("no row for step -5"), "{err}");
        std::fs::remove_dir_all(&dir).ok();
    }
}
