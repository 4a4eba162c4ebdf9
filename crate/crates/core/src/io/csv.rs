//! CSV readers and writers for datasets, traces, and reports.

use std::fmt::Write as _;
use std::path::Path;

use super::time::{format_timestamp, parse_timestamp, timestamp_error};
use super::IoError;
use crate::dataset::Dataset;
use crate::eval::{EvalReport, SimType};

const DATASET_HEADER: &str = "timestamp,t_z,q_hvac,p_c,p_h,t_am,q_int,q_solar";
const DATASET_COLUMNS: [&str; 8] = [
    "timestamp", "t_z", "q_hvac", "p_c", "p_h", "t_am", "q_int", "q_solar",
];
const REPORT_HEADER: &str =
    "method,architecture,sim_type,training_days,average_accuracy,deadband_occupancy";

/// Shortest representation that parses back to the identical f64.
fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn meta_block(meta: &[(String, String)]) -> String {
    let mut s = String::new();
    for (k, v) in meta {
        let _ = writeln!(s, "# {k}={v}");
    }
    s
}

/// Writes a dataset with its metadata header. The sample period must be a
/// whole number of seconds so timestamps stay exact.
pub fn write_dataset(ds: &Dataset, path: &Path) -> Result<(), IoError> {
    ds.validate()?;
    if ds.t_s.fract() != 0.0 {
        return Err(IoError::Config(format!(
            "sample period {} is not a whole number of seconds",
            ds.t_s
        )));
    }
    let step = ds.t_s as u64;
    let mut out = String::new();
    let mut meta = ds.meta.clone();
    if !meta.iter().any(|(k, _)| k == "t_s") {
        meta.push(("t_s".into(), fmt_f64(ds.t_s)));
    }
    out.push_str(&meta_block(&meta));
    out.push_str(DATASET_HEADER);
    out.push('\n');
    for k in 0..ds.len() {
        let ts = format_timestamp(ds.t0_s + k as u64 * step);
        let _ = writeln!(
            out,
            "{ts},{},{},{},{},{},{},{}",
            fmt_f64(ds.t_z[k]),
            fmt_f64(ds.q_hvac[k]),
            fmt_f64(ds.p_c[k]),
            fmt_f64(ds.p_h[k]),
            fmt_f64(ds.t_am[k]),
            fmt_f64(ds.q_int[k]),
            fmt_f64(ds.q_solar[k]),
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a dataset, validating the header, cell count, value syntax, and
/// timestamp spacing. Diagnostics name the offending row and column.
pub fn read_dataset(path: &Path) -> Result<Dataset, IoError> {
    let text = std::fs::read_to_string(path)?;
    let mut meta = Vec::new();
    let mut lines = Vec::new();
    for raw in text.lines() {
        let line = raw.trim_end();
        if let Some(rest) = line.strip_prefix('#') {
            if let Some((k, v)) = rest.trim().split_once('=') {
                meta.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if !line.trim().is_empty() {
            lines.push(line);
        }
    }
    let path_str = path.display().to_string();
    let header = lines.first().ok_or_else(|| IoError::MalformedHeader {
        path: path_str.clone(),
        detail: "file has no header row".into(),
    })?;
    if *header != DATASET_HEADER {
        return Err(IoError::MalformedHeader {
            path: path_str,
            detail: format!("expected {DATASET_HEADER:?}, got {header:?}"),
        });
    }

    let declared_t_s = meta
        .iter()
        .find(|(k, _)| k == "t_s")
        .map(|(_, v)| v.parse::<f64>())
        .transpose()
        .map_err(|_| IoError::Config("meta key t_s is not a number".into()))?;

    let n = lines.len() - 1;
    let mut stamps = Vec::with_capacity(n);
    let mut cols: [Vec<f64>; 7] = Default::default();
    for (row, line) in lines[1..].iter().enumerate() {
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 8 {
            let column = DATASET_COLUMNS
                .get(cells.len())
                .copied()
                .unwrap_or("extra")
                .to_string();
            return Err(IoError::MissingCell { row, column });
        }
        let ts = parse_timestamp(cells[0]).map_err(|e| timestamp_error(row, e))?;
        stamps.push(ts);
        for (c, cell) in cells[1..].iter().enumerate() {
            if cell.is_empty() {
                return Err(IoError::MissingCell {
                    row,
                    column: DATASET_COLUMNS[c + 1].into(),
                });
            }
            let v = cell.parse::<f64>().map_err(|_| IoError::BadValue {
                row,
                column: DATASET_COLUMNS[c + 1].into(),
                detail: format!("not a number: {cell:?}"),
            })?;
            cols[c].push(v);
        }
    }
    if n == 0 {
        return Err(IoError::Config("dataset has no rows".into()));
    }
    let t_s = match declared_t_s {
        Some(v) => v,
        None if n >= 2 => (stamps[1] - stamps[0]) as f64,
        None => return Err(IoError::MissingKey("t_s".into())),
    };
    for row in 1..n {
        let got = (stamps[row] - stamps[row - 1]) as f64;
        if got != t_s {
            return Err(IoError::IrregularSpacing {
                row,
                expected: t_s,
                got,
            });
        }
    }
    let [t_z, q_hvac, p_c, p_h, t_am, q_int, q_solar] = cols;
    let ds = Dataset {
        t_s,
        t0_s: stamps[0],
        t_z,
        q_hvac,
        p_c,
        p_h,
        t_am,
        q_int,
        q_solar,
        meta,
    };
    ds.validate()?;
    Ok(ds)
}

/// One named column of a trace file.
pub struct TraceColumn<'a> {
    pub name: &'a str,
    pub values: &'a [f64],
}

/// Writes a trace CSV: a leading step-index column plus the given columns,
/// preceded by `#` metadata.
pub fn write_trace(
    path: &Path,
    meta: &[(String, String)],
    columns: &[TraceColumn<'_>],
) -> Result<(), IoError> {
    let rows = columns.first().map(|c| c.values.len()).unwrap_or(0);
    for c in columns {
        if c.values.len() != rows {
            return Err(IoError::Config(format!(
                "trace column {} has {} rows, expected {rows}",
                c.name,
                c.values.len()
            )));
        }
    }
    let mut out = String::new();
    out.push_str(&meta_block(meta));
    out.push('k');
    for c in columns {
        out.push(',');
        out.push_str(c.name);
    }
    out.push('\n');
    for r in 0..rows {
        let _ = write!(out, "{r}");
        for c in columns {
            let _ = write!(out, ",{}", fmt_f64(c.values[r]));
        }
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// A parsed report row (the readable synonym of [`EvalReport`] for files).
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: String,
    pub architecture: String,
    pub sim: SimType,
    pub training_days: u32,
    pub average_accuracy: Option<f64>,
    pub deadband_occupancy: Option<f64>,
}

fn report_sort_key(r: &ReportRow) -> (String, String, &'static str, u32) {
    (
        r.method.clone(),
        r.architecture.clone(),
        r.sim.name(),
        r.training_days,
    )
}

/// Writes evaluation rows sorted by (method, architecture, sim type,
/// training window); Sim3 rows leave the accuracy cell empty and others the
/// occupancy cell, so the schema is uniform.
pub fn write_report(
    reports: &[EvalReport],
    path: &Path,
    meta: &[(String, String)],
) -> Result<(), IoError> {
    if reports.is_empty() {
        return Err(IoError::Config("refusing to write an empty report".into()));
    }
    let mut rows: Vec<ReportRow> = reports
        .iter()
        .map(|r| ReportRow {
            method: r.method.clone(),
            architecture: r.architecture.clone(),
            sim: r.sim,
            training_days: r.training_days,
            average_accuracy: r.average_accuracy,
            deadband_occupancy: r.deadband_occupancy,
        })
        .collect();
    rows.sort_by_key(report_sort_key);
    let mut out = String::new();
    out.push_str(&meta_block(meta));
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        let acc = r.average_accuracy.map(fmt_f64).unwrap_or_default();
        let occ = r.deadband_occupancy.map(fmt_f64).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.method, r.architecture, r.sim, r.training_days, acc, occ
        );
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// Reads a report CSV back into rows.
pub fn read_report(path: &Path) -> Result<Vec<ReportRow>, IoError> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != REPORT_HEADER {
                return Err(IoError::MalformedHeader {
                    path: path.display().to_string(),
                    detail: format!("expected {REPORT_HEADER:?}, got {line:?}"),
                });
            }
            saw_header = true;
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 6 {
            return Err(IoError::BadLine {
                line: idx + 1,
                detail: format!("expected 6 cells, got {}", cells.len()),
            });
        }
        let sim = SimType::parse(cells[2]).ok_or_else(|| IoError::BadLine {
            line: idx + 1,
            detail: format!("unknown sim type {:?}", cells[2]),
        })?;
        let opt = |s: &str, col: &str| -> Result<Option<f64>, IoError> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse::<f64>().map(Some).map_err(|_| IoError::BadValue {
                    row: idx + 1,
                    column: col.into(),
                    detail: format!("not a number: {s:?}"),
                })
            }
        };
        rows.push(ReportRow {
            method: cells[0].to_string(),
            architecture: cells[1].to_string(),
            sim,
            training_days: cells[3].parse().map_err(|_| IoError::BadValue {
                row: idx + 1,
                column: "training_days".into(),
                detail: format!("not an integer: {:?}", cells[3]),
            })?,
            average_accuracy: opt(cells[4], "average_accuracy")?,
            deadband_occupancy: opt(cells[5], "deadband_occupancy")?,
        });
    }
    if !saw_header {
        return Err(IoError::MalformedHeader {
            path: path.display().to_string(),
            detail: "no header row".into(),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmpdir(tag: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("thermident-io-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    fn sample_dataset() -> Dataset {
        Dataset {
            t_s: 600.0,
            t0_s: 0,
            t_z: vec![22.0, 22.523456789012345, 23.0],
            q_hvac: vec![0.0, -4500.0, 0.0],
            p_c: vec![0.0, 1500.0, 0.0],
            p_h: vec![0.0, 0.0, 0.0],
            t_am: vec![30.0, 30.25, 30.5],
            q_int: vec![200.0, 200.0, 200.0],
            q_solar: vec![0.0, 120.5, 240.0],
            meta: vec![
                ("config_hash".into(), "deadbeef".into()),
                ("seed".into(), "42".into()),
            ],
        }
    }

    #[test]
    fn dataset_roundtrip_is_exact() {
        let dir = tmpdir("roundtrip");
        let path = dir.join("ds.csv");
        let ds = sample_dataset();
        write_dataset(&ds, &path).unwrap();
        let back = read_dataset(&path).unwrap();
        assert_eq!(back.t_z, ds.t_z);
        assert_eq!(back.q_solar, ds.q_solar);
        assert_eq!(back.t_s, ds.t_s);
        assert_eq!(back.t0_s, ds.t0_s);
        assert_eq!(back.meta_value("config_hash"), Some("deadbeef"));
        assert_eq!(back.meta_value("seed"), Some("42"));
    }

    impl Dataset {
        fn meta_value(&self, key: &str) -> Option<&str> {
            self.meta
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| v.as_str())
        }
    }

    #[test]
    fn declared_sample_period_is_respected() {
        let dir = tmpdir("declared");
        let path = dir.join("ds.csv");
        write_dataset(&sample_dataset(), &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("# t_s=600"));
    }

    #[test]
    fn timestamp_gap_cites_row() {
        let dir = tmpdir("gap");
        let path = dir.join("ds.csv");
        let text = "\
# t_s=600
timestamp,t_z,q_hvac,p_c,p_h,t_am,q_int,q_solar
2000-06-01T00:00:00,22,0,0,0,30,0,0
2000-06-01T00:10:00,22,0,0,0,30,0,0
2000-06-01T00:30:00,22,0,0,0,30,0,0
";
        std::fs::write(&path, text).unwrap();
        match read_dataset(&path) {
            Err(IoError::IrregularSpacing { row: 2, .. }) => {}
            other => panic!("expected irregular spacing at row 2, got {other:?}"),
        }
    }

    #[test]
    fn missing_cell_names_row_and_column() {
        let dir = tmpdir("cell");
        let path = dir.join("ds.csv");
        let text = "\
timestamp,t_z,q_hvac,p_c,p_h,t_am,q_int,q_solar
2000-06-01T00:00:00,22,0,0,0,30,0
";
        std::fs::write(&path, text).unwrap();
        match read_dataset(&path) {
            Err(IoError::MissingCell { row: 0, column }) => assert_eq!(column, "q_solar"),
            other => panic!("expected missing cell, got {other:?}"),
        }
    }

    #[test]
    fn bad_header_rejected() {
        let dir = tmpdir("header");
        let path = dir.join("ds.csv");
        std::fs::write(&path, "time,tz\n1,2\n").unwrap();
        assert!(matches!(
            read_dataset(&path),
            Err(IoError::MalformedHeader { .. })
        ));
    }

    #[test]
    fn report_roundtrip_sorted_and_schema_correct() {
        let dir = tmpdir("report");
        let path = dir.join("report.csv");
        let reports = vec![
            EvalReport {
                method: "NLS".into(),
                architecture: "R-2".into(),
                sim: SimType::Sim3,
                training_days: 7,
                average_accuracy: None,
                deadband_occupancy: Some(0.97),
                divergent: false,
                trace_id: "a".into(),
            },
            EvalReport {
                method: "ALS".into(),
                architecture: "R-A".into(),
                sim: SimType::Sim1,
                training_days: 21,
                average_accuracy: Some(99.5),
                deadband_occupancy: None,
                divergent: false,
                trace_id: "b".into(),
            },
        ];
        write_report(&reports, &path, &[("seed".into(), "1".into())]).unwrap();
        let rows = read_report(&path).unwrap();
        // sorted: ALS before NLS
        assert_eq!(rows[0].method, "ALS");
        assert_eq!(rows[0].average_accuracy, Some(99.5));
        assert_eq!(rows[0].deadband_occupancy, None);
        assert_eq!(rows[1].sim, SimType::Sim3);
        assert_eq!(rows[1].average_accuracy, None);
        assert_eq!(rows[1].deadband_occupancy, Some(0.97));
    }

    #[test]
    fn report_rows_sorted_regardless_of_input_order() {
        let dir = tmpdir("sorted");
        let mk = |method: &str, days: u32| EvalReport {
            method: method.into(),
            architecture: "R-1".into(),
            sim: SimType::Sim1,
            training_days: days,
            average_accuracy: Some(90.0),
            deadband_occupancy: None,
            divergent: false,
            trace_id: String::new(),
        };
        let a_path = dir.join("a.csv");
        let b_path = dir.join("b.csv");
        write_report(&[mk("NLS", 7), mk("BE", 3), mk("BE", 14)], &a_path, &[]).unwrap();
        write_report(&[mk("BE", 14), mk("NLS", 7), mk("BE", 3)], &b_path, &[]).unwrap();
        assert_eq!(
            std::fs::read(&a_path).unwrap(),
            std::fs::read(&b_path).unwrap()
        );
    }

    #[test]
    fn trace_writer_emits_index_and_columns() {
        let dir = tmpdir("trace");
        let path = dir.join("trace.csv");
        write_trace(
            &path,
            &[("model".into(), "truth".into())],
            &[
                TraceColumn { name: "t_z", values: &[21.0, 22.0] },
                TraceColumn { name: "band_low", values: &[21.0, 21.0] },
            ],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("# model=truth"));
        assert!(text.contains("k,t_z,band_low"));
        assert!(text.contains("0,21,21"));
        assert!(text.contains("1,22,21"));
    }
}
