//! File formats for paths, study tables, and reports.
//!
//! CSV: comma separators, `.` decimal point, LF line endings, reals at 17
//! significant digits, a leading `# config: ...` comment carrying the
//! resolved run configuration. JSON: UTF-8, struct field order (stable).

use crate::error::{Error, Result};
use crate::sim::GridPath;
use serde::Serialize;
use std::io::{BufRead, Write};

/// 17 significant digits, enough to round-trip any f64.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Integer-valued entries (counts, indices, n) print as integers, the rest
/// as 17-significant-digit reals.
pub fn format_cell(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 9.007199254740992e15 {
        format!("{}", v as i64)
    } else {
        format_real(v)
    }
}

/// A study table: config comment, header, one line per row.
pub fn write_table_csv<W: Write>(
    w: &mut W,
    config_comment: &str,
    columns: &[String],
    rows: &[Vec<f64>],
) -> Result<()> {
    writeln!(w, "# config: {config_comment}")?;
    writeln!(w, "{}", columns.join(","))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| format_cell(v)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn table_csv_string(config_comment: &str, columns: &[String], rows: &[Vec<f64>]) -> String {
    let mut buf = Vec::new();
    write_table_csv(&mut buf, config_comment, columns, rows).expect("vec write cannot fail");
    String::from_utf8(buf).expect("formatted output is ASCII")
}

/// A path as `i,t,x` rows; t and x always print as reals.
pub fn write_path_csv<W: Write>(w: &mut W, config_comment: &str, path: &GridPath) -> Result<()> {
    writeln!(w, "# config: {config_comment}")?;
    writeln!(w, "i,t,x")?;
    for (i, &x) in path.values.iter().enumerate() {
        writeln!(w, "{},{},{}", i, format_real(path.time(i)), format_real(x))?;
    }
    Ok(())
}

/// Read a path written by `write_path_csv`: `#` comment lines are skipped,
/// the header is required, the horizon is the last time stamp.
pub fn read_path_csv<R: BufRead>(r: R) -> Result<GridPath> {
    let mut values = Vec::new();
    let mut last_t = f64::NAN;
    let mut saw_header = false;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            if line != "i,t,x" {
                return Err(Error::Parse(format!("expected header 'i,t,x', got '{line}'")));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(Error::Parse(format!("line {}: expected 3 fields, got {}", lineno + 1, fields.len())));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad index: {e}", lineno + 1)))?;
        if i != values.len() {
            return Err(Error::Parse(format!("line {}: index {} out of order", lineno + 1, i)));
        }
        last_t = fields[1]
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad time: {e}", lineno + 1)))?;
        let x: f64 = fields[2]
            .parse()
            .map_err(|e| Error::Parse(format!("line {}: bad value: {e}", lineno + 1)))?;
        values.push(x);
    }
    if values.len() < 2 {
        return Err(Error::Parse(format!("path file has {} data rows, need >= 2", values.len())));
    }
    if !(last_t > 0.0) {
        return Err(Error::Parse(format!("final time stamp {last_t} is not a positive horizon")));
    }
    GridPath::from_values(last_t, values)
}

#[derive(Serialize)]
struct Document<'a, C: Serialize, R: Serialize> {
    config: &'a C,
    report: &'a R,
}

/// `{"config": ..., "report": ...}` with a trailing newline.
pub fn json_document<C: Serialize, R: Serialize>(config: &C, report: &R) -> Result<String> {
    let doc = Document { config, report };
    let body = serde_json::to_string_pretty(&doc)
        .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
    Ok(body + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::sim::{simulate_path, SbmParams};

    #[test]
    fn cells_round_trip_and_integers_stay_integers() {
        assert_eq!(format_cell(100.0), "100");
        assert_eq!(format_cell(-3.0), "-3");
        assert_eq!(format_cell(0.5), "5.0000000000000000e-1");
        let v = 0.1234567890123456789;
        assert_eq!(format_real(v).parse::<f64>().unwrap(), v);
    }

    #[test]
    fn table_csv_layout() {
        let csv = table_csv_string(
            "demo",
            &["n".to_string(), "value".to_string()],
            &[vec![100.0, 0.25], vec![1000.0, 0.125]],
        );
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# config: demo");
        assert_eq!(lines[1], "n,value");
        assert_eq!(lines[2], "100,2.5000000000000000e-1");
        assert_eq!(lines.len(), 4);
        assert!(csv.ends_with('\n'));
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn path_round_trips_bit_for_bit() {
        let params = SbmParams::new(0.3, 0.5, 2.0, 257).unwrap();
        let mut stream = RngStream::new(61, 0);
        let path = simulate_path(&params, &mut stream).unwrap();
        let mut buf = Vec::new();
        write_path_csv(&mut buf, "round trip", &path).unwrap();
        let back = read_path_csv(buf.as_slice()).unwrap();
        assert_eq!(back.values, path.values);
        assert_eq!(back.params.t, path.params.t);
        assert_eq!(back.n(), path.n());
    }

    #[test]
    fn malformed_paths_are_rejected_with_parse_errors() {
        let cases = [
            "i,t,x\n",
            "x,y,z\n0,0.0,0.0\n1,1.0,0.2\n",
            "i,t,x\n0,0.0,0.0\n2,1.0,0.2\n",
            "i,t,x\n0,0.0,0.0\n1,1.0\n",
            "i,t,x\n0,0.0,0.0\n1,oops,0.2\n",
            "i,t,x\n0,0.0,0.0\n1,-1.0,0.2\n",
        ];
        for case in cases {
            assert!(
                matches!(read_path_csv(case.as_bytes()), Err(Error::Parse(_))),
                "accepted: {case:?}"
            );
        }
    }

    #[test]
    fn json_document_wraps_config_and_report() {
        #[derive(Serialize)]
        struct C {
            n: usize,
        }
        let s = json_document(&C { n: 5 }, &vec![1.0, 2.0]).unwrap();
        assert!(s.starts_with("{\n  \"config\""));
        assert!(s.contains("\"report\""));
        assert!(s.ends_with('\n'));
        let parsed: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(parsed["config"]["n"], 5);
    }
}
