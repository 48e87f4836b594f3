//! Shared text-output conventions: 17 significant digits, dot decimal separator.

use crate::error::{Error, Result};

/// Version stamped into every JSON document as `"schema"`.
pub const SCHEMA_VERSION: u32 = 1;

/// Formats `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{:.16e}", x)
}

pub fn parse_f64(field: &str) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not a number: `{}`", field)))
}

/// Reads numeric CSV records, skipping a non-numeric header line and
/// lines starting with `#`.
pub fn read_numeric_csv<R: std::io::Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: Result<Vec<f64>> = rec.iter().map(parse_f64).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(_) if k == 0 => {}
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}
