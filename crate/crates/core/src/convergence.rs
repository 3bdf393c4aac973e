//! Observed order of accuracy from three refinement levels.

use crate::error::{Error, Result};

/// `log2(|q1 − q2| / |q2 − q3|)` for solutions at `h`, `h/2`, `h/4`.
pub fn richardson_order(q1: f64, q2: f64, q3: f64) -> f64 {
    ((q1 - q2).abs() / (q2 - q3).abs()).log2()
}

/// `log2(e1 / e2)` for error norms at `h` and `h/2`.
pub fn error_ratio_order(e1: f64, e2: f64) -> f64 {
    (e1 / e2).log2()
}

/// A time series with named columns (first column is time).
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Series {
    pub fn read_csv(path: &std::path::Path) -> std::result::Result<Self, String> {
        let mut reader = csv::Reader::from_path(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let columns: Vec<String> = reader
            .headers()
            .map_err(|e| format!("{}: {e}", path.display()))?
            .iter()
            .map(str::to_owned)
            .collect();
        let mut rows = Vec::new();
        for (k, record) in reader.records().enumerate() {
            let record = record.map_err(|e| format!("{}: {e}", path.display()))?;
            let row = record
                .iter()
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| format!("{}: row {}: {e}", path.display(), k + 2))?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(format!("{}: no data rows", path.display()));
        }
        Ok(Self { columns, rows })
    }

    fn last(&self) -> &[f64] {
        &self.rows[self.rows.len() - 1]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ColumnOrder {
    pub column: String,
    /// Values at the final time on the three levels.
    pub values: [f64; 3],
    /// Order from successive differences (solution-type columns).
    pub richardson: f64,
    /// Order from successive ratios (error-type columns).
    pub ratio: f64,
}

/// Per-column observed orders at the common final time of three series.
///
/// Columns are compared by name; the final times must agree to within
/// `1e-9` relative.
pub fn convergence_report(levels: [&Series; 3]) -> Result<Vec<ColumnOrder>> {
    let [a, b, c] = levels;
    if a.columns != b.columns || b.columns != c.columns {
        return Err(Error::Misaligned("column headers differ".into()));
    }
    if a.columns.first().map(String::as_str) != Some("t") {
        return Err(Error::Misaligned("first column must be t".into()));
    }
    let times = [a.last()[0], b.last()[0], c.last()[0]];
    let scale = times.iter().fold(1.0f64, |m, t| m.max(t.abs()));
    if times.iter().any(|t| (t - times[0]).abs() > 1e-9 * scale) {
        return Err(Error::Misaligned(format!("final times differ: {times:?}")));
    }
    Ok(a.columns
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, name)| {
            let values = [a.last()[k], b.last()[k], c.last()[k]];
            ColumnOrder {
                column: name.clone(),
                values,
                richardson: richardson_order(values[0], values[1], values[2]),
                ratio: error_ratio_order(values[1], values[2]),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(v: f64) -> Series {
        Series {
            columns: vec!["t".into(), "err".into()],
            rows: vec![vec![0.0, 0.0], vec![1.0, v]],
        }
    }

    #[test]
    fn ratio_four_is_second_order() {
        assert!((error_ratio_order(4.0, 1.0) - 2.0).abs() < 1e-15);
        assert!((richardson_order(1.0 + 16.0, 1.0 + 4.0, 1.0 + 1.0) - 2.0).abs() < 1e-15);
        let r = convergence_report([&series(16.0), &series(4.0), &series(1.0)]).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0].ratio - 2.0).abs() < 1e-15);
    }

    #[test]
    fn ratio_two_is_first_order() {
        assert!((error_ratio_order(2.0, 1.0) - 1.0).abs() < 1e-15);
        let r = convergence_report([&series(4.0), &series(2.0), &series(1.0)]).unwrap();
        assert!((r[0].ratio - 1.0).abs() < 1e-15);
        assert!((r[0].richardson - 1.0).abs() < 1e-15);
    }

    #[test]
    fn misaligned_inputs_are_rejected() {
        let mut late = series(1.0);
        late.rows[1][0] = 1.5;
        assert!(matches!(
            convergence_report([&series(4.0), &series(2.0), &late]),
            Err(Error::Misaligned(_))
        ));
        let mut renamed = series(1.0);
        renamed.columns[1] = "other".into();
        assert!(convergence_report([&series(4.0), &series(2.0), &renamed]).is_err());
    }
}
