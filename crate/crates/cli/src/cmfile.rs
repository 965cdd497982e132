//! JSON covariance-matrix files.
//!
//! ```json
//! { "order": ["A", "B"], "modes": {"A": 1, "B": 1}, "matrix": [[...], ...] }
//! ```
//!
//! Quadratures are interleaved `(x₁, p₁, x₂, p₂, …)` unless the optional
//! field `"layout": "blocked"` says each party's rows are `(x₁…x_n, p₁…p_n)`.
//! Files are always written interleaved.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use schur_core::{CovarianceMatrix, DenseMatrix, ModePartition};
use serde::Deserialize;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCmFile {
    order: Vec<String>,
    modes: BTreeMap<String, usize>,
    matrix: Vec<Vec<f64>>,
    #[serde(default)]
    layout: Option<String>,
}

/// Parse or validation failure, with the offending line or field.
#[derive(Debug, Clone, PartialEq)]
pub struct FileError(pub String);

impl std::fmt::Display for FileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FileError {}

fn field(name: &str, msg: impl std::fmt::Display) -> FileError {
    FileError(format!("field `{name}`: {msg}"))
}

/// Row permutation taking blocked per-party order to interleaved order.
fn blocked_to_interleaved(partition: &ModePartition) -> Vec<usize> {
    let mut perm = Vec::with_capacity(partition.dim());
    let mut offset = 0;
    for party in partition.parties() {
        let n = party.modes;
        for k in 0..n {
            perm.push(offset + k);
            perm.push(offset + n + k);
        }
        offset += 2 * n;
    }
    perm
}

pub fn parse_cm(text: &str) -> Result<CovarianceMatrix, FileError> {
    let raw: RawCmFile = serde_json::from_str(text).map_err(|e| {
        FileError(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    let mut parts = Vec::with_capacity(raw.order.len());
    for label in &raw.order {
        let n = raw
            .modes
            .get(label)
            .ok_or_else(|| field("modes", format!("no mode count for party `{label}`")))?;
        parts.push((label.clone(), *n));
    }
    if let Some(extra) = raw.modes.keys().find(|k| !raw.order.contains(k)) {
        return Err(field("modes", format!("party `{extra}` is not listed in `order`")));
    }
    let partition = ModePartition::new(parts).map_err(|e| field("order", e))?;
    let d = partition.dim();
    if raw.matrix.len() != d {
        return Err(field(
            "matrix",
            format!("has {} rows, partition needs {d}", raw.matrix.len()),
        ));
    }
    if let Some((i, row)) = raw.matrix.iter().enumerate().find(|(_, r)| r.len() != d) {
        return Err(field(
            "matrix",
            format!("row {i} has {} entries, expected {d}", row.len()),
        ));
    }
    let perm: Vec<usize> = match raw.layout.as_deref() {
        None | Some("interleaved") => (0..d).collect(),
        Some("blocked") => blocked_to_interleaved(&partition),
        Some(other) => {
            return Err(field(
                "layout",
                format!("expected `interleaved` or `blocked`, got `{other}`"),
            ))
        }
    };
    let m = DenseMatrix::from_fn(d, d, |i, j| raw.matrix[perm[i]][perm[j]]);
    CovarianceMatrix::new_symmetric(m, partition).map_err(|e| field("matrix", e))
}

pub fn load_cm(path: &Path) -> Result<CovarianceMatrix, FileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| FileError(format!("{}: {e}", path.display())))?;
    parse_cm(&text).map_err(|e| FileError(format!("{}: {e}", path.display())))
}

/// Serializes with 17 significant digits so a load/save cycle reproduces
/// the file byte for byte.
pub fn to_json(v: &CovarianceMatrix) -> String {
    let p = v.partition();
    let quote = |s: &str| serde_json::to_string(s).expect("string serializes");
    let labels: Vec<String> = p.labels().iter().map(|l| quote(l)).collect();
    let modes: Vec<String> = p
        .parties()
        .iter()
        .map(|q| format!("{}: {}", quote(&q.label), q.modes))
        .collect();
    let m = v.matrix();
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"order\": [{}],", labels.join(", "));
    let _ = writeln!(out, "  \"modes\": {{{}}},", modes.join(", "));
    let _ = writeln!(out, "  \"matrix\": [");
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
        let sep = if i + 1 < m.nrows() { "," } else { "" };
        let _ = writeln!(out, "    [{}]{sep}", row.join(", "));
    }
    let _ = writeln!(out, "  ]");
    let _ = writeln!(out, "}}");
    out
}

pub fn save_cm(v: &CovarianceMatrix, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, to_json(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blocked_permutation() {
        let p = ModePartition::parse("A:2,B:1").unwrap();
        assert_eq!(blocked_to_interleaved(&p), vec![0, 2, 1, 3, 4, 5]);
    }

    #[test]
    fn diagnostics_name_the_problem() {
        let e = parse_cm("{\"order\": [\"A\"], \"modes\": {\"A\": 1},\n \"matrix\": [[1, 0], [0]]}")
            .unwrap_err();
        assert!(e.0.contains("row 1"), "{e}");
        let e = parse_cm("{\"order\": [\"A\"],\n \"modes\": {\"A\": 1}, \"matrix\": [[1, 0], [0, 1]],,}")
            .unwrap_err();
        assert!(e.0.starts_with("line 2"), "{e}");
        let e = parse_cm("{\"order\": [\"A\"], \"modes\": {}, \"matrix\": []}").unwrap_err();
        assert!(e.0.contains("modes"), "{e}");
        let e = parse_cm("{\"order\": [\"A\"], \"modes\": {\"A\": 1}, \"matrix\": [[1, 2], [0, 1]]}")
            .unwrap_err();
        assert!(e.0.contains("symmetric"), "{e}");
    }

    #[test]
    fn round_trip_is_exact() {
        let m = DenseMatrix::from_row_slice(2, 2, &[0.1, 1.0 / 3.0, 1.0 / 3.0, 7.25e-300]);
        let v = CovarianceMatrix::new_symmetric(m, ModePartition::single("A\"x", 1).unwrap()).unwrap();
        let text = to_json(&v);
        let back = parse_cm(&text).unwrap();
        assert_eq!(back.matrix(), v.matrix());
        assert_eq!(to_json(&back), text);
    }
}
