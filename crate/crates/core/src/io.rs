//! State files and figure tables.
//!
//! States are JSON objects `{"dim": d, "entries": [[re, im], ...]}` with the
//! `d * d` entries in row-major order. Every float written by this module
//! uses 17 significant digits, enough to round-trip any `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::gmedetect::{NoisyGhzForm, RegionTable, TrajectoryRow};
use crate::matcore::{CMatrix, DensityMatrix, C64};

/// `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

pub fn state_to_json(m: &CMatrix) -> String {
    let mut out = format!("{{\"dim\": {}, \"entries\": [", m.dim());
    for (i, z) in m.as_slice().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "[{}, {}]", fmt17(z.re), fmt17(z.im));
    }
    out.push_str("]}\n");
    out
}

/// Parses the JSON state format into a matrix (no state validation).
pub fn state_from_json(text: &str) -> Result<CMatrix> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::StateFormat(e.to_string()))?;
    if file.dim == 0 {
        return Err(Error::StateFormat("dim must be positive".into()));
    }
    if file.entries.len() != file.dim * file.dim {
        return Err(Error::StateFormat(format!(
            "dim {} needs {} entries, found {}",
            file.dim,
            file.dim * file.dim,
            file.entries.len()
        )));
    }
    let data = file.entries.iter().map(|&[re, im]| C64::new(re, im)).collect();
    CMatrix::from_row_major(data)
}

pub fn read_state(path: impl AsRef<Path>) -> Result<DensityMatrix> {
    let text = fs::read_to_string(path)?;
    DensityMatrix::new(state_from_json(&text)?)
}

pub fn write_state(path: impl AsRef<Path>, m: &CMatrix) -> Result<()> {
    fs::write(path, state_to_json(m))?;
    Ok(())
}

/// Region table as CSV: `p,beta,min_ev`, plus `beta_zero` (the zero
/// contour of `contour` at that `p`, empty where none exists) when a
/// confirmed closed form is supplied. Skipped points carry `NaN`.
pub fn region_csv(table: &RegionTable, contour: Option<NoisyGhzForm>) -> String {
    let mut out = String::from("p,beta,min_ev");
    if contour.is_some() {
        out.push_str(",beta_zero");
    }
    out.push('\n');
    for row in &table.rows {
        let _ = write!(out, "{},{},{}", fmt17(row.p), fmt17(row.beta), fmt17(row.min_ev));
        if let Some(form) = contour {
            out.push(',');
            if let Some(b) = form.zero_contour(row.p) {
                out.push_str(&fmt17(b));
            }
        }
        out.push('\n');
    }
    out
}

pub fn trajectory_csv(rows: &[TrajectoryRow]) -> String {
    let mut out = String::from("t,min_ev,alpha,beta\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt17(r.t),
            fmt17(r.min_ev),
            fmt17(r.alpha),
            fmt17(r.beta)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmedetect::{region_scan, AlphaRule};
    use crate::states::{ghz, random_density};
    use proptest::prelude::*;

    #[test]
    fn ghz_file_round_trip() {
        let m = ghz().projector().into_matrix();
        let text = state_to_json(&m);
        assert!(text.starts_with("{\"dim\": 8, \"entries\": [[5.0000000000000011e-1, 0.0000000000000000e0]"));
        assert_eq!(state_from_json(&text).unwrap(), m);
    }

    #[test]
    fn malformed_files() {
        assert!(matches!(state_from_json("{\"dim\": 2, \"entries\": [[1, 0]"), Err(Error::StateFormat(_))));
        let short = r#"{"dim": 2, "entries": [[1, 0], [0, 0], [0, 0]]}"#;
        let err = state_from_json(short).unwrap_err();
        assert!(err.to_string().contains("needs 4 entries"), "{err}");
        let extra = r#"{"dim": 1, "entries": [[1, 0]], "x": 1}"#;
        assert!(state_from_json(extra).is_err());
    }

    #[test]
    fn invalid_state_names_invariant() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        write_state(&path, &CMatrix::diagonal(&[0.7, 0.7])).unwrap();
        let err = read_state(&path).unwrap_err();
        assert!(err.to_string().contains("trace"), "{err}");
    }

    #[test]
    fn region_csv_layout() {
        let table = region_scan(&[0.9, 1.0], &[0.0, 0.1], AlphaRule::Fixed(0.25));
        let csv = region_csv(&table, Some(NoisyGhzForm::Rederived));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "p,beta,min_ev,beta_zero");
        assert_eq!(lines.len(), 5);
        let plain = region_csv(&table, None);
        assert!(plain.starts_with("p,beta,min_ev\n"));
    }

    proptest! {
        #[test]
        fn fmt17_round_trips(x in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            let back: f64 = fmt17(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }

        #[test]
        fn state_json_round_trips(seed in any::<u64>(), rank in 1usize..=8) {
            let m = random_density(3, rank, seed).unwrap().into_matrix();
            prop_assert_eq!(state_from_json(&state_to_json(&m)).unwrap(), m);
        }
    }
}
