//! JSON file formats for states and density matrices.
//!
//! State file:
//!
//! ```json
//! { "format_version": 1, "n": 3, "amplitudes": [[0.7071, 0.0], [0.0, 0.0], ...] }
//! ```
//!
//! `amplitudes` holds `2^n` `[re, im]` pairs in index order (qubit 1 is the
//! most significant bit).
//!
//! Density-matrix file:
//!
//! ```json
//! { "format_version": 1, "n": 3, "matrix": [[[re, im], ...], ...] }
//! ```
//!
//! `matrix` is row-major: either `2^n` rows of `2^n` pairs, or one flat list
//! of `4^n` pairs. Writers emit every number with 17 significant digits.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::Value;

use crate::error::{Result, TangleError};
use crate::qstate::PureState;
use crate::roof::MixedState;

pub const FORMAT_VERSION: u64 = 1;
/// Largest qubit count a file may declare.
const MAX_FILE_QUBITS: u64 = 24;

/// Formats with 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(msg: impl Into<String>) -> TangleError {
    TangleError::Parse(msg.into())
}

fn header(text: &str, body_key: &str) -> Result<(usize, Value)> {
    let root: Value = serde_json::from_str(text).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
    let Value::Object(mut obj) = root else {
        return Err(parse_err("top level must be an object"));
    };
    match obj.get("format_version").and_then(Value::as_u64) {
        Some(FORMAT_VERSION) => {}
        Some(v) => return Err(parse_err(format!("unsupported format_version {v}"))),
        None => return Err(parse_err("missing or non-integer field \"format_version\"")),
    }
    let n = obj.get("n").and_then(Value::as_u64).ok_or_else(|| parse_err("missing or non-integer field \"n\""))?;
    if n == 0 || n > MAX_FILE_QUBITS {
        return Err(parse_err(format!("field \"n\" = {n} is out of range 1..={MAX_FILE_QUBITS}")));
    }
    let body = obj.remove(body_key).ok_or_else(|| parse_err(format!("missing field \"{body_key}\"")))?;
    Ok((n as usize, body))
}

fn complex_at(v: &Value, path: &str) -> Result<Complex64> {
    let pair = v.as_array().filter(|a| a.len() == 2);
    let parts = pair.and_then(|a| Some((a[0].as_f64()?, a[1].as_f64()?)));
    match parts {
        Some((re, im)) => Ok(Complex64::new(re, im)),
        None => Err(parse_err(format!("{path}: expected a [re, im] pair of numbers, got {v}"))),
    }
}

fn array_of<'a>(v: &'a Value, path: &str, len: usize) -> Result<&'a Vec<Value>> {
    let arr = v.as_array().ok_or_else(|| parse_err(format!("{path}: expected an array")))?;
    if arr.len() != len {
        return Err(parse_err(format!("{path}: expected {len} entries, got {}", arr.len())));
    }
    Ok(arr)
}

pub fn parse_state(text: &str) -> Result<PureState> {
    let (n, body) = header(text, "amplitudes")?;
    let amps = array_of(&body, "amplitudes", 1 << n)?
        .iter()
        .enumerate()
        .map(|(i, v)| complex_at(v, &format!("amplitudes[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    PureState::new(n, amps)
}

pub fn write_state(s: &PureState) -> String {
    let pairs: Vec<String> =
        s.amplitudes().iter().map(|a| format!("    [{}, {}]", fmt_f64(a.re), fmt_f64(a.im))).collect();
    format!(
        "{{\n  \"format_version\": {FORMAT_VERSION},\n  \"n\": {},\n  \"amplitudes\": [\n{}\n  ]\n}}\n",
        s.n(),
        pairs.join(",\n")
    )
}

pub fn parse_density(text: &str) -> Result<MixedState> {
    let (n, body) = header(text, "matrix")?;
    let dim = 1usize << n;
    let top = body.as_array().ok_or_else(|| parse_err("matrix: expected an array"))?;
    let mut entries = Vec::with_capacity(dim * dim);
    if top.len() == dim * dim && top.first().is_some_and(|v| complex_at(v, "").is_ok()) {
        for (k, v) in top.iter().enumerate() {
            entries.push(complex_at(v, &format!("matrix[{k}]"))?);
        }
    } else {
        let rows = array_of(&body, "matrix", dim)?;
        for (r, row) in rows.iter().enumerate() {
            for (c, v) in array_of(row, &format!("matrix[{r}]"), dim)?.iter().enumerate() {
                entries.push(complex_at(v, &format!("matrix[{r}][{c}]"))?);
            }
        }
    }
    MixedState::new(n, DMatrix::from_row_slice(dim, dim, &entries))
}

pub fn write_density(rho: &MixedState) -> String {
    let m = rho.matrix();
    let rows: Vec<String> = m
        .row_iter()
        .map(|row| {
            let cells: Vec<String> = row.iter().map(|z| format!("[{}, {}]", fmt_f64(z.re), fmt_f64(z.im))).collect();
            format!("    [{}]", cells.join(", "))
        })
        .collect();
    format!(
        "{{\n  \"format_version\": {FORMAT_VERSION},\n  \"n\": {},\n  \"matrix\": [\n{}\n  ]\n}}\n",
        rho.n(),
        rows.join(",\n")
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stategen::{ghz, random_pure};
    use proptest::prelude::*;

    #[test]
    fn reports_offending_index() {
        let text = r#"{"format_version": 1, "n": 1, "amplitudes": [[1.0, 0.0], [0.5]]}"#;
        let err = parse_state(text).unwrap_err().to_string();
        assert!(err.contains("amplitudes[1]"), "{err}");

        let text = r#"{"format_version": 1, "n": 2, "amplitudes": [[1.0, 0.0]]}"#;
        assert!(parse_state(text).unwrap_err().to_string().contains("expected 4 entries"));

        let text = r#"{"format_version": 2, "n": 1, "amplitudes": [[1, 0], [0, 0]]}"#;
        assert!(parse_state(text).unwrap_err().to_string().contains("format_version"));

        assert!(parse_state("not json").is_err());
    }

    #[test]
    fn density_round_trip_and_flat_form() {
        let rho = MixedState::from_pure(&ghz(3).unwrap());
        let back = parse_density(&write_density(&rho)).unwrap();
        assert_eq!(back, rho);

        let flat = r#"{"format_version": 1, "n": 1, "matrix": [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]}"#;
        let rho = parse_density(flat).unwrap();
        assert_eq!(rho.matrix()[(1, 1)], Complex64::new(0.5, 0.0));

        let bad = r#"{"format_version": 1, "n": 1, "matrix": [[[1, 0], [0, 0]], [[0, 0], "x"]]}"#;
        assert!(parse_density(bad).unwrap_err().to_string().contains("matrix[1][1]"));
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    proptest! {
        #[test]
        fn state_files_round_trip_exactly(n in 1usize..7, seed in any::<u64>()) {
            let s = random_pure(n, seed);
            prop_assert_eq!(parse_state(&write_state(&s)).unwrap(), s);
        }
    }
}
