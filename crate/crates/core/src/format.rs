//! Text formatting shared by the file formats and reports.

use ndarray::Array2;

use crate::error::{parse_err, Result};
use crate::scalar::{Real, C};

/// Scientific notation with `digits` significant digits.
pub fn sig<T: Real>(value: T, digits: usize) -> String {
    // Adding 0.0 turns -0.0 into 0.0.
    format!(
        "{:.*e}",
        digits.saturating_sub(1),
        value.to_f64_lossy() + 0.0
    )
}

/// 17 significant digits, enough to round-trip an `f64`.
pub fn exact<T: Real>(value: T) -> String {
    sig(value, 17)
}

/// 15 significant digits, used for human-facing reports.
pub fn report<T: Real>(value: T) -> String {
    sig(value, 15)
}

pub fn complex<T: Real>(z: C<T>, digits: usize) -> String {
    format!("{},{}", sig(z.re, digits), sig(z.im, digits))
}

pub fn parse_real<T: Real>(token: &str, line: usize) -> Result<T> {
    token
        .parse::<f64>()
        .map(T::lit)
        .map_err(|_| parse_err(line, format!("expected a number, found `{token}`")))
}

pub fn parse_index(token: &str, line: usize) -> Result<usize> {
    token.parse::<usize>().map_err(|_| {
        parse_err(
            line,
            format!("expected a non-negative integer, found `{token}`"),
        )
    })
}

/// Parses `re,im` (or a bare real `re`).
pub fn parse_complex<T: Real>(token: &str, line: usize) -> Result<C<T>> {
    match token.split_once(',') {
        Some((re, im)) => Ok(C::new(parse_real(re, line)?, parse_real(im, line)?)),
        None => Ok(C::new(parse_real(token, line)?, T::zero())),
    }
}

/// Row-major complex matrix: one line per row, entries as `re,im`.
pub fn complex_matrix<T: Real>(m: &Array2<C<T>>, digits: usize) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let cells: Vec<String> = row.iter().map(|z| complex(*z, digits)).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    out
}

/// Parses a flat row-major list of complex entries into a square matrix.
pub fn parse_square_matrix<T: Real>(tokens: &[&str], line: usize) -> Result<Array2<C<T>>> {
    let entries = tokens
        .iter()
        .map(|t| parse_complex(t, line))
        .collect::<Result<Vec<_>>>()?;
    let dim = (entries.len() as f64).sqrt().round() as usize;
    if dim * dim != entries.len() || dim == 0 {
        return Err(parse_err(
            line,
            format!("{} entries do not form a square matrix", entries.len()),
        ));
    }
    Ok(Array2::from_shape_vec((dim, dim), entries).expect("shape checked"))
}

/// Strips a trailing `#` comment and surrounding whitespace.
pub(crate) fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_roundtrips_f64() {
        for x in [
            1.0,
            1.5f64.sqrt(),
            5.0 * 3f64.sqrt() / 8.0,
            1e-300,
            123456.789,
        ] {
            assert_eq!(exact(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn report_has_fifteen_digits() {
        assert_eq!(report(1.0f64), "1.00000000000000e0");
    }

    #[test]
    fn rejects_non_square() {
        let err = parse_square_matrix::<f64>(&["1", "0", "0"], 7).unwrap_err();
        assert!(matches!(err, crate::Error::Parse { line: 7, .. }));
    }
}
