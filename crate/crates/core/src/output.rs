//! Locale-independent number formatting for CSV and reports.

use crate::fourier::FourierCoefficients;

/// 17 significant digits, round-trip exact; `-0` prints as `0`.
pub fn real(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

/// Integers print without a fractional part.
pub fn frequency(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        real(v)
    }
}

/// CSV with header `freq,re,im` (or `freq_0,…,freq_{N−1},re,im` for several
/// features), one row per stored frequency in ascending order. Coefficients
/// below `1e-12` in magnitude print as zero.
pub fn coefficients_csv(coeffs: &FourierCoefficients) -> String {
    let n = coeffs.n_features();
    let mut out = if n == 1 {
        "freq".to_string()
    } else {
        (0..n).map(|f| format!("freq_{f}")).collect::<Vec<_>>().join(",")
    };
    out.push_str(",re,im\n");
    for (w, c) in coeffs.cleaned().iter() {
        for v in w {
            out.push_str(&frequency(*v));
            out.push(',');
        }
        out.push_str(&format!("{},{}\n", real(c.re), real(c.im)));
    }
    out
}
