//! Closed-form reference curves. All logarithms are natural; iterated
//! logarithms are clamped below at 1 level by level.

use crate::error::{Error, Result};
use crate::random::{clamped_lll, clamped_ln};

/// The two terms `((k/√n)·√(1/lll(n ln n / k)), √k / √ln(n ln n / k))`.
pub fn main_bound_terms(n: usize, k: usize) -> Result<(f64, f64)> {
    if n < 3 || k == 0 || k > n {
        return Err(Error::Precondition(format!("need 1 <= k <= n and n >= 3 (n = {n}, k = {k})")));
    }
    let (nf, kf) = (n as f64, k as f64);
    let x = nf * nf.ln() / kf;
    let first = kf / nf.sqrt() * (1.0 / clamped_lll(x)).sqrt();
    let second = kf.sqrt() / clamped_ln(x).sqrt();
    Ok((first, second))
}

/// Lower-bound bracket for `vr(PK, QL)`, without its absolute constant.
pub fn main_bound(n: usize, k: usize) -> Result<f64> {
    main_bound_terms(n, k).map(|(a, b)| a.min(b))
}

/// `C · max{k/√n, √(n/k) ln n}`.
pub fn sharpness_reference(n: usize, k: usize, c: f64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    c * (kf / nf.sqrt()).max((nf / kf).sqrt() * nf.ln())
}

/// Piecewise upper curve: `k/√n` above `n^{2/3}(ln n)^{2/3}`, `√(n/k) ln n`
/// above `√n ln n`, and `√k` below; times `C`.
pub fn regime_reference(n: usize, k: usize, c: f64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    let upper = (nf * nf.ln()).powf(2.0 / 3.0);
    let lower = nf.sqrt() * nf.ln();
    let v = if kf >= upper {
        kf / nf.sqrt()
    } else if kf > lower {
        (nf / kf).sqrt() * nf.ln()
    } else {
        kf.sqrt()
    };
    c * v
}

/// `4√(e k)`, valid for every body and projection.
pub fn trivial_bound(k: usize) -> f64 {
    4.0 * (std::f64::consts::E * k as f64).sqrt()
}

/// `√(k / ln(2n/k))`.
pub fn ball_reference(n: usize, k: usize) -> f64 {
    (k as f64 / (2.0 * n as f64 / k as f64).ln()).sqrt()
}

/// `max{(√n/k)·√lll(N/k), √ln(N/k)/√k}`, the bracket bounding `|QZ_N|^{1/k}`.
pub fn qzn_bracket(n: usize, big_n: usize, k: usize) -> f64 {
    let r = big_n as f64 / k as f64;
    let kf = k as f64;
    ((n as f64).sqrt() / kf * clamped_lll(r).sqrt()).max(clamped_ln(r).sqrt() / kf.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn main_bound_examples() {
        let (first, _) = main_bound_terms(16, 4).unwrap();
        assert!((first - 1.0).abs() < 1e-15);
        let (_, second) = main_bound_terms(100, 4).unwrap();
        let want = 2.0 / (100.0 * 100f64.ln() / 4.0).ln().sqrt();
        assert!((second - want).abs() < 1e-15);
        assert!(main_bound(2, 1).is_err());
    }

    #[test]
    fn references() {
        assert!((trivial_bound(1) - 4.0 * std::f64::consts::E.sqrt()).abs() < 1e-15);
        assert!((ball_reference(4, 4) - (4.0 / 2f64.ln()).sqrt()).abs() < 1e-15);
        assert_eq!(regime_reference(16, 1, 1.0), 1.0);
    }
}
