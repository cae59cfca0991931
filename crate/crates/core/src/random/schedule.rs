use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `max(1, ln x)`; iterated logarithms are built by nesting this so every
/// level stays defined at small arguments.
pub fn clamped_ln(x: f64) -> f64 {
    if x > std::f64::consts::E {
        x.ln()
    } else {
        1.0
    }
}

/// `ln ln ln x` with each level clamped below at 1.
pub fn clamped_lll(x: f64) -> f64 {
    clamped_ln(clamped_ln(clamped_ln(x)))
}

/// Three-regime threshold sequence `λ_1 ≥ ... ≥ λ_N`:
/// `2√n` up to `m0`, `√(C n k ln(1/ε) / m)` up to `m1`, then `2ε√n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSchedule {
    pub n: usize,
    pub big_n: usize,
    pub k: usize,
    pub eps: f64,
    pub c: f64,
    pub m0: f64,
    pub m1: f64,
    pub values: Vec<f64>,
    /// True when `eps ∈ [2√(k/n), 1/2]`. At small `n` with large `k` that
    /// interval is empty and the schedule is still built, with this flag off.
    pub proof_regime: bool,
}

impl LambdaSchedule {
    /// `λ_m` for `m ≥ 1`.
    pub fn lambda(&self, m: usize) -> f64 {
        lambda_at(self.n, self.k, self.eps, self.c, self.m0, self.m1, m)
    }
}

fn lambda_at(n: usize, k: usize, eps: f64, c: f64, m0: f64, m1: f64, m: usize) -> f64 {
    let rn = (n as f64).sqrt();
    let mf = m as f64;
    if mf <= m0 {
        2.0 * rn
    } else if mf <= m1 {
        (c * n as f64 * k as f64 * (1.0 / eps).ln() / mf).sqrt()
    } else {
        2.0 * eps * rn
    }
}

pub fn lambda_schedule(n: usize, big_n: usize, k: usize, eps: f64, c: f64) -> Result<LambdaSchedule> {
    if n == 0 || big_n == 0 || k == 0 || k > n {
        return Err(Error::Precondition(format!("need 1 <= k <= n and N >= 1 (n = {n}, N = {big_n}, k = {k})")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Precondition("schedule constant must be positive".into()));
    }
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::Precondition(format!("eps = {eps} must lie in (0, 1/2]")));
    }
    let floor = 2.0 * (k as f64 / n as f64).sqrt();
    let interval_nonempty = floor <= 0.5;
    if interval_nonempty && eps < floor * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!("eps = {eps} is below 2√(k/n) = {floor}")));
    }
    let m0 = c * k as f64 * (1.0 / eps).ln() / 4.0;
    let m1 = m0 / (eps * eps);
    let values = (1..=big_n).map(|m| lambda_at(n, k, eps, c, m0, m1, m)).collect();
    Ok(LambdaSchedule { n, big_n, k, eps, c, m0, m1, values, proof_regime: interval_nonempty })
}

/// `α = 6√n · max{√ln(C ln(1/ε)), √ln(N/k) · ε}`, logs clamped below at 1.
pub fn alpha_choice(n: usize, big_n: usize, k: usize, eps: f64, c: f64) -> f64 {
    let a = clamped_ln(c * (1.0 / eps).ln()).sqrt();
    let b = clamped_ln(big_n as f64 / k as f64).sqrt() * eps;
    6.0 * (n as f64).sqrt() * a.max(b)
}

/// `ε = max{√(lll(N/k)) / √(ln(N/k)), 2√(k/n)}` with clamped logs, capped at 1/2
/// so that the result is always an admissible schedule parameter.
pub fn eps_choice(n: usize, big_n: usize, k: usize) -> f64 {
    let r = big_n as f64 / k as f64;
    let a = clamped_lll(r).sqrt() / clamped_ln(r).sqrt();
    let b = 2.0 * (k as f64 / n as f64).sqrt();
    a.max(b).min(0.5)
}
