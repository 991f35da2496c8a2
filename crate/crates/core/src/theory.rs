//! Analytic predictions for percolation at `p = alpha/d`.
//!
//! Everything here is a pure function of `alpha` (and `n`, `d`, `lambda`,
//! `k` where relevant). Logarithms are natural. `alpha` within `1e-9` of 1
//! is rejected: the critical window is not modelled.

use serde::Serialize;
use statrs::function::factorial::ln_factorial;
use thiserror::Error;

/// Half-width of the excluded band around `alpha = 1`.
pub const CRITICAL_BAND: f64 = 1e-9;
/// Term cap for the `f(alpha)` series.
pub const SERIES_MAX_TERMS: usize = 100_000;
pub const DEFAULT_SERIES_EPS: f64 = 1e-15;

#[derive(Debug, Error, PartialEq)]
pub enum TheoryError {
    #[error("alpha = {0} must be > 1")]
    AlphaNotSupercritical(f64),
    #[error("alpha = {0} is within {CRITICAL_BAND:e} of 1")]
    AlphaCritical(f64),
    #[error("alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("k = {k} too large for the lower bound (need 10k <= d = {d})")]
    KTooLargeForBound { k: usize, d: usize },
    #[error("n = {0} too small (need n >= 16)")]
    NTooSmall(usize),
    #[error("forbidden interval [{lo}, {hi}] is empty")]
    WindowEmpty { lo: f64, hi: f64 },
}

fn check_alpha(alpha: f64) -> Result<(), TheoryError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(TheoryError::InvalidAlpha(alpha));
    }
    if (alpha - 1.0).abs() < CRITICAL_BAND {
        return Err(TheoryError::AlphaCritical(alpha));
    }
    Ok(())
}

fn x_exp_neg_x(x: f64) -> f64 {
    x * (-x).exp()
}

/// The root in `(0, 1)` of `x e^{-x} = alpha e^{-alpha}` for `alpha > 1`.
///
/// Bisection on `(1e-15, 1)`, where `x e^{-x}` is increasing, carried to
/// full double precision.
pub fn solve_alpha_bar(alpha: f64) -> Result<f64, TheoryError> {
    if !alpha.is_finite() || alpha <= 1.0 {
        return Err(TheoryError::AlphaNotSupercritical(alpha));
    }
    let target = x_exp_neg_x(alpha);
    let (mut lo, mut hi) = (1e-15, 1.0);
    if x_exp_neg_x(lo) >= target {
        return Ok(lo);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if x_exp_neg_x(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Pick whichever endpoint has the smaller residual.
    Ok(if (x_exp_neg_x(lo) - target).abs() <= (x_exp_neg_x(hi) - target).abs() {
        lo
    } else {
        hi
    })
}

/// `|x e^{-x} - alpha e^{-alpha}|`.
pub fn alpha_bar_residual(alpha: f64, alpha_bar: f64) -> f64 {
    (x_exp_neg_x(alpha_bar) - x_exp_neg_x(alpha)).abs()
}

/// Closed form of the series: 1 below criticality, `alpha_bar/alpha` above.
pub fn f_closed(alpha: f64) -> Result<f64, TheoryError> {
    check_alpha(alpha)?;
    if alpha < 1.0 {
        Ok(1.0)
    } else {
        Ok(solve_alpha_bar(alpha)? / alpha)
    }
}

/// `sum_{k>=1} k^{k-1}/k! alpha^{k-1} e^{-alpha k}`, summed in log domain and
/// stopped once a term falls below `eps` times the partial sum.
pub fn f_series(alpha: f64, eps: f64) -> Result<f64, TheoryError> {
    check_alpha(alpha)?;
    let ln_alpha = alpha.ln();
    let mut sum = 0.0;
    for k in 1..=SERIES_MAX_TERMS {
        let kf = k as f64;
        let ln_term = (kf - 1.0) * kf.ln() - ln_factorial(k as u64) + (kf - 1.0) * ln_alpha - alpha * kf;
        let term = ln_term.exp();
        sum += term;
        if term < eps * sum {
            break;
        }
    }
    Ok(sum)
}

/// `gamma` with `alpha e^{1 - alpha + 2 alpha gamma} = 1`, i.e.
/// `(alpha - 1 - ln alpha) / (2 alpha)`.
pub fn gamma_of(alpha: f64) -> Result<f64, TheoryError> {
    check_alpha(alpha)?;
    Ok((alpha - 1.0 - alpha.ln()) / (2.0 * alpha))
}

/// `alpha e^{1 - alpha + 2 alpha gamma} - 1`.
pub fn gamma_residual(alpha: f64, gamma: f64) -> f64 {
    alpha * (1.0 - alpha + 2.0 * alpha * gamma).exp() - 1.0
}

/// `zeta = 1 / (alpha - 1 - ln alpha)`.
pub fn zeta_of(alpha: f64) -> Result<f64, TheoryError> {
    check_alpha(alpha)?;
    Ok(1.0 / (alpha - 1.0 - alpha.ln()))
}

/// `xi_k = min(k/d, k/n + lambda/d)`.
pub fn xi_k(n: usize, d: usize, lambda: f64, k: usize) -> f64 {
    let (n, d, k) = (n as f64, d as f64, k as f64);
    (k / d).min(k / n + lambda / d)
}

/// `eta_k = 2k/d + 2k/(alpha d) + alpha/d`.
pub fn eta_k(d: usize, alpha: f64, k: usize) -> f64 {
    let (d, k) = (d as f64, k as f64);
    2.0 * k / d + 2.0 * k / (alpha * d) + alpha / d
}

/// `ln(k^{k-1}/k! alpha^{k-1})`.
fn ln_tree_weight(alpha: f64, k: usize) -> f64 {
    let kf = k as f64;
    (kf - 1.0) * kf.ln() - ln_factorial(k as u64) + (kf - 1.0) * alpha.ln()
}

/// Log of the upper bound on `E C_k`.
pub fn ln_expected_ck_upper(n: usize, d: usize, lambda: f64, alpha: f64, k: usize) -> f64 {
    (n as f64).ln() + ln_tree_weight(alpha, k) - alpha * k as f64 * (1.0 - xi_k(n, d, lambda, k))
}

/// `n k^{k-1}/k! alpha^{k-1} e^{-alpha k (1 - xi_k)}`, an upper bound on the
/// expected number of vertices in size-`k` components.
pub fn expected_ck_upper(n: usize, d: usize, lambda: f64, alpha: f64, k: usize) -> f64 {
    ln_expected_ck_upper(n, d, lambda, alpha, k).exp()
}

/// Log of the lower bound on `E T_k`; requires `10k <= d`.
pub fn ln_expected_tk_lower(n: usize, d: usize, alpha: f64, k: usize) -> Result<f64, TheoryError> {
    if 10 * k > d {
        return Err(TheoryError::KTooLargeForBound { k, d });
    }
    Ok((n as f64).ln() + ln_tree_weight(alpha, k) - alpha * k as f64 * (1.0 + eta_k(d, alpha, k)))
}

/// `n k^{k-1}/k! alpha^{k-1} e^{-alpha k (1 + eta_k)}`, a lower bound on the
/// expected number of vertices in isolated trees of size `k`.
pub fn expected_tk_lower(n: usize, d: usize, alpha: f64, k: usize) -> Result<f64, TheoryError> {
    Ok(ln_expected_tk_lower(n, d, alpha, k)?.exp())
}

/// Bounds on the number of `k`-vertex trees in an n-vertex d-regular graph:
/// `(n k^{k-2} (d-k)^{k-1} / k!, n k^{k-2} d^{k-1} / k!)`. The lower bound is
/// `None` unless `k < d`.
pub fn tk_bounds(n: usize, d: usize, k: usize) -> (Option<f64>, f64) {
    assert!(k >= 1);
    let kf = k as f64;
    let base = (n as f64).ln() + (kf - 2.0) * kf.ln() - ln_factorial(k as u64);
    let upper = (base + (kf - 1.0) * (d as f64).ln()).exp();
    let lower = (k < d).then(|| (base + (kf - 1.0) * ((d - k) as f64).ln()).exp());
    (lower, upper)
}

/// `2 ln ln n`.
pub fn default_omega(n: usize) -> f64 {
    2.0 * (n as f64).ln().ln()
}

/// `zeta (ln n - 2.5 ln ln n) -/+ omega`.
pub fn largest_tree_window(n: usize, alpha: f64, omega: f64) -> Result<(f64, f64), TheoryError> {
    let zeta = zeta_of(alpha)?;
    if n < 16 {
        return Err(TheoryError::NTooSmall(n));
    }
    let ln_n = (n as f64).ln();
    let center = zeta * (ln_n - 2.5 * ln_n.ln());
    Ok((center - omega, center + omega))
}

/// `[ln n / (alpha gamma), gamma n]`: component sizes that should not occur.
pub fn forbidden_interval(n: usize, alpha: f64) -> Result<(f64, f64), TheoryError> {
    let gamma = gamma_of(alpha)?;
    let lo = (n as f64).ln() / (alpha * gamma);
    let hi = gamma * n as f64;
    if lo >= hi {
        return Err(TheoryError::WindowEmpty { lo, hi });
    }
    Ok((lo, hi))
}

/// Predicted giant fraction `1 - alpha_bar/alpha` (0 below criticality).
pub fn giant_fraction(alpha: f64) -> Result<f64, TheoryError> {
    check_alpha(alpha)?;
    if alpha < 1.0 {
        Ok(0.0)
    } else {
        Ok(1.0 - solve_alpha_bar(alpha)? / alpha)
    }
}

/// Predicted edges-per-vertex of the giant, `(alpha + alpha_bar)/2`.
pub fn giant_edge_ratio(alpha: f64) -> Result<f64, TheoryError> {
    Ok((alpha + solve_alpha_bar(alpha)?) / 2.0)
}

/// Predicted giant edge count divided by `n`: `alpha (1/2 - alpha_bar^2/(2 alpha^2))`.
pub fn giant_edges_per_vertex_of_host(alpha: f64) -> Result<f64, TheoryError> {
    let ab = solve_alpha_bar(alpha)?;
    Ok(alpha * (0.5 - ab * ab / (2.0 * alpha * alpha)))
}

/// `n`-dependent predictions.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SizePredictions {
    pub n: usize,
    pub omega: f64,
    pub forbidden_interval: Option<(f64, f64)>,
    pub largest_tree_window: Option<(f64, f64)>,
    pub largest_tree_center: Option<f64>,
}

/// Every quantity derived from `alpha`, with the residuals of the defining equations.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TheoryProfile {
    pub alpha: f64,
    pub alpha_bar: Option<f64>,
    pub gamma: f64,
    pub zeta: f64,
    pub f_alpha: f64,
    pub f_series: f64,
    pub giant_fraction: f64,
    pub giant_edge_ratio: Option<f64>,
    pub alpha_bar_residual: Option<f64>,
    pub gamma_residual: f64,
    pub sizes: Option<SizePredictions>,
}

impl TheoryProfile {
    pub fn new(alpha: f64, n: Option<usize>, omega: Option<f64>) -> Result<Self, TheoryError> {
        check_alpha(alpha)?;
        let alpha_bar = (alpha > 1.0).then(|| solve_alpha_bar(alpha)).transpose()?;
        let gamma = gamma_of(alpha)?;
        let sizes = n.map(|n| {
            let omega = omega.unwrap_or_else(|| default_omega(n));
            let window = largest_tree_window(n, alpha, omega).ok();
            SizePredictions {
                n,
                omega,
                forbidden_interval: forbidden_interval(n, alpha).ok(),
                largest_tree_window: window,
                largest_tree_center: window.map(|(lo, hi)| 0.5 * (lo + hi)),
            }
        });
        Ok(TheoryProfile {
            alpha,
            alpha_bar,
            gamma,
            zeta: zeta_of(alpha)?,
            f_alpha: f_closed(alpha)?,
            f_series: f_series(alpha, DEFAULT_SERIES_EPS)?,
            giant_fraction: giant_fraction(alpha)?,
            giant_edge_ratio: alpha_bar.map(|ab| (alpha + ab) / 2.0),
            alpha_bar_residual: alpha_bar.map(|ab| alpha_bar_residual(alpha, ab)),
            gamma_residual: gamma_residual(alpha, gamma),
            sizes,
        })
    }
}
