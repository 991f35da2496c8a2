//! Second eigenvalue estimation and the edge-discrepancy (mixing) audit.
//!
//! `lambda` is the largest absolute value among the adjacency eigenvalues
//! other than the trivial `d`. For a connected d-regular graph the trivial
//! eigenvector is the all-ones vector, so the rest of the spectrum is the
//! spectrum of `B x = A x - (d/n) (sum x) 1`. Power iteration runs on `B^2`,
//! which makes `lambda^2` strictly dominant even when `lambda_2 = -lambda_n`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::rng::{bounded, mix64, rng_from_seed};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Above this vertex count the automatic choice stops using the dense solver.
pub const DENSE_LIMIT: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralMethod {
    PowerDeflated,
    DenseExact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralEstimate {
    pub lambda: f64,
    pub iterations: usize,
    pub residual: f64,
    pub method: SpectralMethod,
}

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("power iteration did not converge: lambda ~ {:.9} after {} iterations (residual {:.3e})", .best.lambda, .best.iterations, .best.residual)]
    NotConverged { best: SpectralEstimate },
    #[error("graph is disconnected; eigenvalue d is not simple")]
    Disconnected,
    #[error("dense solver limited to n <= {limit}, got {n}")]
    TooLargeForDense { n: usize, limit: usize },
}

/// `lambda` of `g`: dense eigendecomposition for `n <= 512`, deflated power
/// iteration otherwise.
pub fn estimate_lambda(g: &Graph, tol: f64, max_iter: usize) -> Result<SpectralEstimate, SpectralError> {
    if g.n() <= DENSE_LIMIT {
        dense_exact(g)
    } else {
        power_deflated(g, tol, max_iter)
    }
}

/// Full spectrum, ascending. Dense; intended for small graphs.
pub fn dense_spectrum(g: &Graph) -> Vec<f64> {
    let n = g.n();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (u, v) in g.edges() {
        a[(u, v)] = 1.0;
        a[(v, u)] = 1.0;
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    eig.sort_by(|x, y| x.total_cmp(y));
    eig
}

pub fn dense_exact(g: &Graph) -> Result<SpectralEstimate, SpectralError> {
    if g.n() > DENSE_LIMIT {
        return Err(SpectralError::TooLargeForDense {
            n: g.n(),
            limit: DENSE_LIMIT,
        });
    }
    if !g.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    let eig = dense_spectrum(g);
    // Drop the top eigenvalue (d); the rest are lambda_2 >= ... >= lambda_n.
    let rest = &eig[..eig.len() - 1];
    let lambda = rest.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    Ok(SpectralEstimate {
        lambda: lambda.min(g.d() as f64),
        iterations: 0,
        residual: 0.0,
        method: SpectralMethod::DenseExact,
    })
}

/// `y = A x - (d/n) (sum x) 1`.
fn apply_deflated(g: &Graph, x: &[f64], y: &mut [f64]) {
    let shift = g.d() as f64 * x.iter().sum::<f64>() / g.n() as f64;
    for (v, out) in y.iter_mut().enumerate() {
        *out = g.neighbors(v).iter().map(|&w| x[w as usize]).sum::<f64>() - shift;
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Power iteration on the square of the deflated adjacency operator.
///
/// The residual is `||B^2 x - mu x||` for the unit iterate `x` and Rayleigh
/// quotient `mu = ||B x||^2`; iteration stops once it drops to
/// `tol * max(1, mu)`.
pub fn power_deflated(g: &Graph, tol: f64, max_iter: usize) -> Result<SpectralEstimate, SpectralError> {
    if !g.is_connected() {
        return Err(SpectralError::Disconnected);
    }
    let n = g.n();
    let mut x: Vec<f64> = (0..n as u64)
        .map(|i| (mix64(i ^ 0x5eed) >> 11) as f64 / (1u64 << 53) as f64 - 0.5)
        .collect();
    let mean = x.iter().sum::<f64>() / n as f64;
    x.iter_mut().for_each(|v| *v -= mean);
    normalize(&mut x);

    let mut bx = vec![0.0; n];
    let mut bbx = vec![0.0; n];
    let mut best = SpectralEstimate {
        lambda: 0.0,
        iterations: 0,
        residual: f64::INFINITY,
        method: SpectralMethod::PowerDeflated,
    };
    for it in 1..=max_iter {
        apply_deflated(g, &x, &mut bx);
        apply_deflated(g, &bx, &mut bbx);
        let mu = bx.iter().map(|v| v * v).sum::<f64>();
        let residual = bbx
            .iter()
            .zip(&x)
            .map(|(y, xi)| (y - mu * xi).powi(2))
            .sum::<f64>()
            .sqrt();
        best = SpectralEstimate {
            lambda: mu.sqrt().min(g.d() as f64),
            iterations: it,
            residual,
            method: SpectralMethod::PowerDeflated,
        };
        if residual <= tol * mu.max(1.0) {
            return Ok(best);
        }
        std::mem::swap(&mut x, &mut bbx);
        // Keep the iterate orthogonal to the all-ones vector.
        let mean = x.iter().sum::<f64>() / n as f64;
        x.iter_mut().for_each(|v| *v -= mean);
        if normalize(&mut x) == 0.0 {
            // B vanishes on the start vector: every nontrivial eigenvalue is 0.
            return Ok(best);
        }
    }
    Err(SpectralError::NotConverged { best })
}

/// Outcome of one edge-discrepancy check `|e(B,C) - |B||C|d/n| <= lambda sqrt(|B||C|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingReport {
    pub b_size: usize,
    pub c_size: usize,
    /// Ordered pairs `(u, v)` with `u in B`, `v in C`, `{u,v}` an edge.
    pub e_bc: u64,
    /// `bcdn` with `b = |B|/n`, `c = |C|/n`.
    pub expected: f64,
    /// `lambda n sqrt(bc)`.
    pub bound: f64,
    pub discrepancy: f64,
    pub satisfied: bool,
}

impl MixingReport {
    /// `discrepancy / bound`, or 0 when both vanish.
    pub fn ratio(&self) -> f64 {
        if self.bound > 0.0 {
            self.discrepancy / self.bound
        } else if self.discrepancy == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

fn membership(g: &Graph, set: &[usize]) -> Result<(Vec<bool>, usize), GraphError> {
    let mut mask = vec![false; g.n()];
    let mut size = 0;
    for &v in set {
        if v >= g.n() {
            return Err(GraphError::VertexOutOfRange { vertex: v, n: g.n() });
        }
        if !mask[v] {
            mask[v] = true;
            size += 1;
        }
    }
    Ok((mask, size))
}

/// Counts `e(B, C)` exactly and compares it against the spectral bound.
/// Repeated vertices in `b` or `c` are ignored; `B = C` is allowed.
pub fn mixing_check(g: &Graph, b: &[usize], c: &[usize], lambda: f64) -> Result<MixingReport, GraphError> {
    let (in_b, b_size) = membership(g, b)?;
    let (in_c, c_size) = membership(g, c)?;
    let mut e_bc = 0u64;
    for u in (0..g.n()).filter(|&u| in_b[u]) {
        e_bc += g.neighbors(u).iter().filter(|&&w| in_c[w as usize]).count() as u64;
    }
    let n = g.n() as f64;
    let expected = b_size as f64 * c_size as f64 * g.d() as f64 / n;
    let bound = lambda * (b_size as f64 * c_size as f64).sqrt();
    let discrepancy = (e_bc as f64 - expected).abs();
    // Slack for f64 rounding in `expected` and `bound`; e_bc itself is exact.
    let satisfied = discrepancy <= bound + 1e-9 * bound.max(1.0);
    Ok(MixingReport {
        b_size,
        c_size,
        e_bc,
        expected,
        bound,
        discrepancy,
        satisfied,
    })
}

/// Summary of many random mixing checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixingAudit {
    pub samples: usize,
    pub violations: usize,
    pub worst_ratio: f64,
    pub lambda: f64,
}

/// Uniformly random vertex subset whose size is itself uniform in `1..=n`.
pub fn random_subset(n: usize, rng: &mut crate::rng::Rng) -> Vec<usize> {
    let size = 1 + bounded(rng, n as u64) as usize;
    let mut perm: Vec<usize> = (0..n).collect();
    for i in 0..size {
        let j = i + bounded(rng, (n - i) as u64) as usize;
        perm.swap(i, j);
    }
    perm.truncate(size);
    perm
}

/// Runs `samples` checks on random `(B, C)` pairs drawn from `seed`.
pub fn mixing_audit(g: &Graph, lambda: f64, samples: usize, seed: u64) -> MixingAudit {
    let mut rng = rng_from_seed(seed);
    let mut audit = MixingAudit {
        samples,
        violations: 0,
        worst_ratio: 0.0,
        lambda,
    };
    for _ in 0..samples {
        let b = random_subset(g.n(), &mut rng);
        let c = random_subset(g.n(), &mut rng);
        let report = mixing_check(g, &b, &c, lambda).expect("subsets are in range");
        if !report.satisfied {
            audit.violations += 1;
        }
        audit.worst_ratio = audit.worst_ratio.max(report.ratio());
    }
    audit
}
