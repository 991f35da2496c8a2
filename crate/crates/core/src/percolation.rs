//! Random edge subsets of a host graph: `G_p` (independent retention) and
//! `G_m` (uniform m-subset).
//!
//! Masks are indexed by canonical edge id. Both samplers walk the edge order
//! once and are pure functions of `(graph, parameter, seed)`.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use rand_core::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;
use crate::rng::{bounded, rng_from_seed, RNG_NAME, STREAM_SPLIT_RULE};

#[derive(Debug, Error)]
pub enum PercolationError {
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("requested {m} edges but the graph has only {total}")]
    TooManyEdges { m: usize, total: usize },
    #[error("alpha = {alpha} exceeds d = {d} (p would exceed 1)")]
    AlphaTooLarge { alpha: f64, d: usize },
    #[error("alpha must be positive and finite, got {0}")]
    InvalidAlpha(f64),
    #[error("prefix sizes must be non-decreasing")]
    UnsortedPrefixes,
    #[error("mask file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    #[serde(rename = "G_p")]
    Gp,
    #[serde(rename = "G_m")]
    Gm,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Gp => "G_p",
            Model::Gm => "G_m",
        })
    }
}

impl FromStr for Model {
    type Err = PercolationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "G_p" | "p" | "gp" => Ok(Model::Gp),
            "G_m" | "m" | "gm" => Ok(Model::Gm),
            _ => Err(PercolationError::Format(format!("unknown model {s:?}"))),
        }
    }
}

/// Fixed-length bit set over edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMask {
    words: Vec<u64>,
    len: usize,
}

impl EdgeMask {
    pub fn empty(len: usize) -> Self {
        EdgeMask {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn full(len: usize) -> Self {
        let mut mask = EdgeMask {
            words: vec![u64::MAX; len.div_ceil(64)],
            len,
        };
        mask.clear_tail();
        mask
    }

    fn clear_tail(&mut self) {
        if self.len % 64 != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << (self.len % 64)) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, e: usize) -> bool {
        assert!(e < self.len);
        self.words[e / 64] >> (e % 64) & 1 == 1
    }

    pub fn set(&mut self, e: usize) {
        assert!(e < self.len);
        self.words[e / 64] |= 1 << (e % 64);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Set bits in increasing order.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * 64 + bit)
            })
        })
    }

    pub fn is_subset_of(&self, other: &EdgeMask) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Little-endian byte order: byte `j` holds edges `8j..8j+8`, bit 0 first.
    pub fn to_hex(&self) -> String {
        let bytes: Vec<u8> = self
            .words
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(self.len.div_ceil(8))
            .collect();
        hex::encode(bytes)
    }

    pub fn from_hex(s: &str, len: usize) -> Result<Self, PercolationError> {
        let bytes = hex::decode(s.trim()).map_err(|e| PercolationError::Format(e.to_string()))?;
        if bytes.len() != len.div_ceil(8) {
            return Err(PercolationError::Format(format!(
                "expected {} hex bytes for {len} edges, got {}",
                len.div_ceil(8),
                bytes.len()
            )));
        }
        let mut mask = EdgeMask::empty(len);
        for (j, byte) in bytes.iter().enumerate() {
            mask.words[j / 8] |= (*byte as u64) << (8 * (j % 8));
        }
        let before = mask.words.clone();
        mask.clear_tail();
        if before != mask.words {
            return Err(PercolationError::Format("bits set past the last edge".into()));
        }
        Ok(mask)
    }
}

/// The parameter a sample was drawn with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelParam {
    P(f64),
    M(usize),
}

impl ModelParam {
    pub fn model(&self) -> Model {
        match self {
            ModelParam::P(_) => Model::Gp,
            ModelParam::M(_) => Model::Gm,
        }
    }
}

impl fmt::Display for ModelParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelParam::P(p) => write!(f, "{p}"),
            ModelParam::M(m) => write!(f, "{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PercolationSample {
    /// Fingerprint of the host graph.
    pub graph_id: u64,
    pub param: ModelParam,
    /// Set when the parameter was derived from `alpha`.
    pub alpha: Option<f64>,
    pub seed: u64,
    pub mask: EdgeMask,
    pub retained: usize,
}

impl PercolationSample {
    pub fn model(&self) -> Model {
        self.param.model()
    }
}

/// `p = alpha / d`.
pub fn alpha_to_p(alpha: f64, d: usize) -> Result<f64, PercolationError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(PercolationError::InvalidAlpha(alpha));
    }
    if alpha > d as f64 {
        return Err(PercolationError::AlphaTooLarge { alpha, d });
    }
    Ok(alpha / d as f64)
}

/// `m = round(alpha n / 2)`, ties away from zero.
pub fn alpha_to_m(alpha: f64, n: usize) -> Result<usize, PercolationError> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(PercolationError::InvalidAlpha(alpha));
    }
    Ok((alpha * n as f64 / 2.0).round() as usize)
}

/// Draw threshold: an edge is kept iff its `u64` draw is below this.
fn p_threshold(p: f64) -> Option<u64> {
    if p >= 1.0 {
        None
    } else {
        // Exact for p in [0,1): the product is < 2^64 and the cast truncates.
        Some((p * 18_446_744_073_709_551_616.0) as u64)
    }
}

/// `G_p`: every edge kept independently with probability `p`.
///
/// One `u64` draw per edge in canonical order, compared against a
/// threshold; masks for the same seed are nested in `p`.
pub fn percolate_p(g: &Graph, p: f64, seed: u64) -> Result<PercolationSample, PercolationError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(PercolationError::ProbabilityOutOfRange(p));
    }
    let total = g.m();
    let mut mask = EdgeMask::empty(total);
    let mut rng = rng_from_seed(seed);
    match p_threshold(p) {
        None => {
            for _ in 0..total {
                rng.next_u64();
            }
            mask = EdgeMask::full(total);
        }
        Some(threshold) => {
            for (w, word) in mask.words.iter_mut().enumerate() {
                let bits = (total - w * 64).min(64);
                let mut acc = 0u64;
                for b in 0..bits {
                    acc |= ((rng.next_u64() < threshold) as u64) << b;
                }
                *word = acc;
            }
        }
    }
    let retained = mask.count_ones();
    Ok(PercolationSample {
        graph_id: g.fingerprint(),
        param: ModelParam::P(p),
        alpha: None,
        seed,
        mask,
        retained,
    })
}

/// Sparse or dense stand-in for the identity permutation of `0..len`.
enum VirtualPerm {
    Dense(Vec<u32>),
    Sparse(HashMap<usize, usize>),
}

impl VirtualPerm {
    fn new(len: usize, draws: usize) -> Self {
        if draws.saturating_mul(8) >= len && len <= u32::MAX as usize {
            VirtualPerm::Dense((0..len as u32).collect())
        } else {
            VirtualPerm::Sparse(HashMap::with_capacity(draws * 2))
        }
    }

    fn get(&self, i: usize) -> usize {
        match self {
            VirtualPerm::Dense(v) => v[i] as usize,
            VirtualPerm::Sparse(map) => *map.get(&i).unwrap_or(&i),
        }
    }

    /// Swaps positions `i` and `j`, returning the new value at `i`.
    fn swap(&mut self, i: usize, j: usize) -> usize {
        match self {
            VirtualPerm::Dense(v) => {
                v.swap(i, j);
                v[i] as usize
            }
            VirtualPerm::Sparse(_) => {
                let (vi, vj) = (self.get(i), self.get(j));
                if let VirtualPerm::Sparse(map) = self {
                    map.insert(i, vj);
                    map.insert(j, vi);
                }
                vj
            }
        }
    }
}

/// `G_m` exposed in stages: one partial Fisher-Yates shuffle of the edge ids,
/// cut at every requested size. The returned masks are nested.
pub fn percolate_m_prefix(
    g: &Graph,
    sizes: &[usize],
    seed: u64,
) -> Result<Vec<PercolationSample>, PercolationError> {
    let total = g.m();
    if sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(PercolationError::UnsortedPrefixes);
    }
    let max = sizes.last().copied().unwrap_or(0);
    if max > total {
        return Err(PercolationError::TooManyEdges { m: max, total });
    }
    let mut rng = rng_from_seed(seed);
    let mut perm = VirtualPerm::new(total, max);
    let mut mask = EdgeMask::empty(total);
    let mut out = Vec::with_capacity(sizes.len());
    let mut drawn = 0;
    for &m in sizes {
        while drawn < m {
            let j = drawn + bounded(&mut rng, (total - drawn) as u64) as usize;
            let e = perm.swap(drawn, j);
            mask.set(e);
            drawn += 1;
        }
        out.push(PercolationSample {
            graph_id: g.fingerprint(),
            param: ModelParam::M(m),
            alpha: None,
            seed,
            mask: mask.clone(),
            retained: m,
        });
    }
    Ok(out)
}

/// `G_m`: a uniformly random set of exactly `m` edges.
pub fn percolate_m(g: &Graph, m: usize, seed: u64) -> Result<PercolationSample, PercolationError> {
    Ok(percolate_m_prefix(g, &[m], seed)?.pop().expect("one size requested"))
}

/// Samples the model at `p = alpha/d` or `m = round(alpha n / 2)`.
pub fn percolate_alpha(
    g: &Graph,
    model: Model,
    alpha: f64,
    seed: u64,
) -> Result<PercolationSample, PercolationError> {
    let mut sample = match model {
        Model::Gp => percolate_p(g, alpha_to_p(alpha, g.d())?, seed)?,
        Model::Gm => percolate_m(g, alpha_to_m(alpha, g.n())?, seed)?,
    };
    sample.alpha = Some(alpha);
    Ok(sample)
}

/// Writes a mask dump: a comment line naming the generator, the header
/// `model param seed retained`, then the hex mask.
pub fn write_mask<W: Write>(sample: &PercolationSample, mut w: W) -> Result<(), PercolationError> {
    writeln!(w, "# rng={RNG_NAME} stream_split={STREAM_SPLIT_RULE}")?;
    writeln!(
        w,
        "{} {} {} {}",
        sample.model(),
        sample.param,
        sample.seed,
        sample.retained
    )?;
    writeln!(w, "{}", sample.mask.to_hex())?;
    Ok(())
}

/// Reads a mask dump for graph `g`.
pub fn read_mask<R: Read>(g: &Graph, r: R) -> Result<PercolationSample, PercolationError> {
    let mut lines = BufReader::new(r)
        .lines()
        .filter(|l| !matches!(l, Ok(s) if s.starts_with('#') || s.trim().is_empty()));
    let bad = |msg: &str| PercolationError::Format(msg.to_string());
    let header = lines.next().ok_or_else(|| bad("missing header"))??;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let [model, param, seed, retained] = fields[..] else {
        return Err(bad("header must be `model param seed retained`"));
    };
    let param = match model.parse::<Model>()? {
        Model::Gp => ModelParam::P(param.parse().map_err(|_| bad("bad p"))?),
        Model::Gm => ModelParam::M(param.parse().map_err(|_| bad("bad m"))?),
    };
    let seed = seed.parse().map_err(|_| bad("bad seed"))?;
    let retained: usize = retained.parse().map_err(|_| bad("bad retained count"))?;
    let hex_line = lines.next().ok_or_else(|| bad("missing mask"))??;
    let mask = EdgeMask::from_hex(&hex_line, g.m())?;
    if mask.count_ones() != retained {
        return Err(bad("retained count does not match mask"));
    }
    Ok(PercolationSample {
        graph_id: g.fingerprint(),
        param,
        alpha: None,
        seed,
        mask,
        retained,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_complete, gen_cycle};
    use proptest::prelude::*;

    #[test]
    fn extremes_of_p() {
        let g = gen_complete(10).unwrap();
        assert_eq!(percolate_p(&g, 0.0, 1).unwrap().retained, 0);
        let full = percolate_p(&g, 1.0, 1).unwrap();
        assert_eq!(full.retained, 45);
        assert_eq!(full.mask, EdgeMask::full(45));
        assert!(matches!(
            percolate_p(&g, 1.5, 1),
            Err(PercolationError::ProbabilityOutOfRange(_))
        ));
        assert!(percolate_p(&g, -0.1, 1).is_err());
    }

    #[test]
    fn extremes_of_m() {
        let g = gen_complete(10).unwrap();
        assert_eq!(percolate_m(&g, 0, 3).unwrap().mask, EdgeMask::empty(45));
        assert_eq!(percolate_m(&g, 45, 3).unwrap().mask, EdgeMask::full(45));
        assert!(matches!(
            percolate_m(&g, 46, 3),
            Err(PercolationError::TooManyEdges { m: 46, total: 45 })
        ));
    }

    #[test]
    fn alpha_conversions() {
        assert_eq!(alpha_to_p(2.0, 20).unwrap(), 0.1);
        assert_eq!(alpha_to_m(1.0, 1000).unwrap(), 500);
        assert_eq!(alpha_to_m(1.0, 3).unwrap(), 2);
        assert!(matches!(
            alpha_to_p(25.0, 20),
            Err(PercolationError::AlphaTooLarge { .. })
        ));
        assert!(alpha_to_p(0.0, 20).is_err());
    }

    // Binomial(m, p) mean over many seeds: K_100 has 4950 edges, p = 1/2.
    #[test]
    fn gp_mean_retained() {
        let g = gen_complete(100).unwrap();
        let trials = 10_000;
        let total: usize = (0..trials)
            .map(|s| percolate_p(&g, 0.5, s).unwrap().retained)
            .sum();
        let mean = total as f64 / trials as f64;
        let se = (4950.0f64 * 0.25).sqrt() / (trials as f64).sqrt();
        assert!((mean - 2475.0).abs() < 4.0 * se, "mean {mean}");
    }

    // Every 2-subset of the 5 edges of C_5 should be equally likely.
    #[test]
    fn gm_uniform_on_c5() {
        let g = gen_cycle(5).unwrap();
        let trials = 100_000u64;
        let mut counts = HashMap::new();
        for s in 0..trials {
            let sample = percolate_m(&g, 2, s).unwrap();
            let key: Vec<usize> = sample.mask.iter_ones().collect();
            *counts.entry(key).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 10);
        let se = (trials as f64 * 0.1 * 0.9).sqrt();
        for (k, c) in counts {
            assert!((c as f64 - 10_000.0).abs() < 3.0 * se, "{k:?}: {c}");
        }
    }

    #[test]
    fn prefixes_nest() {
        let g = gen_complete(30).unwrap();
        let staged = percolate_m_prefix(&g, &[10, 50, 200, 435], 8).unwrap();
        for w in staged.windows(2) {
            assert!(w[0].mask.is_subset_of(&w[1].mask));
        }
        assert_eq!(staged[1].mask, percolate_m(&g, 50, 8).unwrap().mask);
        assert!(percolate_m_prefix(&g, &[5, 3], 8).is_err());
    }

    #[test]
    fn mask_file_round_trip() {
        let g = gen_complete(13).unwrap();
        let sample = percolate_p(&g, 0.3, 77).unwrap();
        let mut buf = Vec::new();
        write_mask(&sample, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# rng=xoshiro256++"));
        assert!(text.lines().nth(1).unwrap().starts_with("G_p 0.3 77 "));
        let back = read_mask(&g, &buf[..]).unwrap();
        assert_eq!(back.mask, sample.mask);
        assert_eq!(back.retained, sample.retained);
        assert_eq!(back.param, sample.param);
    }

    #[test]
    fn hex_layout() {
        let mut m = EdgeMask::empty(12);
        m.set(0);
        m.set(9);
        assert_eq!(m.to_hex(), "0102");
        assert_eq!(EdgeMask::from_hex("0102", 12).unwrap(), m);
        assert!(EdgeMask::from_hex("0110", 12).is_err());
        assert!(EdgeMask::from_hex("01", 12).is_err());
    }

    proptest! {
        #[test]
        fn gp_is_monotone_in_p(seed in any::<u64>(), p1 in 0.0f64..1.0, p2 in 0.0f64..1.0) {
            let g = gen_complete(16).unwrap();
            let (lo, hi) = if p1 <= p2 { (p1, p2) } else { (p2, p1) };
            let a = percolate_p(&g, lo, seed).unwrap();
            let b = percolate_p(&g, hi, seed).unwrap();
            prop_assert!(a.mask.is_subset_of(&b.mask));
            prop_assert_eq!(a.retained, a.mask.count_ones());
        }

        #[test]
        fn gm_exact_size_and_reproducible(seed in any::<u64>(), m in 0usize..=120) {
            let g = gen_complete(16).unwrap();
            let a = percolate_m(&g, m, seed).unwrap();
            prop_assert_eq!(a.mask.count_ones(), m);
            prop_assert_eq!(a.mask, percolate_m(&g, m, seed).unwrap().mask);
        }

        #[test]
        fn hex_round_trip(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
            let mut m = EdgeMask::empty(bits.len());
            for (i, b) in bits.iter().enumerate() {
                if *b { m.set(i); }
            }
            prop_assert_eq!(EdgeMask::from_hex(&m.to_hex(), bits.len()).unwrap(), m);
        }
    }
}
