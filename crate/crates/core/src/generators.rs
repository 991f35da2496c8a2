//! Host graph families: random regular, Paley, complete, cycle and Petersen.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{build_graph, Graph, GraphError};
use crate::rng::{bounded, rng_from_seed};

/// Restarts allowed before `gen_random_regular` gives up.
pub const RESTART_BUDGET: usize = 1000;

#[derive(Debug, Error)]
pub enum GeneratorError {
    #[error("n*d = {n}*{d} is odd")]
    OddDegreeSum { n: usize, d: usize },
    #[error("degree {d} must satisfy 1 <= d < n = {n}")]
    DegreeTooLarge { n: usize, d: usize },
    #[error("no simple pairing found after {0} restarts")]
    RetryLimitExceeded(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not 1 mod 4")]
    WrongResidueClass(u64),
    #[error("{family} needs n >= {min}, got {n}")]
    TooSmall {
        family: &'static str,
        min: usize,
        n: usize,
    },
    #[error("unknown graph family {0:?}")]
    UnknownFamily(String),
    #[error("missing parameter {0}")]
    MissingParameter(&'static str),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Which host graph to build.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GeneratorSpec {
    RandomRegular { n: usize, d: usize, seed: u64 },
    Paley { q: u64 },
    Complete { n: usize },
    Cycle { n: usize },
    Petersen,
}

impl GeneratorSpec {
    /// Builds a spec from loose CLI-style parameters.
    pub fn from_parts(
        family: &str,
        n: Option<usize>,
        d: Option<usize>,
        q: Option<u64>,
        seed: u64,
    ) -> Result<Self, GeneratorError> {
        let need_n = || n.ok_or(GeneratorError::MissingParameter("n"));
        Ok(match family {
            "random_regular" => GeneratorSpec::RandomRegular {
                n: need_n()?,
                d: d.ok_or(GeneratorError::MissingParameter("d"))?,
                seed,
            },
            "paley" => GeneratorSpec::Paley {
                q: q.or(n.map(|n| n as u64))
                    .ok_or(GeneratorError::MissingParameter("q"))?,
            },
            "complete" => GeneratorSpec::Complete { n: need_n()? },
            "cycle" => GeneratorSpec::Cycle { n: need_n()? },
            "petersen" => GeneratorSpec::Petersen,
            other => return Err(GeneratorError::UnknownFamily(other.to_string())),
        })
    }

    pub fn generate(&self) -> Result<Graph, GeneratorError> {
        match *self {
            GeneratorSpec::RandomRegular { n, d, seed } => gen_random_regular(n, d, seed),
            GeneratorSpec::Paley { q } => gen_paley(q),
            GeneratorSpec::Complete { n } => gen_complete(n),
            GeneratorSpec::Cycle { n } => gen_cycle(n),
            GeneratorSpec::Petersen => Ok(gen_petersen()),
        }
    }

    pub fn label(&self) -> String {
        match self {
            GeneratorSpec::RandomRegular { n, d, seed } => {
                format!("random_regular(n={n},d={d},seed={seed})")
            }
            GeneratorSpec::Paley { q } => format!("paley(q={q})"),
            GeneratorSpec::Complete { n } => format!("complete(n={n})"),
            GeneratorSpec::Cycle { n } => format!("cycle(n={n})"),
            GeneratorSpec::Petersen => "petersen".to_string(),
        }
    }
}

/// Random simple d-regular graph on `n` vertices.
///
/// Stubs are paired one pair at a time: the last remaining stub is matched
/// with a uniformly drawn other stub, and the pair is kept only if it joins
/// distinct, not yet adjacent vertices. After a long run of rejections the
/// last stub is checked against every remaining stub; if none is admissible
/// the whole pairing restarts. Deterministic in `seed`.
pub fn gen_random_regular(n: usize, d: usize, seed: u64) -> Result<Graph, GeneratorError> {
    if (n * d) % 2 == 1 {
        return Err(GeneratorError::OddDegreeSum { n, d });
    }
    if d == 0 || d >= n {
        return Err(GeneratorError::DegreeTooLarge { n, d });
    }
    if n > u32::MAX as usize {
        return Err(GeneratorError::TooSmall {
            family: "random_regular",
            min: 0,
            n,
        });
    }
    let mut rng = rng_from_seed(seed);
    let mut stubs: Vec<u32> = Vec::with_capacity(n * d);
    // Flat adjacency: v's partial run is adj[v*d..v*d+deg[v]], unsorted until the end.
    let mut adj = vec![0u32; n * d];
    let mut deg = vec![0u32; n];

    'attempt: for _ in 0..RESTART_BUDGET {
        stubs.clear();
        for v in 0..n as u32 {
            stubs.extend(std::iter::repeat_n(v, d));
        }
        deg.iter_mut().for_each(|x| *x = 0);

        let mut misses = 0usize;
        while let Some(&u) = stubs.last() {
            let last = stubs.len() - 1;
            let j = bounded(&mut rng, last as u64) as usize;
            let v = stubs[j];
            if u != v && !adjacent(&adj, &deg, d, u, v) {
                push_edge(&mut adj, &mut deg, d, u, v);
                push_edge(&mut adj, &mut deg, d, v, u);
                stubs.pop();
                stubs.swap_remove(j);
                misses = 0;
            } else {
                misses += 1;
                if misses > 64 + stubs.len() {
                    if !has_partner(u, &stubs, &adj, &deg, d) {
                        continue 'attempt;
                    }
                    misses = 0;
                }
            }
        }
        for run in adj.chunks_exact_mut(d) {
            run.sort_unstable();
        }
        return Ok(Graph::from_trusted_runs(n, d, adj));
    }
    Err(GeneratorError::RetryLimitExceeded(RESTART_BUDGET))
}

fn run_of<'a>(adj: &'a [u32], deg: &[u32], d: usize, v: u32) -> &'a [u32] {
    let start = v as usize * d;
    &adj[start..start + deg[v as usize] as usize]
}

/// Scans the shorter of the two (unsorted) partial runs.
fn adjacent(adj: &[u32], deg: &[u32], d: usize, u: u32, v: u32) -> bool {
    let (a, b) = if deg[u as usize] <= deg[v as usize] { (u, v) } else { (v, u) };
    run_of(adj, deg, d, a).contains(&b)
}

fn push_edge(adj: &mut [u32], deg: &mut [u32], d: usize, v: u32, w: u32) {
    adj[v as usize * d + deg[v as usize] as usize] = w;
    deg[v as usize] += 1;
}

/// Whether some remaining stub could still be paired with `u`; if not, the
/// current pairing can never complete.
fn has_partner(u: u32, stubs: &[u32], adj: &[u32], deg: &[u32], d: usize) -> bool {
    stubs.iter().any(|&v| v != u && !adjacent(adj, deg, d, u, v))
}

/// Deterministic trial division.
pub fn is_prime(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    if q % 2 == 0 {
        return q == 2;
    }
    let mut f = 3u64;
    while f * f <= q {
        if q % f == 0 {
            return false;
        }
        f += 2;
    }
    true
}

/// Paley graph on `Z_q`: `u ~ v` iff `u - v` is a nonzero square mod `q`.
pub fn gen_paley(q: u64) -> Result<Graph, GeneratorError> {
    if !is_prime(q) {
        return Err(GeneratorError::NotPrime(q));
    }
    if q % 4 != 1 {
        return Err(GeneratorError::WrongResidueClass(q));
    }
    let n = q as usize;
    let mut square = vec![false; n];
    for x in 1..q {
        square[((x * x) % q) as usize] = true;
    }
    let d = (n - 1) / 2;
    let mut neighbors = Vec::with_capacity(n * d);
    for u in 0..n {
        for v in 0..n {
            if u != v && square[(u + n - v) % n] {
                neighbors.push(v as u32);
            }
        }
    }
    Ok(Graph::from_sorted_runs(n, d, neighbors)?)
}

pub fn gen_complete(n: usize) -> Result<Graph, GeneratorError> {
    if n < 2 {
        return Err(GeneratorError::TooSmall {
            family: "complete",
            min: 2,
            n,
        });
    }
    let d = n - 1;
    let mut neighbors = Vec::with_capacity(n * d);
    for u in 0..n {
        neighbors.extend((0..n as u32).filter(|&v| v as usize != u));
    }
    Ok(Graph::from_sorted_runs(n, d, neighbors)?)
}

pub fn gen_cycle(n: usize) -> Result<Graph, GeneratorError> {
    if n < 3 {
        return Err(GeneratorError::TooSmall {
            family: "cycle",
            min: 3,
            n,
        });
    }
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Ok(build_graph(n, &edges)?)
}

/// The Petersen graph: outer 5-cycle, spokes, inner pentagram.
pub fn gen_petersen() -> Graph {
    const EDGES: [(usize, usize); 15] = [
        (0, 1),
        (1, 2),
        (2, 3),
        (3, 4),
        (4, 0),
        (0, 5),
        (1, 6),
        (2, 7),
        (3, 8),
        (4, 9),
        (5, 7),
        (7, 9),
        (9, 6),
        (6, 8),
        (8, 5),
    ];
    build_graph(10, &EDGES).expect("petersen edge list is valid")
}
