//! Library output checked against independent references: brute-force
//! enumeration, a plain DFS component finder, and values computed outside the
//! crate at high precision.

use percolab::census::{census, census_mask, count_trees_tk};
use percolab::generators::{gen_complete, gen_cycle, gen_paley, gen_petersen, gen_random_regular};
use percolab::graph::{build_graph, read_graph, write_graph, Graph};
use percolab::percolation::{percolate_m, percolate_p, read_mask, write_mask, EdgeMask};
use percolab::spectral::{estimate_lambda, DEFAULT_MAX_ITER, DEFAULT_TOL};
use percolab::theory::{self, TheoryProfile};
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

// (alpha, alpha_bar, giant fraction) from a 40-digit root solve.
const ALPHA_BAR: [(f64, f64, f64); 4] = [
    (1.5, 0.62578253420128292, 0.58281164386581139),
    (2.0, 0.40637573995995991, 0.79681213002002005),
    (3.0, 0.17856062787792111, 0.94047979070735963),
    (5.0, 0.034885768255723696, 0.99302284634885526),
];

// (alpha, gamma, zeta).
const GAMMA_ZETA: [(f64, f64, f64); 5] = [
    (0.1, 7.0129254649702278, 0.71296922018851464),
    (0.5, 0.19314718055994531, 5.1773988991241797),
    (0.9, 0.0029780642543479437, 186.54921724554803),
    (2.0, 0.076713204860013673, 3.2588913532709295),
    (4.0, 0.20171320486001367, 0.619691705789655),
];

#[test]
fn alpha_bar_matches_reference() {
    for (alpha, bar, frac) in ALPHA_BAR {
        assert!(close(theory::solve_alpha_bar(alpha).unwrap(), bar, 1e-14), "alpha {alpha}");
        assert!(close(theory::giant_fraction(alpha).unwrap(), frac, 1e-14), "alpha {alpha}");
    }
    assert!(close(theory::solve_alpha_bar(1.1).unwrap(), 0.90625244200500942, 1e-13));
}

#[test]
fn gamma_and_zeta_match_reference() {
    for (alpha, gamma, zeta) in GAMMA_ZETA {
        assert!(close(theory::gamma_of(alpha).unwrap(), gamma, 1e-14 * gamma.max(1.0)), "alpha {alpha}");
        assert!(close(theory::zeta_of(alpha).unwrap(), zeta, 1e-12 * zeta), "alpha {alpha}");
    }
}

#[test]
fn size_windows_match_reference() {
    let cases = [
        (100_000, 2.0, 75.0387464973, 7671.320486),
        (50_000, 2.0, 70.5209637907, 3835.660243),
        (50_000, 0.5, 112.036616357, 9657.359028),
        (100_000, 0.5, 119.214015256, 19314.718056),
    ];
    for (n, alpha, lo, hi) in cases {
        let (a, b) = theory::forbidden_interval(n, alpha).unwrap();
        assert!(close(a, lo, 1e-8) && close(b, hi, 1e-5), "n {n} alpha {alpha}: {a} {b}");
    }
    let (lo, hi) = theory::largest_tree_window(100_000, 2.0, 10.0).unwrap();
    assert!(close(0.5 * (lo + hi), 17.6118621971, 1e-9));
    assert!(close(hi - lo, 20.0, 1e-12));
}

#[test]
fn giant_edge_count_identity() {
    // alpha (1/2 - abar^2/(2 alpha^2)) / (1 - abar/alpha) == (alpha + abar)/2.
    for i in 0..200 {
        let alpha = 1.01 + 0.05 * i as f64;
        let per_host_vertex = theory::giant_edges_per_vertex_of_host(alpha).unwrap();
        let frac = theory::giant_fraction(alpha).unwrap();
        let ratio = theory::giant_edge_ratio(alpha).unwrap();
        assert!(close(per_host_vertex / frac, ratio, 1e-12 * ratio), "alpha {alpha}");
    }
}

#[test]
fn f_below_and_above_criticality() {
    for alpha in [0.05, 0.3, 0.7, 0.95] {
        assert_eq!(theory::f_closed(alpha).unwrap(), 1.0);
        let s = theory::f_series(alpha, theory::DEFAULT_SERIES_EPS).unwrap();
        assert!(close(s, 1.0, 1e-9), "alpha {alpha}: {s}");
    }
    for (alpha, bar, _) in ALPHA_BAR {
        assert!(close(theory::f_closed(alpha).unwrap(), bar / alpha, 1e-14));
    }
}

#[test]
fn theory_rejects_bad_alpha() {
    assert!(TheoryProfile::new(1.0, None, None).is_err());
    assert!(TheoryProfile::new(-1.0, None, None).is_err());
    assert!(TheoryProfile::new(f64::NAN, None, None).is_err());
    assert!(theory::solve_alpha_bar(0.5).is_err());
    let p = TheoryProfile::new(2.0, Some(100_000), Some(10.0)).unwrap();
    assert!(p.alpha_bar_residual.unwrap() < 1e-12 && p.gamma_residual < 1e-12);
}

#[test]
fn lambda_of_known_graphs() {
    let cases: [(Graph, f64); 5] = [
        (gen_paley(13).unwrap(), 2.3027756377319952),
        (gen_paley(101).unwrap(), 5.524937810560454),
        (gen_complete(5).unwrap(), 1.0),
        (gen_cycle(5).unwrap(), 1.618033988749895),
        (gen_petersen(), 2.0),
    ];
    for (g, lambda) in cases {
        let est = estimate_lambda(&g, DEFAULT_TOL, DEFAULT_MAX_ITER).unwrap();
        assert!(close(est.lambda, lambda, 1e-9), "n {}: {}", g.n(), est.lambda);
    }
}

fn brute_force_tk(g: &Graph, k: usize) -> u64 {
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut count = 0;
    let mut pick = Vec::new();
    subsets(&edges, 0, k - 1, k, &mut pick, &mut count);
    count
}

fn subsets(edges: &[(usize, usize)], start: usize, want: usize, k: usize, pick: &mut Vec<usize>, count: &mut u64) {
    if pick.len() == want {
        let mut verts: Vec<usize> = pick.iter().flat_map(|&e| [edges[e].0, edges[e].1]).collect();
        verts.sort_unstable();
        verts.dedup();
        if verts.len() == k && acyclic(edges, pick, &verts) {
            *count += 1;
        }
        return;
    }
    for e in start..edges.len() {
        pick.push(e);
        subsets(edges, e + 1, want, k, pick, count);
        pick.pop();
    }
}

fn acyclic(edges: &[(usize, usize)], pick: &[usize], verts: &[usize]) -> bool {
    let idx = |v: usize| verts.binary_search(&v).unwrap();
    let mut parent: Vec<usize> = (0..verts.len()).collect();
    fn root(p: &[usize], mut v: usize) -> usize {
        while p[v] != v {
            v = p[v];
        }
        v
    }
    for &e in pick {
        let (a, b) = (root(&parent, idx(edges[e].0)), root(&parent, idx(edges[e].1)));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

#[test]
fn tree_counts_match_brute_force_on_random_graphs() {
    for (n, d, seed) in [(8, 3, 1), (10, 3, 2), (10, 4, 3), (9, 4, 4), (12, 3, 5)] {
        let g = gen_random_regular(n, d, seed).unwrap();
        for k in 2..=5 {
            assert_eq!(count_trees_tk(&g, k).unwrap(), brute_force_tk(&g, k), "n {n} d {d} k {k}");
        }
    }
}

#[test]
fn cayley_on_complete_graphs() {
    let binom = |n: u64, k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
    for n in 2..=9u64 {
        let g = gen_complete(n as usize).unwrap();
        for k in 2..=6u64.min(n) {
            assert_eq!(count_trees_tk(&g, k as usize).unwrap(), binom(n, k) * k.pow(k as u32 - 2));
        }
    }
}

fn dfs_components(g: &Graph, mask: &EdgeMask) -> Vec<(usize, usize)> {
    let mut adj = vec![Vec::new(); g.n()];
    for e in mask.iter_ones() {
        let (u, v) = g.edge(e);
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for s in 0..g.n() {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let (mut size, mut deg) = (0, 0);
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            size += 1;
            deg += adj[v].len();
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out.push((size, deg / 2));
    }
    out.sort_unstable();
    out
}

fn small_regular() -> impl Strategy<Value = Graph> {
    (3usize..=12, 1usize..12, any::<u64>())
        .prop_filter("d < n with even degree sum", |&(n, d, _)| d < n && n * d % 2 == 0)
        .prop_map(|(n, d, seed)| gen_random_regular(n, d, seed).unwrap())
}

proptest! {
    #[test]
    fn census_matches_dfs(g in small_regular(), bits in proptest::collection::vec(any::<bool>(), 66)) {
        let mut mask = EdgeMask::empty(g.m());
        for e in 0..g.m() {
            if bits[e] {
                mask.set(e);
            }
        }
        let c = census_mask(&g, &mask);
        let mut records: Vec<(usize, usize)> = c.records.iter().map(|r| (r.size, r.edges)).collect();
        records.sort_unstable();
        let slow = dfs_components(&g, &mask);
        prop_assert_eq!(&records, &slow);
        prop_assert_eq!(c.giant_size, slow.iter().map(|r| r.0).max().unwrap());
        prop_assert_eq!(c.c.iter().map(|(_, v)| v).sum::<u64>(), g.n() as u64);
        for (k, t) in c.t.iter() {
            prop_assert!(t <= c.c.get(k));
            prop_assert_eq!(t, k as u64 * c.n_trees.get(k));
        }
    }

    #[test]
    fn edges_round_trip_through_build_graph(g in small_regular()) {
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let rebuilt = build_graph(g.n(), &edges).unwrap();
        prop_assert_eq!(rebuilt.fingerprint(), g.fingerprint());
        for (e, &(u, v)) in edges.iter().enumerate() {
            prop_assert!(u < v);
            prop_assert_eq!(g.edge_id(u, v), Some(e));
            prop_assert_eq!(g.edge_id(v, u), Some(e));
        }
    }
}

#[test]
fn graph_and_mask_files_round_trip() {
    let g = gen_random_regular(500, 8, 3).unwrap();
    let mut buf = Vec::new();
    write_graph(&g, &mut buf).unwrap();
    let back = read_graph(buf.as_slice()).unwrap();
    assert_eq!(back.fingerprint(), g.fingerprint());

    for sample in [percolate_p(&g, 0.2, 9).unwrap(), percolate_m(&g, 700, 9).unwrap()] {
        let mut dump = Vec::new();
        write_mask(&sample, &mut dump).unwrap();
        let restored = read_mask(&g, dump.as_slice()).unwrap();
        assert_eq!(restored.mask, sample.mask);
        assert_eq!(restored.seed, sample.seed);
        assert_eq!(census(&g, &restored).unwrap(), census(&g, &sample).unwrap());
    }
}

#[test]
fn census_rejects_sample_from_other_graph() {
    let g = gen_random_regular(100, 4, 1).unwrap();
    let h = gen_random_regular(100, 4, 2).unwrap();
    let sample = percolate_p(&h, 0.5, 0).unwrap();
    assert!(census(&g, &sample).is_err());
}
