//! Text edge-list format: a header line `n d m`, then `m` lines `u v` with
//! `u < v`, sorted lexicographically.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{build_graph, Graph, GraphError};

pub fn write_graph<W: Write>(g: &Graph, w: W) -> Result<(), GraphError> {
    let mut w = BufWriter::new(w);
    writeln!(w, "{} {} {}", g.n(), g.d(), g.m())?;
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_graph_file(g: &Graph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    write_graph(g, File::create(path)?)
}

fn format_err(line: usize, msg: impl Into<String>) -> GraphError {
    GraphError::Format {
        line,
        msg: msg.into(),
    }
}

fn parse_fields<const K: usize>(line_no: usize, line: &str) -> Result<[usize; K], GraphError> {
    let mut out = [0usize; K];
    let mut fields = line.split_whitespace();
    for slot in out.iter_mut() {
        let tok = fields
            .next()
            .ok_or_else(|| format_err(line_no, format!("expected {K} fields")))?;
        *slot = tok
            .parse()
            .map_err(|_| format_err(line_no, format!("not an integer: {tok:?}")))?;
    }
    if fields.next().is_some() {
        return Err(format_err(line_no, format!("expected {K} fields")));
    }
    Ok(out)
}

/// Reads the edge-list format. Structural violations (loops, duplicates,
/// irregular degrees) surface as the same errors `build_graph` returns;
/// header mismatches and unsorted or non-canonical lines are `Format` errors.
pub fn read_graph<R: Read>(r: R) -> Result<Graph, GraphError> {
    let mut lines = BufReader::new(r).lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| format_err(1, "missing header"))?;
    let [n, d, m] = parse_fields::<3>(1, &header?)?;
    if (n * d) % 2 == 1 {
        return Err(GraphError::OddDegreeSum { n, d });
    }
    if n * d / 2 != m {
        return Err(format_err(1, format!("m = {m} but n*d/2 = {}", n * d / 2)));
    }

    let mut edges = Vec::with_capacity(m);
    let mut prev: Option<(usize, usize)> = None;
    for (idx, line) in lines {
        let line = line?;
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let [u, v] = parse_fields::<2>(line_no, &line)?;
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        if u > v {
            return Err(format_err(line_no, format!("edge ({u}, {v}) not written as u < v")));
        }
        if let Some(p) = prev {
            if p == (u, v) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            if p > (u, v) {
                return Err(format_err(line_no, "edges not sorted"));
            }
        }
        prev = Some((u, v));
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(format_err(
            edges.len() + 1,
            format!("header promised {m} edges, found {}", edges.len()),
        ));
    }
    let g = build_graph(n, &edges)?;
    if g.d() != d {
        return Err(format_err(1, format!("header d = {d} but edges give d = {}", g.d())));
    }
    Ok(g)
}

pub fn read_graph_file(path: impl AsRef<Path>) -> Result<Graph, GraphError> {
    read_graph(File::open(path)?)
}
