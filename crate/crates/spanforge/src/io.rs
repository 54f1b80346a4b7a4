//! Edge-list text format.
//!
//! ```text
//! # 4 3          optional header: vertex and edge counts
//! 0 1 1.5        u v w, whitespace separated
//! 1 2 2          '#' starts a comment anywhere on a line
//! ```
//!
//! With a header, ids inside `0..n` are kept as they are, so isolated
//! vertices survive a round trip. Otherwise the distinct ids are sorted and
//! renumbered densely; the original ids are kept as labels. Weights are
//! written in the shortest form that parses back to the same `f64`.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use spanforge_core::{EdgeId, GraphError, WeightedGraph};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Lines of an edge-list file before normalization.
#[derive(Clone, Debug, PartialEq)]
pub struct RawEdgeList {
    pub header: Option<(usize, usize)>,
    pub edges: Vec<(i64, i64, f64)>,
}

/// A loaded graph with the ids it was written with.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedGraph {
    pub graph: WeightedGraph,
    /// Original id of every vertex.
    pub labels: Vec<i64>,
}

impl LoadedGraph {
    pub fn index_of(&self) -> BTreeMap<i64, usize> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i))
            .collect()
    }
}

fn parse_header(body: &str) -> Option<(usize, usize)> {
    let mut it = body.split_whitespace();
    let n = it.next()?.parse().ok()?;
    let m = it.next()?.parse().ok()?;
    it.next().is_none().then_some((n, m))
}

pub fn read_raw<R: BufRead>(reader: R) -> Result<RawEdgeList, IoError> {
    let mut header = None;
    let mut edges = Vec::new();
    let mut seen_content = false;
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let (content, comment) = match line.split_once('#') {
            Some((c, rest)) => (c, Some(rest)),
            None => (line.as_str(), None),
        };
        if content.trim().is_empty() {
            if !seen_content && header.is_none() {
                header = comment.and_then(parse_header);
            }
            continue;
        }
        seen_content = true;
        let fields: Vec<&str> = content.split_whitespace().collect();
        let bad = |message: String| IoError::Parse {
            line: lineno,
            message,
        };
        if fields.len() != 3 {
            return Err(bad(format!(
                "expected `u v w`, found {} fields",
                fields.len()
            )));
        }
        let u: i64 = fields[0]
            .parse()
            .map_err(|_| bad(format!("invalid vertex id {:?}", fields[0])))?;
        let v: i64 = fields[1]
            .parse()
            .map_err(|_| bad(format!("invalid vertex id {:?}", fields[1])))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| bad(format!("invalid weight {:?}", fields[2])))?;
        if !w.is_finite() {
            return Err(bad(format!("weight {w} is not finite")));
        }
        if w < 0.0 {
            return Err(bad(format!("negative weight {w}")));
        }
        edges.push((u, v, w));
    }
    Ok(RawEdgeList { header, edges })
}

pub fn load_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph, IoError> {
    normalize(read_raw(reader)?)
}

pub fn normalize(raw: RawEdgeList) -> Result<LoadedGraph, IoError> {
    let in_range = |n: usize| {
        raw.edges
            .iter()
            .all(|&(u, v, _)| u >= 0 && v >= 0 && (u as u64) < n as u64 && (v as u64) < n as u64)
    };
    let (n, labels, index): (usize, Vec<i64>, BTreeMap<i64, usize>) = match raw.header {
        Some((n, _)) if n > 0 && in_range(n) => {
            let labels: Vec<i64> = (0..n as i64).collect();
            (n, labels, BTreeMap::new())
        }
        _ => {
            let mut ids: Vec<i64> = raw.edges.iter().flat_map(|&(u, v, _)| [u, v]).collect();
            ids.sort_unstable();
            ids.dedup();
            let index = ids.iter().enumerate().map(|(i, &l)| (l, i)).collect();
            (ids.len(), ids, index)
        }
    };
    let lookup = |x: i64| {
        if index.is_empty() {
            x as usize
        } else {
            index[&x]
        }
    };
    let graph = WeightedGraph::from_edges(
        n,
        raw.edges.iter().map(|&(u, v, w)| (lookup(u), lookup(v), w)),
    )?;
    Ok(LoadedGraph { graph, labels })
}

/// Writes `# n m` followed by one line per edge.
pub fn write_edge_list<W: Write>(g: &WeightedGraph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "# {} {}", g.n(), g.m())?;
    for e in g.edges() {
        writeln!(out, "{} {} {}", e.u, e.v, e.w)?;
    }
    out.flush()
}

/// Writes the listed edges of `g` using `labels` as vertex ids.
pub fn write_spanner<W: Write>(
    g: &WeightedGraph,
    labels: &[i64],
    edges: &[EdgeId],
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "# {} {}", g.n(), edges.len())?;
    for &id in edges {
        let e = g.edge(id);
        writeln!(out, "{} {} {}", labels[e.u], labels[e.v], e.w)?;
    }
    out.flush()
}

#[derive(Debug, Error, PartialEq)]
pub enum MatchError {
    #[error("spanner vertex {0} does not occur in the graph")]
    UnknownVertex(i64),
    #[error("spanner edge ({0}, {1}) is not an edge of the graph")]
    UnknownEdge(i64, i64),
}

/// Resolves spanner lines against a loaded graph by endpoint labels.
pub fn match_spanner(
    graph: &LoadedGraph,
    spanner: &RawEdgeList,
) -> Result<Vec<EdgeId>, MatchError> {
    let index = graph.index_of();
    let mut ids = Vec::with_capacity(spanner.edges.len());
    for &(u, v, _) in &spanner.edges {
        if u == v {
            continue;
        }
        let a = *index.get(&u).ok_or(MatchError::UnknownVertex(u))?;
        let b = *index.get(&v).ok_or(MatchError::UnknownVertex(v))?;
        ids.push(
            graph
                .graph
                .find_edge(a, b)
                .ok_or(MatchError::UnknownEdge(u, v))?,
        );
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str) -> Result<LoadedGraph, IoError> {
        load_edge_list(s.as_bytes())
    }

    #[test]
    fn simple_path() {
        let g = load("0 1 1.0\n1 2 2.0").unwrap().graph;
        assert_eq!((g.n(), g.m()), (3, 2));
    }

    #[test]
    fn self_loop_only() {
        let g = load("0 0 1.0").unwrap().graph;
        assert_eq!((g.n(), g.m()), (1, 0));
    }

    #[test]
    fn parallel_edges_collapse() {
        let g = load("0 1 5\n0 1 2").unwrap().graph;
        assert_eq!(g.m(), 1);
        assert_eq!(g.edges()[0].w, 2.0);
    }

    #[test]
    fn non_contiguous_ids_are_remapped() {
        let l = load("10 30 1\n30 -4 2 # trailing comment").unwrap();
        assert_eq!(l.labels, vec![-4, 10, 30]);
        assert_eq!(l.graph.n(), 3);
    }

    #[test]
    fn header_keeps_isolated_vertices() {
        let l = load("# 5 1\n0 1 1\n").unwrap();
        assert_eq!(l.graph.n(), 5);
        let empty = load("# 3 0\n").unwrap();
        assert_eq!((empty.graph.n(), empty.graph.m()), (3, 0));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match load("# c\n0 1 1\n0 x 1\n") {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(load("0 1\n"), Err(IoError::Parse { line: 1, .. })));
        assert!(matches!(
            load("0 1 -2\n"),
            Err(IoError::Parse { line: 1, .. })
        ));
        assert!(matches!(
            load("0 1 inf\n"),
            Err(IoError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn empty_graph_writes_header_only() {
        let g = WeightedGraph::empty(3).unwrap();
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "# 3 0\n");
    }

    #[test]
    fn spanner_matching() {
        let l = load("5 6 1\n6 7 1\n").unwrap();
        let raw = read_raw("6 5 1\n".as_bytes()).unwrap();
        assert_eq!(match_spanner(&l, &raw).unwrap().len(), 1);
        let bad = read_raw("5 7 1\n".as_bytes()).unwrap();
        assert_eq!(match_spanner(&l, &bad), Err(MatchError::UnknownEdge(5, 7)));
        let missing = read_raw("5 9 1\n".as_bytes()).unwrap();
        assert_eq!(
            match_spanner(&l, &missing),
            Err(MatchError::UnknownVertex(9))
        );
    }
}
