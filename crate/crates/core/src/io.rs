//! Text formats. All indices are 1-based on disk.
//!
//! ```text
//! # fine or coarse graph
//! graph <N> <E>
//! <edge_id> <tail> <head>      (edge ids 1..E in order)
//!
//! aggregates <N^H> <N^h>
//! <n>: <p1> <p2> ...           (one line per coarse node)
//!
//! matrix <rows> <cols>
//! <row> <col> <value>          (value is `a` or `a/b`)
//! ```
//!
//! `#` starts a comment; blank lines are ignored.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::aggregation::Aggregation;
use crate::graph::Digraph;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based; 0 when the problem is the file as a whole.
    pub line: usize,
    pub message: String,
}

fn err<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((k + 1, line))
    })
}

fn parse_index(line: usize, token: &str, what: &str, max: usize) -> Result<usize, ParseError> {
    match token.parse::<usize>() {
        Ok(v) if (1..=max).contains(&v) => Ok(v - 1),
        Ok(v) => err(line, format!("{what} {v} outside 1..={max}")),
        Err(_) => err(line, format!("invalid {what} `{token}`")),
    }
}

fn parse_count(line: usize, token: Option<&str>, what: &str) -> Result<usize, ParseError> {
    match token.map(str::parse::<usize>) {
        Some(Ok(v)) => Ok(v),
        _ => err(line, format!("missing or invalid {what}")),
    }
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    keyword: &str,
) -> Result<(usize, usize, usize), ParseError> {
    let Some((line, text)) = lines.next() else {
        return err(0, format!("missing `{keyword}` header"));
    };
    let mut tokens = text.split_whitespace();
    if tokens.next() != Some(keyword) {
        return err(line, format!("expected `{keyword} <a> <b>` header"));
    }
    let a = parse_count(line, tokens.next(), "first dimension")?;
    let b = parse_count(line, tokens.next(), "second dimension")?;
    if tokens.next().is_some() {
        return err(line, "trailing tokens after header");
    }
    Ok((line, a, b))
}

pub fn parse_graph(text: &str) -> Result<Digraph, ParseError> {
    let mut lines = content_lines(text);
    let (hline, nodes, edge_count) = header(&mut lines, "graph")?;
    if nodes == 0 {
        return err(hline, "graph must have at least one node");
    }
    let mut edges = Vec::with_capacity(edge_count);
    for (line, text) in lines {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 3 {
            return err(line, "expected `<edge_id> <tail> <head>`");
        }
        let id = parse_index(line, tokens[0], "edge id", usize::MAX)?;
        if id != edges.len() {
            return err(
                line,
                format!(
                    "edge id {} out of sequence, expected {}",
                    id + 1,
                    edges.len() + 1
                ),
            );
        }
        if id >= edge_count {
            return err(line, format!("more than {edge_count} edges"));
        }
        let tail = parse_index(line, tokens[1], "node", nodes)?;
        let head = parse_index(line, tokens[2], "node", nodes)?;
        if tail == head {
            return err(line, format!("self-loop on node {}", tail + 1));
        }
        edges.push((tail, head));
    }
    if edges.len() != edge_count {
        return err(
            0,
            format!("header declares {edge_count} edges, found {}", edges.len()),
        );
    }
    Ok(Digraph::new(nodes, edges).expect("validated above"))
}

pub fn write_graph(g: &Digraph) -> String {
    let mut out = format!("graph {} {}\n", g.node_count(), g.edge_count());
    for (id, e) in g.edges().iter().enumerate() {
        writeln!(out, "{} {} {}", id + 1, e.tail + 1, e.head + 1).unwrap();
    }
    out
}

/// Returns the aggregate sets (0-based) and the fine node count.
pub fn parse_aggregates(text: &str) -> Result<(Vec<BTreeSet<usize>>, usize), ParseError> {
    let mut lines = content_lines(text);
    let (hline, coarse, fine) = header(&mut lines, "aggregates")?;
    if coarse == 0 {
        return err(hline, "at least one aggregate is required");
    }
    let mut sets: Vec<Option<BTreeSet<usize>>> = vec![None; coarse];
    for (line, text) in lines {
        let Some((label, members)) = text.split_once(':') else {
            return err(line, "expected `<n>: <p1> <p2> ...`");
        };
        let n = parse_index(line, label.trim(), "aggregate", coarse)?;
        if sets[n].is_some() {
            return err(line, format!("aggregate {} listed twice", n + 1));
        }
        let mut set = BTreeSet::new();
        for token in members.split_whitespace() {
            let p = parse_index(line, token, "fine node", fine)?;
            if !set.insert(p) {
                return err(line, format!("fine node {} repeated", p + 1));
            }
        }
        sets[n] = Some(set);
    }
    let mut out = Vec::with_capacity(coarse);
    for (n, set) in sets.into_iter().enumerate() {
        match set {
            Some(set) => out.push(set),
            None => return err(0, format!("aggregate {} missing", n + 1)),
        }
    }
    Ok((out, fine))
}

pub fn write_aggregates(agg: &Aggregation) -> String {
    let mut out = format!(
        "aggregates {} {}\n",
        agg.coarse_node_count(),
        agg.fine_node_count()
    );
    for (n, set) in agg.sets().iter().enumerate() {
        write!(out, "{}:", n + 1).unwrap();
        for p in set {
            write!(out, " {}", p + 1).unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triplets {
    pub rows: usize,
    pub cols: usize,
    /// 0-based `(row, col, value)` in file order.
    pub entries: Vec<(usize, usize, Rational)>,
}

pub fn parse_matrix(text: &str) -> Result<Triplets, ParseError> {
    let mut lines = content_lines(text);
    let (_, rows, cols) = header(&mut lines, "matrix")?;
    let mut entries = Vec::new();
    for (line, text) in lines {
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 3 {
            return err(line, "expected `<row> <col> <value>`");
        }
        let r = parse_index(line, tokens[0], "row", rows)?;
        let c = parse_index(line, tokens[1], "column", cols)?;
        let v = match parse_rational(tokens[2]) {
            Ok(v) => v,
            Err(e) => return err(line, e.to_string()),
        };
        entries.push((r, c, v));
    }
    Ok(Triplets {
        rows,
        cols,
        entries,
    })
}

/// Row-major triplets of the nonzeros; zero rows simply have no lines.
pub fn write_matrix(m: &SparseMatrix) -> String {
    let mut out = format!("matrix {} {}\n", m.nrows(), m.ncols());
    for (i, j, v) in m.triplets() {
        writeln!(out, "{} {} {}", i + 1, j + 1, format_rational(v)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregation::build_reciprocal;
    use crate::rational::frac;

    #[test]
    fn graph_round_trip_with_comments() {
        let text = "# path\ngraph 3 2\n1 1 2\n\n2 2 3  # last\n";
        let g = parse_graph(text).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.edge(1).tail, 1);
        assert_eq!(write_graph(&g), "graph 3 2\n1 1 2\n2 2 3\n");
    }

    #[test]
    fn graph_errors() {
        let cases = [
            ("", 0),
            ("matrix 2 1\n", 1),
            ("graph 2 1\n2 1 2\n", 2),
            ("graph 2 1\n1 1 3\n", 2),
            ("graph 2 1\n1 2 2\n", 2),
            ("graph 2 2\n1 1 2\n", 0),
            ("graph 2 1\n1 1 2\n2 2 1\n", 3),
            ("graph 0 0\n", 1),
            ("graph 2 1\n1 1\n", 2),
        ];
        for (text, line) in cases {
            let e = parse_graph(text).unwrap_err();
            assert_eq!(e.line, line, "{text:?}: {e}");
        }
    }

    #[test]
    fn aggregates_round_trip() {
        let text = "aggregates 2 4\n2: 4 3 2\n1: 1 2 3\n";
        let (sets, fine) = parse_aggregates(text).unwrap();
        assert_eq!(fine, 4);
        let agg = build_reciprocal(sets, fine).unwrap();
        assert_eq!(
            write_aggregates(&agg),
            "aggregates 2 4\n1: 1 2 3\n2: 2 3 4\n"
        );
    }

    #[test]
    fn aggregates_errors() {
        assert_eq!(
            parse_aggregates("aggregates 2 2\n1: 1\n").unwrap_err().line,
            0
        );
        assert_eq!(
            parse_aggregates("aggregates 1 2\n1: 1 1\n")
                .unwrap_err()
                .line,
            2
        );
        assert_eq!(
            parse_aggregates("aggregates 1 2\n1: 3\n").unwrap_err().line,
            2
        );
        assert_eq!(
            parse_aggregates("aggregates 1 2\n1 2\n").unwrap_err().line,
            2
        );
        assert_eq!(
            parse_aggregates("aggregates 1 2\n1: 1\n1: 2\n")
                .unwrap_err()
                .line,
            3
        );
    }

    #[test]
    fn matrix_round_trip() {
        let t = parse_matrix("matrix 3 1\n1 1 1/2\n3 1 -2/4\n").unwrap();
        assert_eq!(t.entries, vec![(0, 0, frac(1, 2)), (2, 0, frac(-1, 2))]);
        let mut m = SparseMatrix::zeros(3, 1);
        for (r, c, v) in t.entries {
            m.set(r, c, v);
        }
        assert_eq!(write_matrix(&m), "matrix 3 1\n1 1 1/2\n3 1 -1/2\n");
    }

    #[test]
    fn matrix_rejects_floats() {
        let e = parse_matrix("matrix 1 1\n1 1 0.5\n").unwrap_err();
        assert_eq!(e.line, 2);
        assert!(e.message.contains("malformed"));
    }
}
