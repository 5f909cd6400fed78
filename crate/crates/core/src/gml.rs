//! Reader and writer for the GML subset instances are stored in.
//!
//! The subset is `graph [` followed by `node [ id <int> ]` records, then
//! `edge [ source <int> target <int> weight <float> ]` records, then `]`.
//! Tokens may be split across lines arbitrarily; ids must be dense in
//! `0..n-1`; every edge must carry an explicit positive weight. Parse errors
//! name the offending line.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Render `graph` in the GML subset. Weights are written with enough digits
/// to round-trip exactly.
pub fn write_gml(graph: &WeightedGraph) -> String {
    let mut out = String::new();
    out.push_str("graph [\n");
    for id in 0..graph.n() {
        let _ = write!(out, "  node [\n    id {id}\n  ]\n");
    }
    for &(i, j, w) in graph.edges() {
        let _ = write!(
            out,
            "  edge [\n    source {i}\n    target {j}\n    weight {w}\n  ]\n"
        );
    }
    out.push_str("]\n");
    out
}

struct Tokens<'a> {
    items: Vec<(&'a str, usize)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut items = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            for tok in line.split_whitespace() {
                items.push((tok, idx + 1));
            }
        }
        Self { items, pos: 0 }
    }

    fn next(&mut self) -> Option<(&'a str, usize)> {
        let item = self.items.get(self.pos).copied();
        self.pos += 1;
        item
    }

    fn peek(&self) -> Option<(&'a str, usize)> {
        self.items.get(self.pos).copied()
    }

    fn last_line(&self) -> usize {
        self.items.last().map(|&(_, l)| l).unwrap_or(1)
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> Error {
    Error::GmlParse {
        line,
        reason: reason.into(),
    }
}

fn expect(tokens: &mut Tokens<'_>, want: &str) -> Result<usize> {
    match tokens.next() {
        Some((tok, line)) if tok == want => Ok(line),
        Some((tok, line)) => Err(parse_err(line, format!("expected {want:?}, found {tok:?}"))),
        None => Err(parse_err(
            tokens.last_line(),
            format!("expected {want:?}, found end of input"),
        )),
    }
}

fn parse_number<T: core::str::FromStr>(tokens: &mut Tokens<'_>, what: &str) -> Result<(T, usize)> {
    match tokens.next() {
        Some((tok, line)) => tok
            .parse::<T>()
            .map(|v| (v, line))
            .map_err(|_| parse_err(line, format!("invalid {what} {tok:?}"))),
        None => Err(parse_err(
            tokens.last_line(),
            format!("expected {what}, found end of input"),
        )),
    }
}

/// Parse a graph from the GML subset.
pub fn parse_gml(text: &str) -> Result<WeightedGraph> {
    let mut tokens = Tokens::new(text);
    expect(&mut tokens, "graph")?;
    expect(&mut tokens, "[")?;

    let mut ids: Vec<(usize, usize)> = Vec::new();
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut edge_lines: Vec<usize> = Vec::new();

    loop {
        match tokens.next() {
            Some(("node", _)) => {
                expect(&mut tokens, "[")?;
                expect(&mut tokens, "id")?;
                let (id, line) = parse_number::<usize>(&mut tokens, "node id")?;
                expect(&mut tokens, "]")?;
                ids.push((id, line));
            }
            Some(("edge", edge_line)) => {
                expect(&mut tokens, "[")?;
                let mut source: Option<usize> = None;
                let mut target: Option<usize> = None;
                let mut weight: Option<f64> = None;
                loop {
                    match tokens.next() {
                        Some(("source", _)) => {
                            source = Some(parse_number(&mut tokens, "edge source")?.0);
                        }
                        Some(("target", _)) => {
                            target = Some(parse_number(&mut tokens, "edge target")?.0);
                        }
                        Some(("weight", line)) => {
                            let (w, _) = parse_number::<f64>(&mut tokens, "edge weight")?;
                            if !(w > 0.0) || !w.is_finite() {
                                return Err(parse_err(
                                    line,
                                    format!("edge weight {w} must be strictly positive"),
                                ));
                            }
                            weight = Some(w);
                        }
                        Some(("]", line)) => {
                            let source = source
                                .ok_or_else(|| parse_err(edge_line, "edge missing source"))?;
                            let target = target
                                .ok_or_else(|| parse_err(edge_line, "edge missing target"))?;
                            let weight = weight.ok_or_else(|| {
                                parse_err(edge_line, "edge missing explicit weight")
                            })?;
                            if source == target {
                                return Err(parse_err(
                                    edge_line,
                                    format!("self-loop at vertex {source}"),
                                ));
                            }
                            let (a, b) = if source < target {
                                (source, target)
                            } else {
                                (target, source)
                            };
                            if edges.iter().any(|&(i, j, _)| (i, j) == (a, b)) {
                                return Err(parse_err(line, format!("duplicate edge ({a}, {b})")));
                            }
                            edges.push((a, b, weight));
                            edge_lines.push(edge_line);
                            break;
                        }
                        Some((tok, line)) => {
                            return Err(parse_err(
                                line,
                                format!("unexpected token {tok:?} inside edge record"),
                            ))
                        }
                        None => {
                            return Err(parse_err(tokens.last_line(), "unterminated edge record"))
                        }
                    }
                }
            }
            Some(("]", _)) => break,
            Some((tok, line)) => {
                return Err(parse_err(line, format!("unexpected token {tok:?}")));
            }
            None => return Err(parse_err(tokens.last_line(), "unterminated graph record")),
        }
    }
    if let Some((tok, line)) = tokens.peek() {
        return Err(parse_err(
            line,
            format!("trailing token {tok:?} after graph"),
        ));
    }

    let n = ids.len();
    if n < 2 {
        return Err(parse_err(
            1,
            format!("graph needs at least 2 nodes, found {n}"),
        ));
    }
    let mut seen = alloc::vec![false; n];
    for &(id, line) in &ids {
        if id >= n {
            return Err(parse_err(
                line,
                format!("node id {id} outside dense range 0..{n}"),
            ));
        }
        if seen[id] {
            return Err(parse_err(line, format!("duplicate node id {id}")));
        }
        seen[id] = true;
    }
    for (&(i, j, _), &line) in edges.iter().zip(&edge_lines) {
        if i >= n || j >= n {
            return Err(parse_err(
                line,
                format!("edge ({i}, {j}) references unknown node"),
            ));
        }
    }

    WeightedGraph::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn triangle() -> WeightedGraph {
        WeightedGraph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
    }

    #[test]
    fn round_trip_triangle() {
        let g = triangle();
        let text = write_gml(&g);
        assert_eq!(text.matches("node [").count(), 3);
        assert_eq!(text.matches("edge [").count(), 3);
        assert_eq!(parse_gml(&text).unwrap(), g);
    }

    #[test]
    fn round_trip_full_precision_weights() {
        let w = 0.1234567890123456789;
        let g = WeightedGraph::new(2, vec![(0, 1, w)]).unwrap();
        let back = parse_gml(&write_gml(&g)).unwrap();
        assert_eq!(back.edges()[0].2, g.edges()[0].2);
    }

    #[test]
    fn whitespace_insensitive() {
        let text = "graph [ node [ id 0 ] node [ id 1 ]\n edge [ source 0 target 1 weight 2.5 ] ]";
        let g = parse_gml(text).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(g.edges(), &[(0, 1, 2.5)]);
    }

    #[test]
    fn missing_weight_rejected_with_line() {
        let text = "graph [\n  node [ id 0 ]\n  node [ id 1 ]\n  edge [\n    source 0\n    target 1\n  ]\n]\n";
        match parse_gml(text) {
            Err(Error::GmlParse { line, reason }) => {
                assert_eq!(line, 4);
                assert!(reason.contains("weight"), "{reason}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn negative_weight_rejected() {
        let text = "graph [ node [ id 0 ] node [ id 1 ] edge [ source 0 target 1 weight -1 ] ]";
        assert!(matches!(parse_gml(text), Err(Error::GmlParse { .. })));
    }

    #[test]
    fn duplicate_edge_rejected() {
        let text = "graph [ node [ id 0 ] node [ id 1 ]\n\
                    edge [ source 0 target 1 weight 1 ]\n\
                    edge [ source 1 target 0 weight 2 ] ]";
        match parse_gml(text) {
            Err(Error::GmlParse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn sparse_ids_rejected() {
        let text = "graph [ node [ id 0 ] node [ id 2 ] edge [ source 0 target 2 weight 1 ] ]";
        assert!(parse_gml(text).is_err());
    }

    #[test]
    fn trailing_garbage_rejected() {
        let g = triangle();
        let mut text = write_gml(&g);
        text.push_str("graph [");
        assert!(parse_gml(&text).is_err());
    }

    #[test]
    fn unterminated_input_names_last_line() {
        let text = "graph [\n  node [ id 0 ]";
        match parse_gml(text) {
            Err(Error::GmlParse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_gml("").err().is_some());
    }

    #[test]
    fn error_display_names_line() {
        let err = parse_gml("graph [ nodule ]").unwrap_err();
        assert!(err.to_string().contains("line 1"), "{err}");
    }
}
