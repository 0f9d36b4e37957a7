//! Line-oriented text format for pose-graphs.
//!
//! ```text
//! VERTEX_SE2 <id> <x> <y> <theta>
//! EDGE_SE2 <i> <k> <dx> <dy> <dtheta> <I11> <I12> <I13> <I22> <I23> <I33> [# weight <w>] [loop_closure]
//! ```
//!
//! Numbers are written with nine significant digits. The trailing comment
//! carries the edge weight of weighted graphs and marks loop-closure edges;
//! edges without the marker are odometry edges.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{Pose2, RelativePose2};
use crate::graph::{Edge, EdgeKind, PoseGraph, WeightedPoseGraph};
use crate::info::InfoMatrix;

/// Formats `v` as a fixed-point decimal with nine significant digits.
pub fn fmt_sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v.is_infinite() {
            if v > 0.0 { "inf".into() } else { "-inf".into() }
        } else {
            "0".into()
        };
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding may carry into a new leading digit (9.999999999 -> 10.0000000)
    let digits = s.chars().filter(|c| c.is_ascii_digit()).count();
    let leading_zeros = s
        .trim_start_matches('-')
        .chars()
        .take_while(|c| *c == '0' || *c == '.')
        .filter(|c| *c == '0')
        .count();
    let s = if digits - leading_zeros > 9 && decimals > 0 {
        format!("{v:.prec$}", prec = decimals - 1)
    } else {
        s
    };
    if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0".into()
    } else {
        s
    }
}

fn write_vertices(g: &PoseGraph, out: &mut String) {
    for (id, p) in g.vertices() {
        let _ = writeln!(
            out,
            "VERTEX_SE2 {} {} {} {}",
            id,
            fmt_sig9(p.x),
            fmt_sig9(p.y),
            fmt_sig9(p.theta)
        );
    }
}

fn write_edge(e: &Edge, weight: Option<f64>, out: &mut String) {
    let m = e.measurement;
    let _ = write!(
        out,
        "EDGE_SE2 {} {} {} {} {}",
        e.from,
        e.to,
        fmt_sig9(m.dx),
        fmt_sig9(m.dy),
        fmt_sig9(m.dtheta)
    );
    for v in e.info.upper() {
        let _ = write!(out, " {}", fmt_sig9(v));
    }
    match (weight, e.kind) {
        (Some(w), EdgeKind::Odometry) => {
            let _ = write!(out, " # weight {}", fmt_sig9(w));
        }
        (Some(w), EdgeKind::LoopClosure) => {
            let _ = write!(out, " # weight {} loop_closure", fmt_sig9(w));
        }
        (None, EdgeKind::LoopClosure) => out.push_str(" # loop_closure"),
        (None, EdgeKind::Odometry) => {}
    }
    out.push('\n');
}

pub fn write_graph(g: &PoseGraph) -> String {
    let mut out = String::new();
    write_vertices(g, &mut out);
    for e in g.edges() {
        write_edge(e, None, &mut out);
    }
    out
}

pub fn write_weighted_graph(g: &WeightedPoseGraph) -> String {
    let mut out = String::new();
    write_vertices(g.base(), &mut out);
    for (e, w) in g.weighted_edges() {
        write_edge(e, Some(w), &mut out);
    }
    out
}

/// A parsed graph file. `weights` is present only when every edge carries one.
#[derive(Debug, Clone)]
pub struct ParsedGraph {
    pub graph: PoseGraph,
    pub weights: Option<Vec<f64>>,
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| Error::parse(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::parse(line, format!("malformed {what}")))
}

pub fn parse_graph(text: &str) -> Result<ParsedGraph> {
    let mut graph = PoseGraph::new();
    let mut weights = Vec::new();
    let mut all_weighted = true;
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let (body, comment) = match raw.split_once('#') {
            Some((b, c)) => (b, Some(c)),
            None => (raw, None),
        };
        let mut toks = body.split_whitespace();
        let Some(tag) = toks.next() else { continue };
        match tag {
            "VERTEX_SE2" => {
                let id = parse_num(toks.next(), line_no, "vertex id")?;
                let x = parse_num(toks.next(), line_no, "x")?;
                let y = parse_num(toks.next(), line_no, "y")?;
                let t = parse_num(toks.next(), line_no, "theta")?;
                if toks.next().is_some() {
                    return Err(Error::parse(line_no, "trailing fields"));
                }
                graph
                    .add_vertex(id, Pose2::new(x, y, t))
                    .map_err(|e| Error::parse(line_no, e.to_string()))?;
            }
            "EDGE_SE2" => {
                let from = parse_num(toks.next(), line_no, "edge source")?;
                let to = parse_num(toks.next(), line_no, "edge target")?;
                let mut vals = [0.0f64; 9];
                for v in vals.iter_mut() {
                    *v = parse_num(toks.next(), line_no, "edge value")?;
                }
                if toks.next().is_some() {
                    return Err(Error::parse(line_no, "trailing fields"));
                }
                let mut kind = EdgeKind::Odometry;
                let mut weight = None;
                if let Some(c) = comment {
                    let mut ct = c.split_whitespace();
                    while let Some(t) = ct.next() {
                        match t {
                            "weight" => weight = Some(parse_num::<f64>(ct.next(), line_no, "weight")?),
                            "loop_closure" => kind = EdgeKind::LoopClosure,
                            _ => {}
                        }
                    }
                }
                let info = InfoMatrix::from_upper([
                    vals[3], vals[4], vals[5], vals[6], vals[7], vals[8],
                ])
                .map_err(|e| Error::parse(line_no, e.to_string()))?;
                graph
                    .add_edge(Edge {
                        from,
                        to,
                        kind,
                        measurement: RelativePose2::new(vals[0], vals[1], vals[2]),
                        info,
                    })
                    .map_err(|e| Error::parse(line_no, e.to_string()))?;
                match weight {
                    Some(w) => weights.push(w),
                    None => all_weighted = false,
                }
            }
            other => return Err(Error::parse(line_no, format!("unknown record '{other}'"))),
        }
    }
    Ok(ParsedGraph {
        graph,
        weights: all_weighted.then_some(weights),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sig9_formatting() {
        assert_eq!(fmt_sig9(2.080083823), "2.08008382");
        assert_eq!(fmt_sig9(0.0), "0");
        assert_eq!(fmt_sig9(-0.0), "0");
        assert_eq!(fmt_sig9(1.0), "1.00000000");
        assert_eq!(fmt_sig9(-12345.6789012), "-12345.6789");
        assert_eq!(fmt_sig9(0.000123456789012), "0.000123456789");
        assert_eq!(fmt_sig9(9.9999999999), "10.0000000");
        assert_eq!(fmt_sig9(1e-30 * 1e-300), "0");
    }

    #[test]
    fn reports_line_of_malformed_edge() {
        let mut text = String::new();
        for i in 0..13 {
            text.push_str(&format!("VERTEX_SE2 {i} {i} 0 0\n"));
        }
        text.push_str("EDGE_SE2 0 1 1 0 0 1 0 0 oops 0 1\n");
        let err = parse_graph(&text).unwrap_err();
        assert!(err.to_string().starts_with("parse error: line 14"), "{err}");
    }

    #[test]
    fn weights_and_kinds_survive() {
        let text = "VERTEX_SE2 0 0 0 0\nVERTEX_SE2 1 1 0 0\n\
            EDGE_SE2 0 1 1 0 0 1 0 0 1 0 1 # weight 2.5\n\
            EDGE_SE2 0 1 1 0 0 1 0 0 1 0 1 # weight 0.5 loop_closure\n";
        let p = parse_graph(text).unwrap();
        assert_eq!(p.weights, Some(vec![2.5, 0.5]));
        assert_eq!(p.graph.edges()[1].kind, EdgeKind::LoopClosure);
        let back = parse_graph(&write_weighted_graph(
            &WeightedPoseGraph::new(p.graph.clone(), vec![2.5, 0.5]).unwrap(),
        ))
        .unwrap();
        assert_eq!(back.graph.edges()[1].kind, EdgeKind::LoopClosure);
    }

    #[test]
    fn unweighted_file_has_no_weights() {
        let text = "VERTEX_SE2 0 0 0 0\nVERTEX_SE2 1 1 0 0\nEDGE_SE2 0 1 1 0 0 1 0 0 1 0 1\n";
        assert!(parse_graph(text).unwrap().weights.is_none());
    }

    proptest! {
        #[test]
        fn sig9_parses_back_within_precision(v in -1e6..1e6f64) {
            let s = fmt_sig9(v);
            let back: f64 = s.parse().unwrap();
            prop_assert!((back - v).abs() <= 1e-8 * v.abs().max(1e-300) + 1e-300 || v.abs() < 1e-300);
        }
    }
}
