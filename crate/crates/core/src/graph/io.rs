//! Plain-text edge streams.
//!
//! ```text
//! # comments run to end of line
//! n m delta
//! u v        (m lines, 0-indexed, in arrival order)
//! ```

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::{Edge, EdgeStream, Graph, GraphError};

/// Renders `stream` with edges listed in arrival order.
pub fn emit_stream(stream: &EdgeStream) -> String {
    let g = stream.graph();
    let mut out = String::with_capacity(16 * (stream.len() + 1));
    let _ = writeln!(out, "{} {} {}", g.n(), g.m(), g.delta());
    for (_, e) in stream.arrivals() {
        let _ = writeln!(out, "{} {}", e.u, e.v);
    }
    out
}

pub fn write_stream<W: Write>(stream: &EdgeStream, mut w: W) -> Result<(), GraphError> {
    w.write_all(emit_stream(stream).as_bytes())
        .map_err(|e| GraphError::Io(e.to_string()))
}

/// Parses the text format. The parsed stream's edge indices follow line
/// order, so its arrival order is the identity.
pub fn parse_stream(text: &str) -> Result<EdgeStream, GraphError> {
    read_lines(text.lines().map(|l| Ok(l.to_string())))
}

pub fn read_stream<R: BufRead>(r: R) -> Result<EdgeStream, GraphError> {
    read_lines(r.lines().map(|l| l.map_err(|e| GraphError::Io(e.to_string()))))
}

fn read_lines<I>(lines: I) -> Result<EdgeStream, GraphError>
where
    I: Iterator<Item = Result<String, GraphError>>,
{
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        let lineno = k + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        let parse = |s: &str| {
            s.parse::<usize>().map_err(|_| GraphError::Parse {
                line: lineno,
                message: format!("expected a non-negative integer, found {s:?}"),
            })
        };
        match header {
            None => {
                if fields.len() != 3 {
                    return Err(GraphError::Parse {
                        line: lineno,
                        message: "header must be `n m delta`".into(),
                    });
                }
                header = Some((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
            }
            Some(_) => {
                if fields.len() != 2 {
                    return Err(GraphError::Parse {
                        line: lineno,
                        message: "edge lines must be `u v`".into(),
                    });
                }
                edges.push(Edge::new(parse(fields[0])?, parse(fields[1])?));
            }
        }
    }
    let (n, m, delta) = header.ok_or(GraphError::Parse {
        line: 0,
        message: "missing header".into(),
    })?;
    if edges.len() != m {
        return Err(GraphError::Parse {
            line: 0,
            message: format!("header announces {m} edges, found {}", edges.len()),
        });
    }
    Ok(EdgeStream::in_index_order(Graph::new(n, edges, delta)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GeneratorSpec, GraphKind};
    use proptest::prelude::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# a path\n3 2 2\n\n0 1  # first\n1 2\n";
        let s = parse_stream(text).unwrap();
        assert_eq!(s.graph().n(), 3);
        assert_eq!(s.arrival_edges(), vec![Edge::new(0, 1), Edge::new(1, 2)]);
    }

    #[test]
    fn reports_bad_lines() {
        assert!(matches!(
            parse_stream("3 2 2\n0 1\n"),
            Err(GraphError::Parse { .. })
        ));
        assert!(matches!(
            parse_stream("3 1 2\n0 x\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert_eq!(
            parse_stream("3 1 2\n1 1\n"),
            Err(GraphError::SelfLoop(1))
        );
    }

    proptest! {
        #[test]
        fn round_trip_preserves_arrivals(n in 4usize..40, seed in any::<u64>()) {
            let spec = GeneratorSpec::new(GraphKind::RandomTree { max_degree: Some(4) }, n).shuffled();
            let s = generate(&spec, seed).unwrap();
            let back = parse_stream(&emit_stream(&s)).unwrap();
            prop_assert_eq!(back.graph().n(), s.graph().n());
            prop_assert_eq!(back.graph().delta(), s.graph().delta());
            prop_assert_eq!(back.arrival_edges(), s.arrival_edges());
            prop_assert_eq!(emit_stream(&back), emit_stream(&s));
        }
    }
}
