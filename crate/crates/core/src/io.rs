//! Plain-text formats: edge lists, interval files and per-node counts.
//!
//! Every format is line based with `#` comments and blank lines ignored.
//! Edge lists may carry a `# nodes: N` comment so isolated trailing nodes
//! survive a round trip.

use crate::error::{Error, Result};
use crate::graph::{DegreeInterval, Graph};
use std::fmt::Write as _;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("").trim();
        (!body.is_empty()).then_some((i + 1, body))
    })
}

fn parse_fields(line: usize, body: &str, expected: usize) -> Result<Vec<usize>> {
    let fields: Vec<&str> = body.split_whitespace().collect();
    if fields.len() != expected {
        return Err(Error::Parse {
            line,
            message: format!("expected {expected} integers, found {} fields", fields.len()),
        });
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<usize>().map_err(|_| Error::Parse {
                line,
                message: format!("`{f}` is not a non-negative integer"),
            })
        })
        .collect()
}

fn declared_nodes(text: &str) -> Result<Option<usize>> {
    for (i, raw) in text.lines().enumerate() {
        if let Some(comment) = raw.split_once('#').map(|(_, c)| c.trim()) {
            if let Some(rest) = comment.strip_prefix("nodes:") {
                let n = rest.trim().parse::<usize>().map_err(|_| Error::Parse {
                    line: i + 1,
                    message: format!("bad node count `{}`", rest.trim()),
                })?;
                return Ok(Some(n));
            }
        }
    }
    Ok(None)
}

/// Parses `u v` lines. The node count is the `# nodes: N` header if present,
/// else `n_hint`, else one more than the largest endpoint.
pub fn parse_edge_list(text: &str, n_hint: Option<usize>) -> Result<Graph> {
    let mut edges = Vec::new();
    for (line, body) in content_lines(text) {
        let f = parse_fields(line, body, 2)?;
        if f[0] == f[1] {
            return Err(Error::Parse {
                line,
                message: format!("self-loop at node {}", f[0]),
            });
        }
        edges.push((line, f[0], f[1]));
    }
    let max_node = edges.iter().map(|&(_, u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = declared_nodes(text)?.or(n_hint).unwrap_or(max_node);
    let mut g = Graph::empty(n);
    for (line, u, v) in edges {
        if u >= n || v >= n {
            return Err(Error::Parse {
                line,
                message: format!("endpoint outside 0..{n}"),
            });
        }
        if !g.add_edge(u, v) {
            return Err(Error::Parse {
                line,
                message: format!("duplicate edge {{{u},{v}}}"),
            });
        }
    }
    Ok(g)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("# nodes: {}\n", g.n());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

/// Parses `i ell_i u_i` lines; every node in `0..n` must appear exactly once.
pub fn parse_interval_file(text: &str) -> Result<DegreeInterval> {
    let mut rows = Vec::new();
    for (line, body) in content_lines(text) {
        let f = parse_fields(line, body, 3)?;
        rows.push((line, f[0], f[1], f[2]));
    }
    let n = rows.len();
    let mut lower = vec![None; n];
    let mut upper = vec![0; n];
    for &(line, i, l, u) in &rows {
        if i >= n {
            return Err(Error::Parse {
                line,
                message: format!("node {i} outside 0..{n}"),
            });
        }
        if lower[i].is_some() {
            return Err(Error::Parse {
                line,
                message: format!("node {i} listed twice"),
            });
        }
        if l > u {
            return Err(Error::Parse {
                line,
                message: format!("lower {l} exceeds upper {u}"),
            });
        }
        lower[i] = Some(l);
        upper[i] = u;
    }
    let lower = lower.into_iter().map(|l| l.unwrap_or(0)).collect();
    DegreeInterval::new(lower, upper)
}

pub fn write_interval_file(iv: &DegreeInterval) -> String {
    let mut out = String::new();
    for i in 0..iv.n() {
        let _ = writeln!(out, "{i} {} {}", iv.lower()[i], iv.upper()[i]);
    }
    out
}

/// Parses per-node counts, either one value per line in node order or
/// `i value` pairs.
pub fn parse_node_counts(text: &str, n: usize) -> Result<Vec<usize>> {
    let lines: Vec<(usize, &str)> = content_lines(text).collect();
    let paired = lines.first().is_some_and(|(_, b)| b.split_whitespace().count() == 2);
    let mut out = vec![0; n];
    if paired {
        let mut seen = vec![false; n];
        for &(line, body) in &lines {
            let f = parse_fields(line, body, 2)?;
            if f[0] >= n || seen[f[0]] {
                return Err(Error::Parse {
                    line,
                    message: format!("node {} out of range or repeated", f[0]),
                });
            }
            seen[f[0]] = true;
            out[f[0]] = f[1];
        }
    } else {
        if lines.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: lines.len(),
            });
        }
        for (i, &(line, body)) in lines.iter().enumerate() {
            out[i] = parse_fields(line, body, 1)?[0];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip() {
        let g = Graph::from_edges(6, [(0, 1), (2, 4)]).unwrap();
        let text = write_edge_list(&g);
        assert_eq!(parse_edge_list(&text, None).unwrap(), g);
    }

    #[test]
    fn edge_list_comments_and_blanks() {
        let g = parse_edge_list("# triangle\n0 1\n\n1 2 # inline\n0 2\n", None).unwrap();
        assert_eq!(g, Graph::complete(3));
        assert_eq!(parse_edge_list("", Some(4)).unwrap().n(), 4);
    }

    #[test]
    fn edge_list_errors_name_the_line() {
        assert_eq!(
            parse_edge_list("0 1\n1 x\n", None),
            Err(Error::Parse {
                line: 2,
                message: "`x` is not a non-negative integer".into()
            })
        );
        assert!(matches!(parse_edge_list("0 1\n0 1\n", None), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("3 3\n", None), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("0 1 2\n", None), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn interval_file_round_trip() {
        let iv = DegreeInterval::new(vec![1, 1, 0], vec![2, 1, 1]).unwrap();
        assert_eq!(parse_interval_file(&write_interval_file(&iv)).unwrap(), iv);
        let shuffled = "2 0 1\n0 1 2\n1 1 1\n";
        assert_eq!(parse_interval_file(shuffled).unwrap(), iv);
    }

    #[test]
    fn interval_file_errors() {
        assert!(matches!(parse_interval_file("0 1 1\n0 1 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_interval_file("0 2 1\n1 0 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_interval_file("0 0 5\n1 0 1\n"), Err(Error::BoundExceeded { .. })));
    }

    #[test]
    fn node_counts_both_layouts() {
        assert_eq!(parse_node_counts("1\n0\n1\n", 3).unwrap(), vec![1, 0, 1]);
        assert_eq!(parse_node_counts("2 1\n0 1\n", 3).unwrap(), vec![1, 0, 1]);
        assert!(parse_node_counts("1\n0\n", 3).is_err());
    }
}
