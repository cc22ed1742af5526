//! Weighted multigraphs over a prime dimension, their text format, and
//! the local-complementation transformation.
//!
//! # File format
//!
//! UTF-8, line oriented. `#` starts a comment that runs to the end of
//! the line. A `dim <d>` line and a `vertices <n>` line must both appear
//! before any edge. Each `edge <u> <v> <w>` line (1-based `u ≠ v`,
//! `1 ≤ w ≤ d-1`) adds `w` parallel edges between `u` and `v`; repeated
//! lines for the same pair accumulate mod `d`, and a total of zero means
//! no edge.

use crate::modular;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("dimension {0} is not prime")]
    NonPrimeDimension(u32),
    #[error("vertex count must be at least 1")]
    NoVertices,
    #[error("vertex index {0} out of range 1..={1}")]
    VertexOutOfRange(usize, usize),
    #[error("self-loops are not allowed (vertex {0})")]
    SelfLoop(usize),
    #[error("edge weight {weight} outside 1..={max}")]
    WeightOutOfRange { weight: u32, max: u32 },
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("malformed line: {0:?}")]
    Malformed(String),
    #[error("duplicate `{0}` declaration")]
    Duplicate(&'static str),
    #[error("`{0}` must appear before any edge")]
    HeaderAfterEdge(&'static str),
    #[error("edge before `dim` and `vertices` declarations")]
    EdgeBeforeHeader,
    #[error("{0}")]
    Invalid(Box<GraphError>),
    #[error("missing `{0}` declaration")]
    Missing(&'static str),
}

/// Symmetric edge-multiplicity matrix over `Z_d` with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    d: u32,
    n: usize,
    gamma: Vec<u32>,
}

impl Multigraph {
    /// An edgeless graph on `n` vertices.
    pub fn new(d: u32, n: usize) -> Result<Self, GraphError> {
        if !modular::is_prime(d) {
            return Err(GraphError::NonPrimeDimension(d));
        }
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        Ok(Multigraph {
            d,
            n,
            gamma: vec![0; n * n],
        })
    }

    pub fn dimension(&self) -> u32 {
        self.d
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Edge multiplicity between 0-based vertices `i` and `j`.
    pub fn weight(&self, i: usize, j: usize) -> u32 {
        self.gamma[i * self.n + j]
    }

    /// Adds `w` parallel edges between 0-based `u` and `v`, mod `d`.
    pub fn add_edge_weight(&mut self, u: usize, v: usize, w: u32) -> Result<(), GraphError> {
        if u >= self.n {
            return Err(GraphError::VertexOutOfRange(u + 1, self.n));
        }
        if v >= self.n {
            return Err(GraphError::VertexOutOfRange(v + 1, self.n));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u + 1));
        }
        if w == 0 || w >= self.d {
            return Err(GraphError::WeightOutOfRange {
                weight: w,
                max: self.d - 1,
            });
        }
        let total = modular::add(self.weight(u, v), w, self.d);
        self.gamma[u * self.n + v] = total;
        self.gamma[v * self.n + u] = total;
        Ok(())
    }

    /// 0-based vertices adjacent to `i`.
    pub fn neighborhood(&self, i: usize) -> BTreeSet<usize> {
        assert!(i < self.n, "vertex {i} out of range");
        (0..self.n)
            .filter(|&j| j != i && self.weight(i, j) != 0)
            .collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.n)
            .filter(|&j| j != i && self.weight(i, j) != 0)
            .count()
    }

    /// Local complementation at `pivot` with strength `a`:
    /// `Γ'_{i,j} = Γ_{i,j} + a·Γ_{i,pivot}·Γ_{j,pivot}` for all off-diagonal
    /// pairs not involving the pivot. The pivot's own row and column are
    /// untouched, and the diagonal stays zero.
    pub fn local_complement(&self, pivot: usize, a: u32) -> Self {
        assert!(pivot < self.n, "pivot {pivot} out of range");
        let a = a % self.d;
        let mut out = self.clone();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if i == pivot || j == pivot {
                    continue;
                }
                let delta = modular::mul(
                    a,
                    modular::mul(self.weight(i, pivot), self.weight(j, pivot), self.d),
                    self.d,
                );
                let w = modular::add(self.weight(i, j), delta, self.d);
                out.gamma[i * self.n + j] = w;
                out.gamma[j * self.n + i] = w;
            }
        }
        out
    }

    /// Moves vertex `i` to position `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::NotAPermutation(self.n));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || seen[p] {
                return Err(GraphError::NotAPermutation(self.n));
            }
            seen[p] = true;
        }
        let mut out = Multigraph {
            d: self.d,
            n: self.n,
            gamma: vec![0; self.n * self.n],
        };
        for i in 0..self.n {
            for j in 0..self.n {
                out.gamma[perm[i] * self.n + perm[j]] = self.weight(i, j);
            }
        }
        Ok(out)
    }

    /// Nonzero edges as 0-based `(u, v, w)` triples with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u32)> + '_ {
        (0..self.n).flat_map(move |u| {
            ((u + 1)..self.n).filter_map(move |v| {
                let w = self.weight(u, v);
                (w != 0).then_some((u, v, w))
            })
        })
    }

    /// Renders the graph in the text file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\nvertices {}\n", self.d, self.n);
        for (u, v, w) in self.edges() {
            out.push_str(&format!("edge {} {} {}\n", u + 1, v + 1, w));
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn assert_invariants(&self) {
        for i in 0..self.n {
            assert_eq!(self.weight(i, i), 0, "diagonal must stay zero");
            for j in 0..self.n {
                assert_eq!(self.weight(i, j), self.weight(j, i), "symmetry");
                assert!(self.weight(i, j) < self.d, "weights reduced mod d");
            }
        }
    }
}

/// Parses the graph file format.
///
/// ```
/// use graphcert::graph::parse_graph;
///
/// let g = parse_graph("dim 3\nvertices 3\nedge 1 2 2\nedge 1 3 1\n").unwrap();
/// assert_eq!(g.weight(0, 1), 2);
/// assert_eq!(g.neighborhood(0), [1, 2].into());
/// ```
pub fn parse_graph(text: &str) -> Result<Multigraph, GraphError> {
    let mut d: Option<(u32, usize)> = None;
    let mut n: Option<(usize, usize)> = None;
    let mut graph: Option<Multigraph> = None;
    let mut saw_edge = false;

    let parse_err = |line: usize, kind: ParseErrorKind| GraphError::Parse { line, kind };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let keyword = tokens.next().unwrap_or("");
        let rest: Vec<&str> = tokens.collect();
        match keyword {
            "dim" => {
                if saw_edge {
                    return Err(parse_err(line_no, ParseErrorKind::HeaderAfterEdge("dim")));
                }
                if d.is_some() {
                    return Err(parse_err(line_no, ParseErrorKind::Duplicate("dim")));
                }
                let [value] = rest[..] else {
                    return Err(parse_err(
                        line_no,
                        ParseErrorKind::Malformed(content.to_string()),
                    ));
                };
                let value: u32 = value.parse().map_err(|_| {
                    parse_err(line_no, ParseErrorKind::Malformed(content.to_string()))
                })?;
                if !modular::is_prime(value) {
                    return Err(parse_err(
                        line_no,
                        ParseErrorKind::Invalid(Box::new(GraphError::NonPrimeDimension(value))),
                    ));
                }
                d = Some((value, line_no));
            }
            "vertices" => {
                if saw_edge {
                    return Err(parse_err(
                        line_no,
                        ParseErrorKind::HeaderAfterEdge("vertices"),
                    ));
                }
                if n.is_some() {
                    return Err(parse_err(line_no, ParseErrorKind::Duplicate("vertices")));
                }
                let [value] = rest[..] else {
                    return Err(parse_err(
                        line_no,
                        ParseErrorKind::Malformed(content.to_string()),
                    ));
                };
                let value: usize = value.parse().map_err(|_| {
                    parse_err(line_no, ParseErrorKind::Malformed(content.to_string()))
                })?;
                if value == 0 {
                    return Err(parse_err(
                        line_no,
                        ParseErrorKind::Invalid(Box::new(GraphError::NoVertices)),
                    ));
                }
                n = Some((value, line_no));
            }
            "edge" => {
                saw_edge = true;
                let (Some((dv, _)), Some((nv, _))) = (d, n) else {
                    return Err(parse_err(line_no, ParseErrorKind::EdgeBeforeHeader));
                };
                let g = graph.get_or_insert_with(|| {
                    Multigraph::new(dv, nv).expect("header values already validated")
                });
                let [u, v, w] = rest[..] else {
                    return Err(parse_err(
                        line_no,
                        ParseErrorKind::Malformed(content.to_string()),
                    ));
                };
                let parse_num = |s: &str| -> Result<u64, GraphError> {
                    s.parse().map_err(|_| {
                        parse_err(line_no, ParseErrorKind::Malformed(content.to_string()))
                    })
                };
                let (u, v, w) = (parse_num(u)?, parse_num(v)?, parse_num(w)?);
                let range_check = |value: u64| -> Result<usize, GraphError> {
                    if value == 0 || value > nv as u64 {
                        Err(parse_err(
                            line_no,
                            ParseErrorKind::Invalid(Box::new(GraphError::VertexOutOfRange(
                                value as usize,
                                nv,
                            ))),
                        ))
                    } else {
                        Ok(value as usize - 1)
                    }
                };
                let (u, v) = (range_check(u)?, range_check(v)?);
                if w == 0 || w >= u64::from(dv) {
                    return Err(parse_err(
                        line_no,
                        ParseErrorKind::Invalid(Box::new(GraphError::WeightOutOfRange {
                            weight: w.min(u32::MAX as u64) as u32,
                            max: dv - 1,
                        })),
                    ));
                }
                g.add_edge_weight(u, v, w as u32)
                    .map_err(|e| parse_err(line_no, ParseErrorKind::Invalid(Box::new(e))))?;
            }
            _ => {
                return Err(parse_err(
                    line_no,
                    ParseErrorKind::Malformed(content.to_string()),
                ));
            }
        }
    }

    let (Some((dv, _)), Some((nv, _))) = (d, n) else {
        let missing = if d.is_none() { "dim" } else { "vertices" };
        return Err(GraphError::Parse {
            line: text.lines().count() + 1,
            kind: ParseErrorKind::Missing(missing),
        });
    };
    Ok(graph.unwrap_or_else(|| Multigraph::new(dv, nv).expect("validated header")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_the_double_edge_example() {
        let g = parse_graph("dim 3\nvertices 3\nedge 1 2 1\nedge 1 3 2\n").unwrap();
        assert_eq!(g.dimension(), 3);
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.weight(0, 1), 1);
        assert_eq!(g.weight(0, 2), 2);
        assert_eq!(g.weight(1, 2), 0);
        g.assert_invariants();
    }

    #[test]
    fn parses_single_vertex() {
        let g = parse_graph("dim 2\nvertices 1\n").unwrap();
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edges().count(), 0);
    }

    #[test]
    fn repeated_edges_accumulate_mod_d() {
        let g = parse_graph("dim 3\nvertices 2\nedge 1 2 2\nedge 1 2 1\n").unwrap();
        assert_eq!(g.weight(0, 1), 0);
        assert!(g.neighborhood(0).is_empty());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let g =
            parse_graph("# a triangle\ndim 3 # qutrits\n\nvertices 3\nedge 1 2 1 # one\n").unwrap();
        assert_eq!(g.weight(0, 1), 1);
    }

    #[test]
    fn rejects_bad_inputs_with_line_numbers() {
        let cases = [
            ("dim 4\nvertices 2\n", 1),
            ("dim 3\nvertices 2\nedge 1 3 1\n", 3),
            ("dim 3\nvertices 2\nedge 1 1 1\n", 3),
            ("dim 3\nvertices 2\nedge 1 2 3\n", 3),
            ("dim 3\nvertices 2\nedge 1 2 0\n", 3),
            ("dim 3\nvertices 2\nbogus\n", 3),
            ("edge 1 2 1\n", 1),
            ("dim 3\ndim 3\nvertices 2\n", 2),
        ];
        for (text, expect_line) in cases {
            match parse_graph(text) {
                Err(GraphError::Parse { line, .. }) => {
                    assert_eq!(line, expect_line, "input {text:?}")
                }
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
    }

    #[test]
    fn missing_header_is_reported() {
        assert!(matches!(
            parse_graph("dim 3\n"),
            Err(GraphError::Parse {
                kind: ParseErrorKind::Missing("vertices"),
                ..
            })
        ));
    }

    #[test]
    fn local_complement_identity_when_a_is_zero() {
        let g = parse_graph("dim 3\nvertices 3\nedge 1 2 1\nedge 1 3 2\n").unwrap();
        assert_eq!(g.local_complement(0, 0), g);
    }

    #[test]
    fn local_complement_removes_triangle_edge() {
        // unit-weight triangle at d=3, pivot 1, a=2: Γ'_{2,3} = 1 + 2·1·1 = 0
        let g = parse_graph("dim 3\nvertices 3\nedge 1 2 1\nedge 1 3 1\nedge 2 3 1\n").unwrap();
        let h = g.local_complement(0, 2);
        assert_eq!(h.weight(1, 2), 0);
        assert_eq!(h.weight(0, 1), 1);
        assert_eq!(h.weight(0, 2), 1);
        assert_eq!(h.neighborhood(1), [0].into());
        h.assert_invariants();
    }

    #[test]
    fn local_complement_inverse() {
        let g = parse_graph("dim 5\nvertices 4\nedge 1 2 3\nedge 1 3 2\nedge 2 4 4\nedge 3 4 1\n")
            .unwrap();
        for pivot in 0..4 {
            for a in 0..5 {
                let back = g.local_complement(pivot, a).local_complement(pivot, 5 - a);
                assert_eq!(back, g.local_complement(pivot, 0));
            }
        }
    }

    #[test]
    fn local_complement_is_additive_in_a() {
        let g = parse_graph("dim 3\nvertices 4\nedge 1 2 1\nedge 1 3 2\nedge 1 4 1\nedge 2 3 2\n")
            .unwrap();
        for pivot in 0..4 {
            for a in 0..3u32 {
                for b in 0..3u32 {
                    let two_steps = g.local_complement(pivot, a).local_complement(pivot, b);
                    let one_step = g.local_complement(pivot, (a + b) % 3);
                    assert_eq!(two_steps, one_step);
                }
            }
        }
    }

    #[test]
    fn local_complement_fixes_pivot_row() {
        let g = parse_graph("dim 3\nvertices 4\nedge 1 2 1\nedge 1 3 2\nedge 2 3 1\nedge 2 4 2\n")
            .unwrap();
        for pivot in 0..4 {
            for a in 0..3 {
                let h = g.local_complement(pivot, a);
                for i in 0..4 {
                    assert_eq!(h.weight(i, pivot), g.weight(i, pivot));
                }
            }
        }
    }

    #[test]
    fn relabel_swap() {
        let g = parse_graph("dim 3\nvertices 3\nedge 1 2 1\nedge 1 3 2\n").unwrap();
        let h = g.relabel(&[1, 0, 2]).unwrap();
        assert_eq!(h.weight(1, 2), 2);
        assert_eq!(h.weight(0, 1), 1);
        assert_eq!(h.weight(0, 2), 0);
    }

    #[test]
    fn relabel_identity_and_inverse() {
        let g = parse_graph("dim 3\nvertices 4\nedge 1 2 1\nedge 2 3 2\nedge 3 4 1\n").unwrap();
        assert_eq!(g.relabel(&[0, 1, 2, 3]).unwrap(), g);
        let perm = [2usize, 0, 3, 1];
        let mut inverse = [0usize; 4];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        assert_eq!(g.relabel(&perm).unwrap().relabel(&inverse).unwrap(), g);
    }

    #[test]
    fn relabel_rejects_non_permutations() {
        let g = parse_graph("dim 3\nvertices 3\n").unwrap();
        assert_eq!(g.relabel(&[0, 0, 1]), Err(GraphError::NotAPermutation(3)));
        assert_eq!(g.relabel(&[0, 1]), Err(GraphError::NotAPermutation(3)));
    }

    #[test]
    fn neighborhood_of_isolated_vertex_is_empty() {
        let g = parse_graph("dim 3\nvertices 3\nedge 1 2 1\n").unwrap();
        assert!(g.neighborhood(2).is_empty());
        assert_eq!(g.neighborhood(0), [1].into());
    }

    #[test]
    fn text_roundtrip() {
        let g = parse_graph("dim 5\nvertices 4\nedge 1 2 3\nedge 2 4 4\n").unwrap();
        assert_eq!(parse_graph(&g.to_text()).unwrap(), g);
    }
}
