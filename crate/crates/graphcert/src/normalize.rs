//! Canonicalization of a multigraph by relabeling and local
//! complementations, and classification into one of four case families.
//!
//! The certificate builder needs its input in a normal form where
//! vertex 1 and vertex 2 are adjacent, vertex 1 has at least two
//! neighbors outside the neighborhood of vertex 2 (vertex 2 itself
//! counts), and the neighborhood overlap of vertices 1 and 2 falls
//! into one of the four case families below. Every graph on at least
//! three vertices with some vertex of degree ≥ 2 can be brought into
//! this form; the transformation sequence is recorded so a verifier
//! can replay it.

use crate::graph::{GraphError, Multigraph};
use crate::modular;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

/// Position of the distinguished "vertex 1" after normalization
/// (0-based internally).
pub const HEAD: usize = 0;
/// Position of the distinguished "vertex 2".
pub const ANCHOR: usize = 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("graph has fewer than 3 vertices or no vertex of degree 2")]
    PreconditionFailed,
    #[error("normalization search exhausted; this violates an internal invariant: {trace}")]
    Exhausted { trace: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The four case families, ordered; classification returns the lowest
/// matching index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    Case1,
    Case2,
    Case3,
    Case4,
    NotApplicable,
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseLabel::Case1 => "case1",
            CaseLabel::Case2 => "case2",
            CaseLabel::Case3 => "case3",
            CaseLabel::Case4 => "case4",
            CaseLabel::NotApplicable => "not_applicable",
        };
        f.write_str(s)
    }
}

/// One recorded transformation. Serialized indices are 0-based; they
/// address positions in the current (possibly already relabeled) graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TransformStep {
    /// Vertex `i` moves to position `perm[i]`.
    Relabel { perm: Vec<usize> },
    /// Local complementation at `pivot` with strength `a`.
    LocalComplement { pivot: usize, a: u32 },
}

/// Ordered list of transformations; replaying it on the input graph
/// reproduces the normalized graph exactly.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TransformLog(pub Vec<TransformStep>);

impl TransformLog {
    pub fn steps(&self) -> &[TransformStep] {
        &self.0
    }

    pub fn complementation_count(&self) -> usize {
        self.0
            .iter()
            .filter(|s| matches!(s, TransformStep::LocalComplement { .. }))
            .count()
    }
}

/// Applies a transform log to a graph.
pub fn replay(graph: &Multigraph, log: &TransformLog) -> Result<Multigraph, GraphError> {
    let mut g = graph.clone();
    for step in log.steps() {
        g = match step {
            TransformStep::Relabel { perm } => g.relabel(perm)?,
            TransformStep::LocalComplement { pivot, a } => {
                if *pivot >= g.vertex_count() {
                    return Err(GraphError::VertexOutOfRange(*pivot + 1, g.vertex_count()));
                }
                g.local_complement(*pivot, *a)
            }
        };
    }
    Ok(g)
}

/// True iff the graph has at least 3 vertices and some vertex of degree ≥ 2.
pub fn check_preconditions(graph: &Multigraph) -> bool {
    graph.vertex_count() >= 3 && (0..graph.vertex_count()).any(|i| graph.degree(i) >= 2)
}

/// True iff the graph is in the normal form the case predicates assume:
/// head and anchor adjacent, and at least two neighbors of the head
/// outside the anchor's neighborhood (the anchor is always one of them).
pub fn in_normal_form(graph: &Multigraph) -> bool {
    if graph.vertex_count() < 2 || graph.weight(HEAD, ANCHOR) == 0 {
        return false;
    }
    let n1 = graph.neighborhood(HEAD);
    let n2 = graph.neighborhood(ANCHOR);
    n1.difference(&n2).count() >= 2
}

/// Common neighbors of head and anchor.
pub fn overlap(graph: &Multigraph) -> BTreeSet<usize> {
    let n1 = graph.neighborhood(HEAD);
    let n2 = graph.neighborhood(ANCHOR);
    n1.intersection(&n2).copied().collect()
}

/// `N_2 \ {v} == N_v \ {2}`: the degenerate overlap condition.
fn anchor_mirror(graph: &Multigraph, v: usize) -> bool {
    let mut a = graph.neighborhood(ANCHOR);
    a.remove(&v);
    let mut b = graph.neighborhood(v);
    b.remove(&ANCHOR);
    a == b
}

/// An `a` in `1..d` zeroing `Γ_{2,i} + a·Γ_{2,v}·Γ_{v,i}` for every
/// neighbor `i` of `v` other than the anchor.
fn uniform_clearing_strength(graph: &Multigraph, v: usize) -> Option<u32> {
    let d = graph.dimension();
    let wv = graph.weight(ANCHOR, v);
    (1..d).find(|&a| {
        graph.neighborhood(v).iter().all(|&i| {
            i == ANCHOR
                || modular::add(
                    graph.weight(ANCHOR, i),
                    modular::mul(a, modular::mul(wv, graph.weight(v, i), d), d),
                    d,
                ) == 0
        })
    })
}

/// Classifies a graph in normal form; `NotApplicable` when the graph is
/// not in normal form or no case predicate matches.
pub fn classify(graph: &Multigraph) -> CaseLabel {
    if !in_normal_form(graph) {
        return CaseLabel::NotApplicable;
    }
    let inter = overlap(graph);
    if inter.is_empty() {
        return CaseLabel::Case1;
    }
    if inter.iter().all(|&v| !anchor_mirror(graph, v)) {
        return CaseLabel::Case2;
    }
    if inter.len() == 1 {
        // the single overlap vertex mirrors, otherwise Case2 had matched
        return CaseLabel::Case3;
    }
    let degenerate_with_clearing = inter
        .iter()
        .any(|&v| anchor_mirror(graph, v) && uniform_clearing_strength(graph, v).is_some());
    if degenerate_with_clearing {
        return CaseLabel::Case4;
    }
    CaseLabel::NotApplicable
}

/// Overlap vertex and strength witnessing Case 4.
pub fn case4_witness(graph: &Multigraph) -> Option<(usize, u32)> {
    overlap(graph).into_iter().find_map(|v| {
        if anchor_mirror(graph, v) {
            uniform_clearing_strength(graph, v).map(|a| (v, a))
        } else {
            None
        }
    })
}

/// Overlap vertex witnessing Case 3.
pub fn case3_witness(graph: &Multigraph) -> Option<usize> {
    let inter = overlap(graph);
    if inter.len() == 1 {
        let v = *inter.iter().next().unwrap();
        anchor_mirror(graph, v).then_some(v)
    } else {
        None
    }
}

/// Result of [`normalize`].
#[derive(Debug, Clone)]
pub struct Normalized {
    pub graph: Multigraph,
    pub log: TransformLog,
    pub case: CaseLabel,
}

/// Brings a graph into normal form and a case family.
///
/// Stage one searches vertex assignments and a single complementation at
/// the new head to establish the normal form; stage two repeatedly
/// complements at a degenerate overlap vertex, shrinking the anchor's
/// neighborhood each round, until a case predicate holds.
pub fn normalize(graph: &Multigraph) -> Result<Normalized, NormalizeError> {
    if !check_preconditions(graph) {
        return Err(NormalizeError::PreconditionFailed);
    }
    let d = graph.dimension();
    let n = graph.vertex_count();
    let mut log = Vec::new();

    // Stage one. The first head candidate with degree ≥ 2 always admits
    // some strength, but the search covers every assignment.
    let mut staged: Option<Multigraph> = None;
    'search: for head in 0..n {
        if graph.degree(head) < 2 {
            continue;
        }
        for anchor in graph.neighborhood(head) {
            let perm = assignment_permutation(n, head, anchor);
            let relabeled = graph.relabel(&perm)?;
            for a in 0..d {
                let candidate = relabeled.local_complement(HEAD, a);
                if in_normal_form(&candidate) {
                    if !perm_is_identity(&perm) {
                        log.push(TransformStep::Relabel { perm });
                    }
                    if a != 0 {
                        log.push(TransformStep::LocalComplement { pivot: HEAD, a });
                    }
                    staged = Some(candidate);
                    break 'search;
                }
            }
        }
    }
    let Some(mut current) = staged else {
        return Err(NormalizeError::Exhausted {
            trace: format!(
                "no (head, anchor, strength) assignment normalizes; graph = {:?}",
                graph.edges().collect::<Vec<_>>()
            ),
        });
    };

    // Stage two: clear degenerate overlap vertices. Each round strictly
    // shrinks |N_2|, so d·n + 2 rounds is a safe ceiling.
    let mut rounds = 0usize;
    loop {
        let case = classify(&current);
        if case != CaseLabel::NotApplicable {
            return Ok(Normalized {
                graph: current,
                log: TransformLog(log),
                case,
            });
        }
        rounds += 1;
        if rounds > n * d as usize + 2 {
            return Err(NormalizeError::Exhausted {
                trace: format!(
                    "case search did not settle after {rounds} rounds; graph = {:?}",
                    current.edges().collect::<Vec<_>>()
                ),
            });
        }
        // a NotApplicable verdict in normal form guarantees a degenerate
        // overlap vertex; anything else is an invariant violation
        let pivot = *overlap(&current)
            .iter()
            .find(|&&v| anchor_mirror(&current, v))
            .ok_or_else(|| NormalizeError::Exhausted {
                trace: format!(
                    "round {rounds}: no degenerate overlap vertex; graph = {:?}",
                    current.edges().collect::<Vec<_>>()
                ),
            })?;
        let before = current.neighborhood(ANCHOR).len();
        let strength = (1..d)
            .find(|&a| {
                let next = current.local_complement(pivot, a);
                next.weight(HEAD, ANCHOR) != 0 && next.neighborhood(ANCHOR).len() < before
            })
            .ok_or_else(|| NormalizeError::Exhausted {
                trace: format!(
                    "no clearing strength at pivot {pivot}; graph = {:?}",
                    current.edges().collect::<Vec<_>>()
                ),
            })?;
        current = current.local_complement(pivot, strength);
        log.push(TransformStep::LocalComplement { pivot, a: strength });
        debug_assert!(current.neighborhood(ANCHOR).len() < before);
        debug_assert!(in_normal_form(&current));
    }
}

fn assignment_permutation(n: usize, head: usize, anchor: usize) -> Vec<usize> {
    // head ↦ 0, anchor ↦ 1, everyone else keeps relative order
    let mut perm = vec![0usize; n];
    perm[head] = HEAD;
    perm[anchor] = ANCHOR;
    let mut next = 2usize;
    for (v, slot) in perm.iter_mut().enumerate() {
        if v != head && v != anchor {
            *slot = next;
            next += 1;
        }
    }
    perm
}

fn perm_is_identity(perm: &[usize]) -> bool {
    perm.iter().enumerate().all(|(i, &p)| i == p)
}
