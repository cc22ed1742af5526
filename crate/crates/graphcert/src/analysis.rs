//! The end-to-end pipeline behind `analyze`: normalize the graph, build
//! and re-verify the certificate, and attach the fidelity radius.

use crate::bounds::{fidelity_threshold, BoundsError, FidelityBound};
use crate::certificate::{
    build_certificate, verify_certificate, BuildError, Certificate, EdgeRecord,
    NormalizationRecord, Rejection, Verdict,
};
use crate::graph::Multigraph;
use crate::normalize::{check_preconditions, normalize, overlap, CaseLabel, NormalizeError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("normalization failed: {0}")]
    Normalize(#[from] NormalizeError),
    #[error("certificate construction failed: {0}")]
    Build(#[from] BuildError),
    #[error("freshly built certificate was rejected at {0}")]
    SelfVerification(Rejection),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub d: u32,
    pub n: usize,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContradictionSummary {
    /// Exact expectation sum claimed by the certificate (`2d`).
    pub lhs: u32,
    /// The ceiling `d + √d` it exceeds.
    pub bound: f64,
    pub comm_exponent: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisReport {
    pub input: InputSummary,
    pub covered: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalization: Option<NormalizationRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_overlap: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contradiction: Option<ContradictionSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<FidelityBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_path: Option<String>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Human-readable rendering; numbers are formatted exactly as in the
    /// JSON rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "input: d={}, {} vertices, {} edge line(s)\n",
            self.input.d,
            self.input.n,
            self.input.edges.len()
        ));
        if !self.covered {
            out.push_str("covered: no\n");
            if let Some(reason) = &self.reason {
                out.push_str(&format!("reason: {reason}\n"));
            }
            return out;
        }
        out.push_str("covered: yes\n");
        if let Some(norm) = &self.normalization {
            out.push_str(&format!(
                "case: {} (after {} recorded transformation(s))\n",
                norm.case,
                norm.steps.len()
            ));
        }
        if let Some(c) = &self.contradiction {
            out.push_str(&format!(
                "incompatibility: expectation sum {} exceeds ceiling {}\n",
                c.lhs,
                json_number(c.bound)
            ));
        }
        if let Some(q) = self.q_overlap {
            out.push_str(&format!("q_overlap: {q}\n"));
        }
        if let Some(f) = &self.fidelity {
            out.push_str(&format!("delta_max: {}\n", json_number(f.delta_max)));
            out.push_str(&format!("f_min: {}\n", json_number(f.f_min)));
        }
        match (&self.certificate, &self.certificate_path) {
            (_, Some(path)) => out.push_str(&format!("certificate: written to {path}\n")),
            (Some(cert), None) => out.push_str(&format!(
                "certificate: verified ({} claims, {} steps)\n",
                cert.claims.len(),
                cert.steps.len()
            )),
            (None, None) => {}
        }
        out
    }
}

fn json_number(v: f64) -> String {
    serde_json::to_string(&v).expect("finite float")
}

fn summary(graph: &Multigraph, source: Option<String>) -> InputSummary {
    InputSummary {
        source,
        d: graph.dimension(),
        n: graph.vertex_count(),
        edges: graph
            .edges()
            .map(|(u, v, w)| EdgeRecord {
                u: u + 1,
                v: v + 1,
                w,
            })
            .collect(),
    }
}

/// The overlap parameter entering the fidelity threshold: the overlap
/// size plus one for graphs in the second case family, 1 otherwise.
pub fn q_overlap_for(case: CaseLabel, normalized: &Multigraph) -> u32 {
    match case {
        CaseLabel::Case2 => overlap(normalized).len() as u32 + 1,
        _ => 1,
    }
}

/// Runs the full pipeline on a parsed graph.
///
/// A graph outside the covered family yields `covered: false` rather
/// than an error; every failure after that point is internal.
pub fn analyze(
    graph: &Multigraph,
    source: Option<String>,
) -> Result<AnalysisReport, AnalysisError> {
    let input = summary(graph, source);
    if !check_preconditions(graph) {
        return Ok(AnalysisReport {
            input,
            covered: false,
            reason: Some(
                "not covered: the argument needs at least 3 vertices and a vertex with \
                 two or more neighbors"
                    .into(),
            ),
            normalization: None,
            q_overlap: None,
            contradiction: None,
            fidelity: None,
            certificate: None,
            certificate_path: None,
        });
    }
    let normalized = normalize(graph)?;
    let certificate = build_certificate(graph, &normalized)?;
    match verify_certificate(&certificate) {
        Verdict::Accept => {}
        Verdict::Reject(r) => return Err(AnalysisError::SelfVerification(r)),
    }
    let q = q_overlap_for(normalized.case, &normalized.graph);
    let fidelity = fidelity_threshold(graph.dimension(), q)?;
    Ok(AnalysisReport {
        input,
        covered: true,
        reason: None,
        normalization: Some(certificate.normalization.clone()),
        q_overlap: Some(q),
        contradiction: Some(ContradictionSummary {
            lhs: certificate.incompatibility_lhs(),
            bound: certificate.incompatibility_bound(),
            comm_exponent: certificate.contradiction.comm_exponent,
        }),
        fidelity: Some(fidelity),
        certificate: Some(certificate),
        certificate_path: None,
    })
}

/// Moves the embedded certificate out of the report, for callers that
/// write it to a separate file.
pub fn detach_certificate(report: &mut AnalysisReport, path: String) -> Option<Certificate> {
    let cert = report.certificate.take();
    if cert.is_some() {
        report.certificate_path = Some(path);
    }
    cert
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    #[test]
    fn triangle_report_numbers() {
        let g = parse_graph("dim 3\nvertices 3\nedge 1 2 2\nedge 1 3 1\n").unwrap();
        let report = analyze(&g, None).unwrap();
        assert!(report.covered);
        let c = report.contradiction.as_ref().unwrap();
        assert_eq!(c.lhs, 6);
        assert!((c.bound - (3.0 + 3f64.sqrt())).abs() < 1e-9);
        assert_eq!(report.q_overlap, Some(1));
        let f = report.fidelity.as_ref().unwrap();
        assert!(f.f_min > 0.9515 && f.f_min < 0.9520);
        let text = report.to_text();
        assert!(text.contains("case1"));
        assert!(text.contains(&serde_json::to_string(&f.f_min).unwrap()));
    }

    #[test]
    fn small_graph_is_not_covered() {
        let g = parse_graph("dim 3\nvertices 2\nedge 1 2 1\n").unwrap();
        let report = analyze(&g, None).unwrap();
        assert!(!report.covered);
        assert!(report.reason.as_deref().unwrap().contains("not covered"));
        assert!(report.certificate.is_none());
    }

    #[test]
    fn report_json_round_trips() {
        let g = parse_graph("dim 3\nvertices 3\nedge 1 2 2\nedge 1 3 1\n").unwrap();
        let report = analyze(&g, Some("triangle.graph".into())).unwrap();
        let text = report.to_json();
        let back = AnalysisReport::from_json(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(back.to_json(), text);
    }

    #[test]
    fn case2_reports_larger_overlap_parameter() {
        // head and anchor share two non-mirroring neighbors
        let g = parse_graph(
            "dim 3\nvertices 5\nedge 1 2 1\nedge 1 3 1\nedge 1 4 1\nedge 1 5 1\n\
             edge 2 3 1\nedge 2 4 1\nedge 3 5 1\nedge 4 5 2\n",
        )
        .unwrap();
        let report = analyze(&g, None).unwrap();
        if report.normalization.as_ref().unwrap().case == CaseLabel::Case2 {
            assert!(report.q_overlap.unwrap() >= 2);
        }
        assert!(report.covered);
    }
}
