//! Hostile-input behavior of the certificate verifier: structural JSON
//! mutations must never panic, and each side-condition has a directed
//! test that trips it.

use graphcert::certificate::{
    build_certificate, from_json, to_json, verify_certificate, Certificate, StepRecord, Verdict,
};
use graphcert::graph::parse_graph;
use graphcert::normalize::normalize;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn certificate_for(text: &str) -> Certificate {
    let g = parse_graph(text).unwrap();
    let norm = normalize(&g).unwrap();
    build_certificate(&g, &norm).unwrap()
}

fn sample_certificates() -> Vec<Certificate> {
    vec![
        certificate_for("dim 3\nvertices 3\nedge 1 2 2\nedge 1 3 1\n"),
        certificate_for("dim 2\nvertices 3\nedge 1 2 1\nedge 1 3 1\n"),
        certificate_for("dim 3\nvertices 4\nedge 1 2 1\nedge 1 3 1\nedge 1 4 1\nedge 2 3 1\n"),
        certificate_for(
            "dim 5\nvertices 5\nedge 1 2 1\nedge 1 3 1\nedge 1 4 1\nedge 1 5 1\n\
             edge 2 3 1\nedge 2 4 1\nedge 3 4 1\n",
        ),
    ]
}

/// Collects mutable paths through a JSON tree.
fn paths(value: &Value, prefix: Vec<String>, out: &mut Vec<Vec<String>>) {
    out.push(prefix.clone());
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let mut p = prefix.clone();
                p.push(k.clone());
                paths(v, p, out);
            }
        }
        Value::Array(arr) => {
            for (i, v) in arr.iter().enumerate() {
                let mut p = prefix.clone();
                p.push(i.to_string());
                paths(v, p, out);
            }
        }
        _ => {}
    }
}

fn node_mut<'a>(root: &'a mut Value, path: &[String]) -> Option<&'a mut Value> {
    let mut cur = root;
    for seg in path {
        cur = match cur {
            Value::Object(map) => map.get_mut(seg)?,
            Value::Array(arr) => arr.get_mut(seg.parse::<usize>().ok()?)?,
            _ => return None,
        };
    }
    Some(cur)
}

/// Randomly rewrites one node of the JSON tree.
fn mutate(root: &mut Value, rng: &mut ChaCha8Rng) {
    let mut all = Vec::new();
    paths(root, Vec::new(), &mut all);
    let path = &all[rng.gen_range(0..all.len())];
    let Some(node) = node_mut(root, path) else {
        return;
    };
    match rng.gen_range(0..6) {
        0 => *node = Value::Null,
        1 => *node = Value::from(rng.gen_range(-3i64..50)),
        2 => *node = Value::from("zzz"),
        3 => {
            if let Value::Array(arr) = node {
                if !arr.is_empty() {
                    let i = rng.gen_range(0..arr.len());
                    arr.remove(i);
                } else {
                    arr.push(Value::from(1));
                }
            } else {
                *node = Value::Array(vec![]);
            }
        }
        4 => {
            if let Value::Object(map) = node {
                let keys: Vec<String> = map.keys().cloned().collect();
                if let Some(k) = keys.first() {
                    map.remove(k);
                }
            } else {
                *node = Value::Bool(rng.gen());
            }
        }
        _ => {
            if let Value::Number(n) = &node {
                let base = n.as_i64().unwrap_or(0);
                *node = Value::from(base + rng.gen_range(1..7));
            } else if let Value::String(s) = node {
                s.push('x');
            } else {
                *node = Value::from(rng.gen_range(0..9));
            }
        }
    }
}

#[test]
fn structural_fuzzing_never_panics_and_never_forges() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for cert in sample_certificates() {
        assert_eq!(verify_certificate(&cert), Verdict::Accept);
        let baseline: Value = serde_json::from_str(&to_json(&cert)).unwrap();
        for _ in 0..800 {
            let mut value = baseline.clone();
            for _ in 0..rng.gen_range(1..=3) {
                mutate(&mut value, &mut rng);
            }
            if value == baseline {
                continue;
            }
            let text = value.to_string();
            // either the schema rejects it, or the verifier must reach a
            // verdict without panicking; forged acceptance is impossible
            // because any content change breaks a checked condition
            if let Ok(parsed) = from_json(&text) {
                if parsed != cert {
                    let verdict = verify_certificate(&parsed);
                    assert!(!verdict.is_accept(), "mutated certificate accepted: {text}");
                }
            }
        }
    }
}

fn triangle() -> Certificate {
    certificate_for("dim 3\nvertices 3\nedge 1 2 2\nedge 1 3 1\n")
}

#[test]
fn steps_out_of_order_are_rejected() {
    let mut cert = triangle();
    cert.steps.reverse();
    let Verdict::Reject(r) = verify_certificate(&cert) else {
        panic!("reordered steps accepted");
    };
    assert!(r.reason.contains("not established"), "{r}");
}

#[test]
fn dangling_claim_reference_is_rejected() {
    let mut cert = triangle();
    if let StepRecord::BaseStabilizer { claim } = &mut cert.steps[0] {
        *claim = "feedfacefeedface".into();
    } else {
        panic!("first step should be a base");
    }
    let Verdict::Reject(r) = verify_certificate(&cert) else {
        panic!("dangling reference accepted");
    };
    assert!(r.reason.contains("unknown claim"), "{r}");
}

#[test]
fn orphaned_claims_are_rejected() {
    use graphcert::certificate::claim_id;
    use graphcert::inflation::{inflation_word, InflationSpec, Site};

    let mut cert = triangle();
    // an address-consistent claim nobody establishes: the same operator
    // as the first claim, moved to a different inflation
    let mut extra = cert.claims[0].clone();
    extra.t = vec![3];
    let spec = InflationSpec::new(cert.n, [2usize].into()).unwrap();
    let factors: Vec<(Site, i64, i64)> = extra
        .operator
        .sites
        .iter()
        .map(|s| {
            (
                Site {
                    party: s.party - 1,
                    copy: s.copy,
                },
                i64::from(s.x),
                i64::from(s.z),
            )
        })
        .collect();
    let word = inflation_word(cert.d, cert.n, &factors).with_phase(i64::from(extra.operator.phase));
    extra.id = claim_id(cert.d, cert.n, &spec, &word);
    cert.claims.push(extra);
    let Verdict::Reject(r) = verify_certificate(&cert) else {
        panic!("orphaned claim accepted");
    };
    assert!(r.reason.contains("never established"), "{r}");
}

#[test]
fn truncated_power_family_is_rejected() {
    let mut cert = triangle();
    cert.contradiction.a1_claims.pop();
    let Verdict::Reject(r) = verify_certificate(&cert) else {
        panic!("short family accepted");
    };
    assert!(r.reason.contains("d-1"), "{r}");
}

#[test]
fn mixed_inflation_families_are_rejected() {
    let mut cert = triangle();
    // swap one member of the a1 family with an established claim from a
    // different inflation (the base claim of the derivation chain)
    let foreign = match &cert.steps[0] {
        StepRecord::BaseStabilizer { claim } => claim.clone(),
        other => panic!("unexpected first step {other:?}"),
    };
    cert.contradiction.a1_claims[1] = foreign;
    let Verdict::Reject(r) = verify_certificate(&cert) else {
        panic!("mixed families accepted");
    };
    assert!(r.location.contains("contradiction"), "{r}");
}

#[test]
fn non_prime_dimension_is_rejected() {
    let mut cert = triangle();
    cert.d = 6;
    let Verdict::Reject(r) = verify_certificate(&cert) else {
        panic!("non-prime dimension accepted");
    };
    assert!(r.reason.contains("prime"), "{r}");
}

#[test]
fn duplicated_claim_ids_are_rejected() {
    let mut cert = triangle();
    let clone = cert.claims[0].clone();
    cert.claims.push(clone);
    let Verdict::Reject(r) = verify_certificate(&cert) else {
        panic!("duplicate ids accepted");
    };
    assert!(r.reason.contains("duplicate"), "{r}");
}

#[test]
fn anchor_in_t_is_rejected() {
    let mut cert = triangle();
    cert.claims[0].t.push(2);
    assert!(!verify_certificate(&cert).is_accept());
}

#[test]
fn normalization_case_mismatch_is_rejected() {
    let mut cert = triangle();
    cert.normalization.case = graphcert::normalize::CaseLabel::Case2;
    let Verdict::Reject(r) = verify_certificate(&cert) else {
        panic!("wrong case accepted");
    };
    assert!(r.location.contains("normalization"), "{r}");
}
