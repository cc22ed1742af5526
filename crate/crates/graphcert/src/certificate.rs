//! Construction and independent verification of non-preparability
//! certificates.
//!
//! A certificate fixes the input graph, the normalization that brought
//! it into a case family, a table of claims (each asserting that some
//! operator has unit expectation on a state produced in some inflation),
//! a list of derivation steps, and a closing incompatibility: two
//! operator power families with a nonzero commutation exponent whose
//! combined expectation sum `2d` exceeds the `d + √d` ceiling that any
//! network state obeys.
//!
//! Step kinds:
//!
//! * `base_stabilizer` — the operator's support induces a fully
//!   connected subnetwork touching at most one anchor copy, so its
//!   expectation transfers from the original network, where the
//!   stabilizer oracle pins it to exactly 1.
//! * `inflation_transfer` — two inflations wire the operator's support
//!   identically under a per-party copy swap, so the expectations agree.
//! * `product_combine` — two commuting unit-expectation operators of
//!   order `d` multiply to a third unit-expectation operator.
//! * `power_lift` — a unit-expectation operator keeps unit expectation
//!   under powers.
//!
//! Claim ids are content-addressed (a hash of the inflation and the
//! operator), and the verifier re-derives every side-condition from
//! the claim table alone; builder annotations are never trusted.

use crate::graph::{GraphError, Multigraph};
use crate::inflation::{
    inflation_word, project_to_original, support_sites, CopyTag, InflationError, InflationSpec,
    Site, SwapAssignment,
};
use crate::modular;
use crate::normalize::{
    case3_witness, case4_witness, classify, replay, CaseLabel, Normalized, TransformLog,
    TransformStep, ANCHOR, HEAD,
};
use crate::pauli::{PauliError, PauliWord};
use crate::stabilizer::{expectation, StabilizerError};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;
use thiserror::Error;

pub const FORMAT_VERSION: &str = "1";

// ---------------------------------------------------------------------------
// serialized records
// ---------------------------------------------------------------------------

/// An edge of the input graph, 1-based endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub w: u32,
}

/// A normalization step with 1-based vertex references.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum TransformStepRecord {
    Relabel { perm: Vec<usize> },
    LocalComplement { pivot: usize, a: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizationRecord {
    pub steps: Vec<TransformStepRecord>,
    pub case: CaseLabel,
}

/// One tensor factor of a claim operator; `party` is 1-based, `copy`
/// is `"u"` (unprimed) or `"p"` (primed).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteRecord {
    pub party: usize,
    pub copy: CopyTag,
    pub x: u32,
    pub z: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorRecord {
    pub phase: u32,
    pub sites: Vec<SiteRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimRecord {
    pub id: String,
    #[serde(rename = "T")]
    pub t: Vec<usize>,
    pub operator: OperatorRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepRecord {
    BaseStabilizer {
        claim: String,
    },
    InflationTransfer {
        from: String,
        to: String,
        /// 1-based parties whose copies are exchanged by the matching.
        swap: Vec<usize>,
    },
    ProductCombine {
        premise1: String,
        premise2: String,
        conclusion: String,
    },
    PowerLift {
        base: String,
        exponent: u32,
        conclusion: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContradictionRecord {
    pub a1_claims: Vec<String>,
    pub a2_claims: Vec<String>,
    pub comm_exponent: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub version: String,
    pub d: u32,
    pub n: usize,
    pub graph: Vec<EdgeRecord>,
    pub normalization: NormalizationRecord,
    pub claims: Vec<ClaimRecord>,
    pub steps: Vec<StepRecord>,
    pub contradiction: ContradictionRecord,
}

impl Certificate {
    /// The expectation sum claimed by the power families (`2d`), always
    /// an exact integer.
    pub fn incompatibility_lhs(&self) -> u32 {
        2 * self.d
    }

    /// The ceiling `d + √d` any network state obeys.
    pub fn incompatibility_bound(&self) -> f64 {
        crate::bounds::expectation_ceiling(self.d)
    }

    /// Rebuilds the input graph recorded in the certificate.
    pub fn input_graph(&self) -> Result<Multigraph, GraphError> {
        let mut g = Multigraph::new(self.d, self.n)?;
        for e in &self.graph {
            if e.u == 0 || e.v == 0 {
                return Err(GraphError::VertexOutOfRange(0, self.n));
            }
            g.add_edge_weight(e.u - 1, e.v - 1, e.w)?;
        }
        Ok(g)
    }
}

// ---------------------------------------------------------------------------
// json round trip
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("certificate schema violation at /{path}: {message}")]
    Invalid { path: String, message: String },
}

pub fn to_json(cert: &Certificate) -> String {
    let mut s = serde_json::to_string_pretty(cert).expect("certificate serialization");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> Result<Certificate, SchemaError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| SchemaError::Invalid {
        path: e.path().to_string().replace('.', "/"),
        message: e.inner().to_string(),
    })
}

// ---------------------------------------------------------------------------
// conversions between records and working types
// ---------------------------------------------------------------------------

fn operator_record(word: &PauliWord, n: usize) -> OperatorRecord {
    let sites = word
        .support()
        .map(|idx| {
            let site = Site::from_index(idx, n);
            let e = word.site(idx);
            SiteRecord {
                party: site.party + 1,
                copy: site.copy,
                x: e.x,
                z: e.z,
            }
        })
        .collect();
    OperatorRecord {
        phase: word.phase(),
        sites,
    }
}

fn operator_from_record(d: u32, n: usize, rec: &OperatorRecord) -> Result<PauliWord, String> {
    if rec.phase >= d {
        return Err(format!("phase {} not reduced mod {}", rec.phase, d));
    }
    let mut seen = HashSet::new();
    let mut factors = Vec::with_capacity(rec.sites.len());
    for s in &rec.sites {
        if s.party == 0 || s.party > n {
            return Err(format!("party {} out of range 1..={}", s.party, n));
        }
        if s.x >= d || s.z >= d {
            return Err(format!(
                "exponents ({}, {}) not reduced mod {} at party {}",
                s.x, s.z, d, s.party
            ));
        }
        if s.x == 0 && s.z == 0 {
            return Err(format!("trivial site listed for party {}", s.party));
        }
        let site = Site {
            party: s.party - 1,
            copy: s.copy,
        };
        if !seen.insert(site) {
            return Err(format!("duplicate site for party {}", s.party));
        }
        factors.push((site, i64::from(s.x), i64::from(s.z)));
    }
    Ok(inflation_word(d, n, &factors).with_phase(i64::from(rec.phase)))
}

fn t_record(spec: &InflationSpec) -> Vec<usize> {
    spec.t().iter().map(|&p| p + 1).collect()
}

fn spec_from_record(n: usize, t: &[usize]) -> Result<InflationSpec, String> {
    let mut set = BTreeSet::new();
    for &p in t {
        if p == 0 {
            return Err("party 0 in T (parties are 1-based)".into());
        }
        if !set.insert(p - 1) {
            return Err(format!("duplicate party {p} in T"));
        }
    }
    InflationSpec::new(n, set).map_err(|e| e.to_string())
}

fn transform_step_record(step: &TransformStep) -> TransformStepRecord {
    match step {
        TransformStep::Relabel { perm } => TransformStepRecord::Relabel {
            perm: perm.iter().map(|&p| p + 1).collect(),
        },
        TransformStep::LocalComplement { pivot, a } => TransformStepRecord::LocalComplement {
            pivot: pivot + 1,
            a: *a,
        },
    }
}

fn transform_log_from_records(steps: &[TransformStepRecord]) -> Result<TransformLog, String> {
    let mut out = Vec::with_capacity(steps.len());
    for (i, s) in steps.iter().enumerate() {
        out.push(match s {
            TransformStepRecord::Relabel { perm } => {
                for &p in perm {
                    if p == 0 {
                        return Err(format!("normalization step {i}: 0 in permutation"));
                    }
                }
                TransformStep::Relabel {
                    perm: perm.iter().map(|&p| p - 1).collect(),
                }
            }
            TransformStepRecord::LocalComplement { pivot, a } => {
                if *pivot == 0 {
                    return Err(format!("normalization step {i}: pivot 0"));
                }
                TransformStep::LocalComplement {
                    pivot: pivot - 1,
                    a: *a,
                }
            }
        });
    }
    Ok(TransformLog(out))
}

/// Content address of a claim: a digest of the inflation set and the
/// canonical operator.
pub fn claim_id(d: u32, n: usize, spec: &InflationSpec, word: &PauliWord) -> String {
    let mut text = format!("claim|d={d}|n={n}|T=");
    for p in spec.t() {
        let _ = write!(text, "{p},");
    }
    let _ = write!(text, "|phase={}|", word.phase());
    for idx in word.support() {
        let e = word.site(idx);
        let _ = write!(text, "{idx}:{}:{};", e.x, e.z);
    }
    let digest = Sha256::digest(text.as_bytes());
    digest[..8].iter().fold(String::new(), |mut acc, b| {
        let _ = write!(acc, "{b:02x}");
        acc
    })
}

// ---------------------------------------------------------------------------
// shared step checks (used by the builder and the verifier)
// ---------------------------------------------------------------------------

/// Side-conditions of a `base_stabilizer` step. Returns the oracle
/// failure or structural defect, if any.
fn check_base(graph: &Multigraph, spec: &InflationSpec, word: &PauliWord) -> Result<(), String> {
    let n = spec.parties();
    let projected = project_to_original(word, n).map_err(|e| e.to_string())?;
    let sites = support_sites(word, n);
    if !spec.fully_connected(&sites) {
        return Err("support does not induce a fully connected subnetwork".into());
    }
    let verdict = expectation(graph, &projected).map_err(|e| e.to_string())?;
    if !verdict.is_one() {
        return Err(format!(
            "stabilizer oracle value is {:?}, not 1",
            verdict.value()
        ));
    }
    Ok(())
}

/// Side-conditions of a `product_combine` step.
fn check_combine(
    d: u32,
    premise1: &PauliWord,
    premise2: &PauliWord,
    conclusion: &PauliWord,
) -> Result<(), String> {
    let c = premise1
        .commutation_exponent(premise2)
        .map_err(|e| e.to_string())?;
    if c != 0 {
        return Err(format!("premises do not commute (exponent {c})"));
    }
    if !premise1.pow(u64::from(d)).is_identity() {
        return Err("first premise does not have order dividing d".into());
    }
    if !premise2.pow(u64::from(d)).is_identity() {
        return Err("second premise does not have order dividing d".into());
    }
    let product = premise1.mul(premise2).map_err(|e| e.to_string())?;
    if &product != conclusion {
        return Err("conclusion is not the exact product of the premises".into());
    }
    Ok(())
}

/// Side-conditions of a `power_lift` step.
fn check_power(
    d: u32,
    base: &PauliWord,
    exponent: u32,
    conclusion: &PauliWord,
) -> Result<(), String> {
    if exponent == 0 || exponent >= d {
        return Err(format!("exponent {exponent} outside 1..={}", d - 1));
    }
    if &base.pow(u64::from(exponent)) != conclusion {
        return Err("conclusion is not the stated power of the base".into());
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// builder
// ---------------------------------------------------------------------------

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("graph case {found} does not match requested case {requested}")]
    CaseMismatch {
        requested: CaseLabel,
        found: CaseLabel,
    },
    #[error("internal certificate check failed: {0}")]
    InternalCheckFailed(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Inflation(#[from] InflationError),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
}

struct Builder<'a> {
    graph: &'a Multigraph,
    d: u32,
    n: usize,
    claims: Vec<ClaimRecord>,
    lookup: HashMap<String, (InflationSpec, PauliWord)>,
    established: HashSet<String>,
    steps: Vec<StepRecord>,
}

impl<'a> Builder<'a> {
    fn new(graph: &'a Multigraph) -> Self {
        Builder {
            graph,
            d: graph.dimension(),
            n: graph.vertex_count(),
            claims: Vec::new(),
            lookup: HashMap::new(),
            established: HashSet::new(),
            steps: Vec::new(),
        }
    }

    fn intern(&mut self, spec: &InflationSpec, word: &PauliWord) -> String {
        let id = claim_id(self.d, self.n, spec, word);
        if !self.lookup.contains_key(&id) {
            self.claims.push(ClaimRecord {
                id: id.clone(),
                t: t_record(spec),
                operator: operator_record(word, self.n),
            });
            self.lookup.insert(id.clone(), (spec.clone(), word.clone()));
        }
        id
    }

    fn word_of(&self, id: &str) -> &PauliWord {
        &self.lookup[id].1
    }

    /// Generator of the normalized graph embedded on the unprimed copies.
    fn embedded_generator(&self, vertex: usize) -> PauliWord {
        let mut factors = vec![(Site::unprimed(vertex), 1i64, 0i64)];
        for j in self.graph.neighborhood(vertex) {
            factors.push((
                Site::unprimed(j),
                0,
                i64::from(self.graph.weight(vertex, j)),
            ));
        }
        inflation_word(self.d, self.n, &factors)
    }

    /// Moves the unprimed anchor factor of a word onto the primed anchor.
    fn twist_anchor(&self, word: &PauliWord) -> PauliWord {
        let n = self.n;
        let mut factors = Vec::new();
        for idx in word.support() {
            let site = Site::from_index(idx, n);
            let e = word.site(idx);
            let target = if site.party == ANCHOR {
                Site {
                    party: ANCHOR,
                    copy: site.copy.flipped(),
                }
            } else {
                site
            };
            factors.push((target, i64::from(e.x), i64::from(e.z)));
        }
        inflation_word(self.d, n, &factors).with_phase(i64::from(word.phase()))
    }

    fn base(&mut self, spec: &InflationSpec, word: PauliWord) -> Result<String, BuildError> {
        check_base(self.graph, spec, &word)
            .map_err(|e| BuildError::InternalCheckFailed(format!("base step: {e}")))?;
        let id = self.intern(spec, &word);
        if self.established.insert(id.clone()) {
            self.steps
                .push(StepRecord::BaseStabilizer { claim: id.clone() });
        }
        Ok(id)
    }

    fn transfer(
        &mut self,
        from_spec: &InflationSpec,
        from_id: &str,
        to_spec: &InflationSpec,
        to_word: PauliWord,
        swap: SwapAssignment,
    ) -> Result<String, BuildError> {
        let from_word = self.word_of(from_id).clone();
        crate::inflation::transfer_matches(from_spec, &from_word, to_spec, &to_word, &swap)
            .map_err(|e| BuildError::InternalCheckFailed(format!("transfer step: {e}")))?;
        let id = self.intern(to_spec, &to_word);
        if self.established.insert(id.clone()) {
            self.steps.push(StepRecord::InflationTransfer {
                from: from_id.to_string(),
                to: id.clone(),
                swap: swap.iter().map(|&p| p + 1).collect(),
            });
        }
        Ok(id)
    }

    fn combine(
        &mut self,
        spec: &InflationSpec,
        premise1: &str,
        premise2: &str,
    ) -> Result<String, BuildError> {
        let w1 = self.word_of(premise1).clone();
        let w2 = self.word_of(premise2).clone();
        let conclusion = w1.mul(&w2)?;
        check_combine(self.d, &w1, &w2, &conclusion)
            .map_err(|e| BuildError::InternalCheckFailed(format!("combine step: {e}")))?;
        let id = self.intern(spec, &conclusion);
        if self.established.insert(id.clone()) {
            self.steps.push(StepRecord::ProductCombine {
                premise1: premise1.to_string(),
                premise2: premise2.to_string(),
                conclusion: id.clone(),
            });
        }
        Ok(id)
    }

    fn lift(
        &mut self,
        spec: &InflationSpec,
        base: &str,
        exponent: u32,
    ) -> Result<String, BuildError> {
        let w = self.word_of(base).clone();
        let conclusion = w.pow(u64::from(exponent));
        check_power(self.d, &w, exponent, &conclusion)
            .map_err(|e| BuildError::InternalCheckFailed(format!("power step: {e}")))?;
        let id = self.intern(spec, &conclusion);
        if self.established.insert(id.clone()) {
            self.steps.push(StepRecord::PowerLift {
                base: base.to_string(),
                exponent,
                conclusion: id.clone(),
            });
        }
        Ok(id)
    }

    fn spec(&self, t: BTreeSet<usize>) -> Result<InflationSpec, BuildError> {
        Ok(InflationSpec::new(self.n, t)?)
    }

    fn weight(&self, i: usize, j: usize) -> u32 {
        self.graph.weight(i, j)
    }
}

/// Builds the certificate for a normalized graph, self-verifying every
/// step; the result always passes [`verify_certificate`].
pub fn build_certificate(
    input: &Multigraph,
    normalized: &Normalized,
) -> Result<Certificate, BuildError> {
    let found = classify(&normalized.graph);
    if found != normalized.case || found == CaseLabel::NotApplicable {
        return Err(BuildError::CaseMismatch {
            requested: normalized.case,
            found,
        });
    }
    let mut b = Builder::new(&normalized.graph);
    let (a1_claims, a2_claims) = match normalized.case {
        CaseLabel::Case1 | CaseLabel::Case2 => build_overlap_chain(&mut b)?,
        CaseLabel::Case3 => {
            let v = case3_witness(&normalized.graph).ok_or_else(|| {
                BuildError::InternalCheckFailed("case3 without witness vertex".into())
            })?;
            let d = b.d;
            let l = modular::mul(
                modular::neg(b.weight(HEAD, ANCHOR), d),
                modular::inv(b.weight(HEAD, v), d),
                d,
            );
            build_mirror_chain(&mut b, v, l)?
        }
        CaseLabel::Case4 => {
            let (v, a) = case4_witness(&normalized.graph).ok_or_else(|| {
                BuildError::InternalCheckFailed("case4 without witness vertex".into())
            })?;
            let l = modular::mul(a, b.weight(ANCHOR, v), b.d);
            build_mirror_chain(&mut b, v, l)?
        }
        CaseLabel::NotApplicable => unreachable!("rejected above"),
    };

    let a1_word = b.word_of(&a1_claims[0]).clone();
    let a2_word = b.word_of(&a2_claims[0]).clone();
    let comm = a1_word.commutation_exponent(&a2_word)?;
    if comm == 0 {
        return Err(BuildError::InternalCheckFailed(
            "closing operators commute".into(),
        ));
    }

    let cert = Certificate {
        version: FORMAT_VERSION.to_string(),
        d: b.d,
        n: b.n,
        graph: input
            .edges()
            .map(|(u, v, w)| EdgeRecord {
                u: u + 1,
                v: v + 1,
                w,
            })
            .collect(),
        normalization: NormalizationRecord {
            steps: normalized
                .log
                .steps()
                .iter()
                .map(transform_step_record)
                .collect(),
            case: normalized.case,
        },
        claims: b.claims,
        steps: b.steps,
        contradiction: ContradictionRecord {
            a1_claims,
            a2_claims,
            comm_exponent: comm,
        },
    };

    match verify_certificate(&cert) {
        Verdict::Accept => Ok(cert),
        Verdict::Reject(r) => Err(BuildError::InternalCheckFailed(format!(
            "self-verification rejected at {}: {}",
            r.location, r.reason
        ))),
    }
}

/// Cases 1 and 2: walk the overlap of the head and anchor neighborhoods
/// down to the two-copy inflation, then pull the anchor-twisted head
/// generator and the anchor generator onto a common inflation.
fn build_overlap_chain(b: &mut Builder) -> Result<(Vec<String>, Vec<String>), BuildError> {
    let d = b.d;
    let g = b.graph;
    let n1 = g.neighborhood(HEAD);
    let n2 = g.neighborhood(ANCHOR);
    let inter: Vec<usize> = n1.intersection(&n2).copied().collect();

    let mut t0: BTreeSet<usize> = n1.difference(&n2).copied().collect();
    t0.remove(&ANCHOR);
    t0.insert(HEAD);
    let i0 = b.spec(t0)?;

    // T_1 is the whole overlap; each later inflation drops one vertex.
    let mut specs = Vec::with_capacity(inter.len() + 1);
    let mut t = inter.iter().copied().collect::<BTreeSet<usize>>();
    specs.push(b.spec(t.clone())?); // index 0 ↦ T_1
    for &v in &inter {
        t.remove(&v);
        specs.push(b.spec(t.clone())?);
    }
    debug_assert!(specs.last().unwrap().t().is_empty());

    let g1 = b.embedded_generator(HEAD);
    // ⟨g_1⟩ on the two-copy inflation comes straight from the original.
    let mut current = b.base(specs.last().unwrap(), g1.clone())?;
    // Walk back towards T_1, reattaching one overlap vertex per round.
    for j in (0..inter.len()).rev() {
        let v = inter[j];
        let lower = specs[j].clone();
        let upper = specs[j + 1].clone();
        current = overlap_step(b, &lower, &upper, &current, v)?;
    }

    // Head family: twist the anchor factor onto the primed copy.
    let g1_twisted = b.twist_anchor(&g1);
    let i1 = specs[0].clone();
    let a1_base = b.transfer(&i1, &current, &i0, g1_twisted, [ANCHOR].into())?;
    let mut a1_claims = vec![a1_base.clone()];
    for k in 2..d {
        a1_claims.push(b.lift(&i0, &a1_base, k)?);
    }

    // Anchor family via the singleton inflation T = {head}.
    let i_head = b.spec([HEAD].into())?;
    let witness = *n1
        .difference(&n2)
        .find(|&&i| i != ANCHOR)
        .expect("normal form guarantees a head neighbor outside the anchor's reach");
    let l = modular::mul(
        modular::neg(b.weight(HEAD, ANCHOR), d),
        modular::inv(b.weight(HEAD, witness), d),
        d,
    );
    let g2 = b.embedded_generator(ANCHOR);
    let gi = b.embedded_generator(witness);
    let u1 = b.base(&i_head, g2.mul(&gi.pow(u64::from(l)))?)?;
    let u2 = b.base(&i_head, gi.pow(u64::from(modular::neg(l, d))))?;
    let g2_at_head = b.combine(&i_head, &u1, &u2)?;
    let a2_base = b.transfer(&i_head, &g2_at_head, &i0, g2, SwapAssignment::new())?;
    let mut a2_claims = vec![a2_base.clone()];
    for k in 2..d {
        a2_claims.push(b.lift(&i0, &a2_base, k)?);
    }
    Ok((a1_claims, a2_claims))
}

/// One round of the overlap walk: given `⟨g_1⟩` on `upper` (whose `T`
/// excludes `v`), derive it on `lower` (`T` includes `v`).
fn overlap_step(
    b: &mut Builder,
    lower: &InflationSpec,
    upper: &InflationSpec,
    g1_upper: &str,
    v: usize,
) -> Result<String, BuildError> {
    let d = b.d;
    let g = b.graph;
    let nv = g.neighborhood(v);
    let n2 = g.neighborhood(ANCHOR);
    let g1 = b.embedded_generator(HEAD);

    // A witness vertex separates the anchor's and v's neighborhoods.
    let outside_anchor = nv
        .iter()
        .find(|&&i| i != ANCHOR && i != v && !n2.contains(&i))
        .copied();
    if let Some(i) = outside_anchor {
        // witness adjacent to v but not to the anchor
        let l = modular::mul(
            modular::neg(b.weight(HEAD, v), d),
            modular::inv(b.weight(i, v), d),
            d,
        );
        let gi = b.embedded_generator(i);
        let w1 = b.base(upper, gi.pow(u64::from(l)))?;
        let c1 = b.combine(upper, g1_upper, &w1)?;
        let moved = b.word_of(&c1).clone();
        let c2 = b.transfer(upper, &c1, lower, moved, SwapAssignment::new())?;
        let w2 = b.base(lower, gi.pow(u64::from(modular::neg(l, d))))?;
        return b.combine(lower, &c2, &w2);
    }
    let outside_v = n2
        .iter()
        .find(|&&i| i != ANCHOR && i != v && !nv.contains(&i))
        .copied();
    if let Some(i) = outside_v {
        // witness adjacent to the anchor but not to v
        let l = modular::mul(
            modular::neg(b.weight(HEAD, ANCHOR), d),
            modular::inv(b.weight(ANCHOR, i), d),
            d,
        );
        let gi = b.embedded_generator(i);
        let with_witness = g1.mul(&gi.pow(u64::from(l)))?;
        let w1 = b.base(lower, with_witness.clone())?;
        let w2 = b.base(upper, with_witness.inverse())?;
        let c1 = b.combine(upper, g1_upper, &w2)?;
        let moved = b.word_of(&c1).clone();
        let c2 = b.transfer(upper, &c1, lower, moved, SwapAssignment::new())?;
        return b.combine(lower, &w1, &c2);
    }
    Err(BuildError::InternalCheckFailed(format!(
        "no witness vertex for overlap vertex {v}; the case2 predicate should guarantee one"
    )))
}

/// Cases 3 and 4: a single overlap vertex `v` mirrors the anchor;
/// combine the anchor and `v` generators into a two-party word, twist
/// it onto the primed anchor, and close against the head generator.
fn build_mirror_chain(
    b: &mut Builder,
    v: usize,
    l: u32,
) -> Result<(Vec<String>, Vec<String>), BuildError> {
    let d = b.d;
    let g = b.graph;
    let case = classify(g);

    let t0: BTreeSet<usize> = match case {
        CaseLabel::Case3 => {
            let mut s = g.neighborhood(ANCHOR);
            s.remove(&HEAD);
            s.remove(&v);
            s
        }
        CaseLabel::Case4 => BTreeSet::new(),
        _ => {
            return Err(BuildError::InternalCheckFailed(
                "mirror chain invoked outside cases 3/4".into(),
            ))
        }
    };
    let i0 = b.spec(t0)?;
    let i1 = b.spec([v].into())?;

    let g1 = b.embedded_generator(HEAD);
    let g2 = b.embedded_generator(ANCHOR);
    let gv = b.embedded_generator(v);

    // Two candidate mixing exponents; the first with both required
    // component cancellations wins.
    let m_inverse = modular::mul(b.weight(ANCHOR, v), modular::inv(b.weight(HEAD, v), d), d);
    let m_literal = modular::neg(modular::mul(b.weight(ANCHOR, v), b.weight(HEAD, v), d), d);
    let mut chosen = None;
    for m in [m_inverse, m_literal] {
        let p1 = g1.pow(u64::from(modular::neg(m, d))).mul(&g2)?;
        let p2 = g1.pow(u64::from(m)).mul(&gv.pow(u64::from(l)))?;
        let p1_clears_v = p1.site(Site::unprimed(v).index(b.n)).is_trivial();
        let p2_clears_anchor = p2.site(Site::unprimed(ANCHOR).index(b.n)).is_trivial();
        if p1_clears_v && p2_clears_anchor {
            chosen = Some((p1, p2));
            break;
        }
    }
    let Some((p1, p2)) = chosen else {
        return Err(BuildError::InternalCheckFailed(
            "no mixing exponent cancels both components".into(),
        ));
    };

    let w1 = b.base(&i1, p1)?;
    let w2 = b.base(&i1, p2)?;
    let combined = b.combine(&i1, &w1, &w2)?;
    let twisted = b.twist_anchor(&b.word_of(&combined).clone());
    let a1_base = b.transfer(&i1, &combined, &i0, twisted, [ANCHOR].into())?;
    let mut a1_claims = vec![a1_base.clone()];
    for k in 2..d {
        a1_claims.push(b.lift(&i0, &a1_base, k)?);
    }

    let a2_base = b.base(&i0, g1)?;
    let mut a2_claims = vec![a2_base.clone()];
    for k in 2..d {
        a2_claims.push(b.lift(&i0, &a2_base, k)?);
    }
    Ok((a1_claims, a2_claims))
}

// ---------------------------------------------------------------------------
// verifier
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(Rejection),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// First failing location and the side-condition it violated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub location: String,
    pub reason: String,
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.reason)
    }
}

macro_rules! reject {
    ($loc:expr, $($arg:tt)*) => {
        return Verdict::Reject(Rejection {
            location: $loc.to_string(),
            reason: format!($($arg)*),
        })
    };
}

/// Re-derives every structural and semantic side-condition of a
/// certificate. Nothing from the builder is trusted: the normalization
/// is replayed, claim ids are recomputed, and each step's conditions
/// are checked against the claim table.
pub fn verify_certificate(cert: &Certificate) -> Verdict {
    if cert.version != FORMAT_VERSION {
        reject!("version", "unsupported version {:?}", cert.version);
    }
    if !modular::is_prime(cert.d) {
        reject!("d", "dimension {} is not prime", cert.d);
    }
    let input = match cert.input_graph() {
        Ok(g) => g,
        Err(e) => reject!("graph", "invalid edge list: {e}"),
    };

    // (a) normalization replay and case predicate
    let log = match transform_log_from_records(&cert.normalization.steps) {
        Ok(l) => l,
        Err(e) => reject!("normalization", "{e}"),
    };
    let normalized = match replay(&input, &log) {
        Ok(g) => g,
        Err(e) => reject!("normalization", "replay failed: {e}"),
    };
    if cert.normalization.case == CaseLabel::NotApplicable {
        reject!("normalization", "case must be one of the four families");
    }
    if classify(&normalized) != cert.normalization.case {
        reject!(
            "normalization",
            "replayed graph classifies as {}, record says {}",
            classify(&normalized),
            cert.normalization.case
        );
    }

    // claim table
    let mut table: HashMap<String, (InflationSpec, PauliWord)> = HashMap::new();
    for (i, claim) in cert.claims.iter().enumerate() {
        let loc = format!("claims[{i}]");
        let spec = match spec_from_record(cert.n, &claim.t) {
            Ok(s) => s,
            Err(e) => reject!(loc, "{e}"),
        };
        let word = match operator_from_record(cert.d, cert.n, &claim.operator) {
            Ok(w) => w,
            Err(e) => reject!(loc, "{e}"),
        };
        let expected_id = claim_id(cert.d, cert.n, &spec, &word);
        if claim.id != expected_id {
            reject!(
                loc,
                "content address mismatch: {} vs {}",
                claim.id,
                expected_id
            );
        }
        if table.insert(claim.id.clone(), (spec, word)).is_some() {
            reject!(loc, "duplicate claim id {}", claim.id);
        }
    }

    // (b)–(e) steps in order
    let mut established: HashSet<String> = HashSet::new();
    for (i, step) in cert.steps.iter().enumerate() {
        let loc = format!("steps[{i}]");
        let fetch = |id: &str| table.get(id);
        match step {
            StepRecord::BaseStabilizer { claim } => {
                let Some((spec, word)) = fetch(claim) else {
                    reject!(loc, "unknown claim {claim}");
                };
                if let Err(e) = check_base(&normalized, spec, word) {
                    reject!(loc, "base_stabilizer: {e}");
                }
                established.insert(claim.clone());
            }
            StepRecord::InflationTransfer { from, to, swap } => {
                let Some((from_spec, from_word)) = fetch(from) else {
                    reject!(loc, "unknown claim {from}");
                };
                let Some((to_spec, to_word)) = fetch(to) else {
                    reject!(loc, "unknown claim {to}");
                };
                if !established.contains(from) {
                    reject!(loc, "premise {from} not established");
                }
                let mut assignment = SwapAssignment::new();
                for &p in swap {
                    if p == 0 || p > cert.n {
                        reject!(loc, "swap party {p} out of range");
                    }
                    if !assignment.insert(p - 1) {
                        reject!(loc, "duplicate swap party {p}");
                    }
                }
                if let Err(e) = crate::inflation::transfer_matches(
                    from_spec,
                    from_word,
                    to_spec,
                    to_word,
                    &assignment,
                ) {
                    reject!(loc, "inflation_transfer: {e}");
                }
                established.insert(to.clone());
            }
            StepRecord::ProductCombine {
                premise1,
                premise2,
                conclusion,
            } => {
                let (Some((s1, w1)), Some((s2, w2)), Some((s3, w3))) =
                    (fetch(premise1), fetch(premise2), fetch(conclusion))
                else {
                    reject!(loc, "unknown claim reference");
                };
                if !established.contains(premise1) {
                    reject!(loc, "premise {premise1} not established");
                }
                if !established.contains(premise2) {
                    reject!(loc, "premise {premise2} not established");
                }
                if s1 != s2 || s1 != s3 {
                    reject!(loc, "premises and conclusion live on different inflations");
                }
                if let Err(e) = check_combine(cert.d, w1, w2, w3) {
                    reject!(loc, "product_combine: {e}");
                }
                established.insert(conclusion.clone());
            }
            StepRecord::PowerLift {
                base,
                exponent,
                conclusion,
            } => {
                let (Some((sb, wb)), Some((sc, wc))) = (fetch(base), fetch(conclusion)) else {
                    reject!(loc, "unknown claim reference");
                };
                if !established.contains(base) {
                    reject!(loc, "premise {base} not established");
                }
                if sb != sc {
                    reject!(loc, "base and conclusion live on different inflations");
                }
                if let Err(e) = check_power(cert.d, wb, *exponent, wc) {
                    reject!(loc, "power_lift: {e}");
                }
                established.insert(conclusion.clone());
            }
        }
    }

    for claim in &cert.claims {
        if !established.contains(&claim.id) {
            reject!("claims", "claim {} is never established", claim.id);
        }
    }

    // (f) the closing incompatibility
    let con = &cert.contradiction;
    let expected_len = (cert.d - 1) as usize;
    if con.a1_claims.len() != expected_len || con.a2_claims.len() != expected_len {
        reject!(
            "contradiction",
            "power families must list d-1 = {expected_len} claims each"
        );
    }
    let family = |ids: &[String], label: &str| -> Result<PauliWord, Rejection> {
        let rejection = |reason: String| Rejection {
            location: "contradiction".to_string(),
            reason,
        };
        let (first_spec, first_word) = table
            .get(&ids[0])
            .ok_or_else(|| rejection(format!("unknown claim {}", ids[0])))?;
        for (k, id) in ids.iter().enumerate() {
            let (spec, word) = table
                .get(id)
                .ok_or_else(|| rejection(format!("unknown claim {id}")))?;
            if !established.contains(id) {
                return Err(rejection(format!("claim {id} not established")));
            }
            if spec != first_spec {
                return Err(rejection(format!(
                    "{label} claims are not all on one inflation"
                )));
            }
            let expect = first_word.pow(k as u64 + 1);
            if word != &expect {
                return Err(rejection(format!(
                    "{label} claim {} is not the {}th power of the family base",
                    id,
                    k + 1
                )));
            }
        }
        if !first_word.pow(u64::from(cert.d)).is_identity() {
            return Err(rejection(format!(
                "{label} base does not have order dividing d"
            )));
        }
        Ok(first_word.clone())
    };
    let a1 = match family(&con.a1_claims, "a1") {
        Ok(w) => w,
        Err(r) => return Verdict::Reject(r),
    };
    let a2 = match family(&con.a2_claims, "a2") {
        Ok(w) => w,
        Err(r) => return Verdict::Reject(r),
    };
    // both families must live on the same inflation
    let spec_a1 = &table[&con.a1_claims[0]].0;
    let spec_a2 = &table[&con.a2_claims[0]].0;
    if spec_a1 != spec_a2 {
        reject!(
            "contradiction",
            "the two families live on different inflations"
        );
    }
    let q = match a1.commutation_exponent(&a2) {
        Ok(q) => q,
        Err(e) => reject!("contradiction", "incompatible operators: {e}"),
    };
    if q == 0 {
        reject!("contradiction", "closing operators commute");
    }
    if q != con.comm_exponent {
        reject!(
            "contradiction",
            "recorded commutation exponent {} differs from recomputed {q}",
            con.comm_exponent
        );
    }
    // 2d > d + √d for every d ≥ 2, in exact integer form d² > d.
    let d = u64::from(cert.d);
    if d * d <= d {
        reject!("contradiction", "expectation sum does not exceed the bound");
    }
    Verdict::Accept
}

/// Checks a certificate against an externally supplied graph.
pub fn verify_against_graph(cert: &Certificate, graph: &Multigraph) -> Verdict {
    match cert.input_graph() {
        Ok(g) if &g == graph => verify_certificate(cert),
        Ok(_) => Verdict::Reject(Rejection {
            location: "graph".into(),
            reason: "certificate was issued for a different graph".into(),
        }),
        Err(e) => Verdict::Reject(Rejection {
            location: "graph".into(),
            reason: format!("invalid edge list: {e}"),
        }),
    }
}
