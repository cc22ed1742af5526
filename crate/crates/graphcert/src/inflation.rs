//! Two-copy network inflations and their source connectivity.
//!
//! An inflation duplicates every party of a fully connected N-party
//! network. Non-anchor copies with the same priming are pairwise
//! connected; each non-anchor party is wired to exactly one copy of the
//! anchor (the distinguished party at position [`ANCHOR`]), and its
//! primed twin to the other. The set `T` of unprimed non-anchor parties
//! wired to the *primed* anchor therefore determines the whole layout.
//!
//! Operators on an inflation live on a `2n`-site register: sites
//! `0..n` are the unprimed copies, sites `n..2n` the primed ones.

use crate::normalize::ANCHOR;
use crate::pauli::{PauliError, PauliWord, SiteExponents};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InflationError {
    #[error("party {0} out of range for {1} parties")]
    PartyOutOfRange(usize, usize),
    #[error("the anchor party cannot be a member of T")]
    AnchorInT,
    #[error("operator register has {0} sites, expected {1}")]
    RegisterMismatch(usize, usize),
    #[error("support touches both copies of party {0}")]
    BothCopies(usize),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Which copy of a party a site belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CopyTag {
    #[serde(rename = "u")]
    Unprimed,
    #[serde(rename = "p")]
    Primed,
}

impl CopyTag {
    pub fn flipped(self) -> Self {
        match self {
            CopyTag::Unprimed => CopyTag::Primed,
            CopyTag::Primed => CopyTag::Unprimed,
        }
    }
}

/// One site of the doubled register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Site {
    pub party: usize,
    pub copy: CopyTag,
}

impl Site {
    pub fn unprimed(party: usize) -> Self {
        Site {
            party,
            copy: CopyTag::Unprimed,
        }
    }

    pub fn primed(party: usize) -> Self {
        Site {
            party,
            copy: CopyTag::Primed,
        }
    }

    /// Register index of this site for `n` parties.
    pub fn index(self, n: usize) -> usize {
        match self.copy {
            CopyTag::Unprimed => self.party,
            CopyTag::Primed => n + self.party,
        }
    }

    pub fn from_index(index: usize, n: usize) -> Self {
        if index < n {
            Site::unprimed(index)
        } else {
            Site::primed(index - n)
        }
    }
}

/// A two-copy inflation of a fully connected `n`-party network,
/// identified by the set `T` of unprimed non-anchor parties connected
/// to the primed anchor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InflationSpec {
    n: usize,
    t: BTreeSet<usize>,
}

impl InflationSpec {
    pub fn new(n: usize, t: BTreeSet<usize>) -> Result<Self, InflationError> {
        for &p in &t {
            if p >= n {
                return Err(InflationError::PartyOutOfRange(p, n));
            }
            if p == ANCHOR {
                return Err(InflationError::AnchorInT);
            }
        }
        Ok(InflationSpec { n, t })
    }

    pub fn parties(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> &BTreeSet<usize> {
        &self.t
    }

    pub fn register_size(&self) -> usize {
        2 * self.n
    }

    /// Whether two sites share a source.
    ///
    /// Same-party copies never do. Two non-anchor sites share one iff
    /// they carry the same priming. A non-anchor site and an anchor copy
    /// share one according to membership of the party in `T`.
    pub fn connected(&self, a: Site, b: Site) -> bool {
        if a.party == b.party {
            return false;
        }
        let anchored = (a.party == ANCHOR) as u8 + (b.party == ANCHOR) as u8;
        match anchored {
            0 => a.copy == b.copy,
            1 => {
                let (anchor_site, other) = if a.party == ANCHOR { (a, b) } else { (b, a) };
                let wired_to_primed_anchor = self.t.contains(&other.party);
                let same = anchor_site.copy == other.copy;
                same != wired_to_primed_anchor
            }
            _ => unreachable!("a.party == b.party was handled above"),
        }
    }

    /// True when every pair of the given sites (on distinct parties)
    /// shares a source.
    pub fn fully_connected(&self, sites: &[Site]) -> bool {
        for (i, &a) in sites.iter().enumerate() {
            for &b in &sites[i + 1..] {
                if a.party != b.party && !self.connected(a, b) {
                    return false;
                }
            }
        }
        true
    }
}

/// Builds a word on the doubled register from per-site factors.
pub fn inflation_word(d: u32, n: usize, factors: &[(Site, i64, i64)]) -> PauliWord {
    let mut w = PauliWord::identity(d, 2 * n);
    for &(site, x, z) in factors {
        w = w.with_site_factor(site.index(n), x, z);
    }
    w
}

/// Sites carrying a nontrivial factor.
pub fn support_sites(word: &PauliWord, n: usize) -> Vec<Site> {
    word.support().map(|i| Site::from_index(i, n)).collect()
}

/// Parties with a nontrivial factor on at least one copy.
pub fn support_parties(word: &PauliWord, n: usize) -> BTreeSet<usize> {
    support_sites(word, n).iter().map(|s| s.party).collect()
}

/// Projects an inflation operator onto the single-copy network.
///
/// Requires that no party carries nontrivial factors on both copies;
/// each supported site then maps to its party, keeping the phase.
pub fn project_to_original(word: &PauliWord, n: usize) -> Result<PauliWord, InflationError> {
    if word.num_sites() != 2 * n {
        return Err(InflationError::RegisterMismatch(word.num_sites(), 2 * n));
    }
    let mut out = PauliWord::identity(word.dimension(), n).with_phase(i64::from(word.phase()));
    let mut seen: Vec<Option<CopyTag>> = vec![None; n];
    for site in support_sites(word, n) {
        if let Some(prev) = seen[site.party] {
            if prev != site.copy {
                return Err(InflationError::BothCopies(site.party));
            }
        }
        seen[site.party] = Some(site.copy);
        let e: SiteExponents = word.site(site.index(n));
        out = out.with_site_factor(site.party, i64::from(e.x), i64::from(e.z));
    }
    Ok(out)
}

/// Per-party identity-or-swap assignment between two inflations.
pub type SwapAssignment = BTreeSet<usize>;

fn mapped(site: Site, swap: &SwapAssignment) -> Site {
    if swap.contains(&site.party) {
        Site {
            party: site.party,
            copy: site.copy.flipped(),
        }
    } else {
        site
    }
}

/// Checks the two transfer conditions between expectation values on two
/// inflations: under the given per-party copy assignment the operator
/// factors must agree site by site (and the global phases must match),
/// and every pair of supported sites must agree on whether it shares a
/// source.
pub fn transfer_matches(
    from: &InflationSpec,
    from_word: &PauliWord,
    to: &InflationSpec,
    to_word: &PauliWord,
    swap: &SwapAssignment,
) -> Result<(), String> {
    let n = from.parties();
    if to.parties() != n {
        return Err("inflations have different party counts".into());
    }
    if from_word.num_sites() != 2 * n || to_word.num_sites() != 2 * n {
        return Err("operator register does not match the inflation".into());
    }
    if from_word.phase() != to_word.phase() {
        return Err(format!(
            "global phases differ: {} vs {}",
            from_word.phase(),
            to_word.phase()
        ));
    }
    for party in 0..n {
        for copy in [CopyTag::Unprimed, CopyTag::Primed] {
            let a = Site { party, copy };
            let b = mapped(a, swap);
            if from_word.site(a.index(n)) != to_word.site(b.index(n)) {
                return Err(format!(
                    "factor mismatch at party {party} ({copy:?} copy) under the swap assignment"
                ));
            }
        }
    }
    let supp = support_sites(from_word, n);
    for (i, &a) in supp.iter().enumerate() {
        for &b in &supp[i + 1..] {
            if a.party == b.party {
                continue;
            }
            let lhs = from.connected(a, b);
            let rhs = to.connected(mapped(a, swap), mapped(b, swap));
            if lhs != rhs {
                return Err(format!(
                    "connectivity mismatch between parties {} and {}",
                    a.party, b.party
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, t: &[usize]) -> InflationSpec {
        InflationSpec::new(n, t.iter().copied().collect()).unwrap()
    }

    #[test]
    fn anchor_cannot_join_t() {
        assert!(InflationSpec::new(3, [ANCHOR].into()).is_err());
        assert!(InflationSpec::new(3, [5].into()).is_err());
    }

    #[test]
    fn same_priming_connects_non_anchor_parties() {
        let s = spec(4, &[0]);
        assert!(s.connected(Site::unprimed(0), Site::unprimed(2)));
        assert!(s.connected(Site::primed(0), Site::primed(3)));
        assert!(!s.connected(Site::unprimed(0), Site::primed(2)));
        assert!(!s.connected(Site::unprimed(2), Site::primed(2)));
    }

    #[test]
    fn anchor_wiring_follows_t() {
        let s = spec(4, &[0, 3]);
        // members of T reach the primed anchor, their twins the unprimed one
        assert!(s.connected(Site::unprimed(0), Site::primed(ANCHOR)));
        assert!(!s.connected(Site::unprimed(0), Site::unprimed(ANCHOR)));
        assert!(s.connected(Site::primed(0), Site::unprimed(ANCHOR)));
        // non-members the other way around
        assert!(s.connected(Site::unprimed(2), Site::unprimed(ANCHOR)));
        assert!(!s.connected(Site::unprimed(2), Site::primed(ANCHOR)));
        assert!(s.connected(Site::primed(2), Site::primed(ANCHOR)));
        // the two anchor copies never share a source
        assert!(!s.connected(Site::unprimed(ANCHOR), Site::primed(ANCHOR)));
    }

    #[test]
    fn empty_t_gives_two_disjoint_copies() {
        let s = spec(3, &[]);
        let unprimed = [Site::unprimed(0), Site::unprimed(1), Site::unprimed(2)];
        assert!(s.fully_connected(&unprimed));
        for a in unprimed {
            assert!(!s.connected(a, Site::primed(0)));
            assert!(!s.connected(a, Site::primed(1)));
            assert!(!s.connected(a, Site::primed(2)));
        }
    }

    #[test]
    fn projection_rejects_double_support() {
        let w = inflation_word(3, 3, &[(Site::unprimed(0), 1, 0), (Site::primed(0), 0, 1)]);
        assert_eq!(
            project_to_original(&w, 3),
            Err(InflationError::BothCopies(0))
        );
    }

    #[test]
    fn projection_moves_primed_factors_home() {
        let w = inflation_word(
            3,
            3,
            &[(Site::unprimed(0), 0, 2), (Site::primed(ANCHOR), 1, 0)],
        )
        .with_phase(2);
        let p = project_to_original(&w, 3).unwrap();
        assert_eq!(
            p,
            PauliWord::from_exponents(3, 2, &[(0, 2), (1, 0), (0, 0)])
        );
    }

    #[test]
    fn transfer_requires_matching_factors() {
        let from = spec(3, &[0, 2]);
        let to = spec(3, &[]);
        // word Z_1^2 X_2' on `from` vs Z_1^2 X_2 on `to` with anchor swapped
        let w_from = inflation_word(
            3,
            3,
            &[(Site::unprimed(0), 0, 2), (Site::primed(ANCHOR), 1, 0)],
        );
        let w_to = inflation_word(
            3,
            3,
            &[(Site::unprimed(0), 0, 2), (Site::unprimed(ANCHOR), 1, 0)],
        );
        let swap: SwapAssignment = [ANCHOR].into();
        // party 0 reaches the primed anchor in `from` and the unprimed
        // anchor in `to`, so the swapped assignment lines everything up
        assert!(transfer_matches(&from, &w_from, &to, &w_to, &swap).is_ok());
        // without the swap the factors no longer match
        assert!(transfer_matches(&from, &w_from, &to, &w_to, &BTreeSet::new()).is_err());
    }

    #[test]
    fn transfer_detects_connectivity_mismatch() {
        // same operator on both sides, identity assignment, but the two
        // inflations wire the support differently
        let w = inflation_word(
            3,
            3,
            &[(Site::unprimed(0), 0, 2), (Site::unprimed(ANCHOR), 1, 0)],
        );
        let connected_side = spec(3, &[]);
        let disconnected_side = spec(3, &[0]);
        assert!(transfer_matches(
            &connected_side,
            &w,
            &disconnected_side,
            &w,
            &BTreeSet::new()
        )
        .is_err());
        assert!(
            transfer_matches(&connected_side, &w, &connected_side, &w, &BTreeSet::new()).is_ok()
        );
    }

    #[test]
    fn transfer_checks_global_phase() {
        let s = spec(3, &[]);
        let w = inflation_word(3, 3, &[(Site::unprimed(0), 1, 0)]);
        let twisted = w.clone().with_phase(1);
        assert!(transfer_matches(&s, &w, &s, &twisted, &BTreeSet::new()).is_err());
    }
}
