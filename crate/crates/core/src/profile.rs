//! Fixed-vertex profiles and the congruence conditions they force.
//!
//! A profile records, for each class of non-identity elements, how many
//! vertices such an element fixes. Burnside's lemma turns a profile into a
//! residue of `m` modulo `|G|`; the constraint rules below cut the box of
//! candidate profiles down to the ones an SO(4)-induced action can have.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::perm::{ClassLabel, GroupAction, GroupName};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProfileError {
    #[error("K_m with m = {0} is too small for a polyhedral group to act (need m >= 4)")]
    BelowDomain(usize),
    #[error("S4 has no stand-alone profile table; use the necessity check chain")]
    UseNecessityChain,
    #[error("profile invariant violated: {0}")]
    Invariant(String),
    #[error("elements {0} and {1} share a class label but fix {2} and {3} vertices")]
    ClassDisagreement(usize, usize, usize, usize),
}

/// Classes of non-identity elements that carry a fixed-vertex count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProfileClass {
    /// Involutions (in A4 for S4).
    N2,
    /// Involutions of S4 outside A4.
    N2p,
    N3,
    N4,
    N5,
}

impl ProfileClass {
    pub fn of(label: ClassLabel) -> Option<ProfileClass> {
        match (label.order, label.in_even_subgroup) {
            (2, true) => Some(ProfileClass::N2),
            (2, false) => Some(ProfileClass::N2p),
            (3, _) => Some(ProfileClass::N3),
            (4, _) => Some(ProfileClass::N4),
            (5, _) => Some(ProfileClass::N5),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProfileClass::N2 => "n2",
            ProfileClass::N2p => "n2'",
            ProfileClass::N3 => "n3",
            ProfileClass::N4 => "n4",
            ProfileClass::N5 => "n5",
        }
    }
}

/// Profile classes of a group with their class sizes.
pub fn classes(group: GroupName) -> &'static [(ProfileClass, usize)] {
    use ProfileClass::*;
    match group {
        GroupName::A4 => &[(N2, 3), (N3, 8)],
        GroupName::S4 => &[(N2, 3), (N2p, 6), (N3, 8), (N4, 6)],
        GroupName::A5 => &[(N2, 15), (N3, 20), (N5, 24)],
    }
}

/// Fixed-vertex counts per element class; `m` is the vertex count (`n1`).
///
/// Counts for classes the group does not have stay zero. Construction does
/// not enforce the caps so that aggregates of arbitrary actions can be
/// represented; see [`FixedVertexProfile::check_invariants`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FixedVertexProfile {
    pub group: GroupName,
    pub m: usize,
    pub n2: u32,
    pub n2p: u32,
    pub n3: u32,
    pub n4: u32,
    pub n5: u32,
}

impl FixedVertexProfile {
    pub fn zero(group: GroupName, m: usize) -> Self {
        FixedVertexProfile {
            group,
            m,
            n2: 0,
            n2p: 0,
            n3: 0,
            n4: 0,
            n5: 0,
        }
    }

    /// A4 profile `(n2, n3)`.
    pub fn a4(m: usize, n2: u32, n3: u32) -> Self {
        FixedVertexProfile {
            n2,
            n3,
            ..Self::zero(GroupName::A4, m)
        }
    }

    /// A5 profile `(n2, n3, n5)`.
    pub fn a5(m: usize, n2: u32, n3: u32, n5: u32) -> Self {
        FixedVertexProfile {
            n2,
            n3,
            n5,
            ..Self::zero(GroupName::A5, m)
        }
    }

    /// S4 profile `(n2, n2', n3, n4)`.
    pub fn s4(m: usize, n2: u32, n2p: u32, n3: u32, n4: u32) -> Self {
        FixedVertexProfile {
            n2,
            n2p,
            n3,
            n4,
            ..Self::zero(GroupName::S4, m)
        }
    }

    pub fn get(&self, class: ProfileClass) -> u32 {
        match class {
            ProfileClass::N2 => self.n2,
            ProfileClass::N2p => self.n2p,
            ProfileClass::N3 => self.n3,
            ProfileClass::N4 => self.n4,
            ProfileClass::N5 => self.n5,
        }
    }

    pub fn set(&mut self, class: ProfileClass, value: u32) {
        match class {
            ProfileClass::N2 => self.n2 = value,
            ProfileClass::N2p => self.n2p = value,
            ProfileClass::N3 => self.n3 = value,
            ProfileClass::N4 => self.n4 = value,
            ProfileClass::N5 => self.n5 = value,
        }
    }

    /// Counts in the group's class order, e.g. `[n2, n2', n3, n4]` for S4.
    pub fn counts(&self) -> Vec<u32> {
        classes(self.group).iter().map(|&(c, _)| self.get(c)).collect()
    }

    /// Pointwise sum; vertex counts add too.
    pub fn add(&self, other: &FixedVertexProfile) -> FixedVertexProfile {
        debug_assert_eq!(self.group, other.group);
        let mut out = *self;
        out.m += other.m;
        for &(c, _) in classes(self.group) {
            out.set(c, self.get(c) + other.get(c));
        }
        out
    }

    /// `Σ class_size · n_k` over non-identity classes.
    pub fn weighted_sum(&self) -> usize {
        classes(self.group)
            .iter()
            .map(|&(c, size)| size * self.get(c) as usize)
            .sum()
    }

    /// Whether `m + Σ class_size · n_k` is divisible by `|G|`.
    pub fn burnside_integral(&self) -> bool {
        (self.m + self.weighted_sum()).is_multiple_of(self.group.order())
    }

    /// Caps every SO(4)-induced action obeys: a non-trivial element fixes
    /// at most 3 vertices, an involution at most 2.
    pub fn check_invariants(&self) -> Result<(), ProfileError> {
        for &(c, _) in classes(self.group) {
            let n = self.get(c);
            let cap = match c {
                ProfileClass::N2 | ProfileClass::N2p => 2,
                _ => 3,
            };
            if n > cap {
                return Err(ProfileError::Invariant(format!(
                    "{} = {n} exceeds {cap}",
                    c.name()
                )));
            }
        }
        Ok(())
    }
}

/// Fixed-vertex counts of an action, checking that elements with equal
/// class labels fix equally many vertices.
pub fn profile_of_action(action: &GroupAction) -> Result<FixedVertexProfile, ProfileError> {
    let group = action.group();
    let mut p = FixedVertexProfile::zero(group.name(), action.m());
    let mut seen: Vec<(ProfileClass, usize, usize)> = Vec::new();
    for e in group.non_identity() {
        let Some(class) = ProfileClass::of(group.class_of(e)) else {
            continue;
        };
        let n = action.fixed_count(e);
        match seen.iter().find(|(c, _, _)| *c == class) {
            Some(&(_, e0, n0)) if n0 != n => {
                return Err(ProfileError::ClassDisagreement(e0, e, n0, n))
            }
            Some(_) => {}
            None => {
                seen.push((class, e, n));
                p.set(class, n as u32);
            }
        }
    }
    Ok(p)
}

impl fmt::Display for FixedVertexProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = classes(self.group).iter().map(|(c, _)| c.name()).collect();
        let values: Vec<String> = self.counts().iter().map(|n| n.to_string()).collect();
        write!(f, "({}) = ({})", names.join(", "), values.join(", "))
    }
}

#[derive(Clone, Copy)]
enum RuleCheck {
    Profile(fn(&FixedVertexProfile) -> bool),
    Modulus(fn(usize) -> bool),
}

/// One fixed-vertex constraint, with the formula it encodes.
#[derive(Clone, Copy)]
pub struct LemmaRule {
    pub id: &'static str,
    pub citation: &'static str,
    check: RuleCheck,
}

impl fmt::Debug for LemmaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LemmaRule({}: {})", self.id, self.citation)
    }
}

impl LemmaRule {
    pub fn is_profile_rule(&self) -> bool {
        matches!(self.check, RuleCheck::Profile(_))
    }

    /// `None` for rules that only constrain `m`.
    pub fn holds_for_profile(&self, p: &FixedVertexProfile) -> Option<bool> {
        match self.check {
            RuleCheck::Profile(f) => Some(f(p)),
            RuleCheck::Modulus(_) => None,
        }
    }

    /// `None` for rules on profiles.
    pub fn holds_for_m(&self, m: usize) -> Option<bool> {
        match self.check {
            RuleCheck::Profile(_) => None,
            RuleCheck::Modulus(f) => Some(f(m)),
        }
    }

    /// Evaluate on a profile, using `p.m` for modulus rules.
    pub fn holds(&self, p: &FixedVertexProfile) -> bool {
        match self.check {
            RuleCheck::Profile(f) => f(p),
            RuleCheck::Modulus(f) => f(p.m),
        }
    }
}

const CAP3: LemmaRule = LemmaRule {
    id: "cap3",
    citation: "n_k <= 3 for every non-identity element",
    check: RuleCheck::Profile(|p| {
        [p.n2, p.n2p, p.n3, p.n4, p.n5].iter().all(|&n| n <= 3)
    }),
};

const INVOLUTION_CAP2: LemmaRule = LemmaRule {
    id: "inv_cap2",
    citation: "n2 <= 2 and n2' <= 2 for involutions",
    check: RuleCheck::Profile(|p| p.n2 <= 2 && p.n2p <= 2),
};

const N2_LE_1: LemmaRule = LemmaRule {
    id: "n2le1",
    citation: "n2 <= 1 (involutions of an A4 subgroup)",
    check: RuleCheck::Profile(|p| p.n2 <= 1),
};

const N3_ZERO_N2_ZERO: LemmaRule = LemmaRule {
    id: "n3zero_n2zero",
    citation: "n3 = 0 => n2 = 0",
    check: RuleCheck::Profile(|p| p.n3 != 0 || p.n2 == 0),
};

const N2_ONE_N3_NE_3: LemmaRule = LemmaRule {
    id: "n2one_n3ne3",
    citation: "n2 = 1 => n3 != 3",
    check: RuleCheck::Profile(|p| p.n2 != 1 || p.n3 != 3),
};

const CAP2: LemmaRule = LemmaRule {
    id: "cap2",
    citation: "n_k <= 2 for every non-identity element of A5",
    check: RuleCheck::Profile(|p| [p.n2, p.n3, p.n5].iter().all(|&n| n <= 2)),
};

const COUPLING: LemmaRule = LemmaRule {
    id: "coupling",
    citation: "(n3 = 1 or n5 = 1) => n2 = n3 = n5 = 1",
    check: RuleCheck::Profile(|p| {
        !(p.n3 == 1 || p.n5 == 1) || (p.n2 == 1 && p.n3 == 1 && p.n5 == 1)
    }),
};

const N5_NE_2: LemmaRule = LemmaRule {
    id: "n5ne2",
    citation: "n5 != 2",
    check: RuleCheck::Profile(|p| p.n5 != 2),
};

const N4_ZERO: LemmaRule = LemmaRule {
    id: "n4zero",
    citation: "n4 = 0 (order-4 elements have empty fixed point set)",
    check: RuleCheck::Profile(|p| p.n4 == 0),
};

const M_ZERO_MOD_4: LemmaRule = LemmaRule {
    id: "m0mod4",
    citation: "m ≡ 0 (mod 4)",
    check: RuleCheck::Modulus(|m| m % 4 == 0),
};

const M_NE_16_MOD_24: LemmaRule = LemmaRule {
    id: "mne16mod24",
    citation: "m ≢ 16 (mod 24)",
    check: RuleCheck::Modulus(|m| m % 24 != 16),
};

/// Constraint rules for a group, in the order the argument applies them.
pub fn rule_set(group: GroupName) -> Vec<LemmaRule> {
    let a4 = [CAP3, INVOLUTION_CAP2, N2_LE_1, N3_ZERO_N2_ZERO, N2_ONE_N3_NE_3];
    let mut rules = a4.to_vec();
    match group {
        GroupName::A4 => {}
        GroupName::A5 => rules.extend([CAP2, COUPLING, N5_NE_2]),
        GroupName::S4 => rules.extend([N4_ZERO, M_ZERO_MOD_4, M_NE_16_MOD_24]),
    }
    rules
}

/// The closing Burnside-integrality rule, citing the admissible residues.
pub fn residue_rule(group: GroupName) -> LemmaRule {
    match group {
        GroupName::A4 => LemmaRule {
            id: "residue",
            citation: "m ≡ 0, 1, 4, 5, 8 (mod 12)",
            check: RuleCheck::Profile(FixedVertexProfile::burnside_integral),
        },
        GroupName::S4 => LemmaRule {
            id: "residue",
            citation: "m ≡ 0, 4, 8, 12, 20 (mod 24)",
            check: RuleCheck::Profile(FixedVertexProfile::burnside_integral),
        },
        GroupName::A5 => LemmaRule {
            id: "residue",
            citation: "m ≡ 0, 1, 5, 20 (mod 60)",
            check: RuleCheck::Profile(FixedVertexProfile::burnside_integral),
        },
    }
}

/// Look up a rule by id across all groups (including `residue`).
pub fn rule_by_id(group: GroupName, id: &str) -> Option<LemmaRule> {
    rule_set(group)
        .into_iter()
        .chain(std::iter::once(residue_rule(group)))
        .find(|r| r.id == id)
}

/// Every profile in the box `{0..3}^k` for the group's classes.
pub fn box_profiles(group: GroupName, m: usize) -> Vec<FixedVertexProfile> {
    let cls = classes(group);
    let mut out = Vec::new();
    let total = 4usize.pow(cls.len() as u32);
    for code in 0..total {
        let mut p = FixedVertexProfile::zero(group, m);
        let mut c = code;
        // most significant digit is the first class so the output is lexicographic
        for &(class, _) in cls.iter().rev() {
            p.set(class, (c % 4) as u32);
            c /= 4;
        }
        out.push(p);
    }
    out
}

/// Residue `r < |G|` with `r + Σ class_size · n_k ≡ 0 (mod |G|)`.
pub fn residues_from_profile(group: GroupName, p: &FixedVertexProfile) -> usize {
    let order = group.order();
    (order - p.weighted_sum() % order) % order
}

/// The profiles left in the box after every profile rule, each tagged with
/// the residue it forces (stored as `m`).
pub fn enumerate_profiles(group: GroupName) -> Result<Vec<FixedVertexProfile>, ProfileError> {
    if group == GroupName::S4 {
        return Err(ProfileError::UseNecessityChain);
    }
    let rules = rule_set(group);
    Ok(box_profiles(group, 0)
        .into_iter()
        .filter(|p| rules.iter().all(|r| r.holds_for_profile(p).unwrap_or(true)))
        .map(|mut p| {
            p.m = residues_from_profile(group, &p);
            p
        })
        .collect())
}

/// A set of residues modulo `|G|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceSet {
    pub modulus: usize,
    pub residues: BTreeSet<usize>,
}

impl CongruenceSet {
    pub fn contains(&self, m: usize) -> bool {
        self.residues.contains(&(m % self.modulus))
    }
}

impl fmt::Display for CongruenceSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rs: Vec<String> = self.residues.iter().map(|r| r.to_string()).collect();
        write!(f, "m ≡ {} (mod {})", rs.join(", "), self.modulus)
    }
}

/// Admissible residues. A4 and A5 come from their profile tables; S4 from
/// the chain: A4 residues lifted mod 24, kept if `≡ 0 (mod 4)`, minus 16.
pub fn admissible_residues(group: GroupName) -> CongruenceSet {
    let residues = match group {
        GroupName::A4 | GroupName::A5 => enumerate_profiles(group)
            .expect("A4/A5 tables")
            .iter()
            .map(|p| p.m)
            .collect(),
        GroupName::S4 => {
            let a4 = admissible_residues(GroupName::A4);
            (0..24)
                .filter(|&r| a4.contains(r))
                .filter(|&r| M_ZERO_MOD_4.holds_for_m(r) == Some(true))
                .filter(|&r| M_NE_16_MOD_24.holds_for_m(r) == Some(true))
                .collect()
        }
    };
    CongruenceSet {
        modulus: group.order(),
        residues,
    }
}

/// Outcome of a necessity query: witnesses if admissible, else the first
/// rule that leaves no candidate.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub group: GroupName,
    pub m: usize,
    pub admissible: bool,
    pub witnesses: Vec<FixedVertexProfile>,
    pub violated_rule: Option<LemmaRule>,
}

/// Run the rules in order over the profile box, then Burnside integrality.
///
/// Profile rules never empty the box (the zero profile passes all of them),
/// so an inadmissible `m` is caught either by an `m`-congruence rule (S4) or
/// by the closing residue rule.
pub fn necessity_check(group: GroupName, m: usize) -> Result<Verdict, ProfileError> {
    if m < 4 {
        return Err(ProfileError::BelowDomain(m));
    }
    let mut candidates = box_profiles(group, m);
    let rules = rule_set(group);
    for rule in rules.iter().chain(std::iter::once(&residue_rule(group))) {
        candidates.retain(|p| rule.holds(p));
        if candidates.is_empty() {
            return Ok(Verdict {
                group,
                m,
                admissible: false,
                witnesses: Vec::new(),
                violated_rule: Some(*rule),
            });
        }
    }
    Ok(Verdict {
        group,
        m,
        admissible: true,
        witnesses: candidates,
        violated_rule: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_lists() {
        assert_eq!(rule_set(GroupName::A4).len(), 5);
        assert!(rule_set(GroupName::A5).iter().any(|r| r.id == "n5ne2"));
        assert!(rule_set(GroupName::S4).iter().any(|r| r.id == "n4zero"));
        let s4 = rule_set(GroupName::S4);
        let ids: Vec<&str> = s4.iter().map(|r| r.id).collect();
        let pos = |id| ids.iter().position(|&x| x == id).unwrap();
        assert!(pos("n4zero") < pos("m0mod4") && pos("m0mod4") < pos("mne16mod24"));
    }

    #[test]
    fn a4_profile_table() {
        let rows: Vec<(u32, u32, usize)> = enumerate_profiles(GroupName::A4)
            .unwrap()
            .iter()
            .map(|p| (p.n2, p.n3, p.m))
            .collect();
        assert_eq!(
            rows,
            vec![(0, 0, 0), (0, 1, 4), (0, 2, 8), (0, 3, 0), (1, 1, 1), (1, 2, 5)]
        );
    }

    #[test]
    fn a5_profile_table() {
        let rows: Vec<(u32, u32, u32, usize)> = enumerate_profiles(GroupName::A5)
            .unwrap()
            .iter()
            .map(|p| (p.n2, p.n3, p.n5, p.m))
            .collect();
        assert_eq!(
            rows,
            vec![(0, 0, 0, 0), (0, 2, 0, 20), (1, 1, 1, 1), (1, 2, 0, 5)]
        );
        assert!(!rows.iter().any(|r| (r.0, r.1, r.2) == (0, 1, 0)));
    }

    #[test]
    fn s4_table_is_refused() {
        assert_eq!(
            enumerate_profiles(GroupName::S4).unwrap_err(),
            ProfileError::UseNecessityChain
        );
    }

    #[test]
    fn residues_of_single_profiles() {
        assert_eq!(residues_from_profile(GroupName::A4, &FixedVertexProfile::a4(0, 0, 1)), 4);
        assert_eq!(residues_from_profile(GroupName::A4, &FixedVertexProfile::a4(0, 0, 0)), 0);
        assert_eq!(
            residues_from_profile(GroupName::A5, &FixedVertexProfile::a5(0, 1, 1, 1)),
            1
        );
        // (4 + 3·0 + 6·2 + 8·1 + 6·0) / 24 = 1
        assert_eq!(
            residues_from_profile(GroupName::S4, &FixedVertexProfile::s4(0, 0, 2, 1, 0)),
            4
        );
    }

    #[test]
    fn admissible_residue_sets() {
        let set = |g| admissible_residues(g).residues.into_iter().collect::<Vec<_>>();
        assert_eq!(set(GroupName::A4), vec![0, 1, 4, 5, 8]);
        assert_eq!(set(GroupName::A5), vec![0, 1, 5, 20]);
        assert_eq!(set(GroupName::S4), vec![0, 4, 8, 12, 20]);
    }

    #[test]
    fn a5_residues_lie_over_a4_residues() {
        let a4 = admissible_residues(GroupName::A4);
        assert!(admissible_residues(GroupName::A5)
            .residues
            .iter()
            .all(|&r| a4.contains(r)));
    }

    #[test]
    fn necessity_examples() {
        let v = necessity_check(GroupName::S4, 16).unwrap();
        assert!(!v.admissible);
        assert_eq!(v.violated_rule.unwrap().citation, "m ≢ 16 (mod 24)");

        assert!(necessity_check(GroupName::A4, 16).unwrap().admissible);

        let v = necessity_check(GroupName::A5, 65).unwrap();
        assert!(v.admissible);
        assert_eq!(v.witnesses, vec![FixedVertexProfile::a5(65, 1, 2, 0)]);

        let v = necessity_check(GroupName::A4, 7).unwrap();
        assert!(!v.admissible);
        assert_eq!(v.violated_rule.unwrap().id, "residue");

        let v = necessity_check(GroupName::S4, 7).unwrap();
        assert_eq!(v.violated_rule.unwrap().id, "m0mod4");

        assert_eq!(
            necessity_check(GroupName::A4, 3).unwrap_err(),
            ProfileError::BelowDomain(3)
        );
    }

    #[test]
    fn verdict_has_exactly_one_outcome() {
        for g in GroupName::ALL {
            for m in 4..200 {
                let v = necessity_check(g, m).unwrap();
                assert_ne!(v.witnesses.is_empty(), v.violated_rule.is_none());
                assert_eq!(v.admissible, !v.witnesses.is_empty());
            }
        }
    }

    #[test]
    fn necessity_agrees_with_residue_sets() {
        for g in GroupName::ALL {
            let set = admissible_residues(g);
            for m in 4..4 + 2 * g.order() {
                assert_eq!(necessity_check(g, m).unwrap().admissible, set.contains(m), "{g} {m}");
            }
        }
    }

    #[test]
    fn rule_soundness_over_box() {
        for g in [GroupName::A4, GroupName::A5] {
            let rules = rule_set(g);
            let table: Vec<Vec<u32>> = enumerate_profiles(g)
                .unwrap()
                .iter()
                .map(|p| p.counts())
                .collect();
            for p in box_profiles(g, 0) {
                let passes = rules.iter().all(|r| r.holds_for_profile(&p).unwrap_or(true));
                assert_eq!(passes, table.contains(&p.counts()), "{p}");
            }
        }
    }

    #[test]
    fn invariants_cap_counts() {
        assert!(FixedVertexProfile::a4(4, 0, 3).check_invariants().is_ok());
        assert!(FixedVertexProfile::a4(4, 3, 0).check_invariants().is_err());
        assert!(FixedVertexProfile::a5(4, 0, 4, 0).check_invariants().is_err());
    }
}
