//! Brute-force cross-check of the admissible residues.
//!
//! Every finite action splits into transitive pieces `G/H`. The oracle lists
//! one piece per subgroup class, searches all multisets of pieces summing to
//! `m`, and keeps those whose summed fixed-vertex profile passes the rules
//! and whose direct sum is faithful.

use std::collections::BTreeSet;
use std::sync::Arc;

use thiserror::Error;

use crate::perm::{coset_action, standard_group, ElemSet, GroupAction, GroupName, PermError};
use crate::profile::{
    box_profiles, profile_of_action, rule_set, CongruenceSet, FixedVertexProfile, LemmaRule,
};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("feasibility is not periodic: m = {m} is {} but m + {period} is not", if *.feasible_low { "feasible" } else { "infeasible" })]
    NotPeriodic {
        m: usize,
        period: usize,
        feasible_low: bool,
    },
    #[error("window [0, {max_m}) is too short; need at least 2·|G| = {needed}")]
    WindowTooShort { max_m: usize, needed: usize },
    #[error("unknown rule id {0:?}")]
    UnknownRule(String),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// The transitive action on `G/H` for one subgroup class.
#[derive(Debug, Clone)]
pub struct TransitiveType {
    pub group: GroupName,
    /// Position in `subgroups_up_to_conjugacy`.
    pub class_index: usize,
    pub subgroup: ElemSet,
    pub degree: usize,
    /// Fixed-coset counts per element class; `m` holds the degree.
    pub fix_vector: FixedVertexProfile,
}

impl TransitiveType {
    pub fn is_regular(&self) -> bool {
        self.subgroup.len() == 1
    }

    pub fn action(&self) -> GroupAction {
        let g = standard_group(self.group);
        coset_action(&g, self.subgroup)
            .expect("subgroup from the class list")
            .action
    }
}

pub fn transitive_types(group: GroupName) -> Vec<TransitiveType> {
    let g = standard_group(group);
    g.subgroups_up_to_conjugacy()
        .into_iter()
        .enumerate()
        .map(|(class_index, h)| {
            let action = coset_action(&g, h).expect("listed subgroup").action;
            let fix_vector = profile_of_action(&action).expect("coset actions are class functions");
            TransitiveType {
                group,
                class_index,
                subgroup: h,
                degree: action.m(),
                fix_vector,
            }
        })
        .collect()
}

/// Which rules the search applies.
#[derive(Debug, Clone, Default)]
pub struct OracleConfig {
    /// Rule ids to leave out, for fault injection.
    pub dropped_rules: Vec<String>,
    /// Also apply the S4 congruence rules on `m`. Off by default so the
    /// oracle must rediscover them from the profile caps.
    pub include_m_rules: bool,
    /// Upper end (exclusive) of the searched window; default `3·|G|`.
    pub max_m: Option<usize>,
}

impl OracleConfig {
    pub fn rules(&self, group: GroupName) -> Result<Vec<LemmaRule>, OracleError> {
        let all = rule_set(group);
        if let Some(bad) = self
            .dropped_rules
            .iter()
            .find(|id| !all.iter().any(|r| r.id == id.as_str()))
        {
            return Err(OracleError::UnknownRule(bad.clone()));
        }
        Ok(all
            .into_iter()
            .filter(|r| !self.dropped_rules.iter().any(|d| d == r.id))
            .filter(|r| self.include_m_rules || r.is_profile_rule())
            .collect())
    }
}

/// Types for which some profile in the box dominating the type's own fix
/// vector passes every profile rule; the others cannot occur in any action.
pub fn admissible_types(group: GroupName, config: &OracleConfig) -> Result<Vec<TransitiveType>, OracleError> {
    let rules: Vec<LemmaRule> = config
        .rules(group)?
        .into_iter()
        .filter(LemmaRule::is_profile_rule)
        .collect();
    let candidates = box_profiles(group, 0);
    Ok(transitive_types(group)
        .into_iter()
        .filter(|t| {
            let fix = t.fix_vector.counts();
            candidates.iter().any(|p| {
                p.counts().iter().zip(&fix).all(|(a, b)| a >= b) && rules.iter().all(|r| r.holds(p))
            })
        })
        .collect())
}

/// A multiset of transitive pieces, as counts aligned with `transitive_types(group)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitMultiset {
    pub group: GroupName,
    pub counts: Vec<usize>,
    pub m: usize,
    pub aggregate: FixedVertexProfile,
}

impl OrbitMultiset {
    pub fn orbit_count(&self) -> usize {
        self.counts.iter().sum()
    }

    /// `(degree, count)` for the nonzero entries, largest degree first.
    pub fn summary(&self, types: &[TransitiveType]) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = types
            .iter()
            .zip(&self.counts)
            .filter(|(_, &c)| c > 0)
            .map(|(t, &c)| (t.degree, c))
            .collect();
        out.sort_by(|a, b| b.cmp(a));
        out
    }
}

/// Direct sum of the pieces, in type order.
pub fn materialize(ms: &OrbitMultiset, types: &[TransitiveType]) -> Result<GroupAction, PermError> {
    let g: Arc<_> = standard_group(ms.group);
    let mut parts = Vec::new();
    for (t, &c) in types.iter().zip(&ms.counts) {
        let a = t.action();
        parts.extend(std::iter::repeat_n(a, c));
    }
    GroupAction::direct_sum(g, &parts)
}

/// All multisets of total degree `m` whose aggregate profile passes the
/// configured rules and whose direct sum is faithful.
pub fn feasible_multisets(
    group: GroupName,
    m: usize,
    config: &OracleConfig,
) -> Result<Vec<OrbitMultiset>, OracleError> {
    let types = transitive_types(group);
    feasible_with(group, m, &types, &config.rules(group)?)
}

fn feasible_with(
    group: GroupName,
    m: usize,
    types: &[TransitiveType],
    rules: &[LemmaRule],
) -> Result<Vec<OrbitMultiset>, OracleError> {
    let capped = rules.iter().any(|r| r.id == "cap3");
    let regular = types.iter().position(TransitiveType::is_regular).expect("trivial subgroup");
    let others: Vec<usize> = (0..types.len()).filter(|&i| i != regular).collect();

    let mut found = Vec::new();
    let mut counts = vec![0; types.len()];
    let start = FixedVertexProfile::zero(group, 0);
    search(&others, 0, m, start, &mut counts, &mut |counts, agg, rem| {
        if rem % types[regular].degree != 0 {
            return;
        }
        let mut counts = counts.to_vec();
        counts[regular] = rem / types[regular].degree;
        let mut aggregate = agg;
        aggregate.m = m;
        if rules.iter().all(|r| r.holds(&aggregate)) {
            found.push(OrbitMultiset {
                group,
                counts,
                m,
                aggregate,
            });
        }
    }, types, capped);

    let mut out = Vec::new();
    for ms in found {
        if materialize(&ms, types)?.is_faithful() {
            out.push(ms);
        }
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search(
    order: &[usize],
    depth: usize,
    rem: usize,
    agg: FixedVertexProfile,
    counts: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize], FixedVertexProfile, usize),
    types: &[TransitiveType],
    capped: bool,
) {
    if depth == order.len() {
        emit(counts, agg, rem);
        return;
    }
    let t = &types[order[depth]];
    let mut agg_here = agg;
    let mut c = 0;
    loop {
        counts[order[depth]] = c;
        search(order, depth + 1, rem - c * t.degree, agg_here, counts, emit, types, capped);
        if rem < (c + 1) * t.degree {
            break;
        }
        agg_here = agg_here.add(&t.fix_vector);
        agg_here.m = 0;
        if capped && agg_here.counts().iter().any(|&n| n > 3) {
            break;
        }
        c += 1;
    }
    counts[order[depth]] = 0;
}

/// Residues `r < |G|` whose window representatives `r + |G|`, `r + 2|G|`, ...
/// are feasible, after checking the feasibility pattern is `|G|`-periodic.
///
/// Faithfulness rules out the smallest representatives of some classes
/// (`m = 0`, a lone fixed point), so the residue is read off from `k ≥ 1`
/// and the bottom row only has to satisfy `feasible(m) ⇒ feasible(m + |G|)`.
pub fn oracle_residues(group: GroupName, config: &OracleConfig) -> Result<CongruenceSet, OracleError> {
    let n = group.order();
    let max_m = config.max_m.unwrap_or(3 * n);
    if max_m < 2 * n {
        return Err(OracleError::WindowTooShort {
            max_m,
            needed: 2 * n,
        });
    }
    let types = transitive_types(group);
    let rules = config.rules(group)?;
    let feasible = (0..max_m)
        .map(|m| feasible_with(group, m, &types, &rules).map(|v| !v.is_empty()))
        .collect::<Result<Vec<bool>, _>>()?;

    for m in 0..max_m.saturating_sub(n) {
        let (low, high) = (feasible[m], feasible[m + n]);
        let broken = if m < n { low && !high } else { low != high };
        if broken {
            return Err(OracleError::NotPeriodic {
                m,
                period: n,
                feasible_low: low,
            });
        }
    }
    let residues: BTreeSet<usize> = (0..n).filter(|&r| feasible[r + n]).collect();
    Ok(CongruenceSet {
        modulus: n,
        residues,
    })
}
