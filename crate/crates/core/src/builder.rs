//! Explicit vertex actions for every admissible `(group, m)`.
//!
//! A plan lists orbit pieces keyed by the residue of `m`; building it takes
//! the direct sum of the matching coset actions of the parent group and,
//! for the A4 cases obtained from a larger group, restricts to a fixed A4.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::ModelTag;
use crate::perm::{
    a4_in_a5, a4_in_s4, coset_action, standard_group, ElemSet, GroupAction, GroupName, PermError,
    PermGroup, Permutation,
};
use crate::profile::{necessity_check, profile_of_action, FixedVertexProfile, ProfileError};

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("K_{m} admits no embedding with symmetry group {group}: {reason}")]
    NotAdmissible {
        group: GroupName,
        m: usize,
        reason: String,
    },
    #[error("part {part} does not fit the {group} parent group")]
    PartMismatch { part: Part, group: GroupName },
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KnottedTag {
    M4,
    M5,
}

/// One orbit piece of a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    /// `n` regular orbits.
    Free(usize),
    /// Tetrahedron corners.
    V4,
    /// Corners of two nested tetrahedra.
    V8,
    /// Two points on each tetrahedron edge.
    V12,
    /// 4-simplex vertices.
    W5,
    /// Two points on each 4-simplex edge.
    W20,
    FixedPoint,
    Knotted(KnottedTag),
}

impl Part {
    /// Number of vertices, with `group_order` the order of the acting parent.
    pub fn size(self, group_order: usize) -> usize {
        match self {
            Part::Free(n) => n * group_order,
            Part::V4 => 4,
            Part::V8 => 8,
            Part::V12 => 12,
            Part::W5 => 5,
            Part::W20 => 20,
            Part::FixedPoint => 1,
            Part::Knotted(KnottedTag::M4) => 4,
            Part::Knotted(KnottedTag::M5) => 5,
        }
    }

    /// Orbits contributed by this part.
    pub fn orbit_count(self) -> usize {
        match self {
            Part::Free(n) => n,
            Part::Knotted(KnottedTag::M5) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Part::Free(n) => write!(f, "Free({n})"),
            Part::Knotted(KnottedTag::M4) => write!(f, "Knotted(m4)"),
            Part::Knotted(KnottedTag::M5) => write!(f, "Knotted(m5)"),
            other => write!(f, "{other:?}"),
        }
    }
}

/// Which fixed A4 a plan restricts to, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Restriction {
    None,
    A4OfS4,
    A4OfA5,
}

impl Restriction {
    /// The subgroup as a `PermGroup` on the parent's letters.
    pub fn subgroup(self) -> Option<Arc<PermGroup>> {
        match self {
            Restriction::None => None,
            Restriction::A4OfS4 => Some(a4_in_s4()),
            Restriction::A4OfA5 => Some(a4_in_a5()),
        }
    }

    pub fn parent(self, group: GroupName) -> GroupName {
        match self {
            Restriction::None => group,
            Restriction::A4OfS4 => GroupName::S4,
            Restriction::A4OfA5 => GroupName::A5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitPlan {
    pub group: GroupName,
    pub m: usize,
    pub parts: Vec<Part>,
    /// `None` for the knotted plans, which have no geometric model here.
    pub model: Option<ModelTag>,
    pub restriction: Restriction,
}

impl OrbitPlan {
    pub fn parent_group(&self) -> GroupName {
        self.restriction.parent(self.group)
    }

    pub fn is_knotted(&self) -> bool {
        self.parts.iter().any(|p| matches!(p, Part::Knotted(_)))
    }

    pub fn orbit_count(&self) -> usize {
        self.parts.iter().map(|p| p.orbit_count()).sum()
    }
}

impl fmt::Display for OrbitPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "{} m={}: {}", self.group, self.m, parts.join(" + "))?;
        match self.restriction {
            Restriction::None => Ok(()),
            Restriction::A4OfS4 => write!(f, " (restricted from S4)"),
            Restriction::A4OfA5 => write!(f, " (restricted from A5)"),
        }
    }
}

fn with_free(n: usize, rest: &[Part]) -> Vec<Part> {
    let mut parts = Vec::new();
    if n > 0 {
        parts.push(Part::Free(n));
    }
    parts.extend_from_slice(rest);
    parts
}

fn s4_parts(m: usize) -> Vec<Part> {
    let n = m / 24;
    match m % 24 {
        0 => with_free(n, &[]),
        4 => with_free(n, &[Part::V4]),
        8 => with_free(n, &[Part::V8]),
        12 => with_free(n, &[Part::V12]),
        20 => with_free(n, &[Part::V8, Part::V12]),
        r => unreachable!("S4 residue {r} passed the necessity check"),
    }
}

fn a5_parts(m: usize) -> (Vec<Part>, ModelTag) {
    let n = m / 60;
    match m % 60 {
        0 => (with_free(n, &[]), ModelTag::DodecaRotA5),
        1 => (with_free(n, &[Part::FixedPoint]), ModelTag::DodecaRotA5),
        5 => (with_free(n, &[Part::W5]), ModelTag::Simplex4A5),
        20 => (with_free(n, &[Part::W20]), ModelTag::Simplex4A5),
        r => unreachable!("A5 residue {r} passed the necessity check"),
    }
}

/// Orbit plan for an admissible `(group, m)`.
pub fn plan(group: GroupName, m: usize) -> Result<OrbitPlan, BuildError> {
    let verdict = necessity_check(group, m).map_err(|e| BuildError::NotAdmissible {
        group,
        m,
        reason: e.to_string(),
    })?;
    if !verdict.admissible {
        let rule = verdict.violated_rule.expect("inadmissible verdicts name a rule");
        return Err(BuildError::NotAdmissible {
            group,
            m,
            reason: rule.citation.to_string(),
        });
    }
    let make = |parts, model, restriction| OrbitPlan {
        group,
        m,
        parts,
        model,
        restriction,
    };
    Ok(match group {
        GroupName::S4 => make(s4_parts(m), Some(ModelTag::TetraFullS4), Restriction::None),
        GroupName::A5 => {
            let (parts, model) = a5_parts(m);
            make(parts, Some(model), Restriction::None)
        }
        GroupName::A4 => {
            let tetra = Some(ModelTag::TetraRotA4);
            match m {
                4 => make(vec![Part::Knotted(KnottedTag::M4)], None, Restriction::None),
                5 => make(vec![Part::Knotted(KnottedTag::M5)], None, Restriction::None),
                _ if [0, 4, 8, 12, 20].contains(&(m % 24)) => make(
                    s4_parts(m),
                    Some(ModelTag::TetraFullS4),
                    Restriction::A4OfS4,
                ),
                _ if m % 24 == 16 => make(with_free((m - 4) / 12, &[Part::V4]), tetra, Restriction::None),
                _ if (m % 60 == 1 || m % 60 == 5) && m > 60 => {
                    let (parts, model) = a5_parts(m);
                    make(parts, Some(model), Restriction::A4OfA5)
                }
                _ if m % 12 == 1 => make(
                    with_free((m - 1) / 12, &[Part::FixedPoint]),
                    tetra,
                    Restriction::None,
                ),
                _ if m % 12 == 5 => make(
                    with_free((m - 5) / 12, &[Part::V4, Part::FixedPoint]),
                    tetra,
                    Restriction::None,
                ),
                r => unreachable!("A4 m = {r} passed the necessity check"),
            }
        }
    })
}

/// Subgroup of the parent stabilizing the base vertex of `part`.
pub fn part_stabilizer(parent: &PermGroup, part: Part) -> Result<ElemSet, BuildError> {
    let cycle = |cycles: &[&[usize]]| {
        let p = Permutation::from_cycles(parent.degree(), cycles);
        parent.index_of(&p).map(|i| parent.closure(&[i]))
    };
    let mismatch = || BuildError::PartMismatch {
        part,
        group: parent.name(),
    };
    let set = match (parent.name(), part) {
        (_, Part::Free(_)) => Some(ElemSet::singleton(parent.identity())),
        (_, Part::FixedPoint) => Some(parent.all()),
        (GroupName::S4 | GroupName::A4, Part::V4) => Some(parent.pointwise_stabilizer(&[0])),
        (GroupName::A4, Part::Knotted(_)) => Some(parent.pointwise_stabilizer(&[0])),
        (GroupName::S4, Part::V8) => cycle(&[&[1, 2, 3]]),
        (GroupName::S4, Part::V12) => Some(parent.pointwise_stabilizer(&[0, 1])),
        (GroupName::A5, Part::W5) => Some(parent.pointwise_stabilizer(&[0])),
        (GroupName::A5, Part::W20) => Some(parent.pointwise_stabilizer(&[0, 1])),
        _ => None,
    };
    set.ok_or_else(mismatch)
}

/// Where a vertex came from: the plan part, which copy within a `Free(n)`
/// part, and the parent-group coset representative placing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexLabel {
    pub part: usize,
    pub copy: usize,
    pub rep: usize,
}

#[derive(Debug, Clone)]
pub struct VertexAction {
    /// Action of the plan's group.
    pub action: GroupAction,
    /// Action of the parent group before any restriction.
    pub parent: GroupAction,
    pub labels: Vec<VertexLabel>,
}

impl VertexAction {
    pub fn m(&self) -> usize {
        self.action.m()
    }
}

/// Direct sum of the plan's coset actions, restricted if the plan says so.
pub fn build(p: &OrbitPlan) -> Result<VertexAction, BuildError> {
    let parent_group = standard_group(p.parent_group());
    let mut pieces = Vec::new();
    let mut labels = Vec::new();
    for (k, &part) in p.parts.iter().enumerate() {
        let subparts: Vec<(Part, usize)> = match part {
            Part::Free(n) => (0..n).map(|c| (part, c)).collect(),
            Part::Knotted(KnottedTag::M5) => vec![(part, 0), (Part::FixedPoint, 1)],
            _ => vec![(part, 0)],
        };
        for (sub, copy) in subparts {
            let h = part_stabilizer(&parent_group, sub)?;
            let coset = coset_action(&parent_group, h)?;
            labels.extend(coset.representatives.iter().map(|&rep| VertexLabel {
                part: k,
                copy,
                rep,
            }));
            pieces.push(coset.action);
        }
    }
    let parent = GroupAction::direct_sum(parent_group, &pieces)?;
    let action = match p.restriction.subgroup() {
        Some(sub) => parent.restrict(&sub)?,
        None => parent.clone(),
    };
    Ok(VertexAction {
        action,
        parent,
        labels,
    })
}

/// Fixed-vertex profile of the built action, checked against the caps.
pub fn measured_profile(a: &VertexAction) -> Result<FixedVertexProfile, BuildError> {
    let p = profile_of_action(&a.action)?;
    p.check_invariants()?;
    Ok(p)
}

/// Whether some pair of vertices is fixed pointwise by no non-trivial
/// element of the parent group.
pub fn has_free_edge(a: &VertexAction) -> bool {
    let act = &a.parent;
    let g = act.group();
    let movers: Vec<&Permutation> = g.non_identity().map(|e| act.act(e)).collect();
    let m = act.m();
    (0..m).any(|u| {
        (u + 1..m).any(|v| movers.iter().all(|p| p.apply(u) != u || p.apply(v) != v))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(g: GroupName, m: usize) -> Vec<Part> {
        plan(g, m).unwrap().parts
    }

    #[test]
    fn plan_examples() {
        assert_eq!(parts(GroupName::S4, 52), vec![Part::Free(2), Part::V4]);
        assert_eq!(parts(GroupName::S4, 4), vec![Part::V4]);
        assert_eq!(parts(GroupName::A5, 80), vec![Part::Free(1), Part::W20]);
        let p = plan(GroupName::A4, 16).unwrap();
        assert_eq!(p.parts, vec![Part::Free(1), Part::V4]);
        assert_eq!(p.model, Some(ModelTag::TetraRotA4));
        assert_eq!(parts(GroupName::A4, 5), vec![Part::Knotted(KnottedTag::M5)]);
        assert_eq!(plan(GroupName::A4, 61).unwrap().restriction, Restriction::A4OfA5);
        assert_eq!(plan(GroupName::A4, 28).unwrap().restriction, Restriction::A4OfS4);
        assert_eq!(
            parts(GroupName::A4, 29),
            vec![Part::Free(2), Part::V4, Part::FixedPoint]
        );
        assert!(matches!(
            plan(GroupName::S4, 16),
            Err(BuildError::NotAdmissible { .. })
        ));
    }

    #[test]
    fn plan_sizes_add_up() {
        for g in GroupName::ALL {
            for m in 4..200 {
                if let Ok(p) = plan(g, m) {
                    let order = p.parent_group().order();
                    let total: usize = p.parts.iter().map(|part| part.size(order)).sum();
                    assert_eq!(total, m, "{p}");
                }
            }
        }
    }

    #[test]
    fn measured_profile_examples() {
        let prof = |g, m| measured_profile(&build(&plan(g, m).unwrap()).unwrap()).unwrap();
        assert_eq!(prof(GroupName::S4, 4).counts(), vec![0, 2, 1, 0]);
        assert_eq!(prof(GroupName::S4, 8).counts(), vec![0, 0, 2, 0]);
        assert_eq!(prof(GroupName::A5, 5).counts(), vec![1, 2, 0]);
        assert_eq!(prof(GroupName::A5, 61).counts(), vec![1, 1, 1]);
        assert_eq!(prof(GroupName::A4, 13).counts(), vec![1, 1]);
        assert_eq!(prof(GroupName::S4, 24).counts(), vec![0, 0, 0, 0]);
    }

    #[test]
    fn labels_cover_vertices() {
        let a = build(&plan(GroupName::S4, 44).unwrap()).unwrap();
        assert_eq!(a.labels.len(), 44);
        assert_eq!(a.labels.iter().filter(|l| l.part == 0).count(), 24);
    }

    #[test]
    fn free_edges() {
        let fe = |g, m| has_free_edge(&build(&plan(g, m).unwrap()).unwrap());
        assert!(fe(GroupName::S4, 8));
        assert!(fe(GroupName::S4, 28));
        assert!(fe(GroupName::S4, 12));
        assert!(!fe(GroupName::S4, 4));
    }

    #[test]
    fn part_mismatch_is_reported() {
        let s4 = standard_group(GroupName::S4);
        assert!(part_stabilizer(&s4, Part::W20).is_err());
    }
}
