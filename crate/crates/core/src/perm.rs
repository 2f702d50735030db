//! Exact permutation-group kernel for the three polyhedral groups.
//!
//! Groups are stored fully enumerated (at most 60 elements), so subsets of a
//! group fit in a `u64` bitmask and every operation is plain table lookup.
//! Elements are referred to by their index in [`PermGroup::elements`].

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PermError {
    #[error("image list {0:?} is not a bijection")]
    NotBijection(Vec<usize>),
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },
    #[error("element set is not a group: {0}")]
    NotAGroup(String),
    #[error("{name} must have {expected} elements, generated {found}")]
    WrongOrder {
        name: GroupName,
        expected: usize,
        found: usize,
    },
    #[error("subset is not a subgroup")]
    NotSubgroup,
    #[error("action is not a homomorphism at elements ({0}, {1})")]
    NotHomomorphism(usize, usize),
    #[error("action has {found} permutations for a group of order {expected}")]
    ActionSize { expected: usize, found: usize },
    #[error("actions belong to different groups")]
    GroupMismatch,
    #[error("element {0} of the subgroup does not occur in the parent group")]
    NotInParent(usize),
    #[error("Burnside sum {sum} is not divisible by |G| = {order}")]
    NonIntegralBurnside { sum: usize, order: usize },
    #[error("vertex index out of range or repeated: ({0}, {1})")]
    BadPair(usize, usize),
}

/// The three polyhedral groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupName {
    A4,
    S4,
    A5,
}

impl GroupName {
    pub const ALL: [GroupName; 3] = [GroupName::A4, GroupName::S4, GroupName::A5];

    pub fn order(self) -> usize {
        match self {
            GroupName::A4 => 12,
            GroupName::S4 => 24,
            GroupName::A5 => 60,
        }
    }
}

impl fmt::Display for GroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GroupName::A4 => "A4",
            GroupName::S4 => "S4",
            GroupName::A5 => "A5",
        };
        f.write_str(s)
    }
}

impl FromStr for GroupName {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "A4" => Ok(GroupName::A4),
            "S4" => Ok(GroupName::S4),
            "A5" => Ok(GroupName::A5),
            other => Err(format!("unknown group `{other}` (expected A4, S4 or A5)")),
        }
    }
}

/// A permutation of `{0, .., degree-1}` stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree).collect(),
        }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let mut seen = vec![false; images.len()];
        for &i in &images {
            if i >= images.len() || seen[i] {
                return Err(PermError::NotBijection(images));
            }
            seen[i] = true;
        }
        Ok(Permutation { images })
    }

    /// Build from disjoint cycles, e.g. `from_cycles(5, &[&[0, 1], &[2, 3]])`.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Self {
        let mut images: Vec<usize> = (0..degree).collect();
        for cycle in cycles {
            for (k, &point) in cycle.iter().enumerate() {
                images[point] = cycle[(k + 1) % cycle.len()];
            }
        }
        Permutation { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, point: usize) -> usize {
        self.images[point]
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        debug_assert_eq!(self.degree(), other.degree());
        Permutation {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.images.len()];
        for (i, &j) in self.images.iter().enumerate() {
            images[j] = i;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.images.len()];
        let mut lengths = Vec::new();
        for start in 0..self.images.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            lengths.push(len);
        }
        lengths
    }

    pub fn order(&self) -> usize {
        self.cycle_lengths().into_iter().fold(1, lcm)
    }

    pub fn is_even(&self) -> bool {
        let transpositions: usize = self.cycle_lengths().iter().map(|l| l - 1).sum();
        transpositions.is_multiple_of(2)
    }

    pub fn fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, &j)| *i == j).count()
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Cycle notation, fixed points omitted; the identity prints as `()`.
impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.images.len()];
        let mut wrote = false;
        for start in 0..self.images.len() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cycle.push(i.to_string());
                i = self.images[i];
            }
            write!(f, "({})", cycle.join(" "))?;
            wrote = true;
        }
        if !wrote {
            f.write_str("()")?;
        }
        Ok(())
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Conjugacy-type label used for fixed-vertex bookkeeping.
///
/// `in_even_subgroup` separates the two involution classes of S4; it is
/// `true` for every element of A4 and A5.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassLabel {
    pub order: u8,
    pub in_even_subgroup: bool,
}

/// A subset of a group's elements, as a bitmask over element indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ElemSet(pub u64);

impl ElemSet {
    pub fn singleton(i: usize) -> Self {
        ElemSet(1 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Self {
        ElemSet(it.into_iter().fold(0, |acc, i| acc | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1 << i;
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: ElemSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |&i| self.contains(i))
    }
}

/// A finite permutation group, fully enumerated with its multiplication table.
#[derive(Debug, Clone)]
pub struct PermGroup {
    name: GroupName,
    degree: usize,
    elements: Vec<Permutation>,
    generators: Vec<usize>,
    identity: usize,
    index: HashMap<Permutation, usize>,
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    labels: Vec<ClassLabel>,
}

impl PermGroup {
    /// Closure of `generators`, elements sorted by image list (identity first).
    pub fn from_generators(
        name: GroupName,
        degree: usize,
        generators: &[Permutation],
    ) -> Result<Self, PermError> {
        for g in generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch {
                    expected: degree,
                    found: g.degree(),
                });
            }
        }
        let id = Permutation::identity(degree);
        let mut found: HashMap<Permutation, ()> = HashMap::new();
        found.insert(id.clone(), ());
        let mut queue = VecDeque::from([id]);
        while let Some(p) = queue.pop_front() {
            for g in generators {
                let q = p.compose(g);
                if found.insert(q.clone(), ()).is_none() {
                    queue.push_back(q);
                }
                if found.len() > 64 {
                    return Err(PermError::WrongOrder {
                        name,
                        expected: name.order(),
                        found: found.len(),
                    });
                }
            }
        }
        let mut elements: Vec<Permutation> = found.into_keys().collect();
        elements.sort();
        let mut group = PermGroup::from_elements(name, degree, elements)?;
        group.generators = generators
            .iter()
            .map(|g| group.index[g])
            .collect();
        Ok(group)
    }

    /// Wrap an explicit element list, keeping its order.
    ///
    /// Fails unless the list is a group of the order `name` requires.
    pub fn from_elements(
        name: GroupName,
        degree: usize,
        elements: Vec<Permutation>,
    ) -> Result<Self, PermError> {
        if elements.len() != name.order() {
            return Err(PermError::WrongOrder {
                name,
                expected: name.order(),
                found: elements.len(),
            });
        }
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if e.degree() != degree {
                return Err(PermError::DegreeMismatch {
                    expected: degree,
                    found: e.degree(),
                });
            }
            if index.insert(e.clone(), i).is_some() {
                return Err(PermError::NotAGroup(format!("element {e} repeated")));
            }
        }
        let identity = *index
            .get(&Permutation::identity(degree))
            .ok_or_else(|| PermError::NotAGroup("identity missing".into()))?;
        let mut mul = vec![vec![0; elements.len()]; elements.len()];
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                let c = a.compose(b);
                mul[i][j] = *index
                    .get(&c)
                    .ok_or_else(|| PermError::NotAGroup(format!("{a} * {b} = {c} missing")))?;
            }
        }
        let inv = elements.iter().map(|e| index[&e.inverse()]).collect();
        let labels = elements
            .iter()
            .map(|e| ClassLabel {
                order: e.order() as u8,
                in_even_subgroup: e.is_even(),
            })
            .collect();
        Ok(PermGroup {
            name,
            degree,
            elements,
            generators: Vec::new(),
            identity,
            index,
            mul,
            inv,
            labels,
        })
    }

    pub fn name(&self) -> GroupName {
        self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Permutation {
        &self.elements[i]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn index_of(&self, p: &Permutation) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Index of `a ∘ b`.
    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn class_of(&self, i: usize) -> ClassLabel {
        self.labels[i]
    }

    pub fn all(&self) -> ElemSet {
        ElemSet::from_indices(0..self.order())
    }

    pub fn non_identity(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.order()).filter(move |&i| i != self.identity)
    }

    /// Subgroup generated by the given element indices.
    pub fn closure(&self, gens: &[usize]) -> ElemSet {
        let mut set = ElemSet::singleton(self.identity);
        let mut queue = VecDeque::from([self.identity]);
        while let Some(x) = queue.pop_front() {
            for &g in gens {
                let y = self.mul(x, g);
                if !set.contains(y) {
                    set.insert(y);
                    queue.push_back(y);
                }
            }
        }
        set
    }

    pub fn is_subgroup(&self, set: ElemSet) -> bool {
        if !set.contains(self.identity) || !set.is_subset_of(self.all()) {
            return false;
        }
        set.iter()
            .all(|a| set.iter().all(|b| set.contains(self.mul(a, self.inv(b)))))
    }

    /// `g H g⁻¹`.
    pub fn conjugate(&self, set: ElemSet, g: usize) -> ElemSet {
        let gi = self.inv(g);
        ElemSet::from_indices(set.iter().map(|h| self.mul(self.mul(g, h), gi)))
    }

    pub fn is_normal(&self, set: ElemSet) -> bool {
        (0..self.order()).all(|g| self.conjugate(set, g) == set)
    }

    /// One representative per conjugacy class of subgroups, ordered by
    /// subgroup order and then by bitmask.
    ///
    /// Every subgroup of A4, S4 and A5 is generated by at most two elements,
    /// so closing all pairs finds them all.
    pub fn subgroups_up_to_conjugacy(&self) -> Vec<ElemSet> {
        let n = self.order();
        let mut all = std::collections::BTreeSet::new();
        for a in 0..n {
            for b in a..n {
                all.insert(self.closure(&[a, b]));
            }
        }
        let mut reps: Vec<ElemSet> = Vec::new();
        let mut covered = std::collections::HashSet::new();
        let mut sorted: Vec<ElemSet> = all.into_iter().collect();
        sorted.sort_by_key(|s| (s.len(), s.0));
        for s in sorted {
            if covered.contains(&s) {
                continue;
            }
            for g in 0..n {
                covered.insert(self.conjugate(s, g));
            }
            reps.push(s);
        }
        reps
    }

    /// Subgroup containing exactly the elements that fix every listed letter.
    pub fn pointwise_stabilizer(&self, letters: &[usize]) -> ElemSet {
        ElemSet::from_indices(
            (0..self.order()).filter(|&i| letters.iter().all(|&l| self.elements[i].apply(l) == l)),
        )
    }

    pub fn elements_of(&self, set: ElemSet) -> Vec<Permutation> {
        set.iter().map(|i| self.elements[i].clone()).collect()
    }
}

/// Canonical A4 and S4 on four letters and A5 on five letters.
pub fn standard_group(name: GroupName) -> Arc<PermGroup> {
    static CACHE: OnceLock<[Arc<PermGroup>; 3]> = OnceLock::new();
    let groups = CACHE.get_or_init(|| {
        let build = |name, degree, gens: Vec<Permutation>| {
            Arc::new(PermGroup::from_generators(name, degree, &gens).expect("standard group"))
        };
        [
            build(
                GroupName::A4,
                4,
                vec![
                    Permutation::from_cycles(4, &[&[0, 1, 2]]),
                    Permutation::from_cycles(4, &[&[0, 1], &[2, 3]]),
                ],
            ),
            build(
                GroupName::S4,
                4,
                vec![
                    Permutation::from_cycles(4, &[&[0, 1, 2, 3]]),
                    Permutation::from_cycles(4, &[&[0, 1]]),
                ],
            ),
            build(
                GroupName::A5,
                5,
                vec![
                    Permutation::from_cycles(5, &[&[0, 1, 2, 3, 4]]),
                    Permutation::from_cycles(5, &[&[0, 1, 2]]),
                ],
            ),
        ]
    });
    match name {
        GroupName::A4 => groups[0].clone(),
        GroupName::S4 => groups[1].clone(),
        GroupName::A5 => groups[2].clone(),
    }
}

/// The fixed A4 inside A5: generated by `(0 1)(2 3)` and `(0 1 2)`, so it
/// stabilizes the letter 4.
pub fn a4_in_a5() -> Arc<PermGroup> {
    static CACHE: OnceLock<Arc<PermGroup>> = OnceLock::new();
    CACHE
        .get_or_init(|| {
            Arc::new(
                PermGroup::from_generators(
                    GroupName::A4,
                    5,
                    &[
                        Permutation::from_cycles(5, &[&[0, 1], &[2, 3]]),
                        Permutation::from_cycles(5, &[&[0, 1, 2]]),
                    ],
                )
                .expect("A4 inside A5"),
            )
        })
        .clone()
}

/// A4 as the even elements of the standard S4; identical to `standard_group(A4)`.
pub fn a4_in_s4() -> Arc<PermGroup> {
    standard_group(GroupName::A4)
}

/// A group acting on `{0, .., m-1}`: one vertex permutation per group element.
#[derive(Debug, Clone)]
pub struct GroupAction {
    group: Arc<PermGroup>,
    m: usize,
    act: Vec<Permutation>,
}

impl GroupAction {
    /// Validates sizes and the homomorphism property.
    pub fn new(group: Arc<PermGroup>, act: Vec<Permutation>) -> Result<Self, PermError> {
        if act.len() != group.order() {
            return Err(PermError::ActionSize {
                expected: group.order(),
                found: act.len(),
            });
        }
        let m = act.first().map_or(0, |p| p.degree());
        if let Some(p) = act.iter().find(|p| p.degree() != m) {
            return Err(PermError::DegreeMismatch {
                expected: m,
                found: p.degree(),
            });
        }
        let action = GroupAction { group, m, act };
        action.check_homomorphism()?;
        Ok(action)
    }

    fn check_homomorphism(&self) -> Result<(), PermError> {
        let g = &self.group;
        for a in 0..g.order() {
            for b in 0..g.order() {
                if self.act[g.mul(a, b)] != self.act[a].compose(&self.act[b]) {
                    return Err(PermError::NotHomomorphism(a, b));
                }
            }
        }
        Ok(())
    }

    /// Every element acts trivially on `m` points.
    pub fn trivial(group: Arc<PermGroup>, m: usize) -> Self {
        let act = vec![Permutation::identity(m); group.order()];
        GroupAction { group, m, act }
    }

    pub fn group(&self) -> &Arc<PermGroup> {
        &self.group
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn act(&self, e: usize) -> &Permutation {
        &self.act[e]
    }

    pub fn perms(&self) -> &[Permutation] {
        &self.act
    }

    pub fn fixed_count(&self, e: usize) -> usize {
        self.act[e].fixed_points()
    }

    /// Orbit count from the Burnside average of fixed-point counts.
    pub fn burnside_orbit_count(&self) -> Result<usize, PermError> {
        let sum: usize = (0..self.group.order()).map(|e| self.fixed_count(e)).sum();
        let order = self.group.order();
        if !sum.is_multiple_of(order) {
            return Err(PermError::NonIntegralBurnside { sum, order });
        }
        Ok(sum / order)
    }

    /// Orbits as sorted vertex lists, ordered by smallest member.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.m];
        let mut orbits = Vec::new();
        for v in 0..self.m {
            if seen[v] {
                continue;
            }
            let mut orbit: Vec<usize> = Vec::new();
            let mut queue = VecDeque::from([v]);
            seen[v] = true;
            while let Some(x) = queue.pop_front() {
                orbit.push(x);
                for p in &self.act {
                    let y = p.apply(x);
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            orbit.sort_unstable();
            orbits.push(orbit);
        }
        orbits
    }

    pub fn is_faithful(&self) -> bool {
        let id = self.group.identity();
        (0..self.group.order()).all(|e| e == id || !self.act[e].is_identity())
    }

    /// Elements fixing both `u` and `v`.
    pub fn pair_stabilizer(&self, u: usize, v: usize) -> Result<ElemSet, PermError> {
        if u == v || u >= self.m || v >= self.m {
            return Err(PermError::BadPair(u, v));
        }
        Ok(ElemSet::from_indices((0..self.group.order()).filter(|&e| {
            self.act[e].apply(u) == u && self.act[e].apply(v) == v
        })))
    }

    /// Whether `e` swaps some pair of vertices.
    pub fn interchanges_some_pair(&self, e: usize) -> bool {
        let p = &self.act[e];
        (0..self.m).any(|x| {
            let y = p.apply(x);
            y != x && p.apply(y) == x
        })
    }

    /// Disjoint union; vertices of `parts[k]` follow those of `parts[k-1]`.
    pub fn direct_sum(group: Arc<PermGroup>, parts: &[GroupAction]) -> Result<Self, PermError> {
        if parts.iter().any(|p| !Arc::ptr_eq(&p.group, &group)) {
            return Err(PermError::GroupMismatch);
        }
        let m: usize = parts.iter().map(|p| p.m).sum();
        let act = (0..group.order())
            .map(|e| {
                let mut images = Vec::with_capacity(m);
                let mut offset = 0;
                for part in parts {
                    images.extend(part.act[e].images().iter().map(|&i| i + offset));
                    offset += part.m;
                }
                Permutation { images }
            })
            .collect();
        Ok(GroupAction { group, m, act })
    }

    /// Restrict to a subgroup given as its own `PermGroup` of the same degree.
    pub fn restrict(&self, sub: &Arc<PermGroup>) -> Result<Self, PermError> {
        let act = sub
            .elements()
            .iter()
            .enumerate()
            .map(|(i, p)| {
                self.group
                    .index_of(p)
                    .map(|j| self.act[j].clone())
                    .ok_or(PermError::NotInParent(i))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GroupAction {
            group: sub.clone(),
            m: self.m,
            act,
        })
    }
}

/// Transitive action on the left cosets `xH`, with the chosen coset
/// representatives (the smallest element index in each coset).
#[derive(Debug, Clone)]
pub struct CosetAction {
    pub action: GroupAction,
    pub representatives: Vec<usize>,
}

pub fn coset_action(group: &Arc<PermGroup>, h: ElemSet) -> Result<CosetAction, PermError> {
    if !group.is_subgroup(h) {
        return Err(PermError::NotSubgroup);
    }
    let n = group.order();
    let mut coset_of = vec![usize::MAX; n];
    let mut reps = Vec::new();
    for x in 0..n {
        if coset_of[x] != usize::MAX {
            continue;
        }
        let c = reps.len();
        reps.push(x);
        for y in h.iter() {
            coset_of[group.mul(x, y)] = c;
        }
    }
    let act = (0..n)
        .map(|g| Permutation {
            images: reps.iter().map(|&x| coset_of[group.mul(g, x)]).collect(),
        })
        .collect();
    Ok(CosetAction {
        action: GroupAction {
            group: group.clone(),
            m: reps.len(),
            act,
        },
        representatives: reps,
    })
}
