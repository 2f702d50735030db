//! The groups as rotations of S³ and the vertex sets they act on.
//!
//! Each model is a faithful homomorphism into SO(4). A non-identity element
//! either fixes a great circle (a 2-dimensional +1 eigenspace) or nothing.
//! Vertices are placed as orbits of base points whose stabilizers match the
//! coset actions built in [`crate::builder`].

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::builder::{OrbitPlan, Part, VertexAction, VertexLabel};
use crate::perm::{standard_group, GroupAction, GroupName, PermGroup, Permutation};
use crate::profile::{FixedVertexProfile, ProfileClass};

pub type Mat4 = Matrix4<f64>;
pub type Vec4 = Vector4<f64>;

pub const HOMOMORPHISM_TOL: f64 = 1e-8;
pub const ORTHOGONALITY_TOL: f64 = 1e-9;
pub const DET_TOL: f64 = 1e-9;
pub const INVARIANCE_TOL: f64 = 1e-9;
pub const MIN_VERTEX_DISTANCE: f64 = 1e-6;
pub const CIRCLE_MEMBERSHIP_TOL: f64 = 1e-9;
pub const SAME_CIRCLE_TOL: f64 = 1e-8;
/// Singular values of `M - I` below this count as zero.
const KERNEL_TOL: f64 = 1e-7;
/// Singular values between `KERNEL_TOL` and this are too close to call.
const AMBIGUOUS_TOL: f64 = 1e-6;
/// Minimum angular distance from a free base point to every fixed circle.
pub const FREE_DELTA: f64 = 0.05;
/// Minimum distance between vertices of different free points' orbits.
pub const FREE_SEPARATION: f64 = 1e-3;
const FREE_RETRIES: usize = 10_000;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("model {tag} does not carry group {group}")]
    Incompatible { tag: ModelTag, group: GroupName },
    #[error("parameter {name} = {value} outside {range}")]
    Parameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("t = 1/2 puts edge points at midpoints, which edge-reversing involutions fix")]
    MidpointCollision,
    #[error("the identity fixes all of S³ and has no fixed circle")]
    IdentityFixedSet,
    #[error("singular value {0:e} of M - I is too close to the kernel threshold")]
    Precision(f64),
    #[error("+1 eigenspace has dimension {0}; expected 0 or 2")]
    EigenspaceDimension(usize),
    #[error("matrix for element {element} is not in SO(4): {reason}")]
    NotSpecialOrthogonal { element: usize, reason: String },
    #[error("M({a}·{b}) differs from M({a})·M({b}) by {err:e}")]
    NotHomomorphism { a: usize, b: usize, err: f64 },
    #[error("representation is not faithful: element {0} maps to the identity")]
    NotFaithful(usize),
    #[error("expected {expected} matrices, got {found}")]
    MatrixCount { expected: usize, found: usize },
    #[error("part {0} has no coordinates in model {1}")]
    UnsupportedPart(Part, ModelTag),
    #[error("knotted plans have no geometric realization in this crate")]
    KnottedPlan,
    #[error("could not place a free base point after {0} attempts")]
    Placement(usize),
    #[error("vertex stabilizers disagree with the action: element {element} sends vertex {vertex} off by {err:e}")]
    Invariance {
        element: usize,
        vertex: usize,
        err: f64,
    },
    #[error("vertices {0} and {1} are only {2:e} apart")]
    Collision(usize, usize, f64),
    #[error("geometric and combinatorial profiles differ: {geometric} vs {combinatorial}")]
    ProfileMismatch {
        geometric: FixedVertexProfile,
        combinatorial: FixedVertexProfile,
    },
    #[error("elements {0} and {1} share a class label but their circles hold {2} and {3} vertices")]
    ClassDisagreement(usize, usize, usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModelTag {
    /// Tetrahedral rotations in R³, fixing the last axis.
    TetraRotA4,
    /// Icosahedral rotations in R³, fixing the last axis.
    DodecaRotA5,
    /// Symmetries of a tetrahedron, with odd elements reversing the last axis.
    TetraFullS4,
    /// Even permutations of a regular 4-simplex.
    Simplex4A5,
}

impl ModelTag {
    pub const ALL: [ModelTag; 4] = [
        ModelTag::TetraRotA4,
        ModelTag::DodecaRotA5,
        ModelTag::TetraFullS4,
        ModelTag::Simplex4A5,
    ];

    pub fn group(self) -> GroupName {
        match self {
            ModelTag::TetraRotA4 => GroupName::A4,
            ModelTag::TetraFullS4 => GroupName::S4,
            ModelTag::DodecaRotA5 | ModelTag::Simplex4A5 => GroupName::A5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelTag::TetraRotA4 => "TETRA_ROT_A4",
            ModelTag::DodecaRotA5 => "DODECA_ROT_A5",
            ModelTag::TetraFullS4 => "TETRA_FULL_S4",
            ModelTag::Simplex4A5 => "SIMPLEX4_A5",
        }
    }
}

impl fmt::Display for ModelTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ModelTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelTag::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| format!("unknown model {s:?}"))
    }
}

/// Latitude of the second tetrahedron copy and position of edge points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub theta: f64,
    pub t: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            theta: std::f64::consts::FRAC_PI_6,
            t: 1.0 / 3.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), GeomError> {
        if !(self.theta > 0.0 && self.theta < std::f64::consts::FRAC_PI_2) {
            return Err(GeomError::Parameter {
                name: "theta",
                value: self.theta,
                range: "(0, π/2)",
            });
        }
        if self.t == 0.5 {
            return Err(GeomError::MidpointCollision);
        }
        if !(self.t > 0.0 && self.t < 0.5) {
            return Err(GeomError::Parameter {
                name: "t",
                value: self.t,
                range: "(0, 1/2)",
            });
        }
        Ok(())
    }
}

/// Orthonormal basis of the sum-zero hyperplane of Rⁿ, as rows.
fn helmert(n: usize) -> DMatrix<f64> {
    let mut b = DMatrix::zeros(n - 1, n);
    for k in 1..n {
        let scale = 1.0 / ((k * (k + 1)) as f64).sqrt();
        for j in 0..k {
            b[(k - 1, j)] = scale;
        }
        b[(k - 1, k)] = -(k as f64) * scale;
    }
    b
}

fn permutation_matrix(p: &Permutation) -> DMatrix<f64> {
    let n = p.degree();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(p.apply(i), i)] = 1.0;
    }
    m
}

/// The permutation action on the sum-zero hyperplane, in Helmert coordinates.
fn standard_block(p: &Permutation) -> DMatrix<f64> {
    let b = helmert(p.degree());
    &b * permutation_matrix(p) * b.transpose()
}

fn embed3(r: &Matrix3<f64>, last: f64) -> Mat4 {
    let mut m = Mat4::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(r);
    m[(3, 3)] = last;
    m
}

fn rotation3(axis: Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let k = axis.normalize();
    let kx = Matrix3::new(0.0, -k.z, k.y, k.z, 0.0, -k.x, -k.y, k.x, 0.0);
    Matrix3::identity() + kx * angle.sin() + kx * kx * (1.0 - angle.cos())
}

fn key3(m: &Matrix3<f64>) -> [i64; 9] {
    let mut k = [0; 9];
    for (i, x) in m.iter().enumerate() {
        k[i] = (x * 1e6).round() as i64;
    }
    k
}

/// The icosahedral rotation group as an image of the standard A5.
///
/// A5 is presented by `a² = b³ = (ab)⁵ = 1`, so matching `a = (0 1)(2 3)` and
/// a 3-cycle `b` with `ab` of order 5 to rotation matrices of the same orders
/// fixes a homomorphism, extended along words in `a`, `b`.
fn icosahedral_matrices(group: &PermGroup) -> Vec<Matrix3<f64>> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let gens = [
        Matrix3::new(0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0),
        Matrix3::from_diagonal(&Vector3::new(-1.0, -1.0, 1.0)),
        rotation3(Vector3::new(0.0, 1.0, phi), 2.0 * std::f64::consts::PI / 5.0),
    ];
    let mut mats = vec![Matrix3::identity()];
    let mut keys = vec![key3(&mats[0])];
    let mut i = 0;
    while i < mats.len() {
        for g in &gens {
            let next = mats[i] * g;
            let k = key3(&next);
            if !keys.contains(&k) {
                keys.push(k);
                mats.push(next);
            }
        }
        i += 1;
    }
    assert_eq!(mats.len(), 60, "icosahedral closure");

    let order = |m: &Matrix3<f64>| {
        let mut p = *m;
        for k in 1..=5 {
            if (p - Matrix3::identity()).amax() < 1e-9 {
                return k;
            }
            p *= m;
        }
        0
    };
    let (big_a, big_b) = mats
        .iter()
        .filter(|m| order(m) == 2)
        .flat_map(|a| mats.iter().filter(|b| order(b) == 3).map(move |b| (*a, *b)))
        .find(|(a, b)| order(&(a * b)) == 5)
        .expect("icosahedral (2,3,5) generators");

    let a = group
        .index_of(&Permutation::from_cycles(5, &[&[0, 1], &[2, 3]]))
        .expect("(0 1)(2 3) in A5");
    let b = (0..group.order())
        .find(|&b| group.element(b).order() == 3 && group.element(group.mul(a, b)).order() == 5)
        .expect("3-cycle completing a (2,3,5) pair");

    let mut image: Vec<Option<Matrix3<f64>>> = vec![None; group.order()];
    image[group.identity()] = Some(Matrix3::identity());
    let mut queue = vec![group.identity()];
    while let Some(x) = queue.pop() {
        let mx = image[x].expect("visited");
        for (g, mg) in [(a, big_a), (b, big_b)] {
            let y = group.mul(x, g);
            if image[y].is_none() {
                image[y] = Some(mx * mg);
                queue.push(y);
            }
        }
    }
    image.into_iter().map(|m| m.expect("a and b generate A5")).collect()
}

/// Element-indexed matrices of a group acting on S³.
#[derive(Debug, Clone)]
pub struct Representation {
    group: Arc<PermGroup>,
    matrices: Vec<Mat4>,
}

impl Representation {
    /// The model's representation of the standard group it carries.
    pub fn new(group: GroupName, tag: ModelTag) -> Result<Self, GeomError> {
        if tag.group() != group {
            return Err(GeomError::Incompatible { tag, group });
        }
        let g = standard_group(group);
        let matrices = match tag {
            ModelTag::TetraRotA4 | ModelTag::TetraFullS4 => g
                .elements()
                .iter()
                .map(|p| {
                    let r = Matrix3::from_iterator(standard_block(p).iter().copied());
                    let last = if tag == ModelTag::TetraFullS4 && !p.is_even() {
                        -1.0
                    } else {
                        1.0
                    };
                    embed3(&r, last)
                })
                .collect(),
            ModelTag::Simplex4A5 => g
                .elements()
                .iter()
                .map(|p| Mat4::from_iterator(standard_block(p).iter().copied()))
                .collect(),
            ModelTag::DodecaRotA5 => icosahedral_matrices(&g)
                .iter()
                .map(|r| embed3(r, 1.0))
                .collect(),
        };
        Representation::from_matrices(g, matrices)
    }

    /// Wrap explicit matrices after checking SO(4), homomorphism and faithfulness.
    pub fn from_matrices(group: Arc<PermGroup>, matrices: Vec<Mat4>) -> Result<Self, GeomError> {
        if matrices.len() != group.order() {
            return Err(GeomError::MatrixCount {
                expected: group.order(),
                found: matrices.len(),
            });
        }
        for (e, m) in matrices.iter().enumerate() {
            let orth = (m.transpose() * m - Mat4::identity()).amax();
            if orth > ORTHOGONALITY_TOL {
                return Err(GeomError::NotSpecialOrthogonal {
                    element: e,
                    reason: format!("|MᵀM - I| = {orth:e}"),
                });
            }
            let det = m.determinant();
            if (det - 1.0).abs() > DET_TOL {
                return Err(GeomError::NotSpecialOrthogonal {
                    element: e,
                    reason: format!("det = {det}"),
                });
            }
            if e != group.identity() && (m - Mat4::identity()).amax() < HOMOMORPHISM_TOL {
                return Err(GeomError::NotFaithful(e));
            }
        }
        let rep = Representation { group, matrices };
        let (a, b, err) = rep.homomorphism_error();
        if err > HOMOMORPHISM_TOL {
            return Err(GeomError::NotHomomorphism { a, b, err });
        }
        Ok(rep)
    }

    /// Largest entrywise `|M(ab) - M(a)M(b)|`, with the worst pair.
    pub fn homomorphism_error(&self) -> (usize, usize, f64) {
        let g = &self.group;
        let mut worst = (0, 0, 0.0);
        for a in 0..g.order() {
            for b in 0..g.order() {
                let err = (self.matrices[g.mul(a, b)] - self.matrices[a] * self.matrices[b]).amax();
                if err > worst.2 {
                    worst = (a, b, err);
                }
            }
        }
        worst
    }

    pub fn group(&self) -> &Arc<PermGroup> {
        &self.group
    }

    pub fn matrix(&self, e: usize) -> &Mat4 {
        &self.matrices[e]
    }

    pub fn matrices(&self) -> &[Mat4] {
        &self.matrices
    }

    /// Matrices of a subgroup given on the same letters.
    pub fn restrict(&self, sub: &Arc<PermGroup>) -> Result<Self, GeomError> {
        let matrices = sub
            .elements()
            .iter()
            .map(|p| {
                self.group
                    .index_of(p)
                    .map(|i| self.matrices[i])
                    .ok_or(GeomError::Incompatible {
                        tag: ModelTag::TetraRotA4,
                        group: sub.name(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Representation {
            group: sub.clone(),
            matrices,
        })
    }

    /// Fixed set of every element; `None` at the identity.
    pub fn circles(&self) -> Result<Vec<Option<FixedCircle>>, GeomError> {
        (0..self.group.order())
            .map(|e| {
                if e == self.group.identity() {
                    Ok(None)
                } else {
                    fixed_set(&self.matrices[e]).map(Some)
                }
            })
            .collect()
    }
}

/// The +1 eigenspace of a non-identity rotation of S³.
#[derive(Debug, Clone, PartialEq)]
pub enum FixedCircle {
    Empty,
    /// Orthonormal basis of the fixed plane.
    Circle(Vec4, Vec4),
}

impl FixedCircle {
    pub fn is_empty(&self) -> bool {
        matches!(self, FixedCircle::Empty)
    }

    /// Orthogonal projector onto the fixed plane (zero when empty).
    pub fn projector(&self) -> Mat4 {
        match self {
            FixedCircle::Empty => Mat4::zeros(),
            FixedCircle::Circle(a, b) => a * a.transpose() + b * b.transpose(),
        }
    }

    /// Distance from `x` to the fixed plane; infinite when empty.
    pub fn distance(&self, x: &Vec4) -> f64 {
        match self {
            FixedCircle::Empty => f64::INFINITY,
            _ => (x - self.projector() * x).norm(),
        }
    }

    pub fn contains(&self, x: &Vec4, tol: f64) -> bool {
        self.distance(x) <= tol
    }

    /// Angle from a unit vector to the nearest point of the circle.
    pub fn angular_distance(&self, x: &Vec4) -> f64 {
        match self {
            FixedCircle::Empty => f64::INFINITY,
            _ => (self.projector() * x).norm().clamp(0.0, 1.0).acos(),
        }
    }

    pub fn same_as(&self, other: &FixedCircle) -> bool {
        match (self, other) {
            (FixedCircle::Empty, FixedCircle::Empty) => true,
            (FixedCircle::Circle(..), FixedCircle::Circle(..)) => {
                (self.projector() - other.projector()).amax() <= SAME_CIRCLE_TOL
            }
            _ => false,
        }
    }

    /// Common points of two distinct circles: none or an antipodal pair.
    pub fn intersection(&self, other: &FixedCircle) -> Vec<Vec4> {
        let (FixedCircle::Circle(a, b), FixedCircle::Circle(..)) = (self, other) else {
            return Vec::new();
        };
        let off = Mat4::identity() - other.projector();
        let mut n = nalgebra::Matrix4x2::zeros();
        n.set_column(0, &(off * a));
        n.set_column(1, &(off * b));
        let svd = n.svd(false, true);
        let v_t = svd.v_t.expect("requested V");
        let small: Vec<usize> = (0..2).filter(|&i| svd.singular_values[i] < KERNEL_TOL).collect();
        if small.len() != 1 {
            return Vec::new();
        }
        let c = v_t.row(small[0]);
        let p = (a * c[0] + b * c[1]).normalize();
        vec![p, -p]
    }

    /// Angle of the unit vector `x` in the circle's `(a, b)` frame.
    pub fn angle_of(&self, x: &Vec4) -> Option<f64> {
        match self {
            FixedCircle::Empty => None,
            FixedCircle::Circle(a, b) => Some(b.dot(x).atan2(a.dot(x)).rem_euclid(std::f64::consts::TAU)),
        }
    }

    /// The point at angle `phi` in the `(a, b)` frame.
    pub fn point_at(&self, phi: f64) -> Option<Vec4> {
        match self {
            FixedCircle::Empty => None,
            FixedCircle::Circle(a, b) => Some(a * phi.cos() + b * phi.sin()),
        }
    }
}

/// Kernel of `M - I` by singular values.
pub fn fixed_set(m: &Mat4) -> Result<FixedCircle, GeomError> {
    let k = m - Mat4::identity();
    let svd = k.svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut kernel = Vec::new();
    for i in 0..4 {
        let s = svd.singular_values[i];
        if s < KERNEL_TOL {
            kernel.push(i);
        } else if s < AMBIGUOUS_TOL {
            return Err(GeomError::Precision(s));
        }
    }
    match kernel.len() {
        0 => Ok(FixedCircle::Empty),
        2 => {
            let a: Vec4 = v_t.row(kernel[0]).transpose().normalize();
            let b0: Vec4 = v_t.row(kernel[1]).transpose();
            let b = (b0 - a * a.dot(&b0)).normalize();
            Ok(FixedCircle::Circle(a, b))
        }
        4 => Err(GeomError::IdentityFixedSet),
        d => Err(GeomError::EigenspaceDimension(d)),
    }
}

/// Unit corner `i` of the tetrahedron (or simplex) on `n` letters, in
/// Helmert coordinates.
fn corner(n: usize, i: usize) -> nalgebra::DVector<f64> {
    let mut e = nalgebra::DVector::zeros(n);
    e[i] = 1.0;
    (helmert(n) * e).normalize()
}

fn tetra_corner(i: usize) -> Vector3<f64> {
    Vector3::from_iterator(corner(4, i).iter().copied())
}

fn simplex_corner(i: usize) -> Vec4 {
    Vec4::from_iterator(corner(5, i).iter().copied())
}

/// Base point of a special part; the builder's stabilizer of the part fixes it.
pub fn special_base_point(tag: ModelTag, part: Part, params: &ModelParams) -> Result<Vec4, GeomError> {
    params.validate()?;
    let lift = |v: Vector3<f64>, w: f64| Vec4::new(v.x, v.y, v.z, w);
    let t = params.t;
    let p = match (tag, part) {
        (ModelTag::TetraRotA4 | ModelTag::DodecaRotA5, Part::FixedPoint) => Vec4::new(0.0, 0.0, 0.0, 1.0),
        (ModelTag::TetraRotA4 | ModelTag::TetraFullS4, Part::V4) => lift(tetra_corner(0), 0.0),
        (ModelTag::TetraFullS4, Part::V8) => {
            lift(tetra_corner(0) * params.theta.cos(), params.theta.sin())
        }
        (ModelTag::TetraFullS4, Part::V12) => {
            lift((tetra_corner(0) * (1.0 - t) + tetra_corner(1) * t).normalize(), 0.0)
        }
        (ModelTag::Simplex4A5, Part::W5) => simplex_corner(0),
        (ModelTag::Simplex4A5, Part::W20) => {
            (simplex_corner(0) * (1.0 - t) + simplex_corner(1) * t).normalize()
        }
        _ => return Err(GeomError::UnsupportedPart(part, tag)),
    };
    Ok(p)
}

/// Vertex coordinates of one special part, indexed like its coset representatives.
pub fn special_orbit_coords(
    rep: &Representation,
    tag: ModelTag,
    part: Part,
    params: &ModelParams,
    reps: &[usize],
) -> Result<Vec<Vec4>, GeomError> {
    let base = special_base_point(tag, part, params)?;
    Ok(reps.iter().map(|&r| rep.matrix(r) * base).collect())
}

/// `n` free base points, each at least [`FREE_DELTA`] from every fixed circle
/// and with orbits at least [`FREE_SEPARATION`] from each other and from
/// `existing`. Returns the base points.
pub fn free_orbit_coords(
    rep: &Representation,
    n: usize,
    rng: &mut ChaCha8Rng,
    existing: &[Vec4],
) -> Result<Vec<Vec4>, GeomError> {
    let circles: Vec<FixedCircle> = rep.circles()?.into_iter().flatten().collect();
    let mut placed: Vec<Vec4> = existing.to_vec();
    let mut bases = Vec::with_capacity(n);
    for _ in 0..n {
        let mut ok = None;
        for _ in 0..FREE_RETRIES {
            let x = Vec4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal)).normalize();
            if circles.iter().any(|c| c.angular_distance(&x) < FREE_DELTA) {
                continue;
            }
            let orbit: Vec<Vec4> = rep.matrices().iter().map(|m| m * x).collect();
            let clash = orbit.iter().enumerate().any(|(i, p)| {
                placed.iter().any(|q| (p - q).norm() < FREE_SEPARATION)
                    || orbit[..i].iter().any(|q| (p - q).norm() < FREE_SEPARATION)
            });
            if !clash {
                ok = Some((x, orbit));
                break;
            }
        }
        let (x, orbit) = ok.ok_or(GeomError::Placement(FREE_RETRIES))?;
        placed.extend(orbit);
        bases.push(x);
    }
    Ok(bases)
}

#[derive(Debug, Clone)]
pub struct RealizedVertices {
    pub tag: ModelTag,
    pub params: ModelParams,
    pub seed: u64,
    /// Matrices of the plan's group (restricted if the plan is).
    pub representation: Representation,
    /// Matrices of the parent group the vertices were placed with.
    pub parent_representation: Representation,
    pub coords: Vec<Vec4>,
    pub labels: Vec<VertexLabel>,
}

/// Place every vertex of a built plan on S³.
pub fn realize(
    plan: &OrbitPlan,
    action: &VertexAction,
    params: &ModelParams,
    seed: u64,
) -> Result<RealizedVertices, GeomError> {
    params.validate()?;
    let tag = match plan.model {
        Some(tag) if !plan.is_knotted() => tag,
        _ => return Err(GeomError::KnottedPlan),
    };
    let parent_rep = Representation::new(plan.parent_group(), tag)?;
    let rep = match plan.restriction.subgroup() {
        Some(sub) => parent_rep.restrict(&sub)?,
        None => parent_rep.clone(),
    };

    let m = action.m();
    let mut coords = vec![Vec4::zeros(); m];
    let mut special = Vec::new();
    for (v, label) in action.labels.iter().enumerate() {
        let part = plan.parts[label.part];
        if !matches!(part, Part::Free(_)) {
            let p = parent_rep.matrix(label.rep) * special_base_point(tag, part, params)?;
            coords[v] = p;
            special.push(p);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (k, &part) in plan.parts.iter().enumerate() {
        let Part::Free(n) = part else { continue };
        let bases = free_orbit_coords(&parent_rep, n, &mut rng, &special)?;
        for (v, label) in action.labels.iter().enumerate() {
            if label.part == k {
                let p = parent_rep.matrix(label.rep) * bases[label.copy];
                coords[v] = p;
                special.push(p);
            }
        }
    }

    let r = RealizedVertices {
        tag,
        params: *params,
        seed,
        representation: rep,
        parent_representation: parent_rep,
        coords,
        labels: action.labels.clone(),
    };
    check_invariance(&r.representation, &r.coords, &action.action)?;
    check_invariance(&r.parent_representation, &r.coords, &action.parent)?;
    check_separation(&r.coords)?;
    Ok(r)
}

/// Largest `|M(e)·x_v - x_{e(v)}|` with its location.
pub fn invariance_error(rep: &Representation, coords: &[Vec4], action: &GroupAction) -> (usize, usize, f64) {
    let mut worst = (0, 0, 0.0);
    for e in 0..rep.group().order() {
        let m = rep.matrix(e);
        let p = action.act(e);
        for (v, x) in coords.iter().enumerate() {
            let err = (m * x - coords[p.apply(v)]).amax();
            if err > worst.2 {
                worst = (e, v, err);
            }
        }
    }
    worst
}

pub fn check_invariance(rep: &Representation, coords: &[Vec4], action: &GroupAction) -> Result<(), GeomError> {
    let (element, vertex, err) = invariance_error(rep, coords, action);
    if err > INVARIANCE_TOL {
        return Err(GeomError::Invariance {
            element,
            vertex,
            err,
        });
    }
    Ok(())
}

/// Closest pair of vertices.
pub fn min_distance(coords: &[Vec4]) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..coords.len() {
        for j in i + 1..coords.len() {
            let d = (coords[i] - coords[j]).norm();
            if best.is_none_or(|b| d < b.2) {
                best = Some((i, j, d));
            }
        }
    }
    best
}

pub fn check_separation(coords: &[Vec4]) -> Result<(), GeomError> {
    match min_distance(coords) {
        Some((i, j, d)) if d < MIN_VERTEX_DISTANCE => Err(GeomError::Collision(i, j, d)),
        _ => Ok(()),
    }
}

/// Per-class count of vertices lying on each element's fixed circle.
pub fn geometric_profile(rep: &Representation, coords: &[Vec4]) -> Result<FixedVertexProfile, GeomError> {
    let group = rep.group();
    let circles = rep.circles()?;
    let mut p = FixedVertexProfile::zero(group.name(), coords.len());
    let mut seen: Vec<(ProfileClass, usize, usize)> = Vec::new();
    for e in group.non_identity() {
        let Some(class) = ProfileClass::of(group.class_of(e)) else {
            continue;
        };
        let circle = circles[e].as_ref().expect("non-identity");
        let n = coords
            .iter()
            .filter(|x| circle.contains(x, CIRCLE_MEMBERSHIP_TOL))
            .count();
        match seen.iter().find(|(c, _, _)| *c == class) {
            Some(&(_, e0, n0)) if n0 != n => return Err(GeomError::ClassDisagreement(e0, e, n0, n)),
            Some(_) => {}
            None => {
                seen.push((class, e, n));
                p.set(class, n as u32);
            }
        }
    }
    Ok(p)
}

/// Worst-case numbers for one realization.
#[derive(Debug, Clone, Serialize)]
pub struct RealizationMetrics {
    pub homomorphism_error: f64,
    pub invariance_error: f64,
    pub min_distance: f64,
    pub empty_circle_orders: Vec<usize>,
}

pub fn metrics(r: &RealizedVertices, action: &VertexAction) -> Result<RealizationMetrics, GeomError> {
    let circles = r.representation.circles()?;
    let group = r.representation.group();
    let mut empty: Vec<usize> = circles
        .iter()
        .enumerate()
        .filter(|(_, c)| c.as_ref().is_some_and(FixedCircle::is_empty))
        .map(|(e, _)| group.element(e).order())
        .collect();
    empty.sort_unstable();
    empty.dedup();
    Ok(RealizationMetrics {
        homomorphism_error: r.representation.homomorphism_error().2,
        invariance_error: invariance_error(&r.representation, &r.coords, &action.action).2,
        min_distance: min_distance(&r.coords).map_or(f64::INFINITY, |b| b.2),
        empty_circle_orders: empty,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build, measured_profile, plan};

    fn averaging_projector(m: &Mat4, order: usize) -> Mat4 {
        let mut sum = Mat4::zeros();
        let mut p = Mat4::identity();
        for _ in 0..order {
            sum += p;
            p *= m;
        }
        sum / order as f64
    }

    #[test]
    fn representations_are_faithful_homomorphisms() {
        for tag in ModelTag::ALL {
            let rep = Representation::new(tag.group(), tag).unwrap();
            assert!(rep.homomorphism_error().2 <= HOMOMORPHISM_TOL, "{tag}");
            assert!((rep.matrix(rep.group().identity()) - Mat4::identity()).amax() < 1e-12);
        }
    }

    #[test]
    fn incompatible_pair_is_rejected() {
        assert!(matches!(
            Representation::new(GroupName::S4, ModelTag::Simplex4A5),
            Err(GeomError::Incompatible { .. })
        ));
    }

    #[test]
    fn fixed_sets_match_averaging_projector() {
        for tag in ModelTag::ALL {
            let rep = Representation::new(tag.group(), tag).unwrap();
            let g = rep.group().clone();
            for e in g.non_identity() {
                let m = rep.matrix(e);
                let oracle = averaging_projector(m, g.element(e).order());
                let got = fixed_set(m).unwrap().projector();
                assert!((oracle - got).amax() < 1e-9, "{tag} {}", g.element(e));
            }
        }
    }

    #[test]
    fn empty_fixed_sets_by_model() {
        let empty_orders = |tag: ModelTag| {
            let rep = Representation::new(tag.group(), tag).unwrap();
            let g = rep.group().clone();
            let circles = rep.circles().unwrap();
            let mut orders: Vec<usize> = g
                .non_identity()
                .filter(|&e| circles[e].as_ref().unwrap().is_empty())
                .map(|e| g.element(e).order())
                .collect();
            orders.dedup();
            orders
        };
        assert_eq!(empty_orders(ModelTag::TetraFullS4), vec![4]);
        assert_eq!(empty_orders(ModelTag::Simplex4A5), vec![5]);
        assert!(empty_orders(ModelTag::DodecaRotA5).is_empty());
        assert!(empty_orders(ModelTag::TetraRotA4).is_empty());
    }

    #[test]
    fn identity_is_rejected() {
        assert!(matches!(fixed_set(&Mat4::identity()), Err(GeomError::IdentityFixedSet)));
    }

    #[test]
    fn simplex_three_cycle_circle_holds_two_corners() {
        let rep = Representation::new(GroupName::A5, ModelTag::Simplex4A5).unwrap();
        let g = rep.group();
        let e = g.index_of(&Permutation::from_cycles(5, &[&[2, 3, 4]])).unwrap();
        let c = fixed_set(rep.matrix(e)).unwrap();
        assert!(c.contains(&simplex_corner(0), 1e-12));
        assert!(c.contains(&simplex_corner(1), 1e-12));
        assert!(!c.contains(&simplex_corner(2), 1e-3));
    }

    #[test]
    fn distinct_circles_meet_in_zero_or_two_points() {
        for tag in ModelTag::ALL {
            let rep = Representation::new(tag.group(), tag).unwrap();
            let circles: Vec<FixedCircle> = rep.circles().unwrap().into_iter().flatten().collect();
            for c1 in &circles {
                for c2 in &circles {
                    if c1.same_as(c2) {
                        continue;
                    }
                    let pts = c1.intersection(c2);
                    assert!(pts.is_empty() || pts.len() == 2);
                    for p in pts {
                        assert!(c1.contains(&p, 1e-9) && c2.contains(&p, 1e-9));
                    }
                }
            }
        }
    }

    #[test]
    fn midpoint_is_rejected() {
        let params = ModelParams { t: 0.5, ..Default::default() };
        assert!(matches!(params.validate(), Err(GeomError::MidpointCollision)));
    }

    #[test]
    fn realizations_match_profiles() {
        for (g, m) in [
            (GroupName::S4, 20),
            (GroupName::A5, 61),
            (GroupName::A5, 20),
            (GroupName::A4, 17),
            (GroupName::A4, 65),
        ] {
            let p = plan(g, m).unwrap();
            let a = build(&p).unwrap();
            let r = realize(&p, &a, &ModelParams::default(), 7).unwrap();
            let geo = geometric_profile(&r.representation, &r.coords).unwrap();
            assert_eq!(geo, measured_profile(&a).unwrap(), "{p}");
        }
    }

    #[test]
    fn free_orbits_are_deterministic() {
        let p = plan(GroupName::S4, 48).unwrap();
        let a = build(&p).unwrap();
        let r1 = realize(&p, &a, &ModelParams::default(), 3).unwrap();
        let r2 = realize(&p, &a, &ModelParams::default(), 3).unwrap();
        assert_eq!(r1.coords, r2.coords);
        let r3 = realize(&p, &a, &ModelParams::default(), 4).unwrap();
        assert_ne!(r1.coords, r3.coords);
    }

    #[test]
    fn knotted_plans_have_no_geometry() {
        let p = plan(GroupName::A4, 5).unwrap();
        let a = build(&p).unwrap();
        assert!(matches!(
            realize(&p, &a, &ModelParams::default(), 0),
            Err(GeomError::KnottedPlan)
        ));
    }
}
