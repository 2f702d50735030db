//! Checks of the five edge-embedding hypotheses on a realized vertex set.
//!
//! Pairs of vertices fixed by a non-trivial element must be joined inside
//! that element's fixed circle. The checker picks one arc per such pair,
//! verifies the arcs are disjoint and permuted by the group, and checks the
//! conditions on elements that swap two vertices.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::geom::{FixedCircle, GeomError, Representation, Vec4, CIRCLE_MEMBERSHIP_TOL};
use crate::perm::GroupAction;

/// Angular slack when deciding whether a point is inside an arc.
pub const ANGLE_EPS: f64 = 1e-9;
/// Circle membership for pairs and arc images.
pub const PAIR_TOL: f64 = 1e-8;

/// The action, matrices and coordinates, with fixed circles precomputed.
pub struct EdgeContext<'a> {
    pub action: &'a GroupAction,
    pub rep: &'a Representation,
    pub coords: &'a [Vec4],
    /// Fixed set per element; `None` at the identity.
    pub circles: Vec<Option<FixedCircle>>,
}

impl<'a> EdgeContext<'a> {
    pub fn new(action: &'a GroupAction, rep: &'a Representation, coords: &'a [Vec4]) -> Result<Self, GeomError> {
        Ok(EdgeContext {
            action,
            rep,
            coords,
            circles: rep.circles()?,
        })
    }

    fn circle(&self, e: usize) -> &FixedCircle {
        self.circles[e].as_ref().expect("non-identity element")
    }

    fn fixers(&self, u: usize, v: usize) -> Vec<usize> {
        let g = self.action.group();
        g.non_identity()
            .filter(|&e| {
                let p = self.action.act(e);
                p.apply(u) == u && p.apply(v) == v
            })
            .collect()
    }

    fn stabilizes_setwise(&self, e: usize, (u, v): (usize, usize)) -> bool {
        let p = self.action.act(e);
        let (a, b) = (p.apply(u), p.apply(v));
        (a, b) == (u, v) || (a, b) == (v, u)
    }

    /// Smallest element index whose circle equals that of `e`.
    fn canonical(&self, e: usize) -> usize {
        let c = self.circle(e);
        self.action
            .group()
            .non_identity()
            .find(|&f| self.circle(f).same_as(c))
            .expect("e itself qualifies")
    }
}

/// Every pair of vertices fixed by some non-trivial element.
pub fn required_pairs(action: &GroupAction) -> Vec<(usize, usize)> {
    let g = action.group();
    let movers: Vec<usize> = g.non_identity().collect();
    let m = action.m();
    let mut out = Vec::new();
    for u in 0..m {
        let fixing_u: Vec<usize> = movers
            .iter()
            .copied()
            .filter(|&e| action.act(e).apply(u) == u)
            .collect();
        if fixing_u.is_empty() {
            continue;
        }
        for v in u + 1..m {
            if fixing_u.iter().any(|&e| action.act(e).apply(v) == v) {
                out.push((u, v));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    fn pass(detail: impl Into<String>) -> Self {
        Verdict {
            passed: true,
            detail: detail.into(),
        }
    }

    fn fail(detail: impl Into<String>) -> Self {
        Verdict {
            passed: false,
            detail: detail.into(),
        }
    }
}

/// All non-trivial fixers of a required pair share one circle through both vertices.
pub fn check_h1(ctx: &EdgeContext) -> Verdict {
    let pairs = required_pairs(ctx.action);
    for &(u, v) in &pairs {
        let fixers = ctx.fixers(u, v);
        let first = ctx.circle(fixers[0]);
        if first.is_empty() {
            return Verdict::fail(format!("pair {{{u},{v}}}: fixer {} has no fixed circle", fixers[0]));
        }
        if let Some(&h) = fixers[1..].iter().find(|&&h| !ctx.circle(h).same_as(first)) {
            return Verdict::fail(format!(
                "pair {{{u},{v}}}: elements {} and {h} fix it with different circles",
                fixers[0]
            ));
        }
        for x in [u, v] {
            if !first.contains(&ctx.coords[x], PAIR_TOL) {
                return Verdict::fail(format!("vertex {x} is off the circle of element {}", fixers[0]));
            }
        }
    }
    Verdict::pass(format!("{} required pairs", pairs.len()))
}

/// One arc of a fixed circle, from angle `start` counterclockwise by `sweep`,
/// in the frame returned by `fixed_set` for `circle_element`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeArc {
    pub pair: (usize, usize),
    pub circle_element: usize,
    pub start: f64,
    pub sweep: f64,
}

impl EdgeArc {
    pub fn end(&self) -> f64 {
        self.start + self.sweep
    }

    /// Whether angle `phi` is strictly inside the arc.
    pub fn contains_angle(&self, phi: f64) -> bool {
        let d = (phi - self.start).rem_euclid(TAU);
        d > ANGLE_EPS && d < self.sweep - ANGLE_EPS
    }

    pub fn midpoint(&self, circle: &FixedCircle) -> Vec4 {
        circle.point_at(self.start + self.sweep / 2.0).expect("non-empty circle")
    }
}

pub type ArcAssignment = Vec<EdgeArc>;

#[derive(Debug, Clone, PartialEq)]
pub enum ArcError {
    NonConsecutivePair(usize, usize),
    Invalid(String),
}

impl std::fmt::Display for ArcError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ArcError::NonConsecutivePair(u, v) => {
                write!(f, "pair {{{u},{v}}}: both arcs of its circle meet a vertex or another circle")
            }
            ArcError::Invalid(s) => f.write_str(s),
        }
    }
}

/// Points an arc interior must avoid: other vertices on its circle, and
/// crossings with circles of elements that do not preserve the pair.
fn blockers(ctx: &EdgeContext, circle_element: usize, pair: (usize, usize)) -> Vec<Vec4> {
    let c = ctx.circle(circle_element);
    let mut out: Vec<Vec4> = (0..ctx.coords.len())
        .filter(|&x| x != pair.0 && x != pair.1)
        .map(|x| ctx.coords[x])
        .filter(|x| c.contains(x, CIRCLE_MEMBERSHIP_TOL))
        .collect();
    for h in ctx.action.group().non_identity() {
        let other = ctx.circle(h);
        if other.is_empty() || other.same_as(c) || ctx.stabilizes_setwise(h, pair) {
            continue;
        }
        out.extend(c.intersection(other));
    }
    out
}

fn arc_is_clear(ctx: &EdgeContext, arc: &EdgeArc) -> bool {
    let c = ctx.circle(arc.circle_element);
    blockers(ctx, arc.circle_element, arc.pair)
        .iter()
        .all(|p| !arc.contains_angle(c.angle_of(p).expect("non-empty")))
}

/// Pick an arc for every required pair: the clear one of the two arcs
/// between its endpoints, or the shorter if both are clear.
pub fn assign_arcs(ctx: &EdgeContext) -> Result<ArcAssignment, ArcError> {
    let mut arcs = Vec::new();
    for (u, v) in required_pairs(ctx.action) {
        let fixers = ctx.fixers(u, v);
        let e = ctx.canonical(fixers[0]);
        let c = ctx.circle(e);
        let (Some(a), Some(b)) = (c.angle_of(&ctx.coords[u]), c.angle_of(&ctx.coords[v])) else {
            return Err(ArcError::Invalid(format!("pair {{{u},{v}}} has no fixed circle")));
        };
        let forward = (b - a).rem_euclid(TAU);
        let candidates = [
            EdgeArc {
                pair: (u, v),
                circle_element: e,
                start: a,
                sweep: forward,
            },
            EdgeArc {
                pair: (u, v),
                circle_element: e,
                start: b,
                sweep: TAU - forward,
            },
        ];
        let mut clear: Vec<EdgeArc> = candidates.into_iter().filter(|arc| arc_is_clear(ctx, arc)).collect();
        clear.sort_by(|x, y| x.sweep.total_cmp(&y.sweep));
        match clear.first() {
            Some(arc) => arcs.push(*arc),
            None => return Err(ArcError::NonConsecutivePair(u, v)),
        }
    }
    validate_arcs(ctx, &arcs)?;
    Ok(arcs)
}

fn interiors_meet(ctx: &EdgeContext, x: &EdgeArc, y: &EdgeArc) -> bool {
    let cx = ctx.circle(x.circle_element);
    let cy = ctx.circle(y.circle_element);
    let angle = |p: Vec4| cx.angle_of(&p).expect("non-empty");
    if cx.same_as(cy) {
        // Re-express y in x's frame; the two frames may differ in orientation.
        let ys = angle(cy.point_at(y.start).expect("non-empty"));
        let ye = angle(cy.point_at(y.end()).expect("non-empty"));
        let ym = angle(y.midpoint(cy));
        let same_way = ((ym - ys).rem_euclid(TAU) - y.sweep / 2.0).abs() < 1e-6;
        let y = EdgeArc {
            start: if same_way { ys } else { ye },
            ..*y
        };
        let mid = |a: &EdgeArc| a.start + a.sweep / 2.0;
        x.contains_angle(mid(&y))
            || y.contains_angle(mid(x))
            || x.contains_angle(y.start)
            || x.contains_angle(y.end())
            || y.contains_angle(x.start)
            || y.contains_angle(x.end())
    } else {
        cx.intersection(cy).iter().any(|p| {
            x.contains_angle(angle(*p)) && y.contains_angle(cy.angle_of(p).expect("non-empty"))
        })
    }
}

/// Endpoints match the pair, the circle fixes the pair, interiors avoid
/// the blockers, and distinct arcs have disjoint interiors.
pub fn validate_arcs(ctx: &EdgeContext, arcs: &[EdgeArc]) -> Result<(), ArcError> {
    let n = ctx.action.group().order();
    let pairs = required_pairs(ctx.action);
    if arcs.len() != pairs.len() {
        return Err(ArcError::Invalid(format!(
            "{} arcs for {} required pairs",
            arcs.len(),
            pairs.len()
        )));
    }
    for (arc, &pair) in arcs.iter().zip(&pairs) {
        let (u, v) = pair;
        if arc.pair != pair {
            return Err(ArcError::Invalid(format!("arc for {:?} where {{{u},{v}}} was expected", arc.pair)));
        }
        if arc.circle_element >= n || ctx.circles[arc.circle_element].is_none() {
            return Err(ArcError::Invalid(format!("arc {{{u},{v}}}: bad circle element {}", arc.circle_element)));
        }
        if !ctx.fixers(u, v).contains(&arc.circle_element) {
            return Err(ArcError::Invalid(format!(
                "arc {{{u},{v}}}: element {} does not fix the pair",
                arc.circle_element
            )));
        }
        if !(arc.sweep > 0.0 && arc.sweep < TAU) {
            return Err(ArcError::Invalid(format!("arc {{{u},{v}}}: sweep {} out of range", arc.sweep)));
        }
        let c = ctx.circle(arc.circle_element);
        let ends = [c.point_at(arc.start), c.point_at(arc.end())];
        let ok = |p: Option<Vec4>, x: usize| p.is_some_and(|p| (p - ctx.coords[x]).amax() <= PAIR_TOL);
        if !((ok(ends[0], u) && ok(ends[1], v)) || (ok(ends[0], v) && ok(ends[1], u))) {
            return Err(ArcError::Invalid(format!("arc {{{u},{v}}}: endpoints are not the pair")));
        }
        if !arc_is_clear(ctx, arc) {
            return Err(ArcError::Invalid(format!(
                "arc {{{u},{v}}} passes through a vertex or a crossing circle"
            )));
        }
    }
    for i in 0..arcs.len() {
        for j in i + 1..arcs.len() {
            if interiors_meet(ctx, &arcs[i], &arcs[j]) {
                return Err(ArcError::Invalid(format!(
                    "arcs {:?} and {:?} overlap",
                    arcs[i].pair, arcs[j].pair
                )));
            }
        }
    }
    Ok(())
}

/// Each element maps every arc onto the arc of the image pair.
pub fn check_h3(ctx: &EdgeContext, arcs: &[EdgeArc]) -> Verdict {
    let index = |pair: (usize, usize)| {
        let key = (pair.0.min(pair.1), pair.0.max(pair.1));
        arcs.iter().position(|a| a.pair == key)
    };
    for f in 0..ctx.action.group().order() {
        let p = ctx.action.act(f);
        let m = ctx.rep.matrix(f);
        for arc in arcs {
            let image = (p.apply(arc.pair.0), p.apply(arc.pair.1));
            let Some(k) = index(image) else {
                return Verdict::fail(format!("element {f} sends pair {:?} to unpaired {image:?}", arc.pair));
            };
            let target = &arcs[k];
            let tc = ctx.circle(target.circle_element);
            let mid = m * arc.midpoint(ctx.circle(arc.circle_element));
            let inside = tc.contains(&mid, PAIR_TOL)
                && target.contains_angle(tc.angle_of(&mid).expect("non-empty"));
            if !inside {
                return Verdict::fail(format!(
                    "element {f} does not map arc {:?} onto arc {:?}",
                    arc.pair, target.pair
                ));
            }
        }
    }
    Verdict::pass(format!("{} arcs permuted by the group", arcs.len()))
}

/// Elements that swap some pair of vertices.
pub fn interchangers(action: &GroupAction) -> Vec<usize> {
    action
        .group()
        .non_identity()
        .filter(|&e| action.interchanges_some_pair(e))
        .collect()
}

/// An interchanger fixes at most two vertices, so the complete graph on its
/// fixed vertices fits in a proper arc.
pub fn check_h4(action: &GroupAction) -> Verdict {
    for g in interchangers(action) {
        let n = action.fixed_count(g);
        if n > 2 {
            return Verdict::fail(format!("interchanger {} fixes {n} vertices", action.group().element(g)));
        }
    }
    Verdict::pass("every interchanger fixes at most 2 vertices")
}

/// An interchanger has a fixed circle shared with no other non-identity element.
pub fn check_h5(ctx: &EdgeContext) -> Verdict {
    let group = ctx.action.group();
    for g in interchangers(ctx.action) {
        let c = ctx.circle(g);
        if c.is_empty() {
            return Verdict::fail(format!("interchanger {} has no fixed points", group.element(g)));
        }
        if let Some(h) = group.non_identity().find(|&h| h != g && ctx.circle(h).same_as(c)) {
            return Verdict::fail(format!(
                "interchanger {} shares its circle with {}",
                group.element(g),
                group.element(h)
            ));
        }
    }
    Verdict::pass(format!("{} interchangers", interchangers(ctx.action).len()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub h1: Verdict,
    pub h2: Verdict,
    pub h3: Verdict,
    pub h4: Verdict,
    pub h5: Verdict,
    pub arcs: Option<ArcAssignment>,
    pub overall: bool,
}

impl HypothesisReport {
    pub fn verdicts(&self) -> [(&'static str, &Verdict); 5] {
        [
            ("h1", &self.h1),
            ("h2", &self.h2),
            ("h3", &self.h3),
            ("h4", &self.h4),
            ("h5", &self.h5),
        ]
    }

    pub fn first_failure(&self) -> Option<(&'static str, &Verdict)> {
        self.verdicts().into_iter().find(|(_, v)| !v.passed)
    }
}

fn report(ctx: &EdgeContext, arcs: Result<ArcAssignment, ArcError>, h1: Verdict) -> HypothesisReport {
    let (h2, h3, arcs) = match arcs {
        Ok(arcs) => {
            let h3 = check_h3(ctx, &arcs);
            (Verdict::pass(format!("{} arcs", arcs.len())), h3, Some(arcs))
        }
        Err(e) => (Verdict::fail(e.to_string()), Verdict::fail("no arc assignment"), None),
    };
    let h4 = check_h4(ctx.action);
    let h5 = check_h5(ctx);
    let overall = h1.passed && h2.passed && h3.passed && h4.passed && h5.passed;
    HypothesisReport {
        h1,
        h2,
        h3,
        h4,
        h5,
        arcs,
        overall,
    }
}

/// Run all five checks, constructing the arcs.
pub fn full_report(ctx: &EdgeContext) -> HypothesisReport {
    let h1 = check_h1(ctx);
    let arcs = if h1.passed {
        assign_arcs(ctx)
    } else {
        Err(ArcError::Invalid("skipped: h1 failed".into()))
    };
    report(ctx, arcs, h1)
}

/// Run all five checks against a given arc assignment.
pub fn report_for_arcs(ctx: &EdgeContext, arcs: &[EdgeArc]) -> HypothesisReport {
    let h1 = check_h1(ctx);
    let arcs = if h1.passed {
        validate_arcs(ctx, arcs).map(|()| arcs.to_vec())
    } else {
        Err(ArcError::Invalid("skipped: h1 failed".into()))
    };
    report(ctx, arcs, h1)
}
