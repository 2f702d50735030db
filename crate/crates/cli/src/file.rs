//! The self-contained realization certificate and its verifier.

use std::sync::Arc;

use nalgebra::Matrix4;
use serde::ser::Error as _;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use tsglab::builder::{OrbitPlan, Part, VertexAction};
use tsglab::edges::{report_for_arcs, EdgeArc, EdgeContext, HypothesisReport};
use tsglab::geom::{
    check_invariance, check_separation, geometric_profile, metrics, ModelParams, ModelTag,
    RealizedVertices, Representation, Vec4,
};
use tsglab::perm::{GroupAction, GroupName, PermGroup, Permutation};
use tsglab::profile::{classes, profile_of_action};

pub const SCHEMA: &str = "tsglab-realization/1";
const UNIT_TOL: f64 = 1e-9;

/// Floats as 17 significant digits.
fn sig17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    RawValue::from_string(format!("{x:.16e}"))
        .map_err(S::Error::custom)?
        .serialize(s)
}

fn sig17_seq<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let raw = xs
        .iter()
        .map(|x| RawValue::from_string(format!("{x:.16e}")))
        .collect::<Result<Vec<_>, _>>()
        .map_err(S::Error::custom)?;
    raw.serialize(s)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelRecord {
    pub tag: ModelTag,
    pub restricted_from: Option<GroupName>,
    #[serde(serialize_with = "sig17")]
    pub theta: f64,
    #[serde(serialize_with = "sig17")]
    pub t: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementRecord {
    /// Images of the group's own letters.
    pub images: Vec<usize>,
    /// Row-major 4×4 matrix.
    #[serde(serialize_with = "sig17_seq")]
    pub matrix: Vec<f64>,
    pub vertex_images: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VertexRecord {
    pub id: usize,
    pub part: String,
    #[serde(serialize_with = "sig17_seq")]
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArcRecord {
    pub pair: [usize; 2],
    pub circle_element: usize,
    #[serde(serialize_with = "sig17")]
    pub start: f64,
    #[serde(serialize_with = "sig17")]
    pub end: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRecord {
    pub h1: bool,
    pub h2: bool,
    pub h3: bool,
    pub h4: bool,
    pub h5: bool,
    pub overall: bool,
    pub profile_classes: Vec<String>,
    pub profile: Vec<u32>,
    pub burnside_orbits: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RealizationFile {
    pub schema: String,
    pub group: GroupName,
    pub m: usize,
    pub plan: OrbitPlan,
    pub model: ModelRecord,
    pub elements: Vec<ElementRecord>,
    pub vertices: Vec<VertexRecord>,
    pub arcs: Vec<ArcRecord>,
    pub report: ReportRecord,
}

fn part_label(plan: &OrbitPlan, part: usize, copy: usize) -> String {
    match plan.parts[part] {
        Part::Free(_) => format!("Free#{copy}"),
        p => p.to_string(),
    }
}

impl RealizationFile {
    pub fn new(
        plan: &OrbitPlan,
        action: &VertexAction,
        r: &RealizedVertices,
        report: &HypothesisReport,
    ) -> Self {
        let group = action.action.group();
        let elements = (0..group.order())
            .map(|e| ElementRecord {
                images: group.element(e).images().to_vec(),
                matrix: r.representation.matrix(e).transpose().iter().copied().collect(),
                vertex_images: action.action.act(e).images().to_vec(),
            })
            .collect();
        let vertices = r
            .coords
            .iter()
            .zip(&r.labels)
            .enumerate()
            .map(|(id, (x, l))| VertexRecord {
                id,
                part: part_label(plan, l.part, l.copy),
                coords: x.iter().copied().collect(),
            })
            .collect();
        let arcs = report
            .arcs
            .iter()
            .flatten()
            .map(|a| ArcRecord {
                pair: [a.pair.0, a.pair.1],
                circle_element: a.circle_element,
                start: a.start,
                end: a.end(),
            })
            .collect();
        let profile = profile_of_action(&action.action).expect("built actions are class functions");
        RealizationFile {
            schema: SCHEMA.to_string(),
            group: plan.group,
            m: plan.m,
            plan: plan.clone(),
            model: ModelRecord {
                tag: r.tag,
                restricted_from: plan.restriction.subgroup().map(|_| plan.parent_group()),
                theta: r.params.theta,
                t: r.params.t,
                seed: r.seed,
            },
            elements,
            vertices,
            arcs,
            report: ReportRecord {
                h1: report.h1.passed,
                h2: report.h2.passed,
                h3: report.h3.passed,
                h4: report.h4.passed,
                h5: report.h5.passed,
                overall: report.overall,
                profile_classes: classes(plan.group).iter().map(|(c, _)| c.name().to_string()).collect(),
                profile: profile.counts(),
                burnside_orbits: action.action.burnside_orbit_count().expect("integral"),
            },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn params(&self) -> ModelParams {
        ModelParams {
            theta: self.model.theta,
            t: self.model.t,
        }
    }
}

/// The first invariant a file breaks, by name.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub invariant: &'static str,
    pub detail: String,
}

fn fail<T>(invariant: &'static str, detail: impl ToString) -> Result<T, Failure> {
    Err(Failure {
        invariant,
        detail: detail.to_string(),
    })
}

/// What a successful verification recomputed.
#[derive(Debug, Clone)]
pub struct Verified {
    pub report: HypothesisReport,
    pub profile: Vec<u32>,
    pub burnside_orbits: usize,
    pub homomorphism_error: f64,
    pub invariance_error: f64,
    pub min_distance: f64,
}

/// Rebuild group, matrices, action and arcs from the file and re-run every check.
pub fn verify(file: &RealizationFile) -> Result<Verified, Failure> {
    params_ok(file)?;
    let degree = file.elements.first().map_or(0, |e| e.images.len());
    let perms = file
        .elements
        .iter()
        .map(|e| Permutation::from_images(e.images.clone()))
        .collect::<Result<Vec<_>, _>>()
        .or_else(|e| fail("group", e))?;
    let group = Arc::new(PermGroup::from_elements(file.group, degree, perms).or_else(|e| fail("group", e))?);

    let mut matrices = Vec::with_capacity(file.elements.len());
    for (i, e) in file.elements.iter().enumerate() {
        if e.matrix.len() != 16 {
            return fail("schema", format!("element {i} has {} matrix entries", e.matrix.len()));
        }
        matrices.push(Matrix4::from_row_slice(&e.matrix));
    }
    let rep = Representation::from_matrices(group.clone(), matrices).or_else(|e| fail("homomorphism", e))?;

    let vertex_perms = file
        .elements
        .iter()
        .map(|e| Permutation::from_images(e.vertex_images.clone()))
        .collect::<Result<Vec<_>, _>>()
        .or_else(|e| fail("action", e))?;
    let action = GroupAction::new(group, vertex_perms).or_else(|e| fail("homomorphism", e))?;
    if action.m() != file.m || file.vertices.len() != file.m {
        return fail("schema", format!("m = {} but {} vertices", file.m, file.vertices.len()));
    }
    if !action.is_faithful() {
        return fail("faithfulness", "a non-identity element acts trivially");
    }

    let mut coords = Vec::with_capacity(file.m);
    for (i, v) in file.vertices.iter().enumerate() {
        if v.id != i || v.coords.len() != 4 {
            return fail("schema", format!("vertex record {i} malformed"));
        }
        let x = Vec4::from_row_slice(&v.coords);
        if (x.norm() - 1.0).abs() > UNIT_TOL {
            return fail("unit-norm", format!("vertex {i} has norm {}", x.norm()));
        }
        coords.push(x);
    }
    check_invariance(&rep, &coords, &action).or_else(|e| fail("invariance", e))?;
    check_separation(&coords).or_else(|e| fail("separation", e))?;

    let combinatorial = profile_of_action(&action).or_else(|e| fail("profile", e))?;
    let geometric = geometric_profile(&rep, &coords).or_else(|e| fail("profile", e))?;
    if geometric != combinatorial {
        return fail("profile", format!("geometric {geometric} vs combinatorial {combinatorial}"));
    }
    combinatorial.check_invariants().or_else(|e| fail("profile", e))?;
    let burnside = action.burnside_orbit_count().or_else(|e| fail("burnside", e))?;

    let arcs: Vec<EdgeArc> = file
        .arcs
        .iter()
        .map(|a| EdgeArc {
            pair: (a.pair[0], a.pair[1]),
            circle_element: a.circle_element,
            start: a.start,
            sweep: a.end - a.start,
        })
        .collect();
    if arcs.iter().any(|a| a.circle_element >= action.group().order() || a.pair.0 >= file.m || a.pair.1 >= file.m) {
        return fail("schema", "arc refers to a missing element or vertex");
    }
    let ctx = EdgeContext::new(&action, &rep, &coords).or_else(|e| fail("fixed-set", e))?;
    let report = report_for_arcs(&ctx, &arcs);
    if let Some((name, v)) = report.first_failure() {
        return fail(name, &v.detail);
    }

    let recorded = &file.report;
    if recorded.profile != combinatorial.counts() || recorded.burnside_orbits != burnside || !recorded.overall {
        return fail("report", "recorded report disagrees with the recomputed one");
    }
    Ok(Verified {
        report,
        profile: combinatorial.counts(),
        burnside_orbits: burnside,
        homomorphism_error: rep.homomorphism_error().2,
        invariance_error: tsglab::geom::invariance_error(&rep, &coords, &action).2,
        min_distance: tsglab::geom::min_distance(&coords).map_or(f64::INFINITY, |b| b.2),
    })
}

fn params_ok(file: &RealizationFile) -> Result<(), Failure> {
    if file.model.tag.group() != file.model.restricted_from.unwrap_or(file.group) {
        return fail("schema", format!("model {} does not carry {}", file.model.tag, file.group));
    }
    file.params().validate().or_else(|e| fail("parameters", e))
}

/// Metrics for the realize summary line.
pub fn summary(r: &RealizedVertices, action: &VertexAction) -> String {
    match metrics(r, action) {
        Ok(m) => format!(
            "homomorphism error {:.1e}, invariance error {:.1e}, min vertex distance {:.3e}",
            m.homomorphism_error, m.invariance_error, m.min_distance
        ),
        Err(e) => format!("metrics unavailable: {e}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Probe {
        #[serde(serialize_with = "sig17")]
        x: f64,
        #[serde(serialize_with = "sig17_seq")]
        xs: Vec<f64>,
    }

    #[test]
    fn floats_keep_seventeen_digits_and_round_trip() {
        let x = 1.0 / 3.0;
        let json = serde_json::to_string(&Probe { x, xs: vec![-0.1, 2.5e-12] }).unwrap();
        assert_eq!(
            json,
            r#"{"x":3.3333333333333331e-1,"xs":[-1.0000000000000001e-1,2.4999999999999998e-12]}"#
        );
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["x"].as_f64().unwrap().to_bits(), x.to_bits());
        assert_eq!(v["xs"][1].as_f64().unwrap(), 2.5e-12);
    }
}
