//! Command implementations behind the `tsglab` binary.
//!
//! Each command returns its text and exit code so tests can drive it
//! without spawning a process.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use tsglab::builder::{build, plan, BuildError};
use tsglab::edges::{full_report, EdgeContext};
use tsglab::geom::{geometric_profile, realize, GeomError, ModelParams};
use tsglab::oracle::{oracle_residues, OracleConfig, OracleError};
use tsglab::perm::GroupName;
use tsglab::profile::{
    admissible_residues, classes, enumerate_profiles, necessity_check, residue_rule, rule_set,
    FixedVertexProfile,
};

pub mod file;

pub use file::{verify, RealizationFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INADMISSIBLE: i32 = 3;
pub const EXIT_KNOTTED: i32 = 4;
pub const EXIT_CHECK_FAILED: i32 = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub code: i32,
}

impl Outcome {
    fn new(text: impl Into<String>, code: i32) -> Self {
        Outcome {
            text: text.into(),
            code,
        }
    }
}

fn profile_tuple(p: &FixedVertexProfile) -> String {
    let names: Vec<&str> = classes(p.group).iter().map(|(c, _)| c.name()).collect();
    let counts: Vec<String> = p.counts().iter().map(|n| n.to_string()).collect();
    format!("({}) = ({})", names.join(","), counts.join(","))
}

pub fn cmd_classify(group: GroupName, m: usize) -> Outcome {
    let verdict = match necessity_check(group, m) {
        Ok(v) => v,
        Err(e) => return Outcome::new(format!("error: {e}\n"), EXIT_USAGE),
    };
    let mut out = String::new();
    if let Some(rule) = verdict.violated_rule {
        writeln!(out, "{group} m={m}: inadmissible").unwrap();
        writeln!(out, "violated rule {}: {}", rule.id, rule.citation).unwrap();
        return Outcome::new(out, EXIT_INADMISSIBLE);
    }
    writeln!(out, "{group} m={m}: admissible ({})", admissible_residues(group)).unwrap();
    for w in &verdict.witnesses {
        writeln!(out, "witness {}", profile_tuple(w)).unwrap();
    }
    match plan(group, m) {
        Ok(p) => {
            writeln!(out, "plan {p}").unwrap();
            if p.is_knotted() {
                writeln!(
                    out,
                    "note: knotted construction; geometry: out-of-scope-knotted"
                )
                .unwrap();
            }
        }
        Err(e) => writeln!(out, "plan unavailable: {e}").unwrap(),
    }
    Outcome::new(out, EXIT_OK)
}

fn csv_text(rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// The profile table (A4, A5) or the congruence chain (S4), as CSV.
pub fn cmd_table(group: GroupName) -> Outcome {
    let modulus = group.order();
    let rows = match enumerate_profiles(group) {
        Ok(profiles) => {
            let mut header: Vec<String> = classes(group).iter().map(|(c, _)| c.name().to_string()).collect();
            header.push(format!("m mod {modulus}"));
            // Profiles that differ only in n3 and force the same residue share a row.
            let mut merged: Vec<(FixedVertexProfile, Vec<u32>)> = Vec::new();
            for p in profiles {
                let key = |q: &FixedVertexProfile| FixedVertexProfile { n3: 0, ..*q };
                match merged.iter_mut().find(|(q, _)| key(q) == key(&p)) {
                    Some((_, n3s)) => n3s.push(p.n3),
                    None => merged.push((p, vec![p.n3])),
                }
            }
            let mut rows = vec![header];
            for (p, n3s) in merged {
                let row = classes(group)
                    .iter()
                    .map(|&(c, _)| match c {
                        tsglab::profile::ProfileClass::N3 => n3s
                            .iter()
                            .map(|n| n.to_string())
                            .collect::<Vec<_>>()
                            .join(" or "),
                        _ => p.get(c).to_string(),
                    })
                    .chain(std::iter::once(p.m.to_string()))
                    .collect();
                rows.push(row);
            }
            rows
        }
        Err(_) => {
            let mut rows = vec![vec!["step".into(), "rule".into(), "statement".into()]];
            let mut step = 0;
            let mut push = |rule: &str, statement: String| {
                step += 1;
                rows.push(vec![step.to_string(), rule.to_string(), statement]);
            };
            for r in rule_set(group).iter().filter(|r| r.id == "n4zero") {
                push(r.id, r.citation.to_string());
            }
            push("a4_subgroup", admissible_residues(GroupName::A4).to_string());
            for r in rule_set(group).iter().filter(|r| !r.is_profile_rule()) {
                push(r.id, r.citation.to_string());
            }
            let last = residue_rule(group);
            push(last.id, last.citation.to_string());
            rows
        }
    };
    Outcome::new(csv_text(rows), EXIT_OK)
}

fn write_atomically(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn cmd_realize(group: GroupName, m: usize, out: &Path, seed: u64, params: ModelParams) -> Outcome {
    if let Err(e) = params.validate() {
        return Outcome::new(format!("error: {e}\n"), EXIT_USAGE);
    }
    let p = match plan(group, m) {
        Ok(p) => p,
        Err(BuildError::NotAdmissible { reason, .. }) if m >= 4 => {
            return Outcome::new(format!("{group} m={m}: inadmissible ({reason})\n"), EXIT_INADMISSIBLE)
        }
        Err(e) => return Outcome::new(format!("error: {e}\n"), EXIT_USAGE),
    };
    if p.is_knotted() {
        return Outcome::new(
            format!(
                "{p}: knotted construction; geometry: out-of-scope-knotted. \
                 The small cases rely on a non-invertible knot, which has no rigid model here.\n"
            ),
            EXIT_KNOTTED,
        );
    }
    let action = match build(&p) {
        Ok(a) => a,
        Err(e) => return Outcome::new(format!("error: {e}\n"), EXIT_CHECK_FAILED),
    };
    let r = match realize(&p, &action, &params, seed) {
        Ok(r) => r,
        Err(e @ (GeomError::MidpointCollision | GeomError::Parameter { .. })) => {
            return Outcome::new(format!("error: {e}\n"), EXIT_USAGE)
        }
        Err(e) => return Outcome::new(format!("error: {e}\n"), EXIT_CHECK_FAILED),
    };
    let ctx = match EdgeContext::new(&action.action, &r.representation, &r.coords) {
        Ok(c) => c,
        Err(e) => return Outcome::new(format!("error: {e}\n"), EXIT_CHECK_FAILED),
    };
    let report = full_report(&ctx);
    let file = RealizationFile::new(&p, &action, &r, &report);
    if let Err(e) = write_atomically(out, &file.to_json()) {
        return Outcome::new(format!("error: cannot write {}: {e}\n", out.display()), EXIT_USAGE);
    }
    let mut text = String::new();
    writeln!(text, "plan {p}").unwrap();
    writeln!(text, "model {} ({} vertices, {} arcs)", r.tag, r.coords.len(), file.arcs.len()).unwrap();
    if let Ok(geo) = geometric_profile(&r.representation, &r.coords) {
        writeln!(text, "profile {}", profile_tuple(&geo)).unwrap();
    }
    writeln!(text, "{}", file::summary(&r, &action)).unwrap();
    for (name, v) in report.verdicts() {
        writeln!(text, "{name} {} {}", if v.passed { "pass" } else { "FAIL" }, v.detail).unwrap();
    }
    writeln!(text, "wrote {}", out.display()).unwrap();
    let code = if report.overall { EXIT_OK } else { EXIT_CHECK_FAILED };
    Outcome::new(text, code)
}

pub fn cmd_verify(path: &Path) -> Outcome {
    let raw = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => return Outcome::new(format!("error: cannot read {}: {e}\n", path.display()), EXIT_USAGE),
    };
    let file: RealizationFile = match serde_json::from_str(&raw) {
        Ok(f) => f,
        Err(e) => return Outcome::new(format!("schema error: {e}\n"), EXIT_USAGE),
    };
    if file.schema != file::SCHEMA {
        return Outcome::new(
            format!("schema error: expected {}, found {}\n", file::SCHEMA, file.schema),
            EXIT_USAGE,
        );
    }
    match verify(&file) {
        Ok(v) => {
            let mut text = String::new();
            writeln!(text, "{} m={} {}: ok", file.group, file.m, file.model.tag).unwrap();
            writeln!(
                text,
                "homomorphism error {:.1e}, invariance error {:.1e}, min vertex distance {:.3e}",
                v.homomorphism_error, v.invariance_error, v.min_distance
            )
            .unwrap();
            writeln!(text, "profile {:?}, {} orbits", v.profile, v.burnside_orbits).unwrap();
            for (name, verdict) in v.report.verdicts() {
                writeln!(text, "{name} pass {}", verdict.detail).unwrap();
            }
            Outcome::new(text, EXIT_OK)
        }
        Err(f) => Outcome::new(format!("FAILED {}: {}\n", f.invariant, f.detail), EXIT_CHECK_FAILED),
    }
}

pub fn cmd_oracle(group: GroupName, config: &OracleConfig) -> Outcome {
    let engine = admissible_residues(group);
    let oracle = match oracle_residues(group, config) {
        Ok(o) => o,
        Err(e @ OracleError::UnknownRule(_)) | Err(e @ OracleError::WindowTooShort { .. }) => {
            return Outcome::new(format!("error: {e}\n"), EXIT_USAGE)
        }
        Err(e) => return Outcome::new(format!("oracle failed: {e}\n"), EXIT_CHECK_FAILED),
    };
    let mut text = String::new();
    writeln!(text, "oracle {oracle}").unwrap();
    writeln!(text, "engine {engine}").unwrap();
    if !config.dropped_rules.is_empty() {
        writeln!(text, "dropped rules: {}", config.dropped_rules.join(", ")).unwrap();
    }
    if oracle == engine {
        writeln!(text, "equal").unwrap();
        Outcome::new(text, EXIT_OK)
    } else {
        writeln!(text, "MISMATCH").unwrap();
        Outcome::new(text, EXIT_CHECK_FAILED)
    }
}
