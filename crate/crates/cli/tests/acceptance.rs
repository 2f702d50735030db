//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tsglab::builder::{build, has_free_edge, measured_profile, plan, Restriction};
use tsglab::edges::{check_h4, full_report, EdgeContext};
use tsglab::geom::{
    free_orbit_coords, geometric_profile, invariance_error, realize, GeomError, ModelParams,
    ModelTag, Representation, Vec4, HOMOMORPHISM_TOL, INVARIANCE_TOL,
};
use tsglab::oracle::{oracle_residues, OracleConfig};
use tsglab::perm::{coset_action, standard_group, ElemSet, GroupAction, GroupName};
use tsglab::profile::{admissible_residues, necessity_check};
use tsglab_cli::cmd_table;

const REFERENCE: [(GroupName, usize); 14] = [
    (GroupName::S4, 24),
    (GroupName::S4, 4),
    (GroupName::S4, 8),
    (GroupName::S4, 12),
    (GroupName::S4, 20),
    (GroupName::S4, 28),
    (GroupName::A5, 60),
    (GroupName::A5, 61),
    (GroupName::A5, 5),
    (GroupName::A5, 20),
    (GroupName::A5, 80),
    (GroupName::A4, 16),
    (GroupName::A4, 13),
    (GroupName::A4, 17),
];

fn set(xs: &[usize]) -> BTreeSet<usize> {
    xs.iter().copied().collect()
}

fn table_reproduction() -> Result<(), String> {
    let a4 = cmd_table(GroupName::A4).text;
    let a4_rows: Vec<&str> = a4.lines().skip(1).collect();
    if a4_rows != ["0,0 or 3,0", "0,1,4", "0,2,8", "1,1,1", "1,2,5"] {
        return Err(format!("A4 table {a4_rows:?}"));
    }
    let a5 = cmd_table(GroupName::A5).text;
    let a5_rows: Vec<&str> = a5.lines().skip(1).collect();
    if a5_rows != ["0,0,0,0", "0,2,0,20", "1,1,1,1", "1,2,0,5"] {
        return Err(format!("A5 table {a5_rows:?}"));
    }
    for (g, want) in [
        (GroupName::A4, set(&[0, 1, 4, 5, 8])),
        (GroupName::A5, set(&[0, 1, 5, 20])),
        (GroupName::S4, set(&[0, 4, 8, 12, 20])),
    ] {
        if admissible_residues(g).residues != want {
            return Err(format!("{g} residues {}", admissible_residues(g)));
        }
    }
    Ok(())
}

fn oracle_equivalence() -> Result<(), String> {
    for (g, want) in [
        (GroupName::A4, set(&[0, 1, 4, 5, 8])),
        (GroupName::A5, set(&[0, 1, 5, 20])),
        (GroupName::S4, set(&[0, 4, 8, 12, 20])),
    ] {
        // The default config leaves out the S4 congruence rules on m.
        let got = oracle_residues(g, &OracleConfig::default()).map_err(|e| e.to_string())?;
        if got.residues != want {
            return Err(format!("{g}: oracle {got}"));
        }
    }
    Ok(())
}

fn construction_soundness() -> Result<(), String> {
    for g in GroupName::ALL {
        for m in 4..=184 {
            if !necessity_check(g, m).unwrap().admissible {
                continue;
            }
            let p = plan(g, m).map_err(|e| e.to_string())?;
            if p.is_knotted() {
                continue;
            }
            let a = build(&p).map_err(|e| e.to_string())?;
            if !a.action.is_faithful() {
                return Err(format!("{p}: not faithful"));
            }
            let prof = measured_profile(&a).map_err(|e| e.to_string())?;
            if !necessity_check(g, m).unwrap().witnesses.contains(&prof) {
                return Err(format!("{p}: profile {prof} is not a witness"));
            }
            if a.parent.burnside_orbit_count().map_err(|e| e.to_string())? != p.orbit_count() {
                return Err(format!("{p}: orbit count"));
            }
            if p.restriction != Restriction::None && !has_free_edge(&a) {
                return Err(format!("{p}: no free edge"));
            }
        }
    }
    Ok(())
}

fn geometric_fidelity() -> Result<(), String> {
    for (g, m) in REFERENCE {
        let p = plan(g, m).unwrap();
        let a = build(&p).unwrap();
        let r = realize(&p, &a, &ModelParams::default(), 2024).map_err(|e| format!("{p}: {e}"))?;
        let rep = &r.parent_representation;
        if rep.homomorphism_error().2 > HOMOMORPHISM_TOL {
            return Err(format!("{p}: homomorphism error"));
        }
        if invariance_error(&r.representation, &r.coords, &a.action).2 > INVARIANCE_TOL {
            return Err(format!("{p}: invariance error"));
        }
        let geo = geometric_profile(&r.representation, &r.coords).map_err(|e| e.to_string())?;
        if geo != measured_profile(&a).unwrap() {
            return Err(format!("{p}: geometric profile {geo}"));
        }
        let expected_empty = match r.tag {
            ModelTag::TetraFullS4 => Some(4),
            ModelTag::Simplex4A5 => Some(5),
            _ => None,
        };
        let circles = rep.circles().map_err(|e| e.to_string())?;
        for e in rep.group().non_identity() {
            let empty = circles[e].as_ref().unwrap().is_empty();
            if empty != (Some(rep.group().element(e).order()) == expected_empty) {
                return Err(format!("{p}: fixed-set dichotomy at {}", rep.group().element(e)));
            }
        }
    }
    Ok(())
}

fn double_pole_fixture() -> bool {
    let g = standard_group(GroupName::A4);
    let rep = Representation::new(GroupName::A4, ModelTag::TetraRotA4).unwrap();
    let free = coset_action(&g, ElemSet::singleton(g.identity())).unwrap();
    let action = GroupAction::direct_sum(g.clone(), &[free.action.clone(), GroupAction::trivial(g, 2)]).unwrap();
    let poles = [Vec4::new(0.0, 0.0, 0.0, 1.0), Vec4::new(0.0, 0.0, 0.0, -1.0)];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let base = free_orbit_coords(&rep, 1, &mut rng, &poles).unwrap()[0];
    let mut coords: Vec<Vec4> = free.representatives.iter().map(|&x| rep.matrix(x) * base).collect();
    coords.extend(poles);
    let ctx = EdgeContext::new(&action, &rep, &coords).unwrap();
    !full_report(&ctx).overall
}

fn edge_certificates() -> Result<(), String> {
    for (g, m) in REFERENCE {
        let p = plan(g, m).unwrap();
        let a = build(&p).unwrap();
        let r = realize(&p, &a, &ModelParams::default(), 2024).map_err(|e| e.to_string())?;
        let ctx = EdgeContext::new(&a.action, &r.representation, &r.coords).map_err(|e| e.to_string())?;
        let report = full_report(&ctx);
        if !report.overall || report.arcs.is_none() {
            return Err(format!("{p}: {:?}", report.first_failure()));
        }
    }
    if !double_pole_fixture() {
        return Err("wrong-circle fixture passed".into());
    }
    let p = plan(GroupName::S4, 12).unwrap();
    let a = build(&p).unwrap();
    let midpoint = ModelParams {
        t: 0.5,
        ..Default::default()
    };
    if !matches!(realize(&p, &a, &midpoint, 0), Err(GeomError::MidpointCollision)) {
        return Err("t = 1/2 was accepted".into());
    }
    let g = standard_group(GroupName::A4);
    let natural = coset_action(&g, g.pointwise_stabilizer(&[0])).unwrap().action;
    let synthetic = GroupAction::direct_sum(Arc::clone(&g), &[natural, GroupAction::trivial(g.clone(), 3)]).unwrap();
    if check_h4(&synthetic).passed {
        return Err("interchanger-fixes-3 fixture passed h4".into());
    }
    Ok(())
}

fn negative_classification() -> Result<(), String> {
    let cases: [(GroupName, usize, &str, &str); 6] = [
        (GroupName::S4, 7, "m0mod4", "m ≡ 0 (mod 4)"),
        (GroupName::S4, 16, "mne16mod24", "m ≢ 16 (mod 24)"),
        (GroupName::S4, 21, "m0mod4", "m ≡ 0 (mod 4)"),
        (GroupName::A4, 7, "residue", "m ≡ 0, 1, 4, 5, 8 (mod 12)"),
        (GroupName::A4, 11, "residue", "m ≡ 0, 1, 4, 5, 8 (mod 12)"),
        (GroupName::A5, 25, "residue", "m ≡ 0, 1, 5, 20 (mod 60)"),
    ];
    for (g, m, id, citation) in cases {
        let v = necessity_check(g, m).map_err(|e| e.to_string())?;
        let rule = v.violated_rule.ok_or(format!("{g} {m} admissible"))?;
        if v.admissible || rule.id != id || rule.citation != citation {
            return Err(format!("{g} {m}: got {}", rule.citation));
        }
    }
    Ok(())
}

type Criterion = (&'static str, fn() -> Result<(), String>, Duration);

fn main() {
    let criteria: [Criterion; 6] = [
        ("1 table reproduction", table_reproduction, Duration::from_secs(1)),
        ("2 oracle equivalence", oracle_equivalence, Duration::from_secs(60)),
        ("3 construction soundness", construction_soundness, Duration::from_secs(30)),
        ("4 geometric fidelity", geometric_fidelity, Duration::from_secs(10)),
        ("5 edge-hypothesis certificates", edge_certificates, Duration::from_secs(10)),
        ("6 negative classification", negative_classification, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        let result = result.and_then(|()| {
            if elapsed <= budget {
                Ok(())
            } else {
                Err(format!("took {elapsed:.2?}, budget {budget:?}"))
            }
        });
        match result {
            Ok(()) => println!("PASS criterion {name} ({elapsed:.2?})"),
            Err(e) => {
                failed += 1;
                println!("FAIL criterion {name} ({elapsed:.2?}): {e}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
