use std::path::Path;
use std::process::Command;

use tsglab::geom::ModelParams;
use tsglab::oracle::OracleConfig;
use tsglab::perm::GroupName;
use tsglab::profile::admissible_residues;
use tsglab_cli::{
    cmd_classify, cmd_oracle, cmd_realize, cmd_table, cmd_verify, RealizationFile, EXIT_CHECK_FAILED,
    EXIT_INADMISSIBLE, EXIT_KNOTTED, EXIT_OK, EXIT_USAGE,
};

fn fixture(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name);
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn tables_match_golden_files() {
    for (g, name) in [
        (GroupName::A4, "table_A4.csv"),
        (GroupName::A5, "table_A5.csv"),
        (GroupName::S4, "table_S4.csv"),
    ] {
        let out = cmd_table(g);
        assert_eq!(out.code, EXIT_OK);
        assert_eq!(out.text, fixture(name), "{g}");
    }
}

#[test]
fn classify_examples() {
    let out = cmd_classify(GroupName::S4, 16);
    assert_eq!(out.code, EXIT_INADMISSIBLE);
    assert!(out.text.contains("m ≢ 16 (mod 24)"));

    let out = cmd_classify(GroupName::A4, 5);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.text.contains("knotted construction"));

    let out = cmd_classify(GroupName::A5, 60);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.text.contains("(n2,n3,n5) = (0,0,0)"));

    assert_eq!(cmd_classify(GroupName::A4, 3).code, EXIT_USAGE);
}

#[test]
fn realize_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for g in GroupName::ALL {
        for m in 4..=g.order() + 60 {
            if !admissible_residues(g).contains(m) || (g == GroupName::A4 && m <= 5) {
                continue;
            }
            let path = dir.path().join(format!("{g}-{m}.json"));
            let out = cmd_realize(g, m, &path, 9, ModelParams::default());
            assert_eq!(out.code, EXIT_OK, "{g} {m}: {}", out.text);
            let v = cmd_verify(&path);
            assert_eq!(v.code, EXIT_OK, "{g} {m}: {}", v.text);
        }
    }
}

#[test]
fn realize_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    cmd_realize(GroupName::A5, 80, &a, 42, ModelParams::default());
    cmd_realize(GroupName::A5, 80, &b, 42, ModelParams::default());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn realize_rejections() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    assert_eq!(cmd_realize(GroupName::A4, 5, &path, 0, ModelParams::default()).code, EXIT_KNOTTED);
    assert_eq!(cmd_realize(GroupName::S4, 16, &path, 0, ModelParams::default()).code, EXIT_INADMISSIBLE);
    let midpoint = ModelParams {
        t: 0.5,
        ..Default::default()
    };
    assert_eq!(cmd_realize(GroupName::S4, 12, &path, 0, midpoint).code, EXIT_USAGE);
    assert!(!path.exists());
}

fn realized(dir: &Path, g: GroupName, m: usize, params: ModelParams) -> RealizationFile {
    let path = dir.join("r.json");
    assert_eq!(cmd_realize(g, m, &path, 1, params).code, EXIT_OK);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn verify_edited(dir: &Path, file: &RealizationFile) -> (i32, String) {
    let path = dir.join("edited.json");
    std::fs::write(&path, file.to_json()).unwrap();
    let out = cmd_verify(&path);
    (out.code, out.text)
}

#[test]
fn verify_names_the_broken_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let base = realized(dir.path(), GroupName::A5, 20, ModelParams { theta: 0.5, t: 0.25 });

    let mut f = base.clone();
    f.vertices[3].coords[0] += 1e-3;
    let (code, text) = verify_edited(dir.path(), &f);
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert!(text.contains("invariance") || text.contains("unit-norm"), "{text}");

    let mut f = base.clone();
    let x = f.vertices[3].coords[0];
    let y = f.vertices[3].coords[1];
    let r = (x * x + y * y).sqrt();
    let angle = y.atan2(x) + 1e-3;
    f.vertices[3].coords[0] = r * angle.cos();
    f.vertices[3].coords[1] = r * angle.sin();
    let (code, text) = verify_edited(dir.path(), &f);
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert!(text.contains("invariance"), "{text}");

    let mut f = base.clone();
    let tmp = f.elements[1].vertex_images.clone();
    f.elements[1].vertex_images = f.elements[2].vertex_images.clone();
    f.elements[2].vertex_images = tmp;
    let (code, text) = verify_edited(dir.path(), &f);
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert!(text.contains("homomorphism"), "{text}");

    let mut f = base.clone();
    f.arcs[0].end = f.arcs[0].start + (f.arcs[0].end - f.arcs[0].start) - std::f64::consts::TAU;
    let (code, _) = verify_edited(dir.path(), &f);
    assert_eq!(code, EXIT_CHECK_FAILED);

    let mut f = base.clone();
    f.arcs.pop();
    let (code, text) = verify_edited(dir.path(), &f);
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert!(text.contains("h2"), "{text}");

    let mut f = base;
    f.schema = "tsglab-realization/0".into();
    assert_eq!(verify_edited(dir.path(), &f).0, EXIT_USAGE);
}

#[test]
fn verify_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.json");
    std::fs::write(&path, "{\"schema\": 1}").unwrap();
    assert_eq!(cmd_verify(&path).code, EXIT_USAGE);
    assert_eq!(cmd_verify(&dir.path().join("missing.json")).code, EXIT_USAGE);
}

#[test]
fn oracle_command() {
    for g in GroupName::ALL {
        assert_eq!(cmd_oracle(g, &OracleConfig::default()).code, EXIT_OK);
    }
    let drop = OracleConfig {
        dropped_rules: vec!["n5ne2".into()],
        ..Default::default()
    };
    let out = cmd_oracle(GroupName::A5, &drop);
    assert_eq!(out.code, EXIT_CHECK_FAILED);
    assert!(out.text.contains("12"));
    let short = OracleConfig {
        max_m: Some(100),
        ..Default::default()
    };
    assert_eq!(cmd_oracle(GroupName::A4, &short).code, EXIT_OK);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_tsglab");
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    assert_eq!(run(&["classify", "--group", "S4", "--m", "16"]).status.code(), Some(3));
    assert_eq!(run(&["classify", "--group", "A4", "--m", "13"]).status.code(), Some(0));
    assert_eq!(run(&["classify", "--group", "Z7", "--m", "13"]).status.code(), Some(2));
    assert_eq!(run(&["bogus"]).status.code(), Some(2));
    let out = run(&["table", "--group", "A4"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), fixture("table_A4.csv"));

    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let realize = |p: &Path| {
        Command::new(bin)
            .args(["realize", "--group", "A4", "--m", "17", "--out"])
            .arg(p)
            .env("TSGLAB_SEED", "77")
            .output()
            .unwrap()
    };
    assert_eq!(realize(&a).status.code(), Some(0));
    assert_eq!(realize(&b).status.code(), Some(0));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let file: RealizationFile = serde_json::from_slice(&std::fs::read(&a).unwrap()).unwrap();
    assert_eq!(file.model.seed, 77);
    let v = Command::new(bin).arg("verify").arg(&a).output().unwrap();
    assert_eq!(v.status.code(), Some(0));
}
