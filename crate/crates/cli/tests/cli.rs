use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use trolab_cli::checks::{self, Theorem};
use trolab_cli::commands::{self, Overrides};
use trolab_cli::problem::{parse_file, resolve, Problem};
use trolab_cli::report::{CorpusReport, Report};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn load(name: &str) -> Problem {
    commands::load(&corpus().join(name), Overrides::default()).unwrap()
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("trolab-test-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn trolab() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_trolab"));
    c.env_remove("TROLAB_TOL");
    c
}

#[test]
fn m2_corner_projection_dimensions() {
    let p = load("m2_corner_projection.json");
    let r = commands::derivations(&p, "m2").unwrap();
    let b = &r.comparable;
    assert!(b.passed(), "{b:#?}");
    assert_eq!(b.dim("d_p").unwrap().dim, 1);
    assert_eq!(b.dim("d_star_p").unwrap().real_dim, 1);
    assert_eq!(b.dim("ker_delta_generator").unwrap().dim, 1);
    assert!(b.verdict("delta.surjective").unwrap().pass);
}

#[test]
fn rectangular_tro_has_no_outer_derivations() {
    let b = commands::derivations(&load("rect_tro.json"), "x").unwrap().comparable;
    let d = b.dim("d_tro").unwrap().real_dim;
    // u(3) + u(2) modulo the common imaginary scalar
    assert_eq!(d, 9 + 4 - 1);
    assert_eq!(b.dim("inner_tro").unwrap().real_dim, d);
    assert_eq!(b.dim("outer_tro").unwrap().dim, 0);
}

#[test]
fn spatial_witness_on_scalars() {
    let r = commands::check(&load("scalar_tro.json"), "c", Theorem::Thm22).unwrap();
    assert!(r.passed());
    let w = &r.comparable.witnesses[0];
    for (_, m) in &w.matrices {
        let m = m.to_matrix("w").unwrap();
        assert_eq!(m.shape(), (1, 1));
        assert!(m.get(0, 0).re.abs() < 1e-12, "alpha, beta must be imaginary");
    }
}

#[test]
fn thm_3_2_on_diagonal_algebra_needs_no_commutators() {
    let r = commands::check(&load("diagonal_c2.json"), "c2", Theorem::Thm32).unwrap();
    assert!(r.passed());
    assert_eq!(r.comparable.dim("commutator_pairs").unwrap().dim, 0);
}

#[test]
fn prop_2_4_on_every_corpus_tro() {
    for name in ["column_tro.json", "scalar_tro.json", "m2_offdiagonal_corner.json", "sum_c_plus_c.json"] {
        let r = commands::check(&load(name), name, Theorem::Prop24).unwrap();
        assert!(r.passed(), "{name}");
    }
}

#[test]
fn hypothesis_mismatch_is_an_error() {
    let err = commands::check(&load("column_tro.json"), "x", Theorem::Thm32).unwrap_err();
    assert!(format!("{err:#}").contains("hypothesis"), "{err:#}");
    let err = checks::check(&load("m3.json"), Theorem::Prop311Finite).unwrap_err();
    assert!(format!("{err:#}").contains("direct_sum"));
}

#[test]
fn empty_matrix_list_is_a_parse_error() {
    let err = parse_file(r#"{"kind": "algebra", "matrices": {}}"#).unwrap_err();
    assert!(format!("{err:#}").contains("empty matrix list"));
}

#[test]
fn unknown_field_is_rejected() {
    let text = r#"{"kind": "tro", "matrices": {"x": {"rows": 1, "cols": 1, "re": [[1]]}}, "extra": 1}"#;
    assert!(parse_file(text).is_err());
}

#[test]
fn report_round_trips_through_json() {
    let r = commands::check(&load("column_tro.json"), "col", Theorem::Thm22).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    let c = commands::corpus(&corpus(), Overrides::default()).unwrap();
    let back: CorpusReport = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
    assert_eq!(back, c);
}

#[test]
fn file_tolerance_beats_environment() {
    let mut f = parse_file(&fs::read_to_string(corpus().join("scalar_tro.json")).unwrap()).unwrap();
    f.options.tol = Some(1e-10);
    let p = resolve(f, None, Some(1e-6), None).unwrap();
    assert_eq!(p.settings.tol, 1e-10);
}

#[test]
fn empty_directory_gives_empty_report() {
    let dir = scratch("empty");
    let r = commands::corpus(&dir, Overrides::default()).unwrap();
    assert_eq!(r.comparable.files, 0);
    assert!(r.passed());
    let out = trolab().args(["corpus", "--json-only"]).arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn corrupted_file_fails_the_corpus() {
    let dir = scratch("corrupt");
    fs::copy(corpus().join("scalar_tro.json"), dir.join("a.json")).unwrap();
    fs::write(dir.join("b.json"), "{\"kind\": \"tro\", \"matrices\": {\n").unwrap();
    let r = commands::corpus(&dir, Overrides::default()).unwrap();
    assert_eq!((r.comparable.passed, r.comparable.failed), (1, 1));
    let bad = r.comparable.reports.iter().find(|b| b.input == "b.json").unwrap();
    assert!(bad.error.as_deref().unwrap().contains("line"), "{bad:?}");
    let out = trolab().args(["corpus", "--json-only"]).arg(&dir).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn binary_writes_json_and_table() {
    let dir = scratch("bin");
    let out_path = dir.join("r.json");
    let out = trolab()
        .args(["check", "--theorem", "thm_2_2", "--out"])
        .arg(&out_path)
        .arg(corpus().join("scalar_tro.json"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let r: Report = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(r.comparable.theorem.as_deref(), Some("thm_2_2"));
    assert!(String::from_utf8_lossy(&out.stdout).contains("spatial.reconstruction"));
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn binary_reads_tolerance_from_environment() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = trolab();
        if let Some(e) = env {
            c.env("TROLAB_TOL", e);
        }
        c.arg("--json-only");
        if let Some(f) = flag {
            c.args(["--tol", f]);
        }
        let out = c.arg("derivations").arg(corpus().join("scalar_tro.json")).output().unwrap();
        assert!(out.status.success());
        serde_json::from_slice::<Report>(&out.stdout).unwrap().comparable.tol
    };
    assert_eq!(run(None, None), trolab_core::DEFAULT_TOL);
    assert_eq!(run(Some("1e-8"), None), 1e-8);
    assert_eq!(run(Some("1e-8"), Some("1e-10")), 1e-10);
}

#[test]
fn binary_reports_hypothesis_mismatch() {
    let out = trolab()
        .args(["check", "--theorem", "thm_3_2"])
        .arg(corpus().join("column_tro.json"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hypothesis"));
}
