use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ogw::qops::{save_store, synth_qdata, SynthParams};
use ogw::rational::q;
use ogw::setting::Setting;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn ogw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ogw")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_classical_prints_nine_passes() {
    let out = ogw(&["verify", path(&scenario("classical.toml"))]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    assert!(lines.iter().all(|l| l.starts_with("PASS ")));
}

#[test]
fn classical_invariant_table_has_one_row() {
    let out = ogw(&["ogw", path(&scenario("classical.toml")), "--format", "rows"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), "ogw beta=- label=β₀ k=1 interior=0 num=-1 den=1\n");
    let text = stdout(&ogw(&["ogw", path(&scenario("classical.toml"))]));
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().nth(1).unwrap().split_whitespace().eq(["β₀", "1", "{1}", "-1"]));
}

#[test]
fn outputs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        for cmd in ["ogw", "omega", "solve"] {
            let out = ogw(&[cmd, path(&scenario("s3_extended.toml")), "--format", "rows", "--out", path(dir.path())]);
            assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        }
    }
    for file in ["ogw.rows", "omega.rows", "solve.rows"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{file} differs between runs");
    }
    let rows = std::fs::read_to_string(a.path().join("omega.rows")).unwrap();
    assert!(rows.lines().all(|l| l.contains(" num=") && l.contains(" den=") && !l.contains('.')));
}

#[test]
fn seed_override_changes_the_store() {
    let base = stdout(&ogw(&["solve", path(&scenario("s3_extended.toml")), "--format", "rows"]));
    let other = stdout(&ogw(&["solve", path(&scenario("s3_extended.toml")), "--format", "rows", "--seed", "5"]));
    assert_ne!(base, other);
}

#[test]
fn gauge_check_passes_on_extended_model() {
    let out = ogw(&["gauge-check", path(&scenario("s3_extended.toml"))]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("PASS gauge_independence"), "{text}");
    assert!(text.contains("monomials compared") && text.contains("chains differ: yes"));
}

#[test]
fn axioms_and_real_verifiers() {
    let out = ogw(&["axioms", path(&scenario("s3_extended.toml"))]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().filter(|l| l.starts_with("PASS")).count(), 4);
    let out = ogw(&["verify", path(&scenario("s3_real.toml"))]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).lines().any(|l| l.starts_with("PASS real_signs")));
    let out = ogw(&["solve", path(&scenario("s3_real.toml"))]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let float = write(dir.path(), "float.toml", "n = 3\n[model]\nkind = \"sphere\"\n[store]\nkind = \"classical\"\ncutoff = 1.5\nmax_arity = 2\n");
    let out = ogw(&["verify", path(&float)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("float 1.5") && stderr(&out).contains("\"3/2\""), "{}", stderr(&out));

    let unknown = write(dir.path(), "unknown.toml", "n = 3\ncolour = 1\n[model]\nkind = \"sphere\"\n[store]\nkind = \"classical\"\ncutoff = 2\nmax_arity = 2\n");
    assert_eq!(ogw(&["verify", path(&unknown)]).status.code(), Some(2));

    let over = ogw(&["solve", path(&scenario("classical.toml")), "--cutoff", "5"]);
    assert_eq!(over.status.code(), Some(2));
    assert!(stderr(&over).contains("exceeds the store cutoff"));

    assert_eq!(ogw(&["solve", path(&scenario("classical.toml")), "--gauge", "sideways"]).status.code(), Some(2));
    assert_eq!(ogw(&["verify", path(&scenario("classical.toml")), "--seed", "3"]).status.code(), Some(2));
    assert_eq!(ogw(&["verify", "/nonexistent/scenario.toml"]).status.code(), Some(2));
}

const EXTENDED_HEAD: &str = "n = 3\n[model]\nkind = \"s3_extended\"\n[[classes]]\nlabel = \"b\"\nenergy = 1\nmaslov = 2\nspherical = true\npairing = { h = 3 }\n[interior]\nclasses = [{ label = \"h\", degree = 2 }, { label = \"p\", degree = 4 }]\n";

#[test]
fn truncation_faults_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{EXTENDED_HEAD}[store]\nkind = \"synth\"\nseed = 1\ncutoff = 4\nmax_arity = 1\n");
    let p = write(dir.path(), "shallow.toml", &text);
    let out = ogw(&["solve", path(&p)]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert!(stderr(&out).contains("truncation fault"));
}

#[test]
fn corrupted_store_file_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let setting = Setting::three_sphere(true, 2, q(3), false).unwrap();
    let store = synth_qdata(&setting, &SynthParams { seed: 2, cutoff: q(3), max_arity: 3, real: false }).unwrap();
    let good = save_store(&setting, &store);
    write(dir.path(), "good.txt", &good);
    let bad = format!("{good}disk beta=1 k=1 interior=- inputs=x out=f value=5\n");
    write(dir.path(), "bad.txt", &bad);
    let good_scenario = write(dir.path(), "good.toml", &format!("{EXTENDED_HEAD}[store]\nkind = \"file\"\npath = \"good.txt\"\n"));
    let bad_scenario = write(dir.path(), "bad.toml", &format!("{EXTENDED_HEAD}[store]\nkind = \"file\"\npath = \"bad.txt\"\n"));

    let out = ogw(&["verify", path(&good_scenario)]);
    assert_eq!(out.status.code(), Some(0), "{}{}", stdout(&out), stderr(&out));
    let out = ogw(&["verify", path(&bad_scenario)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).lines().any(|l| l.starts_with("FAIL a_infinity")));

    write(dir.path(), "malformed.txt", "meta cutoff=3 max_arity=3\ndisk beta=1 k=1\n");
    let s = write(dir.path(), "malformed.toml", &format!("{EXTENDED_HEAD}[store]\nkind = \"file\"\npath = \"malformed.txt\"\n"));
    let out = ogw(&["verify", path(&s)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"));
}

#[test]
fn custom_model_matches_builtin_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let text = "n = 3\n[model]\nkind = \"custom\"\nunit = \"one\"\ntop = \"v\"\n\
        basis = [{ label = \"one\", degree = 0 }, { label = \"v\", degree = 3, integral = 1 }]\n\
        [store]\nkind = \"classical\"\ncutoff = 4\nmax_arity = 4\n";
    let p = write(dir.path(), "custom.toml", text);
    let custom = ogw(&["ogw", path(&p), "--format", "rows"]);
    let builtin = ogw(&["ogw", path(&scenario("classical.toml")), "--format", "rows"]);
    assert_eq!(custom.status.code(), Some(0), "{}", stderr(&custom));
    assert_eq!(stdout(&custom), stdout(&builtin));

    let broken = "n = 3\n[model]\nkind = \"custom\"\nunit = \"one\"\ntop = \"v\"\n\
        basis = [{ label = \"one\", degree = 0, d = { w = 1 } }, { label = \"v\", degree = 3, integral = 1 }]\n\
        [store]\nkind = \"classical\"\ncutoff = 4\nmax_arity = 4\n";
    let p = write(dir.path(), "broken.toml", broken);
    let out = ogw(&["verify", path(&p)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown basis element `w`"));
}
