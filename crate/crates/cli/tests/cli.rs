use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use schur_cli::cmfile::{load_cm, parse_cm, to_json};
use schur_core::verify::counterexample::counterexample_cm;

fn schur(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schur"))
        .args(args)
        .env_remove("SCHUR_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn bundled() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/counterexample.json")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn single_mode(a: f64, b: f64) -> String {
    format!("{{\"order\": [\"A\"], \"modes\": {{\"A\": 1}}, \"matrix\": [[{a}, 0], [0, {b}]]}}")
}

fn tmsv_file(c: f64) -> String {
    let s = (c * c - 1.0f64).sqrt();
    format!(
        "{{\"order\": [\"A\", \"B\"], \"modes\": {{\"A\": 1, \"B\": 1}}, \"matrix\": \
         [[{c}, 0, {s}, 0], [0, {c}, 0, {n}], [{s}, 0, {c}, 0], [0, {n}, 0, {c}]]}}",
        n = -s
    )
}

#[test]
fn spectrum_of_identity() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "id.json",
        "{\"order\": [\"A\", \"B\"], \"modes\": {\"A\": 1, \"B\": 1}, \"matrix\": \
         [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}",
    );
    let o = schur(&["spectrum", &f]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(&lines[..2], &["1.00000", "1.00000"]);
    assert!(text.contains("bona_fide true"));
}

#[test]
fn spectrum_of_bundled_counterexample() {
    let o = schur(&["spectrum", bundled().to_str().unwrap()]);
    assert_eq!(stdout(&o).lines().next(), Some("1.01359"));
    // indefinite as printed, so not a valid CM
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not positive definite"));
}

#[test]
fn bundled_file_matches_embedded_constant() {
    let v = load_cm(&bundled()).unwrap();
    assert_eq!(v.matrix(), counterexample_cm().matrix());
    assert_eq!(v.partition(), counterexample_cm().partition());
}

#[test]
fn spectrum_not_bona_fide() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "half.json", &single_mode(0.5, 0.5));
    let o = schur(&["spectrum", &f]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("0.500000\n"));
}

#[test]
fn malformed_input_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", "{\"order\": [\"A\"],\n \"modes\": 3}");
    let o = schur(&["spectrum", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
    assert!(o.stdout.is_empty());
}

#[test]
fn measure_examples() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "tmsv.json", &tmsv_file(1.25));
    let o = schur(&["measure", &t, "steerability", "--steering", "A"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0.223143551\n");

    let p = write(
        dir.path(),
        "prod.json",
        "{\"order\": [\"A\", \"B\"], \"modes\": {\"A\": 1, \"B\": 1}, \"matrix\": \
         [[2,0,0,0],[0,3,0,0],[0,0,1.5,0],[0,0,0,1.5]]}",
    );
    let o = schur(&["measure", &p, "mutual_info_2", "--cut", "A"]);
    assert_eq!(stdout(&o), "0.000000000\n");

    let th = write(dir.path(), "thermal.json", &single_mode(3.0, 3.0));
    let o = schur(&["measure", &th, "renyi_entropy", "--alpha", "2"]);
    assert_eq!(stdout(&o), "1.098612289\n");
}

#[test]
fn measure_errors() {
    let dir = tempfile::tempdir().unwrap();
    let t = write(dir.path(), "tmsv.json", &tmsv_file(1.25));
    assert_eq!(schur(&["measure", &t, "log_negativity"]).status.code(), Some(2));
    assert_eq!(schur(&["measure", &t, "no_such"]).status.code(), Some(2));
    assert_eq!(
        schur(&["measure", &t, "renyi_entropy", "--alpha", "0.5"]).status.code(),
        Some(2)
    );
    let half = write(dir.path(), "half.json", &single_mode(0.5, 0.5));
    assert_eq!(schur(&["measure", &half, "purity"]).status.code(), Some(3));
}

#[test]
fn verify_single_and_all() {
    let o = schur(&["verify", "thm1", "--trials", "1", "--seed", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("thm1: 0/1 failures"));

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let o = schur(&["verify", "all", "--trials", "100", "--seed", "42", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().count() >= 20);
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert!(rows.starts_with("name,trials,failures,worst_margin,worst_seed_stream,elapsed_s\n"));
    assert!(rows.lines().count() > 20);

    assert_eq!(schur(&["verify", "no_such_check"]).status.code(), Some(2));
}

#[test]
fn verify_rejects_negative_tolerance() {
    let o = schur(&["verify", "gplus_nonconvex_witness", "--trials", "5", "--tol", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_counterexample() {
    let o = schur(&["verify", "counterexample"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let get = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(key))
            .unwrap()
            .trim()
            .parse()
            .unwrap()
    };
    assert!((get("nu_min") - 1.01359).abs() < 1e-4);
    assert!((get("gap") - -0.816863).abs() < 1e-5);
}

#[test]
fn gen_is_deterministic_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = schur(&["gen", "A:1,B:1", "--nu-max", "1", "--seed", "5", "-o", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let v = parse_cm(&text).unwrap();
    assert_eq!(to_json(&v), text);
    assert!(schur_core::symplectic::is_pure_cm(v.matrix()).unwrap());

    let o = schur(&["spectrum", a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn seed_comes_from_environment() {
    let run = |seed: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_schur"));
        c.args(["gen", "A:1,B:1"]);
        match seed {
            Some(s) => c.env("SCHUR_SEED", s),
            None => c.env_remove("SCHUR_SEED"),
        };
        c.output().unwrap().stdout
    };
    assert_eq!(run(Some("42")), run(None));
    assert_ne!(run(Some("43")), run(None));
}

#[test]
fn gen_rejects_bad_spec() {
    assert_eq!(schur(&["gen", "A:0"]).status.code(), Some(2));
    assert_eq!(schur(&["gen", "A1"]).status.code(), Some(2));
}

#[test]
fn generated_mixed_state_is_bona_fide() {
    let o = schur(&["gen", "A:2,B1:1,B2:1", "--seed", "9"]);
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "g.json", &String::from_utf8(o.stdout).unwrap());
    assert_eq!(schur(&["spectrum", &f]).status.code(), Some(0));
}
