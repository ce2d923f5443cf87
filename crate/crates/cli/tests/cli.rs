use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn lgmax(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lgmax"))
        .args(args)
        .env("LGMAX_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scenario(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn k_max_of(out: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix("k_max = "))
        .expect("k_max line")
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn version_names_artifact_and_prng() {
    let o = lgmax(&["--version"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("lgmax 0.1.0"));
    assert!(s.contains("chacha20"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(lgmax(&[]).status.code(), Some(2));
    assert_eq!(lgmax(&["fig1"]).status.code(), Some(2));
    assert_eq!(lgmax(&["nonsense"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_lgmax"))
        .args(["fig1", "--n", "2", "--out", "/dev/null"])
        .env("LGMAX_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn scenario_files() {
    let dir = tempfile::tempdir().unwrap();
    let single = scenario(dir.path(), "single.txt", "# single channel\nc1=0.8\nc2=0.5\nc3=0.3\n");
    let o = lgmax(&["scenario", &single]);
    assert!(o.status.success());
    assert!((k_max_of(&stdout(&o)) - 1.32).abs() < 1e-6);

    let identity = scenario(dir.path(), "identity.txt", "s2=same\n");
    assert!((k_max_of(&stdout(&lgmax(&["scenario", &identity]))) - 1.5).abs() < 1e-6);

    let classical = scenario(dir.path(), "classical.txt", "c1=0\nc2=0\nc3=0.5\nb3=0.5\nrho=pure:pi/4\n");
    assert!((k_max_of(&stdout(&lgmax(&["scenario", &classical]))) - 1.25).abs() < 1e-6);

    let mzi = scenario(dir.path(), "mzi.txt", "c1=0.5\nc2=0.5\nfreeze=theta2:0\n");
    assert!((k_max_of(&stdout(&lgmax(&["scenario", &mzi]))) - 7.0 / 6.0).abs() < 1e-6);
}

#[test]
fn scenario_parse_errors_report_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let bad = scenario(dir.path(), "bad.txt", "c1=0.5\nc2=half\n");
    let o = lgmax(&["scenario", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2") && err.contains("c2"), "{err}");
    assert_eq!(lgmax(&["scenario", "/no/such/file"]).status.code(), Some(2));
}

#[test]
fn critical_points_are_listed() {
    let dir = tempfile::tempdir().unwrap();
    let single = scenario(dir.path(), "single.txt", "c1=0.8\nc2=0.5\nc3=0.3\nstarts=48\n");
    let s = stdout(&lgmax(&["scenario", &single, "--critical"]));
    assert!(s.contains("1.125000000000  Saddle"), "{s}");
}

#[test]
fn figure_csv_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = lgmax(&["fig2", "--n", "25", "--seed", "7", "--out", p.to_str().unwrap(), "--curves"]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c,k_max,bound_lower,bound_upper,variant"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 25);
    assert!(rows.iter().all(|r| r.len() == 5 && r[4] == "withW"));
    let cs: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    assert!(cs.windows(2).all(|w| w[0] <= w[1]));
    assert!(!text.contains('\r'));

    let meta = fs::read_to_string(dir.path().join("a.meta")).unwrap();
    assert!(meta.contains("prng=chacha20") && meta.contains("seed=7"));
    let curves = fs::read_to_string(dir.path().join("a.curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 513);
}

#[test]
fn fig3_has_both_variants() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f3.csv");
    let o = lgmax(&["fig3", "--n", "10", "--seed", "3", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().filter(|l| l.ends_with(",nonunital-noW")).count(), 10);
    assert_eq!(text.lines().filter(|l| l.ends_with(",nonunital-withW")).count(), 10);
}

#[test]
fn inset_sweep_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("inset.csv");
    let o = lgmax(&["fig2-inset", "--points", "7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<f64>> = text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 35);
    for r in rows {
        assert!((r[2] - r[3]).abs() < 1e-4, "{r:?}");
    }
}

#[test]
fn unwritable_output_is_an_error() {
    let o = lgmax(&["fig1", "--n", "2", "--out", "/no/such/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(2));
}
