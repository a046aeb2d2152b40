use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn twogroups(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twogroups")).args(args).output().expect("binary runs")
}

fn with_data_dir(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twogroups"))
        .env("TWOGROUPS_DATA_DIR", dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn construct_a2() {
    let o = twogroups(&["construct", "a2:3:1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("order 64\n"), "{text}");
    assert!(text.contains("center 8\n"), "{text}");
    assert!(text.contains("profile {1:1,2:7,4:56}\n"), "{text}");
}

#[test]
fn construct_rejects_trivial_theta() {
    let o = twogroups(&["construct", "a2:3:0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("theta has order 1"), "{}", stderr(&o));
}

#[test]
fn bad_input_is_a_usage_error() {
    for args in [
        &["construct", "nope:1"][..],
        &["construct", "a2:x:1"],
        &["frobnicate"],
        &["field", "info", "--n", "6", "--poly", "0x5a"],
        &["verify", "theorem-dual", "--n", "4"],
        &["verify", "bogus"],
        &["module", "orbits", "/nonexistent/module.txt"],
    ] {
        assert_eq!(twogroups(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn fusion_and_aut() {
    let o = twogroups(&["fusion", "b2:2"]);
    assert!(stdout(&o).contains("sizes {1,3,60}"));
    let o = twogroups(&["aut", "a2:3:1", "--brute-force"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("generated-order 10752") && text.contains("brute-force-order 10752"), "{text}");
    assert!(text.contains("agree true"));
    let o = twogroups(&["aut", "homocyclic:2:4", "--brute-force"]);
    assert!(stdout(&o).contains("brute-force-order 96"));
    assert!(stdout(&o).contains("at true"));
}

#[test]
fn field_table() {
    let o = twogroups(&["field", "info"]);
    assert_eq!(stdout(&o).lines().count(), 13);
    assert!(stdout(&o).lines().all(|l| !l.ends_with("false")));
}

#[test]
fn module_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let v = dir.path().join("v.txt");
    let lam = dir.path().join("lam.txt");
    let dual = dir.path().join("dual.txt");
    fs::write(&v, twogroups(&["module", "natural", "sl", "--m", "3", "--f", "1"]).stdout).unwrap();
    fs::write(&lam, twogroups(&["module", "exterior", v.to_str().unwrap()]).stdout).unwrap();
    fs::write(&dual, twogroups(&["module", "dual", v.to_str().unwrap()]).stdout).unwrap();
    let o = twogroups(&["module", "iso", lam.to_str().unwrap(), dual.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "isomorphic");
    let o = twogroups(&["module", "iso", v.to_str().unwrap(), dual.to_str().unwrap()]);
    assert_eq!(stdout(&o).trim(), "notisomorphic");
    let o = twogroups(&["module", "orbits", lam.to_str().unwrap()]);
    assert!(stdout(&o).contains("orbits {7}"));
}

#[test]
fn verify_single_scenario() {
    let o = twogroups(&["verify", "theorem-dual", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "theorem-dual-n3\tpass\noverall\tpass\n");
}

#[test]
fn reports_are_reproducible_and_cached() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("results");
    let args = ["verify", "sl2-omega", "--out", out.to_str().unwrap()];
    let first = twogroups(&args);
    assert_eq!(first.status.code(), Some(0));
    assert!(!stdout(&first).contains("cached"));
    let report = fs::read(out.join("sl2-omega-f2.json")).unwrap();
    let second = twogroups(&args);
    assert!(stdout(&second).contains("sl2-omega-f2\tpass\tcached"));
    assert_eq!(fs::read(out.join("sl2-omega-f2.json")).unwrap(), report);
    let fresh = twogroups(&["verify", "sl2-omega", "--out", out.to_str().unwrap(), "--no-cache"]);
    assert!(!stdout(&fresh).contains("cached"));
    assert_eq!(fs::read(out.join("sl2-omega-f2.json")).unwrap(), report);
    let summary = fs::read_to_string(out.join("summary.tsv")).unwrap();
    assert_eq!(summary.lines().count(), 2);
}

#[test]
fn job_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let cfg = dir.path().join("cfg.txt");
    fs::write(&cfg, "scenarios = sanity, theorem-dual:3, sp-lambda:1, sl2-omega:2\n").unwrap();
    let run = |out: &Path, jobs: &str| {
        twogroups(&["verify", "all", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--jobs", jobs, "--no-cache"])
    };
    let (x, y) = (run(&a, "1"), run(&b, "4"));
    assert_eq!(x.status.code(), Some(0));
    assert_eq!(stdout(&x), stdout(&y));
    assert_eq!(stdout(&x).lines().count(), 5);
    for name in ["sanity.json", "theorem-dual-n3.json", "sp-lambda-f1.json", "summary.tsv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.txt");
    fs::write(&cfg, "scenarios = theorem-dual:3, no-such-scenario\n").unwrap();
    let o = twogroups(&["verify", "all", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no-such-scenario"));
    let o = twogroups(&["verify", "all", "--config", dir.path().join("missing.txt").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_data_fails_with_remediation() {
    let dir = tempfile::tempdir().unwrap();
    let o = with_data_dir(dir.path(), &["verify", "small-eliminations", "--entry", "A7"]);
    assert_eq!(o.status.code(), Some(1));
    let o = with_data_dir(dir.path(), &["catalog", "verify", "A7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("catalog discover A7"));
}

#[test]
fn discovery_regenerates_shipped_files() {
    let dir = tempfile::tempdir().unwrap();
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/catalog");
    for (name, file) in [("A6", "a6.txt"), ("A7", "a7.txt")] {
        let o = with_data_dir(dir.path(), &["catalog", "discover", name]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert_eq!(fs::read(dir.path().join(file)).unwrap(), fs::read(shipped.join(file)).unwrap());
        let o = with_data_dir(dir.path(), &["verify", "small-eliminations", "--entry", name]);
        assert_eq!(o.status.code(), Some(0));
    }
    let o = with_data_dir(dir.path(), &["catalog", "discover", "A7", "--budget", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn builtin_catalog_entries() {
    let o = twogroups(&["catalog", "verify", "sp4:1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"order\": 720"));
    assert_eq!(twogroups(&["catalog", "verify", "gamma-l1:11"]).status.code(), Some(2));
}
