use std::process::{Command, Output};

fn hasse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hasse"))
        .args(args)
        .env_remove("HASSE_REPORT_DIR")
        .output()
        .expect("run hasse")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn sieve_outputs() {
    let o = hasse(&["sieve", "--from", "-110", "--to", "20"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "-101\n19\n");
    let o = hasse(&["sieve", "--from", "0", "--to", "18"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "");
    let o = hasse(&["sieve", "--from", "-10", "--to", "0", "--literal", "--format", "json"]);
    assert_eq!(stdout(&o).trim(), "[-5]");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(hasse(&["sieve", "--from", "5", "--to", "4"]).status.code(), Some(2));
    assert_eq!(hasse(&["analyze"]).status.code(), Some(2));
    assert_eq!(hasse(&["cubic", "--h", "19", "--sign", "x"]).status.code(), Some(2));
    assert_eq!(hasse(&["check-local", "--coeffs", "1,2,3"]).status.code(), Some(2));
}

#[test]
fn inadmissible_exits_3() {
    for h in ["20", "3", "-5"] {
        let o = hasse(&["analyze", "--h", h]);
        assert_eq!(o.status.code(), Some(3), "h = {h}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("inadmissible"));
    }
}

#[test]
fn analyze_h19_text() {
    let o = hasse(&["analyze", "--h", "19"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for line in ["rank: 0", "Sel^(psi) order: 9", "verdict: HASSE_VIOLATION"] {
        assert!(out.lines().any(|l| l.trim() == line), "missing {line:?}");
    }
}

#[test]
fn analyze_json_is_independent_of_jobs() {
    let a = hasse(&["--jobs", "1", "analyze", "--h", "19", "--json", "--height", "100"]);
    let b = hasse(&["--jobs", "4", "analyze", "--h", "19", "--json", "--height", "100"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["selmer_psi"]["order"], 9);
    assert_eq!(v["height_bound"], 100);
}

#[test]
fn obstructed_member_exits_1() {
    let o = hasse(&["analyze", "--h", "-101", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "NO_VIOLATION");
}

#[test]
fn report_store_round_trip() {
    let dir = std::env::temp_dir().join(format!("hasse-cli-{}", std::process::id()));
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_hasse"))
            .args(["analyze", "--h", "19", "--json", "--height", "30"])
            .env("HASSE_REPORT_DIR", &dir)
            .output()
            .unwrap()
    };
    let first = run();
    assert!(dir.join("h_19.json").exists());
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn cubic_command() {
    let o = hasse(&["cubic", "--h", "19"]);
    assert_eq!(stdout(&o).trim(), "w^3+18w^2z+216wz^2+432z^3+6358 = -6w^2+432z^2");
    let o = hasse(&["cubic", "--h", "19", "--sign", "-"]);
    assert_eq!(stdout(&o).trim(), "w^3-18w^2z+216wz^2-432z^3+6358 = -6w^2+432z^2");
    let o = hasse(&["cubic", "--h", "19", "--sign", "-", "--canonical"]);
    assert_eq!(stdout(&o).trim(), "w^3+18w^2z+216wz^2+432z^3+6358 = -6w^2+432z^2");
    let o = hasse(&["cubic", "--h", "19", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v.get("coefficients").is_some());
}

#[test]
fn check_local_and_search() {
    let o = hasse(&["check-local", "--h", "19", "--prime", "17"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("locally solvable: true"));
    // w^3 + 3z^3 + 9 has no 3-adic point
    let o = hasse(&["check-local", "--coeffs", "1,0,0,3,0,0,0,0,0,9", "--prime", "3"]);
    assert!(stdout(&o).contains("locally solvable: false"));
    // Fermat cubic w^3 + z^3 = v^3
    let o = hasse(&["search-points", "--coeffs", "1,0,0,1,0,0,0,0,0,-1", "--height", "5", "--format", "tsv"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn reproduce_paper_passes() {
    let o = hasse(&["reproduce-paper"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("ALL PASS"));
    assert!(!out.lines().any(|l| l.starts_with("FAIL")));
}
