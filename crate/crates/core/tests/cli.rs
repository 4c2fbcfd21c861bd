use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_harper-phase"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn fidelity_map_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        run_ok(&[
            "fidelity-map", "--ref", "1.0,0.5", "--m", "9", "--grid", "9x5",
            "--threads", threads, "--out", path.to_str().unwrap(),
        ]);
    }
    let first = fs::read(&a).unwrap();
    assert_eq!(first, fs::read(&b).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().next(), Some("lambda,mu,fidelity,error"));
    assert_eq!(text.lines().count(), 1 + 45);
    let row = text.lines().nth(1).unwrap();
    assert!(row.starts_with("0.0000000000000000e0,0.0000000000000000e0,"), "{row}");
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# small map\nm = 7\ngrid = 3x3\nrange = 0.5, 1.5, 0.2, 0.6\n").unwrap();
    let from_file = run_ok(&["gap-map", "--config", cfg.to_str().unwrap()]);
    assert_eq!(from_file.lines().count(), 10);
    let overridden = run_ok(&["gap-map", "--config", cfg.to_str().unwrap(), "--grid", "2x2"]);
    assert_eq!(overridden.lines().count(), 5);
    assert!(overridden.lines().nth(1).unwrap().starts_with("5.0000000000000000e-1,2.0000000000000001e-1,"));
}

#[test]
fn entropy_map_has_labels_and_ipr_column() {
    let out = run_ok(&["entropy-map", "--m", "8", "--grid", "3x2", "--range", "1,3,0.5,0.75"]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("lambda,mu,ground_entropy,ground_ipr,spectrum_entropy,phase,error")
    );
    let labels: Vec<&str> = lines.map(|l| l.split(',').nth(5).unwrap()).collect();
    assert_eq!(labels.len(), 6);
    assert!(labels.iter().all(|l| !l.is_empty()));
}

#[test]
fn fs_map_normalizes_the_direction() {
    let out = run_ok(&["fs-map", "--dir", "3,4", "--m", "7", "--grid", "2x2"]);
    assert_eq!(out.lines().next(), Some("lambda,mu,chi_f,chi_f_reliable,error"));
    assert_eq!(out.lines().count(), 5);
}

#[test]
fn boundary_finds_the_harper_transition_on_a_small_ring() {
    let out = bin()
        .args(["boundary", "--fix", "mu=0", "--window", "1.5,2.5", "--step", "0.05", "--m", "12"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("boundary at"), "{stderr}");
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 22);
}

#[test]
fn bad_arguments_exit_with_code_two() {
    let cases: [&[&str]; 4] = [
        &["fs-scaling", "--transition", "nope"],
        &["fidelity-map", "--m", "9"],
        &["gap-map", "--grid", "1x4"],
        &["boundary", "--fix", "nu=1", "--window", "0,1"],
    ];
    for args in cases {
        let out = bin().args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn verify_exits_cleanly() {
    let out = bin().args(["verify", "--seed", "3"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(text.lines().all(|l| l.contains(" pass ")));
}
