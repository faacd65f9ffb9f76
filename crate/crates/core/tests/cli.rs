use std::path::Path;
use std::process::{Command, Output};

fn sqgt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqgt"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn prefix(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn fixed_build_simulate_decode() {
    let dir = tempfile::tempdir().unwrap();
    let p = prefix(dir.path(), "fx");
    let o = sqgt(&[
        "build-fixed",
        "--n",
        "300",
        "--h",
        "2",
        "--c",
        "7",
        "--thresholds",
        "1,2,4",
        "--out",
        &p,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let sim = sqgt(&["simulate", "--scheme", &p, "--head", "123"]);
    assert_eq!(sim.status.code(), Some(0));
    let levels = stdout(&sim).trim().to_string();
    let dec = sqgt(&["decode", "--scheme", &p, "--outcome", &levels]);
    assert_eq!(stdout(&dec).trim(), "123 29");
    let zeros = vec!["0"; levels.split(' ').count()].join(" ");
    assert_eq!(
        stdout(&sqgt(&["decode", "--scheme", &p, "--outcome", &zeros])).trim(),
        "NO_BURST"
    );
    let v = sqgt(&["verify", "--scheme", &p, "--jobs", "3"]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("bursts 272"));
}

#[test]
fn bounded_build_and_decode() {
    let dir = tempfile::tempdir().unwrap();
    let p = prefix(dir.path(), "bd");
    assert_eq!(
        sqgt(&[
            "build-bounded",
            "--n",
            "128",
            "--ell",
            "8",
            "--s",
            "2",
            "--out",
            &p
        ])
        .status
        .code(),
        Some(0)
    );
    let sim = sqgt(&["simulate", "--scheme", &p, "--head", "40", "--len", "5"]);
    let levels = stdout(&sim).trim().to_string();
    assert_eq!(
        stdout(&sqgt(&["decode", "--scheme", &p, "--outcome", &levels])).trim(),
        "40 5"
    );
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = prefix(dir.path(), "x");
    // c must exceed 2(h+1).
    assert_eq!(
        sqgt(&[
            "build-fixed",
            "--n",
            "300",
            "--h",
            "2",
            "--c",
            "6",
            "--thresholds",
            "1,2,4",
            "--out",
            &p
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        sqgt(&[
            "build-fixed",
            "--n",
            "300",
            "--h",
            "2",
            "--c",
            "7",
            "--thresholds",
            "1,2,5",
            "--out",
            &p
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        sqgt(&[
            "build-bounded",
            "--n",
            "64",
            "--ell",
            "8",
            "--s",
            "0",
            "--out",
            &p
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(sqgt(&["verify", "--scheme", &p]).status.code(), Some(3));
    assert_eq!(
        sqgt(&["bounds", "--n", "10", "--ell", "11", "--s", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(sqgt(&["no-such-command"]).status.code(), Some(2));

    let bad = dir.path().join("bad.mat");
    std::fs::write(&bad, "1 3\n1a1\n").unwrap();
    let o = sqgt(&[
        "build-bounded",
        "--n",
        "3",
        "--ell",
        "2",
        "--s",
        "1",
        "--out",
        &p,
        "--c1",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:"));

    let q = prefix(dir.path(), "ok");
    sqgt(&[
        "build-bounded",
        "--n",
        "64",
        "--ell",
        "8",
        "--s",
        "2",
        "--out",
        &q,
    ]);
    assert_eq!(
        sqgt(&["decode", "--scheme", &q, "--outcome", "1 2 3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        sqgt(&["simulate", "--scheme", &q, "--head", "60", "--len", "8"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        sqgt(&["verify", "--scheme", &q, "--predicate", "sideways"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn planted_collision_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = prefix(dir.path(), "flat");
    std::fs::write(format!("{p}.mat"), format!("1 12\n{}\n", "1".repeat(12))).unwrap();
    std::fs::write(
        format!("{p}.json"),
        r#"{"model":"fixed","n":12,"ell":3,"thresholds":[1],"components":[{"name":"sketch","rows":[0,1]}]}"#,
    )
    .unwrap();
    let o = sqgt(&["verify", "--scheme", &p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("collision (head 0, len 3) and (head 1, len 3)"));
    // No structured layout here, so decoding falls back to the table, which is ambiguous.
    assert_eq!(
        sqgt(&["decode", "--scheme", &p, "--outcome", "1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn bounds_line() {
    let o = sqgt(&[
        "bounds", "--n", "512", "--ell", "16", "--s", "4", "--mode", "bounded",
    ]);
    assert_eq!(stdout(&o).trim(), "bounded,512,16,4,8072,6,29.000");
    let o = sqgt(&["bounds", "--n", "2048", "--ell", "29", "--s", "4"]);
    assert!(stdout(&o).starts_with("fixed,2048,29,4,2020,"));
}

#[test]
fn selftest_passes() {
    let o = sqgt(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
