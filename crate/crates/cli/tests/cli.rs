use assert_cmd::Command;

fn transvect() -> Command {
    Command::cargo_bin("transvect").unwrap()
}

fn stdout_of(args: &[&str]) -> (i32, String) {
    let out = transvect().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

#[test]
fn classify_grozman_weights_json() {
    let (code, text) = stdout_of(&[
        "classify",
        "--order",
        "3",
        "--weights",
        "-2/3,-2/3,-2/3",
        "--output",
        "json",
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["dimension"], 3);
    assert_eq!(doc["basis"].as_array().unwrap().len(), 3);
    assert_eq!(doc["representatives_span"], true);
    assert!(doc["representatives"][0]["name"]
        .as_str()
        .unwrap()
        .starts_with("Gz"));
}

#[test]
fn classify_accepts_quadratic_weights() {
    let k = "-3/4-1/12*sqrt21";
    let w = format!("{k},{k},{k}");
    let (code, text) = stdout_of(&["classify", "--order", "5", "--weights", &w]);
    assert_eq!(code, 0);
    assert!(text.contains("kernel dimension: 1"));
}

#[test]
fn verify_delta3() {
    let (code, text) = stdout_of(&["verify", "--entry", "delta3", "--weights", "1,2,3"]);
    assert_eq!(code, 0);
    assert!(text.contains("in kernel: true"));
}

#[test]
fn verify_binary_and_parametric_entries() {
    let (code, text) = stdout_of(&["verify", "--entry", "grozman"]);
    assert_eq!(code, 0, "{text}");
    let (code, text) = stdout_of(&["verify", "--entry", "xi_st", "--params", "2/3,-5"]);
    assert_eq!(code, 0, "{text}");
    assert!(text.contains("in kernel: true"));
}

#[test]
fn sweep_order_seven_is_zero_on_a_grid() {
    let (code, text) = stdout_of(&[
        "sweep",
        "--order",
        "7",
        "--grid",
        "0,-2/3,1,-5/4",
        "--output",
        "csv",
    ]);
    assert_eq!(code, 0);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "order,lambda,gamma,tau,dimension,matched_catalog_names"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 64);
    for row in rows {
        assert_eq!(row.split(',').nth(4).unwrap(), "0", "{row}");
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "sweep", "--order", "3", "--sample", "40", "--seed", "9", "--output", "json",
    ];
    let (_, a) = stdout_of(&args);
    let (_, b) = stdout_of(&args);
    assert_eq!(a, b);
    let other = stdout_of(&[
        "sweep", "--order", "3", "--sample", "40", "--seed", "10", "--output", "json",
    ])
    .1;
    assert_ne!(a, other);
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = [
        "sweep",
        "--order",
        "4",
        "--grid",
        "0,-2/3,-3/4",
        "--output",
        "csv",
    ];
    let one = transvect()
        .env("TRANSVECT_THREADS", "1")
        .args(args)
        .output()
        .unwrap();
    let many = transvect()
        .env("TRANSVECT_THREADS", "4")
        .args(args)
        .output()
        .unwrap();
    assert_eq!(one.stdout, many.stdout);
    let bad = transvect()
        .env("TRANSVECT_THREADS", "zero")
        .args(args)
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn parse_errors_exit_two() {
    for args in [
        vec!["classify", "--order", "3", "--weights", "0.5,1,1"],
        vec!["classify", "--order", "3", "--weights", "1,2"],
        vec!["classify", "--weights", "1,2,3"],
        vec!["verify", "--entry", "no_such_entry"],
        vec![
            "conformal",
            "--order",
            "1",
            "--n",
            "4",
            "--p",
            "2",
            "--q",
            "1",
            "--weights",
            "1,2,3",
        ],
        vec!["frobnicate"],
    ] {
        let out = transvect().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn verification_failure_exits_one() {
    let out = transvect()
        .args([
            "classify",
            "--order",
            "3",
            "--weights",
            "1,2,3",
            "--expect-dimension",
            "2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let (code, _) = stdout_of(&[
        "classify",
        "--order",
        "3",
        "--weights",
        "1,2,3",
        "--expect-dimension",
        "1",
    ]);
    assert_eq!(code, 0);
    let (code, _) = stdout_of(&[
        "sweep",
        "--order",
        "7",
        "--grid",
        "0,1/3",
        "--expect-dimension",
        "0",
    ]);
    assert_eq!(code, 0);
    let (code, _) = stdout_of(&[
        "sweep",
        "--order",
        "3",
        "--grid",
        "0,1/3",
        "--expect-dimension",
        "1",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn verify_rejects_weights_outside_the_domain() {
    let out = transvect()
        .args(["verify", "--entry", "ff_delta3", "--weights", "1,2,3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn conformal_first_degree_has_three_symbols() {
    let (code, text) = stdout_of(&[
        "conformal",
        "--k",
        "1",
        "--p",
        "3",
        "--q",
        "1",
        "--weights",
        "1/3,-2/5,3/7",
        "--output",
        "json",
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["n"], 4);
    assert_eq!(doc["dimension"], 3);
    assert_eq!(doc["defects_vanish"], true);
}

#[test]
fn obstruction_leaves_only_scalars() {
    let (code, text) = stdout_of(&[
        "obstruction",
        "--order",
        "1",
        "--n",
        "3",
        "--weights",
        "1,2,3",
        "--output",
        "json",
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["surviving"], 0);
    assert_eq!(doc["consistent"], true);
    let (code, text) = stdout_of(&[
        "obstruction",
        "--order",
        "0",
        "--n",
        "3",
        "--weights",
        "1,2,3",
    ]);
    assert_eq!(code, 0);
    assert!(text.contains("1 of 1"));
}

#[test]
fn catalog_lists_every_entry() {
    let (code, text) = stdout_of(&["catalog", "--output", "json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let names: Vec<&str> = doc
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    for name in [
        "delta3",
        "xi",
        "xi_st",
        "gamma",
        "ff_theta_plus",
        "ff_upsilon",
        "grozman",
    ] {
        assert!(names.contains(&name), "{name}");
    }
}

#[test]
fn report_passes_and_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tables.md");
    let out = transvect()
        .args(["report", "--out", path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.contains("## Order 6"));
    assert!(text.contains("sqrt21"));
    assert!(!text.contains("FAIL"));
}
