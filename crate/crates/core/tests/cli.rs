use std::process::{Command, Output};

fn fquad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fquad"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("fquad-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn classify_h0_and_h1_beside_x1() {
    let o = fquad(&["classify", "H0+x1", "H1+x1"]);
    assert_eq!(o.status.code(), Some(0));
    let classes: Vec<String> = stdout(&o)
        .lines()
        .map(|l| l.split('\t').nth(1).unwrap().to_string())
        .collect();
    assert_eq!(classes[0], classes[1]);
}

#[test]
fn classify_reads_files() {
    let path = scratch("h1.txt", "# H1\n2\n01\n10\n11\n");
    let o = fquad(&["classify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("\tH1\n"));
}

#[test]
fn iso_table_diagonal() {
    let o = fquad(&["iso-table"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().rev().take(5).collect();
    assert_eq!(
        rows,
        [
            "0 0 0 0 6",
            "0 0 0 2 0",
            "0 0 1 0 0",
            "0 1 0 0 0",
            "1 0 0 0 0"
        ]
    );
}

#[test]
fn output_is_stable() {
    for args in [
        &["enum-homs", "H0", "H1+H0"][..],
        &["--format", "json-lines", "iso-table", "x0", "H0"],
        &[
            "--format",
            "json-lines",
            "verify",
            "--suite",
            "classification-oracle",
            "--seed",
            "7",
        ],
    ] {
        assert_eq!(fquad(args).stdout, fquad(args).stdout);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(fquad(&["classify", "H3"]).status.code(), Some(2));
    assert_eq!(fquad(&["no-such-verb"]).status.code(), Some(2));
    assert_eq!(
        fquad(&["--bound", "3", "orth-group", "H0+H0"])
            .status
            .code(),
        Some(3)
    );
    let asym = scratch("asym.txt", "2\n01\n00\n00\n");
    assert_eq!(
        fquad(&["classify", asym.to_str().unwrap()]).status.code(),
        Some(4)
    );
    assert_eq!(
        fquad(&["--bound", "3", "verify", "--suite", "exactness"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn lifts_and_compositions() {
    // The identity span on H0, written out.
    let span = scratch(
        "id.span",
        "2\n01\n10\n00\n2\n01\n10\n00\n2\n01\n10\n00\n10\n01\n10\n01\n",
    );
    let o = fquad(&["sigma-lift", span.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let cospan = scratch("id.cospan", &stdout(&o));
    let o = fquad(&[
        "compose-cospan",
        cospan.to_str().unwrap(),
        cospan.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = fquad(&[
        "compose-span",
        span.to_str().unwrap(),
        span.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&o), std::fs::read_to_string(&span).unwrap());

    let map = scratch("swap.map", "2\n01\n10\n00\n2\n01\n10\n00\n01\n10\n");
    let o = fquad(&[
        "--format",
        "json-lines",
        "epsilon-lift",
        map.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["cod"]["class"], "H0");
}

#[test]
fn verify_json_records() {
    let o = fquad(&["--format", "json-lines", "verify", "--suite", "arf-planes"]);
    assert_eq!(o.status.code(), Some(0));
    for line in stdout(&o).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        for key in ["suite", "case", "expected", "actual", "status"] {
            assert!(v.get(key).is_some(), "missing {key} in {line}");
        }
        assert_eq!(v["status"], "pass");
    }
}

#[test]
fn verify_with_default_bounds_passes() {
    let o = fquad(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("12 of 12 suites passed\n"));
}
