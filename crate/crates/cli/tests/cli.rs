use std::process::{Command, Output};

use qlf_core::forms::QuasilinearForm;
use qlf_core::text::{parse_element, parse_tower};

fn qlf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qlf"))
        .args(args)
        .output()
        .expect("qlf runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

/// Every `"key":value` pair occurs in `actual`, byte for byte and in order.
fn assert_pairs_in_order(actual: &str, expected: &[(&str, &str)]) {
    let mut from = 0;
    for (key, value) in expected {
        let pair = format!("\"{key}\":{value}");
        let at = actual[from..]
            .find(&pair)
            .unwrap_or_else(|| panic!("`{pair}` missing or out of order in {actual}"));
        from += at + pair.len();
    }
}

#[test]
fn invariants_of_one_t_u() {
    let out = qlf(&["invariants", "--p", "2", "--vars", "t,u", "--form", "1,t,u"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_pairs_in_order(
        &text,
        &[
            ("dim", "3"),
            ("i0", "0"),
            ("ndeg", "4"),
            ("height", "2"),
            ("pattern", "[3,2,1]"),
            ("qpn", "true"),
            ("maximal", "true"),
        ],
    );
    assert_eq!(text, golden("invariants_1_t_u.json"));
}

#[test]
fn invariants_of_pfister_form() {
    let out = qlf(&["invariants", "--p", "2", "--vars", "t,u", "--form", "<<t,u>>"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_pairs_in_order(&text, &[("pattern", "[4,2,1]"), ("indices", "[2,1]")]);
    assert_eq!(text, golden("invariants_pfister_t_u.json"));
}

#[test]
fn check_hoffmann_bound() {
    let out = qlf(&[
        "check",
        "HOFFMANN_BOUND",
        "--p",
        "2",
        "--vars",
        "t,u",
        "--form",
        "1,t,u",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), golden("check_hoffmann_1_t_u.json"));
}

#[test]
fn pinned_outputs() {
    let cases: [(&[&str], &str); 3] = [
        (
            &["invariants", "--p", "2", "--vars", "t,u,v", "--form", "1,t,u,v"],
            "invariants_1_t_u_v.json",
        ),
        (
            &["tower", "--p", "3", "--vars", "t", "--form", "<<t>>"],
            "tower_pfister_t_p3.json",
        ),
        (
            &[
                "rand-check",
                "--law",
                "HOFFMANN_BOUND",
                "--law",
                "MULT_INDEX_CONSISTENCY",
                "--p",
                "2",
                "--vars",
                "2",
                "--trials",
                "5",
                "--seed",
                "3",
            ],
            "rand_check_seed3.json",
        ),
    ];
    for (args, file) in cases {
        let out = qlf(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
        assert_eq!(stdout(&out), golden(file), "{args:?}");
    }
}

#[test]
fn output_is_stable_across_runs() {
    let args = [
        "tower",
        "--p",
        "2",
        "--vars",
        "t,u,v",
        "--form",
        "t, u*v, t + u, v^2 + t",
    ];
    assert_eq!(stdout(&qlf(&args)), stdout(&qlf(&args)));
}

#[test]
fn input_errors_exit_two() {
    for args in [
        &["invariants", "--p", "4", "--vars", "t", "--form", "1,t"][..],
        &["invariants", "--p", "2", "--vars", "t", "--form", "1,x"],
        &["invariants", "--p", "2", "--vars", "t", "--form", "1,(t"],
        &[
            "invariants",
            "--p",
            "2",
            "--vars",
            "t",
            "--adjoin",
            "r=t^2",
            "--form",
            "1,r",
        ],
        &["invariants", "--p", "2", "--vars", "t", "--form", "0"],
        &["check", "NO_SUCH_LAW", "--p", "2", "--vars", "t", "--form", "1,t"],
        &[
            "check",
            "MULT_INDEX_CONSISTENCY",
            "--p",
            "2",
            "--vars",
            "t",
            "--form",
            "1,t",
            "--radicand",
            "t^2",
        ],
        &["invariants", "--p", "2"],
    ] {
        let out = qlf(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn parse_errors_carry_position() {
    let out = qlf(&["invariants", "--p", "2", "--vars", "t", "--form", "1, t +"]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("1:7"), "{err}");
}

#[test]
fn resource_cap_exits_three_and_names_the_cap() {
    let out = qlf(&[
        "invariants",
        "--p",
        "2",
        "--vars",
        "t,u,v",
        "--form",
        "1,t,u,v",
        "--max-vars",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max-vars"));
    let out = qlf(&[
        "tower",
        "--p",
        "2",
        "--vars",
        "t,u,v",
        "--form",
        "1,t,u,v",
        "--max-roots",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("max-roots"));
    let out = qlf(&[
        "check",
        "HOFFMANN_BOUND",
        "--p",
        "2",
        "--vars",
        "t,u,v",
        "--form",
        "1,t,u,v",
        "--max-vars",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("\"skipped\":1"));
}

#[test]
fn vacuous_check_exits_zero() {
    let out = qlf(&[
        "check",
        "MONOTONE_INDICES",
        "--p",
        "2",
        "--vars",
        "t,u",
        "--form",
        "<<t,u>>",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"vacuous\":1"));
}

#[test]
fn check_with_explicit_aux_data() {
    let out = qlf(&[
        "check",
        "MULT_INDEX_CONSISTENCY",
        "--p",
        "2",
        "--vars",
        "t",
        "--form",
        "1,t",
        "--radicand",
        "t",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"passes\":1"));
    let out = qlf(&[
        "check",
        "FUNCTORIALITY",
        "--p",
        "2",
        "--vars",
        "t,u",
        "--form",
        "1,t,u",
        "--partner",
        "<<t,u>>",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"passes\":1"));
}

#[test]
fn tower_levels_round_trip() {
    for args in [
        &["tower", "--p", "2", "--vars", "t,u,v", "--form", "1,t,u,v"][..],
        &["tower", "--p", "3", "--vars", "t,u", "--form", "1,t,u"],
        &[
            "tower",
            "--p",
            "2",
            "--vars",
            "t,u",
            "--adjoin",
            "r=t",
            "--form",
            "1,u,r,u*r",
        ],
    ] {
        let out = qlf(args);
        assert_eq!(out.status.code(), Some(0));
        let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        let levels = json["levels"].as_array().unwrap();
        assert_eq!(levels.len(), json["height"].as_u64().unwrap() as usize + 1);
        for (r, level) in levels.iter().enumerate() {
            let tower = parse_tower(level["field"].as_str().unwrap()).unwrap();
            assert_eq!(tower.to_text(), level["field"].as_str().unwrap());
            let coeffs: Vec<_> = level["kernel"]
                .as_array()
                .unwrap()
                .iter()
                .map(|c| parse_element(&tower, c.as_str().unwrap()).unwrap())
                .collect();
            let kernel = QuasilinearForm::new(&coeffs).unwrap();
            assert_eq!(kernel.defect_index(), 0, "{args:?} level {r}");
            assert_eq!(kernel.dim() as u64, json["pattern"][r].as_u64().unwrap());
        }
    }
}

#[test]
fn rand_check_emits_trial_lines() {
    let args = [
        "rand-check",
        "--law",
        "SCALAR_INVARIANCE",
        "--law",
        "PFISTER_SP",
        "--p",
        "3",
        "--vars",
        "1",
        "--trials",
        "4",
        "--emit-trials",
    ];
    let out = qlf(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 9);
    for line in &lines[..8] {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["instance"]["tower"].as_str().unwrap().starts_with("p = 3"));
        assert!(v["verdict"]["outcome"].is_string());
    }
    let summary: serde_json::Value = serde_json::from_str(lines[8]).unwrap();
    assert_eq!(summary["failed"], false);
    assert_eq!(summary["reports"].as_array().unwrap().len(), 2);
    assert_eq!(text, stdout(&qlf(&args)));
}

#[test]
fn table_output() {
    let out = qlf(&[
        "invariants",
        "--p",
        "2",
        "--vars",
        "t,u",
        "--form",
        "1,t,u",
        "--table",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("pattern            [3, 2, 1]"));
    let out = qlf(&[
        "invariants",
        "--p",
        "2",
        "--vars",
        "t,u",
        "--form",
        "1,t,u",
        "--table",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
