use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sympack"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

const TORUS: &str = r#"{"schema_version":1,"manifold":{"complex_dimension":2,"top_power":2,"assumptions":["campana_simple","kahler"]},"ellipsoids":ELL}"#;

fn torus_input(copies: usize) -> String {
    let ell = vec![r#"{"weights":[1,2],"capacity":1}"#; copies].join(",");
    TORUS.replace("ELL", &format!("[{ell}]"))
}

#[test]
fn pack_check_feasible_exit_zero() {
    let out = run(&["pack", "check", "--input", &torus_input(3)]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["verdict"], "FEASIBLE");
    assert_eq!(json["schema_version"], 1);
}

#[test]
fn pack_check_volume_overflow_exit_two() {
    let out = run(&["pack", "check", "--input", &torus_input(5)]);
    assert_eq!(out.status.code(), Some(2));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["verdict"], "INFEASIBLE_VOLUME");
}

#[test]
fn pack_check_missing_flags_exit_three() {
    let input = torus_input(1).replace(
        r#","assumptions":["campana_simple","kahler"]"#,
        "",
    );
    let out = run(&["pack", "check", "--input", &input]);
    assert_eq!(out.status.code(), Some(3));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["verdict"], "UNKNOWN");
}

#[test]
fn pack_check_malformed_json_exit_one_with_position() {
    let out = run(&["pack", "check", "--input", "{\"schema_version\": 1,,}"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line") && err.contains("column"), "{err}");
}

#[test]
fn pack_check_unknown_field_exit_one() {
    let input = torus_input(1).replace("\"manifold\"", "\"surprise\":1,\"manifold\"");
    let out = run(&["pack", "check", "--input", &input]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn approx_primes_examples() {
    let out = run(&[
        "approx", "primes", "--input",
        r#"{"schema_version":1,"x":[2,3]}"#, "--epsilon", "0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["denominator"], "1");
    assert_eq!(json["primes"][0], "2");
    assert_eq!(json["primes"][1], "3");

    let out = run(&[
        "approx", "primes", "--input",
        r#"{"schema_version":1,"x":[1,2],"epsilon":0.01}"#,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let err: f64 = json["max_error"].as_str().unwrap().parse().unwrap();
    assert!(err <= 0.01);

    let out = run(&[
        "approx", "primes", "--input",
        r#"{"schema_version":1,"x":[0,1],"epsilon":0.1}"#,
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn wps_ring_weighted_square() {
    let out = run(&["wps", "ring", "--input", r#"{"schema_version":1,"weights":[1,2,3]}"#]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let entry = json["table"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["i"] == 1 && e["j"] == 1)
        .expect("alpha_1 * alpha_1 entry");
    assert_eq!(entry["degree"], 2);
    assert_eq!(entry["coefficient"]["num"], "6");
    assert_eq!(entry["coefficient"]["den"], "1");
}

#[test]
fn blowup_intersect_example() {
    let out = run(&[
        "blowup", "intersect", "--input",
        r#"{"schema_version":1,"manifold":{"complex_dimension":2,"top_power":2,"assumptions":["campana_simple","kahler"]},"exceptional":[{"weights":[2,3],"coefficient":{"num":1,"den":6}}]}"#,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["top_intersection"]["num"], "11");
    assert_eq!(json["top_intersection"]["den"], "6");
    assert_eq!(json["criterion"]["kahler"], true);
}

#[test]
fn volume_example() {
    let out = run(&[
        "volume", "--input",
        r#"{"schema_version":1,"weights":[1,1],"capacity":1}"#, "--seed", "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["LEBESGUE"]["num"], "1");
    assert_eq!(json["LEBESGUE"]["den"], "2");
    assert_eq!(json["TOP_POWER"]["num"], "1");
    assert_eq!(json["TOP_POWER"]["den"], "1");
}

#[test]
fn psh_glue_demo_reports_constants() {
    let out = run(&["psh", "glue", "--demo", "--samples", "500", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let reports = json["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 2);
    for rep in reports {
        assert_eq!(rep["certification"]["strictly_plurisubharmonic"], true);
        let min_eig: f64 = rep["certification"]["min_eigenvalue"]
            .as_str()
            .unwrap()
            .parse()
            .unwrap();
        assert!(min_eig > 0.0);
    }
    assert_eq!(reports[0]["case"], "singular_potential");
    assert_eq!(reports[1]["case"], "bounded_potential");
    assert!(reports[0]["delta_ceiling"].is_string());
    assert!(reports[1]["delta_ceiling"].is_null());
}

#[test]
fn quiet_suppresses_stdout_but_keeps_exit_code() {
    let out = run(&["pack", "check", "--input", &torus_input(5), "--quiet"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn output_flag_writes_the_certificate() {
    let dir = std::env::temp_dir().join("sympack-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("certificate.json");
    let out = run(&[
        "pack", "check", "--input", &torus_input(3),
        "--output", path.to_str().unwrap(), "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["verdict"], "FEASIBLE");
}

/// Acceptance gate: rerunning the full demo suite with the same seed must
/// produce byte-identical output for every subcommand.
#[test]
fn criterion_9_cli_determinism() {
    let suite: Vec<Vec<&str>> = vec![
        vec!["pack", "check", "--input", Box::leak(torus_input(3).into_boxed_str()), "--seed", "11"],
        vec!["pack", "check", "--input", Box::leak(torus_input(5).into_boxed_str()), "--seed", "11"],
        vec![
            "approx", "primes", "--input",
            r#"{"schema_version":1,"x":[1.0,1.5,2.25],"epsilon":0.001}"#,
        ],
        vec!["wps", "ring", "--input", r#"{"schema_version":1,"weights":[1,2,3,5]}"#],
        vec![
            "blowup", "intersect", "--input",
            r#"{"schema_version":1,"manifold":{"complex_dimension":3,"top_power":{"num":7,"den":2},"assumptions":["campana_simple","kahler"]},"exceptional":[{"weights":[1,2,3],"coefficient":{"num":1,"den":4}}]}"#,
        ],
        vec![
            "volume", "--input",
            r#"{"schema_version":1,"weights":[2,3],"capacity":{"num":3,"den":2}}"#,
            "--seed", "11", "--samples", "200000",
        ],
        vec!["psh", "glue", "--demo", "--seed", "11", "--samples", "1000"],
    ];
    for args in &suite {
        let first = run(args);
        let second = run(args);
        if first.stdout != second.stdout || first.status.code() != second.status.code() {
            println!("criterion 9 (certificate determinism): FAIL [{args:?}]");
            panic!("non-deterministic output for {args:?}");
        }
    }
    println!("criterion 9 (certificate determinism): PASS");
}
