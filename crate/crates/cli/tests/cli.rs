use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const WORKED: &str = "0.01,0.5,0.5";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parseval-erasure"))
        .args(args)
        .env_remove("PARSEVAL_ERASURE_SEED")
        .output()
        .expect("spawn")
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json stdout")
}

fn exit_code(args: &[&str]) -> (i32, String) {
    let out = run(args);
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert_eq!(
        err.trim_end().lines().count(),
        1,
        "diagnostic should be one line: {err:?}"
    );
    (out.status.code().expect("exited"), err)
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn design_worked_instance() {
    let doc = ok_json(&["design", "--n", "2", "--p", WORKED]);
    assert_eq!(doc["index"], 1);
    assert_eq!(doc["holds_h"], false);
    assert_eq!(f(&doc["e_p1"]), 0.12375);
    let norms: Vec<f64> = doc["norms_sq"].as_array().unwrap().iter().map(f).collect();
    for (a, b) in norms.iter().zip([1.0, 0.5, 0.5]) {
        assert!((a - b).abs() < 1e-15);
    }
    assert_eq!(doc["certificate"]["is_parseval"], true);
    assert_eq!(doc["checks"]["parseval_within_tol"], true);
    assert_eq!(doc["frame"]["vectors"].as_array().unwrap().len(), 3);
}

#[test]
fn design_uniform_is_equal_norm() {
    let doc = ok_json(&["design", "--n", "2", "--p", "0.2,0.2,0.2,0.2"]);
    for a in doc["norms_sq"].as_array().unwrap() {
        assert!((f(a) - 0.5).abs() < 1e-15);
    }
    let same = ok_json(&["design", "--n", "2", "--uniform-p", "0.2", "--m", "4"]);
    assert_eq!(doc, same);
}

#[test]
fn design_echoes_user_and_sorted_order() {
    let doc = ok_json(&["design", "--n", "2", "--p", "0.5,0.5,0.01"]);
    assert_eq!(f(&doc["probs"][2]), 0.01);
    assert_eq!(f(&doc["sorted"]["probs"][0]), 0.01);
    assert_eq!(doc["sorted"]["order"][0], 3);
    assert!((f(&doc["norms_sq"][2]) - 1.0).abs() < 1e-15);
    let row: f64 = doc["frame"]["vectors"][2]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| f(x).powi(2))
        .sum();
    assert!((row - 1.0).abs() < 1e-12);
}

#[test]
fn design_erasure_round_trip() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("design.json");
    let path = path.to_str().unwrap();
    let out = run(&["design", "--n", "2", "--p", "0.5,0.01,0.5", "--out", path]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());

    let doc = ok_json(&[
        "erasure",
        "--p",
        "0.5,0.01,0.5",
        "--frame",
        path,
        "--r",
        "1",
    ]);
    assert!((f(&doc["d_p_r"]) - 0.12375).abs() < 1e-12);
    assert!(doc["cond_expectation"].is_number());
    let direct = ok_json(&[
        "erasure",
        "--p",
        "0.5,0.01,0.5",
        "--from-design",
        "--n",
        "2",
        "--r",
        "1",
    ]);
    assert_eq!(doc, direct);

    // bare frame extracted from the design document is also accepted
    let design: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let bare = dir.path().join("frame.json");
    std::fs::write(&bare, serde_json::to_string(&design["frame"]).unwrap()).unwrap();
    let again = ok_json(&[
        "erasure",
        "--p",
        "0.5,0.01,0.5",
        "--frame",
        bare.to_str().unwrap(),
        "--r",
        "1",
    ]);
    assert_eq!(doc, again);
}

#[test]
fn erasure_full_pattern() {
    let doc = ok_json(&[
        "erasure",
        "--p",
        "0.1,0.2,0.3",
        "--harmonic",
        "--n",
        "2",
        "--r",
        "3",
    ]);
    assert_eq!(doc["argmax"], serde_json::json!([1, 2, 3]));
    // Parseval Gram norm is 1 and exactly one subset exists
    assert!((f(&doc["d_p_r"]) - 0.1 * 0.2 * 0.3).abs() < 1e-15);
    assert!((f(&doc["prob_N_eq_r"]) - 0.006).abs() < 1e-15);
}

#[test]
fn erasure_argmax_uses_input_indices() {
    let doc = ok_json(&[
        "erasure",
        "--p",
        "0.9,0.05,0.05",
        "--harmonic",
        "--n",
        "2",
        "--r",
        "1",
    ]);
    assert_eq!(doc["argmax"], serde_json::json!([1]));
}

#[test]
fn compare_json_and_csv() {
    let doc = ok_json(&["compare", "--n", "2", "--p", WORKED]);
    assert!((f(&doc["e_rpm"]) - 0.502_512_562_814_070_4).abs() < 1e-14);
    assert!((f(&doc["e_pm"]) - 0.507_388_427_284_939_5).abs() < 1e-14);
    assert!((f(&doc["e_cm"]) - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(doc["index"], 1);
    assert_eq!(doc["pm_feasible"], true);
    assert_eq!(doc["norms"]["rpm"].as_array().unwrap().len(), 3);

    let out = run(&["compare", "--n", "2", "--p", WORKED, "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines,
        vec![
            "model,expected_error",
            "cm,0.6666666666666666",
            &format!("pm,{:?}", f(&doc["e_pm"])),
            &format!("rpm,{:?}", f(&doc["e_rpm"])),
        ]
    );
    assert!(!text.contains('\r'));
}

#[test]
fn compare_uniform_collapses() {
    let doc = ok_json(&["compare", "--n", "3", "--uniform-p", "0.4", "--m", "5"]);
    for k in ["e_cm", "e_pm", "e_rpm"] {
        assert!((f(&doc[k]) - 0.6).abs() < 1e-14);
    }
}

#[test]
fn simulate_is_deterministic() {
    let args = [
        "simulate",
        "--p",
        WORKED,
        "--from-design",
        "--n",
        "2",
        "--seed",
        "7",
        "--trials",
        "30000",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["seed"], 7);
    assert_eq!(doc["trials"], 30000);
    assert_eq!(doc["accepted"], 30000);
}

#[test]
fn simulate_seed_flag_beats_environment() {
    let base = [
        "simulate",
        "--p",
        "0.1,0.4,0.3",
        "--harmonic",
        "--n",
        "2",
        "--trials",
        "5000",
    ];
    let env_run = |seed: &str, extra: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_parseval-erasure"))
            .args(base)
            .args(extra)
            .env("PARSEVAL_ERASURE_SEED", seed)
            .output()
            .unwrap();
        serde_json::from_slice::<Value>(&out.stdout).unwrap()
    };
    assert_eq!(env_run("11", &[])["seed"], 11);
    assert_eq!(env_run("11", &["--seed", "3"])["seed"], 3);
    assert_eq!(ok_json(&base)["seed"], 0);
}

#[test]
fn simulate_mercedes_benz_matches_exact() {
    let sim = ok_json(&[
        "simulate",
        "--uniform-p",
        "0.2",
        "--m",
        "3",
        "--harmonic",
        "--n",
        "2",
        "--r",
        "1",
        "--trials",
        "100000",
        "--seed",
        "5",
    ]);
    let exact = ok_json(&[
        "erasure",
        "--uniform-p",
        "0.2",
        "--m",
        "3",
        "--harmonic",
        "--n",
        "2",
        "--r",
        "1",
    ]);
    let diff = (f(&sim["estimate"]) - f(&exact["cond_expectation"])).abs();
    assert!(diff <= 3.0 * f(&sim["std_error"]) + 1e-12);
}

#[test]
fn sweep_rows_and_csv() {
    let doc = ok_json(&[
        "sweep",
        "--uniform-p",
        "0.3",
        "--n",
        "2",
        "--m",
        "8,16,32,64",
    ]);
    let ratios: Vec<f64> = doc["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| f(&r["ratio"]))
        .collect();
    assert_eq!(ratios.len(), 4);
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));

    let one = ok_json(&["sweep", "--uniform-p", "0.3", "--n", "2", "--m", "8"]);
    assert_eq!(one["rows"].as_array().unwrap().len(), 1);

    let out = run(&[
        "sweep",
        "--uniform-p",
        "0.3",
        "--n",
        "2",
        "--m",
        "8,16",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(
        text.lines().next(),
        Some("m,d_p2,d_p2_closed_form,reference,ratio")
    );
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn invalid_input_exits_2() {
    let (code, err) = exit_code(&["design", "--n", "2", "--p", "0.1,0.2,1.0"]);
    assert_eq!(code, 2);
    assert!(err.contains("p[3]=1.0 outside (0,1)"), "{err}");
    for args in [
        &["design", "--n", "5", "--p", "0.3,0.3"][..],
        &["design", "--n", "2", "--p", "0.3"],
        &["design", "--n", "2", "--p", "0.3,nan"],
        &["design", "--n", "2", "--p", "-0.1,0.5"],
        &["design", "--n", "2", "--p", "0.1,0.2", "--tol", "-1"],
        &[
            "erasure",
            "--p",
            "0.1,0.2,0.3",
            "--harmonic",
            "--n",
            "2",
            "--r",
            "4",
        ],
        &[
            "erasure",
            "--uniform-p",
            "0.2",
            "--m",
            "40",
            "--harmonic",
            "--n",
            "2",
            "--r",
            "20",
        ],
        &["erasure", "--p", "0.1,0.2,0.3", "--harmonic", "--r", "1"],
        &["compare", "--n", "2", "--p", "0.5,0.0,0.2"],
        &[
            "simulate",
            "--p",
            WORKED,
            "--harmonic",
            "--n",
            "2",
            "--trials",
            "0",
        ],
        &["sweep", "--uniform-p", "0.3", "--n", "2", "--m", ""],
        &["sweep", "--uniform-p", "1.5", "--n", "2", "--m", "8"],
        &["sweep", "--uniform-p", "0.3", "--n", "9", "--m", "8"],
        &["bogus"],
    ] {
        assert_eq!(exit_code(args).0, 2, "{args:?}");
    }
}

#[test]
fn io_failures_exit_3() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.json");
    assert_eq!(
        exit_code(&[
            "erasure",
            "--p",
            WORKED,
            "--frame",
            missing.to_str().unwrap(),
            "--r",
            "1"
        ])
        .0,
        3
    );

    let bad = dir.path().join("bad.json");
    for body in [
        "{\"n\": 2",
        "[1, 2]",
        "{\"n\":2,\"m\":3,\"vectors\":[[1.0,0.0]]}",
    ] {
        std::fs::write(&bad, body).unwrap();
        assert_eq!(
            exit_code(&[
                "erasure",
                "--p",
                WORKED,
                "--frame",
                bad.to_str().unwrap(),
                "--r",
                "1"
            ])
            .0,
            3
        );
    }

    let unwritable = dir.path().join("no/such/dir/out.json");
    assert_eq!(
        exit_code(&[
            "compare",
            "--n",
            "2",
            "--p",
            WORKED,
            "--out",
            unwritable.to_str().unwrap()
        ])
        .0,
        3
    );
}

#[test]
fn frame_content_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("frame.json");
    // rank-deficient rows do not span R^2
    std::fs::write(&path, r#"{"n":2,"m":3,"vectors":[[1,0],[2,0],[3,0]]}"#).unwrap();
    assert_eq!(
        exit_code(&[
            "erasure",
            "--p",
            WORKED,
            "--frame",
            path.to_str().unwrap(),
            "--r",
            "1"
        ])
        .0,
        2
    );
    // probability count disagrees with the frame
    std::fs::write(&path, r#"{"n":2,"m":2,"vectors":[[1,0],[0,1]]}"#).unwrap();
    assert_eq!(
        exit_code(&[
            "erasure",
            "--p",
            WORKED,
            "--frame",
            path.to_str().unwrap(),
            "--r",
            "1"
        ])
        .0,
        2
    );
}

#[test]
fn zero_acceptance_exits_4() {
    let (code, err) = exit_code(&[
        "simulate",
        "--uniform-p",
        "0.000001",
        "--m",
        "4",
        "--harmonic",
        "--n",
        "2",
        "--r",
        "4",
        "--trials",
        "10",
    ]);
    assert_eq!(code, 4);
    assert!(err.contains("exactly 4"), "{err}");
}
