//! Behavior tests for the `nit` binary: exit codes, stdin piping,
//! byte-level determinism, and the documented JSON shapes.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

fn nit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nit"))
        .args(args)
        .output()
        .expect("spawn nit")
}

fn nit_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_nit"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn nit");
    child
        .stdin
        .take()
        .expect("stdin handle")
        .write_all(input.as_bytes())
        .expect("write stdin");
    child.wait_with_output().expect("wait for nit")
}

fn stdout_str(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("utf-8 stdout")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("exit code")
}

const CANONICAL_32: &str =
    r#"{"k":2,"n":3,"partitions":[[[1,2,3],[4,5,6],[7,8,9]],[[1,4,7],[2,5,8],[3,6,9]]]}"#;
const ENTANGLED_32: &str =
    r#"{"k":2,"n":3,"partitions":[[[1,5,9],[2,6,7],[3,4,8]],[[1,6,8],[2,4,9],[3,5,7]]]}"#;

#[test]
fn frame_gen_is_byte_identical_across_runs() {
    let first = nit(&["frame", "gen", "--n", "3", "--k", "2"]);
    let second = nit(&["frame", "gen", "--n", "3", "--k", "2"]);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(stdout_str(&first).trim_end(), CANONICAL_32);
}

#[test]
fn frame_verify_reads_stdin_and_reports_separating() {
    let output = nit_with_stdin(&["frame", "verify", "-"], CANONICAL_32);
    assert_eq!(exit_code(&output), 0);
    assert_eq!(stdout_str(&output).trim_end(), r#"{"separating":true}"#);
}

#[test]
fn frame_verify_failure_exits_one_with_witness() {
    let doubled = r#"{"k":2,"n":2,"partitions":[[[1,2],[3,4]],[[1,2],[3,4]]]}"#;
    let output = nit_with_stdin(&["frame", "verify", "-"], doubled);
    assert_eq!(exit_code(&output), 1);
    let body: serde_json::Value = serde_json::from_str(&stdout_str(&output)).unwrap();
    assert_eq!(body["separating"], serde_json::json!(false));
    assert_eq!(body["witness"]["intersection"], serde_json::json!([1, 2]));
}

#[test]
fn frame_verify_sampled_scan_is_seed_deterministic() {
    let args = &["frame", "verify", "-", "--samples", "64", "--seed", "11"];
    let first = nit_with_stdin(args, CANONICAL_32);
    let second = nit_with_stdin(args, CANONICAL_32);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    let body: serde_json::Value = serde_json::from_str(&stdout_str(&first)).unwrap();
    assert_eq!(body["orbit"]["checked"], serde_json::json!(64));
    assert_eq!(body["orbit"]["consistent"], serde_json::json!(true));
}

#[test]
fn frame_meet_of_canonical_frame_is_discrete() {
    let output = nit_with_stdin(&["frame", "meet", "-"], CANONICAL_32);
    assert_eq!(exit_code(&output), 0);
    assert_eq!(
        stdout_str(&output).trim_end(),
        "[[1],[2],[3],[4],[5],[6],[7],[8],[9]]"
    );
}

#[test]
fn frame_permute_maps_entangled_onto_canonical() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("entangled.json");
    std::fs::write(&path, ENTANGLED_32).unwrap();
    let output = nit(&[
        "frame",
        "permute",
        path.to_str().unwrap(),
        "--cycles",
        "(1)(2,9,3,5)(4,6,7,8)",
    ]);
    assert_eq!(exit_code(&output), 0);
    let generated = nit(&["frame", "gen", "--n", "3", "--k", "2"]);
    assert_eq!(output.stdout, generated.stdout);
}

#[test]
fn frame_classify_labels_coordinates_and_entanglement() {
    let canonical = nit_with_stdin(&["frame", "classify", "-"], CANONICAL_32);
    assert_eq!(exit_code(&canonical), 0);
    assert_eq!(
        stdout_str(&canonical).trim_end(),
        r#"[{"kind":"local","particle":1,"relabeling":[0,1,2]},{"kind":"local","particle":2,"relabeling":[0,1,2]}]"#
    );
    let entangled = nit_with_stdin(&["frame", "classify", "-"], ENTANGLED_32);
    assert_eq!(
        stdout_str(&entangled).trim_end(),
        r#"[{"kind":"nonlocal"},{"kind":"nonlocal"}]"#
    );
}

#[test]
fn frame_enumerate_counts_and_respects_capacity() {
    let output = nit(&["frame", "enumerate", "--n", "2", "--k", "2", "--balanced"]);
    assert_eq!(exit_code(&output), 0);
    let body: serde_json::Value = serde_json::from_str(&stdout_str(&output)).unwrap();
    assert_eq!(body["count"], serde_json::json!(6));
    assert_eq!(body["frames"].as_array().unwrap().len(), 6);

    let too_big = nit(&["frame", "enumerate", "--n", "4", "--k", "2"]);
    assert_eq!(exit_code(&too_big), 3);
    assert!(too_big.stdout.is_empty());
    assert!(!too_big.stderr.is_empty());
}

#[test]
fn op_pipeline_build_context_spectrum() {
    let dir = TempDir::new().unwrap();
    let rows = dir.path().join("rows.json");
    let cols = dir.path().join("cols.json");
    std::fs::write(&rows, "[[1,2,3],[4,5,6],[7,8,9]]").unwrap();
    std::fs::write(&cols, "[[1,4,7],[2,5,8],[3,6,9]]").unwrap();

    let first = nit(&["op", "build", rows.to_str().unwrap(), "--labels", "2,3,5"]);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(
        stdout_str(&first).trim_end(),
        r#"{"diag":["2","2","2","3","3","3","5","5","5"]}"#
    );

    let op1 = dir.path().join("op1.json");
    let op2 = dir.path().join("op2.json");
    std::fs::write(&op1, stdout_str(&first).trim_end()).unwrap();
    let second = nit(&["op", "build", cols.to_str().unwrap(), "--labels", "7,11,13"]);
    std::fs::write(&op2, stdout_str(&second).trim_end()).unwrap();

    let context = nit(&["op", "context", op1.to_str().unwrap(), op2.to_str().unwrap()]);
    assert_eq!(exit_code(&context), 0);
    assert_eq!(
        stdout_str(&context).trim_end(),
        r#"{"diag":["14","22","26","21","33","39","35","55","65"]}"#
    );

    let spectrum = nit_with_stdin(&["op", "spectrum", "-"], stdout_str(&context).trim_end());
    assert_eq!(exit_code(&spectrum), 0);
    assert_eq!(stdout_str(&spectrum).trim_end(), r#"{"distinct":true}"#);
}

#[test]
fn op_spectrum_collision_exits_one_with_positions() {
    let output = nit_with_stdin(&["op", "spectrum", "-"], r#"{"diag":["4","6","6","9"]}"#);
    assert_eq!(exit_code(&output), 1);
    assert_eq!(
        stdout_str(&output).trim_end(),
        r#"{"collision":{"positions":[2,3],"value":"6"},"distinct":false}"#
    );
}

#[test]
fn op_build_rejects_composite_labels() {
    let output = nit_with_stdin(&["op", "build", "-", "--labels", "2,3,6"], "[[1],[2],[3]]");
    assert_eq!(exit_code(&output), 2);
    assert!(output.stdout.is_empty());
}

#[test]
fn basis_diag_overlap_and_rejection() {
    let families = nit(&["basis", "diag", "--n", "3"]);
    assert_eq!(exit_code(&families), 0);
    let text = stdout_str(&families);

    let dir = TempDir::new().unwrap();
    let path = dir.path().join("families.json");
    std::fs::write(&path, text.trim_end()).unwrap();

    // Cross-family pair (family 1 head is index 0, family 2 head is 3).
    let cross = nit(&["basis", "overlap", path.to_str().unwrap(), "--i", "0", "--j", "3"]);
    assert_eq!(stdout_str(&cross).trim_end(), r#"{"den":"9","num":"1"}"#);

    // Same-family pair: orthogonal.
    let within = nit(&["basis", "overlap", path.to_str().unwrap(), "--i", "0", "--j", "1"]);
    assert_eq!(stdout_str(&within).trim_end(), r#"{"den":"1","num":"0"}"#);

    // A bare vector array works too.
    let body: serde_json::Value = serde_json::from_str(text.trim_end()).unwrap();
    let bare = serde_json::to_string(&body["family1"]).unwrap();
    let from_array = nit_with_stdin(&["basis", "overlap", "-", "--i", "1", "--j", "2"], &bare);
    assert_eq!(stdout_str(&from_array).trim_end(), r#"{"den":"1","num":"0"}"#);

    // Out-of-range index is malformed input.
    let out_of_range = nit(&["basis", "overlap", path.to_str().unwrap(), "--i", "0", "--j", "6"]);
    assert_eq!(exit_code(&out_of_range), 2);

    // Even radix has no such pair of families.
    let rejected = nit(&["basis", "diag", "--n", "4"]);
    assert_eq!(exit_code(&rejected), 2);
    assert!(!rejected.stderr.is_empty());
}

#[test]
fn basis_probs_exact_rationals() {
    let dir = TempDir::new().unwrap();
    let state = dir.path().join("state.json");
    let partition = dir.path().join("partition.json");
    std::fs::write(
        &state,
        r#"{"coeffs":["1","0","0","0","1","0","0","0","1"],"norm_sq":"3"}"#,
    )
    .unwrap();
    std::fs::write(&partition, "[[1,6,8],[2,4,9],[3,5,7]]").unwrap();
    let output = nit(&[
        "basis",
        "probs",
        state.to_str().unwrap(),
        partition.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&output), 0);
    assert_eq!(
        stdout_str(&output).trim_end(),
        r#"[{"den":"3","num":"1"},{"den":"3","num":"1"},{"den":"3","num":"1"}]"#
    );
}

#[test]
fn search_plan_eval_round_trip() {
    let plan = nit_with_stdin(&["search", "plan", "-"], CANONICAL_32);
    assert_eq!(exit_code(&plan), 0);
    let body: serde_json::Value = serde_json::from_str(&stdout_str(&plan)).unwrap();
    assert_eq!(body["report"]["worst_case"], serde_json::json!(2));
    assert_eq!(body["report"]["expected"]["num"], serde_json::json!("2"));
    assert_eq!(body["report"]["residual"], serde_json::json!([]));

    let strategy = serde_json::to_string(&body["strategy"]).unwrap();
    let eval = nit_with_stdin(&["search", "eval", "-", "--hidden", "3"], &strategy);
    assert_eq!(exit_code(&eval), 0);
    assert_eq!(
        stdout_str(&eval).trim_end(),
        r#"{"outcome":{"identified":3},"steps":[{"block":0,"question":0},{"block":2,"question":1}]}"#
    );

    let bad_state = nit_with_stdin(&["search", "eval", "-", "--hidden", "0"], &strategy);
    assert_eq!(exit_code(&bad_state), 2);
}

#[test]
fn search_optimal_reports_unbalanced_residual() {
    let repertoire = r#"{"ground_size":9,"questions":[[[1],[2,3],[4,5,6,7,8,9]],[[1,4,7],[2,5,8],[3,6,9]]]}"#;
    let output = nit_with_stdin(&["search", "optimal", "-"], repertoire);
    assert_eq!(exit_code(&output), 0);
    let body: serde_json::Value = serde_json::from_str(&stdout_str(&output)).unwrap();
    assert_eq!(body["report"]["worst_case"], serde_json::json!("not_separating"));
    assert_eq!(
        body["report"]["expected"],
        serde_json::json!({"den": "9", "num": "17"})
    );
    assert_eq!(
        body["report"]["residual"],
        serde_json::json!([[4, 7], [5, 8], [6, 9]])
    );

    // Replaying the emitted strategy on hidden state 7 ends in the
    // two-state residual cell.
    let strategy = serde_json::to_string(&body["strategy"]).unwrap();
    let eval = nit_with_stdin(&["search", "eval", "-", "--hidden", "7"], &strategy);
    let transcript: serde_json::Value = serde_json::from_str(&stdout_str(&eval)).unwrap();
    assert_eq!(transcript["outcome"]["residual"], serde_json::json!([4, 7]));
}

#[test]
fn tampered_strategy_is_rejected_as_malformed() {
    let plan = nit_with_stdin(&["search", "plan", "-"], CANONICAL_32);
    let mut body: serde_json::Value = serde_json::from_str(&stdout_str(&plan)).unwrap();
    body["strategy"]["tree"]["children"]["0"]["children"]["0"]["leaf"] =
        serde_json::json!([2]);
    let strategy = serde_json::to_string(&body["strategy"]).unwrap();
    let output = nit_with_stdin(&["search", "eval", "-", "--hidden", "1"], &strategy);
    assert_eq!(exit_code(&output), 2);
}

#[test]
fn malformed_json_and_unknown_subcommands_exit_two() {
    let bad_json = nit_with_stdin(&["frame", "verify", "-"], "not json");
    assert_eq!(exit_code(&bad_json), 2);

    let unknown = nit(&["frobnicate"]);
    assert_eq!(exit_code(&unknown), 2);

    let bad_cycles = nit_with_stdin(&["frame", "permute", "-", "--cycles", "(1,2,"], CANONICAL_32);
    assert_eq!(exit_code(&bad_cycles), 2);

    let missing_file = nit(&["frame", "verify", "/nonexistent/frame.json"]);
    assert_eq!(exit_code(&missing_file), 2);
}

#[test]
fn paper_demo_holds_and_is_deterministic() {
    let first = nit(&["paper", "demo"]);
    assert_eq!(exit_code(&first), 0);
    let body: serde_json::Value = serde_json::from_str(&stdout_str(&first)).unwrap();
    assert_eq!(body["all_hold"], serde_json::json!(true));
    let checks = body["checks"].as_array().unwrap();
    assert!(checks.len() >= 20);
    assert!(checks
        .iter()
        .all(|c| c["holds"] == serde_json::json!(true)));

    let second = nit(&["paper", "demo"]);
    assert_eq!(first.stdout, second.stdout);
}
