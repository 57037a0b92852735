use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn acyclic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acyclic"))
        .args(args)
        .env_remove("ACYCLIC_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn acyclic_in(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acyclic"))
        .args(args)
        .env("ACYCLIC_OUT_DIR", dir)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}):\n{}\n{}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn analyze_te_golden_values() {
    let out = acyclic(&["analyze", "te", "--shape", "line", "--n", "8", "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["format"], 1);
    assert_eq!(v["config"]["command"], "analyze");
    assert_eq!(v["config"]["network"]["shape"], "line");
    let a = &v["analysis"];
    assert_eq!(a["verdict"], true);
    assert_eq!(a["k"], 2);
    assert_eq!(a["causality"]["edges"], serde_json::json!([["S", "R"]]));
    assert_eq!(a["causality"]["height"], 1);
    assert_eq!(a["causality"]["in_degree"], 1);
    assert_eq!(a["families"][0]["orientation"], "bottom-up");
    assert_eq!(a["families"][1]["orientation"], "top-down");
    // n = 8, H = 7: n^2 (3 + 2H)
    assert_eq!(v["bounds"]["refined_total"], 64 * 17);
}

#[test]
fn analyze_nolp_on_a_star() {
    let out = acyclic(&["analyze", "nolp", "--shape", "star", "--n", "6", "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let a = &json(&out)["analysis"];
    assert_eq!(a["k"], 3);
    assert_eq!(a["causality"]["height"], 2);
    assert_eq!(
        a["causality"]["edges"],
        serde_json::json!([["C", "S"], ["S", "R"]])
    );
}

#[test]
fn analyze_table_mentions_the_verdict() {
    let out = acyclic(&[
        "analyze", "te", "--shape", "star", "--n", "4", "--trials", "0",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("acyclic strategy: true"), "{text}");
    assert!(text.contains("untested"), "{text}");
}

#[test]
fn analyze_exhaustive_on_a_tiny_tree() {
    let out = acyclic(&[
        "analyze",
        "te",
        "--shape",
        "line",
        "--n",
        "2",
        "--exhaustive",
        "2",
        "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let e = &json(&out)["exploration"];
    assert_eq!(e["initial_count"], 81);
    assert_eq!(e["all_terminate"], true);
    assert_eq!(e["all_terminal_satisfy_sp"], true);
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cyclic = dir.path().join("cyclic.json");
    fs::write(
        &cyclic,
        r#"{"nodes":[{"id":0,"parent":1},{"id":1,"parent":0}],"edges":[[0,1]]}"#,
    )
    .unwrap();
    let out = acyclic(&["analyze", "te", "--network", cyclic.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("parent relation cyclic"),
        "{}",
        stderr(&out)
    );

    let out = acyclic(&["analyze", "nope", "--shape", "line", "--n", "3"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown algorithm"));

    assert_eq!(code(&acyclic(&["analyze", "te", "--shape", "line"])), 2);
    assert_eq!(
        code(&acyclic(&["analyze", "te", "--shape", "ring", "--n", "3"])),
        2
    );
    assert_eq!(code(&acyclic(&["frobnicate"])), 2);
    assert_eq!(
        code(&acyclic(&[
            "run",
            "nolp",
            "--worstcase",
            "te-line",
            "--n",
            "6"
        ])),
        2
    );

    let missing = dir.path().join("missing.json");
    let out = acyclic(&[
        "run",
        "te",
        "--shape",
        "line",
        "--n",
        "3",
        "--init",
        missing.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);

    let bad_init = dir.path().join("init.json");
    fs::write(&bad_init, r#"{"values":[{"id":7,"sub":1}]}"#).unwrap();
    let out = acyclic(&[
        "run",
        "te",
        "--shape",
        "line",
        "--n",
        "3",
        "--init",
        bad_init.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("unknown node id 7"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn run_random_tree_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "run",
        "te",
        "--shape",
        "random-tree",
        "--n",
        "12",
        "--daemon",
        "random-distributed",
        "--seed",
        "7",
    ];
    let out = acyclic_in(dir.path(), &args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let summary: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["format"], 1);
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["summary"]["outcome"], "terminal");
    assert_eq!(summary["summary"]["legitimate"], true);
    assert_eq!(summary["config"]["daemon"]["kind"], "random-distributed");
    assert_eq!(summary["config"]["daemon"]["source"], "builtin");
    assert_eq!(summary["config"]["seed"], 7);
    assert_eq!(summary["audit"]["passed"], true);

    let csv = fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("step,node,family,move_index,round"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(
        rows.len() as u64,
        summary["summary"]["total_moves"].as_u64().unwrap()
    );
    let last_round: u64 = rows
        .last()
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(last_round, summary["summary"]["rounds"].as_u64().unwrap());

    // same flags, same run
    let again = tempfile::tempdir().unwrap();
    assert_eq!(code(&acyclic_in(again.path(), &args)), 0);
    assert_eq!(
        fs::read_to_string(again.path().join("trace.csv")).unwrap(),
        csv
    );
}

#[test]
fn star_schedule_round_count() {
    let out = acyclic(&["run", "te", "--worstcase", "te-star", "--n", "10", "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["config"]["daemon"]["source"], "scripted");
    // n - 2 one-round phases, then a four-round last phase
    assert_eq!(v["summary"]["rounds"], 8 + 4);
    assert_eq!(v["summary"]["total_moves"], 9 * 12);
}

#[test]
fn transformed_line_schedule_meets_the_round_bound() {
    let out = acyclic(&[
        "run",
        "te",
        "--transform",
        "--worstcase",
        "te-line",
        "--n",
        "6",
        "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    let h = 5;
    assert_eq!(v["round_bound"]["value"], 2 * (h + 1));
    assert_eq!(v["round_bound"]["evidence"], "transformer");
    assert!(v["summary"]["rounds"].as_u64().unwrap() <= 2 * (h + 1));
    assert_eq!(v["replay"]["ok"], true);
    assert_eq!(v["original_audit"]["passed"], true);
    assert_eq!(v["order"], serde_json::json!(["S", "R"]));
}

#[test]
fn exceeding_the_step_limit_fails() {
    let out = acyclic(&[
        "run",
        "te",
        "--shape",
        "line",
        "--n",
        "6",
        "--steps-limit",
        "1",
        "--json",
    ]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["summary"]["outcome"], "step-limit-exceeded");
}

#[test]
fn every_daemon_runs() {
    for daemon in [
        "synchronous",
        "random-distributed",
        "random-central",
        "round-robin",
    ] {
        for alg in ["te", "nolp", "subtree-size"] {
            let out = acyclic(&[
                "run",
                alg,
                "--shape",
                "random-tree",
                "--n",
                "9",
                "--daemon",
                daemon,
                "--seed",
                "3",
                "--json",
            ]);
            assert_eq!(code(&out), 0, "{alg} {daemon}: {}", stderr(&out));
        }
    }
    assert_eq!(
        code(&acyclic(&[
            "run", "te", "--shape", "line", "--n", "3", "--rho", "0"
        ])),
        2
    );
}

#[test]
fn bounds_then_audit() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("bounds.json");
    let trace = dir.path().join("trace.csv");
    let out = acyclic(&[
        "bounds",
        "te",
        "--shape",
        "line",
        "--n",
        "6",
        "--report-out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = acyclic(&[
        "run",
        "te",
        "--shape",
        "line",
        "--n",
        "6",
        "--daemon",
        "random-central",
        "--trace-out",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = acyclic(&[
        "audit",
        "--trace",
        trace.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["audit"]["passed"], true);

    // S at node 0 has a bottom-up zone of 6 nodes and height 0: at most 6 moves
    let mut forged = String::from("step,node,family,move_index,round\n");
    for i in 0..7 {
        forged += &format!("{i},0,S,{},1\n", i + 1);
    }
    fs::write(&trace, forged).unwrap();
    let out = acyclic(&[
        "audit",
        "--trace",
        trace.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(code(&out), 1);
    let violations = &json(&out)["audit"]["violations"];
    assert_eq!(violations[0]["kind"], "per-node");
    assert_eq!(violations[0]["bound"], 6);

    fs::write(&trace, "step,node,family,move_index,round\n0,0,Q,1,1\n").unwrap();
    let out = acyclic(&[
        "audit",
        "--trace",
        trace.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown family"), "{}", stderr(&out));
}

#[test]
fn bounds_with_round_evidence() {
    let out = acyclic(&[
        "bounds",
        "te",
        "--shape",
        "line",
        "--n",
        "4",
        "--transform",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["bounds"]["round_bound"]["value"], 2 * 4);

    let out = acyclic(&[
        "bounds",
        "te",
        "--shape",
        "line",
        "--n",
        "2",
        "--exhaustive",
        "2",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["bounds"]["round_bound"].is_null());
}

#[test]
fn transform_reports_order_and_exclusion() {
    let out = acyclic(&[
        "transform",
        "te",
        "--shape",
        "random-tree",
        "--n",
        "8",
        "--samples",
        "500",
        "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["order"], serde_json::json!(["S", "R"]));
    assert_eq!(v["local_mutual_exclusion"]["passed"], true);
    assert_eq!(v["analysis"]["algorithm"], "T(te)");
    assert_eq!(v["transformed_height"]["height"], 1);

    let out = acyclic(&[
        "transform",
        "nolp",
        "--shape",
        "line",
        "--n",
        "2",
        "--exhaustive",
        "2",
        "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["local_mutual_exclusion"]["mode"], "exhaustive");

    let out = acyclic(&[
        "transform",
        "te",
        "--shape",
        "line",
        "--n",
        "3",
        "--order",
        "R,S",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn worstcase_files_feed_run() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("net.json");
    let init = dir.path().join("init.json");
    let out = acyclic(&[
        "worstcase",
        "te-line",
        "--n",
        "8",
        "--network-out",
        net.to_str().unwrap(),
        "--init-out",
        init.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v = json(&out);
    assert_eq!(v["script"].as_array().unwrap().len(), 84);
    assert_eq!(v["completion"].as_array().unwrap().len(), 16);
    assert_eq!(v["replay"]["terminal"], true);
    assert_eq!(v["network"]["nodes"].as_array().unwrap().len(), 8);

    let out = acyclic(&[
        "run",
        "te",
        "--network",
        net.to_str().unwrap(),
        "--init",
        init.to_str().unwrap(),
        "--daemon",
        "synchronous",
        "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(json(&out)["summary"]["legitimate"], true);

    assert_eq!(code(&acyclic(&["worstcase", "te-star", "--n", "1"])), 2);
}

#[test]
fn verify_quick_suites() {
    let out = acyclic(&["verify", "bounds-grid", "--json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["results"].as_array().unwrap().len(), 4);

    let out = acyclic(&["verify", "lme", "--trials", "200", "--json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn out_dir_receives_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = acyclic_in(
        dir.path(),
        &[
            "analyze", "nolp", "--shape", "line", "--n", "5", "--trials", "10",
        ],
    );
    assert_eq!(code(&out), 0);
    let report: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("analyze.json")).unwrap())
            .unwrap();
    assert_eq!(report["analysis"]["verdict"], true);
    assert_eq!(
        report["config"]["outputs"]["report"],
        dir.path().join("analyze.json").to_str().unwrap()
    );
}
