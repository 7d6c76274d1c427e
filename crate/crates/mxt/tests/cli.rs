//! End-to-end CLI tests: golden outputs, exit codes, and the round-trip
//! guarantee that emitted JSON re-parses into a valid tree.

use std::path::PathBuf;
use std::process::{Command, Output};

use minimax_tree::{MinimaxTree, Node, NodeId};
use tempfile::TempDir;

fn mxt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mxt"))
        .args(args)
        .env_remove("MXT_SEED")
        .output()
        .expect("mxt runs")
}

fn mxt_with_seed_env(args: &[&str], seed: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mxt"))
        .args(args)
        .env("MXT_SEED", seed)
        .output()
        .expect("mxt runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn write_file(dir: &TempDir, name: &str, content: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, content).expect("write input file");
    path
}

#[test]
fn tree_cost_goldens() {
    let dir = TempDir::new().unwrap();
    let weights = write_file(&dir, "w.txt", "1\n2\n3\n");
    let out = mxt(&["tree", weights.to_str().unwrap(), "--mode", "int", "--format", "cost"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "4.000000000\n");

    let single = write_file(&dir, "single.txt", "0\n");
    let out = mxt(&["tree", single.to_str().unwrap(), "--format", "cost"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "0.000000000\n");
}

#[test]
fn tree_modes_agree_on_integer_weights() {
    let dir = TempDir::new().unwrap();
    let weights = write_file(&dir, "w.txt", "# header comment\n\n-3\n5\n0\n0  # trailing\n");
    let mut costs = Vec::new();
    for mode in ["int", "real", "heap"] {
        let out = mxt(&["tree", weights.to_str().unwrap(), "--mode", mode, "--format", "cost"]);
        assert!(out.status.success(), "mode {mode}: {}", stderr(&out));
        costs.push(stdout(&out));
    }
    assert_eq!(costs[0], costs[1]);
    assert_eq!(costs[0], costs[2]);
}

#[test]
fn tree_real_weights_under_int_mode_exit_3() {
    let dir = TempDir::new().unwrap();
    let weights = write_file(&dir, "w.txt", "1\n2.5\n3\n");
    let out = mxt(&["tree", weights.to_str().unwrap(), "--mode", "int", "--format", "cost"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains(":2"), "names the offending line: {}", stderr(&out));
}

#[test]
fn tree_parse_failures_exit_2() {
    let dir = TempDir::new().unwrap();
    let garbage = write_file(&dir, "bad.txt", "1\nnot-a-weight\n");
    let out = mxt(&["tree", garbage.to_str().unwrap(), "--format", "cost"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains(":2"));

    let empty = write_file(&dir, "empty.txt", "# only comments\n\n");
    let out = mxt(&["tree", empty.to_str().unwrap(), "--format", "cost"]);
    assert_eq!(out.status.code(), Some(2));

    let missing = dir.path().join("nope.txt");
    let out = mxt(&["tree", missing.to_str().unwrap(), "--format", "cost"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn tree_json_round_trips_int() {
    let dir = TempDir::new().unwrap();
    let input: Vec<i64> = vec![4, -2, 0, 7, 7, -2, 3];
    let text: String = input.iter().map(|w| format!("{w}\n")).collect();
    let weights = write_file(&dir, "w.txt", &text);
    let out = mxt(&["tree", weights.to_str().unwrap(), "--mode", "int", "--format", "json"]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();

    let nodes: Vec<Node<i64>> = parsed["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|entry| {
            let weight = entry["weight"].as_i64().unwrap();
            if let Some(children) = entry["children"].as_array() {
                let left = NodeId::new(children[0].as_u64().unwrap() as u32);
                let right = NodeId::new(children[1].as_u64().unwrap() as u32);
                Node::internal(weight, left, right)
            } else {
                Node::leaf(weight, entry["leaf_index"].as_u64().unwrap() as u32)
            }
        })
        .collect();
    let root = NodeId::new(parsed["root"].as_u64().unwrap() as u32);
    let tree = MinimaxTree::from_parts(nodes, root).expect("emitted arena is well formed");
    assert!(tree.validate(&input).is_empty());
}

#[test]
fn tree_json_round_trips_real() {
    let dir = TempDir::new().unwrap();
    let input = [-1.25, -0.5, -3.75, -2.0];
    let text: String = input.iter().map(|w| format!("{w}\n")).collect();
    let weights = write_file(&dir, "w.txt", &text);
    let out = mxt(&["tree", weights.to_str().unwrap(), "--mode", "real", "--format", "json"]);
    assert!(out.status.success());
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();

    let nodes: Vec<Node<f64>> = parsed["nodes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|entry| {
            let weight = entry["weight"].as_f64().unwrap();
            if let Some(children) = entry["children"].as_array() {
                let left = NodeId::new(children[0].as_u64().unwrap() as u32);
                let right = NodeId::new(children[1].as_u64().unwrap() as u32);
                Node::internal(weight, left, right)
            } else {
                Node::leaf(weight, entry["leaf_index"].as_u64().unwrap() as u32)
            }
        })
        .collect();
    let root = NodeId::new(parsed["root"].as_u64().unwrap() as u32);
    let tree = MinimaxTree::from_parts(nodes, root).expect("emitted arena is well formed");
    assert!(tree.validate(&input).is_empty());
}

#[test]
fn tree_dot_output_is_deterministic_and_well_formed() {
    let dir = TempDir::new().unwrap();
    let weights = write_file(&dir, "w.txt", "1\n2\n3\n");
    let first = mxt(&["tree", weights.to_str().unwrap(), "--format", "dot"]);
    let second = mxt(&["tree", weights.to_str().unwrap(), "--format", "dot"]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = stdout(&first);
    assert!(text.starts_with("digraph minimax {\n"));
    assert!(text.ends_with("}\n"));
    assert_eq!(text.matches(" -> ").count(), 4); // 5 nodes, 4 edges
}

#[test]
fn code_minimax_dyadic_golden() {
    let dir = TempDir::new().unwrap();
    let dist = write_file(&dir, "d.tsv", "a\t0.5\nb\t0.25\nc\t0.25\n");
    let out = mxt(&["code", dist.to_str().unwrap(), "--algo", "minimax"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "a 1 0\nb 2 10\nc 2 11\n");
}

#[test]
fn code_huffman_fibonacci_golden() {
    let dir = TempDir::new().unwrap();
    let dist = write_file(&dir, "fib.tsv", "a\t5\nb\t3\nc\t2\nd\t1\ne\t1\n");
    let out = mxt(&["code", dist.to_str().unwrap(), "--algo", "huffman"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "a 1 0\nb 2 10\nc 3 110\nd 4 1110\ne 4 1111\n");
}

#[test]
fn code_report_against_same_distribution() {
    let dir = TempDir::new().unwrap();
    let dist = write_file(&dir, "d.tsv", "a\t0.5\nb\t0.25\nc\t0.25\n");
    let out = mxt(&[
        "code",
        dist.to_str().unwrap(),
        "--algo",
        "minimax",
        "--report",
        dist.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let report_line = text.lines().last().unwrap();
    let report: serde_json::Value = serde_json::from_str(report_line).unwrap();
    assert_eq!(report["relative_entropy"].as_f64().unwrap(), 0.0);
    assert_eq!(report["entropy"].as_f64().unwrap(), 1.5);
    assert_eq!(report["max_pointwise"].as_f64().unwrap(), 0.0);
}

#[test]
fn code_report_size_mismatch_exits_2() {
    let dir = TempDir::new().unwrap();
    let q = write_file(&dir, "q.tsv", "a\t1\nb\t1\n");
    let p = write_file(&dir, "p.tsv", "a\t1\nb\t1\nc\t1\n");
    let out = mxt(&["code", q.to_str().unwrap(), "--report", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn code_zero_probability_exits_4_naming_the_symbol() {
    let dir = TempDir::new().unwrap();
    let dist = write_file(&dir, "d.tsv", "keep\t3\ndrop\t0\n");
    for algo in ["minimax", "shannon", "huffman"] {
        let out = mxt(&["code", dist.to_str().unwrap(), "--algo", algo]);
        assert_eq!(out.status.code(), Some(4), "algo {algo}");
        assert!(stderr(&out).contains("drop"), "algo {algo}: {}", stderr(&out));
    }
}

#[test]
fn code_duplicate_symbol_exits_2() {
    let dir = TempDir::new().unwrap();
    let dist = write_file(&dir, "d.tsv", "a\t1\na\t2\n");
    let out = mxt(&["code", dist.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains(":2"));
}

#[test]
fn code_huffman_single_symbol_exits_3() {
    let dir = TempDir::new().unwrap();
    let dist = write_file(&dir, "d.tsv", "solo\t1\n");
    let out = mxt(&["code", dist.to_str().unwrap(), "--algo", "huffman"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn grouptest_uniform_four_is_two_level() {
    let dir = TempDir::new().unwrap();
    let dist = write_file(&dir, "u.tsv", "a\t1\nb\t1\nc\t1\nd\t1\n");
    let out = mxt(&["grouptest", dist.to_str().unwrap()]);
    assert!(out.status.success());
    let plan: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(plan["elements"].as_array().unwrap().len(), 4);
    let children = plan["children"].as_array().unwrap();
    assert_eq!(children.len(), 2);
    for half in children {
        assert_eq!(half["elements"].as_array().unwrap().len(), 2);
        let leaves = half["children"].as_array().unwrap();
        assert_eq!(leaves.len(), 2);
        for leaf in leaves {
            assert_eq!(leaf["elements"].as_array().unwrap().len(), 1);
            assert!(leaf.get("children").is_none());
        }
    }
}

#[test]
fn grouptest_skew_first_query_is_heaviest_element() {
    let dir = TempDir::new().unwrap();
    let dist = write_file(&dir, "d.tsv", "x\t0.4\ny\t0.3\nz\t0.3\n");
    let out = mxt(&["grouptest", dist.to_str().unwrap()]);
    assert!(out.status.success());
    let plan: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(plan["children"][0]["elements"], serde_json::json!([0]));
}

#[test]
fn grouptest_single_element_needs_no_queries() {
    let dir = TempDir::new().unwrap();
    let dist = write_file(&dir, "d.tsv", "only\t1\n");
    let out = mxt(&["grouptest", dist.to_str().unwrap()]);
    assert!(out.status.success());
    let plan: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(plan["elements"], serde_json::json!([0]));
    assert!(plan.get("children").is_none());
}

#[test]
fn verify_passes_and_is_deterministic() {
    let out = mxt(&["verify", "--n-max", "4", "--trials", "60", "--seed", "42"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("integer exhaustive:"));
    assert!(text.contains("real randomized: 60 cases"));
    assert!(text.contains("threshold agreement: 60 cases"));
    assert!(text.trim_end().ends_with("all passed"));

    let again = mxt(&["verify", "--n-max", "4", "--trials", "60", "--seed", "42"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn verify_trials_zero_runs_integer_suite_only() {
    let out = mxt(&["verify", "--n-max", "3", "--trials", "0"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("integer exhaustive:"));
    assert!(!text.contains("real randomized"));
    assert!(!text.contains("threshold agreement"));
    assert!(text.contains("all passed"));
}

#[test]
fn verify_seed_env_override() {
    let flagged = mxt(&["verify", "--n-max", "3", "--trials", "40", "--seed", "9"]);
    let via_env = mxt_with_seed_env(&["verify", "--n-max", "3", "--trials", "40"], "9");
    assert_eq!(flagged.stdout, via_env.stdout);

    // An explicit flag wins over the environment.
    let both = mxt_with_seed_env(&["verify", "--n-max", "3", "--trials", "40", "--seed", "9"], "1234");
    assert_eq!(flagged.stdout, both.stdout);
}

#[test]
fn bench_single_element_reports_positive_time() {
    let out = mxt(&["bench", "--sizes", "1", "--algo", "int", "--reps", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let fields: Vec<&str> = text.split_whitespace().collect();
    assert_eq!(fields.len(), 3);
    assert_eq!(fields[0], "1");
    assert!(fields[1].parse::<u64>().unwrap() > 0);
    assert!(fields[2].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn bench_accepts_exponent_notation() {
    let out = mxt(&["bench", "--sizes", "2^6,100", "--algo", "real", "--reps", "1"]);
    assert!(out.status.success());
    let lines: Vec<String> = stdout(&out).lines().map(String::from).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("64 "));
    assert!(lines[1].starts_with("100 "));
}

#[test]
fn bench_rejects_zero_sizes_and_reps() {
    let out = mxt(&["bench", "--sizes", "0", "--algo", "int"]);
    assert_eq!(out.status.code(), Some(2));
    let out = mxt(&["bench", "--sizes", "4", "--reps", "0"]);
    assert_eq!(out.status.code(), Some(3));
}
