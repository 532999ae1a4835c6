//! End-to-end tests of the command-line interface, including the exit-code
//! contract: 0 partition, 3 certificate, 4 budget exceeded, 1 usage error.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_udg-mcp")
}

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(bin()).args(args).current_dir(dir).output().expect("binary runs")
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("udg-mcp-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn generate_then_oracle_two_kgon_costs_eight() {
    let dir = tmpdir("kgon");
    let gen = run(&["generate", "--spec", "two-kgon", "--k", "7", "-o", "kgon.json"], &dir);
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    let solve = run(
        &["solve", "-i", "kgon.json", "--algo", "oracle", "-o", "report.json"],
        &dir,
    );
    assert!(solve.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["weighted_cost"], serde_json::json!([8, 1]));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tmpdir("determinism");
    run(
        &["generate", "--spec", "random-udg", "--n", "20", "--box-side", "3", "--seed", "4", "-o", "i.json"],
        &dir,
    );
    for algo in ["mincp1", "mincp2", "distributed"] {
        let args = [
            "solve", "-i", "i.json", "--algo", algo, "--epsilon", "1/2", "--seed", "9",
            "--max-cell", "32", "-o", "a.json",
        ];
        let first = run(&args, &dir);
        assert!(first.status.success(), "{algo}: {}", String::from_utf8_lossy(&first.stderr));
        let a = std::fs::read(dir.join("a.json")).unwrap();
        let mut args2 = args;
        args2[args.len() - 1] = "b.json";
        run(&args2, &dir);
        let b = std::fs::read(dir.join("b.json")).unwrap();
        assert_eq!(a, b, "{algo} reports differ between runs");
    }
}

#[test]
fn certificate_flow_uses_exit_code_three_and_replays() {
    let dir = tmpdir("cert");
    std::fs::write(
        dir.join("star.json"),
        serde_json::json!({
            "schema": "udg-mcp-instance/1",
            "n": 7,
            "edges": (1..=6).map(|v| serde_json::json!([0, v, 1, 1])).collect::<Vec<_>>(),
        })
        .to_string(),
    )
    .unwrap();
    let solve = run(
        &[
            "solve", "-i", "star.json", "--algo", "mincp2", "--epsilon", "1",
            "--certificate-out", "cert.json", "-o", "report.json",
        ],
        &dir,
    );
    assert_eq!(solve.status.code(), Some(3), "{}", String::from_utf8_lossy(&solve.stderr));
    let verify = run(&["verify-certificate", "-c", "cert.json"], &dir);
    assert!(verify.status.success(), "{}", String::from_utf8_lossy(&verify.stdout));
    let out: serde_json::Value =
        serde_json::from_slice(&verify.stdout).expect("json on stdout");
    assert_eq!(out["reproduced"], serde_json::json!(true));
}

#[test]
fn budget_exceeded_uses_exit_code_four() {
    let dir = tmpdir("budget");
    run(
        &["generate", "--spec", "random-udg", "--n", "30", "--box-side", "2", "--seed", "1", "-o", "i.json"],
        &dir,
    );
    let solve = run(
        &["solve", "-i", "i.json", "--algo", "mincp1", "--epsilon", "1/2", "--max-cell", "5"],
        &dir,
    );
    assert_eq!(solve.status.code(), Some(4));
}

#[test]
fn usage_errors_use_exit_code_one() {
    let dir = tmpdir("usage");
    let out = run(&["solve", "--algo", "nonsense"], &dir);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["no-such-command"], &dir);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_detects_bad_partitions() {
    let dir = tmpdir("verify");
    run(
        &["generate", "--spec", "matching-cliques", "--t", "3", "-o", "i.json"],
        &dir,
    );
    // {0..2} and {3..5} are the two cliques; mixing them is invalid.
    std::fs::write(
        dir.join("bad.json"),
        serde_json::json!({
            "schema": "udg-mcp-partition/1",
            "blocks": [[0, 1, 3], [2, 4, 5]],
        })
        .to_string(),
    )
    .unwrap();
    std::fs::write(
        dir.join("good.json"),
        serde_json::json!({
            "schema": "udg-mcp-partition/1",
            "blocks": [[0, 1, 2], [3, 4, 5]],
        })
        .to_string(),
    )
    .unwrap();
    assert!(run(&["verify", "-i", "i.json", "-p", "good.json"], &dir).status.success());
    let bad = run(&["verify", "-i", "i.json", "-p", "bad.json"], &dir);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn compare_emits_csv_with_ratios() {
    let dir = tmpdir("compare");
    run(
        &["generate", "--spec", "random-udg", "--n", "14", "--box-side", "2", "--seed", "3", "-o", "i.json"],
        &dir,
    );
    let out = run(
        &["compare", "-i", "i.json", "--algos", "mincp2,oracle", "--epsilon", "1", "--seed", "1"],
        &dir,
    );
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "instance,algorithm,outcome,size,weighted_cost,oracle,ratio");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].contains("mincp2,partition"));
}

#[test]
fn plot_writes_svg() {
    let dir = tmpdir("plot");
    run(
        &["generate", "--spec", "random-udg", "--n", "10", "--box-side", "2", "--seed", "2", "-o", "i.json"],
        &dir,
    );
    run(
        &[
            "solve", "-i", "i.json", "--algo", "mincp2", "--epsilon", "1",
            "--partition-out", "p.json", "-o", "r.json",
        ],
        &dir,
    );
    let out = run(
        &["plot", "-i", "i.json", "-p", "p.json", "--grid-k", "2", "-o", "plot.svg"],
        &dir,
    );
    assert!(out.status.success());
    let svg = std::fs::read_to_string(dir.join("plot.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("<circle"));
}
