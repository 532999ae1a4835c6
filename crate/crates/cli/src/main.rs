//! Command-line harness: generate instances, run solvers, verify partitions
//! and certificates, compare algorithms, render SVG plots.
//!
//! Exit codes: 0 = partition produced (or verification passed), 3 = non-UDG
//! certificate produced, 4 = an explicit budget was exceeded, 1 = usage,
//! parse or verification failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use sha2::{Digest, Sha256};

use udg_mcp::cert::{replay_certificate, Certificate, Solved};
use udg_mcp::gen::{gen_instance, with_random_weights, GenSpec};
use udg_mcp::geo::{half_grid_cover, mincp1, GeoBudget};
use udg_mcp::graph::UdgGraph;
use udg_mcp::hull::convex_hull;
use udg_mcp::io::{
    certificate_from_json, certificate_to_json, instance_from_json, instance_to_json,
    partition_from_json, partition_to_json, Instance,
};
use udg_mcp::localsim::distr_mcp;
use udg_mcp::metric::{mincp2, MetricBudget};
use udg_mcp::oracle::{exact_cover, exact_cover_weighted, OracleBudget};
use udg_mcp::partition::{validate_partition, CliquePartition};
use udg_mcp::rational::{to_pair, Rational};
use udg_mcp::weighted::{mincp_weighted, WeightedBudget};
use udg_mcp::Error;

#[derive(Parser)]
#[command(name = "udg-mcp", version, about = "Clique partition toolkit for unit disk graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance file.
    Generate(GenerateArgs),
    /// Run a solver on an instance and emit a JSON report.
    Solve(SolveArgs),
    /// Validate a partition against an instance.
    Verify(VerifyArgs),
    /// Replay a certificate on its own subgraph.
    VerifyCertificate(VerifyCertArgs),
    /// Batch-run algorithms over instances and emit a CSV ratio table.
    Compare(CompareArgs),
    /// Render an instance (and optional partition) as SVG.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpecKind {
    RandomUdg,
    TwoKgon,
    MatchingCliques,
    SingleCell,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    spec: SpecKind,
    /// Point count (random_udg, single_cell).
    #[arg(long)]
    n: Option<usize>,
    /// Box side (random_udg).
    #[arg(long, default_value_t = 3)]
    box_side: u32,
    /// Gon size (two_kgon).
    #[arg(long)]
    k: Option<usize>,
    /// Clique size (matching_cliques).
    #[arg(long)]
    t: Option<usize>,
    /// Cell size (single_cell).
    #[arg(long)]
    cell: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Attach seeded random integer weights in 1..=MAX.
    #[arg(long)]
    weights_max: Option<u32>,
    /// Output path (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Mincp1,
    Mincp2,
    Weighted,
    Distributed,
    Oracle,
    GridBaseline,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Mincp1 => "mincp1",
            Algo::Mincp2 => "mincp2",
            Algo::Weighted => "weighted",
            Algo::Distributed => "distributed",
            Algo::Oracle => "oracle",
            Algo::GridBaseline => "grid-baseline",
        }
    }
}

#[derive(Args)]
struct BudgetArgs {
    /// Exact-solve cap on points per grid cell (mincp1).
    #[arg(long, default_value_t = 25)]
    max_cell: usize,
    /// Cap on ball sizes in the metric solver.
    #[arg(long, default_value_t = 60)]
    max_ball: usize,
    /// Cap on separator-line configurations per ball.
    #[arg(long, default_value_t = 20_000_000)]
    max_configs: u64,
    /// Cap on ball sizes in the weighted solver.
    #[arg(long, default_value_t = 24)]
    weighted_max_ball: usize,
    /// Cap on residual states in the weighted search.
    #[arg(long, default_value_t = 2_000_000)]
    max_states: u64,
    /// Largest instance the oracle comparison may attempt.
    #[arg(long, default_value_t = 25)]
    oracle_max: usize,
}

impl BudgetArgs {
    fn geo(&self) -> GeoBudget {
        GeoBudget { max_cell: self.max_cell, ..Default::default() }
    }
    fn metric(&self) -> MetricBudget {
        MetricBudget {
            max_ball: self.max_ball,
            max_configs: self.max_configs,
            ..Default::default()
        }
    }
    fn weighted(&self) -> WeightedBudget {
        WeightedBudget { max_ball: self.weighted_max_ball, max_states: self.max_states }
    }
    fn oracle(&self) -> OracleBudget {
        OracleBudget::with_vertices(self.oracle_max)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(short = 'i', long)]
    instance: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    /// Epsilon as `num/den` or an integer.
    #[arg(long, default_value = "1")]
    epsilon: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report output path (stdout when omitted).
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Write the partition (if any) to this path.
    #[arg(long)]
    partition_out: Option<PathBuf>,
    /// Write the certificate (if any) to this path.
    #[arg(long)]
    certificate_out: Option<PathBuf>,
    /// Dump a per-round trace (JSONL) for the distributed solver.
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Skip the oracle comparison even on small instances.
    #[arg(long, default_value_t = false)]
    no_oracle: bool,
    #[command(flatten)]
    budgets: BudgetArgs,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(short = 'i', long)]
    instance: PathBuf,
    #[arg(short = 'p', long)]
    partition: PathBuf,
}

#[derive(Args)]
struct VerifyCertArgs {
    #[arg(short = 'c', long)]
    certificate: PathBuf,
    #[command(flatten)]
    budgets: BudgetArgs,
}

#[derive(Args)]
struct CompareArgs {
    /// Instance files.
    #[arg(short = 'i', long, num_args = 1.., required = true)]
    instances: Vec<PathBuf>,
    /// Comma-separated algorithms.
    #[arg(long, value_delimiter = ',', required = true)]
    algos: Vec<Algo>,
    #[arg(long, default_value = "1")]
    epsilon: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    budgets: BudgetArgs,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(short = 'i', long)]
    instance: PathBuf,
    #[arg(short = 'p', long)]
    partition: Option<PathBuf>,
    /// Draw grid lines of this cell size.
    #[arg(long)]
    grid_k: Option<u32>,
    #[arg(short, long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct ParamsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ell: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<[i128; 2]>,
}

#[derive(Serialize)]
struct OracleReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<[i128; 2]>,
    /// Achieved over optimal, as an exact rational pair.
    ratio: [i128; 2],
}

#[derive(Serialize)]
struct RoundStatsReport {
    total_rounds: usize,
    mis_rounds: usize,
    mis_iterations: usize,
    gc_build_rounds: usize,
    coloring_rounds: usize,
    assignment_rounds: usize,
    ball_growing_rounds: usize,
    messages: u64,
    leader_count: usize,
    colors_used: usize,
    delta_gc: usize,
}

#[derive(Serialize)]
struct TrialReport {
    shift: [[i128; 2]; 2],
    cells: usize,
    size: usize,
}

#[derive(Serialize)]
struct Report {
    schema: &'static str,
    instance_digest: String,
    algorithm: &'static str,
    epsilon: [i128; 2],
    seed: u64,
    params: ParamsReport,
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weighted_cost: Option<[i128; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partition: Option<Vec<Vec<usize>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate_reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    round_stats: Option<RoundStatsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    trials: Option<Vec<TrialReport>>,
}

fn parse_epsilon(s: &str) -> Result<Rational, String> {
    let parts: Vec<&str> = s.split('/').collect();
    let parse_int = |x: &str| x.trim().parse::<i64>().map_err(|e| format!("bad epsilon: {e}"));
    match parts.as_slice() {
        [a] => Ok(Rational::from_integer(parse_int(a)?.into())),
        [a, b] => {
            let d = parse_int(b)?;
            if d <= 0 {
                return Err("epsilon denominator must be positive".into());
            }
            Ok(Rational::new(parse_int(a)?.into(), d.into()))
        }
        _ => Err(format!("cannot parse epsilon {s:?}")),
    }
}

fn read_instance(path: &Path) -> Result<(Instance, String), String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let digest = hex::encode(Sha256::digest(text.as_bytes()));
    let inst = instance_from_json(&text).map_err(|e| e.to_string())?;
    Ok((inst, digest))
}

fn write_or_print(path: &Option<PathBuf>, content: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn pair_of(r: &Rational) -> Result<[i128; 2], String> {
    to_pair(r).map(|(n, d)| [n, d]).map_err(|e| e.to_string())
}

enum RunError {
    Budget(String),
    Other(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetExceeded { .. } | Error::CellTooLarge { .. } => {
                RunError::Budget(e.to_string())
            }
            other => RunError::Other(other.to_string()),
        }
    }
}

fn oracle_report(
    g: &UdgGraph,
    achieved_size: usize,
    achieved_weight: Option<&Rational>,
    budget: &OracleBudget,
) -> Option<OracleReport> {
    if g.n() > budget.max_vertices {
        return None;
    }
    if let Some(w) = achieved_weight {
        let (_, opt) = exact_cover_weighted(g, budget).ok()?;
        let ratio = w / &opt;
        Some(OracleReport { size: None, weight: pair_of(&opt).ok(), ratio: pair_of(&ratio).ok()? })
    } else {
        let opt = exact_cover(g, budget).ok()?.size();
        let ratio = Rational::new((achieved_size as i64).into(), (opt as i64).into());
        Some(OracleReport { size: Some(opt), weight: None, ratio: pair_of(&ratio).ok()? })
    }
}

/// Run one algorithm; returns the report plus the partition or certificate.
#[allow(clippy::too_many_arguments)]
fn run_algo(
    algo: Algo,
    inst: &Instance,
    digest: &str,
    eps: &Rational,
    seed: u64,
    budgets: &BudgetArgs,
    want_oracle: bool,
    with_trace: bool,
) -> Result<(Report, Option<CliquePartition>, Option<Certificate>, Option<String>), RunError> {
    let g = inst.to_graph().map_err(RunError::from)?;
    let mut params = ParamsReport { k: None, beta: None, ell: None, gamma: None };
    let mut round_stats = None;
    let mut trials = None;
    let mut trace_text = None;

    let solved: Solved = match algo {
        Algo::Mincp1 => {
            let ps = inst
                .points()
                .ok_or_else(|| RunError::Other("mincp1 requires a coordinate instance".into()))?;
            let out = mincp1(ps, eps, seed, &budgets.geo()).map_err(RunError::from)?;
            params.k = Some(out.k);
            trials = Some(
                out.trials
                    .iter()
                    .map(|t| {
                        Ok(TrialReport {
                            shift: [pair_of(&t.shift.0)?, pair_of(&t.shift.1)?],
                            cells: t.cells,
                            size: t.size,
                        })
                    })
                    .collect::<Result<Vec<_>, String>>()
                    .map_err(RunError::Other)?,
            );
            Solved::Partition(out.partition)
        }
        Algo::Mincp2 => {
            let out = mincp2(&g, eps, &budgets.metric()).map_err(RunError::from)?;
            params.beta = Some(out.params.beta);
            params.ell = Some(out.params.ell);
            out.solved
        }
        Algo::Weighted => {
            let out = mincp_weighted(&g, eps, &budgets.weighted()).map_err(RunError::from)?;
            params.beta = Some(out.params.beta);
            params.ell = Some(out.params.ell);
            params.gamma = Some(pair_of(&out.params.gamma).map_err(RunError::Other)?);
            out.solved
        }
        Algo::Distributed => {
            let out =
                distr_mcp(&g, eps, seed, &budgets.metric(), with_trace).map_err(RunError::from)?;
            params.beta = Some(out.params.beta);
            params.ell = Some(out.params.ell);
            round_stats = Some(RoundStatsReport {
                total_rounds: out.stats.total_rounds,
                mis_rounds: out.stats.mis_rounds,
                mis_iterations: out.stats.mis_iterations,
                gc_build_rounds: out.stats.gc_build_rounds,
                coloring_rounds: out.stats.coloring_rounds,
                assignment_rounds: out.stats.assignment_rounds,
                ball_growing_rounds: out.stats.ball_growing_rounds,
                messages: out.stats.messages,
                leader_count: out.stats.leader_count,
                colors_used: out.stats.colors_used,
                delta_gc: out.stats.delta_gc,
            });
            if let Some(trace) = &out.trace {
                let mut lines = String::new();
                for t in trace {
                    lines.push_str(&format!(
                        "{{\"round\":{},\"node\":{},\"state_hash\":\"{:016x}\",\"messages\":{}}}\n",
                        t.round, t.node, t.state_hash, t.messages_sent
                    ));
                }
                trace_text = Some(lines);
            }
            out.solved
        }
        Algo::Oracle => {
            let budget = budgets.oracle();
            if g.weights.is_some() {
                let (p, _) = exact_cover_weighted(&g, &budget).map_err(RunError::from)?;
                Solved::Partition(p)
            } else {
                Solved::Partition(exact_cover(&g, &budget).map_err(RunError::from)?)
            }
        }
        Algo::GridBaseline => {
            let ps = inst.points().ok_or_else(|| {
                RunError::Other("grid-baseline requires a coordinate instance".into())
            })?;
            Solved::Partition(half_grid_cover(ps))
        }
    };

    match solved {
        Solved::Partition(p) => {
            let report = validate_partition(&g, &p);
            if !report.valid {
                return Err(RunError::Other(format!(
                    "internal error: produced an invalid partition ({} violations)",
                    report.violations.len()
                )));
            }
            let weighted_cost = report
                .weighted_cost
                .as_ref()
                .map(pair_of)
                .transpose()
                .map_err(RunError::Other)?;
            let oracle = if want_oracle && algo != Algo::Oracle {
                oracle_report(&g, p.size(), report.weighted_cost.as_ref(), &budgets.oracle())
            } else {
                None
            };
            let rep = Report {
                schema: "udg-mcp-report/1",
                instance_digest: digest.to_string(),
                algorithm: algo.name(),
                epsilon: pair_of(eps).map_err(RunError::Other)?,
                seed,
                params,
                outcome: "partition",
                size: Some(p.size()),
                weighted_cost,
                partition: Some(p.blocks.clone()),
                certificate_reason: None,
                oracle,
                round_stats,
                trials,
            };
            Ok((rep, Some(p), None, trace_text))
        }
        Solved::NotUdg(c) => {
            let rep = Report {
                schema: "udg-mcp-report/1",
                instance_digest: digest.to_string(),
                algorithm: algo.name(),
                epsilon: pair_of(eps).map_err(RunError::Other)?,
                seed,
                params,
                outcome: "certificate",
                size: None,
                weighted_cost: None,
                partition: None,
                certificate_reason: Some(c.reason.to_string()),
                oracle: None,
                round_stats,
                trials,
            };
            Ok((rep, None, Some(*c), trace_text))
        }
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<ExitCode, String> {
    let spec = match args.spec {
        SpecKind::RandomUdg => GenSpec::RandomUdg {
            n: args.n.ok_or("random_udg requires --n")?,
            box_side: args.box_side,
        },
        SpecKind::TwoKgon => GenSpec::TwoKgon { k: args.k.ok_or("two_kgon requires --k")? },
        SpecKind::MatchingCliques => {
            GenSpec::MatchingCliques { t: args.t.ok_or("matching_cliques requires --t")? }
        }
        SpecKind::SingleCell => GenSpec::SingleCell {
            n: args.n.ok_or("single_cell requires --n")?,
            k: args.cell.ok_or("single_cell requires --cell")?,
        },
    };
    let mut ps = gen_instance(&spec, args.seed).map_err(|e| e.to_string())?;
    if let Some(max) = args.weights_max {
        ps = with_random_weights(&ps, args.seed, max);
    }
    let json = instance_to_json(&Instance::Points(ps)).map_err(|e| e.to_string())?;
    write_or_print(&args.out, &json)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: &SolveArgs) -> Result<ExitCode, String> {
    let eps = parse_epsilon(&args.epsilon)?;
    let (inst, digest) = read_instance(&args.instance)?;
    let started = Instant::now();
    let result = run_algo(
        args.algo,
        &inst,
        &digest,
        &eps,
        args.seed,
        &args.budgets,
        !args.no_oracle,
        args.trace_out.is_some(),
    );
    let elapsed = started.elapsed();
    match result {
        Ok((report, partition, certificate, trace)) => {
            let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
            write_or_print(&args.out, &json)?;
            if let (Some(p), Some(path)) = (&partition, &args.partition_out) {
                fs::write(path, partition_to_json(p)).map_err(|e| e.to_string())?;
            }
            if let Some(c) = &certificate {
                let text = certificate_to_json(c).map_err(|e| e.to_string())?;
                match &args.certificate_out {
                    Some(path) => fs::write(path, text).map_err(|e| e.to_string())?,
                    None => eprintln!("{text}"),
                }
            }
            if let (Some(t), Some(path)) = (&trace, &args.trace_out) {
                fs::write(path, t).map_err(|e| e.to_string())?;
            }
            eprintln!(
                "solved {} with {} in {:.3}s",
                args.instance.display(),
                report.algorithm,
                elapsed.as_secs_f64()
            );
            Ok(if certificate.is_some() { ExitCode::from(3) } else { ExitCode::SUCCESS })
        }
        Err(RunError::Budget(msg)) => {
            eprintln!("budget exceeded: {msg}");
            Ok(ExitCode::from(4))
        }
        Err(RunError::Other(msg)) => Err(msg),
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, String> {
    let (inst, _) = read_instance(&args.instance)?;
    let g = inst.to_graph().map_err(|e| e.to_string())?;
    let text = fs::read_to_string(&args.partition).map_err(|e| e.to_string())?;
    let p = partition_from_json(&text).map_err(|e| e.to_string())?;
    let report = validate_partition(&g, &p);
    let mut out = BTreeMap::new();
    out.insert("valid", serde_json::json!(report.valid));
    out.insert("size", serde_json::json!(report.size));
    out.insert(
        "violations",
        serde_json::json!(report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>()),
    );
    if let Some(w) = &report.weighted_cost {
        let pair = pair_of(w)?;
        out.insert("weighted_cost", serde_json::json!(pair));
    }
    println!("{}", serde_json::to_string_pretty(&out).map_err(|e| e.to_string())?);
    Ok(if report.valid { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_verify_certificate(args: &VerifyCertArgs) -> Result<ExitCode, String> {
    let text = fs::read_to_string(&args.certificate).map_err(|e| e.to_string())?;
    let cert = certificate_from_json(&text).map_err(|e| e.to_string())?;
    let report = replay_certificate(&cert, &args.budgets.metric(), &args.budgets.weighted())
        .map_err(|e| e.to_string())?;
    println!(
        "{}",
        serde_json::json!({
            "reason": cert.reason.to_string(),
            "reproduced": report.reproduced,
            "detail": report.detail,
        })
    );
    Ok(if report.reproduced { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn cmd_compare(args: &CompareArgs) -> Result<ExitCode, String> {
    let eps = parse_epsilon(&args.epsilon)?;
    let mut csv = String::from("instance,algorithm,outcome,size,weighted_cost,oracle,ratio\n");
    for path in &args.instances {
        let (inst, digest) = read_instance(path)?;
        for &algo in &args.algos {
            let row =
                match run_algo(algo, &inst, &digest, &eps, args.seed, &args.budgets, true, false) {
                    Ok((report, _, cert, _)) => {
                        let ratio = report
                            .oracle
                            .as_ref()
                            .map(|o| format!("{}/{}", o.ratio[0], o.ratio[1]))
                            .unwrap_or_default();
                        let opt = report
                            .oracle
                            .as_ref()
                            .map(|o| match (o.size, o.weight) {
                                (Some(s), _) => s.to_string(),
                                (None, Some([n, d])) => format!("{n}/{d}"),
                                _ => String::new(),
                            })
                            .unwrap_or_default();
                        format!(
                            "{},{},{},{},{},{},{}\n",
                            path.display(),
                            algo.name(),
                            if cert.is_some() { "certificate" } else { "partition" },
                            report.size.map(|s| s.to_string()).unwrap_or_default(),
                            report
                                .weighted_cost
                                .map(|[n, d]| format!("{n}/{d}"))
                                .unwrap_or_default(),
                            opt,
                            ratio
                        )
                    }
                    Err(RunError::Budget(_)) => {
                        format!("{},{},budget-exceeded,,,,\n", path.display(), algo.name())
                    }
                    Err(RunError::Other(msg)) => {
                        eprintln!("{}: {}: {msg}", path.display(), algo.name());
                        format!("{},{},error,,,,\n", path.display(), algo.name())
                    }
                };
            csv.push_str(&row);
        }
    }
    write_or_print(&args.out, csv.trim_end())?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_plot(args: &PlotArgs) -> Result<ExitCode, String> {
    let (inst, _) = read_instance(&args.instance)?;
    let ps = inst.points().ok_or("plot requires a coordinate instance")?.clone();
    let partition = match &args.partition {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| e.to_string())?;
            Some(partition_from_json(&text).map_err(|e| e.to_string())?)
        }
        None => None,
    };
    let svg = render_svg(&ps.points, partition.as_ref(), args.grid_k);
    fs::write(&args.out, svg).map_err(|e| e.to_string())?;
    eprintln!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn render_svg(
    points: &[(Rational, Rational)],
    partition: Option<&CliquePartition>,
    grid_k: Option<u32>,
) -> String {
    use num_traits::ToPrimitive;
    let coords: Vec<(f64, f64)> = points
        .iter()
        .map(|(x, y)| (x.to_f64().unwrap_or(0.0), y.to_f64().unwrap_or(0.0)))
        .collect();
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (0.0f64, 0.0f64, 1.0f64, 1.0f64);
    for &(x, y) in &coords {
        min_x = min_x.min(x - 0.5);
        min_y = min_y.min(y - 0.5);
        max_x = max_x.max(x + 0.5);
        max_y = max_y.max(y + 0.5);
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1e-9);
    let size = 800.0;
    let scale = size / span;
    let tx = |x: f64| (x - min_x) * scale;
    let ty = |y: f64| size - (y - min_y) * scale;
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size}\" height=\"{size}\" \
         viewBox=\"0 0 {size} {size}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    if let Some(k) = grid_k {
        let k = k as f64;
        let mut gx = (min_x / k).ceil() * k;
        while gx <= max_x {
            svg.push_str(&format!(
                "<line x1=\"{:.2}\" y1=\"0\" x2=\"{:.2}\" y2=\"{size}\" stroke=\"#ccc\"/>\n",
                tx(gx),
                tx(gx)
            ));
            gx += k;
        }
        let mut gy = (min_y / k).ceil() * k;
        while gy <= max_y {
            svg.push_str(&format!(
                "<line x1=\"0\" y1=\"{:.2}\" x2=\"{size}\" y2=\"{:.2}\" stroke=\"#ccc\"/>\n",
                ty(gy),
                ty(gy)
            ));
            gy += k;
        }
    }
    let palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2"];
    if let Some(p) = partition {
        for (i, block) in p.blocks.iter().enumerate() {
            let color = palette[i % palette.len()];
            let pts: Vec<(Rational, Rational)> = block.iter().map(|&v| points[v].clone()).collect();
            let hull = convex_hull(&pts);
            if hull.len() >= 2 {
                let path: Vec<String> = hull
                    .iter()
                    .map(|(x, y)| {
                        format!(
                            "{:.2},{:.2}",
                            tx(x.to_f64().unwrap_or(0.0)),
                            ty(y.to_f64().unwrap_or(0.0))
                        )
                    })
                    .collect();
                svg.push_str(&format!(
                    "<polygon points=\"{}\" fill=\"{color}\" fill-opacity=\"0.15\" \
                     stroke=\"{color}\"/>\n",
                    path.join(" ")
                ));
            }
            for &v in block {
                let (x, y) = coords[v];
                svg.push_str(&format!(
                    "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{color}\"/>\n",
                    tx(x),
                    ty(y)
                ));
            }
        }
    } else {
        for &(x, y) in &coords {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"#333\"/>\n",
                tx(x),
                ty(y)
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests are not usage errors.
            use clap::error::ErrorKind;
            let kind = e.kind();
            let _ = e.print();
            return if matches!(kind, ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            };
        }
    };
    let result = match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::VerifyCertificate(a) => cmd_verify_certificate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Plot(a) => cmd_plot(a),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
