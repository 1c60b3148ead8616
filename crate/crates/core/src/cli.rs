//! The `cmdp` command line.
//!
//! Exit codes: 0 success, 1 error, 2 infeasible, 3 timeout.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluator::{evaluate_exact, simulate, EvaluationReport, SimulationReport};
use crate::io::{read_policy, read_problem, write_problem, write_text, PolicyFile};
use crate::loan::{
    generate_loan_instance, run_benchmark, write_csv, BenchmarkConfig, LoanConfig, LoanReward,
};
use crate::lp::export_lp;
use crate::manifest::{config_hash, RunManifest};
use crate::model::CmdpInstance;
use crate::occupancy::{build_occupancy_lp_with, OccupancyOptions};
use crate::solve::{solve_with_method, Method, SolveOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cmdp",
    version,
    about = "Finite-horizon CMDPs with probability modulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve a problem file.
    Solve(SolveArgs),
    /// Generate a problem file.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Evaluate a policy exactly and, optionally, by simulation.
    Evaluate(EvaluateArgs),
    /// Time methods on generated loan instances.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Convex,
    Extreme,
    Envelope,
    Greedy,
    NaiveLinear,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Convex => Method::Convex,
            MethodArg::Extreme => Method::Extreme,
            MethodArg::Envelope => Method::Envelope,
            MethodArg::Greedy => Method::Greedy,
            MethodArg::NaiveLinear => Method::NaiveLinear,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RewardArg {
    L1,
    Quad,
    Affine,
}

impl From<RewardArg> for LoanReward {
    fn from(r: RewardArg) -> Self {
        match r {
            RewardArg::L1 => LoanReward::L1,
            RewardArg::Quad => LoanReward::QuadraticConvex,
            RewardArg::Affine => LoanReward::Affine,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub problem: PathBuf,
    #[arg(long, value_enum, default_value = "convex")]
    pub method: MethodArg,
    #[arg(long)]
    pub out: PathBuf,
    /// Time limit in seconds.
    #[arg(long, env = "CMDP_TIMEOUT_SECS")]
    pub timeout: Option<f64>,
    /// Skip states no policy can reach.
    #[arg(long)]
    pub prune_unreachable: bool,
    /// Approximate concave quadratic rewards with this many tangent cuts.
    #[arg(long)]
    pub quadratic_cuts: Option<usize>,
    /// Also write the occupancy LP in MPS format.
    #[arg(long)]
    pub export_mps: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GenerateKind {
    /// Synthetic loan-delinquency instance.
    Loan(LoanArgs),
}

#[derive(Debug, Args)]
pub struct LoanArgs {
    #[arg(long, default_value_t = 8)]
    pub states: usize,
    #[arg(long, default_value_t = 6)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0.4)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.04)]
    pub qbound: f64,
    #[arg(long, value_enum, default_value = "l1")]
    pub reward: RewardArg,
    /// Share of the worsening mass that goes straight to default.
    #[arg(long, default_value_t = 0.03)]
    pub default_jump: f64,
    /// Let every transition be modulated, including those with zero base mass.
    #[arg(long)]
    pub full_box: bool,
    #[arg(long)]
    pub out: PathBuf,
}

impl LoanArgs {
    fn config(&self) -> LoanConfig {
        LoanConfig {
            n_states: self.states,
            horizon: self.horizon,
            epsilon: self.epsilon,
            q_default: self.qbound,
            reward: self.reward.into(),
            default_jump: self.default_jump,
            support_only: !self.full_box,
        }
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    pub problem: PathBuf,
    pub policy: PathBuf,
    /// Number of simulated trajectories.
    #[arg(long)]
    pub simulate: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write per-state visitation probabilities as CSV.
    #[arg(long)]
    pub d_csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    /// State counts: `a..b`, `a..b:step` or a comma list.
    #[arg(long, default_value = "5..30:5")]
    pub states: String,
    /// Comma-separated methods.
    #[arg(long, default_value = "extreme,convex")]
    pub methods: String,
    /// Bound sweep `lo:hi:step`.
    #[arg(long)]
    pub q_sweep: Option<String>,
    #[arg(long, value_enum, default_value = "affine")]
    pub reward: RewardArg,
    #[arg(long, default_value_t = 6)]
    pub horizon: usize,
    #[arg(long, default_value_t = 0.4)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.04)]
    pub qbound: f64,
    #[arg(long, default_value_t = 0.03)]
    pub default_jump: f64,
    #[arg(long)]
    pub full_box: bool,
    /// Per-cell time limit in seconds.
    #[arg(long, env = "CMDP_TIMEOUT_SECS", default_value_t = 300.0)]
    pub timeout: f64,
    #[arg(long)]
    pub prune_unreachable: bool,
    /// Run cells concurrently; timings are then not comparable.
    #[arg(long)]
    pub parallel: bool,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `a..b`, `a..b:step` or `a,b,c`.
pub fn parse_states(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidParameter(format!("cannot parse state range {s:?}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    if let Some((lo, rest)) = s.split_once("..") {
        let (hi, step) = match rest.split_once(':') {
            Some((h, st)) => (num(h)?, num(st)?),
            None => (num(rest)?, 1),
        };
        let lo = num(lo)?;
        if step == 0 || lo > hi {
            return Err(bad());
        }
        Ok((lo..=hi).step_by(step).collect())
    } else {
        s.split(',').map(num).collect()
    }
}

/// Parses `lo:hi:step` into the inclusive grid `lo, lo+step, …`.
pub fn parse_sweep(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("cannot parse sweep {s:?}; expected lo:hi:step"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [lo, hi, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0) || lo > hi || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|i| lo + step * i as f64).collect())
}

fn timeout(secs: Option<f64>) -> Result<Option<Duration>> {
    secs.map(|s| {
        Duration::try_from_secs_f64(s)
            .map_err(|_| Error::InvalidParameter(format!("invalid timeout {s}")))
    })
    .transpose()
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct SolutionFile<'a> {
    method: String,
    status: &'static str,
    objective: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    policy: Option<PolicyFile>,
    states: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    evaluation: Option<EvaluationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vertices_total: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<String>,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Infeasible(_) | Error::GreedyInfeasible { .. } => EXIT_INFEASIBLE,
        Error::Timeout => EXIT_TIMEOUT,
        _ => EXIT_ERROR,
    }
}

struct Ctx {
    args: Vec<String>,
    start: Instant,
}

impl Ctx {
    fn manifest(
        &self,
        command: &str,
        inputs: &[Vec<u8>],
        seed: Option<u64>,
        outputs: Vec<PathBuf>,
        notes: Vec<String>,
    ) -> RunManifest {
        RunManifest {
            command: command.to_string(),
            args: self.args.clone(),
            config_hash: config_hash(&self.args, inputs),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            wall_ms: self.start.elapsed().as_secs_f64() * 1e3,
            outputs,
            notes,
        }
    }
}

fn cmd_solve(ctx: &Ctx, a: &SolveArgs) -> Result<i32> {
    let bytes = read_bytes(&a.problem)?;
    let inst = read_problem(&a.problem)?;
    let method: Method = a.method.into();
    let opts = SolveOptions {
        timeout: timeout(a.timeout)?,
        prune_unreachable: a.prune_unreachable,
        quadratic_cuts: a.quadratic_cuts,
    };
    let mut outputs = vec![a.out.clone()];
    if let Some(mps) = &a.export_mps {
        let occ = OccupancyOptions {
            prune_unreachable: a.prune_unreachable,
            quadratic_cuts: a.quadratic_cuts,
            ..OccupancyOptions::default()
        };
        export_lp(&build_occupancy_lp_with(&inst, &occ)?.problem, mps)?;
        outputs.push(mps.clone());
    }
    let names = inst.space.names();
    let (file, code) = match solve_with_method(&inst, method, &opts) {
        Ok(sol) => {
            let report = evaluate_exact(&inst, &sol.policy)?;
            eprintln!("{}: objective {:.10}", sol.label, sol.objective);
            let file = SolutionFile {
                method: sol.label,
                status: "optimal",
                objective: Some(sol.objective),
                policy: Some(PolicyFile::from_policy(&inst, &sol.policy)),
                states: names,
                evaluation: Some(report),
                vertices_total: sol.vertices_total,
                message: None,
            };
            (file, EXIT_OK)
        }
        Err(e) => {
            let code = exit_code(&e);
            if code == EXIT_ERROR {
                return Err(e);
            }
            eprintln!("{e}");
            let status = if code == EXIT_INFEASIBLE {
                "infeasible"
            } else {
                "timeout"
            };
            let file = SolutionFile {
                method: method.name().to_string(),
                status,
                objective: None,
                policy: None,
                states: names,
                evaluation: None,
                vertices_total: None,
                message: Some(e.to_string()),
            };
            (file, code)
        }
    };
    write_text(&a.out, &serde_json::to_string_pretty(&file)?)?;
    ctx.manifest("solve", &[bytes], None, outputs, Vec::new())
        .write_next_to(&a.out)?;
    Ok(code)
}

fn cmd_generate(ctx: &Ctx, kind: &GenerateKind) -> Result<i32> {
    let GenerateKind::Loan(a) = kind;
    let cfg = a.config();
    let inst = generate_loan_instance(&cfg)?;
    write_problem(&inst, &a.out)?;
    let notes = vec![format!("loan config: {}", serde_json::to_string(&cfg)?)];
    ctx.manifest("generate loan", &[], None, vec![a.out.clone()], notes)
        .write_next_to(&a.out)?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct EvaluationFile<'a> {
    states: &'a [String],
    exact: EvaluationReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    simulated: Option<SimulationReport>,
}

fn write_d_csv(inst: &CmdpInstance, d: &[f64], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::Internal(format!("{}: {e}", path.display())))?;
    let err = |e: csv::Error| Error::Internal(format!("{}: {e}", path.display()));
    w.write_record(["state", "layer", "d"]).map_err(err)?;
    for (s, v) in d.iter().enumerate() {
        w.write_record([
            inst.space.name(s).to_string(),
            inst.space.layer_of(s).to_string(),
            v.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn cmd_evaluate(ctx: &Ctx, a: &EvaluateArgs) -> Result<i32> {
    let inputs = vec![read_bytes(&a.problem)?, read_bytes(&a.policy)?];
    let inst = read_problem(&a.problem)?;
    let policy = read_policy(&inst, &a.policy)?;
    let exact = evaluate_exact(&inst, &policy)?;
    let simulated = a
        .simulate
        .map(|n| simulate(&inst, &policy, n, a.seed))
        .transpose()?;
    let mut outputs = vec![a.out.clone()];
    if let Some(path) = &a.d_csv {
        write_d_csv(&inst, &exact.d, path)?;
        outputs.push(path.clone());
    }
    eprintln!("return {:.10}", exact.ret);
    let file = EvaluationFile {
        states: inst.space.names(),
        exact,
        simulated,
    };
    write_text(&a.out, &serde_json::to_string_pretty(&file)?)?;
    let seed = a.simulate.map(|_| a.seed);
    ctx.manifest("evaluate", &inputs, seed, outputs, Vec::new())
        .write_next_to(&a.out)?;
    Ok(EXIT_OK)
}

fn cmd_benchmark(ctx: &Ctx, a: &BenchmarkArgs) -> Result<i32> {
    let methods = a
        .methods
        .split(',')
        .map(|m| Method::parse(m.trim()))
        .collect::<Result<Vec<_>>>()?;
    let cfg = BenchmarkConfig {
        states: parse_states(&a.states)?,
        methods,
        template: LoanConfig {
            n_states: 3,
            horizon: a.horizon,
            epsilon: a.epsilon,
            q_default: a.qbound,
            reward: a.reward.into(),
            default_jump: a.default_jump,
            support_only: !a.full_box,
        },
        q_values: a
            .q_sweep
            .as_deref()
            .map(parse_sweep)
            .transpose()?
            .unwrap_or_default(),
        timeout: timeout(Some(a.timeout))?.unwrap_or(Duration::from_secs(300)),
        prune_unreachable: a.prune_unreachable,
        parallel: a.parallel,
    };
    let records = run_benchmark(&cfg);
    let file = std::fs::File::create(&a.out).map_err(|e| Error::io(&a.out, e))?;
    write_csv(&records, file)?;
    for r in &records {
        eprintln!(
            "{:<12} n={:<4} q={:<8} {:<11} {:>10.1} ms  {}",
            r.method,
            r.n_states,
            r.q,
            r.status,
            r.wall_ms,
            r.objective.map(|o| format!("{o:.8}")).unwrap_or_default()
        );
    }
    let mut notes = Vec::new();
    if a.parallel {
        notes.push("cells ran concurrently; wall times are not comparable".to_string());
    }
    ctx.manifest("benchmark", &[], None, vec![a.out.clone()], notes)
        .write_next_to(&a.out)?;
    Ok(EXIT_OK)
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let ctx = Ctx {
        args: args
            .iter()
            .skip(1)
            .map(|a| a.to_string_lossy().into_owned())
            .collect(),
        start: Instant::now(),
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(&ctx, a),
        Command::Generate { kind } => cmd_generate(&ctx, kind),
        Command::Evaluate(a) => cmd_evaluate(&ctx, a),
        Command::Benchmark(a) => cmd_benchmark(&ctx, a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
