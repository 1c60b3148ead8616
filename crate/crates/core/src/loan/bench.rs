use std::io::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::{generate_loan_instance, LoanConfig, LoanReward};
use crate::error::{Error, Result};
use crate::solve::{solve_with_method, Method, MethodSolution, SolveOptions};

#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub states: Vec<usize>,
    pub methods: Vec<Method>,
    pub template: LoanConfig,
    /// Bounds to sweep; the template bound is used when empty.
    pub q_values: Vec<f64>,
    pub timeout: Duration,
    /// Restrict every method to states some policy can reach.
    pub prune_unreachable: bool,
    /// Run cells concurrently. Timings are then not comparable.
    pub parallel: bool,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        Self {
            states: vec![5, 10, 15, 20, 25, 30],
            methods: vec![Method::Extreme, Method::Convex],
            template: LoanConfig::default(),
            q_values: Vec::new(),
            timeout: Duration::from_secs(300),
            prune_unreachable: false,
            parallel: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRecord {
    /// Method label; `extreme-pwl` marks the extreme method on the L1 reward,
    /// run over the cells where that reward is affine.
    pub method: String,
    pub n_states: usize,
    pub horizon: usize,
    pub epsilon: f64,
    pub q: f64,
    pub reward: LoanReward,
    pub objective: Option<f64>,
    pub wall_ms: f64,
    /// `optimal`, `infeasible`, `timeout`, `unsupported` or `error`.
    pub status: String,
    pub feasible: bool,
    pub vertices_total: Option<usize>,
    pub message: Option<String>,
}

pub const CSV_HEADER: [&str; 9] = [
    "method",
    "n_states",
    "horizon",
    "epsilon",
    "q",
    "objective",
    "wall_ms",
    "status",
    "vertices_total",
];

fn run_method(
    method: Method,
    cfg: &LoanConfig,
    timeout: Duration,
    prune: bool,
) -> Result<MethodSolution> {
    let inst = generate_loan_instance(cfg)?;
    let opts = SolveOptions {
        timeout: Some(timeout),
        prune_unreachable: prune,
        quadratic_cuts: None,
    };
    solve_with_method(&inst, method, &opts)
}

fn run_cell(method: Method, cfg: &LoanConfig, timeout: Duration, prune: bool) -> BenchmarkRecord {
    let start = Instant::now();
    let result = run_method(method, cfg, timeout, prune);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut label = method.name().to_string();
    let (objective, vertices, status, message) = match result {
        Ok(o) => {
            label = o.label;
            (Some(o.objective), o.vertices_total, "optimal", None)
        }
        Err(e) => {
            let status = match &e {
                Error::Infeasible(_) | Error::GreedyInfeasible { .. } => "infeasible",
                Error::Timeout => "timeout",
                Error::UnsupportedReward(_) => "unsupported",
                _ => "error",
            };
            (None, None, status, Some(e.to_string()))
        }
    };
    BenchmarkRecord {
        method: label,
        n_states: cfg.n_states,
        horizon: cfg.horizon,
        epsilon: cfg.epsilon,
        q: cfg.q_default,
        reward: cfg.reward,
        objective,
        wall_ms,
        status: status.to_string(),
        feasible: objective.is_some(),
        vertices_total: vertices,
        message,
    }
}

/// One record per (states, bound, method) cell, in that nesting order.
/// Failures, including timeouts, become records rather than errors.
pub fn run_benchmark(cfg: &BenchmarkConfig) -> Vec<BenchmarkRecord> {
    let qs = if cfg.q_values.is_empty() {
        vec![cfg.template.q_default]
    } else {
        cfg.q_values.clone()
    };
    let mut cells = Vec::new();
    for &n in &cfg.states {
        for &q in &qs {
            for &m in &cfg.methods {
                let loan = LoanConfig {
                    n_states: n,
                    q_default: q,
                    ..cfg.template.clone()
                };
                cells.push((m, loan));
            }
        }
    }
    let run =
        |(m, loan): &(Method, LoanConfig)| run_cell(*m, loan, cfg.timeout, cfg.prune_unreachable);
    if cfg.parallel {
        cells.par_iter().map(run).collect()
    } else {
        cells.iter().map(run).collect()
    }
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes the records with the fixed column set in [`CSV_HEADER`].
pub fn write_csv<W: Write>(records: &[BenchmarkRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.method.clone(),
            r.n_states.to_string(),
            r.horizon.to_string(),
            r.epsilon.to_string(),
            r.q.to_string(),
            fmt_opt(r.objective),
            format!("{:.3}", r.wall_ms),
            r.status.clone(),
            fmt_opt(r.vertices_total),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
        .map_err(|e| Error::Internal(format!("csv: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_fixed_columns() {
        let cfg = BenchmarkConfig {
            states: vec![4],
            methods: vec![Method::Convex, Method::Envelope],
            ..BenchmarkConfig::default()
        };
        let recs = run_benchmark(&cfg);
        assert_eq!(recs[0].status, "optimal");
        assert_eq!(recs[1].status, "unsupported");
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "method,n_states,horizon,epsilon,q,objective,wall_ms,status,vertices_total"
        );
        assert!(lines.next().unwrap().starts_with("convex,4,6,0.4,0.04,"));
    }
}
