//! Synthetic loan-delinquency instances, the greedy month-by-month
//! baseline, and the benchmark harness.
//!
//! Delinquency levels are `1..=n`; level `n` is default and absorbing. From
//! level `k < n` the base transition is
//!
//! ```text
//! p_up(k)   = c · ln(1 + k) / ln(1 + n),   c = 0.9 · ln(1 + n) / ln(n)
//! p_stay(k) = 0.1                          (k > 1; level 1 keeps the residual)
//! improve   = 1 − p_up − p_stay            spread uniformly over 1..k−1
//! ```
//!
//! The worsening mass goes to `k + 1`, except for a fraction
//! `default_jump` that goes straight to default.

mod bench;
mod greedy;

pub use crate::solve::Method;
pub use bench::{run_benchmark, write_csv, BenchmarkConfig, BenchmarkRecord, CSV_HEADER};
pub use greedy::{greedy_baseline, GreedyResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ActionPolytope, CmdpInstance, Curvature, LayeredStateSpace, RewardSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LoanReward {
    /// `−‖a − b‖₁`.
    L1,
    /// `+‖a − b‖₂²`.
    QuadraticConvex,
    /// Linear cost of moving mass away from the worsening states:
    /// `Σ_{j>k} (a_j − b_j)`, zero at the base action.
    Affine,
}

impl LoanReward {
    pub fn label(self) -> &'static str {
        match self {
            LoanReward::L1 => "l1",
            LoanReward::QuadraticConvex => "quad",
            LoanReward::Affine => "affine",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoanConfig {
    /// Number of delinquency levels, the last being default.
    pub n_states: usize,
    /// Number of layers.
    pub horizon: usize,
    pub epsilon: f64,
    /// Bound on the probability of default at the horizon.
    pub q_default: f64,
    pub reward: LoanReward,
    /// Share of the worsening mass that jumps directly to default.
    pub default_jump: f64,
    /// Keep transitions with zero base probability at zero.
    pub support_only: bool,
}

impl Default for LoanConfig {
    fn default() -> Self {
        Self {
            n_states: 8,
            horizon: 6,
            epsilon: 0.4,
            q_default: 0.04,
            reward: LoanReward::L1,
            default_jump: 0.03,
            support_only: true,
        }
    }
}

impl LoanConfig {
    pub fn with_states(n_states: usize) -> Self {
        Self {
            n_states,
            ..Self::default()
        }
    }

    fn check(&self) -> Result<()> {
        if self.n_states < 3 {
            return Err(Error::InvalidParameter(format!(
                "loan instances need at least 3 states, got {}",
                self.n_states
            )));
        }
        if self.horizon < 2 {
            return Err(Error::InvalidParameter(format!(
                "horizon must be at least 2, got {}",
                self.horizon
            )));
        }
        if !(self.epsilon.is_finite() && self.epsilon >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "invalid epsilon {}",
                self.epsilon
            )));
        }
        if !(self.q_default.is_finite() && self.q_default >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "invalid bound {}",
                self.q_default
            )));
        }
        if !(0.0..=1.0).contains(&self.default_jump) {
            return Err(Error::InvalidParameter(format!(
                "default_jump must lie in [0, 1], got {}",
                self.default_jump
            )));
        }
        Ok(())
    }
}

/// Probability of worsening from level `k` (1-based) out of `n`.
pub fn p_up(k: usize, n: usize) -> f64 {
    let c = 0.9 * ((1 + n) as f64).ln() / (n as f64).ln();
    c * ((1 + k) as f64).ln() / ((1 + n) as f64).ln()
}

/// Base transition row of level `k` (1-based).
pub fn base_row(k: usize, n: usize, default_jump: f64) -> Result<Vec<f64>> {
    let mut row = vec![0.0; n];
    if k == n {
        row[n - 1] = 1.0;
        return Ok(row);
    }
    let up = p_up(k, n);
    let stay = if k == 1 { 1.0 - up } else { 0.1 };
    let improve = 1.0 - up - stay;
    if up < 0.0 || stay < 0.0 || improve < -1e-12 {
        return Err(Error::InvalidParameter(format!(
            "level {k}: transition masses up={up}, stay={stay}, improve={improve} are invalid"
        )));
    }
    row[k - 1] = stay;
    for j in 0..k - 1 {
        row[j] = improve.max(0.0) / (k - 1) as f64;
    }
    if k + 1 == n {
        row[n - 1] += up;
    } else {
        row[k] += up * (1.0 - default_jump);
        row[n - 1] += up * default_jump;
    }
    Ok(row)
}

pub fn state_name(t: usize, k: usize) -> String {
    format!("t{t}_l{k}")
}

/// Builds the loan instance described by `cfg`. Generation is deterministic.
pub fn generate_loan_instance(cfg: &LoanConfig) -> Result<CmdpInstance> {
    cfg.check()?;
    let n = cfg.n_states;
    let layers = (0..cfg.horizon)
        .map(|t| (1..=n).map(|k| state_name(t, k)).collect())
        .collect();
    let space = LayeredStateSpace::new(layers)?;
    let mut alpha = vec![0.0; n];
    alpha[0] = 1.0;
    let rows: Vec<Vec<f64>> = (1..=n)
        .map(|k| base_row(k, n, cfg.default_jump))
        .collect::<Result<_>>()?;
    let mut inst = CmdpInstance::new(space, alpha);
    for t in 0..cfg.horizon - 1 {
        for k in 1..=n {
            let b = &rows[k - 1];
            let polytope = if cfg.support_only {
                ActionPolytope::box_on_support(b, cfg.epsilon)
            } else {
                ActionPolytope::box_around(b, cfg.epsilon)
            }
            .map_err(|e| Error::InvalidParameter(format!("level {k}: {e}")))?;
            let reward = match cfg.reward {
                LoanReward::L1 => RewardSpec::WeightedL1 {
                    center: b.clone(),
                    weights: vec![1.0; n],
                },
                LoanReward::QuadraticConvex => RewardSpec::quadratic(b.clone(), Curvature::Convex),
                LoanReward::Affine => {
                    let e: Vec<f64> = (1..=n).map(|j| if j > k { 1.0 } else { 0.0 }).collect();
                    let f = -b[k.min(n)..].iter().sum::<f64>();
                    RewardSpec::Affine { e, f }
                }
            };
            let s = t * n + (k - 1);
            inst.set_decision(s, polytope, reward);
        }
    }
    let default_terminal = (cfg.horizon - 1) * n + (n - 1);
    inst.add_constraint(vec![default_terminal], cfg.q_default);
    inst.ensure_valid()?;
    Ok(inst)
}
