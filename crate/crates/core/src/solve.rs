//! One entry point over every solution method.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::envelope::{naive_linear_baseline_with, solve_with_envelope_opts, EnvelopeOptions};
use crate::error::{Error, Result};
use crate::loan::greedy_baseline;
use crate::lp::SimplexOptions;
use crate::model::{CmdpInstance, Curvature, Policy, RewardSpec};
use crate::occupancy::{extract_policy, solve_occupancy_with, OccupancyOptions};
use crate::vertex::{
    build_finite_cmdp, enumerate_all, solve_finite_with, VertexKind, VertexOptions,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Extreme,
    Convex,
    Envelope,
    Greedy,
    NaiveLinear,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Extreme,
        Method::Convex,
        Method::Envelope,
        Method::Greedy,
        Method::NaiveLinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Extreme => "extreme",
            Method::Convex => "convex",
            Method::Envelope => "envelope",
            Method::Greedy => "greedy",
            Method::NaiveLinear => "naive-linear",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown method {s:?}; expected one of convex, extreme, envelope, greedy, \
                 naive-linear"
                ))
            })
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub timeout: Option<Duration>,
    /// Skip states no policy can reach.
    pub prune_unreachable: bool,
    /// Tangent cuts per coordinate for concave quadratic rewards (convex method).
    pub quadratic_cuts: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct MethodSolution {
    /// Method name; `extreme-pwl` when the extreme method had to split
    /// action sets at the kinks of L1 rewards.
    pub label: String,
    /// Solver objective. For the baselines this is the true return of the
    /// returned policy.
    pub objective: f64,
    pub policy: Policy,
    pub vertices_total: Option<usize>,
}

fn extreme_kind(instance: &CmdpInstance) -> Result<VertexKind> {
    let mut kind = VertexKind::Extreme;
    for s in instance.space.decision_states() {
        match instance.reward(s) {
            RewardSpec::Affine { .. } => {}
            RewardSpec::WeightedL1 { .. } => kind = VertexKind::Breakpoints,
            RewardSpec::Quadratic { curvature, .. } => {
                let hint = match curvature {
                    Curvature::Convex => "envelope",
                    Curvature::Concave => "convex",
                };
                return Err(Error::UnsupportedReward(format!(
                    "state {} has a quadratic reward, which vertex policies cannot represent \
                     exactly; use the {hint} method",
                    instance.space.name(s)
                )));
            }
        }
    }
    Ok(kind)
}

pub fn solve_with_method(
    instance: &CmdpInstance,
    method: Method,
    opts: &SolveOptions,
) -> Result<MethodSolution> {
    let deadline = opts.timeout.map(|t| Instant::now() + t);
    let simplex = SimplexOptions {
        deadline,
        ..SimplexOptions::default()
    };
    let occ = OccupancyOptions {
        prune_unreachable: opts.prune_unreachable,
        quadratic_cuts: opts.quadratic_cuts,
        simplex: simplex.clone(),
        ..OccupancyOptions::default()
    };
    let vertex = VertexOptions {
        deadline,
        ..VertexOptions::default()
    };
    let plain = |objective, policy| MethodSolution {
        label: method.name().to_string(),
        objective,
        policy,
        vertices_total: None,
    };
    match method {
        Method::Convex => {
            let sol = solve_occupancy_with(instance, &occ)?;
            Ok(plain(sol.objective, extract_policy(&sol, instance)))
        }
        Method::Extreme => {
            let kind = extreme_kind(instance)?;
            let vs = enumerate_all(instance, kind, opts.prune_unreachable, &vertex)?;
            let fc = build_finite_cmdp(instance, &vs);
            let sol = solve_finite_with(instance, &fc, &simplex)?;
            Ok(MethodSolution {
                label: match kind {
                    VertexKind::Extreme => "extreme",
                    VertexKind::Breakpoints => "extreme-pwl",
                }
                .to_string(),
                objective: sol.objective,
                policy: sol.policy,
                vertices_total: Some(vs.total()),
            })
        }
        Method::Envelope => {
            let env = EnvelopeOptions {
                prune_unreachable: opts.prune_unreachable,
                vertex,
                simplex,
            };
            let sol = solve_with_envelope_opts(instance, &env)?;
            Ok(MethodSolution {
                label: method.name().to_string(),
                objective: sol.objective,
                policy: sol.policy,
                vertices_total: Some(sol.vertices_total),
            })
        }
        Method::Greedy => {
            let g = greedy_baseline(instance, &occ)?;
            Ok(plain(g.objective, g.policy))
        }
        Method::NaiveLinear => {
            let n = naive_linear_baseline_with(instance, &occ)?;
            Ok(plain(n.objective, n.policy))
        }
    }
}
