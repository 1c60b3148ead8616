//! Concave-envelope method for convex rewards.
//!
//! Over a polytope, the concave envelope of a convex reward is the piecewise
//! linear function generated by the reward values at the vertices:
//!
//! ```text
//! r^e(s, a) = max { Σ λ_i r(s, a_i) : Σ λ_i a_i = a, Σ λ_i = 1, λ ≥ 0 }
//! ```
//!
//! Its value is attained in expectation by playing vertex `a_i` with
//! probability `λ_i`, so the envelope CMDP is solved over per-vertex
//! occupancies `w(s, i)` and read back as a randomized policy.

use crate::error::{Error, Result};
use crate::evaluator::evaluate_exact;
use crate::lp::{solve_lp, solve_lp_with, LpProblem, LpStatus, SimplexOptions};
use crate::model::{CmdpInstance, Curvature, Mixture, Policy, RewardSpec};
use crate::occupancy::{build_occupancy_lp_with, extract_policy, status_error, OccupancyOptions};
use crate::vertex::{
    build_finite_cmdp, enumerate_all, solve_finite_with, VertexKind, VertexOptions,
};

/// Generators of the envelope in every state.
#[derive(Debug, Clone)]
pub struct EnvelopeModel {
    /// `points[s][i]` is generator `a_i` of state `s`.
    pub points: Vec<Vec<Vec<f64>>>,
    /// `values[s][i] = r(s, a_i)`.
    pub values: Vec<Vec<f64>>,
    /// Reward the generators were taken from, when built from an instance.
    pub sources: Vec<Option<RewardSpec>>,
}

impl EnvelopeModel {
    /// Vertices of every action set with their rewards.
    pub fn from_instance(instance: &CmdpInstance, opts: &VertexOptions) -> Result<Self> {
        let vs = enumerate_all(instance, VertexKind::Extreme, false, opts)?;
        let n = instance.space.num_states();
        let mut values = vec![Vec::new(); n];
        let mut sources = vec![None; n];
        for s in instance.space.decision_states() {
            let r = instance.reward(s);
            values[s] = vs.vertices[s].iter().map(|v| r.eval(v)).collect();
            sources[s] = Some(r.clone());
        }
        Ok(Self {
            points: vs.vertices,
            values,
            sources,
        })
    }

    /// A model with explicit generators, one entry per state.
    pub fn from_generators(generators: Vec<(Vec<Vec<f64>>, Vec<f64>)>) -> Result<Self> {
        let mut points = Vec::with_capacity(generators.len());
        let mut values = Vec::with_capacity(generators.len());
        for (s, (p, v)) in generators.into_iter().enumerate() {
            if p.len() != v.len() {
                return Err(Error::Dimension(format!(
                    "state {s}: {} generators but {} values",
                    p.len(),
                    v.len()
                )));
            }
            points.push(p);
            values.push(v);
        }
        let sources = vec![None; points.len()];
        Ok(Self {
            points,
            values,
            sources,
        })
    }

    /// Evaluates `f` at every generator.
    pub fn from_function(points: Vec<Vec<f64>>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = points.iter().map(|p| f(p)).collect();
        Self {
            points: vec![points],
            values: vec![values],
            sources: vec![None],
        }
    }
}

/// Envelope value at `a` and the maximizing weights over the generators.
pub fn envelope_value(model: &EnvelopeModel, state: usize, a: &[f64]) -> Result<(f64, Mixture)> {
    let points = model
        .points
        .get(state)
        .ok_or_else(|| Error::InvalidParameter(format!("no state {state} in the model")))?;
    if points.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "state {state} has no generators"
        )));
    }
    if let Some(p) = points.iter().find(|p| p.len() != a.len()) {
        return Err(Error::Dimension(format!(
            "action has length {} but generators have length {}",
            a.len(),
            p.len()
        )));
    }
    let mut lp = LpProblem::new();
    let lam: Vec<usize> = model.values[state]
        .iter()
        .enumerate()
        .map(|(i, &v)| lp.add_var(format!("lambda{i}"), v))
        .collect();
    lp.add_eq("sum", lam.iter().map(|&j| (j, 1.0)).collect(), 1.0);
    for k in 0..a.len() {
        let row = points
            .iter()
            .zip(&lam)
            .filter(|(p, _)| p[k] != 0.0)
            .map(|(p, &j)| (j, p[k]))
            .collect();
        lp.add_eq(format!("coord{k}"), row, a[k]);
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => {}
        LpStatus::Infeasible => return Err(Error::OutsideHull),
        _ => return Err(status_error(sol)),
    }
    let weights = points
        .iter()
        .zip(&sol.x)
        .filter(|(_, &w)| w > 1e-12)
        .map(|(p, &w)| (w, p.clone()))
        .collect();
    Ok((sol.objective, weights))
}

#[derive(Debug, Clone, Default)]
pub struct EnvelopeOptions {
    /// Use only the base action in states no policy can reach.
    pub prune_unreachable: bool,
    pub vertex: VertexOptions,
    pub simplex: SimplexOptions,
}

#[derive(Debug, Clone)]
pub struct EnvelopeSolution {
    pub objective: f64,
    /// `π(s, a_i) = w(s, i) / d(s)`.
    pub policy: Policy,
    pub d: Vec<f64>,
    pub vertices_total: usize,
    pub iterations: usize,
}

fn check_envelope_rewards(instance: &CmdpInstance) -> Result<()> {
    for s in instance.space.decision_states() {
        match instance.reward(s) {
            RewardSpec::Affine { .. }
            | RewardSpec::Quadratic {
                curvature: Curvature::Convex,
                ..
            } => {}
            r => {
                return Err(Error::UnsupportedReward(format!(
                    "state {} has a {} reward; vertex generators are exact only for convex \
                     rewards, use the convex method",
                    instance.space.name(s),
                    r.kind()
                )))
            }
        }
    }
    Ok(())
}

/// Optimal randomized policy for an instance with convex (or affine) rewards.
pub fn solve_with_envelope(instance: &CmdpInstance) -> Result<EnvelopeSolution> {
    solve_with_envelope_opts(instance, &EnvelopeOptions::default())
}

pub fn solve_with_envelope_opts(
    instance: &CmdpInstance,
    opts: &EnvelopeOptions,
) -> Result<EnvelopeSolution> {
    instance.ensure_valid()?;
    check_envelope_rewards(instance)?;
    let vs = enumerate_all(
        instance,
        VertexKind::Extreme,
        opts.prune_unreachable,
        &opts.vertex,
    )?;
    let fc = build_finite_cmdp(instance, &vs);
    let sol = solve_finite_with(instance, &fc, &opts.simplex)?;
    Ok(EnvelopeSolution {
        objective: sol.objective,
        policy: sol.policy,
        d: sol.d,
        vertices_total: vs.total(),
        iterations: sol.iterations,
    })
}

#[derive(Debug, Clone)]
pub struct NaiveLinearResult {
    /// Optimal value of the linearized problem.
    pub surrogate_objective: f64,
    /// Return of the resulting policy under the true reward.
    pub objective: f64,
    pub policy: Policy,
}

/// First-order expansion of `r` at `b` as an affine reward.
pub fn tangent_at(r: &RewardSpec, b: &[f64]) -> Result<RewardSpec> {
    let grad: Vec<f64> = match r {
        RewardSpec::Affine { .. } => return Ok(r.clone()),
        RewardSpec::Quadratic {
            center,
            weights,
            curvature,
        } => {
            let sign = match curvature {
                Curvature::Concave => -1.0,
                Curvature::Convex => 1.0,
            };
            b.iter()
                .zip(center)
                .zip(weights)
                .map(|((x, c), w)| sign * 2.0 * w * (x - c))
                .collect()
        }
        RewardSpec::WeightedL1 { .. } => {
            return Err(Error::UnsupportedReward(
                "the linear baseline needs a differentiable reward (affine or quadratic)".into(),
            ))
        }
    };
    let f = r.eval(b) - grad.iter().zip(b).map(|(g, x)| g * x).sum::<f64>();
    Ok(RewardSpec::Affine { e: grad, f })
}

/// Replaces every reward by its tangent at the base action, solves the
/// resulting linear problem, and scores the policy under the true reward.
///
/// Ties in the linearized problem are broken toward the base actions by a
/// second stage minimizing `Σ_s ‖u(s,·) − d(s)·b(s)‖₁` over its optimal face.
pub fn naive_linear_baseline(instance: &CmdpInstance) -> Result<NaiveLinearResult> {
    naive_linear_baseline_with(instance, &OccupancyOptions::default())
}

pub fn naive_linear_baseline_with(
    instance: &CmdpInstance,
    opts: &OccupancyOptions,
) -> Result<NaiveLinearResult> {
    instance.ensure_valid()?;
    let mut tangent_err = None;
    let linear = instance.map_rewards(|s, r| {
        tangent_at(r, &instance.polytope(s).base).unwrap_or_else(|e| {
            tangent_err.get_or_insert(e);
            r.clone()
        })
    });
    if let Some(e) = tangent_err {
        return Err(e);
    }
    let stage1 = build_occupancy_lp_with(&linear, opts)?;
    let sol1 = solve_lp_with(&stage1.problem, &opts.simplex)?;
    if sol1.status != LpStatus::Optimal {
        return Err(status_error(sol1));
    }
    let best = sol1.objective;

    let closest = instance.map_rewards(|s, _| {
        let b = instance.polytope(s).base.clone();
        let n = b.len();
        RewardSpec::WeightedL1 {
            center: b,
            weights: vec![1.0; n],
        }
    });
    let mut stage2 = build_occupancy_lp_with(&closest, opts)?;
    // u and d columns come first and in the same order in both programs
    let keep: Vec<(usize, f64)> = stage1
        .problem
        .objective
        .iter()
        .enumerate()
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, &c)| (j, c))
        .collect();
    let slack = 1e-9 * (1.0 + best.abs());
    if !keep.is_empty() {
        stage2.problem.add_ge("stage1", keep, best - slack);
    }
    let sol2 = solve_lp_with(&stage2.problem, &opts.simplex)?;
    if sol2.status != LpStatus::Optimal {
        return Err(status_error(sol2));
    }
    let read = |col: &Option<usize>| col.map_or(0.0, |j| sol2.x[j].max(0.0));
    let occ = crate::occupancy::OccupancySolution {
        u: stage2
            .u_index
            .iter()
            .map(|row| row.iter().map(read).collect())
            .collect(),
        d: stage2.d_index.iter().map(read).collect(),
        objective: best,
        iterations: sol1.iterations + sol2.iterations,
    };
    let policy = extract_policy(&occ, instance);
    let report = evaluate_exact(instance, &policy)?;
    Ok(NaiveLinearResult {
        surrogate_objective: best,
        objective: report.ret,
        policy,
    })
}
