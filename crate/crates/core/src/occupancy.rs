//! Occupancy-measure program over `u(s, s')` and `d(s)`.
//!
//! ```text
//! maximize    Σ_s r̄(s, u(s,·))
//! subject to  d(s₁) = α(s₁)                      first layer
//!             d(s)  = Σ_{s'} u(s, s')            decision states
//!             d(s') = Σ_{s}  u(s, s')            later layers
//!             Σ_{s ∈ Q_i} d(s) ≤ q_i             quality constraints
//!             H_j u(s,·) − h_j d(s) ≤ 0          action sets
//!             u, d ≥ 0
//! ```
//!
//! The homogenized action-set rows `H_j u − h_j 1ᵀu ≤ 0` are written with
//! `d(s)` in place of `1ᵀu(s,·)`, which the outflow rows make equal and which
//! keeps every row at most `nnz(H_j) + 1` long.

use crate::error::{Error, Result};
use crate::lp::{solve_lp_with, LpProblem, LpSolution, LpStatus, RowRef, SimplexOptions};
use crate::model::{CmdpInstance, Curvature, Policy, RewardSpec};

#[derive(Debug, Clone)]
pub struct OccupancyOptions {
    /// Drop action-set rows implied by `0 ≤ u ≤ d` and turn `u_k ≤ 0` rows
    /// into variable bounds.
    pub presolve: bool,
    /// Leave out states no policy can reach, and transitions no action can take.
    pub prune_unreachable: bool,
    /// Approximate concave quadratic rewards by this many tangent cuts per
    /// coordinate. The LP value then over-estimates the true return.
    pub quadratic_cuts: Option<usize>,
    pub simplex: SimplexOptions,
}

impl Default for OccupancyOptions {
    fn default() -> Self {
        Self {
            presolve: true,
            prune_unreachable: false,
            quadratic_cuts: None,
            simplex: SimplexOptions::default(),
        }
    }
}

/// Default number of tangent cuts for concave quadratic rewards.
pub const DEFAULT_QUADRATIC_CUTS: usize = 16;

/// The assembled program with the column layout needed to read it back.
#[derive(Debug, Clone)]
pub struct OccupancyLp {
    pub problem: LpProblem,
    /// `u_index[s][k]` is the column of `u(s, successors(s)[k])`.
    pub u_index: Vec<Vec<Option<usize>>>,
    pub d_index: Vec<Option<usize>>,
    /// One row per quality constraint, in instance order.
    pub constraint_rows: Vec<RowRef>,
    pub auxiliaries: usize,
}

impl OccupancyLp {
    pub fn num_u(&self) -> usize {
        self.u_index.iter().flatten().flatten().count()
    }

    pub fn num_d(&self) -> usize {
        self.d_index.iter().flatten().count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OccupancySolution {
    /// `u[s][k]` for the `k`-th successor of `s`; empty for terminal states.
    pub u: Vec<Vec<f64>>,
    pub d: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

pub fn build_occupancy_lp(instance: &CmdpInstance) -> Result<OccupancyLp> {
    build_occupancy_lp_with(instance, &OccupancyOptions::default())
}

fn check_rewards(instance: &CmdpInstance, opts: &OccupancyOptions) -> Result<()> {
    for s in instance.space.decision_states() {
        if let RewardSpec::Quadratic { curvature, .. } = instance.reward(s) {
            match curvature {
                Curvature::Convex => {
                    return Err(Error::UnsupportedReward(format!(
                        "state {} has a convex quadratic reward; use the envelope method",
                        instance.space.name(s)
                    )))
                }
                Curvature::Concave if opts.quadratic_cuts.is_none() => {
                    return Err(Error::UnsupportedReward(format!(
                        "state {} has a concave quadratic reward, which is not LP-representable; \
                         enable the tangent-cut approximation",
                        instance.space.name(s)
                    )))
                }
                Curvature::Concave => {}
            }
        }
    }
    Ok(())
}

pub fn build_occupancy_lp_with(
    instance: &CmdpInstance,
    opts: &OccupancyOptions,
) -> Result<OccupancyLp> {
    instance.ensure_valid()?;
    check_rewards(instance, opts)?;
    let space = &instance.space;
    let n_states = space.num_states();
    let reachable = if opts.prune_unreachable {
        instance.reachable()
    } else {
        vec![true; n_states]
    };

    let mut lp = LpProblem::new();
    let mut u_index: Vec<Vec<Option<usize>>> = vec![Vec::new(); n_states];
    for s in space.decision_states() {
        let succ = space.successors(s);
        let open = if opts.prune_unreachable {
            instance.possible_successors(s)
        } else {
            vec![true; succ.len()]
        };
        u_index[s] = succ
            .iter()
            .zip(&open)
            .map(|(&t, &o)| {
                (reachable[s] && o)
                    .then(|| lp.add_var(format!("u[{}>{}]", space.name(s), space.name(t)), 0.0))
            })
            .collect();
    }
    let d_index: Vec<Option<usize>> = (0..n_states)
        .map(|s| reachable[s].then(|| lp.add_var(format!("d[{}]", space.name(s)), 0.0)))
        .collect();

    for (i, &s) in space.layer(0).iter().enumerate() {
        if let Some(d) = d_index[s] {
            lp.add_eq(
                format!("init[{}]", space.name(s)),
                vec![(d, 1.0)],
                instance.alpha[i],
            );
        }
    }
    for s in space.decision_states() {
        let Some(d) = d_index[s] else { continue };
        let mut row = vec![(d, 1.0)];
        row.extend(u_index[s].iter().flatten().map(|&j| (j, -1.0)));
        lp.add_eq(format!("out[{}]", space.name(s)), row, 0.0);
    }
    for t in 1..space.horizon() {
        for &s2 in space.layer(t) {
            let Some(d) = d_index[s2] else { continue };
            let k = space.index_in_layer(s2);
            let mut row = vec![(d, 1.0)];
            for &s1 in space.layer(t - 1) {
                if let Some(j) = u_index[s1][k] {
                    row.push((j, -1.0));
                }
            }
            lp.add_eq(format!("in[{}]", space.name(s2)), row, 0.0);
        }
    }
    let constraint_rows = instance
        .constraints
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let row = c
                .states
                .iter()
                .filter_map(|&s| d_index[s])
                .map(|d| (d, 1.0))
                .collect();
            lp.add_le(format!("quality[{i}]"), row, c.bound)
        })
        .collect();

    for s in space.decision_states() {
        let Some(d) = d_index[s] else { continue };
        let p = instance.polytope(s);
        for (j, (h_row, &h)) in p.h_rows.iter().zip(&p.h_rhs).enumerate() {
            let nz: Vec<(usize, f64)> = h_row
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(k, &c)| (k, c))
                .collect();
            if opts.presolve && nz.len() <= 1 {
                match nz.first() {
                    None if h >= 0.0 => continue,
                    Some(&(_, c)) if c < 0.0 && h >= 0.0 => continue,
                    Some(&(_, c)) if c > 0.0 && h / c >= 1.0 => continue,
                    Some(&(k, c)) if c > 0.0 && h == 0.0 => {
                        if let Some(col) = u_index[s][k] {
                            lp.set_bounds(col, 0.0, Some(0.0));
                        }
                        continue;
                    }
                    _ => {}
                }
            }
            let mut row: Vec<(usize, f64)> = nz
                .iter()
                .filter_map(|&(k, c)| u_index[s][k].map(|col| (col, c)))
                .collect();
            if h != 0.0 {
                row.push((d, -h));
            }
            if row.is_empty() {
                continue;
            }
            lp.add_le(format!("act[{}:{j}]", space.name(s)), row, 0.0);
        }
    }

    let mut auxiliaries = 0;
    for s in space.decision_states() {
        let Some(d) = d_index[s] else { continue };
        let name = space.name(s);
        match instance.reward(s) {
            RewardSpec::Affine { e, f } => {
                for (k, col) in u_index[s].iter().enumerate() {
                    if let Some(col) = col {
                        lp.objective[*col] += e[k];
                    }
                }
                lp.objective[d] += f;
            }
            RewardSpec::WeightedL1 { center, weights } => {
                for (k, col) in u_index[s].iter().enumerate() {
                    if weights[k] == 0.0 {
                        continue;
                    }
                    let z = lp.add_var(format!("z[{name}:{k}]"), -weights[k]);
                    auxiliaries += 1;
                    let mut plus = vec![(z, -1.0), (d, -center[k])];
                    let mut minus = vec![(z, -1.0), (d, center[k])];
                    if let Some(col) = col {
                        plus.push((*col, 1.0));
                        minus.push((*col, -1.0));
                    }
                    lp.add_le(format!("dev+[{name}:{k}]"), plus, 0.0);
                    lp.add_le(format!("dev-[{name}:{k}]"), minus, 0.0);
                }
            }
            RewardSpec::Quadratic {
                center, weights, ..
            } => {
                // concave only; convex was rejected above
                let cuts = opts.quadratic_cuts.unwrap_or(DEFAULT_QUADRATIC_CUTS).max(2);
                for (k, col) in u_index[s].iter().enumerate() {
                    let w = weights[k];
                    if w == 0.0 {
                        continue;
                    }
                    let t = lp.add_var(format!("t[{name}:{k}]"), 1.0);
                    lp.set_bounds(t, -w, None);
                    auxiliaries += 1;
                    let (lo, hi) = (-center[k], 1.0 - center[k]);
                    for i in 0..cuts {
                        // tangent of the perspective of −x² at deviation x0
                        let x0 = lo + (hi - lo) * i as f64 / (cuts - 1) as f64;
                        let mut row = vec![(t, 1.0), (d, -w * (x0 * x0 + 2.0 * x0 * center[k]))];
                        if let Some(col) = col {
                            row.push((*col, 2.0 * w * x0));
                        }
                        lp.add_le(format!("cut[{name}:{k}:{i}]"), row, 0.0);
                    }
                }
            }
        }
    }

    Ok(OccupancyLp {
        problem: lp,
        u_index,
        d_index,
        constraint_rows,
        auxiliaries,
    })
}

/// Maps an LP status other than optimal to the matching error.
pub(crate) fn status_error(sol: LpSolution) -> Error {
    match sol.status {
        LpStatus::Infeasible => match sol.farkas {
            Some(cert) => Error::Infeasible(Box::new(cert)),
            None => Error::Internal("infeasible without certificate".into()),
        },
        LpStatus::Unbounded => Error::Unbounded(
            "the occupancy program is unbounded, which valid instances cannot produce".into(),
        ),
        LpStatus::IterationLimit => Error::IterationLimit(sol.iterations),
        LpStatus::TimeLimit => Error::Timeout,
        LpStatus::Optimal => Error::Internal("optimal status reported as failure".into()),
    }
}

pub fn solve_occupancy(instance: &CmdpInstance) -> Result<OccupancySolution> {
    solve_occupancy_with(instance, &OccupancyOptions::default())
}

pub fn solve_occupancy_with(
    instance: &CmdpInstance,
    opts: &OccupancyOptions,
) -> Result<OccupancySolution> {
    let built = build_occupancy_lp_with(instance, opts)?;
    let sol = solve_lp_with(&built.problem, &opts.simplex)?;
    if sol.status != LpStatus::Optimal {
        return Err(status_error(sol));
    }
    let read = |col: &Option<usize>| col.map_or(0.0, |j| sol.x[j].max(0.0));
    Ok(OccupancySolution {
        u: built
            .u_index
            .iter()
            .map(|row| row.iter().map(read).collect())
            .collect(),
        d: built.d_index.iter().map(read).collect(),
        objective: sol.objective,
        iterations: sol.iterations,
    })
}

/// Mass below which a state is treated as unreachable.
pub const UNREACHED: f64 = 1e-9;

/// `π(s) = u(s,·)/d(s)`, or the base action where `d(s)` vanishes.
pub fn extract_policy(sol: &OccupancySolution, instance: &CmdpInstance) -> Policy {
    let space = &instance.space;
    let mut actions: Vec<Option<Vec<f64>>> = vec![None; space.num_states()];
    for s in space.decision_states() {
        actions[s] = Some(action_from_flow(
            &sol.u[s],
            sol.d[s],
            &instance.polytope(s).base,
        ));
    }
    Policy::Deterministic(actions)
}

/// Normalized outflow, falling back to `base` for (near) zero mass.
pub(crate) fn action_from_flow(u: &[f64], d: f64, base: &[f64]) -> Vec<f64> {
    let mass: f64 = u.iter().map(|x| x.max(0.0)).sum();
    if d <= UNREACHED || mass <= UNREACHED {
        return base.to_vec();
    }
    u.iter().map(|x| x.max(0.0) / mass).collect()
}

/// Attained mass `Σ_{s∈Q} d(s)` for every quality constraint.
pub fn constraint_masses(instance: &CmdpInstance, d: &[f64]) -> Vec<f64> {
    instance
        .constraints
        .iter()
        .map(|c| c.states.iter().map(|&s| d[s]).sum())
        .collect()
}
