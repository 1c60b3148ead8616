//! Extreme-point reduction: replace each action polytope by its vertices,
//! solve the resulting finite-action CMDP, and convert between vertex
//! mixtures and interior actions.

mod enumerate;

pub use enumerate::{
    enumerate_cell_vertices, enumerate_vertices, enumerate_vertices_with, VertexOptions,
};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{solve_lp, solve_lp_with, LpProblem, LpStatus, SimplexOptions};
use crate::model::{CmdpInstance, Mixture, Policy, RewardSpec, StateId};
use crate::occupancy::{status_error, UNREACHED};

/// Which points stand in for each action set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexKind {
    /// Polytope vertices.
    Extreme,
    /// Vertices of the polytope cut at the kinks of a weighted-L1 reward, so
    /// that the reward is affine between neighbouring points.
    Breakpoints,
}

#[derive(Debug, Clone, Serialize)]
pub struct VertexSet {
    /// Vertices per state; empty for terminal states.
    pub vertices: Vec<Vec<Vec<f64>>>,
    pub dedup_tol: f64,
}

impl VertexSet {
    pub fn total(&self) -> usize {
        self.vertices.iter().map(Vec::len).sum()
    }
}

/// Enumerates vertices for every decision state. With `reachable_only`,
/// states no policy can reach get their base action as the only point.
pub fn enumerate_all(
    instance: &CmdpInstance,
    kind: VertexKind,
    reachable_only: bool,
    opts: &VertexOptions,
) -> Result<VertexSet> {
    instance.ensure_valid()?;
    let space = &instance.space;
    let reach = if reachable_only {
        instance.reachable()
    } else {
        vec![true; space.num_states()]
    };
    let mut vertices = vec![Vec::new(); space.num_states()];
    for s in space.decision_states() {
        let p = instance.polytope(s);
        vertices[s] = if !reach[s] {
            vec![p.base.clone()]
        } else {
            let breaks: Vec<(usize, f64)> = match (kind, instance.reward(s)) {
                (VertexKind::Breakpoints, RewardSpec::WeightedL1 { center, .. }) => {
                    center.iter().copied().enumerate().collect()
                }
                _ => Vec::new(),
            };
            enumerate_cell_vertices(p, &breaks, opts).map_err(|e| match e {
                Error::DimensionLimit { .. } | Error::Timeout => e,
                other => Error::InvalidInstance(format!("state {}: {other}", space.name(s))),
            })?
        };
    }
    Ok(VertexSet {
        vertices,
        dedup_tol: opts.dedup_tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteAction {
    pub transition: Vec<f64>,
    pub reward: f64,
}

/// Finite-action CMDP on the same states: action `i` in `s` moves with
/// `actions[s][i].transition` and earns `actions[s][i].reward`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteCmdp {
    pub actions: Vec<Vec<FiniteAction>>,
}

pub fn build_finite_cmdp(instance: &CmdpInstance, vertices: &VertexSet) -> FiniteCmdp {
    let actions = (0..instance.space.num_states())
        .map(|s| {
            vertices.vertices[s]
                .iter()
                .map(|v| FiniteAction {
                    transition: v.clone(),
                    reward: instance.reward(s).eval(v),
                })
                .collect()
        })
        .collect();
    FiniteCmdp { actions }
}

#[derive(Debug, Clone)]
pub struct FiniteSolution {
    pub objective: f64,
    /// Randomized policy over the finite actions.
    pub policy: Policy,
    /// Occupancy `x(s, i)` of action `i` in `s`.
    pub x: Vec<Vec<f64>>,
    pub d: Vec<f64>,
    pub iterations: usize,
}

/// Solves the finite-action occupancy program
/// `max Σ r(s,i) x(s,i)` over `x ≥ 0` with flow, initial and quality rows.
pub fn solve_finite(instance: &CmdpInstance, fc: &FiniteCmdp) -> Result<FiniteSolution> {
    solve_finite_with(instance, fc, &SimplexOptions::default())
}

pub fn solve_finite_with(
    instance: &CmdpInstance,
    fc: &FiniteCmdp,
    simplex: &SimplexOptions,
) -> Result<FiniteSolution> {
    let space = &instance.space;
    let n = space.num_states();
    let mut lp = LpProblem::new();
    let mut x_index: Vec<Vec<usize>> = vec![Vec::new(); n];
    for s in space.decision_states() {
        if fc.actions[s].is_empty() {
            return Err(Error::InvalidInstance(format!(
                "state {} has no actions",
                space.name(s)
            )));
        }
        x_index[s] = fc.actions[s]
            .iter()
            .enumerate()
            .map(|(i, a)| lp.add_var(format!("x[{}:{i}]", space.name(s)), a.reward))
            .collect();
    }
    let d_index: Vec<usize> = (0..n)
        .map(|s| lp.add_var(format!("d[{}]", space.name(s)), 0.0))
        .collect();
    for (i, &s) in space.layer(0).iter().enumerate() {
        lp.add_eq(
            format!("init[{}]", space.name(s)),
            vec![(d_index[s], 1.0)],
            instance.alpha[i],
        );
    }
    for s in space.decision_states() {
        let mut row = vec![(d_index[s], 1.0)];
        row.extend(x_index[s].iter().map(|&j| (j, -1.0)));
        lp.add_eq(format!("out[{}]", space.name(s)), row, 0.0);
    }
    for t in 1..space.horizon() {
        for &s2 in space.layer(t) {
            let k = space.index_in_layer(s2);
            let mut row = vec![(d_index[s2], 1.0)];
            for &s1 in space.layer(t - 1) {
                for (i, a) in fc.actions[s1].iter().enumerate() {
                    if a.transition[k] != 0.0 {
                        row.push((x_index[s1][i], -a.transition[k]));
                    }
                }
            }
            lp.add_eq(format!("in[{}]", space.name(s2)), row, 0.0);
        }
    }
    for (i, c) in instance.constraints.iter().enumerate() {
        let row = c.states.iter().map(|&s| (d_index[s], 1.0)).collect();
        lp.add_le(format!("quality[{i}]"), row, c.bound);
    }

    let sol = solve_lp_with(&lp, simplex)?;
    if sol.status != LpStatus::Optimal {
        return Err(status_error(sol));
    }
    let x: Vec<Vec<f64>> = x_index
        .iter()
        .map(|row| row.iter().map(|&j| sol.x[j].max(0.0)).collect())
        .collect();
    let d: Vec<f64> = d_index.iter().map(|&j| sol.x[j].max(0.0)).collect();

    let mut mixtures: Vec<Option<Mixture>> = vec![None; n];
    for s in space.decision_states() {
        mixtures[s] = Some(mixture_from_occupancy(
            instance,
            s,
            &fc.actions[s],
            &x[s],
            d[s],
        ));
    }
    Ok(FiniteSolution {
        objective: sol.objective,
        policy: Policy::Randomized(mixtures),
        x,
        d,
        iterations: sol.iterations,
    })
}

fn mixture_from_occupancy(
    instance: &CmdpInstance,
    s: StateId,
    actions: &[FiniteAction],
    x: &[f64],
    d: f64,
) -> Mixture {
    let mass: f64 = x.iter().sum();
    if d > UNREACHED && mass > UNREACHED {
        return actions
            .iter()
            .zip(x)
            .filter(|(_, &w)| w > 0.0)
            .map(|(a, &w)| (w / mass, a.transition.clone()))
            .collect();
    }
    // unreached: decompose the base action over the available points
    let points: Vec<Vec<f64>> = actions.iter().map(|a| a.transition.clone()).collect();
    point_to_mix(&instance.polytope(s).base, &points)
        .unwrap_or_else(|_| vec![(1.0, points[0].clone())])
}

/// `Σ λ_i a_i` in every state.
pub fn mix_to_point(policy: &Policy) -> Policy {
    Policy::Deterministic(
        (0..policy.num_states())
            .map(|s| policy.marginal(s))
            .collect(),
    )
}

/// Convex weights `λ` with `Σ λ_i v_i = a`, from a basic feasible solution
/// of the decomposition LP, so at most `n` weights are nonzero.
pub fn point_to_mix(a: &[f64], vertices: &[Vec<f64>]) -> Result<Mixture> {
    if vertices.is_empty() {
        return Err(Error::OutsideHull);
    }
    if let Some(v) = vertices.iter().find(|v| v.len() != a.len()) {
        return Err(Error::Dimension(format!(
            "point has length {} but a generator has length {}",
            a.len(),
            v.len()
        )));
    }
    let mut lp = LpProblem::new();
    let lam: Vec<usize> = (0..vertices.len())
        .map(|i| lp.add_var(format!("lambda{i}"), 0.0))
        .collect();
    lp.add_eq("sum", lam.iter().map(|&j| (j, 1.0)).collect(), 1.0);
    for k in 0..a.len() {
        let row = vertices
            .iter()
            .zip(&lam)
            .filter(|(v, _)| v[k] != 0.0)
            .map(|(v, &j)| (j, v[k]))
            .collect();
        lp.add_eq(format!("coord{k}"), row, a[k]);
    }
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::OutsideHull);
    }
    let total: f64 = sol.x.iter().map(|w| w.max(0.0)).sum();
    Ok(vertices
        .iter()
        .zip(&sol.x)
        .filter(|(_, &w)| w > 1e-12)
        .map(|(v, &w)| (w / total, v.clone()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixture_to_point() {
        let pi = Policy::Randomized(vec![
            Some(vec![(0.6, vec![1.0, 0.0]), (0.4, vec![0.0, 1.0])]),
            None,
        ]);
        let Policy::Deterministic(v) = mix_to_point(&pi) else {
            unreachable!()
        };
        assert_eq!(v[0], Some(vec![0.6, 0.4]));
        assert_eq!(v[1], None);
    }

    #[test]
    fn point_decomposition() {
        let m = point_to_mix(&[0.6, 0.4], &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert_eq!(m.len(), 2);
        assert!((m[0].0 - 0.6).abs() < 1e-12 && (m[1].0 - 0.4).abs() < 1e-12);
        let m = point_to_mix(&[0.5, 0.5], &[vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
        assert!((m[0].0 - 0.5).abs() < 1e-12);
        let m = point_to_mix(&[0.9, 0.1], &[vec![0.9, 0.1], vec![0.1, 0.9]]).unwrap();
        assert_eq!(m, vec![(1.0, vec![0.9, 0.1])]);
        assert!(matches!(
            point_to_mix(&[0.95, 0.05], &[vec![0.9, 0.1], vec![0.1, 0.9]]),
            Err(Error::OutsideHull)
        ));
    }
}
