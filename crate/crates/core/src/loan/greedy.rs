use crate::error::{Error, Result};
use crate::evaluator::evaluate_exact;
use crate::model::{ActionPolytope, CmdpInstance, Policy};
use crate::occupancy::{extract_policy, solve_occupancy_with, OccupancyOptions};

#[derive(Debug, Clone)]
pub struct GreedyResult {
    /// True return of the committed policy.
    pub objective: f64,
    pub policy: Policy,
}

/// Commits one period at a time: period `t` is optimized with earlier
/// periods fixed to their committed actions and later periods fixed to the
/// base transitions.
pub fn greedy_baseline(instance: &CmdpInstance, opts: &OccupancyOptions) -> Result<GreedyResult> {
    instance.ensure_valid()?;
    let space = &instance.space;
    let mut committed: Vec<Option<Vec<f64>>> = vec![None; space.num_states()];
    for s in space.decision_states() {
        committed[s] = Some(instance.polytope(s).base.clone());
    }
    for t in 0..space.horizon() - 1 {
        let mut stage = instance.clone();
        for s in space.decision_states() {
            if space.layer_of(s) == t {
                continue;
            }
            let a = committed[s].as_ref().expect("decision state");
            stage.polytopes[s] = Some(point_polytope(a));
        }
        let sol = solve_occupancy_with(&stage, opts).map_err(|e| match e {
            Error::Infeasible(_) => Error::GreedyInfeasible {
                period: t + 1,
                reason: "the quality constraints cannot be met with later periods at their \
                         base transitions"
                    .into(),
            },
            other => other,
        })?;
        let Policy::Deterministic(actions) = extract_policy(&sol, &stage) else {
            unreachable!("occupancy policies are deterministic")
        };
        for &s in space.layer(t) {
            committed[s] = actions[s].clone();
        }
    }
    let policy = Policy::Deterministic(committed);
    let report = evaluate_exact(instance, &policy)?;
    Ok(GreedyResult {
        objective: report.ret,
        policy,
    })
}

/// `{a}` as a polytope; `a` is renormalized to absorb LP round-off.
fn point_polytope(a: &[f64]) -> ActionPolytope {
    let clipped: Vec<f64> = a.iter().map(|x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let p: Vec<f64> = clipped.iter().map(|x| x / total).collect();
    let n = p.len();
    let mut rows = Vec::with_capacity(2 * n);
    let mut rhs = Vec::with_capacity(2 * n);
    for k in 0..n {
        let mut up = vec![0.0; n];
        up[k] = 1.0;
        rows.push(up);
        rhs.push(p[k]);
        if p[k] > 0.0 {
            let mut lo = vec![0.0; n];
            lo[k] = -1.0;
            rows.push(lo);
            rhs.push(-p[k]);
        }
    }
    ActionPolytope::explicit(p, rows, rhs)
}
