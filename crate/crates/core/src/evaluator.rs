//! Policy evaluation by forward recursion and by simulation.
//!
//! Randomized policies earn the mixture-weighted reward `Σ λ_i r(s, a_i)`,
//! which is generally different from the reward of the averaged action.
//!
//! Simulation uses ChaCha8 streams: trajectories are split into fixed-size
//! batches and batch `b` draws from stream `b` of the generator seeded with
//! the user seed, so results do not depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CmdpInstance, Policy};
use crate::occupancy::constraint_masses;

/// Tolerance used when judging quality constraints.
pub const CONSTRAINT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport {
    /// State visitation probabilities.
    pub d: Vec<f64>,
    #[serde(rename = "return")]
    pub ret: f64,
    pub constraint_mass: Vec<f64>,
    pub constraint_slack: Vec<f64>,
    pub feasible: bool,
}

fn finish(instance: &CmdpInstance, d: Vec<f64>, ret: f64) -> EvaluationReport {
    let constraint_mass = constraint_masses(instance, &d);
    let constraint_slack: Vec<f64> = instance
        .constraints
        .iter()
        .zip(&constraint_mass)
        .map(|(c, m)| c.bound - m)
        .collect();
    let feasible = constraint_slack.iter().all(|s| *s >= -CONSTRAINT_TOL);
    EvaluationReport {
        d,
        ret,
        constraint_mass,
        constraint_slack,
        feasible,
    }
}

fn check_policy(instance: &CmdpInstance, policy: &Policy) -> Result<()> {
    policy.check(instance, 1e-7)
}

pub fn evaluate_exact(instance: &CmdpInstance, policy: &Policy) -> Result<EvaluationReport> {
    check_policy(instance, policy)?;
    let space = &instance.space;
    let mut d = vec![0.0; space.num_states()];
    for (i, &s) in space.layer(0).iter().enumerate() {
        d[s] = instance.alpha[i];
    }
    let mut ret = 0.0;
    for s in space.decision_states() {
        let reward = instance.reward(s);
        let atoms = policy.atoms(s);
        let expected: f64 = atoms.iter().map(|(l, a)| l * reward.eval(a)).sum();
        ret += d[s] * expected;
        let succ = space.successors(s);
        for (l, a) in atoms {
            let w = d[s] * l;
            for (k, x) in a.iter().enumerate() {
                d[succ[k]] += w * x;
            }
        }
    }
    Ok(finish(instance, d, ret))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationReport {
    pub trajectories: u64,
    pub seed: u64,
    pub generator: &'static str,
    /// Empirical visitation frequencies.
    pub d: Vec<f64>,
    #[serde(rename = "return")]
    pub ret: f64,
    /// Standard error of the mean return.
    pub return_stderr: f64,
    pub constraint_mass: Vec<f64>,
    pub constraint_slack: Vec<f64>,
    pub feasible: bool,
}

const BATCH: u64 = 4096;

/// Per-state sampling tables: cumulative mixture weights, the atoms'
/// cumulative transition vectors and their rewards.
struct Table {
    mix_cdf: Vec<f64>,
    next_cdf: Vec<Vec<f64>>,
    reward: Vec<f64>,
}

fn cdf(weights: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    weights
        .map(|w| {
            acc += w.max(0.0);
            acc
        })
        .collect()
}

fn sample(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total = *cdf.last().expect("nonempty distribution");
    let u = rng.random::<f64>() * total;
    let i = cdf.partition_point(|&c| c <= u);
    // guard the u == total rounding case and zero-weight tails
    let i = i.min(cdf.len() - 1);
    if i > 0 && cdf[i] == cdf[i - 1] {
        (0..i)
            .rev()
            .find(|&j| j == 0 || cdf[j] > cdf[j - 1])
            .unwrap_or(0)
    } else {
        i
    }
}

struct Tally {
    visits: Vec<u64>,
    sum: f64,
    sum_sq: f64,
}

pub fn simulate(
    instance: &CmdpInstance,
    policy: &Policy,
    trajectories: u64,
    seed: u64,
) -> Result<SimulationReport> {
    if trajectories == 0 {
        return Err(Error::InvalidParameter(
            "trajectories must be at least 1".into(),
        ));
    }
    check_policy(instance, policy)?;
    let space = &instance.space;
    let n = space.num_states();
    let tables: Vec<Option<Table>> = (0..n)
        .map(|s| {
            if space.is_terminal(s) {
                return None;
            }
            let atoms = policy.atoms(s);
            let reward = instance.reward(s);
            Some(Table {
                mix_cdf: cdf(atoms.iter().map(|(l, _)| *l)),
                next_cdf: atoms.iter().map(|(_, a)| cdf(a.iter().copied())).collect(),
                reward: atoms.iter().map(|(_, a)| reward.eval(a)).collect(),
            })
        })
        .collect();
    let init_cdf = cdf(instance.alpha.iter().copied());

    let batches = trajectories.div_ceil(BATCH);
    let tallies: Vec<Tally> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = BATCH.min(trajectories - b * BATCH);
            let mut t = Tally {
                visits: vec![0; n],
                sum: 0.0,
                sum_sq: 0.0,
            };
            for _ in 0..count {
                let mut s = space.layer(0)[sample(&init_cdf, &mut rng)];
                let mut total = 0.0;
                loop {
                    t.visits[s] += 1;
                    let Some(table) = &tables[s] else { break };
                    let i = sample(&table.mix_cdf, &mut rng);
                    total += table.reward[i];
                    s = space.successors(s)[sample(&table.next_cdf[i], &mut rng)];
                }
                t.sum += total;
                t.sum_sq += total * total;
            }
            t
        })
        .collect();

    let mut visits = vec![0u64; n];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for t in &tallies {
        for (v, x) in visits.iter_mut().zip(&t.visits) {
            *v += x;
        }
        sum += t.sum;
        sum_sq += t.sum_sq;
    }
    let nf = trajectories as f64;
    let mean = sum / nf;
    let var = if trajectories > 1 {
        ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0)
    } else {
        0.0
    };
    let d: Vec<f64> = visits.iter().map(|&v| v as f64 / nf).collect();
    let exact_like = finish(instance, d, mean);
    Ok(SimulationReport {
        trajectories,
        seed,
        generator: "ChaCha8",
        d: exact_like.d,
        ret: mean,
        return_stderr: (var / nf).sqrt(),
        constraint_mass: exact_like.constraint_mass,
        constraint_slack: exact_like.constraint_slack,
        feasible: exact_like.feasible,
    })
}
