use std::fmt;

use super::polytope::ActionPolytope;
use super::reward::RewardSpec;
use super::space::{LayeredStateSpace, StateId};
use crate::error::{Error, Result};

/// `Σ_{s ∈ Q} d(s) ≤ q`.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityConstraint {
    pub states: Vec<StateId>,
    pub bound: f64,
}

/// Finite-horizon CMDP whose actions choose the next-state distribution
/// from a polytope around a base distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct CmdpInstance {
    pub space: LayeredStateSpace,
    /// Indexed by state; `None` for terminal states.
    pub polytopes: Vec<Option<ActionPolytope>>,
    /// Indexed by state; `None` for terminal states.
    pub rewards: Vec<Option<RewardSpec>>,
    /// Initial distribution over the first layer.
    pub alpha: Vec<f64>,
    pub constraints: Vec<QualityConstraint>,
}

impl CmdpInstance {
    /// Instance with no decisions filled in yet.
    pub fn new(space: LayeredStateSpace, alpha: Vec<f64>) -> Self {
        let n = space.num_states();
        Self {
            space,
            polytopes: vec![None; n],
            rewards: vec![None; n],
            alpha,
            constraints: Vec::new(),
        }
    }

    pub fn set_decision(&mut self, s: StateId, polytope: ActionPolytope, reward: RewardSpec) {
        self.polytopes[s] = Some(polytope);
        self.rewards[s] = Some(reward);
    }

    pub fn add_constraint(&mut self, states: Vec<StateId>, bound: f64) {
        self.constraints.push(QualityConstraint { states, bound });
    }

    /// Panics on terminal states; valid instances have a polytope everywhere else.
    pub fn polytope(&self, s: StateId) -> &ActionPolytope {
        self.polytopes[s]
            .as_ref()
            .unwrap_or_else(|| panic!("state {} has no action set", self.space.name(s)))
    }

    pub fn reward(&self, s: StateId) -> &RewardSpec {
        self.rewards[s]
            .as_ref()
            .unwrap_or_else(|| panic!("state {} has no reward", self.space.name(s)))
    }

    /// Copy with every reward replaced by `f(state, reward)`.
    pub fn map_rewards(&self, mut f: impl FnMut(StateId, &RewardSpec) -> RewardSpec) -> Self {
        let mut out = self.clone();
        for (s, r) in out.rewards.iter_mut().enumerate() {
            if let Some(r) = r {
                *r = f(s, r);
            }
        }
        out
    }

    /// Successors of decision state `s` that some action can reach. A
    /// coordinate counts as blocked only when a single-coordinate row
    /// forces it to zero, so this may over-approximate.
    pub fn possible_successors(&self, s: StateId) -> Vec<bool> {
        let p = self.polytope(s);
        let mut open = vec![true; p.dim()];
        for (row, &h) in p.h_rows.iter().zip(&p.h_rhs) {
            let mut nz = row.iter().enumerate().filter(|(_, c)| **c != 0.0);
            if let (Some((k, &c)), None) = (nz.next(), nz.next()) {
                if c > 0.0 && h <= 0.0 {
                    open[k] = false;
                }
            }
        }
        open
    }

    /// States that carry positive probability under some policy
    /// (over-approximated through [`Self::possible_successors`]).
    pub fn reachable(&self) -> Vec<bool> {
        let space = &self.space;
        let mut seen = vec![false; space.num_states()];
        for (i, &s) in space.layer(0).iter().enumerate() {
            seen[s] = self.alpha.get(i).is_some_and(|a| *a > 0.0);
        }
        for s in space.decision_states() {
            if !seen[s] {
                continue;
            }
            for (k, open) in self.possible_successors(s).into_iter().enumerate() {
                if open {
                    seen[space.successors(s)[k]] = true;
                }
            }
        }
        seen
    }

    /// Errors with the full validation report unless the instance is valid.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate(self);
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(report.to_string()))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub state: Option<String>,
    pub message: String,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, state: Option<&str>, magnitude: f64, message: String) {
        self.violations.push(Violation {
            state: state.map(str::to_string),
            message,
            magnitude,
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            match &v.state {
                Some(s) => write!(f, "{s}: {}", v.message)?,
                None => f.write_str(&v.message)?,
            }
        }
        Ok(())
    }
}

const NORMALIZATION_TOL: f64 = 1e-9;

fn check_distribution(report: &mut ValidationReport, state: Option<&str>, label: &str, v: &[f64]) {
    let neg = v.iter().map(|x| -x).fold(0.0, f64::max);
    if neg > 0.0 || v.iter().any(|x| !x.is_finite()) {
        report.push(
            state,
            neg,
            format!("{label} has negative or non-finite entries"),
        );
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > NORMALIZATION_TOL {
        report.push(state, (sum - 1.0).abs(), format!("{label} sums to {sum}"));
    }
}

/// Collects every invariant violation of `instance`.
pub fn validate(instance: &CmdpInstance) -> ValidationReport {
    let mut report = ValidationReport::default();
    let space = &instance.space;
    let n1 = space.layer(0).len();
    if instance.alpha.len() != n1 {
        report.push(
            None,
            (instance.alpha.len() as f64 - n1 as f64).abs(),
            format!(
                "alpha has {} entries but the first layer has {n1} states",
                instance.alpha.len()
            ),
        );
    } else {
        check_distribution(&mut report, None, "alpha", &instance.alpha);
    }
    if instance.polytopes.len() != space.num_states()
        || instance.rewards.len() != space.num_states()
    {
        report.push(
            None,
            0.0,
            "per-state tables do not match the state space".into(),
        );
        return report;
    }

    for s in 0..space.num_states() {
        let name = Some(space.name(s));
        if space.is_terminal(s) {
            if instance.polytopes[s].is_some() || instance.rewards[s].is_some() {
                report.push(
                    name,
                    0.0,
                    "terminal state carries an action set or reward".into(),
                );
            }
            continue;
        }
        let n = space.successors(s).len();
        match &instance.polytopes[s] {
            None => report.push(name, 0.0, "missing action set".into()),
            Some(p) => {
                if p.dim() != n {
                    report.push(
                        name,
                        0.0,
                        format!(
                            "base has length {} but the next layer has {n} states",
                            p.dim()
                        ),
                    );
                    continue;
                }
                if p.h_rows.len() != p.h_rhs.len() {
                    report.push(name, 0.0, "H and h have different row counts".into());
                    continue;
                }
                if let Some(row) = p.h_rows.iter().position(|r| r.len() != n) {
                    report.push(name, 0.0, format!("row {row} of H has the wrong length"));
                    continue;
                }
                if p.h_rows
                    .iter()
                    .flatten()
                    .chain(&p.h_rhs)
                    .any(|x| !x.is_finite())
                {
                    report.push(name, 0.0, "H or h contains non-finite values".into());
                    continue;
                }
                check_distribution(&mut report, name, "base b(s)", &p.base);
                let excess = p.row_violation(&p.base);
                if excess > NORMALIZATION_TOL {
                    report.push(
                        name,
                        excess,
                        format!("b(s) ∉ 𝒜(s): a row is violated by {excess:.3e}"),
                    );
                }
            }
        }
        match &instance.rewards[s] {
            None => report.push(name, 0.0, "missing reward".into()),
            Some(r) => {
                for msg in r.problems(n) {
                    report.push(name, 0.0, format!("reward: {msg}"));
                }
            }
        }
    }

    for (i, c) in instance.constraints.iter().enumerate() {
        if c.states.is_empty() {
            report.push(None, 0.0, format!("constraint {i} has no states"));
        }
        if let Some(&bad) = c.states.iter().find(|&&s| s >= space.num_states()) {
            report.push(
                None,
                bad as f64,
                format!("constraint {i} references unknown state {bad}"),
            );
        }
        if !c.bound.is_finite() || c.bound < 0.0 {
            report.push(
                None,
                c.bound.abs(),
                format!("constraint {i} has bound {}", c.bound),
            );
        }
    }
    report
}
