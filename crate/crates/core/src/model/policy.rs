use super::instance::CmdpInstance;
use super::space::StateId;
use crate::error::{Error, Result};

/// Finite mixture `[(λ_i, a_i)]` of transition vectors.
pub type Mixture = Vec<(f64, Vec<f64>)>;

/// Markov policy over the decision states; entries for terminal states are `None`.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    Deterministic(Vec<Option<Vec<f64>>>),
    Randomized(Vec<Option<Mixture>>),
}

impl Policy {
    /// The policy that always plays the base transitions.
    pub fn base(instance: &CmdpInstance) -> Self {
        Policy::Deterministic(
            instance
                .polytopes
                .iter()
                .map(|p| p.as_ref().map(|p| p.base.clone()))
                .collect(),
        )
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, Policy::Randomized(_))
    }

    pub fn num_states(&self) -> usize {
        match self {
            Policy::Deterministic(v) => v.len(),
            Policy::Randomized(v) => v.len(),
        }
    }

    /// Weighted actions played in `s`; empty for terminal states.
    pub fn atoms(&self, s: StateId) -> Vec<(f64, &[f64])> {
        match self {
            Policy::Deterministic(v) => v[s].iter().map(|a| (1.0, a.as_slice())).collect(),
            Policy::Randomized(v) => v[s]
                .iter()
                .flatten()
                .map(|(l, a)| (*l, a.as_slice()))
                .collect(),
        }
    }

    /// Mixture-marginal transition vector `Σ λ_i a_i` in `s`.
    pub fn marginal(&self, s: StateId) -> Option<Vec<f64>> {
        let atoms = self.atoms(s);
        let first = atoms.first()?;
        let mut out = vec![0.0; first.1.len()];
        for (l, a) in atoms {
            for (o, x) in out.iter_mut().zip(a) {
                *o += l * x;
            }
        }
        Some(out)
    }

    /// Checks dimensions, mixture weights and action feasibility.
    pub fn check(&self, instance: &CmdpInstance, feas_tol: f64) -> Result<()> {
        let space = &instance.space;
        if self.num_states() != space.num_states() {
            return Err(Error::Dimension(format!(
                "policy covers {} states but the instance has {}",
                self.num_states(),
                space.num_states()
            )));
        }
        for s in space.decision_states() {
            let name = space.name(s);
            let atoms = self.atoms(s);
            if atoms.is_empty() {
                return Err(Error::Dimension(format!(
                    "policy has no action for state {name}"
                )));
            }
            let p = instance.polytope(s);
            let mut total = 0.0;
            for (l, a) in &atoms {
                if a.len() != p.dim() {
                    return Err(Error::Dimension(format!(
                        "action for state {name} has length {} but the next layer has {} states",
                        a.len(),
                        p.dim()
                    )));
                }
                if !(*l >= 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "negative mixture weight {l} in state {name}"
                    )));
                }
                let v = p.violation(a);
                if v > feas_tol {
                    return Err(Error::InvalidParameter(format!(
                        "action for state {name} is outside its action set by {v:.3e}"
                    )));
                }
                total += l;
            }
            if (total - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "mixture weights in state {name} sum to {total}"
                )));
            }
        }
        for s in 0..space.num_states() {
            if space.is_terminal(s) && !self.atoms(s).is_empty() {
                return Err(Error::Dimension(format!(
                    "policy assigns an action to terminal state {}",
                    space.name(s)
                )));
            }
        }
        Ok(())
    }
}
