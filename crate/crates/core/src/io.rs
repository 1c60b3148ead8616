//! JSON file formats for problems and policies.
//!
//! A problem file:
//!
//! ```json
//! {
//!   "horizon": 2,
//!   "layers": [["s"], ["good", "bad"]],
//!   "alpha": [1.0],
//!   "states": {
//!     "s": {
//!       "base": [0.5, 0.5],
//!       "epsilon": 0.4,
//!       "reward": { "type": "l1", "params": { "center": [0.5, 0.5], "weights": [1, 1] } }
//!     }
//!   },
//!   "constraints": [{ "states": ["bad"], "bound": 0.2 }]
//! }
//! ```
//!
//! Every non-terminal state needs an entry under `states`, with either
//! `epsilon` (plus optional `support_only`) or explicit `H` and `h` rows.
//! Reward types are `affine` (`e`, `f`), `l1` (`center`, `weights`) and
//! `quadratic` (`center`, `weights`, `curvature`: `concave` or `convex`).
//! `center` defaults to `base` and `weights` to all ones. Unknown fields are
//! rejected.
//!
//! A policy file is either `{"type": "deterministic", "actions": {state: a}}`
//! or `{"type": "randomized", "mixtures": {state: [{"weight", "action"}]}}`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    ActionPolytope, CmdpInstance, Curvature, LayeredStateSpace, Policy, PolytopeForm, RewardSpec,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub horizon: usize,
    pub layers: Vec<Vec<String>>,
    pub alpha: Vec<f64>,
    pub states: BTreeMap<String, StateFile>,
    #[serde(default)]
    pub constraints: Vec<ConstraintFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub base: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub support_only: bool,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h_rows: Option<Vec<Vec<f64>>>,
    #[serde(rename = "h", default, skip_serializing_if = "Option::is_none")]
    pub h_rhs: Option<Vec<f64>>,
    pub reward: RewardFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(
    tag = "type",
    content = "params",
    rename_all = "snake_case",
    deny_unknown_fields
)]
pub enum RewardFile {
    Affine(AffineParams),
    L1(DeviationParams),
    Quadratic(QuadraticParams),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineParams {
    pub e: Vec<f64>,
    #[serde(default)]
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviationParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurvatureFile {
    Concave,
    Convex,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    pub curvature: CurvatureFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintFile {
    pub states: Vec<String>,
    pub bound: f64,
}

fn reward_from_file(r: &RewardFile, base: &[f64]) -> RewardSpec {
    let ones = || vec![1.0; base.len()];
    match r {
        RewardFile::Affine(p) => RewardSpec::Affine {
            e: p.e.clone(),
            f: p.f,
        },
        RewardFile::L1(p) => RewardSpec::WeightedL1 {
            center: p.center.clone().unwrap_or_else(|| base.to_vec()),
            weights: p.weights.clone().unwrap_or_else(ones),
        },
        RewardFile::Quadratic(p) => RewardSpec::Quadratic {
            center: p.center.clone().unwrap_or_else(|| base.to_vec()),
            weights: p.weights.clone().unwrap_or_else(ones),
            curvature: match p.curvature {
                CurvatureFile::Concave => Curvature::Concave,
                CurvatureFile::Convex => Curvature::Convex,
            },
        },
    }
}

fn reward_to_file(r: &RewardSpec) -> RewardFile {
    match r {
        RewardSpec::Affine { e, f } => RewardFile::Affine(AffineParams {
            e: e.clone(),
            f: *f,
        }),
        RewardSpec::WeightedL1 { center, weights } => RewardFile::L1(DeviationParams {
            center: Some(center.clone()),
            weights: Some(weights.clone()),
        }),
        RewardSpec::Quadratic {
            center,
            weights,
            curvature,
        } => RewardFile::Quadratic(QuadraticParams {
            center: Some(center.clone()),
            weights: Some(weights.clone()),
            curvature: match curvature {
                Curvature::Concave => CurvatureFile::Concave,
                Curvature::Convex => CurvatureFile::Convex,
            },
        }),
    }
}

fn polytope_from_file(name: &str, st: &StateFile) -> Result<ActionPolytope> {
    let bad = |msg: String| Error::InvalidInstance(format!("state {name}: {msg}"));
    match (st.epsilon, &st.h_rows, &st.h_rhs) {
        (Some(eps), None, None) => if st.support_only {
            ActionPolytope::box_on_support(&st.base, eps)
        } else {
            ActionPolytope::box_around(&st.base, eps)
        }
        .map_err(|e| bad(e.to_string())),
        (None, Some(rows), Some(rhs)) => {
            if st.support_only {
                return Err(bad("support_only applies to epsilon boxes only".into()));
            }
            if rows.len() != rhs.len() {
                return Err(bad(format!(
                    "H has {} rows but h has {}",
                    rows.len(),
                    rhs.len()
                )));
            }
            Ok(ActionPolytope::explicit(
                st.base.clone(),
                rows.clone(),
                rhs.clone(),
            ))
        }
        (None, None, None) => Err(bad("needs either epsilon or H and h".into())),
        _ => Err(bad("give either epsilon or H and h, not a mix".into())),
    }
}

impl ProblemFile {
    pub fn into_instance(self) -> Result<CmdpInstance> {
        if self.horizon != self.layers.len() {
            return Err(Error::InvalidInstance(format!(
                "horizon is {} but {} layers are listed",
                self.horizon,
                self.layers.len()
            )));
        }
        let space = LayeredStateSpace::new(self.layers)?;
        let mut inst = CmdpInstance::new(space, self.alpha);
        let mut states = self.states;
        for s in 0..inst.space.num_states() {
            let name = inst.space.name(s).to_string();
            let entry = states.remove(&name);
            match (inst.space.is_terminal(s), entry) {
                (true, None) => {}
                (true, Some(_)) => {
                    return Err(Error::InvalidInstance(format!(
                        "terminal state {name} cannot have an action set or reward"
                    )))
                }
                (false, None) => {
                    return Err(Error::InvalidInstance(format!(
                        "state {name} has no entry under \"states\""
                    )))
                }
                (false, Some(st)) => {
                    let polytope = polytope_from_file(&name, &st)?;
                    let reward = reward_from_file(&st.reward, &st.base);
                    inst.set_decision(s, polytope, reward);
                }
            }
        }
        if let Some(name) = states.keys().next() {
            return Err(Error::InvalidInstance(format!(
                "\"states\" names {name}, which is not in any layer"
            )));
        }
        for c in self.constraints {
            let ids = c
                .states
                .iter()
                .map(|n| {
                    inst.space.id(n).ok_or_else(|| {
                        Error::InvalidInstance(format!("constraint names unknown state {n}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            inst.add_constraint(ids, c.bound);
        }
        inst.ensure_valid()?;
        Ok(inst)
    }

    pub fn from_instance(inst: &CmdpInstance) -> Self {
        let space = &inst.space;
        let mut states = BTreeMap::new();
        for s in space.decision_states() {
            let p = inst.polytope(s);
            let (epsilon, support_only, h_rows, h_rhs) = match p.form {
                PolytopeForm::Box {
                    epsilon,
                    support_only,
                } => (Some(epsilon), support_only, None, None),
                PolytopeForm::Explicit => {
                    (None, false, Some(p.h_rows.clone()), Some(p.h_rhs.clone()))
                }
            };
            states.insert(
                space.name(s).to_string(),
                StateFile {
                    base: p.base.clone(),
                    epsilon,
                    support_only,
                    h_rows,
                    h_rhs,
                    reward: reward_to_file(inst.reward(s)),
                },
            );
        }
        Self {
            horizon: space.horizon(),
            layers: space.layer_names(),
            alpha: inst.alpha.clone(),
            states,
            constraints: inst
                .constraints
                .iter()
                .map(|c| ConstraintFile {
                    states: c
                        .states
                        .iter()
                        .map(|&s| space.name(s).to_string())
                        .collect(),
                    bound: c.bound,
                })
                .collect(),
        }
    }
}

pub fn parse_problem(text: &str) -> Result<CmdpInstance> {
    serde_json::from_str::<ProblemFile>(text)?.into_instance()
}

pub fn problem_to_json(inst: &CmdpInstance) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ProblemFile::from_instance(
        inst,
    ))?)
}

pub fn read_problem(path: &Path) -> Result<CmdpInstance> {
    parse_problem(&read_text(path)?)
}

pub fn write_problem(inst: &CmdpInstance, path: &Path) -> Result<()> {
    write_text(path, &problem_to_json(inst)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub weight: f64,
    pub action: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyFile {
    Deterministic {
        actions: BTreeMap<String, Vec<f64>>,
    },
    Randomized {
        mixtures: BTreeMap<String, Vec<Atom>>,
    },
}

impl PolicyFile {
    pub fn from_policy(inst: &CmdpInstance, policy: &Policy) -> Self {
        let space = &inst.space;
        match policy {
            Policy::Deterministic(v) => PolicyFile::Deterministic {
                actions: v
                    .iter()
                    .enumerate()
                    .filter_map(|(s, a)| a.as_ref().map(|a| (space.name(s).to_string(), a.clone())))
                    .collect(),
            },
            Policy::Randomized(v) => PolicyFile::Randomized {
                mixtures: v
                    .iter()
                    .enumerate()
                    .filter_map(|(s, m)| {
                        m.as_ref().map(|m| {
                            let atoms = m
                                .iter()
                                .map(|(w, a)| Atom {
                                    weight: *w,
                                    action: a.clone(),
                                })
                                .collect();
                            (space.name(s).to_string(), atoms)
                        })
                    })
                    .collect(),
            },
        }
    }

    /// Maps state names onto `inst` and checks the result against it.
    pub fn into_policy(self, inst: &CmdpInstance) -> Result<Policy> {
        let space = &inst.space;
        let n = space.num_states();
        let id = |name: &str| {
            space
                .id(name)
                .ok_or_else(|| Error::Dimension(format!("policy names unknown state {name}")))
        };
        let policy = match self {
            PolicyFile::Deterministic { actions } => {
                let mut v = vec![None; n];
                for (name, a) in actions {
                    v[id(&name)?] = Some(a);
                }
                Policy::Deterministic(v)
            }
            PolicyFile::Randomized { mixtures } => {
                let mut v = vec![None; n];
                for (name, atoms) in mixtures {
                    v[id(&name)?] = Some(atoms.into_iter().map(|a| (a.weight, a.action)).collect());
                }
                Policy::Randomized(v)
            }
        };
        policy.check(inst, 1e-7)?;
        Ok(policy)
    }
}

/// Accepts a policy file or a solution file carrying one under `policy`.
pub fn parse_policy(inst: &CmdpInstance, text: &str) -> Result<Policy> {
    let mut value: serde_json::Value = serde_json::from_str(text)?;
    if value.get("type").is_none() {
        if let Some(inner) = value.get_mut("policy").map(serde_json::Value::take) {
            if inner.is_null() {
                return Err(Error::InvalidParameter(
                    "the solution file holds no policy".into(),
                ));
            }
            value = inner;
        }
    }
    serde_json::from_value::<PolicyFile>(value)?.into_policy(inst)
}

pub fn read_policy(inst: &CmdpInstance, path: &Path) -> Result<Policy> {
    parse_policy(inst, &read_text(path)?)
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = r#"{
        "horizon": 2,
        "layers": [["s"], ["good", "bad"]],
        "alpha": [1.0],
        "states": {
            "s": {"base": [0.5, 0.5], "epsilon": 0.4, "reward": {"type": "l1", "params": {}}}
        },
        "constraints": [{"states": ["bad"], "bound": 0.2}]
    }"#;

    #[test]
    fn defaults_fill_center_and_weights() {
        let inst = parse_problem(TINY).unwrap();
        assert_eq!(
            inst.reward(0),
            &RewardSpec::WeightedL1 {
                center: vec![0.5, 0.5],
                weights: vec![1.0, 1.0]
            }
        );
        assert_eq!(inst.constraints[0].states, vec![2]);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let bad = TINY.replace("\"alpha\"", "\"extra\": 1, \"alpha\"");
        assert!(parse_problem(&bad).is_err());
        let bad = TINY.replace("\"epsilon\"", "\"eps\": 1, \"epsilon\"");
        assert!(parse_problem(&bad).is_err());
        let bad = TINY.replace("\"params\": {}", "\"params\": {\"scale\": 2}");
        assert!(parse_problem(&bad).is_err());
    }

    #[test]
    fn missing_state_entry_is_named() {
        let bad = TINY.replace("\"s\": {", "\"q\": {");
        let err = parse_problem(&bad).unwrap_err().to_string();
        assert!(err.contains("state s"), "{err}");
    }

    #[test]
    fn problem_round_trip() {
        let inst = parse_problem(TINY).unwrap();
        let again = parse_problem(&problem_to_json(&inst).unwrap()).unwrap();
        assert_eq!(inst, again);
    }

    #[test]
    fn policy_round_trip_and_dimension_error() {
        let inst = parse_problem(TINY).unwrap();
        let pi = Policy::Randomized(vec![
            Some(vec![(0.5, vec![0.9, 0.1]), (0.5, vec![0.1, 0.9])]),
            None,
            None,
        ]);
        let text = serde_json::to_string(&PolicyFile::from_policy(&inst, &pi)).unwrap();
        assert_eq!(parse_policy(&inst, &text).unwrap(), pi);
        let err = parse_policy(&inst, r#"{"type":"deterministic","actions":{"s":[1,0,0]}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("state s"), "{err}");
    }
}
