/// Sign of a quadratic deviation reward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Curvature {
    /// `−‖a − ā‖²`
    Concave,
    /// `+‖a − ā‖²`
    Convex,
}

/// Immediate reward `r(s, a)` of choosing transition vector `a` in a state.
#[derive(Debug, Clone, PartialEq)]
pub enum RewardSpec {
    /// `eᵀa + f`
    Affine { e: Vec<f64>, f: f64 },
    /// `−Σ w_k |a_k − ā_k|`
    WeightedL1 { center: Vec<f64>, weights: Vec<f64> },
    /// `∓Σ w_k (a_k − ā_k)²`; plain `∓‖a − ā‖²` has unit weights.
    Quadratic {
        center: Vec<f64>,
        weights: Vec<f64>,
        curvature: Curvature,
    },
}

impl RewardSpec {
    /// `±‖a − center‖²`.
    pub fn quadratic(center: Vec<f64>, curvature: Curvature) -> Self {
        let weights = vec![1.0; center.len()];
        RewardSpec::Quadratic {
            center,
            weights,
            curvature,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            RewardSpec::Affine { e, .. } => e.len(),
            RewardSpec::WeightedL1 { center, .. } | RewardSpec::Quadratic { center, .. } => {
                center.len()
            }
        }
    }

    pub fn eval(&self, a: &[f64]) -> f64 {
        match self {
            RewardSpec::Affine { e, f } => e.iter().zip(a).map(|(x, y)| x * y).sum::<f64>() + f,
            RewardSpec::WeightedL1 { center, weights } => -center
                .iter()
                .zip(weights)
                .zip(a)
                .map(|((c, w), x)| w * (x - c).abs())
                .sum::<f64>(),
            RewardSpec::Quadratic {
                center,
                weights,
                curvature,
            } => {
                let sq: f64 = center
                    .iter()
                    .zip(weights)
                    .zip(a)
                    .map(|((c, w), x)| w * (x - c) * (x - c))
                    .sum();
                match curvature {
                    Curvature::Concave => -sq,
                    Curvature::Convex => sq,
                }
            }
        }
    }

    pub fn is_concave(&self) -> bool {
        !matches!(
            self,
            RewardSpec::Quadratic {
                curvature: Curvature::Convex,
                ..
            }
        )
    }

    pub fn is_convex(&self) -> bool {
        matches!(
            self,
            RewardSpec::Affine { .. }
                | RewardSpec::Quadratic {
                    curvature: Curvature::Convex,
                    ..
                }
        )
    }

    /// Short family name used in messages and files.
    pub fn kind(&self) -> &'static str {
        match self {
            RewardSpec::Affine { .. } => "affine",
            RewardSpec::WeightedL1 { .. } => "weighted_l1",
            RewardSpec::Quadratic {
                curvature: Curvature::Concave,
                ..
            } => "quadratic_concave",
            RewardSpec::Quadratic {
                curvature: Curvature::Convex,
                ..
            } => "quadratic_convex",
        }
    }

    /// Problems with the parameters for an action space of dimension `n`.
    pub fn problems(&self, n: usize) -> Vec<String> {
        let mut out = Vec::new();
        let vecs: Vec<(&str, &Vec<f64>)> = match self {
            RewardSpec::Affine { e, f } => {
                if !f.is_finite() {
                    out.push("offset is not finite".to_string());
                }
                vec![("coefficients", e)]
            }
            RewardSpec::WeightedL1 { center, weights } => {
                if weights.iter().any(|w| *w < 0.0) {
                    out.push("weights must be nonnegative".to_string());
                }
                vec![("center", center), ("weights", weights)]
            }
            RewardSpec::Quadratic {
                center, weights, ..
            } => {
                if weights.iter().any(|w| *w < 0.0) {
                    out.push("weights must be nonnegative".to_string());
                }
                vec![("center", center), ("weights", weights)]
            }
        };
        for (label, v) in vecs {
            if v.len() != n {
                out.push(format!(
                    "{label} has length {} but the next layer has {n} states",
                    v.len()
                ));
            }
            if v.iter().any(|x| !x.is_finite()) {
                out.push(format!("{label} contains non-finite values"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_evaluate() {
        let aff = RewardSpec::Affine {
            e: vec![1.0, 2.0],
            f: 3.0,
        };
        assert_eq!(aff.eval(&[0.5, 0.5]), 4.5);
        let l1 = RewardSpec::WeightedL1 {
            center: vec![0.5, 0.5],
            weights: vec![1.0, 2.0],
        };
        assert!((l1.eval(&[0.9, 0.1]) + 1.2).abs() < 1e-15);
        let q = RewardSpec::quadratic(vec![1.0, 0.0], Curvature::Convex);
        assert!((q.eval(&[0.6, 0.4]) - 0.32).abs() < 1e-15);
        assert!(!q.is_concave() && q.is_convex());
        let a2sq = RewardSpec::Quadratic {
            center: vec![0.0, 0.0],
            weights: vec![0.0, 1.0],
            curvature: Curvature::Convex,
        };
        assert!((a2sq.eval(&[0.6, 0.4]) - 0.16).abs() < 1e-15);
    }

    #[test]
    fn negative_weights_are_reported() {
        let l1 = RewardSpec::WeightedL1 {
            center: vec![0.5, 0.5],
            weights: vec![1.0, -1.0],
        };
        assert_eq!(l1.problems(2).len(), 1);
        assert_eq!(l1.problems(3).len(), 3);
    }
}
