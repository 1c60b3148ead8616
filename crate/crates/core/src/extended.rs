//! Positively homogeneous extensions `r̄(a) = 1ᵀa · r(a / 1ᵀa)` of rewards
//! and action-set rows, defined on the whole nonnegative orthant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{ActionPolytope, Curvature, RewardSpec};

/// Homogenized reward.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedReward {
    pub spec: RewardSpec,
}

impl ExtendedReward {
    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn eval(&self, a: &[f64]) -> f64 {
        let mass: f64 = a.iter().sum();
        match &self.spec {
            RewardSpec::Affine { e, f } => {
                e.iter().zip(a).map(|(x, y)| x * y).sum::<f64>() + mass * f
            }
            RewardSpec::WeightedL1 { center, weights } => -a
                .iter()
                .zip(center)
                .zip(weights)
                .map(|((x, c), w)| w * (x - mass * c).abs())
                .sum::<f64>(),
            RewardSpec::Quadratic {
                center,
                weights,
                curvature,
            } => {
                if mass <= 0.0 {
                    return 0.0;
                }
                let sq: f64 = a
                    .iter()
                    .zip(center)
                    .zip(weights)
                    .map(|((x, c), w)| w * (x - mass * c) * (x - mass * c))
                    .sum::<f64>()
                    / mass;
                match curvature {
                    Curvature::Concave => -sq,
                    Curvature::Convex => sq,
                }
            }
        }
    }
}

pub fn extend_reward(spec: &RewardSpec) -> ExtendedReward {
    ExtendedReward { spec: spec.clone() }
}

/// `coeffs · a ≤ 0`, the homogenized form of `H_j a ≤ h_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtendedConstraintRow {
    pub coeffs: Vec<f64>,
}

impl ExtendedConstraintRow {
    pub fn eval(&self, a: &[f64]) -> f64 {
        self.coeffs.iter().zip(a).map(|(c, x)| c * x).sum()
    }
}

/// One row `(H_j − h_j 1ᵀ) a ≤ 0` per polytope row.
pub fn extend_polytope(p: &ActionPolytope) -> Vec<ExtendedConstraintRow> {
    p.h_rows
        .iter()
        .zip(&p.h_rhs)
        .map(|(row, h)| ExtendedConstraintRow {
            coeffs: row.iter().map(|x| x - h).collect(),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Concave,
    Convex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MidpointCheck {
    pub passed: bool,
    /// First failing pair, if any.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// Midpoint test of `shape` on `samples` random pairs from `[0,1]^dim \ {0}`.
pub fn check_shape(ext: &ExtendedReward, shape: Shape, samples: usize, seed: u64) -> MidpointCheck {
    let dim = ext.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        if v.iter().any(|x| *x > 0.0) {
            return v;
        }
    };
    for _ in 0..samples {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        let lhs = ext.eval(&mid);
        let rhs = 0.5 * (ext.eval(&x) + ext.eval(&y));
        let ok = match shape {
            Shape::Concave => lhs >= rhs - 1e-9,
            Shape::Convex => lhs <= rhs + 1e-9,
        };
        if !ok {
            return MidpointCheck {
                passed: false,
                witness: Some((x, y)),
            };
        }
    }
    MidpointCheck {
        passed: true,
        witness: None,
    }
}

/// Midpoint concavity test with a fixed seed.
pub fn check_concavity(ext: &ExtendedReward, samples: usize) -> MidpointCheck {
    check_shape(ext, Shape::Concave, samples, 0x5eed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_extension() {
        let ext = extend_reward(&RewardSpec::Affine {
            e: vec![1.0, 2.0],
            f: 3.0,
        });
        assert_eq!(ext.eval(&[1.0, 1.0]), 9.0);
    }

    #[test]
    fn l1_extension_vanishes_on_center_ray() {
        let ext = extend_reward(&RewardSpec::WeightedL1 {
            center: vec![0.5, 0.5],
            weights: vec![1.0, 1.0],
        });
        assert_eq!(ext.eval(&[1.0, 1.0]), 0.0);
    }

    #[test]
    fn zero_maps_to_zero() {
        for spec in [
            RewardSpec::Affine {
                e: vec![1.0, -2.0],
                f: 3.0,
            },
            RewardSpec::WeightedL1 {
                center: vec![0.2, 0.8],
                weights: vec![1.0, 3.0],
            },
            RewardSpec::quadratic(vec![0.2, 0.8], Curvature::Convex),
            RewardSpec::quadratic(vec![0.2, 0.8], Curvature::Concave),
        ] {
            assert_eq!(extend_reward(&spec).eval(&[0.0, 0.0]), 0.0);
        }
    }

    #[test]
    fn box_rows() {
        let p = crate::model::box_polytope(&[0.5, 0.5], 0.4).unwrap();
        let rows = extend_polytope(&p);
        assert!(rows.iter().all(|r| r.eval(&[0.45, 0.05]) <= 1e-12));
        assert!(rows.iter().any(|r| r.eval(&[0.5, 0.0]) > 0.0));
        assert!(rows.iter().all(|r| r.eval(&[0.0, 0.0]) == 0.0));
    }

    #[test]
    fn convex_quadratic_fails_concavity_with_witness() {
        let ext = extend_reward(&RewardSpec::quadratic(vec![0.5, 0.5], Curvature::Convex));
        let check = check_concavity(&ext, 1000);
        assert!(!check.passed);
        let (x, y) = check.witness.unwrap();
        let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
        assert!(ext.eval(&mid) < 0.5 * (ext.eval(&x) + ext.eval(&y)));
    }
}
