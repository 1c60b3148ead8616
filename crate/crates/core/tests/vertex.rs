mod common;

use cmdp_core::lp::{solve_lp, LpProblem, LpStatus};
use cmdp_core::model::{box_polytope, ActionPolytope, Policy, RewardSpec};
use cmdp_core::occupancy::solve_occupancy;
use cmdp_core::vertex::{
    build_finite_cmdp, enumerate_all, enumerate_vertices, mix_to_point, point_to_mix, solve_finite,
    VertexKind, VertexOptions,
};
use cmdp_core::Error;
use common::{box_vertices_oracle, linf, same_points, RandomSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn segment_endpoints() {
    let v = enumerate_vertices(&box_polytope(&[0.5, 0.5], 0.4).unwrap()).unwrap();
    assert!(
        same_points(&v, &[vec![0.9, 0.1], vec![0.1, 0.9]], 1e-12),
        "{v:?}"
    );
}

#[test]
fn simplex_vertices_are_unit_vectors() {
    let v = enumerate_vertices(&ActionPolytope::simplex(vec![1.0, 0.0, 0.0])).unwrap();
    let units = vec![
        vec![1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, 0.0, 1.0],
    ];
    assert!(same_points(&v, &units, 1e-12), "{v:?}");
}

#[test]
fn three_dimensional_box_matches_oracle() {
    let t = 1.0 / 3.0;
    let v = enumerate_vertices(&box_polytope(&[t, t, t], 0.4).unwrap()).unwrap();
    let oracle = box_vertices_oracle(&[t, t, t], 0.4);
    assert!(same_points(&v, &oracle, 1e-9), "{v:?} vs {oracle:?}");
    assert!(v
        .iter()
        .any(|a| a.iter().any(|x| (x - (t + 0.4)).abs() < 1e-9) && a.contains(&0.0)));
}

#[test]
fn random_boxes_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let n = rng.random_range(2..=6);
        let mut b: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let s: f64 = b.iter().sum();
        b.iter_mut().for_each(|x| *x /= s);
        let eps = rng.random_range(0.0..0.6);
        let v = enumerate_vertices(&box_polytope(&b, eps).unwrap()).unwrap();
        let oracle = box_vertices_oracle(&b, eps);
        assert!(same_points(&v, &oracle, 1e-7), "b={b:?} eps={eps}");
    }
}

/// No vertex is a convex combination of the others.
#[test]
fn vertices_are_extreme() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..40 {
        let n = rng.random_range(3..=5);
        let mut b: Vec<f64> = (0..n).map(|_| rng.random_range(0.05..1.0)).collect();
        let s: f64 = b.iter().sum();
        b.iter_mut().for_each(|x| *x /= s);
        let v =
            enumerate_vertices(&box_polytope(&b, rng.random_range(0.05..0.5)).unwrap()).unwrap();
        for i in 0..v.len() {
            let others: Vec<Vec<f64>> = v
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, x)| x.clone())
                .collect();
            let mut lp = LpProblem::new();
            let lam: Vec<usize> = (0..others.len())
                .map(|j| lp.add_var(format!("l{j}"), 0.0))
                .collect();
            lp.add_eq("sum", lam.iter().map(|&j| (j, 1.0)).collect(), 1.0);
            for k in 0..n {
                lp.add_eq(
                    format!("c{k}"),
                    others.iter().zip(&lam).map(|(o, &j)| (j, o[k])).collect(),
                    v[i][k],
                );
            }
            assert_ne!(
                solve_lp(&lp).unwrap().status,
                LpStatus::Optimal,
                "{:?}",
                v[i]
            );
        }
    }
}

#[test]
fn dimension_limit_is_enforced() {
    let b = vec![1.0 / 30.0; 30];
    let err = enumerate_vertices(&box_polytope(&b, 0.01).unwrap()).unwrap_err();
    assert!(matches!(err, Error::DimensionLimit { .. }), "{err}");
    assert!(err.to_string().contains("occupancy"), "{err}");
}

#[test]
fn finite_rewards_at_vertices() {
    let inst = common::tiny(0.4, 0.2, common::l1(&[0.5, 0.5]));
    let vs = enumerate_all(&inst, VertexKind::Extreme, false, &VertexOptions::default()).unwrap();
    let fc = build_finite_cmdp(&inst, &vs);
    let rewards: Vec<f64> = fc.actions[0].iter().map(|a| a.reward).collect();
    assert_eq!(rewards.len(), 2);
    assert!(
        rewards.iter().all(|r| (r + 0.8).abs() < 1e-12),
        "{rewards:?}"
    );

    let point = common::tiny(0.0, 0.5, common::l1(&[0.5, 0.5]));
    let vs = enumerate_all(
        &point,
        VertexKind::Extreme,
        false,
        &VertexOptions::default(),
    )
    .unwrap();
    let fc = build_finite_cmdp(&point, &vs);
    assert_eq!(fc.actions[0].len(), 1);
    assert_eq!(fc.actions[0][0].reward, 0.0);
}

#[test]
fn vertex_only_l1_is_worse_than_continuous() {
    let inst = common::tiny(0.4, 0.2, common::l1(&[0.5, 0.5]));
    let vs = enumerate_all(&inst, VertexKind::Extreme, false, &VertexOptions::default()).unwrap();
    let sol = solve_finite(&inst, &build_finite_cmdp(&inst, &vs)).unwrap();
    assert!((sol.objective + 0.8).abs() < 1e-9);
    assert!(sol.d[2] <= 0.2 + 1e-9);
    assert!((solve_occupancy(&inst).unwrap().objective + 0.6).abs() < 1e-9);
}

#[test]
fn affine_reward_methods_agree() {
    // −a₂ is maximized at the box edge a₂ = 0.1, below the bound; +a₂ runs
    // into the bound at 0.2
    for (sign, want) in [(-1.0, -0.1), (1.0, 0.2)] {
        let inst = common::tiny(
            0.4,
            0.2,
            RewardSpec::Affine {
                e: vec![0.0, sign],
                f: 0.0,
            },
        );
        let vs =
            enumerate_all(&inst, VertexKind::Extreme, false, &VertexOptions::default()).unwrap();
        let finite = solve_finite(&inst, &build_finite_cmdp(&inst, &vs)).unwrap();
        let convex = solve_occupancy(&inst).unwrap();
        let oracle = common::mixture_oracle(&inst, &vs.vertices, 0.2).unwrap();
        assert!((oracle - want).abs() < 1e-12, "{oracle}");
        assert!(
            (finite.objective - want).abs() < 1e-9,
            "{}",
            finite.objective
        );
        assert!(
            (convex.objective - want).abs() < 1e-9,
            "{}",
            convex.objective
        );
    }
}

#[test]
fn slack_affine_optimum_is_deterministic_vertex() {
    let inst = common::tiny(
        0.4,
        1.0,
        RewardSpec::Affine {
            e: vec![1.0, 0.0],
            f: 0.0,
        },
    );
    let vs = enumerate_all(&inst, VertexKind::Extreme, false, &VertexOptions::default()).unwrap();
    let sol = solve_finite(&inst, &build_finite_cmdp(&inst, &vs)).unwrap();
    let Policy::Randomized(m) = sol.policy else {
        panic!()
    };
    let m = m[0].as_ref().unwrap();
    assert_eq!(m.len(), 1);
    assert!(linf(&m[0].1, &[0.9, 0.1]) < 1e-12);
}

#[test]
fn mixtures_collapse_to_points() {
    let one = |m| mix_to_point(&Policy::Randomized(vec![Some(m)]));
    type Mixture = Vec<(f64, Vec<f64>)>;
    let cases: Vec<(Mixture, Vec<f64>)> = vec![
        (
            vec![(0.6, vec![1.0, 0.0]), (0.4, vec![0.0, 1.0])],
            vec![0.6, 0.4],
        ),
        (vec![(1.0, vec![0.3, 0.7])], vec![0.3, 0.7]),
        (
            vec![
                (1.0 / 3.0, vec![1.0, 0.0, 0.0]),
                (1.0 / 3.0, vec![0.0, 1.0, 0.0]),
                (1.0 / 3.0, vec![0.0, 0.0, 1.0]),
            ],
            vec![1.0 / 3.0; 3],
        ),
    ];
    for (m, want) in cases {
        let Policy::Deterministic(v) = one(m) else {
            panic!()
        };
        assert!(linf(v[0].as_ref().unwrap(), &want) < 1e-15);
    }
}

#[test]
fn points_decompose_into_vertices() {
    let e = [vec![1.0, 0.0], vec![0.0, 1.0]];
    let m = point_to_mix(&[0.6, 0.4], &e).unwrap();
    let w = |v: &[f64], m: &[(f64, Vec<f64>)]| m.iter().find(|(_, a)| a == v).map_or(0.0, |x| x.0);
    assert!((w(&e[0], &m) - 0.6).abs() < 1e-9 && (w(&e[1], &m) - 0.4).abs() < 1e-9);

    let m = point_to_mix(&[0.0, 1.0], &e).unwrap();
    assert_eq!(m.len(), 1);
    assert!((m[0].0 - 1.0).abs() < 1e-12);

    let seg = [vec![0.9, 0.1], vec![0.1, 0.9]];
    let m = point_to_mix(&[0.5, 0.5], &seg).unwrap();
    assert!((w(&seg[0], &m) - 0.5).abs() < 1e-9 && (w(&seg[1], &m) - 0.5).abs() < 1e-9);

    assert!(matches!(
        point_to_mix(&[0.95, 0.05], &seg),
        Err(Error::OutsideHull)
    ));
}

#[test]
fn decomposition_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let t = 1.0 / 3.0;
    let p = box_polytope(&[t, t, t], 0.4).unwrap();
    let verts = enumerate_vertices(&p).unwrap();
    for _ in 0..200 {
        let w: Vec<f64> = verts.iter().map(|_| rng.random_range(0.0..1.0)).collect();
        let s: f64 = w.iter().sum();
        let mut a = vec![0.0; 3];
        for (wi, v) in w.iter().zip(&verts) {
            for k in 0..3 {
                a[k] += wi / s * v[k];
            }
        }
        let m = point_to_mix(&a, &verts).unwrap();
        assert!(m.len() <= 3);
        let Policy::Deterministic(back) = mix_to_point(&Policy::Randomized(vec![Some(m)])) else {
            panic!()
        };
        assert!(linf(back[0].as_ref().unwrap(), &a) < 1e-8);
    }
}

#[test]
fn brute_force_oracles_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let spec = RandomSpec {
        max_layer: 3,
        max_horizon: 3,
    };
    let mut checked = 0;
    while checked < 20 {
        let (inst, verts) = common::random_constrained(&mut rng, &spec);
        let decision: Vec<usize> = inst.space.decision_states().collect();
        if common::policy_count(&verts, &decision) > 20_000.0 {
            continue;
        }
        let q = inst.constraints[0].bound;
        let hull = common::mixture_oracle(&inst, &verts, q).unwrap();
        let dual = common::lagrangian_oracle(&inst, &verts, q);
        assert!((hull - dual).abs() < 1e-7, "{hull} vs {dual}");
        checked += 1;
    }
}

#[test]
fn extreme_and_convex_agree_on_affine_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let spec = RandomSpec {
        max_layer: 6,
        max_horizon: 4,
    };
    for _ in 0..20 {
        let (inst, verts) = common::random_constrained(&mut rng, &spec);
        let oracle = common::lagrangian_oracle(&inst, &verts, inst.constraints[0].bound);
        let vs =
            enumerate_all(&inst, VertexKind::Extreme, false, &VertexOptions::default()).unwrap();
        for s in inst.space.decision_states() {
            assert!(same_points(&vs.vertices[s], &verts[s], 1e-7));
        }
        let finite = solve_finite(&inst, &build_finite_cmdp(&inst, &vs)).unwrap();
        let convex = solve_occupancy(&inst).unwrap();
        assert!((finite.objective - convex.objective).abs() <= 1e-6);
        assert!(
            (finite.objective - oracle).abs() <= 1e-6,
            "{} vs {oracle}",
            finite.objective
        );
    }
}
