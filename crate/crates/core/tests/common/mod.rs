//! Instance builders and independent oracles shared by the integration tests.
#![allow(dead_code)]

use cmdp_core::model::{box_polytope, CmdpInstance, LayeredStateSpace, RewardSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// One start state `s`, terminals `t1`, `t2`, box around (0.5, 0.5), bound on `t2`.
pub fn tiny(epsilon: f64, bound: f64, reward: RewardSpec) -> CmdpInstance {
    let space =
        LayeredStateSpace::new(vec![vec!["s".into()], vec!["t1".into(), "t2".into()]]).unwrap();
    let mut inst = CmdpInstance::new(space, vec![1.0]);
    inst.set_decision(0, box_polytope(&[0.5, 0.5], epsilon).unwrap(), reward);
    inst.add_constraint(vec![2], bound);
    inst
}

pub fn l1(center: &[f64]) -> RewardSpec {
    RewardSpec::WeightedL1 {
        center: center.to_vec(),
        weights: vec![1.0; center.len()],
    }
}

/// Vertices of `{a ∈ Δ : lo ≤ a ≤ hi}` by brute force: every coordinate but
/// one sits at a bound and the free one absorbs the remainder.
pub fn box_vertices_oracle(b: &[f64], eps: f64) -> Vec<Vec<f64>> {
    let n = b.len();
    let lo: Vec<f64> = b.iter().map(|x| (x - eps).max(0.0)).collect();
    let hi: Vec<f64> = b.iter().map(|x| (x + eps).min(1.0)).collect();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for free in 0..n {
        for mask in 0u32..(1 << (n - 1)) {
            let mut a = vec![0.0; n];
            let mut bit = 0;
            for k in 0..n {
                if k == free {
                    continue;
                }
                a[k] = if mask >> bit & 1 == 1 { hi[k] } else { lo[k] };
                bit += 1;
            }
            a[free] = 1.0 - a.iter().sum::<f64>();
            if a[free] < lo[free] - 1e-12 || a[free] > hi[free] + 1e-12 {
                continue;
            }
            if !out.iter().any(|v| linf(v, &a) < 1e-9) {
                out.push(a);
            }
        }
    }
    out
}

pub fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Same point sets up to order and tolerance.
pub fn same_points(a: &[Vec<f64>], b: &[Vec<f64>], tol: f64) -> bool {
    a.len() == b.len() && a.iter().all(|p| b.iter().any(|q| linf(p, q) <= tol))
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize, allow_zeros: bool) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n)
            .map(|_| {
                if allow_zeros && n > 1 && rng.random_bool(0.25) {
                    0.0
                } else {
                    rng.random_range(0.05..1.0)
                }
            })
            .collect();
        let s: f64 = v.iter().sum();
        if s > 0.0 {
            v.iter_mut().for_each(|x| *x /= s);
            // absorb rounding so the entries sum to one exactly enough
            let last = v.iter().rposition(|x| *x > 0.0).unwrap();
            let rest: f64 = v
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != last)
                .map(|(_, x)| x)
                .sum();
            v[last] = 1.0 - rest;
            return v;
        }
    }
}

pub struct RandomSpec {
    pub max_layer: usize,
    pub max_horizon: usize,
}

/// Random layered instance with box polytopes, affine rewards and one
/// quality constraint on a random set of non-initial states. The bound
/// starts at 1; callers tighten it.
pub fn random_affine_instance(rng: &mut ChaCha8Rng, spec: &RandomSpec) -> CmdpInstance {
    let horizon = rng.random_range(2..=spec.max_horizon);
    let sizes: Vec<usize> = (0..horizon)
        .map(|_| rng.random_range(1..=spec.max_layer))
        .collect();
    let layers = sizes
        .iter()
        .enumerate()
        .map(|(t, &n)| (0..n).map(|k| format!("s{t}_{k}")).collect())
        .collect();
    let space = LayeredStateSpace::new(layers).unwrap();
    let alpha = random_distribution(rng, sizes[0], false);
    let mut inst = CmdpInstance::new(space, alpha);
    for s in inst.space.decision_states().collect::<Vec<_>>() {
        let n = inst.space.successors(s).len();
        let b = random_distribution(rng, n, true);
        let eps = [0.0, 0.05, 0.1, 0.2, 0.4, 1.0][rng.random_range(0..6)];
        let e: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let f = rng.random_range(-0.5..0.5);
        inst.set_decision(
            s,
            box_polytope(&b, eps).unwrap(),
            RewardSpec::Affine { e, f },
        );
    }
    let candidates: Vec<usize> = (inst.space.layer(0).len()..inst.space.num_states()).collect();
    let mut q: Vec<usize> = candidates
        .iter()
        .copied()
        .filter(|_| rng.random_bool(0.3))
        .collect();
    if q.is_empty() {
        q.push(candidates[rng.random_range(0..candidates.len())]);
    }
    inst.add_constraint(q, 1.0);
    inst
}

/// Visitation and return of a deterministic policy by forward recursion.
pub fn forward(inst: &CmdpInstance, actions: &[Option<Vec<f64>>]) -> (Vec<f64>, f64) {
    let space = &inst.space;
    let mut d = vec![0.0; space.num_states()];
    for (i, &s) in space.layer(0).iter().enumerate() {
        d[s] = inst.alpha[i];
    }
    let mut ret = 0.0;
    for t in 0..space.horizon() - 1 {
        for &s in space.layer(t) {
            let a = actions[s].as_ref().unwrap();
            ret += d[s] * inst.reward(s).eval(a);
            for (k, &next) in space.layer(t + 1).iter().enumerate() {
                d[next] += d[s] * a[k];
            }
        }
    }
    (d, ret)
}

/// Number of deterministic vertex policies.
pub fn policy_count(vertices: &[Vec<Vec<f64>>], decision: &[usize]) -> f64 {
    decision.iter().map(|&s| vertices[s].len() as f64).product()
}

/// Best return over mixtures of deterministic vertex policies subject to a
/// single quality constraint with bound `q`. Each policy is a point
/// (mass, return); mixtures span the convex hull, so the answer is the upper
/// hull evaluated on `mass ≤ q`. `None` when no mixture is feasible.
pub fn mixture_oracle(inst: &CmdpInstance, vertices: &[Vec<Vec<f64>>], q: f64) -> Option<f64> {
    let points = policy_points(inst, vertices);
    upper_hull_max(points, q)
}

/// (constraint mass, return) of every deterministic vertex policy.
pub fn policy_points(inst: &CmdpInstance, vertices: &[Vec<Vec<f64>>]) -> Vec<(f64, f64)> {
    let decision: Vec<usize> = inst.space.decision_states().collect();
    let mut choice = vec![0usize; decision.len()];
    let mut points = Vec::new();
    let c = &inst.constraints[0];
    loop {
        let mut actions = vec![None; inst.space.num_states()];
        for (i, &s) in decision.iter().enumerate() {
            actions[s] = Some(vertices[s][choice[i]].clone());
        }
        let (d, ret) = forward(inst, &actions);
        let mass: f64 = c.states.iter().map(|&s| d[s]).sum();
        points.push((mass, ret));
        // odometer increment
        let mut i = 0;
        loop {
            if i == decision.len() {
                return points;
            }
            choice[i] += 1;
            if choice[i] < vertices[decision[i]].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

pub fn upper_hull_max(mut points: Vec<(f64, f64)>, q: f64) -> Option<f64> {
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    if points[0].0 > q + 1e-12 {
        return None;
    }
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in points {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut best = f64::NEG_INFINITY;
    for w in hull.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.0 <= q {
            best = best.max(a.1);
        }
        if a.0 <= q && b.0 > q && b.0 > a.0 {
            best = best.max(a.1 + (b.1 - a.1) * (q - a.0) / (b.0 - a.0));
        }
    }
    let last = *hull.last().unwrap();
    if last.0 <= q {
        best = best.max(last.1);
    }
    Some(best)
}

/// Best value of `w_ret · return + w_mass · mass` over deterministic vertex
/// policies, by backward induction over the vertex lists.
pub fn vertex_dp(inst: &CmdpInstance, vertices: &[Vec<Vec<f64>>], w_ret: f64, w_mass: f64) -> f64 {
    let space = &inst.space;
    let mut in_q = vec![false; space.num_states()];
    for &s in &inst.constraints[0].states {
        in_q[s] = true;
    }
    let mut w = vec![0.0; space.num_states()];
    for t in (0..space.horizon()).rev() {
        for &s in space.layer(t) {
            let own = if in_q[s] { w_mass } else { 0.0 };
            let future = if t + 1 == space.horizon() {
                0.0
            } else {
                let succ = space.successors(s);
                vertices[s]
                    .iter()
                    .map(|v| {
                        w_ret * inst.reward(s).eval(v)
                            + v.iter().zip(succ).map(|(p, &n)| p * w[n]).sum::<f64>()
                    })
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            w[s] = own + future;
        }
    }
    space
        .layer(0)
        .iter()
        .zip(&inst.alpha)
        .map(|(&s, a)| a * w[s])
        .sum()
}

/// Range of constraint mass over deterministic vertex policies.
pub fn mass_range(inst: &CmdpInstance, vertices: &[Vec<Vec<f64>>]) -> (f64, f64) {
    (
        -vertex_dp(inst, vertices, 0.0, -1.0),
        vertex_dp(inst, vertices, 0.0, 1.0),
    )
}

/// Mixture optimum with one quality constraint through the Lagrangian dual
/// `min_{λ ≥ 0} max_π [ρ(π) − λ (mass(π) − q)]`, which is exact for
/// mixtures. The inner max is [`vertex_dp`]; the outer is convex in `λ` and
/// minimized by golden-section search. Requires `q` strictly above the
/// minimum mass so the multiplier is bounded.
pub fn lagrangian_oracle(inst: &CmdpInstance, vertices: &[Vec<Vec<f64>>], q: f64) -> f64 {
    let (m_lo, _) = mass_range(inst, vertices);
    assert!(q > m_lo + 1e-6, "bound too close to the minimum mass");
    let spread = vertex_dp(inst, vertices, 1.0, 0.0) + vertex_dp(inst, vertices, -1.0, 0.0);
    let hi_lambda = 2.0 * spread / (q - m_lo) + 1.0;
    let g = |l: f64| vertex_dp(inst, vertices, 1.0, -l) + l * q;
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0, hi_lambda);
    let (mut c, mut d) = (b - phi * (b - a), a + phi * (b - a));
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + phi * (b - a);
            gd = g(d);
        }
    }
    g(0.0).min(gc.min(gd))
}

/// Box vertices from [`box_vertices_oracle`] for every decision state.
pub fn oracle_vertices(inst: &CmdpInstance) -> Vec<Vec<Vec<f64>>> {
    let mut out = vec![Vec::new(); inst.space.num_states()];
    for s in inst.space.decision_states() {
        let p = inst.polytope(s);
        out[s] = box_vertices_oracle(&p.base, p.epsilon().expect("box polytope"));
    }
    out
}

/// Random affine instance with a bound placed between the extreme masses.
pub fn random_constrained(
    rng: &mut ChaCha8Rng,
    spec: &RandomSpec,
) -> (CmdpInstance, Vec<Vec<Vec<f64>>>) {
    loop {
        let mut inst = random_affine_instance(rng, spec);
        let verts = oracle_vertices(&inst);
        let (lo, hi) = mass_range(&inst, &verts);
        if hi - lo < 1e-3 {
            continue;
        }
        inst.constraints[0].bound = lo + rng.random_range(0.15..0.85) * (hi - lo);
        return (inst, verts);
    }
}

/// One decision over the whole simplex Δ² with `r(a) = a₂²`, optionally
/// bounding the mass sent to the second terminal.
pub fn square_instance(bound: Option<f64>) -> CmdpInstance {
    use cmdp_core::model::{ActionPolytope, Curvature};
    let space =
        LayeredStateSpace::new(vec![vec!["s".into()], vec!["x".into(), "y".into()]]).unwrap();
    let mut inst = CmdpInstance::new(space, vec![1.0]);
    inst.set_decision(
        0,
        ActionPolytope::simplex(vec![1.0, 0.0]),
        RewardSpec::Quadratic {
            center: vec![0.0, 0.0],
            weights: vec![0.0, 1.0],
            curvature: Curvature::Convex,
        },
    );
    if let Some(q) = bound {
        inst.add_constraint(vec![2], q);
    }
    inst
}

/// Square-reward optimum: (1,0) w.p. 0.6 and (0,1) w.p. 0.4.
pub fn square_mixture() -> cmdp_core::model::Policy {
    cmdp_core::model::Policy::Randomized(vec![
        Some(vec![(0.6, vec![1.0, 0.0]), (0.4, vec![0.0, 1.0])]),
        None,
        None,
    ])
}

/// Two decision periods: `s` splits mass between `x` and `y`, which then
/// send mass to `good` or `bad`. L1 rewards around the bases; `bad ≤ bound`.
pub fn two_period(
    b_s: [f64; 2],
    b_x: [f64; 2],
    b_y: [f64; 2],
    eps: [f64; 3],
    bound: f64,
) -> CmdpInstance {
    let space = LayeredStateSpace::new(vec![
        vec!["s".into()],
        vec!["x".into(), "y".into()],
        vec!["good".into(), "bad".into()],
    ])
    .unwrap();
    let mut inst = CmdpInstance::new(space, vec![1.0]);
    for (s, (b, e)) in [b_s, b_x, b_y].iter().zip(eps).enumerate() {
        inst.set_decision(s, box_polytope(b, e).unwrap(), l1(b));
    }
    inst.add_constraint(vec![4], bound);
    inst
}

/// Greedy steers away from `y` in the first period because it assumes the
/// second period stays at its base; the global optimum corrects in `y`.
pub fn greedy_trap() -> CmdpInstance {
    two_period([0.5, 0.5], [0.9, 0.1], [0.3, 0.7], [0.4, 0.4, 0.4], 0.2)
}

/// Every base sends half the mass to `bad`; only modulating both periods
/// meets the bound.
pub fn greedy_dead_end() -> CmdpInstance {
    two_period([0.5, 0.5], [0.5, 0.5], [0.5, 0.5], [0.4, 0.45, 0.45], 0.1)
}

/// Grid search over (mass to y, bad share at x, bad share at y) with step
/// `1/steps`, evaluated in closed form. `None` if no grid point is feasible.
pub fn two_period_grid(inst: &CmdpInstance, steps: usize) -> Option<f64> {
    let range = |s: usize, k: usize| {
        let p = inst.polytope(s);
        let (lo, hi) = (-p.h_rhs[2 * k + 1], p.h_rhs[2 * k]);
        (lo.max(0.0), hi.min(1.0))
    };
    let bound = inst.constraints[0].bound;
    let grid =
        |(lo, hi): (f64, f64)| (0..=steps).map(move |i| lo + (hi - lo) * i as f64 / steps as f64);
    let mut best: Option<f64> = None;
    for p in grid(range(0, 1)) {
        for bx in grid(range(1, 1)) {
            for by in grid(range(2, 1)) {
                let acts = [[1.0 - p, p], [1.0 - bx, bx], [1.0 - by, by]];
                if (0..3).any(|s| !inst.polytope(s).contains(&acts[s], 1e-12)) {
                    continue;
                }
                if (1.0 - p) * bx + p * by > bound + 1e-12 {
                    continue;
                }
                let r = inst.reward(0).eval(&acts[0])
                    + (1.0 - p) * inst.reward(1).eval(&acts[1])
                    + p * inst.reward(2).eval(&acts[2]);
                best = Some(best.map_or(r, |b: f64| b.max(r)));
            }
        }
    }
    best
}
