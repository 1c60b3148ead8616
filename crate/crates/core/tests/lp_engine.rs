use cmdp_core::lp::{
    solve_lp, solve_lp_with, to_mps_string, LpProblem, LpSolution, LpStatus, SimplexOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn assert_kkt(p: &LpProblem, s: &LpSolution) {
    assert_eq!(s.status, LpStatus::Optimal);
    let pr = p.primal_residual(&s.x);
    assert!(pr <= 1e-8, "primal residual {pr}");
    assert!(s.duals_in.iter().all(|&y| y >= -1e-9));
    let gap = (s.dual_objective(p) - s.objective).abs();
    assert!(gap <= 1e-7 * (1.0 + s.objective.abs()), "duality gap {gap}");
    let cs = s.complementarity_residual(p);
    assert!(cs <= 1e-7, "complementarity {cs}");
}

/// Random sparse LP built around a known feasible point, so it is feasible;
/// box bounds on every column keep it bounded.
fn random_feasible(rng: &mut ChaCha8Rng, n: usize, min_eq: usize) -> LpProblem {
    random_problem(rng, n, min_eq, |v| v)
}

/// Like `random_feasible` but every number sits on a 1/64 grid, so it
/// survives the 12-character fields of fixed-format MPS exactly.
fn random_grid(rng: &mut ChaCha8Rng, n: usize) -> LpProblem {
    random_problem(rng, n, 0, |v| (v * 64.0).round() / 64.0)
}

fn random_problem(
    rng: &mut ChaCha8Rng,
    n: usize,
    min_eq: usize,
    snap: impl Fn(f64) -> f64,
) -> LpProblem {
    let m_eq = rng.random_range(min_eq..n.max(min_eq + 1));
    let m_in = rng.random_range(0..2 * n);
    let mut p = LpProblem::new();
    for j in 0..n {
        let v = p.add_var(format!("x{j}"), snap(rng.random_range(-1.0..1.0)));
        let lo = if rng.random_bool(0.2) {
            snap(rng.random_range(-1.0..0.0))
        } else {
            0.0
        };
        p.set_bounds(v, lo, Some(lo + snap(rng.random_range(0.5..3.0))));
    }
    let x0: Vec<f64> = (0..n)
        .map(|j| {
            let (l, u) = (p.lower[j], p.upper[j].unwrap());
            if rng.random_bool(0.3) {
                l
            } else {
                snap(rng.random_range(l..u))
            }
        })
        .collect();
    let row = |rng: &mut ChaCha8Rng| -> Vec<(usize, f64)> {
        let k = rng.random_range(1..=n.min(4));
        (0..k)
            .map(|_| {
                (
                    rng.random_range(0..n),
                    rng.random_range(-2.0..2.0f64).round(),
                )
            })
            .collect()
    };
    for i in 0..m_eq {
        let r = row(rng);
        let rhs = r.iter().map(|&(j, a)| a * x0[j]).sum();
        p.add_eq(format!("e{i}"), r, rhs);
    }
    for i in 0..m_in {
        let r = row(rng);
        let act: f64 = r.iter().map(|&(j, a)| a * x0[j]).sum();
        let slack = if rng.random_bool(0.5) {
            0.0
        } else {
            snap(rng.random_range(0.0..1.0))
        };
        p.add_le(format!("l{i}"), r, act + slack);
    }
    p
}

#[test]
fn random_feasible_problems_satisfy_kkt() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let n = rng.random_range(1..25);
        let p = random_feasible(&mut rng, n, 0);
        let s = solve_lp(&p).unwrap();
        assert_kkt(&p, &s);
    }
}

#[test]
fn bland_only_agrees_with_default_pricing() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let bland = SimplexOptions {
        bland_only: true,
        ..Default::default()
    };
    for _ in 0..100 {
        let n = rng.random_range(2..15);
        let p = random_feasible(&mut rng, n, 0);
        let a = solve_lp(&p).unwrap();
        let b = solve_lp_with(&p, &bland).unwrap();
        assert_kkt(&p, &b);
        assert!((a.objective - b.objective).abs() <= 1e-7 * (1.0 + a.objective.abs()));
    }
}

#[test]
fn perturbed_problems_are_certified_infeasible() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = 0;
    for _ in 0..200 {
        let n = rng.random_range(2..12);
        let mut p = random_feasible(&mut rng, n, 1);
        // push a random equality far away from anything the box allows
        let i = rng.random_range(0..p.equalities.len());
        let reach: f64 = p.equalities[i]
            .coeffs
            .iter()
            .map(|(_, a)| a.abs() * 5.0)
            .sum();
        p.equalities[i].rhs += reach + 1.0;
        let s = solve_lp(&p).unwrap();
        if p.equalities[i].coeffs.iter().all(|(_, a)| *a == 0.0) {
            continue;
        }
        assert_eq!(s.status, LpStatus::Infeasible);
        let cert = s.farkas.expect("certificate");
        assert!(cert.verify(&p, 1e-9), "{cert:?}");
        seen += 1;
    }
    assert!(seen > 100);
}

#[test]
fn scaling_objective_scales_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let n = rng.random_range(2..15);
        let p = random_feasible(&mut rng, n, 0);
        let base = solve_lp(&p).unwrap();
        for gamma in [0.5, 3.0, 100.0] {
            let mut q = p.clone();
            q.objective.iter_mut().for_each(|c| *c *= gamma);
            let s = solve_lp(&q).unwrap();
            assert!(
                (s.objective - gamma * base.objective).abs()
                    <= 1e-7 * gamma.max(1.0) * (1.0 + base.objective.abs())
            );
            // the original objective at the new vertex is still optimal
            assert!(
                (p.objective_value(&s.x) - base.objective).abs()
                    <= 1e-7 * (1.0 + base.objective.abs())
            );
        }
    }
}

#[test]
fn spec_examples() {
    let mut p = LpProblem::new();
    let x = p.add_var("x", 1.0);
    p.add_le("c", vec![(x, 1.0)], 3.0);
    let s = solve_lp(&p).unwrap();
    assert_kkt(&p, &s);
    assert_eq!(s.x[0], 3.0);

    let mut p = LpProblem::new();
    let x = p.add_var("x", 1.0);
    let y = p.add_var("y", 1.0);
    p.add_eq("c", vec![(x, 1.0), (y, 1.0)], 1.0);
    let s = solve_lp(&p).unwrap();
    assert_kkt(&p, &s);
    assert!((s.objective - 1.0).abs() < 1e-12);

    let mut p = LpProblem::new();
    let x = p.add_var("x", 1.0);
    p.add_le("c", vec![(x, 1.0)], -1.0);
    assert_eq!(solve_lp(&p).unwrap().status, LpStatus::Infeasible);
}

/// Minimal fixed-format MPS reader, independent of the writer, used to
/// check that exported files describe the same program.
fn parse_mps(text: &str) -> LpProblem {
    use std::collections::BTreeMap;
    let mut section = "";
    let mut row_kind: BTreeMap<String, char> = BTreeMap::new();
    let mut row_order: Vec<String> = Vec::new();
    let mut obj_row = String::new();
    let mut cols: Vec<String> = Vec::new();
    let mut entries: BTreeMap<(String, String), f64> = BTreeMap::new();
    let mut rhs: BTreeMap<String, f64> = BTreeMap::new();
    let mut bounds: Vec<(String, String, f64)> = Vec::new();
    for line in text.lines() {
        if line.starts_with('*') || line.trim().is_empty() {
            continue;
        }
        if !line.starts_with(' ') {
            section = line.split_whitespace().next().unwrap();
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        match section {
            "ROWS" => {
                let k = f[0].chars().next().unwrap();
                if k == 'N' {
                    obj_row = f[1].to_string();
                } else {
                    row_kind.insert(f[1].to_string(), k);
                    row_order.push(f[1].to_string());
                }
            }
            "COLUMNS" => {
                if cols.last().map(String::as_str) != Some(f[0]) {
                    cols.push(f[0].to_string());
                }
                for pair in f[1..].chunks(2) {
                    entries.insert(
                        (f[0].to_string(), pair[0].to_string()),
                        pair[1].parse().unwrap(),
                    );
                }
            }
            "RHS" => {
                for pair in f[1..].chunks(2) {
                    rhs.insert(pair[0].to_string(), pair[1].parse().unwrap());
                }
            }
            "BOUNDS" => bounds.push((f[0].to_string(), f[2].to_string(), f[3].parse().unwrap())),
            _ => panic!("unexpected section {section}"),
        }
    }
    let mut p = LpProblem::new();
    for c in &cols {
        let obj = entries
            .get(&(c.clone(), obj_row.clone()))
            .copied()
            .unwrap_or(0.0);
        p.add_var(c.clone(), -obj);
    }
    for (kind, col, v) in bounds {
        let j = cols.iter().position(|c| *c == col).unwrap();
        match kind.as_str() {
            "LO" => p.lower[j] = v,
            "UP" => p.upper[j] = Some(v),
            "FX" => {
                p.lower[j] = v;
                p.upper[j] = Some(v);
            }
            _ => panic!("bound type {kind}"),
        }
    }
    for r in &row_order {
        let coeffs: Vec<(usize, f64)> = cols
            .iter()
            .enumerate()
            .filter_map(|(j, c)| entries.get(&(c.clone(), r.clone())).map(|&a| (j, a)))
            .collect();
        let b = rhs.get(r).copied().unwrap_or(0.0);
        match row_kind[r] {
            'E' => p.add_eq(r.clone(), coeffs, b),
            'L' => p.add_le(r.clone(), coeffs, b),
            k => panic!("row kind {k}"),
        };
    }
    p
}

#[test]
fn mps_round_trip_preserves_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..60 {
        let n = rng.random_range(1..15);
        let p = random_grid(&mut rng, n);
        let text = to_mps_string(&p, "rt").unwrap();
        let q = parse_mps(&text);
        let a = solve_lp(&p).unwrap();
        let b = solve_lp(&q).unwrap();
        assert_eq!(b.status, LpStatus::Optimal);
        assert!(
            (a.objective - b.objective).abs() <= 1e-6,
            "{} vs {}",
            a.objective,
            b.objective
        );
    }
}

#[test]
fn export_writes_file_and_reports_path_on_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mut p = LpProblem::new();
    let x = p.add_var("x", 1.0);
    p.add_le("c", vec![(x, 1.0)], 3.0);
    let path = dir.path().join("tiny.mps");
    cmdp_core::lp::export_lp(&p, &path).unwrap();
    assert!(std::fs::read_to_string(&path)
        .unwrap()
        .ends_with("ENDATA\n"));
    let bad = dir.path().join("missing").join("tiny.mps");
    let err = cmdp_core::lp::export_lp(&p, &bad).unwrap_err().to_string();
    assert!(err.contains("missing"), "{err}");
}
