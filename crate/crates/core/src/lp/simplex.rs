//! Two-phase revised simplex.
//!
//! The problem is brought into the internal form `A x' = b, x' ≥ 0, b ≥ 0`
//! by shifting lower bounds, dropping fixed columns, turning upper bounds
//! into rows, adding slacks and artificials. The basis inverse is kept as a
//! sparse LU plus a product-form eta file that is refreshed periodically.
//!
//! Entering columns are priced by largest reduced cost (ties by lowest
//! index). After a run of degenerate pivots the solver switches to Bland's
//! rule (lowest improving index enters, lowest index leaves among ratio
//! ties) and stays there until the objective strictly improves, which rules
//! out cycling.

use std::time::Instant;

use super::lu::SparseLu;
use super::problem::LpProblem;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    pub pivot_tol: f64,
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    pub refactor_every: usize,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub degenerate_limit: usize,
    /// Use Bland's rule for every pivot.
    pub bland_only: bool,
    pub deadline: Option<Instant>,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iterations: 1_000_000,
            pivot_tol: 1e-9,
            feasibility_tol: 1e-8,
            optimality_tol: 1e-9,
            refactor_every: 100,
            degenerate_limit: 50,
            bland_only: false,
            deadline: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    TimeLimit,
}

/// Proof of infeasibility: multipliers `y_eq` (free) and `y_in ≥ 0` such that
/// `g = A_eqᵀ y_eq + A_inᵀ y_in` satisfies `min_{l ≤ x ≤ u} gᵀx > yᵀb`.
#[derive(Debug, Clone, PartialEq)]
pub struct FarkasCertificate {
    pub y_eq: Vec<f64>,
    pub y_in: Vec<f64>,
    /// `min_{l ≤ x ≤ u} gᵀx − yᵀb`, positive for a valid certificate.
    pub gap: f64,
    /// Names of the rows with the largest multipliers, for reporting.
    pub support: Vec<String>,
}

impl FarkasCertificate {
    fn new(problem: &LpProblem, y_eq: Vec<f64>, y_in: Vec<f64>) -> Self {
        let gap = Self::compute_gap(problem, &y_eq, &y_in);
        let mut weighted: Vec<(f64, &str)> = y_eq
            .iter()
            .zip(&problem.equalities)
            .chain(y_in.iter().zip(&problem.inequalities))
            .filter(|(y, _)| y.abs() > 1e-9)
            .map(|(y, row)| (y.abs(), row.name.as_str()))
            .collect();
        weighted.sort_by(|a, b| b.0.total_cmp(&a.0));
        let support = weighted
            .iter()
            .take(5)
            .map(|(_, n)| n.to_string())
            .collect();
        Self {
            y_eq,
            y_in,
            gap,
            support,
        }
    }

    fn compute_gap(problem: &LpProblem, y_eq: &[f64], y_in: &[f64]) -> f64 {
        let n = problem.num_vars();
        let mut g = vec![0.0; n];
        let mut yb = 0.0;
        for (row, &y) in problem.equalities.iter().zip(y_eq) {
            yb += y * row.rhs;
            for &(j, a) in &row.coeffs {
                g[j] += y * a;
            }
        }
        for (row, &y) in problem.inequalities.iter().zip(y_in) {
            yb += y * row.rhs;
            for &(j, a) in &row.coeffs {
                g[j] += y * a;
            }
        }
        // entries of g at round-off level count as zero
        let scale = y_eq.iter().chain(y_in).fold(1.0f64, |m, y| m.max(y.abs()));
        let zero_tol = 1e-12 * scale;
        let mut min_gx = 0.0;
        for j in 0..n {
            if g[j] >= -zero_tol {
                min_gx += g[j].max(0.0) * problem.lower[j];
            } else {
                match problem.upper[j] {
                    Some(u) => min_gx += g[j] * u,
                    None => return f64::NEG_INFINITY,
                }
            }
        }
        min_gx - yb
    }

    /// Independently re-checks the certificate against `problem`.
    pub fn verify(&self, problem: &LpProblem, tol: f64) -> bool {
        self.y_in.iter().all(|&y| y >= -tol)
            && Self::compute_gap(problem, &self.y_eq, &self.y_in) > tol
    }

    pub fn summary(&self) -> String {
        if self.support.is_empty() {
            format!("certificate gap {:.3e}", self.gap)
        } else {
            format!(
                "certificate gap {:.3e}; conflicting rows: {}",
                self.gap,
                self.support.join(", ")
            )
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub objective: f64,
    pub duals_eq: Vec<f64>,
    pub duals_in: Vec<f64>,
    pub iterations: usize,
    pub farkas: Option<FarkasCertificate>,
    /// Improving direction when unbounded.
    pub ray: Option<Vec<f64>>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Reduced costs `c − Aᵀy` in the original column space.
    pub fn reduced_costs(&self, problem: &LpProblem) -> Vec<f64> {
        let mut r = problem.objective.clone();
        for (row, &y) in problem.equalities.iter().zip(&self.duals_eq) {
            for &(j, a) in &row.coeffs {
                r[j] -= y * a;
            }
        }
        for (row, &y) in problem.inequalities.iter().zip(&self.duals_in) {
            for &(j, a) in &row.coeffs {
                r[j] -= y * a;
            }
        }
        r
    }

    /// Objective of the dual problem built from the stored multipliers.
    pub fn dual_objective(&self, problem: &LpProblem) -> f64 {
        let r = self.reduced_costs(problem);
        let mut obj: f64 = problem
            .equalities
            .iter()
            .zip(&self.duals_eq)
            .map(|(row, y)| row.rhs * y)
            .sum::<f64>()
            + problem
                .inequalities
                .iter()
                .zip(&self.duals_in)
                .map(|(row, y)| row.rhs * y)
                .sum::<f64>();
        for (j, &rj) in r.iter().enumerate() {
            if rj.abs() <= 1e-12 {
                continue;
            }
            if rj < 0.0 {
                obj += rj * problem.lower[j];
            } else {
                obj += rj * problem.upper[j].unwrap_or(f64::INFINITY);
            }
        }
        obj
    }

    /// Largest complementary-slackness violation (rows and bounds).
    pub fn complementarity_residual(&self, problem: &LpProblem) -> f64 {
        let mut worst: f64 = 0.0;
        for (row, &y) in problem.inequalities.iter().zip(&self.duals_in) {
            worst = worst.max((y * (row.rhs - row.activity(&self.x))).abs());
        }
        let r = self.reduced_costs(problem);
        for (j, &rj) in r.iter().enumerate() {
            let v = if rj < 0.0 {
                -rj * (self.x[j] - problem.lower[j])
            } else {
                match problem.upper[j] {
                    Some(u) => rj * (u - self.x[j]),
                    None => rj,
                }
            };
            worst = worst.max(v.abs());
        }
        worst
    }
}

pub fn solve_lp(problem: &LpProblem) -> Result<LpSolution> {
    solve_lp_with(problem, &SimplexOptions::default())
}

pub fn solve_lp_with(problem: &LpProblem, options: &SimplexOptions) -> Result<LpSolution> {
    problem.validate()?;
    let form = InternalForm::build(problem);
    let mut engine = Engine::new(&form, options);
    Ok(engine.run(problem))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ColKind {
    Structural(usize),
    Slack,
    Artificial,
}

#[derive(Debug, Clone, Copy)]
enum RowOrigin {
    Eq(usize),
    Le(usize),
    Upper,
}

struct InternalForm {
    m: usize,
    col_start: Vec<usize>,
    col_rows: Vec<usize>,
    col_vals: Vec<f64>,
    kind: Vec<ColKind>,
    b: Vec<f64>,
    cost: Vec<f64>,
    row_sign: Vec<f64>,
    row_origin: Vec<RowOrigin>,
    /// Column that starts basic in each row.
    initial_basic: Vec<usize>,
    /// Column used to repair a singular basis in each row.
    logical: Vec<usize>,
    /// Original columns with `lower == upper`, removed from the internal form.
    fixed: Vec<Option<f64>>,
}

impl InternalForm {
    fn build(p: &LpProblem) -> Self {
        let n = p.num_vars();
        let fixed: Vec<Option<f64>> = (0..n)
            .map(|j| match p.upper[j] {
                Some(u) if u - p.lower[j] <= 1e-12 => Some(p.lower[j]),
                _ => None,
            })
            .collect();
        let eq = LpProblem::canonical_rows(&p.equalities);
        let le = LpProblem::canonical_rows(&p.inequalities);

        let mut row_origin = Vec::new();
        let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
        let mut rhs = Vec::new();
        let mut push_row = |origin: RowOrigin, coeffs: &[(usize, f64)], b: f64| {
            let mut shifted = b;
            let mut kept = Vec::with_capacity(coeffs.len());
            for &(j, a) in coeffs {
                match fixed[j] {
                    Some(v) => shifted -= a * v,
                    None => {
                        shifted -= a * p.lower[j];
                        kept.push((j, a));
                    }
                }
            }
            row_origin.push(origin);
            rows.push(kept);
            rhs.push(shifted);
        };
        for (i, r) in eq.iter().enumerate() {
            push_row(RowOrigin::Eq(i), r, p.equalities[i].rhs);
        }
        for (i, r) in le.iter().enumerate() {
            push_row(RowOrigin::Le(i), r, p.inequalities[i].rhs);
        }
        for j in 0..n {
            if fixed[j].is_none() {
                if let Some(u) = p.upper[j] {
                    row_origin.push(RowOrigin::Upper);
                    rows.push(vec![(j, 1.0)]);
                    rhs.push(u - p.lower[j]);
                }
            }
        }
        let m = rows.len();

        let mut row_sign = vec![1.0; m];
        for i in 0..m {
            if rhs[i] < 0.0 {
                row_sign[i] = -1.0;
                rhs[i] = -rhs[i];
            }
        }

        // column-major storage of the structural part
        let mut struct_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, r) in rows.iter().enumerate() {
            for &(j, a) in r {
                struct_cols[j].push((i, row_sign[i] * a));
            }
        }

        let mut col_start = vec![0];
        let mut col_rows = Vec::new();
        let mut col_vals = Vec::new();
        let mut kind = Vec::new();
        let mut cost = Vec::new();
        for j in 0..n {
            if fixed[j].is_some() {
                continue;
            }
            for &(i, a) in &struct_cols[j] {
                col_rows.push(i);
                col_vals.push(a);
            }
            col_start.push(col_rows.len());
            kind.push(ColKind::Structural(j));
            cost.push(p.objective[j]);
        }

        let mut initial_basic = vec![usize::MAX; m];
        let mut logical = vec![usize::MAX; m];
        for i in 0..m {
            if !matches!(row_origin[i], RowOrigin::Eq(_)) {
                col_rows.push(i);
                col_vals.push(row_sign[i]);
                col_start.push(col_rows.len());
                kind.push(ColKind::Slack);
                cost.push(0.0);
                let s = kind.len() - 1;
                logical[i] = s;
                if row_sign[i] > 0.0 {
                    initial_basic[i] = s;
                }
            }
        }
        for i in 0..m {
            if initial_basic[i] == usize::MAX {
                col_rows.push(i);
                col_vals.push(1.0);
                col_start.push(col_rows.len());
                kind.push(ColKind::Artificial);
                cost.push(0.0);
                let a = kind.len() - 1;
                initial_basic[i] = a;
                if logical[i] == usize::MAX {
                    logical[i] = a;
                }
            }
        }

        Self {
            m,
            col_start,
            col_rows,
            col_vals,
            kind,
            b: rhs,
            cost,
            row_sign,
            row_origin,
            initial_basic,
            logical,
            fixed,
        }
    }

    fn n_cols(&self) -> usize {
        self.kind.len()
    }

    fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.col_start[j], self.col_start[j + 1]);
        (&self.col_rows[s..e], &self.col_vals[s..e])
    }

    fn dot(&self, j: usize, y: &[f64]) -> f64 {
        let (rows, vals) = self.column(j);
        rows.iter().zip(vals).map(|(&i, &v)| y[i] * v).sum()
    }
}

struct Eta {
    pos: usize,
    pivot: f64,
    others: Vec<(usize, f64)>,
}

enum PhaseEnd {
    Optimal,
    Unbounded { entering: usize, alpha: Vec<f64> },
    IterationLimit,
    TimeLimit,
}

struct Engine<'a> {
    f: &'a InternalForm,
    opt: &'a SimplexOptions,
    basis: Vec<usize>,
    position: Vec<usize>,
    x_b: Vec<f64>,
    lu: SparseLu,
    etas: Vec<Eta>,
    eta_nnz: usize,
    iterations: usize,
}

const NONBASIC: usize = usize::MAX;

impl<'a> Engine<'a> {
    fn new(f: &'a InternalForm, opt: &'a SimplexOptions) -> Self {
        let m = f.m;
        let basis = f.initial_basic.clone();
        let mut position = vec![NONBASIC; f.n_cols()];
        for (p, &c) in basis.iter().enumerate() {
            position[c] = p;
        }
        let mut e = Engine {
            f,
            opt,
            basis,
            position,
            x_b: vec![0.0; m],
            lu: SparseLu::factor(0, &[]).expect("empty factorization"),
            etas: Vec::new(),
            eta_nnz: 0,
            iterations: 0,
        };
        e.refactor();
        e
    }

    fn refactor(&mut self) {
        let m = self.f.m;
        loop {
            let cols: Vec<Vec<(usize, f64)>> = self
                .basis
                .iter()
                .map(|&c| {
                    let (r, v) = self.f.column(c);
                    r.iter().copied().zip(v.iter().copied()).collect()
                })
                .collect();
            let refs: Vec<&[(usize, f64)]> = cols.iter().map(Vec::as_slice).collect();
            match SparseLu::factor(m, &refs) {
                Ok(lu) => {
                    self.lu = lu;
                    break;
                }
                Err(singular) => {
                    // swap dependent basic columns for the logicals of uncovered rows
                    for (&pos, &row) in singular.cols.iter().zip(&singular.rows) {
                        let old = self.basis[pos];
                        let new = self.f.logical[row];
                        if self.position[new] != NONBASIC {
                            continue;
                        }
                        self.position[old] = NONBASIC;
                        self.basis[pos] = new;
                        self.position[new] = pos;
                    }
                }
            }
        }
        self.etas.clear();
        self.eta_nnz = 0;
        let mut rhs = self.f.b.clone();
        self.x_b = self.lu.solve(&mut rhs);
        for v in self.x_b.iter_mut() {
            if *v < 0.0 && *v > -self.opt.feasibility_tol {
                *v = 0.0;
            }
        }
    }

    fn ftran(&self, rhs: &mut [f64]) -> Vec<f64> {
        let mut x = self.lu.solve(rhs);
        for eta in &self.etas {
            let xp = x[eta.pos] / eta.pivot;
            x[eta.pos] = xp;
            if xp != 0.0 {
                for &(i, a) in &eta.others {
                    x[i] -= a * xp;
                }
            }
        }
        x
    }

    fn btran(&self, c: &mut [f64]) -> Vec<f64> {
        for eta in self.etas.iter().rev() {
            let s: f64 = eta.others.iter().map(|&(i, a)| c[i] * a).sum();
            c[eta.pos] = (c[eta.pos] - s) / eta.pivot;
        }
        self.lu.solve_transpose(c)
    }

    fn column_alpha(&self, j: usize) -> Vec<f64> {
        let mut rhs = vec![0.0; self.f.m];
        let (rows, vals) = self.f.column(j);
        for (&i, &v) in rows.iter().zip(vals) {
            rhs[i] = v;
        }
        self.ftran(&mut rhs)
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let mut cb: Vec<f64> = self.basis.iter().map(|&c| cost[c]).collect();
        self.btran(&mut cb)
    }

    fn pivot(&mut self, entering: usize, leave_pos: usize, alpha: &[f64], theta: f64) {
        for (i, a) in alpha.iter().enumerate() {
            if *a != 0.0 {
                self.x_b[i] -= theta * a;
            }
        }
        self.x_b[leave_pos] = theta;
        for v in self.x_b.iter_mut() {
            if *v < 0.0 && *v > -self.opt.feasibility_tol {
                *v = 0.0;
            }
        }
        let leaving = self.basis[leave_pos];
        self.position[leaving] = NONBASIC;
        self.basis[leave_pos] = entering;
        self.position[entering] = leave_pos;

        let others: Vec<(usize, f64)> = alpha
            .iter()
            .enumerate()
            .filter(|&(i, &a)| i != leave_pos && a.abs() > 1e-14)
            .map(|(i, &a)| (i, a))
            .collect();
        self.eta_nnz += others.len() + 1;
        self.etas.push(Eta {
            pos: leave_pos,
            pivot: alpha[leave_pos],
            others,
        });
        if self.etas.len() >= self.opt.refactor_every
            || self.eta_nnz > 4 * self.lu.nnz() + 4 * self.f.m
        {
            self.refactor();
        }
    }

    fn run_phase(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool) -> PhaseEnd {
        let n = self.f.n_cols();
        let mut degenerate_run = 0usize;
        let mut bland = self.opt.bland_only;
        loop {
            if self.iterations >= self.opt.max_iterations {
                return PhaseEnd::IterationLimit;
            }
            if self.iterations.is_multiple_of(64) {
                if let Some(deadline) = self.opt.deadline {
                    if Instant::now() >= deadline {
                        return PhaseEnd::TimeLimit;
                    }
                }
            }
            let y = self.duals(cost);

            let mut entering = None;
            let mut best = self.opt.optimality_tol;
            for j in 0..n {
                if self.position[j] != NONBASIC || !allowed(j) {
                    continue;
                }
                let d = cost[j] - self.f.dot(j, &y);
                if d > best {
                    entering = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                return PhaseEnd::Optimal;
            };
            let d_q = cost[q] - self.f.dot(q, &y);

            let alpha = self.column_alpha(q);
            let leave = if bland {
                self.ratio_test_bland(&alpha)
            } else {
                self.ratio_test_harris(&alpha)
            };
            let Some((r, theta)) = leave else {
                return PhaseEnd::Unbounded { entering: q, alpha };
            };
            self.iterations += 1;
            self.pivot(q, r, &alpha, theta);

            if theta * d_q <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run >= self.opt.degenerate_limit {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
                bland = self.opt.bland_only;
            }
        }
    }

    fn ratio_test_bland(&self, alpha: &[f64]) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &a) in alpha.iter().enumerate() {
            if a <= self.opt.pivot_tol {
                continue;
            }
            let t = self.x_b[i].max(0.0) / a;
            best = match best {
                None => Some((i, t)),
                Some((bi, bt)) => {
                    if t < bt - 1e-12 || (t <= bt + 1e-12 && self.basis[i] < self.basis[bi]) {
                        Some((i, t))
                    } else {
                        Some((bi, bt))
                    }
                }
            };
        }
        best
    }

    fn ratio_test_harris(&self, alpha: &[f64]) -> Option<(usize, f64)> {
        let tol = self.opt.feasibility_tol * 0.1;
        let mut bound = f64::INFINITY;
        for (i, &a) in alpha.iter().enumerate() {
            if a > self.opt.pivot_tol {
                bound = bound.min((self.x_b[i].max(0.0) + tol) / a);
            }
        }
        if bound == f64::INFINITY {
            return None;
        }
        let mut best: Option<(usize, f64)> = None;
        for (i, &a) in alpha.iter().enumerate() {
            if a > self.opt.pivot_tol && self.x_b[i].max(0.0) / a <= bound {
                match best {
                    Some((bi, _)) if alpha[bi] >= a => {}
                    _ => best = Some((i, a)),
                }
            }
        }
        best.map(|(i, _)| (i, self.x_b[i].max(0.0) / alpha[i]))
    }

    /// Pivots basic artificials at zero level out of the basis where some
    /// non-artificial column can replace them.
    fn drive_out_artificials(&mut self) {
        let n = self.f.n_cols();
        for pos in 0..self.f.m {
            let col = self.basis[pos];
            if self.f.kind[col] != ColKind::Artificial {
                continue;
            }
            let mut e = vec![0.0; self.f.m];
            e[pos] = 1.0;
            let rho = self.btran(&mut e);
            let mut best: Option<(usize, f64)> = None;
            for j in 0..n {
                if self.position[j] != NONBASIC || self.f.kind[j] == ColKind::Artificial {
                    continue;
                }
                let a = self.f.dot(j, &rho);
                if a.abs() > 1e-7 && best.is_none_or(|(_, ba)| a.abs() > ba) {
                    best = Some((j, a.abs()));
                }
            }
            if let Some((j, _)) = best {
                let alpha = self.column_alpha(j);
                let theta = self.x_b[pos] / alpha[pos];
                self.pivot(j, pos, &alpha, theta);
            }
        }
    }

    fn run(&mut self, problem: &LpProblem) -> LpSolution {
        let f = self.f;
        let has_artificials = f.kind.contains(&ColKind::Artificial);
        let n_orig = problem.num_vars();

        if has_artificials {
            let phase1: Vec<f64> = f
                .kind
                .iter()
                .map(|k| if *k == ColKind::Artificial { -1.0 } else { 0.0 })
                .collect();
            match self.run_phase(&phase1, &|_| true) {
                PhaseEnd::Optimal => {}
                PhaseEnd::IterationLimit => return self.partial(problem, LpStatus::IterationLimit),
                PhaseEnd::TimeLimit => return self.partial(problem, LpStatus::TimeLimit),
                PhaseEnd::Unbounded { .. } => {
                    unreachable!("phase one objective is bounded above by zero")
                }
            }
            self.refactor();
            let infeasibility: f64 = self
                .basis
                .iter()
                .zip(&self.x_b)
                .filter(|(c, _)| f.kind[**c] == ColKind::Artificial)
                .map(|(_, v)| v.max(0.0))
                .sum();
            if infeasibility > self.opt.feasibility_tol {
                let y = self.duals(&phase1);
                let (y_eq, y_in) = self.map_row_values(problem, &y);
                let mut sol = self.partial(problem, LpStatus::Infeasible);
                sol.farkas = Some(FarkasCertificate::new(problem, y_eq, y_in));
                return sol;
            }
            self.drive_out_artificials();
        }

        let kind = &f.kind;
        let phase2 = f.cost.clone();
        let end = self.run_phase(&phase2, &|j| kind[j] != ColKind::Artificial);
        match end {
            PhaseEnd::Optimal => {
                self.refactor();
                let y = self.duals(&phase2);
                let (duals_eq, duals_in) = self.map_row_values(problem, &y);
                let x = self.primal(problem);
                LpSolution {
                    status: LpStatus::Optimal,
                    objective: problem.objective_value(&x),
                    x,
                    duals_eq,
                    duals_in,
                    iterations: self.iterations,
                    farkas: None,
                    ray: None,
                }
            }
            PhaseEnd::Unbounded { entering, alpha } => {
                let mut ray = vec![0.0; n_orig];
                if let ColKind::Structural(j) = kind[entering] {
                    ray[j] = 1.0;
                }
                for (pos, &a) in alpha.iter().enumerate() {
                    if let ColKind::Structural(j) = kind[self.basis[pos]] {
                        ray[j] -= a;
                    }
                }
                let mut sol = self.partial(problem, LpStatus::Unbounded);
                sol.ray = Some(ray);
                sol
            }
            PhaseEnd::IterationLimit => self.partial(problem, LpStatus::IterationLimit),
            PhaseEnd::TimeLimit => self.partial(problem, LpStatus::TimeLimit),
        }
    }

    fn primal(&self, problem: &LpProblem) -> Vec<f64> {
        let mut x = problem.lower.clone();
        for (j, v) in self.f.fixed.iter().enumerate() {
            if let Some(v) = v {
                x[j] = *v;
            }
        }
        for (pos, &c) in self.basis.iter().enumerate() {
            if let ColKind::Structural(j) = self.f.kind[c] {
                x[j] = problem.lower[j] + self.x_b[pos].max(0.0);
            }
        }
        x
    }

    fn map_row_values(&self, problem: &LpProblem, y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut y_eq = vec![0.0; problem.equalities.len()];
        let mut y_in = vec![0.0; problem.inequalities.len()];
        for (i, origin) in self.f.row_origin.iter().enumerate() {
            let v = self.f.row_sign[i] * y[i];
            match *origin {
                RowOrigin::Eq(k) => y_eq[k] = v,
                RowOrigin::Le(k) => y_in[k] = v,
                RowOrigin::Upper => {}
            }
        }
        (y_eq, y_in)
    }

    fn partial(&self, problem: &LpProblem, status: LpStatus) -> LpSolution {
        let x = self.primal(problem);
        LpSolution {
            status,
            objective: problem.objective_value(&x),
            x,
            duals_eq: vec![0.0; problem.equalities.len()],
            duals_in: vec![0.0; problem.inequalities.len()],
            iterations: self.iterations,
            farkas: None,
            ray: None,
        }
    }
}
