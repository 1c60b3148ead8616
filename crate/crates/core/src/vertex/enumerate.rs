//! Exhaustive active-set vertex enumeration for `{a ∈ Δⁿ : H a ≤ h}`.
//!
//! Every vertex is the unique solution of `1ᵀa = 1` together with `n − 1`
//! linearly independent tight inequality rows. The search walks all such row
//! subsets depth first; a candidate row that is linearly dependent on the rows
//! already chosen (checked by incremental Gram–Schmidt) is skipped, which also
//! rules out opposite bounds on the same coordinate. Leaves are solved and
//! kept when feasible. The cost is combinatorial in the dimension.

use std::collections::HashMap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::model::ActionPolytope;

#[derive(Debug, Clone)]
pub struct VertexOptions {
    /// Largest free dimension (after pinned coordinates are removed) accepted.
    pub max_dim: usize,
    /// Vertices closer than this in L∞ are merged.
    pub dedup_tol: f64,
    pub deadline: Option<Instant>,
}

impl Default for VertexOptions {
    fn default() -> Self {
        Self {
            max_dim: 25,
            dedup_tol: 1e-7,
            deadline: None,
        }
    }
}

const DEP_TOL: f64 = 1e-9;
const FEAS_TOL: f64 = 1e-9;

/// A row `g·x ≤ r` over the free coordinates, normalized to `‖g‖ = 1`.
#[derive(Debug, Clone)]
struct Row {
    g: Vec<f64>,
    r: f64,
    /// Breakpoint rows may be tight at a vertex but never constrain it.
    soft: bool,
}

struct Reduced {
    /// Original coordinate of each free coordinate.
    free: Vec<usize>,
    n: usize,
    rows: Vec<Row>,
}

fn normalize(g: Vec<f64>, r: f64, soft: bool) -> Option<Row> {
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    (norm > 0.0).then(|| Row {
        g: g.into_iter().map(|x| x / norm).collect(),
        r: r / norm,
        soft,
    })
}

fn reduce(p: &ActionPolytope, breakpoints: &[(usize, f64)]) -> Result<Reduced> {
    let n = p.dim();
    let mut pinned = vec![false; n];
    for (row, &h) in p.h_rows.iter().zip(&p.h_rhs) {
        let mut nz = row.iter().enumerate().filter(|(_, c)| **c != 0.0);
        if let (Some((k, &c)), None) = (nz.next(), nz.next()) {
            if c > 0.0 && h <= 0.0 {
                if h < -FEAS_TOL * c {
                    return Err(Error::EmptyPolytope);
                }
                pinned[k] = true;
            }
        }
    }
    let free: Vec<usize> = (0..n).filter(|&k| !pinned[k]).collect();
    let m = free.len();
    if m == 0 {
        return Err(Error::EmptyPolytope);
    }

    let mut rows: Vec<Row> = Vec::new();
    for j in 0..m {
        let mut g = vec![0.0; m];
        g[j] = -1.0;
        rows.push(Row {
            g,
            r: 0.0,
            soft: false,
        });
    }
    for (row, &h) in p.h_rows.iter().zip(&p.h_rhs) {
        let g: Vec<f64> = free.iter().map(|&k| row[k]).collect();
        match normalize(g, h, false) {
            Some(r) => rows.push(r),
            None if h < -FEAS_TOL => return Err(Error::EmptyPolytope),
            None => {}
        }
    }
    // keep the tightest of each group of parallel rows
    let mut kept: Vec<Row> = Vec::new();
    'next: for r in rows {
        for k in kept.iter_mut() {
            if k.g.iter().zip(&r.g).all(|(a, b)| (a - b).abs() <= 1e-12) {
                if r.r < k.r {
                    k.r = r.r;
                }
                continue 'next;
            }
        }
        kept.push(r);
    }
    // rows a single coordinate cannot reach inside the simplex never bind
    kept.retain(|r| {
        let nz: Vec<&f64> = r.g.iter().filter(|x| **x != 0.0).collect();
        !(nz.len() == 1 && *nz[0] > 0.0 && r.r >= *nz[0])
    });
    for &(k, v) in breakpoints {
        if let Some(j) = free.iter().position(|&f| f == k) {
            if v > 0.0 && v < 1.0 {
                let mut g = vec![0.0; m];
                g[j] = 1.0;
                kept.push(Row {
                    g,
                    r: v,
                    soft: true,
                });
            }
        }
    }
    Ok(Reduced {
        free,
        n: m,
        rows: kept,
    })
}

/// Solves the square system `A x = b` by Gaussian elimination with partial
/// pivoting; `None` when (numerically) singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            if f != 0.0 {
                for j in col..n {
                    a[i][j] -= f * a[col][j];
                }
                b[i] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|j| a[i][j] * x[j]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    Some(x)
}

struct Search<'a> {
    red: &'a Reduced,
    basis: Vec<Vec<f64>>,
    chosen: Vec<usize>,
    found: Vec<Vec<f64>>,
    seen: HashMap<Vec<i64>, Vec<usize>>,
    tol: f64,
    deadline: Option<Instant>,
    ticks: u64,
    timed_out: bool,
}

impl Search<'_> {
    fn independent_residual(&self, g: &[f64]) -> Option<Vec<f64>> {
        let mut r = g.to_vec();
        for q in &self.basis {
            let dot: f64 = q.iter().zip(&r).map(|(a, b)| a * b).sum();
            for (x, y) in r.iter_mut().zip(q) {
                *x -= dot * y;
            }
        }
        let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
        (norm > DEP_TOL).then(|| r.into_iter().map(|x| x / norm).collect())
    }

    fn dfs(&mut self, start: usize) {
        if self.timed_out {
            return;
        }
        let need = self.red.n - 1 - self.chosen.len();
        if need == 0 {
            self.leaf();
            return;
        }
        let m = self.red.rows.len();
        for i in start..m {
            if m - i < need {
                break;
            }
            let Some(q) = self.independent_residual(&self.red.rows[i].g) else {
                continue;
            };
            self.basis.push(q);
            self.chosen.push(i);
            self.dfs(i + 1);
            self.chosen.pop();
            self.basis.pop();
        }
    }

    fn leaf(&mut self) {
        self.ticks += 1;
        if self.ticks.is_multiple_of(4096) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                    return;
                }
            }
        }
        let n = self.red.n;
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        a.push(vec![1.0; n]);
        b.push(1.0);
        for &i in &self.chosen {
            a.push(self.red.rows[i].g.clone());
            b.push(self.red.rows[i].r);
        }
        let Some(mut x) = solve_dense(a, b) else {
            return;
        };
        for row in self.red.rows.iter().filter(|r| !r.soft) {
            let act: f64 = row.g.iter().zip(&x).map(|(a, b)| a * b).sum();
            if act > row.r + FEAS_TOL {
                return;
            }
        }
        for v in x.iter_mut() {
            if v.abs() < 1e-13 {
                *v = 0.0;
            }
        }
        let key: Vec<i64> = x
            .iter()
            .map(|v| (v / (self.tol * 10.0)).round() as i64)
            .collect();
        let bucket = self.seen.entry(key).or_default();
        let dup = bucket.iter().any(|&j| {
            self.found[j]
                .iter()
                .zip(&x)
                .all(|(a, b)| (a - b).abs() <= self.tol)
        });
        if !dup {
            bucket.push(self.found.len());
            self.found.push(x);
        }
    }
}

fn run(
    p: &ActionPolytope,
    breakpoints: &[(usize, f64)],
    opts: &VertexOptions,
) -> Result<Vec<Vec<f64>>> {
    let red = reduce(p, breakpoints)?;
    if red.n > opts.max_dim {
        return Err(Error::DimensionLimit {
            dim: red.n,
            limit: opts.max_dim,
        });
    }
    let ones = vec![1.0 / (red.n as f64).sqrt(); red.n];
    let mut search = Search {
        red: &red,
        basis: vec![ones],
        chosen: Vec::new(),
        found: Vec::new(),
        seen: HashMap::new(),
        tol: opts.dedup_tol,
        deadline: opts.deadline,
        ticks: 0,
        timed_out: false,
    };
    search.dfs(0);
    if search.timed_out {
        return Err(Error::Timeout);
    }
    if search.found.is_empty() {
        return Err(Error::EmptyPolytope);
    }
    let n = p.dim();
    let mut out: Vec<Vec<f64>> = search
        .found
        .into_iter()
        .map(|x| {
            let mut full = vec![0.0; n];
            for (j, &k) in red.free.iter().enumerate() {
                full[k] = x[j];
            }
            full
        })
        .collect();
    out.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| y.total_cmp(x))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

/// All vertices of the polytope, sorted lexicographically (descending).
pub fn enumerate_vertices(p: &ActionPolytope) -> Result<Vec<Vec<f64>>> {
    enumerate_vertices_with(p, &VertexOptions::default())
}

pub fn enumerate_vertices_with(p: &ActionPolytope, opts: &VertexOptions) -> Result<Vec<Vec<f64>>> {
    run(p, &[], opts)
}

/// Vertices of the polytope cut by the hyperplanes `a_k = v` in
/// `breakpoints`: the extreme points of every cell on which a separable
/// piecewise-linear function with those kinks is affine.
pub fn enumerate_cell_vertices(
    p: &ActionPolytope,
    breakpoints: &[(usize, f64)],
    opts: &VertexOptions,
) -> Result<Vec<Vec<f64>>> {
    run(p, breakpoints, opts)
}
