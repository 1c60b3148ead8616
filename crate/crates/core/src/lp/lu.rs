//! Sparse LU factorization of a square basis matrix.
//!
//! Right-looking elimination with Markowitz pivot selection restricted to
//! entries passing a partial-pivoting threshold. The factors are stored as
//! an elimination sequence: for step `k` the pivot `(row_k, col_k)`, the
//! column of multipliers applied to the remaining rows, and the pivot row of
//! `U` over the columns still active at that step.

use std::collections::BTreeSet;

/// Relative threshold: a pivot must be at least this fraction of the largest
/// active entry in its column.
const THRESHOLD: f64 = 0.1;
/// Entries below this magnitude are never accepted as pivots.
const ABS_PIVOT_TOL: f64 = 1e-11;
/// Number of candidate columns inspected per pivot search.
const SEARCH_COLS: usize = 4;

#[derive(Debug)]
pub(crate) struct Singular {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct SparseLu {
    m: usize,
    pivot_row: Vec<usize>,
    pivot_col: Vec<usize>,
    pivot_val: Vec<f64>,
    l_cols: Vec<Vec<(usize, f64)>>,
    u_rows: Vec<Vec<(usize, f64)>>,
}

struct Active {
    rows: Vec<Vec<(usize, f64)>>,
    col_rows: Vec<Vec<usize>>,
    row_alive: Vec<bool>,
    col_alive: Vec<bool>,
    row_cnt: Vec<usize>,
    col_cnt: Vec<usize>,
    col_order: BTreeSet<(usize, usize)>,
    row_order: BTreeSet<(usize, usize)>,
}

impl Active {
    fn set_col_cnt(&mut self, c: usize, cnt: usize) {
        self.col_order.remove(&(self.col_cnt[c], c));
        self.col_cnt[c] = cnt;
        self.col_order.insert((cnt, c));
    }

    fn set_row_cnt(&mut self, r: usize, cnt: usize) {
        self.row_order.remove(&(self.row_cnt[r], r));
        self.row_cnt[r] = cnt;
        self.row_order.insert((cnt, r));
    }

    fn value(&self, r: usize, c: usize) -> Option<f64> {
        self.rows[r].iter().find(|&&(j, _)| j == c).map(|&(_, v)| v)
    }

    fn col_max(&self, c: usize) -> f64 {
        self.col_rows[c]
            .iter()
            .filter(|&&r| self.row_alive[r])
            .filter_map(|&r| self.value(r, c))
            .fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

impl SparseLu {
    /// Factorizes the `m × m` matrix whose column `p` is `columns[p]`
    /// (sparse `(row, value)` pairs).
    pub fn factor(m: usize, columns: &[&[(usize, f64)]]) -> Result<Self, Singular> {
        debug_assert_eq!(columns.len(), m);
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (c, col) in columns.iter().enumerate() {
            for &(r, v) in col.iter() {
                if v != 0.0 {
                    rows[r].push((c, v));
                    col_rows[c].push(r);
                }
            }
        }
        let row_cnt: Vec<usize> = rows.iter().map(Vec::len).collect();
        let col_cnt: Vec<usize> = col_rows.iter().map(Vec::len).collect();
        let mut a = Active {
            col_order: (0..m).map(|c| (col_cnt[c], c)).collect(),
            row_order: (0..m).map(|r| (row_cnt[r], r)).collect(),
            rows,
            col_rows,
            row_alive: vec![true; m],
            col_alive: vec![true; m],
            row_cnt,
            col_cnt,
        };

        let mut lu = SparseLu {
            m,
            pivot_row: Vec::with_capacity(m),
            pivot_col: Vec::with_capacity(m),
            pivot_val: Vec::with_capacity(m),
            l_cols: Vec::with_capacity(m),
            u_rows: Vec::with_capacity(m),
        };

        let mut work = vec![0.0; m];
        let mut mark = vec![usize::MAX; m];
        let mut seen = vec![usize::MAX; m];
        let mut stamp = 0usize;

        for step in 0..m {
            let Some((r, c, piv)) = Self::choose_pivot(&a) else {
                let rows = (0..m).filter(|&r| a.row_alive[r]).collect();
                let cols = (0..m).filter(|&c| a.col_alive[c]).collect();
                return Err(Singular { rows, cols });
            };

            let prow: Vec<(usize, f64)> = a.rows[r]
                .iter()
                .copied()
                .filter(|&(j, _)| j != c && a.col_alive[j])
                .collect();
            for &(j, v) in &prow {
                work[j] = v;
                mark[j] = step;
            }

            let mut lcol = Vec::new();
            let targets: Vec<usize> = a.col_rows[c]
                .iter()
                .copied()
                .filter(|&i| i != r && a.row_alive[i])
                .collect();
            for i in targets {
                let Some(pos) = a.rows[i].iter().position(|&(j, _)| j == c) else {
                    continue;
                };
                let aic = a.rows[i].swap_remove(pos).1;
                let l = aic / piv;
                lcol.push((i, l));
                stamp += 1;
                for entry in a.rows[i].iter_mut() {
                    if mark[entry.0] == step {
                        entry.1 -= l * work[entry.0];
                        seen[entry.0] = stamp;
                    }
                }
                for &(j, v) in &prow {
                    if seen[j] != stamp {
                        a.rows[i].push((j, -l * v));
                        a.col_rows[j].push(i);
                        let cnt = a.col_cnt[j] + 1;
                        a.set_col_cnt(j, cnt);
                    }
                }
                let cnt = a.rows[i].iter().filter(|&&(j, _)| a.col_alive[j]).count();
                // pivot column c is still alive here; it was removed from row i above
                a.set_row_cnt(i, cnt);
            }

            for &(j, _) in &prow {
                let cnt = a.col_cnt[j].saturating_sub(1);
                a.set_col_cnt(j, cnt);
            }
            a.row_order.remove(&(a.row_cnt[r], r));
            a.col_order.remove(&(a.col_cnt[c], c));
            a.row_alive[r] = false;
            a.col_alive[c] = false;

            lu.pivot_row.push(r);
            lu.pivot_col.push(c);
            lu.pivot_val.push(piv);
            lu.l_cols.push(lcol);
            lu.u_rows.push(prow);
        }
        Ok(lu)
    }

    fn choose_pivot(a: &Active) -> Option<(usize, usize, f64)> {
        // (markowitz cost, -|value|) ordering; lower is better
        let mut best: Option<(usize, f64, usize, usize, f64)> = None;
        fn consider(
            best: &mut Option<(usize, f64, usize, usize, f64)>,
            cost: usize,
            r: usize,
            c: usize,
            v: f64,
        ) {
            let better = match *best {
                None => true,
                Some((bc, bv, ..)) => cost < bc || (cost == bc && v.abs() > bv),
            };
            if better {
                *best = Some((cost, v.abs(), r, c, v));
            }
        }

        let mut searched = 0;
        for &(cnt, c) in a.col_order.iter() {
            if cnt == 0 {
                continue;
            }
            let cmax = a.col_max(c);
            if cmax < ABS_PIVOT_TOL {
                continue;
            }
            for &r in &a.col_rows[c] {
                if !a.row_alive[r] {
                    continue;
                }
                if let Some(v) = a.value(r, c) {
                    if v.abs() >= THRESHOLD * cmax && v.abs() >= ABS_PIVOT_TOL {
                        consider(&mut best, (a.row_cnt[r] - 1) * (cnt - 1), r, c, v);
                    }
                }
            }
            searched += 1;
            if searched >= SEARCH_COLS {
                break;
            }
            if matches!(best, Some((0, ..))) {
                break;
            }
        }

        if !matches!(best, Some((0, ..))) {
            // row singletons never create fill
            for &(cnt, r) in a.row_order.iter() {
                if cnt > 1 {
                    break;
                }
                if cnt == 0 {
                    continue;
                }
                if let Some(&(c, v)) = a.rows[r].iter().find(|&&(j, _)| a.col_alive[j]) {
                    let cmax = a.col_max(c);
                    if v.abs() >= THRESHOLD * cmax && v.abs() >= ABS_PIVOT_TOL {
                        consider(&mut best, 0, r, c, v);
                        break;
                    }
                }
            }
        }

        if best.is_none() {
            // exhaustive fallback before declaring singularity
            for &(cnt, c) in a.col_order.iter() {
                if cnt == 0 {
                    continue;
                }
                let cmax = a.col_max(c);
                if cmax < ABS_PIVOT_TOL {
                    continue;
                }
                for &r in &a.col_rows[c] {
                    if a.row_alive[r] {
                        if let Some(v) = a.value(r, c) {
                            if v.abs() >= THRESHOLD * cmax {
                                consider(&mut best, (a.row_cnt[r] - 1) * (cnt - 1), r, c, v);
                            }
                        }
                    }
                }
            }
        }
        best.map(|(_, _, r, c, v)| (r, c, v))
    }

    pub fn nnz(&self) -> usize {
        self.l_cols.iter().map(Vec::len).sum::<usize>()
            + self.u_rows.iter().map(Vec::len).sum::<usize>()
            + self.m
    }

    /// Solves `B x = b`. `rhs` is indexed by row and is overwritten; the
    /// result is indexed by basis position.
    pub fn solve(&self, rhs: &mut [f64]) -> Vec<f64> {
        for k in 0..self.m {
            let br = rhs[self.pivot_row[k]];
            if br != 0.0 {
                for &(i, l) in &self.l_cols[k] {
                    rhs[i] -= l * br;
                }
            }
        }
        let mut x = vec![0.0; self.m];
        for k in (0..self.m).rev() {
            let mut s = rhs[self.pivot_row[k]];
            for &(j, u) in &self.u_rows[k] {
                s -= u * x[j];
            }
            x[self.pivot_col[k]] = s / self.pivot_val[k];
        }
        x
    }

    /// Solves `Bᵀ y = c`. `c` is indexed by basis position and is
    /// overwritten; the result is indexed by row.
    pub fn solve_transpose(&self, c: &mut [f64]) -> Vec<f64> {
        let mut z = vec![0.0; self.m];
        for k in 0..self.m {
            let zr = c[self.pivot_col[k]] / self.pivot_val[k];
            z[self.pivot_row[k]] = zr;
            if zr != 0.0 {
                for &(j, u) in &self.u_rows[k] {
                    c[j] -= zr * u;
                }
            }
        }
        for k in (0..self.m).rev() {
            let acc: f64 = self.l_cols[k].iter().map(|&(i, l)| l * z[i]).sum();
            z[self.pivot_row[k]] -= acc;
        }
        z
    }
}
