use crate::error::{Error, Result};

/// One sparse constraint row `Σ coef·x_col (= | ≤) rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpRow {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl LpRow {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

/// Handle to a row returned by the builder methods.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowRef {
    Eq(usize),
    Le(usize),
}

/// A linear program in the form
///
/// ```text
/// maximize    cᵀx
/// subject to  A_eq x  = b_eq
///             A_in x ≤ b_in
///             lower ≤ x ≤ upper
/// ```
///
/// Rows are stored sparsely; every variable has a finite lower bound
/// (default 0) and an optional upper bound.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LpProblem {
    pub var_names: Vec<String>,
    pub objective: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<Option<f64>>,
    pub equalities: Vec<LpRow>,
    pub inequalities: Vec<LpRow>,
}

impl LpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn num_rows(&self) -> usize {
        self.equalities.len() + self.inequalities.len()
    }

    pub fn num_nonzeros(&self) -> usize {
        self.equalities
            .iter()
            .chain(&self.inequalities)
            .map(|r| r.coeffs.len())
            .sum()
    }

    /// Adds a variable with bounds `[0, ∞)` and returns its column index.
    pub fn add_var(&mut self, name: impl Into<String>, objective: f64) -> usize {
        self.var_names.push(name.into());
        self.objective.push(objective);
        self.lower.push(0.0);
        self.upper.push(None);
        self.objective.len() - 1
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: Option<f64>) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn add_eq(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        rhs: f64,
    ) -> RowRef {
        self.equalities.push(LpRow {
            name: name.into(),
            coeffs,
            rhs,
        });
        RowRef::Eq(self.equalities.len() - 1)
    }

    pub fn add_le(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        rhs: f64,
    ) -> RowRef {
        self.inequalities.push(LpRow {
            name: name.into(),
            coeffs,
            rhs,
        });
        RowRef::Le(self.inequalities.len() - 1)
    }

    /// `Σ coef·x ≥ rhs`, stored as the negated `≤` row.
    pub fn add_ge(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        rhs: f64,
    ) -> RowRef {
        let negated = coeffs.into_iter().map(|(j, a)| (j, -a)).collect();
        self.add_le(name, negated, -rhs)
    }

    pub fn row(&self, r: RowRef) -> &LpRow {
        match r {
            RowRef::Eq(i) => &self.equalities[i],
            RowRef::Le(i) => &self.inequalities[i],
        }
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Checks dimensions, finiteness and bound consistency.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if n == 0 {
            return Err(Error::InvalidProblem("problem has no variables".into()));
        }
        if self.var_names.len() != n || self.lower.len() != n || self.upper.len() != n {
            return Err(Error::InvalidProblem(format!(
                "column tables disagree: {} objective entries, {} names, {} lower, {} upper",
                n,
                self.var_names.len(),
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (j, &c) in self.objective.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::InvalidProblem(format!(
                    "objective coefficient of {} is not finite",
                    self.var_names[j]
                )));
            }
            if !self.lower[j].is_finite() {
                return Err(Error::InvalidProblem(format!(
                    "lower bound of {} must be finite",
                    self.var_names[j]
                )));
            }
            if let Some(u) = self.upper[j] {
                if u.is_nan() || u < self.lower[j] {
                    return Err(Error::InvalidProblem(format!(
                        "bounds of {} are inconsistent: [{}, {}]",
                        self.var_names[j], self.lower[j], u
                    )));
                }
            }
        }
        for row in self.equalities.iter().chain(&self.inequalities) {
            if !row.rhs.is_finite() {
                return Err(Error::InvalidProblem(format!(
                    "row {} has a non-finite right-hand side",
                    row.name
                )));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(Error::InvalidProblem(format!(
                        "row {} references column {} but there are only {} columns",
                        row.name, j, n
                    )));
                }
                if !a.is_finite() {
                    return Err(Error::InvalidProblem(format!(
                        "row {} has a non-finite coefficient on {}",
                        row.name, self.var_names[j]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound at `x`.
    pub fn primal_residual(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.equalities {
            worst = worst.max((row.activity(x) - row.rhs).abs());
        }
        for row in &self.inequalities {
            worst = worst.max(row.activity(x) - row.rhs);
        }
        for (j, &v) in x.iter().enumerate() {
            worst = worst.max(self.lower[j] - v);
            if let Some(u) = self.upper[j] {
                worst = worst.max(v - u);
            }
        }
        worst
    }

    /// Returns a copy whose rows have duplicate column entries merged and
    /// zero coefficients dropped.
    pub(crate) fn canonical_rows(rows: &[LpRow]) -> Vec<Vec<(usize, f64)>> {
        rows.iter()
            .map(|row| {
                let mut c = row.coeffs.clone();
                c.sort_by_key(|&(j, _)| j);
                let mut merged: Vec<(usize, f64)> = Vec::with_capacity(c.len());
                for (j, a) in c {
                    match merged.last_mut() {
                        Some((lj, la)) if *lj == j => *la += a,
                        _ => merged.push((j, a)),
                    }
                }
                merged.retain(|&(_, a)| a != 0.0);
                merged
            })
            .collect()
    }
}
