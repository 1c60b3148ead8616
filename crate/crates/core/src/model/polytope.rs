use crate::error::{Error, Result};

/// How a polytope was specified, kept so instances serialize back to the
/// same form.
#[derive(Debug, Clone, PartialEq)]
pub enum PolytopeForm {
    /// `‖a − b‖_∞ ≤ ε`; with `support_only` the coordinates where `b` is zero
    /// are pinned to zero.
    Box {
        epsilon: f64,
        support_only: bool,
    },
    Explicit,
}

/// `{a ∈ Δⁿ : H a ≤ h}` together with the base transition vector `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionPolytope {
    pub base: Vec<f64>,
    pub h_rows: Vec<Vec<f64>>,
    pub h_rhs: Vec<f64>,
    pub form: PolytopeForm,
}

fn check_distribution(b: &[f64]) -> Result<()> {
    if b.is_empty() {
        return Err(Error::InvalidParameter("base vector is empty".into()));
    }
    if b.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::InvalidParameter(
            "base vector must be finite and nonnegative".into(),
        ));
    }
    let sum: f64 = b.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "base vector sums to {sum}"
        )));
    }
    Ok(())
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !epsilon.is_finite() || epsilon < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be finite and nonnegative, got {epsilon}"
        )));
    }
    Ok(())
}

impl ActionPolytope {
    pub fn explicit(base: Vec<f64>, h_rows: Vec<Vec<f64>>, h_rhs: Vec<f64>) -> Self {
        Self {
            base,
            h_rows,
            h_rhs,
            form: PolytopeForm::Explicit,
        }
    }

    /// Whole simplex around `base` (no extra rows).
    pub fn simplex(base: Vec<f64>) -> Self {
        Self::explicit(base, Vec::new(), Vec::new())
    }

    /// Box of half-width `epsilon` around `b`: rows `a_k ≤ b_k + ε` and
    /// `−a_k ≤ −max(b_k − ε, 0)` for every coordinate.
    pub fn box_around(b: &[f64], epsilon: f64) -> Result<Self> {
        check_distribution(b)?;
        check_epsilon(epsilon)?;
        let mut p = Self::build_box(b, epsilon, |_| true);
        p.form = PolytopeForm::Box {
            epsilon,
            support_only: false,
        };
        Ok(p)
    }

    /// Box around `b` restricted to the support of `b`: coordinates with
    /// `b_k = 0` get the single row `a_k ≤ 0`.
    pub fn box_on_support(b: &[f64], epsilon: f64) -> Result<Self> {
        check_distribution(b)?;
        check_epsilon(epsilon)?;
        let mut p = Self::build_box(b, epsilon, |k| b[k] > 0.0);
        p.form = PolytopeForm::Box {
            epsilon,
            support_only: true,
        };
        Ok(p)
    }

    fn build_box(b: &[f64], epsilon: f64, free: impl Fn(usize) -> bool) -> Self {
        let n = b.len();
        let mut rows = Vec::with_capacity(2 * n);
        let mut rhs = Vec::with_capacity(2 * n);
        for k in 0..n {
            let mut up = vec![0.0; n];
            up[k] = 1.0;
            if !free(k) {
                rows.push(up);
                rhs.push(0.0);
                continue;
            }
            rows.push(up);
            rhs.push(b[k] + epsilon);
            let mut lo = vec![0.0; n];
            lo[k] = -1.0;
            rows.push(lo);
            rhs.push(-(b[k] - epsilon).max(0.0));
        }
        Self::explicit(b.to_vec(), rows, rhs)
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn num_rows(&self) -> usize {
        self.h_rows.len()
    }

    /// Largest `H_j a − h_j` (or `−∞` without rows).
    pub fn row_violation(&self, a: &[f64]) -> f64 {
        self.h_rows
            .iter()
            .zip(&self.h_rhs)
            .map(|(row, h)| row.iter().zip(a).map(|(x, y)| x * y).sum::<f64>() - h)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest violation of `a ∈ Δⁿ` and `H a ≤ h`.
    pub fn violation(&self, a: &[f64]) -> f64 {
        if a.len() != self.dim() {
            return f64::INFINITY;
        }
        let neg = a.iter().map(|v| -v).fold(0.0, f64::max);
        let sum = (a.iter().sum::<f64>() - 1.0).abs();
        neg.max(sum).max(self.row_violation(a).max(0.0))
    }

    pub fn contains(&self, a: &[f64], tol: f64) -> bool {
        self.violation(a) <= tol
    }

    pub fn epsilon(&self) -> Option<f64> {
        match self.form {
            PolytopeForm::Box { epsilon, .. } => Some(epsilon),
            PolytopeForm::Explicit => None,
        }
    }
}

/// Free-function form of [`ActionPolytope::box_around`].
pub fn box_polytope(b: &[f64], epsilon: f64) -> Result<ActionPolytope> {
    ActionPolytope::box_around(b, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_width_box_pins_base() {
        let p = box_polytope(&[0.5, 0.5], 0.0).unwrap();
        assert!(p.contains(&[0.5, 0.5], 1e-12));
        assert!(!p.contains(&[0.5001, 0.4999], 1e-8));
    }

    #[test]
    fn segment_box() {
        let p = box_polytope(&[0.5, 0.5], 0.4).unwrap();
        assert!(p.contains(&[0.1, 0.9], 1e-12));
        assert!(p.contains(&[0.9, 0.1], 1e-12));
        assert!(!p.contains(&[0.95, 0.05], 1e-8));
    }

    #[test]
    fn lower_bounds_clip_at_zero() {
        let t = 1.0 / 3.0;
        let p = box_polytope(&[t, t, t], 0.4).unwrap();
        assert_eq!(p.h_rhs[1], 0.0);
        assert!((p.h_rhs[0] - 0.733_333_333_333_333_3).abs() < 1e-15);
        assert!(p.contains(&[0.7333333333, 0.2666666667, 0.0], 1e-9));
        assert!(!p.contains(&[0.75, 0.25, 0.0], 1e-8));
    }

    #[test]
    fn negative_epsilon_is_rejected() {
        assert!(matches!(
            box_polytope(&[1.0], -0.1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn support_box_pins_zero_coordinates() {
        let p = ActionPolytope::box_on_support(&[0.6, 0.0, 0.4], 0.4).unwrap();
        assert_eq!(p.num_rows(), 5);
        assert!(p.contains(&[1.0, 0.0, 0.0], 1e-12));
        assert!(!p.contains(&[0.5, 0.1, 0.4], 1e-8));
    }
}
