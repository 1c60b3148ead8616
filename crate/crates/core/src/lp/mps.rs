//! Fixed-format MPS writer.
//!
//! Row and column names are replaced by positional names (`R0000001`,
//! `C0000001`) so they always fit the 8-character fields; the original names
//! are listed in comment lines. MPS minimizes, so the objective row holds
//! the negated coefficients.

use std::fmt::Write as _;
use std::path::Path;

use super::problem::LpProblem;
use crate::error::{Error, Result};

const OBJ_ROW: &str = "COST";

fn row_name(i: usize) -> String {
    format!("R{:07}", i + 1)
}

fn col_name(j: usize) -> String {
    format!("C{:07}", j + 1)
}

/// Shortest rendering of `v` that fits a 12-character numeric field.
fn num(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    let plain = format!("{v}");
    if plain.len() <= 12 {
        return plain;
    }
    for digits in (0..=8).rev() {
        let s = format!("{v:.digits$e}");
        if s.len() <= 12 {
            return s;
        }
    }
    format!("{v:.0e}")
}

fn field_line(out: &mut String, code: &str, name: &str, pairs: &[(String, f64)]) {
    let _ = write!(out, " {code:<2} {name:<8}");
    for (k, (label, v)) in pairs.iter().enumerate() {
        if k == 0 {
            let _ = write!(out, "  {label:<8}  {:>12}", num(*v));
        } else {
            let _ = write!(out, "   {label:<8}  {:>12}", num(*v));
        }
    }
    out.push('\n');
}

/// Renders `problem` as fixed-format MPS text.
pub fn to_mps_string(problem: &LpProblem, name: &str) -> Result<String> {
    problem.validate()?;
    let n = problem.num_vars();
    let n_eq = problem.equalities.len();
    let rows: Vec<(&str, &super::problem::LpRow)> = problem
        .equalities
        .iter()
        .map(|r| ("E", r))
        .chain(problem.inequalities.iter().map(|r| ("L", r)))
        .collect();

    let mut out = String::new();
    let _ = writeln!(out, "* maximize: objective coefficients are negated");
    for (i, (_, r)) in rows.iter().enumerate() {
        let _ = writeln!(out, "* {} {}", row_name(i), r.name);
    }
    for (j, v) in problem.var_names.iter().enumerate() {
        let _ = writeln!(out, "* {} {}", col_name(j), v);
    }
    let title: String = name
        .chars()
        .filter(|c| !c.is_whitespace())
        .take(8)
        .collect();
    let _ = writeln!(
        out,
        "NAME          {}",
        if title.is_empty() { "LP" } else { &title }
    );

    out.push_str("ROWS\n");
    let _ = writeln!(out, " N  {OBJ_ROW}");
    for (i, (kind, _)) in rows.iter().enumerate() {
        let _ = writeln!(out, " {kind}  {}", row_name(i));
    }

    // column-major view with merged duplicates, rows in ascending order
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    let canon_eq = LpProblem::canonical_rows(&problem.equalities);
    let canon_in = LpProblem::canonical_rows(&problem.inequalities);
    for (i, r) in canon_eq.iter().chain(&canon_in).enumerate() {
        for &(j, a) in r {
            cols[j].push((i, a));
        }
    }

    out.push_str("COLUMNS\n");
    for j in 0..n {
        let mut entries: Vec<(String, f64)> = Vec::new();
        if problem.objective[j] != 0.0 {
            entries.push((OBJ_ROW.to_string(), -problem.objective[j]));
        }
        entries.extend(cols[j].iter().map(|&(i, a)| (row_name(i), a)));
        if entries.is_empty() {
            // keep the column declared
            entries.push((OBJ_ROW.to_string(), 0.0));
        }
        for pair in entries.chunks(2) {
            field_line(&mut out, "", &col_name(j), pair);
        }
    }

    out.push_str("RHS\n");
    let rhs: Vec<(String, f64)> = rows
        .iter()
        .enumerate()
        .filter(|(_, (_, r))| r.rhs != 0.0)
        .map(|(i, (_, r))| (row_name(i), r.rhs))
        .collect();
    for pair in rhs.chunks(2) {
        field_line(&mut out, "", "RHS", pair);
    }

    let mut bounds = String::new();
    for j in 0..n {
        let (l, u) = (problem.lower[j], problem.upper[j]);
        match u {
            Some(u) if u == l => field_line(&mut bounds, "FX", "BND", &[(col_name(j), l)]),
            _ => {
                if l != 0.0 {
                    field_line(&mut bounds, "LO", "BND", &[(col_name(j), l)]);
                }
                if let Some(u) = u {
                    field_line(&mut bounds, "UP", "BND", &[(col_name(j), u)]);
                }
            }
        }
    }
    if !bounds.is_empty() {
        out.push_str("BOUNDS\n");
        out.push_str(&bounds);
    }
    out.push_str("ENDATA\n");
    debug_assert!(n_eq <= rows.len());
    Ok(out)
}

/// Writes `problem` to `path` in fixed-format MPS.
pub fn export_lp(problem: &LpProblem, path: &Path) -> Result<()> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("LP")
        .to_string();
    let text = to_mps_string(problem, &stem)?;
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
