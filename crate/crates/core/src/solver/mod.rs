//! Coefficient recovery: the LARS-Lasso path for sparse solutions and a
//! pseudo-inverse least-squares baseline.

mod lars;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub use lars::{kkt_violation, lars_path, LarsDesign, LarsPath, LassoFit, Selection};

/// Which solver recovers the coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolverChoice {
    /// L1 path solver.
    Lars(Selection),
    /// Minimum-norm least squares.
    LeastSquares,
}

impl Default for SolverChoice {
    fn default() -> Self {
        SolverChoice::Lars(Selection::default())
    }
}

impl SolverChoice {
    pub fn name(&self) -> &'static str {
        match self {
            SolverChoice::Lars(_) => "l1",
            SolverChoice::LeastSquares => "l2",
        }
    }
}

impl fmt::Display for SolverChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "l1" | "lars" => Ok(SolverChoice::default()),
            "l2" | "ls" => Ok(SolverChoice::LeastSquares),
            other => Err(Error::InvalidInput(format!(
                "unknown solver `{other}` (expected l1 or l2)"
            ))),
        }
    }
}

fn check_finite(matrix: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<()> {
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("measurement matrix"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("observations"));
    }
    Ok(())
}

/// Minimum-norm least squares for every column of `y`.
///
/// Singular values below `1e-12 · σ_max` are treated as zero.
pub fn least_squares_pinv(matrix: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if matrix.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch {
            expected: matrix.nrows(),
            found: y.nrows(),
        });
    }
    check_finite(matrix, y)?;
    if matrix.nrows() == 0 {
        return Err(Error::EmptySampleSet);
    }
    let svd = matrix.clone().svd(true, true);
    let s_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if s_max == 0.0 {
        return Ok(DMatrix::zeros(matrix.ncols(), y.ncols()));
    }
    svd.solve(y, 1e-12 * s_max)
        .map_err(|e| Error::InvalidInput(e.to_string()))
}

/// Single right-hand-side convenience wrapper of [`least_squares_pinv`].
pub fn least_squares_vec(matrix: &DMatrix<f64>, y: &[f64]) -> Result<DVector<f64>> {
    let rhs = DMatrix::from_column_slice(y.len(), 1, y);
    Ok(least_squares_pinv(matrix, &rhs)?.column(0).into_owned())
}

/// Lasso-path fit of one right-hand side.
pub fn lars_lasso_fit(matrix: &DMatrix<f64>, y: &[f64], selection: Selection) -> Result<LassoFit> {
    LarsDesign::new(matrix, selection)?.fit(y)
}

/// Coefficients (`N_c × N_y`) for every column of `y`.
///
/// The L1 design is factorized once and shared by all columns.
pub fn fit_multi(
    matrix: &DMatrix<f64>,
    y: &DMatrix<f64>,
    choice: &SolverChoice,
) -> Result<DMatrix<f64>> {
    if matrix.nrows() != y.nrows() {
        return Err(Error::DimensionMismatch {
            expected: matrix.nrows(),
            found: y.nrows(),
        });
    }
    match choice {
        SolverChoice::LeastSquares => least_squares_pinv(matrix, y),
        SolverChoice::Lars(selection) => {
            let design = LarsDesign::new(matrix, *selection)?;
            let columns: Vec<Result<DVector<f64>>> = (0..y.ncols())
                .into_par_iter()
                .map(|q| {
                    let col: Vec<f64> = y.column(q).iter().copied().collect();
                    design.fit(&col).map(|f| f.coef).map_err(|e| Error::Solver {
                        qoi: q,
                        source: Box::new(e),
                    })
                })
                .collect();
            let mut out = DMatrix::zeros(matrix.ncols(), y.ncols());
            for (q, col) in columns.into_iter().enumerate() {
                out.set_column(q, &col?);
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_system_is_solved_exactly() {
        let a = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0]);
        let x = DVector::from_column_slice(&[1.0, -2.0, 0.5]);
        let y: Vec<f64> = (&a * &x).iter().copied().collect();
        let c = least_squares_vec(&a, &y).unwrap();
        assert!((&a * &c - DVector::from_column_slice(&y)).norm() < 1e-10);
    }

    #[test]
    fn overdetermined_consistent_system_interpolates() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = [1.0, 3.0, 5.0, 7.0];
        let c = least_squares_vec(&a, &y).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn underdetermined_system_has_minimum_norm() {
        // x1 + x2 + x3 = 3, x1 - x3 = 0: solutions (t, 3 - 2t, t), norm minimal at t = 1
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 1.0, 1.0, 0.0, -1.0]);
        let c = least_squares_vec(&a, &[3.0, 0.0]).unwrap();
        for (v, e) in c.iter().zip([1.0, 1.0, 1.0]) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn multi_fit_matches_single_fits() {
        let a = DMatrix::from_fn(12, 5, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0);
        let y = DMatrix::from_fn(12, 3, |i, q| (i as f64 * 0.3 + q as f64).sin());
        let choice = SolverChoice::Lars(Selection::default());
        let c = fit_multi(&a, &y, &choice).unwrap();
        for q in 0..3 {
            let col: Vec<f64> = y.column(q).iter().copied().collect();
            let single = lars_lasso_fit(&a, &col, Selection::default()).unwrap();
            assert_eq!(c.column(q), single.coef.column(0));
        }
    }

    #[test]
    fn solver_names_parse() {
        assert_eq!(
            "l2".parse::<SolverChoice>().unwrap(),
            SolverChoice::LeastSquares
        );
        assert!(matches!(
            "l1".parse::<SolverChoice>().unwrap(),
            SolverChoice::Lars(_)
        ));
        assert!("l3".parse::<SolverChoice>().is_err());
    }
}
