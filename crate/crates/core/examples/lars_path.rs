//! Sparse recovery with the LARS-Lasso path.

use gpce::rng::rng_from_seed;
use gpce::solver::{lars_lasso_fit, least_squares_vec, LarsDesign, Selection};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

fn main() -> gpce::Result<()> {
    let (m, n) = (25, 60);
    let mut rng = rng_from_seed(1);
    let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
    let mut truth = DVector::zeros(n);
    for (j, v) in [(3, 1.5), (17, -2.0), (41, 0.7), (55, 1.1)] {
        truth[j] = v;
    }
    let y: Vec<f64> = (&a * &truth).iter().copied().collect();

    let design = LarsDesign::new(&a, Selection::PathEnd)?;
    let path = design.path(&y)?;
    println!(
        "path has {} knots, λ_max = {:.4}",
        path.len(),
        path.lambda_max()
    );
    for k in 0..path.len().min(6) {
        println!(
            "  knot {k}: λ = {:.4}, active {:?}",
            path.lambdas[k], path.active[k]
        );
    }

    for (name, sel) in [
        ("path end", Selection::PathEnd),
        ("10-fold cv", Selection::default()),
        ("residual 1e-6", Selection::ResidualTolerance(1e-6)),
    ] {
        let fit = lars_lasso_fit(&a, &y, sel)?;
        let err = (&fit.coef - &truth).norm() / truth.norm();
        let nnz = fit.coef.iter().filter(|c| c.abs() > 1e-8).count();
        println!("{name:<14} nonzeros {nnz:>2}, relative error {err:.2e}");
    }

    let ls = least_squares_vec(&a, &y)?;
    println!(
        "min-norm LS    relative error {:.2e}",
        (&ls - &truth).norm() / truth.norm()
    );
    Ok(())
}
