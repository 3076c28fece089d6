//! Design criteria on small hand-checkable inputs.

use gpce::criteria::{
    avg_cross_correlation, hybrid_score, hybrid_values, maximin_distance, mutual_coherence, phi_p,
    Metric,
};
use nalgebra::DMatrix;

fn main() -> gpce::Result<()> {
    let psi = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
    println!("μ([[1,1],[0,1]])  = {:.6}", mutual_coherence(&psi)?);

    let row = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
    println!("γ([1, 1])         = {:.6}", avg_cross_correlation(&row)?);

    let mu = [0.2, 0.4, 0.3];
    let gamma = [0.9, 0.1, 0.5];
    println!("hybrid values     = {:?}", hybrid_values(&mu, &gamma));
    println!("hybrid pick       = {}", hybrid_score(&mu, &gamma)?);

    let pts = [0.0, 0.0, 1.0, 1.0];
    println!(
        "maximin (0,0)-(1,1)          = {:.6}",
        maximin_distance(&pts, 2, Metric::euclidean())?
    );
    println!(
        "periodic maximin (0,0)-(1,1) = {:.6}",
        maximin_distance(&pts, 2, Metric::periodic())?
    );
    println!(
        "φ_1 of 0, 0.5, 1             = {:.6}",
        phi_p(&[0.0, 0.5, 1.0], 1, 1.0, Metric::euclidean())?
    );
    Ok(())
}
