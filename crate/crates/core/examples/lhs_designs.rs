//! Latin hypercube variants compared by their space-filling criteria.

use gpce::criteria::{maximin_distance, phi_p, Metric};
use gpce::sampling::{
    lhs_pool_optimal, lhs_sc_ese, lhs_standard, random_grid, EseParams, PoolCriterion, PoolParams,
    SampleSet,
};

fn report(name: &str, set: &SampleSet) -> gpce::Result<()> {
    let d = set.dim();
    let maximin = maximin_distance(set.points(), d, Metric::euclidean())?;
    let periodic = maximin_distance(set.points(), d, Metric::periodic())?;
    let phi = phi_p(set.points(), d, 10.0, Metric::euclidean())?;
    println!("{name:<12} maximin {maximin:.4}  periodic {periodic:.4}  φ_10 {phi:.3}");
    Ok(())
}

fn main() -> gpce::Result<()> {
    let (m, d, seed) = (30, 2, 42);
    report("random", &random_grid(m, d, seed))?;
    report("lhs-std", &lhs_standard(m, d, seed))?;

    let mm = PoolParams::default();
    report("lhs-mm", &lhs_pool_optimal(m, d, seed, &mm)?)?;
    let pp = PoolParams {
        criterion: PoolCriterion::PhiP,
        ..PoolParams::default()
    };
    report("lhs-phip", &lhs_pool_optimal(m, d, seed, &pp)?)?;
    report(
        "lhs-sc-ese",
        &lhs_sc_ese(m, d, seed, 0.25, &EseParams::default())?,
    )?;
    Ok(())
}
