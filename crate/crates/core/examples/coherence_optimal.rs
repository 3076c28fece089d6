//! Coherence-optimal sampling: an MCMC chain targeting the basis envelope.

use gpce::basis::{assemble_matrix, build_multi_index_set};
use gpce::criteria::mutual_coherence;
use gpce::sampling::{coherence_optimal, random_grid, run_chain, ChainParams};

fn main() -> gpce::Result<()> {
    let basis = build_multi_index_set(2, 10, 2);
    let params = ChainParams::default();

    let chain = run_chain(500, &basis, 3, &params)?;
    println!("acceptance rate {:.3}", chain.acceptance_rate);

    let m = 80;
    let co = coherence_optimal(m, &basis, 3, &params)?;
    let rnd = random_grid(m, 2, 3);
    let mu_co = mutual_coherence(assemble_matrix(&co, &basis)?.matrix())?;
    let mu_rnd = mutual_coherence(assemble_matrix(&rnd, &basis)?.matrix())?;
    println!("mutual coherence, {m} points, {} columns", basis.len());
    println!("  random            {mu_rnd:.4}");
    println!("  coherence-optimal {mu_co:.4} (weighted rows)");

    let (lo, hi) = co
        .weights()
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &w| {
            (lo.min(w), hi.max(w))
        });
    println!("  weights in [{lo:.3e}, {hi:.3e}]");
    Ok(())
}
