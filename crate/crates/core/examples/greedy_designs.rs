//! Greedy L1-optimal designs picked from a candidate pool.

use gpce::basis::{assemble_matrix, build_multi_index_set};
use gpce::criteria::{avg_cross_correlation, d_optimality, mutual_coherence};
use gpce::sampling::{greedy_l1_optimal, random_grid, GreedyConfig, GreedyCriterion, SampleSet};
use gpce::MultiIndexSet;

fn report(name: &str, set: &SampleSet, basis: &MultiIndexSet) -> gpce::Result<()> {
    let psi = assemble_matrix(set, basis)?;
    let mu = mutual_coherence(psi.matrix())?;
    let gamma = avg_cross_correlation(psi.matrix())?;
    let d = d_optimality(psi.matrix());
    println!(
        "{name:<9} μ {mu:.4}  γ {gamma:.4}  φ_D {:.4e} ({:?})",
        d.value, d.mode
    );
    Ok(())
}

fn main() -> gpce::Result<()> {
    let basis = build_multi_index_set(2, 8, 2);
    let m = 40;
    report("random", &random_grid(m, 2, 9), &basis)?;
    for criterion in [
        GreedyCriterion::Mc,
        GreedyCriterion::McCc,
        GreedyCriterion::D,
        GreedyCriterion::DCoh,
    ] {
        let config = GreedyConfig::new(criterion, m);
        let set = greedy_l1_optimal(&config, &basis, 9)?;
        report(set.scheme().name(), &set, &basis)?;
    }

    let config = GreedyConfig::new(GreedyCriterion::McCc, m);
    let set = greedy_l1_optimal(&config, &basis, 9)?;
    let order = set.selection_order().unwrap_or(&[]);
    println!(
        "\nfirst picks from the pool: {:?}",
        &order[..order.len().min(8)]
    );
    Ok(())
}
