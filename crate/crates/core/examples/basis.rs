//! Truncated multi-index sets and orthonormal Legendre evaluation.

use gpce::basis::{build_multi_index_set, eval_basis, eval_basis_1d, MultiIndex};

fn main() -> gpce::Result<()> {
    for (d, p, p_i) in [(2, 12, 2), (6, 5, 2), (30, 2, 2), (7, 5, 3)] {
        let set = build_multi_index_set(d, p, p_i);
        println!(
            "d={d:>2} p={p:>2} p_i={p_i}: {:>4} basis functions",
            set.len()
        );
    }

    let set = build_multi_index_set(2, 3, 2);
    println!("\nmulti-indices of (2, 3, 2):");
    for alpha in set.indices() {
        println!("  {:?}  order {}", alpha.degrees(), alpha.total_order());
    }

    println!("\nψ_n(0.5) for n = 0..5:");
    for n in 0..=5 {
        println!("  ψ_{n}(0.5) = {:+.6}", eval_basis_1d(n, 0.5));
    }

    let alpha = MultiIndex(vec![1, 2]);
    let xi = [0.3, -0.6];
    println!(
        "\nΨ_{:?}({xi:?}) = {:.6}",
        alpha.degrees(),
        eval_basis(&alpha, &xi)?
    );
    Ok(())
}
