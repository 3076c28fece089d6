//! Error crossings, success rates and the Mann-Whitney test.

use std::collections::BTreeMap;

use gpce::bench::{
    error_crossing, mann_whitney_exact, mann_whitney_normal, n_for_rate, success_rate_curve,
};

fn main() {
    let curve = [
        (10.0, 0.5),
        (20.0, 0.05),
        (30.0, 2e-3),
        (40.0, 4e-4),
        (50.0, 1e-4),
    ];
    for t in [1e-1, 1e-2, 1e-3] {
        let c = error_crossing(&curve, t);
        println!(
            "threshold {t:.0e}: crossing at N = {:?} (recross {})",
            c.n, c.recross
        );
    }

    let mut reps = BTreeMap::new();
    reps.insert(0, vec![(10.0, 0.1), (20.0, 1e-3), (30.0, 1e-4)]);
    reps.insert(1, vec![(10.0, 0.2), (20.0, 0.02), (30.0, 1e-4)]);
    reps.insert(2, vec![(10.0, 0.1), (20.0, 1e-4), (30.0, 1e-5)]);
    let rates = success_rate_curve(&reps, 1e-2, 3);
    println!("\nsuccess rates: {rates:?}");
    println!("N at 95 %: {:?}", n_for_rate(&rates, 0.95));

    let a = [1.0, 2.0, 3.0];
    let b = [4.0, 5.0, 6.0];
    println!("\nMann-Whitney {a:?} < {b:?}");
    println!("  exact  p = {:.4}", mann_whitney_exact(&a, &b));
    println!("  normal p = {:.4}", mann_whitney_normal(&a, &b));
}
