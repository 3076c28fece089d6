//! The registered test problems and the electrode impedance spectrum.

use gpce::models::{electrode_impedance, problem_by_name, ElectrodeParams, PROBLEM_NAMES};

fn main() -> gpce::Result<()> {
    for name in PROBLEM_NAMES {
        let p = problem_by_name(name)?;
        println!(
            "{:<15} d = {:>2}  p = {}  p_i = {}  N_c = {:>4}  QOIs = {}",
            p.name(),
            p.dim(),
            p.order(),
            p.interaction_order(),
            p.basis().len(),
            p.n_qoi()
        );
    }

    let params = ElectrodeParams::nominal();
    println!("\nelectrode impedance at nominal parameters:");
    for f in [1.0, 10.0, 100.0, 1e3, 1e4, 1e5, 1e6] {
        let z = electrode_impedance(&params, 2.0 * std::f64::consts::PI * f);
        println!("  f = {f:>9.0} Hz  Re {:>12.3}  Im {:>12.3}", z.re, z.im);
    }

    let lpp = problem_by_name("lpp6")?;
    let x = [0.5, -0.5, 1.0, 0.2, -1.0, 0.3];
    println!("\nlpp6({x:?}) = {:.4}", lpp.evaluate(&x)?[0]);
    Ok(())
}
