//! Fit an Ishigami surrogate, validate it and read off its moments.

use gpce::models::problem_by_name;
use gpce::sampling::random_grid;
use gpce::solver::SolverChoice;
use gpce::surrogate::reference_moments_mc;
use gpce::GpceModel;

fn main() -> gpce::Result<()> {
    let problem = problem_by_name("ishigami")?;
    let basis = problem.basis();
    println!(
        "{}: d = {}, {} basis functions",
        problem.name(),
        problem.dim(),
        basis.len()
    );

    for m in [30, 60, 120, 240] {
        let set = random_grid(m, problem.dim(), 5);
        let y = problem.evaluate_unit_points(set.points())?;
        for solver in [SolverChoice::default(), SolverChoice::LeastSquares] {
            let model = GpceModel::fit(&set, &y, &basis, problem.spec(), &solver)?;
            let err = model.nrmsd(|x| problem.evaluate(x), 5000, 99)?;
            println!("  M = {m:>3} {solver}: NRMSD {:.3e}", err.mean);
        }
    }

    let set = random_grid(300, problem.dim(), 5);
    let y = problem.evaluate_unit_points(set.points())?;
    let model = GpceModel::fit(&set, &y, &basis, problem.spec(), &SolverChoice::default())?;
    let (mean, std) = model.moments()[0];
    let mc = reference_moments_mc(|x| problem.evaluate(x), problem.spec(), 200_000, 1)?[0];
    println!("surrogate mean {mean:.6} std {std:.6}");
    println!("monte carlo mean {:.4} std {:.4}", mc.0, mc.1);
    if let Some((m, s)) = problem.analytic_moments() {
        println!("analytic  mean {m:.6} std {s:.6}");
    }

    let path = std::env::temp_dir().join("ishigami-model.json");
    model.save(&path)?;
    let back = GpceModel::load(&path)?;
    let x = [1.0, -2.0];
    println!(
        "y({x:?}) = {:.6} (reloaded {:.6})",
        model.predict(&x)?[(0, 0)],
        back.predict(&x)?[(0, 0)]
    );
    Ok(())
}
