//! A small convergence study comparing sampling schemes on Ishigami.

use gpce::bench::{
    run_study, success_rate_table, summarize, write_summary_csv, SchemeSpec, StudyConfig,
};

fn main() -> gpce::Result<()> {
    let schemes = ["random", "lhs-sc-ese", "l1-d-coh", "random@l2"]
        .iter()
        .map(|s| s.parse())
        .collect::<gpce::Result<Vec<SchemeSpec>>>()?;
    let mut config = StudyConfig::new("ishigami", schemes, (16..=100).step_by(6).collect());
    config.repetitions = 6;
    config.n_test = 2000;
    config.thresholds = vec![1e-2, 1e-1];
    config.master_seed = 3;

    let records = run_study(&config)?;
    println!("{} fits", records.len());

    let rows = summarize(
        &records,
        &config.thresholds,
        &config.baseline,
        config.repetitions,
    )?;
    write_summary_csv(std::io::stdout(), &rows)?;

    let rates = success_rate_table(&records, &[1e-2], config.repetitions);
    println!("\nsuccess rate at 1e-2:");
    for r in rates.iter().filter(|r| r.scheme == "random") {
        println!("  N = {:>3}: {:.2}", r.n, r.rate);
    }
    Ok(())
}
