//! Repeated convergence studies across sampling schemes.
//!
//! A study fits one surrogate per (scheme, repetition, sample count) and
//! records its validation error, the mutual coherence of the design and the
//! error of the predicted moments. [`summarize`] turns those records into
//! crossing statistics per error threshold.

mod config;
mod report;
mod stats;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::basis::{assemble_matrix, basis_matrix, build_multi_index_set, MultiIndexSet};
use crate::criteria::mutual_coherence;
use crate::error::{Error, Result};
use crate::models::{problem_by_name, TestProblem};
use crate::rng::{derive_seed, label_tag};
use crate::sampling::{
    coherence_optimal, greedy_l1_optimal, lhs_pool_optimal, lhs_sc_ese, lhs_standard, random_grid,
    ChainParams, EseParams, GreedyConfig, PoolCriterion, PoolParams, SampleSet, Scheme,
};
use crate::solver::{fit_multi, SolverChoice};
use crate::surrogate::{nrmsd_values, reference_moments_mc, weighted_observations};

pub use config::{DesignParams, SchemeSpec, StudyConfig, DEFAULT_THRESHOLDS};
pub use report::{
    format_sig, read_records_csv, success_rate_table, write_records_csv, write_success_rates_csv,
    write_summary_csv, SuccessRateRow,
};
pub use stats::{
    curves_of, error_crossing, mann_whitney_exact, mann_whitney_normal, mann_whitney_u,
    mann_whitney_u_one_tailed, median_with_undefined, n_for_rate, std_defined, success_rate_curve,
    summarize, Crossing, SchemeSummary,
};

/// One fitted surrogate of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    /// Scheme label, including any solver override.
    pub scheme: String,
    pub rep: usize,
    pub n: usize,
    /// Mean NRMSD over the QOIs on the test set.
    pub nrmsd: f64,
    /// Mutual coherence of the (weighted) measurement matrix.
    pub mu: f64,
    /// Relative error of the mean, averaged over QOIs.
    pub mean_err: Option<f64>,
    /// Relative error of the standard deviation, averaged over QOIs.
    pub std_err: Option<f64>,
}

const TEST_SET_TAG: u64 = 0x7e57;
const REFERENCE_TAG: u64 = 0x4ef0;

/// Seed of repetition `rep` of `scheme`.
///
/// It depends on the scheme but not the solver, so L1 and L2 fits of the
/// same scheme see the same designs.
pub fn unit_seed(master: u64, scheme: Scheme, rep: usize) -> u64 {
    derive_seed(derive_seed(master, label_tag(scheme.name())), rep as u64)
}

/// Shared data of a running study.
struct Context<'a> {
    config: &'a StudyConfig,
    problem: TestProblem,
    basis: MultiIndexSet,
    test_psi: DMatrix<f64>,
    test_y: DMatrix<f64>,
    reference: Option<Vec<(f64, f64)>>,
}

/// Basis of a study: the problem default unless overridden.
pub fn study_basis(config: &StudyConfig, problem: &TestProblem) -> MultiIndexSet {
    build_multi_index_set(
        problem.dim(),
        config.order.unwrap_or(problem.order()),
        config
            .interaction_order
            .unwrap_or(problem.interaction_order()),
    )
}

/// Run every (scheme, repetition) unit of `config`.
///
/// Records come in configuration order: scheme, then repetition, then `N`.
/// Fits that fail are logged and left out.
pub fn run_study(config: &StudyConfig) -> Result<Vec<ConvergenceRecord>> {
    config.validate()?;
    let problem = problem_by_name(&config.problem)?;
    let basis = study_basis(config, &problem);
    let d = problem.dim();

    let test = random_grid(
        config.n_test,
        d,
        derive_seed(config.master_seed, TEST_SET_TAG),
    );
    let test_psi = basis_matrix(test.points(), d, None, &basis)?;
    let test_y = problem.evaluate_unit_points(test.points())?;

    let reference = if config.reference_samples > 0 {
        Some(reference_moments_mc(
            |x| problem.evaluate(x),
            problem.spec(),
            config.reference_samples,
            derive_seed(config.master_seed, REFERENCE_TAG),
        )?)
    } else {
        None
    };

    let ctx = Context {
        config,
        problem,
        basis,
        test_psi,
        test_y,
        reference,
    };
    let units: Vec<(usize, usize)> = (0..config.schemes.len())
        .flat_map(|s| (0..config.repetitions).map(move |r| (s, r)))
        .collect();
    let records: Vec<Vec<ConvergenceRecord>> = units
        .into_par_iter()
        .map(|(s, rep)| run_unit(&ctx, &config.schemes[s], rep))
        .collect();
    Ok(records.into_iter().flatten().collect())
}

fn run_unit(ctx: &Context<'_>, spec: &SchemeSpec, rep: usize) -> Vec<ConvergenceRecord> {
    let label = spec.label();
    let seed = unit_seed(ctx.config.master_seed, spec.scheme, rep);
    let solver = spec.solver.unwrap_or(ctx.config.solver);
    let grid = &ctx.config.grid;
    let mut out = Vec::with_capacity(grid.len());
    let mut push = |n: usize, result: Result<ConvergenceRecord>| match result {
        Ok(r) => out.push(r),
        Err(e) => log::warn!("{label} rep {rep} N = {n}: {e}"),
    };

    if spec.scheme.is_lhs() {
        for &n in grid {
            let design = generate_design(
                spec.scheme,
                n,
                ctx.problem.dim(),
                Some(&ctx.basis),
                derive_seed(seed, n as u64),
                &ctx.config.design,
            );
            let result = design.and_then(|design| {
                let y = ctx.problem.evaluate_unit_points(design.points())?;
                let psi = assemble_matrix(&design, &ctx.basis)?.into_matrix();
                let wy = weighted_observations(&design, &y);
                fit_record(ctx, &label, rep, &psi, &wy, &solver)
            });
            push(n, result);
        }
    } else {
        let n_max = *grid.last().expect("validated grid");
        let design = generate_design(
            spec.scheme,
            n_max,
            ctx.problem.dim(),
            Some(&ctx.basis),
            seed,
            &ctx.config.design,
        );
        let full = design.and_then(|design| {
            let y = ctx.problem.evaluate_unit_points(design.points())?;
            let psi = assemble_matrix(&design, &ctx.basis)?.into_matrix();
            let wy = weighted_observations(&design, &y);
            Ok((psi, wy))
        });
        match full {
            Ok((psi, wy)) => {
                for &n in grid {
                    let psi_n = psi.rows(0, n).into_owned();
                    let wy_n = wy.rows(0, n).into_owned();
                    push(n, fit_record(ctx, &label, rep, &psi_n, &wy_n, &solver));
                }
            }
            Err(e) => log::warn!("{label} rep {rep}: design failed: {e}"),
        }
    }
    log::info!("{label} rep {rep}: {} of {} fits", out.len(), grid.len());
    out
}

/// A design of `n` points for any scheme.
///
/// `basis` is required by the coherence-optimal and greedy schemes. Greedy
/// designs come back in selection order, so their prefixes are greedy
/// designs too.
pub fn generate_design(
    scheme: Scheme,
    n: usize,
    dim: usize,
    basis: Option<&MultiIndexSet>,
    seed: u64,
    params: &DesignParams,
) -> Result<SampleSet> {
    let need_basis =
        || basis.ok_or_else(|| Error::InvalidInput(format!("scheme {scheme} needs a basis")));
    let pool = |criterion| PoolParams {
        n_pool: params.lhs_pool,
        criterion,
        ..PoolParams::default()
    };
    match scheme {
        Scheme::Random => Ok(random_grid(n, dim, seed)),
        Scheme::LhsStandard => Ok(lhs_standard(n, dim, seed)),
        Scheme::LhsMaximin => lhs_pool_optimal(n, dim, seed, &pool(PoolCriterion::Maximin)),
        Scheme::LhsPhiP => lhs_pool_optimal(n, dim, seed, &pool(PoolCriterion::PhiP)),
        Scheme::LhsScEse => lhs_sc_ese(n, dim, seed, params.sc_alpha, &EseParams::default()),
        Scheme::CoherenceOptimal => {
            coherence_optimal(n, need_basis()?, seed, &ChainParams::default())
        }
        Scheme::GreedyMc | Scheme::GreedyMcCc | Scheme::GreedyD | Scheme::GreedyDCoh => {
            let criterion = scheme.greedy_criterion().expect("greedy scheme");
            let mut config = GreedyConfig::new(criterion, n);
            config.pool_size = params.pool_factor * n;
            greedy_l1_optimal(&config, need_basis()?, seed)
        }
    }
}

fn fit_record(
    ctx: &Context<'_>,
    label: &str,
    rep: usize,
    psi: &DMatrix<f64>,
    wy: &DMatrix<f64>,
    solver: &SolverChoice,
) -> Result<ConvergenceRecord> {
    let coef = fit_multi(psi, wy, solver)?;
    let pred = &ctx.test_psi * &coef;
    let nrmsd = nrmsd_values(&pred, &ctx.test_y)?.mean;
    let mu = mutual_coherence(psi).unwrap_or(f64::NAN);
    let (mean_err, std_err) = match &ctx.reference {
        Some(reference) => {
            let (m, s) = moment_errors(
                &coefficient_moments(&ctx.basis, &coef),
                reference,
                ctx.config.reference_samples,
            );
            (m, s)
        }
        None => (None, None),
    };
    Ok(ConvergenceRecord {
        scheme: label.to_string(),
        rep,
        n: psi.nrows(),
        nrmsd,
        mu,
        mean_err,
        std_err,
    })
}

/// `(mean, std)` per QOI read off the coefficients of an orthonormal basis.
pub fn coefficient_moments(basis: &MultiIndexSet, coef: &DMatrix<f64>) -> Vec<(f64, f64)> {
    let zero = basis.zero_position();
    coef.column_iter()
        .map(|c| {
            let mean = zero.map_or(0.0, |z| c[z]);
            let var: f64 = c
                .iter()
                .enumerate()
                .filter(|&(j, _)| Some(j) != zero)
                .map(|(_, v)| v * v)
                .sum();
            (mean, var.sqrt())
        })
        .collect()
}

/// Relative mean and std errors averaged over QOIs.
///
/// A reference mean within three standard errors of zero cannot anchor a
/// relative error, so the error of such a mean is taken relative to the
/// reference standard deviation instead.
pub fn moment_errors(
    surrogate: &[(f64, f64)],
    reference: &[(f64, f64)],
    reference_samples: usize,
) -> (Option<f64>, Option<f64>) {
    let se_factor = 3.0 / (reference_samples.max(1) as f64).sqrt();
    let mut mean_errs = Vec::new();
    let mut std_errs = Vec::new();
    for (&(m, s), &(m_ref, s_ref)) in surrogate.iter().zip(reference) {
        let scale = if m_ref.abs() > se_factor * s_ref {
            m_ref.abs()
        } else {
            s_ref
        };
        if scale > 0.0 {
            mean_errs.push((m - m_ref).abs() / scale);
        }
        if s_ref > 0.0 {
            std_errs.push((s - s_ref).abs() / s_ref);
        }
    }
    let avg = |v: Vec<f64>| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    (avg(mean_errs), avg(std_errs))
}
