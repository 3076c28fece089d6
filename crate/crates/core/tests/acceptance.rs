//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness. Pass criterion numbers as arguments to
//! run a subset: `cargo test --test acceptance -- 1 8 9`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use gpce::basis::{build_multi_index_set, InputSpec};
use gpce::bench::{mann_whitney_exact, mann_whitney_normal};
use gpce::bench::{run_study, summarize, SchemeSpec, SchemeSummary, StudyConfig};
use gpce::cli::cmd_bench;
use gpce::criteria::{avg_cross_correlation, maximin_distance, mutual_coherence, phi_p, Metric};
use gpce::models::problem_by_name;
use gpce::rng::rng_from_seed;
use gpce::sampling::random_grid;
use gpce::solver::{lars_lasso_fit, Selection, SolverChoice};
use gpce::surrogate::reference_moments_mc;
use gpce::GpceModel;

struct Outcome {
    pass: bool,
    detail: String,
}

type Check = (usize, &'static str, fn() -> Outcome);

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn main() -> ExitCode {
    let args: Vec<usize> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let criteria: [Check; 11] = [
        (1, "basis cardinalities", c1_cardinalities),
        (2, "sparsity of recovered expansions", c2_sparsity),
        (3, "L1 vs L2 gap on Ishigami", c3_l1_l2_gap),
        (4, "SC-ESE advantage on Ishigami", c4_sc_ese),
        (5, "Rosenbrock greedy ordering", c5_rosenbrock),
        (6, "electrode reduced preset", c6_electrode),
        (7, "Ishigami moments", c7_moments),
        (8, "LARS vs basis-pursuit oracle", c8_solver_oracle),
        (9, "Mann-Whitney oracle", c9_mann_whitney),
        (10, "criteria hand-computed values", c10_criteria),
        (11, "bench determinism", c11_determinism),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, check) in criteria {
        if !args.is_empty() && !args.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let o = check();
        ran += 1;
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {id:>2} {}: {name} ({:.1} s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("{} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn c1_cardinalities() -> Outcome {
    let cases = [
        ((2, 12, 2), 91),
        ((6, 5, 2), 181),
        ((30, 2, 2), 496),
        ((7, 5, 3), 596),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for ((d, p, pi), want) in cases {
        let got = build_multi_index_set(d, p, pi).len();
        pass &= got == want;
        parts.push(format!("({d},{p},{pi})->{got}"));
    }
    outcome(pass, parts.join(" "))
}

/// Fit `name` on `m` random points and return (NRMSD, coefficients above `tol`).
fn sparse_fit(name: &str, m: usize, tol: f64, seed: u64) -> (f64, usize) {
    let problem = problem_by_name(name).unwrap();
    let basis = problem.basis();
    let set = random_grid(m, problem.dim(), seed);
    let y = problem.evaluate_unit_points(set.points()).unwrap();
    let model = GpceModel::fit(&set, &y, &basis, problem.spec(), &SolverChoice::default()).unwrap();
    let nrmsd = model
        .nrmsd(|x| problem.evaluate(x), 10_000, seed ^ 0xabc)
        .unwrap()
        .mean;
    let k = model
        .coefficients()
        .iter()
        .filter(|c| c.abs() > tol)
        .count();
    (nrmsd, k)
}

fn c2_sparsity() -> Outcome {
    let (ish_err, ish_k) = sparse_fit("ishigami", 300, 1e-6, 21);
    let (lpp_err, lpp_k) = sparse_fit("lpp30", 300, 1e-8, 22);
    let (ros_err, ros_k) = sparse_fit("rosenbrock6", 300, 1e-6, 23);
    let ish = ish_err < 1e-5 && ish_k <= 14;
    let lpp = lpp_err < 1e-8 && lpp_k == 29;
    let ros = ros_k <= 25;
    outcome(
        ish && lpp && ros,
        format!(
            "ishigami nrmsd={ish_err:.3e} k={ish_k} [{}]; lpp30 nrmsd={lpp_err:.3e} k={lpp_k} [{}]; rosenbrock6 nrmsd={ros_err:.3e} k={ros_k} [{}]",
            ok(ish),
            ok(lpp),
            ok(ros)
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "miss"
    }
}

fn study(
    problem: &str,
    schemes: &[&str],
    baseline: &str,
    grid: Vec<usize>,
    threshold: f64,
) -> BTreeMap<String, SchemeSummary> {
    let specs: Vec<SchemeSpec> = schemes.iter().map(|s| s.parse().unwrap()).collect();
    let mut config = StudyConfig::new(problem, specs, grid);
    config.baseline = baseline.to_string();
    config.repetitions = 30;
    config.thresholds = vec![threshold];
    config.master_seed = 1;
    let records = run_study(&config).unwrap();
    summarize(&records, &config.thresholds, baseline, config.repetitions)
        .unwrap()
        .into_iter()
        .map(|s| (s.scheme.clone(), s))
        .collect()
}

fn fmt(v: Option<f64>) -> String {
    v.map_or("undefined".into(), |v| format!("{v:.1}"))
}

fn ishigami_l1_grid() -> Vec<usize> {
    (10..=70).step_by(2).collect()
}

/// Random and SC-ESE designs on Ishigami with the L1 solver, shared by two
/// criteria.
fn ishigami_l1_study() -> &'static BTreeMap<String, SchemeSummary> {
    static STUDY: OnceLock<BTreeMap<String, SchemeSummary>> = OnceLock::new();
    STUDY.get_or_init(|| {
        study(
            "ishigami",
            &["random", "lhs-sc-ese"],
            "random",
            ishigami_l1_grid(),
            1e-3,
        )
    })
}

fn c3_l1_l2_gap() -> Outcome {
    let l1 = ishigami_l1_study();
    let l2 = study(
        "ishigami",
        &["random@l2"],
        "random@l2",
        (60..=220).step_by(4).collect(),
        1e-3,
    );
    let m1 = l1["random"].n_eps_median;
    let m2 = l2["random@l2"].n_eps_median;
    let pass = match (m1, m2) {
        (Some(a), Some(b)) => {
            (23.0..=40.0).contains(&a) && (95.0..=160.0).contains(&b) && b >= 2.5 * a
        }
        _ => false,
    };
    let ratio = m1.zip(m2).map(|(a, b)| b / a);
    outcome(
        pass,
        format!(
            "median L1={} L2={} ratio={}",
            fmt(m1),
            fmt(m2),
            ratio.map_or("-".into(), |r| format!("{r:.2}"))
        ),
    )
}

fn c4_sc_ese() -> Outcome {
    let s = ishigami_l1_study();
    let base = s["random"].n_eps_median;
    let lhs = &s["lhs-sc-ese"];
    let p = lhs.p_value;
    let pass =
        matches!((lhs.n_eps_median, base, p), (Some(l), Some(b), Some(p)) if l <= b && p < 0.05);
    outcome(
        pass,
        format!(
            "median sc-ese={} random={} p={}",
            fmt(lhs.n_eps_median),
            fmt(base),
            p.map_or("-".into(), |p| format!("{p:.3e}"))
        ),
    )
}

fn c5_rosenbrock() -> Outcome {
    let s = study(
        "rosenbrock6",
        &["random", "l1-mc-cc", "l1-d-coh"],
        "random",
        (30..=150).step_by(5).collect(),
        1e-3,
    );
    let base = s["random"].n_eps_median;
    let cc = s["l1-mc-cc"].n_eps_median;
    let dcoh = s["l1-d-coh"].n_eps_median;
    let beats = |v: Option<f64>| matches!((v, base), (Some(v), Some(b)) if v <= b);
    let in_range = base.is_some_and(|b| (60.0..=95.0).contains(&b));
    outcome(
        beats(cc) && beats(dcoh) && in_range,
        format!(
            "median random={} [{}] mc-cc={} [{}] d-coh={} [{}]",
            fmt(base),
            ok(in_range),
            fmt(cc),
            ok(beats(cc)),
            fmt(dcoh),
            ok(beats(dcoh))
        ),
    )
}

fn c6_electrode() -> Outcome {
    let problem = problem_by_name("electrode").unwrap();
    assert_eq!(problem.n_qoi(), 128);
    let s = study(
        "electrode",
        &["random"],
        "random",
        (20..=80).step_by(5).collect(),
        1e-2,
    );
    let m = s["random"].n_eps_median;
    outcome(
        m.is_some_and(|m| (30.0..=55.0).contains(&m)),
        format!("median={} std={}", fmt(m), fmt(s["random"].n_eps_std)),
    )
}

fn ishigami_y(x1: f64, x2: f64) -> f64 {
    x1.sin() + 7.0 * x2.sin().powi(2) + 0.1 * x1.sin()
}

fn c7_moments() -> Outcome {
    let mean = 3.5;
    let var: f64 = 1.21 / 2.0 + 49.0 * (3.0 / 8.0 - 0.25);
    let std = var.sqrt();

    let problem = problem_by_name("ishigami").unwrap();
    let set = random_grid(400, 2, 70);
    let y = problem.evaluate_unit_points(set.points()).unwrap();
    let model = GpceModel::fit(
        &set,
        &y,
        &problem.basis(),
        problem.spec(),
        &SolverChoice::default(),
    )
    .unwrap();
    let (sm, ss) = model.moments()[0];
    let surrogate_ok = (sm - mean).abs() <= 1e-3 && (ss - std).abs() <= 1e-3;

    // Fourth central moment by the periodic midpoint rule.
    let k = 2000;
    let h = 2.0 * PI / k as f64;
    let mut mu4 = 0.0;
    for i in 0..k {
        let x1 = -PI + (i as f64 + 0.5) * h;
        for j in 0..k {
            let x2 = -PI + (j as f64 + 0.5) * h;
            mu4 += (ishigami_y(x1, x2) - mean).powi(4);
        }
    }
    mu4 /= (k * k) as f64;

    let n = 1_000_000;
    let spec = InputSpec::uniform_cube(2, -PI, PI).unwrap();
    let (mm, ms) =
        reference_moments_mc(|x| Ok(vec![ishigami_y(x[0], x[1])]), &spec, n, 71).unwrap()[0];
    let mean_bound = 3.0 * std / (n as f64).sqrt();
    let std_bound = 3.0 * ((mu4 - var * var) / (4.0 * var * n as f64)).sqrt();
    let mc_ok = (mm - mean).abs() <= mean_bound && (ms - std).abs() <= std_bound;
    outcome(
        surrogate_ok && mc_ok,
        format!(
            "surrogate mean={sm:.6} std={ss:.6} [{}]; mc mean={mm:.5} (±{mean_bound:.1e}) std={ms:.5} (±{std_bound:.1e}) [{}]",
            ok(surrogate_ok),
            ok(mc_ok)
        ),
    )
}

/// Minimum of `Σ w_j |c_j|` subject to `A c = y`, by enumerating the vertices
/// of the feasible polytope: every support on which `A` has full column rank
/// and the system is solved exactly.
fn basis_pursuit_oracle(a: &DMatrix<f64>, y: &DVector<f64>, w: &[f64]) -> Option<DVector<f64>> {
    let (m, n) = a.shape();
    let mut best: Option<(f64, DVector<f64>)> = None;
    for mask in 1u32..(1 << n) {
        let support: Vec<usize> = (0..n).filter(|j| mask >> j & 1 == 1).collect();
        if support.len() > m {
            continue;
        }
        let sub = a.select_columns(&support);
        let svd = sub.clone().svd(true, true);
        let smin = svd.singular_values.min();
        if smin < 1e-10 * svd.singular_values.max() {
            continue;
        }
        let cs = svd.solve(y, 1e-14).unwrap();
        if (&sub * &cs - y).norm() > 1e-9 * y.norm().max(1.0) {
            continue;
        }
        let obj: f64 = support
            .iter()
            .zip(cs.iter())
            .map(|(&j, c)| w[j] * c.abs())
            .sum();
        if best.as_ref().is_none_or(|(b, _)| obj < *b - 1e-12) {
            let mut c = DVector::zeros(n);
            for (&j, v) in support.iter().zip(cs.iter()) {
                c[j] = *v;
            }
            best = Some((obj, c));
        }
    }
    best.map(|(_, c)| c)
}

/// Largest violation of the Lasso optimality conditions in the unit-norm
/// column scaling.
fn kkt_residual(a: &DMatrix<f64>, y: &DVector<f64>, c: &DVector<f64>, lambda: f64) -> f64 {
    let r = y - a * c;
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        let col = a.column(j);
        let corr = col.dot(&r) / col.norm();
        let v = if c[j] != 0.0 {
            (corr - lambda * c[j].signum()).abs()
        } else {
            (corr.abs() - lambda).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

fn c8_solver_oracle() -> Outcome {
    let mut rng = rng_from_seed(8080);
    let mut worst_diff = 0.0f64;
    let mut worst_kkt = 0.0f64;
    let mut solved = 0;
    for _ in 0..50 {
        let n = rng.random_range(2..=6);
        let m = rng.random_range(2..=10);
        let a = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
        let s = rng.random_range(1..=2usize.min(n));
        let mut c = DVector::zeros(n);
        let mut placed = 0;
        while placed < s {
            let j = rng.random_range(0..n);
            if c[j] == 0.0 {
                let mag: f64 = rng.random_range(0.5..2.0);
                c[j] = if rng.random::<bool>() { mag } else { -mag };
                placed += 1;
            }
        }
        let y = &a * &c;
        let w: Vec<f64> = a.column_iter().map(|col| col.norm()).collect();
        let Some(oracle) = basis_pursuit_oracle(&a, &y, &w) else {
            continue;
        };
        solved += 1;
        let yv: Vec<f64> = y.iter().copied().collect();
        let end = lars_lasso_fit(&a, &yv, Selection::PathEnd).unwrap();
        worst_diff = worst_diff.max((&end.coef - &oracle).amax());
        let cv = lars_lasso_fit(&a, &yv, Selection::default()).unwrap();
        for fit in [&end, &cv] {
            worst_kkt = worst_kkt.max(kkt_residual(&a, &y, &fit.coef, fit.lambda));
        }
    }
    outcome(
        solved == 50 && worst_diff <= 1e-6 && worst_kkt < 1e-8,
        format!("{solved}/50 instances, max |c - c_bp| = {worst_diff:.2e}, max KKT residual = {worst_kkt:.2e}"),
    )
}

fn c9_mann_whitney() -> Outcome {
    let p = mann_whitney_exact(&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]);
    let small_ok = (p - 0.05).abs() < 1e-12;

    // Null distribution of U for 8 vs 8 without ties: counts of subsets of
    // {1..16} of size 8 by rank sum.
    let (na, n) = (8usize, 16usize);
    let max_sum = (n * (n + 1)) / 2;
    let mut ways = vec![vec![0u64; max_sum + 1]; na + 1];
    ways[0][0] = 1;
    for r in 1..=n {
        for k in (1..=na).rev() {
            for s in (r..=max_sum).rev() {
                ways[k][s] += ways[k - 1][s - r];
            }
        }
    }
    let offset = na * (na + 1) / 2;
    let counts: Vec<u64> = (0..=na * na).map(|u| ways[na][u + offset]).collect();
    let total: u64 = counts.iter().sum();
    let cdf: Vec<f64> = counts
        .iter()
        .scan(0u64, |acc, c| {
            *acc += c;
            Some(*acc as f64 / total as f64)
        })
        .collect();

    let mut worst = 0.0f64;
    let mut exact_mismatch = 0.0f64;
    let mut checked_u = vec![false; na * na + 1];
    let mut configs = 0;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != na {
            continue;
        }
        configs += 1;
        let a: Vec<f64> = (0..n)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| (i + 1) as f64)
            .collect();
        let b: Vec<f64> = (0..n)
            .filter(|i| mask >> i & 1 == 0)
            .map(|i| (i + 1) as f64)
            .collect();
        let u = a.iter().sum::<f64>() as usize - offset;
        let exact = cdf[u];
        worst = worst.max((mann_whitney_normal(&a, &b) - exact).abs());
        if !checked_u[u] {
            checked_u[u] = true;
            exact_mismatch = exact_mismatch.max((mann_whitney_exact(&a, &b) - exact).abs());
        }
    }
    outcome(
        small_ok && worst < 0.02 && exact_mismatch < 1e-12,
        format!(
            "p({{1,2,3}},{{4,5,6}})={p}; {configs} splits of 8 vs 8: max |normal - exact| = {worst:.4}, enumeration vs DP = {exact_mismatch:.1e}"
        ),
    )
}

fn c10_criteria() -> Outcome {
    let mut worst = 0.0f64;
    let mut check = |got: f64, want: f64| worst = worst.max((got - want).abs());

    let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 1.0]);
    check(mutual_coherence(&m).unwrap(), 1.0 / 2f64.sqrt());
    check(
        mutual_coherence(&DMatrix::<f64>::identity(3, 3)).unwrap(),
        0.0,
    );
    let dup = DMatrix::from_row_slice(3, 2, &[0.3, 0.3, -1.0, -1.0, 2.0, 2.0]);
    check(mutual_coherence(&dup).unwrap(), 1.0);

    check(
        avg_cross_correlation(&DMatrix::from_row_slice(1, 2, &[1.0, 1.0])).unwrap(),
        1.0,
    );
    let scaled = DMatrix::<f64>::identity(4, 4) * 2.0;
    check(avg_cross_correlation(&scaled).unwrap(), 0.0);

    let corners = [0.0, 0.0, 1.0, 1.0];
    check(
        maximin_distance(&corners, 2, Metric::euclidean()).unwrap(),
        2f64.sqrt(),
    );
    check(
        maximin_distance(&corners, 2, Metric::periodic()).unwrap(),
        0.0,
    );
    let square = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0];
    check(
        maximin_distance(&square, 2, Metric::euclidean()).unwrap(),
        1.0,
    );
    check(
        phi_p(&[0.0, 0.5, 1.0], 1, 1.0, Metric::euclidean()).unwrap(),
        5.0,
    );
    check(
        Metric::periodic().distance(&[0.1, 0.2], &[0.9, 0.4]),
        (0.04f64 + 0.04).sqrt(),
    );

    outcome(
        worst <= 1e-12,
        format!("max deviation {worst:.1e} over 10 values"),
    )
}

fn c11_determinism() -> Outcome {
    let specs: Vec<SchemeSpec> = ["random", "lhs-sc-ese", "l1-d-coh", "co", "random@l2"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();
    let mut config = StudyConfig::new("ishigami", specs, vec![20, 30, 40]);
    config.repetitions = 3;
    config.n_test = 2000;
    config.reference_samples = 5000;
    config.master_seed = 11;
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (name, jobs) in [("a", 1), ("b", 1), ("c", 8)] {
        let out = dir.path().join(name);
        cmd_bench(&config, &out, Some(jobs)).unwrap();
        outputs.push(fs::read(out.join("records.csv")).unwrap());
    }
    let same_run = outputs[0] == outputs[1];
    let same_jobs = outputs[0] == outputs[2];
    outcome(
        same_run && same_jobs,
        format!(
            "{} bytes; repeat run identical [{}]; --jobs 1 vs 8 identical [{}]",
            outputs[0].len(),
            ok(same_run),
            ok(same_jobs)
        ),
    )
}
