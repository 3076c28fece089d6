//! Error crossings, success rates, the Mann-Whitney test and per-scheme
//! summaries.

use std::collections::{BTreeMap, BTreeSet};

use statrs::distribution::{ContinuousCDF, Normal};

use super::ConvergenceRecord;
use crate::error::{Error, Result};

/// First crossing of an error threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    /// Interpolated sample count, `None` if the threshold is never reached.
    pub n: Option<f64>,
    /// The curve rises above the threshold again after the crossing.
    pub recross: bool,
}

/// First `N` at which `ε ≤ threshold`, interpolated in `(N, log₁₀ ε)`.
///
/// `curve` holds `(N, ε)` pairs sorted by `N`.
pub fn error_crossing(curve: &[(f64, f64)], threshold: f64) -> Crossing {
    let log = |e: f64| e.max(f64::MIN_POSITIVE).log10();
    let Some(i) = curve.iter().position(|&(_, e)| e <= threshold) else {
        return Crossing {
            n: None,
            recross: false,
        };
    };
    let recross = curve[i + 1..].iter().any(|&(_, e)| e > threshold);
    let n = if i == 0 {
        curve[0].0
    } else {
        let (n0, e0) = curve[i - 1];
        let (n1, e1) = curve[i];
        let (l0, l1, lt) = (log(e0), log(e1), log(threshold));
        if l1 < l0 {
            n0 + (lt - l0) / (l1 - l0) * (n1 - n0)
        } else {
            n1
        }
    };
    Crossing {
        n: Some(n),
        recross,
    }
}

/// Fraction of repetitions with `ε ≤ threshold` at every `N`.
///
/// `per_rep` maps a repetition to its `(N, ε)` curve; a repetition without
/// an entry at some `N` counts as a failure there.
pub fn success_rate_curve(
    per_rep: &BTreeMap<usize, Vec<(f64, f64)>>,
    threshold: f64,
    repetitions: usize,
) -> Vec<(f64, f64)> {
    let grid: BTreeSet<u64> = per_rep
        .values()
        .flat_map(|c| c.iter().map(|&(n, _)| n.to_bits()))
        .collect();
    let mut grid: Vec<f64> = grid.into_iter().map(f64::from_bits).collect();
    grid.sort_by(f64::total_cmp);
    let reps = repetitions.max(1) as f64;
    grid.into_iter()
        .map(|n| {
            let ok = per_rep
                .values()
                .filter(|c| c.iter().any(|&(m, e)| m == n && e <= threshold))
                .count();
            (n, ok as f64 / reps)
        })
        .collect()
}

/// Smallest `N` where the success rate reaches `q`, linear between grid
/// points.
pub fn n_for_rate(curve: &[(f64, f64)], q: f64) -> Option<f64> {
    let i = curve.iter().position(|&(_, r)| r >= q)?;
    if i == 0 {
        return Some(curve[0].0);
    }
    let (n0, r0) = curve[i - 1];
    let (n1, r1) = curve[i];
    Some(n0 + (q - r0) / (r1 - r0) * (n1 - n0))
}

// Midranks of the pooled sample.
fn midranks(pooled: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..pooled.len()).collect();
    idx.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && pooled[idx[j + 1]] == pooled[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// `U` statistic of `a`: pairs with `a > b`, ties counting one half.
pub fn mann_whitney_u(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let na = a.len() as f64;
    ranks[..a.len()].iter().sum::<f64>() - na * (na + 1.0) / 2.0
}

/// Exact one-tailed p-value for "`a` tends to be smaller than `b`" by
/// enumerating every split of the pooled midranks.
pub fn mann_whitney_exact(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = midranks(&pooled);
    let na = a.len();
    let offset = (na * (na + 1)) as f64 / 2.0;
    let observed = ranks[..na].iter().sum::<f64>() - offset;
    let n = ranks.len();
    let (mut hits, mut total) = (0u64, 0u64);
    let mut chosen = Vec::with_capacity(na);
    fn walk(
        start: usize,
        ranks: &[f64],
        need: usize,
        chosen: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if chosen.len() == need {
            f(chosen);
            return;
        }
        let remaining = need - chosen.len();
        for i in start..=ranks.len() - remaining {
            chosen.push(i);
            walk(i + 1, ranks, need, chosen, f);
            chosen.pop();
        }
    }
    let mut count = |set: &[usize]| {
        let u = set.iter().map(|&i| ranks[i]).sum::<f64>() - offset;
        total += 1;
        if u <= observed + 1e-9 {
            hits += 1;
        }
    };
    if na == 0 || na == n {
        return 1.0;
    }
    walk(0, &ranks, na, &mut chosen, &mut count);
    hits as f64 / total as f64
}

/// Normal approximation with tie and continuity correction.
pub fn mann_whitney_normal(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let n = na + nb;
    let u = mann_whitney_u(a, b);
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
    if !(var > 0.0) {
        return 1.0;
    }
    let z = (u - na * nb / 2.0 + 0.5) / var.sqrt();
    Normal::standard().cdf(z)
}

/// One-tailed Mann-Whitney p-value for "`a` is smaller than `b`": exact when
/// both groups have at most 8 members, normal approximation otherwise.
pub fn mann_whitney_u_one_tailed(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput(
            "Mann-Whitney needs two non-empty samples".into(),
        ));
    }
    Ok(if a.len() <= 8 && b.len() <= 8 {
        mann_whitney_exact(a, b)
    } else {
        mann_whitney_normal(a, b)
    })
}

/// One row of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSummary {
    pub scheme: String,
    pub threshold: f64,
    pub n_eps_median: Option<f64>,
    pub n_eps_std: Option<f64>,
    pub n_sr95: Option<f64>,
    pub n_sr99: Option<f64>,
    pub p_value: Option<f64>,
    /// Repetitions whose error rose above the threshold after crossing.
    pub recross: usize,
    pub rel_n_eps: Option<f64>,
    pub rel_sr95: Option<f64>,
    pub rel_sr99: Option<f64>,
}

/// Median with undefined entries sorted last as `+∞`.
pub fn median_with_undefined(values: &[Option<f64>]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v: Vec<f64> = values.iter().map(|x| x.unwrap_or(f64::INFINITY)).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let m = if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    };
    m.is_finite().then_some(m)
}

/// Sample standard deviation of the defined entries.
pub fn std_defined(values: &[Option<f64>]) -> Option<f64> {
    let v: Vec<f64> = values.iter().flatten().copied().collect();
    if v.len() < 2 {
        return None;
    }
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let ss = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    Some((ss / (v.len() - 1) as f64).sqrt())
}

/// Per-repetition `(N, ε)` curves of one scheme, sorted by `N`.
pub fn curves_of(records: &[ConvergenceRecord], scheme: &str) -> BTreeMap<usize, Vec<(f64, f64)>> {
    let mut per_rep: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for r in records.iter().filter(|r| r.scheme == scheme) {
        per_rep
            .entry(r.rep)
            .or_default()
            .push((r.n as f64, r.nrmsd));
    }
    for c in per_rep.values_mut() {
        c.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    per_rep
}

struct Stats {
    crossings: Vec<Option<f64>>,
    recross: usize,
    median: Option<f64>,
    std: Option<f64>,
    sr95: Option<f64>,
    sr99: Option<f64>,
}

fn scheme_stats(
    records: &[ConvergenceRecord],
    scheme: &str,
    threshold: f64,
    repetitions: usize,
) -> Stats {
    let curves = curves_of(records, scheme);
    let mut crossings: Vec<Option<f64>> = Vec::with_capacity(repetitions);
    let mut recross = 0;
    for c in curves.values() {
        let x = error_crossing(c, threshold);
        crossings.push(x.n);
        recross += usize::from(x.recross);
    }
    // repetitions that produced no records never crossed
    crossings.resize(repetitions.max(crossings.len()), None);
    let rates = success_rate_curve(&curves, threshold, repetitions);
    Stats {
        median: median_with_undefined(&crossings),
        std: std_defined(&crossings),
        sr95: n_for_rate(&rates, 0.95),
        sr99: n_for_rate(&rates, 0.99),
        crossings,
        recross,
    }
}

/// Summary table per scheme and threshold, with p-values and ratios
/// against `baseline`.
///
/// Rows come baseline first, then the other schemes in lexicographic order,
/// so the result does not depend on record order.
pub fn summarize(
    records: &[ConvergenceRecord],
    thresholds: &[f64],
    baseline: &str,
    repetitions: usize,
) -> Result<Vec<SchemeSummary>> {
    let labels: BTreeSet<&str> = records.iter().map(|r| r.scheme.as_str()).collect();
    if !labels.contains(baseline) {
        return Err(Error::MissingBaseline(baseline.to_string()));
    }
    let mut ordered = vec![baseline];
    ordered.extend(labels.iter().copied().filter(|&l| l != baseline));
    let ratio = |x: Option<f64>, base: Option<f64>| match (x, base) {
        (Some(x), Some(b)) if b != 0.0 => Some(x / b),
        _ => None,
    };
    let mut rows = Vec::new();
    for &threshold in thresholds {
        let base = scheme_stats(records, baseline, threshold, repetitions);
        let inf = |v: &[Option<f64>]| -> Vec<f64> {
            v.iter().map(|x| x.unwrap_or(f64::INFINITY)).collect()
        };
        let base_values = inf(&base.crossings);
        for &label in &ordered {
            let s = scheme_stats(records, label, threshold, repetitions);
            let p_value = mann_whitney_u_one_tailed(&inf(&s.crossings), &base_values).ok();
            rows.push(SchemeSummary {
                scheme: label.to_string(),
                threshold,
                n_eps_median: s.median,
                n_eps_std: s.std,
                n_sr95: s.sr95,
                n_sr99: s.sr99,
                p_value,
                recross: s.recross,
                rel_n_eps: ratio(s.median, base.median),
                rel_sr95: ratio(s.sr95, base.sr95),
                rel_sr99: ratio(s.sr99, base.sr99),
            });
        }
    }
    Ok(rows)
}
