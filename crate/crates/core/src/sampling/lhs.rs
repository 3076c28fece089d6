//! Latin hypercube designs: standard, pool-optimal and stretched-center ESE.

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{SampleSet, Scheme};
use crate::criteria::{maximin_distance, phi_p_pairs, Metric};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed, Rng};

/// Standard LHS: every column holds exactly one point per stratum
/// `[(j−1)/M, j/M)`.
pub fn lhs_standard(m: usize, d: usize, seed: u64) -> SampleSet {
    let mut rng = rng_from_seed(seed);
    let points = stratified_columns(m, d, &mut rng, |j, u| (j as f64 + u) / m as f64);
    SampleSet::unweighted(points, d, Scheme::LhsStandard, seed)
}

// Column by column: a fresh permutation of the strata, then one uniform per
// row placed inside its stratum by `place(stratum, u)`.
fn stratified_columns(
    m: usize,
    d: usize,
    rng: &mut Rng,
    place: impl Fn(usize, f64) -> f64,
) -> Vec<f64> {
    let mut points = vec![0.0; m * d];
    let mut perm: Vec<usize> = (0..m).collect();
    for col in 0..d {
        perm.sort_unstable();
        perm.shuffle(rng);
        for (i, &stratum) in perm.iter().enumerate() {
            let u: f64 = rng.random();
            points[i * d + col] = place(stratum, u);
        }
    }
    points
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoolCriterion {
    /// Maximize the minimum inter-site distance.
    Maximin,
    /// Minimize `φ_p`.
    PhiP,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoolParams {
    pub n_pool: usize,
    pub criterion: PoolCriterion,
    pub p_exp: f64,
    pub metric: Metric,
}

impl Default for PoolParams {
    fn default() -> Self {
        PoolParams {
            n_pool: 100,
            criterion: PoolCriterion::Maximin,
            p_exp: 10.0,
            metric: Metric::euclidean(),
        }
    }
}

/// Best of `n_pool` standard LHS designs under the pool criterion.
///
/// Candidate 0 uses `seed` itself, so the plain design is always in the pool.
pub fn lhs_pool_optimal(m: usize, d: usize, seed: u64, params: &PoolParams) -> Result<SampleSet> {
    if params.n_pool == 0 {
        return Err(Error::InvalidInput("n_pool must be at least 1".into()));
    }
    let score = |s: &SampleSet| -> f64 {
        if s.len() < 2 {
            return 0.0;
        }
        match params.criterion {
            // larger is better: negate so that smaller wins
            PoolCriterion::Maximin => {
                -maximin_distance(s.points(), d, params.metric).unwrap_or(0.0)
            }
            PoolCriterion::PhiP => phi_p_pairs(s.points(), d, params.p_exp, params.metric),
        }
    };
    let mut best: Option<(f64, SampleSet)> = None;
    for k in 0..params.n_pool {
        let sub = if k == 0 {
            seed
        } else {
            derive_seed(seed, k as u64)
        };
        let candidate = lhs_standard(m, d, sub);
        let s = score(&candidate);
        if best.as_ref().is_none_or(|(b, _)| s < *b) {
            best = Some((s, candidate));
        }
    }
    let (_, design) = best.expect("n_pool >= 1");
    let scheme = match params.criterion {
        PoolCriterion::Maximin => Scheme::LhsMaximin,
        PoolCriterion::PhiP => Scheme::LhsPhiP,
    };
    Ok(SampleSet::unweighted(design.points, d, scheme, seed))
}

/// Stratum bounds with the two border strata shrunk to `alpha / M` and the
/// `M − 2` interior strata sharing the rest equally.
pub fn stretched_strata(m: usize, alpha: f64) -> Vec<(f64, f64)> {
    let mf = m as f64;
    let border = alpha / mf;
    if m == 1 {
        return vec![(0.0, 1.0)];
    }
    let interior = if m > 2 {
        (1.0 - 2.0 * border) / (mf - 2.0)
    } else {
        0.0
    };
    (0..m)
        .map(|j| {
            if j == 0 {
                (0.0, border)
            } else if j == m - 1 {
                (1.0 - border, 1.0)
            } else {
                let lo = border + (j - 1) as f64 * interior;
                (lo, lo + interior)
            }
        })
        .collect()
}

/// Settings of the enhanced stochastic evolutionary optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EseParams {
    pub outer_iterations: usize,
    /// Exchange proposals per outer iteration; `None` means `min(50, 2M)`.
    pub inner_iterations: Option<usize>,
    /// Initial acceptance threshold as a fraction of the starting `φ_p`.
    pub initial_threshold: f64,
    pub improve_factor: f64,
    pub stagnate_factor: f64,
    pub p_exp: f64,
    pub metric: Metric,
}

impl Default for EseParams {
    fn default() -> Self {
        EseParams {
            outer_iterations: 30,
            inner_iterations: None,
            initial_threshold: 0.005,
            improve_factor: 0.9,
            stagnate_factor: 1.1,
            p_exp: 10.0,
            metric: Metric::euclidean(),
        }
    }
}

/// Stretched-center LHS refined by element exchanges that minimize `φ_p`.
pub fn lhs_sc_ese(m: usize, d: usize, seed: u64, alpha: f64, ese: &EseParams) -> Result<SampleSet> {
    if m < 2 {
        return Err(Error::InvalidInput(
            "SC-ESE needs at least two points to define border strata".into(),
        ));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "alpha = {alpha} must lie in (0, 1]"
        )));
    }
    let strata = stretched_strata(m, alpha);
    let mut rng = rng_from_seed(seed);
    let mut points = stratified_columns(m, d, &mut rng, |j, u| {
        let (lo, hi) = strata[j];
        lo + u * (hi - lo)
    });
    let mut opt_rng = rng_from_seed(derive_seed(seed, 1));
    ese_optimize(&mut points, m, d, ese, &mut opt_rng);
    Ok(SampleSet::unweighted(points, d, Scheme::LhsScEse, seed))
}

// Pairwise d^{-p} terms kept up to date under single-column swaps.
struct PairTerms {
    m: usize,
    d: usize,
    p_exp: f64,
    metric: Metric,
    terms: Vec<f64>,
    sum: f64,
}

impl PairTerms {
    fn new(points: &[f64], m: usize, d: usize, p_exp: f64, metric: Metric) -> Self {
        let mut t = PairTerms {
            m,
            d,
            p_exp,
            metric,
            terms: vec![0.0; m * m],
            sum: 0.0,
        };
        t.rebuild(points);
        t
    }

    fn term(&self, points: &[f64], i: usize, j: usize) -> f64 {
        let d = self.d;
        let dist = self
            .metric
            .distance(&points[i * d..(i + 1) * d], &points[j * d..(j + 1) * d]);
        dist.powf(-self.p_exp)
    }

    fn rebuild(&mut self, points: &[f64]) {
        self.sum = 0.0;
        for i in 0..self.m {
            for j in i + 1..self.m {
                let v = self.term(points, i, j);
                self.terms[i * self.m + j] = v;
                self.terms[j * self.m + i] = v;
                self.sum += v;
            }
        }
    }

    fn phi(&self) -> f64 {
        self.sum.powf(1.0 / self.p_exp)
    }

    // New terms for rows a and b after the points were modified, with the
    // change in the sum.
    fn propose(&self, points: &[f64], a: usize, b: usize) -> (Vec<f64>, Vec<f64>, f64) {
        let mut ta = vec![0.0; self.m];
        let mut tb = vec![0.0; self.m];
        let mut delta = 0.0;
        for k in 0..self.m {
            if k != a {
                ta[k] = self.term(points, a, k);
                if k != b {
                    delta += ta[k] - self.terms[a * self.m + k];
                }
            }
            if k != b {
                tb[k] = self.term(points, b, k);
                if k != a {
                    delta += tb[k] - self.terms[b * self.m + k];
                }
            }
        }
        // the (a, b) distance is unchanged by swapping one coordinate
        (ta, tb, delta)
    }

    fn commit(&mut self, a: usize, b: usize, ta: &[f64], tb: &[f64], delta: f64) {
        let m = self.m;
        for k in 0..m {
            if k != a && k != b {
                self.terms[a * m + k] = ta[k];
                self.terms[k * m + a] = ta[k];
                self.terms[b * m + k] = tb[k];
                self.terms[k * m + b] = tb[k];
            }
        }
        self.sum += delta;
    }
}

/// Element-exchange optimization of `φ_p`; returns the best design visited.
fn ese_optimize(points: &mut [f64], m: usize, d: usize, params: &EseParams, rng: &mut Rng) {
    if params.outer_iterations == 0 || m < 3 {
        return;
    }
    let inner = params.inner_iterations.unwrap_or((2 * m).min(50));
    let initial = points.to_vec();
    let mut terms = PairTerms::new(points, m, d, params.p_exp, params.metric);
    let mut current = terms.phi();
    if !current.is_finite() {
        return;
    }
    let mut best = current;
    let mut best_points = points.to_vec();
    let mut threshold = params.initial_threshold * current;
    let mut proposal = 0usize;
    for _ in 0..params.outer_iterations {
        let mut improved = false;
        for _ in 0..inner {
            let col = proposal % d;
            proposal += 1;
            let a = rng.random_range(0..m);
            let mut b = rng.random_range(0..m - 1);
            if b >= a {
                b += 1;
            }
            points.swap(a * d + col, b * d + col);
            let (ta, tb, delta) = terms.propose(points, a, b);
            let candidate = (terms.sum + delta).powf(1.0 / params.p_exp);
            let u: f64 = rng.random();
            if candidate - current <= threshold * u {
                terms.commit(a, b, &ta, &tb, delta);
                current = candidate;
                if current < best {
                    best = current;
                    best_points.copy_from_slice(points);
                    improved = true;
                }
            } else {
                points.swap(a * d + col, b * d + col);
            }
        }
        // drift control for the running sum
        terms.rebuild(points);
        current = terms.phi();
        threshold *= if improved {
            params.improve_factor
        } else {
            params.stagnate_factor
        };
    }
    let before = phi_p_pairs(&initial, d, params.p_exp, params.metric);
    let after = phi_p_pairs(&best_points, d, params.p_exp, params.metric);
    if after <= before {
        points.copy_from_slice(&best_points);
    } else {
        points.copy_from_slice(&initial);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::phi_p;

    fn column(s: &SampleSet, col: usize) -> Vec<f64> {
        (0..s.len()).map(|i| s.point(i)[col]).collect()
    }

    fn assert_stratified(values: &[f64]) {
        let m = values.len();
        let mut counts = vec![0usize; m];
        for &v in values {
            assert!((0.0..1.0).contains(&v));
            counts[(v * m as f64).floor() as usize] += 1;
        }
        assert!(counts.iter().all(|&c| c == 1), "counts {counts:?}");
    }

    #[test]
    fn standard_lhs_is_stratified() {
        let s = lhs_standard(4, 1, 3);
        assert_stratified(&column(&s, 0));
        let s = lhs_standard(4, 2, 8);
        assert_stratified(&column(&s, 0));
        assert_stratified(&column(&s, 1));
        let s = lhs_standard(100, 3, 21);
        for c in 0..3 {
            assert_stratified(&column(&s, c));
        }
    }

    #[test]
    fn pool_of_one_is_plain_lhs() {
        let params = PoolParams {
            n_pool: 1,
            ..Default::default()
        };
        let pooled = lhs_pool_optimal(7, 3, 17, &params).unwrap();
        assert_eq!(pooled.points(), lhs_standard(7, 3, 17).points());
    }

    #[test]
    fn maximin_pool_never_worse_than_plain() {
        let plain = lhs_standard(5, 2, 2024);
        let pooled = lhs_pool_optimal(5, 2, 2024, &PoolParams::default()).unwrap();
        let dp = maximin_distance(plain.points(), 2, Metric::euclidean()).unwrap();
        let dq = maximin_distance(pooled.points(), 2, Metric::euclidean()).unwrap();
        assert!(dq >= dp);
        for c in 0..2 {
            assert_stratified(&column(&pooled, c));
        }
    }

    #[test]
    fn tiny_pool_matches_exhaustive_best() {
        for criterion in [PoolCriterion::Maximin, PoolCriterion::PhiP] {
            let params = PoolParams {
                n_pool: 3,
                criterion,
                ..Default::default()
            };
            let pooled = lhs_pool_optimal(6, 2, 77, &params).unwrap();
            let candidates: Vec<SampleSet> = (0..3)
                .map(|k| lhs_standard(6, 2, if k == 0 { 77 } else { derive_seed(77, k) }))
                .collect();
            let best = match criterion {
                PoolCriterion::Maximin => candidates
                    .iter()
                    .max_by(|a, b| {
                        let da = maximin_distance(a.points(), 2, Metric::euclidean()).unwrap();
                        let db = maximin_distance(b.points(), 2, Metric::euclidean()).unwrap();
                        da.total_cmp(&db)
                    })
                    .unwrap(),
                PoolCriterion::PhiP => candidates
                    .iter()
                    .min_by(|a, b| {
                        let da = phi_p(a.points(), 2, 10.0, Metric::euclidean()).unwrap();
                        let db = phi_p(b.points(), 2, 10.0, Metric::euclidean()).unwrap();
                        da.total_cmp(&db)
                    })
                    .unwrap(),
            };
            assert_eq!(pooled.points(), best.points());
        }
    }

    #[test]
    fn two_point_sc_ese_hugs_edges() {
        for seed in 0..50 {
            let s = lhs_sc_ese(2, 1, seed, 0.25, &EseParams::default()).unwrap();
            for &v in s.points() {
                assert!(v <= 0.125 || v >= 0.875, "value {v}");
            }
        }
    }

    #[test]
    fn sc_ese_without_shrink_or_search_is_standard_lhs() {
        let ese = EseParams {
            outer_iterations: 0,
            ..Default::default()
        };
        let a = lhs_sc_ese(9, 3, 5, 1.0, &ese).unwrap();
        let b = lhs_standard(9, 3, 5);
        for (x, y) in a.points().iter().zip(b.points()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn ese_never_increases_phi_p() {
        for seed in 0..5 {
            let no_search = EseParams {
                outer_iterations: 0,
                ..Default::default()
            };
            let before = lhs_sc_ese(30, 2, seed, 0.25, &no_search).unwrap();
            let after = lhs_sc_ese(30, 2, seed, 0.25, &EseParams::default()).unwrap();
            let pb = phi_p(before.points(), 2, 10.0, Metric::euclidean()).unwrap();
            let pa = phi_p(after.points(), 2, 10.0, Metric::euclidean()).unwrap();
            assert!(pa <= pb, "{pa} > {pb}");
        }
    }

    #[test]
    fn sc_ese_interior_strata_hold_one_point() {
        let m = 12;
        let s = lhs_sc_ese(m, 3, 4, 0.25, &EseParams::default()).unwrap();
        let strata = stretched_strata(m, 0.25);
        for c in 0..3 {
            let mut counts = vec![0; m];
            for v in column(&s, c) {
                let j = strata
                    .iter()
                    .position(|&(lo, hi)| v >= lo && v <= hi)
                    .expect("value inside some stratum");
                counts[j] += 1;
            }
            assert!(counts.iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn sc_ese_rejects_single_point() {
        assert!(lhs_sc_ese(1, 2, 0, 0.25, &EseParams::default()).is_err());
        assert!(lhs_sc_ese(5, 2, 0, 0.0, &EseParams::default()).is_err());
    }

    #[test]
    fn stretched_strata_tile_the_interval() {
        let s = stretched_strata(6, 0.25);
        assert_eq!(s[0], (0.0, 0.25 / 6.0));
        assert!((s[5].0 - (1.0 - 0.25 / 6.0)).abs() < 1e-15);
        for w in s.windows(2) {
            assert!((w[0].1 - w[1].0).abs() < 1e-15);
        }
        let unshrunk = stretched_strata(5, 1.0);
        for (j, (lo, hi)) in unshrunk.iter().enumerate() {
            assert!((lo - j as f64 / 5.0).abs() < 1e-15);
            assert!((hi - (j + 1) as f64 / 5.0).abs() < 1e-15);
        }
    }
}
