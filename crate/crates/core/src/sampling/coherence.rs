//! Coherence-optimal sampling by independence Metropolis-Hastings.

use std::f64::consts::PI;

use rand::Rng as _;

use super::{SampleSet, Scheme};
use crate::basis::MultiIndexSet;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Proposal density of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Proposal {
    /// Arcsine when the order is at least the dimension, uniform otherwise.
    #[default]
    Auto,
    Uniform,
    /// Chebyshev density `1 / (π √(1 − ξ²))` per dimension.
    Arcsine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub burn_in: usize,
    pub thinning: usize,
    pub proposal: Proposal,
}

impl Default for ChainParams {
    fn default() -> Self {
        ChainParams {
            burn_in: 1000,
            thinning: 10,
            proposal: Proposal::Auto,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChainOutput {
    /// Row-major points in `[0, 1]^d`.
    pub points: Vec<f64>,
    /// `1 / B(ξ)` per point.
    pub weights: Vec<f64>,
    pub acceptance_rate: f64,
}

struct State {
    u: Vec<f64>,
    log_target: f64,
    log_proposal: f64,
    envelope: f64,
}

/// Draw `m` states from the density proportional to `B²(ξ)` on `[-1, 1]^d`.
pub fn run_chain(
    m: usize,
    basis: &MultiIndexSet,
    seed: u64,
    params: &ChainParams,
) -> Result<ChainOutput> {
    if basis.is_empty() {
        return Err(Error::InvalidInput(
            "coherence-optimal sampling needs a basis".into(),
        ));
    }
    let d = basis.dim();
    let arcsine = match params.proposal {
        Proposal::Auto => basis.order() >= d,
        Proposal::Uniform => false,
        Proposal::Arcsine => true,
    };
    let thinning = params.thinning.max(1);
    let mut rng = rng_from_seed(seed);
    let mut row = vec![0.0; basis.len()];
    let mut xi = vec![0.0; d];

    let mut draw = |rng: &mut crate::rng::Rng| -> Result<State> {
        loop {
            let u: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            let mut log_proposal = 0.0;
            for (x, &uk) in xi.iter_mut().zip(&u) {
                if arcsine {
                    *x = -(PI * uk).cos();
                    log_proposal -= (PI * (PI * uk).sin()).ln();
                } else {
                    *x = 2.0 * uk - 1.0;
                }
            }
            if !log_proposal.is_finite() {
                // u = 0 puts the arcsine density at a pole
                continue;
            }
            basis.eval_row(&xi, &mut row)?;
            let b2: f64 = row.iter().map(|v| v * v).sum();
            if !(b2.is_finite() && b2 > 0.0) {
                return Err(Error::NonFinite("basis envelope"));
            }
            return Ok(State {
                u,
                log_target: b2.ln(),
                log_proposal,
                envelope: b2.sqrt(),
            });
        }
    };

    let mut current = draw(&mut rng)?;
    let total = params.burn_in + m * thinning;
    let mut accepted = 0usize;
    let mut points = Vec::with_capacity(m * d);
    let mut weights = Vec::with_capacity(m);
    for step in 1..=total {
        let cand = draw(&mut rng)?;
        let log_ratio =
            (cand.log_target - cand.log_proposal) - (current.log_target - current.log_proposal);
        let a: f64 = rng.random();
        if log_ratio >= 0.0 || a < log_ratio.exp() {
            current = cand;
            accepted += 1;
        }
        if step > params.burn_in && (step - params.burn_in).is_multiple_of(thinning) {
            for &uk in &current.u {
                let x = if arcsine {
                    -(PI * uk).cos()
                } else {
                    2.0 * uk - 1.0
                };
                points.push(((x + 1.0) / 2.0).clamp(0.0, 1.0));
            }
            weights.push(1.0 / current.envelope);
        }
    }
    let acceptance_rate = if total == 0 {
        0.0
    } else {
        accepted as f64 / total as f64
    };
    log::debug!("coherence-optimal chain: acceptance rate {acceptance_rate:.3}");
    Ok(ChainOutput {
        points,
        weights,
        acceptance_rate,
    })
}

/// Coherence-optimal design of `m` weighted points.
pub fn coherence_optimal(
    m: usize,
    basis: &MultiIndexSet,
    seed: u64,
    params: &ChainParams,
) -> Result<SampleSet> {
    let chain = run_chain(m, basis, seed, params)?;
    SampleSet::weighted(
        chain.points,
        basis.dim(),
        chain.weights,
        Scheme::CoherenceOptimal,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::unit_to_reference;

    #[test]
    fn constant_basis_gives_unit_weights() {
        let basis = MultiIndexSet::new(3, 0, 0).unwrap();
        let s = coherence_optimal(50, &basis, 1, &ChainParams::default()).unwrap();
        assert_eq!(s.len(), 50);
        assert!(s.weights().iter().all(|&w| w == 1.0));
        assert!(!s.is_weighted());
    }

    #[test]
    fn weight_times_envelope_is_one() {
        let basis = MultiIndexSet::new(2, 5, 2).unwrap();
        let s = coherence_optimal(40, &basis, 9, &ChainParams::default()).unwrap();
        for i in 0..s.len() {
            let b = basis.envelope(&unit_to_reference(s.point(i))).unwrap();
            assert!((s.weight(i) * b - 1.0).abs() < 1e-12);
        }
        assert!(s.points().iter().all(|&x| (0.0..=1.0).contains(&x)));
    }

    #[test]
    fn reproducible_from_seed() {
        let basis = MultiIndexSet::new(2, 4, 2).unwrap();
        let a = coherence_optimal(20, &basis, 3, &ChainParams::default()).unwrap();
        let b = coherence_optimal(20, &basis, 3, &ChainParams::default()).unwrap();
        assert_eq!(a, b);
    }

    // Target mass of [lo, hi] by composite Simpson on B².
    fn target_mass(basis: &MultiIndexSet, lo: f64, hi: f64) -> f64 {
        let n = 40;
        let h = (hi - lo) / n as f64;
        let f = |x: f64| basis.envelope(&[x]).unwrap().powi(2);
        let mut s = f(lo) + f(hi);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(lo + k as f64 * h);
        }
        // ∫ B² dξ over [-1, 1] is 2 N_c for an orthonormal basis
        s * h / 3.0 / (2.0 * basis.len() as f64)
    }

    #[test]
    fn chain_matches_target_in_total_variation() {
        let basis = MultiIndexSet::new(1, 8, 1).unwrap();
        let n = 100_000;
        let out = run_chain(n, &basis, 2024, &ChainParams::default()).unwrap();
        assert!(out.acceptance_rate > 0.1);
        let bins = 50;
        let mut counts = vec![0usize; bins];
        for &u in &out.points {
            counts[((u * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let mut tv = 0.0;
        let mut total_mass = 0.0;
        for (b, &c) in counts.iter().enumerate() {
            let lo = -1.0 + 2.0 * b as f64 / bins as f64;
            let hi = lo + 2.0 / bins as f64;
            let p = target_mass(&basis, lo, hi);
            total_mass += p;
            tv += (c as f64 / n as f64 - p).abs();
        }
        assert!(
            (total_mass - 1.0).abs() < 1e-6,
            "quadrature mass {total_mass}"
        );
        let tv = tv / 2.0;
        assert!(tv < 0.05, "total variation {tv}");
    }

    #[test]
    fn uniform_proposal_also_targets_envelope() {
        let basis = MultiIndexSet::new(1, 6, 1).unwrap();
        let params = ChainParams {
            proposal: Proposal::Uniform,
            ..Default::default()
        };
        let out = run_chain(20_000, &basis, 5, &params).unwrap();
        // B² piles mass at the edges: the outer tenth holds far more than 10%
        let edge = out
            .points
            .iter()
            .filter(|&&u| !(0.05..=0.95).contains(&u))
            .count() as f64
            / 20_000.0;
        let expected = target_mass(&basis, -1.0, -0.9) * 2.0;
        assert!((edge - expected).abs() < 0.03, "{edge} vs {expected}");
    }
}
