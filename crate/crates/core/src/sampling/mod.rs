//! Sampling designs in the unit hypercube.
//!
//! Every generator is a deterministic function of its parameters and seed.

mod coherence;
mod greedy;
mod lhs;

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

pub use coherence::{coherence_optimal, run_chain, ChainOutput, ChainParams, Proposal};
pub use greedy::{
    greedy_l1_optimal, greedy_select, GreedyConfig, GreedyCriterion, GreedySelection,
};
pub use lhs::{
    lhs_pool_optimal, lhs_sc_ese, lhs_standard, stretched_strata, EseParams, PoolCriterion,
    PoolParams,
};

/// Sampling scheme tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Random,
    LhsStandard,
    /// Pool-optimal LHS selected by maximin distance.
    LhsMaximin,
    /// Pool-optimal LHS selected by `φ_p`.
    LhsPhiP,
    LhsScEse,
    CoherenceOptimal,
    GreedyMc,
    GreedyMcCc,
    GreedyD,
    GreedyDCoh,
}

impl Scheme {
    pub const ALL: [Scheme; 10] = [
        Scheme::Random,
        Scheme::LhsStandard,
        Scheme::LhsMaximin,
        Scheme::LhsPhiP,
        Scheme::LhsScEse,
        Scheme::CoherenceOptimal,
        Scheme::GreedyMc,
        Scheme::GreedyMcCc,
        Scheme::GreedyD,
        Scheme::GreedyDCoh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Random => "random",
            Scheme::LhsStandard => "lhs-std",
            Scheme::LhsMaximin => "lhs-mm",
            Scheme::LhsPhiP => "lhs-phip",
            Scheme::LhsScEse => "lhs-sc-ese",
            Scheme::CoherenceOptimal => "co",
            Scheme::GreedyMc => "l1-mc",
            Scheme::GreedyMcCc => "l1-mc-cc",
            Scheme::GreedyD => "l1-d",
            Scheme::GreedyDCoh => "l1-d-coh",
        }
    }

    pub fn is_lhs(self) -> bool {
        matches!(
            self,
            Scheme::LhsStandard | Scheme::LhsMaximin | Scheme::LhsPhiP | Scheme::LhsScEse
        )
    }

    pub fn greedy_criterion(self) -> Option<GreedyCriterion> {
        match self {
            Scheme::GreedyMc => Some(GreedyCriterion::Mc),
            Scheme::GreedyMcCc => Some(GreedyCriterion::McCc),
            Scheme::GreedyD => Some(GreedyCriterion::D),
            Scheme::GreedyDCoh => Some(GreedyCriterion::DCoh),
            _ => None,
        }
    }

    /// Schemes whose generator needs the basis.
    pub fn needs_basis(self) -> bool {
        self == Scheme::CoherenceOptimal || self.greedy_criterion().is_some()
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| Error::UnknownScheme(s.to_string()))
    }
}

/// `M` points in `[0, 1]^d` with per-point weights.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    points: Vec<f64>,
    dim: usize,
    weights: Vec<f64>,
    weighted: bool,
    scheme: Scheme,
    seed: u64,
    order: Option<Vec<usize>>,
}

impl SampleSet {
    /// Unweighted set from row-major coordinates.
    pub fn unweighted(points: Vec<f64>, dim: usize, scheme: Scheme, seed: u64) -> Self {
        let m = points.len().checked_div(dim).unwrap_or(0);
        SampleSet {
            points,
            dim,
            weights: vec![1.0; m],
            weighted: false,
            scheme,
            seed,
            order: None,
        }
    }

    /// Weighted set; the weighted flag is cleared when every weight is 1.
    pub fn weighted(
        points: Vec<f64>,
        dim: usize,
        weights: Vec<f64>,
        scheme: Scheme,
        seed: u64,
    ) -> Result<Self> {
        let m = points.len() / dim.max(1);
        if weights.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidInput(format!("weight {w} is not positive")));
        }
        let weighted = weights.iter().any(|&w| w != 1.0);
        Ok(SampleSet {
            points,
            dim,
            weights,
            weighted,
            scheme,
            seed,
            order: None,
        })
    }

    pub(crate) fn with_order(mut self, order: Vec<usize>) -> Self {
        self.order = Some(order);
        self
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Row-major coordinates.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Pool indices in selection order (greedy designs only).
    pub fn selection_order(&self) -> Option<&[usize]> {
        self.order.as_deref()
    }

    /// The first `n` points, keeping weights and order.
    pub fn prefix(&self, n: usize) -> SampleSet {
        let n = n.min(self.len());
        SampleSet {
            points: self.points[..n * self.dim].to_vec(),
            dim: self.dim,
            weights: self.weights[..n].to_vec(),
            weighted: self.weighted,
            scheme: self.scheme,
            seed: self.seed,
            order: self.order.as_ref().map(|o| o[..n].to_vec()),
        }
    }
}

/// `M` i.i.d. uniform points in `[0, 1]^d`.
pub fn random_grid(m: usize, d: usize, seed: u64) -> SampleSet {
    let mut rng = rng_from_seed(seed);
    let points = (0..m * d).map(|_| rng.random::<f64>()).collect();
    SampleSet::unweighted(points, d, Scheme::Random, seed)
}
