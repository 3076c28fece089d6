//! Greedy L1-optimal designs: rows are added one at a time from a candidate
//! pool, each time picking the candidate that optimizes a matrix criterion.

use nalgebra::DMatrix;
use rand::Rng as _;
use rayon::prelude::*;

use super::{coherence_optimal, random_grid, ChainParams, SampleSet, Scheme};
use crate::basis::{basis_matrix, MultiIndexSet};
use crate::criteria::hybrid_values;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GreedyCriterion {
    /// Minimize mutual coherence.
    Mc,
    /// Minimize the hybrid of mutual coherence and cross-correlation.
    McCc,
    /// Maximize the information determinant.
    D,
    /// D rule on a coherence-optimal candidate pool.
    DCoh,
}

impl GreedyCriterion {
    pub fn scheme(self) -> Scheme {
        match self {
            GreedyCriterion::Mc => Scheme::GreedyMc,
            GreedyCriterion::McCc => Scheme::GreedyMcCc,
            GreedyCriterion::D => Scheme::GreedyD,
            GreedyCriterion::DCoh => Scheme::GreedyDCoh,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyConfig {
    pub pool_size: usize,
    pub criterion: GreedyCriterion,
    pub target_size: usize,
    /// Chain settings for the D-COH pool.
    pub chain: ChainParams,
}

impl GreedyConfig {
    /// Pool of ten candidates per requested point.
    pub fn new(criterion: GreedyCriterion, target_size: usize) -> Self {
        GreedyConfig {
            pool_size: 10 * target_size,
            criterion,
            target_size,
            chain: ChainParams::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.target_size < 2 {
            return Err(Error::InvalidInput(
                "greedy designs need at least two points".into(),
            ));
        }
        if self.target_size > self.pool_size {
            return Err(Error::PoolExhausted {
                requested: self.target_size,
                pool: self.pool_size,
            });
        }
        Ok(())
    }
}

/// Pool rows in the order they were picked, with the score of each pick.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedySelection {
    pub order: Vec<usize>,
    /// Criterion value of every addition after the initial row.
    pub scores: Vec<f64>,
}

/// Run the greedy selection on a pool matrix, starting from `initial`.
pub fn greedy_select(
    pool: &DMatrix<f64>,
    m: usize,
    criterion: GreedyCriterion,
    initial: usize,
) -> Result<GreedySelection> {
    let n_pool = pool.nrows();
    if m > n_pool {
        return Err(Error::PoolExhausted {
            requested: m,
            pool: n_pool,
        });
    }
    if initial >= n_pool {
        return Err(Error::InvalidInput(format!(
            "initial row {initial} outside a pool of {n_pool}"
        )));
    }
    // row-major copy so candidate rows are contiguous
    let k = pool.ncols();
    let rows: Vec<f64> = (0..n_pool)
        .flat_map(|i| pool.row(i).iter().copied().collect::<Vec<_>>())
        .collect();
    match criterion {
        GreedyCriterion::Mc | GreedyCriterion::McCc => {
            select_coherence(&rows, k, m, criterion == GreedyCriterion::McCc, initial)
        }
        GreedyCriterion::D | GreedyCriterion::DCoh => select_determinant(&rows, k, m, initial),
    }
}

fn select_coherence(
    rows: &[f64],
    k: usize,
    m: usize,
    hybrid: bool,
    initial: usize,
) -> Result<GreedySelection> {
    let n_pool = rows.len() / k;
    let mut gram = vec![0.0; k * k];
    let mut used = vec![false; n_pool];
    let mut order = Vec::with_capacity(m);
    let mut scores = Vec::with_capacity(m.saturating_sub(1));
    let add = |gram: &mut [f64], i: usize| {
        let r = &rows[i * k..(i + 1) * k];
        for a in 0..k {
            for b in a..k {
                gram[a * k + b] += r[a] * r[b];
            }
        }
    };
    add(&mut gram, initial);
    used[initial] = true;
    order.push(initial);
    while order.len() < m {
        let n_rows = order.len() + 1;
        let candidates: Vec<usize> = (0..n_pool).filter(|&i| !used[i]).collect();
        let metrics: Vec<(f64, f64)> = candidates
            .par_iter()
            .map(|&c| candidate_metrics(&gram, &rows[c * k..(c + 1) * k], k, n_rows))
            .collect();
        let values: Vec<f64> = if hybrid {
            let mu: Vec<f64> = metrics.iter().map(|m| m.0).collect();
            let gamma: Vec<f64> = metrics.iter().map(|m| m.1).collect();
            hybrid_values(&mu, &gamma)
        } else {
            metrics.iter().map(|m| m.0).collect()
        };
        let best = first_min(&values);
        let pick = candidates[best];
        add(&mut gram, pick);
        used[pick] = true;
        order.push(pick);
        scores.push(values[best]);
    }
    Ok(GreedySelection { order, scores })
}

// Mutual coherence and average cross-correlation of the current rows plus
// `r`, from the upper triangle of the current Gram matrix.
fn candidate_metrics(gram: &[f64], r: &[f64], k: usize, n_rows: usize) -> (f64, f64) {
    let mf = n_rows as f64;
    let mut inv = vec![0.0; k];
    let mut diag_term = 0.0;
    for i in 0..k {
        let g = gram[i * k + i] + r[i] * r[i];
        inv[i] = if g > 0.0 { 1.0 / g.sqrt() } else { 0.0 };
        let e = 1.0 - g / mf;
        diag_term += e * e;
    }
    let mut mu = 0.0f64;
    let mut off = 0.0;
    for i in 0..k {
        let ri = r[i];
        let g = &gram[i * k + i + 1..(i + 1) * k];
        let (rs, is) = (&r[i + 1..], &inv[i + 1..]);
        // four lanes so the loop vectorizes
        let mut sq = [0.0f64; 4];
        let mut mx = [0.0f64; 4];
        let chunks = g.len() / 4;
        for c in 0..chunks {
            for l in 0..4 {
                let j = 4 * c + l;
                let v = g[j] + ri * rs[j];
                sq[l] += v * v;
                let a = v.abs() * is[j];
                mx[l] = if a > mx[l] { a } else { mx[l] };
            }
        }
        for j in 4 * chunks..g.len() {
            let v = g[j] + ri * rs[j];
            sq[0] += v * v;
            let a = v.abs() * is[j];
            mx[0] = if a > mx[0] { a } else { mx[0] };
        }
        off += (sq[0] + sq[1]) + (sq[2] + sq[3]);
        let row_max = mx[0].max(mx[1]).max(mx[2].max(mx[3]));
        mu = mu.max(row_max * inv[i]);
    }
    let gamma = if k > 1 {
        (2.0 * off / (mf * mf) + diag_term) / (k * (k - 1)) as f64
    } else {
        0.0
    };
    (mu.min(1.0), gamma)
}

fn first_min(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] || values[best].is_nan() {
            best = i;
        }
    }
    best
}

// Determinant growth: while the selected rows are rank deficient the
// candidate with the largest residual against their span maximizes
// det(ΨΨᵀ); afterwards rᵀG⁻¹r is maximized with Sherman-Morrison updates.
fn select_determinant(rows: &[f64], k: usize, m: usize, initial: usize) -> Result<GreedySelection> {
    let n_pool = rows.len() / k;
    let row = |i: usize| &rows[i * k..(i + 1) * k];
    let norms: Vec<f64> = (0..n_pool)
        .map(|i| row(i).iter().map(|v| v * v).sum())
        .collect();
    let mut projected = vec![0.0; n_pool];
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut used = vec![false; n_pool];
    let mut order = vec![initial];
    let mut scores = Vec::new();
    used[initial] = true;

    let push_basis = |basis: &mut Vec<Vec<f64>>, projected: &mut [f64], r: &[f64]| {
        let mut q = r.to_vec();
        // two passes of Gram-Schmidt for stability
        for _ in 0..2 {
            for b in basis.iter() {
                let c: f64 = q.iter().zip(b).map(|(x, y)| x * y).sum();
                q.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let n: f64 = q.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n <= 1e-12 * r.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300) {
            return;
        }
        q.iter_mut().for_each(|v| *v /= n);
        for (i, p) in projected.iter_mut().enumerate() {
            let c: f64 = rows[i * k..(i + 1) * k]
                .iter()
                .zip(&q)
                .map(|(x, y)| x * y)
                .sum();
            *p += c * c;
        }
        basis.push(q);
    };
    push_basis(&mut basis, &mut projected, row(initial));

    let mut gram_inv: Option<DMatrix<f64>> = None;
    while order.len() < m {
        if gram_inv.is_none() && order.len() >= k {
            let mut g = DMatrix::<f64>::zeros(k, k);
            for &i in &order {
                let r = nalgebra::DVector::from_column_slice(row(i));
                g += &r * r.transpose();
            }
            gram_inv = g.cholesky().map(|c| c.inverse());
        }
        let pick;
        let score;
        if let Some(inv) = gram_inv.as_mut() {
            let gains: Vec<f64> = (0..n_pool)
                .into_par_iter()
                .map(|i| {
                    if used[i] {
                        return f64::NEG_INFINITY;
                    }
                    let r = nalgebra::DVector::from_column_slice(row(i));
                    (r.transpose() * &*inv * &r)[(0, 0)]
                })
                .collect();
            let best = first_max(&gains);
            pick = best;
            score = -(1.0 + gains[best]).ln();
            let r = nalgebra::DVector::from_column_slice(row(pick));
            let v = &*inv * &r;
            let denom = 1.0 + r.dot(&v);
            *inv -= &v * v.transpose() / denom;
        } else {
            let residual: Vec<f64> = (0..n_pool)
                .map(|i| {
                    if used[i] {
                        f64::NEG_INFINITY
                    } else {
                        (norms[i] - projected[i]).max(0.0)
                    }
                })
                .collect();
            let best = first_max(&residual);
            pick = best;
            score = -residual[best].ln();
            push_basis(&mut basis, &mut projected, row(pick));
        }
        used[pick] = true;
        order.push(pick);
        scores.push(score);
    }
    Ok(GreedySelection { order, scores })
}

fn first_max(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Greedy L1-optimal design of `config.target_size` points.
///
/// Points come back in selection order, so every prefix is itself a greedy
/// design.
pub fn greedy_l1_optimal(
    config: &GreedyConfig,
    basis: &MultiIndexSet,
    seed: u64,
) -> Result<SampleSet> {
    config.validate()?;
    let d = basis.dim();
    let pool_seed = derive_seed(seed, 0);
    let pool = match config.criterion {
        GreedyCriterion::DCoh => {
            coherence_optimal(config.pool_size, basis, pool_seed, &config.chain)?
        }
        _ => random_grid(config.pool_size, d, pool_seed),
    };
    let weights = pool.is_weighted().then(|| pool.weights());
    let matrix = basis_matrix(pool.points(), d, weights, basis)?;
    let initial = rng_from_seed(derive_seed(seed, 1)).random_range(0..config.pool_size);
    let selection = greedy_select(&matrix, config.target_size, config.criterion, initial)?;
    let mut points = Vec::with_capacity(config.target_size * d);
    let mut w = Vec::with_capacity(config.target_size);
    for &i in &selection.order {
        points.extend_from_slice(pool.point(i));
        w.push(pool.weight(i));
    }
    let scheme = config.criterion.scheme();
    let set = if pool.is_weighted() {
        SampleSet::weighted(points, d, w, scheme, seed)?
    } else {
        SampleSet::unweighted(points, d, scheme, seed)
    };
    Ok(set.with_order(selection.order))
}
