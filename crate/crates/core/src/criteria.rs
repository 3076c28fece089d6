//! Scores for measurement matrices and point sets.
//!
//! Matrix criteria (mutual coherence, average cross-correlation, hybrid
//! score, D-optimality) steer the greedy L1-optimal designs; distance
//! criteria (maximin, `φ_p`, periodic variants) steer the Latin hypercube
//! optimizers.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Distances closer than this are one entry of the `φ_p` distance list.
pub const DISTANCE_TIE_TOLERANCE: f64 = 1e-12;

/// Largest normalized absolute inner product between distinct columns.
pub fn mutual_coherence(matrix: &DMatrix<f64>) -> Result<f64> {
    let k = matrix.ncols();
    if k < 2 {
        return Err(Error::InvalidInput(
            "mutual coherence needs at least two columns".into(),
        ));
    }
    let gram = matrix.transpose() * matrix;
    let mut inv_norm = Vec::with_capacity(k);
    for j in 0..k {
        let n2 = gram[(j, j)];
        if n2 <= 0.0 {
            return Err(Error::ZeroColumn(j));
        }
        inv_norm.push(1.0 / n2.sqrt());
    }
    let mut mu = 0.0f64;
    for j in 0..k {
        for i in 0..j {
            mu = mu.max(gram[(i, j)].abs() * inv_norm[i] * inv_norm[j]);
        }
    }
    Ok(mu.min(1.0))
}

/// `(1/N) ‖I − G‖_F²` with `G = ΨᵀΨ / M` and `N = K (K − 1)` for `K`
/// columns.
pub fn avg_cross_correlation(matrix: &DMatrix<f64>) -> Result<f64> {
    let (m, k) = matrix.shape();
    if k < 2 {
        return Err(Error::InvalidInput(
            "average cross-correlation needs at least two columns".into(),
        ));
    }
    if m == 0 {
        return Err(Error::EmptySampleSet);
    }
    let gram = matrix.transpose() * matrix / m as f64;
    let mut sum = 0.0;
    for j in 0..k {
        for i in 0..k {
            let delta = if i == j { 1.0 } else { 0.0 };
            let e = delta - gram[(i, j)];
            sum += e * e;
        }
    }
    Ok(sum / (k * (k - 1)) as f64)
}

/// Index minimizing the min-max normalized hybrid of coherence and
/// cross-correlation scores.
///
/// A metric whose candidates all share one value contributes zero.
pub fn hybrid_score(mu: &[f64], gamma: &[f64]) -> Result<usize> {
    if mu.is_empty() || gamma.is_empty() {
        return Err(Error::InvalidInput("hybrid score needs candidates".into()));
    }
    if mu.len() != gamma.len() {
        return Err(Error::DimensionMismatch {
            expected: mu.len(),
            found: gamma.len(),
        });
    }
    let scores = hybrid_values(mu, gamma);
    Ok(argmin(&scores).expect("non-empty"))
}

/// Per-candidate hybrid values.
pub fn hybrid_values(mu: &[f64], gamma: &[f64]) -> Vec<f64> {
    let norm = |v: &[f64]| {
        let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        v.iter()
            .map(|&x| if span > 0.0 { (x - lo) / span } else { 0.0 })
            .collect::<Vec<_>>()
    };
    let a = norm(mu);
    let b = norm(gamma);
    a.iter().zip(&b).map(|(x, y)| x * x + y * y).collect()
}

/// First index of the smallest value (NaN never wins).
pub fn argmin(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if v >= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
        .or(if values.is_empty() { None } else { Some(0) })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DOptimalityMode {
    /// `|G⁻¹|^{1/N_c}` of the nonsingular Gramian; smaller is better.
    Gramian,
    /// `det(ΨΨᵀ)^{1/M}` for fewer rows than columns; larger is better.
    RankDeficient,
    /// Square-or-tall matrix with a singular Gramian.
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DOptimality {
    pub value: f64,
    pub mode: DOptimalityMode,
}

/// D-optimality of a measurement matrix.
pub fn d_optimality(matrix: &DMatrix<f64>) -> DOptimality {
    let (m, n) = matrix.shape();
    if m >= n && n > 0 {
        let gram = matrix.transpose() * matrix / m as f64;
        match log_det_spd(&gram) {
            Some(ld) => DOptimality {
                value: (-ld / n as f64).exp(),
                mode: DOptimalityMode::Gramian,
            },
            None => DOptimality {
                value: f64::INFINITY,
                mode: DOptimalityMode::Singular,
            },
        }
    } else {
        let outer = matrix * matrix.transpose();
        let value = log_det_spd(&outer).map_or(0.0, |ld| (ld / m.max(1) as f64).exp());
        DOptimality {
            value,
            mode: DOptimalityMode::RankDeficient,
        }
    }
}

/// `ln det` of a symmetric positive-definite matrix, `None` if not SPD.
///
/// Pivots below `1e-12` of the largest diagonal entry count as singular.
pub fn log_det_spd(a: &DMatrix<f64>) -> Option<f64> {
    let chol = a.clone().cholesky()?;
    let l = chol.l_dirty();
    let scale = a.diagonal().iter().copied().fold(0.0f64, f64::max);
    let mut ld = 0.0;
    for i in 0..a.nrows() {
        let d = l[(i, i)];
        if d <= 0.0 || !d.is_finite() || d * d <= 1e-12 * scale {
            return None;
        }
        ld += 2.0 * d.ln();
    }
    Some(ld)
}

/// Distance metric between design points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    /// Exponent `t` of the Minkowski distance (1 or 2 in practice).
    pub t: f64,
    /// Use the wrapped per-coordinate distance `min(|Δ|, 1 − |Δ|)`.
    pub periodic: bool,
}

impl Default for Metric {
    fn default() -> Self {
        Metric {
            t: 2.0,
            periodic: false,
        }
    }
}

impl Metric {
    pub fn euclidean() -> Self {
        Self::default()
    }

    pub fn periodic() -> Self {
        Metric {
            t: 2.0,
            periodic: true,
        }
    }

    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut s = 0.0;
        for (x, y) in a.iter().zip(b) {
            let mut delta = (x - y).abs();
            if self.periodic {
                delta = delta.min(1.0 - delta);
            }
            s += if self.t == 2.0 {
                delta * delta
            } else {
                delta.powf(self.t)
            };
        }
        if self.t == 2.0 {
            s.sqrt()
        } else {
            s.powf(1.0 / self.t)
        }
    }
}

/// All pairwise distances of a row-major point set.
pub fn pairwise_distances(points: &[f64], dim: usize, metric: Metric) -> Vec<f64> {
    let n = points.len() / dim;
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        let a = &points[i * dim..(i + 1) * dim];
        for j in i + 1..n {
            out.push(metric.distance(a, &points[j * dim..(j + 1) * dim]));
        }
    }
    out
}

fn check_points(points: &[f64], dim: usize) -> Result<()> {
    if dim == 0 || !points.len().is_multiple_of(dim) {
        return Err(Error::InvalidInput(
            "point buffer is not a multiple of dim".into(),
        ));
    }
    if points.len() / dim < 2 {
        return Err(Error::InvalidInput(
            "distance criteria need at least two points".into(),
        ));
    }
    Ok(())
}

/// Minimum inter-site distance.
pub fn maximin_distance(points: &[f64], dim: usize, metric: Metric) -> Result<f64> {
    check_points(points, dim)?;
    Ok(pairwise_distances(points, dim, metric)
        .into_iter()
        .fold(f64::INFINITY, f64::min))
}

/// `φ_p = (Σ_i J_i d_i^{-p})^{1/p}` over the distinct-distance list.
///
/// Coincident points give `+∞`.
pub fn phi_p(points: &[f64], dim: usize, p_exp: f64, metric: Metric) -> Result<f64> {
    check_points(points, dim)?;
    let mut dist = pairwise_distances(points, dim, metric);
    dist.sort_by(f64::total_cmp);
    // distinct-distance list with multiplicities
    let mut list: Vec<(f64, usize)> = Vec::new();
    for d in dist {
        match list.last_mut() {
            Some((v, j)) if (d - *v).abs() <= DISTANCE_TIE_TOLERANCE => *j += 1,
            _ => list.push((d, 1)),
        }
    }
    Ok(phi_p_from_list(&list, p_exp))
}

fn phi_p_from_list(list: &[(f64, usize)], p_exp: f64) -> f64 {
    let d_min = list[0].0;
    if d_min <= 0.0 {
        return f64::INFINITY;
    }
    // factor out d_min to keep d^{-p} representable
    let s: f64 = list
        .iter()
        .map(|&(d, j)| j as f64 * (d / d_min).powf(-p_exp))
        .sum();
    s.powf(1.0 / p_exp) / d_min
}

/// `φ_p` summed pair by pair without building the distance list.
///
/// Equal to [`phi_p`] up to rounding; used inside optimizer loops.
pub(crate) fn phi_p_pairs(points: &[f64], dim: usize, p_exp: f64, metric: Metric) -> f64 {
    let dist = pairwise_distances(points, dim, metric);
    let d_min = dist.iter().copied().fold(f64::INFINITY, f64::min);
    if d_min <= 0.0 {
        return f64::INFINITY;
    }
    let s: f64 = dist.iter().map(|&d| (d / d_min).powf(-p_exp)).sum();
    s.powf(1.0 / p_exp) / d_min
}
