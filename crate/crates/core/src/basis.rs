//! Truncated multi-index sets, orthonormal Legendre polynomials and the
//! GPCE measurement matrix.
//!
//! Sample points live in the unit hypercube `[0, 1]^d`. They are mapped to
//! `[-1, 1]^d` for basis evaluation and to physical units (see [`InputSpec`])
//! for model evaluation.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::SampleSet;

/// Per-dimension polynomial degrees of one basis function.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Total order `‖α‖₁`.
    pub fn total_order(&self) -> usize {
        self.0.iter().sum()
    }

    /// Interaction order `‖α‖₀`.
    pub fn interaction_order(&self) -> usize {
        self.0.iter().filter(|&&a| a > 0).count()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn degrees(&self) -> &[usize] {
        &self.0
    }
}

/// The set `A(p, p_i) = {α : ‖α‖₁ ≤ p, ‖α‖₀ ≤ p_i}` in graded
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiIndexSet {
    d: usize,
    p: usize,
    p_i: usize,
    indices: Vec<MultiIndex>,
}

impl MultiIndexSet {
    pub fn new(d: usize, p: usize, p_i: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        Ok(build_multi_index_set(d, p, p_i))
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.p
    }

    pub fn interaction_order(&self) -> usize {
        self.p_i
    }

    /// Number of basis functions `N_c`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn get(&self, j: usize) -> &MultiIndex {
        &self.indices[j]
    }

    /// Position of the constant basis function.
    pub fn zero_position(&self) -> Option<usize> {
        self.indices.iter().position(MultiIndex::is_zero)
    }

    /// Highest univariate degree appearing in any index.
    pub fn max_degree(&self) -> usize {
        self.indices
            .iter()
            .flat_map(|a| a.0.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Evaluate every basis function at `xi ∈ [-1, 1]^d` into `out`.
    pub fn eval_row(&self, xi: &[f64], out: &mut [f64]) -> Result<()> {
        if xi.len() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: xi.len(),
            });
        }
        if out.len() != self.indices.len() {
            return Err(Error::DimensionMismatch {
                expected: self.indices.len(),
                found: out.len(),
            });
        }
        let table = LegendreTable::new(xi, self.max_degree());
        for (o, alpha) in out.iter_mut().zip(&self.indices) {
            *o = table.product(alpha);
        }
        Ok(())
    }

    /// `B(ξ) = sqrt(Σ_j ψ_j(ξ)²)`, the pointwise bound of the basis.
    pub fn envelope(&self, xi: &[f64]) -> Result<f64> {
        let mut row = vec![0.0; self.len()];
        self.eval_row(xi, &mut row)?;
        Ok(row.iter().map(|v| v * v).sum::<f64>().sqrt())
    }
}

/// Build `A(p, p_i)` for dimension `d`.
///
/// Indices are sorted by ascending total order and lexicographically within
/// each order. `d = 0` is treated as `d = 1`.
pub fn build_multi_index_set(d: usize, p: usize, p_i: usize) -> MultiIndexSet {
    let d = d.max(1);
    let mut indices = Vec::new();
    let mut current = vec![0usize; d];
    for order in 0..=p {
        push_order(&mut indices, &mut current, 0, order, p_i);
    }
    MultiIndexSet { d, p, p_i, indices }
}

// Enumerate all tuples with exactly `remaining` total degree in positions
// `pos..`, respecting the interaction limit, in ascending lexicographic order.
fn push_order(
    out: &mut Vec<MultiIndex>,
    current: &mut [usize],
    pos: usize,
    remaining: usize,
    interactions_left: usize,
) {
    let d = current.len();
    if pos == d - 1 {
        if remaining > 0 && interactions_left == 0 {
            return;
        }
        current[pos] = remaining;
        out.push(MultiIndex(current.to_vec()));
        current[pos] = 0;
        return;
    }
    for a in 0..=remaining {
        if a > 0 && interactions_left == 0 {
            break;
        }
        current[pos] = a;
        let left = if a > 0 {
            interactions_left - 1
        } else {
            interactions_left
        };
        push_order(out, current, pos + 1, remaining - a, left);
    }
    current[pos] = 0;
}

/// Orthonormal Legendre polynomial `ψ_n(x) = sqrt(2n + 1) P_n(x)` with
/// respect to the uniform density on `[-1, 1]`.
pub fn eval_basis_1d(order: usize, x: f64) -> f64 {
    let mut values = vec![0.0; order + 1];
    legendre_orthonormal_into(x, &mut values);
    values[order]
}

/// Fill `out[n] = ψ_n(x)` for `n = 0..out.len()` via the three-term
/// recurrence.
pub fn legendre_orthonormal_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    // P_n first, then scale.
    let mut p_prev = 1.0;
    out[0] = 1.0;
    if out.len() > 1 {
        let mut p_cur = x;
        out[1] = x;
        for n in 1..out.len() - 1 {
            let nf = n as f64;
            let p_next = ((2.0 * nf + 1.0) * x * p_cur - nf * p_prev) / (nf + 1.0);
            p_prev = p_cur;
            p_cur = p_next;
            out[n + 1] = p_cur;
        }
    }
    for (n, v) in out.iter_mut().enumerate() {
        *v *= ((2 * n + 1) as f64).sqrt();
    }
}

/// Product basis function `Ψ_α(ξ) = Π_k ψ_{α_k}(ξ_k)`.
pub fn eval_basis(alpha: &MultiIndex, xi: &[f64]) -> Result<f64> {
    if alpha.dim() != xi.len() {
        return Err(Error::DimensionMismatch {
            expected: alpha.dim(),
            found: xi.len(),
        });
    }
    Ok(alpha
        .0
        .iter()
        .zip(xi)
        .map(|(&a, &x)| eval_basis_1d(a, x))
        .product())
}

// Univariate values ψ_0..ψ_max for each coordinate of one point.
struct LegendreTable {
    width: usize,
    values: Vec<f64>,
}

impl LegendreTable {
    fn new(xi: &[f64], max_degree: usize) -> Self {
        let width = max_degree + 1;
        let mut values = vec![0.0; width * xi.len()];
        for (k, &x) in xi.iter().enumerate() {
            legendre_orthonormal_into(x, &mut values[k * width..(k + 1) * width]);
        }
        LegendreTable { width, values }
    }

    fn product(&self, alpha: &MultiIndex) -> f64 {
        let mut v = 1.0;
        for (k, &a) in alpha.0.iter().enumerate() {
            if a > 0 {
                v *= self.values[k * self.width + a];
            }
        }
        v
    }
}

/// Independent uniform inputs, one `[lower, upper]` interval per dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputSpec {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl InputSpec {
    pub fn new(bounds: &[(f64, f64)]) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidInput(
                "input spec needs at least one dimension".into(),
            ));
        }
        for (k, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::InvalidInput(format!(
                    "dimension {k}: lower bound {lo} must be below upper bound {hi}"
                )));
            }
        }
        Ok(InputSpec {
            lower: bounds.iter().map(|b| b.0).collect(),
            upper: bounds.iter().map(|b| b.1).collect(),
        })
    }

    /// The same interval in every dimension.
    pub fn uniform_cube(d: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(&vec![(lower, upper); d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn bounds(&self, k: usize) -> (f64, f64) {
        (self.lower[k], self.upper[k])
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: n,
            });
        }
        Ok(())
    }

    /// Physical coordinates to `[-1, 1]^d`.
    pub fn normalize_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len())?;
        x.iter()
            .enumerate()
            .map(|(k, &v)| {
                let (lo, hi) = self.bounds(k);
                if !(lo..=hi).contains(&v) {
                    return Err(Error::OutOfDomain {
                        dim: k,
                        value: v,
                        lower: lo,
                        upper: hi,
                    });
                }
                Ok(2.0 * (v - lo) / (hi - lo) - 1.0)
            })
            .collect()
    }

    /// Inverse of [`InputSpec::normalize_point`].
    pub fn denormalize_point(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.check_len(xi.len())?;
        Ok(xi
            .iter()
            .enumerate()
            .map(|(k, &v)| {
                let (lo, hi) = self.bounds(k);
                lo + (v + 1.0) * 0.5 * (hi - lo)
            })
            .collect())
    }

    /// Unit-hypercube coordinates to physical units.
    pub fn unit_to_physical(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_len(u.len())?;
        Ok(u.iter()
            .enumerate()
            .map(|(k, &v)| {
                let (lo, hi) = self.bounds(k);
                lo + v * (hi - lo)
            })
            .collect())
    }
}

/// Unit-hypercube coordinates to the reference domain `[-1, 1]^d`.
pub fn unit_to_reference(u: &[f64]) -> Vec<f64> {
    u.iter().map(|&v| 2.0 * v - 1.0).collect()
}

/// The `M × N_c` matrix `[w(ξ_i) Ψ_j(ξ_i)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GpceMatrix {
    matrix: DMatrix<f64>,
    weighted: bool,
}

impl GpceMatrix {
    pub fn from_parts(matrix: DMatrix<f64>, weighted: bool) -> Self {
        GpceMatrix { matrix, weighted }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }
}

/// Evaluate the basis at unit-cube points (row-major, `dim` columns) with
/// optional per-row weights.
pub fn basis_matrix(
    points: &[f64],
    dim: usize,
    weights: Option<&[f64]>,
    basis: &MultiIndexSet,
) -> Result<DMatrix<f64>> {
    if dim != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: dim,
        });
    }
    let m = points.len() / dim;
    let mut out = DMatrix::zeros(m, basis.len());
    let mut row = vec![0.0; basis.len()];
    for i in 0..m {
        let xi = unit_to_reference(&points[i * dim..(i + 1) * dim]);
        basis.eval_row(&xi, &mut row)?;
        let w = weights.map_or(1.0, |w| w[i]);
        for (j, v) in row.iter().enumerate() {
            out[(i, j)] = w * v;
        }
    }
    Ok(out)
}

/// Assemble the (weighted) measurement matrix of a sample set.
pub fn assemble_matrix(samples: &SampleSet, basis: &MultiIndexSet) -> Result<GpceMatrix> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    let weighted = samples.is_weighted();
    let weights = weighted.then(|| samples.weights());
    let matrix = basis_matrix(samples.points(), samples.dim(), weights, basis)?;
    Ok(GpceMatrix { matrix, weighted })
}
