//! Fitted GPCE surrogates: prediction, validation error and moments.

use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::basis::{assemble_matrix, build_multi_index_set, InputSpec, MultiIndex, MultiIndexSet};
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;
use crate::sampling::SampleSet;
use crate::solver::{fit_multi, SolverChoice};

/// Basis, input box and an `N_c × N_y` coefficient matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GpceModel {
    basis: MultiIndexSet,
    spec: InputSpec,
    coefficients: DMatrix<f64>,
}

/// Per-QOI NRMSD with the average over non-degenerate QOIs.
#[derive(Debug, Clone, PartialEq)]
pub struct NrmsdReport {
    /// `None` marks a QOI whose reference range is zero.
    pub per_qoi: Vec<Option<f64>>,
    pub mean: f64,
}

/// Row-weighted right-hand sides `W Y`.
pub fn weighted_observations(samples: &SampleSet, observations: &DMatrix<f64>) -> DMatrix<f64> {
    let mut rhs = observations.clone();
    if samples.is_weighted() {
        for (i, mut row) in rhs.row_iter_mut().enumerate() {
            row *= samples.weight(i);
        }
    }
    rhs
}

impl GpceModel {
    pub fn new(basis: MultiIndexSet, spec: InputSpec, coefficients: DMatrix<f64>) -> Result<Self> {
        if basis.dim() != spec.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: spec.dim(),
            });
        }
        if coefficients.nrows() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: coefficients.nrows(),
            });
        }
        Ok(GpceModel {
            basis,
            spec,
            coefficients,
        })
    }

    /// Solve `W Ψ C = W Y` column by column.
    pub fn fit(
        samples: &SampleSet,
        observations: &DMatrix<f64>,
        basis: &MultiIndexSet,
        spec: &InputSpec,
        solver: &SolverChoice,
    ) -> Result<Self> {
        if observations.nrows() != samples.len() {
            return Err(Error::DimensionMismatch {
                expected: samples.len(),
                found: observations.nrows(),
            });
        }
        let psi = assemble_matrix(samples, basis)?;
        let rhs = weighted_observations(samples, observations);
        let coefficients = fit_multi(psi.matrix(), &rhs, solver)?;
        GpceModel::new(basis.clone(), spec.clone(), coefficients)
    }

    pub fn basis(&self) -> &MultiIndexSet {
        &self.basis
    }

    pub fn spec(&self) -> &InputSpec {
        &self.spec
    }

    pub fn coefficients(&self) -> &DMatrix<f64> {
        &self.coefficients
    }

    pub fn n_qoi(&self) -> usize {
        self.coefficients.ncols()
    }

    /// Predictions at row-major physical points, `N × N_y`.
    pub fn predict(&self, points: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.spec.dim();
        if !points.len().is_multiple_of(d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: points.len() % d,
            });
        }
        let n = points.len() / d;
        let mut psi = DMatrix::zeros(n, self.basis.len());
        let mut row = vec![0.0; self.basis.len()];
        for i in 0..n {
            let xi = self.spec.normalize_point(&points[i * d..(i + 1) * d])?;
            self.basis.eval_row(&xi, &mut row)?;
            for (j, v) in row.iter().enumerate() {
                psi[(i, j)] = *v;
            }
        }
        Ok(psi * &self.coefficients)
    }

    /// Predictions from an already evaluated (unweighted) basis matrix.
    pub fn predict_from_matrix(&self, psi: &DMatrix<f64>) -> DMatrix<f64> {
        psi * &self.coefficients
    }

    /// NRMSD against `reference` on `n_test` uniform points drawn from `seed`.
    pub fn nrmsd<F>(&self, reference: F, n_test: usize, seed: u64) -> Result<NrmsdReport>
    where
        F: Fn(&[f64]) -> Result<Vec<f64>>,
    {
        let d = self.spec.dim();
        let mut rng = rng_from_seed(seed);
        let mut points = Vec::with_capacity(n_test * d);
        for _ in 0..n_test {
            let u: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
            points.extend(self.spec.unit_to_physical(&u)?);
        }
        let pred = self.predict(&points)?;
        let mut truth = DMatrix::zeros(n_test, self.n_qoi());
        for i in 0..n_test {
            let y = reference(&points[i * d..(i + 1) * d])?;
            for (q, v) in y.into_iter().enumerate() {
                truth[(i, q)] = v;
            }
        }
        nrmsd_values(&pred, &truth)
    }

    /// `(mean, std)` per QOI from the coefficients.
    pub fn moments(&self) -> Vec<(f64, f64)> {
        let zero = self.basis.zero_position();
        self.coefficients
            .column_iter()
            .map(|c| {
                let mut mean = 0.0;
                let mut var = 0.0;
                for (j, v) in c.iter().enumerate() {
                    if Some(j) == zero {
                        mean = *v;
                    } else {
                        var += v * v;
                    }
                }
                (mean, var.sqrt())
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ModelDocument::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ModelDocument>(text)?.into_model()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// NRMSD of `pred` against `truth`, column by column.
///
/// QOIs with zero range are left out of the mean with a warning.
pub fn nrmsd_values(pred: &DMatrix<f64>, truth: &DMatrix<f64>) -> Result<NrmsdReport> {
    if pred.shape() != truth.shape() {
        return Err(Error::DimensionMismatch {
            expected: truth.ncols(),
            found: pred.ncols(),
        });
    }
    if truth.nrows() == 0 {
        return Err(Error::EmptySampleSet);
    }
    let n = truth.nrows() as f64;
    let mut per_qoi = Vec::with_capacity(truth.ncols());
    for (q, (p, t)) in pred.column_iter().zip(truth.column_iter()).enumerate() {
        let lo = t.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = t.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            log::warn!("QOI {q} has zero range on the test set; excluded from the mean");
            per_qoi.push(None);
            continue;
        }
        let mse = p
            .iter()
            .zip(t.iter())
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            / n;
        per_qoi.push(Some(mse.sqrt() / (hi - lo)));
    }
    let defined: Vec<f64> = per_qoi.iter().flatten().copied().collect();
    if defined.is_empty() {
        return Err(Error::DegenerateQoi(0));
    }
    let mean = defined.iter().sum::<f64>() / defined.len() as f64;
    Ok(NrmsdReport { per_qoi, mean })
}

/// Monte Carlo `(mean, std)` per QOI from `n` uniform draws in `spec`.
///
/// Points are drawn sequentially from one stream, so a run with a larger `n`
/// extends a smaller one.
pub fn reference_moments_mc<F>(
    mut f: F,
    spec: &InputSpec,
    n: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if n == 0 {
        return Err(Error::InvalidInput("reference moments need n >= 1".into()));
    }
    let d = spec.dim();
    let mut rng = rng_from_seed(seed);
    let mut u = vec![0.0; d];
    let mut mean: Vec<f64> = Vec::new();
    let mut m2: Vec<f64> = Vec::new();
    for k in 0..n {
        for v in u.iter_mut() {
            *v = rng.random();
        }
        let y = f(&spec.unit_to_physical(&u)?)?;
        if k == 0 {
            mean = vec![0.0; y.len()];
            m2 = vec![0.0; y.len()];
        }
        let count = (k + 1) as f64;
        for ((m, s), v) in mean.iter_mut().zip(m2.iter_mut()).zip(&y) {
            let delta = v - *m;
            *m += delta / count;
            *s += delta * (v - *m);
        }
    }
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
    Ok(mean
        .into_iter()
        .zip(m2)
        .map(|(m, s)| (m, (s / denom).sqrt()))
        .collect())
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    format: String,
    dim: usize,
    order: usize,
    interaction_order: usize,
    lower: Vec<f64>,
    upper: Vec<f64>,
    multi_indices: Vec<MultiIndex>,
    /// One row per basis function, one entry per QOI.
    coefficients: Vec<Vec<f64>>,
}

const FORMAT_TAG: &str = "gpce-model/1";

impl From<&GpceModel> for ModelDocument {
    fn from(m: &GpceModel) -> Self {
        ModelDocument {
            format: FORMAT_TAG.into(),
            dim: m.basis.dim(),
            order: m.basis.order(),
            interaction_order: m.basis.interaction_order(),
            lower: m.spec.lower().to_vec(),
            upper: m.spec.upper().to_vec(),
            multi_indices: m.basis.indices().to_vec(),
            coefficients: m
                .coefficients
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
        }
    }
}

impl ModelDocument {
    fn into_model(self) -> Result<GpceModel> {
        if self.format != FORMAT_TAG {
            return Err(Error::InvalidInput(format!(
                "unsupported model format `{}`",
                self.format
            )));
        }
        let basis = build_multi_index_set(self.dim, self.order, self.interaction_order);
        if basis.indices() != self.multi_indices.as_slice() {
            return Err(Error::InvalidInput(
                "stored multi-indices do not match the basis parameters".into(),
            ));
        }
        let bounds: Vec<(f64, f64)> = self.lower.into_iter().zip(self.upper).collect();
        let spec = InputSpec::new(&bounds)?;
        let n_qoi = self.coefficients.first().map_or(0, Vec::len);
        if self.coefficients.iter().any(|r| r.len() != n_qoi) {
            return Err(Error::InvalidInput("ragged coefficient matrix".into()));
        }
        let flat: Vec<f64> = self.coefficients.into_iter().flatten().collect();
        let coefficients = DMatrix::from_row_slice(flat.len() / n_qoi.max(1), n_qoi, &flat);
        GpceModel::new(basis, spec, coefficients)
    }
}
