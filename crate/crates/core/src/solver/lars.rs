//! LARS with the Lasso modification, run on a precomputed Gram matrix.
//!
//! Columns are scaled to unit norm before the path is traced. The path is
//! stored as knots `(λ, β)` in the scaled problem
//! `½‖y − Xβ‖² + λ‖β‖₁`; between knots `β` is linear in `λ`.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Rule for picking one solution on the path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    /// Minimum k-fold cross-validation error with `k = min(folds, M)`.
    CrossValidation { folds: usize, seed: u64 },
    /// The last knot (`λ = 0`, the basis-pursuit limit).
    PathEnd,
    /// A fixed knot index, clamped to the path length.
    Knot(usize),
    /// First knot whose relative residual `‖y − Xβ‖/‖y‖` is at most the value.
    ResidualTolerance(f64),
}

impl Default for Selection {
    fn default() -> Self {
        Selection::CrossValidation {
            folds: 10,
            seed: 0x5eed,
        }
    }
}

/// Knots of a LARS path in the scaled problem.
#[derive(Debug, Clone, PartialEq)]
pub struct LarsPath {
    pub lambdas: Vec<f64>,
    pub coefs: Vec<Vec<f64>>,
    pub active: Vec<Vec<usize>>,
}

impl LarsPath {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambdas[0]
    }

    /// Index `k` of the segment with `λ_k ≥ λ ≥ λ_{k+1}` and the weight of
    /// knot `k + 1`.
    fn locate(&self, lambda: f64) -> (usize, f64) {
        let n = self.lambdas.len();
        if n == 1 || lambda >= self.lambdas[0] {
            return (0, 0.0);
        }
        for k in 0..n - 1 {
            let (hi, lo) = (self.lambdas[k], self.lambdas[k + 1]);
            if lambda >= lo {
                let w = if hi > lo {
                    (hi - lambda) / (hi - lo)
                } else {
                    1.0
                };
                return (k, w);
            }
        }
        (n - 2, 1.0)
    }

    /// Coefficients at an arbitrary `λ` by linear interpolation.
    pub fn coef_at(&self, lambda: f64) -> Vec<f64> {
        let (k, w) = self.locate(lambda);
        if w == 0.0 {
            return self.coefs[k].clone();
        }
        let (a, b) = (&self.coefs[k], &self.coefs[k + 1]);
        a.iter().zip(b).map(|(x, y)| x + w * (y - x)).collect()
    }
}

// Growing lower-triangular Cholesky factor of the active Gram block.
#[derive(Default)]
struct Chol {
    rows: Vec<Vec<f64>>,
}

impl Chol {
    fn forward(&self, b: &[f64]) -> Vec<f64> {
        let mut z = b.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            let s: f64 = row[..i].iter().zip(&z[..i]).map(|(l, v)| l * v).sum();
            z[i] = (z[i] - s) / row[i];
        }
        z
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = self.forward(b);
        let n = self.rows.len();
        for i in (0..n).rev() {
            let mut s = x[i];
            for (k, row) in self.rows.iter().enumerate().skip(i + 1) {
                s -= row[i] * x[k];
            }
            x[i] = s / self.rows[i][i];
        }
        x
    }

    /// Remove variable `k`, restoring triangularity with Givens rotations.
    fn remove(&mut self, k: usize) {
        let n = self.rows.len();
        self.rows.remove(k);
        // rows k.. now carry one entry right of their diagonal
        let mut r: Vec<Vec<f64>> = self
            .rows
            .iter()
            .map(|row| {
                let mut full = row.clone();
                full.resize(n, 0.0);
                full
            })
            .collect();
        for i in k..n - 1 {
            let (a, b) = (r[i][i], r[i][i + 1]);
            let h = a.hypot(b);
            if h == 0.0 {
                continue;
            }
            let (c, s) = (a / h, b / h);
            for row in r.iter_mut().skip(i) {
                let (x, y) = (row[i], row[i + 1]);
                row[i] = c * x + s * y;
                row[i + 1] = -s * x + c * y;
            }
        }
        for (i, row) in r.iter_mut().enumerate() {
            row.truncate(i + 1);
        }
        self.rows = r;
    }

    /// Append a column; false when it is numerically dependent.
    fn push(&mut self, cross: &[f64], diag: f64) -> bool {
        let mut z = self.forward(cross);
        let d2 = diag - z.iter().map(|v| v * v).sum::<f64>();
        if !(d2 > 1e-10 * diag.max(f64::MIN_POSITIVE)) {
            return false;
        }
        z.push(d2.sqrt());
        self.rows.push(z);
        true
    }
}

/// Trace the path from the Gram matrix `G = XᵀX` and correlations `Xᵀy`.
///
/// `usable[j] = false` keeps column `j` out of the model. With
/// `lasso = false` no variable is ever dropped (plain LARS).
pub fn lars_path(
    gram: &DMatrix<f64>,
    xty: &[f64],
    n_rows: usize,
    usable: &[bool],
    lasso: bool,
) -> LarsPath {
    let p = xty.len();
    let max_active = n_rows.min(usable.iter().filter(|&&u| u).count());
    let mut beta = vec![0.0; p];
    let mut active: Vec<usize> = Vec::new();
    let mut signs: Vec<f64> = Vec::new();
    let mut in_active = vec![false; p];
    let mut blocked = vec![false; p];
    let mut chol = Chol::default();

    let col = |j: usize| &gram.as_slice()[j * p..(j + 1) * p];
    let corr = |beta: &[f64], active: &[usize]| -> Vec<f64> {
        let mut c = xty.to_vec();
        for &j in active {
            let bj = beta[j];
            if bj != 0.0 {
                for (ci, g) in c.iter_mut().zip(col(j)) {
                    *ci -= g * bj;
                }
            }
        }
        c
    };

    let mut c = xty.to_vec();
    let c_max = (0..p)
        .filter(|&j| usable[j])
        .map(|j| c[j].abs())
        .fold(0.0, f64::max);
    let mut path = LarsPath {
        lambdas: vec![c_max],
        coefs: vec![beta.clone()],
        active: vec![Vec::new()],
    };
    if !(c_max > 0.0) || max_active == 0 {
        if let Some(l) = path.lambdas.first_mut() {
            *l = c_max.max(0.0);
        }
        return path;
    }
    let mut big_c = c_max;
    let mut just_dropped: Option<usize> = None;
    let mut pending_add = true;

    let max_iter = 8 * p + 8 * n_rows + 16;
    for _ in 0..max_iter {
        if pending_add && active.len() < max_active {
            // bring in the inactive column of largest correlation
            let mut best: Option<(usize, f64)> = None;
            for j in 0..p {
                if !usable[j] || in_active[j] || blocked[j] || Some(j) == just_dropped {
                    continue;
                }
                if best.is_none_or(|(_, v)| c[j].abs() > v) {
                    best = Some((j, c[j].abs()));
                }
            }
            if let Some((j, _)) = best {
                let cross: Vec<f64> = active.iter().map(|&a| gram[(a, j)]).collect();
                if chol.push(&cross, gram[(j, j)]) {
                    active.push(j);
                    signs.push(c[j].signum());
                    in_active[j] = true;
                } else {
                    blocked[j] = true;
                    continue;
                }
            }
        }
        pending_add = false;
        if active.is_empty() {
            break;
        }

        let w = chol.solve(&signs);
        let norm2: f64 = signs.iter().zip(&w).map(|(s, v)| s * v).sum();
        if !(norm2 > 0.0) {
            break;
        }
        let a_a = 1.0 / norm2.sqrt();
        let delta: Vec<f64> = w.iter().map(|v| v * a_a).collect();
        let mut a = vec![0.0; p];
        for (&j, &dj) in active.iter().zip(&delta) {
            for (ai, g) in a.iter_mut().zip(col(j)) {
                *ai += g * dj;
            }
        }

        let gamma_end = big_c / a_a;
        let mut gamma = gamma_end;
        let mut event = Event::End;
        if active.len() < max_active {
            for j in 0..p {
                if !usable[j] || in_active[j] || blocked[j] || Some(j) == just_dropped {
                    continue;
                }
                for (num, den) in [(big_c - c[j], a_a - a[j]), (big_c + c[j], a_a + a[j])] {
                    if den > 1e-12 {
                        let g = num / den;
                        if g > 1e-14 && g < gamma {
                            gamma = g;
                            event = Event::Add;
                        }
                    }
                }
            }
        }
        if lasso {
            for (pos, (&j, &dj)) in active.iter().zip(&delta).enumerate() {
                if dj != 0.0 {
                    let g = -beta[j] / dj;
                    if g > 1e-14 && g < gamma {
                        gamma = g;
                        event = Event::Drop(pos);
                    }
                }
            }
        }

        for (&j, &dj) in active.iter().zip(&delta) {
            beta[j] += gamma * dj;
        }
        just_dropped = None;
        match event {
            Event::End => {
                big_c = 0.0;
            }
            Event::Add => {
                big_c -= gamma * a_a;
                pending_add = true;
            }
            Event::Drop(pos) => {
                big_c -= gamma * a_a;
                let j = active.remove(pos);
                signs.remove(pos);
                in_active[j] = false;
                beta[j] = 0.0;
                just_dropped = Some(j);
                chol.remove(pos);
            }
        }
        if matches!(event, Event::Drop(_)) {
            c = corr(&beta, &active);
        } else {
            for (ci, ai) in c.iter_mut().zip(&a) {
                *ci -= gamma * ai;
            }
        }
        big_c = big_c.max(0.0);
        path.lambdas.push(big_c);
        path.coefs.push(beta.clone());
        path.active.push(active.clone());
        if matches!(event, Event::End) || big_c <= 0.0 {
            break;
        }
        if matches!(event, Event::Drop(_)) {
            // after a drop the path continues with the reduced set
            pending_add = false;
        }
    }
    path
}

#[derive(Debug, Clone, Copy)]
enum Event {
    Add,
    Drop(usize),
    End,
}

/// One solution picked from a path, mapped back to the unscaled columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub coef: DVector<f64>,
    /// Regularization level in the scaled problem.
    pub lambda: f64,
}

struct Scaled {
    x: DMatrix<f64>,
    norms: Vec<f64>,
    usable: Vec<bool>,
    gram: DMatrix<f64>,
}

impl Scaled {
    fn new(matrix: DMatrix<f64>) -> Self {
        let mut x = matrix;
        let mut norms = Vec::with_capacity(x.ncols());
        let mut usable = Vec::with_capacity(x.ncols());
        for mut col in x.column_iter_mut() {
            let n = col.norm();
            if n > 0.0 {
                col /= n;
                norms.push(n);
                usable.push(true);
            } else {
                norms.push(1.0);
                usable.push(false);
            }
        }
        let gram = x.tr_mul(&x);
        Scaled {
            x,
            norms,
            usable,
            gram,
        }
    }

    fn path(&self, y: &DVector<f64>, lasso: bool) -> LarsPath {
        let xty = self.x.tr_mul(y);
        lars_path(
            &self.gram,
            xty.as_slice(),
            self.x.nrows(),
            &self.usable,
            lasso,
        )
    }
}

struct Fold {
    train: Vec<usize>,
    test: Vec<usize>,
    scaled: Scaled,
    // held-out rows scaled by the training norms
    x_test: DMatrix<f64>,
}

/// Factorized design shared by every right-hand side fitted against it.
pub struct LarsDesign {
    full: Scaled,
    folds: Vec<Fold>,
    selection: Selection,
    lasso: bool,
}

fn rows_of(matrix: &DMatrix<f64>, rows: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), matrix.ncols(), |i, j| matrix[(rows[i], j)])
}

impl LarsDesign {
    pub fn new(matrix: &DMatrix<f64>, selection: Selection) -> Result<Self> {
        Self::with_mode(matrix, selection, true)
    }

    /// Design for plain LARS without drop steps.
    pub fn pure_lars(matrix: &DMatrix<f64>, selection: Selection) -> Result<Self> {
        Self::with_mode(matrix, selection, false)
    }

    fn with_mode(matrix: &DMatrix<f64>, selection: Selection, lasso: bool) -> Result<Self> {
        if matrix.nrows() == 0 {
            return Err(Error::EmptySampleSet);
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("measurement matrix"));
        }
        let m = matrix.nrows();
        let mut folds = Vec::new();
        if let Selection::CrossValidation { folds: k, seed } = selection {
            let k = k.min(m);
            if k >= 2 {
                let mut perm: Vec<usize> = (0..m).collect();
                perm.shuffle(&mut rng_from_seed(seed));
                for f in 0..k {
                    let mut test = Vec::new();
                    let mut train = Vec::new();
                    for (pos, &row) in perm.iter().enumerate() {
                        if pos % k == f {
                            test.push(row);
                        } else {
                            train.push(row);
                        }
                    }
                    test.sort_unstable();
                    train.sort_unstable();
                    let scaled = Scaled::new(rows_of(matrix, &train));
                    let mut x_test = rows_of(matrix, &test);
                    for (mut col, n) in x_test.column_iter_mut().zip(&scaled.norms) {
                        col /= *n;
                    }
                    folds.push(Fold {
                        train,
                        test,
                        scaled,
                        x_test,
                    });
                }
            }
        }
        Ok(LarsDesign {
            full: Scaled::new(matrix.clone()),
            folds,
            selection,
            lasso,
        })
    }

    pub fn nrows(&self) -> usize {
        self.full.x.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.full.x.ncols()
    }

    /// Full path of `y` in the scaled problem.
    pub fn path(&self, y: &[f64]) -> Result<LarsPath> {
        let y = self.check_rhs(y)?;
        Ok(self.full.path(&y, self.lasso))
    }

    fn check_rhs(&self, y: &[f64]) -> Result<DVector<f64>> {
        if y.len() != self.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.nrows(),
                found: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observations"));
        }
        Ok(DVector::from_column_slice(y))
    }

    /// Fit one right-hand side and pick a solution by the selection rule.
    pub fn fit(&self, y: &[f64]) -> Result<LassoFit> {
        let yv = self.check_rhs(y)?;
        let path = self.full.path(&yv, self.lasso);
        let (beta, lambda) = match self.selection {
            Selection::PathEnd => end_of(&path),
            Selection::Knot(k) => {
                let k = k.min(path.len() - 1);
                (path.coefs[k].clone(), path.lambdas[k])
            }
            Selection::ResidualTolerance(tol) => {
                let y_norm = yv.norm();
                let mut pick = path.len() - 1;
                for k in 0..path.len() {
                    let r = &yv - &self.full.x * DVector::from_column_slice(&path.coefs[k]);
                    if r.norm() <= tol * y_norm {
                        pick = k;
                        break;
                    }
                }
                (path.coefs[pick].clone(), path.lambdas[pick])
            }
            Selection::CrossValidation { .. } => {
                if self.folds.is_empty() {
                    end_of(&path)
                } else {
                    let t = self.cv_ratio(&yv);
                    let lambda = t * path.lambda_max();
                    (path.coef_at(lambda), lambda)
                }
            }
        };
        let coef = DVector::from_iterator(
            beta.len(),
            beta.iter().zip(&self.full.norms).map(|(b, n)| b / n),
        );
        Ok(LassoFit { coef, lambda })
    }

    /// Cross-validated `λ / λ_max`.
    fn cv_ratio(&self, y: &DVector<f64>) -> f64 {
        struct FoldPath {
            ratios: Vec<f64>,
            preds: Vec<DVector<f64>>,
            y_test: DVector<f64>,
        }
        let fold_paths: Vec<FoldPath> = self
            .folds
            .iter()
            .map(|fold| {
                let y_train =
                    DVector::from_iterator(fold.train.len(), fold.train.iter().map(|&i| y[i]));
                let y_test =
                    DVector::from_iterator(fold.test.len(), fold.test.iter().map(|&i| y[i]));
                let path = fold.scaled.path(&y_train, self.lasso);
                let lmax = path.lambda_max();
                let ratios = path
                    .lambdas
                    .iter()
                    .map(|&l| if lmax > 0.0 { l / lmax } else { 0.0 })
                    .collect();
                let preds = path
                    .coefs
                    .iter()
                    .map(|b| &fold.x_test * DVector::from_column_slice(b))
                    .collect();
                FoldPath {
                    ratios,
                    preds,
                    y_test,
                }
            })
            .collect();

        let mut grid: Vec<f64> = fold_paths
            .iter()
            .flat_map(|f| f.ratios.iter().copied())
            .chain([0.0, 1.0])
            .filter(|t| (0.0..=1.0).contains(t))
            .collect();
        grid.sort_by(|a, b| b.total_cmp(a));
        grid.dedup();

        let mut best = (f64::INFINITY, 1.0);
        for &t in &grid {
            let mut mse = 0.0;
            for f in &fold_paths {
                let pred = interpolate_preds(&f.ratios, &f.preds, t);
                mse += (&f.y_test - pred).norm_squared() / f.y_test.len() as f64;
            }
            mse /= fold_paths.len() as f64;
            // descending grid: strict improvement keeps the larger t on ties
            if mse < best.0 {
                best = (mse, t);
            }
        }
        best.1
    }
}

fn end_of(path: &LarsPath) -> (Vec<f64>, f64) {
    let k = path.len() - 1;
    (path.coefs[k].clone(), path.lambdas[k])
}

// Held-out predictions at ratio `t`, linear between knots.
fn interpolate_preds(ratios: &[f64], preds: &[DVector<f64>], t: f64) -> DVector<f64> {
    let n = ratios.len();
    if n == 1 || t >= ratios[0] {
        return preds[0].clone();
    }
    for k in 0..n - 1 {
        let (hi, lo) = (ratios[k], ratios[k + 1]);
        if t >= lo {
            let w = if hi > lo { (hi - t) / (hi - lo) } else { 1.0 };
            return &preds[k] + (&preds[k + 1] - &preds[k]) * w;
        }
    }
    preds[n - 1].clone()
}

/// Largest KKT violation of `coef` for the Lasso problem at `lambda`, in
/// the unit-norm column scaling.
pub fn kkt_violation(matrix: &DMatrix<f64>, y: &[f64], coef: &DVector<f64>, lambda: f64) -> f64 {
    let r = DVector::from_column_slice(y) - matrix * coef;
    let mut worst = 0.0f64;
    for (j, col) in matrix.column_iter().enumerate() {
        let n = col.norm();
        if n == 0.0 {
            continue;
        }
        let cj = col.dot(&r) / n;
        let v = if coef[j] != 0.0 {
            (cj - lambda * coef[j].signum()).abs()
        } else {
            (cj.abs() - lambda).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;
    use rand::Rng as _;

    fn random_matrix(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = rng_from_seed(seed);
        DMatrix::from_fn(m, n, |_, _| rng.random::<f64>() * 2.0 - 1.0)
    }

    #[test]
    fn one_sparse_target_is_recovered_first() {
        let a = random_matrix(12, 6, 1);
        let y: Vec<f64> = a.column(3).iter().map(|v| 2.5 * v).collect();
        let design = LarsDesign::new(&a, Selection::PathEnd).unwrap();
        let path = design.path(&y).unwrap();
        assert_eq!(path.active[1], vec![3]);
        let fit = design.fit(&y).unwrap();
        let r = DVector::from_column_slice(&y) - &a * &fit.coef;
        assert!(r.norm() < 1e-10);
        assert!((fit.coef[3] - 2.5).abs() < 1e-10);
    }

    #[test]
    fn orthonormal_design_soft_thresholds() {
        let q = random_matrix(10, 4, 7).qr().q();
        let y: Vec<f64> = random_matrix(10, 1, 8).iter().copied().collect();
        let ls = q.tr_mul(&DVector::from_column_slice(&y));
        let design = LarsDesign::new(&q, Selection::PathEnd).unwrap();
        let path = design.path(&y).unwrap();
        for (lambda, beta) in path.lambdas.iter().zip(&path.coefs) {
            for j in 0..4 {
                let soft = ls[j].signum() * (ls[j].abs() - lambda).max(0.0);
                assert!((beta[j] - soft).abs() < 1e-12);
            }
        }
        // between knots as well
        let mid = 0.5 * (path.lambdas[1] + path.lambdas[2]);
        let beta = path.coef_at(mid);
        for j in 0..4 {
            let soft = ls[j].signum() * (ls[j].abs() - mid).max(0.0);
            assert!((beta[j] - soft).abs() < 1e-12);
        }
    }

    #[test]
    fn kkt_holds_at_every_knot() {
        for seed in 0..20 {
            let a = random_matrix(15, 25, seed);
            let y: Vec<f64> = random_matrix(15, 1, seed + 100).iter().copied().collect();
            let design = LarsDesign::new(&a, Selection::PathEnd).unwrap();
            let path = design.path(&y).unwrap();
            let norms: Vec<f64> = a.column_iter().map(|c| c.norm()).collect();
            for (lambda, beta) in path.lambdas.iter().zip(&path.coefs) {
                let coef = DVector::from_iterator(25, beta.iter().zip(&norms).map(|(b, n)| b / n));
                assert!(kkt_violation(&a, &y, &coef, *lambda) < 1e-8);
            }
            assert!(*path.lambdas.last().unwrap() < 1e-12);
        }
    }

    #[test]
    fn cholesky_downdate_matches_refactorization() {
        let x = random_matrix(12, 6, 21);
        let g = x.tr_mul(&x);
        let factor = |cols: &[usize]| {
            let mut ch = Chol::default();
            for (k, &j) in cols.iter().enumerate() {
                let cross: Vec<f64> = cols[..k].iter().map(|&b| g[(b, j)]).collect();
                assert!(ch.push(&cross, g[(j, j)]));
            }
            ch
        };
        for drop in 0..6 {
            let mut ch = factor(&[0, 1, 2, 3, 4, 5]);
            ch.remove(drop);
            let kept: Vec<usize> = (0..6).filter(|&j| j != drop).collect();
            let fresh = factor(&kept);
            for (a, b) in ch.rows.iter().zip(&fresh.rows) {
                for (u, v) in a.iter().zip(b) {
                    assert!((u - v).abs() < 1e-10, "drop {drop}: {u} vs {v}");
                }
            }
        }
    }

    #[test]
    fn pure_lars_never_drops() {
        for seed in 0..10 {
            let a = random_matrix(20, 30, seed);
            let y: Vec<f64> = random_matrix(20, 1, seed + 50).iter().copied().collect();
            let path = LarsDesign::pure_lars(&a, Selection::PathEnd)
                .unwrap()
                .path(&y)
                .unwrap();
            for w in path.active.windows(2) {
                assert_eq!(w[1].len(), w[0].len() + 1);
            }
        }
    }

    #[test]
    fn zero_response_gives_zero_coefficients() {
        let a = random_matrix(8, 5, 3);
        let fit = LarsDesign::new(&a, Selection::default())
            .unwrap()
            .fit(&[0.0; 8])
            .unwrap();
        assert!(fit.coef.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn non_finite_inputs_fail() {
        let mut a = random_matrix(4, 3, 3);
        let design = LarsDesign::new(&a, Selection::PathEnd).unwrap();
        assert!(design.fit(&[1.0, f64::NAN, 0.0, 0.0]).is_err());
        a[(0, 0)] = f64::INFINITY;
        assert!(LarsDesign::new(&a, Selection::PathEnd).is_err());
    }

    #[test]
    fn cv_choice_minimizes_cv_error_on_grid() {
        let a = random_matrix(30, 40, 5);
        let mut truth = DVector::zeros(40);
        truth[2] = 1.0;
        truth[17] = -0.5;
        let noise = random_matrix(30, 1, 6);
        let y: Vec<f64> = (&a * &truth + noise * 0.05).iter().copied().collect();
        let design = LarsDesign::new(&a, Selection::default()).unwrap();
        let fit = design.fit(&y).unwrap();
        assert!(kkt_violation(&a, &y, &fit.coef, fit.lambda) < 1e-8);
        assert!((fit.coef[2] - 1.0).abs() < 0.2);
        let again = design.fit(&y).unwrap();
        assert_eq!(fit, again);
    }

    #[test]
    fn residual_tolerance_stops_early() {
        let a = random_matrix(20, 10, 9);
        let y: Vec<f64> = random_matrix(20, 1, 10).iter().copied().collect();
        let design = LarsDesign::new(&a, Selection::ResidualTolerance(0.99)).unwrap();
        let fit = design.fit(&y).unwrap();
        let nonzero = fit.coef.iter().filter(|&&c| c != 0.0).count();
        assert!(nonzero <= 2);
    }

    #[test]
    fn duplicate_columns_do_not_break_the_path() {
        let mut a = random_matrix(10, 4, 11);
        let col = a.column(1).clone_owned();
        a.set_column(3, &col);
        let y: Vec<f64> = a.column(1).iter().map(|v| v * 2.0).collect();
        let fit = LarsDesign::new(&a, Selection::PathEnd)
            .unwrap()
            .fit(&y)
            .unwrap();
        let r = DVector::from_column_slice(&y) - &a * &fit.coef;
        assert!(r.norm() < 1e-10);
    }
}
