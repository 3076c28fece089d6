//! Reference models used in the benchmarks.
//!
//! Every model is a deterministic map from a physical input point to one or
//! more quantities of interest (QOIs). [`TestProblem`] bundles a model with
//! its input box and the recommended basis truncation.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::basis::{InputSpec, MultiIndexSet};
use crate::error::{Error, Result};

/// `sin x₁ + a sin²x₂ + b x₃⁴ sin x₁`.
pub fn ishigami(x1: f64, x2: f64, a: f64, b: f64, x3: f64) -> f64 {
    let s2 = x2.sin();
    x1.sin() + a * s2 * s2 + b * x3.powi(4) * x1.sin()
}

/// Generalized Rosenbrock function.
pub fn rosenbrock(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::InvalidInput("rosenbrock needs d >= 2".into()));
    }
    Ok(x.windows(2)
        .map(|w| 100.0 * (w[1] - w[0] * w[0]).powi(2) + (w[0] - 1.0).powi(2))
        .sum())
}

/// Linear paired product `Σ_{i<d} x_i x_{i+1}`.
pub fn lpp(x: &[f64]) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::InvalidInput("lpp needs d >= 2".into()));
    }
    Ok(x.windows(2).map(|w| w[0] * w[1]).sum())
}

/// Parameters of the Randles electrode circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectrodeParams {
    pub r_s: f64,
    pub r_ct: f64,
    pub r_d: f64,
    pub q_d: f64,
    pub alpha_d: f64,
    pub q_dl: f64,
    pub alpha_dl: f64,
}

impl ElectrodeParams {
    /// Lower and upper bounds in the order
    /// `(R_s, R_ct, R_d, Q_d, α_d, Q_dl, α_dl)`.
    pub const BOUNDS: [(f64, f64); 7] = [
        (0.0, 1.0e3),
        (9.0e3, 11.0e3),
        (108.0e3, 132.0e3),
        (3.6e-10, 4.4e-10),
        (0.855, 1.0),
        (5.4e-7, 6.6e-7),
        (0.603, 0.737),
    ];

    /// Calibrated nominal values.
    pub fn nominal() -> Self {
        ElectrodeParams {
            r_s: 0.5e3,
            r_ct: 10.0e3,
            r_d: 120.0e3,
            q_d: 4.0e-10,
            alpha_d: 0.95,
            q_dl: 6.0e-7,
            alpha_dl: 0.67,
        }
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() != 7 {
            return Err(Error::DimensionMismatch {
                expected: 7,
                found: x.len(),
            });
        }
        Ok(ElectrodeParams {
            r_s: x[0],
            r_ct: x[1],
            r_d: x[2],
            q_d: x[3],
            alpha_d: x[4],
            q_dl: x[5],
            alpha_dl: x[6],
        })
    }

    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.r_s,
            self.r_ct,
            self.r_d,
            self.q_d,
            self.alpha_d,
            self.q_dl,
            self.alpha_dl,
        ]
    }
}

/// `(jω)^α` on the principal branch.
fn j_omega_pow(omega: f64, alpha: f64) -> Complex64 {
    Complex64::from_polar(omega.powf(alpha), PI * alpha / 2.0)
}

/// Complex impedance of the circuit at angular frequency `omega`.
pub fn electrode_impedance(p: &ElectrodeParams, omega: f64) -> Complex64 {
    let diffusion = p.r_d / (1.0 + p.r_d * p.q_d * j_omega_pow(omega, p.alpha_d));
    let faradaic = 1.0 / (p.r_ct + diffusion);
    p.r_s + 1.0 / (p.q_dl * j_omega_pow(omega, p.alpha_dl) + faradaic)
}

/// `n` log-spaced frequencies in Hz from `f_lo` to `f_hi`, both included.
pub fn log_frequencies(n: usize, f_lo: f64, f_hi: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![f_lo],
        _ => {
            let (a, b) = (f_lo.log10(), f_hi.log10());
            (0..n)
                .map(|k| 10f64.powf(a + (b - a) * k as f64 / (n - 1) as f64))
                .collect()
        }
    }
}

/// Real parts followed by imaginary parts over the angular frequencies.
pub fn electrode_qoi_vector(p: &ElectrodeParams, omegas: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; 2 * omegas.len()];
    electrode_qoi_into(p, omegas, &mut out);
    out
}

fn electrode_qoi_into(p: &ElectrodeParams, omegas: &[f64], out: &mut [f64]) {
    let n = omegas.len();
    for (k, &w) in omegas.iter().enumerate() {
        let z = electrode_impedance(p, w);
        out[k] = z.re;
        out[n + k] = z.im;
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Ishigami { a: f64, b: f64, x3: f64 },
    Rosenbrock,
    Lpp,
    Electrode { omegas: Vec<f64> },
}

/// A model with its input box and recommended basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TestProblem {
    name: String,
    spec: InputSpec,
    order: usize,
    interaction_order: usize,
    kind: Kind,
}

/// Names accepted by [`problem_by_name`].
pub const PROBLEM_NAMES: [&str; 5] = [
    "ishigami",
    "rosenbrock6",
    "lpp30",
    "electrode",
    "electrode-full",
];

/// Frequency count of the reduced electrode problem.
pub const ELECTRODE_REDUCED_FREQUENCIES: usize = 64;
/// Frequency count of the full electrode problem.
pub const ELECTRODE_FULL_FREQUENCIES: usize = 1000;

impl TestProblem {
    /// Ishigami on `(−π, π)²` with `a = 7`, `b = 0.1`, `x₃ = 1`.
    pub fn ishigami() -> Self {
        TestProblem {
            name: "ishigami".into(),
            spec: InputSpec::uniform_cube(2, -PI, PI).expect("valid bounds"),
            order: 12,
            interaction_order: 2,
            kind: Kind::Ishigami {
                a: 7.0,
                b: 0.1,
                x3: 1.0,
            },
        }
    }

    /// Rosenbrock on `[-1, 1]^d`, order 5, interaction order 2.
    pub fn rosenbrock(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput("rosenbrock needs d >= 2".into()));
        }
        Ok(TestProblem {
            name: format!("rosenbrock{d}"),
            spec: InputSpec::uniform_cube(d, -1.0, 1.0)?,
            order: 5,
            interaction_order: 2,
            kind: Kind::Rosenbrock,
        })
    }

    /// Linear paired product on `[-1, 1]^d`, order 2, interaction order 2.
    pub fn lpp(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidInput("lpp needs d >= 2".into()));
        }
        Ok(TestProblem {
            name: format!("lpp{d}"),
            spec: InputSpec::uniform_cube(d, -1.0, 1.0)?,
            order: 2,
            interaction_order: 2,
            kind: Kind::Lpp,
        })
    }

    /// Electrode impedance over `n_freq` frequencies from 1 Hz to 1 GHz.
    pub fn electrode(n_freq: usize) -> Result<Self> {
        if n_freq == 0 {
            return Err(Error::InvalidInput(
                "electrode needs at least one frequency".into(),
            ));
        }
        let omegas = log_frequencies(n_freq, 1.0, 1.0e9)
            .into_iter()
            .map(|f| 2.0 * PI * f)
            .collect();
        Ok(TestProblem {
            name: if n_freq == ELECTRODE_REDUCED_FREQUENCIES {
                "electrode".into()
            } else if n_freq == ELECTRODE_FULL_FREQUENCIES {
                "electrode-full".into()
            } else {
                format!("electrode{n_freq}")
            },
            spec: InputSpec::new(&ElectrodeParams::BOUNDS)?,
            order: 5,
            interaction_order: 3,
            kind: Kind::Electrode { omegas },
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn spec(&self) -> &InputSpec {
        &self.spec
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn interaction_order(&self) -> usize {
        self.interaction_order
    }

    /// Recommended truncated basis.
    pub fn basis(&self) -> MultiIndexSet {
        crate::basis::build_multi_index_set(self.dim(), self.order, self.interaction_order)
    }

    pub fn n_qoi(&self) -> usize {
        match &self.kind {
            Kind::Electrode { omegas } => 2 * omegas.len(),
            _ => 1,
        }
    }

    /// Angular frequencies of the electrode QOIs (empty for scalar models).
    pub fn omegas(&self) -> &[f64] {
        match &self.kind {
            Kind::Electrode { omegas } => omegas,
            _ => &[],
        }
    }

    /// Evaluate at a physical point into `out` (length [`Self::n_qoi`]).
    pub fn evaluate_into(&self, x: &[f64], out: &mut [f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        match &self.kind {
            Kind::Ishigami { a, b, x3 } => out[0] = ishigami(x[0], x[1], *a, *b, *x3),
            Kind::Rosenbrock => out[0] = rosenbrock(x)?,
            Kind::Lpp => out[0] = lpp(x)?,
            Kind::Electrode { omegas } => {
                electrode_qoi_into(&ElectrodeParams::from_slice(x)?, omegas, out)
            }
        }
        Ok(())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n_qoi()];
        self.evaluate_into(x, &mut out)?;
        Ok(out)
    }

    /// Evaluate at row-major unit-cube points; returns `M × N_y`.
    pub fn evaluate_unit_points(&self, points: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.dim();
        let m = points.len() / d;
        let q = self.n_qoi();
        let rows: Vec<Result<Vec<f64>>> = (0..m)
            .into_par_iter()
            .map(|i| {
                let x = self.spec.unit_to_physical(&points[i * d..(i + 1) * d])?;
                self.evaluate(&x)
            })
            .collect();
        let mut out = DMatrix::zeros(m, q);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row?.into_iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// Analytic `(mean, std)` where known in closed form.
    pub fn analytic_moments(&self) -> Option<(f64, f64)> {
        match &self.kind {
            Kind::Ishigami { a, b, x3 } => {
                let c = 1.0 + b * x3.powi(4);
                Some((a / 2.0, (c * c / 2.0 + a * a / 8.0).sqrt()))
            }
            // E[x_i² x_{i+1}²] = 1/9 per pair on [-1, 1]
            Kind::Lpp if self.spec.lower().iter().all(|&l| l == -1.0) => {
                Some((0.0, ((self.dim() - 1) as f64 / 9.0).sqrt()))
            }
            _ => None,
        }
    }
}

/// Look up a registered problem.
///
/// Besides [`PROBLEM_NAMES`], `rosenbrock<d>`, `lpp<d>` and `electrode<n>`
/// select other dimensions or frequency counts.
pub fn problem_by_name(name: &str) -> Result<TestProblem> {
    match name {
        "ishigami" => Ok(TestProblem::ishigami()),
        "rosenbrock6" => TestProblem::rosenbrock(6),
        "lpp30" => TestProblem::lpp(30),
        "electrode" => TestProblem::electrode(ELECTRODE_REDUCED_FREQUENCIES),
        "electrode-full" => TestProblem::electrode(ELECTRODE_FULL_FREQUENCIES),
        other => {
            let suffixed = |prefix: &str| {
                other
                    .strip_prefix(prefix)
                    .and_then(|rest| rest.parse::<usize>().ok())
            };
            if let Some(d) = suffixed("rosenbrock") {
                TestProblem::rosenbrock(d)
            } else if let Some(d) = suffixed("lpp") {
                TestProblem::lpp(d)
            } else if let Some(n) = suffixed("electrode") {
                TestProblem::electrode(n)
            } else {
                Err(Error::UnknownProblem(other.to_string()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn ishigami_examples() {
        assert_eq!(ishigami(0.0, 0.0, 7.0, 0.1, 1.0), 0.0);
        assert_relative_eq!(
            ishigami(PI / 2.0, PI / 2.0, 7.0, 0.1, 1.0),
            8.1,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            ishigami(-PI / 2.0, 0.0, 7.0, 0.1, 1.0),
            -1.1,
            epsilon = 1e-12
        );
    }

    #[test]
    fn rosenbrock_examples() {
        assert_eq!(rosenbrock(&[1.0; 6]).unwrap(), 0.0);
        assert_eq!(rosenbrock(&[1.0; 3]).unwrap(), 0.0);
        assert_eq!(rosenbrock(&[0.0; 6]).unwrap(), 5.0);
        assert_eq!(rosenbrock(&[1.0, 2.0]).unwrap(), 100.0);
        assert!(rosenbrock(&[1.0]).is_err());
    }

    #[test]
    fn lpp_examples() {
        assert_eq!(lpp(&[0.0; 30]).unwrap(), 0.0);
        assert_eq!(lpp(&[1.0; 30]).unwrap(), 29.0);
        assert_eq!(lpp(&[1.0, 2.0, 3.0]).unwrap(), 8.0);
        assert!(lpp(&[2.0]).is_err());
    }

    // Same circuit evaluated with explicit real and imaginary parts.
    fn impedance_by_hand(p: &ElectrodeParams, omega: f64) -> (f64, f64) {
        let cpe = |q: f64, alpha: f64| {
            let mag = q * omega.powf(alpha);
            (
                mag * (PI * alpha / 2.0).cos(),
                mag * (PI * alpha / 2.0).sin(),
            )
        };
        let recip = |re: f64, im: f64| {
            let d = re * re + im * im;
            (re / d, -im / d)
        };
        // diffusion branch: R_d / (1 + R_d Y_d)
        let (yd_re, yd_im) = cpe(p.q_d, p.alpha_d);
        let (den_re, den_im) = (1.0 + p.r_d * yd_re, p.r_d * yd_im);
        let (inv_re, inv_im) = recip(den_re, den_im);
        let (zd_re, zd_im) = (p.r_d * inv_re, p.r_d * inv_im);
        // faradaic admittance 1 / (R_ct + Z_d)
        let (yf_re, yf_im) = recip(p.r_ct + zd_re, zd_im);
        let (ydl_re, ydl_im) = cpe(p.q_dl, p.alpha_dl);
        let (z_re, z_im) = recip(ydl_re + yf_re, ydl_im + yf_im);
        (p.r_s + z_re, z_im)
    }

    #[test]
    fn electrode_matches_hand_decomposition() {
        let p = ElectrodeParams::nominal();
        for f in [1.0, 1.0e3, 1.0e6, 1.0e9] {
            let omega = 2.0 * PI * f;
            let z = electrode_impedance(&p, omega);
            let (re, im) = impedance_by_hand(&p, omega);
            assert_relative_eq!(z.re, re, max_relative = 1e-12);
            assert_relative_eq!(z.im, im, max_relative = 1e-12);
        }
    }

    #[test]
    fn electrode_limits() {
        let p = ElectrodeParams::nominal();
        let dc = electrode_impedance(&p, 1e-12);
        assert_relative_eq!(dc.re, 130.5e3, max_relative = 1e-3);
        assert!(dc.im.abs() < 1e-3 * dc.re);
        let hf = electrode_impedance(&p, 1e15);
        assert_relative_eq!(hf.re, p.r_s, max_relative = 1e-3);
    }

    #[test]
    fn electrode_qoi_layout_and_signs() {
        let problem = TestProblem::electrode(16).unwrap();
        let p = ElectrodeParams::nominal();
        let q = problem.evaluate(&p.to_vec()).unwrap();
        assert_eq!(q.len(), 32);
        assert!(q[16..].iter().all(|&im| im <= 0.0));
        assert!(q[..16].iter().all(|&re| re >= p.r_s));
        // 1 Hz sits below the low-frequency plateau of 130.5 kΩ
        assert!(q[0] > 100e3 && q[0] < 130.5e3);
        let z = electrode_impedance(&p, 2.0 * PI);
        assert_eq!(q[0], z.re);
    }

    #[test]
    fn frequency_grid_is_inclusive() {
        let f = log_frequencies(1000, 1.0, 1e9);
        assert_eq!(f.len(), 1000);
        assert_relative_eq!(f[0], 1.0);
        assert_relative_eq!(f[999], 1e9, max_relative = 1e-12);
        assert!(f.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn registry_resolves_all_names() {
        for name in PROBLEM_NAMES {
            let p = problem_by_name(name).unwrap();
            assert_eq!(p.name(), name);
        }
        assert_eq!(problem_by_name("ishigami").unwrap().basis().len(), 91);
        assert_eq!(problem_by_name("rosenbrock6").unwrap().basis().len(), 181);
        assert_eq!(problem_by_name("lpp30").unwrap().basis().len(), 496);
        assert_eq!(problem_by_name("electrode").unwrap().basis().len(), 596);
        assert_eq!(problem_by_name("electrode").unwrap().n_qoi(), 128);
        assert_eq!(problem_by_name("electrode-full").unwrap().n_qoi(), 2000);
        assert!(matches!(
            problem_by_name("nope"),
            Err(Error::UnknownProblem(_))
        ));
        assert_eq!(problem_by_name("lpp4").unwrap().dim(), 4);
        assert_eq!(
            problem_by_name("rosenbrock3").unwrap().name(),
            "rosenbrock3"
        );
        assert_eq!(problem_by_name("electrode8").unwrap().n_qoi(), 16);
        assert!(problem_by_name("lpp1").is_err());
        assert!(matches!(
            problem_by_name("lppx"),
            Err(Error::UnknownProblem(_))
        ));
    }

    #[test]
    fn ishigami_analytic_moments() {
        let (mean, std) = TestProblem::ishigami().analytic_moments().unwrap();
        assert_eq!(mean, 3.5);
        assert_relative_eq!(std * std, 6.73, epsilon = 1e-12);
    }

    proptest! {
        #[test]
        fn ishigami_odd_symmetry(x1 in -PI..PI, x2 in -PI..PI) {
            let s = ishigami(-x1, x2, 7.0, 0.1, 1.0) + ishigami(x1, x2, 7.0, 0.1, 1.0);
            prop_assert!((s - 14.0 * x2.sin().powi(2)).abs() < 1e-12);
        }

        #[test]
        fn rosenbrock_is_non_negative(x in proptest::collection::vec(-2.0f64..2.0, 6)) {
            let y = rosenbrock(&x).unwrap();
            prop_assert!(y >= 0.0);
            if x.iter().any(|&v| (v - 1.0).abs() > 1e-6) {
                prop_assert!(y > 0.0);
            }
        }

        #[test]
        fn electrode_real_part_above_series_resistance(k in 0usize..200) {
            let p = ElectrodeParams::nominal();
            let omega = 2.0 * PI * 10f64.powf(9.0 * k as f64 / 199.0);
            let z = electrode_impedance(&p, omega);
            prop_assert!(z.re >= p.r_s && z.im <= 0.0);
        }
    }
}
