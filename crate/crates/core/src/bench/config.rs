//! Study configuration and its TOML form.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::Scheme;
use crate::solver::{Selection, SolverChoice};

/// A sampling scheme with an optional solver override.
///
/// Written `scheme` or `scheme@solver`, e.g. `random@l2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeSpec {
    pub scheme: Scheme,
    pub solver: Option<SolverChoice>,
}

impl SchemeSpec {
    pub fn new(scheme: Scheme) -> Self {
        SchemeSpec {
            scheme,
            solver: None,
        }
    }

    pub fn with_solver(scheme: Scheme, solver: SolverChoice) -> Self {
        SchemeSpec {
            scheme,
            solver: Some(solver),
        }
    }

    /// Label used in records and summaries.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.solver {
            Some(s) => write!(f, "{}@{}", self.scheme, s),
            None => write!(f, "{}", self.scheme),
        }
    }
}

impl FromStr for SchemeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once('@') {
            Some((scheme, solver)) => Ok(SchemeSpec::with_solver(scheme.parse()?, solver.parse()?)),
            None => Ok(SchemeSpec::new(s.parse()?)),
        }
    }
}

/// Knobs of the design generators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignParams {
    /// Greedy pool size per requested point.
    pub pool_factor: usize,
    /// Candidate count of the pool-optimal LHS designs.
    pub lhs_pool: usize,
    /// Border-stratum fraction of SC-ESE.
    pub sc_alpha: f64,
}

impl Default for DesignParams {
    fn default() -> Self {
        DesignParams {
            pool_factor: 10,
            lhs_pool: 100,
            sc_alpha: 0.25,
        }
    }
}

/// Everything a convergence study needs.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub problem: String,
    /// Basis order; `None` keeps the problem's default.
    pub order: Option<usize>,
    pub interaction_order: Option<usize>,
    pub schemes: Vec<SchemeSpec>,
    pub baseline: String,
    /// Strictly increasing sample counts.
    pub grid: Vec<usize>,
    pub repetitions: usize,
    pub thresholds: Vec<f64>,
    /// Solver for schemes without an override.
    pub solver: SolverChoice,
    pub master_seed: u64,
    pub n_test: usize,
    /// Monte Carlo size of the reference moments; 0 skips moment errors.
    pub reference_samples: usize,
    pub design: DesignParams,
}

pub const DEFAULT_THRESHOLDS: [f64; 3] = [1e-3, 1e-2, 1e-1];

impl StudyConfig {
    pub fn new(problem: &str, schemes: Vec<SchemeSpec>, grid: Vec<usize>) -> Self {
        StudyConfig {
            problem: problem.to_string(),
            order: None,
            interaction_order: None,
            schemes,
            baseline: Scheme::Random.name().to_string(),
            grid,
            repetitions: 30,
            thresholds: DEFAULT_THRESHOLDS.to_vec(),
            solver: SolverChoice::default(),
            master_seed: 0,
            n_test: 10_000,
            reference_samples: 0,
            design: DesignParams::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: &str| Err(Error::Config(format!("{field}: {msg}")));
        if self.schemes.is_empty() {
            return bad("schemes.list", "at least one scheme is required");
        }
        let mut labels: Vec<String> = self.schemes.iter().map(SchemeSpec::label).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return bad("schemes.list", "duplicate scheme");
        }
        if self.grid.is_empty() {
            return bad("grid", "empty sample-size grid");
        }
        if self.grid.windows(2).any(|w| w[0] >= w[1]) {
            return bad("grid", "sample sizes must be strictly increasing");
        }
        if self.grid[0] < 2 {
            return bad("grid", "sample sizes must be at least 2");
        }
        if self.repetitions < 2 {
            return bad("grid.repetitions", "at least two repetitions are required");
        }
        if self.thresholds.is_empty() || self.thresholds.iter().any(|t| !(*t > 0.0)) {
            return bad("evaluation.thresholds", "thresholds must be positive");
        }
        if self.n_test == 0 {
            return bad("evaluation.n_test", "test set must not be empty");
        }
        if self.design.pool_factor < 1 {
            return bad("schemes.pool_factor", "must be at least 1");
        }
        if self.design.lhs_pool < 1 {
            return bad("schemes.lhs_pool", "must be at least 1");
        }
        if !(self.design.sc_alpha > 0.0 && self.design.sc_alpha <= 1.0) {
            return bad("schemes.sc_alpha", "must lie in (0, 1]");
        }
        if let SolverChoice::Lars(Selection::CrossValidation { folds, .. }) = self.solver {
            if folds < 2 {
                return bad("solver.folds", "at least two folds are required");
            }
        }
        Ok(())
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: FileConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let config = file.into_config()?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Canonical TOML rendering; parses back to an equal config.
    pub fn to_toml_string(&self) -> String {
        toml::to_string(&FileConfig::from_config(self)).expect("config serializes")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    problem: ProblemSection,
    schemes: SchemesSection,
    grid: GridSection,
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    seeds: SeedSection,
    #[serde(default)]
    evaluation: EvaluationSection,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemSection {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    interaction_order: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemesSection {
    list: Vec<String>,
    baseline: Option<String>,
    pool_factor: Option<usize>,
    lhs_pool: Option<usize>,
    sc_alpha: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    values: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    start: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stop: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    step: Option<usize>,
    repetitions: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverSection {
    kind: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    selection: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    folds: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cv_seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    knot: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedSection {
    master: Option<u64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EvaluationSection {
    n_test: Option<usize>,
    thresholds: Option<Vec<f64>>,
    reference_samples: Option<usize>,
}

impl GridSection {
    fn values(&self) -> Result<Vec<usize>> {
        match (&self.values, self.start, self.stop, self.step) {
            (Some(v), None, None, None) => Ok(v.clone()),
            (None, Some(start), Some(stop), step) => {
                let step = step.unwrap_or(1);
                if step == 0 || stop < start {
                    return Err(Error::Config(
                        "grid: need start <= stop and step >= 1".into(),
                    ));
                }
                Ok((start..=stop).step_by(step).collect())
            }
            _ => Err(Error::Config(
                "grid: give either `values` or `start`/`stop`[/`step`]".into(),
            )),
        }
    }
}

impl SolverSection {
    fn choice(&self) -> Result<SolverChoice> {
        let kind = self.kind.as_deref().unwrap_or("l1");
        let base: SolverChoice = kind
            .parse()
            .map_err(|e: Error| Error::Config(format!("solver.kind: {e}")))?;
        if base == SolverChoice::LeastSquares {
            return Ok(base);
        }
        let selection = match self.selection.as_deref().unwrap_or("cv") {
            "cv" => {
                let Selection::CrossValidation { folds, seed } = Selection::default() else {
                    unreachable!()
                };
                Selection::CrossValidation {
                    folds: self.folds.unwrap_or(folds),
                    seed: self.cv_seed.unwrap_or(seed),
                }
            }
            "path-end" => Selection::PathEnd,
            "knot" => Selection::Knot(
                self.knot
                    .ok_or_else(|| Error::Config("solver.knot: required for selection = \"knot\"".into()))?,
            ),
            "residual" => Selection::ResidualTolerance(self.tolerance.ok_or_else(|| {
                Error::Config("solver.tolerance: required for selection = \"residual\"".into())
            })?),
            other => {
                return Err(Error::Config(format!(
                    "solver.selection: unknown selection `{other}` (expected cv, path-end, knot or residual)"
                )))
            }
        };
        Ok(SolverChoice::Lars(selection))
    }

    fn from_choice(choice: &SolverChoice) -> Self {
        let mut s = SolverSection {
            kind: Some(choice.name().to_string()),
            ..Default::default()
        };
        if let SolverChoice::Lars(sel) = choice {
            match *sel {
                Selection::CrossValidation { folds, seed } => {
                    s.selection = Some("cv".into());
                    s.folds = Some(folds);
                    s.cv_seed = Some(seed);
                }
                Selection::PathEnd => s.selection = Some("path-end".into()),
                Selection::Knot(k) => {
                    s.selection = Some("knot".into());
                    s.knot = Some(k);
                }
                Selection::ResidualTolerance(t) => {
                    s.selection = Some("residual".into());
                    s.tolerance = Some(t);
                }
            }
        }
        s
    }
}

impl FileConfig {
    fn into_config(self) -> Result<StudyConfig> {
        let schemes = self
            .schemes
            .list
            .iter()
            .enumerate()
            .map(|(i, s)| {
                s.parse::<SchemeSpec>()
                    .map_err(|e| Error::Config(format!("schemes.list[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut config = StudyConfig::new(&self.problem.name, schemes, self.grid.values()?);
        crate::models::problem_by_name(&self.problem.name)
            .map_err(|e| Error::Config(format!("problem.name: {e}")))?;
        config.order = self.problem.order;
        config.interaction_order = self.problem.interaction_order;
        if let Some(b) = self.schemes.baseline {
            config.baseline = b;
        }
        let d = DesignParams::default();
        config.design = DesignParams {
            pool_factor: self.schemes.pool_factor.unwrap_or(d.pool_factor),
            lhs_pool: self.schemes.lhs_pool.unwrap_or(d.lhs_pool),
            sc_alpha: self.schemes.sc_alpha.unwrap_or(d.sc_alpha),
        };
        if let Some(r) = self.grid.repetitions {
            config.repetitions = r;
        }
        config.solver = self.solver.choice()?;
        if let Some(m) = self.seeds.master {
            config.master_seed = m;
        }
        let ev = self.evaluation;
        if let Some(n) = ev.n_test {
            config.n_test = n;
        }
        if let Some(t) = ev.thresholds {
            config.thresholds = t;
        }
        if let Some(n) = ev.reference_samples {
            config.reference_samples = n;
        }
        Ok(config)
    }

    fn from_config(c: &StudyConfig) -> Self {
        FileConfig {
            problem: ProblemSection {
                name: c.problem.clone(),
                order: c.order,
                interaction_order: c.interaction_order,
            },
            schemes: SchemesSection {
                list: c.schemes.iter().map(SchemeSpec::label).collect(),
                baseline: Some(c.baseline.clone()),
                pool_factor: Some(c.design.pool_factor),
                lhs_pool: Some(c.design.lhs_pool),
                sc_alpha: Some(c.design.sc_alpha),
            },
            grid: GridSection {
                values: Some(c.grid.clone()),
                start: None,
                stop: None,
                step: None,
                repetitions: Some(c.repetitions),
            },
            solver: SolverSection::from_choice(&c.solver),
            seeds: SeedSection {
                master: Some(c.master_seed),
            },
            evaluation: EvaluationSection {
                n_test: Some(c.n_test),
                thresholds: Some(c.thresholds.clone()),
                reference_samples: Some(c.reference_samples),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[problem]
name = "ishigami"

[schemes]
list = ["random", "random@l2", "lhs-sc-ese"]

[grid]
start = 20
stop = 40
step = 10
repetitions = 3
"#;

    #[test]
    fn minimal_config_fills_defaults() {
        let c = StudyConfig::from_toml_str(MINIMAL).unwrap();
        assert_eq!(c.grid, vec![20, 30, 40]);
        assert_eq!(c.repetitions, 3);
        assert_eq!(c.baseline, "random");
        assert_eq!(c.thresholds, DEFAULT_THRESHOLDS.to_vec());
        assert_eq!(c.solver, SolverChoice::default());
        assert_eq!(c.schemes[1].label(), "random@l2");
        assert_eq!(c.schemes[1].solver, Some(SolverChoice::LeastSquares));
    }

    #[test]
    fn round_trip_through_toml() {
        let mut c = StudyConfig::from_toml_str(MINIMAL).unwrap();
        c.solver = SolverChoice::Lars(Selection::ResidualTolerance(1e-4));
        c.order = Some(6);
        let back = StudyConfig::from_toml_str(&c.to_toml_string()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("repetitions = 3", "repetitions = 3\nrepetition = 4");
        assert!(matches!(
            StudyConfig::from_toml_str(&text),
            Err(Error::Config(_))
        ));
        let text = format!("{MINIMAL}\n[extra]\nx = 1\n");
        assert!(StudyConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn bad_values_name_the_field() {
        let text = MINIMAL.replace("\"lhs-sc-ese\"", "\"lhs-foo\"");
        let msg = StudyConfig::from_toml_str(&text).unwrap_err().to_string();
        assert!(msg.contains("schemes.list[2]"), "{msg}");
        let text = MINIMAL.replace("repetitions = 3", "repetitions = 1");
        let msg = StudyConfig::from_toml_str(&text).unwrap_err().to_string();
        assert!(msg.contains("repetitions"), "{msg}");
        let text = MINIMAL.replace("ishigami", "nope");
        let msg = StudyConfig::from_toml_str(&text).unwrap_err().to_string();
        assert!(msg.contains("problem.name"), "{msg}");
    }

    #[test]
    fn grid_must_increase() {
        let mut c = StudyConfig::new(
            "ishigami",
            vec![SchemeSpec::new(Scheme::Random)],
            vec![10, 10],
        );
        assert!(c.validate().is_err());
        c.grid = vec![10, 20];
        assert!(c.validate().is_ok());
    }

    #[test]
    fn scheme_spec_parsing() {
        assert_eq!(
            "co".parse::<SchemeSpec>().unwrap(),
            SchemeSpec::new(Scheme::CoherenceOptimal)
        );
        assert!("co@l3".parse::<SchemeSpec>().is_err());
        assert_eq!("l1-d@l1".parse::<SchemeSpec>().unwrap().label(), "l1-d@l1");
    }
}
