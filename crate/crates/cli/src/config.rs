//! Run configuration: one operator, a flat list of tasks, an output
//! directory and the seed.

use std::fs;
use std::path::{Path, PathBuf};

use semibound_core::bounds::SChoice;
use semibound_core::gallery::GalleryEntry;
use semibound_core::split::Contour;
use semibound_core::{BoundMethod, WeightSpec};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub operator: OperatorSource,
    pub tasks: Vec<Task>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Seed for every random choice of the run (random gallery entries
    /// without their own seed).
    #[serde(default)]
    pub seed: u64,
    /// Also write an SVG chart next to every bound table.
    #[serde(default)]
    pub svg: bool,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("semibound-out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSource {
    Gallery(GalleryEntry),
    /// Matrix JSON file.
    File(PathBuf),
}

/// Explicit list or `count` points from `from` to `to`, geometric when `log`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    List(Vec<f64>),
    Range {
        from: f64,
        to: f64,
        count: usize,
        #[serde(default)]
        log: bool,
    },
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>, CliError> {
        let pts = match *self {
            Grid::List(ref v) => v.clone(),
            Grid::Range { from, to, count, log } => {
                if count == 0 {
                    return Err(CliError::Config("grid count must be positive".into()));
                }
                if count == 1 {
                    if from != to {
                        return Err(CliError::Config("a one-point grid needs from == to".into()));
                    }
                    vec![from]
                } else if log {
                    if !(from > 0.0 && to > 0.0) {
                        return Err(CliError::Config("a log grid needs positive end points".into()));
                    }
                    let (a, b) = (from.ln(), to.ln());
                    (0..count)
                        .map(|k| (a + (b - a) * k as f64 / (count - 1) as f64).exp())
                        .collect()
                } else {
                    (0..count)
                        .map(|k| from + (to - from) * k as f64 / (count - 1) as f64)
                        .collect()
                }
            }
        };
        if pts.is_empty() {
            return Err(CliError::Config("grid is empty".into()));
        }
        if pts.iter().any(|x| !x.is_finite()) || pts.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config("grid must be finite and strictly ascending".into()));
        }
        Ok(pts)
    }

    /// As [`Grid::points`], additionally requiring positive values.
    pub fn times(&self) -> Result<Vec<f64>, CliError> {
        let pts = self.points()?;
        if pts[0] <= 0.0 {
            return Err(CliError::Config("t grid must be positive".into()));
        }
        Ok(pts)
    }
}

fn default_rel_width() -> f64 {
    1e-4
}
fn default_nodes() -> usize {
    256
}
fn default_horizon() -> f64 {
    1.0
}
fn default_stride() -> usize {
    16
}
fn default_true() -> bool {
    true
}
fn default_s() -> SChoice {
    SChoice::Optimal
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    /// Certified `r(ω)` on a grid.
    Profile {
        omega: Grid,
        #[serde(default = "default_rel_width")]
        rel_width: f64,
    },
    /// Bound curves against the true `‖e^{tA}‖`.
    Bound {
        methods: Vec<BoundMethod>,
        t: Grid,
        /// Defaults to the midpoint between the spectral abscissa and the
        /// majorant rate (at least 0.05 above the spectral abscissa).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<f64>,
        /// Defaults to `e^{ηt}`, `η` the numerical abscissa.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m: Option<WeightSpec>,
        #[serde(default = "default_s")]
        s: SChoice,
        /// Power-method rate; defaults to `r₀/(4M̂)`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<f64>,
        /// Minimize over `N` instead of using `N = ⌊αt⌋`.
        #[serde(default = "default_true")]
        power_optimal: bool,
        /// Width of the `ω` window used by `phi_limit`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        epsilon0: Option<f64>,
        /// Initial horizon of the appendix extension.
        #[serde(default = "default_horizon")]
        horizon: f64,
        #[serde(default = "default_rel_width")]
        rel_width: f64,
    },
    /// Both sides of the Hille–Yosida equivalence for `P(1, ω)`.
    Validate { omega: f64, lambda: Grid },
    /// Remainder bound after splitting off the eigenvalues right of `ω̃`.
    Split {
        omega_tilde: f64,
        t: Grid,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        contour: Option<Contour>,
        #[serde(default)]
        weight: SplitWeight,
        #[serde(default = "default_nodes")]
        nodes: usize,
        #[serde(default = "default_rel_width")]
        rel_width: f64,
    },
    /// Majorant extension from `[0, T)` to `t_max`.
    Recursion {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        omega: Option<f64>,
        /// Defaults to the certified `r(ω)`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r: Option<f64>,
        /// Majorant on `[0, T)`; defaults to `e^{ηt}`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m0: Option<WeightSpec>,
        #[serde(default = "default_horizon")]
        horizon: f64,
        t_max: f64,
        /// Defaults to `T/1024`.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h: Option<f64>,
        #[serde(default = "default_stride")]
        stride: usize,
    },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Profile { .. } => "profile",
            Task::Bound { .. } => "bound",
            Task::Validate { .. } => "validate",
            Task::Split { .. } => "split",
            Task::Recursion { .. } => "recursion",
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        match self {
            Task::Profile { omega, rel_width } => {
                omega.points()?;
                check_rel(*rel_width)
            }
            Task::Bound { methods, t, rel_width, horizon, .. } => {
                t.times()?;
                if methods.is_empty() {
                    return Err(CliError::Config("bound task lists no methods".into()));
                }
                if let Some(m) = methods
                    .iter()
                    .find(|m| matches!(m, BoundMethod::Truth | BoundMethod::Split))
                {
                    return Err(CliError::Config(format!(
                        "'{m}' is not a bound method here (use the split task for split bounds)"
                    )));
                }
                if !(*horizon > 0.0) {
                    return Err(CliError::Config("horizon must be positive".into()));
                }
                check_rel(*rel_width)
            }
            Task::Validate { omega, lambda } => {
                let l = lambda.points()?;
                if l[0] <= *omega {
                    return Err(CliError::Config("every lambda must exceed omega".into()));
                }
                Ok(())
            }
            Task::Split { t, nodes, rel_width, .. } => {
                t.times()?;
                if *nodes < 8 {
                    return Err(CliError::Config("split needs at least 8 quadrature nodes".into()));
                }
                check_rel(*rel_width)
            }
            Task::Recursion { horizon, t_max, h, stride, .. } => {
                if !(*horizon > 0.0 && *t_max >= *horizon) {
                    return Err(CliError::Config("recursion needs 0 < horizon <= t_max".into()));
                }
                if h.is_some_and(|h| !(h > 0.0)) || *stride == 0 {
                    return Err(CliError::Config("recursion step and stride must be positive".into()));
                }
                Ok(())
            }
        }
    }
}

fn check_rel(r: f64) -> Result<(), CliError> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("rel_width = {r} must lie in (0, 1)")))
    }
}

/// Majorant of the restricted semigroup used by the split task.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitWeight {
    /// `e^{ηt}` with `η` the numerical abscissa of the full generator.
    #[default]
    NumericalAbscissa,
    User(WeightSpec),
    /// Sampled norms of the restricted semigroup; not certified between samples.
    Sampled { horizon: f64, samples: usize, margin: f64 },
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Reads, resolves relative paths against the file's directory and validates.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut c = Self::from_json(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        c.resolve(&base);
        c.validate()?;
        Ok(c)
    }

    pub fn resolve(&mut self, base: &Path) {
        if let OperatorSource::File(p) = &mut self.operator {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if self.output_dir.is_relative() {
            self.output_dir = base.join(&self.output_dir);
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.tasks.is_empty() {
            return Err(CliError::Config("config lists no tasks".into()));
        }
        if let OperatorSource::File(p) = &self.operator {
            if !p.is_file() {
                return Err(CliError::Config(format!("matrix file {} does not exist", p.display())));
            }
        }
        for (k, t) in self.tasks.iter().enumerate() {
            t.validate()
                .map_err(|e| CliError::Config(format!("task {} ({}): {}", k + 1, t.name(), e.detail())))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = Grid::Range { from: 1.0, to: 10.0, count: 10, log: false };
        assert_eq!(g.points().unwrap(), (1..=10).map(f64::from).collect::<Vec<_>>());
        let g = Grid::Range { from: 1.0, to: 100.0, count: 3, log: true };
        let p = g.points().unwrap();
        assert!((p[1] - 10.0).abs() < 1e-12);
        assert!(Grid::List(vec![1.0, 1.0]).points().is_err());
        assert!(Grid::List(vec![-1.0, 0.5]).times().is_err());
        assert!(Grid::List(vec![-1.0, 0.5]).points().is_ok());
    }

    #[test]
    fn parses_minimal_config() {
        let c = RunConfig::from_json(
            r#"{"operator": {"gallery": {"name": "jordan"}},
                "tasks": [{"task": "bound", "methods": ["gps"], "t": {"from": 1, "to": 10, "count": 10}}]}"#,
        )
        .unwrap();
        c.validate().unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.output_dir, PathBuf::from("semibound-out"));
    }

    #[test]
    fn rejects_bad_configs() {
        let no_tasks = r#"{"operator": {"gallery": {"name": "jordan"}}, "tasks": []}"#;
        assert!(RunConfig::from_json(no_tasks).unwrap().validate().is_err());
        let descending = r#"{"operator": {"gallery": {"name": "jordan"}},
            "tasks": [{"task": "bound", "methods": ["gps"], "t": [2, 1]}]}"#;
        assert!(RunConfig::from_json(descending).unwrap().validate().is_err());
        let unknown = r#"{"operator": {"gallery": {"name": "jordan"}}, "tasks": [], "extra": 1}"#;
        assert!(RunConfig::from_json(unknown).is_err());
        let missing = r#"{"operator": {"file": "/nonexistent/a.json"},
            "tasks": [{"task": "profile", "omega": [0]}]}"#;
        assert!(RunConfig::from_json(missing).unwrap().validate().is_err());
    }
}
