//! Executes a [`RunConfig`]: tasks in order, one CSV per table, a summary of
//! `max_t truth/bound` per method.

use std::fs;
use std::path::{Path, PathBuf};

use semibound_core::bounds::{
    contrb_curve, contrbprime_curve, gps_curve, phi_limit_curve, power_curve, propa_constant, propa_curve,
    truth_curve,
};
use semibound_core::io::{atomic_write, curve_csv, profile_csv, read_matrix, recursion_csv, split_csv};
use semibound_core::recursion::extend_majorant;
use semibound_core::resolvent::{hille_yosida_check, profile_with, SweepOptions, Sweeper};
use semibound_core::split::{RestrictedWeight, SplitAnalysis};
use semibound_core::{BoundCurve, BoundMethod, Error, OperatorMatrix, WeightSpec};

use crate::config::{OperatorSource, RunConfig, SplitWeight, Task};
use crate::plot::plot_svg;
use crate::CliError;

/// Relative slack of every domination check.
pub const DOMINATION_TOL: f64 = 1e-9;

/// Cells of the table that samples a majorant on its initial horizon.
const MAJORANT_CELLS: usize = 64;
/// Steps per horizon of the appendix march.
const STEPS_PER_HORIZON: f64 = 1024.0;
/// Points of the `ω` grid behind `phi_limit`.
const PHI_GRID: i32 = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub task: String,
    pub method: String,
    pub max_truth_over_bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default)]
pub struct RunReport {
    pub seed: u64,
    pub rows: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn summary_csv(&self, operator: &str) -> String {
        let mut s = format!("#seed={}\n#operator={operator}\ntask,method,max_truth_over_bound,pass\n", self.seed);
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.task, r.method, r.max_truth_over_bound, r.pass));
        }
        s
    }
}

pub fn load_operator(config: &RunConfig) -> Result<OperatorMatrix, CliError> {
    match &config.operator {
        OperatorSource::Gallery(e) => Ok(e.build_seeded(config.seed)?),
        OperatorSource::File(p) => {
            if !p.is_file() {
                return Err(CliError::Config(format!("matrix file {} does not exist", p.display())));
            }
            Ok(read_matrix(p)?)
        }
    }
}

fn operator_label(config: &RunConfig) -> String {
    match &config.operator {
        OperatorSource::Gallery(e) => e.name().to_string(),
        OperatorSource::File(p) => p.display().to_string(),
    }
}

struct Ctx<'a> {
    a: &'a OperatorMatrix,
    sweeper: Sweeper<'a>,
    omega0: f64,
    eta: f64,
    out: &'a Path,
    svg: bool,
    report: RunReport,
}

impl Ctx<'_> {
    fn write(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let p = self.out.join(name);
        atomic_write(&p, text.as_bytes())?;
        self.report.files.push(p);
        Ok(())
    }

    /// `ω₀ + max(η - ω₀, 0.1)/2`: inside `(ω₀, η)` when that interval is not tiny.
    fn default_omega(&self) -> f64 {
        self.omega0 + 0.5 * (self.eta - self.omega0).max(0.1)
    }

    fn default_weight(&self) -> Result<WeightSpec, CliError> {
        Ok(WeightSpec::exponential(1.0, self.eta)?)
    }
}

/// Runs every task of `config`, writing into its output directory.
pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    config.validate()?;
    let a = load_operator(config)?;
    fs::create_dir_all(&config.output_dir).map_err(Error::from)?;
    let sweeper = Sweeper::new(&a);
    let omega0 = sweeper.spectrum()?[0].re;
    let mut ctx = Ctx {
        a: &a,
        omega0,
        eta: a.numerical_abscissa(),
        sweeper,
        out: &config.output_dir,
        svg: config.svg,
        report: RunReport {
            seed: config.seed,
            ..Default::default()
        },
    };
    ctx.write("config.json", &config.to_json())?;
    for (k, task) in config.tasks.iter().enumerate() {
        let prefix = format!("{:02}_{}", k + 1, task.name());
        run_task(&mut ctx, &prefix, task)?;
    }
    let summary = ctx.report.summary_csv(&operator_label(config));
    ctx.write("summary.csv", &summary)?;
    Ok(ctx.report)
}

fn run_task(ctx: &mut Ctx<'_>, prefix: &str, task: &Task) -> Result<(), CliError> {
    match task {
        Task::Profile { omega, rel_width } => {
            let grid = omega.points()?;
            let p = profile_with(&ctx.sweeper, &grid, &SweepOptions::with_rel_width(*rel_width))?;
            ctx.write(&format!("{prefix}.csv"), &profile_csv(&p)?)
        }
        Task::Bound { .. } => run_bound(ctx, prefix, task),
        Task::Validate { omega, lambda } => {
            let rep = hille_yosida_check(ctx.a, *omega, &lambda.points()?)?;
            let mut s = format!("#omega={omega}\nside,at,value,bound,pass\n");
            for (side, samples) in [("resolvent", &rep.resolvent), ("semigroup", &rep.semigroup)] {
                for x in samples {
                    s.push_str(&format!("{side},{},{},{},{}\n", x.at, x.value, x.bound, x.pass));
                }
            }
            ctx.write(&format!("{prefix}.csv"), &s)?;
            let ratio = rep.semigroup.iter().map(|x| x.value / x.bound).fold(0.0, f64::max);
            ctx.report.rows.push(SummaryRow {
                task: prefix.to_string(),
                method: "hille_yosida".into(),
                max_truth_over_bound: ratio,
                pass: rep.consistent(),
            });
            Ok(())
        }
        Task::Split { omega_tilde, t, contour, weight, nodes, rel_width } => {
            let ts = t.times()?;
            let weight = match weight {
                SplitWeight::NumericalAbscissa => RestrictedWeight::User(ctx.default_weight()?),
                SplitWeight::User(w) => RestrictedWeight::User(w.clone()),
                SplitWeight::Sampled { horizon, samples, margin } => RestrictedWeight::Sampled {
                    horizon: *horizon,
                    samples: *samples,
                    margin: *margin,
                },
            };
            let sweeper = Sweeper::with_spectrum(ctx.a, ctx.sweeper.spectrum()?.to_vec());
            let an = SplitAnalysis::from_sweeper(sweeper, *omega_tilde, contour.clone(), weight, *nodes, *rel_width)?;
            let rows = an.rows(&ts)?;
            let head = format!(
                "#omega_tilde={omega_tilde}\n#r={}\n#complement_norm={}\n#split_off={}\n",
                an.r_line.lo,
                an.split.complement_norm,
                an.split.sigma_plus.len()
            );
            ctx.write(&format!("{prefix}.csv"), &(head + &split_csv(&rows)?))?;
            // an empty remainder (Π₊ = I) has R_true = R_bound = 0
            let ratio = rows
                .iter()
                .map(|r| if r.r_true == 0.0 { 0.0 } else { r.r_true / r.r_bound })
                .fold(0.0, f64::max);
            ctx.report.rows.push(SummaryRow {
                task: prefix.to_string(),
                method: BoundMethod::Split.tag().into(),
                max_truth_over_bound: ratio,
                pass: ratio <= 1.0 + DOMINATION_TOL,
            });
            Ok(())
        }
        Task::Recursion { omega, r, m0, horizon, t_max, h, stride } => {
            let omega = omega.unwrap_or_else(|| ctx.default_omega());
            let r = match r {
                Some(r) => *r,
                None => ctx.sweeper.r_of_omega(omega, &SweepOptions::default())?.lo,
            };
            let m0 = match m0 {
                Some(w @ WeightSpec::Tabulated { .. }) => w.clone(),
                Some(w) => initial_table(w, *horizon)?,
                None => initial_table(&ctx.default_weight()?, *horizon)?,
            };
            let h = h.unwrap_or(m0.horizon() / STEPS_PER_HORIZON);
            let state = extend_majorant(&m0, omega, r, *t_max, h)?;
            ctx.write(&format!("{prefix}.csv"), &recursion_csv(&state, *stride)?)
        }
    }
}

fn initial_table(m: &WeightSpec, horizon: f64) -> Result<WeightSpec, CliError> {
    let t = horizon.min(m.horizon());
    Ok(WeightSpec::tabulate(|s| m.eval(s), t, MAJORANT_CELLS)?)
}

fn exponential_params(m: &WeightSpec, method: BoundMethod) -> Result<(f64, f64), CliError> {
    match *m {
        WeightSpec::Exponential { m_hat, omega_hat } => Ok((m_hat, omega_hat)),
        _ => Err(Error::Hypothesis(format!("{method} needs an exponential majorant M e^(omega_hat t)")).into()),
    }
}

fn run_bound(ctx: &mut Ctx<'_>, prefix: &str, task: &Task) -> Result<(), CliError> {
    let Task::Bound { methods, t, omega, m, s, alpha, power_optimal, epsilon0, horizon, rel_width } = task else {
        unreachable!("run_bound called with a non-bound task");
    };
    let ts = t.times()?;
    let omega = omega.unwrap_or_else(|| ctx.default_omega());
    let m = match m {
        Some(m) => m.clone(),
        None => ctx.default_weight()?,
    };
    let opts = SweepOptions::with_rel_width(*rel_width);
    let r = ctx.sweeper.r_of_omega(omega, &opts)?.lo;
    let truth = truth_curve(ctx.a, &ts)?;
    let mut r0 = None;
    let mut curves = Vec::new();

    for &method in methods {
        let curve = match method {
            BoundMethod::Gps => gps_curve(r, &m, omega, &ts)?,
            BoundMethod::Propa => {
                let (mh, wh) = exponential_params(&m, method)?;
                propa_curve(mh, wh, omega, r, &ts)?
            }
            BoundMethod::Contrb => {
                let (mh, wh) = exponential_params(&m, method)?;
                contrb_curve(mh, wh, omega, r, &ts, *s)?
            }
            BoundMethod::Contrbprime | BoundMethod::Power => {
                let (mh, wh) = exponential_params(&m, method)?;
                let r0 = match r0 {
                    Some(v) => v,
                    None => {
                        let v = ctx.sweeper.r_of_omega(0.0, &opts)?.lo;
                        r0 = Some(v);
                        v
                    }
                };
                // a uniform bound sup ‖S(t)‖ ≤ M̂₀
                let m0 = if wh <= 0.0 { mh } else { propa_constant(mh, wh, 0.0, r0)? };
                if method == BoundMethod::Contrbprime {
                    contrbprime_curve(m0, r0, &ts, *s)?
                } else {
                    let alpha = alpha.unwrap_or(r0 / (4.0 * m0));
                    power_curve(m0, r0, alpha, &ts, *power_optimal)?
                }
            }
            BoundMethod::PhiLimit => {
                let eps = epsilon0.unwrap_or_else(|| (ctx.eta - ctx.omega0).max(0.1));
                let grid: Vec<f64> = (0..PHI_GRID).rev().map(|k| ctx.omega0 + eps * 0.5f64.powi(k)).collect();
                let profile = profile_with(&ctx.sweeper, &grid, &opts)?;
                let late: Vec<f64> = ts.iter().copied().filter(|&t| t >= 1.0).collect();
                if late.is_empty() {
                    return Err(Error::Domain("phi_limit is stated for t >= 1 and the t grid has none".into()).into());
                }
                phi_limit_curve(&profile, ctx.omega0, eps, &m, &late)?
            }
            BoundMethod::Appendix => appendix_curve(&m, omega, r, *horizon, &ts)?,
            BoundMethod::Split | BoundMethod::Truth => unreachable!("rejected by validation"),
        };
        let ratio = ratio_on(&curve, &truth);
        ctx.write(&format!("{prefix}_{}.csv", method.tag()), &curve_csv(&curve)?)?;
        ctx.report.rows.push(SummaryRow {
            task: prefix.to_string(),
            method: method.tag().into(),
            max_truth_over_bound: ratio,
            pass: ratio <= 1.0 + DOMINATION_TOL,
        });
        curves.push(curve);
    }
    ctx.write(&format!("{prefix}_truth.csv"), &curve_csv(&truth)?)?;
    if ctx.svg {
        ctx.write(&format!("{prefix}.svg"), &plot_svg(&curves, &truth)?)?;
    }
    Ok(())
}

/// Majorant extended from `[0, T)` by the recursion; off-grid times past `T`
/// use the preceding node, where the scaled majorant is nonincreasing.
fn appendix_curve(m: &WeightSpec, omega: f64, r: f64, horizon: f64, ts: &[f64]) -> Result<BoundCurve, CliError> {
    let m0 = initial_table(m, horizon)?;
    let big_t = m0.horizon();
    let h = big_t / STEPS_PER_HORIZON;
    let t_max = ts[ts.len() - 1].max(big_t);
    let state = extend_majorant(&m0, omega, r, t_max, h)?;
    let values = ts
        .iter()
        .map(|&t| {
            if t < big_t {
                m.eval(t)
            } else {
                let j = state.node(t).unwrap_or(((t / h).floor() as usize).min(state.len() - 1));
                (state.log_majorant(j) + omega * (t - state.t(j))).exp()
            }
        })
        .collect();
    Ok(BoundCurve::new(ts.to_vec(), values, BoundMethod::Appendix)?
        .with_param("omega", omega)
        .with_param("r", r)
        .with_param("T", big_t)
        .with_param("h", h))
}

/// `max truth/bound` over the curve's times, all of which lie on the truth grid.
fn ratio_on(curve: &BoundCurve, truth: &BoundCurve) -> f64 {
    curve
        .t
        .iter()
        .zip(&curve.values)
        .map(|(t, b)| {
            let k = truth.t.partition_point(|s| s < t);
            truth.values[k] / b
        })
        .fold(0.0, f64::max)
}
