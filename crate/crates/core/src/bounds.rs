//! Explicit semigroup bounds built from `r(ω)` and a majorant `m(t) ≥ ‖e^{tA}‖`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{semigroup_norm, OperatorMatrix};
use crate::optimize::{minimize_open, COARSE_GRID};
use crate::quad::simpson_weight;
use crate::resolvent::ResolventProfile;

const OPT_TOL: f64 = 1e-8;

/// `expm1(x)/x`, continuous at 0.
fn phi1(x: f64) -> f64 {
    if x.abs() < 1e-12 {
        1.0 + 0.5 * x
    } else {
        x.exp_m1() / x
    }
}

/// The majorant `m(t) ≥ ‖S(t)‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    /// `m(t) = M̂ e^{ω̂t}`.
    Exponential { m_hat: f64, omega_hat: f64 },
    /// Samples of `m` on `[0, T]` interpolated linearly in `ln m`; `m = +∞`
    /// for `t ≥ T`.
    Tabulated { grid: Vec<f64>, values: Vec<f64>, horizon: f64 },
}

impl WeightSpec {
    pub fn exponential(m_hat: f64, omega_hat: f64) -> Result<Self> {
        let w = WeightSpec::Exponential { m_hat, omega_hat };
        w.validate()?;
        Ok(w)
    }

    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>, horizon: f64) -> Result<Self> {
        let w = WeightSpec::Tabulated { grid, values, horizon };
        w.validate()?;
        Ok(w)
    }

    /// Samples `f` on a uniform grid of `n` cells over `[0, horizon]`.
    pub fn tabulate(f: impl Fn(f64) -> f64, horizon: f64, n: usize) -> Result<Self> {
        let n = n.max(1);
        let grid: Vec<f64> = (0..=n).map(|k| horizon * k as f64 / n as f64).collect();
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::tabulated(grid, values, horizon)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            WeightSpec::Exponential { m_hat, omega_hat } => {
                if !m_hat.is_finite() || !omega_hat.is_finite() || *m_hat < 1.0 {
                    return Err(Error::Domain(format!(
                        "exponential weight needs finite M_hat >= 1 and finite omega_hat, got ({m_hat}, {omega_hat})"
                    )));
                }
            }
            WeightSpec::Tabulated { grid, values, horizon } => {
                if grid.len() < 2 || grid.len() != values.len() {
                    return Err(Error::Domain("tabulated weight needs matching grid/values of length >= 2".into()));
                }
                if grid[0] != 0.0 || grid.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Domain("tabulated grid must start at 0 and be strictly ascending".into()));
                }
                if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return Err(Error::Domain("tabulated weight values must be finite and positive".into()));
                }
                if !(horizon.is_finite() && *horizon > 0.0) || *grid.last().unwrap() < *horizon {
                    return Err(Error::Domain(format!(
                        "tabulated grid must cover [0, {horizon}); it ends at {}",
                        grid.last().unwrap()
                    )));
                }
            }
        }
        Ok(())
    }

    /// `T` for tabulated weights, `+∞` otherwise.
    pub fn horizon(&self) -> f64 {
        match self {
            WeightSpec::Exponential { .. } => f64::INFINITY,
            WeightSpec::Tabulated { horizon, .. } => *horizon,
        }
    }

    /// `ln m(t)` with `t` clamped into the tabulated range (left limit at `T`).
    fn ln_m_left(&self, t: f64) -> f64 {
        match self {
            WeightSpec::Exponential { m_hat, omega_hat } => m_hat.ln() + omega_hat * t,
            WeightSpec::Tabulated { grid, values, .. } => {
                let k = grid.partition_point(|&g| g <= t).clamp(1, grid.len() - 1);
                let (g0, g1) = (grid[k - 1], grid[k]);
                let (l0, l1) = (values[k - 1].ln(), values[k].ln());
                let th = ((t - g0) / (g1 - g0)).clamp(0.0, 1.0);
                l0 + th * (l1 - l0)
            }
        }
    }

    /// `m(t)`; `+∞` at or beyond the horizon of a tabulated weight.
    pub fn eval(&self, t: f64) -> f64 {
        if t >= self.horizon() {
            return f64::INFINITY;
        }
        self.ln_m_left(t).exp()
    }

    /// `lim_{s↑t} m(s)` for `t ≤ T`.
    pub fn eval_left(&self, t: f64) -> f64 {
        self.ln_m_left(t).exp()
    }

    /// `∫_lo^hi m(s)^{-2} e^{2ωs} ds` for `0 ≤ lo ≤ hi ≤ T`.
    ///
    /// Closed form for both variants: on each cell of a tabulated weight the
    /// integrand is an exact exponential.
    pub fn weight_integral(&self, omega: f64, lo: f64, hi: f64) -> Result<f64> {
        if !(lo >= 0.0 && hi >= lo) {
            return Err(Error::Domain(format!("invalid integration range [{lo}, {hi}]")));
        }
        if hi > self.horizon() {
            return Err(Error::Domain(format!(
                "upper limit {hi} exceeds the weight horizon {}",
                self.horizon()
            )));
        }
        match self {
            WeightSpec::Exponential { m_hat, omega_hat } => {
                let d = omega - omega_hat;
                let len = hi - lo;
                if d.abs() < 1e-8 * omega_hat.abs().max(1.0) {
                    return Ok(len / (m_hat * m_hat));
                }
                Ok((2.0 * d * lo).exp() * len * phi1(2.0 * d * len) / (m_hat * m_hat))
            }
            WeightSpec::Tabulated { grid, .. } => {
                let mut total = 0.0;
                let start = grid.partition_point(|&g| g <= lo).max(1);
                let mut a = lo;
                for k in start..grid.len() {
                    if a >= hi {
                        break;
                    }
                    let b = grid[k].min(hi);
                    if b > a {
                        // ln(m⁻² e^{2ωs}) is affine on [a, b].
                        let ea = 2.0 * omega * a - 2.0 * self.ln_m_left(a);
                        let eb = 2.0 * omega * b - 2.0 * self.ln_m_left(b);
                        total += ea.exp() * (b - a) * phi1(eb - ea);
                    }
                    a = b;
                }
                Ok(total)
            }
        }
    }
}

/// `‖1/m‖_{e^{-ω·}L²([0,a])} = (∫₀^a m^{-2} e^{2ωs} ds)^{1/2}`.
pub fn weight_norm(m: &WeightSpec, omega: f64, a: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("a = {a} must be positive")));
    }
    Ok(m.weight_integral(omega, 0.0, a)?.sqrt())
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!("r(omega) = {r} must be positive and finite")));
    }
    Ok(())
}

fn ln_gps(r: f64, m: &WeightSpec, omega: f64, t: f64, a: f64) -> Result<f64> {
    check_r(r)?;
    if !(a > 0.0 && a < t) {
        return Err(Error::Domain(format!("split a = {a} must lie strictly inside (0, {t})")));
    }
    let i1 = m.weight_integral(omega, 0.0, a)?;
    let i2 = m.weight_integral(omega, 0.0, t - a)?;
    Ok(omega * t - r.ln() - 0.5 * (i1.ln() + i2.ln()))
}

/// `e^{ωt} / (r(ω) ‖1/m‖_{[0,a]} ‖1/m‖_{[0,t-a]})`.
pub fn gps_bound(r_omega: f64, m: &WeightSpec, omega: f64, t: f64, a: f64) -> Result<f64> {
    Ok(ln_gps(r_omega, m, omega, t, a)?.exp())
}

/// Best split `a ∈ (0, t)` for [`gps_bound`]; the symmetric split is always a
/// candidate and wins ties.
pub fn optimal_split(r_omega: f64, m: &WeightSpec, omega: f64, t: f64) -> Result<(f64, f64)> {
    // Both pieces must stay inside the horizon of a tabulated weight.
    let horizon = m.horizon();
    if t > 2.0 * horizon {
        return Err(Error::Domain(format!("t = {t} exceeds twice the weight horizon {horizon}")));
    }
    let sym = ln_gps(r_omega, m, omega, t, 0.5 * t)?;
    let (lo, hi) = ((t - horizon).max(0.0), t.min(horizon));
    let (a, v) = minimize_open(
        |a| ln_gps(r_omega, m, omega, t, a).unwrap_or(f64::INFINITY),
        lo,
        hi,
        COARSE_GRID,
        OPT_TOL,
    );
    if sym <= v {
        Ok((0.5 * t, sym.exp()))
    } else {
        Ok((a, v.exp()))
    }
}

fn check_propa(m_hat: f64, omega_hat: f64, omega: f64, r: f64) -> Result<()> {
    check_r(r)?;
    if !(m_hat >= 1.0) {
        return Err(Error::Domain(format!("M_hat = {m_hat} must be >= 1")));
    }
    if !(omega < omega_hat) {
        return Err(Error::Domain(format!(
            "need omega < omega_hat, got omega = {omega}, omega_hat = {omega_hat}; use gps_bound with a = t/2 instead"
        )));
    }
    Ok(())
}

/// `2M̂²(ω̂-ω) e^{ωt} / (r(ω)(1 - e^{(ω-ω̂)t}))`.
pub fn m_new(m_hat: f64, omega_hat: f64, omega: f64, r_omega: f64, t: f64) -> Result<f64> {
    check_propa(m_hat, omega_hat, omega, r_omega)?;
    if !(t > 0.0) {
        return Err(Error::Domain(format!("t = {t} must be positive")));
    }
    let d = omega_hat - omega;
    Ok(2.0 * m_hat * m_hat * d / (r_omega * -(-d * t).exp_m1()) * (omega * t).exp())
}

/// `sup_t e^{-ωt} min(M̂e^{ω̂t}, m^new(t))`, maximised numerically in
/// `u = e^{(ω-ω̂)t} ∈ (0, 1)`.
pub fn combined_constant(m_hat: f64, omega_hat: f64, omega: f64, r_omega: f64) -> Result<f64> {
    check_propa(m_hat, omega_hat, omega, r_omega)?;
    let k = 2.0 * m_hat * m_hat * (omega_hat - omega) / r_omega;
    let (_, v) = minimize_open(|u| -(m_hat / u).min(k / (1.0 - u)), 0.0, 1.0, COARSE_GRID, 1e-12);
    Ok(-v)
}

/// `M̂(1 + 2M̂(ω̂-ω)/r(ω))`.
pub fn propa_constant(m_hat: f64, omega_hat: f64, omega: f64, r_omega: f64) -> Result<f64> {
    check_propa(m_hat, omega_hat, omega, r_omega)?;
    Ok(m_hat * (1.0 + 2.0 * m_hat * (omega_hat - omega) / r_omega))
}

fn ln_contrb(m_hat: f64, omega_hat: f64, omega: f64, r: f64, s: f64, t: f64) -> f64 {
    let q = (1.0 - s) * r;
    (m_hat * (q + 2.0 * m_hat * (omega_hat - omega + s * r)) / q).ln() + (omega - s * r) * t
}

fn check_contrb(m_hat: f64, omega_hat: f64, omega: f64, r: f64, s: f64) -> Result<()> {
    check_r(r)?;
    if !(m_hat >= 1.0) {
        return Err(Error::Domain(format!("M_hat = {m_hat} must be >= 1")));
    }
    if omega > omega_hat {
        return Err(Error::Domain(format!("need omega <= omega_hat, got {omega} > {omega_hat}")));
    }
    if !(0.0..1.0).contains(&s) {
        return Err(Error::Domain(format!("s = {s} must lie in [0, 1)")));
    }
    Ok(())
}

/// `M̂((1-s)r + 2M̂(ω̂-ω+sr))/((1-s)r) · e^{(ω-sr)t}`.
pub fn contrb_bound(m_hat: f64, omega_hat: f64, omega: f64, r_omega: f64, s: f64, t: f64) -> Result<f64> {
    check_contrb(m_hat, omega_hat, omega, r_omega, s)?;
    Ok(ln_contrb(m_hat, omega_hat, omega, r_omega, s, t).exp())
}

/// Minimises [`contrb_bound`] over `s ∈ [0, 1)`.
pub fn contrb_optimal(m_hat: f64, omega_hat: f64, omega: f64, r_omega: f64, t: f64) -> Result<(f64, f64)> {
    check_contrb(m_hat, omega_hat, omega, r_omega, 0.0)?;
    let at0 = ln_contrb(m_hat, omega_hat, omega, r_omega, 0.0, t);
    let (s, v) = minimize_open(
        |s| ln_contrb(m_hat, omega_hat, omega, r_omega, s, t),
        0.0,
        1.0,
        COARSE_GRID,
        OPT_TOL,
    );
    if at0 <= v {
        Ok((0.0, at0.exp()))
    } else {
        Ok((s, v.exp()))
    }
}

/// The schedule `s = t/(1+t)`.
pub fn contrb_schedule(t: f64) -> f64 {
    t / (1.0 + t)
}

/// Contrb with `ω = ω̂ = 0`: `M̂((1-s) + 2M̂s)/(1-s) · e^{-s r(0) t}`.
pub fn contrbprime_bound(m_hat: f64, r0: f64, s: f64, t: f64) -> Result<f64> {
    contrb_bound(m_hat, 0.0, 0.0, r0, s, t)
}

pub fn contrbprime_optimal(m_hat: f64, r0: f64, t: f64) -> Result<(f64, f64)> {
    contrb_optimal(m_hat, 0.0, 0.0, r0, t)
}

/// `(2M̂²N/(r(0) t))^N`, from `S(t) = S(t/N)^N` and the gps bound with
/// `m ≡ M̂`, `ω = 0` and the symmetric split.
pub fn power_bound(m_hat: f64, r0: f64, t: f64, n: u32) -> Result<f64> {
    check_r(r0)?;
    if !(t > 0.0) || n == 0 || !(m_hat >= 1.0) {
        return Err(Error::Domain(format!("need t > 0, N >= 1, M_hat >= 1; got t = {t}, N = {n}, M_hat = {m_hat}")));
    }
    Ok((2.0 * m_hat * m_hat * n as f64 / (r0 * t)).powi(n as i32))
}

/// Minimum of [`power_bound`] over `N ∈ {1, …, ⌈αt⌉ + 2}`; ties go to the
/// smaller `N`.
pub fn power_optimal(m_hat: f64, r0: f64, t: f64, alpha: f64) -> Result<(u32, f64)> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must be positive")));
    }
    let top = (alpha * t).ceil() as u32 + 2;
    let mut best = (1, power_bound(m_hat, r0, t, 1)?);
    for n in 2..=top {
        let v = power_bound(m_hat, r0, t, n)?;
        if v < best.1 {
            best = (n, v);
        }
    }
    Ok(best)
}

/// The schedule `N = max(1, ⌊αt⌋)`.
pub fn power_scheduled(m_hat: f64, r0: f64, t: f64, alpha: f64) -> Result<(u32, f64)> {
    let n = ((alpha * t).floor() as u32).max(1);
    Ok((n, power_bound(m_hat, r0, t, n)?))
}

/// `Φ(t) = inf_{ω ∈ (ω₀, ω₀+ε₀]} t(ω-ω₀) - ln r(ω)` over the profile grid,
/// using `r_lo`. Returns `(Φ(t), argmin ω)`.
pub fn phi_limit(profile: &ResolventProfile, omega0: f64, t: f64, epsilon0: f64) -> Result<(f64, f64)> {
    let mut best: Option<(f64, f64)> = None;
    for (k, &w) in profile.omega_grid.iter().enumerate() {
        if w <= omega0 || w > omega0 + epsilon0 || !(profile.r_lo[k] > 0.0) {
            continue;
        }
        let v = t * (w - omega0) - profile.r_lo[k].ln();
        if best.is_none_or(|(b, _)| v < b) {
            best = Some((v, w));
        }
    }
    best.ok_or_else(|| {
        Error::Domain(format!(
            "profile has no positive r in ({omega0}, {}]",
            omega0 + epsilon0
        ))
    })
}

/// `e^{ω₀t + Φ(t)} / ∫₀^{1/2} m^{-2} e^{2ω₀s} ds`, valid for `t ≥ 1`.
pub fn phi_limit_bound(
    profile: &ResolventProfile,
    omega0: f64,
    t: f64,
    epsilon0: f64,
    m: &WeightSpec,
) -> Result<f64> {
    if !(t >= 1.0) {
        return Err(Error::Domain(format!("t = {t} must be >= 1")));
    }
    let (phi, _) = phi_limit(profile, omega0, t, epsilon0)?;
    let j = m.weight_integral(omega0, 0.0, 0.5)?;
    Ok((omega0 * t + phi - j.ln()).exp())
}

/// Samples of the optimal cutoff and the Cauchy–Schwarz equality certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct Cutoff {
    pub s: Vec<f64>,
    pub chi: Vec<f64>,
    /// `‖χ' m‖_{e^{ω·}L²([0,a])}` from finite differences of the samples.
    pub chi_prime_norm: f64,
    /// `1/‖1/m‖_{e^{-ω·}L²([0,a])}`.
    pub inverse_weight_norm: f64,
    /// `∫₀^a |χ'|` from the same finite differences.
    pub total_variation: f64,
}

impl Cutoff {
    pub fn certificate_gap(&self) -> f64 {
        (self.chi_prime_norm - self.inverse_weight_norm).abs() / self.inverse_weight_norm
    }
}

/// `χ(s) = C∫_s^a m^{-2} e^{2ωσ} dσ` with `C = 1/‖1/m‖²`, sampled on `n_grid`
/// uniform cells.
pub fn optimal_cutoff(m: &WeightSpec, omega: f64, a: f64, n_grid: usize) -> Result<Cutoff> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("a = {a} must be positive")));
    }
    if a >= m.horizon() {
        return Err(Error::Domain(format!("m is infinite on [{}, {a}]", m.horizon())));
    }
    let n = n_grid.max(4) + n_grid % 2;
    let h = a / n as f64;
    let total = m.weight_integral(omega, 0.0, a)?;
    let s: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
    let mut chi = Vec::with_capacity(n + 1);
    for &x in &s {
        chi.push(m.weight_integral(omega, x.min(a), a)? / total);
    }
    chi[0] = 1.0;
    chi[n] = 0.0;
    let d: Vec<f64> = (0..=n)
        .map(|k| {
            if k == 0 {
                (-3.0 * chi[0] + 4.0 * chi[1] - chi[2]) / (2.0 * h)
            } else if k == n {
                (3.0 * chi[n] - 4.0 * chi[n - 1] + chi[n - 2]) / (2.0 * h)
            } else {
                (chi[k + 1] - chi[k - 1]) / (2.0 * h)
            }
        })
        .collect();
    let sq: Vec<f64> = (0..=n)
        .map(|k| {
            let v = d[k] * m.eval_left(s[k]) * (-omega * s[k]).exp();
            v * v
        })
        .collect();
    let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let chi_prime_norm = simpson_samples(&sq, h).sqrt();
    let total_variation = simpson_samples(&abs, h);
    Ok(Cutoff {
        s,
        chi,
        chi_prime_norm,
        inverse_weight_norm: 1.0 / total.sqrt(),
        total_variation,
    })
}

/// Composite Simpson on equally spaced samples (even number of cells).
fn simpson_samples(v: &[f64], h: f64) -> f64 {
    let n = v.len() - 1;
    v.iter().enumerate().map(|(k, x)| simpson_weight(k, n) * x).sum::<f64>() * h / 3.0
}

/// Which estimate produced a curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundMethod {
    Gps,
    Propa,
    Contrb,
    Contrbprime,
    Power,
    PhiLimit,
    Split,
    Appendix,
    Truth,
}

impl BoundMethod {
    pub fn tag(&self) -> &'static str {
        match self {
            BoundMethod::Gps => "gps",
            BoundMethod::Propa => "propa",
            BoundMethod::Contrb => "contrb",
            BoundMethod::Contrbprime => "contrbprime",
            BoundMethod::Power => "power",
            BoundMethod::PhiLimit => "phi_limit",
            BoundMethod::Split => "split",
            BoundMethod::Appendix => "appendix",
            BoundMethod::Truth => "truth",
        }
    }
}

impl fmt::Display for BoundMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Bound values on a time grid plus the parameters that produced them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCurve {
    pub t: Vec<f64>,
    pub values: Vec<f64>,
    pub method: BoundMethod,
    pub params: BTreeMap<String, String>,
}

impl BoundCurve {
    pub fn new(t: Vec<f64>, values: Vec<f64>, method: BoundMethod) -> Result<Self> {
        if t.len() != values.len() || t.is_empty() {
            return Err(Error::Domain("curve needs matching, nonempty t and value lists".into()));
        }
        if t.iter().any(|x| !(x.is_finite() && *x > 0.0)) && method != BoundMethod::Truth {
            return Err(Error::Domain("curve times must be positive".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("curve times must be strictly ascending".into()));
        }
        if values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Numeric(format!("{method} curve has non-finite or non-positive values")));
        }
        Ok(Self {
            t,
            values,
            method,
            params: BTreeMap::new(),
        })
    }

    pub fn with_param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    /// `max_t truth(t)/bound(t)` on the shared grid; `≤ 1` means domination.
    pub fn max_ratio(&self, truth: &BoundCurve) -> Result<f64> {
        if self.t != truth.t {
            return Err(Error::Domain("curves live on different time grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&truth.values)
            .map(|(b, s)| s / b)
            .fold(0.0, f64::max))
    }

    /// True when every value dominates `truth` up to relative `tol`.
    pub fn dominates(&self, truth: &BoundCurve, tol: f64) -> Result<bool> {
        Ok(self.max_ratio(truth)? <= 1.0 + tol)
    }
}

fn check_times(ts: &[f64]) -> Result<()> {
    if ts.is_empty() || ts.iter().any(|t| !(t.is_finite() && *t > 0.0)) || ts.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("t grid must be positive and strictly ascending".into()));
    }
    Ok(())
}

/// `‖e^{tA}‖` on a grid, evaluated in parallel.
pub fn truth_curve(a: &OperatorMatrix, ts: &[f64]) -> Result<BoundCurve> {
    check_times(ts)?;
    let values: Vec<f64> = ts.par_iter().map(|&t| semigroup_norm(a, t)).collect::<Result<_>>()?;
    BoundCurve::new(ts.to_vec(), values, BoundMethod::Truth)
}

/// [`gps_bound`] with the best split at every `t`.
pub fn gps_curve(r_omega: f64, m: &WeightSpec, omega: f64, ts: &[f64]) -> Result<BoundCurve> {
    check_times(ts)?;
    let mut values = Vec::with_capacity(ts.len());
    let mut splits = Vec::with_capacity(ts.len());
    for &t in ts {
        let (a, v) = optimal_split(r_omega, m, omega, t)?;
        values.push(v);
        splits.push(a / t);
    }
    let all_sym = splits.iter().all(|f| (*f - 0.5).abs() < 1e-12);
    Ok(BoundCurve::new(ts.to_vec(), values, BoundMethod::Gps)?
        .with_param("omega", omega)
        .with_param("r", r_omega)
        .with_param("m", weight_label(m))
        .with_param("split", if all_sym { "t/2".to_string() } else { "optimal".to_string() }))
}

pub fn propa_curve(m_hat: f64, omega_hat: f64, omega: f64, r_omega: f64, ts: &[f64]) -> Result<BoundCurve> {
    check_times(ts)?;
    let c = propa_constant(m_hat, omega_hat, omega, r_omega)?;
    let values = ts.iter().map(|t| c * (omega * t).exp()).collect();
    Ok(BoundCurve::new(ts.to_vec(), values, BoundMethod::Propa)?
        .with_param("M_hat", m_hat)
        .with_param("omega_hat", omega_hat)
        .with_param("omega", omega)
        .with_param("r", r_omega)
        .with_param("M", c))
}

/// How `s` is chosen in the contrb family.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum SChoice {
    Optimal,
    Schedule,
    Fixed(f64),
}

pub fn contrb_curve(
    m_hat: f64,
    omega_hat: f64,
    omega: f64,
    r_omega: f64,
    ts: &[f64],
    choice: SChoice,
) -> Result<BoundCurve> {
    check_times(ts)?;
    let mut values = Vec::with_capacity(ts.len());
    for &t in ts {
        let v = match choice {
            SChoice::Optimal => contrb_optimal(m_hat, omega_hat, omega, r_omega, t)?.1,
            SChoice::Schedule => contrb_bound(m_hat, omega_hat, omega, r_omega, contrb_schedule(t), t)?,
            SChoice::Fixed(s) => contrb_bound(m_hat, omega_hat, omega, r_omega, s, t)?,
        };
        values.push(v);
    }
    let method = if omega == 0.0 && omega_hat == 0.0 {
        BoundMethod::Contrbprime
    } else {
        BoundMethod::Contrb
    };
    Ok(BoundCurve::new(ts.to_vec(), values, method)?
        .with_param("M_hat", m_hat)
        .with_param("omega_hat", omega_hat)
        .with_param("omega", omega)
        .with_param("r", r_omega)
        .with_param("s", s_label(choice)))
}

fn s_label(choice: SChoice) -> String {
    match choice {
        SChoice::Optimal => "optimal".into(),
        SChoice::Schedule => "t/(1+t)".into(),
        SChoice::Fixed(s) => s.to_string(),
    }
}

pub fn contrbprime_curve(m_hat: f64, r0: f64, ts: &[f64], choice: SChoice) -> Result<BoundCurve> {
    contrb_curve(m_hat, 0.0, 0.0, r0, ts, choice)
}

pub fn power_curve(m_hat: f64, r0: f64, alpha: f64, ts: &[f64], optimal: bool) -> Result<BoundCurve> {
    check_times(ts)?;
    let mut values = Vec::with_capacity(ts.len());
    for &t in ts {
        let (_, v) = if optimal {
            power_optimal(m_hat, r0, t, alpha)?
        } else {
            power_scheduled(m_hat, r0, t, alpha)?
        };
        values.push(v);
    }
    Ok(BoundCurve::new(ts.to_vec(), values, BoundMethod::Power)?
        .with_param("M_hat", m_hat)
        .with_param("r0", r0)
        .with_param("alpha", alpha)
        .with_param("N", if optimal { "optimal" } else { "floor(alpha*t)" }))
}

pub fn phi_limit_curve(
    profile: &ResolventProfile,
    omega0: f64,
    epsilon0: f64,
    m: &WeightSpec,
    ts: &[f64],
) -> Result<BoundCurve> {
    check_times(ts)?;
    let values = ts
        .iter()
        .map(|&t| phi_limit_bound(profile, omega0, t, epsilon0, m))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundCurve::new(ts.to_vec(), values, BoundMethod::PhiLimit)?
        .with_param("omega0", omega0)
        .with_param("epsilon0", epsilon0)
        .with_param("m", weight_label(m)))
}

pub fn weight_label(m: &WeightSpec) -> String {
    match m {
        WeightSpec::Exponential { m_hat, omega_hat } => format!("exp({m_hat},{omega_hat})"),
        WeightSpec::Tabulated { grid, horizon, .. } => format!("tabulated({} nodes,T={horizon})", grid.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> WeightSpec {
        WeightSpec::exponential(1.0, 0.0).unwrap()
    }

    #[test]
    fn weight_norm_examples() {
        assert_relative_eq!(weight_norm(&unit(), 0.0, 1.0).unwrap(), 1.0, max_relative = 1e-15);
        let m = WeightSpec::exponential(1.0, -1.0).unwrap();
        let expect = ((1f64.exp().powi(2) - 1.0) / 2.0).sqrt();
        assert_relative_eq!(weight_norm(&m, 0.0, 1.0).unwrap(), expect, max_relative = 1e-14);
        assert!(weight_norm(&m, 0.0, 0.0).is_err());
    }

    #[test]
    fn symmetric_split_denominator() {
        let (mh, wh, w, t) = (1.7, 0.3, -0.4, 3.0);
        let m = WeightSpec::exponential(mh, wh).unwrap();
        let prod = weight_norm(&m, w, t / 2.0).unwrap().powi(2);
        let closed = (1.0 - ((w - wh) * t).exp()) / (2.0 * mh * mh * (wh - w));
        assert_relative_eq!(prod, closed, max_relative = 1e-12);
        let a = weight_norm(&m, w, t / 2.0).unwrap();
        let b = weight_norm(&m, w, t - t / 2.0).unwrap();
        assert_relative_eq!(a * b, closed, max_relative = 1e-12);
        // ω = ω̂ branch: ½ M̂⁻² t.
        let m = WeightSpec::exponential(mh, w).unwrap();
        assert_relative_eq!(weight_norm(&m, w, t / 2.0).unwrap().powi(2), 0.5 * t / (mh * mh), max_relative = 1e-14);
    }

    #[test]
    fn scalar_gps_example() {
        let m = WeightSpec::exponential(1.0, -1.0).unwrap();
        let v = gps_bound(1.0, &m, 0.0, 2.0, 1.0).unwrap();
        assert!((v - 0.31304).abs() < 1e-4);
        assert!(v >= (-2f64).exp());
        assert!(gps_bound(1.0, &m, 0.0, 2.0, 2.0).is_err());
    }

    #[test]
    fn unit_weight_gives_two_over_rt() {
        for &t in &[0.5, 3.0, 10.0] {
            let v = gps_bound(0.7, &unit(), 0.0, t, t / 2.0).unwrap();
            assert_relative_eq!(v, 2.0 / (0.7 * t), max_relative = 1e-13);
        }
    }

    #[test]
    fn optimal_split_is_symmetric_for_exponential_weights() {
        let m = WeightSpec::exponential(2.0, 0.5).unwrap();
        for &t in &[0.3, 2.0, 9.0] {
            let (a, v) = optimal_split(0.4, &m, -0.2, t).unwrap();
            assert!((a - t / 2.0).abs() <= 1e-6 * t);
            let grid_min = (1..1000)
                .map(|k| gps_bound(0.4, &m, -0.2, t, t * k as f64 / 1000.0).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(v <= grid_min * (1.0 + 1e-12));
        }
    }

    #[test]
    fn asymmetric_tabulated_weight_moves_the_split() {
        let m = WeightSpec::tabulate(|s| if s < 2.0 { 4.0 } else { 1.0 }, 4.0, 400).unwrap();
        let t = 4.0;
        let (a, v) = optimal_split(1.0, &m, 0.0, t).unwrap();
        let sym = gps_bound(1.0, &m, 0.0, t, 2.0).unwrap();
        let grid = (1..1000)
            .map(|k| gps_bound(1.0, &m, 0.0, t, t * k as f64 / 1000.0).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(v <= sym);
        assert!(v <= grid * (1.0 + 1e-6));
        assert!((a - 2.0).abs() > 1e-3);
    }

    #[test]
    fn constant_tabulated_weight_splits_symmetrically() {
        let m = WeightSpec::tabulate(|_| 1.0, 10.0, 10).unwrap();
        let (a, _) = optimal_split(1.0, &m, 0.0, 6.0).unwrap();
        assert!((a - 3.0).abs() < 1e-6 * 6.0);
    }

    #[test]
    fn m_new_limits_and_constant() {
        let big = m_new(1.0, 0.0, -0.5, 0.5, 60.0).unwrap() * (0.5f64 * 60.0).exp();
        assert_relative_eq!(big, 2.0, max_relative = 1e-12);
        let small = m_new(1.0, 0.0, -0.5, 0.5, 1e-6).unwrap();
        assert!((small * 1e-6 - 4.0).abs() < 1e-5);
        assert!(m_new(1.0, 0.0, 0.0, 0.5, 1.0).is_err());
        assert_relative_eq!(combined_constant(1.0, 0.0, -0.5, 0.5).unwrap(), 3.0, max_relative = 1e-9);
        assert_eq!(propa_constant(1.0, 0.0, -0.5, 0.5).unwrap(), 3.0);
        assert_relative_eq!(propa_constant(2.5, 0.0, -0.5, 1e12).unwrap(), 2.5, max_relative = 1e-11);
        // For ω̂ ≠ 0 the numerical sup still matches the propa constant.
        assert_relative_eq!(
            combined_constant(1.5, 0.7, -0.1, 0.3).unwrap(),
            propa_constant(1.5, 0.7, -0.1, 0.3).unwrap(),
            max_relative = 1e-9
        );
    }

    #[test]
    fn sup_over_u_grid_identity() {
        let (mh, w, r) = (1.0f64, -0.5f64, 0.5f64);
        let n = 1_000_000;
        let sup = (1..n)
            .map(|k| {
                let u = k as f64 / n as f64;
                (1.0 / u).min(2.0 * mh * w.abs() / (r * (1.0 - u)))
            })
            .fold(0.0, f64::max);
        assert!((sup - (1.0 + 2.0 * mh * w.abs() / r)).abs() < 1e-5);
    }

    #[test]
    fn contrb_reduces_to_propa() {
        for &t in &[0.5, 2.0, 7.0] {
            let c = contrb_bound(1.3, 0.2, -0.4, 0.6, 0.0, t).unwrap();
            let p = propa_constant(1.3, 0.2, -0.4, 0.6).unwrap() * (-0.4 * t).exp();
            assert_relative_eq!(c, p, max_relative = 1e-13);
        }
        assert!(contrb_bound(1.0, 0.0, -0.5, 0.5, 1.0, 1.0).is_err());
        assert!(contrb_bound(1.0, 0.0, -0.5, 0.5, -0.1, 1.0).is_err());
    }

    #[test]
    fn contrb_schedule_rate() {
        // With s = t/(1+t) the bound is O(t) e^{(ω-r)t}.
        let (w, r) = (-0.3, 0.5);
        for &t in &[10.0, 100.0, 1000.0] {
            let ln_v = ln_contrb(1.0, 0.0, w, r, contrb_schedule(t), t);
            let ln_ratio = ln_v - (w - r) * t - f64::ln(t);
            assert!(ln_ratio.abs() < 10f64.ln(), "{ln_ratio}");
        }
        let (_, opt) = contrb_optimal(1.0, 0.0, w, r, 5.0).unwrap();
        assert!(opt <= contrb_bound(1.0, 0.0, w, r, contrb_schedule(5.0), 5.0).unwrap());
    }

    #[test]
    fn contrbprime_formula() {
        let (r, s, t) = (0.8f64, 0.3f64, 2.0f64);
        let expect = ((1.0 - s) + 2.0 * s) / (1.0 - s) * (-s * r * t).exp();
        assert_relative_eq!(contrbprime_bound(1.0, r, s, t).unwrap(), expect, max_relative = 1e-14);
    }

    #[test]
    fn power_examples() {
        assert_relative_eq!(power_bound(1.0, 1.0, 4.0, 1).unwrap(), 0.5);
        assert_relative_eq!(power_bound(1.0, 1.0, 4.0, 2).unwrap(), 1.0);
        assert_eq!(power_optimal(1.0, 1.0, 4.0, 0.25).unwrap(), (1, 0.5));
        let (n, v) = power_scheduled(1.0, 1.0, 40.0, 0.25).unwrap();
        assert_eq!(n, 10);
        assert_relative_eq!(v, 0.5f64.powi(10), max_relative = 1e-14);
    }

    #[test]
    fn phi_limit_polynomial_model() {
        let grid: Vec<f64> = (0..4000).map(|k| 1e-5 * (1e5f64).powf(k as f64 / 3999.0)).collect();
        let p = ResolventProfile::from_exact(grid, |w| w).unwrap();
        for &t in &[10.0, 100.0, 1000.0] {
            let (phi, w) = phi_limit(&p, 0.0, t, 1.0).unwrap();
            assert!((phi - (1.0 + t.ln())).abs() < 1e-4, "{phi}");
            assert!((w * t - 1.0).abs() < 1e-2);
        }
        assert!(phi_limit(&p, 5.0, 10.0, 1.0).is_err());
    }

    #[test]
    fn cutoff_examples() {
        let c = optimal_cutoff(&unit(), 0.0, 1.0, 64).unwrap();
        for (s, x) in c.s.iter().zip(&c.chi) {
            assert!((x - (1.0 - s)).abs() < 1e-14);
        }
        assert!(c.certificate_gap() < 1e-12);
        let m = WeightSpec::exponential(1.0, -1.0).unwrap();
        let c = optimal_cutoff(&m, 0.0, 1.0, 4096).unwrap();
        let e2 = 2f64.exp();
        for (s, x) in c.s.iter().zip(&c.chi) {
            assert!((x - (e2 - (2.0 * s).exp()) / (e2 - 1.0)).abs() < 1e-13);
        }
        assert!(c.certificate_gap() < 1e-6);
        assert!((c.total_variation - 1.0).abs() < 1e-6);
    }
}
