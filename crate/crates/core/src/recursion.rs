//! Extension of a finite-horizon majorant by repeated use of the main bound.
//!
//! With `m(t) = m̃(t)e^{ωt}` and `f̃ = r(ω)/m̃`, the symmetric-split bound
//! gives `f̃(t) = ∫₀^{t/2} f̃(s)² ds` for `t ≥ T`, marched block by block
//! over `[T, 2T)`, `[2T, 4T)`, …. `f̃` grows doubly exponentially, so the
//! march stores `ln f̃`.

use serde::{Deserialize, Serialize};

use crate::bounds::WeightSpec;
use crate::error::{Error, Result};

/// `ln(e^a + e^b)`.
fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Running sum `acc·e^{scale}` kept in linear arithmetic, so sums of
/// moderate binary values stay exact; rescaled only when a term would
/// overflow or underflow.
#[derive(Clone, Copy, Debug)]
struct ScaledSum {
    acc: f64,
    scale: f64,
}

impl ScaledSum {
    const ZERO: Self = Self { acc: 0.0, scale: 0.0 };
    const RANGE: f64 = 600.0;

    /// The sum plus `w(e^{l₀} + e^{l₁})`.
    fn plus(self, w: f64, logs: [f64; 2]) -> Self {
        let top = logs[0].max(logs[1]) + w.ln();
        let mut s = self;
        if top - s.scale > Self::RANGE || (s.acc == 0.0 && top - s.scale < -Self::RANGE) {
            s.acc *= (s.scale - top).exp();
            s.scale = top;
        }
        s.acc += w * ((logs[0] - s.scale).exp() + (logs[1] - s.scale).exp());
        s
    }

    fn ln(self) -> f64 {
        self.acc.ln() + self.scale
    }
}

/// Default number of steps per initial horizon.
pub const DEFAULT_STEPS_PER_HORIZON: usize = 1024;
/// Coarsest admissible resolution `h = T/512`.
pub const MIN_STEPS_PER_HORIZON: usize = 512;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecursionState {
    /// Initial horizon `T`.
    pub horizon: f64,
    pub omega: f64,
    pub r_omega: f64,
    /// Step `h = T/K`.
    pub h: f64,
    /// Steps per horizon `K`.
    pub steps_per_horizon: usize,
    /// `ln f̃(jh)` for `j = 0..`; node `K` holds the recursion value at `T`.
    pub log_f: Vec<f64>,
    /// `ln f̃(T⁻)`, the left limit of the initial data.
    pub log_f_left: f64,
    /// `F(k)` for every dyadic block fully inside the grid.
    pub floors: Vec<f64>,
    pub k0: u32,
}

impl RecursionState {
    pub fn len(&self) -> usize {
        self.log_f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_f.is_empty()
    }

    pub fn t(&self, j: usize) -> f64 {
        j as f64 * self.h
    }

    pub fn t_max(&self) -> f64 {
        self.t(self.log_f.len() - 1)
    }

    pub fn f(&self, j: usize) -> f64 {
        self.log_f[j].exp()
    }

    pub fn log_m(&self, j: usize) -> f64 {
        self.r_omega.ln() - self.log_f[j]
    }

    /// `m̃(jh) = r/f̃(jh)`.
    pub fn m(&self, j: usize) -> f64 {
        self.log_m(j).exp()
    }

    /// `ln(m̃(jh) e^{ωjh})`, the majorant of `ln‖e^{tA}‖`.
    pub fn log_majorant(&self, j: usize) -> f64 {
        self.log_m(j) + self.omega * self.t(j)
    }

    /// Index of the dyadic block containing node `j`: 0 for `[0, T)`, `k`
    /// for `[T2^{k-1}, T2^k)`.
    pub fn block_index(&self, j: usize) -> u32 {
        let k = self.steps_per_horizon;
        if j < k {
            0
        } else {
            (usize::BITS - (j / k).leading_zeros()) as u32
        }
    }

    /// Node index of `t`, if `t` is a grid point.
    pub fn node(&self, t: f64) -> Option<usize> {
        let j = (t / self.h).round();
        if j >= 0.0 && (j * self.h - t).abs() <= 1e-9 * self.h.max(t) && (j as usize) < self.len() {
            Some(j as usize)
        } else {
            None
        }
    }
}

/// Marches the recursion from the majorant `m0` on `[0, T)` up to `t_max`.
pub fn extend_majorant(m0: &WeightSpec, omega: f64, r_omega: f64, t_max: f64, h: f64) -> Result<RecursionState> {
    m0.validate()?;
    let horizon = match m0 {
        WeightSpec::Tabulated { horizon, .. } => *horizon,
        WeightSpec::Exponential { .. } => {
            return Err(Error::Domain("the recursion needs a tabulated majorant with a finite horizon".into()))
        }
    };
    if !(r_omega > 0.0 && r_omega.is_finite()) {
        return Err(Error::Domain(format!("r(omega) = {r_omega} must be positive")));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step h = {h} must be positive")));
    }
    let kf = (horizon / h).round();
    if (kf * h - horizon).abs() > 1e-9 * horizon || (kf as usize) < MIN_STEPS_PER_HORIZON {
        return Err(Error::Domain(format!(
            "step h = {h} must divide T = {horizon} into at least {MIN_STEPS_PER_HORIZON} equal steps"
        )));
    }
    if !(t_max >= horizon) {
        return Err(Error::Domain(format!("t_max = {t_max} must be at least T = {horizon}")));
    }
    let k = kf as usize;
    let h = horizon / k as f64;
    let n = (t_max / h).ceil() as usize;
    let ln_r = r_omega.ln();
    let mut log_f = Vec::with_capacity(n + 1);
    for j in 0..k {
        let t = j as f64 * h;
        log_f.push(ln_r - (m0.eval(t).ln() - omega * t));
    }
    let log_f_left = ln_r - (m0.eval_left(horizon).ln() - omega * horizon);
    let ln2 = std::f64::consts::LN_2;
    // Prefix integrals P_i = ∫₀^{ih} f̃², each piece integrated with values
    // from its own side of the jump at T.
    let mut prefix: Vec<ScaledSum> = Vec::with_capacity(n + 1);
    prefix.push(ScaledSum::ZERO);
    let left = |log_f: &[f64], i: usize| if i == k { log_f_left } else { log_f[i] };
    for i in 0..k {
        let next = prefix[i].plus(0.5 * h, [2.0 * log_f[i], 2.0 * left(&log_f, i + 1)]);
        prefix.push(next);
    }
    for j in k..=n {
        // ∫₀^{jh/2} f̃²; half nodes interpolate f̃ linearly.
        let v = if j % 2 == 0 {
            prefix[j / 2].ln()
        } else {
            let i = j / 2;
            let fi = log_f[i];
            let fnext = left(&log_f, i + 1);
            let mid = log_add(fi, fnext) - ln2;
            prefix[i].plus(0.25 * h, [2.0 * fi, 2.0 * mid]).ln()
        };
        log_f.push(v);
        // P_k already exists, built from the left limit at T.
        if j > k {
            let next = prefix[j - 1].plus(0.5 * h, [2.0 * log_f[j - 1], 2.0 * log_f[j]]);
            prefix.push(next);
        }
    }
    let mut state = RecursionState {
        horizon,
        omega,
        r_omega,
        h,
        steps_per_horizon: k,
        log_f,
        log_f_left,
        floors: Vec::new(),
        k0: 0,
    };
    state.floors = floors_available(&state);
    state.k0 = k0_rule(horizon, state.floors[0])?;
    Ok(state)
}

fn floors_available(state: &RecursionState) -> Vec<f64> {
    let k = state.steps_per_horizon;
    let f0 = state.log_f[..k]
        .iter()
        .copied()
        .fold(state.log_f_left, f64::min)
        .exp();
    let mut out = vec![f0];
    let mut node = k;
    while node < state.len() {
        out.push(state.log_f[node].exp());
        node *= 2;
    }
    out
}

/// `M = max(sup_{[0,T)} m̃, 1/(r ∫₀^{T/2} m̃⁻²)`.
pub fn uniform_constant(state: &RecursionState) -> f64 {
    let k = state.steps_per_horizon;
    let sup_m = state.r_omega / state.floors[0];
    // ∫₀^{T/2} m̃⁻² = f̃(T)/r².
    let second = state.r_omega / state.log_f[k].exp();
    sup_m.max(second)
}

/// `ln F(k)` for `k = 0..=upto`.
pub fn log_dyadic_floors(state: &RecursionState, upto: u32) -> Result<Vec<f64>> {
    let k = state.steps_per_horizon;
    let need = if upto == 0 { 0 } else { k << (upto - 1) };
    if need >= state.len() {
        return Err(Error::Domain(format!(
            "F({upto}) needs t_max >= {}, have {}",
            state.horizon * 2f64.powi(upto as i32 - 1),
            state.t_max()
        )));
    }
    let f0 = state.log_f[..k].iter().copied().fold(state.log_f_left, f64::min);
    let mut out = vec![f0];
    for j in 1..=upto {
        out.push(state.log_f[k << (j - 1)]);
    }
    Ok(out)
}

/// `F(k)` for `k = 0..=upto`: `F(0) = inf_{[0,T)} f̃`, `F(k) = f̃(T2^{k-1})`.
pub fn dyadic_floors(state: &RecursionState, upto: u32) -> Result<Vec<f64>> {
    Ok(log_dyadic_floors(state, upto)?.into_iter().map(f64::exp).collect())
}

/// Result of checking the dyadic chain on a marched state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    /// `k` for which `TF(k+1) ≥ (TF0)² + (TF1)² + 2(TF2)² + … + 2^{k-2}(TF(k-1))²`
    /// failed (for `k = 0` the check is `TF(1) ≥ ½(TF0)²`).
    pub chain_failures: Vec<u32>,
    /// `k ≥ 2` for which `TF(k+1) ≥ 2^{k-2}(TF(k-1))²` failed.
    pub weak_failures: Vec<u32>,
    /// `k ≥ 1` with `F(k+1) < F(k)`.
    pub monotonicity_failures: Vec<u32>,
}

impl ChainReport {
    pub fn ok(&self) -> bool {
        self.chain_failures.is_empty() && self.weak_failures.is_empty() && self.monotonicity_failures.is_empty()
    }
}

/// Checks the dyadic chain up to `F(upto)` with relative slack `rel_slack`.
pub fn check_chain(state: &RecursionState, upto: u32, rel_slack: f64) -> Result<ChainReport> {
    let lf = log_dyadic_floors(state, upto)?;
    let ln_t = state.horizon.ln();
    // ln(T F(k)).
    let l: Vec<f64> = lf.iter().map(|x| x + ln_t).collect();
    let slack = (-rel_slack).ln_1p();
    let mut report = ChainReport {
        chain_failures: Vec::new(),
        weak_failures: Vec::new(),
        monotonicity_failures: Vec::new(),
    };
    for k in 0..upto {
        let lhs = l[k as usize + 1];
        let rhs = if k == 0 {
            2.0 * l[0] - std::f64::consts::LN_2
        } else {
            let mut acc = 2.0 * l[0];
            for j in 1..k {
                acc = log_add(acc, (j as f64 - 1.0) * std::f64::consts::LN_2 + 2.0 * l[j as usize]);
            }
            acc
        };
        if lhs < rhs + slack {
            report.chain_failures.push(k);
        }
        if k >= 2 {
            let weak = (k as f64 - 2.0) * std::f64::consts::LN_2 + 2.0 * l[k as usize - 1];
            if lhs < weak + slack {
                report.weak_failures.push(k);
            }
        }
        if k >= 1 && l[k as usize + 1] < l[k as usize] {
            report.monotonicity_failures.push(k);
        }
    }
    Ok(report)
}

/// Smallest `k₀ ≥ 3` with `2^{k₀} ≥ max(2⁶/(TF₀)⁴, 8)`.
pub fn k0_rule(horizon: f64, f0: f64) -> Result<u32> {
    if !(horizon > 0.0 && f0 > 0.0) {
        return Err(Error::Domain(format!("T = {horizon} and F0 = {f0} must be positive")));
    }
    let target = (64.0 / (horizon * f0).powi(4)).max(8.0);
    let mut k = 3u32;
    while 2f64.powi(k as i32) < target {
        k += 1;
        if k > 4096 {
            return Err(Error::Domain(format!("k0 exceeds 4096 for T F0 = {}", horizon * f0)));
        }
    }
    Ok(k)
}

/// `2^{-(2^{-k₀} t/T)^{1/2}}`, an upper bound on `m̃(t)/(rT)` for
/// `t/T ≥ 2^{k₀-1}`.
pub fn stretched_bound(state: &RecursionState, t: f64) -> Result<f64> {
    let ratio = t / state.horizon;
    let threshold = 2f64.powi(state.k0 as i32 - 1);
    if !(ratio >= threshold) {
        return Err(Error::Domain(format!(
            "t/T = {ratio} is below the validity threshold 2^(k0-1) = {threshold}"
        )));
    }
    Ok(2f64.powf(-(2f64.powi(-(state.k0 as i32)) * ratio).sqrt()))
}

/// `ln(m̃(t)/(rT))` at a grid time.
pub fn log_scaled_majorant(state: &RecursionState, t: f64) -> Result<f64> {
    let j = state
        .node(t)
        .ok_or_else(|| Error::Domain(format!("t = {t} is not a grid point of the march")))?;
    Ok(state.log_m(j) - state.r_omega.ln() - state.horizon.ln())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_state(r: f64, t_max: f64, k: usize) -> RecursionState {
        let m0 = WeightSpec::tabulate(|_| 1.0, 1.0, 8).unwrap();
        extend_majorant(&m0, 0.0, r, t_max, 1.0 / k as f64).unwrap()
    }

    #[test]
    fn first_floors_for_unit_data() {
        let s = unit_state(1.0, 4.0, 1024);
        let f = dyadic_floors(&s, 1).unwrap();
        assert_eq!(f[0], 1.0);
        assert!((f[1] - 0.5).abs() < 1e-15);
        assert_eq!(s.k0, 6);
    }

    #[test]
    fn homogeneity_in_r() {
        let a = unit_state(1.0, 2.0, 512);
        let b = unit_state(2.0, 2.0, 512);
        let k = a.steps_per_horizon;
        assert!((b.f(3) / a.f(3) - 2.0).abs() < 1e-13);
        assert!((b.f(k) / a.f(k) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn uniform_constant_examples() {
        assert!((uniform_constant(&unit_state(1.0, 2.0, 512)) - 2.0).abs() < 1e-12);
        assert!((uniform_constant(&unit_state(2.0, 2.0, 512)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_after_horizon_and_product_identity() {
        let s = unit_state(1.0, 16.0, 512);
        let k = s.steps_per_horizon;
        for j in k + 1..s.len() {
            assert!(s.log_f[j] >= s.log_f[j - 1]);
        }
        for j in (0..s.len()).step_by(97) {
            assert!((s.f(j) * s.m(j) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn k0_examples() {
        assert_eq!(k0_rule(1.0, 1.0).unwrap(), 6);
        assert_eq!(k0_rule(1.0, 2.0).unwrap(), 3);
        assert_eq!(k0_rule(1.0, 1e6).unwrap(), 3);
    }

    #[test]
    fn chain_and_stretched_bound() {
        let s = unit_state(1.0, 256.0, 512);
        let rep = check_chain(&s, 9, 10.0 * s.h).unwrap();
        assert!(rep.ok(), "{rep:?}");
        let b = stretched_bound(&s, 128.0).unwrap();
        assert!((b - 2f64.powf(-2f64.sqrt())).abs() < 1e-15);
        assert!(log_scaled_majorant(&s, 128.0).unwrap() <= (b * (1.0 + 1e-3)).ln());
        let th = stretched_bound(&s, 32.0).unwrap();
        assert!((th - 2f64.powf(-std::f64::consts::FRAC_1_SQRT_2)).abs() < 1e-15);
        assert!(stretched_bound(&s, 16.0).is_err());
        assert!(dyadic_floors(&s, 12).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        let m0 = WeightSpec::tabulate(|_| 1.0, 1.0, 8).unwrap();
        assert!(extend_majorant(&m0, 0.0, 1.0, 4.0, 1.0 / 100.0).is_err());
        assert!(extend_majorant(&m0, 0.0, 0.0, 4.0, 1.0 / 1024.0).is_err());
        let e = WeightSpec::exponential(1.0, 0.0).unwrap();
        assert!(extend_majorant(&e, 0.0, 1.0, 4.0, 1.0 / 1024.0).is_err());
    }
}
