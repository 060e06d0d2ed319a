//! Certified enclosures of `r(ω) = 1/sup_{Re z ≥ ω} ‖(z - A)⁻¹‖`.
//!
//! For a matrix the supremum over the closed half-plane is attained on the
//! boundary line once the half-plane is free of spectrum, so `r(ω)` is the
//! infimum of `s(y) = σ_min((ω + iy)I - A)` over `y ∈ ℝ`. The infimum is
//! certified by branch and bound on `y`, using three lower bounds on each
//! interval:
//!
//! * `s` is 1-Lipschitz;
//! * `s(y)² - y²` is concave in `y` (it is the smallest eigenvalue of a
//!   Hermitian matrix affine in `y`), so on an interval it lies above its chord;
//! * `s(y)` dominates the distance from `ω + iy` to the numerical range.
//!
//! Outside the window `|y| ≤ Y` the tail is bounded below by
//! `|z| - ‖A‖` and by the numerical-range distance.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, resolvent_norm, semigroup_norm, OperatorMatrix, ShiftedSolver, C64};

/// Default target for `r_hi / r_lo - 1`.
pub const DEFAULT_REL_WIDTH: f64 = 1e-4;

/// Enclosure `[lo, hi]` of an infimum together with where it was found.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifiedInterval {
    pub lo: f64,
    pub hi: f64,
    /// Abscissa `y` of the best sample (smallest `|y|` on ties).
    pub argmin_y: f64,
    /// Final half-window `Y`.
    pub window_y: f64,
    pub evaluations: usize,
}

impl CertifiedInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SweepOptions {
    pub rel_width: f64,
    /// Cap on `σ_min` evaluations per window.
    pub max_evaluations: usize,
    /// Number of initial samples spread over the window.
    pub seeds: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            rel_width: DEFAULT_REL_WIDTH,
            max_evaluations: 50_000,
            seeds: 64,
        }
    }
}

impl SweepOptions {
    pub fn with_rel_width(rel_width: f64) -> Self {
        Self {
            rel_width,
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    lower: f64,
    ya: f64,
    yb: f64,
    sa: f64,
    sb: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    // Reversed so that `BinaryHeap` pops the smallest lower bound first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lower
            .total_cmp(&self.lower)
            .then(other.ya.total_cmp(&self.ya))
    }
}

/// Reusable sweep state for one operator: the shifted solver, a numerical
/// range box and a lazily computed spectrum.
pub struct Sweeper<'a> {
    solver: ShiftedSolver<'a>,
    symmetric: bool,
    spectrum: OnceLock<Result<Vec<C64>>>,
}

impl<'a> Sweeper<'a> {
    pub fn new(a: &'a OperatorMatrix) -> Self {
        Self {
            solver: ShiftedSolver::new(a),
            symmetric: a.is_real(),
            spectrum: OnceLock::new(),
        }
    }

    /// As [`Sweeper::new`] with eigenvalues computed elsewhere; they are
    /// re-sorted by decreasing real part.
    pub fn with_spectrum(a: &'a OperatorMatrix, mut spectrum: Vec<C64>) -> Self {
        spectrum.sort_by(|p, q| q.re.total_cmp(&p.re).then(q.im.total_cmp(&p.im)));
        let s = Self::new(a);
        let _ = s.spectrum.set(Ok(spectrum));
        s
    }

    pub fn operator(&self) -> &OperatorMatrix {
        self.solver.operator()
    }

    pub fn solver(&self) -> &ShiftedSolver<'a> {
        &self.solver
    }

    /// Eigenvalues, sorted by decreasing real part.
    pub fn spectrum(&self) -> Result<&[C64]> {
        match self.spectrum.get_or_init(|| eigenvalues(self.solver.operator())) {
            Ok(v) => Ok(v),
            Err(e) => Err(Error::Numeric(format!("eigenvalues unavailable: {e}"))),
        }
    }

    fn gap_tolerance(&self) -> f64 {
        1e-6 * (1.0 + self.solver.norm_upper())
    }

    /// Errors if some eigenvalue has `Re λ ≥ ω`.
    pub fn check_half_plane(&self, omega: f64) -> Result<()> {
        // Nothing can lie right of the numerical range.
        if omega > self.solver.range_box().re_hi {
            return Ok(());
        }
        let lead = self.spectrum()?[0];
        if lead.re >= omega {
            return Err(Error::SpectrumInHalfPlane { eigenvalue: lead, omega });
        }
        Ok(())
    }

    /// Errors if some eigenvalue lies within the gap tolerance of `Re z = ω`.
    pub fn check_line(&self, omega: f64) -> Result<()> {
        let b = self.solver.range_box();
        if omega > b.re_hi || omega < b.re_lo {
            return Ok(());
        }
        let tol = self.gap_tolerance();
        if let Some(l) = self.spectrum()?.iter().find(|l| (l.re - omega).abs() < tol) {
            return Err(Error::Hypothesis(format!(
                "eigenvalue {l} lies on the line Re z = {omega} (tolerance {tol:.1e})"
            )));
        }
        Ok(())
    }

    /// `r(ω)` over the closed half-plane `Re z ≥ ω`.
    pub fn r_of_omega(&self, omega: f64, opts: &SweepOptions) -> Result<CertifiedInterval> {
        check_rel_width(opts.rel_width)?;
        self.check_half_plane(omega)?;
        self.line_infimum(omega, opts)
    }

    /// `1/sup_{Re z = ω}‖(z - A)⁻¹‖`, the line-only version used for spectral
    /// splittings where spectrum may lie right of the line.
    pub fn r_on_line(&self, omega: f64, opts: &SweepOptions) -> Result<CertifiedInterval> {
        check_rel_width(opts.rel_width)?;
        self.check_line(omega)?;
        self.line_infimum(omega, opts)
    }

    fn eval(&self, omega: f64, y: f64) -> Result<f64> {
        self.solver.sigma_min(C64::new(omega, y))
    }

    fn tail_lower(&self, omega: f64, y: f64) -> f64 {
        let b = self.solver.range_box();
        let norm = (omega.hypot(y) - self.solver.norm_upper()).max(0.0);
        let mut boxed = b.distance_to_segment(omega, y, f64::INFINITY);
        if !self.symmetric {
            boxed = boxed.min(b.distance_to_segment(omega, f64::NEG_INFINITY, -y));
        }
        norm.max(boxed)
    }

    fn cell(&self, omega: f64, ya: f64, yb: f64, sa: f64, sb: f64) -> Cell {
        let len = yb - ya;
        let lipschitz = 0.5 * (sa + sb - len);
        // Local coordinate u ∈ [-len/2, len/2]; g(u) = s² - u² is concave.
        let ga = sa * sa - 0.25 * len * len;
        let gb = sb * sb - 0.25 * len * len;
        let avg = 0.5 * (ga + gb);
        let diff = gb - ga;
        let u = (-diff / (2.0 * len)).clamp(-0.5 * len, 0.5 * len);
        let q = u * u + avg + diff * u / len;
        let concave = q.max(0.0).sqrt();
        let boxed = self.solver.range_box().distance_to_segment(omega, ya, yb);
        Cell {
            lower: lipschitz.max(concave).max(boxed).max(0.0),
            ya,
            yb,
            sa,
            sb,
        }
    }

    fn line_infimum(&self, omega: f64, opts: &SweepOptions) -> Result<CertifiedInterval> {
        if !omega.is_finite() {
            return Err(Error::Domain(format!("omega = {omega} is not finite")));
        }
        let mut window = omega.abs() + 2.0 * (1.0 + self.solver.norm_upper());
        for _ in 0..64 {
            let res = self.sweep_window(omega, window, opts)?;
            if self.tail_lower(omega, window) >= res.hi {
                return Ok(res);
            }
            window *= 2.0;
        }
        Err(Error::IterationCap(format!(
            "sweep window kept growing at omega = {omega}"
        )))
    }

    fn sweep_window(&self, omega: f64, window: f64, opts: &SweepOptions) -> Result<CertifiedInterval> {
        let y_lo = if self.symmetric { 0.0 } else { -window };
        let b = self.solver.range_box();
        // Seed densely where the numerical range lives, sparsely elsewhere.
        let mut ys = vec![y_lo, window, 0.0];
        let (c_lo, c_hi) = ((b.im_lo - 1.0).max(y_lo), (b.im_hi + 1.0).min(window));
        if c_hi > c_lo {
            let k = opts.seeds.max(2);
            ys.extend((0..=k).map(|i| c_lo + (c_hi - c_lo) * i as f64 / k as f64));
        }
        ys.sort_by(f64::total_cmp);
        ys.dedup();

        let vals: Vec<f64> = ys
            .iter()
            .map(|&y| self.eval(omega, y))
            .collect::<Result<_>>()?;
        let mut evaluations = ys.len();
        let mut best = f64::INFINITY;
        let mut arg = 0.0;
        let consider = |y: f64, s: f64, best: &mut f64, arg: &mut f64| {
            if s < *best || (s == *best && y.abs() < arg.abs()) {
                *best = s;
                *arg = y;
            }
        };
        for (&y, &s) in ys.iter().zip(&vals) {
            consider(y, s, &mut best, &mut arg);
        }
        let mut heap = BinaryHeap::new();
        for i in 0..ys.len() - 1 {
            heap.push(self.cell(omega, ys[i], ys[i + 1], vals[i], vals[i + 1]));
        }
        let target = 1.0 + opts.rel_width;
        loop {
            let top = match heap.pop() {
                Some(c) => c,
                None => {
                    return Ok(CertifiedInterval {
                        lo: best,
                        hi: best,
                        argmin_y: arg,
                        window_y: window,
                        evaluations,
                    })
                }
            };
            if top.lower * target >= best {
                return Ok(CertifiedInterval {
                    lo: top.lower.min(best),
                    hi: best,
                    argmin_y: arg,
                    window_y: window,
                    evaluations,
                });
            }
            if evaluations >= opts.max_evaluations {
                return Err(Error::IterationCap(format!(
                    "r({omega}) sweep used {evaluations} evaluations; enclosure [{:.6e}, {best:.6e}]",
                    top.lower
                )));
            }
            let ym = 0.5 * (top.ya + top.yb);
            if ym <= top.ya || ym >= top.yb {
                // Interval at machine resolution; its endpoints bound the infimum.
                let lo = top.sa.min(top.sb) - (top.yb - top.ya);
                heap.push(Cell { lower: lo.max(0.0).max(best / target), ..top });
                continue;
            }
            let sm = self.eval(omega, ym)?;
            evaluations += 1;
            consider(ym, sm, &mut best, &mut arg);
            heap.push(self.cell(omega, top.ya, ym, top.sa, sm));
            heap.push(self.cell(omega, ym, top.yb, sm, top.sb));
        }
    }
}

fn check_rel_width(rel_width: f64) -> Result<()> {
    if !(rel_width > 0.0 && rel_width <= 0.5) {
        return Err(Error::Domain(format!("rel_width = {rel_width} must lie in (0, 0.5]")));
    }
    Ok(())
}

/// Certified enclosure of `r(ω)` for the half-plane `Re z ≥ ω`.
pub fn r_of_omega(a: &OperatorMatrix, omega: f64, rel_width: f64) -> Result<CertifiedInterval> {
    Sweeper::new(a).r_of_omega(omega, &SweepOptions::with_rel_width(rel_width))
}

/// Lower bound `r(ω) - (ω - ω')` on `r(ω')`, valid for `ω' ∈ (ω - r(ω), ω]`.
pub fn lipschitz_extend(r_at_omega: f64, omega: f64, omega_prime: f64) -> Result<f64> {
    if !(r_at_omega > 0.0) {
        return Err(Error::Domain(format!("r(omega) = {r_at_omega} must be positive")));
    }
    if omega_prime > omega || omega_prime <= omega - r_at_omega {
        return Err(Error::Domain(format!(
            "omega' = {omega_prime} must lie in ({}, {omega}]",
            omega - r_at_omega
        )));
    }
    Ok(r_at_omega - (omega - omega_prime))
}

/// Growth abscissa estimate: the spectral abscissa, after checking that the
/// profile is positive and nondecreasing at the probes.
pub fn omega0_estimate(a: &OperatorMatrix, probe_omegas: &[f64]) -> Result<f64> {
    let sweeper = Sweeper::new(a);
    let abscissa = sweeper.spectrum()?[0].re;
    let mut probes = probe_omegas.to_vec();
    probes.sort_by(f64::total_cmp);
    if let Some(&p) = probes.first() {
        if p <= abscissa {
            return Err(Error::Domain(format!(
                "probe omega = {p} is not right of the spectral abscissa {abscissa}"
            )));
        }
    }
    let opts = SweepOptions::default();
    let mut prev: Option<CertifiedInterval> = None;
    for &w in &probes {
        let r = sweeper.line_infimum(w, &opts)?;
        if r.lo <= 0.0 {
            return Err(Error::Numeric(format!("r({w}) is not positive")));
        }
        if let Some(p) = prev {
            if r.hi < p.lo {
                return Err(Error::Numeric(format!("r decreases between probes near omega = {w}")));
            }
        }
        prev = Some(r);
    }
    Ok(abscissa)
}

/// Certified values of `r` on an ascending grid of `ω`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventProfile {
    pub omega_grid: Vec<f64>,
    pub r_lo: Vec<f64>,
    pub r_hi: Vec<f64>,
    pub argmin_y: Vec<f64>,
    pub window_y: Vec<f64>,
    /// Largest certification width `r_hi - r_lo` on the grid.
    pub grid_resolution: f64,
}

impl ResolventProfile {
    /// Profile with exact values `r(ω)`, used for model studies.
    pub fn from_exact(omega_grid: Vec<f64>, r: impl Fn(f64) -> f64) -> Result<Self> {
        check_ascending(&omega_grid)?;
        let vals: Vec<f64> = omega_grid.iter().map(|&w| r(w)).collect();
        if vals.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Domain("profile values must be finite and non-negative".into()));
        }
        let n = omega_grid.len();
        Ok(Self {
            omega_grid,
            r_lo: vals.clone(),
            r_hi: vals,
            argmin_y: vec![0.0; n],
            window_y: vec![0.0; n],
            grid_resolution: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.omega_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_grid.is_empty()
    }

    /// Lower and upper slope bounds between consecutive grid points.
    pub fn slopes(&self) -> Vec<(f64, f64)> {
        (1..self.len())
            .map(|k| {
                let dw = self.omega_grid[k] - self.omega_grid[k - 1];
                (
                    (self.r_lo[k] - self.r_hi[k - 1]) / dw,
                    (self.r_hi[k] - self.r_lo[k - 1]) / dw,
                )
            })
            .collect()
    }

    /// Checks that the profile is compatible with a nondecreasing,
    /// 1-Lipschitz `r`: some slope in `[0, 1]` fits every enclosure pair.
    pub fn check_slopes(&self, tol: f64) -> Result<()> {
        for (k, (lo, hi)) in self.slopes().into_iter().enumerate() {
            if hi < -tol || lo > 1.0 + tol {
                return Err(Error::Numeric(format!(
                    "profile slope between omega = {} and {} lies in [{lo}, {hi}], outside [0, 1]",
                    self.omega_grid[k],
                    self.omega_grid[k + 1]
                )));
            }
        }
        Ok(())
    }
}

fn check_ascending(grid: &[f64]) -> Result<()> {
    if grid.iter().any(|w| !w.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("omega grid must be finite and strictly ascending".into()));
    }
    Ok(())
}

/// `r(ω)` on a grid, each point swept independently (in parallel).
pub fn profile(a: &OperatorMatrix, omega_grid: &[f64], rel_width: f64) -> Result<ResolventProfile> {
    profile_with(&Sweeper::new(a), omega_grid, &SweepOptions::with_rel_width(rel_width))
}

pub fn profile_with(sweeper: &Sweeper<'_>, omega_grid: &[f64], opts: &SweepOptions) -> Result<ResolventProfile> {
    check_ascending(omega_grid)?;
    check_rel_width(opts.rel_width)?;
    if let Some(&w) = omega_grid.first() {
        sweeper.check_half_plane(w)?;
    }
    let pts: Vec<CertifiedInterval> = omega_grid
        .par_iter()
        .map(|&w| sweeper.line_infimum(w, opts))
        .collect::<Result<_>>()?;
    let out = ResolventProfile {
        omega_grid: omega_grid.to_vec(),
        r_lo: pts.iter().map(|p| p.lo).collect(),
        r_hi: pts.iter().map(|p| p.hi).collect(),
        argmin_y: pts.iter().map(|p| p.argmin_y).collect(),
        window_y: pts.iter().map(|p| p.window_y).collect(),
        grid_resolution: pts.iter().map(|p| p.width()).fold(0.0, f64::max),
    };
    out.check_slopes(1e-9)?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HilleYosidaSample {
    pub at: f64,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Both sides of the `P(1, ω)` equivalence checked on samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HilleYosidaReport {
    pub omega: f64,
    /// `‖(λ - A)⁻¹‖` against `1/(λ - ω)`.
    pub resolvent: Vec<HilleYosidaSample>,
    /// `‖e^{tA}‖` against `e^{ωt}`.
    pub semigroup: Vec<HilleYosidaSample>,
}

impl HilleYosidaReport {
    pub fn resolvent_ok(&self) -> bool {
        self.resolvent.iter().all(|s| s.pass)
    }

    pub fn semigroup_ok(&self) -> bool {
        self.semigroup.iter().all(|s| s.pass)
    }

    /// The two sides agree, as they must for a generator.
    pub fn consistent(&self) -> bool {
        self.resolvent_ok() == self.semigroup_ok()
    }
}

/// Times at which the semigroup side of the check is sampled.
pub const HILLE_YOSIDA_TIMES: [f64; 8] = [0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

pub fn hille_yosida_check(a: &OperatorMatrix, omega: f64, lambda_grid: &[f64]) -> Result<HilleYosidaReport> {
    const SLACK: f64 = 1e-12;
    let mut resolvent = Vec::with_capacity(lambda_grid.len());
    for &l in lambda_grid {
        if l <= omega {
            return Err(Error::Domain(format!("lambda = {l} must exceed omega = {omega}")));
        }
        let value = resolvent_norm(a, C64::new(l, 0.0))?;
        let bound = 1.0 / (l - omega);
        resolvent.push(HilleYosidaSample {
            at: l,
            value,
            bound,
            pass: value <= bound * (1.0 + SLACK),
        });
    }
    let semigroup = HILLE_YOSIDA_TIMES
        .iter()
        .map(|&t| {
            let value = semigroup_norm(a, t)?;
            let bound = (omega * t).exp();
            Ok(HilleYosidaSample {
                at: t,
                value,
                bound,
                pass: value <= bound * (1.0 + SLACK),
            })
        })
        .collect::<Result<_>>()?;
    Ok(HilleYosidaReport {
        omega,
        resolvent,
        semigroup,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;
    use crate::linalg::sigma_min;

    fn jordan() -> OperatorMatrix {
        gallery::build_jordan(2, C64::new(-1.0, 0.0)).unwrap()
    }

    #[test]
    fn scalar_profile_value() {
        let a = OperatorMatrix::scalar(C64::new(-1.0, 0.0));
        let r = r_of_omega(&a, 0.0, 1e-4).unwrap();
        assert!(r.contains(1.0), "{r:?}");
        assert!(r.hi / r.lo <= 1.0 + 1e-4);
    }

    #[test]
    fn diagonal_profile_value() {
        let a = OperatorMatrix::real_diagonal(&[-1.0, -5.0]).unwrap();
        let r = r_of_omega(&a, -0.5, 1e-4).unwrap();
        assert!(r.contains(0.5), "{r:?}");
        assert_eq!(r.argmin_y, 0.0);
    }

    #[test]
    fn jordan_matches_brute_force() {
        let a = jordan();
        let mut brute = f64::INFINITY;
        let mut y = -10.0;
        while y <= 10.0 {
            brute = brute.min(sigma_min(&a, C64::new(0.0, y)).unwrap());
            y += 1e-3;
        }
        let r = r_of_omega(&a, 0.0, 1e-4).unwrap();
        assert!(r.lo <= brute * (1.0 + 1e-12) && brute <= r.hi * (1.0 + 1e-4));
        assert!((r.hi - 0.618_033_988_749_895).abs() < 1e-4);
    }

    #[test]
    fn complex_matrix_sweeps_both_sides() {
        // Eigenvalue close to the line at negative imaginary part only.
        let a = OperatorMatrix::diagonal(&[C64::new(-0.2, -3.0), C64::new(-1.0, 2.0)]).unwrap();
        let r = r_of_omega(&a, 0.0, 1e-5).unwrap();
        assert!(r.contains(0.2), "{r:?}");
        assert!((r.argmin_y + 3.0).abs() < 1e-3);
    }

    #[test]
    fn spectrum_in_half_plane_is_rejected() {
        let a = OperatorMatrix::real_diagonal(&[-1.0, 0.5]).unwrap();
        assert!(matches!(r_of_omega(&a, 0.0, 1e-4), Err(Error::SpectrumInHalfPlane { .. })));
        assert!(r_of_omega(&a, 1.0, 0.0).is_err());
    }

    #[test]
    fn lipschitz_extension() {
        assert_eq!(lipschitz_extend(1.0, 0.0, 0.0).unwrap(), 1.0);
        assert_eq!(lipschitz_extend(1.0, 0.0, -0.5).unwrap(), 0.5);
        assert!(lipschitz_extend(1.0, 0.0, -1.0).is_err());
        let a = jordan();
        let r0 = r_of_omega(&a, 0.0, 1e-6).unwrap();
        let ext = lipschitz_extend(r0.lo, 0.0, -0.25).unwrap();
        let direct = r_of_omega(&a, -0.25, 1e-6).unwrap();
        assert!((ext - 0.368).abs() < 1e-3);
        assert!(direct.hi >= ext - 1e-9);
    }

    #[test]
    fn omega0_is_spectral_abscissa() {
        let d = OperatorMatrix::real_diagonal(&[-1.0, -5.0]).unwrap();
        assert_eq!(omega0_estimate(&d, &[-0.5, 0.0]).unwrap(), -1.0);
        assert!((omega0_estimate(&jordan(), &[-0.5, 0.0]).unwrap() + 1.0).abs() < 1e-7);
        assert!(omega0_estimate(&d, &[-2.0]).is_err());
        let dav = gallery::build_davies_oscillator(&gallery::DiscretizationSpec::new(200, 10.0).unwrap()).unwrap();
        let w0 = omega0_estimate(&dav, &[-0.5]).unwrap();
        assert!((w0 + std::f64::consts::FRAC_1_SQRT_2).abs() < 0.01 * std::f64::consts::FRAC_1_SQRT_2);
    }

    #[test]
    fn scalar_profile_and_slopes() {
        let a = OperatorMatrix::scalar(C64::new(-1.0, 0.0));
        let p = profile(&a, &[-0.5, 0.0, 0.5], 1e-6).unwrap();
        for (k, expect) in [0.5, 1.0, 1.5].iter().enumerate() {
            assert!(p.r_lo[k] <= *expect && *expect <= p.r_hi[k]);
        }
        for (lo, hi) in p.slopes() {
            assert!(lo <= 1.0 && hi >= 1.0 && hi <= 1.0 + 1e-5);
        }
    }

    #[test]
    fn jordan_profile_consistent_with_extension() {
        let p = profile(&jordan(), &[-0.5, 0.0], 1e-6).unwrap();
        assert!(p.r_hi[0] >= p.r_lo[1] - 0.5);
    }

    #[test]
    fn hille_yosida_reports() {
        let s = OperatorMatrix::scalar(C64::new(-1.0, 0.0));
        let rep = hille_yosida_check(&s, -1.0, &[0.0, 1.0, 2.0]).unwrap();
        assert!(rep.resolvent_ok() && rep.semigroup_ok());
        let d = OperatorMatrix::real_diagonal(&[-1.0, -5.0]).unwrap();
        assert!(hille_yosida_check(&d, -1.0, &[0.0, 1.0, 2.0]).unwrap().resolvent_ok());
        let rep = hille_yosida_check(&jordan(), -1.0, &[0.0, 1.0, 2.0]).unwrap();
        assert!(!rep.resolvent_ok());
        assert!(!rep.semigroup_ok());
        assert!(rep.consistent());
    }
}
