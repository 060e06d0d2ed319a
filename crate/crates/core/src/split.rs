//! Riesz projections `Π₊ = (2πi)⁻¹∮(z - A)⁻¹dz` and the bound on the
//! remainder `R(t) = e^{tA}(I - Π₊)`.

use std::f64::consts::PI;

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{gps_bound, optimal_split, WeightSpec};
use crate::error::{Error, Result};
use crate::linalg::{norm2, semigroup_matrix, OperatorMatrix, C64};
use crate::resolvent::{CertifiedInterval, SweepOptions, Sweeper};

pub const DEFAULT_NODES: usize = 256;

/// Closed integration path.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Contour {
    Circle { center: C64, radius: f64 },
    /// Axis-aligned rectangle with opposite corners `lo` and `hi`.
    Rectangle { lo: C64, hi: C64 },
}

impl Contour {
    pub fn contains(&self, z: C64) -> bool {
        match self {
            Contour::Circle { center, radius } => (z - center).norm() < *radius,
            Contour::Rectangle { lo, hi } => z.re > lo.re && z.re < hi.re && z.im > lo.im && z.im < hi.im,
        }
    }

    /// Distance from `z` to the path.
    pub fn distance(&self, z: C64) -> f64 {
        match self {
            Contour::Circle { center, radius } => ((z - center).norm() - radius).abs(),
            Contour::Rectangle { lo, hi } => {
                let dx = (lo.re - z.re).max(z.re - hi.re);
                let dy = (lo.im - z.im).max(z.im - hi.im);
                if dx <= 0.0 && dy <= 0.0 {
                    (-dx).min(-dy)
                } else {
                    dx.max(0.0).hypot(dy.max(0.0))
                }
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Contour::Circle { center, radius } => center.re.is_finite() && center.im.is_finite() && *radius > 0.0 && radius.is_finite(),
            Contour::Rectangle { lo, hi } => hi.re > lo.re && hi.im > lo.im && lo.re.is_finite() && hi.re.is_finite() && lo.im.is_finite() && hi.im.is_finite(),
        };
        if !ok {
            return Err(Error::Domain(format!("degenerate contour {self:?}")));
        }
        Ok(())
    }

    /// Quadrature nodes `z_k` and weights `w_k` with
    /// `(2πi)⁻¹∮f ≈ Σ w_k f(z_k)`.
    fn rule(&self, nodes: usize) -> Vec<(C64, C64)> {
        match self {
            Contour::Circle { center, radius } => (0..nodes)
                .map(|k| {
                    let e = C64::from_polar(1.0, 2.0 * PI * k as f64 / nodes as f64);
                    (center + e * *radius, e * (*radius / nodes as f64))
                })
                .collect(),
            Contour::Rectangle { lo, hi } => {
                let corners = [*lo, C64::new(hi.re, lo.im), *hi, C64::new(lo.re, hi.im)];
                let (x, w) = gauss_legendre(GL_ORDER);
                // panels proportional to side length
                let panels = (nodes / GL_ORDER).max(4) as f64;
                let perimeter = 2.0 * ((hi.re - lo.re) + (hi.im - lo.im));
                let mut out = Vec::with_capacity(nodes + 4 * GL_ORDER);
                let scale = C64::new(0.0, -1.0 / (2.0 * PI));
                for s in 0..4 {
                    let (p, q) = (corners[s], corners[(s + 1) % 4]);
                    let per_side = ((panels * (q - p).norm() / perimeter).round() as usize).max(1);
                    let step = (q - p) / per_side as f64;
                    for panel in 0..per_side {
                        let base = p + step * panel as f64;
                        for (xi, wi) in x.iter().zip(&w) {
                            let z = base + step * (0.5 * (xi + 1.0));
                            out.push((z, scale * step * (0.5 * wi)));
                        }
                    }
                }
                out
            }
        }
    }
}

const GL_ORDER: usize = 16;

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// The projector `Π₊`, the enclosed eigenvalues and validation residuals.
#[derive(Clone, Debug)]
pub struct SpectralSplit {
    pub projector: OperatorMatrix,
    /// `‖I - Π₊‖`.
    pub complement_norm: f64,
    pub sigma_plus: Vec<C64>,
    pub contour: Contour,
    pub nodes: usize,
    /// `‖Π₊² - Π₊‖`.
    pub idempotency_residual: f64,
    /// `‖AΠ₊ - Π₊A‖`.
    pub commutation_residual: f64,
    pub trace: C64,
}

impl SpectralSplit {
    pub fn complement(&self) -> Mat<C64> {
        let p = self.projector.mat();
        let n = p.nrows();
        Mat::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) } - p[(i, j)])
    }
}

/// Pairwise summation of matrices, giving an order independent of threading.
fn pairwise_sum(mut terms: Vec<Mat<C64>>) -> Mat<C64> {
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(&a + &b),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop().expect("at least one term")
}

/// Π₊ for the eigenvalues inside `contour`, by trapezoidal (circle) or
/// Gauss–Legendre (rectangle) quadrature.
pub fn riesz_projection(a: &OperatorMatrix, contour: &Contour, nodes: usize) -> Result<SpectralSplit> {
    riesz_projection_with(&Sweeper::new(a), contour, nodes)
}

pub fn riesz_projection_with(sweeper: &Sweeper<'_>, contour: &Contour, nodes: usize) -> Result<SpectralSplit> {
    contour.validate()?;
    if nodes < 8 {
        return Err(Error::Domain(format!("need at least 8 contour nodes, got {nodes}")));
    }
    let a = sweeper.operator();
    let solver = sweeper.solver();
    let scale = 1.0 + solver.norm_upper();
    let spectrum = sweeper.spectrum()?;
    let tol = 1e-6 * scale;
    if let Some(l) = spectrum.iter().find(|l| contour.distance(**l) <= tol) {
        return Err(Error::Conditioning(format!(
            "eigenvalue {l} is within {:.2e} of the contour",
            contour.distance(*l)
        )));
    }
    let sigma_plus: Vec<C64> = spectrum.iter().copied().filter(|l| contour.contains(*l)).collect();
    let rule = contour.rule(nodes);
    let terms: Vec<Mat<C64>> = rule
        .par_iter()
        .map(|&(z, w)| {
            let r = solver.resolvent_matrix(z)?;
            Ok(Mat::from_fn(r.nrows(), r.ncols(), |i, j| r[(i, j)] * w))
        })
        .collect::<Result<_>>()?;
    let p = pairwise_sum(terms);
    let n = a.dim();
    let pp = &p * &p;
    let pnorm = norm2(&p);
    let idempotency_residual = norm2(&(&pp - &p));
    let commutation_residual = norm2(&(&(a.mat() * &p) - &(&p * a.mat())));
    let trace: C64 = (0..n).map(|i| p[(i, i)]).sum();
    let nearest = trace.re.round();
    if (trace - C64::new(nearest, 0.0)).norm() > 1e-6 || nearest as usize != sigma_plus.len() {
        return Err(Error::Quadrature(format!(
            "trace of the projector is {trace}, expected {}; increase the node count ({nodes})",
            sigma_plus.len()
        )));
    }
    if idempotency_residual > 1e-8 * (1.0 + pnorm * pnorm) {
        return Err(Error::Quadrature(format!(
            "projector is not idempotent: residual {idempotency_residual:.3e}"
        )));
    }
    let anorm = a.norm2();
    if commutation_residual > 1e-8 * anorm * (1.0 + pnorm) {
        return Err(Error::Quadrature(format!(
            "projector does not commute with A: residual {commutation_residual:.3e}"
        )));
    }
    // σ₊ = σ(A) or ∅: the projector is exactly I or 0, drop the quadrature noise
    let p = if sigma_plus.len() == n {
        Mat::identity(n, n)
    } else if sigma_plus.is_empty() {
        Mat::zeros(n, n)
    } else {
        p
    };
    let projector = OperatorMatrix::from_mat(p)?.with_label("Riesz projector");
    let mut out = SpectralSplit {
        projector,
        complement_norm: 0.0,
        sigma_plus,
        contour: contour.clone(),
        nodes,
        idempotency_residual,
        commutation_residual,
        trace,
    };
    out.complement_norm = norm2(&out.complement());
    Ok(out)
}

/// Circle around the eigenvalues with `Re λ > ω̃`: centred at their centroid,
/// radius `1.25·max distance`, shrunk when needed to exclude the rest.
pub fn auto_contour(a: &OperatorMatrix, omega_tilde: f64) -> Result<Contour> {
    auto_contour_with(&Sweeper::new(a), omega_tilde)
}

pub fn auto_contour_with(sweeper: &Sweeper<'_>, omega_tilde: f64) -> Result<Contour> {
    sweeper.check_line(omega_tilde)?;
    let spectrum = sweeper.spectrum()?;
    let (plus, rest): (Vec<C64>, Vec<C64>) = spectrum.iter().partition(|l| l.re > omega_tilde);
    if plus.is_empty() {
        return Err(Error::Hypothesis(format!("no eigenvalue lies right of Re z = {omega_tilde}")));
    }
    let center = plus.iter().sum::<C64>() / plus.len() as f64;
    let spread = plus.iter().map(|l| (l - center).norm()).fold(0.0, f64::max);
    let other = rest.iter().map(|l| (l - center).norm()).fold(f64::INFINITY, f64::min);
    let scale = 1.0 + sweeper.solver().norm_upper();
    let tiny = 1e-9 * scale;
    let radius = if spread > tiny && 1.25 * spread < other {
        1.25 * spread
    } else if spread <= tiny && other.is_finite() {
        0.5 * other
    } else if spread <= tiny {
        1.0
    } else if spread < other {
        0.5 * (spread + other)
    } else {
        return Ok(half_plane_rectangle(sweeper, omega_tilde));
    };
    Ok(Contour::Circle { center, radius })
}

/// Rectangle whose left edge lies on `Re z = ω̃` and whose other edges clear
/// the numerical range by one unit, so it encloses exactly the eigenvalues
/// with `Re λ > ω̃`.
pub fn half_plane_rectangle(sweeper: &Sweeper<'_>, omega_tilde: f64) -> Contour {
    let b = sweeper.operator().numerical_range_box();
    Contour::Rectangle {
        lo: C64::new(omega_tilde, b.im_lo - 1.0),
        hi: C64::new(b.re_hi.max(omega_tilde) + 1.0, b.im_hi + 1.0),
    }
}

/// Which majorant of the restricted semigroup feeds the remainder bound.
#[derive(Clone, Debug, PartialEq)]
pub enum RestrictedWeight {
    /// A majorant of `‖e^{tA}‖`, hence of the restricted semigroup.
    User(WeightSpec),
    /// `‖e^{tA}|_{range(I-Π₊)}‖` sampled on `samples` cells of `[0, horizon]`
    /// with a relative safety margin. Not a certified majorant between samples.
    Sampled { horizon: f64, samples: usize, margin: f64 },
}

/// One row of the split report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitRow {
    pub t: f64,
    pub r_true: f64,
    pub r_bound: f64,
    pub leading_term_norm: f64,
}

/// Projection, line value `r(ω̃)` and the chosen majorant for one `ω̃`.
pub struct SplitAnalysis<'a> {
    pub sweeper: Sweeper<'a>,
    pub omega_tilde: f64,
    pub split: SpectralSplit,
    pub r_line: CertifiedInterval,
    pub weight: WeightSpec,
}

impl<'a> SplitAnalysis<'a> {
    pub fn new(
        a: &'a OperatorMatrix,
        omega_tilde: f64,
        weight: RestrictedWeight,
        nodes: usize,
        rel_width: f64,
    ) -> Result<Self> {
        Self::with_contour(a, omega_tilde, None, weight, nodes, rel_width)
    }

    /// As [`SplitAnalysis::new`] with an explicit contour; `None` picks one with
    /// [`auto_contour`].
    pub fn with_contour(
        a: &'a OperatorMatrix,
        omega_tilde: f64,
        contour: Option<Contour>,
        weight: RestrictedWeight,
        nodes: usize,
        rel_width: f64,
    ) -> Result<Self> {
        Self::from_sweeper(Sweeper::new(a), omega_tilde, contour, weight, nodes, rel_width)
    }

    /// As [`SplitAnalysis::with_contour`], reusing a sweeper (and its spectrum).
    pub fn from_sweeper(
        sweeper: Sweeper<'a>,
        omega_tilde: f64,
        contour: Option<Contour>,
        weight: RestrictedWeight,
        nodes: usize,
        rel_width: f64,
    ) -> Result<Self> {
        let contour = match contour {
            Some(c) => {
                sweeper.check_line(omega_tilde)?;
                c
            }
            None => auto_contour_with(&sweeper, omega_tilde)?,
        };
        let split = riesz_projection_with(&sweeper, &contour, nodes)?;
        let r_line = sweeper.r_on_line(omega_tilde, &SweepOptions::with_rel_width(rel_width))?;
        if !(r_line.lo > 0.0) {
            return Err(Error::Hypothesis(format!("r({omega_tilde}) on the line is not positive")));
        }
        let weight = match weight {
            RestrictedWeight::User(w) => w,
            RestrictedWeight::Sampled { horizon, samples, margin } => {
                sampled_restricted_weight(sweeper.operator(), &split, horizon, samples, margin)?
            }
        };
        Ok(Self {
            sweeper,
            omega_tilde,
            split,
            r_line,
            weight,
        })
    }

    /// Remainder bound with split `a`: `gps(r(ω̃), m, ω̃, t, a)·‖I - Π₊‖`.
    pub fn bound(&self, t: f64, a: f64) -> Result<f64> {
        Ok(gps_bound(self.r_line.lo, &self.weight, self.omega_tilde, t, a)? * self.split.complement_norm)
    }

    /// Report row at `t` with the best split.
    pub fn row(&self, t: f64) -> Result<SplitRow> {
        let (_, g) = optimal_split(self.r_line.lo, &self.weight, self.omega_tilde, t)?;
        let (r_true, leading) = self.norms(t)?;
        Ok(SplitRow {
            t,
            r_true,
            r_bound: g * self.split.complement_norm,
            leading_term_norm: leading,
        })
    }

    /// `(‖e^{tA}(I - Π₊)‖, ‖e^{tA}Π₊‖)`.
    pub fn norms(&self, t: f64) -> Result<(f64, f64)> {
        Ok(self.norms_with(&semigroup_matrix(self.sweeper.operator(), t)?))
    }

    /// [`SplitAnalysis::norms`] from a precomputed `e^{tA}`.
    pub fn norms_with(&self, e: &Mat<C64>) -> (f64, f64) {
        let q = self.split.complement();
        (norm2(&(e * &q)), norm2(&(e * self.split.projector.mat())))
    }

    pub fn rows(&self, ts: &[f64]) -> Result<Vec<SplitRow>> {
        ts.par_iter().map(|&t| self.row(t)).collect()
    }
}

/// `(‖R(t)‖, bound)` for one `t` and split `a`, with the user majorant.
pub fn split_bound(
    a: &OperatorMatrix,
    omega_tilde: f64,
    m: &WeightSpec,
    t: f64,
    split_at: f64,
) -> Result<(f64, f64)> {
    let an = SplitAnalysis::new(a, omega_tilde, RestrictedWeight::User(m.clone()), DEFAULT_NODES, 1e-4)?;
    let bound = an.bound(t, split_at)?;
    Ok((an.norms(t)?.0, bound))
}

/// Tabulated majorant of `‖e^{tA}Q‖`, `Q` an orthonormal basis of
/// `range(I - Π₊)`, sampled on a uniform grid and inflated by `1 + margin`.
pub fn sampled_restricted_weight(
    a: &OperatorMatrix,
    split: &SpectralSplit,
    horizon: f64,
    samples: usize,
    margin: f64,
) -> Result<WeightSpec> {
    let q_full = split.complement();
    let svd = q_full
        .thin_svd()
        .map_err(|e| Error::Numeric(format!("SVD of the complement failed: {e:?}")))?;
    let n = a.dim();
    let rank = n - split.sigma_plus.len();
    let u = svd.U();
    let basis = Mat::<C64>::from_fn(n, rank, |i, j| u[(i, j)]);
    let samples = samples.max(1);
    let grid: Vec<f64> = (0..=samples).map(|k| horizon * k as f64 / samples as f64).collect();
    let values = grid
        .par_iter()
        .map(|&t| {
            let e = if t == 0.0 { Mat::<C64>::identity(n, n) } else { semigroup_matrix(a, t)? };
            let s = (&e * &basis)
                .singular_values()
                .map_err(|e| Error::Numeric(format!("SVD failed: {e:?}")))?;
            Ok(s[0].max(1.0) * (1.0 + margin))
        })
        .collect::<Result<Vec<f64>>>()?;
    WeightSpec::tabulated(grid, values, horizon)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    fn diag(v: &[f64]) -> OperatorMatrix {
        OperatorMatrix::real_diagonal(v).unwrap()
    }

    fn close(p: &Mat<C64>, q: &[[f64; 2]; 2]) -> bool {
        (0..2).all(|i| (0..2).all(|j| (p[(i, j)] - C64::new(q[i][j], 0.0)).norm() < 1e-12))
    }

    #[test]
    fn diagonal_projector() {
        let a = diag(&[-1.0, -5.0]);
        let c = Contour::Circle { center: C64::new(-1.0, 0.0), radius: 1.0 };
        let s = riesz_projection(&a, &c, DEFAULT_NODES).unwrap();
        assert!(close(s.projector.mat(), &[[1.0, 0.0], [0.0, 0.0]]));
        assert!((s.complement_norm - 1.0).abs() < 1e-12);
        assert_eq!(s.sigma_plus.len(), 1);
    }

    #[test]
    fn jordan_whole_spectrum() {
        let a = gallery::build_jordan(2, C64::new(-1.0, 0.0)).unwrap();
        let c = Contour::Circle { center: C64::new(-1.0, 0.0), radius: 0.5 };
        let s = riesz_projection(&a, &c, DEFAULT_NODES).unwrap();
        assert!(close(s.projector.mat(), &[[1.0, 0.0], [0.0, 1.0]]));
        assert_eq!(s.complement_norm, 0.0);
    }

    #[test]
    fn rectangle_matches_circle() {
        let a = gallery::build_random_nonnormal(6, 3, 0.5).unwrap();
        let ev = crate::linalg::eigenvalues(&a).unwrap();
        let c = auto_contour(&a, 0.5 * (ev[0].re + ev[1].re)).unwrap();
        let circle = riesz_projection(&a, &c, DEFAULT_NODES).unwrap();
        let (cx, r) = match c {
            Contour::Circle { center, radius } => (center, radius),
            _ => unreachable!(),
        };
        let rect = Contour::Rectangle { lo: cx - C64::new(r, r) * 0.7, hi: cx + C64::new(r, r) * 0.7 };
        if rect.contains(ev[0]) && ev[1..].iter().all(|l| !rect.contains(*l) && rect.distance(*l) > 0.05) {
            let p = riesz_projection(&a, &rect, 1024).unwrap();
            assert!(norm2(&(p.projector.mat() - circle.projector.mat())) < 1e-8);
        }
    }

    #[test]
    fn contour_on_spectrum_is_rejected() {
        let a = diag(&[-1.0, -5.0]);
        let c = Contour::Circle { center: C64::new(0.0, 0.0), radius: 1.0 };
        assert!(matches!(riesz_projection(&a, &c, 64), Err(Error::Conditioning(_))));
    }

    #[test]
    fn auto_contour_examples() {
        match auto_contour(&diag(&[-1.0, -5.0]), -3.0).unwrap() {
            Contour::Circle { center, radius } => {
                assert!((center - C64::new(-1.0, 0.0)).norm() < 1e-12);
                assert!(radius < 4.0);
            }
            _ => unreachable!(),
        }
        let a = OperatorMatrix::diagonal(&[C64::new(-1.0, 0.0), C64::new(-1.0, 2.0), C64::new(-5.0, 0.0)]).unwrap();
        match auto_contour(&a, -3.0).unwrap() {
            Contour::Circle { center, radius } => {
                assert!((center - C64::new(-1.0, 1.0)).norm() < 1e-12);
                assert!((radius - 1.25).abs() < 1e-12);
            }
            _ => unreachable!(),
        }
        assert!(matches!(auto_contour(&diag(&[-1.0, -5.0]), -1.0), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn rectangle_fallback_when_no_circle_separates() {
        // centroid -1-4i, spread 4, but -3-4i sits 2 away from it
        let a = OperatorMatrix::diagonal(&[C64::new(-1.0, 0.0), C64::new(-1.0, -8.0), C64::new(-3.0, -4.0)]).unwrap();
        let c = auto_contour(&a, -2.0).unwrap();
        assert!(matches!(c, Contour::Rectangle { .. }));
        let p = riesz_projection(&a, &c, 512).unwrap();
        assert_eq!(p.sigma_plus.len(), 2);
        let expect = [1.0, 1.0, 0.0];
        for (i, e) in expect.iter().enumerate() {
            assert!((p.projector.get(i, i) - C64::new(*e, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn diagonal_split_bound_dominates() {
        let a = diag(&[-1.0, -5.0]);
        let m = WeightSpec::exponential(1.0, -1.0).unwrap();
        for &t in &[1.0, 2.0, 4.0] {
            let (truth, bound) = split_bound(&a, -3.0, &m, t, t / 2.0).unwrap();
            assert!(((truth - (-5.0 * t).exp()) / truth).abs() < 1e-9);
            assert!(bound >= truth);
        }
    }

    #[test]
    fn quadrature_converges_with_nodes() {
        let a = gallery::build_random_nonnormal(6, 11, 0.3).unwrap();
        let ev = crate::linalg::eigenvalues(&a).unwrap();
        let c = auto_contour(&a, 0.5 * (ev[0].re + ev[1].re)).unwrap();
        let min_dist = ev.iter().map(|l| c.distance(*l)).fold(f64::INFINITY, f64::min);
        if min_dist >= 0.1 {
            let p1 = riesz_projection(&a, &c, 256).unwrap();
            let p2 = riesz_projection(&a, &c, 512).unwrap();
            assert!(norm2(&(p1.projector.mat() - p2.projector.mat())) < 1e-9);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(GL_ORDER);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }
}
