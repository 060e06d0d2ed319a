//! Dense complex matrix kernels.
//!
//! Everything downstream reduces to three primitives: the smallest singular
//! value of `zI - A`, the operator 2-norm of `e^{tA}`, and the eigenvalues of
//! `A`. Decompositions are delegated to `faer`; the matrix exponential and the
//! banded shifted solver used by the resolvent sweeps live in submodules.

mod band;
mod expm;
mod lanczos;
mod shifted;

pub use band::BandLu;
pub use expm::{expm, expm_real};
pub use lanczos::{largest_eig_hermitian, LanczosOptions};
pub use shifted::ShiftedSolver;

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad;

pub type C64 = Complex64;

/// Above this dimension 2-norms switch from a full SVD to Lanczos on `X*X`.
pub const DENSE_SVD_MAX: usize = 1000;

/// A dense complex square matrix standing for the generator `A`.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    mat: Mat<C64>,
    label: Option<String>,
}

impl PartialEq for OperatorMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim()
            && self.label == other.label
            && (0..self.dim())
                .all(|i| (0..self.dim()).all(|j| self.mat[(i, j)] == other.mat[(i, j)]))
    }
}

impl OperatorMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Structural("dimension must be at least 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::Structural(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if let Some(k) = entries.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Structural(format!(
                "entry ({}, {}) is not finite",
                k / dim,
                k % dim
            )));
        }
        Ok(Self {
            mat: Mat::from_fn(dim, dim, |i, j| entries[i * dim + j]),
            label: None,
        })
    }

    /// Builds a matrix from a list of rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Structural("matrix is not square".into()));
        }
        Self::new(n, rows.iter().flatten().copied().collect())
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Structural("dimension must be at least 1".into()));
        }
        let mat = Mat::from_fn(dim, dim, f);
        Self::from_mat(mat)
    }

    pub fn from_mat(mat: Mat<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::Structural(format!(
                "matrix is {}x{}, not square",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.nrows() == 0 {
            return Err(Error::Structural("dimension must be at least 1".into()));
        }
        for j in 0..mat.ncols() {
            for i in 0..mat.nrows() {
                let z = mat[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::Structural(format!("entry ({i}, {j}) is not finite")));
                }
            }
        }
        Ok(Self { mat, label: None })
    }

    pub fn diagonal(values: &[C64]) -> Result<Self> {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { values[i] } else { C64::new(0.0, 0.0) })
    }

    pub fn real_diagonal(values: &[f64]) -> Result<Self> {
        let v: Vec<C64> = values.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::diagonal(&v)
    }

    pub fn scalar(value: C64) -> Self {
        Self::diagonal(&[value]).expect("1x1 matrix")
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |_, _| C64::new(0.0, 0.0))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &Mat<C64> {
        &self.mat
    }

    pub fn into_mat(self) -> Mat<C64> {
        self.mat
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.mat[(i, j)]
    }

    /// Row-major copy of the entries.
    pub fn entries(&self) -> Vec<C64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.mat[(i, j)]);
            }
        }
        out
    }

    /// `A + shift·I`.
    pub fn shifted(&self, shift: C64) -> Self {
        let mut mat = self.mat.clone();
        for i in 0..self.dim() {
            mat[(i, i)] += shift;
        }
        Self {
            mat,
            label: self.label.clone(),
        }
    }

    /// `z·I - A` as a raw matrix.
    pub fn shift_matrix(&self, z: C64) -> Mat<C64> {
        Mat::from_fn(self.dim(), self.dim(), |i, j| {
            let d = if i == j { z } else { C64::new(0.0, 0.0) };
            d - self.mat[(i, j)]
        })
    }

    /// The entries as a real matrix when every imaginary part is zero.
    pub fn real_mat(&self) -> Option<Mat<f64>> {
        if self.is_real() {
            Some(Mat::from_fn(self.dim(), self.dim(), |i, j| self.mat[(i, j)].re))
        } else {
            None
        }
    }

    pub fn is_real(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| self.mat[(i, j)].im == 0.0))
    }

    /// Lower and upper bandwidths `(kl, ku)`.
    pub fn bandwidth(&self) -> (usize, usize) {
        let n = self.dim();
        let mut kl = 0;
        let mut ku = 0;
        for j in 0..n {
            for i in 0..n {
                if self.mat[(i, j)] != C64::new(0.0, 0.0) {
                    if i > j {
                        kl = kl.max(i - j);
                    } else {
                        ku = ku.max(j - i);
                    }
                }
            }
        }
        (kl, ku)
    }

    pub fn norm_frobenius(&self) -> f64 {
        let mut s = 0.0;
        for j in 0..self.dim() {
            for i in 0..self.dim() {
                s += self.mat[(i, j)].norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Operator 2-norm `‖A‖`.
    pub fn norm2(&self) -> f64 {
        norm2(&self.mat)
    }

    /// A cheap upper bound on `‖A‖`: `min(‖A‖_F, sqrt(‖A‖₁‖A‖_∞))`.
    pub fn norm2_upper(&self) -> f64 {
        let n = self.dim();
        let mut col_max: f64 = 0.0;
        let mut row_sums = vec![0.0; n];
        for j in 0..n {
            let mut c = 0.0;
            for i in 0..n {
                let a = self.mat[(i, j)].norm();
                c += a;
                row_sums[i] += a;
            }
            col_max = col_max.max(c);
        }
        let row_max = row_sums.iter().cloned().fold(0.0, f64::max);
        self.norm_frobenius().min((col_max * row_max).sqrt())
    }

    /// Gershgorin enclosure of the numerical range `W(A)` as an axis-aligned box
    /// `[re_lo, re_hi] × [im_lo, im_hi]`, built from the Hermitian and
    /// skew-Hermitian parts of `A`.
    pub fn numerical_range_box(&self) -> RangeBox {
        let n = self.dim();
        let mut re_lo = f64::INFINITY;
        let mut re_hi = f64::NEG_INFINITY;
        let mut im_lo = f64::INFINITY;
        let mut im_hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut rh = 0.0;
            let mut rk = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let a = self.mat[(i, j)];
                let b = self.mat[(j, i)].conj();
                rh += ((a + b) * 0.5).norm();
                rk += ((a - b) * 0.5).norm();
            }
            let d = self.mat[(i, i)];
            re_lo = re_lo.min(d.re - rh);
            re_hi = re_hi.max(d.re + rh);
            im_lo = im_lo.min(d.im - rk);
            im_hi = im_hi.max(d.im + rk);
        }
        RangeBox {
            re_lo,
            re_hi,
            im_lo,
            im_hi,
        }
    }

    /// Largest eigenvalue of the Hermitian part `(A + A*)/2`; `‖e^{tA}‖ ≤ e^{t·η}`.
    pub fn numerical_abscissa(&self) -> f64 {
        let n = self.dim();
        let h = Mat::from_fn(n, n, |i, j| (self.mat[(i, j)] + self.mat[(j, i)].conj()) * 0.5);
        if n <= DENSE_SVD_MAX {
            let ev = h
                .self_adjoint_eigenvalues(faer::Side::Lower)
                .expect("Hermitian eigenvalues converge");
            ev[n - 1]
        } else {
            // Shift to make the spectrum positive, then take the top Ritz value.
            let bx = self.numerical_range_box();
            let shift = -bx.re_lo + 1.0;
            let top = largest_eig_hermitian(
                n,
                |x, y| {
                    for i in 0..n {
                        let mut s = C64::new(shift, 0.0) * x[i];
                        for j in 0..n {
                            s += h[(i, j)] * x[j];
                        }
                        y[i] = s;
                    }
                },
                &LanczosOptions::default(),
            );
            top - shift
        }
    }
}

/// Axis-aligned box containing the numerical range of a matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RangeBox {
    pub re_lo: f64,
    pub re_hi: f64,
    pub im_lo: f64,
    pub im_hi: f64,
}

impl RangeBox {
    /// Lower bound on `σ_min(zI - A)` for all `z = omega + iy`, `y ∈ [y_lo, y_hi]`.
    pub fn distance_to_segment(&self, omega: f64, y_lo: f64, y_hi: f64) -> f64 {
        let dx = (omega - self.re_hi).max(self.re_lo - omega).max(0.0);
        let dy = (y_lo - self.im_hi).max(self.im_lo - y_hi).max(0.0);
        dx.hypot(dy)
    }
}

/// The pair `(M, ω)` certifying `‖e^{tA}‖ ≤ M e^{ωt}` for all `t ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GrowthBound {
    pub m: f64,
    pub omega: f64,
}

impl GrowthBound {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        if !m.is_finite() || !omega.is_finite() {
            return Err(Error::Domain("growth bound parameters must be finite".into()));
        }
        if m < 1.0 {
            return Err(Error::Domain(format!("growth constant M = {m} must be >= 1")));
        }
        Ok(Self { m, omega })
    }

    /// `(1, η)` with `η` the numerical abscissa; valid by the Lumer–Phillips bound.
    pub fn from_numerical_abscissa(a: &OperatorMatrix) -> Self {
        Self {
            m: 1.0,
            omega: a.numerical_abscissa(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.m * (self.omega * t).exp()
    }

    /// Checks the bound against `‖e^{tA}‖` on the given samples.
    pub fn holds_on(&self, a: &OperatorMatrix, ts: &[f64]) -> Result<bool> {
        for &t in ts {
            if semigroup_norm(a, t)? > self.eval(t) * (1.0 + 1e-10) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Operator 2-norm of a square matrix.
pub fn norm2(x: &Mat<C64>) -> f64 {
    let n = x.nrows();
    if n <= DENSE_SVD_MAX {
        match x.singular_values() {
            Ok(s) => s.first().copied().unwrap_or(0.0),
            Err(_) => norm2_lanczos(x),
        }
    } else {
        norm2_lanczos(x)
    }
}

fn norm2_lanczos(x: &Mat<C64>) -> f64 {
    let n = x.nrows();
    let top = largest_eig_hermitian(
        n,
        |v, out| {
            let col = Mat::from_fn(n, 1, |i, _| v[i]);
            let y = x * &col;
            let z = x.adjoint() * &y;
            for (o, k) in out.iter_mut().zip(0..n) {
                *o = z[(k, 0)];
            }
        },
        &LanczosOptions::default(),
    );
    top.max(0.0).sqrt()
}

/// [`norm2`] for a real matrix.
pub fn norm2_real(x: &Mat<f64>) -> f64 {
    let n = x.nrows();
    if n <= DENSE_SVD_MAX {
        if let Ok(s) = x.singular_values() {
            return s.first().copied().unwrap_or(0.0);
        }
    }
    // real and imaginary parts of the Lanczos vector as two real columns
    let top = largest_eig_hermitian(
        n,
        |v, out| {
            let col = Mat::from_fn(n, 2, |i, j| if j == 0 { v[i].re } else { v[i].im });
            let y = x * &col;
            let z = x.transpose() * &y;
            for (o, k) in out.iter_mut().zip(0..n) {
                *o = C64::new(z[(k, 0)], z[(k, 1)]);
            }
        },
        &LanczosOptions::default(),
    );
    top.max(0.0).sqrt()
}

/// All singular values of `zI - A`, nonincreasing.
pub fn singular_values_shifted(a: &OperatorMatrix, z: C64) -> Result<Vec<f64>> {
    a.shift_matrix(z)
        .singular_values()
        .map_err(|e| Error::Numeric(format!("SVD did not converge: {e:?}")))
}

/// Smallest singular value of `zI - A` from a full SVD.
pub fn sigma_min(a: &OperatorMatrix, z: C64) -> Result<f64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("shift {z} is not finite")));
    }
    let s = singular_values_shifted(a, z)?;
    Ok(*s.last().expect("nonempty"))
}

/// `σ_min(zI - A)` below this is treated as singular.
pub fn singular_tolerance(a: &OperatorMatrix) -> f64 {
    1e-12 * (1.0 + a.norm2())
}

/// `‖(z - A)^{-1}‖ = 1/σ_min(zI - A)`.
pub fn resolvent_norm(a: &OperatorMatrix, z: C64) -> Result<f64> {
    let s = sigma_min(a, z)?;
    if s <= singular_tolerance(a) {
        let nearest = eigenvalues(a)?
            .into_iter()
            .min_by(|p, q| (p - z).norm().total_cmp(&(q - z).norm()))
            .expect("nonempty spectrum");
        return Err(Error::Singular { z, nearest });
    }
    Ok(1.0 / s)
}

/// `‖e^{tA}‖` in the operator 2-norm.
pub fn semigroup_norm(a: &OperatorMatrix, t: f64) -> Result<f64> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::Domain(format!("time t = {t} must be finite and >= 0")));
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    match a.real_mat() {
        Some(r) => Ok(norm2_real(&expm_real(&r, t)?)),
        None => Ok(norm2(&expm(a.mat(), t)?)),
    }
}

/// `e^{tA}`, in real arithmetic when `A` is real.
pub fn semigroup_matrix(a: &OperatorMatrix, t: f64) -> Result<Mat<C64>> {
    match a.real_mat() {
        Some(r) => {
            let e = expm_real(&r, t)?;
            Ok(Mat::from_fn(e.nrows(), e.ncols(), |i, j| C64::new(e[(i, j)], 0.0)))
        }
        None => expm(a.mat(), t),
    }
}

/// Eigenvalues sorted by decreasing real part (ties: decreasing imaginary part).
pub fn eigenvalues(a: &OperatorMatrix) -> Result<Vec<C64>> {
    let ev = match a.real_mat() {
        Some(r) => r.eigenvalues().map_err(|e| Error::Numeric(format!("eigenvalue iteration failed: {e:?}")))?,
        None => a
            .mat()
            .eigenvalues()
            .map_err(|e| Error::Numeric(format!("eigenvalue iteration failed: {e:?}")))?,
    };
    let mut ev: Vec<C64> = ev.into_iter().map(|z| C64::new(z.re, z.im)).collect();
    ev.sort_by(|p, q| q.re.total_cmp(&p.re).then(q.im.total_cmp(&p.im)));
    Ok(ev)
}

pub fn spectral_abscissa(a: &OperatorMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?[0].re)
}

/// `‖∫₀^H e^{tA} e^{-tz} dt - (z - A)^{-1}‖`, the integral by composite Simpson.
pub fn laplace_identity_residual(
    a: &OperatorMatrix,
    z: C64,
    horizon: f64,
    panels: usize,
) -> Result<f64> {
    let abscissa = spectral_abscissa(a)?;
    if z.re <= abscissa {
        return Err(Error::Divergence {
            re_z: z.re,
            abscissa,
        });
    }
    if !(horizon > 0.0) || (horizon * (abscissa - z.re)).exp() >= 1e-8 {
        return Err(Error::Domain(format!(
            "horizon {horizon} too short: e^(H(abscissa - Re z)) must be < 1e-8"
        )));
    }
    let panels = panels.max(2) + panels % 2;
    let n = a.dim();
    let h = horizon / panels as f64;
    let step = expm(a.mat(), h)?;
    let phase = (-z * h).exp();
    let mut current = Mat::<C64>::identity(n, n);
    let mut weight_phase = C64::new(1.0, 0.0);
    let mut acc = Mat::<C64>::zeros(n, n);
    for k in 0..=panels {
        let w = quad::simpson_weight(k, panels) * h / 3.0;
        let c = weight_phase * w;
        for j in 0..n {
            for i in 0..n {
                acc[(i, j)] += c * current[(i, j)];
            }
        }
        current = &current * &step;
        weight_phase *= phase;
    }
    let resolvent = inverse(&a.shift_matrix(z))?;
    Ok(norm2(&(&acc - &resolvent)))
}

/// Dense inverse through partial-pivot LU.
pub fn inverse(x: &Mat<C64>) -> Result<Mat<C64>> {
    use faer::linalg::solvers::Solve;
    let n = x.nrows();
    let lu = x.partial_piv_lu();
    let inv = lu.solve(Mat::<C64>::identity(n, n));
    for j in 0..n {
        for i in 0..n {
            if !inv[(i, j)].re.is_finite() || !inv[(i, j)].im.is_finite() {
                return Err(Error::Numeric("matrix is numerically singular".into()));
            }
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn jordan() -> OperatorMatrix {
        OperatorMatrix::from_real_rows(&[vec![-1.0, 1.0], vec![0.0, -1.0]]).unwrap()
    }

    const GOLDEN: f64 = 1.618_033_988_749_895;

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            OperatorMatrix::new(2, vec![c(1.0, 0.0); 3]),
            Err(Error::Structural(_))
        ));
        assert!(OperatorMatrix::new(0, vec![]).is_err());
        assert!(OperatorMatrix::new(1, vec![c(f64::NAN, 0.0)]).is_err());
        assert!(OperatorMatrix::from_rows(&[vec![c(1.0, 0.0)], vec![]]).is_err());
    }

    #[test]
    fn sigma_min_examples() {
        let zero = OperatorMatrix::zeros(3).unwrap();
        assert_relative_eq!(sigma_min(&zero, c(2.0, 0.0)).unwrap(), 2.0, epsilon = 1e-14);
        let d = OperatorMatrix::real_diagonal(&[-1.0, -5.0]).unwrap();
        assert_relative_eq!(sigma_min(&d, c(0.0, 0.0)).unwrap(), 1.0, epsilon = 1e-14);
        // [[1,-1],[0,1]] has singular values φ and 1/φ.
        assert_relative_eq!(
            sigma_min(&jordan(), c(0.0, 0.0)).unwrap(),
            1.0 / GOLDEN,
            epsilon = 1e-13
        );
    }

    #[test]
    fn resolvent_norm_examples() {
        let s = OperatorMatrix::scalar(c(-1.0, 0.0));
        assert_relative_eq!(resolvent_norm(&s, c(0.0, 0.0)).unwrap(), 1.0, epsilon = 1e-14);
        let d = OperatorMatrix::real_diagonal(&[-1.0, -5.0]).unwrap();
        assert_relative_eq!(
            resolvent_norm(&d, c(0.0, 1.0)).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-13
        );
        assert_relative_eq!(resolvent_norm(&jordan(), c(0.0, 0.0)).unwrap(), GOLDEN, epsilon = 1e-12);
    }

    #[test]
    fn resolvent_on_spectrum_reports_eigenvalue() {
        let d = OperatorMatrix::real_diagonal(&[-1.0, -5.0]).unwrap();
        match resolvent_norm(&d, c(-5.0, 0.0)) {
            Err(Error::Singular { nearest, .. }) => assert_relative_eq!(nearest.re, -5.0),
            other => panic!("expected singular error, got {other:?}"),
        }
    }

    #[test]
    fn semigroup_norm_examples() {
        assert_eq!(semigroup_norm(&jordan(), 0.0).unwrap(), 1.0);
        let s = OperatorMatrix::scalar(c(-1.0, 0.0));
        assert_relative_eq!(semigroup_norm(&s, 2.0).unwrap(), (-2.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(
            semigroup_norm(&jordan(), 1.0).unwrap(),
            (-1.0f64).exp() * GOLDEN,
            max_relative = 1e-13
        );
        assert!(matches!(semigroup_norm(&s, -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn saturation_is_reported() {
        let s = OperatorMatrix::scalar(c(1.0, 0.0));
        assert!(matches!(semigroup_norm(&s, 1e4), Err(Error::Saturation(_))));
    }

    #[test]
    fn eigenvalue_examples() {
        let d = OperatorMatrix::real_diagonal(&[-5.0, -1.0]).unwrap();
        let ev = eigenvalues(&d).unwrap();
        assert_relative_eq!(ev[0].re, -1.0);
        assert_relative_eq!(ev[1].re, -5.0);
        let ev = eigenvalues(&jordan()).unwrap();
        assert!(ev.iter().all(|z| (z - c(-1.0, 0.0)).norm() < 1e-7));
        let companion = OperatorMatrix::from_real_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        let ev = eigenvalues(&companion).unwrap();
        for target in [c(0.0, 1.0), c(0.0, -1.0)] {
            assert!(ev.iter().any(|z| (z - target).norm() < 1e-12));
        }
    }

    #[test]
    fn spectral_abscissa_examples() {
        let d = OperatorMatrix::real_diagonal(&[-1.0, -5.0]).unwrap();
        assert_relative_eq!(spectral_abscissa(&d).unwrap(), -1.0);
        assert_relative_eq!(spectral_abscissa(&jordan()).unwrap(), -1.0, epsilon = 1e-7);
        let d = OperatorMatrix::diagonal(&[c(2.0, 3.0), c(-7.0, 0.0)]).unwrap();
        assert_relative_eq!(spectral_abscissa(&d).unwrap(), 2.0);
    }

    #[test]
    fn laplace_identity_examples() {
        let s = OperatorMatrix::scalar(c(-1.0, 0.0));
        assert!(laplace_identity_residual(&s, c(1.0, 0.0), 40.0, 4096).unwrap() < 1e-6);
        let d = OperatorMatrix::real_diagonal(&[-1.0, -2.0]).unwrap();
        assert!(laplace_identity_residual(&d, c(0.5, 0.0), 40.0, 4096).unwrap() < 1e-6);
        assert!(matches!(
            laplace_identity_residual(&s, c(-2.0, 0.0), 40.0, 4096),
            Err(Error::Divergence { .. })
        ));
    }

    #[test]
    fn numerical_range_box_contains_spectrum() {
        let a = OperatorMatrix::from_rows(&[
            vec![c(-1.0, 0.5), c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, 0.0), c(-2.0, -1.0), c(0.3, 0.0)],
            vec![c(0.1, 0.0), c(0.0, 0.0), c(-0.5, 0.0)],
        ])
        .unwrap();
        let b = a.numerical_range_box();
        for z in eigenvalues(&a).unwrap() {
            assert!(z.re >= b.re_lo - 1e-12 && z.re <= b.re_hi + 1e-12);
            assert!(z.im >= b.im_lo - 1e-12 && z.im <= b.im_hi + 1e-12);
        }
        assert!(a.numerical_abscissa() <= b.re_hi + 1e-12);
        assert!(a.norm2() <= a.norm2_upper() * (1.0 + 1e-12));
    }

    #[test]
    fn growth_bound_validation() {
        assert!(GrowthBound::new(0.5, 0.0).is_err());
        assert!(GrowthBound::new(1.0, f64::NAN).is_err());
        let g = GrowthBound::from_numerical_abscissa(&jordan());
        assert!(g.holds_on(&jordan(), &[0.1, 0.5, 1.0, 3.0]).unwrap());
    }
}
