use faer::Mat;

use super::{inverse, largest_eig_hermitian, sigma_min, BandLu, LanczosOptions, OperatorMatrix, RangeBox, C64};
use crate::error::Result;

/// Repeated evaluation of `σ_min(zI - A)` and `(z - A)⁻¹` for one fixed `A`.
///
/// Small or dense matrices go through a full SVD. Large banded matrices (the
/// finite-difference gallery) factor `zI - A` in band storage and run
/// Lanczos on `(B*B)⁻¹`, which costs `O(n·bandwidth²)` per shift instead of
/// `O(n³)`.
#[derive(Clone, Debug)]
pub struct ShiftedSolver<'a> {
    a: &'a OperatorMatrix,
    kl: usize,
    ku: usize,
    banded: bool,
    range: RangeBox,
    norm_upper: f64,
}

/// Dimension below which the full SVD is always used.
const SMALL_DIM: usize = 64;

impl<'a> ShiftedSolver<'a> {
    pub fn new(a: &'a OperatorMatrix) -> Self {
        let (kl, ku) = a.bandwidth();
        let n = a.dim();
        let banded = n > SMALL_DIM && 4 * (2 * kl + ku + 1) <= n;
        Self {
            a,
            kl,
            ku,
            banded,
            range: a.numerical_range_box(),
            norm_upper: a.norm2_upper(),
        }
    }

    /// Forces the dense SVD path regardless of structure.
    pub fn dense(a: &'a OperatorMatrix) -> Self {
        let mut s = Self::new(a);
        s.banded = false;
        s
    }

    pub fn operator(&self) -> &OperatorMatrix {
        self.a
    }

    pub fn uses_band_path(&self) -> bool {
        self.banded
    }

    pub fn range_box(&self) -> RangeBox {
        self.range
    }

    /// Upper bound on `‖A‖`.
    pub fn norm_upper(&self) -> f64 {
        self.norm_upper
    }

    fn factor(&self, z: C64) -> BandLu {
        let a = self.a;
        BandLu::factor(a.dim(), self.kl, self.ku, |i, j| {
            let d = if i == j { z } else { C64::new(0.0, 0.0) };
            d - a.get(i, j)
        })
    }

    pub fn sigma_min(&self, z: C64) -> Result<f64> {
        if !self.banded {
            return sigma_min(self.a, z);
        }
        let lu = self.factor(z);
        if lu.is_singular() {
            return Ok(0.0);
        }
        let n = self.a.dim();
        let theta = largest_eig_hermitian(
            n,
            |x, y| {
                y.copy_from_slice(x);
                lu.solve_adjoint_in_place(y);
                lu.solve_in_place(y);
            },
            &LanczosOptions {
                max_iter: 300,
                ..LanczosOptions::default()
            },
        );
        if !theta.is_finite() {
            return Ok(0.0);
        }
        Ok(1.0 / theta.sqrt())
    }

    /// `(z - A)⁻¹` as a dense matrix.
    pub fn resolvent_matrix(&self, z: C64) -> Result<Mat<C64>> {
        if !self.banded {
            return inverse(&self.a.shift_matrix(z));
        }
        let n = self.a.dim();
        let lu = self.factor(z);
        if lu.is_singular() {
            return Err(crate::error::Error::Numeric(format!("zI - A is singular at z = {z}")));
        }
        let mut out = Mat::<C64>::zeros(n, n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            col.iter_mut().for_each(|x| *x = C64::new(0.0, 0.0));
            col[j] = C64::new(1.0, 0.0);
            lu.solve_in_place(&mut col);
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery;

    #[test]
    fn band_path_matches_full_svd() {
        let spec = gallery::DiscretizationSpec::new(120, 12.0).unwrap();
        let a = gallery::build_complex_airy(&spec).unwrap();
        let fast = ShiftedSolver::new(&a);
        assert!(fast.uses_band_path());
        let slow = ShiftedSolver::dense(&a);
        for &z in &[C64::new(-0.5, 0.0), C64::new(-0.5, -3.0), C64::new(-1.2, -2.0), C64::new(0.3, 5.0)] {
            let s1 = fast.sigma_min(z).unwrap();
            let s2 = slow.sigma_min(z).unwrap();
            assert!((s1 - s2).abs() <= 1e-10 * (1.0 + s2), "z={z}: {s1} vs {s2}");
        }
    }

    #[test]
    fn band_resolvent_matches_dense_inverse() {
        let spec = gallery::DiscretizationSpec::new(80, 6.0).unwrap();
        let a = gallery::build_davies_oscillator(&spec).unwrap();
        let z = C64::new(-1.5, 0.7);
        let fast = ShiftedSolver::new(&a).resolvent_matrix(z).unwrap();
        let slow = ShiftedSolver::dense(&a).resolvent_matrix(z).unwrap();
        let diff = super::super::norm2(&(&fast - &slow));
        assert!(diff < 1e-10 * super::super::norm2(&slow));
    }
}
