use faer::traits::ComplexField;
use faer::Mat;

use super::C64;
use crate::error::{Error, Result};

// Numerator coefficients of the [13/13] diagonal Padé approximant to exp.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Largest 1-norm for which the degree-13 approximant is accurate to unit roundoff.
const THETA13: f64 = 5.371920351148152;

/// Real or complex entries the exponential works over.
pub trait Scalar: ComplexField + Copy {
    fn from_f64(x: f64) -> Self;
    fn scale(self, c: f64) -> Self;
    fn modulus(self) -> f64;
    fn finite(self) -> bool;
}

impl Scalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
}

impl Scalar for C64 {
    fn from_f64(x: f64) -> Self {
        C64::new(x, 0.0)
    }
    fn scale(self, c: f64) -> Self {
        self * c
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

fn norm1<T: Scalar>(x: &Mat<T>) -> f64 {
    (0..x.ncols())
        .map(|j| (0..x.nrows()).map(|i| x[(i, j)].modulus()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn combine<T: Scalar>(terms: &[(f64, &Mat<T>)], identity_coeff: f64) -> Mat<T> {
    let n = terms[0].1.nrows();
    Mat::from_fn(n, n, |i, j| {
        let mut s = if i == j { T::from_f64(identity_coeff) } else { T::from_f64(0.0) };
        for (c, m) in terms {
            s = s + m[(i, j)].scale(*c);
        }
        s
    })
}

/// `e^{tA}` by scaling and squaring with the [13/13] Padé approximant.
pub fn expm(a: &Mat<C64>, t: f64) -> Result<Mat<C64>> {
    expm_generic(a, t)
}

/// [`expm`] in real arithmetic, about four times cheaper.
pub fn expm_real(a: &Mat<f64>, t: f64) -> Result<Mat<f64>> {
    expm_generic(a, t)
}

fn expm_generic<T: Scalar>(a: &Mat<T>, t: f64) -> Result<Mat<T>> {
    let n = a.nrows();
    if !t.is_finite() {
        return Err(Error::Domain(format!("time t = {t} is not finite")));
    }
    let norm = norm1(a) * t.abs();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    if squarings > 1000 {
        return Err(Error::Saturation(format!(
            "t·‖A‖₁ = {norm:.3e} needs {squarings} squarings"
        )));
    }
    let scale = t / 2f64.powi(squarings);
    let x = Mat::from_fn(n, n, |i, j| a[(i, j)].scale(scale));
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let b = &PADE13;

    let inner_u = combine(&[(b[13], &x6), (b[11], &x4), (b[9], &x2)], 0.0);
    let tail_u = combine(&[(b[7], &x6), (b[5], &x4), (b[3], &x2)], b[1]);
    let u = &x * &(&(&x6 * &inner_u) + &tail_u);

    let inner_v = combine(&[(b[12], &x6), (b[10], &x4), (b[8], &x2)], 0.0);
    let tail_v = combine(&[(b[6], &x6), (b[4], &x4), (b[2], &x2)], b[0]);
    let v = &(&x6 * &inner_v) + &tail_v;

    let p = &v + &u;
    let q = &v - &u;
    let mut r = {
        use faer::linalg::solvers::Solve;
        q.partial_piv_lu().solve(&p)
    };
    for _ in 0..squarings {
        r = &r * &r;
    }
    for j in 0..n {
        for i in 0..n {
            if !r[(i, j)].finite() {
                return Err(Error::Saturation(format!(
                    "e^(tA) overflowed at t = {t} (t·‖A‖₁ = {norm:.3e})"
                )));
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jordan_block_closed_form() {
        let a = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) | (1, 1) => C64::new(-1.0, 0.0),
            (0, 1) => C64::new(1.0, 0.0),
            _ => C64::new(0.0, 0.0),
        });
        for &t in &[0.1, 1.0, 7.5, 40.0] {
            let e = expm(&a, t).unwrap();
            let d = (-t as f64).exp();
            assert!((e[(0, 0)].re - d).abs() < 1e-14 * (1.0 + d));
            assert!((e[(0, 1)].re - t * d).abs() < 1e-13 * (1.0 + t * d));
            assert!(e[(1, 0)].norm() < 1e-15);
        }
    }

    #[test]
    fn rotation_generator() {
        // exp of [[0, -θ],[θ, 0]] is a rotation.
        let theta = 2.3;
        let a = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => C64::new(-theta, 0.0),
            (1, 0) => C64::new(theta, 0.0),
            _ => C64::new(0.0, 0.0),
        });
        let e = expm(&a, 1.0).unwrap();
        assert!((e[(0, 0)].re - theta.cos()).abs() < 1e-14);
        assert!((e[(1, 0)].re - theta.sin()).abs() < 1e-14);
    }

    #[test]
    fn complex_diagonal() {
        let lam = [C64::new(-0.3, 2.0), C64::new(-4.0, -1.0), C64::new(0.5, 0.0)];
        let a = Mat::from_fn(3, 3, |i, j| if i == j { lam[i] } else { C64::new(0.0, 0.0) });
        let e = expm(&a, 3.0).unwrap();
        for i in 0..3 {
            let expect = (lam[i] * 3.0).exp();
            assert!((e[(i, i)] - expect).norm() < 1e-13 * expect.norm().max(1.0));
        }
    }
}
