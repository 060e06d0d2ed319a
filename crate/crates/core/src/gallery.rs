//! Finite-difference test operators and synthetic non-normal matrices.
//!
//! Every builder returns the generator `A = -P`, so the spectrum sits in the
//! left half-plane and `e^{tA}` decays.

use std::f64::consts::PI;

use faer::Mat;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{OperatorMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    CenteredSecondOrder,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    #[default]
    Dirichlet,
}

/// Uniform grid with `n_points` interior nodes on a domain of length `length`
/// (`[0, L]` for the half-line model, `[-L, L]` for the whole-line ones).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretizationSpec {
    pub n_points: usize,
    pub length: f64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub boundary: Boundary,
}

impl DiscretizationSpec {
    pub const MIN_POINTS: usize = 16;

    pub fn new(n_points: usize, length: f64) -> Result<Self> {
        let spec = Self {
            n_points,
            length,
            scheme: Scheme::default(),
            boundary: Boundary::default(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_points < Self::MIN_POINTS {
            return Err(Error::Structural(format!(
                "discretization needs at least {} points, got {}",
                Self::MIN_POINTS,
                self.n_points
            )));
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::Structural(format!("domain length must be positive, got {}", self.length)));
        }
        Ok(())
    }

    pub fn airy_default() -> Self {
        Self::new(400, 20.0).expect("valid defaults")
    }

    pub fn davies_default() -> Self {
        Self::new(600, 12.0).expect("valid defaults")
    }

    pub fn kfp_default() -> Self {
        Self::new(40, 6.0).expect("valid defaults")
    }
}

fn tridiagonal(n: usize, diag: impl Fn(usize) -> C64, off: C64) -> Result<OperatorMatrix> {
    OperatorMatrix::from_fn(n, |i, j| {
        if i == j {
            diag(i)
        } else if i.abs_diff(j) == 1 {
            off
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// `A = -(D_x² + ix)` on `[0, L]` with Dirichlet ends, `D_x² = -d²/dx²`.
pub fn build_complex_airy(spec: &DiscretizationSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    let n = spec.n_points;
    let dx = spec.length / (n + 1) as f64;
    let inv = 1.0 / (dx * dx);
    let a = tridiagonal(
        n,
        |j| C64::new(-2.0 * inv, -((j + 1) as f64 * dx)),
        C64::new(inv, 0.0),
    )?;
    Ok(a.with_label(format!("complex Airy, n={n}, L={}", spec.length)))
}

/// `A = -(D_x² + ix²)` on `[-L, L]` with Dirichlet ends.
pub fn build_davies_oscillator(spec: &DiscretizationSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    let n = spec.n_points;
    let l = spec.length;
    let dx = 2.0 * l / (n + 1) as f64;
    let inv = 1.0 / (dx * dx);
    let a = tridiagonal(
        n,
        |j| {
            let x = -l + (j + 1) as f64 * dx;
            C64::new(-2.0 * inv, -x * x)
        },
        C64::new(inv, 0.0),
    )?;
    Ok(a.with_label(format!("Davies oscillator, n={n}, L={l}")))
}

/// Smallest eigenvalue of the discrete `-d²/dy² + y²` on the `n`-point grid
/// with spacing `dy` centred at 0.
fn discrete_oscillator_ground_energy(n: usize, l: f64, dy: f64) -> f64 {
    let inv = 1.0 / (dy * dy);
    let h = Mat::<f64>::from_fn(n, n, |i, j| {
        if i == j {
            let y = -l + (i + 1) as f64 * dy;
            2.0 * inv + y * y
        } else if i.abs_diff(j) == 1 {
            -inv
        } else {
            0.0
        }
    });
    let ev = h
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("symmetric tridiagonal eigenproblem converges");
    ev[0]
}

/// Quadratic Kramers–Fokker–Planck model with `h = 1`, `V(x) = x²/2`:
/// `P = y∂_x - x∂_y + (γ/2)(-∂_y² + y² - E₀)` on `[-L, L]²`, returned as `A = -P`.
///
/// `E₀` is the ground energy of the discrete `-∂_y² + y²`, which keeps the
/// discrete operator exactly accretive (its continuum value is 1). Unknowns
/// are ordered `ix·n + iy`.
pub fn build_kfp_quadratic(gamma: f64, spec: &DiscretizationSpec) -> Result<OperatorMatrix> {
    spec.validate()?;
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Structural(format!("gamma must be positive, got {gamma}")));
    }
    let n = spec.n_points;
    let l = spec.length;
    let d = 2.0 * l / (n + 1) as f64;
    let coord = |k: usize| -l + (k + 1) as f64 * d;
    let e0 = discrete_oscillator_ground_energy(n, l, d);
    let inv2 = 1.0 / (d * d);
    let c = 1.0 / (2.0 * d);
    let g = 0.5 * gamma;
    let dim = n * n;
    let a = OperatorMatrix::from_fn(dim, |row, col| {
        let (ix, iy) = (row / n, row % n);
        let (jx, jy) = (col / n, col % n);
        let (x, y) = (coord(ix), coord(iy));
        let mut p = 0.0;
        if ix == jx && iy == jy {
            p += g * (2.0 * inv2 + y * y - e0);
        }
        if iy == jy && jx == ix + 1 {
            p += y * c;
        }
        if iy == jy && jx + 1 == ix {
            p -= y * c;
        }
        if ix == jx && jy == iy + 1 {
            p += -x * c - g * inv2;
        }
        if ix == jx && jy + 1 == iy {
            p += x * c - g * inv2;
        }
        C64::new(-p, 0.0)
    })?;
    Ok(a.with_label(format!("quadratic KFP, gamma={gamma}, {n}x{n}, L={l}")))
}

/// `n×n` Jordan block with eigenvalue `lambda`.
pub fn build_jordan(n: usize, lambda: C64) -> Result<OperatorMatrix> {
    let a = OperatorMatrix::from_fn(n, |i, j| {
        if i == j {
            lambda
        } else if j == i + 1 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })?;
    Ok(a.with_label(format!("Jordan block n={n}, lambda={lambda}")))
}

/// Toeplitz matrix with entry `(i, j)` equal to `first_col[i - j]` below the
/// diagonal and `first_row[j - i]` above it; missing entries are zero.
pub fn build_toeplitz(first_col: &[C64], first_row: &[C64], n: usize) -> Result<OperatorMatrix> {
    if let (Some(c), Some(r)) = (first_col.first(), first_row.first()) {
        if c != r {
            return Err(Error::Structural(format!(
                "first column and first row disagree on the diagonal: {c} vs {r}"
            )));
        }
    }
    let zero = C64::new(0.0, 0.0);
    let a = OperatorMatrix::from_fn(n, |i, j| {
        if i >= j {
            first_col.get(i - j).copied().unwrap_or(zero)
        } else {
            first_row.get(j - i).copied().unwrap_or(zero)
        }
    })?;
    Ok(a.with_label(format!("Toeplitz n={n}")))
}

/// `Q (D + departure·N) Q*` with `D` diagonal (real parts in `[-2, -0.3]`),
/// `N` strictly upper triangular Gaussian and `Q` a random unitary.
pub fn build_random_nonnormal(n: usize, seed: u64, departure: f64) -> Result<OperatorMatrix> {
    if n == 0 {
        return Err(Error::Structural("dimension must be at least 1".into()));
    }
    if !departure.is_finite() || departure < 0.0 {
        return Err(Error::Structural(format!("departure must be a finite non-negative number, got {departure}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let re = Uniform::new_inclusive(-2.0, -0.3).expect("valid range");
    let im = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
    let diag: Vec<C64> = (0..n).map(|_| C64::new(re.sample(&mut rng), im.sample(&mut rng))).collect();
    let mut gauss = || -> f64 { StandardNormal.sample(&mut rng) };
    let mut upper = Mat::<C64>::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            upper[(i, j)] = C64::new(gauss(), gauss()) * std::f64::consts::FRAC_1_SQRT_2;
        }
    }
    let g = Mat::<C64>::from_fn(n, n, |_, _| C64::new(gauss(), gauss()));
    let q = g.qr().compute_Q();
    let t = Mat::<C64>::from_fn(n, n, |i, j| {
        let d = if i == j { diag[i] } else { C64::new(0.0, 0.0) };
        d + upper[(i, j)] * departure
    });
    let a = &(&q * &t) * q.adjoint();
    Ok(OperatorMatrix::from_mat(a)?.with_label(format!("random non-normal n={n}, seed={seed}, departure={departure}")))
}

fn default_lambda() -> [f64; 2] {
    [-1.0, 0.0]
}
fn default_gamma() -> f64 {
    1.0
}
fn default_departure() -> f64 {
    1.0
}

/// Named gallery entry with its parameters; the serialized form is the
/// operator block of a run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum GalleryEntry {
    Airy {
        #[serde(default = "GalleryEntry::airy_n")]
        n: usize,
        #[serde(default = "GalleryEntry::airy_l")]
        length: f64,
    },
    Davies {
        #[serde(default = "GalleryEntry::davies_n")]
        n: usize,
        #[serde(default = "GalleryEntry::davies_l")]
        length: f64,
    },
    Kfp {
        #[serde(default = "GalleryEntry::kfp_n")]
        n: usize,
        #[serde(default = "GalleryEntry::kfp_l")]
        length: f64,
        #[serde(default = "default_gamma")]
        gamma: f64,
    },
    Jordan {
        #[serde(default = "GalleryEntry::jordan_n")]
        n: usize,
        #[serde(default = "default_lambda")]
        lambda: [f64; 2],
    },
    Toeplitz {
        n: usize,
        first_col: Vec<[f64; 2]>,
        first_row: Vec<[f64; 2]>,
    },
    RandomNonnormal {
        #[serde(default = "GalleryEntry::random_n")]
        n: usize,
        /// Falls back to the run seed, or 0, when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default = "default_departure")]
        departure: f64,
    },
}

impl GalleryEntry {
    pub const NAMES: [&'static str; 6] = ["airy", "davies", "kfp", "jordan", "toeplitz", "random_nonnormal"];

    fn airy_n() -> usize {
        400
    }
    fn airy_l() -> f64 {
        20.0
    }
    fn davies_n() -> usize {
        600
    }
    fn davies_l() -> f64 {
        12.0
    }
    fn kfp_n() -> usize {
        40
    }
    fn kfp_l() -> f64 {
        6.0
    }
    fn jordan_n() -> usize {
        2
    }
    fn random_n() -> usize {
        8
    }

    /// Entry with default parameters. The Toeplitz default is the 32×32
    /// tridiagonal matrix with diagonal -3, subdiagonal 1 and superdiagonal 2.
    pub fn by_name(name: &str) -> Result<Self> {
        let entry = match name {
            "airy" => GalleryEntry::Airy { n: Self::airy_n(), length: Self::airy_l() },
            "davies" => GalleryEntry::Davies { n: Self::davies_n(), length: Self::davies_l() },
            "kfp" => GalleryEntry::Kfp { n: Self::kfp_n(), length: Self::kfp_l(), gamma: 1.0 },
            "jordan" => GalleryEntry::Jordan { n: 2, lambda: default_lambda() },
            "toeplitz" => GalleryEntry::Toeplitz {
                n: 32,
                first_col: vec![[-3.0, 0.0], [1.0, 0.0]],
                first_row: vec![[-3.0, 0.0], [2.0, 0.0]],
            },
            "random_nonnormal" | "random" => GalleryEntry::RandomNonnormal { n: 8, seed: None, departure: 1.0 },
            other => {
                return Err(Error::Structural(format!(
                    "unknown gallery operator '{other}'; known: {}",
                    Self::NAMES.join(", ")
                )))
            }
        };
        Ok(entry)
    }

    pub fn name(&self) -> &'static str {
        match self {
            GalleryEntry::Airy { .. } => "airy",
            GalleryEntry::Davies { .. } => "davies",
            GalleryEntry::Kfp { .. } => "kfp",
            GalleryEntry::Jordan { .. } => "jordan",
            GalleryEntry::Toeplitz { .. } => "toeplitz",
            GalleryEntry::RandomNonnormal { .. } => "random_nonnormal",
        }
    }

    pub fn build(&self) -> Result<OperatorMatrix> {
        self.build_seeded(0)
    }

    /// Builds the operator; a random entry without its own seed uses `seed`.
    pub fn build_seeded(&self, seed: u64) -> Result<OperatorMatrix> {
        let c = |p: &[f64; 2]| C64::new(p[0], p[1]);
        match self {
            GalleryEntry::Airy { n, length } => build_complex_airy(&DiscretizationSpec::new(*n, *length)?),
            GalleryEntry::Davies { n, length } => build_davies_oscillator(&DiscretizationSpec::new(*n, *length)?),
            GalleryEntry::Kfp { n, length, gamma } => {
                build_kfp_quadratic(*gamma, &DiscretizationSpec::new(*n, *length)?)
            }
            GalleryEntry::Jordan { n, lambda } => build_jordan(*n, c(lambda)),
            GalleryEntry::Toeplitz { n, first_col, first_row } => {
                let col: Vec<C64> = first_col.iter().map(c).collect();
                let row: Vec<C64> = first_row.iter().map(c).collect();
                build_toeplitz(&col, &row, *n)
            }
            GalleryEntry::RandomNonnormal { n, seed: own, departure } => {
                build_random_nonnormal(*n, own.unwrap_or(seed), *departure)
            }
        }
    }
}

/// The ray `e^{iθ}` used to describe the Airy and Davies spectra of `P`.
pub fn ray(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Argument of the Airy ray for `P`.
pub const AIRY_ARG: f64 = PI / 3.0;
/// Argument of the Davies ray for `P`.
pub const DAVIES_ARG: f64 = PI / 4.0;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigenvalues, norm2, spectral_abscissa};

    /// Ai(x) from its Maclaurin series; accurate for |x| ≲ 6.
    fn airy_ai(x: f64) -> (f64, f64) {
        const C1: f64 = 0.355_028_053_887_817;
        const C2: f64 = 0.258_819_403_792_807;
        let (mut f, mut g) = (1.0, x);
        let (mut df, mut dg) = (0.0, 1.0);
        let (mut tf, mut tg) = (1.0, x);
        let x3 = x * x * x;
        for k in 1..200 {
            let k = k as f64;
            tf *= x3 / ((3.0 * k - 1.0) * (3.0 * k));
            tg *= x3 / ((3.0 * k) * (3.0 * k + 1.0));
            f += tf;
            g += tg;
            df += 3.0 * k * tf / x;
            dg += (3.0 * k + 1.0) * tg / x;
        }
        (C1 * f - C2 * g, C1 * df - C2 * dg)
    }

    fn airy_zero(guess: f64) -> f64 {
        let mut x = guess;
        for _ in 0..50 {
            let (v, d) = airy_ai(x);
            x -= v / d;
        }
        x
    }

    #[test]
    fn airy_zero_oracle() {
        assert!((airy_zero(-2.3) + 2.338_107_410_459_767).abs() < 1e-9);
        assert!((airy_zero(-4.1) + 4.087_949_444_130_97).abs() < 1e-9);
    }

    #[test]
    fn airy_leading_eigenvalues() {
        let a = build_complex_airy(&DiscretizationSpec::airy_default()).unwrap();
        let ev = eigenvalues(&a).unwrap();
        // the far Dirichlet end adds a mirror family with equal real parts,
        // so match each physical eigenvalue by distance instead of by rank
        for guess in [-2.3, -4.1] {
            let lam = -airy_zero(guess);
            let expect = -ray(AIRY_ARG) * lam;
            let near = ev.iter().map(|z| (z - expect).norm()).fold(f64::INFINITY, f64::min);
            assert!(near < 0.01 * lam, "{near} from {expect}");
        }
        let lam1 = -airy_zero(-2.3);
        assert!(spectral_abscissa(&a).unwrap() <= -lam1 * (PI / 3.0).cos() * 0.99);
    }

    #[test]
    fn davies_leading_eigenvalues() {
        let a = build_davies_oscillator(&DiscretizationSpec::new(300, 10.0).unwrap()).unwrap();
        let ev = eigenvalues(&a).unwrap();
        for j in 0..3 {
            let expect = -ray(DAVIES_ARG) * (2 * j + 1) as f64;
            assert!((ev[j] - expect).norm() < 0.01 * expect.norm(), "{} vs {}", ev[j], expect);
        }
    }

    #[test]
    fn davies_resolvent_decreases_downward() {
        // Along the imaginary axis of A, the resolvent of P at Im z → -∞
        // corresponds to Im z → +∞ for A = -P.
        let a = build_davies_oscillator(&DiscretizationSpec::new(200, 10.0).unwrap()).unwrap();
        let mut prev = f64::INFINITY;
        for y in [2.0, 4.0, 8.0, 16.0, 32.0] {
            let v = crate::linalg::resolvent_norm(&a, C64::new(0.0, y)).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn airy_second_order_convergence() {
        let lead = |n: usize| {
            let a = build_complex_airy(&DiscretizationSpec::new(n, 20.0).unwrap()).unwrap();
            eigenvalues(&a).unwrap()[0]
        };
        let (e1, e2, e3) = (lead(50), lead(100), lead(200));
        let (d1, d2) = ((e2 - e1).norm(), (e3 - e2).norm());
        assert!(d1 >= 3.0 * d2, "{d1} {d2}");
    }

    #[test]
    fn kfp_is_accretive_with_closed_left_spectrum() {
        let a = build_kfp_quadratic(1.0, &DiscretizationSpec::new(16, 5.0).unwrap()).unwrap();
        let nrm = a.norm2();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let u: Vec<C64> = (0..a.dim())
                .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
                .collect();
            let mut num = C64::new(0.0, 0.0);
            for i in 0..a.dim() {
                let mut pu = C64::new(0.0, 0.0);
                for j in 0..a.dim() {
                    pu -= a.get(i, j) * u[j];
                }
                num += u[i].conj() * pu;
            }
            let den: f64 = u.iter().map(|x| x.norm_sqr()).sum();
            assert!(num.re / den >= -1e-6 * nrm);
        }
        assert!(spectral_abscissa(&a).unwrap() <= 1e-6);
    }

    #[test]
    fn jordan_and_toeplitz_agree() {
        let j = build_jordan(2, C64::new(-1.0, 0.0)).unwrap();
        assert_eq!(
            j.entries(),
            vec![C64::new(-1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0)]
        );
        let t = build_toeplitz(&[C64::new(-1.0, 0.0)], &[C64::new(-1.0, 0.0), C64::new(1.0, 0.0)], 5).unwrap();
        assert_eq!(t.mat(), build_jordan(5, C64::new(-1.0, 0.0)).unwrap().mat());
    }

    #[test]
    fn random_nonnormal_departure_grows_commutator() {
        let comm = |d: f64| {
            let a = build_random_nonnormal(8, 42, d).unwrap();
            let m = a.mat();
            norm2(&(&(m * m.adjoint()) - &(m.adjoint() * m)))
        };
        let vals: Vec<f64> = [0.0, 0.5, 1.0, 2.0].iter().map(|&d| comm(d)).collect();
        assert!(vals[0] < 1e-12);
        assert!(vals.windows(2).all(|w| w[1] > w[0]), "{vals:?}");
    }

    #[test]
    fn builders_are_deterministic() {
        for name in GalleryEntry::NAMES {
            let mut entry = GalleryEntry::by_name(name).unwrap();
            if let GalleryEntry::Kfp { n, .. } = &mut entry {
                *n = 16;
            }
            assert_eq!(entry.build().unwrap(), entry.build().unwrap());
        }
    }

    #[test]
    fn spec_rejects_small_grids() {
        assert!(DiscretizationSpec::new(8, 1.0).is_err());
        assert!(DiscretizationSpec::new(32, 0.0).is_err());
    }
}
