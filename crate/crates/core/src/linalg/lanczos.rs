use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::C64;

#[derive(Clone, Debug)]
pub struct LanczosOptions {
    pub max_iter: usize,
    /// Stop once the Ritz residual is below `rel_tol · θ`.
    pub rel_tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            max_iter: 400,
            rel_tol: 1e-14,
            seed: 0x5eed,
        }
    }
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest eigenvalue of the symmetric tridiagonal matrix and the last
/// component of its unit eigenvector.
fn top_ritz(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let k = alpha.len();
    let t = Mat::<f64>::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let eig = t
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("tridiagonal eigenproblem converges");
    let s = eig.S().column_vector();
    let u = eig.U();
    (s[k - 1], u[(k - 1, k - 1)].abs())
}

/// Largest eigenvalue of a Hermitian operator given by its action
/// `apply(x, y)` (`y ← Hx`), by Lanczos with full reorthogonalisation.
pub fn largest_eig_hermitian(
    n: usize,
    mut apply: impl FnMut(&[C64], &mut [C64]),
    opts: &LanczosOptions,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut basis: Vec<Vec<C64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![C64::new(0.0, 0.0); n];
    let max_iter = opts.max_iter.min(n).max(1);
    let mut theta = 0.0;
    for k in 0..max_iter {
        apply(&basis[k], &mut w);
        let a = dot(&basis[k], &w).re;
        alpha.push(a);
        for (x, q) in w.iter_mut().zip(&basis[k]) {
            *x -= q * a;
        }
        if k > 0 {
            let b = beta[k - 1];
            for (x, q) in w.iter_mut().zip(&basis[k - 1]) {
                *x -= q * b;
            }
        }
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (x, qq) in w.iter_mut().zip(q) {
                    *x -= qq * c;
                }
            }
        }
        let b = norm(&w);
        let check = k < 50 || k % 5 == 0 || k + 1 == max_iter;
        if check {
            let (t, last) = top_ritz(&alpha, &beta);
            theta = t;
            if b * last <= opts.rel_tol * theta.abs() || b <= 1e-300 || k + 1 == max_iter {
                return theta;
            }
        } else if b <= 1e-300 {
            return top_ritz(&alpha, &beta).0;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    theta
}
