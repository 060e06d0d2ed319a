use super::C64;

/// LU factorisation with partial pivoting of a banded matrix.
///
/// Storage follows the LAPACK `gbtrf` layout in spirit: row interchanges are
/// applied progressively and the multipliers of step `k` are kept separately,
/// so `B = P₀ L₀ P₁ L₁ ⋯ U` with `U` of upper bandwidth `kl + ku`.
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    kl: usize,
    w: usize,
    u: Vec<C64>,
    l: Vec<C64>,
    piv: Vec<usize>,
    singular: bool,
}

impl BandLu {
    /// Factors the `n×n` matrix whose entry `(i, j)` is `entry(i, j)`; entries
    /// outside the band `j - i ∈ [-kl, ku]` are never queried.
    pub fn factor(n: usize, kl: usize, ku: usize, entry: impl Fn(usize, usize) -> C64) -> Self {
        let w = kl + ku;
        let width = 2 * kl + ku + 1;
        let zero = C64::new(0.0, 0.0);
        let mut ab = vec![zero; n * width];
        let idx = |i: usize, j: usize| i * width + (j + kl - i);
        for i in 0..n {
            let lo = i.saturating_sub(kl);
            let hi = (i + ku).min(n - 1);
            for j in lo..=hi {
                ab[idx(i, j)] = entry(i, j);
            }
        }
        let mut l = vec![zero; n * kl.max(1)];
        let mut piv = vec![0usize; n];
        let mut singular = false;
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let last_col = (k + w).min(n - 1);
            let mut p = k;
            let mut best = ab[idx(k, k)].norm();
            for i in k + 1..=last_row {
                let v = ab[idx(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            piv[k] = p;
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in k..=last_col {
                    ab.swap(idx(k, j), idx(p, j));
                }
            }
            let pivot = ab[idx(k, k)];
            for i in k + 1..=last_row {
                let m = ab[idx(i, k)] / pivot;
                l[k * kl + (i - k - 1)] = m;
                ab[idx(i, k)] = zero;
                if m != zero {
                    for j in k + 1..=last_col {
                        let ukj = ab[idx(k, j)];
                        ab[idx(i, j)] -= m * ukj;
                    }
                }
            }
        }
        let mut u = vec![zero; n * (w + 1)];
        for k in 0..n {
            for j in k..=(k + w).min(n - 1) {
                u[k * (w + 1) + (j - k)] = ab[idx(k, j)];
            }
        }
        Self {
            n,
            kl,
            w,
            u,
            l,
            piv,
            singular,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// True when an exactly zero pivot was met.
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Smallest pivot magnitude; a crude conditioning indicator.
    pub fn min_pivot(&self) -> f64 {
        (0..self.n)
            .map(|k| self.u[k * (self.w + 1)].norm())
            .fold(f64::INFINITY, f64::min)
    }

    fn u_at(&self, k: usize, j: usize) -> C64 {
        self.u[k * (self.w + 1) + (j - k)]
    }

    /// Overwrites `b` with `B⁻¹ b`.
    pub fn solve_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        for k in 0..n {
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for i in k + 1..=(k + self.kl).min(n - 1) {
                b[i] -= self.l[k * self.kl + (i - k - 1)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + self.w).min(n - 1) {
                s -= self.u_at(k, j) * b[j];
            }
            b[k] = s / self.u_at(k, k);
        }
    }

    /// Overwrites `b` with `B⁻* b`.
    pub fn solve_adjoint_in_place(&self, b: &mut [C64]) {
        let n = self.n;
        // U* y = b: forward substitution with the conjugate transpose.
        for k in 0..n {
            let mut s = b[k];
            for i in k.saturating_sub(self.w)..k {
                s -= self.u_at(i, k).conj() * b[i];
            }
            b[k] = s / self.u_at(k, k).conj();
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for i in k + 1..=(k + self.kl).min(n - 1) {
                s -= self.l[k * self.kl + (i - k - 1)].conj() * b[i];
            }
            b[k] = s;
            let p = self.piv[k];
            if p != k {
                b.swap(k, p);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use faer::Mat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn banded(n: usize, kl: usize, ku: usize, seed: u64) -> Mat<C64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Mat::from_fn(n, n, |i, j| {
            if (j + kl >= i) && (i + ku >= j) {
                // diagonal shift keeps random triangular cases well conditioned
                let shift = if i == j { 3.0 } else { 0.0 };
                C64::new(shift + rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    fn matvec(a: &Mat<C64>, x: &[C64], adjoint: bool) -> Vec<C64> {
        let n = a.nrows();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if adjoint { a[(j, i)].conj() * x[j] } else { a[(i, j)] * x[j] })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn solves_match_dense_products() {
        for &(n, kl, ku) in &[(1, 0, 0), (7, 1, 1), (30, 3, 2), (25, 0, 4), (40, 5, 0), (12, 11, 11)] {
            let a = banded(n, kl, ku, n as u64 * 31 + kl as u64);
            let lu = BandLu::factor(n, kl, ku, |i, j| a[(i, j)]);
            assert!(!lu.is_singular());
            let x: Vec<C64> = (0..n).map(|i| C64::new(i as f64 * 0.1 - 1.0, 0.5)).collect();
            for adjoint in [false, true] {
                let mut b = matvec(&a, &x, adjoint);
                if adjoint {
                    lu.solve_adjoint_in_place(&mut b);
                } else {
                    lu.solve_in_place(&mut b);
                }
                let err: f64 = b.iter().zip(&x).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
                assert!(err < 1e-9, "n={n} kl={kl} ku={ku} adjoint={adjoint} err={err}");
            }
        }
    }

    #[test]
    fn zero_matrix_is_singular() {
        let lu = BandLu::factor(3, 1, 1, |_, _| C64::new(0.0, 0.0));
        assert!(lu.is_singular());
    }
}
