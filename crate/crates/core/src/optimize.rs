//! Deterministic one-dimensional minimisation: a coarse grid followed by
//! golden-section refinement around the best grid point.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Number of coarse grid points used before refinement.
pub const COARSE_GRID: usize = 256;

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping once the
/// bracket is below `rel_tol·max(1, |x|)`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, rel_tol: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * c.abs().max(1.0) {
            break;
        }
        // `<=` keeps the left point on ties.
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimises `f` over the open interval `(lo, hi)`: `grid` interior points,
/// then golden-section on the neighbouring bracket. Ties go to the smaller
/// argument. Non-finite values count as `+∞`.
pub fn minimize_open(f: impl Fn(f64) -> f64, lo: f64, hi: f64, grid: usize, rel_tol: f64) -> (f64, f64) {
    let g = |x: f64| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    let grid = grid.max(3);
    let step = (hi - lo) / (grid + 1) as f64;
    let xs: Vec<f64> = (1..=grid).map(|i| lo + i as f64 * step).collect();
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (i, &x) in xs.iter().enumerate() {
        let v = g(x);
        if v < best_val {
            best = i;
            best_val = v;
        }
    }
    let left = if best == 0 { lo + 0.5 * step } else { xs[best - 1] };
    let right = if best + 1 == xs.len() { hi - 0.5 * step } else { xs[best + 1] };
    let (x, v) = golden_section(g, left, right, rel_tol);
    if v < best_val {
        (x, v)
    } else {
        (xs[best], best_val)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_minimum() {
        let (x, v) = minimize_open(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, COARSE_GRID, 1e-10);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_function_goes_to_the_edge() {
        let (x, _) = minimize_open(|x| x, 0.0, 1.0, 16, 1e-10);
        assert!(x < 0.06);
    }
}
