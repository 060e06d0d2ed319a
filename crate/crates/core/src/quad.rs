//! Composite quadrature helpers.

use crate::error::{Error, Result};

/// Weight of node `k` in the composite Simpson rule with `panels` (even) panels,
/// before the `h/3` factor.
pub fn simpson_weight(k: usize, panels: usize) -> f64 {
    if k == 0 || k == panels {
        1.0
    } else if k % 2 == 1 {
        4.0
    } else {
        2.0
    }
}

/// Composite Simpson rule on `[a, b]`; `panels` is rounded up to an even number.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(2) + panels % 2;
    let h = (b - a) / panels as f64;
    let s: f64 = (0..=panels)
        .map(|k| simpson_weight(k, panels) * f(a + k as f64 * h))
        .sum();
    s * h / 3.0
}

/// Simpson with panel doubling until the relative change drops below `rel_tol`.
pub fn simpson_converged(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<f64> {
    let mut panels = 64;
    let mut prev = simpson(&f, a, b, panels);
    while panels < max_panels {
        panels *= 2;
        let next = simpson(&f, a, b, panels);
        if (next - prev).abs() <= rel_tol * next.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature(format!(
        "Simpson rule on [{a}, {b}] did not reach relative tolerance {rel_tol} with {max_panels} panels"
    )))
}

/// Trapezoid rule on tabulated values with uniform step.
pub fn trapezoid_uniform(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_is_exact_on_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn converged_exponential() {
        let v = simpson_converged(|x| (2.0 * x).exp(), 0.0, 1.0, 1e-10, 1 << 20).unwrap();
        let exact = (2f64.exp() - 1.0) / 2.0;
        assert!((v - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn trapezoid_on_linear_is_exact() {
        let vals: Vec<f64> = (0..=10).map(|i| 3.0 * i as f64 * 0.1 + 1.0).collect();
        assert!((trapezoid_uniform(&vals, 0.1) - 2.5).abs() < 1e-14);
    }
}
