//! Fixtures shared by the benchmarks in `benches/`.

use semibound_core::gallery::{build_davies_oscillator, build_random_nonnormal, DiscretizationSpec};
use semibound_core::OperatorMatrix;

/// Seeded dense nonnormal matrix of dimension `n`.
pub fn dense(n: usize) -> OperatorMatrix {
    build_random_nonnormal(n, 11, 1.0).expect("valid fixture")
}

/// Tridiagonal Davies operator with `n` interior points on `[-12, 12]`.
pub fn davies(n: usize) -> OperatorMatrix {
    build_davies_oscillator(&DiscretizationSpec::new(n, 12.0).expect("valid spec")).expect("valid fixture")
}
