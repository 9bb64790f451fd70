//! Shared workloads for the benchmarks.

use mfact::Alpha;

/// Exponent tuples of increasing box size.
pub fn sample_alphas() -> Vec<Alpha> {
    [
        &[4, 4][..],
        &[2, 3, 4],
        &[1, 1, 2, 2, 3],
        &[6, 6, 6],
        &[1; 10],
    ]
    .iter()
    .map(|v| Alpha::new(v.to_vec()).expect("valid tuple"))
    .collect()
}

/// Highly composite integers, which have the most factorizations.
pub const COMPOSITE_N: [u64; 4] = [720, 55_440, 720_720, 73_513_440];
