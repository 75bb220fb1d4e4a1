//! Shared fixtures for the criterion benchmarks.

use num_bigint::BigInt;

use betafield::linalg::IntMatrix;

/// A deterministic pseudo-random matrix with small entries, for the
/// normal-form benchmarks.
pub fn scrambled_matrix(rows: usize, cols: usize, seed: u64) -> IntMatrix {
    let mut state = seed | 1;
    let mut next = move || {
        // xorshift64
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state % 19) as i64 - 9
    };
    IntMatrix::from_rows(
        (0..rows)
            .map(|_| (0..cols).map(|_| BigInt::from(next())).collect())
            .collect(),
        cols,
    )
}
