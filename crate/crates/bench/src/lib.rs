//! Shared inputs for the benchmarks.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semitoeplitz::measures::{coefficient_table, CircleMeasure, CoeffSequence, SymbolTerm};
use semitoeplitz::toeplitz::FiniteVector;

/// Raised cosine plus a power weight and two atoms: every coefficient path is exercised.
pub fn mixed_measure() -> CircleMeasure {
    CircleMeasure::absolutely_continuous(SymbolTerm::raised_cosine())
        .with_term(SymbolTerm::power(1.5))
        .with_atom(0.0, 1.0)
        .with_atom(2.0, 0.25)
}

pub fn mixed_coefficients(n_max: usize) -> CoeffSequence {
    let grid = semitoeplitz::measures::adequate_grid(n_max, semitoeplitz::DEFAULT_GRID);
    coefficient_table(&mixed_measure(), n_max, grid).expect("fixture resolves")
}

pub fn random_vector(len: usize, seed: u64) -> FiniteVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    FiniteVector::new(
        (0..len)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
    )
}

/// Reference matvec by the explicit double loop.
pub fn dense_apply(t: &CoeffSequence, g: &FiniteVector, out_len: usize) -> Vec<Complex64> {
    (0..out_len)
        .map(|n| {
            g.as_slice()
                .iter()
                .enumerate()
                .map(|(m, gm)| t.get(n as i64 - m as i64) * gm)
                .sum()
        })
        .collect()
}
