//! Shared inputs for the engine benchmarks.

use toric_nl::lattice::IntMatrix;
use toric_nl::{load_catalog, CatalogEntry};

/// Deterministic dense `n x n` integer matrix with entries in `-9..=9`.
pub fn dense_matrix(n: usize) -> IntMatrix {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let rows: Vec<Vec<i64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    ((state >> 33) % 19) as i64 - 9
                })
                .collect()
        })
        .collect();
    IntMatrix::from_rows(&rows).expect("square and nonempty")
}

pub fn entry(name: &str) -> CatalogEntry {
    load_catalog(name).expect("catalog entry")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrices_are_deterministic() {
        assert_eq!(dense_matrix(6).to_rows(), dense_matrix(6).to_rows());
        assert_eq!(dense_matrix(4).rows(), 4);
    }
}
