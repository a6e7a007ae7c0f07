//! Fixed workloads shared by the benchmarks.

use transvect::{q, Rational};

/// Weight triples covering generic and special cases.
pub fn workload_weights() -> Vec<[Rational; 3]> {
    vec![
        [q(1, 1), q(2, 1), q(3, 1)],
        [q(-2, 3), q(-2, 3), q(-2, 3)],
        [q(-3, 4), q(-3, 4), q(-3, 4)],
        [q(0, 1), q(0, 1), q(-5, 2)],
    ]
}

/// A small grid for sweep benchmarks.
pub fn small_grid() -> Vec<Rational> {
    vec![q(0, 1), q(-2, 3), q(-1, 2), q(1, 1), q(-5, 4)]
}
