//! Small worked instances used by the test suites and the CLI demo data.

use crate::model::Instance;

/// Nine jobs on a capacity-40 machine, used to illustrate classic and improved
/// greedy construction.
pub fn greedy_example() -> Instance {
    Instance::from_triples(
        40,
        &[
            (19, 17, 36),
            (28, 13, 35),
            (44, 27, 32),
            (14, 7, 32),
            (16, 15, 34),
            (23, 14, 36),
            (37, 27, 36),
            (10, 2, 37),
            (43, 28, 36),
        ],
    )
    .expect("fixture is valid")
}

/// Nine jobs on a capacity-40 machine, used to illustrate the local-search moves.
pub fn moves_example() -> Instance {
    Instance::from_triples(
        40,
        &[
            (22, 37, 35),
            (4, 18, 10),
            (3, 5, 12),
            (2, 12, 21),
            (24, 9, 26),
            (50, 2, 15),
            (8, 10, 17),
            (5, 4, 36),
            (10, 25, 24),
        ],
    )
    .expect("fixture is valid")
}
