//! Shared corpus builders for the integration suites.

use spectrum_core::model::{random_gps, random_lts, Gps, Lts};

/// 200 seeded transition systems: up to 8 states, up to 3 actions, densities
/// 0.1/0.3/0.6.
pub fn lts_corpus() -> Vec<Lts> {
    let densities = [(1u64, 10u64), (3, 10), (6, 10)];
    (0..200)
        .map(|i| {
            random_lts(
                1_000 + i as u64,
                1 + (i % 8) as u32,
                1 + (i % 3) as u16,
                densities[(i / 8) % 3],
            )
        })
        .collect()
}

/// 50 seeded probabilistic systems with dyadic probabilities, up to 6 states.
pub fn gps_corpus() -> Vec<Gps> {
    (0..50)
        .map(|i| random_gps(2_000 + i as u64, 1 + (i % 6) as u32, 1 + (i % 3) as u16))
        .collect()
}
