//! Seeded random model generation for property suites.
//!
//! Generation is a pure function of the seed: the generator is a fixed
//! splitmix64 chain, so corpora are reproducible across platforms and
//! toolchain versions.

use num_rational::BigRational;

use crate::model::{Gps, Lts};
use crate::rational::ratio;

/// Minimal splitmix64 generator.
#[derive(Debug, Clone)]
pub struct SplitMix {
    state: u64,
}

impl SplitMix {
    pub fn new(seed: u64) -> SplitMix {
        SplitMix { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform draw from `0..bound` (bound > 0).
    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

/// Generates an LTS with `n_states` states over labels `a`, `b`, ... where
/// each of the `n_states * n_actions * n_states` possible transitions is
/// included independently with probability `density`.
///
/// Requires `n_states >= 1` and `n_actions <= 26`.
pub fn random_lts(seed: u64, n_states: u32, n_actions: u16, density: (u64, u64)) -> Lts {
    assert!(n_states >= 1, "need at least one state");
    assert!(n_actions <= 26, "labels range over a..z");
    assert!(density.1 > 0 && density.0 <= density.1, "density in [0,1]");
    let mut rng = SplitMix::new(seed);
    // include iff draw < density * 2^64, computed exactly
    let threshold: u128 = ((density.0 as u128) << 64) / density.1 as u128;
    let labels: Vec<String> = (0..n_actions)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let mut transitions = Vec::new();
    for src in 0..n_states {
        for a in 0..n_actions {
            for dst in 0..n_states {
                if (rng.next_u64() as u128) < threshold {
                    transitions.push((src, labels[a as usize].as_str(), dst));
                }
            }
        }
    }
    Lts::new(n_states, 0, &transitions).expect("generated model is valid")
}

/// Generates a GPS with dyadic probabilities: each state gets 1, 2 or 4
/// branches with masses 1, (1/2, 1/2) or (1/4, 1/4, 1/4, 1/4); duplicate
/// `(action, target)` picks merge by adding mass.
pub fn random_gps(seed: u64, n_states: u32, n_actions: u16) -> Gps {
    assert!(n_states >= 1 && (1..=26).contains(&n_actions));
    let mut rng = SplitMix::new(seed ^ 0x6770735f73656564);
    let labels: Vec<String> = (0..n_actions)
        .map(|i| ((b'a' + i as u8) as char).to_string())
        .collect();
    let mut transitions: Vec<(u32, BigRational, &str, u32)> = Vec::new();
    let masses: [&[(i64, i64)]; 3] = [
        &[(1, 1)],
        &[(1, 2), (1, 2)],
        &[(1, 4), (1, 4), (1, 4), (1, 4)],
    ];
    let mut staged: Vec<(u32, (i64, i64), u16, u32)> = Vec::new();
    for src in 0..n_states {
        let shape = masses[rng.below(3) as usize];
        for &(num, den) in shape {
            let act = rng.below(n_actions as u64) as u16;
            let dst = rng.below(n_states as u64) as u32;
            staged.push((src, (num, den), act, dst));
        }
    }
    for &(src, (num, den), act, dst) in &staged {
        transitions.push((src, ratio(num, den), labels[act as usize].as_str(), dst));
    }
    Gps::new(n_states, 0, &transitions).expect("generated model is valid")
}
