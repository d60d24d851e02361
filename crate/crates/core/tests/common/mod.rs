#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vessel_core::synth;
use vessel_core::Vessel;

/// A vessel generated as a chain together with its parts.
pub struct Generated {
    pub parts: Vec<Vessel>,
    pub vessel: Vessel,
}

/// Fifty seeded vessels: a direct base vessel (outer dim 2..=4) with 0..=2
/// one-dimensional blocks coupled on top.
pub fn corpus() -> Vec<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut out = Vec::new();
    while out.len() < 50 {
        let i = out.len();
        let m = 2 + i % 3;
        let n = 1 + (i / 3) % m;
        let kappa = rng.random_range(0..=n);
        let blocks = i % 3;
        if let Ok((parts, vessel)) = synth::random_chain_vessel(&mut rng, m, n, blocks, kappa) {
            out.push(Generated { parts, vessel });
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
