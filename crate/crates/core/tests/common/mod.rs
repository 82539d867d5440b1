#![allow(dead_code)]

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pairpref::generate::{generate_instance, GeneratorParams};
use pairpref::oracle::{enumerate_stable, OracleLimits};
use pairpref::{Instance, Matching, OrderClass, StabilityNotion};

/// Instance number `k` of a reproducible family: sizes from max/2 up to max on each
/// side, density in [0.4, 1], and each side's class drawn at or below
/// the given bound.
pub fn family(k: u64, max: usize, men: OrderClass, women: OrderClass) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(k ^ 0x9e37_79b9);
    let men_count = rng.random_range(max.div_ceil(2)..=max);
    let women_count = rng.random_range(max.div_ceil(2)..=max);
    let density = rng.random_range(0.4..=1.0);
    let mut below = |bound: OrderClass| OrderClass::ALL[rng.random_range(0..=bound as usize)];
    let (men, women) = (below(men), below(women));
    generate_instance(&GeneratorParams::new(men_count, women_count, density, k).classes(men, women))
}

/// Every stable matching, asserting that the oracle finished.
pub fn all_stable(inst: &Instance, notion: StabilityNotion) -> Vec<Matching> {
    let a = enumerate_stable(inst, notion, &OracleLimits::default());
    assert!(a.exists().is_some(), "oracle hit a limit");
    a.matchings().map(<[Matching]>::to_vec).unwrap_or_default()
}

pub fn edges_of(ms: &[Matching]) -> HashSet<(usize, usize)> {
    ms.iter().flat_map(|m| m.pairs().iter().copied()).collect()
}
