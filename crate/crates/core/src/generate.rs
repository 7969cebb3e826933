//! Seeded random instance generators.

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, ObjectiveMode, WeightedSet};

/// Inclusive weight range for generated sets.
pub const WEIGHT_RANGE: (u32, u32) = (1, 100);

/// `(n, r, p, beta)` plus a seed and the objective mode to stamp on the result.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InstanceConfig {
    pub n: usize,
    pub r: usize,
    pub p: usize,
    pub beta: f64,
    pub seed: u64,
    pub mode: ObjectiveMode,
}

impl InstanceConfig {
    pub fn new(n: usize, r: usize, p: usize, beta: f64, seed: u64) -> Self {
        InstanceConfig { n, r, p, beta, seed, mode: ObjectiveMode::HitRewardCoverPenalty }
    }

    pub fn with_mode(mut self, mode: ObjectiveMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Largest set size, `ceil(beta * n)`, at least 1.
    pub fn max_set_size(&self) -> usize {
        // the epsilon keeps 0.1 * 30 from rounding up to 4
        let raw = (self.beta * self.n as f64 - 1e-9).ceil();
        (raw.max(1.0) as usize).min(self.n.max(1))
    }

    pub fn check(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::InfeasibleConfig(format!("beta must lie in (0, 1], got {}", self.beta)));
        }
        if self.n == 0 && self.r + self.p > 0 {
            return Err(Error::InfeasibleConfig("n = 0 leaves no players to put in sets".into()));
        }
        Ok(())
    }
}

/// Derives an independent sub-seed for stream `index` of a master seed.
pub fn sub_seed(master: u64, index: u64) -> u64 {
    // SplitMix64 finaliser over the combined value
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn random_set(rng: &mut ChaCha8Rng, n: usize, max_size: usize) -> WeightedSet {
    let size = rng.gen_range(1..=max_size);
    let members = sample(rng, n, size).into_iter().map(|i| i + 1);
    let weight = rng.gen_range(WEIGHT_RANGE.0..=WEIGHT_RANGE.1) as f64;
    WeightedSet::new(members, weight)
}

/// Draws `r` reward and `p` penalty sets with sizes uniform in
/// `1..=ceil(beta n)` and integer weights uniform in [`WEIGHT_RANGE`].
pub fn generate(config: &InstanceConfig) -> Result<Instance> {
    config.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let max_size = config.max_set_size();
    let mut inst = Instance::new(config.n, config.mode);
    for _ in 0..config.r {
        inst.reward_sets.push(random_set(&mut rng, config.n, max_size));
    }
    for _ in 0..config.p {
        inst.penalty_sets.push(random_set(&mut rng, config.n, max_size));
    }
    Ok(inst)
}

/// Random laminar family in hit-reward mode.
///
/// The players are shuffled and recursively cut into 2 or 3 contiguous
/// blocks; each block is kept with some probability and labelled reward,
/// penalty or both. Blocks are pairwise distinct as sets, so no reward
/// (penalty) set repeats.
pub fn generate_laminar(n: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut players: Vec<usize> = (1..=n).collect();
    rand::seq::SliceRandom::shuffle(players.as_mut_slice(), &mut rng);
    let mut inst = Instance::new(n, ObjectiveMode::HitRewardCoverPenalty);
    if n > 0 {
        split_block(&players, &mut rng, &mut inst, 0);
    }
    inst
}

fn split_block(block: &[usize], rng: &mut ChaCha8Rng, inst: &mut Instance, depth: usize) {
    if rng.gen_bool(0.7) {
        let weight = |rng: &mut ChaCha8Rng| rng.gen_range(WEIGHT_RANGE.0..=WEIGHT_RANGE.1) as f64;
        let label: f64 = rng.gen();
        if !(0.5..0.85).contains(&label) {
            let w = weight(rng);
            inst.reward_sets.push(WeightedSet::new(block.iter().copied(), w));
        }
        if label >= 0.5 {
            let w = weight(rng);
            inst.penalty_sets.push(WeightedSet::new(block.iter().copied(), w));
        }
    }
    if block.len() < 2 || depth > 8 {
        return;
    }
    let parts = rng.gen_range(2..=3usize).min(block.len());
    let mut cuts: Vec<usize> = sample(rng, block.len() - 1, parts - 1).into_iter().map(|c| c + 1).collect();
    cuts.sort_unstable();
    let mut start = 0;
    for end in cuts.into_iter().chain(std::iter::once(block.len())) {
        split_block(&block[start..end], rng, inst, depth + 1);
        start = end;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute::brute_force;

    #[test]
    fn generation_is_deterministic() {
        let cfg = InstanceConfig::new(5, 2, 2, 1.0, 17);
        assert_eq!(generate(&cfg).unwrap(), generate(&cfg).unwrap());
        let other = generate(&cfg.with_seed(18)).unwrap();
        assert_ne!(generate(&cfg).unwrap(), other);
    }

    #[test]
    fn set_sizes_respect_beta() {
        let cfg = InstanceConfig::new(100, 100, 100, 0.25, 3);
        assert_eq!(cfg.max_set_size(), 25);
        let inst = generate(&cfg).unwrap();
        assert_eq!(inst.reward_sets.len(), 100);
        assert_eq!(inst.penalty_sets.len(), 100);
        for s in inst.reward_sets.iter().chain(&inst.penalty_sets) {
            assert!((1..=25).contains(&s.len()));
            assert!(s.weight >= 1.0 && s.weight <= 100.0 && s.weight.fract() == 0.0);
        }
        assert!(inst.validate().is_empty());
        assert_eq!(InstanceConfig::new(30, 0, 0, 0.1, 0).max_set_size(), 3);
    }

    #[test]
    fn empty_config() {
        let inst = generate(&InstanceConfig::new(5, 0, 0, 1.0, 1)).unwrap();
        assert!(inst.reward_sets.is_empty() && inst.penalty_sets.is_empty());
        assert_eq!(brute_force(&inst).unwrap().value, 0.0);
    }

    #[test]
    fn infeasible_configs() {
        assert!(matches!(generate(&InstanceConfig::new(0, 1, 0, 1.0, 1)), Err(Error::InfeasibleConfig(_))));
        assert!(generate(&InstanceConfig::new(0, 0, 0, 1.0, 1)).is_ok());
        assert!(generate(&InstanceConfig::new(4, 1, 1, 0.0, 1)).is_err());
        assert!(generate(&InstanceConfig::new(4, 1, 1, 1.5, 1)).is_err());
    }

    #[test]
    fn sub_seeds_differ() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| sub_seed(42, i)).collect();
        assert_eq!(seeds.len(), 1000);
    }

    #[test]
    fn laminar_generator_is_laminar_and_distinct() {
        for seed in 0..50 {
            let inst = generate_laminar(12, seed);
            assert!(inst.validate().is_empty());
            let sets: Vec<&WeightedSet> = inst.reward_sets.iter().chain(&inst.penalty_sets).collect();
            for a in &sets {
                for b in &sets {
                    let inter = a.members.iter().filter(|x| b.members.contains(x)).count();
                    assert!(inter == 0 || inter == a.len() || inter == b.len());
                }
            }
            for family in [&inst.reward_sets, &inst.penalty_sets] {
                for (i, a) in family.iter().enumerate() {
                    for b in &family[i + 1..] {
                        assert_ne!(a.members, b.members);
                    }
                }
            }
        }
    }
}
