//! Exhaustive oracle over all `2^n` selections.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::instance::{Instance, ObjectiveMode, Selection};

/// Default player cap for [`brute_force`].
pub const DEFAULT_CAP: usize = 24;

/// Instance compiled to player bitmasks (bit `p - 1` stands for player `p`).
#[derive(Debug, Clone)]
pub struct MaskedInstance {
    pub n: usize,
    mode: ObjectiveMode,
    rewards: Vec<(u64, f64)>,
    penalties: Vec<(u64, f64)>,
}

pub fn members_to_mask(members: &[usize]) -> u64 {
    members.iter().fold(0u64, |m, &p| m | 1 << (p - 1))
}

pub fn mask_to_members(mask: u64) -> Vec<usize> {
    (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

impl MaskedInstance {
    pub fn new(instance: &Instance) -> Result<Self> {
        if instance.n > 63 {
            return Err(Error::SizeLimit { n: instance.n, cap: 63 });
        }
        instance.ensure_valid()?;
        let compile = |sets: &[crate::instance::WeightedSet]| {
            sets.iter().map(|s| (members_to_mask(&s.members), s.weight)).collect()
        };
        Ok(MaskedInstance {
            n: instance.n,
            mode: instance.mode,
            rewards: compile(&instance.reward_sets),
            penalties: compile(&instance.penalty_sets),
        })
    }

    pub fn evaluate(&self, x: u64) -> f64 {
        let covered = |m: u64| m & x == m;
        let hit = |m: u64| m & x != 0;
        match self.mode {
            ObjectiveMode::CoverRewardHitPenalty => self.tally(covered, hit),
            ObjectiveMode::HitRewardCoverPenalty => self.tally(hit, covered),
        }
    }

    #[inline]
    fn tally(&self, reward_on: impl Fn(u64) -> bool, penalty_on: impl Fn(u64) -> bool) -> f64 {
        let gain: f64 = self.rewards.iter().filter(|r| reward_on(r.0)).map(|r| r.1).sum();
        let loss: f64 = self.penalties.iter().filter(|p| penalty_on(p.0)).map(|p| p.1).sum();
        gain - loss
    }
}

/// Lexicographic order on the sorted member sequences encoded by two masks.
/// A proper prefix sorts first, so the empty selection is the smallest.
pub fn lex_cmp(a: u64, b: u64) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    let d = (a ^ b).trailing_zeros();
    let above = !0u64 << d << 1;
    let (with_d, without_d) = if a >> d & 1 == 1 { (a, b) } else { (b, a) };
    // past the shared prefix, `without_d` continues with an element > d or stops
    let with_d_first = without_d & above != 0;
    if (with_d == a) == with_d_first {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Maximum-profit selection with the lexicographically smallest member set
/// among ties. Refuses instances above [`DEFAULT_CAP`] players.
pub fn brute_force(instance: &Instance) -> Result<Selection> {
    brute_force_with_cap(instance, DEFAULT_CAP)
}

pub fn brute_force_with_cap(instance: &Instance, cap: usize) -> Result<Selection> {
    if instance.n > cap {
        return Err(Error::SizeLimit { n: instance.n, cap });
    }
    let compiled = MaskedInstance::new(instance)?;
    let (mask, value) = best_mask(&compiled);
    Ok(Selection { members: mask_to_members(mask), value })
}

/// Exhaustive search on a compiled instance, returning `(mask, value)`.
pub fn best_mask(compiled: &MaskedInstance) -> (u64, f64) {
    let mut best = (0u64, 0.0f64);
    for x in 1..(1u64 << compiled.n) {
        let v = compiled.evaluate(x);
        let better = v > best.1 + crate::instance::VALUE_TOLERANCE;
        let tie = (v - best.1).abs() <= crate::instance::VALUE_TOLERANCE && lex_cmp(x, best.0) == Ordering::Less;
        if better || tie {
            best = (x, v);
        }
    }
    best
}
