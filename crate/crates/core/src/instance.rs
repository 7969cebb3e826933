//! Instance model and objective evaluation.
//!
//! Players are the integers `1..=n`. An instance carries a family of weighted
//! reward sets, a family of weighted penalty sets and an explicit
//! [`ObjectiveMode`] saying how sets interact with a selection.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How reward and penalty sets are triggered by a selection `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObjectiveMode {
    /// `max  sum_{A_i ⊆ X} a_i - sum_{B_j ∩ X ≠ ∅} b_j`
    #[serde(rename = "cover-reward")]
    CoverRewardHitPenalty,
    /// `max  sum_{A_i ∩ X ≠ ∅} a_i - sum_{B_j ⊆ X} b_j`
    #[serde(rename = "hit-reward")]
    HitRewardCoverPenalty,
}

impl fmt::Display for ObjectiveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveMode::CoverRewardHitPenalty => f.write_str("cover-reward"),
            ObjectiveMode::HitRewardCoverPenalty => f.write_str("hit-reward"),
        }
    }
}

/// A weighted set of players.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedSet {
    pub members: Vec<usize>,
    pub weight: f64,
}

impl WeightedSet {
    /// Builds a set with sorted, deduplicated members.
    pub fn new(members: impl IntoIterator<Item = usize>, weight: f64) -> Self {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        WeightedSet { members, weight }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn is_singleton(&self) -> bool {
        self.members.len() == 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Instance {
    pub n: usize,
    pub mode: ObjectiveMode,
    #[serde(default)]
    pub reward_sets: Vec<WeightedSet>,
    #[serde(default)]
    pub penalty_sets: Vec<WeightedSet>,
}

type SetTest<'a> = &'a dyn Fn(&WeightedSet) -> bool;

/// A set of chosen players together with its profit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub members: Vec<usize>,
    pub value: f64,
}

impl Selection {
    pub fn empty() -> Self {
        Selection { members: Vec::new(), value: 0.0 }
    }

    /// Evaluates `members` against `instance` and packages the result.
    pub fn evaluated(instance: &Instance, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        let value = instance.evaluate(&members)?;
        Ok(Selection { members, value })
    }
}

/// Absolute tolerance used when comparing solver values.
pub const VALUE_TOLERANCE: f64 = 1e-9;

/// Whether two objective values agree within [`VALUE_TOLERANCE`].
pub fn values_match(a: f64, b: f64) -> bool {
    (a - b).abs() <= VALUE_TOLERANCE
}

impl Instance {
    pub fn new(n: usize, mode: ObjectiveMode) -> Self {
        Instance { n, mode, reward_sets: Vec::new(), penalty_sets: Vec::new() }
    }

    pub fn with_reward(mut self, members: impl IntoIterator<Item = usize>, weight: f64) -> Self {
        self.reward_sets.push(WeightedSet::new(members, weight));
        self
    }

    pub fn with_penalty(mut self, members: impl IntoIterator<Item = usize>, weight: f64) -> Self {
        self.penalty_sets.push(WeightedSet::new(members, weight));
        self
    }

    pub fn total_reward(&self) -> f64 {
        self.reward_sets.iter().map(|s| s.weight).sum()
    }

    pub fn total_penalty(&self) -> f64 {
        self.penalty_sets.iter().map(|s| s.weight).sum()
    }

    pub fn has_singleton_rewards(&self) -> bool {
        self.reward_sets.iter().all(WeightedSet::is_singleton)
    }

    fn membership(&self, members: &[usize]) -> Result<Vec<bool>> {
        let mut chosen = vec![false; self.n + 1];
        for &p in members {
            if p == 0 || p > self.n {
                return Err(Error::InvalidSelection { player: p, n: self.n });
            }
            chosen[p] = true;
        }
        Ok(chosen)
    }

    /// Profit of choosing `members` under the instance's objective mode.
    pub fn evaluate(&self, members: &[usize]) -> Result<f64> {
        let chosen = self.membership(members)?;
        let covered = |s: &WeightedSet| s.members.iter().all(|&p| chosen.get(p).copied().unwrap_or(false));
        let hit = |s: &WeightedSet| s.members.iter().any(|&p| chosen.get(p).copied().unwrap_or(false));
        let (reward_on, penalty_on): (SetTest, SetTest) = match self.mode {
            ObjectiveMode::CoverRewardHitPenalty => (&covered, &hit),
            ObjectiveMode::HitRewardCoverPenalty => (&hit, &covered),
        };
        let reward: f64 = self.reward_sets.iter().filter(|s| reward_on(s)).map(|s| s.weight).sum();
        let penalty: f64 = self.penalty_sets.iter().filter(|s| penalty_on(s)).map(|s| s.weight).sum();
        Ok(reward - penalty)
    }

    /// The minimisation form of the cover-reward objective:
    /// `sum_{B_j ∩ X ≠ ∅} b_j - sum_{A_i ⊆ X} a_i`, i.e. the negation of
    /// [`Instance::evaluate`] in cover-reward mode.
    pub fn min_objective(&self, members: &[usize]) -> Result<f64> {
        let chosen = self.membership(members)?;
        let covered: f64 = self
            .reward_sets
            .iter()
            .filter(|s| s.members.iter().all(|&p| chosen.get(p).copied().unwrap_or(false)))
            .map(|s| s.weight)
            .sum();
        let hit: f64 = self
            .penalty_sets
            .iter()
            .filter(|s| s.members.iter().any(|&p| chosen.get(p).copied().unwrap_or(false)))
            .map(|s| s.weight)
            .sum();
        Ok(hit - covered)
    }

    /// Lists every invariant violation; empty iff the instance is well formed.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        for (kind, sets) in [("reward", &self.reward_sets), ("penalty", &self.penalty_sets)] {
            for (idx, set) in sets.iter().enumerate() {
                let label = format!("{kind} set #{}", idx + 1);
                if set.members.is_empty() {
                    violations.push(format!("{label}: empty set"));
                }
                for &p in &set.members {
                    if p == 0 || p > self.n {
                        violations.push(format!("{label}: member {p} out of range 1..={}", self.n));
                    }
                }
                let mut sorted = set.members.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    violations.push(format!("{label}: repeated member"));
                }
                if !set.weight.is_finite() {
                    violations.push(format!("{label}: weight {} is not finite", set.weight));
                } else if set.weight < 0.0 {
                    violations.push(format!("{label}: negative weight {}", set.weight));
                }
            }
        }
        violations
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let violations = self.validate();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(violations))
        }
    }

    pub fn require_mode(&self, expected: ObjectiveMode) -> Result<()> {
        if self.mode == expected {
            Ok(())
        } else {
            Err(Error::WrongMode { expected, found: self.mode })
        }
    }

    /// Parses an instance from JSON text and normalises member order.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut inst: Instance = serde_json::from_str(text)?;
        for set in inst.reward_sets.iter_mut().chain(inst.penalty_sets.iter_mut()) {
            set.members.sort_unstable();
        }
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialises")
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cover_reward_example() {
        let inst = Instance::new(2, ObjectiveMode::CoverRewardHitPenalty)
            .with_reward([1, 2], 3.0)
            .with_penalty([2], 1.0);
        assert_eq!(inst.evaluate(&[1, 2]).unwrap(), 2.0);
        assert_eq!(inst.evaluate(&[1]).unwrap(), 0.0);
    }

    #[test]
    fn hit_reward_example() {
        let inst = Instance::new(2, ObjectiveMode::HitRewardCoverPenalty)
            .with_reward([1], 1.0)
            .with_reward([2], 1.0)
            .with_penalty([1, 2], 1.0);
        assert_eq!(inst.evaluate(&[1, 2]).unwrap(), 1.0);
        assert_eq!(inst.evaluate(&[2]).unwrap(), 1.0);
    }

    #[test]
    fn empty_selection_is_zero() {
        for mode in [ObjectiveMode::CoverRewardHitPenalty, ObjectiveMode::HitRewardCoverPenalty] {
            let inst = Instance::new(3, mode).with_reward([1, 2], 4.0).with_penalty([3], 2.0);
            assert_eq!(inst.evaluate(&[]).unwrap(), 0.0);
        }
    }

    #[test]
    fn out_of_range_member_is_rejected() {
        let inst = Instance::new(2, ObjectiveMode::HitRewardCoverPenalty);
        assert!(matches!(inst.evaluate(&[3]), Err(Error::InvalidSelection { player: 3, n: 2 })));
        assert!(matches!(inst.evaluate(&[0]), Err(Error::InvalidSelection { .. })));
    }

    #[test]
    fn validate_reports_each_violation() {
        let ok = Instance::new(3, ObjectiveMode::HitRewardCoverPenalty).with_reward([1], 1.0);
        assert!(ok.validate().is_empty());

        let mut empty = ok.clone();
        empty.reward_sets.push(WeightedSet { members: vec![], weight: 1.0 });
        let v = empty.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("empty set"));

        let range = Instance::new(5, ObjectiveMode::HitRewardCoverPenalty).with_penalty([7], 1.0);
        let v = range.validate();
        assert_eq!(v.len(), 1);
        assert!(v[0].contains("member 7 out of range"));

        let neg = Instance::new(2, ObjectiveMode::HitRewardCoverPenalty).with_penalty([1], -2.0);
        assert!(neg.validate()[0].contains("negative weight"));
        let nan = Instance::new(2, ObjectiveMode::HitRewardCoverPenalty).with_penalty([1], f64::NAN);
        assert!(nan.validate()[0].contains("not finite"));
    }

    #[test]
    fn json_round_trip_and_unknown_keys() {
        let inst = Instance::new(3, ObjectiveMode::CoverRewardHitPenalty)
            .with_reward([1, 3], 2.5)
            .with_penalty([2], 1.0);
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(inst, back);

        let text = r#"{"n": 2, "mode": "hit-reward", "reward_sets": [], "penalty_sets": [], "extra": 1}"#;
        assert!(Instance::from_json(text).is_err());
        let text = r#"{"n": 2, "mode": "hit-reward", "reward_sets": [{"members": [1], "weight": 1, "w": 2}]}"#;
        assert!(Instance::from_json(text).is_err());
        let text = r#"{"n": 2, "mode": "sideways"}"#;
        assert!(Instance::from_json(text).is_err());
    }

    #[test]
    fn min_objective_is_negated_cover_objective() {
        let inst = Instance::new(3, ObjectiveMode::CoverRewardHitPenalty)
            .with_reward([1, 2], 5.0)
            .with_penalty([2, 3], 2.0)
            .with_penalty([3], 1.0);
        for x in [vec![], vec![1], vec![1, 2], vec![1, 2, 3], vec![3]] {
            assert_eq!(inst.evaluate(&x).unwrap(), -inst.min_objective(&x).unwrap());
        }
    }
}
