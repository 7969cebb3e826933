//! Bag tables over a nice decomposition of the reduced connection graph.
//!
//! A key `(S, n)` describes a selection `M` of reward nodes in the subgraph
//! below a bag: `S` is `M` restricted to the bag and `n[l]` counts the
//! selected neighbours of the `l`-th bag penalty node that are already
//! forgotten. The value is the best profit of such an `M`, charging every
//! penalty node below the bag whose neighbourhood `M` contains. Missing
//! keys are unreachable footprints.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ReducedConnectionGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Key {
    pub selected: Vec<usize>,
    pub degrees: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Back {
    Start,
    From(Key),
    Pair(Key, Key),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub value: f64,
    pub back: Back,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpTable {
    pub bag: Vec<usize>,
    /// Penalty nodes of the bag, aligned with `Key::degrees`.
    pub penalties: Vec<usize>,
    pub entries: BTreeMap<Key, Entry>,
}

impl DpTable {
    fn empty_like(graph: &ReducedConnectionGraph, bag: Vec<usize>) -> Self {
        let penalties = bag.iter().copied().filter(|&v| graph.is_penalty(v)).collect();
        DpTable { bag, penalties, entries: BTreeMap::new() }
    }

    pub fn get(&self, selected: &[usize], degrees: &[usize]) -> Option<f64> {
        self.entries.get(&Key { selected: selected.to_vec(), degrees: degrees.to_vec() }).map(|e| e.value)
    }

    fn offer(&mut self, key: Key, value: f64, back: Back) {
        match self.entries.get(&key) {
            Some(e) if e.value >= value => {}
            _ => {
                self.entries.insert(key, Entry { value, back });
            }
        }
    }

    pub fn best(&self) -> Option<(&Key, f64)> {
        self.entries.iter().map(|(k, e)| (k, e.value)).fold(None, |acc, (k, v)| match acc {
            Some((_, best)) if best >= v => acc,
            _ => Some((k, v)),
        })
    }
}

/// Penalty of the bag penalty nodes whose neighbourhood is fully selected
/// under the footprint `(selected, degrees)`.
pub fn bag_penalty_cost(graph: &ReducedConnectionGraph, penalties: &[usize], key: &Key) -> f64 {
    penalties
        .iter()
        .zip(&key.degrees)
        .filter(|&(&p, &n)| {
            let in_s = graph.graph.neighbors(p).iter().filter(|v| key.selected.binary_search(v).is_ok()).count();
            n + in_s == graph.graph.degree(p)
        })
        .map(|(&p, _)| graph.weight[p])
        .sum()
}

fn reward_sum(graph: &ReducedConnectionGraph, selected: &[usize]) -> f64 {
    selected.iter().map(|&v| graph.weight[v]).sum()
}

pub fn dp_leaf(graph: &ReducedConnectionGraph, v: usize) -> DpTable {
    let mut table = DpTable::empty_like(graph, vec![v]);
    if graph.is_penalty(v) {
        table.offer(Key { selected: vec![], degrees: vec![0] }, 0.0, Back::Start);
    } else {
        table.offer(Key { selected: vec![], degrees: vec![] }, 0.0, Back::Start);
        table.offer(Key { selected: vec![v], degrees: vec![] }, graph.weight[v], Back::Start);
    }
    for (key, entry) in table.entries.iter_mut() {
        entry.value -= bag_penalty_cost(graph, &table.penalties, key);
    }
    table
}

pub fn dp_introduce(graph: &ReducedConnectionGraph, child: &DpTable, v: usize) -> Result<DpTable> {
    if child.bag.contains(&v) {
        return Err(Error::Structure(format!("introduced node {v} is already in the bag")));
    }
    let mut bag = child.bag.clone();
    bag.push(v);
    bag.sort_unstable();
    let mut table = DpTable::empty_like(graph, bag);
    let slot = table.penalties.iter().position(|&p| p == v);
    for (key, entry) in &child.entries {
        let before = bag_penalty_cost(graph, &child.penalties, key);
        let mut options = Vec::with_capacity(2);
        match slot {
            Some(i) => {
                let mut degrees = key.degrees.clone();
                degrees.insert(i, 0);
                options.push((Key { selected: key.selected.clone(), degrees }, 0.0));
            }
            None => {
                options.push((key.clone(), 0.0));
                let mut selected = key.selected.clone();
                selected.push(v);
                selected.sort_unstable();
                options.push((Key { selected, degrees: key.degrees.clone() }, graph.weight[v]));
            }
        }
        for (new_key, gain) in options {
            let after = bag_penalty_cost(graph, &table.penalties, &new_key);
            table.offer(new_key, entry.value + gain + before - after, Back::From(key.clone()));
        }
    }
    Ok(table)
}

pub fn dp_forget(graph: &ReducedConnectionGraph, child: &DpTable, v: usize) -> Result<DpTable> {
    let Some(pos) = child.bag.iter().position(|&x| x == v) else {
        return Err(Error::Structure(format!("forgotten node {v} is not in the bag")));
    };
    let mut bag = child.bag.clone();
    bag.remove(pos);
    let mut table = DpTable::empty_like(graph, bag);
    let slot = child.penalties.iter().position(|&p| p == v);
    for (key, entry) in &child.entries {
        let new_key = match slot {
            Some(i) => {
                let mut degrees = key.degrees.clone();
                degrees.remove(i);
                Key { selected: key.selected.clone(), degrees }
            }
            None => match key.selected.binary_search(&v) {
                Err(_) => key.clone(),
                Ok(at) => {
                    let mut selected = key.selected.clone();
                    selected.remove(at);
                    let degrees = table
                        .penalties
                        .iter()
                        .zip(&key.degrees)
                        .map(|(&p, &n)| n + usize::from(graph.graph.has_edge(p, v)))
                        .collect();
                    Key { selected, degrees }
                }
            },
        };
        table.offer(new_key, entry.value, Back::From(key.clone()));
    }
    Ok(table)
}

pub fn dp_join(graph: &ReducedConnectionGraph, left: &DpTable, right: &DpTable) -> Result<DpTable> {
    if left.bag != right.bag {
        return Err(Error::Structure(format!("join children disagree: {:?} vs {:?}", left.bag, right.bag)));
    }
    let mut table = DpTable::empty_like(graph, left.bag.clone());
    let mut by_selection: BTreeMap<&[usize], Vec<(&Key, &Entry)>> = BTreeMap::new();
    for (k, e) in &right.entries {
        by_selection.entry(k.selected.as_slice()).or_default().push((k, e));
    }
    for (lk, le) in &left.entries {
        let Some(partners) = by_selection.get(lk.selected.as_slice()) else { continue };
        let c_left = bag_penalty_cost(graph, &left.penalties, lk);
        let shared = reward_sum(graph, &lk.selected);
        for &(rk, re) in partners {
            let degrees: Vec<usize> = lk.degrees.iter().zip(&rk.degrees).map(|(a, b)| a + b).collect();
            let key = Key { selected: lk.selected.clone(), degrees };
            let c_right = bag_penalty_cost(graph, &right.penalties, rk);
            let value = le.value + c_left + re.value + c_right - shared - bag_penalty_cost(graph, &table.penalties, &key);
            table.offer(key, value, Back::Pair(lk.clone(), rk.clone()));
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Instance, ObjectiveMode};

    fn toy() -> ReducedConnectionGraph {
        let inst = Instance::new(2, ObjectiveMode::HitRewardCoverPenalty)
            .with_reward([1], 2.0)
            .with_reward([2], 3.0)
            .with_penalty([1, 2], 4.0)
            .with_penalty([1], 7.0);
        ReducedConnectionGraph::from_instance(&inst).unwrap()
    }

    #[test]
    fn leaves() {
        let g = toy();
        let t = dp_leaf(&g, 0);
        assert_eq!(t.get(&[0], &[]), Some(2.0));
        assert_eq!(t.get(&[], &[]), Some(0.0));
        let p = dp_leaf(&g, 2);
        assert_eq!(p.get(&[], &[0]), Some(0.0));
        assert_eq!(p.get(&[], &[1]), None);
        assert_eq!(p.entries.len(), 1);
    }

    #[test]
    fn introduce_reward_charges_completed_penalty() {
        let g = toy();
        // bag {3} holds the singleton penalty on player 1 (node 0)
        let t = dp_introduce(&g, &dp_leaf(&g, 3), 0).unwrap();
        assert_eq!(t.get(&[], &[0]), Some(0.0));
        assert_eq!(t.get(&[0], &[0]), Some(2.0 - 7.0));
        assert!(dp_introduce(&g, &t, 0).is_err());
    }

    #[test]
    fn forget_reward_takes_the_better_option() {
        let g = toy();
        let t = dp_forget(&g, &dp_leaf(&g, 1), 1).unwrap();
        assert_eq!(t.get(&[], &[]), Some(3.0));
        assert!(dp_forget(&g, &t, 1).is_err());
    }

    #[test]
    fn forget_reward_bumps_adjacent_degree() {
        let g = toy();
        let with_p = dp_introduce(&g, &dp_leaf(&g, 1), 2).unwrap();
        let t = dp_forget(&g, &with_p, 1).unwrap();
        assert_eq!(t.get(&[], &[1]), Some(3.0));
        assert_eq!(t.get(&[], &[0]), Some(0.0));
    }

    #[test]
    fn join_subtracts_shared_reward() {
        let g = toy();
        let a = dp_leaf(&g, 0);
        let j = dp_join(&g, &a, &a).unwrap();
        assert_eq!(j.get(&[0], &[]), Some(2.0));
        assert!(dp_join(&g, &a, &dp_leaf(&g, 1)).is_err());
    }
}
