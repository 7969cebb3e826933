//! Tree representation of a laminar family and the reductions that turn it
//! into a nice tree (every leaf a singleton reward set).

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Instance, ObjectiveMode, WeightedSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SetKind {
    Reward,
    Penalty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeNode {
    pub members: Vec<usize>,
    pub kind: SetKind,
    pub weight: f64,
    pub parent: Option<usize>,
}

/// Per-selection bookkeeping for reductions that only preserve the optimum.
///
/// [`LaminarTree::canonicalize`] replays these backwards to turn a selection
/// of the reduced tree into one of the original family that is at least as
/// good.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Reduction {
    /// A reward leaf and its single-child ancestors were merged into the
    /// singleton `{keep}`; at most `keep` is needed from `elements`.
    Collapsed { elements: Vec<usize>, keep: usize },
    /// A penalty leaf with at least two members was dropped; never pick all of it.
    DroppedPenalty { members: Vec<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaminarTree {
    pub n: usize,
    pub nodes: Vec<TreeNode>,
    pub root: usize,
    pub log: Vec<Reduction>,
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    small.iter().all(|x| big.binary_search(x).is_ok())
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    !a.iter().any(|x| b.binary_search(x).is_ok())
}

impl LaminarTree {
    pub fn children(&self, u: usize) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&v| self.nodes[v].parent == Some(u)).collect()
    }

    pub fn is_leaf(&self, u: usize) -> bool {
        !self.nodes.iter().any(|v| v.parent == Some(u))
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.nodes.len()).filter(|&u| self.is_leaf(u)).collect()
    }

    /// Every leaf is a singleton reward set.
    pub fn is_nice(&self) -> bool {
        self.leaves()
            .into_iter()
            .all(|u| self.nodes[u].kind == SetKind::Reward && self.nodes[u].members.len() == 1)
    }

    /// Checks parent/child containment, sibling disjointness and that the
    /// parent pointers form a single tree rooted at `root`.
    pub fn check_structure(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.nodes.get(self.root).is_none_or(|r| r.parent.is_some()) {
            problems.push("root is missing or has a parent".to_string());
        }
        for (u, node) in self.nodes.iter().enumerate() {
            if u != self.root && node.parent.is_none() {
                problems.push(format!("node {u} has no parent"));
            }
            if let Some(p) = node.parent {
                let parent = &self.nodes[p];
                let strictly = parent.members.len() > node.members.len() && is_subset(&node.members, &parent.members);
                let equal_ok = parent.members == node.members && parent.kind != node.kind;
                if !(strictly || equal_ok) {
                    problems.push(format!("node {u} is not contained in its parent {p}"));
                }
            }
            // walk to the root to rule out cycles
            let mut cur = u;
            let mut steps = 0;
            while let Some(p) = self.nodes[cur].parent {
                cur = p;
                steps += 1;
                if steps > self.nodes.len() {
                    problems.push(format!("cycle through node {u}"));
                    break;
                }
            }
        }
        for u in 0..self.nodes.len() {
            let kids = self.children(u);
            for (i, &a) in kids.iter().enumerate() {
                for &b in &kids[i + 1..] {
                    if !disjoint(&self.nodes[a].members, &self.nodes[b].members) {
                        problems.push(format!("siblings {a} and {b} overlap"));
                    }
                }
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Structure(problems.join("; ")))
        }
    }

    /// The set family carried by the tree as a hit-reward instance.
    pub fn to_instance(&self) -> Instance {
        let mut inst = Instance::new(self.n, ObjectiveMode::HitRewardCoverPenalty);
        for node in &self.nodes {
            let set = WeightedSet::new(node.members.iter().copied(), node.weight);
            match node.kind {
                SetKind::Reward => inst.reward_sets.push(set),
                SetKind::Penalty => inst.penalty_sets.push(set),
            }
        }
        inst
    }

    fn remove_nodes(&mut self, dead: &[usize]) {
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut next = 0;
        for (u, slot) in remap.iter_mut().enumerate() {
            if !dead.contains(&u) {
                *slot = next;
                next += 1;
            }
        }
        let old = std::mem::take(&mut self.nodes);
        for (u, mut node) in old.into_iter().enumerate() {
            if remap[u] == usize::MAX {
                continue;
            }
            node.parent = node.parent.map(|p| remap[p]);
            self.nodes.push(node);
        }
        self.root = remap[self.root];
    }

    fn add_zero_reward(&mut self, parent: usize, element: usize) -> usize {
        self.nodes.push(TreeNode { members: vec![element], kind: SetKind::Reward, weight: 0.0, parent: Some(parent) });
        self.nodes.len() - 1
    }

    /// Reward leaf with two or more members: merge it with its chain of
    /// single-child ancestors (stopping below the root or a branching node)
    /// into one singleton reward carrying the summed rewards of the chain.
    /// Penalty sets on the chain can never be covered by an optimal choice
    /// and are dropped.
    pub fn contract_reward_leaf(&mut self, leaf: usize) -> Result<()> {
        let node = &self.nodes[leaf];
        if !self.is_leaf(leaf) || node.kind != SetKind::Reward || node.members.len() < 2 {
            return Err(Error::Precondition(format!("node {leaf} is not a reward leaf with two or more members")));
        }
        let mut chain = vec![leaf];
        let mut top = leaf;
        while let Some(p) = self.nodes[top].parent {
            if p == self.root || self.children(p).len() != 1 {
                break;
            }
            chain.push(p);
            top = p;
        }
        let keep = self.nodes[leaf].members[0];
        let weight: f64 = chain
            .iter()
            .filter(|&&u| self.nodes[u].kind == SetKind::Reward)
            .map(|&u| self.nodes[u].weight)
            .sum();
        let elements = self.nodes[top].members.clone();
        let parent = self.nodes[top].parent;
        self.nodes.push(TreeNode { members: vec![keep], kind: SetKind::Reward, weight, parent });
        let fresh = self.nodes.len() - 1;
        if top == self.root {
            self.root = fresh;
        }
        self.remove_nodes(&chain);
        self.log.push(Reduction::Collapsed { elements, keep });
        Ok(())
    }

    /// Penalty leaf directly below another penalty set: equal sets merge by
    /// summing penalties; a leaf of two or more members is dropped; a
    /// singleton leaf gets a zero-weight reward child for its element.
    pub fn merge_penalty_leaf(&mut self, leaf: usize) -> Result<()> {
        let parent = self.nodes[leaf].parent;
        let ok = self.is_leaf(leaf)
            && self.nodes[leaf].kind == SetKind::Penalty
            && parent.is_some_and(|p| self.nodes[p].kind == SetKind::Penalty);
        if !ok {
            return Err(Error::Precondition(format!("node {leaf} is not a penalty leaf under a penalty set")));
        }
        let parent = parent.expect("checked");
        if self.nodes[parent].members == self.nodes[leaf].members {
            self.nodes[parent].weight += self.nodes[leaf].weight;
            self.remove_nodes(&[leaf]);
        } else {
            self.settle_penalty_leaf(leaf);
        }
        Ok(())
    }

    /// Penalty leaf below a reward set (or standing alone as the root):
    /// swap with an equal reward parent, drop a leaf of two or more members,
    /// or give a singleton leaf a zero-weight reward child.
    pub fn resolve_penalty_leaf(&mut self, leaf: usize) -> Result<()> {
        let parent = self.nodes[leaf].parent;
        let ok = self.is_leaf(leaf)
            && self.nodes[leaf].kind == SetKind::Penalty
            && parent.is_none_or(|p| self.nodes[p].kind == SetKind::Reward);
        if !ok {
            return Err(Error::Precondition(format!("node {leaf} is not a penalty leaf under a reward set")));
        }
        match parent {
            Some(p) if self.nodes[p].members == self.nodes[leaf].members => {
                // an equal reward parent has no other child; trade places
                let (pk, pw) = (self.nodes[p].kind, self.nodes[p].weight);
                self.nodes[p].kind = self.nodes[leaf].kind;
                self.nodes[p].weight = self.nodes[leaf].weight;
                self.nodes[leaf].kind = pk;
                self.nodes[leaf].weight = pw;
            }
            Some(_) => self.settle_penalty_leaf(leaf),
            None => {
                let element = self.nodes[leaf].members[0];
                self.add_zero_reward(leaf, element);
            }
        }
        Ok(())
    }

    fn settle_penalty_leaf(&mut self, leaf: usize) {
        let members = self.nodes[leaf].members.clone();
        if members.len() >= 2 {
            self.remove_nodes(&[leaf]);
            self.log.push(Reduction::DroppedPenalty { members });
        } else {
            self.add_zero_reward(leaf, members[0]);
        }
    }

    /// Gives every element that no child of its node accounts for a
    /// zero-weight singleton reward leaf, so that the leaves below any node
    /// are exactly that node's members.
    pub fn fill_uncovered(&mut self) {
        let original = self.nodes.len();
        for u in 0..original {
            let kids = self.children(u);
            if kids.is_empty() && self.nodes[u].kind == SetKind::Reward && self.nodes[u].members.len() == 1 {
                continue;
            }
            let covered: BTreeSet<usize> =
                kids.iter().flat_map(|&c| self.nodes[c].members.iter().copied()).collect();
            let missing: Vec<usize> =
                self.nodes[u].members.iter().copied().filter(|x| !covered.contains(x)).collect();
            for x in missing {
                self.add_zero_reward(u, x);
            }
        }
    }

    /// Applies the three leaf reductions until every leaf is a singleton
    /// reward set, then fills uncovered elements.
    pub fn to_nice_tree(&self) -> LaminarTree {
        let mut tree = self.clone();
        while let Some(leaf) = tree.leaves().into_iter().find(|&u| {
            let node = &tree.nodes[u];
            !(node.kind == SetKind::Reward && node.members.len() == 1)
        }) {
            let parent_kind = tree.nodes[leaf].parent.map(|p| tree.nodes[p].kind);
            let step = match (tree.nodes[leaf].kind, parent_kind) {
                (SetKind::Reward, _) => tree.contract_reward_leaf(leaf),
                (SetKind::Penalty, Some(SetKind::Penalty)) => tree.merge_penalty_leaf(leaf),
                (SetKind::Penalty, _) => tree.resolve_penalty_leaf(leaf),
            };
            step.expect("leaf classification matches the reduction preconditions");
        }
        tree.fill_uncovered();
        tree
    }

    /// Maps a selection of this (reduced) tree back to one of the original
    /// family whose value is at least as large.
    pub fn canonicalize(&self, members: &[usize]) -> Vec<usize> {
        let mut chosen: BTreeSet<usize> = members.iter().copied().collect();
        for step in self.log.iter().rev() {
            match step {
                Reduction::Collapsed { elements, keep } => {
                    if elements.iter().any(|x| chosen.contains(x)) {
                        for x in elements {
                            chosen.remove(x);
                        }
                        chosen.insert(*keep);
                    }
                }
                Reduction::DroppedPenalty { members } => {
                    if members.iter().all(|x| chosen.contains(x)) {
                        chosen.remove(members.last().expect("nonempty"));
                    }
                }
            }
        }
        chosen.into_iter().collect()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph tree {\n");
        for (u, node) in self.nodes.iter().enumerate() {
            let tag = match node.kind {
                SetKind::Reward => "A",
                SetKind::Penalty => "B",
            };
            let _ = writeln!(out, "  u{u} [label=\"{tag} {:?} w={}\"];", node.members, node.weight);
        }
        for (u, node) in self.nodes.iter().enumerate() {
            if let Some(p) = node.parent {
                let _ = writeln!(out, "  u{p} -> u{u};");
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute::brute_force;

    fn node(members: &[usize], kind: SetKind, weight: f64, parent: Option<usize>) -> TreeNode {
        TreeNode { members: members.to_vec(), kind, weight, parent }
    }

    fn tree(n: usize, nodes: Vec<TreeNode>) -> LaminarTree {
        LaminarTree { n, nodes, root: 0, log: Vec::new() }
    }

    fn optimum(t: &LaminarTree) -> f64 {
        brute_force(&t.to_instance()).unwrap().value
    }

    #[test]
    fn reward_leaf_contracts_to_singleton_next_to_root() {
        // root {1,2,3,4} <- A {1,2,3} <- A' {1,2}; path has no branching
        let mut t = tree(
            4,
            vec![
                node(&[1, 2, 3, 4], SetKind::Reward, 1.0, None),
                node(&[1, 2, 3], SetKind::Reward, 2.0, Some(0)),
                node(&[1, 2], SetKind::Reward, 3.0, Some(1)),
                node(&[1, 2, 3], SetKind::Penalty, 4.0, Some(0)),
            ],
        );
        t.nodes[1].parent = Some(3);
        let before = optimum(&t);
        t.contract_reward_leaf(2).unwrap();
        t.check_structure().unwrap();
        let fresh = t.nodes.iter().position(|n| n.members == vec![1]).unwrap();
        assert_eq!(t.nodes[fresh].weight, 5.0);
        assert_eq!(t.nodes[fresh].parent, Some(t.root));
        assert_eq!(optimum(&t), before);
    }

    #[test]
    fn penalty_leaf_with_extra_parent_element_is_dropped() {
        let mut t = tree(
            3,
            vec![node(&[1, 2, 3], SetKind::Reward, 5.0, None), node(&[1, 2], SetKind::Penalty, 4.0, Some(0))],
        );
        let before = optimum(&t);
        t.resolve_penalty_leaf(1).unwrap();
        assert_eq!(t.nodes.len(), 1);
        assert_eq!(optimum(&t), before);
    }

    #[test]
    fn equal_reward_parent_swaps() {
        let mut t = tree(
            2,
            vec![node(&[1, 2], SetKind::Reward, 5.0, None), node(&[1, 2], SetKind::Penalty, 4.0, Some(0))],
        );
        t.resolve_penalty_leaf(1).unwrap();
        assert_eq!(t.nodes[0].kind, SetKind::Penalty);
        assert_eq!(t.nodes[1].kind, SetKind::Reward);
        assert_eq!(t.nodes[1].weight, 5.0);
        t.check_structure().unwrap();
    }

    #[test]
    fn equal_penalty_pair_merges() {
        let mut t = tree(
            2,
            vec![
                node(&[1, 2], SetKind::Reward, 9.0, None),
                node(&[1, 2], SetKind::Penalty, 1.0, Some(0)),
                node(&[1, 2], SetKind::Penalty, 2.0, Some(1)),
            ],
        );
        let before = optimum(&t);
        t.merge_penalty_leaf(2).unwrap();
        assert_eq!(t.nodes.len(), 2);
        assert_eq!(t.nodes[1].weight, 3.0);
        assert_eq!(optimum(&t), before);
    }

    #[test]
    fn singleton_penalty_leaf_gets_reward_child() {
        let mut t = tree(
            2,
            vec![
                node(&[1, 2], SetKind::Reward, 10.0, None),
                node(&[1], SetKind::Penalty, 3.0, Some(0)),
                node(&[2], SetKind::Penalty, 3.0, Some(0)),
            ],
        );
        let before = optimum(&t);
        assert_eq!(before, 7.0);
        t.resolve_penalty_leaf(1).unwrap();
        assert!(!t.is_leaf(1));
        assert_eq!(optimum(&t), before);
    }

    #[test]
    fn nice_tree_is_idempotent() {
        let t = tree(
            2,
            vec![
                node(&[1, 2], SetKind::Reward, 1.0, None),
                node(&[1], SetKind::Reward, 2.0, Some(0)),
                node(&[2], SetKind::Reward, 3.0, Some(0)),
            ],
        );
        assert!(t.is_nice());
        assert_eq!(t.to_nice_tree(), t);
    }

    #[test]
    fn wrong_leaf_kinds_are_rejected() {
        let mut t = tree(
            2,
            vec![node(&[1, 2], SetKind::Reward, 1.0, None), node(&[1], SetKind::Reward, 1.0, Some(0))],
        );
        assert!(t.contract_reward_leaf(1).is_err());
        assert!(t.merge_penalty_leaf(1).is_err());
        assert!(t.resolve_penalty_leaf(0).is_err());
    }

    #[test]
    fn canonicalize_replays_reductions() {
        let t = LaminarTree {
            n: 4,
            nodes: vec![node(&[1, 2, 3, 4], SetKind::Reward, 0.0, None)],
            root: 0,
            log: vec![
                Reduction::Collapsed { elements: vec![1, 2], keep: 1 },
                Reduction::DroppedPenalty { members: vec![3, 4] },
            ],
        };
        assert_eq!(t.canonicalize(&[2, 3, 4]), vec![1, 3]);
        assert_eq!(t.canonicalize(&[3]), vec![3]);
    }
}
