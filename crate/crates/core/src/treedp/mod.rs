//! Exact solver for singleton-reward instances of bounded treewidth.
//!
//! The reduced connection graph has one node per player, weighted by the
//! player's total singleton reward, and one node per penalty set joined to
//! its members. A nice tree decomposition of it is processed bottom-up.

pub mod decompose;
pub mod dp;
pub mod nice;

use serde::{Deserialize, Serialize};

pub use decompose::{exact_decomposition, random_bounded_width};
pub use dp::{bag_penalty_cost, dp_forget, dp_introduce, dp_join, dp_leaf, DpTable, Key};
pub use nice::{make_nice, BagKind, NiceBag, NiceDecomposition};

use crate::error::{Error, Result};
use crate::graph::{SimpleGraph, TreeDecomposition};
use crate::instance::{values_match, Instance, ObjectiveMode, Selection};

/// Players are nodes `0..n`; penalty set `j` is node `n + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedConnectionGraph {
    pub players: usize,
    pub graph: SimpleGraph,
    pub weight: Vec<f64>,
}

impl ReducedConnectionGraph {
    pub fn from_instance(instance: &Instance) -> Result<Self> {
        instance.require_mode(ObjectiveMode::HitRewardCoverPenalty)?;
        instance.ensure_valid()?;
        if let Some(set) = instance.reward_sets.iter().find(|s| !s.is_singleton()) {
            return Err(Error::Shape(format!("reward set {:?} is not a singleton", set.members)));
        }
        let n = instance.n;
        let mut weight = vec![0.0; n];
        for set in &instance.reward_sets {
            weight[set.members[0] - 1] += set.weight;
        }
        let mut graph = SimpleGraph::new(n);
        for set in &instance.penalty_sets {
            let node = graph.add_node();
            weight.push(set.weight);
            for &p in &set.members {
                graph.add_edge(node, p - 1);
            }
        }
        Ok(ReducedConnectionGraph { players: n, graph, weight })
    }

    pub fn is_penalty(&self, v: usize) -> bool {
        v >= self.players
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }
}

/// One table per bag of `nice`, in bag order.
pub fn compute_tables(graph: &ReducedConnectionGraph, nice: &NiceDecomposition) -> Result<Vec<DpTable>> {
    let mut tables: Vec<DpTable> = Vec::with_capacity(nice.bags.len());
    for bag in &nice.bags {
        let table = match bag.kind {
            BagKind::Leaf => dp_leaf(graph, bag.bag[0]),
            BagKind::Introduce(v) => dp_introduce(graph, &tables[bag.children[0]], v)?,
            BagKind::Forget(v) => dp_forget(graph, &tables[bag.children[0]], v)?,
            BagKind::Join => dp_join(graph, &tables[bag.children[0]], &tables[bag.children[1]])?,
        };
        tables.push(table);
    }
    Ok(tables)
}

/// Nodes of the subgraph below bag `i` (the union of its subtree's bags).
pub fn subtree_nodes(nice: &NiceDecomposition, i: usize) -> Vec<usize> {
    let mut out = std::collections::BTreeSet::new();
    let mut stack = vec![i];
    while let Some(b) = stack.pop() {
        out.extend(nice.bags[b].bag.iter().copied());
        stack.extend(&nice.bags[b].children);
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeDpSolution {
    pub selection: Selection,
    pub width: isize,
    pub bags: usize,
}

pub fn solve_treedp(instance: &Instance, decomposition: &TreeDecomposition) -> Result<Selection> {
    Ok(solve_treedp_detailed(instance, decomposition)?.selection)
}

pub fn solve_treedp_detailed(instance: &Instance, decomposition: &TreeDecomposition) -> Result<TreeDpSolution> {
    let graph = ReducedConnectionGraph::from_instance(instance)?;
    if graph.node_count() == 0 {
        return Ok(TreeDpSolution { selection: Selection::empty(), width: -1, bags: 0 });
    }
    let mut nice = make_nice(&graph.graph, decomposition)?;
    // forget the root bag down to nothing
    let mut top = nice.root;
    for &v in &nice.bags[nice.root].bag.clone() {
        let bag: Vec<usize> = nice.bags[top].bag.iter().copied().filter(|&x| x != v).collect();
        nice.bags.push(NiceBag { bag, kind: BagKind::Forget(v), children: vec![top] });
        top = nice.bags.len() - 1;
    }
    nice.root = top;
    let tables = compute_tables(&graph, &nice)?;
    let root_key = Key { selected: Vec::new(), degrees: Vec::new() };
    let value = tables[top]
        .entries
        .get(&root_key)
        .map(|e| e.value)
        .ok_or_else(|| Error::Solver("root table lacks the empty footprint".into()))?;

    let mut chosen = std::collections::BTreeSet::new();
    let mut stack = vec![(top, root_key)];
    while let Some((b, key)) = stack.pop() {
        chosen.extend(key.selected.iter().copied());
        let children = &nice.bags[b].children;
        match &tables[b].entries[&key].back {
            dp::Back::Start => {}
            dp::Back::From(k) => stack.push((children[0], k.clone())),
            dp::Back::Pair(l, r) => {
                stack.push((children[0], l.clone()));
                stack.push((children[1], r.clone()));
            }
        }
    }
    let members: Vec<usize> = chosen.into_iter().map(|v| v + 1).collect();
    let selection = Selection::evaluated(instance, members)?;
    if !values_match(selection.value, value) {
        return Err(Error::Solver(format!("table optimum {value} but reconstruction scores {}", selection.value)));
    }
    Ok(TreeDpSolution { selection, width: nice.width(), bags: nice.bags.len() })
}
