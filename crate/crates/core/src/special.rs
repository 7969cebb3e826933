//! Independent-set reductions and special cases with pairwise penalties.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::SimpleGraph;
use crate::instance::{Instance, ObjectiveMode, Selection};

/// A graph with node rewards and edge penalties. Node `v` is player `v + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedGraph {
    pub graph: SimpleGraph,
    pub node_weight: Vec<f64>,
    /// Keyed by `(u, v)` with `u < v`.
    pub edge_weight: BTreeMap<(usize, usize), f64>,
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

impl WeightedGraph {
    pub fn uniform(graph: SimpleGraph, a: f64, b: f64) -> Self {
        let node_weight = vec![a; graph.node_count()];
        let edge_weight = graph.edges().into_iter().map(|e| (e, b)).collect();
        WeightedGraph { graph, node_weight, edge_weight }
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<f64> {
        self.edge_weight.get(&key(u, v)).copied()
    }

    /// Singleton rewards and two-element penalties in hit-reward mode.
    pub fn to_instance(&self) -> Instance {
        let mut inst = Instance::new(self.graph.node_count(), ObjectiveMode::HitRewardCoverPenalty);
        for (v, &w) in self.node_weight.iter().enumerate() {
            inst = inst.with_reward([v + 1], w);
        }
        for (&(u, v), &w) in &self.edge_weight {
            inst = inst.with_penalty([u + 1, v + 1], w);
        }
        inst
    }

    /// Node rewards of `nodes` minus penalties of the edges inside it.
    pub fn value(&self, nodes: &[usize]) -> f64 {
        let gain: f64 = nodes.iter().map(|&v| self.node_weight[v]).sum();
        let loss: f64 = self
            .edge_weight
            .iter()
            .filter(|(&(u, v), _)| nodes.contains(&u) && nodes.contains(&v))
            .map(|(_, &w)| w)
            .sum();
        gain - loss
    }
}

/// Unit singleton rewards and a unit penalty on every edge; the optimum is
/// the independence number.
pub fn mis_to_rpsp(graph: &SimpleGraph) -> Instance {
    WeightedGraph::uniform(graph.clone(), 1.0, 1.0).to_instance()
}

/// Repeatedly drops the largest member of the first fully chosen penalty
/// set until none is fully chosen.
pub fn repair(instance: &Instance, members: &[usize]) -> Result<Selection> {
    instance.require_mode(ObjectiveMode::HitRewardCoverPenalty)?;
    let mut chosen: Vec<usize> = members.to_vec();
    chosen.sort_unstable();
    chosen.dedup();
    while let Some(set) = instance.penalty_sets.iter().find(|s| s.members.iter().all(|u| chosen.contains(u))) {
        let drop = *set.members.last().expect("sets are nonempty");
        chosen.retain(|&u| u != drop);
    }
    Selection::evaluated(instance, chosen)
}

/// Players become weighted nodes, two-element penalty sets weighted edges.
/// Penalty sets on the same pair merge by summing.
pub fn simplify_connection_graph(instance: &Instance) -> Result<WeightedGraph> {
    instance.require_mode(ObjectiveMode::HitRewardCoverPenalty)?;
    instance.ensure_valid()?;
    if let Some(s) = instance.reward_sets.iter().find(|s| !s.is_singleton()) {
        return Err(Error::Shape(format!("reward set {:?} is not a singleton", s.members)));
    }
    if let Some(s) = instance.penalty_sets.iter().find(|s| s.len() != 2) {
        return Err(Error::Shape(format!("penalty set {:?} does not have two members", s.members)));
    }
    let mut node_weight = vec![0.0; instance.n];
    for s in &instance.reward_sets {
        node_weight[s.members[0] - 1] += s.weight;
    }
    let mut graph = SimpleGraph::new(instance.n);
    let mut edge_weight = BTreeMap::new();
    for s in &instance.penalty_sets {
        let (u, v) = (s.members[0] - 1, s.members[1] - 1);
        graph.add_edge(u, v);
        *edge_weight.entry(key(u, v)).or_insert(0.0) += s.weight;
    }
    Ok(WeightedGraph { graph, node_weight, edge_weight })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UniformRule {
    /// `b * maxdeg <= a`: every node pays for itself.
    AllNodes,
    /// `b >= a` on a chordal graph: a maximum independent set.
    ChordalIndependentSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum UniformOutcome {
    Solved { rule: UniformRule, selection: Selection },
    NotApplicable(String),
}

/// Exact answer for uniform node reward `a` and edge penalty `b` where one
/// of the two closed-form cases applies.
pub fn solve_uniform(wg: &WeightedGraph) -> UniformOutcome {
    let n = wg.graph.node_count();
    let Some(&a) = wg.node_weight.first() else {
        return UniformOutcome::Solved { rule: UniformRule::AllNodes, selection: Selection::empty() };
    };
    if wg.node_weight.iter().any(|&w| w != a) {
        return UniformOutcome::NotApplicable("node rewards are not uniform".into());
    }
    let b = wg.edge_weight.values().next().copied().unwrap_or(0.0);
    if wg.edge_weight.values().any(|&w| w != b) {
        return UniformOutcome::NotApplicable("edge penalties are not uniform".into());
    }
    let max_degree = (0..n).map(|v| wg.graph.degree(v)).max().unwrap_or(0);
    let finish = |rule, nodes: Vec<usize>| {
        let value = wg.value(&nodes);
        let members = nodes.into_iter().map(|v| v + 1).collect();
        UniformOutcome::Solved { rule, selection: Selection { members, value } }
    };
    if b * max_degree as f64 <= a {
        return finish(UniformRule::AllNodes, (0..n).collect());
    }
    if b >= a {
        return match perfect_elimination_order(&wg.graph) {
            Some(order) => finish(UniformRule::ChordalIndependentSet, chordal_mis(&wg.graph, &order)),
            None => UniformOutcome::NotApplicable("graph is not chordal".into()),
        };
    }
    UniformOutcome::NotApplicable(format!("penalty/reward ratio {} lies strictly between 1/{max_degree} and 1", b / a))
}

/// Maximum cardinality search; the reverse visiting order is a perfect
/// elimination order exactly when the graph is chordal.
pub fn perfect_elimination_order(graph: &SimpleGraph) -> Option<Vec<usize>> {
    let n = graph.node_count();
    let mut weight = vec![0usize; n];
    let mut done = vec![false; n];
    let mut visit = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| !done[v]).max_by_key(|&v| (weight[v], std::cmp::Reverse(v)))?;
        done[v] = true;
        visit.push(v);
        for &w in graph.neighbors(v) {
            if !done[w] {
                weight[w] += 1;
            }
        }
    }
    visit.reverse();
    is_perfect_elimination_order(graph, &visit).then_some(visit)
}

pub fn is_chordal(graph: &SimpleGraph) -> bool {
    perfect_elimination_order(graph).is_some()
}

/// Every node's later neighbours form a clique.
pub fn is_perfect_elimination_order(graph: &SimpleGraph, order: &[usize]) -> bool {
    let n = graph.node_count();
    if order.len() != n {
        return false;
    }
    let mut pos = vec![usize::MAX; n];
    for (i, &v) in order.iter().enumerate() {
        if v >= n || pos[v] != usize::MAX {
            return false;
        }
        pos[v] = i;
    }
    order.iter().enumerate().all(|(i, &v)| {
        let later: Vec<usize> = graph.neighbors(v).iter().copied().filter(|&w| pos[w] > i).collect();
        later.iter().enumerate().all(|(k, &x)| later[k + 1..].iter().all(|&y| graph.has_edge(x, y)))
    })
}

/// Greedy independent set along a perfect elimination order.
pub fn chordal_mis(graph: &SimpleGraph, order: &[usize]) -> Vec<usize> {
    let mut blocked = vec![false; graph.node_count()];
    let mut out = Vec::new();
    for &v in order {
        if !blocked[v] {
            out.push(v);
            blocked[v] = true;
            for &w in graph.neighbors(v) {
                blocked[w] = true;
            }
        }
    }
    out.sort_unstable();
    out
}

/// Complete graph on the same nodes: original edges carry penalty
/// `|V| + 1`, added edges penalty 0, nodes reward 1.
pub fn chordal_gadget(graph: &SimpleGraph) -> (WeightedGraph, Instance) {
    let n = graph.node_count();
    let mut complete = SimpleGraph::new(n);
    let mut edge_weight = BTreeMap::new();
    for u in 0..n {
        for v in u + 1..n {
            complete.add_edge(u, v);
            let w = if graph.has_edge(u, v) { n as f64 + 1.0 } else { 0.0 };
            edge_weight.insert((u, v), w);
        }
    }
    let wg = WeightedGraph { graph: complete, node_weight: vec![1.0; n], edge_weight };
    let inst = wg.to_instance();
    (wg, inst)
}

/// Random `k`-tree: a `(k+1)`-clique grown by attaching each new node to a
/// random existing `k`-clique.
pub fn random_k_tree(n: usize, k: usize, seed: u64) -> SimpleGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = SimpleGraph::new(n);
    let base = (k + 1).min(n);
    for u in 0..base {
        for v in u + 1..base {
            g.add_edge(u, v);
        }
    }
    if n <= k {
        return g;
    }
    let mut cliques: Vec<Vec<usize>> = (0..=k).map(|skip| (0..=k).filter(|&x| x != skip).collect()).collect();
    for v in k + 1..n {
        let host = cliques[rng.gen_range(0..cliques.len())].clone();
        for &u in &host {
            g.add_edge(u, v);
        }
        for skip in 0..host.len() {
            let mut c: Vec<usize> = host.iter().copied().enumerate().filter(|&(i, _)| i != skip).map(|(_, x)| x).collect();
            c.push(v);
            cliques.push(c);
        }
    }
    g
}

/// Independence number by exhaustive search.
pub fn mis_size_brute(graph: &SimpleGraph) -> usize {
    let n = graph.node_count();
    assert!(n <= 24, "exhaustive search is limited to 24 nodes");
    let nbr: Vec<u32> = (0..n).map(|u| graph.neighbors(u).iter().fold(0, |m, &v| m | 1 << v)).collect();
    (0u32..1 << n)
        .filter(|&s| (0..n).all(|v| s >> v & 1 == 0 || nbr[v] & s == 0))
        .map(|s| s.count_ones() as usize)
        .max()
        .unwrap_or(0)
}
