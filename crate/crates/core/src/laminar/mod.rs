//! Exact solver for laminar families in hit-reward mode.
//!
//! Pipeline: containment DAG, transitive reduction to a tree, reduction to a
//! nice tree, max-profit circulation, extraction of the selection.

pub mod circulation;
pub mod tree;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use circulation::{build_circulation, CircArc, Circulation, CirculationNetwork};
pub use tree::{LaminarTree, Reduction, SetKind, TreeNode};

use crate::error::{Error, Result};
use crate::instance::{Instance, ObjectiveMode, Selection};

/// True iff every pair of sets is disjoint or nested.
pub fn is_laminar<S: AsRef<[usize]>>(sets: &[S]) -> bool {
    let sorted: Vec<BTreeSet<usize>> = sets.iter().map(|s| s.as_ref().iter().copied().collect()).collect();
    sorted.iter().enumerate().all(|(i, a)| {
        sorted[i + 1..].iter().all(|b| a.is_disjoint(b) || a.is_subset(b) || b.is_subset(a))
    })
}

pub fn instance_is_laminar(instance: &Instance) -> bool {
    let sets: Vec<&[usize]> =
        instance.reward_sets.iter().chain(&instance.penalty_sets).map(|s| s.members.as_slice()).collect();
    is_laminar(&sets)
}

/// One node per set (rewards first, then penalties), with an arc `u -> v`
/// whenever `v`'s set is contained in `u`'s. Equal sets are ordered
/// penalty above reward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContainmentDag {
    pub n: usize,
    pub nodes: Vec<TreeNode>,
    pub arcs: Vec<(usize, usize)>,
}

impl ContainmentDag {
    pub fn from_instance(instance: &Instance) -> Result<Self> {
        let mut nodes = Vec::new();
        for (kind, sets) in [(SetKind::Reward, &instance.reward_sets), (SetKind::Penalty, &instance.penalty_sets)] {
            for s in sets.iter() {
                if nodes.iter().any(|n: &TreeNode| n.kind == kind && n.members == s.members) {
                    let label = if kind == SetKind::Reward { "reward" } else { "penalty" };
                    return Err(Error::DuplicateSet { kind: label, members: s.members.clone() });
                }
                nodes.push(TreeNode { members: s.members.clone(), kind, weight: s.weight, parent: None });
            }
        }
        let mut arcs = Vec::new();
        for (u, a) in nodes.iter().enumerate() {
            for (v, b) in nodes.iter().enumerate() {
                if u == v {
                    continue;
                }
                let contained = b.members.iter().all(|x| a.members.binary_search(x).is_ok());
                let above = b.members.len() < a.members.len() || a.kind == SetKind::Penalty;
                if contained && above {
                    arcs.push((u, v));
                }
            }
        }
        Ok(ContainmentDag { n: instance.n, nodes, arcs })
    }
}

/// Reachability matrix of a digraph on `nodes` vertices.
pub fn transitive_closure(nodes: usize, arcs: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut out = vec![Vec::new(); nodes];
    for &(u, v) in arcs {
        out[u].push(v);
    }
    (0..nodes)
        .map(|s| {
            let mut seen = vec![false; nodes];
            let mut stack = out[s].clone();
            while let Some(v) = stack.pop() {
                if !seen[v] {
                    seen[v] = true;
                    stack.extend(&out[v]);
                }
            }
            seen
        })
        .collect()
}

/// Transitive reduction of a DAG: drops every arc `u -> v` for which
/// another out-neighbour of `u` reaches `v`.
pub fn transitive_reduction(nodes: usize, arcs: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let reach = transitive_closure(nodes, arcs);
    let mut dedup: Vec<(usize, usize)> = arcs.to_vec();
    dedup.sort_unstable();
    dedup.dedup();
    dedup
        .iter()
        .copied()
        .filter(|&(u, v)| !dedup.iter().any(|&(a, w)| a == u && w != v && reach[w][v]))
        .collect()
}

/// Tree representation: the transitive reduction of the containment DAG,
/// under a zero-weight reward root on all players when there is more than
/// one maximal set.
pub fn irreducible_core(dag: &ContainmentDag) -> Result<LaminarTree> {
    let mut nodes = dag.nodes.clone();
    for node in &mut nodes {
        node.parent = None;
    }
    for (u, v) in transitive_reduction(nodes.len(), &dag.arcs) {
        if let Some(other) = nodes[v].parent {
            return Err(Error::NotLaminar(format!(
                "set {:?} lies in two unrelated sets {:?} and {:?}",
                nodes[v].members, nodes[other].members, nodes[u].members
            )));
        }
        nodes[v].parent = Some(u);
    }
    let roots: Vec<usize> = (0..nodes.len()).filter(|&u| nodes[u].parent.is_none()).collect();
    let root = if roots.len() == 1 {
        roots[0]
    } else {
        nodes.push(TreeNode { members: (1..=dag.n).collect(), kind: SetKind::Reward, weight: 0.0, parent: None });
        let virtual_root = nodes.len() - 1;
        for r in roots {
            nodes[r].parent = Some(virtual_root);
        }
        virtual_root
    };
    let tree = LaminarTree { n: dag.n, nodes, root, log: Vec::new() };
    tree.check_structure()?;
    Ok(tree)
}

/// Everything produced along the way by [`solve_laminar_detailed`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaminarSolution {
    pub selection: Selection,
    pub tree: LaminarTree,
    pub nice_tree: LaminarTree,
    pub network: CirculationNetwork,
    pub circulation: Circulation,
}

pub fn solve_laminar(instance: &Instance) -> Result<Selection> {
    Ok(solve_laminar_detailed(instance)?.selection)
}

pub fn solve_laminar_detailed(instance: &Instance) -> Result<LaminarSolution> {
    instance.require_mode(ObjectiveMode::HitRewardCoverPenalty)?;
    instance.ensure_valid()?;
    if !instance_is_laminar(instance) {
        return Err(Error::NotLaminar("some reward or penalty sets cross".into()));
    }
    if instance.n == 0 {
        let empty = LaminarTree { n: 0, nodes: Vec::new(), root: 0, log: Vec::new() };
        return Ok(LaminarSolution {
            selection: Selection::empty(),
            tree: empty.clone(),
            nice_tree: empty,
            network: CirculationNetwork { node_count: 2, arcs: Vec::new(), big: 1, return_arc: 0 },
            circulation: Circulation { flow: Vec::new(), profit: 0.0 },
        });
    }
    let dag = ContainmentDag::from_instance(instance)?;
    let tree = irreducible_core(&dag)?;
    let nice_tree = tree.to_nice_tree();
    let network = build_circulation(&nice_tree)?;
    let circulation = network.max_profit();
    let chosen: Vec<usize> = network
        .arcs
        .iter()
        .zip(&circulation.flow)
        .filter(|(a, &f)| a.from == circulation::SOURCE && f > 0)
        .map(|(a, _)| nice_tree.nodes[a.to - 2].members[0])
        .collect();
    let members = nice_tree.canonicalize(&chosen);
    let selection = Selection::evaluated(instance, members)?;
    Ok(LaminarSolution { selection, tree, nice_tree, network, circulation })
}
