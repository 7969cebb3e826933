//! Cover-reward solver via a single minimum cut.
//!
//! Penalty set nodes hang off the source with capacity `b_j`, reward set nodes
//! feed the sink with capacity `a_i`, and an uncuttable arc `B_j -> A_i` joins
//! every intersecting pair. A reward set on the sink side of a minimum cut is
//! taken; every penalty set it touches is then on the sink side as well and
//! pays its source arc. Hence `optimum = sum a_i - min cut`.

use std::fmt::Write as _;

use crate::error::Result;
use crate::instance::{Instance, ObjectiveMode, Selection, VALUE_TOLERANCE};
use crate::maxflow::Dinic;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeRole {
    Source,
    Sink,
    Penalty(usize),
    Reward(usize),
    /// Decision gadget node `z`.
    Gadget,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Capacity {
    Finite(f64),
    /// Stand-in for an infinite capacity; see [`FlowNetwork::big`].
    Big,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub capacity: Capacity,
}

#[derive(Debug, Clone)]
pub struct FlowNetwork {
    pub nodes: Vec<NodeRole>,
    pub arcs: Vec<Arc>,
    /// Finite value substituted for [`Capacity::Big`]; strictly larger than
    /// the sum of all finite capacities.
    pub big: f64,
    /// Threshold of the decision gadget, if present.
    pub alpha: Option<f64>,
}

pub const SOURCE: usize = 0;
pub const SINK: usize = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub source_side: Vec<usize>,
    pub sink_side: Vec<usize>,
    pub capacity: f64,
}

impl FlowNetwork {
    pub fn capacity(&self, arc: &Arc) -> f64 {
        match arc.capacity {
            Capacity::Finite(c) => c,
            Capacity::Big => self.big,
        }
    }

    pub fn penalty_node(&self, j: usize) -> usize {
        2 + j
    }

    pub fn reward_node(&self, i: usize) -> usize {
        2 + self.nodes.iter().filter(|r| matches!(r, NodeRole::Penalty(_))).count() + i
    }

    pub fn gadget_node(&self) -> Option<usize> {
        self.nodes.iter().position(|r| *r == NodeRole::Gadget)
    }

    /// Capacity of the arcs leaving `source_side`.
    pub fn cut_capacity(&self, source_side: &[bool]) -> f64 {
        self.arcs
            .iter()
            .filter(|a| source_side[a.from] && !source_side[a.to])
            .map(|a| self.capacity(a))
            .sum()
    }

    /// DOT rendering with one node per set and `cap=` arc labels.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph rps {\n  rankdir=LR;\n");
        for (id, role) in self.nodes.iter().enumerate() {
            let label = match role {
                NodeRole::Source => "s".to_string(),
                NodeRole::Sink => "t".to_string(),
                NodeRole::Penalty(j) => format!("B{}", j + 1),
                NodeRole::Reward(i) => format!("A{}", i + 1),
                NodeRole::Gadget => "z".to_string(),
            };
            let _ = writeln!(out, "  n{id} [label=\"{label}\"];");
        }
        for a in &self.arcs {
            let cap = match a.capacity {
                Capacity::Finite(c) => format!("{c}"),
                Capacity::Big => "inf".to_string(),
            };
            let _ = writeln!(out, "  n{} -> n{} [label=\"cap={cap}\"];", a.from, a.to);
        }
        out.push_str("}\n");
        out
    }
}

fn intersects(a: &[usize], b: &[usize]) -> bool {
    // both sorted
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Builds the reward-penalty-selection graph; with `alpha` the decision gadget
/// `s -> z -> t` is added.
pub fn build_rps_graph(instance: &Instance, alpha: Option<f64>) -> Result<FlowNetwork> {
    instance.require_mode(ObjectiveMode::CoverRewardHitPenalty)?;
    instance.ensure_valid()?;
    let l = instance.penalty_sets.len();
    let h = instance.reward_sets.len();
    let mut nodes = vec![NodeRole::Source, NodeRole::Sink];
    nodes.extend((0..l).map(NodeRole::Penalty));
    nodes.extend((0..h).map(NodeRole::Reward));
    let mut arcs = Vec::new();
    for (j, b) in instance.penalty_sets.iter().enumerate() {
        arcs.push(Arc { from: SOURCE, to: 2 + j, capacity: Capacity::Finite(b.weight) });
    }
    for (j, b) in instance.penalty_sets.iter().enumerate() {
        for (i, a) in instance.reward_sets.iter().enumerate() {
            if intersects(&a.members, &b.members) {
                arcs.push(Arc { from: 2 + j, to: 2 + l + i, capacity: Capacity::Big });
            }
        }
    }
    for (i, a) in instance.reward_sets.iter().enumerate() {
        arcs.push(Arc { from: 2 + l + i, to: SINK, capacity: Capacity::Finite(a.weight) });
    }
    if let Some(alpha) = alpha {
        let z = nodes.len();
        nodes.push(NodeRole::Gadget);
        arcs.push(Arc { from: SOURCE, to: z, capacity: Capacity::Finite(alpha.max(0.0)) });
        arcs.push(Arc { from: z, to: SINK, capacity: Capacity::Big });
    }
    let big = instance.total_reward() + instance.total_penalty() + alpha.map_or(0.0, f64::abs) + 1.0;
    Ok(FlowNetwork { nodes, arcs, big, alpha })
}

/// Maximum flow value together with a minimum cut of equal capacity.
///
/// Panics if the cut severs a [`Capacity::Big`] arc, which the choice of
/// `big` rules out.
pub fn max_flow(network: &FlowNetwork) -> (f64, Cut) {
    let mut dinic = Dinic::new(network.nodes.len());
    for a in &network.arcs {
        dinic.add_edge(a.from, a.to, network.capacity(a));
    }
    let result = dinic.run(SOURCE, SINK);
    for a in &network.arcs {
        if a.capacity == Capacity::Big {
            assert!(
                !(result.source_side[a.from] && !result.source_side[a.to]),
                "minimum cut severs an infinite arc {} -> {}",
                a.from,
                a.to
            );
        }
    }
    let capacity = network.cut_capacity(&result.source_side);
    let (source_side, sink_side): (Vec<usize>, Vec<usize>) =
        (0..network.nodes.len()).partition(|&v| result.source_side[v]);
    (result.flow, Cut { source_side, sink_side, capacity })
}

/// Whether some selection reaches profit `alpha`.
///
/// The gadget arc `s -> z` is always cut (its head cannot sit on the source
/// side), so the test compares the remaining cut capacity, i.e. the penalty
/// and reward arcs, against `sum a_i - alpha`.
pub fn decide_max(instance: &Instance, alpha: f64) -> Result<bool> {
    if alpha <= 0.0 {
        instance.require_mode(ObjectiveMode::CoverRewardHitPenalty)?;
        return Ok(true);
    }
    let network = build_rps_graph(instance, Some(alpha))?;
    let (_, cut) = max_flow(&network);
    let z = network.gadget_node().expect("gadget present");
    let in_source: Vec<bool> = (0..network.nodes.len()).map(|v| cut.source_side.contains(&v)).collect();
    let set_arcs: f64 = network
        .arcs
        .iter()
        .filter(|a| a.to != z && a.from != z)
        .filter(|a| in_source[a.from] && !in_source[a.to])
        .map(|a| network.capacity(a))
        .sum();
    Ok(set_arcs <= instance.total_reward() - alpha + VALUE_TOLERANCE)
}

/// Optimal cover-reward selection: `sum a_i - min cut` on the gadget-free
/// network, realised by the union of reward sets left on the sink side.
pub fn solve_max(instance: &Instance) -> Result<Selection> {
    let network = build_rps_graph(instance, None)?;
    let (flow, cut) = max_flow(&network);
    debug_assert!((flow - cut.capacity).abs() <= 1e-7 * (1.0 + flow.abs()));
    let optimum = instance.total_reward() - cut.capacity;
    let mut members: Vec<usize> = cut
        .sink_side
        .iter()
        .filter_map(|&v| match network.nodes[v] {
            NodeRole::Reward(i) => Some(i),
            _ => None,
        })
        .flat_map(|i| instance.reward_sets[i].members.iter().copied())
        .collect();
    members.sort_unstable();
    members.dedup();
    let selection = Selection::evaluated(instance, members)?;
    debug_assert!(
        (selection.value - optimum).abs() <= 1e-6 * (1.0 + optimum.abs()),
        "selection value {} differs from cut optimum {optimum}",
        selection.value
    );
    Ok(selection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute::brute_force;
    use crate::error::Error;

    fn cover(n: usize) -> Instance {
        Instance::new(n, ObjectiveMode::CoverRewardHitPenalty)
    }

    #[test]
    fn small_network_with_gadget() {
        let inst = cover(3)
            .with_reward([1, 2], 1.0)
            .with_reward([2, 3], 1.0)
            .with_penalty([2], 1.0)
            .with_penalty([1, 2, 3], 1.0)
            .with_penalty([1, 3], 1.0);
        let net = build_rps_graph(&inst, Some(1.0)).unwrap();
        assert_eq!(net.nodes.len(), 2 + 3 + 2 + 1);
        let z = net.gadget_node().unwrap();
        let from_s = net.arcs.iter().filter(|a| a.from == SOURCE && a.to != z).count();
        let to_t = net.arcs.iter().filter(|a| a.to == SINK && a.from != z).count();
        let middle = net.arcs.iter().filter(|a| a.from != SOURCE && a.to != SINK).count();
        assert_eq!((from_s, to_t, middle), (3, 2, 6));
        assert!(net.arcs.contains(&Arc { from: SOURCE, to: z, capacity: Capacity::Finite(1.0) }));
        assert!(net.arcs.contains(&Arc { from: z, to: SINK, capacity: Capacity::Big }));
    }

    #[test]
    fn disjoint_sets_have_no_arc() {
        let inst = cover(2).with_reward([1], 1.0).with_penalty([2], 1.0);
        let net = build_rps_graph(&inst, None).unwrap();
        assert!(!net.arcs.iter().any(|a| a.from == net.penalty_node(0) && a.to == net.reward_node(0)));
    }

    #[test]
    fn big_exceeds_finite_capacities() {
        let inst = cover(2).with_reward([1], 3.0).with_penalty([1, 2], 4.0);
        let net = build_rps_graph(&inst, Some(2.0)).unwrap();
        let finite: f64 = net
            .arcs
            .iter()
            .filter_map(|a| match a.capacity {
                Capacity::Finite(c) => Some(c),
                Capacity::Big => None,
            })
            .sum();
        assert!(net.big > finite);
    }

    #[test]
    fn no_penalties_takes_everything() {
        let inst = cover(3).with_reward([1, 2], 2.0).with_reward([3], 5.0);
        let net = build_rps_graph(&inst, None).unwrap();
        let (flow, cut) = max_flow(&net);
        assert_eq!(flow, 0.0);
        assert_eq!(cut.capacity, 0.0);
        assert_eq!(solve_max(&inst).unwrap().value, 7.0);
    }

    #[test]
    fn small_examples() {
        let inst = cover(1).with_reward([1], 3.0).with_penalty([1], 1.0);
        let sel = solve_max(&inst).unwrap();
        assert_eq!((sel.value, sel.members.clone()), (2.0, vec![1]));

        let inst = cover(2).with_reward([1, 2], 2.0).with_penalty([1], 5.0);
        let sel = solve_max(&inst).unwrap();
        assert_eq!(sel.value, 0.0);
        assert!(sel.members.is_empty());
    }

    #[test]
    fn decision_thresholds() {
        let inst = cover(3)
            .with_reward([1, 2], 4.0)
            .with_reward([3], 1.0)
            .with_penalty([2, 3], 3.0);
        let opt = brute_force(&inst).unwrap().value;
        assert_eq!(opt, 2.0);
        assert!(decide_max(&inst, 2.0).unwrap());
        assert!(!decide_max(&inst, 3.0).unwrap());
        assert!(decide_max(&inst, 0.0).unwrap());
        assert!(decide_max(&inst, -5.0).unwrap());
    }

    #[test]
    fn certificate_matches_flow() {
        let inst = cover(4)
            .with_reward([1, 2], 5.0)
            .with_reward([3, 4], 2.0)
            .with_penalty([2, 3], 4.0)
            .with_penalty([4], 1.0);
        let net = build_rps_graph(&inst, None).unwrap();
        let (flow, cut) = max_flow(&net);
        assert!((flow - cut.capacity).abs() < 1e-12);
        assert!(cut.source_side.contains(&SOURCE) && cut.sink_side.contains(&SINK));
        assert_eq!(cut.source_side.len() + cut.sink_side.len(), net.nodes.len());
        assert_eq!(inst.total_reward() - cut.capacity, brute_force(&inst).unwrap().value);
    }

    #[test]
    fn wrong_mode_is_rejected() {
        let inst = Instance::new(1, ObjectiveMode::HitRewardCoverPenalty).with_reward([1], 1.0);
        assert!(matches!(build_rps_graph(&inst, None), Err(Error::WrongMode { .. })));
        assert!(solve_max(&inst).is_err());
        assert!(decide_max(&inst, 1.0).is_err());
    }

    #[test]
    fn dot_dump_labels_capacities() {
        let inst = cover(1).with_reward([1], 3.0).with_penalty([1], 1.0);
        let dot = build_rps_graph(&inst, None).unwrap().to_dot();
        assert!(dot.contains("cap=3") && dot.contains("cap=inf") && dot.contains("B1"));
    }
}
