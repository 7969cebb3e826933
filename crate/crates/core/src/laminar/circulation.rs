//! Circulation network over a nice laminar tree and its max-profit solver.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::tree::{LaminarTree, SetKind};
use crate::error::{Error, Result};

pub const SOURCE: usize = 0;
pub const SINK: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircArc {
    pub from: usize,
    pub to: usize,
    pub capacity: i64,
    pub profit: f64,
}

/// Tree node `u` is network node `u + 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirculationNetwork {
    pub node_count: usize,
    pub arcs: Vec<CircArc>,
    pub big: i64,
    /// Index of the `t -> s` return arc.
    pub return_arc: usize,
}

pub fn tree_node(u: usize) -> usize {
    u + 2
}

fn arc_pair(kind: SetKind, members: usize, weight: f64, big: i64) -> [(i64, f64); 2] {
    match kind {
        SetKind::Reward => [(1, weight), (big, 0.0)],
        SetKind::Penalty => [(members as i64 - 1, 0.0), (1, -weight)],
    }
}

/// Builds `C(T)`: each leaf receives one unit from `s`; each node sends flow
/// to its parent (the root to `t`) over a pair of parallel arcs priced by
/// the node's own set; `t -> s` closes the circulation.
pub fn build_circulation(tree: &LaminarTree) -> Result<CirculationNetwork> {
    if !tree.is_nice() {
        return Err(Error::Precondition("circulation needs a nice tree (all leaves singleton rewards)".into()));
    }
    tree.check_structure()?;
    let leaves = tree.leaves();
    let big = leaves.len() as i64 + 1;
    let mut arcs = Vec::new();
    for &leaf in &leaves {
        arcs.push(CircArc { from: SOURCE, to: tree_node(leaf), capacity: 1, profit: 0.0 });
    }
    for (u, node) in tree.nodes.iter().enumerate() {
        let to = node.parent.map_or(SINK, tree_node);
        for (capacity, profit) in arc_pair(node.kind, node.members.len(), node.weight, big) {
            arcs.push(CircArc { from: tree_node(u), to, capacity, profit });
        }
    }
    arcs.push(CircArc { from: SINK, to: SOURCE, capacity: big, profit: 0.0 });
    Ok(CirculationNetwork { node_count: tree.nodes.len() + 2, return_arc: arcs.len() - 1, arcs, big })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circulation {
    pub flow: Vec<i64>,
    pub profit: f64,
}

impl CirculationNetwork {
    pub fn profit_of(&self, flow: &[i64]) -> f64 {
        self.arcs.iter().zip(flow).map(|(a, &f)| a.profit * f as f64).sum()
    }

    /// Capacity bounds and conservation at every node.
    pub fn check(&self, flow: &[i64]) -> Result<()> {
        if flow.len() != self.arcs.len() {
            return Err(Error::Shape(format!("{} flow values for {} arcs", flow.len(), self.arcs.len())));
        }
        let mut balance = vec![0i64; self.node_count];
        for (i, (a, &f)) in self.arcs.iter().zip(flow).enumerate() {
            if f < 0 || f > a.capacity {
                return Err(Error::Structure(format!("arc {i} carries {f} outside 0..={}", a.capacity)));
            }
            balance[a.from] -= f;
            balance[a.to] += f;
        }
        match balance.iter().position(|&b| b != 0) {
            Some(v) => Err(Error::Structure(format!("flow is not conserved at node {v}"))),
            None => Ok(()),
        }
    }

    /// Maximum-profit circulation.
    ///
    /// Everything except the return arc is acyclic, so the circulation is
    /// an `s`-`t` flow: augment along most profitable paths (Bellman-Ford on
    /// the residual graph) while they still gain, then close it over `t -> s`.
    pub fn max_profit(&self) -> Circulation {
        let mut residual = Residual::new(self.node_count);
        let handles: Vec<Option<usize>> = self
            .arcs
            .iter()
            .enumerate()
            .map(|(i, a)| (i != self.return_arc).then(|| residual.add(a.from, a.to, a.capacity, -a.profit)))
            .collect();
        let mut total = 0;
        while total < self.big {
            let Some((cost, path)) = residual.shortest_path(SOURCE, SINK) else { break };
            if cost >= -1e-9 {
                break;
            }
            let push = path.iter().map(|&e| residual.edges[e].cap).min().unwrap_or(0).min(self.big - total);
            for &e in &path {
                residual.edges[e].cap -= push;
                residual.edges[e ^ 1].cap += push;
            }
            total += push;
        }
        let mut flow: Vec<i64> = handles.iter().map(|h| h.map_or(0, |e| residual.edges[e ^ 1].cap)).collect();
        flow[self.return_arc] = total;
        let profit = self.profit_of(&flow);
        Circulation { flow, profit }
    }

    pub fn to_dot(&self, flow: Option<&[i64]>) -> String {
        let mut out = String::from("digraph circulation {\n  n0 [label=\"s\"];\n  n1 [label=\"t\"];\n");
        for (i, a) in self.arcs.iter().enumerate() {
            let cap = if a.capacity == self.big { "BIG".to_string() } else { a.capacity.to_string() };
            let f = flow.map(|f| format!(" f={}", f[i])).unwrap_or_default();
            let _ = writeln!(out, "  n{} -> n{} [label=\"({cap}, {}){f}\"];", a.from, a.to, a.profit);
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone)]
struct ResidualEdge {
    to: usize,
    cap: i64,
    cost: f64,
}

/// Paired residual edges: edge `e ^ 1` is the reverse of `e`.
#[derive(Debug, Clone)]
struct Residual {
    edges: Vec<ResidualEdge>,
    from: Vec<usize>,
    nodes: usize,
}

impl Residual {
    fn new(nodes: usize) -> Self {
        Residual { edges: Vec::new(), from: Vec::new(), nodes }
    }

    fn add(&mut self, from: usize, to: usize, cap: i64, cost: f64) -> usize {
        let id = self.edges.len();
        self.edges.push(ResidualEdge { to, cap, cost });
        self.from.push(from);
        self.edges.push(ResidualEdge { to: from, cap: 0, cost: -cost });
        self.from.push(to);
        id
    }

    fn shortest_path(&self, s: usize, t: usize) -> Option<(f64, Vec<usize>)> {
        let mut dist = vec![f64::INFINITY; self.nodes];
        let mut via = vec![usize::MAX; self.nodes];
        dist[s] = 0.0;
        for _ in 0..self.nodes {
            let mut changed = false;
            for (e, edge) in self.edges.iter().enumerate() {
                let u = self.from[e];
                if edge.cap > 0 && dist[u].is_finite() && dist[u] + edge.cost < dist[edge.to] - 1e-12 {
                    dist[edge.to] = dist[u] + edge.cost;
                    via[edge.to] = e;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if !dist[t].is_finite() {
            return None;
        }
        let mut path = Vec::new();
        let mut v = t;
        while v != s {
            let e = via[v];
            path.push(e);
            v = self.from[e];
        }
        path.reverse();
        Some((dist[t], path))
    }
}
