//! Subgraph selection on a host graph: rewards and penalties are subgraphs,
//! a penalty applies once the chosen nodes induce all of it.
//!
//! Nodes are 1-based, as players are in [`Instance`].

use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::brute::brute_force_with_cap;
use crate::error::{Error, Result};
use crate::graph::{SimpleGraph, TreeDecomposition};
use crate::instance::{Instance, ObjectiveMode, Selection};

pub const SGSP_CAP: usize = 22;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Subgraph {
    pub nodes: Vec<usize>,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
    pub weight: f64,
}

impl Subgraph {
    pub fn node(v: usize, weight: f64) -> Self {
        Subgraph { nodes: vec![v], edges: Vec::new(), weight }
    }

    /// A path through `nodes` in order.
    pub fn path(nodes: &[usize], weight: f64) -> Self {
        let edges = nodes.windows(2).map(|w| (w[0], w[1])).collect();
        Subgraph { nodes: nodes.to_vec(), edges, weight }
    }

    /// Whether the edges connect all nodes.
    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.nodes.first() else { return true };
        let mut seen = vec![start];
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &(a, b) in &self.edges {
                let other = if a == u { b } else if b == u { a } else { continue };
                if !seen.contains(&other) {
                    seen.push(other);
                    stack.push(other);
                }
            }
        }
        self.nodes.iter().all(|v| seen.contains(v))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgspInstance {
    pub n: usize,
    #[serde(default)]
    pub host_edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub reward_subgraphs: Vec<Subgraph>,
    #[serde(default)]
    pub penalty_subgraphs: Vec<Subgraph>,
}

impl SgspInstance {
    pub fn new(n: usize, host_edges: Vec<(usize, usize)>) -> Self {
        SgspInstance { n, host_edges, reward_subgraphs: Vec::new(), penalty_subgraphs: Vec::new() }
    }

    /// Host graph with 0-based nodes.
    pub fn host(&self) -> SimpleGraph {
        let edges: Vec<(usize, usize)> = self.host_edges.iter().map(|&(u, v)| (u - 1, v - 1)).collect();
        SimpleGraph::from_edges(self.n, &edges)
    }

    pub fn host_is_tree(&self) -> bool {
        let host = self.host();
        host.edge_count() + 1 == self.n && host.is_connected()
    }

    pub fn validate(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let in_range = |v: usize| (1..=self.n).contains(&v);
        for &(u, v) in &self.host_edges {
            if !in_range(u) || !in_range(v) || u == v {
                problems.push(format!("host edge ({u}, {v}) is not an edge on 1..={}", self.n));
            }
        }
        if !problems.is_empty() {
            return problems;
        }
        let host = self.host();
        let families = [("reward", &self.reward_subgraphs), ("penalty", &self.penalty_subgraphs)];
        for (kind, family) in families {
            for (i, s) in family.iter().enumerate() {
                let label = format!("{kind} subgraph {}", i + 1);
                if s.nodes.is_empty() {
                    problems.push(format!("{label} has no nodes"));
                }
                if !(s.weight.is_finite() && s.weight >= 0.0) {
                    problems.push(format!("{label} has weight {}", s.weight));
                }
                if let Some(v) = s.nodes.iter().find(|&&v| !in_range(v)) {
                    problems.push(format!("{label} has node {v} outside 1..={}", self.n));
                    continue;
                }
                for &(u, v) in &s.edges {
                    if !s.nodes.contains(&u) || !s.nodes.contains(&v) {
                        problems.push(format!("{label} edge ({u}, {v}) leaves its node set"));
                    } else if !host.has_edge(u - 1, v - 1) {
                        problems.push(format!("{label} edge ({u}, {v}) is not a host edge"));
                    }
                }
            }
        }
        problems
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let problems = self.validate();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidInstance(problems))
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let inst: SgspInstance = serde_json::from_str(text)?;
        inst.ensure_valid()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialises")
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The node-set view: rewards are hit, penalties covered.
    pub fn to_rpsp(&self) -> Instance {
        let mut inst = Instance::new(self.n, ObjectiveMode::HitRewardCoverPenalty);
        for s in &self.reward_subgraphs {
            inst = inst.with_reward(s.nodes.iter().copied(), s.weight);
        }
        for s in &self.penalty_subgraphs {
            inst = inst.with_penalty(s.nodes.iter().copied(), s.weight);
        }
        inst
    }
}

/// Rewards of subgraphs meeting the induced subgraph on `nodes`, minus
/// penalties of subgraphs it contains.
pub fn evaluate_sgsp(instance: &SgspInstance, nodes: &[usize]) -> Result<f64> {
    if let Some(&v) = nodes.iter().find(|&&v| v == 0 || v > instance.n) {
        return Err(Error::InvalidSelection { player: v, n: instance.n });
    }
    let host = instance.host();
    let induced = |s: &Subgraph| {
        s.nodes.iter().all(|v| nodes.contains(v))
            && s.edges.iter().all(|&(u, v)| nodes.contains(&u) && nodes.contains(&v) && host.has_edge(u - 1, v - 1))
    };
    let gain: f64 =
        instance.reward_subgraphs.iter().filter(|s| s.nodes.iter().any(|v| nodes.contains(v))).map(|s| s.weight).sum();
    let loss: f64 = instance.penalty_subgraphs.iter().filter(|s| induced(s)).map(|s| s.weight).sum();
    Ok(gain - loss)
}

/// Exact optimum by enumeration with the lexicographically smallest node set
/// among ties.
pub fn brute_force_sgsp(instance: &SgspInstance) -> Result<Selection> {
    instance.ensure_valid()?;
    brute_force_with_cap(&instance.to_rpsp(), SGSP_CAP)
}

/// Star host with centre `c = |V| + 1`. Every node rewards 1, the centre
/// `M = |V| + 1`, and each edge `uv` becomes the path `u, c, v` with
/// penalty `|V| + 1`. The optimum is `M` plus the independence number.
pub fn star_reduction(graph: &SimpleGraph) -> SgspInstance {
    let n = graph.node_count();
    let c = n + 1;
    let big = (n + 1) as f64;
    let mut inst = SgspInstance::new(n + 1, (1..=n).map(|v| (v, c)).collect());
    inst.reward_subgraphs = (1..=n).map(|v| Subgraph::node(v, 1.0)).collect();
    inst.reward_subgraphs.push(Subgraph::node(c, big));
    inst.penalty_subgraphs = graph.edges().into_iter().map(|(u, v)| Subgraph::path(&[u + 1, c, v + 1], big)).collect();
    inst
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyProfile {
    /// Number of penalty subgraphs through each node, 0-based.
    pub per_node: Vec<usize>,
    pub max: usize,
}

pub fn frequency_profile(instance: &SgspInstance) -> FrequencyProfile {
    let mut per_node = vec![0; instance.n];
    for s in &instance.penalty_subgraphs {
        for &v in &s.nodes {
            per_node[v - 1] += 1;
        }
    }
    let max = per_node.iter().copied().max().unwrap_or(0);
    FrequencyProfile { per_node, max }
}

/// Variables on one side, penalty constraints on the other. Node ids:
/// `x_v` is `v - 1`, `z_j` is `n + j`, constraint `C_j` is `n + l + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintGraph {
    pub variables: usize,
    pub constraints: usize,
    pub graph: SimpleGraph,
}

impl ConstraintGraph {
    pub fn constraint_node(&self, j: usize) -> usize {
        self.variables + j
    }

    pub fn variable_name(&self, id: usize, players: usize) -> String {
        if id < players {
            format!("x{}", id + 1)
        } else if id < self.variables {
            format!("z{}", id - players + 1)
        } else {
            format!("C{}", id - self.variables + 1)
        }
    }
}

/// Constraint `C_j` links to `x_v` for every node `v` of penalty `j` and to
/// `z_j`.
pub fn build_constraint_graph(instance: &SgspInstance) -> ConstraintGraph {
    let (n, l) = (instance.n, instance.penalty_subgraphs.len());
    let mut graph = SimpleGraph::new(n + 2 * l);
    for (j, s) in instance.penalty_subgraphs.iter().enumerate() {
        let c = n + l + j;
        for &v in &s.nodes {
            graph.add_edge(v - 1, c);
        }
        graph.add_edge(n + j, c);
    }
    ConstraintGraph { variables: n + l, constraints: l, graph }
}

/// Variables sharing a constraint become adjacent.
pub fn build_interaction_graph(bp: &ConstraintGraph) -> SimpleGraph {
    let mut g = SimpleGraph::new(bp.variables);
    for j in 0..bp.constraints {
        let scope: Vec<usize> = bp.graph.neighbors(bp.constraint_node(j)).iter().copied().collect();
        for (i, &a) in scope.iter().enumerate() {
            for &b in &scope[i + 1..] {
                g.add_edge(a, b);
            }
        }
    }
    g
}

/// Decomposition of the constraint graph shaped like the host tree: bag
/// `v` holds `x_v` and the constraints of penalties through `v`; each
/// penalty adds a leaf `{C_j, z_j}` under the bag of its smallest node.
/// Bags are indexed like the host nodes, then one per penalty.
pub fn lemma_decomposition(instance: &SgspInstance) -> Result<TreeDecomposition> {
    instance.ensure_valid()?;
    if !instance.host_is_tree() {
        return Err(Error::Precondition("host graph is not a tree".into()));
    }
    if let Some(i) = instance.reward_subgraphs.iter().position(|s| s.nodes.len() != 1) {
        return Err(Error::Precondition(format!("reward subgraph {} is not a single node", i + 1)));
    }
    if let Some(j) = instance.penalty_subgraphs.iter().position(|s| !s.is_connected()) {
        return Err(Error::Precondition(format!("penalty subgraph {} is not connected", j + 1)));
    }
    let (n, l) = (instance.n, instance.penalty_subgraphs.len());
    let mut bags: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut edges: Vec<(usize, usize)> = instance.host_edges.iter().map(|&(u, v)| (u - 1, v - 1)).collect();
    for (j, s) in instance.penalty_subgraphs.iter().enumerate() {
        let c = n + l + j;
        for &v in &s.nodes {
            bags[v - 1].push(c);
        }
        let anchor = *s.nodes.iter().min().expect("validated nonempty") - 1;
        bags.push(vec![c, n + j]);
        edges.push((anchor, n + j));
    }
    Ok(TreeDecomposition::new(bags, edges))
}

/// Uniform random labelled tree on `n` nodes via a Prüfer sequence.
pub fn random_tree(n: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n < 2 {
        return Vec::new();
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &code {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &code {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf remains");
        edges.push((leaf + 1, v + 1));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0] + 1, rest[1] + 1));
    edges
}

/// Random tree instance with singleton rewards and connected penalties
/// (random subtrees) such that no node lies in more than `max_frequency`
/// penalties.
pub fn random_tree_instance(n: usize, penalties: usize, max_frequency: usize, seed: u64) -> SgspInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut inst = SgspInstance::new(n, random_tree(n, seed));
    if n == 0 {
        return inst;
    }
    let host = inst.host();
    inst.reward_subgraphs = (1..=n).map(|v| Subgraph::node(v, rng.gen_range(1..=100) as f64)).collect();
    let mut load = vec![0usize; n];
    for _ in 0..penalties {
        let start = rng.gen_range(0..n);
        if load[start] >= max_frequency {
            continue;
        }
        let target = rng.gen_range(1..=n.min(5));
        let mut nodes = vec![start];
        let mut edges = Vec::new();
        while nodes.len() < target {
            let mut frontier: Vec<(usize, usize)> = nodes
                .iter()
                .flat_map(|&u| host.neighbors(u).iter().map(move |&w| (u, w)))
                .filter(|&(_, w)| !nodes.contains(&w) && load[w] < max_frequency)
                .collect();
            frontier.shuffle(&mut rng);
            let Some(&(u, w)) = frontier.first() else { break };
            nodes.push(w);
            edges.push((u + 1, w + 1));
        }
        for &v in &nodes {
            load[v] += 1;
        }
        let weight = rng.gen_range(1..=100) as f64;
        inst.penalty_subgraphs.push(Subgraph { nodes: nodes.iter().map(|v| v + 1).collect(), edges, weight });
    }
    inst
}
