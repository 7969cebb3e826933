//! Simple undirected graphs and tree decompositions, with PACE-style text I/O.
//!
//! Graph files:
//!
//! ```text
//! c optional comment lines
//! p tw <nodes> <edges>
//! e <u> <v>
//! ```
//!
//! Decomposition files:
//!
//! ```text
//! s td <bags> <max-bag-size> <nodes>
//! b <bag-id> <v> <v> ...
//! <bag-id> <bag-id>
//! ```
//!
//! Node and bag ids are 1-based in files and 0-based in memory.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SimpleGraph {
    adj: Vec<BTreeSet<usize>>,
}

impl SimpleGraph {
    pub fn new(nodes: usize) -> Self {
        SimpleGraph { adj: vec![BTreeSet::new(); nodes] }
    }

    pub fn from_edges(nodes: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = SimpleGraph::new(nodes);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn add_node(&mut self) -> usize {
        self.adj.push(BTreeSet::new());
        self.adj.len() - 1
    }

    /// Self-loops are ignored; parallel edges collapse.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u != v {
            self.adj[u].insert(v);
            self.adj[v].insert(u);
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    pub fn neighbors(&self, u: usize) -> &BTreeSet<usize> {
        &self.adj[u]
    }

    pub fn degree(&self, u: usize) -> usize {
        self.adj[u].len()
    }

    /// Edges `(u, v)` with `u < v`, in order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, ns)| ns.range(u + 1..).map(move |&v| (u, v)))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        if self.adj.is_empty() {
            return true;
        }
        let mut seen = vec![false; self.adj.len()];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn to_pace(&self) -> String {
        let mut out = format!("p tw {} {}\n", self.node_count(), self.edge_count());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "e {} {}", u + 1, v + 1);
        }
        out
    }

    pub fn from_pace(text: &str) -> Result<Self> {
        let mut graph: Option<SimpleGraph> = None;
        let mut declared_edges = 0;
        for (lineno, line) in meaningful_lines(text) {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["p", "tw", n, m] => {
                    if graph.is_some() {
                        return Err(parse_err(lineno, "second header"));
                    }
                    graph = Some(SimpleGraph::new(parse_num(n, lineno)?));
                    declared_edges = parse_num(m, lineno)?;
                }
                ["e", u, v] | [u, v] if graph.is_some() => {
                    let g = graph.as_mut().expect("checked");
                    let (u, v) = (parse_id(u, g.node_count(), lineno)?, parse_id(v, g.node_count(), lineno)?);
                    g.add_edge(u, v);
                }
                _ => return Err(parse_err(lineno, &format!("unexpected line {line:?}"))),
            }
        }
        let graph = graph.ok_or_else(|| Error::Parse("missing \"p tw\" header".into()))?;
        if graph.edge_count() != declared_edges {
            return Err(Error::Parse(format!(
                "header declares {declared_edges} edges but {} distinct edges were read",
                graph.edge_count()
            )));
        }
        Ok(graph)
    }
}

fn meaningful_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('c'))
}

fn parse_err(lineno: usize, msg: &str) -> Error {
    Error::Parse(format!("line {lineno}: {msg}"))
}

fn parse_num(s: &str, lineno: usize) -> Result<usize> {
    s.parse().map_err(|_| parse_err(lineno, &format!("bad number {s:?}")))
}

fn parse_id(s: &str, count: usize, lineno: usize) -> Result<usize> {
    let id = parse_num(s, lineno)?;
    if id == 0 || id > count {
        return Err(parse_err(lineno, &format!("id {id} outside 1..={count}")));
    }
    Ok(id - 1)
}

/// Bags connected by tree edges.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    pub fn new(bags: Vec<Vec<usize>>, edges: Vec<(usize, usize)>) -> Self {
        let bags = bags
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b.dedup();
                b
            })
            .collect();
        TreeDecomposition { bags, edges }
    }

    /// Largest bag size minus one (`-1` for no bags).
    pub fn width(&self) -> isize {
        self.bags.iter().map(Vec::len).max().map_or(-1, |m| m as isize - 1)
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// All violations of the decomposition conditions for `graph`.
    pub fn violations(&self, graph: &SimpleGraph) -> Vec<String> {
        let mut out = Vec::new();
        let nb = self.bags.len();
        for &(a, b) in &self.edges {
            if a >= nb || b >= nb || a == b {
                out.push(format!("tree edge ({a}, {b}) is not between two distinct bags"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        for (i, bag) in self.bags.iter().enumerate() {
            if let Some(v) = bag.iter().find(|&&v| v >= graph.node_count()) {
                out.push(format!("bag {i} holds unknown node {v}"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        if nb > 0 && (self.edges.len() != nb - 1 || !bag_tree_connected(nb, &self.edges, |_| true)) {
            out.push("bags do not form a tree".into());
        }
        for v in 0..graph.node_count() {
            let holding: Vec<bool> = self.bags.iter().map(|b| b.binary_search(&v).is_ok()).collect();
            let count = holding.iter().filter(|&&h| h).count();
            if count == 0 {
                out.push(format!("node {v} is in no bag"));
            } else if !bag_tree_connected(nb, &self.edges, |i| holding[i]) {
                out.push(format!("bags holding node {v} are not connected"));
            }
        }
        for (u, v) in graph.edges() {
            if !self.bags.iter().any(|b| b.binary_search(&u).is_ok() && b.binary_search(&v).is_ok()) {
                out.push(format!("edge ({u}, {v}) is in no bag"));
            }
        }
        out
    }

    pub fn validate(&self, graph: &SimpleGraph) -> Result<()> {
        let problems = self.violations(graph);
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Decomposition(problems))
        }
    }

    pub fn to_pace(&self, nodes: usize) -> String {
        let max_bag = self.bags.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = format!("s td {} {} {}\n", self.bags.len(), max_bag, nodes);
        for (i, bag) in self.bags.iter().enumerate() {
            let _ = write!(out, "b {}", i + 1);
            for v in bag {
                let _ = write!(out, " {}", v + 1);
            }
            out.push('\n');
        }
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{} {}", a + 1, b + 1);
        }
        out
    }

    pub fn from_pace(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize, usize)> = None;
        let mut bags: Vec<Option<Vec<usize>>> = Vec::new();
        let mut edges = Vec::new();
        for (lineno, line) in meaningful_lines(text) {
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["s", "td", b, w, n] => {
                    if header.is_some() {
                        return Err(parse_err(lineno, "second header"));
                    }
                    let h = (parse_num(b, lineno)?, parse_num(w, lineno)?, parse_num(n, lineno)?);
                    bags = vec![None; h.0];
                    header = Some(h);
                }
                ["b", id, rest @ ..] if header.is_some() => {
                    let (count, _, nodes) = header.expect("checked");
                    let id = parse_id(id, count, lineno)?;
                    if bags[id].is_some() {
                        return Err(parse_err(lineno, "bag listed twice"));
                    }
                    let members = rest.iter().map(|v| parse_id(v, nodes, lineno)).collect::<Result<Vec<_>>>()?;
                    bags[id] = Some(members);
                }
                [a, b] if header.is_some() => {
                    let count = header.expect("checked").0;
                    edges.push((parse_id(a, count, lineno)?, parse_id(b, count, lineno)?));
                }
                _ => return Err(parse_err(lineno, &format!("unexpected line {line:?}"))),
            }
        }
        let (_, max_bag, _) = header.ok_or_else(|| Error::Parse("missing \"s td\" header".into()))?;
        let bags = bags
            .into_iter()
            .enumerate()
            .map(|(i, b)| b.ok_or_else(|| Error::Parse(format!("bag {} never listed", i + 1))))
            .collect::<Result<Vec<_>>>()?;
        let td = TreeDecomposition::new(bags, edges);
        if td.bags.iter().any(|b| b.len() > max_bag) {
            return Err(Error::Parse(format!("a bag exceeds the declared maximum size {max_bag}")));
        }
        Ok(td)
    }
}

/// Whether the bags selected by `keep` induce a connected subtree.
fn bag_tree_connected(nb: usize, edges: &[(usize, usize)], keep: impl Fn(usize) -> bool) -> bool {
    let Some(start) = (0..nb).find(|&i| keep(i)) else { return true };
    let mut adj = vec![Vec::new(); nb];
    for &(a, b) in edges {
        if keep(a) && keep(b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    }
    let mut seen = vec![false; nb];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    (0..nb).all(|i| !keep(i) || seen[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges(n, &(1..n).map(|i| (i - 1, i)).collect::<Vec<_>>())
    }

    #[test]
    fn pace_graph_round_trip() {
        let g = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let text = g.to_pace();
        assert!(text.starts_with("p tw 4 4\ne 1 2\n"));
        assert_eq!(SimpleGraph::from_pace(&text).unwrap(), g);
        let commented = format!("c a comment\n{text}");
        assert_eq!(SimpleGraph::from_pace(&commented).unwrap(), g);
    }

    #[test]
    fn pace_graph_errors() {
        assert!(SimpleGraph::from_pace("e 1 2\n").is_err());
        assert!(SimpleGraph::from_pace("p tw 2 1\ne 1 3\n").is_err());
        assert!(SimpleGraph::from_pace("p tw 2 2\ne 1 2\n").is_err());
        assert!(SimpleGraph::from_pace("p tw 2 1\nx\n").is_err());
    }

    #[test]
    fn path_decomposition_is_valid() {
        let g = path(4);
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![1, 2], vec![2, 3]], vec![(0, 1), (1, 2)]);
        td.validate(&g).unwrap();
        assert_eq!(td.width(), 1);
        let back = TreeDecomposition::from_pace(&td.to_pace(4)).unwrap();
        assert_eq!(back, td);
    }

    #[test]
    fn violations_are_listed() {
        let g = path(4);
        let broken = TreeDecomposition::new(vec![vec![0, 1], vec![2, 3], vec![1]], vec![(0, 1), (1, 2)]);
        let problems = broken.violations(&g);
        assert!(problems.iter().any(|p| p.contains("edge (1, 2)")));
        assert!(problems.iter().any(|p| p.contains("node 1 are not connected")));
        let not_tree = TreeDecomposition::new(vec![vec![0, 1, 2, 3], vec![0]], vec![]);
        assert!(not_tree.violations(&g).iter().any(|p| p.contains("tree")));
        let missing = TreeDecomposition::new(vec![vec![0, 1]], vec![]);
        assert!(matches!(missing.validate(&g), Err(Error::Decomposition(_))));
    }

    #[test]
    fn td_parse_errors() {
        assert!(TreeDecomposition::from_pace("b 1 1\n").is_err());
        assert!(TreeDecomposition::from_pace("s td 1 1 2\nb 1 1 2\n").is_err());
        assert!(TreeDecomposition::from_pace("s td 2 2 2\nb 1 1 2\n").is_err());
        assert!(TreeDecomposition::from_pace("s td 1 2 2\nb 1 1 3\n").is_err());
    }

    #[test]
    fn connectivity() {
        assert!(path(5).is_connected());
        assert!(!SimpleGraph::new(2).is_connected());
        assert!(SimpleGraph::new(0).is_connected());
    }
}
