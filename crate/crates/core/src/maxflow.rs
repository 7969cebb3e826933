//! Dinic maximum flow on real capacities, returning a minimum cut certificate.

use std::collections::VecDeque;

const EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Edge {
    to: usize,
    cap: f64,
    rev: usize,
}

/// Residual graph for a single max-flow / min-cut computation.
#[derive(Debug, Clone)]
pub struct Dinic {
    adj: Vec<Vec<Edge>>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

/// Source side of a minimum cut plus its capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct CutResult {
    pub flow: f64,
    pub source_side: Vec<bool>,
}

impl Dinic {
    pub fn new(nodes: usize) -> Self {
        Dinic { adj: vec![Vec::new(); nodes], level: vec![0; nodes], iter: vec![0; nodes] }
    }

    pub fn add_edge(&mut self, from: usize, to: usize, cap: f64) {
        let rf = self.adj[to].len() + usize::from(from == to);
        let rt = self.adj[from].len();
        self.adj[from].push(Edge { to, cap, rev: rf });
        self.adj[to].push(Edge { to: from, cap: 0.0, rev: rt });
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for e in &self.adj[v] {
                if e.cap > EPS && self.level[e.to] < 0 {
                    self.level[e.to] = self.level[v] + 1;
                    queue.push_back(e.to);
                }
            }
        }
    }

    fn dfs(&mut self, v: usize, t: usize, pushed: f64) -> f64 {
        if v == t {
            return pushed;
        }
        while self.iter[v] < self.adj[v].len() {
            let i = self.iter[v];
            let (to, cap) = (self.adj[v][i].to, self.adj[v][i].cap);
            if cap > EPS && self.level[v] < self.level[to] {
                let d = self.dfs(to, t, pushed.min(cap));
                if d > EPS {
                    self.adj[v][i].cap -= d;
                    let rev = self.adj[v][i].rev;
                    self.adj[to][rev].cap += d;
                    return d;
                }
            }
            self.iter[v] += 1;
        }
        0.0
    }

    /// Runs to completion and reports the flow value and the set of nodes
    /// reachable from `s` in the final residual graph.
    pub fn run(&mut self, s: usize, t: usize) -> CutResult {
        let mut flow = 0.0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 {
                break;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, f64::INFINITY);
                if f <= EPS {
                    break;
                }
                flow += f;
            }
        }
        self.bfs(s);
        let source_side = self.level.iter().map(|&l| l >= 0).collect();
        CutResult { flow, source_side }
    }
}
