//! Nice tree decompositions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{SimpleGraph, TreeDecomposition};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BagKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceBag {
    pub bag: Vec<usize>,
    pub kind: BagKind,
    pub children: Vec<usize>,
}

/// Children always precede their parent, so index order is a post-order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NiceDecomposition {
    pub bags: Vec<NiceBag>,
    pub root: usize,
}

impl NiceDecomposition {
    pub fn width(&self) -> isize {
        self.bags.iter().map(|b| b.bag.len()).max().map_or(-1, |m| m as isize - 1)
    }

    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let bags = self.bags.iter().map(|b| b.bag.clone()).collect();
        let edges = self.bags.iter().enumerate().flat_map(|(i, b)| b.children.iter().map(move |&c| (i, c))).collect();
        TreeDecomposition::new(bags, edges)
    }

    /// Checks the local shape rules of every bag.
    pub fn check_nice(&self) -> Result<()> {
        let mut problems = Vec::new();
        for (i, b) in self.bags.iter().enumerate() {
            let child_bag = |k: usize| &self.bags[b.children[k]].bag;
            let ok = match b.kind {
                BagKind::Leaf => b.children.is_empty() && b.bag.len() == 1,
                BagKind::Introduce(v) => {
                    b.children.len() == 1 && {
                        let mut expect = child_bag(0).clone();
                        expect.push(v);
                        expect.sort_unstable();
                        !child_bag(0).contains(&v) && expect == b.bag
                    }
                }
                BagKind::Forget(v) => {
                    b.children.len() == 1 && child_bag(0).contains(&v) && {
                        let expect: Vec<usize> = child_bag(0).iter().copied().filter(|&x| x != v).collect();
                        expect == b.bag
                    }
                }
                BagKind::Join => b.children.len() == 2 && child_bag(0) == &b.bag && child_bag(1) == &b.bag,
            };
            if !ok {
                problems.push(format!("bag {i} does not fit its kind {:?}", b.kind));
            }
            if b.children.iter().any(|&c| c >= i) {
                problems.push(format!("bag {i} has a child that does not precede it"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Decomposition(problems))
        }
    }
}

struct Builder {
    bags: Vec<NiceBag>,
}

impl Builder {
    fn push(&mut self, bag: Vec<usize>, kind: BagKind, children: Vec<usize>) -> usize {
        self.bags.push(NiceBag { bag, kind, children });
        self.bags.len() - 1
    }

    /// Forget what `target` lacks, then introduce what it adds.
    fn morph(&mut self, mut node: usize, target: &[usize]) -> usize {
        let current = self.bags[node].bag.clone();
        for &v in current.iter().filter(|v| !target.contains(v)) {
            let bag: Vec<usize> = self.bags[node].bag.iter().copied().filter(|&x| x != v).collect();
            node = self.push(bag, BagKind::Forget(v), vec![node]);
        }
        for &v in target.iter().filter(|v| !current.contains(v)) {
            let mut bag = self.bags[node].bag.clone();
            bag.push(v);
            bag.sort_unstable();
            node = self.push(bag, BagKind::Introduce(v), vec![node]);
        }
        node
    }
}

/// Drops empty bags, splicing their tree neighbours together.
fn strip_empty(td: &TreeDecomposition) -> TreeDecomposition {
    let mut adj: Vec<Vec<usize>> = td.adjacency();
    let mut alive: Vec<bool> = td.bags.iter().map(|b| !b.is_empty()).collect();
    for e in 0..td.bags.len() {
        if alive[e] {
            continue;
        }
        let nbrs = std::mem::take(&mut adj[e]);
        for &w in &nbrs {
            adj[w].retain(|&x| x != e);
        }
        if let Some((&hub, rest)) = nbrs.split_first() {
            for &w in rest {
                adj[hub].push(w);
                adj[w].push(hub);
            }
        }
        alive[e] = false;
    }
    let mut remap = vec![usize::MAX; td.bags.len()];
    let mut bags = Vec::new();
    for (i, b) in td.bags.iter().enumerate() {
        if alive[i] {
            remap[i] = bags.len();
            bags.push(b.clone());
        }
    }
    let mut edges = Vec::new();
    for (a, list) in adj.iter().enumerate() {
        for &b in list {
            if alive[a] && a < b {
                edges.push((remap[a], remap[b]));
            }
        }
    }
    TreeDecomposition::new(bags, edges)
}

/// Converts a valid decomposition of `graph` into a nice one of the same
/// width, rooted at the first non-empty bag.
pub fn make_nice(graph: &SimpleGraph, td: &TreeDecomposition) -> Result<NiceDecomposition> {
    td.validate(graph)?;
    let td = strip_empty(td);
    if td.bags.is_empty() {
        return Err(Error::Decomposition(vec!["no nonempty bags to build on".into()]));
    }
    let adj = td.adjacency();
    // parent pointers and a pre-order from bag 0
    let mut parent = vec![usize::MAX; td.bags.len()];
    let mut order = vec![0];
    parent[0] = 0;
    let mut k = 0;
    while k < order.len() {
        let u = order[k];
        for &v in &adj[u] {
            if parent[v] == usize::MAX {
                parent[v] = u;
                order.push(v);
            }
        }
        k += 1;
    }
    let mut b = Builder { bags: Vec::new() };
    let mut built = vec![usize::MAX; td.bags.len()];
    for &u in order.iter().rev() {
        let target = &td.bags[u];
        let kids: Vec<usize> = adj[u].iter().copied().filter(|&v| v != 0 && parent[v] == u).collect();
        let mut chains: Vec<usize> = kids.iter().map(|&c| b.morph(built[c], target)).collect();
        let node = if chains.is_empty() {
            let leaf = b.push(vec![target[0]], BagKind::Leaf, vec![]);
            b.morph(leaf, target)
        } else {
            let mut acc = chains.remove(0);
            for other in chains {
                acc = b.push(target.clone(), BagKind::Join, vec![acc, other]);
            }
            acc
        };
        built[u] = node;
    }
    let nice = NiceDecomposition { root: built[0], bags: b.bags };
    nice.check_nice()?;
    nice.to_tree_decomposition().validate(graph)?;
    Ok(nice)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bag_becomes_introduce_chain() {
        let g = SimpleGraph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        let td = TreeDecomposition::new(vec![vec![0, 1, 2]], vec![]);
        let nice = make_nice(&g, &td).unwrap();
        assert_eq!(nice.bags.len(), 3);
        assert_eq!(nice.bags[0].kind, BagKind::Leaf);
        assert!(matches!(nice.bags[2].kind, BagKind::Introduce(_)));
        assert_eq!(nice.width(), 2);
    }

    #[test]
    fn star_of_bags_gets_joins() {
        let g = SimpleGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]);
        let td = TreeDecomposition::new(vec![vec![0], vec![0, 1], vec![0, 2], vec![0, 3]], vec![(0, 1), (0, 2), (0, 3)]);
        let nice = make_nice(&g, &td).unwrap();
        assert_eq!(nice.bags.iter().filter(|b| b.kind == BagKind::Join).count(), 2);
        assert_eq!(nice.width(), td.width());
    }

    #[test]
    fn empty_bags_are_spliced_out() {
        let g = SimpleGraph::from_edges(2, &[]);
        let td = TreeDecomposition::new(vec![vec![0], vec![], vec![1]], vec![(0, 1), (1, 2)]);
        let stripped = strip_empty(&td);
        assert_eq!(stripped.bags, vec![vec![0], vec![1]]);
        assert_eq!(stripped.edges, vec![(0, 1)]);
        make_nice(&g, &td).unwrap();
    }

    #[test]
    fn invalid_input_is_reported() {
        let g = SimpleGraph::from_edges(3, &[(0, 1), (1, 2)]);
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![2]], vec![(0, 1)]);
        assert!(matches!(make_nice(&g, &td), Err(Error::Decomposition(_))));
    }

    #[test]
    fn nice_input_keeps_its_shape() {
        let g = SimpleGraph::from_edges(2, &[(0, 1)]);
        let td = TreeDecomposition::new(vec![vec![0, 1], vec![0]], vec![(0, 1)]);
        let nice = make_nice(&g, &td).unwrap();
        assert_eq!(nice.bags.len(), 2);
        assert_eq!(nice.bags[nice.root].bag, vec![0, 1]);
    }
}
