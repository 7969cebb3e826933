//! Exact tree decompositions of small graphs, and random instances that come
//! with a decomposition of bounded width.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::generate::WEIGHT_RANGE;
use crate::graph::{SimpleGraph, TreeDecomposition};
use crate::instance::{Instance, ObjectiveMode};

/// Node limit for [`exact_decomposition`].
pub const EXACT_CAP: usize = 20;

fn component_boundary(nbr: &[u32], inside: u32, v: usize) -> u32 {
    let allowed = inside | 1 << v;
    let mut comp = 1u32 << v;
    loop {
        let mut grown = comp;
        let mut rest = comp;
        while rest != 0 {
            let u = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            grown |= nbr[u] & allowed;
        }
        if grown == comp {
            break;
        }
        comp = grown;
    }
    let mut touched = 0;
    let mut rest = comp;
    while rest != 0 {
        let u = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        touched |= nbr[u];
    }
    touched & !allowed
}

/// Minimum-width elimination ordering by dynamic programming over vertex
/// subsets.
pub fn optimal_elimination_order(graph: &SimpleGraph) -> Result<(usize, Vec<usize>)> {
    let n = graph.node_count();
    if n > EXACT_CAP {
        return Err(Error::SizeLimit { n, cap: EXACT_CAP });
    }
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    let nbr: Vec<u32> = (0..n).map(|u| graph.neighbors(u).iter().fold(0u32, |m, &v| m | 1 << v)).collect();
    let full = (1u32 << n) - 1;
    let mut tw = vec![u8::MAX; 1 << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let before = s & !(1 << v);
            let prior = tw[before as usize];
            if prior >= best {
                continue;
            }
            let q = component_boundary(&nbr, before, v).count_ones() as u8;
            best = best.min(prior.max(q));
        }
        tw[s as usize] = best;
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let target = tw[s as usize];
        let mut rest = s;
        loop {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let before = s & !(1 << v);
            let q = component_boundary(&nbr, before, v).count_ones() as u8;
            if tw[before as usize].max(q) == target {
                order.push(v);
                s = before;
                break;
            }
        }
    }
    order.reverse();
    Ok((tw[full as usize] as usize, order))
}

/// Decomposition read off the elimination game for `order`.
pub fn decomposition_from_order(graph: &SimpleGraph, order: &[usize]) -> TreeDecomposition {
    let n = graph.node_count();
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut filled: Vec<std::collections::BTreeSet<usize>> = (0..n).map(|u| graph.neighbors(u).clone()).collect();
    let mut bags = Vec::with_capacity(n);
    let mut edges = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let higher: Vec<usize> = filled[v].iter().copied().filter(|&w| pos[w] > i).collect();
        for &a in &higher {
            for &b in &higher {
                if a != b {
                    filled[a].insert(b);
                }
            }
        }
        if let Some(&next) = higher.iter().min_by_key(|&&w| pos[w]) {
            edges.push((i, pos[next]));
        } else if i + 1 < order.len() {
            edges.push((i, order.len() - 1));
        }
        let mut bag = higher;
        bag.push(v);
        bags.push(bag);
    }
    TreeDecomposition::new(bags, edges)
}

/// Minimum-width tree decomposition for graphs of up to [`EXACT_CAP`] nodes.
pub fn exact_decomposition(graph: &SimpleGraph) -> Result<TreeDecomposition> {
    let (_, order) = optimal_elimination_order(graph)?;
    Ok(decomposition_from_order(graph, &order))
}

/// Random hit-reward instance with singleton rewards whose reduced graph
/// has a known decomposition of width at most `k`.
///
/// Players are placed in the bags of a random `k`-tree; each penalty set is
/// a subset of at most `k` players from one bag and gets a bag of its own
/// hanging below it.
pub fn random_bounded_width(n: usize, k: usize, penalties: usize, seed: u64) -> (Instance, TreeDecomposition) {
    let k = k.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inst = Instance::new(n, ObjectiveMode::HitRewardCoverPenalty);
    if n == 0 {
        return (inst, TreeDecomposition::default());
    }
    let mut players: Vec<usize> = (0..n).collect();
    players.shuffle(&mut rng);
    let first = (k + 1).min(n);
    let mut bags = vec![players[..first].to_vec()];
    let mut edges = Vec::new();
    for &v in &players[first..] {
        let host = rng.gen_range(0..bags.len());
        let mut bag = bags[host].clone();
        if bag.len() > k {
            bag.remove(rng.gen_range(0..bag.len()));
        }
        bag.push(v);
        bags.push(bag);
        edges.push((host, bags.len() - 1));
    }
    for p in 1..=n {
        if rng.gen_bool(0.8) {
            inst = inst.with_reward([p], rng.gen_range(WEIGHT_RANGE.0..=WEIGHT_RANGE.1) as f64);
        }
    }
    let player_bags = bags.len();
    for j in 0..penalties {
        let host = rng.gen_range(0..player_bags);
        let pool = &bags[host];
        let size = rng.gen_range(1..=pool.len().min(k));
        let members: Vec<usize> = pool.choose_multiple(&mut rng, size).copied().collect();
        let weight = rng.gen_range(WEIGHT_RANGE.0..=WEIGHT_RANGE.1) as f64;
        inst = inst.with_penalty(members.iter().map(|&v| v + 1), weight);
        let mut bag = members;
        bag.push(n + j);
        bags.push(bag);
        edges.push((host, bags.len() - 1));
    }
    (inst, TreeDecomposition::new(bags, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treedp::ReducedConnectionGraph;

    #[test]
    fn small_graph_widths() {
        let cycle = SimpleGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let td = exact_decomposition(&cycle).unwrap();
        td.validate(&cycle).unwrap();
        assert_eq!(td.width(), 2);

        let path = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(exact_decomposition(&path).unwrap().width(), 1);

        let k4 = SimpleGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(exact_decomposition(&k4).unwrap().width(), 3);

        let isolated = SimpleGraph::new(3);
        let td = exact_decomposition(&isolated).unwrap();
        td.validate(&isolated).unwrap();
        assert_eq!(td.width(), 0);
    }

    #[test]
    fn grid_has_width_four() {
        let mut edges = Vec::new();
        for r in 0..4 {
            for c in 0..4 {
                let v = r * 4 + c;
                if c < 3 {
                    edges.push((v, v + 1));
                }
                if r < 3 {
                    edges.push((v, v + 4));
                }
            }
        }
        let g = SimpleGraph::from_edges(16, &edges);
        let td = exact_decomposition(&g).unwrap();
        td.validate(&g).unwrap();
        assert_eq!(td.width(), 4);
    }

    #[test]
    fn too_large_is_refused() {
        assert!(matches!(exact_decomposition(&SimpleGraph::new(21)), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn generated_decompositions_are_valid() {
        for seed in 0..40 {
            let (inst, td) = random_bounded_width(10, 3, 6, seed);
            let g = ReducedConnectionGraph::from_instance(&inst).unwrap();
            td.validate(&g.graph).unwrap();
            assert!(td.width() <= 3);
            assert!(inst.validate().is_empty());
        }
    }
}
