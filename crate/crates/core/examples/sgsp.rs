//! Subgraph selection on trees: the star reduction and the constraint-graph
//! decomposition whose width is bounded by the penalty frequency.

use rpsp::graph::SimpleGraph;
use rpsp::sgsp::{
    brute_force_sgsp, build_constraint_graph, build_interaction_graph, frequency_profile, lemma_decomposition,
    random_tree_instance, star_reduction,
};

fn main() -> rpsp::Result<()> {
    let c4 = SimpleGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    let star = star_reduction(&c4);
    println!("star reduction of C4 has optimum {}", brute_force_sgsp(&star)?.value);

    let inst = random_tree_instance(15, 12, 3, 42);
    let freq = frequency_profile(&inst);
    let td = lemma_decomposition(&inst)?;
    let bp = build_constraint_graph(&inst);
    td.validate(&bp.graph)?;
    println!(
        "{} penalties, frequency {}, decomposition width {} over {} bags",
        inst.penalty_subgraphs.len(),
        freq.max,
        td.width(),
        td.bags.len()
    );
    let ig = build_interaction_graph(&bp);
    println!("interaction graph: {} nodes, {} edges", ig.node_count(), ig.edge_count());
    println!("best selection worth {}", brute_force_sgsp(&inst)?.value);
    Ok(())
}
