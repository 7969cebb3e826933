//! Independent-set reductions, repair, and the closed-form uniform cases.

use rpsp::brute::brute_force;
use rpsp::graph::SimpleGraph;
use rpsp::special::{chordal_gadget, mis_to_rpsp, random_k_tree, repair, solve_uniform, UniformOutcome, WeightedGraph};

fn main() -> rpsp::Result<()> {
    let c5 = SimpleGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
    let inst = mis_to_rpsp(&c5);
    println!("independence number of C5: {}", brute_force(&inst)?.value);
    let fixed = repair(&inst, &[1, 2, 3, 4, 5])?;
    println!("repairing all nodes keeps {:?} worth {}", fixed.members, fixed.value);

    let tree = random_k_tree(12, 2, 3);
    for (a, b) in [(1.0, 0.05), (1.0, 1.5), (1.0, 0.6)] {
        match solve_uniform(&WeightedGraph::uniform(tree.clone(), a, b)) {
            UniformOutcome::Solved { rule, selection } => {
                println!("a={a} b={b}: {rule:?} picks {} nodes, value {}", selection.members.len(), selection.value)
            }
            UniformOutcome::NotApplicable(why) => println!("a={a} b={b}: {why}"),
        }
    }

    let (complete, gadget) = chordal_gadget(&c5);
    println!(
        "gadget on C5: {} edges, optimum {}",
        complete.graph.edge_count(),
        brute_force(&gadget)?.value
    );
    Ok(())
}
