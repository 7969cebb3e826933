//! Dynamic programming over a nice tree decomposition of the reduced
//! connection graph.

use rpsp::brute::brute_force;
use rpsp::treedp::{exact_decomposition, random_bounded_width, solve_treedp_detailed, ReducedConnectionGraph};

fn main() -> rpsp::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);

    // the generator hands back a decomposition of width at most 2
    let (inst, td) = random_bounded_width(16, 2, 8, seed);
    let sol = solve_treedp_detailed(&inst, &td)?;
    println!(
        "{} players, {} penalty sets: value {} from {} nice bags of width {}",
        inst.n,
        inst.penalty_sets.len(),
        sol.selection.value,
        sol.bags,
        sol.width
    );
    println!("brute force agrees: {}", brute_force(&inst)?.value == sol.selection.value);

    // a smaller instance decomposed from scratch
    let (small, _) = random_bounded_width(8, 3, 5, seed + 1);
    let graph = ReducedConnectionGraph::from_instance(&small)?;
    let exact = exact_decomposition(&graph.graph)?;
    println!("minimum width of an 8-player reduced graph: {}", exact.width());
    print!("{}", exact.to_pace(graph.node_count()));
    Ok(())
}
