//! Cover-reward selection through a single minimum cut.

use rpsp::flowsolve::{build_rps_graph, decide_max, solve_max};
use rpsp::{Instance, ObjectiveMode};

fn main() -> rpsp::Result<()> {
    // two projects sharing a costly tool
    let inst = Instance::new(4, ObjectiveMode::CoverRewardHitPenalty)
        .with_reward([1, 2], 10.0)
        .with_reward([3], 4.0)
        .with_reward([2, 4], 7.0)
        .with_penalty([2], 6.0)
        .with_penalty([3, 4], 5.0)
        .with_penalty([1], 2.0);

    let best = solve_max(&inst)?;
    println!("optimal selection {:?} with profit {}", best.members, best.value);
    for target in [best.value, best.value + 1.0] {
        println!("profit {target} reachable: {}", decide_max(&inst, target)?);
    }

    let network = build_rps_graph(&inst, None)?;
    println!("flow network has {} nodes and {} arcs", network.nodes.len(), network.arcs.len());
    if std::env::args().any(|a| a == "--dot") {
        print!("{}", network.to_dot());
    }
    Ok(())
}
