//! Hit-reward selection on a laminar family via a max-profit circulation.

use rpsp::laminar::solve_laminar_detailed;
use rpsp::{Instance, ObjectiveMode};

fn main() -> rpsp::Result<()> {
    let inst = Instance::new(9, ObjectiveMode::HitRewardCoverPenalty)
        .with_reward([1, 2], 3.0)
        .with_reward([1, 2, 3, 4, 5], 2.0)
        .with_reward([6, 7], 4.0)
        .with_penalty([1, 2, 3], 5.0)
        .with_penalty([6, 7, 8, 9], 1.0);

    let sol = solve_laminar_detailed(&inst)?;
    println!("tree has {} sets, nice tree {}", sol.tree.nodes.len(), sol.nice_tree.nodes.len());
    for step in &sol.nice_tree.log {
        println!("  reduction {step:?}");
    }
    sol.network.check(&sol.circulation.flow)?;
    println!("circulation profit {}", sol.circulation.profit);
    println!("selection {:?} worth {}", sol.selection.members, sol.selection.value);

    match std::env::args().nth(1).as_deref() {
        Some("--dot-tree") => print!("{}", sol.nice_tree.to_dot()),
        Some("--dot-network") => print!("{}", sol.network.to_dot(Some(&sol.circulation.flow))),
        _ => {}
    }
    Ok(())
}
