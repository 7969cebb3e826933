//! LP relaxation with threshold rounding, measured against exact optima.

use rpsp::generate::{generate, InstanceConfig};
use rpsp::relax::{build_ip, round_solution, run_experiment, solve_lp, to_lp, ExactSolver, CSV_HEADER};

fn main() -> rpsp::Result<()> {
    let inst = generate(&InstanceConfig::new(6, 4, 4, 0.5, 11))?;
    let model = build_ip(&inst);
    print!("{}", to_lp(&model, true));
    let lp = solve_lp(&model)?;
    let rounded = round_solution(&inst, &lp.values[..inst.n])?;
    println!("LP bound {:.3}, rounded selection {:?} worth {}", lp.objective, rounded.members, rounded.value);

    println!("{CSV_HEADER}");
    for beta in [0.25, 0.5, 1.0] {
        let report = run_experiment(&InstanceConfig::new(14, 14, 14, beta, 1), 50, ExactSolver::Brute)?;
        println!("{}", report.csv_row());
    }
    Ok(())
}
