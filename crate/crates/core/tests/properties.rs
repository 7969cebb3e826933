use proptest::prelude::*;

use rpsp::cli;
use rpsp::flowsolve::{build_rps_graph, decide_max, max_flow, solve_max};
use rpsp::generate::{generate_laminar, InstanceConfig};
use rpsp::graph::SimpleGraph;
use rpsp::laminar::{irreducible_core, solve_laminar_detailed, transitive_closure, transitive_reduction, ContainmentDag};
use rpsp::relax::{build_ip, parse_lp, round_solution, run_experiment, solve_lp, to_lp, ExactSolver};
use rpsp::sgsp::{
    build_constraint_graph, build_interaction_graph, evaluate_sgsp, frequency_profile, lemma_decomposition,
    random_tree_instance,
};
use rpsp::special::{is_perfect_elimination_order, mis_to_rpsp, perfect_elimination_order, random_k_tree, repair};
use rpsp::treedp::{compute_tables, exact_decomposition, make_nice, random_bounded_width, solve_treedp, ReducedConnectionGraph};
use rpsp::{Instance, ObjectiveMode};

fn optimum(inst: &Instance) -> f64 {
    (0u32..1 << inst.n).map(|m| inst.evaluate(&members(m)).unwrap()).fold(f64::NEG_INFINITY, f64::max)
}

fn members(mask: u32) -> Vec<usize> {
    (1..=32).filter(|p| mask >> (p - 1) & 1 == 1).collect()
}

fn arb_sets(n: usize) -> impl Strategy<Value = Vec<(u32, u32)>> {
    prop::collection::vec((1u32..1 << n, 1u32..=100), 0..6)
}

fn arb_instance(mode: ObjectiveMode) -> impl Strategy<Value = Instance> {
    (1usize..=8).prop_flat_map(move |n| (arb_sets(n), arb_sets(n))).prop_map(move |(r, p)| {
        let n = r.iter().chain(&p).map(|&(m, _)| 32 - m.leading_zeros() as usize).max().unwrap_or(1);
        let mut inst = Instance::new(n, mode);
        for (m, w) in r {
            inst = inst.with_reward(members(m), w as f64);
        }
        for (m, w) in p {
            inst = inst.with_penalty(members(m), w as f64);
        }
        inst
    })
}

fn any_mode() -> impl Strategy<Value = ObjectiveMode> {
    prop_oneof![Just(ObjectiveMode::HitRewardCoverPenalty), Just(ObjectiveMode::CoverRewardHitPenalty)]
}

fn arb_graph(max_n: usize) -> impl Strategy<Value = SimpleGraph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut g = SimpleGraph::new(n);
            let mut k = 0;
            for u in 0..n {
                for v in u + 1..n {
                    if bits[k] {
                        g.add_edge(u, v);
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

/// Chordal iff simplicial nodes can be removed one by one.
fn chordal_by_elimination(g: &SimpleGraph) -> bool {
    let mut alive: Vec<usize> = (0..g.node_count()).collect();
    while !alive.is_empty() {
        let simplicial = alive.iter().position(|&v| {
            let nb: Vec<usize> = g.neighbors(v).iter().copied().filter(|w| alive.contains(w)).collect();
            nb.iter().enumerate().all(|(i, &a)| nb[i + 1..].iter().all(|&b| g.has_edge(a, b)))
        });
        match simplicial {
            Some(i) => {
                alive.remove(i);
            }
            None => return false,
        }
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cover_mode_is_negated_min_objective(inst in arb_instance(ObjectiveMode::CoverRewardHitPenalty), m in any::<u32>()) {
        let x = members(m & ((1 << inst.n) - 1));
        prop_assert_eq!(inst.evaluate(&x).unwrap(), -inst.min_objective(&x).unwrap());
    }

    #[test]
    fn optimum_is_nonnegative_and_matches_brute_force(mode in any_mode(), inst in arb_instance(ObjectiveMode::HitRewardCoverPenalty)) {
        let inst = Instance { mode, ..inst };
        let best = rpsp::brute::brute_force(&inst).unwrap();
        prop_assert!(best.value >= 0.0);
        prop_assert_eq!(best.value, optimum(&inst));
        prop_assert_eq!(inst.evaluate(&[]).unwrap(), 0.0);
    }

    #[test]
    fn raising_a_reward_never_lowers_the_optimum(mode in any_mode(), inst in arb_instance(ObjectiveMode::HitRewardCoverPenalty), extra in 1u32..50) {
        let inst = Instance { mode, ..inst };
        prop_assume!(!inst.reward_sets.is_empty());
        let mut raised = inst.clone();
        raised.reward_sets[0].weight += extra as f64;
        prop_assert!(optimum(&raised) >= optimum(&inst));
    }

    #[test]
    fn relabelling_players_keeps_values(mode in any_mode(), inst in arb_instance(ObjectiveMode::HitRewardCoverPenalty), m in any::<u32>(), shift in 1usize..8) {
        let inst = Instance { mode, ..inst };
        let perm = |p: usize| (p - 1 + shift) % inst.n + 1;
        let mut moved = inst.clone();
        for s in moved.reward_sets.iter_mut().chain(moved.penalty_sets.iter_mut()) {
            s.members = s.members.iter().map(|&p| perm(p)).collect();
        }
        let x = members(m & ((1 << inst.n) - 1));
        let y: Vec<usize> = x.iter().map(|&p| perm(p)).collect();
        prop_assert_eq!(inst.evaluate(&x).unwrap(), moved.evaluate(&y).unwrap());
    }

    #[test]
    fn min_cut_solver(inst in arb_instance(ObjectiveMode::CoverRewardHitPenalty)) {
        let sol = solve_max(&inst).unwrap();
        prop_assert_eq!(sol.value, optimum(&inst));
        prop_assert_eq!(inst.evaluate(&sol.members).unwrap(), sol.value);
        prop_assert!(decide_max(&inst, sol.value).unwrap());
        prop_assert!(!decide_max(&inst, sol.value + 1.0).unwrap());
        let (flow, cut) = max_flow(&build_rps_graph(&inst, None).unwrap());
        prop_assert!((flow - cut.capacity).abs() < 1e-9);
    }

    #[test]
    fn laminar_solver(n in 1usize..=12, seed in any::<u64>()) {
        let inst = generate_laminar(n, seed);
        let sol = solve_laminar_detailed(&inst).unwrap();
        prop_assert_eq!(sol.selection.value, optimum(&inst));
        prop_assert!(sol.network.check(&sol.circulation.flow).is_ok());
        prop_assert_eq!(sol.circulation.profit, inst.evaluate(&sol.selection.members).unwrap());
        let nice = sol.tree.to_nice_tree();
        prop_assert_eq!(optimum(&nice.to_instance()), optimum(&sol.tree.to_instance()));
    }

    #[test]
    fn core_is_a_minimal_equivalent_graph(n in 1usize..=12, seed in any::<u64>()) {
        let dag = ContainmentDag::from_instance(&generate_laminar(n, seed)).unwrap();
        let k = dag.nodes.len();
        let reduced = transitive_reduction(k, &dag.arcs);
        let full = transitive_closure(k, &dag.arcs);
        prop_assert_eq!(&transitive_closure(k, &reduced), &full);
        for i in 0..reduced.len() {
            let mut rest = reduced.clone();
            rest.remove(i);
            prop_assert_ne!(&transitive_closure(k, &rest), &full);
        }
        prop_assert!(irreducible_core(&dag).is_ok());
    }

    #[test]
    fn tree_dp(n in 1usize..=9, k in 1usize..=3, p in 0usize..=5, seed in any::<u64>()) {
        let (inst, td) = random_bounded_width(n, k, p, seed);
        prop_assert_eq!(solve_treedp(&inst, &td).unwrap().value, optimum(&inst));
        let g = ReducedConnectionGraph::from_instance(&inst).unwrap();
        let nice = make_nice(&g.graph, &td).unwrap();
        prop_assert!(nice.width() <= td.width());
        for table in compute_tables(&g, &nice).unwrap() {
            for key in table.entries.keys() {
                for (&pen, &d) in table.penalties.iter().zip(&key.degrees) {
                    prop_assert!(d <= g.graph.degree(pen));
                }
            }
        }
    }

    #[test]
    fn relaxation_dominates_and_rounding_is_feasible(mode in any_mode(), inst in arb_instance(ObjectiveMode::HitRewardCoverPenalty)) {
        let inst = Instance { mode, ..inst };
        let lp = solve_lp(&build_ip(&inst)).unwrap();
        let opt = optimum(&inst);
        prop_assert!(lp.objective >= opt - 1e-7);
        let rounded = round_solution(&inst, &lp.values[..inst.n]).unwrap();
        prop_assert!(rounded.value <= opt + 1e-9);
        let x = &lp.values[..inst.n];
        if x.iter().all(|&v| v.abs() < 1e-9 || (v - 1.0).abs() < 1e-9) {
            let ones: Vec<usize> = (1..=inst.n).filter(|&p| x[p - 1] > 0.5).collect();
            prop_assert_eq!(rounded.members, ones);
        }
    }

    #[test]
    fn lp_text_round_trips(mode in any_mode(), inst in arb_instance(ObjectiveMode::HitRewardCoverPenalty), integral in any::<bool>()) {
        let model = build_ip(&Instance { mode, ..inst });
        let parsed = parse_lp(&to_lp(&model, integral)).unwrap();
        prop_assert_eq!(parsed.rows.len(), model.rows.len());
        prop_assert!(parsed.variables().len() <= model.var_count());
    }

    #[test]
    fn instance_json_round_trips(mode in any_mode(), inst in arb_instance(ObjectiveMode::HitRewardCoverPenalty)) {
        let inst = Instance { mode, ..inst };
        prop_assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
    }

    #[test]
    fn mis_reduction_and_repair(g in arb_graph(9), m in any::<u32>()) {
        let inst = mis_to_rpsp(&g);
        let x = members(m & ((1 << g.node_count()) - 1));
        let fixed = repair(&inst, &x).unwrap();
        prop_assert!(fixed.value >= inst.evaluate(&x).unwrap());
        prop_assert!(fixed.members.iter().all(|p| x.contains(p)));
        for (u, v) in g.edges() {
            prop_assert!(!(fixed.members.contains(&(u + 1)) && fixed.members.contains(&(v + 1))));
        }
    }

    #[test]
    fn elimination_orders(g in arb_graph(8), n in 1usize..=12, k in 1usize..=4, seed in any::<u64>()) {
        match perfect_elimination_order(&g) {
            Some(order) => prop_assert!(is_perfect_elimination_order(&g, &order)),
            None => prop_assert!(!chordal_by_elimination(&g)),
        }
        let kt = random_k_tree(n, k, seed);
        let order = perfect_elimination_order(&kt);
        prop_assert!(order.is_some_and(|o| is_perfect_elimination_order(&kt, &o)));
    }

    #[test]
    fn sgsp_decomposition(n in 1usize..=8, p in 0usize..=6, phi in 1usize..=4, seed in any::<u64>()) {
        let inst = random_tree_instance(n, p, phi, seed);
        prop_assert_eq!(evaluate_sgsp(&inst, &[]).unwrap(), 0.0);
        let td = lemma_decomposition(&inst).unwrap();
        let bp = build_constraint_graph(&inst);
        prop_assert!(td.validate(&bp.graph).is_ok());
        let freq = frequency_profile(&inst).max;
        prop_assert!(td.width() <= freq as isize);
        let ig = build_interaction_graph(&bp);
        let arity = (0..bp.constraints).map(|j| bp.graph.degree(bp.constraint_node(j))).max().unwrap_or(1);
        let ig_width = exact_decomposition(&ig).unwrap().width();
        prop_assert!(ig_width <= (arity as isize) * (td.width() + 1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn run_records_pass_their_own_check(mode in any_mode(), inst in arb_instance(ObjectiveMode::HitRewardCoverPenalty)) {
        let inst = Instance { mode, ..inst };
        let dir = tempfile::tempdir().unwrap();
        let ipath = dir.path().join("i.json");
        let rpath = dir.path().join("r.json");
        inst.write(&ipath).unwrap();
        let (i, r) = (ipath.to_str().unwrap(), rpath.to_str().unwrap());
        let mut algorithms = Vec::new();
        for _ in 0..2 {
            let mut out = Vec::new();
            let code = cli::run(["rpsp", "solve", i, "-o", r], None, &mut out, &mut Vec::new());
            prop_assert_eq!(code, cli::EXIT_OK);
            let record: cli::RunRecord = serde_json::from_slice(&out).unwrap();
            algorithms.push(record.algorithm);
            let code = cli::run(["rpsp", "check", i, r], None, &mut Vec::new(), &mut Vec::new());
            prop_assert_eq!(code, cli::EXIT_OK);
        }
        prop_assert_eq!(&algorithms[0], &algorithms[1]);
    }

    #[test]
    fn experiment_reports_are_deterministic(seed in any::<u64>()) {
        let cfg = InstanceConfig::new(6, 4, 4, 0.5, seed);
        let a = run_experiment(&cfg, 6, ExactSolver::Brute).unwrap();
        prop_assert_eq!(&a, &run_experiment(&cfg, 6, ExactSolver::Brute).unwrap());
        for t in &a.trials {
            if t.delta == 0 {
                prop_assert_eq!(t.rounded.value, t.optimum.value);
            }
        }
    }
}
