//! Rounding quality over batches of random instances.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{approximation_ratio, build_ip, round_solution, selection_distance, solve_lp};
use crate::brute::{brute_force, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::flowsolve::solve_max;
use crate::generate::{generate, sub_seed, InstanceConfig};
use crate::instance::{Instance, ObjectiveMode, Selection};
use crate::treedp::{exact_decomposition, solve_treedp, ReducedConnectionGraph};

pub const CSV_HEADER: &str = "n,r,p,beta,delta_avg,delta_max,alpha_avg,alpha_min";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub n: usize,
    pub r: usize,
    pub p: usize,
    pub beta: f64,
    pub delta_avg: f64,
    pub delta_max: usize,
    pub alpha_avg: f64,
    pub alpha_min: f64,
}

const fn row(r: usize, p: usize, beta: f64, delta_avg: f64, delta_max: usize, alpha_avg: f64, alpha_min: f64) -> ReferenceRow {
    ReferenceRow { n: 100, r, p, beta, delta_avg, delta_max, alpha_avg, alpha_min }
}

/// Reference rounding results at n = 100, 1000 instances per configuration,
/// obtained with an external IP solver.
pub const REFERENCE_ROWS: [ReferenceRow; 6] = [
    row(100, 100, 0.25, 13.743, 31, 0.958, 0.574),
    row(100, 100, 0.5, 7.01, 24, 0.974, 0.451),
    row(100, 100, 0.75, 1.646, 19, 0.995, 0.763),
    row(100, 100, 1.0, 0.725, 13, 0.9997, 0.913),
    row(150, 50, 1.0, 0.325, 7, 0.9997, 0.928),
    row(50, 150, 1.0, 1.278, 15, 0.997, 0.658),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExactSolver {
    /// Brute force up to its cap, then min-cut for cover-reward mode, then
    /// the tree decomposition DP when the reduced graph is small enough.
    Auto,
    Brute,
    MinCut,
    TreeDp,
}

fn exact_optimum(instance: &Instance, solver: ExactSolver) -> Result<Selection> {
    match solver {
        ExactSolver::Brute => brute_force(instance),
        ExactSolver::MinCut => solve_max(instance),
        ExactSolver::TreeDp => {
            let graph = ReducedConnectionGraph::from_instance(instance)?;
            solve_treedp(instance, &exact_decomposition(&graph.graph)?)
        }
        ExactSolver::Auto => {
            if instance.n <= DEFAULT_CAP {
                brute_force(instance)
            } else if instance.mode == ObjectiveMode::CoverRewardHitPenalty {
                solve_max(instance)
            } else {
                exact_optimum(instance, ExactSolver::TreeDp)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub seed: u64,
    pub lp_value: f64,
    pub rounded: Selection,
    pub optimum: Selection,
    pub delta: usize,
    pub alpha: Option<f64>,
}

pub fn run_trial(instance: &Instance, solver: ExactSolver, seed: u64) -> Result<TrialResult> {
    let lp = solve_lp(&build_ip(instance))?;
    let rounded = round_solution(instance, &lp.values[..instance.n])?;
    let optimum = exact_optimum(instance, solver).map_err(|e| match e {
        Error::SizeLimit { n, cap } => {
            Error::NotReproducible(format!("no exact solver reaches n = {n} (cap {cap}); export the IP and solve it externally"))
        }
        other => other,
    })?;
    let delta = selection_distance(&rounded.members, &optimum.members);
    let alpha = approximation_ratio(rounded.value, optimum.value);
    Ok(TrialResult { seed, lp_value: lp.objective, rounded, optimum, delta, alpha })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: InstanceConfig,
    pub trials: Vec<TrialResult>,
    pub delta_avg: Option<f64>,
    pub delta_max: Option<usize>,
    pub alpha_avg: Option<f64>,
    pub alpha_min: Option<f64>,
    /// Trials whose ratio is undefined (zero optimum, nonzero rounding).
    pub alpha_excluded: usize,
}

impl ExperimentReport {
    fn aggregate(config: InstanceConfig, trials: Vec<TrialResult>) -> Self {
        let count = trials.len();
        let delta_avg = (count > 0).then(|| trials.iter().map(|t| t.delta as f64).sum::<f64>() / count as f64);
        let delta_max = trials.iter().map(|t| t.delta).max();
        let alphas: Vec<f64> = trials.iter().filter_map(|t| t.alpha).collect();
        let alpha_avg = (!alphas.is_empty()).then(|| alphas.iter().sum::<f64>() / alphas.len() as f64);
        let alpha_min = alphas.iter().copied().reduce(f64::min);
        ExperimentReport {
            config,
            alpha_excluded: count - alphas.len(),
            trials,
            delta_avg,
            delta_max,
            alpha_avg,
            alpha_min,
        }
    }

    /// One line in [`CSV_HEADER`] column order; undefined values are empty.
    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.4}")).unwrap_or_default();
        let mut line = String::new();
        let _ = write!(
            line,
            "{},{},{},{},{},{},{},{}",
            self.config.n,
            self.config.r,
            self.config.p,
            self.config.beta,
            opt(self.delta_avg),
            self.delta_max.map(|d| d.to_string()).unwrap_or_default(),
            opt(self.alpha_avg),
            opt(self.alpha_min)
        );
        line
    }
}

/// Runs `trials` independent instances of `config`; trial `i` uses the
/// sub-seed `i` of the configured seed, so the report is deterministic.
pub fn run_experiment(config: &InstanceConfig, trials: usize, solver: ExactSolver) -> Result<ExperimentReport> {
    config.check()?;
    let out_of_reach = match solver {
        ExactSolver::Brute => config.n > DEFAULT_CAP,
        ExactSolver::MinCut => config.mode != ObjectiveMode::CoverRewardHitPenalty,
        ExactSolver::TreeDp => false,
        ExactSolver::Auto => config.n > DEFAULT_CAP && config.mode == ObjectiveMode::HitRewardCoverPenalty && config.beta * config.n as f64 > 1.0,
    };
    if out_of_reach {
        return Err(Error::NotReproducible(format!(
            "configuration (n={}, r={}, p={}, beta={}) needs an exact IP solver beyond this library; \
             export the models with export-lp",
            config.n, config.r, config.p, config.beta
        )));
    }
    let results: Vec<TrialResult> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let seed = sub_seed(config.seed, i);
            let instance = generate(&config.with_seed(seed))?;
            run_trial(&instance, solver, seed)
        })
        .collect::<Result<_>>()?;
    Ok(ExperimentReport::aggregate(*config, results))
}
