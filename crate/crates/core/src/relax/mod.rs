//! Integer program, its LP relaxation, and arithmetic rounding.

pub mod experiment;
pub mod lpfile;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::{Deserialize, Serialize};

pub use experiment::{run_experiment, ExactSolver, ExperimentReport, ReferenceRow, TrialResult, CSV_HEADER, REFERENCE_ROWS};
pub use lpfile::{parse_lp, to_lp, LpFile};

use crate::error::{Error, Result};
use crate::instance::{Instance, ObjectiveMode, Selection};

/// Largest constraint or bound violation accepted from the LP solver.
pub const RESIDUAL_TOLERANCE: f64 = 1e-7;

/// `terms <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// Variables are ordered `x_1..x_n`, `y_1..y_h`, `z_1..z_l`; all bounded
/// by 0 and 1. The objective is maximised.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IpModel {
    pub players: usize,
    pub rewards: usize,
    pub penalties: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

impl IpModel {
    pub fn var_count(&self) -> usize {
        self.players + self.rewards + self.penalties
    }

    pub fn x(&self, player: usize) -> usize {
        player - 1
    }

    pub fn y(&self, i: usize) -> usize {
        self.players + i
    }

    pub fn z(&self, j: usize) -> usize {
        self.players + self.rewards + j
    }

    pub fn var_name(&self, v: usize) -> String {
        if v < self.players {
            format!("x{}", v + 1)
        } else if v < self.players + self.rewards {
            format!("y{}", v - self.players + 1)
        } else {
            format!("z{}", v - self.players - self.rewards + 1)
        }
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    /// Largest violation of a row or a `[0, 1]` bound.
    pub fn max_residual(&self, values: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| {
            let lhs: f64 = r.terms.iter().map(|&(v, c)| c * values[v]).sum();
            (lhs - r.rhs).max(0.0)
        });
        let bounds = values.iter().map(|&v| (-v).max(v - 1.0).max(0.0));
        rows.chain(bounds).fold(0.0, f64::max)
    }
}

/// One row per penalty set, then one per reward set.
///
/// In hit-reward mode a penalty row forces `z_j = 1` once all of `B_j` is
/// chosen and a reward row allows `y_i = 1` once some member of `A_i` is.
/// In cover-reward mode the roles swap: `|A_i| y_i <= sum x` and
/// `sum x <= |B_j| z_j`.
pub fn build_ip(instance: &Instance) -> IpModel {
    let (n, h, l) = (instance.n, instance.reward_sets.len(), instance.penalty_sets.len());
    let mut model = IpModel { players: n, rewards: h, penalties: l, objective: vec![0.0; n + h + l], rows: Vec::new() };
    for (i, set) in instance.reward_sets.iter().enumerate() {
        model.objective[n + i] = set.weight;
    }
    for (j, set) in instance.penalty_sets.iter().enumerate() {
        model.objective[n + h + j] = -set.weight;
    }
    let cover = instance.mode == ObjectiveMode::CoverRewardHitPenalty;
    for (j, set) in instance.penalty_sets.iter().enumerate() {
        let size = set.members.len() as f64;
        let mut terms: Vec<(usize, f64)> = set.members.iter().map(|&u| (u - 1, 1.0)).collect();
        let (z_coeff, rhs) = if cover { (-size, 0.0) } else { (-1.0, size - 1.0) };
        terms.push((n + h + j, z_coeff));
        model.rows.push(Row { name: format!("p{}", j + 1), terms, rhs });
    }
    for (i, set) in instance.reward_sets.iter().enumerate() {
        let size = set.members.len() as f64;
        let y_coeff = if cover { size } else { 1.0 };
        let mut terms = vec![(n + i, y_coeff)];
        terms.extend(set.members.iter().map(|&u| (u - 1, -1.0)));
        model.rows.push(Row { name: format!("r{}", i + 1), terms, rhs: 0.0 });
    }
    model
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
}

/// Optimal solution of the relaxation with all variables in `[0, 1]`.
pub fn solve_lp(model: &IpModel) -> Result<LpSolution> {
    if model.var_count() == 0 {
        return Ok(LpSolution { values: Vec::new(), objective: 0.0 });
    }
    let mut problem = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<_> = model.objective.iter().map(|&c| problem.add_var(c, (0.0, 1.0))).collect();
    for row in &model.rows {
        let terms: Vec<_> = row.terms.iter().map(|&(v, c)| (vars[v], c)).collect();
        problem.add_constraint(terms.as_slice(), ComparisonOp::Le, row.rhs);
    }
    let solution = problem.solve().map_err(|e| Error::Solver(format!("LP solver failed: {e}")))?;
    let values: Vec<f64> = vars.iter().map(|&v| *solution.var_value(v)).collect();
    let residual = model.max_residual(&values);
    if residual > RESIDUAL_TOLERANCE {
        return Err(Error::Solver(format!(
            "LP solution violates the model by {residual:e} ({} rows, {} variables)",
            model.rows.len(),
            values.len()
        )));
    }
    Ok(LpSolution { objective: model.objective_value(&values), values })
}

/// Players whose value is at least one half, scored on the instance.
pub fn round_solution(instance: &Instance, x: &[f64]) -> Result<Selection> {
    let members: Vec<usize> = x.iter().enumerate().filter(|(_, &v)| v >= 0.5 - 1e-9).map(|(u, _)| u + 1).collect();
    Selection::evaluated(instance, members)
}

/// Number of players on which two selections differ.
pub fn selection_distance(a: &[usize], b: &[usize]) -> usize {
    a.iter().filter(|u| !b.contains(u)).count() + b.iter().filter(|u| !a.contains(u)).count()
}

/// Rounded value over the optimum; `1` when both are zero, `None` when the
/// optimum is zero but the rounded value is not.
pub fn approximation_ratio(rounded: f64, optimum: f64) -> Option<f64> {
    if optimum.abs() > crate::instance::VALUE_TOLERANCE {
        Some(rounded / optimum)
    } else if rounded.abs() <= crate::instance::VALUE_TOLERANCE {
        Some(1.0)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brute::brute_force;
    use crate::generate::{generate, InstanceConfig};

    #[test]
    fn dimensions() {
        let inst = Instance::new(2, ObjectiveMode::HitRewardCoverPenalty).with_reward([1, 2], 1.0).with_penalty([1], 1.0);
        let m = build_ip(&inst);
        assert_eq!(m.var_count(), 4);
        assert_eq!(m.rows.len(), 2);
    }

    #[test]
    fn row_shapes() {
        let inst =
            Instance::new(2, ObjectiveMode::HitRewardCoverPenalty).with_reward([1, 2], 3.0).with_penalty([1, 2], 2.0);
        let m = build_ip(&inst);
        assert_eq!(m.rows[0].terms, vec![(0, 1.0), (1, 1.0), (3, -1.0)]);
        assert_eq!(m.rows[0].rhs, 1.0);
        assert_eq!(m.rows[1].terms, vec![(2, 1.0), (0, -1.0), (1, -1.0)]);
        assert_eq!(m.rows[1].rhs, 0.0);
        assert_eq!(m.objective, vec![0.0, 0.0, 3.0, -2.0]);
    }

    #[test]
    fn no_penalties_takes_everything() {
        let inst = Instance::new(3, ObjectiveMode::HitRewardCoverPenalty).with_reward([1, 2], 2.0).with_reward([3], 5.0);
        let lp = solve_lp(&build_ip(&inst)).unwrap();
        assert!((lp.objective - 7.0).abs() < 1e-9);
        let m = build_ip(&inst);
        assert!((lp.values[m.y(0)] - 1.0).abs() < 1e-9 && (lp.values[m.y(1)] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empty_model() {
        let inst = Instance::new(0, ObjectiveMode::HitRewardCoverPenalty);
        assert_eq!(solve_lp(&build_ip(&inst)).unwrap().objective, 0.0);
    }

    #[test]
    fn rounding_threshold() {
        let inst = Instance::new(3, ObjectiveMode::HitRewardCoverPenalty);
        assert_eq!(round_solution(&inst, &[0.5, 0.49, 1.0]).unwrap().members, vec![1, 3]);
    }

    #[test]
    fn ratio_rules() {
        assert_eq!(approximation_ratio(0.0, 0.0), Some(1.0));
        assert_eq!(approximation_ratio(-1.0, 0.0), None);
        assert_eq!(approximation_ratio(3.0, 4.0), Some(0.75));
        assert_eq!(selection_distance(&[1, 2], &[2, 3]), 2);
    }

    #[test]
    fn relaxation_bounds_the_optimum() {
        for mode in [ObjectiveMode::HitRewardCoverPenalty, ObjectiveMode::CoverRewardHitPenalty] {
            for seed in 0..60 {
                let inst = generate(&InstanceConfig::new(8, 6, 6, 0.5, seed).with_mode(mode)).unwrap();
                let lp = solve_lp(&build_ip(&inst)).unwrap();
                let opt = brute_force(&inst).unwrap().value;
                assert!(lp.objective >= opt - 1e-7, "seed {seed}: lp {} < opt {opt}", lp.objective);
            }
        }
    }

    #[test]
    fn integral_points_score_like_evaluate() {
        // the IP is exact: at binary x with best y, z the objective is the profit
        for mode in [ObjectiveMode::HitRewardCoverPenalty, ObjectiveMode::CoverRewardHitPenalty] {
            let inst = generate(&InstanceConfig::new(5, 4, 4, 0.6, 9).with_mode(mode)).unwrap();
            let m = build_ip(&inst);
            for mask in 0u32..32 {
                let members: Vec<usize> = (1..=5).filter(|p| mask >> (p - 1) & 1 == 1).collect();
                let mut values = vec![0.0; m.var_count()];
                for &p in &members {
                    values[m.x(p)] = 1.0;
                }
                for (i, s) in inst.reward_sets.iter().enumerate() {
                    let on = match mode {
                        ObjectiveMode::HitRewardCoverPenalty => s.members.iter().any(|u| members.contains(u)),
                        ObjectiveMode::CoverRewardHitPenalty => s.members.iter().all(|u| members.contains(u)),
                    };
                    values[m.y(i)] = f64::from(u8::from(on));
                }
                for (j, s) in inst.penalty_sets.iter().enumerate() {
                    let on = match mode {
                        ObjectiveMode::HitRewardCoverPenalty => s.members.iter().all(|u| members.contains(u)),
                        ObjectiveMode::CoverRewardHitPenalty => s.members.iter().any(|u| members.contains(u)),
                    };
                    values[m.z(j)] = f64::from(u8::from(on));
                }
                assert_eq!(m.max_residual(&values), 0.0);
                assert!((m.objective_value(&values) - inst.evaluate(&members).unwrap()).abs() < 1e-9);
            }
        }
    }
}
