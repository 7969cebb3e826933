//! Solvers for reward-penalty selection: choose a set of players to
//! maximise the weight of rewarded sets minus the weight of penalised ones.
//!
//! Exact algorithms cover the cases with polynomial structure (a single
//! minimum cut in cover-reward mode, laminar families, bounded treewidth,
//! uniform pairwise penalties on chordal graphs). Everything else goes
//! through exhaustive search or the LP relaxation in [`relax`].

pub mod brute;
pub mod cli;
pub mod error;
pub mod flowsolve;
pub mod generate;
pub mod graph;
pub mod instance;
pub mod laminar;
pub mod maxflow;
pub mod relax;
pub mod sgsp;
pub mod special;
pub mod treedp;

pub use error::{Error, Result};
pub use instance::{Instance, ObjectiveMode, Selection, WeightedSet};
