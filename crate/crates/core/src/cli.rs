//! The `rpsp` command line.
//!
//! Exit codes: 0 success, 1 a checked value does not match, 2 a parse,
//! validation or usage error, 3 no exact algorithm applies.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::brute::brute_force;
use crate::error::{Error, Result};
use crate::flowsolve::{build_rps_graph, solve_max};
use crate::generate::{generate, generate_laminar, sub_seed, InstanceConfig, WEIGHT_RANGE};
use crate::graph::TreeDecomposition;
use crate::instance::{values_match, Instance, ObjectiveMode, Selection, WeightedSet};
use crate::laminar::{instance_is_laminar, solve_laminar_detailed};
use crate::relax::{build_ip, run_experiment, to_lp, ExactSolver, CSV_HEADER, REFERENCE_ROWS};
use crate::sgsp::{build_constraint_graph, frequency_profile, lemma_decomposition, SgspInstance};
use crate::special::{simplify_connection_graph, solve_uniform, UniformOutcome};
use crate::treedp::{exact_decomposition, solve_treedp, ReducedConnectionGraph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NO_ALGORITHM: i32 = 3;

/// Overrides `--seed` wherever a command takes one.
pub const SEED_ENV: &str = "RPSP_SEED";

#[derive(Debug, Parser)]
#[command(name = "rpsp", version, about = "Reward-penalty selection solvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance exactly and print a run record.
    Solve(SolveArgs),
    /// Write seeded random instances.
    Gen(GenArgs),
    /// Compare LP rounding against exact optima and print a CSV row.
    Bench(BenchArgs),
    /// Recompute the value of a selection and compare it with the claim.
    Check(CheckArgs),
    /// Write the integer program (or its relaxation) in LP format.
    ExportLp(ExportLpArgs),
    /// Write a connection graph in PACE format.
    ExportGraph(ExportGraphArgs),
    /// Tree decomposition of the constraint graph of a subgraph instance on a tree.
    SgspDecompose(SgspDecomposeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    /// mincut for cover-reward, then laminar, then treedp with a given
    /// decomposition, then uniform, then brute force.
    Auto,
    Brute,
    Mincut,
    Laminar,
    Treedp,
    Uniform,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::Brute => "brute",
            Algorithm::Mincut => "mincut",
            Algorithm::Laminar => "laminar",
            Algorithm::Treedp => "treedp",
            Algorithm::Uniform => "uniform",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    HitReward,
    CoverReward,
}

impl From<ModeArg> for ObjectiveMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::HitReward => ObjectiveMode::HitRewardCoverPenalty,
            ModeArg::CoverReward => ObjectiveMode::CoverRewardHitPenalty,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    pub algorithm: Algorithm,
    /// Tree decomposition of the reduced connection graph (PACE td format).
    #[arg(long)]
    pub decomposition: Option<PathBuf>,
    /// Recorded in the run record.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also write the run record here.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// DOT dump of the laminar tree after the nice-tree reductions.
    #[arg(long)]
    pub dot_tree: Option<PathBuf>,
    /// DOT dump of the flow network (mincut) or circulation (laminar).
    #[arg(long)]
    pub dot_network: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub r: usize,
    #[arg(long, default_value_t = 0)]
    pub p: usize,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, value_enum, default_value = "hit-reward")]
    pub mode: ModeArg,
    /// Laminar families on `n` players; `r`, `p` and `beta` are ignored.
    #[arg(long)]
    pub laminar: bool,
    #[arg(long, short, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExactArg {
    Auto,
    Brute,
    Mincut,
    Treedp,
}

impl From<ExactArg> for ExactSolver {
    fn from(e: ExactArg) -> Self {
        match e {
            ExactArg::Auto => ExactSolver::Auto,
            ExactArg::Brute => ExactSolver::Brute,
            ExactArg::Mincut => ExactSolver::MinCut,
            ExactArg::Treedp => ExactSolver::TreeDp,
        }
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, value_enum, default_value = "auto")]
    pub exact: ExactArg,
    #[arg(long, value_enum, default_value = "hit-reward")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub instance: PathBuf,
    /// A run record, or an object with `members` and `value`.
    pub selection: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportLpArgs {
    pub instance: PathBuf,
    /// Continuous `[0, 1]` bounds instead of binary variables.
    #[arg(long)]
    pub relaxed: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphForm {
    /// Players and penalty sets, singleton rewards folded into players.
    Reduced,
    /// Players only, two-element penalty sets as edges.
    Simplified,
}

#[derive(Debug, Args)]
pub struct ExportGraphArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "reduced")]
    pub form: GraphForm,
    /// Also write a minimum-width decomposition (graphs up to 20 nodes).
    #[arg(long)]
    pub decomposition: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SgspDecomposeArgs {
    pub instance: PathBuf,
    /// Also write the constraint graph in PACE format.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// What `solve` prints. The value is re-evaluated before it is emitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// SHA-256 of the instance's canonical JSON.
    pub instance_digest: String,
    pub algorithm: String,
    pub value: f64,
    pub selection: Vec<usize>,
    pub wall_time_ms: f64,
    pub seed: Option<u64>,
}

pub fn instance_digest(instance: &Instance) -> String {
    let hash = Sha256::digest(instance.to_json().as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

/// A command failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SizeLimit { .. } | Error::NotReproducible(_) => EXIT_NO_ALGORITHM,
            _ => EXIT_INVALID,
        };
        Failure { code, message: e.to_string() }
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn no_algorithm(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_NO_ALGORITHM, message: message.into() }
}

fn effective_seed(flag: Option<u64>, env: Option<&str>) -> std::result::Result<Option<u64>, Failure> {
    match env {
        Some(text) => text
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure { code: EXIT_INVALID, message: format!("{SEED_ENV}={text:?} is not an unsigned integer") }),
        None => Ok(flag),
    }
}

fn write_or_print(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn load_instance(path: &Path) -> Result<Instance> {
    let inst = Instance::read(path)?;
    inst.ensure_valid()?;
    Ok(inst)
}

/// Result of running one algorithm, with optional debug dumps.
struct Solved {
    algorithm: Algorithm,
    selection: Selection,
    dot_tree: Option<String>,
    dot_network: Option<String>,
}

impl Solved {
    fn plain(algorithm: Algorithm, selection: Selection) -> Self {
        Solved { algorithm, selection, dot_tree: None, dot_network: None }
    }
}

fn run_laminar(instance: &Instance) -> Result<Solved> {
    let sol = solve_laminar_detailed(instance)?;
    Ok(Solved {
        algorithm: Algorithm::Laminar,
        dot_tree: Some(sol.nice_tree.to_dot()),
        dot_network: Some(sol.network.to_dot(Some(&sol.circulation.flow))),
        selection: sol.selection,
    })
}

fn run_mincut(instance: &Instance) -> Result<Solved> {
    let selection = solve_max(instance)?;
    let dot = build_rps_graph(instance, None)?.to_dot();
    Ok(Solved { algorithm: Algorithm::Mincut, selection, dot_tree: None, dot_network: Some(dot) })
}

fn run_uniform(instance: &Instance) -> Result<Option<Solved>> {
    let graph = simplify_connection_graph(instance)?;
    Ok(match solve_uniform(&graph) {
        UniformOutcome::Solved { selection, .. } => Some(Solved::plain(Algorithm::Uniform, selection)),
        UniformOutcome::NotApplicable(_) => None,
    })
}

fn run_algorithm(instance: &Instance, algorithm: Algorithm, decomposition: Option<&TreeDecomposition>) -> std::result::Result<Solved, Failure> {
    match algorithm {
        Algorithm::Brute => Ok(Solved::plain(algorithm, brute_force(instance)?)),
        Algorithm::Mincut => Ok(run_mincut(instance)?),
        Algorithm::Laminar => Ok(run_laminar(instance)?),
        Algorithm::Treedp => {
            let td = match decomposition {
                Some(td) => td.clone(),
                None => exact_decomposition(&ReducedConnectionGraph::from_instance(instance)?.graph)?,
            };
            Ok(Solved::plain(algorithm, solve_treedp(instance, &td)?))
        }
        Algorithm::Uniform => match solve_uniform(&simplify_connection_graph(instance)?) {
            UniformOutcome::Solved { selection, .. } => Ok(Solved::plain(algorithm, selection)),
            UniformOutcome::NotApplicable(why) => Err(no_algorithm(format!("uniform solver does not apply: {why}"))),
        },
        Algorithm::Auto => auto_dispatch(instance, decomposition),
    }
}

fn auto_dispatch(instance: &Instance, decomposition: Option<&TreeDecomposition>) -> std::result::Result<Solved, Failure> {
    if instance.mode == ObjectiveMode::CoverRewardHitPenalty {
        return Ok(run_mincut(instance)?);
    }
    if instance_is_laminar(instance) {
        match run_laminar(instance) {
            Ok(s) => return Ok(s),
            Err(Error::DuplicateSet { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(td) = decomposition {
        if instance.has_singleton_rewards() {
            return Ok(Solved::plain(Algorithm::Treedp, solve_treedp(instance, td)?));
        }
    }
    if let Ok(Some(solved)) = run_uniform(instance) {
        return Ok(solved);
    }
    match brute_force(instance) {
        Ok(sel) => Ok(Solved::plain(Algorithm::Brute, sel)),
        Err(Error::SizeLimit { n, cap }) => Err(no_algorithm(format!(
            "no exact algorithm applies: the instance is not cover-reward, not laminar, has no decomposition \
             or uniform structure, and n = {n} exceeds the brute-force cap {cap}; \
             run `rpsp export-lp` and use an external IP solver"
        ))),
        Err(e) => Err(e.into()),
    }
}

fn cmd_solve(args: &SolveArgs, seed_env: Option<&str>, out: &mut dyn Write) -> CmdResult {
    let seed = effective_seed(args.seed, seed_env)?;
    let instance = load_instance(&args.instance)?;
    let decomposition = match &args.decomposition {
        Some(p) => Some(TreeDecomposition::from_pace(&std::fs::read_to_string(p).map_err(Error::from)?)?),
        None => None,
    };
    let start = Instant::now();
    let solved = run_algorithm(&instance, args.algorithm, decomposition.as_ref())?;
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let check = instance.evaluate(&solved.selection.members)?;
    if !values_match(check, solved.selection.value) {
        return Err(Error::Solver(format!("reported value {} re-evaluates to {check}", solved.selection.value)).into());
    }
    for (path, dot, what) in [(&args.dot_tree, &solved.dot_tree, "tree"), (&args.dot_network, &solved.dot_network, "network")] {
        if let Some(path) = path {
            let text = dot
                .as_ref()
                .ok_or_else(|| Failure { code: EXIT_INVALID, message: format!("{} produces no {what} dump", solved.algorithm.name()) })?;
            std::fs::write(path, text).map_err(Error::from)?;
        }
    }
    let record = RunRecord {
        instance_digest: instance_digest(&instance),
        algorithm: solved.algorithm.name().to_string(),
        value: check,
        selection: solved.selection.members,
        wall_time_ms,
        seed,
    };
    let text = serde_json::to_string_pretty(&record).expect("record serialises") + "\n";
    if let Some(p) = &args.output {
        std::fs::write(p, &text).map_err(Error::from)?;
    }
    out.write_all(text.as_bytes()).map_err(Error::from)?;
    Ok(())
}

fn cmd_gen(args: &GenArgs, seed_env: Option<&str>, out: &mut dyn Write) -> CmdResult {
    let seed = effective_seed(Some(args.seed), seed_env)?.unwrap_or(0);
    let config = InstanceConfig::new(args.n, args.r, args.p, args.beta, seed).with_mode(args.mode.into());
    if !args.laminar {
        config.check()?;
    }
    std::fs::create_dir_all(&args.out).map_err(Error::from)?;
    for i in 0..args.count {
        let s = sub_seed(seed, i as u64);
        let inst = if args.laminar { generate_laminar(args.n, s) } else { generate(&config.with_seed(s))? };
        let path = args.out.join(format!("instance_{i:05}.json"));
        inst.write(&path)?;
        writeln!(out, "{}", path.display()).map_err(Error::from)?;
    }
    Ok(())
}

fn cmd_bench(args: &BenchArgs, seed_env: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let seed = effective_seed(Some(args.seed), seed_env)?.unwrap_or(0);
    let config = InstanceConfig::new(args.n, args.r, args.p, args.beta, seed).with_mode(args.mode.into());
    config.check()?;
    let io = |e: std::io::Error| Failure::from(Error::from(e));
    let (lo, hi) = WEIGHT_RANGE;
    writeln!(err, "note: set weights are drawn uniformly from {lo}..={hi}; the reference table's distribution is unknown")
        .map_err(io)?;
    writeln!(out, "{CSV_HEADER}").map_err(io)?;
    if args.trials == 0 {
        return Ok(());
    }
    match run_experiment(&config, args.trials, args.exact.into()) {
        Ok(report) => {
            writeln!(out, "{}", report.csv_row()).map_err(io)?;
            Ok(())
        }
        Err(Error::NotReproducible(why)) => {
            writeln!(out, "# not reproducible at desk scale: {why}").map_err(io)?;
            let reference = REFERENCE_ROWS
                .iter()
                .find(|t| (t.n, t.r, t.p) == (args.n, args.r, args.p) && (t.beta - args.beta).abs() < 1e-12);
            if let Some(t) = reference {
                writeln!(
                    out,
                    "# reference: {},{},{},{},{},{},{},{}",
                    t.n, t.r, t.p, t.beta, t.delta_avg, t.delta_max, t.alpha_avg, t.alpha_min
                )
                .map_err(io)?;
            }
            Err(no_algorithm("no exact solver reaches this configuration"))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Deserialize)]
struct ClaimedSelection {
    #[serde(alias = "members")]
    selection: Vec<usize>,
    value: f64,
}

fn cmd_check(args: &CheckArgs, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(&args.instance)?;
    let text = std::fs::read_to_string(&args.selection).map_err(Error::from)?;
    let claim: ClaimedSelection = serde_json::from_str(&text).map_err(Error::from)?;
    let value = instance.evaluate(&claim.selection)?;
    let covered = |s: &WeightedSet| s.members.iter().all(|p| claim.selection.contains(p));
    let hit = |s: &WeightedSet| s.members.iter().any(|p| claim.selection.contains(p));
    let list = |sets: &[WeightedSet], f: &dyn Fn(&WeightedSet) -> bool| -> Vec<usize> {
        sets.iter().enumerate().filter(|(_, s)| f(s)).map(|(i, _)| i + 1).collect()
    };
    let io = |e: std::io::Error| Failure::from(Error::from(e));
    writeln!(out, "covered reward sets: {:?}", list(&instance.reward_sets, &covered)).map_err(io)?;
    writeln!(out, "hit reward sets: {:?}", list(&instance.reward_sets, &hit)).map_err(io)?;
    writeln!(out, "covered penalty sets: {:?}", list(&instance.penalty_sets, &covered)).map_err(io)?;
    writeln!(out, "hit penalty sets: {:?}", list(&instance.penalty_sets, &hit)).map_err(io)?;
    writeln!(out, "value: {value}").map_err(io)?;
    if values_match(value, claim.value) {
        writeln!(out, "ok").map_err(io)?;
        Ok(())
    } else {
        Err(Failure { code: EXIT_MISMATCH, message: format!("claimed value {} but the selection is worth {value}", claim.value) })
    }
}

fn cmd_export_lp(args: &ExportLpArgs, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(&args.instance)?;
    let text = to_lp(&build_ip(&instance), !args.relaxed);
    Ok(write_or_print(args.output.as_deref(), &text, out)?)
}

fn cmd_export_graph(args: &ExportGraphArgs, out: &mut dyn Write) -> CmdResult {
    let instance = load_instance(&args.instance)?;
    let graph = match args.form {
        GraphForm::Reduced => ReducedConnectionGraph::from_instance(&instance)?.graph,
        GraphForm::Simplified => simplify_connection_graph(&instance)?.graph,
    };
    if let Some(p) = &args.decomposition {
        let td = exact_decomposition(&graph)?;
        std::fs::write(p, td.to_pace(graph.node_count())).map_err(Error::from)?;
    }
    Ok(write_or_print(args.output.as_deref(), &graph.to_pace(), out)?)
}

fn cmd_sgsp_decompose(args: &SgspDecomposeArgs, out: &mut dyn Write) -> CmdResult {
    let instance = SgspInstance::read(&args.instance)?;
    let td = lemma_decomposition(&instance)?;
    let bp = build_constraint_graph(&instance);
    td.validate(&bp.graph)?;
    if let Some(p) = &args.graph {
        std::fs::write(p, bp.graph.to_pace()).map_err(Error::from)?;
    }
    let phi = frequency_profile(&instance).max;
    let text = format!("c width {} frequency {phi}\n{}", td.width(), td.to_pace(bp.graph.node_count()));
    Ok(write_or_print(args.output.as_deref(), &text, out)?)
}

/// Runs one command with the given seed override, returning its exit code.
pub fn run_command(cli: &Cli, seed_env: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, seed_env, out),
        Command::Gen(a) => cmd_gen(a, seed_env, out),
        Command::Bench(a) => cmd_bench(a, seed_env, out, err),
        Command::Check(a) => cmd_check(a, out),
        Command::ExportLp(a) => cmd_export_lp(a, out),
        Command::ExportGraph(a) => cmd_export_graph(a, out),
        Command::SgspDecompose(a) => cmd_sgsp_decompose(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, seed_env: Option<&str>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_command(&cli, seed_env, out, err),
        Err(e) => {
            let _ = write!(err, "{e}");
            if e.use_stderr() {
                EXIT_INVALID
            } else {
                let _ = write!(out, "{e}");
                EXIT_OK
            }
        }
    }
}

/// Entry point for the binary: process arguments, environment and stdio.
pub fn main() -> i32 {
    let seed_env = std::env::var(SEED_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), seed_env.as_deref(), &mut stdout.lock(), &mut stderr.lock())
}
