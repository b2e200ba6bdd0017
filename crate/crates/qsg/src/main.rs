//! `qsg`: command-line front end for the QoS satisfaction game toolkit.
//!
//! Subcommands: `solve`, `dynamics`, `analyze`, `reduce-3dm`, `simulate`.
//! Exit codes: 0 success, 2 validation error, 3 budget refusal, 4 internal
//! invariant violation.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use qos_games::dynamics::{
    run_better_response, ChoiceRule, DynamicsError, RunOptions, Scheduler, UpdateRule,
};
use qos_games::game::{Game, GameError, Profile};
use qos_games::hardness::{brute_force_3dm, reduce_3dm, HardnessError};
use qos_games::io::{
    profile_from_json, profile_to_json, GameDoc, GraphDoc, InstanceDoc, IoError, ScenarioDoc,
    SCHEMA_VERSION,
};
use qos_games::simkit::{replicate_detailed, SimError};
use qos_games::solvers::{
    brute_force_optimum, greedy_optimum, price_of_anarchy, round_robin_profile, Budget, SolverError,
};
use qos_games::spatial::{SpatialError, SpatialGame};

#[derive(Parser)]
#[command(
    name = "qsg",
    version,
    about = "QoS satisfaction games for spectrum sharing: solvers, dynamics, oracles, and a protocol simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a channel assignment with a centralized algorithm.
    Solve {
        /// Game file (JSON: schema_version, n_players, n_channels, thresholds).
        game: PathBuf,
        #[arg(long, value_enum)]
        algorithm: Algorithm,
        /// Profile-space cap for the brute-force search.
        #[arg(long)]
        budget: Option<u128>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run asynchronous better-response dynamics and record the trace.
    Dynamics {
        game: PathBuf,
        /// Interference graph file; omitted means full interference.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Initial profile file (JSON integer array); omitted means all-dormant.
        #[arg(long)]
        initial: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = SchedulerArg::Random)]
        scheduler: SchedulerArg,
        /// Seed for the random scheduler.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ChoiceArg::Random)]
        choice: ChoiceArg,
        /// Seed for the random strategy choice.
        #[arg(long, default_value_t = 0)]
        choice_seed: u64,
        /// Apply arbitrary better responses instead of best responses.
        #[arg(long)]
        any_better: bool,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Exact price-of-anarchy report via exhaustive enumeration.
    Analyze {
        game: PathBuf,
        #[arg(long)]
        budget: Option<u128>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Reduce a 3-dimensional matching instance to a game and decide it.
    #[command(name = "reduce-3dm")]
    Reduce3dm {
        /// Instance file (JSON: schema_version, I, triples).
        instance: PathBuf,
        #[arg(long)]
        budget: Option<u128>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Simulate the distributed channel-update protocol.
    Simulate {
        /// Scenario file (JSON: schema_version plus scenario fields).
        scenario: PathBuf,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algorithm {
    /// Greedy descending-threshold placement (homogeneous channels only).
    #[value(alias = "alg1")]
    Greedy,
    /// Round-robin spread over the channels.
    RoundRobin,
    /// Exhaustive social-optimum search.
    BruteForce,
}

impl Algorithm {
    fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::RoundRobin => "round-robin",
            Algorithm::BruteForce => "brute-force",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchedulerArg {
    Random,
    RoundRobin,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChoiceArg {
    Random,
    LowestIndex,
}

/// Command failures mapped onto the exit-code contract.
#[derive(Debug)]
enum CliError {
    /// Exit 2: bad input, violated precondition, unparsable file.
    Validation(String),
    /// Exit 3: an exact oracle refused to enumerate.
    Budget(String),
    /// Exit 4: an internal invariant was violated (a bug).
    Invariant(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) | CliError::Budget(msg) | CliError::Invariant(msg) => {
                write!(f, "{msg}")
            }
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Invariant(_) => 4,
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::InvalidProfile(_) => CliError::Validation(e.to_string()),
            _ => CliError::Invariant(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::UpdateBoundExceeded { .. } | SimError::MaxSlotsExceeded { .. } => {
                CliError::Invariant(e.to_string())
            }
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<HardnessError> for CliError {
    fn from(e: HardnessError) -> Self {
        match e {
            HardnessError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SpatialError> for CliError {
    fn from(e: SpatialError) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// Provenance block written into (or next to) every output file.
#[derive(Debug, Clone, Serialize)]
struct RunManifest {
    subcommand: String,
    config_path: String,
    seeds: BTreeMap<String, u64>,
    output_paths: Vec<String>,
    tool_version: String,
    timestamp: String,
}

impl RunManifest {
    fn new(subcommand: &str, config_path: &Path, seeds: BTreeMap<String, u64>) -> Self {
        RunManifest {
            subcommand: subcommand.to_string(),
            config_path: config_path.display().to_string(),
            seeds,
            output_paths: Vec::new(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }
}

/// Collects output files for one run and writes the trailing manifest.
struct OutputSet {
    dir: PathBuf,
    stem: String,
    manifest: RunManifest,
}

impl OutputSet {
    fn new(out_dir: &Path, input: &Path, manifest: RunManifest) -> Result<Self, CliError> {
        fs::create_dir_all(out_dir).map_err(|e| {
            CliError::Validation(format!("cannot create {}: {e}", out_dir.display()))
        })?;
        let stem = input
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "out".to_string());
        Ok(OutputSet {
            dir: out_dir.to_path_buf(),
            stem,
            manifest,
        })
    }

    fn path(&self, suffix: &str) -> PathBuf {
        self.dir.join(format!("{}.{suffix}", self.stem))
    }

    fn write_raw(&mut self, suffix: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.path(suffix);
        fs::write(&path, contents)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
        self.manifest.output_paths.push(path.display().to_string());
        Ok(path)
    }

    /// Write a JSON object with the manifest embedded under `"manifest"`.
    fn write_json(&mut self, suffix: &str, mut value: Value) -> Result<PathBuf, CliError> {
        let path = self.path(suffix);
        self.manifest.output_paths.push(path.display().to_string());
        if let Value::Object(map) = &mut value {
            map.insert(
                "manifest".to_string(),
                serde_json::to_value(&self.manifest).expect("manifest serializes"),
            );
        }
        let text = serde_json::to_string_pretty(&value).expect("value serializes");
        fs::write(&path, text + "\n")
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    /// Write the standalone manifest file for the run.
    fn finish(mut self, command_suffix: &str) -> Result<(), CliError> {
        let path = self.path(&format!("{command_suffix}.manifest.json"));
        self.manifest.output_paths.push(path.display().to_string());
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        fs::write(&path, text + "\n")
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
        Ok(())
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

fn parse_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read_text(path)?)
        .map_err(|e| CliError::Validation(format!("cannot parse {}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<Game, CliError> {
    Ok(parse_json::<GameDoc>(path)?.into_game()?)
}

fn budget_from(flag: Option<u128>) -> Budget {
    flag.map(Budget::new).unwrap_or_default()
}

fn cmd_solve(
    game_path: &Path,
    algorithm: Algorithm,
    budget: Option<u128>,
    out_dir: &Path,
) -> Result<(), CliError> {
    let game = load_game(game_path)?;
    let profile = match algorithm {
        Algorithm::Greedy => greedy_optimum(&game)?,
        Algorithm::RoundRobin => round_robin_profile(game.n_players(), game.n_channels()),
        Algorithm::BruteForce => brute_force_optimum(&game, &budget_from(budget))?.witness,
    };
    let welfare = game.welfare(&profile);
    let satisfied = game.satisfied_count(&profile);

    let manifest = RunManifest::new("solve", game_path, BTreeMap::new());
    let mut out = OutputSet::new(out_dir, game_path, manifest)?;
    out.write_raw("profile.json", &(profile_to_json(&profile) + "\n"))?;
    out.write_json(
        "solve.json",
        json!({
            "schema_version": SCHEMA_VERSION,
            "algorithm": algorithm.name(),
            "profile": profile,
            "welfare": welfare,
            "satisfied_count": satisfied,
            "natural": game.is_natural(&profile),
        }),
    )?;
    out.finish("solve")?;
    println!(
        "solve[{}]: {} players, {} channels -> profile {} | welfare {welfare}, {satisfied} satisfied",
        algorithm.name(),
        game.n_players(),
        game.n_channels(),
        profile
    );
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_dynamics(
    game_path: &Path,
    graph_path: Option<&Path>,
    initial_path: Option<&Path>,
    scheduler: SchedulerArg,
    seed: u64,
    choice: ChoiceArg,
    choice_seed: u64,
    any_better: bool,
    out_dir: &Path,
) -> Result<(), CliError> {
    let game = load_game(game_path)?;
    let sgame = match graph_path {
        Some(p) => SpatialGame::new(game, parse_json::<GraphDoc>(p)?.into_graph()?)?,
        None => SpatialGame::complete(game),
    };
    let initial = match initial_path {
        Some(p) => profile_from_json(&read_text(p)?)?,
        None => Profile::all_dormant(sgame.n_players()),
    };
    sgame.validate_profile(&initial)?;
    let options = RunOptions {
        scheduler: match scheduler {
            SchedulerArg::Random => Scheduler::UniformRandom { seed },
            SchedulerArg::RoundRobin => Scheduler::RoundRobin,
        },
        choice: match choice {
            ChoiceArg::Random => ChoiceRule::UniformRandom { seed: choice_seed },
            ChoiceArg::LowestIndex => ChoiceRule::LowestIndex,
        },
        update_rule: if any_better {
            UpdateRule::AnyBetterResponse
        } else {
            UpdateRule::BestResponse
        },
    };
    let trace = run_better_response(&sgame, &initial, &options)?;

    let mut seeds = BTreeMap::new();
    seeds.insert("scheduler".to_string(), seed);
    seeds.insert("choice".to_string(), choice_seed);
    let manifest = RunManifest::new("dynamics", game_path, seeds);
    let mut out = OutputSet::new(out_dir, game_path, manifest)?;
    out.write_raw("trace.csv", &trace.to_csv())?;
    out.write_json(
        "trace.json",
        json!({
            "schema_version": SCHEMA_VERSION,
            "options": options,
            "trace": trace,
            "final_welfare": sgame.welfare(&trace.final_profile),
        }),
    )?;
    out.finish("dynamics")?;
    println!(
        "dynamics: converged after {} updates -> {} | welfare {}",
        trace.events.len(),
        trace.final_profile,
        sgame.welfare(&trace.final_profile)
    );
    Ok(())
}

fn cmd_analyze(game_path: &Path, budget: Option<u128>, out_dir: &Path) -> Result<(), CliError> {
    let game = load_game(game_path)?;
    let report = price_of_anarchy(&game, &budget_from(budget))?;

    let manifest = RunManifest::new("analyze", game_path, BTreeMap::new());
    let mut out = OutputSet::new(out_dir, game_path, manifest)?;
    out.write_json(
        "poa.json",
        json!({
            "schema_version": SCHEMA_VERSION,
            "optimum_welfare": report.optimum_welfare,
            "worst_pne_welfare": report.worst_pne_welfare,
            "best_pne_welfare": report.best_pne_welfare,
            "poa": report.poa,
            "bound": report.bound,
            "pne_count": report.pne_count,
        }),
    )?;
    out.finish("analyze")?;
    println!(
        "analyze: optimum {} | equilibria {} (welfare {}..{}) | poa {} <= bound {}",
        report.optimum_welfare,
        report.pne_count,
        report.worst_pne_welfare,
        report.best_pne_welfare,
        report.poa,
        report.bound
    );
    Ok(())
}

fn cmd_reduce_3dm(
    instance_path: &Path,
    budget: Option<u128>,
    out_dir: &Path,
) -> Result<(), CliError> {
    let instance = parse_json::<InstanceDoc>(instance_path)?.into_instance()?;
    let game = reduce_3dm(&instance);

    let manifest = RunManifest::new("reduce-3dm", instance_path, BTreeMap::new());
    let mut out = OutputSet::new(out_dir, instance_path, manifest)?;
    let game_doc = serde_json::to_value(GameDoc::from_game(&game)).expect("game serializes");
    out.write_json("reduced-game.json", game_doc)?;

    // The decision needs the exhaustive optimum; refuse over budget.
    let optimum = brute_force_optimum(&game, &budget_from(budget))?;
    let via_game = optimum.welfare == instance.target_welfare();
    let direct = brute_force_3dm(&instance)?;
    out.write_json(
        "decision.json",
        json!({
            "schema_version": SCHEMA_VERSION,
            "side": instance.side(),
            "n_triples": instance.n_triples(),
            "reduced_players": instance.reduced_players(),
            "reduced_channels": instance.n_triples(),
            "target_welfare": instance.target_welfare(),
            "optimum_welfare": optimum.welfare,
            "matching_via_game": via_game,
            "matching_direct_oracle": direct,
            "oracles_agree": via_game == direct,
        }),
    )?;
    out.finish("reduce-3dm")?;
    println!(
        "reduce-3dm: I={} J={} -> game {}x{} | matching: via-game {via_game}, direct {direct}, agree {}",
        instance.side(),
        instance.n_triples(),
        game.n_players(),
        game.n_channels(),
        via_game == direct
    );
    Ok(())
}

fn cmd_simulate(scenario_path: &Path, reps: usize, out_dir: &Path) -> Result<(), CliError> {
    let config = parse_json::<ScenarioDoc>(scenario_path)?.into_config()?;
    let (summary, runs) = replicate_detailed(&config, reps)?;

    let mut seeds = BTreeMap::new();
    seeds.insert("topology".to_string(), config.topology_seed);
    seeds.insert("dynamics".to_string(), config.dynamics_seed);
    let manifest = RunManifest::new("simulate", scenario_path, seeds);
    let mut out = OutputSet::new(out_dir, scenario_path, manifest)?;
    for (rep, run) in runs.iter().enumerate() {
        out.write_raw(&format!("rep{rep:03}.csv"), &run.to_csv())?;
    }
    out.write_json(
        "summary.json",
        json!({
            "schema_version": SCHEMA_VERSION,
            "n_reps": summary.n_reps,
            "mean_satisfied": summary.mean_satisfied,
            "min_satisfied": summary.min_satisfied,
            "max_satisfied": summary.max_satisfied,
            "mean_convergence_slots": summary.mean_convergence_slots,
            "mean_update_count": summary.mean_update_count,
            "reps": summary.reps,
            "runs": runs.iter().map(|r| r.summary()).collect::<Vec<_>>(),
        }),
    )?;
    out.finish("simulate")?;
    println!(
        "simulate: {} users, {reps} reps | satisfied mean {:.2} (min {}, max {}) | mean convergence {:.1} slots",
        config.n_users,
        summary.mean_satisfied,
        summary.min_satisfied,
        summary.max_satisfied,
        summary.mean_convergence_slots
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            game,
            algorithm,
            budget,
            out_dir,
        } => cmd_solve(&game, algorithm, budget, &out_dir),
        Command::Dynamics {
            game,
            graph,
            initial,
            scheduler,
            seed,
            choice,
            choice_seed,
            any_better,
            out_dir,
        } => cmd_dynamics(
            &game,
            graph.as_deref(),
            initial.as_deref(),
            scheduler,
            seed,
            choice,
            choice_seed,
            any_better,
            &out_dir,
        ),
        Command::Analyze {
            game,
            budget,
            out_dir,
        } => cmd_analyze(&game, budget, &out_dir),
        Command::Reduce3dm {
            instance,
            budget,
            out_dir,
        } => cmd_reduce_3dm(&instance, budget, &out_dir),
        Command::Simulate {
            scenario,
            reps,
            out_dir,
        } => cmd_simulate(&scenario, reps, &out_dir),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
