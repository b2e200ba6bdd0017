//! Better-response machinery and instrumented asynchronous update runs.
//!
//! Every QoS satisfaction game (spatial or not) has the finite
//! improvement property: the doubled potential
//!
//! ```text
//! 2*Phi(x) = 2 * sum_{n active} T[n][x_n]
//!            - 2 * #{edges {n,m} : x_n = x_m != 0}
//!            - #{n : x_n != 0}
//! ```
//!
//! rises by at least 1 with every better-response update (doubling keeps the
//! half-integer terms exact). With thresholds clamped to `[0, N + 1]` it is
//! bounded above by `2N + 3N^2` and sits at or above `-2N` on every natural
//! profile, which pins the length of any asynchronous update process at
//! `4N + 3N^2` updates before a pure Nash equilibrium is reached. Runs
//! enforce the per-update rise and the length bound as hard invariants.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::game::Profile;
use crate::spatial::SpatialGame;

#[derive(Debug, Clone, PartialEq)]
pub enum DynamicsError {
    /// The potential failed to rise by at least 1 across an update.
    /// This cannot happen for a correct implementation.
    PotentialViolation {
        step: usize,
        player: usize,
        before: i64,
        after: i64,
    },
    /// More updates than the `4N + 3N^2` bound allows.
    UpdateBoundExceeded { bound: usize },
    /// The initial profile does not fit the game.
    InvalidProfile(String),
}

impl fmt::Display for DynamicsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynamicsError::PotentialViolation {
                step,
                player,
                before,
                after,
            } => write!(
                f,
                "internal invariant violation: potential did not increase at step {step} \
                 (player {player}, 2*Phi {before} -> {after})"
            ),
            DynamicsError::UpdateBoundExceeded { bound } => write!(
                f,
                "internal invariant violation: exceeded the {bound}-update convergence bound"
            ),
            DynamicsError::InvalidProfile(msg) => write!(f, "invalid profile: {msg}"),
        }
    }
}

impl std::error::Error for DynamicsError {}

/// Which player moves next among those that can improve.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheduler {
    /// Cycle through players in index order, skipping players with no
    /// improving move.
    RoundRobin,
    /// Pick uniformly at random among the players with an improving move.
    UniformRandom { seed: u64 },
}

/// Which strategy an updating player adopts.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChoiceRule {
    /// Uniformly random member of the improving set.
    UniformRandom { seed: u64 },
    /// Smallest strategy index in the improving set (reproducible goldens).
    LowestIndex,
}

/// Whether updates draw from the best-response set or from all better
/// responses. Best responses are themselves better responses, so the
/// convergence bound covers both; the arbitrary variant exists for
/// adversarial testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateRule {
    BestResponse,
    AnyBetterResponse,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOptions {
    pub scheduler: Scheduler,
    pub choice: ChoiceRule,
    pub update_rule: UpdateRule,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            scheduler: Scheduler::UniformRandom { seed: 0 },
            choice: ChoiceRule::UniformRandom { seed: 0 },
            update_rule: UpdateRule::BestResponse,
        }
    }
}

/// One applied better-response update.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpdateEvent {
    /// 1-based event index.
    pub step: usize,
    pub player: usize,
    pub from: usize,
    pub to: usize,
    pub utility_before: i32,
    pub utility_after: i32,
    /// Doubled potential evaluated after applying this event.
    pub potential2_after: i64,
}

/// Record of a full better-response run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trace {
    pub initial_profile: Profile,
    pub events: Vec<UpdateEvent>,
    pub final_profile: Profile,
    pub converged: bool,
}

impl Trace {
    /// CSV emitter: `step,player,from,to,potential2` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,player,from,to,potential2\n");
        for e in &self.events {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                e.step, e.player, e.from, e.to, e.potential2_after
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("trace serialization cannot fail")
    }
}

/// Maximum number of asynchronous better-response updates needed to reach
/// a pure Nash equilibrium: `4N + 3N^2`.
pub fn update_bound(n_players: usize) -> usize {
    4 * n_players + 3 * n_players * n_players
}

/// Utility `player` would get by unilaterally switching to `strategy`
/// (which may be its current one).
fn utility_if(sg: &SpatialGame, profile: &Profile, player: usize, strategy: usize) -> i32 {
    if strategy == 0 {
        return 0;
    }
    let others = sg
        .graph()
        .neighbors(player)
        .iter()
        .filter(|&&m| profile.get(m) == strategy)
        .count();
    if others < sg.game().threshold(player, strategy) {
        1
    } else {
        -1
    }
}

/// All strategies that strictly improve `player`'s utility.
pub fn better_responses(sg: &SpatialGame, profile: &Profile, player: usize) -> Vec<usize> {
    let current = sg.utility(profile, player);
    (0..=sg.n_channels())
        .filter(|&c| c != profile.get(player) && utility_if(sg, profile, player, c) > current)
        .collect()
}

/// The best-response set: strategies that maximize `player`'s utility *and*
/// strictly improve on the current one. Empty when no improvement exists.
pub fn best_response_set(sg: &SpatialGame, profile: &Profile, player: usize) -> Vec<usize> {
    let current = sg.utility(profile, player);
    let mut best = current;
    let mut set = Vec::new();
    for c in 0..=sg.n_channels() {
        if c == profile.get(player) {
            continue;
        }
        let u = utility_if(sg, profile, player, c);
        if u > best {
            best = u;
            set.clear();
        }
        if u == best && u > current {
            set.push(c);
        }
    }
    set
}

/// A profile is a pure Nash equilibrium when no player has a better
/// response.
pub fn is_pure_nash(sg: &SpatialGame, profile: &Profile) -> bool {
    (0..sg.n_players()).all(|n| {
        let current = sg.utility(profile, n);
        if current == 1 {
            return true;
        }
        (0..=sg.n_channels())
            .all(|c| c == profile.get(n) || utility_if(sg, profile, n, c) <= current)
    })
}

/// Doubled potential `2*Phi`. Integral by construction, strictly increasing
/// along better-response updates.
pub fn potential2(sg: &SpatialGame, profile: &Profile) -> i64 {
    let mut threshold_sum: i64 = 0;
    let mut active: i64 = 0;
    for n in 0..sg.n_players() {
        let x = profile.get(n);
        if x != 0 {
            threshold_sum += sg.game().threshold(n, x) as i64;
            active += 1;
        }
    }
    let mono_edges = sg
        .graph()
        .edges()
        .iter()
        .filter(|&&(a, b)| {
            let xa = profile.get(a);
            xa != 0 && xa == profile.get(b)
        })
        .count() as i64;
    2 * threshold_sum - 2 * mono_edges - active
}

/// Run asynchronous better-response updates until a pure Nash equilibrium
/// is reached. Deterministic given the seeds in `options`.
///
/// After every event the run checks that the doubled potential rose by at
/// least 1 and that the event count stays within `4N + 3N^2`; violating
/// either signals an implementation bug and aborts the run.
pub fn run_better_response(
    sg: &SpatialGame,
    initial: &Profile,
    options: &RunOptions,
) -> Result<Trace, DynamicsError> {
    sg.validate_profile(initial)
        .map_err(|e| DynamicsError::InvalidProfile(e.to_string()))?;

    let n_players = sg.n_players();
    let bound = update_bound(n_players);
    let mut scheduler_rng = match options.scheduler {
        Scheduler::UniformRandom { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        Scheduler::RoundRobin => None,
    };
    let mut choice_rng = match options.choice {
        ChoiceRule::UniformRandom { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        ChoiceRule::LowestIndex => None,
    };

    let mut profile = initial.clone();
    let mut events = Vec::new();
    let mut potential = potential2(sg, &profile);
    // Round-robin resumes scanning after the last mover.
    let mut rr_next = 0usize;

    loop {
        let improvers: Vec<usize> = (0..n_players)
            .filter(|&n| !better_responses(sg, &profile, n).is_empty())
            .collect();
        if improvers.is_empty() {
            break;
        }
        let player = match &mut scheduler_rng {
            Some(rng) => improvers[rng.random_range(0..improvers.len())],
            None => {
                // First improver at or after the round-robin cursor.
                let pos = (0..n_players)
                    .map(|k| (rr_next + k) % n_players)
                    .find(|p| improvers.binary_search(p).is_ok())
                    .expect("improvers is non-empty");
                rr_next = (pos + 1) % n_players;
                pos
            }
        };
        let candidates = match options.update_rule {
            UpdateRule::BestResponse => best_response_set(sg, &profile, player),
            UpdateRule::AnyBetterResponse => better_responses(sg, &profile, player),
        };
        debug_assert!(!candidates.is_empty());
        let target = match &mut choice_rng {
            Some(rng) => candidates[rng.random_range(0..candidates.len())],
            None => candidates[0],
        };

        let from = profile.get(player);
        let utility_before = sg.utility(&profile, player);
        profile.set(player, target);
        let utility_after = sg.utility(&profile, player);
        debug_assert!(utility_after > utility_before);
        let potential_after = potential2(sg, &profile);
        let step = events.len() + 1;

        if potential_after < potential + 1 {
            return Err(DynamicsError::PotentialViolation {
                step,
                player,
                before: potential,
                after: potential_after,
            });
        }
        if step > bound {
            return Err(DynamicsError::UpdateBoundExceeded { bound });
        }
        events.push(UpdateEvent {
            step,
            player,
            from,
            to: target,
            utility_before,
            utility_after,
            potential2_after: potential_after,
        });
        potential = potential_after;
    }

    debug_assert!(is_pure_nash(sg, &profile));
    Ok(Trace {
        initial_profile: initial.clone(),
        events,
        final_profile: profile,
        converged: true,
    })
}
