//! Time-slotted simulation of the distributed channel-update protocol on
//! random geometric topologies.
//!
//! Users start dormant. In each slot every user computes its best-response
//! set from what it has overheard; users with a non-empty set contend for
//! the update opportunity, one winner (uniform among contenders, standing
//! in for the minimum of i.i.d. uniform backoff timers) applies a uniformly
//! chosen best response and broadcasts it. The run ends at the first slot
//! with no contenders, which is counted in the reported convergence time.

use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::{best_response_set, update_bound};
use crate::game::{Contention, DemandSpec, Game, GameError, Profile, RateSpec};
use crate::spatial::{InterferenceGraph, SpatialError, SpatialGame};

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    Validation(String),
    /// Ran past the theoretical update bound; signals a bug.
    UpdateBoundExceeded {
        bound: usize,
    },
    /// The slot cap elapsed before convergence; signals a bug (or an
    /// unreasonably small cap), since convergence is guaranteed within
    /// `4N + 3N^2` updates.
    MaxSlotsExceeded {
        max_slots: usize,
    },
    Game(GameError),
    Spatial(SpatialError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::Validation(msg) => write!(f, "invalid scenario: {msg}"),
            SimError::UpdateBoundExceeded { bound } => write!(
                f,
                "internal invariant violation: exceeded the {bound}-update convergence bound"
            ),
            SimError::MaxSlotsExceeded { max_slots } => write!(
                f,
                "internal invariant violation: no convergence within {max_slots} slots"
            ),
            SimError::Game(e) => write!(f, "{e}"),
            SimError::Spatial(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SimError {}

impl From<GameError> for SimError {
    fn from(e: GameError) -> Self {
        SimError::Game(e)
    }
}

impl From<SpatialError> for SimError {
    fn from(e: SpatialError) -> Self {
        SimError::Spatial(e)
    }
}

fn default_n_users() -> usize {
    50
}
fn default_region() -> f64 {
    100.0
}
fn default_range() -> f64 {
    50.0
}
fn default_rates() -> Vec<f64> {
    vec![6.0, 9.0, 12.0, 18.0]
}
fn default_fraction() -> f64 {
    0.5
}
fn default_low_demand() -> f64 {
    0.125
}
fn default_high_demand() -> f64 {
    3.5
}
fn default_mac() -> Contention {
    Contention::Tdma
}
fn default_max_slots() -> usize {
    10_000
}

/// Scenario parameters: topology, channel rates, the two-point demand mix,
/// the MAC, and the seeds. The defaults reproduce the standard setup:
/// users scattered over a 100 m x 100 m region with a 50 m interference
/// range sharing four 802.11g-rate channels, half of them demanding
/// 3.5 Mbps video and the rest 0.125 Mbps audio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(default = "default_n_users")]
    pub n_users: usize,
    #[serde(default = "default_region")]
    pub width_m: f64,
    #[serde(default = "default_region")]
    pub height_m: f64,
    #[serde(default = "default_range")]
    pub range_m: f64,
    #[serde(default = "default_rates")]
    pub channel_rates_mbps: Vec<f64>,
    /// Fraction of users with the high demand; the exact count is the
    /// fraction times the user count, rounded half-up.
    #[serde(default = "default_fraction")]
    pub high_demand_fraction: f64,
    #[serde(default = "default_low_demand")]
    pub low_demand_mbps: f64,
    #[serde(default = "default_high_demand")]
    pub high_demand_mbps: f64,
    #[serde(default = "default_mac")]
    pub mac: Contention,
    /// Per-user, per-channel availability mask; `None` means everything is
    /// available. Fixed for the whole run.
    #[serde(default)]
    pub availability: Option<Vec<Vec<bool>>>,
    /// Optional backoff collision model: contenders draw uniform timers on
    /// [0, 1), and when the two smallest land within this guard interval
    /// the slot is wasted (collision, no update). `None` (the default)
    /// resolves every contention cleanly with a uniform winner, which is
    /// the distribution of the minimum of i.i.d. uniform timers.
    #[serde(default)]
    pub collision_guard: Option<f64>,
    #[serde(default = "default_max_slots")]
    pub max_slots: usize,
    #[serde(default)]
    pub topology_seed: u64,
    #[serde(default)]
    pub dynamics_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n_users: default_n_users(),
            width_m: default_region(),
            height_m: default_region(),
            range_m: default_range(),
            channel_rates_mbps: default_rates(),
            high_demand_fraction: default_fraction(),
            low_demand_mbps: default_low_demand(),
            high_demand_mbps: default_high_demand(),
            mac: default_mac(),
            availability: None,
            collision_guard: None,
            max_slots: default_max_slots(),
            topology_seed: 0,
            dynamics_seed: 0,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if self.n_users == 0 {
            return Err(SimError::Validation("n_users must be at least 1".into()));
        }
        if self.channel_rates_mbps.is_empty() {
            return Err(SimError::Validation("need at least one channel".into()));
        }
        if self
            .channel_rates_mbps
            .iter()
            .any(|r| !r.is_finite() || *r <= 0.0)
        {
            return Err(SimError::Validation(
                "channel_rates_mbps entries must be positive and finite".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.high_demand_fraction) {
            return Err(SimError::Validation(format!(
                "high_demand_fraction must be in [0, 1], got {}",
                self.high_demand_fraction
            )));
        }
        for (name, d) in [
            ("low_demand_mbps", self.low_demand_mbps),
            ("high_demand_mbps", self.high_demand_mbps),
        ] {
            if !d.is_finite() || d < 0.0 {
                return Err(SimError::Validation(format!(
                    "{name} must be finite and non-negative, got {d}"
                )));
            }
        }
        if !self.width_m.is_finite()
            || !self.height_m.is_finite()
            || !self.range_m.is_finite()
            || self.width_m <= 0.0
            || self.height_m <= 0.0
            || self.range_m < 0.0
        {
            return Err(SimError::Validation(
                "region dimensions must be positive and range_m non-negative".into(),
            ));
        }
        if self.max_slots == 0 {
            return Err(SimError::Validation("max_slots must be at least 1".into()));
        }
        if let Some(guard) = self.collision_guard {
            if !(0.0..1.0).contains(&guard) {
                return Err(SimError::Validation(format!(
                    "collision_guard must be in [0, 1), got {guard}"
                )));
            }
        }
        if let Some(mask) = &self.availability {
            if mask.len() != self.n_users
                || mask
                    .iter()
                    .any(|row| row.len() != self.channel_rates_mbps.len())
            {
                return Err(SimError::Validation(format!(
                    "availability mask must be {} x {}",
                    self.n_users,
                    self.channel_rates_mbps.len()
                )));
            }
        }
        Ok(())
    }

    /// Number of high-demand users: `fraction * N` rounded half-up.
    pub fn high_demand_count(&self) -> usize {
        ((self.high_demand_fraction * self.n_users as f64).round() as usize).min(self.n_users)
    }

    pub fn with_seeds(mut self, topology_seed: u64, dynamics_seed: u64) -> Self {
        self.topology_seed = topology_seed;
        self.dynamics_seed = dynamics_seed;
        self
    }
}

/// Stable per-replication seed stream; index 0 keeps the base seed, so a
/// one-replication experiment is exactly the base run.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    if index == 0 {
        return base;
    }
    // splitmix64 step
    let mut z = base
        .wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
        .wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A fully built scenario: the spatial game, the per-user demands, and the
/// rate model used for throughput reporting.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub sgame: SpatialGame,
    pub demands: Vec<f64>,
    pub high_demand: Vec<bool>,
    pub rates: RateSpec,
}

/// Build the topology from the topology seed, assign the demand mix with
/// an exact count (seeded shuffle, second stream of the topology seed),
/// and derive the threshold matrix against the full user count.
pub fn build_scenario(config: &ScenarioConfig) -> Result<Scenario, SimError> {
    config.validate()?;
    let n = config.n_users;
    let graph = InterferenceGraph::random_geometric(
        n,
        config.width_m,
        config.height_m,
        config.range_m,
        config.topology_seed,
    )?;

    let n_high = config.high_demand_count();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.topology_seed, u64::MAX));
    // Fisher-Yates via rand's shuffle.
    use rand::seq::SliceRandom;
    order.shuffle(&mut rng);
    let mut high_demand = vec![false; n];
    for &u in order.iter().take(n_high) {
        high_demand[u] = true;
    }
    let demands: Vec<f64> = high_demand
        .iter()
        .map(|&h| {
            if h {
                config.high_demand_mbps
            } else {
                config.low_demand_mbps
            }
        })
        .collect();

    let c = config.channel_rates_mbps.len();
    let availability: Vec<bool> = match &config.availability {
        Some(mask) => mask.iter().flat_map(|row| row.iter().copied()).collect(),
        None => vec![true; n * c],
    };
    let throughput: Vec<f64> = (0..n)
        .flat_map(|_| config.channel_rates_mbps.iter().copied())
        .collect();
    let rates = RateSpec::new(n, c, availability, throughput, config.mac.clone())?;
    let game = Game::from_rates(&rates, &DemandSpec::new(demands.clone())?)?;
    let sgame = SpatialGame::new(game, graph)?;
    Ok(Scenario {
        config: config.clone(),
        sgame,
        demands,
        high_demand,
        rates,
    })
}

/// One slot of the protocol run, recorded after the slot's update (if any)
/// has been broadcast.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotRecord {
    /// 1-based slot index.
    pub slot: usize,
    /// The player that won the update contention, if any contended.
    pub updater: Option<usize>,
    /// The strategy the winner broadcast (its new channel, or 0 for
    /// dormancy).
    pub strategy: Option<usize>,
    /// Physical data rate per user: `theta * B * g(local congestion)`,
    /// zero while dormant.
    pub throughput_mbps: Vec<f64>,
    pub satisfied_count: usize,
    pub converged: bool,
}

/// A complete simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimRun {
    pub slots: Vec<SlotRecord>,
    pub final_profile: Profile,
    pub update_count: usize,
    pub converged: bool,
    pub satisfied_count: usize,
    pub welfare: i64,
}

/// The JSON summary shape emitted next to the per-slot CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimSummary {
    pub converged: bool,
    /// Convergence time in slots, including the final empty slot that
    /// detects convergence.
    pub slots: usize,
    pub update_count: usize,
    pub satisfied_count: usize,
    pub welfare: i64,
}

impl SimRun {
    pub fn n_slots(&self) -> usize {
        self.slots.len()
    }

    pub fn summary(&self) -> SimSummary {
        SimSummary {
            converged: self.converged,
            slots: self.n_slots(),
            update_count: self.update_count,
            satisfied_count: self.satisfied_count,
            welfare: self.welfare,
        }
    }

    /// Per-slot CSV: `slot,updater,satisfied_count` then one throughput
    /// column per user. The updater column is empty on the final
    /// convergence-detection slot.
    pub fn to_csv(&self) -> String {
        let n = self
            .slots
            .first()
            .map(|s| s.throughput_mbps.len())
            .unwrap_or(0);
        let mut out = String::from("slot,updater,satisfied_count");
        for u in 0..n {
            out.push_str(&format!(",throughput_{u}"));
        }
        out.push('\n');
        for s in &self.slots {
            out.push_str(&format!(
                "{},{},{}",
                s.slot,
                s.updater.map(|u| u.to_string()).unwrap_or_default(),
                s.satisfied_count
            ));
            for t in &s.throughput_mbps {
                out.push_str(&format!(",{t}"));
            }
            out.push('\n');
        }
        out
    }
}

fn throughputs(scenario: &Scenario, profile: &Profile) -> Result<Vec<f64>, SimError> {
    (0..scenario.sgame.n_players())
        .map(|n| {
            let x = profile.get(n);
            if x == 0 {
                Ok(0.0)
            } else {
                let local = scenario.sgame.local_congestion(profile, n, x);
                Ok(scenario.rates.rate(n, x, local)?)
            }
        })
        .collect()
}

/// Run the distributed protocol to convergence. Deterministic given the
/// dynamics seed; every slot applies at most one update, and the final
/// profile is a pure Nash equilibrium (all users satisfied or dormant).
pub fn simulate(scenario: &Scenario) -> Result<SimRun, SimError> {
    let sg = &scenario.sgame;
    let n = sg.n_players();
    let bound = update_bound(n);
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.config.dynamics_seed);
    let mut profile = Profile::all_dormant(n);
    let mut slots = Vec::new();
    let mut update_count = 0usize;

    for slot in 1..=scenario.config.max_slots {
        let response_sets: Vec<Vec<usize>> =
            (0..n).map(|p| best_response_set(sg, &profile, p)).collect();
        let contenders: Vec<usize> = (0..n).filter(|&p| !response_sets[p].is_empty()).collect();
        if contenders.is_empty() {
            slots.push(SlotRecord {
                slot,
                updater: None,
                strategy: None,
                throughput_mbps: throughputs(scenario, &profile)?,
                satisfied_count: sg.satisfied_count(&profile),
                converged: true,
            });
            let welfare = sg.welfare(&profile);
            let satisfied_count = sg.satisfied_count(&profile);
            return Ok(SimRun {
                slots,
                final_profile: profile,
                update_count,
                converged: true,
                satisfied_count,
                welfare,
            });
        }
        let winner = match scenario.config.collision_guard {
            None => contenders[rng.random_range(0..contenders.len())],
            Some(guard) => {
                let timers: Vec<f64> = contenders
                    .iter()
                    .map(|_| rng.random_range(0.0..1.0))
                    .collect();
                let mut order: Vec<usize> = (0..timers.len()).collect();
                order.sort_by(|&a, &b| timers[a].partial_cmp(&timers[b]).expect("finite"));
                if order.len() >= 2 && timers[order[1]] - timers[order[0]] <= guard {
                    // Collision: the runner-up's message overlaps the
                    // winner's, the slot is wasted and nobody updates.
                    slots.push(SlotRecord {
                        slot,
                        updater: None,
                        strategy: None,
                        throughput_mbps: throughputs(scenario, &profile)?,
                        satisfied_count: sg.satisfied_count(&profile),
                        converged: false,
                    });
                    continue;
                }
                contenders[order[0]]
            }
        };
        let set = &response_sets[winner];
        let target = set[rng.random_range(0..set.len())];
        profile.set(winner, target);
        update_count += 1;
        if update_count > bound {
            return Err(SimError::UpdateBoundExceeded { bound });
        }
        slots.push(SlotRecord {
            slot,
            updater: Some(winner),
            strategy: Some(target),
            throughput_mbps: throughputs(scenario, &profile)?,
            satisfied_count: sg.satisfied_count(&profile),
            converged: false,
        });
    }
    Err(SimError::MaxSlotsExceeded {
        max_slots: scenario.config.max_slots,
    })
}

/// Result of one replication.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RepResult {
    pub rep: usize,
    pub topology_seed: u64,
    pub dynamics_seed: u64,
    pub converged: bool,
    pub slots: usize,
    pub update_count: usize,
    pub satisfied_count: usize,
    pub welfare: i64,
}

/// Aggregate statistics over independent replications.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Replication {
    pub n_reps: usize,
    pub mean_satisfied: f64,
    pub min_satisfied: usize,
    pub max_satisfied: usize,
    pub mean_convergence_slots: f64,
    pub mean_update_count: f64,
    pub reps: Vec<RepResult>,
}

/// Run `n_reps` independent replications. Topology and demand assignment
/// are resampled per replication from the derived seed stream; replication
/// 0 uses the base seeds unchanged.
pub fn replicate(config: &ScenarioConfig, n_reps: usize) -> Result<Replication, SimError> {
    replicate_detailed(config, n_reps).map(|(summary, _)| summary)
}

/// As [`replicate`], additionally returning every full run (for per-slot
/// emission).
pub fn replicate_detailed(
    config: &ScenarioConfig,
    n_reps: usize,
) -> Result<(Replication, Vec<SimRun>), SimError> {
    if n_reps == 0 {
        return Err(SimError::Validation("n_reps must be at least 1".into()));
    }
    let mut reps = Vec::with_capacity(n_reps);
    let mut runs = Vec::with_capacity(n_reps);
    for rep in 0..n_reps {
        let rep_config = config.clone().with_seeds(
            derive_seed(config.topology_seed, rep as u64),
            derive_seed(config.dynamics_seed, rep as u64),
        );
        let scenario = build_scenario(&rep_config)?;
        let run = simulate(&scenario)?;
        reps.push(RepResult {
            rep,
            topology_seed: rep_config.topology_seed,
            dynamics_seed: rep_config.dynamics_seed,
            converged: run.converged,
            slots: run.n_slots(),
            update_count: run.update_count,
            satisfied_count: run.satisfied_count,
            welfare: run.welfare,
        });
        runs.push(run);
    }
    let nf = n_reps as f64;
    let summary = Replication {
        n_reps,
        mean_satisfied: reps.iter().map(|r| r.satisfied_count as f64).sum::<f64>() / nf,
        min_satisfied: reps.iter().map(|r| r.satisfied_count).min().unwrap(),
        max_satisfied: reps.iter().map(|r| r.satisfied_count).max().unwrap(),
        mean_convergence_slots: reps.iter().map(|r| r.slots as f64).sum::<f64>() / nf,
        mean_update_count: reps.iter().map(|r| r.update_count as f64).sum::<f64>() / nf,
        reps,
    };
    Ok((summary, runs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::is_pure_nash;

    fn tiny_config(n_users: usize, rates: &[f64], demand: f64) -> ScenarioConfig {
        ScenarioConfig {
            n_users,
            width_m: 10.0,
            height_m: 10.0,
            range_m: 1000.0, // complete graph
            channel_rates_mbps: rates.to_vec(),
            high_demand_fraction: 0.0,
            low_demand_mbps: demand,
            high_demand_mbps: demand,
            max_slots: 1000,
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn demand_mix_extremes() {
        let mut config = ScenarioConfig {
            n_users: 10,
            ..ScenarioConfig::default()
        };
        config.high_demand_fraction = 0.0;
        let scenario = build_scenario(&config).unwrap();
        let low_row = [11, 11, 11, 11]; // every rate beats 10 * 0.125 Mbps
        for rows in scenario.sgame.game().threshold_rows() {
            assert_eq!(rows, low_row);
        }

        config.high_demand_fraction = 1.0;
        let scenario = build_scenario(&config).unwrap();
        let high_row = [1, 2, 3, 5]; // floor(B / 3.5) per channel
        for rows in scenario.sgame.game().threshold_rows() {
            assert_eq!(rows, high_row);
        }
    }

    #[test]
    fn demand_mix_exact_count() {
        for (fraction, expected) in [(0.0, 0), (0.24, 2), (0.25, 3), (0.5, 5), (1.0, 10)] {
            let config = ScenarioConfig {
                n_users: 10,
                high_demand_fraction: fraction,
                ..ScenarioConfig::default()
            };
            assert_eq!(config.high_demand_count(), expected, "fraction {fraction}");
            let scenario = build_scenario(&config).unwrap();
            assert_eq!(
                scenario.high_demand.iter().filter(|&&h| h).count(),
                expected
            );
        }
    }

    #[test]
    fn default_scenario_threshold_rows_match_goldens() {
        let scenario = build_scenario(&ScenarioConfig::default()).unwrap();
        let game = scenario.sgame.game();
        for n in 0..50 {
            let row = (1..=4).map(|c| game.threshold(n, c)).collect::<Vec<_>>();
            if scenario.high_demand[n] {
                assert_eq!(row, vec![1, 2, 3, 5]);
            } else {
                // 6 Mbps no longer beats 50 * 0.125 Mbps at every level.
                assert_eq!(row, vec![48, 51, 51, 51]);
            }
        }
        assert_eq!(scenario.high_demand.iter().filter(|&&h| h).count(), 25);
    }

    #[test]
    fn single_user_converges_in_one_update() {
        let config = tiny_config(1, &[6.0], 3.5); // threshold 1
        let run = simulate(&build_scenario(&config).unwrap()).unwrap();
        assert_eq!(run.update_count, 1);
        assert_eq!(run.n_slots(), 2); // update slot + empty detection slot
        assert_eq!(run.final_profile, Profile::new(vec![1]));
        assert_eq!(run.satisfied_count, 1);
    }

    #[test]
    fn two_users_share_one_channel() {
        let config = tiny_config(2, &[6.0], 3.0); // threshold floor(6/3) = 2
        let run = simulate(&build_scenario(&config).unwrap()).unwrap();
        assert_eq!(run.update_count, 2);
        assert_eq!(run.final_profile, Profile::new(vec![1, 1]));
        assert_eq!(run.satisfied_count, 2);
        assert_eq!(run.welfare, 2);
    }

    #[test]
    fn run_invariants_hold() {
        for seed in 0..8u64 {
            let config = ScenarioConfig {
                n_users: 10,
                ..ScenarioConfig::default()
            }
            .with_seeds(seed, seed + 100);
            let scenario = build_scenario(&config).unwrap();
            let run = simulate(&scenario).unwrap();
            assert!(run.update_count <= update_bound(10));
            assert!(is_pure_nash(&scenario.sgame, &run.final_profile));
            assert!(scenario.sgame.is_natural(&run.final_profile));

            let mut profile = Profile::all_dormant(10);
            for slot in &run.slots {
                match (slot.updater, slot.strategy) {
                    (Some(p), Some(target)) => {
                        // Exactly one coordinate changes, strictly improving.
                        let before = scenario.sgame.utility(&profile, p);
                        assert_ne!(target, profile.get(p));
                        profile.set(p, target);
                        assert!(scenario.sgame.utility(&profile, p) > before);
                    }
                    (None, None) => assert!(slot.converged),
                    _ => panic!("updater and strategy must be recorded together"),
                }
                // Throughput is consistent with the recorded profile.
                assert_eq!(
                    slot.throughput_mbps,
                    throughputs(&scenario, &profile).unwrap()
                );
                assert_eq!(
                    slot.satisfied_count,
                    scenario.sgame.satisfied_count(&profile)
                );
                for (n, &t) in slot.throughput_mbps.iter().enumerate() {
                    assert_eq!(t == 0.0, profile.get(n) == 0, "user {n}");
                }
            }
            assert_eq!(profile, run.final_profile);
        }
    }

    #[test]
    fn replicate_single_rep_equals_single_run() {
        let config = ScenarioConfig {
            n_users: 8,
            ..ScenarioConfig::default()
        }
        .with_seeds(7, 11);
        let replication = replicate(&config, 1).unwrap();
        let run = simulate(&build_scenario(&config).unwrap()).unwrap();
        assert_eq!(replication.n_reps, 1);
        assert_eq!(replication.reps[0].satisfied_count, run.satisfied_count);
        assert_eq!(replication.reps[0].slots, run.n_slots());
        assert_eq!(replication.mean_satisfied, run.satisfied_count as f64);
    }

    #[test]
    fn satisfied_count_non_increasing_in_demand_fraction() {
        let mut means = Vec::new();
        for step in 0..=4 {
            let config = ScenarioConfig {
                n_users: 10,
                high_demand_fraction: step as f64 / 4.0,
                ..ScenarioConfig::default()
            }
            .with_seeds(3, 5);
            means.push(replicate(&config, 5).unwrap().mean_satisfied);
        }
        for w in means.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "means {means:?}");
        }
    }

    #[test]
    fn convergence_time_grows_with_users() {
        let mut means = Vec::new();
        for n in [5usize, 10, 15] {
            let config = ScenarioConfig {
                n_users: n,
                ..ScenarioConfig::default()
            }
            .with_seeds(17, 19);
            means.push(replicate(&config, 10).unwrap().mean_convergence_slots);
        }
        assert!(
            means[0] <= means[1] && means[1] <= means[2],
            "means {means:?}"
        );
    }

    #[test]
    fn csv_deterministic_and_well_shaped() {
        let config = ScenarioConfig {
            n_users: 6,
            ..ScenarioConfig::default()
        }
        .with_seeds(2, 4);
        let a = simulate(&build_scenario(&config).unwrap())
            .unwrap()
            .to_csv();
        let b = simulate(&build_scenario(&config).unwrap())
            .unwrap()
            .to_csv();
        assert_eq!(a, b);
        let header = a.lines().next().unwrap();
        assert_eq!(
            header,
            "slot,updater,satisfied_count,throughput_0,throughput_1,throughput_2,\
             throughput_3,throughput_4,throughput_5"
        );
        let last = a.lines().last().unwrap();
        assert!(last.starts_with(&format!("{},,", a.lines().count() - 1)));
    }

    #[test]
    fn full_scale_satisfaction_declines_with_demand_mix() {
        // At 50 users the spectrum is actually scarce, so raising the
        // high-demand share strictly lowers the mean satisfied count.
        let means: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|&fraction| {
                let config = ScenarioConfig {
                    high_demand_fraction: fraction,
                    ..ScenarioConfig::default()
                }
                .with_seeds(42, 7);
                replicate(&config, 10).unwrap().mean_satisfied
            })
            .collect();
        assert_eq!(means[0], 50.0, "everyone fits at the low demand");
        for w in means.windows(2) {
            assert!(w[1] < w[0], "means must strictly decrease, got {means:?}");
        }
    }

    #[test]
    fn max_slots_cap_is_a_hard_failure() {
        let config = ScenarioConfig {
            max_slots: 1,
            n_users: 3,
            ..ScenarioConfig::default()
        };
        assert!(matches!(
            simulate(&build_scenario(&config).unwrap()),
            Err(SimError::MaxSlotsExceeded { max_slots: 1 })
        ));
    }

    #[test]
    fn desk_scale_run_regression_pin() {
        // Frozen numbers for the ten-user default scenario under seeds
        // (42, 7); any change to the RNG consumption order shows up here.
        let config = ScenarioConfig {
            n_users: 10,
            ..ScenarioConfig::default()
        }
        .with_seeds(42, 7);
        let run = simulate(&build_scenario(&config).unwrap()).unwrap();
        assert_eq!(
            (
                run.n_slots(),
                run.update_count,
                run.satisfied_count,
                run.welfare
            ),
            DESK_SCALE_GOLDEN
        );
    }

    const DESK_SCALE_GOLDEN: (usize, usize, usize, i64) = (11, 10, 10, 10);

    #[test]
    fn collision_model_wastes_slots_but_still_converges() {
        let base = ScenarioConfig {
            n_users: 6,
            ..ScenarioConfig::default()
        }
        .with_seeds(3, 9);
        let clean = simulate(&build_scenario(&base).unwrap()).unwrap();

        let mut contested = base.clone();
        contested.collision_guard = Some(0.35);
        let noisy = simulate(&build_scenario(&contested).unwrap()).unwrap();
        assert!(noisy.converged);
        assert_eq!(noisy.satisfied_count, noisy.final_profile.active_count());
        // Wasted slots change nothing and never update anyone.
        let wasted: Vec<_> = noisy
            .slots
            .iter()
            .filter(|s| s.updater.is_none() && !s.converged)
            .collect();
        assert!(
            noisy.n_slots() >= clean.n_slots(),
            "collisions cannot speed a run up"
        );
        for (i, slot) in noisy.slots.iter().enumerate() {
            if slot.updater.is_none() && !slot.converged && i > 0 {
                assert_eq!(slot.throughput_mbps, noisy.slots[i - 1].throughput_mbps);
            }
        }
        // Update slots still respect the theoretical bound.
        assert!(noisy.update_count <= update_bound(6));
        let _ = wasted;
    }

    #[test]
    fn collision_guard_validation() {
        let config = ScenarioConfig {
            collision_guard: Some(1.5),
            ..ScenarioConfig::default()
        };
        assert!(matches!(config.validate(), Err(SimError::Validation(_))));
    }

    #[test]
    fn seed_stream_is_stable() {
        assert_eq!(derive_seed(42, 0), 42);
        assert_ne!(derive_seed(42, 1), derive_seed(42, 2));
        assert_eq!(derive_seed(42, 3), derive_seed(42, 3));
    }
}
