//! Core game objects: rate models, the interference-threshold
//! transformation, strategy profiles, utilities, and welfare.
//!
//! A game is canonically stored in interference-threshold form: an `N x C`
//! integer matrix `T` where `T[n][c]` is the largest congestion level at
//! which user `n`'s demand is still met on channel `c`. The sentinels are
//! `0` (never satisfiable) and `N + 1` (always satisfied). Thresholds are
//! clamped into `[0, N + 1]` at construction; values outside that range
//! behave identically to the nearest sentinel.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Errors raised by game construction and the physical rate model.
#[derive(Debug, Clone, PartialEq)]
pub enum GameError {
    /// An argument left the mathematical domain of the operation.
    Domain(String),
    /// Matrix/vector dimensions do not agree.
    DimensionMismatch(String),
    /// A profile is not valid for the game it was paired with.
    InvalidProfile(String),
}

impl fmt::Display for GameError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GameError::Domain(msg) => write!(f, "domain error: {msg}"),
            GameError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
            GameError::InvalidProfile(msg) => write!(f, "invalid profile: {msg}"),
        }
    }
}

impl std::error::Error for GameError {}

/// Shannon capacity `W * log2(1 + zeta * z / omega)`.
///
/// `bandwidth_hz` and `noise_power_w` must be positive; transmit power and
/// channel gain must be non-negative. The result carries the units of
/// `bandwidth_hz` (bits per second when the bandwidth is in Hz).
pub fn shannon_capacity(
    bandwidth_hz: f64,
    transmit_power_w: f64,
    channel_gain: f64,
    noise_power_w: f64,
) -> Result<f64, GameError> {
    if !bandwidth_hz.is_finite() || bandwidth_hz <= 0.0 {
        return Err(GameError::Domain(format!(
            "bandwidth must be positive, got {bandwidth_hz}"
        )));
    }
    if !noise_power_w.is_finite() || noise_power_w <= 0.0 {
        return Err(GameError::Domain(format!(
            "noise power must be positive, got {noise_power_w}"
        )));
    }
    if transmit_power_w.is_nan()
        || channel_gain.is_nan()
        || transmit_power_w < 0.0
        || channel_gain < 0.0
    {
        return Err(GameError::Domain(
            "transmit power and channel gain must be non-negative".into(),
        ));
    }
    let snr = transmit_power_w * channel_gain / noise_power_w;
    Ok(bandwidth_hz * (1.0 + snr).log2())
}

/// Channel contention function `g(I)`: the share of the channel a user
/// gets at congestion level `I >= 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Contention {
    /// Round-robin medium access: `g(I) = 1 / I`.
    Tdma,
    /// No contention: `g(I) = 1` regardless of congestion.
    Constant,
    /// Tabulated non-increasing share, `g(I) = table[I - 1]`.
    Table(Vec<f64>),
}

impl Contention {
    /// Evaluate `g(I)`. Panics when `I = 0` or beyond the table length;
    /// rate computations guard the congestion range beforehand.
    fn factor(&self, congestion: usize) -> f64 {
        debug_assert!(congestion >= 1);
        match self {
            Contention::Tdma => 1.0 / congestion as f64,
            Contention::Constant => 1.0,
            Contention::Table(g) => g[congestion - 1],
        }
    }
}

/// Physical rate model: per-(user, channel) availability and mean
/// throughput, plus the contention function shared by all pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSpec {
    n_players: usize,
    n_channels: usize,
    /// Row-major `N x C` availability flags (`theta`).
    availability: Vec<bool>,
    /// Row-major `N x C` mean throughput in Mbps (`B`), positive wherever
    /// the channel is available.
    throughput: Vec<f64>,
    contention: Contention,
}

impl RateSpec {
    pub fn new(
        n_players: usize,
        n_channels: usize,
        availability: Vec<bool>,
        throughput: Vec<f64>,
        contention: Contention,
    ) -> Result<Self, GameError> {
        if n_players == 0 || n_channels == 0 {
            return Err(GameError::Domain(
                "rate spec needs at least one player and one channel".into(),
            ));
        }
        let cells = n_players * n_channels;
        if availability.len() != cells || throughput.len() != cells {
            return Err(GameError::DimensionMismatch(format!(
                "expected {cells} cells, got {} availability / {} throughput entries",
                availability.len(),
                throughput.len()
            )));
        }
        for i in 0..cells {
            if availability[i] && (!throughput[i].is_finite() || throughput[i] <= 0.0) {
                return Err(GameError::Domain(format!(
                    "available cell {i} must have positive finite throughput, got {}",
                    throughput[i]
                )));
            }
        }
        if let Contention::Table(g) = &contention {
            if g.len() < n_players {
                return Err(GameError::DimensionMismatch(format!(
                    "contention table has {} entries but congestion can reach {n_players}",
                    g.len()
                )));
            }
            for w in g.windows(2) {
                if w[0].is_nan() || w[1].is_nan() || w[0] < w[1] {
                    return Err(GameError::Domain(
                        "contention table must be non-increasing".into(),
                    ));
                }
            }
            if g.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(GameError::Domain(
                    "contention table entries must be finite and non-negative".into(),
                ));
            }
        }
        Ok(RateSpec {
            n_players,
            n_channels,
            availability,
            throughput,
            contention,
        })
    }

    /// All channels available, every user sees the same per-channel mean
    /// throughput. This is the usual simulation setup.
    pub fn uniform_channels(
        n_players: usize,
        channel_rates_mbps: &[f64],
        contention: Contention,
    ) -> Result<Self, GameError> {
        let n_channels = channel_rates_mbps.len();
        let throughput: Vec<f64> = (0..n_players)
            .flat_map(|_| channel_rates_mbps.iter().copied())
            .collect();
        RateSpec::new(
            n_players,
            n_channels,
            vec![true; n_players * n_channels],
            throughput,
            contention,
        )
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn contention(&self) -> &Contention {
        &self.contention
    }

    fn cell(&self, player: usize, channel: usize) -> usize {
        assert!(player < self.n_players, "player index out of range");
        assert!(
            (1..=self.n_channels).contains(&channel),
            "channel must be in 1..=C"
        );
        player * self.n_channels + channel - 1
    }

    pub fn available(&self, player: usize, channel: usize) -> bool {
        self.availability[self.cell(player, channel)]
    }

    pub fn mean_throughput(&self, player: usize, channel: usize) -> f64 {
        self.throughput[self.cell(player, channel)]
    }

    /// Data rate `theta * B * g(I)` in Mbps for user `player` on `channel`
    /// at congestion level `congestion`.
    ///
    /// The rate is only defined for an occupied channel, so `congestion = 0`
    /// is a domain error, as is a congestion level above the player count.
    pub fn rate(&self, player: usize, channel: usize, congestion: usize) -> Result<f64, GameError> {
        let cell = self.cell(player, channel);
        if congestion == 0 {
            return Err(GameError::Domain(
                "rate is undefined at congestion level 0".into(),
            ));
        }
        if congestion > self.n_players {
            return Err(GameError::Domain(format!(
                "congestion {congestion} exceeds player count {}",
                self.n_players
            )));
        }
        if !self.availability[cell] {
            return Ok(0.0);
        }
        Ok(self.throughput[cell] * self.contention.factor(congestion))
    }

    /// The critical congestion threshold for `(player, channel)` against a
    /// demand, over congestion levels `1..=n_players`:
    ///
    /// - `0` when the rate is below the demand at every level;
    /// - `n_players + 1` when the rate strictly exceeds the demand at every
    ///   level (the demand is met no matter how crowded the channel gets);
    /// - otherwise the largest level whose rate still meets the demand.
    ///
    /// The returned `T` satisfies `rate(I) >= demand  <=>  I <= T` for all
    /// `I` in `1..=n_players`. For round-robin contention the threshold is
    /// computed in closed form as `floor(B / D)`, which keeps exact ties
    /// (`B = k * D`) on the satisfied side without iterating over float
    /// divisions.
    pub fn derive_threshold(
        &self,
        player: usize,
        channel: usize,
        demand_mbps: f64,
        n_players: usize,
    ) -> Result<usize, GameError> {
        let cell = self.cell(player, channel);
        if !demand_mbps.is_finite() || demand_mbps < 0.0 {
            return Err(GameError::Domain(format!(
                "demand must be finite and non-negative, got {demand_mbps}"
            )));
        }
        if n_players == 0 {
            return Err(GameError::Domain("player count must be positive".into()));
        }
        if let Contention::Table(g) = &self.contention {
            if g.len() < n_players {
                return Err(GameError::DimensionMismatch(format!(
                    "contention table has {} entries, need {n_players}",
                    g.len()
                )));
            }
        }
        if !self.availability[cell] {
            // Unavailable channel: the rate is identically zero, which meets
            // a zero demand at every level but never strictly exceeds it.
            return Ok(if demand_mbps == 0.0 { n_players } else { 0 });
        }
        let b = self.throughput[cell];
        let t = match &self.contention {
            Contention::Tdma => {
                if demand_mbps == 0.0 || b > n_players as f64 * demand_mbps {
                    n_players + 1
                } else if b < demand_mbps {
                    0
                } else {
                    (b / demand_mbps).floor() as usize
                }
            }
            Contention::Constant => {
                // Rate does not depend on congestion.
                if b > demand_mbps {
                    n_players + 1
                } else if b < demand_mbps {
                    0
                } else {
                    n_players
                }
            }
            Contention::Table(g) => {
                let mut all_above = true;
                let mut max_ok = 0usize;
                for level in 1..=n_players {
                    let rate = b * g[level - 1];
                    if rate >= demand_mbps {
                        max_ok = level;
                    }
                    if rate <= demand_mbps {
                        all_above = false;
                    }
                }
                if all_above {
                    n_players + 1
                } else {
                    max_ok
                }
            }
        };
        Ok(t.min(n_players + 1))
    }
}

/// Per-user data rate demands in Mbps.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandSpec {
    demands: Vec<f64>,
}

impl DemandSpec {
    pub fn new(demands_mbps: Vec<f64>) -> Result<Self, GameError> {
        if demands_mbps.is_empty() {
            return Err(GameError::Domain("need at least one demand".into()));
        }
        if demands_mbps.iter().any(|d| !d.is_finite() || *d < 0.0) {
            return Err(GameError::Domain(
                "demands must be finite and non-negative".into(),
            ));
        }
        Ok(DemandSpec {
            demands: demands_mbps,
        })
    }

    pub fn len(&self) -> usize {
        self.demands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.demands.is_empty()
    }

    pub fn demand(&self, player: usize) -> f64 {
        self.demands[player]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.demands
    }
}

/// A strategy profile: one strategy in `{0, 1, ..., C}` per player,
/// where `0` is the dormant state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Profile(Vec<usize>);

impl Profile {
    pub fn new(choices: Vec<usize>) -> Self {
        Profile(choices)
    }

    pub fn all_dormant(n_players: usize) -> Self {
        Profile(vec![0; n_players])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, player: usize) -> usize {
        self.0[player]
    }

    pub fn set(&mut self, player: usize, strategy: usize) {
        self.0[player] = strategy;
    }

    pub fn choices(&self) -> &[usize] {
        &self.0
    }

    /// Number of players currently on `channel` (which must be `>= 1`;
    /// congestion is not defined for the dormant state).
    pub fn congestion(&self, channel: usize) -> usize {
        assert!(channel >= 1, "congestion is defined for channels 1..=C");
        self.0.iter().filter(|&&x| x == channel).count()
    }

    /// Congestion of every channel in one pass; index `c` holds channel
    /// `c`'s count and index `0` the number of dormant players.
    pub fn congestion_vector(&self, n_channels: usize) -> Vec<usize> {
        let mut counts = vec![0usize; n_channels + 1];
        for &x in &self.0 {
            counts[x] += 1;
        }
        counts
    }

    pub fn active_count(&self) -> usize {
        self.0.iter().filter(|&&x| x != 0).count()
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// A QoS satisfaction game in interference-threshold form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Game {
    n_players: usize,
    n_channels: usize,
    /// Row-major `N x C`, every entry in `[0, N + 1]`.
    thresholds: Vec<usize>,
}

impl Game {
    /// Build a game from a threshold matrix (rows = players). Entries are
    /// clamped into the canonical range `[0, N + 1]`; out-of-range values
    /// induce the same behavior as the nearest sentinel.
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self, GameError> {
        let n_players = rows.len();
        if n_players == 0 {
            return Err(GameError::Domain("need at least one player".into()));
        }
        let n_channels = rows[0].len();
        if n_channels == 0 {
            return Err(GameError::Domain("need at least one channel".into()));
        }
        let mut thresholds = Vec::with_capacity(n_players * n_channels);
        for (n, row) in rows.iter().enumerate() {
            if row.len() != n_channels {
                return Err(GameError::DimensionMismatch(format!(
                    "row {n} has {} entries, expected {n_channels}",
                    row.len()
                )));
            }
            for &t in row {
                thresholds.push(t.clamp(0, n_players as i64 + 1) as usize);
            }
        }
        Ok(Game {
            n_players,
            n_channels,
            thresholds,
        })
    }

    /// Convenience constructor for a game with homogeneous channels:
    /// player `n` has threshold `per_player[n]` on every channel.
    pub fn homogeneous_channels(per_player: &[i64], n_channels: usize) -> Result<Self, GameError> {
        Game::new(
            per_player
                .iter()
                .map(|&t| vec![t; n_channels])
                .collect::<Vec<_>>(),
        )
    }

    /// The interference-threshold transformation: derive every threshold
    /// from the physical rate model and the per-user demands.
    pub fn from_rates(spec: &RateSpec, demands: &DemandSpec) -> Result<Self, GameError> {
        if demands.len() != spec.n_players() {
            return Err(GameError::DimensionMismatch(format!(
                "{} demands for {} players",
                demands.len(),
                spec.n_players()
            )));
        }
        let n = spec.n_players();
        let c = spec.n_channels();
        let mut rows = Vec::with_capacity(n);
        for player in 0..n {
            let mut row = Vec::with_capacity(c);
            for channel in 1..=c {
                row.push(spec.derive_threshold(player, channel, demands.demand(player), n)? as i64);
            }
            rows.push(row);
        }
        Game::new(rows)
    }

    pub fn n_players(&self) -> usize {
        self.n_players
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    /// Threshold of `player` on `channel` (`channel` in `1..=C`).
    pub fn threshold(&self, player: usize, channel: usize) -> usize {
        assert!(player < self.n_players, "player index out of range");
        assert!(
            (1..=self.n_channels).contains(&channel),
            "channel must be in 1..=C"
        );
        self.thresholds[player * self.n_channels + channel - 1]
    }

    pub fn threshold_rows(&self) -> Vec<Vec<usize>> {
        self.thresholds
            .chunks(self.n_channels)
            .map(|row| row.to_vec())
            .collect()
    }

    pub fn validate_profile(&self, profile: &Profile) -> Result<(), GameError> {
        if profile.len() != self.n_players {
            return Err(GameError::InvalidProfile(format!(
                "profile has {} entries for {} players",
                profile.len(),
                self.n_players
            )));
        }
        if let Some(&bad) = profile.choices().iter().find(|&&x| x > self.n_channels) {
            return Err(GameError::InvalidProfile(format!(
                "strategy {bad} exceeds channel count {}",
                self.n_channels
            )));
        }
        Ok(())
    }

    /// Utility of `player` under full interference (every pair of players
    /// contends): `+1` satisfied, `0` dormant, `-1` suffering.
    pub fn utility(&self, profile: &Profile, player: usize) -> i32 {
        let x = profile.get(player);
        if x == 0 {
            0
        } else if profile.congestion(x) <= self.threshold(player, x) {
            1
        } else {
            -1
        }
    }

    fn utility_from_congestion(&self, congestion: &[usize], player: usize, x: usize) -> i32 {
        if x == 0 {
            0
        } else if congestion[x] <= self.threshold(player, x) {
            1
        } else {
            -1
        }
    }

    /// Sum of all players' utilities.
    pub fn welfare(&self, profile: &Profile) -> i64 {
        let congestion = profile.congestion_vector(self.n_channels);
        (0..self.n_players)
            .map(|n| self.utility_from_congestion(&congestion, n, profile.get(n)) as i64)
            .sum()
    }

    /// Number of satisfied players.
    pub fn satisfied_count(&self, profile: &Profile) -> usize {
        let congestion = profile.congestion_vector(self.n_channels);
        (0..self.n_players)
            .filter(|&n| self.utility_from_congestion(&congestion, n, profile.get(n)) == 1)
            .count()
    }

    /// A profile is natural when it holds no suffering players.
    pub fn is_natural(&self, profile: &Profile) -> bool {
        let congestion = profile.congestion_vector(self.n_channels);
        (0..self.n_players)
            .all(|n| self.utility_from_congestion(&congestion, n, profile.get(n)) >= 0)
    }

    /// Every player has the same threshold on all channels.
    pub fn is_homogeneous_channels(&self) -> bool {
        self.thresholds
            .chunks(self.n_channels)
            .all(|row| row.iter().all(|&t| t == row[0]))
    }

    /// Every channel has the same threshold for all players.
    pub fn is_homogeneous_users(&self) -> bool {
        (0..self.n_channels).all(|c| {
            (0..self.n_players)
                .all(|n| self.thresholds[n * self.n_channels + c] == self.thresholds[c])
        })
    }

    /// `(min, max)` over all threshold entries.
    pub fn threshold_range(&self) -> (usize, usize) {
        let min = *self.thresholds.iter().min().expect("non-empty");
        let max = *self.thresholds.iter().max().expect("non-empty");
        (min, max)
    }
}
