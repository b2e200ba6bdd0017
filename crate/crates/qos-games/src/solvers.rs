//! Centralized algorithms and exact oracles for full-interference games:
//! the greedy social-optimum construction for homogeneous channels,
//! round-robin assignment, exhaustive brute-force search (social optimum,
//! equilibrium enumeration), price-of-anarchy reports, and the
//! homogeneous-user equivalence check.
//!
//! Everything here treats the game under complete-graph semantics: all
//! players contend with each other.

use std::cmp::Reverse;
use std::fmt;

use serde::Serialize;

use crate::game::{Game, GameError, Profile};

#[derive(Debug, Clone, PartialEq)]
pub enum SolverError {
    /// `greedy_optimum` needs every player's threshold to agree across channels.
    NonHomogeneousChannels {
        player: usize,
    },
    /// `verify_homogeneous_users` needs every channel's threshold to agree across players.
    NonHomogeneousUsers {
        channel: usize,
    },
    /// The profile space is larger than the enumeration budget.
    BudgetExceeded {
        profiles: u128,
        budget: u128,
    },
    /// Worst equilibrium welfare is not positive, so the price of anarchy
    /// ratio is undefined. Cannot happen when every threshold is >= 1.
    PoaUndefined {
        worst_welfare: i64,
    },
    Game(GameError),
}

impl fmt::Display for SolverError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolverError::NonHomogeneousChannels { player } => write!(
                f,
                "homogeneous-channel precondition violated: player {player} has \
                 different thresholds on different channels"
            ),
            SolverError::NonHomogeneousUsers { channel } => write!(
                f,
                "homogeneous-user precondition violated: channel {channel} has \
                 different thresholds for different players"
            ),
            SolverError::BudgetExceeded { profiles, budget } => write!(
                f,
                "enumeration refused: profile space has {profiles} profiles, \
                 budget allows {budget}"
            ),
            SolverError::PoaUndefined { worst_welfare } => write!(
                f,
                "price of anarchy undefined (division-by-zero regime): worst \
                 equilibrium welfare is {worst_welfare}; requires every threshold >= 1"
            ),
            SolverError::Game(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SolverError {}

impl From<GameError> for SolverError {
    fn from(e: GameError) -> Self {
        SolverError::Game(e)
    }
}

/// Guard for the exhaustive oracles: enumeration either runs over the whole
/// `(C+1)^N` profile space or refuses outright.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Budget {
    pub max_profiles: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_profiles: 100_000_000,
        }
    }
}

impl Budget {
    pub fn new(max_profiles: u128) -> Self {
        Budget { max_profiles }
    }
}

fn profile_space(game: &Game) -> u128 {
    (game.n_channels() as u128 + 1)
        .checked_pow(game.n_players() as u32)
        .unwrap_or(u128::MAX)
}

fn check_budget(game: &Game, budget: &Budget) -> Result<(), SolverError> {
    let profiles = profile_space(game);
    if profiles > budget.max_profiles {
        Err(SolverError::BudgetExceeded {
            profiles,
            budget: budget.max_profiles,
        })
    } else {
        Ok(())
    }
}

/// Exact rational number with a positive denominator, kept reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let (num, den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(num.unsigned_abs(), den as u64).max(1) as i64;
        Ratio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as i128 * other.den as i128).cmp(&(other.num as i128 * self.den as i128))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Greedy construction of a profile that is simultaneously a social optimum
/// and a pure Nash equilibrium of a game with homogeneous channels.
///
/// Players are processed in order of descending threshold (stable on the
/// original index, so callers may pass unsorted games); each player joins
/// the lowest-indexed channel whose congestion is still below its
/// threshold, or stays dormant when no channel qualifies. The result is
/// reported in the original player order.
pub fn greedy_optimum(game: &Game) -> Result<Profile, SolverError> {
    let order = homogeneous_channel_order(game)?;
    let per_player: Vec<usize> = (0..game.n_players())
        .map(|n| game.threshold(n, 1))
        .collect();
    let sorted: Vec<usize> = order.iter().map(|&i| per_player[i]).collect();
    let steps = greedy_sorted_steps(&sorted, game.n_channels());
    let final_sorted = steps.last().expect("at least the initial step");
    let mut choices = vec![0usize; game.n_players()];
    for (rank, &original) in order.iter().enumerate() {
        choices[original] = final_sorted[rank];
    }
    Ok(Profile::new(choices))
}

fn homogeneous_channel_order(game: &Game) -> Result<Vec<usize>, SolverError> {
    for n in 0..game.n_players() {
        let t = game.threshold(n, 1);
        for c in 2..=game.n_channels() {
            if game.threshold(n, c) != t {
                return Err(SolverError::NonHomogeneousChannels { player: n });
            }
        }
    }
    let mut order: Vec<usize> = (0..game.n_players()).collect();
    order.sort_by_key(|&n| Reverse(game.threshold(n, 1)));
    Ok(order)
}

/// The greedy loop over players already sorted by descending threshold.
/// Returns the profile after every iteration (index 0 is the all-dormant
/// start), which the unit tests use to check the intermediate structure.
fn greedy_sorted_steps(sorted_thresholds: &[usize], n_channels: usize) -> Vec<Vec<usize>> {
    let n = sorted_thresholds.len();
    let mut x = vec![0usize; n];
    let mut congestion = vec![0usize; n_channels + 1];
    let mut steps = Vec::with_capacity(n + 1);
    steps.push(x.clone());
    for rank in 0..n {
        let t = sorted_thresholds[rank];
        if let Some(channel) = (1..=n_channels).find(|&c| congestion[c] < t) {
            x[rank] = channel;
            congestion[channel] += 1;
        }
        steps.push(x.clone());
    }
    steps
}

/// Spread players over channels as evenly as possible: player `n`
/// (1-based) takes channel `1 + (n mod C)`. When every threshold is at
/// least `ceil(N / C)` this satisfies every player.
pub fn round_robin_profile(n_players: usize, n_channels: usize) -> Profile {
    assert!(n_players >= 1 && n_channels >= 1);
    Profile::new((1..=n_players).map(|n| 1 + (n % n_channels)).collect())
}

/// Exhaustive sweep state: congestion per channel, per-channel counts of
/// active players by threshold, and the running welfare, all maintained
/// incrementally as single coordinates change.
struct Sweep<'g> {
    game: &'g Game,
    x: Vec<usize>,
    congestion: Vec<usize>,
    /// `by_threshold[c][t]`: active players on channel `c` with threshold `t`.
    by_threshold: Vec<Vec<i64>>,
    welfare: i64,
}

impl<'g> Sweep<'g> {
    fn new(game: &'g Game) -> Self {
        Sweep {
            game,
            x: vec![0; game.n_players()],
            congestion: vec![0; game.n_channels() + 1],
            by_threshold: vec![vec![0i64; game.n_players() + 2]; game.n_channels() + 1],
            welfare: 0,
        }
    }

    /// Move `player` to `target`, updating congestion and welfare in O(1).
    fn apply(&mut self, player: usize, target: usize) {
        let from = self.x[player];
        if from != 0 {
            let k = self.congestion[from];
            let t = self.game.threshold(player, from);
            self.welfare -= if t >= k { 1 } else { -1 };
            self.by_threshold[from][t] -= 1;
            self.congestion[from] = k - 1;
            // Remaining players on `from` with threshold exactly k-1 were
            // suffering and are now satisfied.
            self.welfare += 2 * self.by_threshold[from][k - 1];
        }
        if target != 0 {
            let k = self.congestion[target];
            // Players on `target` with threshold exactly k were satisfied
            // and now suffer.
            self.welfare -= 2 * self.by_threshold[target][k];
            self.congestion[target] = k + 1;
            let t = self.game.threshold(player, target);
            self.by_threshold[target][t] += 1;
            self.welfare += if t > k { 1 } else { -1 };
        }
        self.x[player] = target;
    }

    /// Advance to the lexicographic successor; false once exhausted.
    fn step(&mut self) -> bool {
        let c = self.game.n_channels();
        let n = self.x.len();
        let mut i = n;
        while i > 0 {
            i -= 1;
            if self.x[i] < c {
                self.apply(i, self.x[i] + 1);
                for j in (i + 1)..n {
                    if self.x[j] != 0 {
                        self.apply(j, 0);
                    }
                }
                return true;
            }
        }
        false
    }

    /// Equilibrium test from the maintained congestion vector: every active
    /// player satisfied, every dormant player blocked on every channel.
    fn is_pure_nash(&self) -> bool {
        for (player, &x) in self.x.iter().enumerate() {
            if x == 0 {
                for channel in 1..=self.game.n_channels() {
                    if self.congestion[channel] < self.game.threshold(player, channel) {
                        return false;
                    }
                }
            } else if self.congestion[x] > self.game.threshold(player, x) {
                return false;
            }
        }
        true
    }
}

/// The exact social optimum and its lexicographically smallest witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Optimum {
    pub welfare: i64,
    pub witness: Profile,
}

/// Exhaustive maximum of welfare over all `(C+1)^N` profiles.
pub fn brute_force_optimum(game: &Game, budget: &Budget) -> Result<Optimum, SolverError> {
    check_budget(game, budget)?;
    let everyone = game.n_players() as i64;
    let mut sweep = Sweep::new(game);
    let mut best = sweep.welfare;
    let mut witness = sweep.x.clone();
    while best < everyone && sweep.step() {
        if sweep.welfare > best {
            best = sweep.welfare;
            witness = sweep.x.clone();
        }
    }
    let witness = Profile::new(witness);
    debug_assert_eq!(game.welfare(&witness), best);
    Ok(Optimum {
        welfare: best,
        witness,
    })
}

/// All pure Nash equilibria in lexicographic order. Never empty: every
/// QoS satisfaction game has at least one.
pub fn enumerate_pne(game: &Game, budget: &Budget) -> Result<Vec<Profile>, SolverError> {
    check_budget(game, budget)?;
    let mut sweep = Sweep::new(game);
    let mut out = Vec::new();
    loop {
        if sweep.is_pure_nash() {
            out.push(Profile::new(sweep.x.clone()));
        }
        if !sweep.step() {
            break;
        }
    }
    Ok(out)
}

/// Price-of-anarchy report for a game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoaReport {
    pub optimum_welfare: i64,
    pub worst_pne_welfare: i64,
    pub best_pne_welfare: i64,
    /// Optimum welfare over worst equilibrium welfare, exact.
    pub poa: Ratio,
    /// `min{N, Tmax / Tmin}`; meaningful whenever every threshold is >= 1.
    pub bound: Ratio,
    pub pne_count: usize,
}

/// `min{N, Tmax/Tmin}`. Games containing a zero threshold fall back to the
/// player-count bound alone.
pub fn poa_bound(game: &Game) -> Ratio {
    let n = Ratio::new(game.n_players() as i64, 1);
    let (tmin, tmax) = game.threshold_range();
    if tmin == 0 {
        n
    } else {
        n.min(Ratio::new(tmax as i64, tmin as i64))
    }
}

/// Assemble the price-of-anarchy report from the exhaustive oracles.
/// Fails when the worst equilibrium welfare is not positive (impossible
/// once every threshold is >= 1).
pub fn price_of_anarchy(game: &Game, budget: &Budget) -> Result<PoaReport, SolverError> {
    let optimum = brute_force_optimum(game, budget)?;
    let equilibria = enumerate_pne(game, budget)?;
    debug_assert!(!equilibria.is_empty());
    let welfares: Vec<i64> = equilibria.iter().map(|p| game.welfare(p)).collect();
    let worst = *welfares.iter().min().expect("at least one equilibrium");
    let best = *welfares.iter().max().expect("at least one equilibrium");
    if worst <= 0 {
        return Err(SolverError::PoaUndefined {
            worst_welfare: worst,
        });
    }
    Ok(PoaReport {
        optimum_welfare: optimum.welfare,
        worst_pne_welfare: worst,
        best_pne_welfare: best,
        poa: Ratio::new(optimum.welfare, worst),
        bound: poa_bound(game),
        pne_count: equilibria.len(),
    })
}

/// The three equivalent statements about a profile of a homogeneous-user
/// game: equilibrium, canonical satisfied count, social optimality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HomogeneousUserCheck {
    pub is_pne: bool,
    pub is_canonical_count: bool,
    pub is_optimum: bool,
}

impl HomogeneousUserCheck {
    pub fn all_agree(&self) -> bool {
        self.is_pne == self.is_canonical_count && self.is_canonical_count == self.is_optimum
    }
}

/// Evaluate the three statements for a homogeneous-user game: the profile
/// is an equilibrium; it is natural with exactly `min{N, sum_c T^c}`
/// satisfied players; it is a social optimum.
pub fn verify_homogeneous_users(
    game: &Game,
    profile: &Profile,
    budget: &Budget,
) -> Result<HomogeneousUserCheck, SolverError> {
    for c in 1..=game.n_channels() {
        let t = game.threshold(0, c);
        if (1..game.n_players()).any(|n| game.threshold(n, c) != t) {
            return Err(SolverError::NonHomogeneousUsers { channel: c });
        }
    }
    game.validate_profile(profile)?;
    let threshold_sum: usize = (1..=game.n_channels()).map(|c| game.threshold(0, c)).sum();
    let canonical = game.n_players().min(threshold_sum);
    let is_canonical_count = game.is_natural(profile) && game.satisfied_count(profile) == canonical;
    let optimum = brute_force_optimum(game, budget)?;
    Ok(HomogeneousUserCheck {
        is_pne: is_pure_nash_complete(game, profile),
        is_canonical_count,
        is_optimum: game.welfare(profile) == optimum.welfare,
    })
}

/// Pure-Nash test under full interference, without building a graph.
pub fn is_pure_nash_complete(game: &Game, profile: &Profile) -> bool {
    let congestion = profile.congestion_vector(game.n_channels());
    for (player, &x) in profile.choices().iter().enumerate() {
        if x == 0 {
            for (channel, &load) in congestion.iter().enumerate().skip(1) {
                if load < game.threshold(player, channel) {
                    return false;
                }
            }
        } else if congestion[x] > game.threshold(player, x) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Naive reference: enumerate with a plain counter and recompute the
    /// welfare from scratch at every profile.
    fn naive_optimum(game: &Game) -> (i64, Profile) {
        let n = game.n_players();
        let c = game.n_channels();
        let mut x = vec![0usize; n];
        let mut best = i64::MIN;
        let mut witness = x.clone();
        loop {
            let p = Profile::new(x.clone());
            let w = game.welfare(&p);
            if w > best {
                best = w;
                witness = x.clone();
            }
            let mut i = n;
            let mut done = true;
            while i > 0 {
                i -= 1;
                if x[i] < c {
                    x[i] += 1;
                    for v in x.iter_mut().skip(i + 1) {
                        *v = 0;
                    }
                    done = false;
                    break;
                }
            }
            if done {
                return (best, Profile::new(witness));
            }
        }
    }

    fn lcg_games(seed: u64, count: usize, max_n: usize, max_c: usize) -> Vec<Game> {
        // Small deterministic generator; keeps the test self-contained.
        let mut state = seed;
        let mut next = move || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (state >> 33) as usize
        };
        (0..count)
            .map(|_| {
                let n = 1 + next() % max_n;
                let c = 1 + next() % max_c;
                let rows = (0..n)
                    .map(|_| (0..c).map(|_| (next() % (n + 2)) as i64).collect())
                    .collect();
                Game::new(rows).unwrap()
            })
            .collect()
    }

    #[test]
    fn greedy_optimum_ten_player_golden() {
        let game = Game::homogeneous_channels(&[5, 5, 3, 3, 3, 3, 2, 2, 1, 1], 3).unwrap();
        let out = greedy_optimum(&game).unwrap();
        assert_eq!(out, Profile::new(vec![1, 1, 1, 2, 2, 2, 3, 3, 0, 0]));
        assert_eq!(game.satisfied_count(&out), 8);
    }

    #[test]
    fn greedy_optimum_satisfies_all_six() {
        let game = Game::homogeneous_channels(&[2, 2, 4, 4, 4, 4], 2).unwrap();
        let out = greedy_optimum(&game).unwrap();
        assert_eq!(game.welfare(&out), 6);
        assert!(is_pure_nash_complete(&game, &out));
    }

    #[test]
    fn greedy_optimum_leaves_unsatisfiable_player_dormant() {
        let game = Game::homogeneous_channels(&[0], 1).unwrap();
        let out = greedy_optimum(&game).unwrap();
        assert_eq!(out, Profile::new(vec![0]));
        assert_eq!(game.welfare(&out), 0);
    }

    #[test]
    fn greedy_optimum_rejects_heterogeneous_channels() {
        let game = Game::new(vec![vec![1, 2]]).unwrap();
        assert!(matches!(
            greedy_optimum(&game),
            Err(SolverError::NonHomogeneousChannels { player: 0 })
        ));
    }

    #[test]
    fn greedy_optimum_intermediate_structure() {
        // Checkable invariants of the construction while it is still
        // placing players: every intermediate profile is natural; the
        // dormant set is exactly the unprocessed suffix; the chosen channel
        // is the lowest-indexed one below the player's threshold; channels
        // left of it are full for that player and channels beyond the next
        // free one are untouched.
        let cases: Vec<(Vec<usize>, usize)> = vec![
            (vec![5, 5, 3, 3, 3, 3, 2, 2, 1, 1], 3),
            (vec![4, 4, 4, 4, 2, 2], 2),
            (vec![3, 2, 2, 1, 1, 1, 0], 2),
            (vec![2, 1], 4),
        ];
        for (sorted, n_channels) in cases {
            let game = Game::homogeneous_channels(
                &sorted.iter().map(|&t| t as i64).collect::<Vec<_>>(),
                n_channels,
            )
            .unwrap();
            let steps = greedy_sorted_steps(&sorted, n_channels);
            let congestion = |step: &[usize], c: usize| step.iter().filter(|&&x| x == c).count();
            for iteration in 1..steps.len() {
                let before = &steps[iteration - 1];
                let after = &steps[iteration];
                if after == before {
                    continue; // no channel could satisfy this player
                }
                let t = sorted[iteration - 1];
                let chosen = after[iteration - 1];
                assert!(congestion(before, chosen) < t);
                for c in 1..chosen {
                    assert!(congestion(before, c) >= t, "lower channels must be full");
                }
                let first_free = (1..=n_channels)
                    .find(|&c| congestion(before, c) < t)
                    .unwrap();
                assert_eq!(chosen, first_free, "lowest qualifying channel wins");
                for c in (first_free + 1)..=n_channels {
                    assert_eq!(congestion(before, c), 0, "later channels stay untouched");
                }
                assert!(game.is_natural(&Profile::new(after.clone())));
                let dormant: Vec<usize> = (0..sorted.len()).filter(|&i| after[i] == 0).collect();
                let expected: Vec<usize> = (iteration..sorted.len()).collect();
                assert_eq!(dormant, expected, "dormant set is the unprocessed suffix");
            }
        }
    }

    #[test]
    fn greedy_optimum_matches_brute_force_on_random_games() {
        let budget = Budget::default();
        for game in lcg_games(11, 120, 8, 3) {
            let homogeneous = Game::homogeneous_channels(
                &(0..game.n_players())
                    .map(|n| game.threshold(n, 1) as i64)
                    .collect::<Vec<_>>(),
                game.n_channels(),
            )
            .unwrap();
            let greedy = greedy_optimum(&homogeneous).unwrap();
            let exact = brute_force_optimum(&homogeneous, &budget).unwrap();
            assert_eq!(homogeneous.welfare(&greedy), exact.welfare);
            assert!(is_pure_nash_complete(&homogeneous, &greedy));
        }
    }

    #[test]
    fn round_robin_examples() {
        assert_eq!(
            round_robin_profile(6, 3),
            Profile::new(vec![2, 3, 1, 2, 3, 1])
        );
        assert_eq!(round_robin_profile(1, 5), Profile::new(vec![2]));
        let game = Game::homogeneous_channels(&[2, 2, 2, 2], 2).unwrap();
        let x = round_robin_profile(4, 2);
        assert_eq!(game.satisfied_count(&x), 4);
    }

    #[test]
    fn brute_force_matches_welfare_goldens() {
        let budget = Budget::default();
        let game = Game::homogeneous_channels(&[2, 2, 4, 4, 4, 4], 2).unwrap();
        assert_eq!(brute_force_optimum(&game, &budget).unwrap().welfare, 6);

        let game = Game::homogeneous_channels(&[2, 2, 3, 3, 3, 4], 2).unwrap();
        assert_eq!(brute_force_optimum(&game, &budget).unwrap().welfare, 5);

        let game = Game::homogeneous_channels(&[0, 0, 0], 2).unwrap();
        let optimum = brute_force_optimum(&game, &budget).unwrap();
        assert_eq!(optimum.welfare, 0);
        assert_eq!(optimum.witness, Profile::all_dormant(3));
    }

    #[test]
    fn brute_force_agrees_with_naive_reference() {
        let budget = Budget::default();
        for game in lcg_games(23, 150, 6, 3) {
            let fast = brute_force_optimum(&game, &budget).unwrap();
            let (welfare, witness) = naive_optimum(&game);
            assert_eq!(fast.welfare, welfare);
            assert_eq!(fast.witness, witness, "lexicographic tie-break");
        }
    }

    #[test]
    fn brute_force_refuses_over_budget() {
        let game = Game::homogeneous_channels(&[1, 1, 1], 2).unwrap();
        let err = brute_force_optimum(&game, &Budget::new(10)).unwrap_err();
        assert!(matches!(
            err,
            SolverError::BudgetExceeded {
                profiles: 27,
                budget: 10
            }
        ));
    }

    #[test]
    fn pne_enumeration_examples() {
        let budget = Budget::default();
        let game = Game::homogeneous_channels(&[1, 1], 1).unwrap();
        let pne = enumerate_pne(&game, &budget).unwrap();
        assert_eq!(
            pne,
            vec![Profile::new(vec![0, 1]), Profile::new(vec![1, 0])]
        );

        let game = Game::homogeneous_channels(&[2, 2, 4, 4, 4, 4], 2).unwrap();
        let pne = enumerate_pne(&game, &budget).unwrap();
        assert!(pne.contains(&Profile::new(vec![0, 0, 1, 1, 2, 2])));

        let game = Game::homogeneous_channels(&[1], 1).unwrap();
        assert_eq!(
            enumerate_pne(&game, &budget).unwrap(),
            vec![Profile::new(vec![1])]
        );
    }

    #[test]
    fn pne_enumeration_agrees_with_naive_filter() {
        let budget = Budget::default();
        for game in lcg_games(71, 100, 5, 3) {
            let fast = enumerate_pne(&game, &budget).unwrap();
            let mut naive = Vec::new();
            let (n, c) = (game.n_players(), game.n_channels());
            let mut x = vec![0usize; n];
            loop {
                let p = Profile::new(x.clone());
                if is_pure_nash_complete(&game, &p) {
                    naive.push(p);
                }
                let mut i = n;
                let mut done = true;
                while i > 0 {
                    i -= 1;
                    if x[i] < c {
                        x[i] += 1;
                        x.iter_mut().skip(i + 1).for_each(|v| *v = 0);
                        done = false;
                        break;
                    }
                }
                if done {
                    break;
                }
            }
            assert_eq!(fast, naive);
        }
    }

    #[test]
    fn pne_never_empty_and_natural() {
        let budget = Budget::default();
        for game in lcg_games(37, 150, 6, 3) {
            let pne = enumerate_pne(&game, &budget).unwrap();
            assert!(!pne.is_empty(), "equilibrium existence");
            for p in &pne {
                assert!(game.is_natural(p));
                assert_eq!(game.welfare(p), game.satisfied_count(p) as i64);
            }
        }
    }

    #[test]
    fn poa_two_player_single_channel() {
        let game = Game::homogeneous_channels(&[1, 1], 1).unwrap();
        let report = price_of_anarchy(&game, &Budget::default()).unwrap();
        assert_eq!(report.optimum_welfare, 1);
        assert_eq!(report.worst_pne_welfare, 1);
        assert_eq!(report.poa, Ratio::new(1, 1));
        assert_eq!(report.bound, Ratio::new(1, 1));
        assert_eq!(report.pne_count, 2);
    }

    #[test]
    fn poa_six_player_golden() {
        let game = Game::homogeneous_channels(&[2, 2, 4, 4, 4, 4], 2).unwrap();
        let report = price_of_anarchy(&game, &Budget::default()).unwrap();
        assert_eq!(report.optimum_welfare, 6);
        assert_eq!(report.worst_pne_welfare, 4);
        assert_eq!(report.poa, Ratio::new(3, 2));
        assert_eq!(report.bound, Ratio::new(2, 1));
        assert!(report.poa <= report.bound);
    }

    #[test]
    fn poa_undefined_when_worst_welfare_zero() {
        let game = Game::homogeneous_channels(&[0], 1).unwrap();
        assert!(matches!(
            price_of_anarchy(&game, &Budget::default()),
            Err(SolverError::PoaUndefined { worst_welfare: 0 })
        ));
    }

    #[test]
    fn poa_one_for_homogeneous_users() {
        let budget = Budget::default();
        for game in lcg_games(53, 80, 6, 3) {
            // Copy the first row to every player, then force T >= 1.
            let row: Vec<i64> = (1..=game.n_channels())
                .map(|c| game.threshold(0, c).max(1) as i64)
                .collect();
            let homogeneous =
                Game::new((0..game.n_players()).map(|_| row.clone()).collect()).unwrap();
            let report = price_of_anarchy(&homogeneous, &budget).unwrap();
            assert_eq!(report.poa, Ratio::new(1, 1));
        }
    }

    #[test]
    fn homogeneous_user_check_examples() {
        let budget = Budget::default();
        let game = Game::new(vec![vec![1, 1], vec![1, 1], vec![1, 1]]).unwrap();
        let check = verify_homogeneous_users(&game, &Profile::new(vec![1, 2, 0]), &budget).unwrap();
        assert_eq!(
            check,
            HomogeneousUserCheck {
                is_pne: true,
                is_canonical_count: true,
                is_optimum: true
            }
        );
        let check = verify_homogeneous_users(&game, &Profile::new(vec![1, 1, 0]), &budget).unwrap();
        assert_eq!(
            check,
            HomogeneousUserCheck {
                is_pne: false,
                is_canonical_count: false,
                is_optimum: false
            }
        );

        let game = Game::new(vec![vec![2, 2], vec![2, 2]]).unwrap();
        let check = verify_homogeneous_users(&game, &Profile::new(vec![1, 2]), &budget).unwrap();
        assert!(check.is_pne && check.is_canonical_count && check.is_optimum);

        let skew = Game::new(vec![vec![1, 1], vec![2, 1]]).unwrap();
        assert!(matches!(
            verify_homogeneous_users(&skew, &Profile::new(vec![0, 0]), &budget),
            Err(SolverError::NonHomogeneousUsers { channel: 1 })
        ));
    }

    #[test]
    fn ratio_ordering_and_reduction() {
        assert_eq!(Ratio::new(6, 4), Ratio::new(3, 2));
        assert!(Ratio::new(3, 2) < Ratio::new(2, 1));
        assert_eq!(Ratio::new(3, 2).min(Ratio::new(2, 1)), Ratio::new(3, 2));
        assert_eq!(format!("{}", Ratio::new(6, 4)), "3/2");
    }
}
