//! Reduction from 3-dimensional matching to the social-optimum problem.
//!
//! An instance with side size `I` and `J >= I` distinct triples maps to a
//! game with `C = J` channels and `N = 2I + J` players: one player per
//! element of the three sides, plus `J - I` padding players. An element
//! player gets threshold 3 on the channels of the triples it belongs to
//! and 1 elsewhere; padding players get threshold 1 everywhere. Three
//! players can then share a channel exactly when they form that channel's
//! triple, so the optimum welfare reaches `2I + J` (everyone satisfied) if
//! and only if a perfect matching exists.
//!
//! The reduction doubles as a structured test-instance generator; an
//! independent subset-enumeration oracle decides the same question
//! directly on the triples.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::game::Game;

#[derive(Debug, Clone, PartialEq)]
pub enum HardnessError {
    InvalidInstance(String),
    /// Subset enumeration refused: too many triples.
    BudgetExceeded {
        triples: usize,
        limit: usize,
    },
}

impl fmt::Display for HardnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HardnessError::InvalidInstance(msg) => write!(f, "invalid 3DM instance: {msg}"),
            HardnessError::BudgetExceeded { triples, limit } => write!(
                f,
                "matching oracle refused: {triples} triples exceeds the subset \
                 enumeration limit {limit}"
            ),
        }
    }
}

impl std::error::Error for HardnessError {}

/// A 3-dimensional matching instance: three sides of `side` elements each
/// (labelled `1..=side`) and a list of distinct triples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeDmInstance {
    side: usize,
    triples: Vec<[usize; 3]>,
}

impl ThreeDmInstance {
    pub fn new(side: usize, triples: Vec<[usize; 3]>) -> Result<Self, HardnessError> {
        if side == 0 {
            return Err(HardnessError::InvalidInstance(
                "side size must be at least 1".into(),
            ));
        }
        if triples.len() < side {
            return Err(HardnessError::InvalidInstance(format!(
                "need at least {side} triples, got {}",
                triples.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for t in &triples {
            if t.iter().any(|&v| v == 0 || v > side) {
                return Err(HardnessError::InvalidInstance(format!(
                    "coordinates of {t:?} must lie in 1..={side}"
                )));
            }
            if !seen.insert(*t) {
                return Err(HardnessError::InvalidInstance(format!(
                    "duplicate triple {t:?}"
                )));
            }
        }
        Ok(ThreeDmInstance { side, triples })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    pub fn n_triples(&self) -> usize {
        self.triples.len()
    }

    /// Player count of the reduced game: `2I + J`.
    pub fn reduced_players(&self) -> usize {
        2 * self.side + self.triples.len()
    }

    /// Welfare the reduced game reaches exactly when a perfect matching
    /// exists (every player satisfied).
    pub fn target_welfare(&self) -> i64 {
        self.reduced_players() as i64
    }
}

/// Build the reduced game. Player indices: the `I` first-side elements,
/// then the second side, then the third, then the `J - I` padding players.
/// Channel `m` (1-based) corresponds to `triples[m - 1]`.
pub fn reduce_3dm(instance: &ThreeDmInstance) -> Game {
    let side = instance.side();
    let n_players = instance.reduced_players();
    let n_channels = instance.n_triples();
    let mut rows = vec![vec![1i64; n_channels]; n_players];
    for (m, &[x, y, z]) in instance.triples().iter().enumerate() {
        rows[x - 1][m] = 3;
        rows[side + y - 1][m] = 3;
        rows[2 * side + z - 1][m] = 3;
    }
    Game::new(rows).expect("reduced game dimensions are always valid")
}

/// Decide the matching question through the reduced game: a perfect
/// matching exists iff the game's optimum welfare is `2I + J`. The caller
/// supplies the social-optimum oracle (typically brute force under a
/// budget).
pub fn decide_matching_via_game<E>(
    instance: &ThreeDmInstance,
    optimum_welfare: impl FnOnce(&Game) -> Result<i64, E>,
) -> Result<bool, E> {
    let game = reduce_3dm(instance);
    let welfare = optimum_welfare(&game)?;
    debug_assert!(welfare <= instance.target_welfare());
    Ok(welfare == instance.target_welfare())
}

/// Largest triple count the independent oracle will enumerate subsets for.
pub const BRUTE_FORCE_3DM_LIMIT: usize = 20;

/// Independent matching oracle: search all `I`-subsets of the triples for
/// one that is pairwise disjoint in every coordinate.
pub fn brute_force_3dm(instance: &ThreeDmInstance) -> Result<bool, HardnessError> {
    if instance.n_triples() > BRUTE_FORCE_3DM_LIMIT {
        return Err(HardnessError::BudgetExceeded {
            triples: instance.n_triples(),
            limit: BRUTE_FORCE_3DM_LIMIT,
        });
    }
    fn extend(
        triples: &[[usize; 3]],
        chosen: &mut Vec<[usize; 3]>,
        start: usize,
        need: usize,
    ) -> bool {
        if need == 0 {
            return true;
        }
        if triples.len() - start < need {
            return false;
        }
        for i in start..triples.len() {
            let t = triples[i];
            let disjoint = chosen
                .iter()
                .all(|c| c[0] != t[0] && c[1] != t[1] && c[2] != t[2]);
            if disjoint {
                chosen.push(t);
                if extend(triples, chosen, i + 1, need - 1) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    Ok(extend(
        instance.triples(),
        &mut Vec::new(),
        0,
        instance.side(),
    ))
}

/// Flavors of random instances for property tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    /// Distinct triples drawn uniformly.
    Uniform,
    /// A planted perfect matching plus random extra triples; always
    /// matchable.
    PlantedMatching,
    /// First coordinates restricted to `side - 1` values, so no perfect
    /// matching can exist (needs `side >= 2` and enough distinct triples).
    SharedCoordinate,
}

/// Seeded random instance generator.
pub fn random_instance(
    side: usize,
    n_triples: usize,
    kind: InstanceKind,
    seed: u64,
) -> Result<ThreeDmInstance, HardnessError> {
    if side == 0 || n_triples < side {
        return Err(HardnessError::InvalidInstance(format!(
            "need side >= 1 and at least side triples, got side {side} / {n_triples} triples"
        )));
    }
    let capacity = |x_values: usize| x_values * side * side;
    match kind {
        InstanceKind::Uniform | InstanceKind::PlantedMatching => {
            if capacity(side) < n_triples {
                return Err(HardnessError::InvalidInstance(format!(
                    "only {} distinct triples exist for side {side}",
                    capacity(side)
                )));
            }
        }
        InstanceKind::SharedCoordinate => {
            if side < 2 {
                return Err(HardnessError::InvalidInstance(
                    "shared-coordinate instances need side >= 2".into(),
                ));
            }
            if capacity(side - 1) < n_triples {
                return Err(HardnessError::InvalidInstance(format!(
                    "only {} distinct x-sharing triples exist for side {side}",
                    capacity(side - 1)
                )));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut triples: BTreeSet<[usize; 3]> = BTreeSet::new();
    if kind == InstanceKind::PlantedMatching {
        let mut ys: Vec<usize> = (1..=side).collect();
        let mut zs: Vec<usize> = (1..=side).collect();
        ys.shuffle(&mut rng);
        zs.shuffle(&mut rng);
        for x in 1..=side {
            triples.insert([x, ys[x - 1], zs[x - 1]]);
        }
    }
    let x_range = match kind {
        InstanceKind::SharedCoordinate => side - 1,
        _ => side,
    };
    while triples.len() < n_triples {
        triples.insert([
            rng.random_range(1..=x_range),
            rng.random_range(1..=side),
            rng.random_range(1..=side),
        ]);
    }
    ThreeDmInstance::new(side, triples.into_iter().collect())
}
