//! Interference graphs and spatial QoS satisfaction games.
//!
//! In the spatial game only linked players contend: the congestion a player
//! sees on its channel counts just the same-channel players in its closed
//! neighborhood. The non-spatial game is recovered by pairing a game with
//! the complete graph.

use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::game::{Game, GameError, Profile};

#[derive(Debug, Clone, PartialEq)]
pub enum SpatialError {
    InvalidGraph(String),
    DimensionMismatch(String),
}

impl fmt::Display for SpatialError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpatialError::InvalidGraph(msg) => write!(f, "invalid graph: {msg}"),
            SpatialError::DimensionMismatch(msg) => write!(f, "dimension mismatch: {msg}"),
        }
    }
}

impl std::error::Error for SpatialError {}

/// Undirected, unweighted interference graph on vertices `0..n`.
///
/// Stored both as adjacency lists (neighborhood walks) and as a sorted edge
/// list (edge counts in the potential function); both are built once at
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceGraph {
    n_vertices: usize,
    adjacency: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    positions: Option<Vec<(f64, f64)>>,
}

impl InterferenceGraph {
    /// Build a graph from an edge list. Self-loops, duplicate edges (in
    /// either orientation), and out-of-range endpoints are rejected.
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, SpatialError> {
        if n_vertices == 0 {
            return Err(SpatialError::InvalidGraph(
                "need at least one vertex".into(),
            ));
        }
        let mut normalized = BTreeSet::new();
        for (a, b) in edges {
            if a >= n_vertices || b >= n_vertices {
                return Err(SpatialError::InvalidGraph(format!(
                    "edge ({a},{b}) out of range for {n_vertices} vertices"
                )));
            }
            if a == b {
                return Err(SpatialError::InvalidGraph(format!("self-loop at {a}")));
            }
            let edge = (a.min(b), a.max(b));
            if !normalized.insert(edge) {
                return Err(SpatialError::InvalidGraph(format!(
                    "duplicate edge ({},{})",
                    edge.0, edge.1
                )));
            }
        }
        let edges: Vec<(usize, usize)> = normalized.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n_vertices];
        for &(a, b) in &edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(InterferenceGraph {
            n_vertices,
            adjacency,
            edges,
            positions: None,
        })
    }

    /// Complete graph: every pair of players interferes.
    pub fn complete(n_vertices: usize) -> Self {
        let mut edges = Vec::with_capacity(n_vertices * (n_vertices.saturating_sub(1)) / 2);
        for a in 0..n_vertices {
            for b in (a + 1)..n_vertices {
                edges.push((a, b));
            }
        }
        InterferenceGraph::new(n_vertices, edges).expect("complete graph is always valid")
    }

    /// Random geometric graph: `n` points uniform on
    /// `[0, width) x [0, height)`, linked when their Euclidean distance is
    /// at most `range_m` (closed ball, compared on squared distances).
    /// Deterministic for a fixed seed.
    pub fn random_geometric(
        n_vertices: usize,
        width_m: f64,
        height_m: f64,
        range_m: f64,
        seed: u64,
    ) -> Result<Self, SpatialError> {
        if n_vertices == 0 {
            return Err(SpatialError::InvalidGraph(
                "need at least one vertex".into(),
            ));
        }
        if !width_m.is_finite()
            || !height_m.is_finite()
            || !range_m.is_finite()
            || width_m <= 0.0
            || height_m <= 0.0
            || range_m < 0.0
        {
            return Err(SpatialError::InvalidGraph(
                "region dimensions must be positive and range non-negative".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions: Vec<(f64, f64)> = (0..n_vertices)
            .map(|_| {
                let x = rng.random_range(0.0..width_m);
                let y = rng.random_range(0.0..height_m);
                (x, y)
            })
            .collect();
        let range_sq = range_m * range_m;
        let mut edges = Vec::new();
        for a in 0..n_vertices {
            for b in (a + 1)..n_vertices {
                let dx = positions[a].0 - positions[b].0;
                let dy = positions[a].1 - positions[b].1;
                if dx * dx + dy * dy <= range_sq {
                    edges.push((a, b));
                }
            }
        }
        let mut graph = InterferenceGraph::new(n_vertices, edges)?;
        graph.positions = Some(positions);
        Ok(graph)
    }

    pub fn with_positions(
        n_vertices: usize,
        edges: Vec<(usize, usize)>,
        positions: Vec<(f64, f64)>,
    ) -> Result<Self, SpatialError> {
        if positions.len() != n_vertices {
            return Err(SpatialError::DimensionMismatch(format!(
                "{} positions for {n_vertices} vertices",
                positions.len()
            )));
        }
        let mut graph = InterferenceGraph::new(n_vertices, edges)?;
        graph.positions = Some(positions);
        Ok(graph)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Sorted `(min, max)` edge pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Open neighborhood (excludes the vertex itself), sorted.
    pub fn neighbors(&self, vertex: usize) -> &[usize] {
        &self.adjacency[vertex]
    }

    /// Closed neighborhood: the linked vertices together with `vertex`.
    pub fn neighborhood(&self, vertex: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.adjacency[vertex].len() + 1);
        let mut inserted = false;
        for &m in &self.adjacency[vertex] {
            if !inserted && m > vertex {
                out.push(vertex);
                inserted = true;
            }
            out.push(m);
        }
        if !inserted {
            out.push(vertex);
        }
        out
    }

    pub fn degree(&self, vertex: usize) -> usize {
        self.adjacency[vertex].len()
    }

    pub fn positions(&self) -> Option<&[(f64, f64)]> {
        self.positions.as_deref()
    }
}

/// A QoS satisfaction game together with an interference graph over its
/// players.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGame {
    game: Game,
    graph: InterferenceGraph,
}

impl SpatialGame {
    pub fn new(game: Game, graph: InterferenceGraph) -> Result<Self, SpatialError> {
        if graph.n_vertices() != game.n_players() {
            return Err(SpatialError::DimensionMismatch(format!(
                "graph has {} vertices, game has {} players",
                graph.n_vertices(),
                game.n_players()
            )));
        }
        Ok(SpatialGame { game, graph })
    }

    /// Pair a game with the complete graph, recovering full-interference
    /// semantics.
    pub fn complete(game: Game) -> Self {
        let graph = InterferenceGraph::complete(game.n_players());
        SpatialGame { game, graph }
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn graph(&self) -> &InterferenceGraph {
        &self.graph
    }

    pub fn n_players(&self) -> usize {
        self.game.n_players()
    }

    pub fn n_channels(&self) -> usize {
        self.game.n_channels()
    }

    /// Local congestion: same-channel players within `player`'s closed
    /// neighborhood (the player itself counts when it is on `channel`).
    pub fn local_congestion(&self, profile: &Profile, player: usize, channel: usize) -> usize {
        assert!(
            channel >= 1,
            "local congestion is defined for channels 1..=C"
        );
        let own = (profile.get(player) == channel) as usize;
        own + self
            .graph
            .neighbors(player)
            .iter()
            .filter(|&&m| profile.get(m) == channel)
            .count()
    }

    /// Utility under spatial interference: as the non-spatial utility with
    /// the congestion level replaced by the player's local congestion on
    /// its own channel.
    pub fn utility(&self, profile: &Profile, player: usize) -> i32 {
        let x = profile.get(player);
        if x == 0 {
            0
        } else if self.local_congestion(profile, player, x) <= self.game.threshold(player, x) {
            1
        } else {
            -1
        }
    }

    pub fn welfare(&self, profile: &Profile) -> i64 {
        (0..self.n_players())
            .map(|n| self.utility(profile, n) as i64)
            .sum()
    }

    pub fn satisfied_count(&self, profile: &Profile) -> usize {
        (0..self.n_players())
            .filter(|&n| self.utility(profile, n) == 1)
            .count()
    }

    pub fn is_natural(&self, profile: &Profile) -> bool {
        (0..self.n_players()).all(|n| self.utility(profile, n) >= 0)
    }

    pub fn validate_profile(&self, profile: &Profile) -> Result<(), GameError> {
        self.game.validate_profile(profile)
    }
}
