//! JSON document formats shared with the command-line front end.
//!
//! Every self-describing document carries a required `schema_version`
//! field; profiles are the exception and serialize as bare integer arrays.
//! The documents validate redundant size fields against their payload when
//! converted into the in-memory types.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::game::{Game, Profile};
use crate::hardness::ThreeDmInstance;
use crate::simkit::ScenarioConfig;
use crate::spatial::InterferenceGraph;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum IoError {
    UnsupportedSchema { got: u32 },
    Invalid(String),
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::UnsupportedSchema { got } => write!(
                f,
                "unsupported schema_version {got}, this tool reads version {SCHEMA_VERSION}"
            ),
            IoError::Invalid(msg) => write!(f, "invalid document: {msg}"),
        }
    }
}

impl std::error::Error for IoError {}

fn check_schema(version: u32) -> Result<(), IoError> {
    if version != SCHEMA_VERSION {
        return Err(IoError::UnsupportedSchema { got: version });
    }
    Ok(())
}

/// Wire format of a game: `n_players`, `n_channels`, and the row-major
/// threshold matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameDoc {
    pub schema_version: u32,
    pub n_players: usize,
    pub n_channels: usize,
    pub thresholds: Vec<Vec<i64>>,
}

impl GameDoc {
    pub fn from_game(game: &Game) -> Self {
        GameDoc {
            schema_version: SCHEMA_VERSION,
            n_players: game.n_players(),
            n_channels: game.n_channels(),
            thresholds: game
                .threshold_rows()
                .into_iter()
                .map(|row| row.into_iter().map(|t| t as i64).collect())
                .collect(),
        }
    }

    pub fn into_game(self) -> Result<Game, IoError> {
        check_schema(self.schema_version)?;
        if self.thresholds.len() != self.n_players {
            return Err(IoError::Invalid(format!(
                "n_players is {} but thresholds has {} rows",
                self.n_players,
                self.thresholds.len()
            )));
        }
        if self.thresholds.iter().any(|r| r.len() != self.n_channels) {
            return Err(IoError::Invalid(format!(
                "every thresholds row must have n_channels = {} entries",
                self.n_channels
            )));
        }
        Game::new(self.thresholds).map_err(|e| IoError::Invalid(e.to_string()))
    }
}

/// Wire format of an interference graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub schema_version: u32,
    pub n_vertices: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<[f64; 2]>>,
}

impl GraphDoc {
    pub fn from_graph(graph: &InterferenceGraph) -> Self {
        GraphDoc {
            schema_version: SCHEMA_VERSION,
            n_vertices: graph.n_vertices(),
            edges: graph.edges().iter().map(|&(a, b)| [a, b]).collect(),
            positions: graph
                .positions()
                .map(|ps| ps.iter().map(|&(x, y)| [x, y]).collect()),
        }
    }

    pub fn into_graph(self) -> Result<InterferenceGraph, IoError> {
        check_schema(self.schema_version)?;
        let edges = self.edges.iter().map(|&[a, b]| (a, b)).collect();
        let graph = match self.positions {
            Some(ps) => InterferenceGraph::with_positions(
                self.n_vertices,
                edges,
                ps.iter().map(|&[x, y]| (x, y)).collect(),
            ),
            None => InterferenceGraph::new(self.n_vertices, edges),
        };
        graph.map_err(|e| IoError::Invalid(e.to_string()))
    }
}

/// Wire format of a 3-dimensional matching instance: the side size `I`
/// and the triple list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDoc {
    pub schema_version: u32,
    #[serde(rename = "I")]
    pub side: usize,
    pub triples: Vec<[usize; 3]>,
}

impl InstanceDoc {
    pub fn from_instance(instance: &ThreeDmInstance) -> Self {
        InstanceDoc {
            schema_version: SCHEMA_VERSION,
            side: instance.side(),
            triples: instance.triples().to_vec(),
        }
    }

    pub fn into_instance(self) -> Result<ThreeDmInstance, IoError> {
        check_schema(self.schema_version)?;
        ThreeDmInstance::new(self.side, self.triples).map_err(|e| IoError::Invalid(e.to_string()))
    }
}

/// Wire format of a scenario: the config fields under a schema version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub schema_version: u32,
    #[serde(flatten)]
    pub config: ScenarioConfig,
}

impl ScenarioDoc {
    pub fn from_config(config: &ScenarioConfig) -> Self {
        ScenarioDoc {
            schema_version: SCHEMA_VERSION,
            config: config.clone(),
        }
    }

    pub fn into_config(self) -> Result<ScenarioConfig, IoError> {
        check_schema(self.schema_version)?;
        Ok(self.config)
    }
}

/// Profiles are bare integer arrays on the wire.
pub fn profile_from_json(text: &str) -> Result<Profile, IoError> {
    serde_json::from_str::<Profile>(text).map_err(|e| IoError::Invalid(e.to_string()))
}

pub fn profile_to_json(profile: &Profile) -> String {
    serde_json::to_string(profile).expect("profile serialization cannot fail")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn game_doc_round_trip() {
        let game = Game::new(vec![vec![5, 3], vec![0, 2]]).unwrap();
        let text = serde_json::to_string(&GameDoc::from_game(&game)).unwrap();
        let back: GameDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_game().unwrap(), game);
        assert!(text.contains("\"n_players\":2"));
        assert!(text.contains("\"n_channels\":2"));
        assert!(text.contains("\"thresholds\""));
    }

    #[test]
    fn game_doc_rejects_inconsistent_sizes() {
        let doc = GameDoc {
            schema_version: SCHEMA_VERSION,
            n_players: 3,
            n_channels: 2,
            thresholds: vec![vec![1, 1], vec![1, 1]],
        };
        assert!(doc.into_game().is_err());
    }

    #[test]
    fn schema_version_is_required_and_checked() {
        let err =
            serde_json::from_str::<GameDoc>(r#"{"n_players":1,"n_channels":1,"thresholds":[[1]]}"#);
        assert!(err.is_err(), "missing schema_version must not parse");

        let doc = GameDoc {
            schema_version: 99,
            n_players: 1,
            n_channels: 1,
            thresholds: vec![vec![1]],
        };
        assert!(matches!(
            doc.into_game(),
            Err(IoError::UnsupportedSchema { got: 99 })
        ));
    }

    #[test]
    fn graph_doc_round_trip() {
        let graph = InterferenceGraph::random_geometric(10, 50.0, 50.0, 20.0, 3).unwrap();
        let text = serde_json::to_string(&GraphDoc::from_graph(&graph)).unwrap();
        let back: GraphDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_graph().unwrap(), graph);
    }

    #[test]
    fn instance_doc_uses_capital_i_key() {
        let instance = ThreeDmInstance::new(2, vec![[1, 1, 1], [2, 2, 2]]).unwrap();
        let text = serde_json::to_string(&InstanceDoc::from_instance(&instance)).unwrap();
        assert!(text.contains("\"I\":2"));
        let back: InstanceDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.into_instance().unwrap(), instance);
    }

    #[test]
    fn scenario_doc_defaults_apply() {
        let doc: ScenarioDoc = serde_json::from_str(r#"{"schema_version":1,"n_users":7}"#).unwrap();
        let config = doc.into_config().unwrap();
        assert_eq!(config.n_users, 7);
        assert_eq!(config.channel_rates_mbps, vec![6.0, 9.0, 12.0, 18.0]);
        assert_eq!(config.high_demand_mbps, 3.5);
    }

    #[test]
    fn profile_wire_format_is_bare_array() {
        let p = Profile::new(vec![1, 0, 2]);
        assert_eq!(profile_to_json(&p), "[1,0,2]");
        assert_eq!(profile_from_json("[1,0,2]").unwrap(), p);
        assert!(profile_from_json("{\"x\":1}").is_err());
    }
}
