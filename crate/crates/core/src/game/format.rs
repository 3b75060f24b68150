//! JSON game files.
//!
//! ```json
//! {
//!   "format": "ratl-game",
//!   "version": 1,
//!   "layout": "...",
//!   "num_players": 2,
//!   "action_counts": [2, 2],
//!   "utilities": [[0.6, 0.0, 0.8, 0.2], [0.6, 0.8, 0.0, 0.2]]
//! }
//! ```
//!
//! `utilities[i]` is player `i`'s table flattened in row-major order (last
//! player's action fastest); actions are 0-based. Floats are written in the
//! shortest form that parses back to the identical `f64`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::NormalFormGame;
use crate::error::{Error, Result};

pub const GAME_FORMAT: &str = "ratl-game";

pub const GAME_LAYOUT: &str = "row-major: utilities[i][((a_1*|A_2| + a_2)*|A_3| + a_3)...], \
last player's action varies fastest; actions are 0-based";

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GameFile {
    pub format: String,
    pub version: u32,
    #[serde(default)]
    pub layout: String,
    pub num_players: usize,
    pub action_counts: Vec<usize>,
    pub utilities: Vec<Vec<f64>>,
}

impl From<&NormalFormGame> for GameFile {
    fn from(g: &NormalFormGame) -> GameFile {
        GameFile {
            format: GAME_FORMAT.to_string(),
            version: 1,
            layout: GAME_LAYOUT.to_string(),
            num_players: g.num_players(),
            action_counts: g.action_counts().to_vec(),
            utilities: g.tables().to_vec(),
        }
    }
}

impl TryFrom<GameFile> for NormalFormGame {
    type Error = Error;

    fn try_from(f: GameFile) -> Result<NormalFormGame> {
        if f.format != GAME_FORMAT {
            return Err(Error::Format(format!("unknown format tag {:?}", f.format)));
        }
        if f.version != 1 {
            return Err(Error::Format(format!("unsupported version {}", f.version)));
        }
        if f.num_players != f.action_counts.len() {
            return Err(Error::Shape(format!(
                "num_players = {} but {} action counts",
                f.num_players,
                f.action_counts.len()
            )));
        }
        NormalFormGame::new(f.action_counts, f.utilities)
    }
}

impl Serialize for NormalFormGame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GameFile::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for NormalFormGame {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let file = GameFile::deserialize(d)?;
        NormalFormGame::try_from(file).map_err(serde::de::Error::custom)
    }
}

impl NormalFormGame {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GameFile::from(self)).expect("game serialises")
    }

    pub fn from_json(text: &str) -> Result<NormalFormGame> {
        let file: GameFile =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        NormalFormGame::try_from(file)
    }
}

pub fn save_game(game: &NormalFormGame, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, game.to_json() + "\n")?;
    Ok(())
}

pub fn load_game(path: impl AsRef<Path>) -> Result<NormalFormGame> {
    NormalFormGame::from_json(&fs::read_to_string(path)?)
}
