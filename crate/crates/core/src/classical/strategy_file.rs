//! Strategy JSON files and per-pair loss reports.
//!
//! ```json
//! {"game": "psams", "p": {"num": 1, "den": 7},
//!  "alice": [[0, 0, 0], ...], "bob": [[0, 1, 1], ...]}
//! ```
//!
//! Bits follow the variable order of each equation. `p` is present only for
//! the p-SAMS game.

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{evaluate_pair, DeterministicStrategy};
use crate::error::{Error, Result};
use crate::game::{self, build_game, AnswerTriple, GameKind, GameSpec};
use crate::rational::{Rational, RationalJson};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub game: GameKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<RationalJson>,
    pub alice: Vec<[u8; 3]>,
    pub bob: Vec<[u8; 3]>,
}

impl StrategyFile {
    pub fn new(g: &GameSpec, s: &DeterministicStrategy) -> Self {
        StrategyFile {
            game: g.kind(),
            p: (g.kind() == GameKind::Psams).then(|| g.sync_weight().into()),
            alice: s.alice.iter().map(|a| a.bits()).collect(),
            bob: s.bob.iter().map(|a| a.bits()).collect(),
        }
    }

    pub fn build_game(&self) -> Result<GameSpec> {
        let p = self.p.map(Rational::try_from).transpose()?;
        build_game(self.game, p)
    }

    /// Validates answer bits and question counts against `g`; errors name the
    /// offending entry.
    pub fn strategy(&self, g: &GameSpec) -> Result<DeterministicStrategy> {
        let side = |name: &str, rows: &[[u8; 3]]| -> Result<Vec<AnswerTriple>> {
            if rows.len() != g.n_questions() {
                return Err(Error::input(format!(
                    "{name} has {} answers but the {} game has {} questions",
                    rows.len(),
                    g.kind(),
                    g.n_questions()
                )));
            }
            rows.iter()
                .enumerate()
                .map(|(q, bits)| {
                    if let Some(i) = bits.iter().position(|b| *b > 1) {
                        return Err(Error::input(format!(
                            "{name}[{q}][{i}] = {} is not a bit",
                            bits[i]
                        )));
                    }
                    AnswerTriple::from_bits(*bits)
                })
                .collect()
        };
        Ok(DeterministicStrategy {
            alice: side("alice", &self.alice)?,
            bob: side("bob", &self.bob)?,
        })
    }
}

pub(crate) fn serialize_strategy<S: serde::Serializer>(
    s: &DeterministicStrategy,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Sides {
        alice: Vec<[u8; 3]>,
        bob: Vec<[u8; 3]>,
    }
    Sides {
        alice: s.alice.iter().map(|a| a.bits()).collect(),
        bob: s.bob.iter().map(|a| a.bits()).collect(),
    }
    .serialize(ser)
}

pub(crate) fn serialize_optional_strategy<S: serde::Serializer>(
    s: &Option<DeterministicStrategy>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    match s {
        Some(s) => serialize_strategy(s, ser),
        None => ser.serialize_none(),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn load_strategy_file(path: impl AsRef<Path>) -> Result<(GameSpec, DeterministicStrategy)> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    let file: StrategyFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.display().to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let g = file.build_game()?;
    let s = file.strategy(&g)?;
    Ok((g, s))
}

pub fn save_strategy_file(
    path: impl AsRef<Path>,
    g: &GameSpec,
    s: &DeterministicStrategy,
) -> Result<()> {
    let path = path.as_ref();
    let mut text =
        serde_json::to_string_pretty(&StrategyFile::new(g, s)).expect("strategy serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossReason {
    AliceParity,
    BobParity,
    BothParity,
    Consistency,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LosingPair {
    pub j: usize,
    pub k: usize,
    pub reason: LossReason,
}

#[derive(Debug, Clone, Serialize)]
pub struct StrategyCheck {
    #[serde(serialize_with = "crate::rational::serialize_rational")]
    pub value: Rational,
    pub losing_pairs: Vec<LosingPair>,
    /// Question pairs examined.
    pub scanned: usize,
    pub seconds: f64,
}

/// Exact value of a strategy plus every question pair it loses, and why.
pub fn verify_strategy(g: &GameSpec, s: &DeterministicStrategy) -> Result<StrategyCheck> {
    let start = Instant::now();
    let value = evaluate_pair(g, s)?;
    let losing_pairs = g
        .pairs()
        .iter()
        .filter(|p| !game::wins(g, p, s.alice[p.j], s.bob[p.k]))
        .map(|p| {
            let a_ok = g.equation(p.j).satisfied_by(s.alice[p.j]);
            let b_ok = g.equation(p.k).satisfied_by(s.bob[p.k]);
            let reason = match (a_ok, b_ok) {
                (false, false) => LossReason::BothParity,
                (false, true) => LossReason::AliceParity,
                (true, false) => LossReason::BobParity,
                (true, true) => LossReason::Consistency,
            };
            LosingPair {
                j: p.j,
                k: p.k,
                reason,
            }
        })
        .collect();
    Ok(StrategyCheck {
        value,
        losing_pairs,
        scanned: g.pairs().len(),
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Loads a strategy file written for `g` and checks it.
pub fn verify_strategy_file(path: impl AsRef<Path>, g: &GameSpec) -> Result<StrategyCheck> {
    let (file_game, s) = load_strategy_file(&path)?;
    if &file_game != g {
        return Err(Error::input(format!(
            "{} holds a strategy for the {} game, not for the requested {} game",
            path.as_ref().display(),
            file_game.kind(),
            g.kind()
        )));
    }
    verify_strategy(g, &s)
}
