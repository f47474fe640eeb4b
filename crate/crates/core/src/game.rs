//! Finite N-player normal-form games with real-valued payoffs.
//!
//! A [`Game`] holds an ordered list of players, one ordered action set per
//! player, and a payoff vector for every joint outcome. Payoffs are stored
//! flat in row-major outcome order (first player slowest, last player
//! fastest), which fixes the enumeration order of [`Game::outcomes`] and of
//! every CSV derived from it.
//!
//! Games can be read from and written to a small TOML-based text format; see
//! [`parse_game`] and [`serialize_game`].

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on the outcome space so a malformed file cannot ask for an
/// absurd allocation. Exhaustive enumeration is the intended regime.
const MAX_OUTCOMES: usize = 1_000_000;

/// Validation errors raised while constructing or querying a [`Game`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("game must declare at least one player")]
    NoPlayers,
    #[error("duplicate player identifier {player:?}")]
    DuplicatePlayer { player: String },
    #[error("player {player:?} has an empty action set")]
    EmptyActionSet { player: String },
    #[error("duplicate action label {action:?} for player {player:?}")]
    DuplicateAction { player: String, action: String },
    #[error("expected action sets for {expected} players, found {found}")]
    ActionSetCount { expected: usize, found: usize },
    #[error("game has more than {MAX_OUTCOMES} outcomes")]
    TooManyOutcomes,
    #[error("missing outcome {outcome:?}")]
    MissingOutcome { outcome: Vec<String> },
    #[error("duplicate payoff entry for outcome {outcome:?}")]
    DuplicateOutcome { outcome: Vec<String> },
    #[error("unknown action label {label:?} for player {player:?} in outcome {outcome:?}")]
    UnknownActionLabel {
        player: String,
        label: String,
        outcome: Vec<String>,
    },
    #[error("outcome {outcome:?} lists {found} actions, expected one per player ({expected})")]
    OutcomeArity {
        outcome: Vec<String>,
        expected: usize,
        found: usize,
    },
    #[error("payoff vector for outcome {outcome:?} has {found} values, expected {expected}")]
    PayoffArity {
        outcome: Vec<String>,
        expected: usize,
        found: usize,
    },
    #[error("non-finite payoff {value} for player {player:?} in outcome {outcome:?}")]
    NonFinitePayoff {
        player: String,
        outcome: Vec<String>,
        value: f64,
    },
    #[error("expected {expected} payoff rows in outcome order, found {found}")]
    PayoffRowCount { expected: usize, found: usize },
    #[error("unknown player {player:?}")]
    UnknownPlayer { player: String },
    #[error("unknown action {action:?} for player {player:?}")]
    UnknownAction { player: String, action: String },
    #[error("outcome has {found} action indices, expected {expected}")]
    BadOutcomeLength { expected: usize, found: usize },
    #[error("action index {index} out of range for player {player:?} ({count} actions)")]
    ActionIndexOutOfRange {
        player: String,
        index: usize,
        count: usize,
    },
}

/// Errors from [`parse_game`]: either the text is not well-formed, or it is
/// well-formed but violates a [`Game`] invariant.
#[derive(Debug, Error)]
pub enum ParseError {
    /// Malformed document; the message carries line/column from the parser.
    #[error("{0}")]
    Syntax(String),
    /// Well-formed document describing an invalid game.
    #[error(transparent)]
    Invalid(#[from] GameError),
}

/// One joint outcome: an action index for every player, in player order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Outcome(Vec<usize>);

impl Outcome {
    pub fn new(indices: Vec<usize>) -> Self {
        Outcome(indices)
    }

    /// Action index chosen by each player, in player order.
    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<usize>> for Outcome {
    fn from(indices: Vec<usize>) -> Self {
        Outcome(indices)
    }
}

impl From<&[usize]> for Outcome {
    fn from(indices: &[usize]) -> Self {
        Outcome(indices.to_vec())
    }
}

/// An immutable finite normal-form game.
///
/// Construction validates every invariant (unique labels, total payoff
/// mapping, finite values), so holding a `Game` is proof the data is sound.
/// Games are plain data and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Game {
    players: Vec<String>,
    actions: Vec<Vec<String>>,
    /// Flat payoffs: `payoffs[flat_outcome * player_count + player]`.
    payoffs: Vec<f64>,
}

impl Game {
    /// Build a game from label-keyed payoff entries, one per joint outcome.
    ///
    /// `entries` must cover the full Cartesian product of the action sets
    /// exactly once; every violation is reported with the offending
    /// coordinate.
    pub fn new(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        entries: Vec<(Vec<String>, Vec<f64>)>,
    ) -> Result<Game, GameError> {
        validate_shape(&players, &actions)?;
        let n = players.len();
        let outcome_count = checked_outcome_count(&actions)?;

        let mut payoffs = vec![0.0; outcome_count * n];
        let mut seen = vec![false; outcome_count];
        let sizes: Vec<usize> = actions.iter().map(Vec::len).collect();

        for (labels, values) in &entries {
            if labels.len() != n {
                return Err(GameError::OutcomeArity {
                    outcome: labels.clone(),
                    expected: n,
                    found: labels.len(),
                });
            }
            let mut flat = 0usize;
            for (p, label) in labels.iter().enumerate() {
                let idx = actions[p].iter().position(|a| a == label).ok_or_else(|| {
                    GameError::UnknownActionLabel {
                        player: players[p].clone(),
                        label: label.clone(),
                        outcome: labels.clone(),
                    }
                })?;
                flat = flat * sizes[p] + idx;
            }
            if seen[flat] {
                return Err(GameError::DuplicateOutcome {
                    outcome: labels.clone(),
                });
            }
            seen[flat] = true;
            if values.len() != n {
                return Err(GameError::PayoffArity {
                    outcome: labels.clone(),
                    expected: n,
                    found: values.len(),
                });
            }
            for (p, &v) in values.iter().enumerate() {
                if !v.is_finite() {
                    return Err(GameError::NonFinitePayoff {
                        player: players[p].clone(),
                        outcome: labels.clone(),
                        value: v,
                    });
                }
                payoffs[flat * n + p] = v;
            }
        }

        if let Some(flat) = seen.iter().position(|&s| !s) {
            let game = Game {
                players,
                actions,
                payoffs,
            };
            let outcome = game.outcome_at(flat);
            let labels = game
                .outcome_labels(&outcome)
                .iter()
                .map(|s| s.to_string())
                .collect();
            return Err(GameError::MissingOutcome { outcome: labels });
        }

        Ok(Game {
            players,
            actions,
            payoffs,
        })
    }

    /// Build a game from payoff vectors given in row-major outcome order.
    pub fn from_payoff_rows(
        players: Vec<String>,
        actions: Vec<Vec<String>>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Game, GameError> {
        validate_shape(&players, &actions)?;
        let n = players.len();
        let outcome_count = checked_outcome_count(&actions)?;
        if rows.len() != outcome_count {
            return Err(GameError::PayoffRowCount {
                expected: outcome_count,
                found: rows.len(),
            });
        }
        let mut payoffs = Vec::with_capacity(outcome_count * n);
        let probe = Game {
            players: players.clone(),
            actions: actions.clone(),
            payoffs: vec![0.0; outcome_count * n],
        };
        for (flat, row) in rows.iter().enumerate() {
            let labels = || {
                let outcome = probe.outcome_at(flat);
                probe
                    .outcome_labels(&outcome)
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
            };
            if row.len() != n {
                return Err(GameError::PayoffArity {
                    outcome: labels(),
                    expected: n,
                    found: row.len(),
                });
            }
            for (p, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(GameError::NonFinitePayoff {
                        player: players[p].clone(),
                        outcome: labels(),
                        value: v,
                    });
                }
                payoffs.push(v);
            }
        }
        Ok(Game {
            players,
            actions,
            payoffs,
        })
    }

    pub fn players(&self) -> &[String] {
        &self.players
    }

    pub fn player_count(&self) -> usize {
        self.players.len()
    }

    pub fn player_index(&self, name: &str) -> Option<usize> {
        self.players.iter().position(|p| p == name)
    }

    /// Action labels of one player. Panics if `player` is out of range.
    pub fn actions(&self, player: usize) -> &[String] {
        &self.actions[player]
    }

    pub fn action_index(&self, player: usize, label: &str) -> Option<usize> {
        self.actions[player].iter().position(|a| a == label)
    }

    pub fn outcome_count(&self) -> usize {
        self.payoffs.len() / self.players.len()
    }

    /// All outcomes in row-major order (first player slowest).
    pub fn outcomes(&self) -> impl Iterator<Item = Outcome> + '_ {
        (0..self.outcome_count()).map(|flat| self.outcome_at(flat))
    }

    fn outcome_at(&self, mut flat: usize) -> Outcome {
        let mut indices = vec![0usize; self.players.len()];
        for p in (0..self.players.len()).rev() {
            let size = self.actions[p].len();
            indices[p] = flat % size;
            flat /= size;
        }
        Outcome(indices)
    }

    fn flat_index(&self, outcome: &Outcome) -> usize {
        let mut flat = 0usize;
        for (p, &idx) in outcome.indices().iter().enumerate() {
            flat = flat * self.actions[p].len() + idx;
        }
        flat
    }

    /// Check that `outcome` has one in-range action index per player.
    pub fn validate_outcome(&self, outcome: &Outcome) -> Result<(), GameError> {
        if outcome.len() != self.players.len() {
            return Err(GameError::BadOutcomeLength {
                expected: self.players.len(),
                found: outcome.len(),
            });
        }
        for (p, &idx) in outcome.indices().iter().enumerate() {
            if idx >= self.actions[p].len() {
                return Err(GameError::ActionIndexOutOfRange {
                    player: self.players[p].clone(),
                    index: idx,
                    count: self.actions[p].len(),
                });
            }
        }
        Ok(())
    }

    /// Raw payoff of a named player in an outcome.
    pub fn payoff(&self, outcome: &Outcome, player: &str) -> Result<f64, GameError> {
        self.validate_outcome(outcome)?;
        let p = self
            .player_index(player)
            .ok_or_else(|| GameError::UnknownPlayer {
                player: player.to_string(),
            })?;
        Ok(self.payoff_at(outcome, p))
    }

    /// Raw payoff by player index. Panics on an invalid outcome or index,
    /// like slice indexing; use [`Game::payoff`] for checked access.
    pub fn payoff_at(&self, outcome: &Outcome, player: usize) -> f64 {
        self.payoff_vector(outcome)[player]
    }

    /// The full payoff vector of an outcome, in player order.
    pub fn payoff_vector(&self, outcome: &Outcome) -> &[f64] {
        let n = self.players.len();
        let flat = self.flat_index(outcome);
        &self.payoffs[flat * n..flat * n + n]
    }

    /// Resolve action labels (in player order) to an [`Outcome`].
    pub fn outcome_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<Outcome, GameError> {
        if labels.len() != self.players.len() {
            return Err(GameError::BadOutcomeLength {
                expected: self.players.len(),
                found: labels.len(),
            });
        }
        let mut indices = Vec::with_capacity(labels.len());
        for (p, label) in labels.iter().enumerate() {
            let idx =
                self.action_index(p, label.as_ref())
                    .ok_or_else(|| GameError::UnknownAction {
                        player: self.players[p].clone(),
                        action: label.as_ref().to_string(),
                    })?;
            indices.push(idx);
        }
        Ok(Outcome(indices))
    }

    /// Action labels of an outcome, in player order.
    pub fn outcome_labels(&self, outcome: &Outcome) -> Vec<&str> {
        outcome
            .indices()
            .iter()
            .enumerate()
            .map(|(p, &idx)| self.actions[p][idx].as_str())
            .collect()
    }

    /// Render an outcome as `(C,D)`.
    pub fn format_outcome(&self, outcome: &Outcome) -> String {
        format!("({})", self.outcome_labels(outcome).join(","))
    }

    /// Largest absolute payoff; the scale used by tie tolerances.
    pub fn max_abs_payoff(&self) -> f64 {
        self.payoffs.iter().fold(0.0, |m, &v| m.max(v.abs()))
    }
}

fn validate_shape(players: &[String], actions: &[Vec<String>]) -> Result<(), GameError> {
    if players.is_empty() {
        return Err(GameError::NoPlayers);
    }
    if actions.len() != players.len() {
        return Err(GameError::ActionSetCount {
            expected: players.len(),
            found: actions.len(),
        });
    }
    for (i, player) in players.iter().enumerate() {
        if players[..i].contains(player) {
            return Err(GameError::DuplicatePlayer {
                player: player.clone(),
            });
        }
    }
    for (player, set) in players.iter().zip(actions) {
        if set.is_empty() {
            return Err(GameError::EmptyActionSet {
                player: player.clone(),
            });
        }
        for (i, action) in set.iter().enumerate() {
            if set[..i].contains(action) {
                return Err(GameError::DuplicateAction {
                    player: player.clone(),
                    action: action.clone(),
                });
            }
        }
    }
    Ok(())
}

fn checked_outcome_count(actions: &[Vec<String>]) -> Result<usize, GameError> {
    let mut count = 1usize;
    for set in actions {
        count = count
            .checked_mul(set.len())
            .filter(|&c| c <= MAX_OUTCOMES)
            .ok_or(GameError::TooManyOutcomes)?;
    }
    Ok(count)
}

/// The symmetric two-player cooperate/defect game with players `A`, `B` and
/// actions `[C, D]`: CC pays `(reward, reward)`, CD pays
/// `(sucker, temptation)`, DC pays `(temptation, sucker)`, DD pays
/// `(punishment, punishment)`.
///
/// The canonical ordering `T > R > P > S` is deliberately not enforced, so
/// transformed or otherwise non-dilemma payoff sets can be explored through
/// the same constructor. Panics if any value is non-finite.
pub fn prisoners_dilemma(reward: f64, sucker: f64, temptation: f64, punishment: f64) -> Game {
    Game::from_payoff_rows(
        vec!["A".to_string(), "B".to_string()],
        vec![
            vec!["C".to_string(), "D".to_string()],
            vec!["C".to_string(), "D".to_string()],
        ],
        vec![
            vec![reward, reward],
            vec![sucker, temptation],
            vec![temptation, sucker],
            vec![punishment, punishment],
        ],
    )
    .expect("payoff values must be finite")
}

#[derive(Serialize, Deserialize)]
struct GameDoc {
    players: Vec<String>,
    actions: IndexMap<String, Vec<String>>,
    payoffs: Vec<PayoffRow>,
}

#[derive(Serialize, Deserialize)]
struct PayoffRow {
    outcome: Vec<String>,
    values: Vec<f64>,
}

/// Parse a game from its text form.
///
/// Returns [`ParseError::Syntax`] (with line/column) for malformed text and
/// [`ParseError::Invalid`] when the document violates a game invariant,
/// including `nan`/`inf` payoff values, which the format rejects.
pub fn parse_game(text: &str) -> Result<Game, ParseError> {
    let doc: GameDoc = toml::from_str(text).map_err(|e| ParseError::Syntax(e.to_string()))?;

    let mut actions = Vec::with_capacity(doc.players.len());
    for player in &doc.players {
        match doc.actions.get(player) {
            Some(set) => actions.push(set.clone()),
            None => {
                return Err(GameError::EmptyActionSet {
                    player: player.clone(),
                }
                .into())
            }
        }
    }
    if let Some(extra) = doc.actions.keys().find(|k| !doc.players.contains(k)) {
        return Err(GameError::UnknownPlayer {
            player: extra.clone(),
        }
        .into());
    }

    let entries = doc
        .payoffs
        .into_iter()
        .map(|row| (row.outcome, row.values))
        .collect();
    Ok(Game::new(doc.players, actions, entries)?)
}

/// Serialize a game to its canonical text form.
///
/// Payoff rows are emitted in row-major outcome order, so the output is a
/// deterministic function of the game and round-trips through
/// [`parse_game`] to an equal `Game`.
pub fn serialize_game(game: &Game) -> String {
    let mut actions = IndexMap::new();
    for (p, player) in game.players().iter().enumerate() {
        actions.insert(player.clone(), game.actions(p).to_vec());
    }
    let payoffs = game
        .outcomes()
        .map(|outcome| PayoffRow {
            outcome: game
                .outcome_labels(&outcome)
                .iter()
                .map(|s| s.to_string())
                .collect(),
            values: game.payoff_vector(&outcome).to_vec(),
        })
        .collect();
    let doc = GameDoc {
        players: game.players().to_vec(),
        actions,
        payoffs,
    };
    toml::to_string(&doc).expect("game document always serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn builtin_pd() -> Game {
        prisoners_dilemma(6.0, 0.0, 10.0, 1.0)
    }

    #[test]
    fn builtin_pd_table() {
        let g = builtin_pd();
        let cc = g.outcome_from_labels(&["C", "C"]).unwrap();
        let cd = g.outcome_from_labels(&["C", "D"]).unwrap();
        let dc = g.outcome_from_labels(&["D", "C"]).unwrap();
        let dd = g.outcome_from_labels(&["D", "D"]).unwrap();
        assert_eq!(g.payoff_vector(&cc), &[6.0, 6.0]);
        assert_eq!(g.payoff_vector(&cd), &[0.0, 10.0]);
        assert_eq!(g.payoff_vector(&dc), &[10.0, 0.0]);
        assert_eq!(g.payoff_vector(&dd), &[1.0, 1.0]);
        assert_eq!(g.payoff(&dc, "A").unwrap(), 10.0);
        assert_eq!(g.payoff(&cc, "B").unwrap(), 6.0);
    }

    #[test]
    fn pd_symmetry() {
        let g = builtin_pd();
        let cd = g.outcome_from_labels(&["C", "D"]).unwrap();
        let dc = g.outcome_from_labels(&["D", "C"]).unwrap();
        assert_eq!(g.payoff(&cd, "A").unwrap(), g.payoff(&dc, "B").unwrap());
        assert_eq!(g.payoff(&cd, "B").unwrap(), g.payoff(&dc, "A").unwrap());
    }

    #[test]
    fn zero_game_pays_zero_everywhere() {
        let g = prisoners_dilemma(0.0, 0.0, 0.0, 0.0);
        for outcome in g.outcomes() {
            for player in g.players() {
                assert_eq!(g.payoff(&outcome, player).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn degenerate_single_player_game() {
        let g = Game::new(
            vec!["solo".into()],
            vec![vec!["wait".into()]],
            vec![(vec!["wait".into()], vec![0.0])],
        )
        .unwrap();
        assert_eq!(g.outcome_count(), 1);
        let o = g.outcomes().next().unwrap();
        assert_eq!(g.payoff(&o, "solo").unwrap(), 0.0);
    }

    #[test]
    fn missing_outcome_is_reported() {
        let err = Game::new(
            vec!["A".into(), "B".into()],
            vec![vec!["C".into(), "D".into()], vec!["C".into(), "D".into()]],
            vec![
                (vec!["C".into(), "C".into()], vec![6.0, 6.0]),
                (vec!["C".into(), "D".into()], vec![0.0, 10.0]),
                (vec!["D".into(), "C".into()], vec![10.0, 0.0]),
            ],
        )
        .unwrap_err();
        assert_eq!(
            err,
            GameError::MissingOutcome {
                outcome: vec!["D".into(), "D".into()]
            }
        );
    }

    #[test]
    fn construction_errors_carry_coordinates() {
        let two = || {
            (
                vec!["A".to_string(), "B".to_string()],
                vec![
                    vec!["C".to_string(), "D".to_string()],
                    vec!["C".to_string(), "D".to_string()],
                ],
            )
        };
        let (players, actions) = two();
        let err = Game::new(
            players,
            actions,
            vec![(vec!["C".into(), "X".into()], vec![0.0, 0.0])],
        )
        .unwrap_err();
        assert!(matches!(err, GameError::UnknownActionLabel { ref label, .. } if label == "X"));

        let (players, actions) = two();
        let err = Game::new(
            players,
            actions,
            vec![(vec!["C".into(), "C".into()], vec![0.0])],
        )
        .unwrap_err();
        assert!(matches!(err, GameError::PayoffArity { found: 1, .. }));

        let (players, actions) = two();
        let err = Game::new(
            players,
            actions,
            vec![(vec!["C".into(), "C".into()], vec![f64::NAN, 0.0])],
        )
        .unwrap_err();
        assert!(matches!(err, GameError::NonFinitePayoff { ref player, .. } if player == "A"));

        let err = Game::new(
            vec!["A".into(), "A".into()],
            vec![vec!["C".into()], vec!["C".into()]],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, GameError::DuplicatePlayer { .. }));

        let err =
            Game::new(vec!["A".into()], vec![vec!["C".into(), "C".into()]], vec![]).unwrap_err();
        assert!(matches!(err, GameError::DuplicateAction { .. }));
    }

    #[test]
    fn payoff_rejects_bad_coordinates() {
        let g = builtin_pd();
        let cc = g.outcome_from_labels(&["C", "C"]).unwrap();
        assert!(matches!(
            g.payoff(&cc, "Z").unwrap_err(),
            GameError::UnknownPlayer { .. }
        ));
        assert!(matches!(
            g.payoff(&Outcome::new(vec![0, 5]), "A").unwrap_err(),
            GameError::ActionIndexOutOfRange { .. }
        ));
        assert!(matches!(
            g.payoff(&Outcome::new(vec![0]), "A").unwrap_err(),
            GameError::BadOutcomeLength { .. }
        ));
    }

    #[test]
    fn outcome_enumeration_is_row_major() {
        let g = Game::from_payoff_rows(
            vec!["P1".into(), "P2".into()],
            vec![
                vec!["a".into(), "b".into()],
                vec!["x".into(), "y".into(), "z".into()],
            ],
            (0..6).map(|i| vec![i as f64, -(i as f64)]).collect(),
        )
        .unwrap();
        let order: Vec<String> = g.outcomes().map(|o| g.format_outcome(&o)).collect();
        assert_eq!(
            order,
            ["(a,x)", "(a,y)", "(a,z)", "(b,x)", "(b,y)", "(b,z)"]
        );
        let by = g.outcome_from_labels(&["b", "y"]).unwrap();
        assert_eq!(g.payoff_at(&by, 0), 4.0);
    }

    #[test]
    fn round_trip_builtin_pd() {
        let g = builtin_pd();
        let text = serialize_game(&g);
        let back = parse_game(&text).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn parse_rejects_nan_token_as_syntax() {
        let text = r#"
players = ["A"]

[actions]
A = ["C"]

[[payoffs]]
outcome = ["C"]
values = [NaN]
"#;
        let err = parse_game(text).unwrap_err();
        assert!(matches!(err, ParseError::Syntax(ref msg) if msg.contains("line")));
    }

    #[test]
    fn parse_rejects_nan_value_as_invalid() {
        let text = r#"
players = ["A"]

[actions]
A = ["C"]

[[payoffs]]
outcome = ["C"]
values = [nan]
"#;
        let err = parse_game(text).unwrap_err();
        assert!(matches!(
            err,
            ParseError::Invalid(GameError::NonFinitePayoff { .. })
        ));
    }

    #[test]
    fn parse_rejects_infinite_value() {
        let text = r#"
players = ["A"]

[actions]
A = ["C"]

[[payoffs]]
outcome = ["C"]
values = [inf]
"#;
        assert!(matches!(
            parse_game(text).unwrap_err(),
            ParseError::Invalid(GameError::NonFinitePayoff { .. })
        ));
    }

    #[test]
    fn parse_three_player_game() {
        let text = r#"
players = ["A", "B", "C"]

[actions]
A = ["l", "r"]
B = ["x", "y", "z"]
C = ["u", "d"]

[[payoffs]]
outcome = ["l", "x", "u"]
values = [1.0, 2.0, 3.0]
[[payoffs]]
outcome = ["l", "x", "d"]
values = [1.0, 2.0, 3.0]
[[payoffs]]
outcome = ["l", "y", "u"]
values = [1.0, 2.0, 3.0]
[[payoffs]]
outcome = ["l", "y", "d"]
values = [1.0, 2.0, 3.0]
[[payoffs]]
outcome = ["l", "z", "u"]
values = [1.0, 2.0, 3.0]
[[payoffs]]
outcome = ["l", "z", "d"]
values = [1.0, 2.0, 3.0]
[[payoffs]]
outcome = ["r", "x", "u"]
values = [4.0, 5.0, 6.0]
[[payoffs]]
outcome = ["r", "x", "d"]
values = [4.0, 5.0, 6.0]
[[payoffs]]
outcome = ["r", "y", "u"]
values = [4.0, 5.0, 6.0]
[[payoffs]]
outcome = ["r", "y", "d"]
values = [4.0, 5.0, 6.0]
[[payoffs]]
outcome = ["r", "z", "u"]
values = [4.0, 5.0, 6.0]
[[payoffs]]
outcome = ["r", "z", "d"]
values = [4.0, 5.0, 6.0]
"#;
        let g = parse_game(text).unwrap();
        assert_eq!(g.outcome_count(), 2 * 3 * 2);
        let back = parse_game(&serialize_game(&g)).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn parse_reports_missing_action_table_and_duplicates() {
        let text = r#"
players = ["A", "B"]

[actions]
A = ["C", "D"]

[[payoffs]]
outcome = ["C", "C"]
values = [1.0, 1.0]
"#;
        assert!(matches!(
            parse_game(text).unwrap_err(),
            ParseError::Invalid(GameError::EmptyActionSet { .. })
        ));

        let dup = r#"
players = ["A"]

[actions]
A = ["C"]

[[payoffs]]
outcome = ["C"]
values = [1.0]
[[payoffs]]
outcome = ["C"]
values = [2.0]
"#;
        assert!(matches!(
            parse_game(dup).unwrap_err(),
            ParseError::Invalid(GameError::DuplicateOutcome { .. })
        ));
    }

    #[test]
    fn prisoners_dilemma_allows_non_dilemma_ordering() {
        // T > R > P > S deliberately broken; constructor accepts it.
        let g = prisoners_dilemma(1.0, 2.0, 3.0, 4.0);
        let cc = g.outcome_from_labels(&["C", "C"]).unwrap();
        assert_eq!(g.payoff_at(&cc, 0), 1.0);
    }
}
