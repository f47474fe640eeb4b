//! Expected-utility analysis over gamma, equilibrium and dominance checks,
//! and Pareto frontiers.
//!
//! Expected utilities use the uniform belief: conditional on the agent's own
//! action, every joint action of the other players is equally probable. No
//! equilibrium reasoning enters the expectation; the crossover locations
//! depend on exactly this naive belief.
//!
//! All comparisons that could tie (argmax, Nash deviations, dominance,
//! Pareto) use an absolute tolerance of `1e-12 * scale`, where `scale` is
//! the game's largest absolute payoff. Differences within the tolerance are
//! ties and are never broken silently: tied best actions are all reported,
//! tied deviations do not break an equilibrium, and near-equal comparisons
//! void strict dominance.

use serde::Serialize;
use thiserror::Error;

use crate::game::{Game, GameError, Outcome};
use crate::identity::{IdentityError, PayoffResolver, PlayerPayoffs, SenseOfSelf};
use crate::numfmt::sig9;

/// Relative tie tolerance; multiplied by the game's payoff scale.
const TIE_EPSILON: f64 = 1e-12;

/// Points used by the coarse scan that brackets crossover roots.
const SCAN_POINTS: usize = 101;

/// Interval width to which sweep-detected crossovers are refined.
const SWEEP_REFINE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error("gamma grid is empty")]
    EmptyGrid,
    #[error("gamma grid must be strictly increasing within [0, 1]; offending value {value}")]
    BadGrid { value: f64 },
    #[error("grid step {step} does not produce an increasing grid")]
    BadGridStep { step: f64 },
    #[error("tolerance {tolerance} must be positive")]
    BadTolerance { tolerance: f64 },
    #[error("operation requires a 2-player game, this game has {players}")]
    RequiresTwoPlayers { players: usize },
}

/// Tie tolerance for a game: `1e-12` times its largest absolute payoff.
pub fn tie_tolerance(game: &Game) -> f64 {
    TIE_EPSILON * game.max_abs_payoff()
}

/// Indices of all values within `tol` of the maximum.
pub fn best_indices(values: &[f64], tol: f64) -> Vec<usize> {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= max - tol)
        .map(|(i, _)| i)
        .collect()
}

/// Expected utility for the owner of `sense` choosing `action`, with every
/// joint action of the other players equally probable.
///
/// The owner of `sense` must be a player of the game. Works for any player
/// count; for one-player games the expectation degenerates to the derived
/// utility of the single outcome.
pub fn expected_utility<R: PayoffResolver + ?Sized>(
    game: &Game,
    sense: &SenseOfSelf,
    action: &str,
    resolver: &R,
) -> Result<f64, AnalysisError> {
    let player = game
        .player_index(sense.owner())
        .ok_or_else(|| GameError::UnknownPlayer {
            player: sense.owner().to_string(),
        })?;
    let action = game
        .action_index(player, action)
        .ok_or_else(|| GameError::UnknownAction {
            player: sense.owner().to_string(),
            action: action.to_string(),
        })?;
    expected_utility_indexed(game, sense, player, action, resolver)
}

fn expected_utility_indexed<R: PayoffResolver + ?Sized>(
    game: &Game,
    sense: &SenseOfSelf,
    player: usize,
    action: usize,
    resolver: &R,
) -> Result<f64, AnalysisError> {
    let mut total = 0.0;
    let mut count = 0usize;
    for outcome in game.outcomes() {
        if outcome.indices()[player] != action {
            continue;
        }
        total += sense.derived_utility(game, &outcome, resolver)?;
        count += 1;
    }
    Ok(total / count as f64)
}

/// Expected utility of every own action, in action order.
pub fn expected_utilities<R: PayoffResolver + ?Sized>(
    game: &Game,
    sense: &SenseOfSelf,
    resolver: &R,
) -> Result<Vec<f64>, AnalysisError> {
    let player = game
        .player_index(sense.owner())
        .ok_or_else(|| GameError::UnknownPlayer {
            player: sense.owner().to_string(),
        })?;
    (0..game.actions(player).len())
        .map(|a| expected_utility_indexed(game, sense, player, a, resolver))
        .collect()
}

/// The sense of self used by sweeps and evolution: `player` identifies with
/// every other player at `distance`, attenuated by `gamma`.
pub fn sense_toward_others(
    game: &Game,
    player: &str,
    gamma: f64,
    distance: f64,
) -> Result<SenseOfSelf, AnalysisError> {
    if game.player_index(player).is_none() {
        return Err(GameError::UnknownPlayer {
            player: player.to_string(),
        }
        .into());
    }
    let mut sense = SenseOfSelf::new(player, gamma).map_err(AnalysisError::Identity)?;
    for other in game.players() {
        if other != player {
            sense = sense
                .identify_with(other.clone(), distance)
                .map_err(AnalysisError::Identity)?;
        }
    }
    Ok(sense)
}

/// An evenly spaced gamma grid `start, start+step, ..., stop`.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(start: f64, stop: f64, step: f64) -> Self {
        GridSpec { start, stop, step }
    }

    /// Materialize the grid points, forcing the final point onto `stop`
    /// when the step divides the range (up to rounding).
    pub fn points(&self) -> Result<Vec<f64>, AnalysisError> {
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(AnalysisError::BadGridStep { step: self.step });
        }
        if !(self.start.is_finite() && self.stop.is_finite()) || self.start > self.stop {
            return Err(AnalysisError::BadGrid { value: self.stop });
        }
        let span = self.stop - self.start;
        let steps = (span / self.step).round() as usize;
        let mut points = Vec::with_capacity(steps + 1);
        let mut k = 0usize;
        loop {
            let value = self.start + k as f64 * self.step;
            if value > self.stop + self.step * 1e-9 {
                break;
            }
            points.push(value.min(self.stop));
            k += 1;
        }
        if let Some(last) = points.last_mut() {
            if (self.stop - *last).abs() <= self.step * 1e-9 {
                *last = self.stop;
            }
        }
        validate_grid(&points)?;
        Ok(points)
    }
}

fn validate_grid(grid: &[f64]) -> Result<(), AnalysisError> {
    if grid.is_empty() {
        return Err(AnalysisError::EmptyGrid);
    }
    let mut prev = f64::NEG_INFINITY;
    for &g in grid {
        if !(g.is_finite() && (0.0..=1.0).contains(&g)) || g <= prev {
            return Err(AnalysisError::BadGrid { value: g });
        }
        prev = g;
    }
    Ok(())
}

/// Which way `E(first) - E(second)` moves through zero at a crossover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossDirection {
    /// The first action overtakes the second as gamma grows.
    Rising,
    /// The first action falls below the second as gamma grows.
    Falling,
}

/// A located equal-utility point between two actions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepCrossover {
    pub actions: (String, String),
    pub gamma: f64,
    pub direction: CrossDirection,
}

/// Expected utilities per action sampled over a gamma grid, plus the
/// crossover points detected between every action pair.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub gamma_grid: Vec<f64>,
    /// Own-action labels, in the player's declared action order.
    pub actions: Vec<String>,
    /// `expected_utilities[gamma_index][action_index]`.
    pub expected_utilities: Vec<Vec<f64>>,
    pub crossovers: Vec<SweepCrossover>,
}

impl SweepResult {
    /// Render as CSV: `gamma,action,expected_utility` rows followed by a
    /// crossover summary in `#` comment lines. Numbers are fixed at 9
    /// significant digits so identical sweeps are byte-identical.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gamma,action,expected_utility\n");
        for (gi, &gamma) in self.gamma_grid.iter().enumerate() {
            for (ai, action) in self.actions.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{}\n",
                    sig9(gamma),
                    action,
                    sig9(self.expected_utilities[gi][ai])
                ));
            }
        }
        out.push_str(&format!("# crossovers: {}\n", self.crossovers.len()));
        for c in &self.crossovers {
            out.push_str(&format!(
                "# crossover: {},{} gamma*={:.6} direction={}\n",
                c.actions.0,
                c.actions.1,
                c.gamma,
                match c.direction {
                    CrossDirection::Rising => "rising",
                    CrossDirection::Falling => "falling",
                }
            ));
        }
        out
    }
}

/// Sweep the expected utility of every own action over a gamma grid.
///
/// At each grid point the player identifies with every other player at
/// `other_distance` with that gamma. Crossovers between each action pair are
/// bracketed by grid sign changes and refined by bisection in grid order.
pub fn gamma_sweep(
    game: &Game,
    player: &str,
    other_distance: f64,
    grid: &[f64],
) -> Result<SweepResult, AnalysisError> {
    validate_grid(grid)?;
    let player_index = game
        .player_index(player)
        .ok_or_else(|| GameError::UnknownPlayer {
            player: player.to_string(),
        })?;
    let base = sense_toward_others(game, player, 0.0, other_distance)?;
    let resolver = PlayerPayoffs;

    let mut expected = Vec::with_capacity(grid.len());
    for &gamma in grid {
        let sense = base.with_gamma(gamma).map_err(AnalysisError::Identity)?;
        expected.push(expected_utilities(game, &sense, &resolver)?);
    }

    let actions: Vec<String> = game.actions(player_index).to_vec();
    let mut crossovers = Vec::new();
    for first in 0..actions.len() {
        for second in first + 1..actions.len() {
            let diff_at = |gamma: f64| -> f64 {
                let sense = base.with_gamma(gamma).expect("gamma within grid bounds");
                let us = expected_utilities(game, &sense, &resolver)
                    .expect("player payoffs always resolve");
                us[first] - us[second]
            };
            let samples: Vec<f64> = expected.iter().map(|us| us[first] - us[second]).collect();
            for root in locate_roots(grid, &samples, &diff_at, SWEEP_REFINE_TOL) {
                crossovers.push(SweepCrossover {
                    actions: (actions[first].clone(), actions[second].clone()),
                    gamma: root.gamma,
                    direction: root.direction,
                });
            }
        }
    }

    Ok(SweepResult {
        gamma_grid: grid.to_vec(),
        actions,
        expected_utilities: expected,
        crossovers,
    })
}

struct Root {
    gamma: f64,
    direction: CrossDirection,
}

/// Find sign changes of `samples` over `grid` and refine each bracket by
/// bisection on `f`. Grid points where the sample is exactly zero count as
/// roots only when the function genuinely crosses (opposite-sign
/// neighbors), or sits at the boundary of the grid next to a nonzero
/// sample; flat zero plateaus report nothing.
fn locate_roots(grid: &[f64], samples: &[f64], f: &dyn Fn(f64) -> f64, tol: f64) -> Vec<Root> {
    let n = grid.len();
    let sign = |x: f64| -> i8 {
        if x == 0.0 {
            0
        } else if x > 0.0 {
            1
        } else {
            -1
        }
    };
    let mut roots = Vec::new();
    for k in 0..n {
        let s = sign(samples[k]);
        if s == 0 {
            let prev = if k > 0 { sign(samples[k - 1]) } else { 0 };
            let next = if k + 1 < n { sign(samples[k + 1]) } else { 0 };
            let interior_cross = prev != 0 && next != 0 && prev != next;
            let boundary_touch = (k == 0 && next != 0) || (k + 1 == n && prev != 0);
            if interior_cross || boundary_touch {
                let toward = if next != 0 { next } else { -prev };
                roots.push(Root {
                    gamma: grid[k],
                    direction: if toward > 0 {
                        CrossDirection::Rising
                    } else {
                        CrossDirection::Falling
                    },
                });
            }
        } else if k + 1 < n {
            let t = sign(samples[k + 1]);
            if t != 0 && t != s {
                let gamma = bisect(f, grid[k], grid[k + 1], tol);
                roots.push(Root {
                    gamma,
                    direction: if t > 0 {
                        CrossDirection::Rising
                    } else {
                        CrossDirection::Falling
                    },
                });
            }
        }
    }
    roots
}

/// Bisection on a bracketing interval; `f(lo)` and `f(hi)` must have
/// opposite signs. Returns the midpoint of the final interval, within
/// `tol / 2` of a sign change.
fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 {
            return mid;
        }
        if (fmid > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// A refined crossover between a specific action pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverRoot {
    /// Smallest gamma in `[0, 1]` where the expected utilities cross.
    pub gamma: f64,
    pub direction: CrossDirection,
    /// True when the scan grid bracketed more than one sign change.
    pub multiple: bool,
}

/// Locate the smallest gamma in `[0, 1]` where the expected utilities of two
/// actions cross, to within `tolerance`, for a player identifying with every
/// other player at `other_distance`.
///
/// Returns `Ok(None)` when the difference never changes sign on the scan
/// grid; multiple sign changes are flagged on the returned root.
pub fn crossover_gamma(
    game: &Game,
    player: &str,
    action_pair: (&str, &str),
    other_distance: f64,
    tolerance: f64,
) -> Result<Option<CrossoverRoot>, AnalysisError> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(AnalysisError::BadTolerance { tolerance });
    }
    let player_index = game
        .player_index(player)
        .ok_or_else(|| GameError::UnknownPlayer {
            player: player.to_string(),
        })?;
    let first = game
        .action_index(player_index, action_pair.0)
        .ok_or_else(|| GameError::UnknownAction {
            player: player.to_string(),
            action: action_pair.0.to_string(),
        })?;
    let second = game
        .action_index(player_index, action_pair.1)
        .ok_or_else(|| GameError::UnknownAction {
            player: player.to_string(),
            action: action_pair.1.to_string(),
        })?;

    let base = sense_toward_others(game, player, 0.0, other_distance)?;
    let resolver = PlayerPayoffs;
    let diff_at = |gamma: f64| -> f64 {
        let sense = base.with_gamma(gamma).expect("scan stays within [0, 1]");
        let a = expected_utility_indexed(game, &sense, player_index, first, &resolver)
            .expect("player payoffs always resolve");
        let b = expected_utility_indexed(game, &sense, player_index, second, &resolver)
            .expect("player payoffs always resolve");
        a - b
    };

    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| k as f64 / (SCAN_POINTS - 1) as f64)
        .collect();
    let samples: Vec<f64> = grid.iter().map(|&g| diff_at(g)).collect();
    let roots = locate_roots(&grid, &samples, &diff_at, tolerance);
    Ok(roots.first().map(|root| CrossoverRoot {
        gamma: root.gamma,
        direction: root.direction,
        multiple: roots.len() > 1,
    }))
}

/// All outcomes from which no player can strictly improve its own payoff by
/// a unilateral deviation. Deviations within the tie tolerance are ties and
/// do not break an equilibrium, so weak equilibria are included.
pub fn pure_nash(game: &Game) -> Vec<Outcome> {
    let tol = tie_tolerance(game);
    game.outcomes()
        .filter(|outcome| {
            let current = game.payoff_vector(outcome).to_vec();
            (0..game.player_count()).all(|p| {
                let mut deviated = outcome.indices().to_vec();
                (0..game.actions(p).len()).all(|alt| {
                    if alt == outcome.indices()[p] {
                        return true;
                    }
                    deviated[p] = alt;
                    let dev = game.payoff_at(&Outcome::new(deviated.clone()), p);
                    deviated[p] = outcome.indices()[p];
                    dev <= current[p] + tol
                })
            })
        })
        .collect()
}

/// The action of `player` that is strictly better than every other action
/// against every joint action of the opponents, if one exists. Any
/// within-tolerance comparison voids strictness.
pub fn strictly_dominant(game: &Game, player: &str) -> Result<Option<String>, AnalysisError> {
    let p = game
        .player_index(player)
        .ok_or_else(|| GameError::UnknownPlayer {
            player: player.to_string(),
        })?;
    let tol = tie_tolerance(game);
    let my_actions = game.actions(p).len();
    'candidate: for candidate in 0..my_actions {
        for other in 0..my_actions {
            if other == candidate {
                continue;
            }
            for outcome in game.outcomes() {
                if outcome.indices()[p] != other {
                    continue;
                }
                let mut as_candidate = outcome.indices().to_vec();
                as_candidate[p] = candidate;
                let vc = game.payoff_at(&Outcome::new(as_candidate), p);
                let vo = game.payoff_at(&outcome, p);
                if vc <= vo + tol {
                    continue 'candidate;
                }
            }
        }
        return Ok(Some(game.actions(p)[candidate].clone()));
    }
    Ok(None)
}

/// All outcomes not strictly Pareto-dominated: no other outcome is weakly
/// better for every player and strictly better for at least one (both
/// judged with the tie tolerance).
pub fn pareto_frontier(game: &Game) -> Vec<Outcome> {
    let tol = tie_tolerance(game);
    let outcomes: Vec<Outcome> = game.outcomes().collect();
    outcomes
        .iter()
        .filter(|this| {
            let these = game.payoff_vector(this);
            !outcomes.iter().any(|other| {
                let those = game.payoff_vector(other);
                let weakly_better = those.iter().zip(these).all(|(&o, &t)| o >= t - tol);
                let strictly_somewhere = those.iter().zip(these).any(|(&o, &t)| o > t + tol);
                weakly_better && strictly_somewhere
            })
        })
        .cloned()
        .collect()
}

/// Outcomes a pure altruist playing as `player` would steer toward: those
/// maximizing the other player's payoff (ties within tolerance included).
/// Two-player games only.
pub fn altruist_attractors(game: &Game, player: &str) -> Result<Vec<Outcome>, AnalysisError> {
    if game.player_count() != 2 {
        return Err(AnalysisError::RequiresTwoPlayers {
            players: game.player_count(),
        });
    }
    let p = game
        .player_index(player)
        .ok_or_else(|| GameError::UnknownPlayer {
            player: player.to_string(),
        })?;
    let other = 1 - p;
    let tol = tie_tolerance(game);
    let best = game
        .outcomes()
        .map(|o| game.payoff_at(&o, other))
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(game
        .outcomes()
        .filter(|o| game.payoff_at(o, other) >= best - tol)
        .collect())
}

/// Summary of a game's pure-strategy structure.
#[derive(Debug, Clone)]
pub struct GameReport {
    pub nash: Vec<Outcome>,
    /// Strictly dominant action per player, in player order.
    pub dominant: Vec<Option<String>>,
    pub pareto: Vec<Outcome>,
}

/// Compute pure Nash equilibria, per-player strict dominance, and the Pareto
/// frontier in one pass.
pub fn report(game: &Game) -> GameReport {
    let dominant = game
        .players()
        .iter()
        .map(|p| strictly_dominant(game, p).expect("player names come from the game"))
        .collect();
    GameReport {
        nash: pure_nash(game),
        dominant,
        pareto: pareto_frontier(game),
    }
}

impl GameReport {
    /// Machine-readable form of the report with outcomes as action labels.
    pub fn to_json(&self, game: &Game) -> serde_json::Value {
        let labels = |outcomes: &[Outcome]| -> Vec<Vec<String>> {
            outcomes
                .iter()
                .map(|o| {
                    game.outcome_labels(o)
                        .iter()
                        .map(|s| s.to_string())
                        .collect()
                })
                .collect()
        };
        let dominant: serde_json::Map<String, serde_json::Value> = game
            .players()
            .iter()
            .zip(&self.dominant)
            .map(|(player, action)| {
                (
                    player.clone(),
                    action
                        .as_ref()
                        .map(|a| serde_json::Value::String(a.clone()))
                        .unwrap_or(serde_json::Value::Null),
                )
            })
            .collect();
        serde_json::json!({
            "players": game.players(),
            "pure_nash": labels(&self.nash),
            "strictly_dominant": dominant,
            "pareto_frontier": labels(&self.pareto),
        })
    }
}
