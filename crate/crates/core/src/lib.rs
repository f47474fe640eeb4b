//! Normal-form games played by agents with an elastic sense of self.
//!
//! An agent's sense of self is a set of identity objects (itself, other
//! players, named groups), each at a semantic distance `d`, together with an
//! attenuation parameter `gamma` in `[0, 1]`. The agent values an outcome by
//! the normalized, `gamma^d`-weighted combination of the raw payoffs earned
//! by everything it identifies with. Varying `gamma` interpolates between
//! classical self-interest (`gamma = 0`) and evenly shared interest
//! (`gamma = 1`), which is enough to make cooperation the rational choice in
//! a one-shot Prisoner's Dilemma once `gamma` is large enough.
//!
//! The crate is organized by task:
//!
//! - [`game`]: finite N-player normal-form games, their text format, and raw
//!   payoff access.
//! - [`identity`]: the sense of self, derived utilities, and whole-game
//!   payoff transformation.
//! - [`analysis`]: expected utilities under uniform beliefs, gamma sweeps and
//!   crossover detection, pure Nash equilibria, strict dominance, and Pareto
//!   frontiers.
//! - [`evolution`]: seeded population experiments probing whether empathetic
//!   agents survive invasion by selfish ones.

pub mod analysis;
pub mod evolution;
pub mod game;
pub mod identity;
pub mod numfmt;

pub use game::{parse_game, prisoners_dilemma, serialize_game, Game, GameError, Outcome};
pub use identity::{transform_game, IdentityProfile, PayoffResolver, PlayerPayoffs, SenseOfSelf};
