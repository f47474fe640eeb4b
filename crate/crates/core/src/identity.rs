//! The elastic sense of self and the derived-utility transform.
//!
//! A [`SenseOfSelf`] attaches a unit of self to a set of identity objects:
//! the owner at distance 0, plus any other players or named abstract objects
//! at non-negative semantic distances. An object at distance `d` carries
//! weight `gamma^d`, with `gamma^0 = 1` for every `gamma` including 0, so the
//! `gamma = 0` agent is exactly the classical self-interested one. The
//! derived utility of an outcome is the weight-normalized combination of the
//! raw payoffs earned by every identity object.
//!
//! Abstract identity objects get their payoffs from a caller-supplied
//! [`PayoffResolver`]; [`GroupMean`] ships as the built-in resolver that maps
//! a named group to the mean payoff of its member players.

use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::Deserialize;
use thiserror::Error;

use crate::game::{Game, Outcome};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdentityError {
    #[error("attenuation gamma {gamma} outside [0, 1]")]
    GammaOutOfRange { gamma: f64 },
    #[error(
        "identity object {object:?} has invalid distance {distance} (must be finite and >= 0)"
    )]
    BadDistance { object: String, distance: f64 },
    #[error("identity object {object:?} listed twice")]
    DuplicateObject { object: String },
    #[error("owner {owner:?} must keep distance 0, found {distance}")]
    OwnerDistance { owner: String, distance: f64 },
    #[error("object {object:?} is not in the identity set")]
    NotAMember { object: String },
    #[error("identity object {object:?} has no payoff in this game")]
    Unresolvable { object: String },
    #[error("group {group:?} is empty")]
    EmptyGroup { group: String },
    #[error("group {group:?} member {member:?} is not a player")]
    GroupMemberNotAPlayer { group: String, member: String },
    #[error("profile entry for {player:?}: {source}")]
    ProfileEntry {
        player: String,
        source: Box<IdentityError>,
    },
}

/// Errors from [`IdentityProfile::parse`].
#[derive(Debug, Error)]
pub enum ProfileParseError {
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Invalid(#[from] IdentityError),
}

/// Supplies the raw payoff of an identity object in an outcome.
///
/// For objects that are players of the game, implementations must return
/// exactly the game payoff of that player. The trait exists so abstract
/// objects (groups, causes) can be given payoff semantics by the caller.
pub trait PayoffResolver {
    fn payoff_of(&self, game: &Game, object: &str, outcome: &Outcome)
        -> Result<f64, IdentityError>;
}

/// Resolver that knows players and nothing else.
#[derive(Debug, Clone, Copy, Default)]
pub struct PlayerPayoffs;

impl PayoffResolver for PlayerPayoffs {
    fn payoff_of(
        &self,
        game: &Game,
        object: &str,
        outcome: &Outcome,
    ) -> Result<f64, IdentityError> {
        match game.player_index(object) {
            Some(p) => Ok(game.payoff_at(outcome, p)),
            None => Err(IdentityError::Unresolvable {
                object: object.to_string(),
            }),
        }
    }
}

/// Resolver mapping named groups to the mean payoff of their member players;
/// plain player names resolve to their own payoff as usual.
#[derive(Debug, Clone, Default)]
pub struct GroupMean {
    groups: BTreeMap<String, Vec<String>>,
}

impl GroupMean {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_group(
        mut self,
        name: impl Into<String>,
        members: Vec<String>,
    ) -> Result<Self, IdentityError> {
        let name = name.into();
        if members.is_empty() {
            return Err(IdentityError::EmptyGroup { group: name });
        }
        self.groups.insert(name, members);
        Ok(self)
    }
}

impl PayoffResolver for GroupMean {
    fn payoff_of(
        &self,
        game: &Game,
        object: &str,
        outcome: &Outcome,
    ) -> Result<f64, IdentityError> {
        if let Some(p) = game.player_index(object) {
            return Ok(game.payoff_at(outcome, p));
        }
        let members = self
            .groups
            .get(object)
            .ok_or_else(|| IdentityError::Unresolvable {
                object: object.to_string(),
            })?;
        let mut total = 0.0;
        for member in members {
            let p =
                game.player_index(member)
                    .ok_or_else(|| IdentityError::GroupMemberNotAPlayer {
                        group: object.to_string(),
                        member: member.clone(),
                    })?;
            total += game.payoff_at(outcome, p);
        }
        Ok(total / members.len() as f64)
    }
}

/// An agent's elastic sense of self: its identity set with semantic
/// distances, and the attenuation parameter `gamma`.
///
/// The owner is always a member at distance 0. Distances may be any
/// non-negative real; identification need not be reciprocated.
#[derive(Debug, Clone, PartialEq)]
pub struct SenseOfSelf {
    owner: String,
    /// `(object, distance)` pairs; the owner is entry 0 with distance 0.
    entries: Vec<(String, f64)>,
    gamma: f64,
}

impl SenseOfSelf {
    /// A sense of self containing only the owner.
    pub fn new(owner: impl Into<String>, gamma: f64) -> Result<Self, IdentityError> {
        if !(gamma.is_finite() && (0.0..=1.0).contains(&gamma)) {
            return Err(IdentityError::GammaOutOfRange { gamma });
        }
        let owner = owner.into();
        Ok(SenseOfSelf {
            entries: vec![(owner.clone(), 0.0)],
            owner,
            gamma,
        })
    }

    /// The classical self-interested agent: identity set `{owner}`, gamma 0.
    pub fn selfish(owner: impl Into<String>) -> Self {
        Self::new(owner, 0.0).expect("gamma 0 is valid")
    }

    /// Add an identity object at the given semantic distance.
    pub fn identify_with(
        mut self,
        object: impl Into<String>,
        distance: f64,
    ) -> Result<Self, IdentityError> {
        let object = object.into();
        if !(distance.is_finite() && distance >= 0.0) {
            return Err(IdentityError::BadDistance { object, distance });
        }
        if object == self.owner {
            if distance != 0.0 {
                return Err(IdentityError::OwnerDistance {
                    owner: self.owner,
                    distance,
                });
            }
            return Ok(self); // already present at distance 0
        }
        if self.entries.iter().any(|(o, _)| *o == object) {
            return Err(IdentityError::DuplicateObject { object });
        }
        self.entries.push((object, distance));
        Ok(self)
    }

    /// Same identity set under a different attenuation parameter.
    pub fn with_gamma(&self, gamma: f64) -> Result<Self, IdentityError> {
        if !(gamma.is_finite() && (0.0..=1.0).contains(&gamma)) {
            return Err(IdentityError::GammaOutOfRange { gamma });
        }
        Ok(SenseOfSelf {
            owner: self.owner.clone(),
            entries: self.entries.clone(),
            gamma,
        })
    }

    pub fn owner(&self) -> &str {
        &self.owner
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `(object, distance)` pairs, owner first.
    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(o, d)| (o.as_str(), *d))
    }

    pub fn contains(&self, object: &str) -> bool {
        self.entries.iter().any(|(o, _)| o == object)
    }

    /// Unnormalized identification weight `gamma^d` of a member object.
    ///
    /// `gamma^0 = 1` for every gamma, including 0, so the owner always
    /// carries full weight.
    pub fn weight(&self, object: &str) -> Result<f64, IdentityError> {
        let (_, d) = self
            .entries
            .iter()
            .find(|(o, _)| o == object)
            .ok_or_else(|| IdentityError::NotAMember {
                object: object.to_string(),
            })?;
        Ok(attenuation(self.gamma, *d))
    }

    /// The normalizer `Z`: the sum of `gamma^d` over the identity set.
    /// Always at least 1, since the owner contributes `gamma^0 = 1`.
    pub fn normalizer(&self) -> f64 {
        self.entries
            .iter()
            .map(|(_, d)| attenuation(self.gamma, *d))
            .sum()
    }

    /// Share of self attached to a member object: `gamma^d / Z`.
    pub fn normalized_weight(&self, object: &str) -> Result<f64, IdentityError> {
        Ok(self.weight(object)? / self.normalizer())
    }

    /// Utility the owner derives from an outcome: the normalized
    /// `gamma^d`-weighted combination of the identity members' raw payoffs.
    ///
    /// Computed as the owner's payoff plus normalized-weight corrections
    /// toward each other member, which keeps three exact identities exact in
    /// floating point: gamma 0 returns the owner's payoff, equal member
    /// payoffs are returned unchanged, and the result never leaves
    /// `[min, max]` of the member payoffs.
    pub fn derived_utility<R: PayoffResolver + ?Sized>(
        &self,
        game: &Game,
        outcome: &Outcome,
        resolver: &R,
    ) -> Result<f64, IdentityError> {
        let z = self.normalizer();
        let own = resolver.payoff_of(game, &self.owner, outcome)?;
        let mut utility = own;
        for (object, distance) in &self.entries {
            if object == &self.owner {
                continue;
            }
            let share = attenuation(self.gamma, *distance) / z;
            let payoff = resolver.payoff_of(game, object, outcome)?;
            utility += share * (payoff - own);
        }
        Ok(utility)
    }
}

fn attenuation(gamma: f64, distance: f64) -> f64 {
    if distance == 0.0 {
        1.0
    } else {
        gamma.powf(distance)
    }
}

/// A sense of self for each player of a game.
///
/// Players without an explicit entry are treated as classical
/// self-interested agents.
#[derive(Debug, Clone, Default)]
pub struct IdentityProfile {
    senses: IndexMap<String, SenseOfSelf>,
}

impl IdentityProfile {
    pub fn new() -> Self {
        Self::default()
    }

    /// Insert a sense of self, keyed by its owner. Replaces any previous
    /// entry for the same owner.
    pub fn insert(&mut self, sense: SenseOfSelf) {
        self.senses.insert(sense.owner().to_string(), sense);
    }

    pub fn get(&self, player: &str) -> Option<&SenseOfSelf> {
        self.senses.get(player)
    }

    /// The sense of self used for `player`: the stored one, or the classical
    /// selfish default.
    pub fn sense_for(&self, player: &str) -> SenseOfSelf {
        self.senses
            .get(player)
            .cloned()
            .unwrap_or_else(|| SenseOfSelf::selfish(player))
    }

    /// Every player identifies with every other player at `distance`, all
    /// with the same `gamma`.
    pub fn mutual(game: &Game, gamma: f64, distance: f64) -> Result<Self, IdentityError> {
        let mut profile = IdentityProfile::new();
        for player in game.players() {
            let mut sense = SenseOfSelf::new(player.clone(), gamma)?;
            for other in game.players() {
                if other != player {
                    sense = sense.identify_with(other.clone(), distance)?;
                }
            }
            profile.insert(sense);
        }
        Ok(profile)
    }

    /// Parse a profile document: one table per player with a `gamma` value
    /// and an optional `identifies_with` list of `{ object, distance }`
    /// records. Players absent from the document keep the selfish default.
    pub fn parse(text: &str) -> Result<Self, ProfileParseError> {
        let doc: IndexMap<String, ProfileEntry> =
            toml::from_str(text).map_err(|e| ProfileParseError::Syntax(e.to_string()))?;
        let mut profile = IdentityProfile::new();
        for (player, entry) in doc {
            let wrap = |source: IdentityError| IdentityError::ProfileEntry {
                player: player.clone(),
                source: Box::new(source),
            };
            let mut sense = SenseOfSelf::new(player.clone(), entry.gamma).map_err(wrap)?;
            for record in entry.identifies_with {
                sense = sense
                    .identify_with(record.object, record.distance)
                    .map_err(wrap)?;
            }
            profile.insert(sense);
        }
        Ok(profile)
    }
}

#[derive(Deserialize)]
struct ProfileEntry {
    gamma: f64,
    #[serde(default)]
    identifies_with: Vec<IdentityRecord>,
}

#[derive(Deserialize)]
struct IdentityRecord {
    object: String,
    distance: f64,
}

/// Replace every raw payoff vector by per-player derived utilities.
///
/// Players and action sets are unchanged; entry `p` of each new payoff
/// vector is the derived utility of player `p` under its sense of self from
/// `profile`. With an all-selfish profile the result equals the input game
/// payoff for payoff.
pub fn transform_game<R: PayoffResolver + ?Sized>(
    game: &Game,
    profile: &IdentityProfile,
    resolver: &R,
) -> Result<Game, IdentityError> {
    let senses: Vec<SenseOfSelf> = game
        .players()
        .iter()
        .map(|p| profile.sense_for(p))
        .collect();
    let mut rows = Vec::with_capacity(game.outcome_count());
    for outcome in game.outcomes() {
        let row = senses
            .iter()
            .map(|sense| sense.derived_utility(game, &outcome, resolver))
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    let actions = (0..game.player_count())
        .map(|p| game.actions(p).to_vec())
        .collect();
    Ok(
        Game::from_payoff_rows(game.players().to_vec(), actions, rows)
            .expect("derived utilities of a valid game form a valid game"),
    )
}
