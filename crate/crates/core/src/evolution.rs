//! Population experiments on two-player games.
//!
//! Each generation the population is paired up, every pair plays the base
//! game once with mutual identification at a configured distance, and agents
//! choose by maximizing expected utility under their own gamma. Fitness is
//! the raw payoff earned, not the derived utility: gamma shapes decisions
//! while selection acts on external resources. Reproduction is
//! fitness-proportional resampling (or a Moran birth-death event), followed
//! by clamped gamma mutation.
//!
//! Every run owns a single ChaCha8 stream seeded from the config, so a
//! config is a complete, reproducible description of an experiment.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::{best_indices, expected_utilities, sense_toward_others, tie_tolerance};
use crate::game::{Game, Outcome};
use crate::identity::PlayerPayoffs;
use crate::numfmt::sig9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolveError {
    #[error("population size {size} too small (need at least 2)")]
    PopulationTooSmall { size: usize },
    #[error("need at least 1 generation")]
    NoGenerations,
    #[error("gamma {gamma} outside [0, 1]")]
    GammaOutOfRange { gamma: f64 },
    #[error("mutation rate {rate} outside [0, 1]")]
    MutationRateOutOfRange { rate: f64 },
    #[error("mutation step {step} must be finite and >= 0")]
    BadMutationStep { step: f64 },
    #[error("invader fraction {fraction} outside the open interval (0, 1)")]
    BadInvaderFraction { fraction: f64 },
    #[error("assortment rho {rho} outside [0, 1]")]
    BadAssortment { rho: f64 },
    #[error("identification distance {distance} must be finite and >= 0")]
    BadDistance { distance: f64 },
    #[error("evolution requires a 2-player base game, this game has {players}")]
    NotTwoPlayerGame { players: usize },
}

/// One agent: a gamma, deciding by argmax of expected utility with
/// within-tolerance ties broken by a seeded coin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentSpec {
    pub gamma: f64,
}

/// Initial gamma distribution of a population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitDistribution {
    /// Everyone starts at the same gamma.
    PointMass { gamma: f64 },
    /// Residents at one gamma, invaders at another, with exact counts by
    /// largest-remainder rounding. Residents come first in agent order.
    TwoPoint {
        resident_gamma: f64,
        invader_gamma: f64,
        invader_fraction: f64,
    },
    /// Independent uniform draws from `[0, 1]`.
    Uniform,
}

/// How agents are matched into pairs each generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pairing {
    /// Uniform random pairing over the whole population.
    WellMixed,
    /// With probability `rho` an agent is paired with the unpaired agent
    /// closest in gamma, otherwise uniformly at random.
    Assortative { rho: f64 },
}

/// How the next generation is produced from fitness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpdateRule {
    /// Roulette resampling of the whole population, weights shifted by the
    /// generation minimum so non-positive payoffs are handled.
    FitnessProportional,
    /// One birth-death event: one parent chosen by fitness, one uniformly
    /// chosen agent replaced by its offspring.
    Moran,
}

/// Full description of an evolutionary experiment.
#[derive(Debug, Clone)]
pub struct EvolveConfig {
    pub game: Game,
    pub population_size: usize,
    pub generations: u32,
    pub init: InitDistribution,
    pub pairing: Pairing,
    pub update: UpdateRule,
    /// Probability that an offspring's gamma mutates.
    pub mutation_rate: f64,
    /// Mutations add a uniform step from `[-step, step]`, clamped to [0, 1].
    pub mutation_step: f64,
    /// Distance at which paired opponents enter each other's identity set.
    pub identification_distance: f64,
    pub seed: u64,
}

impl EvolveConfig {
    /// A config with the default mechanics: well-mixed pairing,
    /// fitness-proportional update, mutation off, identification distance 1.
    pub fn new(
        game: Game,
        init: InitDistribution,
        population_size: usize,
        generations: u32,
        seed: u64,
    ) -> Self {
        EvolveConfig {
            game,
            population_size,
            generations,
            init,
            pairing: Pairing::WellMixed,
            update: UpdateRule::FitnessProportional,
            mutation_rate: 0.0,
            mutation_step: 0.1,
            identification_distance: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), EvolveError> {
        if self.game.player_count() != 2 {
            return Err(EvolveError::NotTwoPlayerGame {
                players: self.game.player_count(),
            });
        }
        if self.population_size < 2 {
            return Err(EvolveError::PopulationTooSmall {
                size: self.population_size,
            });
        }
        if self.generations == 0 {
            return Err(EvolveError::NoGenerations);
        }
        check_gamma_range(self.mutation_rate).map_err(|_| EvolveError::MutationRateOutOfRange {
            rate: self.mutation_rate,
        })?;
        if !(self.mutation_step.is_finite() && self.mutation_step >= 0.0) {
            return Err(EvolveError::BadMutationStep {
                step: self.mutation_step,
            });
        }
        if !(self.identification_distance.is_finite() && self.identification_distance >= 0.0) {
            return Err(EvolveError::BadDistance {
                distance: self.identification_distance,
            });
        }
        match self.init {
            InitDistribution::PointMass { gamma } => check_gamma_range(gamma)?,
            InitDistribution::TwoPoint {
                resident_gamma,
                invader_gamma,
                invader_fraction,
            } => {
                check_gamma_range(resident_gamma)?;
                check_gamma_range(invader_gamma)?;
                if !(invader_fraction.is_finite()
                    && invader_fraction > 0.0
                    && invader_fraction < 1.0)
                {
                    return Err(EvolveError::BadInvaderFraction {
                        fraction: invader_fraction,
                    });
                }
            }
            InitDistribution::Uniform => {}
        }
        if let Pairing::Assortative { rho } = self.pairing {
            if !(rho.is_finite() && (0.0..=1.0).contains(&rho)) {
                return Err(EvolveError::BadAssortment { rho });
            }
        }
        Ok(())
    }
}

fn check_gamma_range(gamma: f64) -> Result<(), EvolveError> {
    if gamma.is_finite() && (0.0..=1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(EvolveError::GammaOutOfRange { gamma })
    }
}

/// A population mid-run: the agents, the generation counter, and the RNG
/// state that makes the rest of the run a pure function.
#[derive(Debug, Clone)]
pub struct Population {
    agents: Vec<AgentSpec>,
    generation: u32,
    rng: ChaCha8Rng,
}

impl Population {
    pub fn agents(&self) -> &[AgentSpec] {
        &self.agents
    }

    pub fn generation(&self) -> u32 {
        self.generation
    }
}

/// Per-stratum share and fitness for two-point (invasion) runs.
#[derive(Debug, Clone, PartialEq)]
pub struct StratumStats {
    pub label: String,
    /// Fraction of the population in this stratum.
    pub share: f64,
    /// Mean raw fitness of the stratum's agents this generation; 0 when the
    /// stratum is empty.
    pub mean_fitness: f64,
}

/// Statistics recorded for one completed generation, before selection.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStats {
    /// 1-based index of the completed generation.
    pub generation: u32,
    /// Fraction of decisions that picked the first action of the game.
    pub coop_freq: f64,
    pub mean_gamma: f64,
    pub min_gamma: f64,
    pub max_gamma: f64,
    /// Mean raw fitness over the whole population.
    pub mean_fitness: f64,
    /// Present only for two-point initial distributions.
    pub strata: Vec<StratumStats>,
}

/// Per-generation statistics of a full run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub generations: Vec<GenerationStats>,
    /// Stratum labels, fixed by the init distribution (empty when
    /// unstratified).
    pub strata_labels: Vec<String>,
}

impl Trajectory {
    /// Render as CSV. Base columns are
    /// `generation,coop_freq,mean_gamma,min_gamma,max_gamma`; stratified
    /// runs append `share_<label>,mean_fitness_<label>` per stratum.
    pub fn to_csv(&self) -> String {
        let mut header = String::from("generation,coop_freq,mean_gamma,min_gamma,max_gamma");
        for label in &self.strata_labels {
            header.push_str(&format!(",share_{label},mean_fitness_{label}"));
        }
        let mut out = header;
        out.push('\n');
        for g in &self.generations {
            out.push_str(&format!(
                "{},{},{},{},{}",
                g.generation,
                sig9(g.coop_freq),
                sig9(g.mean_gamma),
                sig9(g.min_gamma),
                sig9(g.max_gamma)
            ));
            for s in &g.strata {
                out.push_str(&format!(",{},{}", sig9(s.share), sig9(s.mean_fitness)));
            }
            out.push('\n');
        }
        out
    }
}

/// Build the initial population described by the config and seed its RNG.
pub fn init_population(config: &EvolveConfig) -> Result<Population, EvolveError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.population_size;
    let agents = match config.init {
        InitDistribution::PointMass { gamma } => vec![AgentSpec { gamma }; n],
        InitDistribution::TwoPoint {
            resident_gamma,
            invader_gamma,
            invader_fraction,
        } => {
            let invaders = largest_remainder_count(n, invader_fraction);
            let mut agents = vec![
                AgentSpec {
                    gamma: resident_gamma
                };
                n - invaders
            ];
            agents.extend(vec![
                AgentSpec {
                    gamma: invader_gamma
                };
                invaders
            ]);
            agents
        }
        InitDistribution::Uniform => (0..n)
            .map(|_| AgentSpec {
                gamma: rng.gen_range(0.0..=1.0),
            })
            .collect(),
    };
    Ok(Population {
        agents,
        generation: 0,
        rng,
    })
}

/// Exact invader count for a two-point split: floors for both strata, the
/// leftover seat going to the stratum with the larger fractional part
/// (resident wins ties).
fn largest_remainder_count(n: usize, invader_fraction: f64) -> usize {
    let invader_exact = invader_fraction * n as f64;
    let resident_exact = n as f64 - invader_exact;
    let mut invaders = invader_exact.floor() as usize;
    let residents = resident_exact.floor() as usize;
    if invaders + residents < n {
        let invader_frac = invader_exact - invaders as f64;
        let resident_frac = resident_exact - residents as f64;
        if invader_frac > resident_frac {
            invaders += 1;
        }
    }
    invaders.min(n)
}

const RESIDENT: &str = "resident";
const INVADER: &str = "invader";
const OTHER: &str = "other";

fn strata_labels(init: &InitDistribution) -> Vec<String> {
    match init {
        InitDistribution::TwoPoint { .. } => {
            vec![RESIDENT.to_string(), INVADER.to_string(), OTHER.to_string()]
        }
        _ => Vec::new(),
    }
}

/// Advance the population by one generation and report its statistics.
///
/// The generation plays first (pairing, one game per pair, raw-payoff
/// fitness), statistics are taken, then selection and mutation produce the
/// next population. The config must be the one the population was
/// initialized with.
pub fn step(population: &mut Population, config: &EvolveConfig) -> GenerationStats {
    let game = &config.game;
    let tol = tie_tolerance(game);
    let n = population.agents.len();

    let pairs = make_pairs(population, config);

    let mut fitness = vec![0.0f64; n];
    let mut cooperation = 0usize;
    let mut decisions = 0usize;
    let mut pair_payoff_total = 0.0f64;
    for &(i, j) in &pairs {
        let gi = population.agents[i].gamma;
        let gj = population.agents[j].gamma;
        let ai = choose_action(
            game,
            0,
            gi,
            config.identification_distance,
            tol,
            &mut population.rng,
        );
        let aj = choose_action(
            game,
            1,
            gj,
            config.identification_distance,
            tol,
            &mut population.rng,
        );
        let outcome = Outcome::new(vec![ai, aj]);
        let pi = game.payoff_at(&outcome, 0);
        let pj = game.payoff_at(&outcome, 1);
        fitness[i] += pi;
        fitness[j] += pj;
        pair_payoff_total += pi + pj;
        cooperation += usize::from(ai == 0) + usize::from(aj == 0);
        decisions += 2;
    }

    // Fitness accounting: what agents accumulated must equal what the pair
    // games paid out.
    let assigned: f64 = fitness.iter().sum();
    assert!(
        (assigned - pair_payoff_total).abs() <= 1e-9 * game.max_abs_payoff().max(1.0) * n as f64,
        "fitness accounting mismatch: assigned {assigned}, paid {pair_payoff_total}"
    );

    population.generation += 1;
    let stats = collect_stats(population, config, &fitness, cooperation, decisions);

    match config.update {
        UpdateRule::FitnessProportional => {
            let weights = shifted_weights(&fitness);
            let parents: Vec<usize> = (0..n)
                .map(|_| sample_weighted(&weights, &mut population.rng))
                .collect();
            let mut next = Vec::with_capacity(n);
            for parent in parents {
                let mut child = population.agents[parent];
                mutate(&mut child, config, &mut population.rng);
                next.push(child);
            }
            population.agents = next;
        }
        UpdateRule::Moran => {
            let weights = shifted_weights(&fitness);
            let parent = sample_weighted(&weights, &mut population.rng);
            let victim = population.rng.gen_range(0..n);
            let mut child = population.agents[parent];
            mutate(&mut child, config, &mut population.rng);
            population.agents[victim] = child;
        }
    }

    stats
}

fn make_pairs(population: &mut Population, config: &EvolveConfig) -> Vec<(usize, usize)> {
    let n = population.agents.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut population.rng);
    match config.pairing {
        Pairing::WellMixed => order.chunks_exact(2).map(|c| (c[0], c[1])).collect(),
        Pairing::Assortative { rho } => {
            let mut remaining = order;
            let mut pairs = Vec::with_capacity(n / 2);
            while remaining.len() >= 2 {
                let focal = remaining.remove(0);
                let partner_pos = if population.rng.gen_bool(rho) {
                    let focal_gamma = population.agents[focal].gamma;
                    let mut best = 0usize;
                    let mut best_dist = f64::INFINITY;
                    for (pos, &idx) in remaining.iter().enumerate() {
                        let dist = (population.agents[idx].gamma - focal_gamma).abs();
                        if dist < best_dist {
                            best_dist = dist;
                            best = pos;
                        }
                    }
                    best
                } else {
                    population.rng.gen_range(0..remaining.len())
                };
                let partner = remaining.remove(partner_pos);
                pairs.push((focal, partner));
            }
            pairs
        }
    }
}

/// Pick the expected-utility-maximizing action for the given role and
/// gamma; ties within tolerance fall to a seeded uniform draw.
fn choose_action(
    game: &Game,
    role: usize,
    gamma: f64,
    distance: f64,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> usize {
    let player = game.players()[role].clone();
    let sense = sense_toward_others(game, &player, gamma, distance)
        .expect("validated config produces a valid sense of self");
    let utilities =
        expected_utilities(game, &sense, &PlayerPayoffs).expect("player payoffs always resolve");
    let best = best_indices(&utilities, tol);
    if best.len() == 1 {
        best[0]
    } else {
        best[rng.gen_range(0..best.len())]
    }
}

/// Shift fitness by the generation minimum plus a small epsilon, so roulette
/// weights are positive even when payoffs are non-positive.
fn shifted_weights(fitness: &[f64]) -> Vec<f64> {
    const EPS: f64 = 1e-9;
    let min = fitness.iter().cloned().fold(f64::INFINITY, f64::min);
    fitness.iter().map(|&f| f - min + EPS).collect()
}

fn sample_weighted(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let target = rng.gen_range(0.0..total);
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return i;
        }
    }
    weights.len() - 1
}

fn mutate(agent: &mut AgentSpec, config: &EvolveConfig, rng: &mut ChaCha8Rng) {
    if config.mutation_rate == 0.0 {
        return;
    }
    if rng.gen_bool(config.mutation_rate) {
        let step = if config.mutation_step == 0.0 {
            0.0
        } else {
            rng.gen_range(-config.mutation_step..=config.mutation_step)
        };
        agent.gamma = (agent.gamma + step).clamp(0.0, 1.0);
    }
}

fn collect_stats(
    population: &Population,
    config: &EvolveConfig,
    fitness: &[f64],
    cooperation: usize,
    decisions: usize,
) -> GenerationStats {
    let gammas: Vec<f64> = population.agents.iter().map(|a| a.gamma).collect();
    let n = gammas.len() as f64;
    let coop_freq = if decisions == 0 {
        0.0
    } else {
        cooperation as f64 / decisions as f64
    };
    let mean_gamma = gammas.iter().sum::<f64>() / n;
    let min_gamma = gammas.iter().cloned().fold(f64::INFINITY, f64::min);
    let max_gamma = gammas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean_fitness = fitness.iter().sum::<f64>() / n;

    let strata = if let InitDistribution::TwoPoint {
        resident_gamma,
        invader_gamma,
        ..
    } = config.init
    {
        let mut labels_membership = vec![(RESIDENT, resident_gamma), (INVADER, invader_gamma)];
        // Resident classification wins when the two gammas coincide.
        if resident_gamma == invader_gamma {
            labels_membership.truncate(1);
        }
        let mut stats = Vec::with_capacity(3);
        let mut assigned = vec![false; gammas.len()];
        for (label, gamma) in labels_membership {
            let mut count = 0usize;
            let mut total = 0.0;
            for (i, &g) in gammas.iter().enumerate() {
                if !assigned[i] && g == gamma {
                    assigned[i] = true;
                    count += 1;
                    total += fitness[i];
                }
            }
            stats.push(StratumStats {
                label: label.to_string(),
                share: count as f64 / n,
                mean_fitness: if count == 0 {
                    0.0
                } else {
                    total / count as f64
                },
            });
        }
        if stats.len() == 1 {
            stats.push(StratumStats {
                label: INVADER.to_string(),
                share: 0.0,
                mean_fitness: 0.0,
            });
        }
        let mut other_count = 0usize;
        let mut other_total = 0.0;
        for (i, done) in assigned.iter().enumerate() {
            if !done {
                other_count += 1;
                other_total += fitness[i];
            }
        }
        stats.push(StratumStats {
            label: OTHER.to_string(),
            share: other_count as f64 / n,
            mean_fitness: if other_count == 0 {
                0.0
            } else {
                other_total / other_count as f64
            },
        });
        stats
    } else {
        Vec::new()
    };

    GenerationStats {
        generation: population.generation,
        coop_freq,
        mean_gamma,
        min_gamma,
        max_gamma,
        mean_fitness,
        strata,
    }
}

/// Run the configured number of generations from a fresh population.
/// Deterministic: the trajectory is a pure function of the config.
pub fn run(config: &EvolveConfig) -> Result<Trajectory, EvolveError> {
    let mut population = init_population(config)?;
    let mut generations = Vec::with_capacity(config.generations as usize);
    for _ in 0..config.generations {
        generations.push(step(&mut population, config));
    }
    Ok(Trajectory {
        generations,
        strata_labels: strata_labels(&config.init),
    })
}

/// Outcome of an invasion experiment: the full stratified trajectory plus
/// the headline share movements.
#[derive(Debug, Clone)]
pub struct InvasionResult {
    pub resident_gamma: f64,
    pub invader_gamma: f64,
    pub invader_fraction: f64,
    pub trajectory: Trajectory,
    /// `(resident, invader)` shares at the first generation's census.
    pub initial_shares: (f64, f64),
    /// `(resident, invader, other)` shares at the last generation's census.
    pub final_shares: (f64, f64, f64),
    pub invader_grew: bool,
}

impl InvasionResult {
    /// Human-readable summary block.
    pub fn summary(&self) -> String {
        let last = self
            .trajectory
            .generations
            .last()
            .expect("runs have at least one generation");
        let share_sum = self.final_shares.0 + self.final_shares.1 + self.final_shares.2;
        let fitness_of = |label: &str| {
            last.strata
                .iter()
                .find(|s| s.label == label)
                .map(|s| s.mean_fitness)
                .unwrap_or(0.0)
        };
        let mut out = String::new();
        out.push_str(&format!(
            "invasion experiment: resident gamma={} invader gamma={} invader fraction={}\n",
            sig9(self.resident_gamma),
            sig9(self.invader_gamma),
            sig9(self.invader_fraction)
        ));
        out.push_str(&format!(
            "initial shares: resident={} invader={}\n",
            sig9(self.initial_shares.0),
            sig9(self.initial_shares.1)
        ));
        out.push_str(&format!(
            "final shares: resident={} invader={} other={} (sum={})\n",
            sig9(self.final_shares.0),
            sig9(self.final_shares.1),
            sig9(self.final_shares.2),
            sig9(share_sum)
        ));
        out.push_str(&format!(
            "final mean fitness: resident={} invader={}\n",
            sig9(fitness_of(RESIDENT)),
            sig9(fitness_of(INVADER))
        ));
        out.push_str(&format!("invader share grew: {}\n", self.invader_grew));
        out
    }
}

/// Seed a resident population with a minority of invaders and report how the
/// strata fare. The init distribution of `config` is replaced by the
/// two-point mix described by the arguments.
pub fn invasion_experiment(
    resident_gamma: f64,
    invader_gamma: f64,
    invader_fraction: f64,
    config: &EvolveConfig,
) -> Result<InvasionResult, EvolveError> {
    let mut config = config.clone();
    config.init = InitDistribution::TwoPoint {
        resident_gamma,
        invader_gamma,
        invader_fraction,
    };
    let trajectory = run(&config)?;

    let share = |stats: &GenerationStats, label: &str| {
        stats
            .strata
            .iter()
            .find(|s| s.label == label)
            .map(|s| s.share)
            .unwrap_or(0.0)
    };
    let first = trajectory
        .generations
        .first()
        .expect("at least one generation");
    let last = trajectory
        .generations
        .last()
        .expect("at least one generation");
    let initial_shares = (share(first, RESIDENT), share(first, INVADER));
    let final_shares = (
        share(last, RESIDENT),
        share(last, INVADER),
        share(last, OTHER),
    );
    Ok(InvasionResult {
        resident_gamma,
        invader_gamma,
        invader_fraction,
        invader_grew: final_shares.1 > initial_shares.1,
        trajectory,
        initial_shares,
        final_shares,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::prisoners_dilemma;

    fn builtin_pd() -> Game {
        prisoners_dilemma(6.0, 0.0, 10.0, 1.0)
    }

    fn config(init: InitDistribution, size: usize, gens: u32, seed: u64) -> EvolveConfig {
        EvolveConfig::new(builtin_pd(), init, size, gens, seed)
    }

    #[test]
    fn point_mass_init() {
        let cfg = config(InitDistribution::PointMass { gamma: 0.0 }, 100, 1, 1);
        let pop = init_population(&cfg).unwrap();
        assert_eq!(pop.agents().len(), 100);
        assert!(pop.agents().iter().all(|a| a.gamma == 0.0));
    }

    #[test]
    fn two_point_init_uses_largest_remainder() {
        let cfg = config(
            InitDistribution::TwoPoint {
                resident_gamma: 1.0,
                invader_gamma: 0.0,
                invader_fraction: 0.1,
            },
            100,
            1,
            1,
        );
        let pop = init_population(&cfg).unwrap();
        let invaders = pop.agents().iter().filter(|a| a.gamma == 0.0).count();
        assert_eq!(invaders, 10);
        assert_eq!(pop.agents().len(), 100);
        // Leftover seat goes to the larger fractional part: 7 * 0.25 = 1.75
        // invaders vs 5.25 residents, so the invaders win the seat.
        let cfg = config(
            InitDistribution::TwoPoint {
                resident_gamma: 1.0,
                invader_gamma: 0.0,
                invader_fraction: 0.25,
            },
            7,
            1,
            1,
        );
        let pop = init_population(&cfg).unwrap();
        let invaders = pop.agents().iter().filter(|a| a.gamma == 0.0).count();
        assert_eq!(invaders, 2);
        assert_eq!(pop.agents().len(), 7);
    }

    #[test]
    fn uniform_init_is_deterministic_per_seed() {
        let cfg = config(InitDistribution::Uniform, 50, 1, 42);
        let a = init_population(&cfg).unwrap();
        let b = init_population(&cfg).unwrap();
        assert_eq!(a.agents(), b.agents());
        let other = config(InitDistribution::Uniform, 50, 1, 43);
        assert_ne!(a.agents(), init_population(&other).unwrap().agents());
        assert!(a.agents().iter().all(|a| (0.0..=1.0).contains(&a.gamma)));
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        assert!(matches!(
            config(InitDistribution::PointMass { gamma: 0.5 }, 1, 1, 0).validate(),
            Err(EvolveError::PopulationTooSmall { .. })
        ));
        assert!(matches!(
            config(InitDistribution::PointMass { gamma: 0.5 }, 10, 0, 0).validate(),
            Err(EvolveError::NoGenerations)
        ));
        assert!(matches!(
            config(InitDistribution::PointMass { gamma: 1.5 }, 10, 1, 0).validate(),
            Err(EvolveError::GammaOutOfRange { .. })
        ));
        let mut cfg = config(InitDistribution::PointMass { gamma: 0.5 }, 10, 1, 0);
        cfg.mutation_rate = 1.5;
        assert!(matches!(
            cfg.validate(),
            Err(EvolveError::MutationRateOutOfRange { .. })
        ));
        let mut cfg = config(InitDistribution::PointMass { gamma: 0.5 }, 10, 1, 0);
        cfg.pairing = Pairing::Assortative { rho: 2.0 };
        assert!(matches!(
            cfg.validate(),
            Err(EvolveError::BadAssortment { .. })
        ));
        let three = Game::from_payoff_rows(
            vec!["A".into(), "B".into(), "C".into()],
            vec![vec!["x".into()], vec!["x".into()], vec!["x".into()]],
            vec![vec![0.0, 0.0, 0.0]],
        )
        .unwrap();
        let cfg = EvolveConfig::new(three, InitDistribution::Uniform, 10, 1, 0);
        assert!(matches!(
            cfg.validate(),
            Err(EvolveError::NotTwoPlayerGame { players: 3 })
        ));
    }

    #[test]
    fn selfish_monoculture_never_cooperates() {
        let cfg = config(InitDistribution::PointMass { gamma: 0.0 }, 20, 10, 7);
        let trajectory = run(&cfg).unwrap();
        assert!(trajectory.generations.iter().all(|g| g.coop_freq == 0.0));
        // Defect-defect pays 1 to everyone.
        assert!(trajectory.generations.iter().all(|g| g.mean_fitness == 1.0));
    }

    #[test]
    fn empathetic_monoculture_always_cooperates() {
        let cfg = config(InitDistribution::PointMass { gamma: 1.0 }, 20, 10, 7);
        let trajectory = run(&cfg).unwrap();
        assert!(trajectory.generations.iter().all(|g| g.coop_freq == 1.0));
        assert!(trajectory.generations.iter().all(|g| g.mean_fitness == 6.0));
    }

    #[test]
    fn tie_gamma_splits_decisions_by_coin() {
        let cfg = config(
            InitDistribution::PointMass { gamma: 1.0 / 3.0 },
            100,
            50,
            11,
        );
        let trajectory = run(&cfg).unwrap();
        let mean_coop: f64 = trajectory
            .generations
            .iter()
            .map(|g| g.coop_freq)
            .sum::<f64>()
            / trajectory.generations.len() as f64;
        assert!((mean_coop - 0.5).abs() < 0.05, "mean coop {mean_coop}");
        // Not all-or-nothing: the coin really fires.
        assert!(trajectory
            .generations
            .iter()
            .any(|g| g.coop_freq > 0.0 && g.coop_freq < 1.0));
    }

    #[test]
    fn runs_are_deterministic_per_seed() {
        let cfg = config(InitDistribution::Uniform, 30, 20, 123);
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
    }

    #[test]
    fn population_size_is_conserved() {
        for update in [UpdateRule::FitnessProportional, UpdateRule::Moran] {
            let mut cfg = config(InitDistribution::Uniform, 31, 1, 5);
            cfg.update = update;
            cfg.mutation_rate = 0.5;
            let mut pop = init_population(&cfg).unwrap();
            for _ in 0..10 {
                step(&mut pop, &cfg);
                assert_eq!(pop.agents().len(), 31);
            }
        }
    }

    #[test]
    fn mutation_respects_gamma_bounds() {
        let mut cfg = config(InitDistribution::PointMass { gamma: 0.95 }, 40, 1, 9);
        cfg.mutation_rate = 1.0;
        cfg.mutation_step = 0.5;
        let mut pop = init_population(&cfg).unwrap();
        for _ in 0..20 {
            step(&mut pop, &cfg);
            assert!(pop.agents().iter().all(|a| (0.0..=1.0).contains(&a.gamma)));
        }
        // The clamp actually engages from 0.95 with step 0.5.
        assert!(pop
            .agents()
            .iter()
            .any(|a| a.gamma == 1.0 || a.gamma == 0.0));
    }

    #[test]
    fn monoculture_is_a_fixed_point_without_mutation() {
        let mut cfg = config(InitDistribution::PointMass { gamma: 0.4 }, 10, 1, 3);
        cfg.update = UpdateRule::Moran;
        let mut pop = init_population(&cfg).unwrap();
        for _ in 0..25 {
            step(&mut pop, &cfg);
        }
        assert!(pop.agents().iter().all(|a| a.gamma == 0.4));
    }

    #[test]
    fn odd_population_leaves_one_agent_out() {
        let cfg = config(InitDistribution::PointMass { gamma: 1.0 }, 5, 1, 2);
        let mut pop = init_population(&cfg).unwrap();
        let stats = step(&mut pop, &cfg);
        // Two pairs play, one agent sits out with zero fitness.
        assert_eq!(stats.coop_freq, 1.0);
        assert!((stats.mean_fitness - 6.0 * 4.0 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn assortative_pairing_is_deterministic_and_total() {
        let mut cfg = config(InitDistribution::Uniform, 20, 5, 77);
        cfg.pairing = Pairing::Assortative { rho: 0.8 };
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invasion_shares_and_fitness() {
        let cfg = config(InitDistribution::PointMass { gamma: 0.0 }, 100, 30, 7);
        let result = invasion_experiment(1.0, 0.0, 0.1, &cfg).unwrap();
        assert_eq!(result.initial_shares, (0.9, 0.1));
        let (r, i, o) = result.final_shares;
        assert!((r + i + o - 1.0).abs() < 1e-12);
        // Selfish invaders exploit empathetic residents under well-mixed
        // pairing: their mean fitness stays ahead in generation 1.
        let first = &result.trajectory.generations[0];
        let fit = |label: &str| {
            first
                .strata
                .iter()
                .find(|s| s.label == label)
                .unwrap()
                .mean_fitness
        };
        assert!(fit("invader") > fit("resident"));
        let summary = result.summary();
        assert!(summary.contains("sum=1.00000000"));
    }

    #[test]
    fn mixed_pair_pays_temptation_to_the_selfish_agent() {
        // Population of exactly one resident (gamma 1) and one invader
        // (gamma 0): the only pair is mixed, so the invader takes 10 and the
        // resident 0 every generation.
        let cfg = config(InitDistribution::PointMass { gamma: 0.0 }, 2, 1, 1);
        let result = invasion_experiment(1.0, 0.0, 0.5, &cfg).unwrap();
        let first = &result.trajectory.generations[0];
        let fit = |label: &str| {
            first
                .strata
                .iter()
                .find(|s| s.label == label)
                .unwrap()
                .mean_fitness
        };
        assert_eq!(fit("invader"), 10.0);
        assert_eq!(fit("resident"), 0.0);
        assert_eq!(first.coop_freq, 0.5);
    }

    #[test]
    fn reverse_invasion_is_reported_without_a_foregone_outcome() {
        // Empathetic invaders inside a selfish population: cooperators earn
        // 6 among themselves but 0 against residents, so who prevails
        // depends on the pairing the seed happens to draw. The experiment
        // reports shares and fitness; it does not bake in a winner.
        let cfg = config(InitDistribution::PointMass { gamma: 0.0 }, 100, 30, 7);
        let result = invasion_experiment(0.0, 1.0, 0.1, &cfg).unwrap();
        assert_eq!(result.initial_shares, (0.9, 0.1));
        let (r, i, o) = result.final_shares;
        assert!((r + i + o - 1.0).abs() < 1e-12);
        for generation in &result.trajectory.generations {
            let share_sum: f64 = generation.strata.iter().map(|s| s.share).sum();
            assert!((share_sum - 1.0).abs() < 1e-12);
        }
        assert!(result.summary().contains("invader share grew:"));
    }

    #[test]
    fn invasion_rejects_degenerate_fractions() {
        let cfg = config(InitDistribution::PointMass { gamma: 0.0 }, 10, 1, 1);
        assert!(matches!(
            invasion_experiment(1.0, 0.0, 0.0, &cfg),
            Err(EvolveError::BadInvaderFraction { .. })
        ));
        assert!(matches!(
            invasion_experiment(1.0, 0.0, 1.0, &cfg),
            Err(EvolveError::BadInvaderFraction { .. })
        ));
    }

    #[test]
    fn trajectory_csv_shape() {
        let cfg = config(InitDistribution::PointMass { gamma: 1.0 }, 10, 3, 7);
        let csv = run(&cfg).unwrap().to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "generation,coop_freq,mean_gamma,min_gamma,max_gamma"
        );
        assert_eq!(csv.lines().count(), 4);
        let result = invasion_experiment(1.0, 0.0, 0.2, &cfg).unwrap();
        let csv = result.trajectory.to_csv();
        assert!(csv.starts_with(
            "generation,coop_freq,mean_gamma,min_gamma,max_gamma,\
             share_resident,mean_fitness_resident,share_invader,mean_fitness_invader,\
             share_other,mean_fitness_other"
        ));
    }
}
