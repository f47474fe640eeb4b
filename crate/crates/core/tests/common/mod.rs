//! First-principles oracles, written as plain exhaustive loops with exact
//! comparisons and kept independent of the library's analysis code.

use elastic_core::game::{Game, Outcome};

pub fn oracle_pure_nash(game: &Game) -> Vec<Outcome> {
    let mut result = Vec::new();
    for outcome in game.outcomes() {
        let mut stable = true;
        for p in 0..game.player_count() {
            let current = game.payoff_at(&outcome, p);
            for alt in 0..game.actions(p).len() {
                let mut indices = outcome.indices().to_vec();
                indices[p] = alt;
                if game.payoff_at(&Outcome::new(indices), p) > current {
                    stable = false;
                }
            }
        }
        if stable {
            result.push(outcome);
        }
    }
    result
}

pub fn oracle_pareto_frontier(game: &Game) -> Vec<Outcome> {
    let all: Vec<Outcome> = game.outcomes().collect();
    let mut result = Vec::new();
    for this in &all {
        let mut dominated = false;
        for other in &all {
            let mut weakly_better_everywhere = true;
            let mut strictly_better_somewhere = false;
            for p in 0..game.player_count() {
                let t = game.payoff_at(this, p);
                let o = game.payoff_at(other, p);
                if o < t {
                    weakly_better_everywhere = false;
                }
                if o > t {
                    strictly_better_somewhere = true;
                }
            }
            if weakly_better_everywhere && strictly_better_somewhere {
                dominated = true;
            }
        }
        if !dominated {
            result.push(this.clone());
        }
    }
    result
}

pub fn oracle_strictly_dominant(game: &Game, player: usize) -> Option<String> {
    let count = game.actions(player).len();
    for candidate in 0..count {
        let mut dominates_all = true;
        for other in 0..count {
            if other == candidate {
                continue;
            }
            for outcome in game.outcomes() {
                if outcome.indices()[player] != other {
                    continue;
                }
                let mut indices = outcome.indices().to_vec();
                indices[player] = candidate;
                let vc = game.payoff_at(&Outcome::new(indices), player);
                let vo = game.payoff_at(&outcome, player);
                if vc <= vo {
                    dominates_all = false;
                }
            }
        }
        if dominates_all {
            return Some(game.actions(player)[candidate].clone());
        }
    }
    None
}
