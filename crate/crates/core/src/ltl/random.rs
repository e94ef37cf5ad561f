//! Random formula generation for differential testing.

use rand::Rng;

use super::Formula;

/// Builds a random formula of depth at most `max_depth` over atoms
/// `s0 .. s{vars-1}`. Every operator is equally likely at each inner node;
/// leaves become more likely as depth runs out.
pub fn random_formula<R: Rng + ?Sized>(rng: &mut R, max_depth: usize, vars: usize) -> Formula {
    assert!(vars > 0, "need at least one variable");
    if max_depth == 0 || rng.random_ratio(1, (max_depth as u32) + 2) {
        return Formula::atom(&format!("s{}", rng.random_range(0..vars)));
    }
    let d = max_depth - 1;
    match rng.random_range(0..8) {
        0 => Formula::not(random_formula(rng, d, vars)),
        1 => Formula::next(random_formula(rng, d, vars)),
        2 => Formula::globally(random_formula(rng, d, vars)),
        3 => Formula::finally(random_formula(rng, d, vars)),
        4 => Formula::and(random_formula(rng, d, vars), random_formula(rng, d, vars)),
        5 => Formula::or(random_formula(rng, d, vars), random_formula(rng, d, vars)),
        6 => Formula::implies(random_formula(rng, d, vars), random_formula(rng, d, vars)),
        _ => Formula::until(random_formula(rng, d, vars), random_formula(rng, d, vars)),
    }
}
