use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Trace;

/// Identifier of the generator algorithm, reported alongside seeds so runs
/// can be reproduced.
pub const PRNG_ID: &str = "chacha8";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceGenSpec {
    pub length: usize,
    pub num_vars: usize,
    /// Each random tuple is emitted this many consecutive times, so every
    /// variable has runs of at least this length.
    pub repeat: usize,
    pub seed: u64,
    /// Probability that a variable is true.
    pub density: f64,
}

impl TraceGenSpec {
    pub fn new(length: usize, seed: u64) -> TraceGenSpec {
        TraceGenSpec {
            length,
            num_vars: 10,
            repeat: 1,
            seed,
            density: 0.5,
        }
    }

    pub fn vars(mut self, n: usize) -> Self {
        self.num_vars = n;
        self
    }

    pub fn repeat(mut self, l: usize) -> Self {
        self.repeat = l;
        self
    }

    pub fn density(mut self, d: f64) -> Self {
        self.density = d;
        self
    }
}

/// Deterministic random trace over variables `s0 .. s{num_vars-1}`.
pub fn generate_random_trace(spec: &TraceGenSpec) -> Trace {
    assert!(spec.repeat >= 1, "repeat must be at least 1");
    assert!(
        (0.0..=1.0).contains(&spec.density),
        "density must lie in [0, 1]"
    );
    let vars = (0..spec.num_vars).map(|i| format!("s{i}")).collect();
    let mut trace = Trace::new(vars).expect("generated names are distinct");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut tuple = vec![false; spec.num_vars];
    for i in 0..spec.length {
        if i % spec.repeat == 0 {
            for v in tuple.iter_mut() {
                *v = rng.random_bool(spec.density);
            }
        }
        trace.push_event(&tuple).expect("tuple width matches");
    }
    trace
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_spec_gives_empty_trace() {
        let t = generate_random_trace(&TraceGenSpec::new(0, 1));
        assert!(t.is_empty());
        assert_eq!(t.variables().len(), 10);
    }

    #[test]
    fn repeat_makes_blocks() {
        for seed in 0..20 {
            let t = generate_random_trace(&TraceGenSpec::new(6, seed).vars(1).repeat(3));
            let c = t.column("s0").unwrap();
            assert!(c[0] == c[1] && c[1] == c[2] && c[3] == c[4] && c[4] == c[5]);
        }
    }

    #[test]
    fn seeded_runs_are_identical() {
        let spec = TraceGenSpec::new(1000, 42);
        assert_eq!(generate_random_trace(&spec), generate_random_trace(&spec));
        assert_ne!(
            generate_random_trace(&spec),
            generate_random_trace(&TraceGenSpec::new(1000, 43))
        );
    }

    #[test]
    fn density_is_respected() {
        let t = generate_random_trace(&TraceGenSpec::new(10_000, 3).vars(1).density(0.1));
        let ones = t.column("s0").unwrap().iter().filter(|&&b| b).count();
        assert!((700..1300).contains(&ones), "{ones}");
    }
}
