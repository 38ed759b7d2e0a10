//! Shared inputs for the criterion benchmarks in `benches/`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tupa::synth::{random_graph, SynthConfig};
use tupa::{Graph, Token};

/// `n` seeded random graphs of `min..=max` tokens.
pub fn corpus(n: usize, min: usize, max: usize, seed: u64) -> Vec<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SynthConfig {
        min_tokens: min,
        max_tokens: max,
        ..SynthConfig::default()
    };
    (0..n).map(|i| random_graph(&mut rng, &cfg, &format!("b{i}"))).collect()
}

pub fn sentences(corpus: &[Graph]) -> Vec<(String, Vec<Token>)> {
    corpus.iter().map(|g| (g.id.clone(), g.tokens.clone())).collect()
}
