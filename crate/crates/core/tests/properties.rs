use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tupa::eval::{mutual_edges, score_with, EdgeClass};
use tupa::graph::validate;
use tupa::io::{read_graphs, write_graphs};
use tupa::oracle::Oracle;
use tupa::synth::{random_graph, SynthConfig};
use tupa::{from_bilexical, to_bilexical, to_tree, Graph};

fn graph(seed: u64, max_tokens: usize) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cfg = SynthConfig {
        max_tokens,
        ..SynthConfig::default()
    };
    random_graph(&mut rng, &cfg, &seed.to_string())
}

fn exact(p: &Graph, g: &Graph) -> bool {
    let r = score_with(p, g, false).unwrap();
    [r.primary, r.remote]
        .iter()
        .all(|c| c.matched == c.gold && c.matched == c.predicted)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_graphs_are_valid(seed in any::<u64>()) {
        let g = graph(seed, 15);
        prop_assert!(validate(&g).is_empty());
        prop_assert_eq!(read_graphs(&write_graphs(std::slice::from_ref(&g))).unwrap(), vec![g]);
    }

    /// Forcing any member of the oracle set, then following the oracle,
    /// still rebuilds the gold graph.
    #[test]
    fn oracle_sets_are_sound(seed in any::<u64>(), pick in any::<u64>()) {
        let g = graph(seed, 8);
        let mut o = Oracle::new(&g).unwrap();
        let mut state = tupa::ParserState::new(&g.tokens);
        let mut align = o.alignment();
        let mut k = pick;
        while !state.is_terminal() {
            let set = o.optimal(&state, &align).unwrap();
            prop_assert!(!set.is_empty());
            prop_assert!(set.iter().all(|&t| state.is_legal(t)));
            let t = set[(k % set.len() as u64) as usize];
            k = k.rotate_left(7) ^ 0x9e37_79b9;
            o.advance(&mut state, &mut align, t).unwrap();
        }
        prop_assert!(exact(&state.to_graph("x"), &g));
    }

    #[test]
    fn matching_is_symmetric(a in any::<u64>(), b in any::<u64>()) {
        let g = graph(a, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(b);
        let n = g.tokens.len();
        let cfg = SynthConfig { min_tokens: n, max_tokens: n, ..SynthConfig::default() };
        let mut p = random_graph(&mut rng, &cfg, "p");
        p.tokens = g.tokens.clone();
        for class in [EdgeClass::Primary, EdgeClass::Remote] {
            prop_assert_eq!(mutual_edges(&p, &g, class).unwrap(), mutual_edges(&g, &p, class).unwrap());
        }
        let tree = to_tree(&g);
        let r = score_with(&tree, &g, true).unwrap();
        prop_assert_eq!(r.primary.matched, r.primary.gold);
        prop_assert_eq!(r.remote.matched, 0);
    }

    /// Bilexical conversion always yields a valid graph over the same tokens.
    #[test]
    fn bilexical_inversion_is_valid(seed in any::<u64>()) {
        let g = graph(seed, 15);
        let bg = to_bilexical(&g).unwrap();
        prop_assert!(bg.arcs.iter().all(|a| a.head != a.dependent));
        let back = from_bilexical(&bg).unwrap();
        prop_assert!(validate(&back).is_empty(), "{:?}", validate(&back));
        prop_assert_eq!(back.tokens, g.tokens);
    }
}
