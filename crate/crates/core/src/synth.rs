//! Seeded random generation of valid graphs, for property tests and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{build, Dag, Graph, Token};
use crate::label::Label;

const WORDS: &[&str] = &[
    "the", "cat", "saw", "a", "dog", "and", "ran", "home", "quickly", "to", "Paris", "John", "gave", "up", "old",
    "house", "in", "winter", "she", "left",
];
const UNIT_LABELS: &[Label] = &[
    Label::A,
    Label::C,
    Label::D,
    Label::E,
    Label::P,
    Label::S,
    Label::F,
    Label::R,
];
const TOP_LABELS: &[Label] = &[Label::H, Label::A, Label::P, Label::L];

#[derive(Clone, Copy, Debug)]
pub struct SynthConfig {
    pub min_tokens: usize,
    pub max_tokens: usize,
    /// Probability that a graph receives remote edges.
    pub remote: f64,
    /// Probability that a grouping picks non-adjacent units.
    pub discontinuous: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            min_tokens: 3,
            max_tokens: 12,
            remote: 0.6,
            discontinuous: 0.5,
        }
    }
}

/// A random valid graph: units are formed by repeatedly grouping two or
/// three neighbouring (or, sometimes, scattered) units, the leftovers attach
/// to the root, and remote edges are added where they keep the graph acyclic.
pub fn random_graph<R: Rng>(rng: &mut R, cfg: &SynthConfig, id: &str) -> Graph {
    let n = rng.gen_range(cfg.min_tokens..=cfg.max_tokens);
    let tokens: Vec<Token> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.1) {
                Token::new(",", "PUNCT", "punct")
            } else {
                Token::new(WORDS.choose(rng).unwrap(), "X", "dep")
            }
        })
        .collect();
    let mut next = n as u32 + 1;
    let mut items: Vec<u32> = (1..=n as u32).collect();
    let mut edges: Vec<(u32, u32, Label, bool)> = Vec::new();
    while items.len() > 1 && rng.gen_bool(0.85) {
        let k = rng.gen_range(2..=3.min(items.len()));
        let idx: Vec<usize> = if items.len() >= 3 && rng.gen_bool(cfg.discontinuous) {
            let mut v = rand::seq::index::sample(rng, items.len(), k).into_vec();
            v.sort();
            v
        } else {
            let s = rng.gen_range(0..=items.len() - k);
            (s..s + k).collect()
        };
        let v = next;
        next += 1;
        for &j in &idx {
            edges.push((v, items[j], *UNIT_LABELS.choose(rng).unwrap(), false));
        }
        let first = idx[0];
        items = items
            .iter()
            .enumerate()
            .filter(|(j, _)| !idx.contains(j))
            .map(|(_, &x)| x)
            .collect();
        items.insert(first, v);
    }
    for &x in &items {
        edges.push((0, x, *TOP_LABELS.choose(rng).unwrap(), false));
    }
    if rng.gen_bool(cfg.remote) {
        let total = next;
        let parents: Vec<u32> = std::iter::once(0).chain(n as u32 + 1..total).collect();
        for _ in 0..rng.gen_range(1..=2) {
            let p = *parents.choose(rng).unwrap();
            let c = rng.gen_range(1..total);
            let g = build(id, tokens.clone(), &edges);
            let dag = Dag::from_graph(&g).expect("generator keeps graphs valid");
            let (pi, ci) = (index_of(&dag, p), index_of(&dag, c));
            let direct = dag.children(pi).iter().any(|a| a.node == ci);
            if c == p || dag.reaches(ci, pi) || direct {
                continue;
            }
            edges.push((p, c, Label::A, true));
        }
    }
    build(id, tokens, &edges)
}

fn index_of(dag: &Dag, id: u32) -> usize {
    (0..dag.len()).find(|&i| dag.id(i) == id).unwrap()
}

pub fn has_remote(g: &Graph) -> bool {
    g.edges.iter().any(|e| e.remote)
}

/// Whether some node has a non-contiguous primary yield.
pub fn has_discontinuity(g: &Graph) -> bool {
    let dag = Dag::from_graph(g).unwrap();
    (0..dag.len()).any(|u| {
        let y = dag.primary_yield(u);
        match (y.first(), y.last()) {
            (Some(a), Some(b)) => b - a + 1 != y.len(),
            _ => false,
        }
    })
}
