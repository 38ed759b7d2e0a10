use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use tupa::oracle::Oracle;
use tupa::perceptron::TrainConfig;
use tupa::{oracle_parse, train, upper_bound, Extractor, ParserState};
use tupa_bench::{corpus, sentences};

fn oracle(c: &mut Criterion) {
    let small = corpus(50, 3, 12, 1);
    let large = corpus(10, 20, 30, 2);
    c.bench_function("oracle_parse/50x3-12", |b| {
        b.iter(|| {
            small
                .iter()
                .map(|g| oracle_parse(black_box(g)).map(|r| r.0.len()).unwrap_or(0))
                .sum::<usize>()
        })
    });
    c.bench_function("oracle_parse/10x20-30", |b| {
        b.iter(|| {
            large
                .iter()
                .map(|g| oracle_parse(black_box(g)).map(|r| r.0.len()).unwrap_or(0))
                .sum::<usize>()
        })
    });
}

fn features(c: &mut Criterion) {
    // every state along the oracle paths of a small corpus
    let mut states = Vec::new();
    for g in corpus(20, 5, 15, 3) {
        let Ok(mut o) = Oracle::new(&g) else { continue };
        let Ok((seq, _)) = o.parse() else { continue };
        let mut s = ParserState::new(&g.tokens);
        for t in seq {
            states.push(s.clone());
            s.apply(t).unwrap();
        }
    }
    let ex = Extractor::new();
    c.bench_function(&format!("extract/{}-states", states.len()), |b| {
        b.iter(|| {
            states
                .iter()
                .map(|s| ex.extract(black_box(s)).keys.len())
                .sum::<usize>()
        })
    });
}

fn learning(c: &mut Criterion) {
    let gold = corpus(30, 5, 15, 4);
    let one_epoch = TrainConfig {
        epochs: 1,
        min_update: 1,
        ..TrainConfig::default()
    };
    c.bench_function("train/1-epoch-30", |b| {
        b.iter(|| train(black_box(&gold), &one_epoch).unwrap().n_features())
    });
    let model = train(
        &gold,
        &TrainConfig {
            epochs: 5,
            ..TrainConfig::default()
        },
    )
    .unwrap();
    let input = sentences(&gold);
    c.bench_function("parse/30", |b| {
        b.iter_batched(
            || input.clone(),
            |s| model.parse_all(&s, 20, 1).unwrap().len(),
            BatchSize::SmallInput,
        )
    });
    c.bench_function("upper_bound/30", |b| {
        b.iter(|| upper_bound(black_box(&gold)).unwrap().primary.matched)
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = oracle, features, learning
}
criterion_main!(benches);
