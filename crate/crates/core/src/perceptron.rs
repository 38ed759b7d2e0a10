//! Averaged structured perceptron with MinUpdate pruning, and the greedy
//! training and parsing loops around it.

use std::collections::BTreeSet;
use std::io::{Read, Write};

use fnv::FnvHashMap;
use log::{info, warn};
use rand::seq::{IteratorRandom, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{Extractor, FeatureVector, HASH_BITS, RATIO_KEY};
use crate::graph::{build, Graph, Token};
use crate::label::Label;
use crate::oracle::{preferred, Oracle};
use crate::transition::{ParserState, Transition, DEFAULT_CAP_FACTOR};

const MAGIC: &[u8; 4] = b"TUPM";
const VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct TrainConfig {
    pub epochs: usize,
    pub min_update: u64,
    pub lr: f64,
    pub decay: f64,
    pub seed: u64,
    pub cap_factor: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 19,
            min_update: 5,
            lr: 1.0,
            decay: 0.1,
            seed: 0,
            cap_factor: DEFAULT_CAP_FACTOR,
        }
    }
}

/// Ids index into [`Transition::all`].
fn transition_ids() -> FnvHashMap<Transition, u32> {
    Transition::all()
        .into_iter()
        .enumerate()
        .map(|(i, t)| (t, i as u32))
        .collect()
}

/// A finalized (or hand-built) linear model.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Model {
    weights: FnvHashMap<u64, Vec<(u32, f64)>>,
    /// Transitions the model may predict, sorted by id.
    inventory: Vec<Transition>,
    pub epochs: u32,
    pub seed: u64,
}

impl Model {
    pub fn empty() -> Model {
        Model::default()
    }

    pub fn set_weight(&mut self, key: u64, t: Transition, w: f64) {
        let id = transition_ids()[&t];
        let row = self.weights.entry(key).or_default();
        match row.iter_mut().find(|(i, _)| *i == id) {
            Some(cell) => cell.1 = w,
            None => row.push((id, w)),
        }
        row.sort_by_key(|c| c.0);
        self.add_to_inventory(t);
    }

    fn add_to_inventory(&mut self, t: Transition) {
        if let Err(i) = self
            .inventory
            .binary_search_by_key(&transition_ids()[&t], |x| transition_ids()[x])
        {
            self.inventory.insert(i, t);
        }
    }

    pub fn inventory(&self) -> &[Transition] {
        &self.inventory
    }

    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    /// Every (key, transition id, weight) triple, sorted.
    pub fn triples(&self) -> Vec<(u64, u32, f64)> {
        let mut out: Vec<(u64, u32, f64)> = self
            .weights
            .iter()
            .flat_map(|(&k, row)| row.iter().map(move |&(i, w)| (k, i, w)))
            .collect();
        out.sort_by_key(|a| (a.0, a.1));
        out
    }

    pub fn score(&self, fv: &FeatureVector) -> FnvHashMap<u32, f64> {
        let mut out = FnvHashMap::default();
        for k in &fv.keys {
            for &(i, w) in self.weights.get(k).map(Vec::as_slice).unwrap_or_default() {
                *out.entry(i).or_insert(0.0) += w;
            }
        }
        for &(i, w) in self.weights.get(&RATIO_KEY).map(Vec::as_slice).unwrap_or_default() {
            *out.entry(i).or_insert(0.0) += w * fv.ratio;
        }
        out
    }

    pub fn predict(&self, state: &ParserState, fv: &FeatureVector) -> Result<Transition> {
        let scores = self.score(fv);
        let ids = transition_ids();
        predict_with(state, &self.inventory, |t| scores.get(&ids[&t]).copied().unwrap_or(0.0))
    }

    /// Greedy parse; `None` if the action cap was hit or no move is legal.
    pub fn parse(&self, extractor: &Extractor, tokens: &[Token], cap_factor: usize, id: &str) -> Result<Option<Graph>> {
        self.parse_traced(extractor, tokens, cap_factor, id, |_, _| {})
    }

    /// [`Model::parse`], calling `on_step` with each state and the move chosen in it.
    pub fn parse_traced(
        &self,
        extractor: &Extractor,
        tokens: &[Token],
        cap_factor: usize,
        id: &str,
        mut on_step: impl FnMut(&ParserState, Transition),
    ) -> Result<Option<Graph>> {
        let mut state = ParserState::with_cap_factor(tokens, cap_factor);
        while !state.is_terminal() {
            let fv = extractor.extract(&state);
            let t = match self.predict(&state, &fv) {
                Ok(t) => t,
                Err(Error::Stuck(_)) => return Ok(None),
                Err(e) => return Err(e),
            };
            on_step(&state, t);
            match state.apply(t) {
                Ok(()) => {}
                Err(Error::ActionCap(_)) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        Ok(Some(state.completed_graph(id)))
    }

    /// Parses every sentence, falling back to a flat graph when a parse does not finish.
    /// Output order follows input order.
    pub fn parse_all(&self, sentences: &[(String, Vec<Token>)], cap_factor: usize, jobs: usize) -> Result<Vec<Graph>> {
        let extractor = Extractor::new();
        let run = || {
            sentences
                .par_iter()
                .map(|(id, toks)| {
                    Ok(match self.parse(&extractor, toks, cap_factor, id)? {
                        Some(g) => g,
                        None => {
                            warn!("{id}: parse did not finish, emitting flat graph");
                            flat_graph(id, toks)
                        }
                    })
                })
                .collect::<Result<Vec<Graph>>>()
        };
        if jobs == 0 {
            return run();
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Model(e.to_string()))?
            .install(run)
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(1u64 << HASH_BITS).to_le_bytes())?;
        w.write_all(&self.epochs.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        let strs = |w: &mut W, items: Vec<String>| -> Result<()> {
            w.write_all(&(items.len() as u32).to_le_bytes())?;
            for s in items {
                w.write_all(&(s.len() as u32).to_le_bytes())?;
                w.write_all(s.as_bytes())?;
            }
            Ok(())
        };
        strs(w, Label::ALL.iter().map(|l| l.to_string()).collect())?;
        let ids = transition_ids();
        w.write_all(&(self.inventory.len() as u32).to_le_bytes())?;
        for t in &self.inventory {
            w.write_all(&ids[t].to_le_bytes())?;
            let s = t.to_string();
            w.write_all(&(s.len() as u32).to_le_bytes())?;
            w.write_all(s.as_bytes())?;
        }
        let triples = self.triples();
        w.write_all(&(triples.len() as u64).to_le_bytes())?;
        for (k, i, x) in triples {
            w.write_all(&k.to_le_bytes())?;
            w.write_all(&i.to_le_bytes())?;
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.write_to(&mut out).expect("writing to memory");
        out
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Model> {
        let bad = |field: &str, msg: String| Error::Model(format!("{field}: {msg}"));
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|e| bad("magic", e.to_string()))?;
        if &magic != MAGIC {
            return Err(bad("magic", format!("expected TUPM, found {magic:?}")));
        }
        let version = read_u32(r, "version")?;
        if version != VERSION {
            return Err(bad("version", format!("unsupported version {version}")));
        }
        let hash = read_u64(r, "hash-space size")?;
        if hash != 1u64 << HASH_BITS {
            return Err(bad(
                "hash-space size",
                format!("model uses {hash}, parser uses {}", 1u64 << HASH_BITS),
            ));
        }
        let epochs = read_u32(r, "epochs")?;
        let seed = read_u64(r, "seed")?;
        let n_labels = read_u32(r, "label inventory")?;
        let mut labels = Vec::new();
        for _ in 0..n_labels {
            labels.push(read_str(r, "label inventory")?);
        }
        let ours: Vec<String> = Label::ALL.iter().map(|l| l.to_string()).collect();
        if labels != ours {
            return Err(bad("label inventory", format!("model has {labels:?}")));
        }
        let all = Transition::all();
        let n_trans = read_u32(r, "transition inventory")?;
        let mut inventory = Vec::new();
        for _ in 0..n_trans {
            let id = read_u32(r, "transition inventory")?;
            let name = read_str(r, "transition inventory")?;
            match all.get(id as usize) {
                Some(t) if t.to_string() == name => inventory.push(*t),
                _ => return Err(bad("transition inventory", format!("id {id} is not {name}"))),
            }
        }
        let n = read_u64(r, "weights")?;
        let mut weights: FnvHashMap<u64, Vec<(u32, f64)>> = FnvHashMap::default();
        for _ in 0..n {
            let k = read_u64(r, "weights")?;
            let i = read_u32(r, "weights")?;
            let x = f64::from_le_bytes(read_array(r, "weights")?);
            if i as usize >= all.len() {
                return Err(bad("weights", format!("transition id {i} out of range")));
            }
            weights.entry(k).or_default().push((i, x));
        }
        Ok(Model {
            weights,
            inventory,
            epochs,
            seed,
        })
    }

    pub fn from_bytes(mut bytes: &[u8]) -> Result<Model> {
        Model::read_from(&mut bytes)
    }
}

fn read_array<R: Read, const N: usize>(r: &mut R, field: &str) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Model(format!("{field}: {e}")))?;
    Ok(buf)
}

fn read_u32<R: Read>(r: &mut R, field: &str) -> Result<u32> {
    read_array(r, field).map(u32::from_le_bytes)
}

fn read_u64<R: Read>(r: &mut R, field: &str) -> Result<u64> {
    read_array(r, field).map(u64::from_le_bytes)
}

fn read_str<R: Read>(r: &mut R, field: &str) -> Result<String> {
    let n = read_u32(r, field)? as usize;
    if n > 1 << 16 {
        return Err(Error::Model(format!("{field}: string of length {n}")));
    }
    let mut buf = vec![0u8; n];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Model(format!("{field}: {e}")))?;
    String::from_utf8(buf).map_err(|e| Error::Model(format!("{field}: {e}")))
}

/// Argmax over legal members of `inventory` (all legal transitions if none
/// is), ties broken by the oracle's preference order.
fn predict_with(
    state: &ParserState,
    inventory: &[Transition],
    score: impl Fn(Transition) -> f64,
) -> Result<Transition> {
    let mut legal: Vec<Transition> = inventory.iter().copied().filter(|&t| state.is_legal(t)).collect();
    if legal.is_empty() {
        legal = state.legal_transitions();
    }
    let best = legal.iter().map(|&t| score(t)).fold(f64::NEG_INFINITY, f64::max);
    let top: Vec<Transition> = legal.into_iter().filter(|&t| score(t) == best).collect();
    preferred(&top).ok_or(Error::Stuck(state.history().len()))
}

/// All tokens directly under the root with label H.
pub fn flat_graph(id: &str, tokens: &[Token]) -> Graph {
    let edges: Vec<(u32, u32, Label, bool)> = (1..=tokens.len() as u32).map(|i| (0, i, Label::H, false)).collect();
    build(id, tokens.to_vec(), &edges)
}

#[derive(Clone, Copy, Debug, Default)]
struct Cell {
    w: f64,
    sum: f64,
    stamp: u64,
}

/// Training-time weights with lazy averaging.
#[derive(Default)]
struct Trainer {
    cells: FnvHashMap<u64, Vec<(u32, Cell)>>,
    counts: FnvHashMap<u64, u64>,
    /// Decisions seen so far.
    time: u64,
    inventory: BTreeSet<u32>,
}

impl Trainer {
    fn score(&self, fv: &FeatureVector, id: u32) -> f64 {
        let get = |k: &u64| {
            self.cells
                .get(k)
                .and_then(|row| row.iter().find(|c| c.0 == id))
                .map(|c| c.1.w)
                .unwrap_or(0.0)
        };
        fv.keys.iter().map(get).sum::<f64>() + get(&RATIO_KEY) * fv.ratio
    }

    fn bump(&mut self, key: u64, id: u32, delta: f64) {
        let row = self.cells.entry(key).or_default();
        let cell = match row.iter().position(|c| c.0 == id) {
            Some(i) => &mut row[i].1,
            None => {
                row.push((
                    id,
                    Cell {
                        stamp: self.time,
                        ..Cell::default()
                    },
                ));
                &mut row.last_mut().unwrap().1
            }
        };
        cell.sum += cell.w * (self.time - cell.stamp) as f64;
        cell.stamp = self.time;
        cell.w += delta;
    }

    fn update(&mut self, fv: &FeatureVector, good: u32, bad: u32, lr: f64) {
        for &k in &fv.keys {
            self.bump(k, good, lr);
            self.bump(k, bad, -lr);
            *self.counts.entry(k).or_default() += 1;
        }
        if fv.ratio != 0.0 {
            self.bump(RATIO_KEY, good, lr * fv.ratio);
            self.bump(RATIO_KEY, bad, -lr * fv.ratio);
            *self.counts.entry(RATIO_KEY).or_default() += 1;
        }
    }

    fn finalize(self, min_update: u64, epochs: u32, seed: u64) -> Model {
        let all = Transition::all();
        let t = self.time;
        let mut weights = FnvHashMap::default();
        for (k, row) in self.cells {
            if self.counts.get(&k).copied().unwrap_or(0) < min_update || t == 0 {
                continue;
            }
            let mut avg: Vec<(u32, f64)> = row
                .into_iter()
                .map(|(i, c)| (i, (c.sum + c.w * (t - c.stamp) as f64) / t as f64))
                .filter(|&(_, w)| w != 0.0)
                .collect();
            avg.sort_by_key(|c| c.0);
            if !avg.is_empty() {
                weights.insert(k, avg);
            }
        }
        Model {
            weights,
            inventory: self.inventory.into_iter().map(|i| all[i as usize]).collect(),
            epochs,
            seed,
        }
    }
}

/// Per-epoch training statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub decisions: u64,
    pub errors: u64,
    pub lr: f64,
}

/// Trains an averaged perceptron on gold graphs.
pub fn train(corpus: &[Graph], cfg: &TrainConfig) -> Result<Model> {
    train_with(corpus, cfg, |_| {}, |_, _| {})
}

/// [`train`] with a per-epoch callback and a per-decision hook receiving the
/// current (unaveraged) weight of every touched (key, id) pair.
fn train_with(
    corpus: &[Graph],
    cfg: &TrainConfig,
    mut on_epoch: impl FnMut(&EpochStats),
    mut on_step: impl FnMut(u64, &dyn Fn() -> Vec<((u64, u32), f64)>),
) -> Result<Model> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let ids = transition_ids();
    let extractor = Extractor::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut oracles: Vec<Option<Oracle>> = corpus
        .iter()
        .map(|g| match Oracle::with_cap_factor(g, cfg.cap_factor) {
            Ok(o) => Some(o),
            Err(e) => {
                warn!("{}: skipped ({e})", g.id);
                None
            }
        })
        .collect();
    let mut trainer = Trainer::default();
    let mut lr = cfg.lr;
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut stats = EpochStats {
            epoch: epoch + 1,
            decisions: 0,
            errors: 0,
            lr,
        };
        for &s in &order {
            let gold = &corpus[s];
            let Some(oracle) = oracles[s].as_mut() else { continue };
            let mut state = ParserState::with_cap_factor(&gold.tokens, cfg.cap_factor);
            let mut align = oracle.alignment();
            while !state.is_terminal() {
                let optimal = match oracle.optimal(&state, &align) {
                    Ok(o) => o,
                    Err(e) => {
                        warn!("{}: abandoned at step {} ({e})", gold.id, state.history().len());
                        break;
                    }
                };
                for t in &optimal {
                    trainer.inventory.insert(ids[t]);
                }
                let inventory: Vec<Transition> = trainer
                    .inventory
                    .iter()
                    .map(|&i| Transition::all()[i as usize])
                    .collect();
                let fv = extractor.extract(&state);
                let predicted = predict_with(&state, &inventory, |t| trainer.score(&fv, ids[&t]))?;
                stats.decisions += 1;
                let next = if optimal.contains(&predicted) {
                    predicted
                } else {
                    stats.errors += 1;
                    let best = optimal
                        .iter()
                        .copied()
                        .map(|t| (trainer.score(&fv, ids[&t]), t))
                        .fold(None, |acc: Option<(f64, Transition)>, (sc, t)| match acc {
                            Some((b, _)) if b >= sc => acc,
                            _ => Some((sc, t)),
                        })
                        .unwrap()
                        .1;
                    trainer.update(&fv, ids[&best], ids[&predicted], lr);
                    *optimal.iter().choose(&mut rng).unwrap()
                };
                trainer.time += 1;
                on_step(trainer.time, &|| {
                    trainer
                        .cells
                        .iter()
                        .flat_map(|(&k, row)| row.iter().map(move |&(i, c)| ((k, i), c.w)))
                        .collect()
                });
                if let Err(e) = oracle.advance(&mut state, &mut align, next) {
                    warn!("{}: abandoned at step {} ({e})", gold.id, state.history().len());
                    break;
                }
            }
        }
        info!(
            "epoch {}: {} decisions, error rate {:.4}, lr {}",
            stats.epoch,
            stats.decisions,
            if stats.decisions == 0 {
                0.0
            } else {
                stats.errors as f64 / stats.decisions as f64
            },
            lr
        );
        on_epoch(&stats);
        lr *= cfg.decay;
    }
    Ok(trainer.finalize(cfg.min_update, cfg.epochs as u32, cfg.seed))
}

/// [`train`] reporting per-epoch statistics.
pub fn train_verbose(corpus: &[Graph], cfg: &TrainConfig, on_epoch: impl FnMut(&EpochStats)) -> Result<Model> {
    train_with(corpus, cfg, on_epoch, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::label::Label::*;
    use crate::transition::Transition::*;

    fn fig1() -> Vec<Graph> {
        vec![fixtures::graduation(), fixtures::gave_up(), fixtures::john_mary()]
    }

    #[test]
    fn zero_model_forced_moves() {
        let toks = vec![Token::bare("a"), Token::bare("b")];
        let s = ParserState::new(&toks);
        let ex = Extractor::new();
        let m = Model::empty();
        assert_eq!(m.predict(&s, &ex.extract(&s)).unwrap(), Shift);
        let mut s = ParserState::new(&[]);
        assert_eq!(m.predict(&s, &ex.extract(&s)).unwrap(), Finish);
        s.apply(Finish).unwrap();
        assert!(Model::empty().score(&ex.extract(&s)).is_empty());
    }

    #[test]
    fn one_hot_score() {
        let mut m = Model::empty();
        m.set_weight(7, RightEdge(A), 2.0);
        let fv = FeatureVector {
            keys: vec![7],
            ratio: 0.5,
        };
        let ids = transition_ids();
        let sc = m.score(&fv);
        assert_eq!(sc.get(&ids[&RightEdge(A)]), Some(&2.0));
        assert_eq!(sc.len(), 1);
        let fv2 = FeatureVector {
            keys: vec![7, 9],
            ratio: 0.5,
        };
        assert_eq!(m.score(&fv2), sc);
    }

    #[test]
    fn ratio_weight_scales() {
        let mut m = Model::empty();
        m.set_weight(RATIO_KEY, Shift, 4.0);
        let sc = m.score(&FeatureVector {
            keys: vec![],
            ratio: 0.25,
        });
        assert_eq!(sc[&transition_ids()[&Shift]], 1.0);
    }

    #[test]
    fn overfits_figure_graphs() {
        let corpus = fig1();
        let cfg = TrainConfig {
            epochs: 50,
            decay: 1.0,
            min_update: 1,
            seed: 1,
            ..TrainConfig::default()
        };
        let m = train(&corpus, &cfg).unwrap();
        let ex = Extractor::new();
        for g in &corpus {
            let p = m
                .parse(&ex, &g.tokens, DEFAULT_CAP_FACTOR, &g.id)
                .unwrap()
                .expect("within cap");
            let r = crate::eval::score_with(&p, g, false).unwrap();
            assert_eq!(r.primary.matched, r.primary.gold, "{}: {r}", g.id);
            assert_eq!(r.primary.predicted, r.primary.gold, "{}: {r}", g.id);
            assert_eq!(r.remote.matched, r.remote.gold, "{}: {r}", g.id);
        }
    }

    #[test]
    fn unbounded_min_update_gives_empty_model() {
        let cfg = TrainConfig {
            epochs: 2,
            min_update: u64::MAX,
            ..TrainConfig::default()
        };
        let m = train(&fig1(), &cfg).unwrap();
        assert_eq!(m.n_features(), 0);
        let ex = Extractor::new();
        for g in fig1() {
            let _ = m.parse(&ex, &g.tokens, DEFAULT_CAP_FACTOR, &g.id).unwrap();
        }
    }

    #[test]
    fn empty_corpus_is_an_error() {
        assert!(matches!(train(&[], &TrainConfig::default()), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn single_sentence_updates_are_integral() {
        let cfg = TrainConfig {
            epochs: 1,
            min_update: 0,
            ..TrainConfig::default()
        };
        let mut seen = Vec::new();
        train_with(&[fixtures::graduation()], &cfg, |_| {}, |_, w| seen.extend(w())).unwrap();
        assert!(!seen.is_empty());
        for ((k, _), w) in seen {
            if k != RATIO_KEY {
                assert_eq!(w.fract(), 0.0, "{w}");
            }
        }
    }

    /// Averages by snapshotting every weight after every decision.
    #[test]
    fn lazy_average_matches_snapshots() {
        let cfg = TrainConfig {
            epochs: 3,
            min_update: 0,
            decay: 0.5,
            seed: 5,
            ..TrainConfig::default()
        };
        let mut sums: FnvHashMap<(u64, u32), f64> = FnvHashMap::default();
        let mut steps = 0u64;
        let m = train_with(
            &fig1(),
            &cfg,
            |_| {},
            |t, w| {
                steps = t;
                for (k, x) in w() {
                    *sums.entry(k).or_default() += x;
                }
            },
        )
        .unwrap();
        let got: FnvHashMap<(u64, u32), f64> = m.triples().into_iter().map(|(k, i, w)| ((k, i), w)).collect();
        let mut n = 0;
        for (k, s) in sums {
            let want = s / steps as f64;
            let have = got.get(&k).copied().unwrap_or(0.0);
            assert!((want - have).abs() < 1e-9, "{k:?}: {want} vs {have}");
            n += 1;
        }
        assert!(n > 0);
        assert!(got.values().all(|w| *w != 0.0));
    }

    #[test]
    fn deterministic_and_round_trips() {
        let cfg = TrainConfig {
            epochs: 3,
            min_update: 1,
            seed: 7,
            ..TrainConfig::default()
        };
        let a = train(&fig1(), &cfg).unwrap().to_bytes();
        let b = train(&fig1(), &cfg).unwrap().to_bytes();
        assert_eq!(a, b);
        let m = Model::from_bytes(&a).unwrap();
        assert_eq!(m.to_bytes(), a);
        assert_eq!(m.epochs, 3);
        assert_eq!(m.seed, 7);
        assert_eq!(&a[..4], b"TUPM");
    }

    #[test]
    fn header_mismatch_names_field() {
        let mut bytes = Model::empty().to_bytes();
        bytes[8] ^= 1;
        let e = Model::from_bytes(&bytes).unwrap_err().to_string();
        assert!(e.contains("hash-space size"), "{e}");
        let e = Model::from_bytes(b"NOPE").unwrap_err().to_string();
        assert!(e.contains("magic"), "{e}");
        let mut bytes = Model::empty().to_bytes();
        bytes[4] = 9;
        assert!(Model::from_bytes(&bytes).unwrap_err().to_string().contains("version"));
    }

    #[test]
    fn scaling_preserves_predictions() {
        let cfg = TrainConfig {
            epochs: 2,
            min_update: 1,
            seed: 2,
            ..TrainConfig::default()
        };
        let m = train(&fig1(), &cfg).unwrap();
        let mut scaled = m.clone();
        for row in scaled.weights.values_mut() {
            for c in row.iter_mut() {
                c.1 *= 3.0;
            }
        }
        let ex = Extractor::new();
        for g in fig1() {
            let a = m.parse(&ex, &g.tokens, DEFAULT_CAP_FACTOR, "x").unwrap();
            let b = scaled.parse(&ex, &g.tokens, DEFAULT_CAP_FACTOR, "x").unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn cap_falls_back_to_flat_graph() {
        // Shift/Swap-happy weights never finish within a tiny cap.
        let mut m = Model::empty();
        m.set_weight(RATIO_KEY, Node(A), 100.0);
        let toks = vec![Token::bare("a"), Token::bare("b"), Token::bare("c")];
        let out = m.parse_all(&[("s".into(), toks.clone())], 1, 1).unwrap();
        assert_eq!(out[0], flat_graph("s", &toks));
        assert_eq!(crate::graph::validate(&out[0]), vec![]);
    }

    #[test]
    fn parse_all_keeps_order() {
        let sents: Vec<(String, Vec<Token>)> = fig1().into_iter().map(|g| (g.id.clone(), g.tokens.clone())).collect();
        let m = Model::empty();
        let out = m.parse_all(&sents, DEFAULT_CAP_FACTOR, 3).unwrap();
        let ids: Vec<&str> = out.iter().map(|g| g.id.as_str()).collect();
        assert_eq!(ids, ["graduation", "gave_up", "john_mary"]);
    }
}
