//! Transition-based parsing of UCCA graphs.
//!
//! The crate covers the graph model ([`graph`]), the transition system
//! ([`transition`]), a dynamic oracle ([`oracle`]), sparse features
//! ([`features`]) and an averaged perceptron ([`perceptron`]), conversions to
//! and from bilexical graphs ([`convert`]) and the labeled edge-yield
//! evaluation ([`eval`]), corpus statistics ([`stats`]) and file formats
//! ([`io`]).

pub mod convert;
pub mod error;
pub mod eval;
pub mod features;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod label;
pub mod oracle;
pub mod perceptron;
pub mod stats;
pub mod synth;
pub mod transition;

pub use convert::{from_bilexical, to_bilexical, to_tree, upper_bound, BiArc, BilexicalGraph};
pub use error::{Error, Result};
pub use eval::{score, score_corpus, Counts, ScoreReport};
pub use features::{Extractor, FeatureVector};
pub use graph::{Dag, Edge, Graph, Node, NodeKind, Token, Violation};
pub use label::Label;
pub use oracle::{oracle_parse, Alignment, Oracle};
pub use perceptron::{train, Model, TrainConfig};
pub use stats::{corpus_stats, StatsReport};
pub use transition::{run_sequence, Condition, ParserState, Transition};
