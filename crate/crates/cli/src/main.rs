//! `tupa`: train, run and evaluate the transition-based UCCA parser.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use thiserror::Error;

use tupa::convert::{read_bilexical, write_bilexical};
use tupa::io::{read_graphs, read_tokenized, write_graphs};
use tupa::oracle::Oracle;
use tupa::perceptron::{train_verbose, Model, TrainConfig};
use tupa::transition::DEFAULT_CAP_FACTOR;
use tupa::{corpus_stats, from_bilexical, score_corpus, to_bilexical, to_tree, upper_bound, Extractor, Graph};

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Data { path: PathBuf, source: tupa::Error },
    #[error("{path}: graph `{id}`: {source}")]
    Graph {
        path: PathBuf,
        id: String,
        source: tupa::Error,
    },
    #[error(transparent)]
    Other(#[from] tupa::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "tupa", version, about = "Transition-based UCCA parser")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a model on gold graphs (JSON lines).
    Train(TrainArgs),
    /// Parse tokenized sentences into graphs.
    Parse(ParseArgs),
    /// Score predicted graphs against gold graphs.
    Evaluate {
        /// Predicted graphs (JSON lines).
        predicted: PathBuf,
        /// Gold graphs (JSON lines), aligned by position.
        gold: PathBuf,
    },
    /// Convert between graph, bilexical and tree formats.
    Convert {
        #[arg(value_enum)]
        direction: Direction,
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Corpus statistics (root node and root edges excluded).
    Stats { input: PathBuf },
    /// Print the oracle transition sequence of every gold graph.
    Oracle {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_CAP_FACTOR)]
        action_cap: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Direction {
    Ucca2bilex,
    Bilex2ucca,
    Ucca2tree,
    UpperBound,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Gold graphs (JSON lines).
    input: PathBuf,
    #[arg(short, long)]
    model: PathBuf,
    #[arg(long, default_value_t = 19)]
    epochs: usize,
    #[arg(long, default_value_t = 5)]
    min_update: u64,
    #[arg(long, default_value_t = 1.0)]
    lr: f64,
    #[arg(long, default_value_t = 0.1)]
    decay: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Transitions allowed per sentence, as a multiple of its length plus one.
    #[arg(long, default_value_t = DEFAULT_CAP_FACTOR)]
    action_cap: usize,
}

#[derive(Args, Debug)]
struct ParseArgs {
    /// Tokenized input: `INDEX FORM POS DEP` lines, blank line between sentences.
    input: PathBuf,
    #[arg(short, long)]
    model: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_CAP_FACTOR)]
    action_cap: usize,
    /// Worker threads; 0 picks one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Write the features fired at every decision to this file.
    #[arg(long)]
    dump_features: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.into(), source }),
        None => io::stdout().write_all(text.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn graphs(path: &Path) -> Result<Vec<Graph>> {
    read_graphs(&read(path)?).map_err(|source| CliError::Data {
        path: path.into(),
        source,
    })
}

fn positive(name: &str, v: usize) -> Result<()> {
    if v == 0 {
        return Err(CliError::Usage(format!("--{name} must be positive")));
    }
    Ok(())
}

fn train(a: &TrainArgs) -> Result<()> {
    positive("action-cap", a.action_cap)?;
    if !(a.lr.is_finite() && a.decay.is_finite()) {
        return Err(CliError::Usage("--lr and --decay must be finite".into()));
    }
    let corpus = graphs(&a.input)?;
    let cfg = TrainConfig {
        epochs: a.epochs,
        min_update: a.min_update,
        lr: a.lr,
        decay: a.decay,
        seed: a.seed,
        cap_factor: a.action_cap,
    };
    let model = train_verbose(&corpus, &cfg, |s| {
        let rate = if s.decisions == 0 {
            0.0
        } else {
            s.errors as f64 / s.decisions as f64
        };
        info!(
            "epoch {}/{}: {} decisions, error rate {rate:.4}",
            s.epoch, cfg.epochs, s.decisions
        );
    })
    .map_err(|source| CliError::Data {
        path: a.input.clone(),
        source,
    })?;
    info!(
        "{} features, {} transitions",
        model.n_features(),
        model.inventory().len()
    );
    fs::write(&a.model, model.to_bytes()).map_err(|source| CliError::Io {
        path: a.model.clone(),
        source,
    })
}

fn load_model(path: &Path) -> Result<Model> {
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.into(),
        source,
    })?;
    Model::from_bytes(&bytes).map_err(|source| CliError::Data {
        path: path.into(),
        source,
    })
}

fn parse(a: &ParseArgs) -> Result<()> {
    positive("action-cap", a.action_cap)?;
    let model = load_model(&a.model)?;
    let sentences = read_tokenized(&read(&a.input)?).map_err(|source| CliError::Data {
        path: a.input.clone(),
        source,
    })?;
    if let Some(dump) = &a.dump_features {
        let ex = Extractor::new();
        let mut out = String::new();
        for (id, toks) in &sentences {
            model.parse_traced(&ex, toks, a.action_cap, id, |state, t| {
                let fired: Vec<String> = ex
                    .fired(state)
                    .into_iter()
                    .map(|(i, v)| format!("{}={}", ex.name(i), v.replace('\u{1f}', "|")))
                    .collect();
                out.push_str(&format!("{id}\t{}\t{t}\t{}\n", state.history().len(), fired.join(" ")));
            })?;
        }
        write_out(Some(dump), &out)?;
    }
    let parsed = model.parse_all(&sentences, a.action_cap, a.jobs)?;
    write_out(a.output.as_deref(), &write_graphs(&parsed))
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::Train(a) => train(&a),
        Command::Parse(a) => parse(&a),
        Command::Evaluate { predicted, gold } => {
            let (p, g) = (graphs(&predicted)?, graphs(&gold)?);
            if p.len() != g.len() {
                let msg = format!("{} predicted graphs but {} gold graphs", p.len(), g.len());
                return Err(tupa::Error::TokenMismatch(msg).into());
            }
            let pairs: Vec<(Graph, Graph)> = p.into_iter().zip(g).collect();
            write_out(None, &format!("{}\n", score_corpus(&pairs)?))
        }
        Command::Convert {
            direction,
            input,
            output,
        } => {
            let data = |source| CliError::Data {
                path: input.clone(),
                source,
            };
            let text = match direction {
                Direction::Ucca2bilex => {
                    let bgs = graphs(&input)?
                        .iter()
                        .map(to_bilexical)
                        .collect::<tupa::Result<Vec<_>>>()
                        .map_err(data)?;
                    write_bilexical(&bgs)
                }
                Direction::Bilex2ucca => {
                    let bgs = read_bilexical(&read(&input)?).map_err(data)?;
                    write_graphs(
                        &bgs.iter()
                            .map(from_bilexical)
                            .collect::<tupa::Result<Vec<_>>>()
                            .map_err(data)?,
                    )
                }
                Direction::Ucca2tree => write_graphs(&graphs(&input)?.iter().map(to_tree).collect::<Vec<_>>()),
                Direction::UpperBound => format!("{}\n", upper_bound(&graphs(&input)?).map_err(data)?),
            };
            write_out(output.as_deref(), &text)
        }
        Command::Stats { input } => {
            let r = corpus_stats(&graphs(&input)?)?;
            write_out(None, &format!("{r}\n"))
        }
        Command::Oracle {
            input,
            output,
            action_cap,
        } => {
            positive("action-cap", action_cap)?;
            let mut text = String::new();
            for g in graphs(&input)? {
                let seq = Oracle::with_cap_factor(&g, action_cap)
                    .and_then(|mut o| o.parse())
                    .map_err(|source| CliError::Graph {
                        path: input.clone(),
                        id: g.id.clone(),
                        source,
                    })?
                    .0;
                let moves: Vec<String> = seq.iter().map(|t| t.to_string()).collect();
                text.push_str(&format!("{}\t{}\n", g.id, moves.join(" ")));
            }
            write_out(output.as_deref(), &text)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
