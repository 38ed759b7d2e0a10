//! Labeled precision, recall and F-score over edge yields, separately for
//! primary and remote edges.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::AddAssign;

use crate::error::{Error, Result};
use crate::graph::{is_punctuation, Dag, Graph};
use crate::label::Label;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeClass {
    Primary,
    Remote,
}

/// Matched, predicted and gold edge counts for one class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub matched: usize,
    pub predicted: usize,
    pub gold: usize,
}

impl Counts {
    /// `None` when nothing was predicted.
    pub fn lp(&self) -> Option<f64> {
        (self.predicted > 0).then(|| self.matched as f64 / self.predicted as f64)
    }

    /// `None` when there is nothing to find.
    pub fn lr(&self) -> Option<f64> {
        (self.gold > 0).then(|| self.matched as f64 / self.gold as f64)
    }

    /// Harmonic mean of LP and LR; an absent side counts as 0.
    pub fn lf(&self) -> f64 {
        let (p, r) = (self.lp().unwrap_or(0.0), self.lr().unwrap_or(0.0));
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    /// Neither side has edges of this class.
    pub fn is_vacuous(&self) -> bool {
        self.predicted == 0 && self.gold == 0
    }
}

impl AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.matched += o.matched;
        self.predicted += o.predicted;
        self.gold += o.gold;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScoreReport {
    pub primary: Counts,
    pub remote: Counts,
    pub punctuation_excluded: bool,
}

impl Default for ScoreReport {
    fn default() -> Self {
        ScoreReport {
            primary: Counts::default(),
            remote: Counts::default(),
            punctuation_excluded: true,
        }
    }
}

impl AddAssign for ScoreReport {
    fn add_assign(&mut self, o: ScoreReport) {
        self.primary += o.primary;
        self.remote += o.remote;
    }
}

fn pct(x: Option<f64>) -> String {
    x.map(|v| format!("{:.1}", 100.0 * v)).unwrap_or_else(|| "--".into())
}

impl fmt::Display for ScoreReport {
    /// One row in the layout Primary LP LR LF | Remote LP LR LF.
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        writeln!(
            f,
            "{:<8}{:>7}{:>7}{:>7} | {:>7}{:>7}{:>7}",
            "", "LP", "LR", "LF", "LP", "LR", "LF"
        )?;
        let row = |c: &Counts| {
            let lf = if c.is_vacuous() { None } else { Some(c.lf()) };
            format!("{:>7}{:>7}{:>7}", pct(c.lp()), pct(c.lr()), pct(lf))
        };
        writeln!(f, "{:<8}{} | {}", "", row(&self.primary), row(&self.remote))?;
        write!(
            f,
            "edges: primary {}/{}/{} remote {}/{}/{} (matched/predicted/gold)",
            self.primary.matched,
            self.primary.predicted,
            self.primary.gold,
            self.remote.matched,
            self.remote.predicted,
            self.remote.gold
        )
    }
}

/// (yield, label) of every evaluated edge of `class`. `Terminal` edges are
/// structural and never evaluated.
pub fn edge_items(g: &Graph, class: EdgeClass, exclude_punct: bool) -> Result<Vec<(BTreeSet<usize>, Label)>> {
    let dag = Dag::from_graph(g)?;
    let punct: BTreeSet<usize> = if exclude_punct {
        (1..=g.tokens.len())
            .filter(|&p| is_punctuation(&g.tokens[p - 1].form))
            .collect()
    } else {
        BTreeSet::new()
    };
    let mut out = Vec::new();
    for (_, a) in dag.edges() {
        if a.remote != (class == EdgeClass::Remote) || a.label == Label::Terminal {
            continue;
        }
        let y: BTreeSet<usize> = dag.primary_yield(a.node).difference(&punct).copied().collect();
        if !y.is_empty() {
            out.push((y, a.label));
        }
    }
    Ok(out)
}

fn check_tokens(p: &Graph, g: &Graph) -> Result<()> {
    let forms = |x: &Graph| x.tokens.iter().map(|t| t.form.clone()).collect::<Vec<_>>();
    if forms(p) != forms(g) {
        return Err(Error::TokenMismatch(format!("`{}` vs `{}`", p.id, g.id)));
    }
    Ok(())
}

/// |M|: edges matched one-to-one on equal (yield, label).
pub fn mutual_edges(p: &Graph, g: &Graph, class: EdgeClass) -> Result<usize> {
    check_tokens(p, g)?;
    Ok(count(p, g, class, true)?.matched)
}

fn count(p: &Graph, g: &Graph, class: EdgeClass, exclude_punct: bool) -> Result<Counts> {
    let (ip, ig) = (
        edge_items(p, class, exclude_punct)?,
        edge_items(g, class, exclude_punct)?,
    );
    let mut bag: HashMap<&(BTreeSet<usize>, Label), usize> = HashMap::new();
    for x in &ig {
        *bag.entry(x).or_default() += 1;
    }
    let mut matched = 0;
    for x in &ip {
        if let Some(c) = bag.get_mut(x).filter(|c| **c > 0) {
            *c -= 1;
            matched += 1;
        }
    }
    Ok(Counts {
        matched,
        predicted: ip.len(),
        gold: ig.len(),
    })
}

/// Scores a predicted graph against gold, punctuation excluded.
pub fn score(p: &Graph, g: &Graph) -> Result<ScoreReport> {
    score_with(p, g, true)
}

pub fn score_with(p: &Graph, g: &Graph, exclude_punct: bool) -> Result<ScoreReport> {
    check_tokens(p, g)?;
    Ok(ScoreReport {
        primary: count(p, g, EdgeClass::Primary, exclude_punct)?,
        remote: count(p, g, EdgeClass::Remote, exclude_punct)?,
        punctuation_excluded: exclude_punct,
    })
}

/// Micro-averaged scores over aligned (predicted, gold) pairs.
pub fn score_corpus(pairs: &[(Graph, Graph)]) -> Result<ScoreReport> {
    let mut total = ScoreReport::default();
    for (p, g) in pairs {
        total += score(p, g)?;
    }
    Ok(total)
}
