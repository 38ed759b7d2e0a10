//! Corpus statistics in the style of the UCCA corpus tables. The root node
//! and the edges incident to it are not counted.

use std::fmt;

use crate::error::Result;
use crate::graph::Dag;
use crate::Graph;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StatsReport {
    pub sentences: usize,
    pub tokens: usize,
    pub nodes: usize,
    pub terminals: usize,
    pub non_terminals: usize,
    /// Nodes whose primary yield is not contiguous.
    pub discontinuous: usize,
    /// Nodes with more than one parent.
    pub reentrant: usize,
    pub edges: usize,
    pub primary: usize,
    pub remote: usize,
    /// Outgoing edges of non-terminals (the mean's numerator).
    pub children: usize,
}

impl StatsReport {
    fn frac(part: usize, whole: usize) -> Option<f64> {
        (whole > 0).then(|| part as f64 / whole as f64)
    }

    pub fn pct_terminal(&self) -> Option<f64> {
        Self::frac(self.terminals, self.nodes)
    }
    pub fn pct_non_terminal(&self) -> Option<f64> {
        Self::frac(self.non_terminals, self.nodes)
    }
    pub fn pct_discontinuous(&self) -> Option<f64> {
        Self::frac(self.discontinuous, self.nodes)
    }
    pub fn pct_reentrant(&self) -> Option<f64> {
        Self::frac(self.reentrant, self.nodes)
    }
    pub fn pct_primary(&self) -> Option<f64> {
        Self::frac(self.primary, self.edges)
    }
    pub fn pct_remote(&self) -> Option<f64> {
        Self::frac(self.remote, self.edges)
    }
    pub fn mean_children(&self) -> Option<f64> {
        Self::frac(self.children, self.non_terminals)
    }
}

pub fn corpus_stats(graphs: &[Graph]) -> Result<StatsReport> {
    let mut r = StatsReport::default();
    for g in graphs {
        let dag = Dag::from_graph(g)?;
        r.sentences += 1;
        r.tokens += g.tokens.len();
        for u in 1..dag.len() {
            r.nodes += 1;
            if dag.is_terminal(u) {
                r.terminals += 1;
            } else {
                r.non_terminals += 1;
                r.children += dag.children(u).len();
            }
            let y = dag.primary_yield(u);
            if let (Some(a), Some(b)) = (y.first(), y.last()) {
                if b - a + 1 != y.len() {
                    r.discontinuous += 1;
                }
            }
            if dag.parents(u).len() > 1 {
                r.reentrant += 1;
            }
        }
        for (_, a) in dag.edges().filter(|(p, _)| *p != 0) {
            r.edges += 1;
            if a.remote {
                r.remote += 1;
            } else {
                r.primary += 1;
            }
        }
    }
    Ok(r)
}

fn pct(x: Option<f64>) -> String {
    x.map(|v| format!("{:.1}%", 100.0 * v)).unwrap_or_else(|| "--".into())
}

impl fmt::Display for StatsReport {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        writeln!(f, "sentences\t{}", self.sentences)?;
        writeln!(f, "tokens\t{}", self.tokens)?;
        writeln!(f, "nodes\t{}", self.nodes)?;
        writeln!(f, "terminal\t{}\t{}", self.terminals, pct(self.pct_terminal()))?;
        writeln!(
            f,
            "non-terminal\t{}\t{}",
            self.non_terminals,
            pct(self.pct_non_terminal())
        )?;
        writeln!(
            f,
            "discontinuous\t{}\t{}",
            self.discontinuous,
            pct(self.pct_discontinuous())
        )?;
        writeln!(f, "reentrant\t{}\t{}", self.reentrant, pct(self.pct_reentrant()))?;
        writeln!(f, "edges\t{}", self.edges)?;
        writeln!(f, "primary\t{}\t{}", self.primary, pct(self.pct_primary()))?;
        writeln!(f, "remote\t{}\t{}", self.remote, pct(self.pct_remote()))?;
        write!(
            f,
            "children/non-terminal\t{}",
            self.mean_children()
                .map(|m| format!("{m:.2}"))
                .unwrap_or_else(|| "--".into())
        )
    }
}
