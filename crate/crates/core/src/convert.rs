//! Conversions between UCCA graphs, bilexical (dependency) graphs and trees.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use log::warn;

use crate::error::{Error, Result};
use crate::eval::{score, ScoreReport};
use crate::graph::{build, collapse_preterminals, is_punctuation, Dag, Graph, Token};
use crate::label::Label;

/// A labeled arc between token positions (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BiArc {
    pub head: usize,
    pub label: Label,
    pub dependent: usize,
    pub remote: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilexicalGraph {
    pub id: String,
    pub tokens: Vec<Token>,
    /// Sorted by dependent, then head.
    pub arcs: Vec<BiArc>,
    pub top: Option<usize>,
}

impl BilexicalGraph {
    pub fn new(id: &str, tokens: Vec<Token>, mut arcs: Vec<BiArc>, top: Option<usize>) -> BilexicalGraph {
        arcs.sort_by_key(|a| (a.dependent, a.head, a.label, a.remote));
        BilexicalGraph {
            id: id.to_string(),
            tokens,
            arcs,
            top,
        }
    }

    /// The block format: `#id`, token lines, arc lines, `TOP k`.
    pub fn to_block(&self) -> String {
        let mut s = format!("#{}\n", self.id);
        for (i, t) in self.tokens.iter().enumerate() {
            writeln!(s, "{} {} {} {}", i + 1, t.form, t.pos, t.dep).unwrap();
        }
        for a in &self.arcs {
            writeln!(s, "{} {} {} {}", a.head, a.dependent, a.label, a.remote as u8).unwrap();
        }
        if let Some(t) = self.top {
            writeln!(s, "TOP {t}").unwrap();
        }
        s
    }
}

/// Algorithm 1: every edge (u, v) whose child's head terminal differs from
/// the parent's becomes an arc h*(u) → h*(v) with the edge's label and flag.
pub fn to_bilexical(graph: &Graph) -> Result<BilexicalGraph> {
    let dag = Dag::from_graph(graph)?;
    let head = |u: usize| dag.head_terminal(u).ok_or(Error::NoHead(dag.id(u)));
    let mut arcs = Vec::new();
    for (u, a) in dag.edges() {
        let hv = head(a.node)?;
        let hu = head(u)?;
        if hu != hv {
            arcs.push(BiArc {
                head: hu,
                label: a.label,
                dependent: hv,
                remote: a.remote,
            });
        }
    }
    let top = if graph.tokens.is_empty() { None } else { Some(head(0)?) };
    Ok(BilexicalGraph::new(&graph.id, graph.tokens.clone(), arcs, top))
}

/// The label of the edge above an intermediate node.
pub fn label_rule(t: usize, bg: &BilexicalGraph) -> Label {
    let heads = |l: Label| bg.arcs.iter().any(|a| a.head == t && a.label == l);
    if is_punctuation(&bg.tokens[t - 1].form) {
        Label::U
    } else if heads(Label::H) {
        Label::H
    } else if heads(Label::A) {
        Label::P
    } else {
        Label::C
    }
}

fn check_range(bg: &BilexicalGraph) -> Result<()> {
    let n = bg.tokens.len();
    for a in &bg.arcs {
        if a.head == 0 || a.head > n || a.dependent == 0 || a.dependent > n || a.head == a.dependent {
            return Err(Error::Format {
                line: 0,
                msg: format!("arc {} -> {} out of range", a.head, a.dependent),
            });
        }
    }
    Ok(())
}

/// Algorithm 2 with low attachment: each token gets a pre-terminal, and a
/// token with dependents also gets a unit above it (labeled by
/// [`label_rule`]) under which its dependents' units attach. The top's unit
/// hangs from the root as H; tokens nobody heads hang from the root by
/// [`label_rule`].
///
/// Each dependent's leftmost non-remote head gives its primary edge (the
/// leftmost remote head is promoted when there is none); every other head
/// becomes a remote edge. A cycle among primary edges is an error; a remote
/// arc that would close a cycle is dropped with a warning (the bilexical
/// image of a DAG can be cyclic through its remote arcs).
pub fn from_bilexical(bg: &BilexicalGraph) -> Result<Graph> {
    let n = bg.tokens.len();
    check_range(bg)?;
    let top = match bg.top {
        Some(t) if (1..=n).contains(&t) => Some(t),
        Some(t) => {
            return Err(Error::Format {
                line: 0,
                msg: format!("top {t} out of range"),
            })
        }
        None => {
            let roots: Vec<usize> = (1..=n)
                .filter(|&t| bg.arcs.iter().any(|a| a.head == t) && !bg.arcs.iter().any(|a| a.dependent == t))
                .collect();
            match roots[..] {
                [] => None,
                [t] => Some(t),
                _ => {
                    return Err(Error::Format {
                        line: 0,
                        msg: format!("`{}` has no top and several roots", bg.id),
                    })
                }
            }
        }
    };
    // heads[t]: distinct (head, label, remote) sorted leftmost first; primary[t]: index into it
    let mut heads: Vec<Vec<BiArc>> = vec![Vec::new(); n + 1];
    let mut primary: Vec<Option<usize>> = vec![None; n + 1];
    for t in 1..=n {
        let mut hs: Vec<BiArc> = bg.arcs.iter().filter(|a| a.dependent == t).copied().collect();
        hs.sort_by_key(|a| (a.head, a.label, a.remote));
        hs.dedup();
        if Some(t) != top && !hs.is_empty() {
            primary[t] = Some(hs.iter().position(|a| !a.remote).unwrap_or_else(|| {
                warn!("{}: token {t} has only remote heads; promoting the leftmost", bg.id);
                0
            }));
        }
        heads[t] = hs;
    }
    // non-remote arcs must be acyclic, and so must the chosen primary heads
    let mut indegree = vec![0usize; n + 1];
    for a in bg.arcs.iter().filter(|a| !a.remote) {
        indegree[a.dependent] += 1;
    }
    let mut ready: Vec<usize> = (1..=n).filter(|&t| indegree[t] == 0).collect();
    let mut done = 0;
    while let Some(t) = ready.pop() {
        done += 1;
        for a in bg.arcs.iter().filter(|a| !a.remote && a.head == t) {
            indegree[a.dependent] -= 1;
            if indegree[a.dependent] == 0 {
                ready.push(a.dependent);
            }
        }
    }
    if done < n {
        return Err(Error::Cyclic(bg.id.clone()));
    }
    for t in 1..=n {
        let (mut x, mut steps) = (t, 0);
        while let Some(i) = primary[x] {
            x = heads[x][i].head;
            steps += 1;
            if steps > n {
                return Err(Error::Cyclic(bg.id.clone()));
            }
        }
    }
    let has_dependents = |t: usize| bg.arcs.iter().any(|a| a.head == t);
    let mut next = n as u32 + 1;
    let mut unit = vec![0u32; n + 1];
    let mut edges: Vec<(u32, u32, Label, bool)> = Vec::new();
    for (t, u) in unit.iter_mut().enumerate().skip(1) {
        let pre = next;
        next += 1;
        edges.push((pre, t as u32, Label::Terminal, false));
        *u = pre;
        if has_dependents(t) {
            *u = next;
            next += 1;
            edges.push((*u, pre, label_rule(t, bg), false));
        }
    }
    for t in 1..=n {
        match primary[t] {
            Some(i) => edges.push((unit[heads[t][i].head], unit[t], heads[t][i].label, false)),
            None if Some(t) == top => edges.push((0, unit[t], Label::H, false)),
            None => edges.push((0, unit[t], label_rule(t, bg), false)),
        }
    }
    let mut kids: HashMap<u32, Vec<u32>> = HashMap::new();
    for &(p, c, _, _) in &edges {
        kids.entry(p).or_default().push(c);
    }
    let reaches = |kids: &HashMap<u32, Vec<u32>>, from: u32, to: u32| {
        let mut stack = vec![from];
        let mut seen = HashSet::new();
        while let Some(x) = stack.pop() {
            if x == to {
                return true;
            }
            if seen.insert(x) {
                stack.extend(kids.get(&x).into_iter().flatten());
            }
        }
        false
    };
    let mut seen = HashSet::new();
    for t in 1..=n {
        for (i, a) in heads[t].iter().enumerate() {
            if Some(i) == primary[t] {
                seen.insert((a.head, t, a.label));
                continue;
            }
            if !seen.insert((a.head, t, a.label)) {
                continue;
            }
            let (p, c) = (unit[a.head], unit[t]);
            if reaches(&kids, c, p) {
                warn!(
                    "{}: dropping remote arc {} -> {t}, it would close a cycle",
                    bg.id, a.head
                );
                continue;
            }
            edges.push((p, c, a.label, true));
            kids.entry(p).or_default().push(c);
        }
    }
    Ok(build(&bg.id, bg.tokens.clone(), &edges))
}

/// Tree approximation: the graph without its remote edges.
pub fn to_tree(graph: &Graph) -> Graph {
    Graph {
        edges: graph.edges.iter().filter(|e| !e.remote).copied().collect(),
        ..graph.clone()
    }
}

/// Scores of the bilexical round trip against the source graphs, micro-averaged.
pub fn upper_bound(corpus: &[Graph]) -> Result<ScoreReport> {
    let mut total = ScoreReport::default();
    for g in corpus {
        let back = collapse_preterminals(&from_bilexical(&to_bilexical(g)?)?);
        total += score(&back, g)?;
    }
    Ok(total)
}

/// A block being read: id, tokens, arcs, top.
type Block = (String, Vec<Token>, Vec<BiArc>, Option<usize>);

/// Parses the block format; blocks are separated by blank lines.
pub fn read_bilexical(text: &str) -> Result<Vec<BilexicalGraph>> {
    let mut out = Vec::new();
    let mut cur: Option<Block> = None;
    let bad = |line: usize, msg: String| Error::Format { line, msg };
    let flush = |cur: &mut Option<Block>, out: &mut Vec<BilexicalGraph>| {
        if let Some((id, toks, arcs, top)) = cur.take() {
            out.push(BilexicalGraph::new(&id, toks, arcs, top));
        }
    };
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.trim();
        if l.is_empty() {
            flush(&mut cur, &mut out);
            continue;
        }
        if let Some(id) = l.strip_prefix('#') {
            flush(&mut cur, &mut out);
            cur = Some((id.to_string(), Vec::new(), Vec::new(), None));
            continue;
        }
        let block = cur.get_or_insert_with(|| (format!("{}", out.len() + 1), Vec::new(), Vec::new(), None));
        let f: Vec<&str> = l.split_whitespace().collect();
        match f[..] {
            ["TOP", k] => block.3 = Some(k.parse().map_err(|_| bad(line, format!("bad top `{k}`")))?),
            // Token lines number 1..n consecutively and precede all arcs;
            // an arc's head never exceeds n, so the two cannot be confused.
            [idx, form, pos, dep] if block.2.is_empty() && idx.parse::<usize>() == Ok(block.1.len() + 1) => {
                block.1.push(Token::new(form, pos, dep));
            }
            [h, d, label, remote] => {
                let num = |s: &str| s.parse::<usize>().map_err(|_| bad(line, format!("bad index `{s}`")));
                let remote = match remote {
                    "0" => false,
                    "1" => true,
                    r => return Err(bad(line, format!("bad remote flag `{r}`"))),
                };
                let label = label.parse().map_err(|e: Error| bad(line, e.to_string()))?;
                block.2.push(BiArc {
                    head: num(h)?,
                    dependent: num(d)?,
                    label,
                    remote,
                });
            }
            _ => return Err(bad(line, format!("unexpected line `{l}`"))),
        }
    }
    flush(&mut cur, &mut out);
    Ok(out)
}

pub fn write_bilexical(graphs: &[BilexicalGraph]) -> String {
    graphs.iter().map(|g| g.to_block()).collect::<Vec<_>>().join("\n")
}
