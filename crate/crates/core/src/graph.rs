//! The UCCA graph model: a rooted DAG over tokens whose primary edges form a tree.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::Label;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Token {
    pub form: String,
    #[serde(default = "blank")]
    pub pos: String,
    #[serde(default = "blank")]
    pub dep: String,
}

fn blank() -> String {
    "_".to_string()
}

impl Token {
    pub fn new(form: &str, pos: &str, dep: &str) -> Token {
        Token {
            form: form.to_string(),
            pos: pos.to_string(),
            dep: dep.to_string(),
        }
    }

    /// A token with untagged POS and dependency columns.
    pub fn bare(form: &str) -> Token {
        Token::new(form, "_", "_")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Root,
    Internal,
    Terminal,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Node {
    pub id: u32,
    pub kind: NodeKind,
    /// Token position, 1-based. Terminals only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub parent: u32,
    pub child: u32,
    pub label: Label,
    pub remote: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Graph {
    pub id: String,
    pub tokens: Vec<Token>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

/// A broken graph invariant, with the offending node or edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateNode(u32),
    RootCount(usize),
    RootHasParent(u32),
    TerminalWithoutToken(u32),
    TokenOnNonTerminal(u32),
    TokenOutOfRange { node: u32, token: usize },
    TokenCoverage { token: usize, terminals: usize },
    TerminalOrder(u32),
    UnknownNode { node: u32 },
    SelfLoop(u32),
    TerminalParent { parent: u32, child: u32 },
    DuplicateEdge(Edge),
    PrimaryParents { node: u32, count: usize },
    Cycle(u32),
    Unreachable(u32),
}

impl Violation {
    /// Short name of the invariant that failed.
    pub fn invariant(&self) -> &'static str {
        match self {
            Violation::DuplicateNode(_) => "unique-node-id",
            Violation::RootCount(_) => "single-root",
            Violation::RootHasParent(_) => "root-parentless",
            Violation::TerminalWithoutToken(_)
            | Violation::TokenOnNonTerminal(_)
            | Violation::TokenOutOfRange { .. }
            | Violation::TokenCoverage { .. } => "terminal-anchoring",
            Violation::TerminalOrder(_) => "terminal-order",
            Violation::UnknownNode { .. } => "known-endpoints",
            Violation::SelfLoop(_) => "no-self-loop",
            Violation::TerminalParent { .. } => "terminal-parent",
            Violation::DuplicateEdge(_) => "unique-edge",
            Violation::PrimaryParents { .. } => "single-primary-parent",
            Violation::Cycle(_) => "acyclic",
            Violation::Unreachable(_) => "reachable",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.invariant())?;
        match self {
            Violation::DuplicateNode(id) => write!(f, "node id {id} appears twice"),
            Violation::RootCount(k) => write!(f, "{k} root nodes"),
            Violation::RootHasParent(p) => write!(f, "root has parent {p}"),
            Violation::TerminalWithoutToken(id) => write!(f, "terminal {id} has no token"),
            Violation::TokenOnNonTerminal(id) => write!(f, "non-terminal {id} has a token"),
            Violation::TokenOutOfRange { node, token } => {
                write!(f, "node {node} anchors missing token {token}")
            }
            Violation::TokenCoverage { token, terminals } => {
                write!(f, "token {token} has {terminals} terminals")
            }
            Violation::TerminalOrder(id) => write!(f, "terminal {id} is out of token order"),
            Violation::UnknownNode { node } => write!(f, "edge endpoint {node} does not exist"),
            Violation::SelfLoop(id) => write!(f, "self-loop on {id}"),
            Violation::TerminalParent { parent, child } => {
                write!(f, "terminal {parent} has child {child}")
            }
            Violation::DuplicateEdge(e) => write!(
                f,
                "edge {}->{} {}{} repeated",
                e.parent,
                e.child,
                e.label,
                if e.remote { "*" } else { "" }
            ),
            Violation::PrimaryParents { node, count } => {
                write!(f, "node {node} has {count} primary parents")
            }
            Violation::Cycle(id) => write!(f, "node {id} lies on a cycle"),
            Violation::Unreachable(id) => write!(f, "node {id} is unreachable from root"),
        }
    }
}

/// Checks every graph invariant; an empty result means the graph is valid.
pub fn validate(graph: &Graph) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = graph.tokens.len();
    let mut kind: HashMap<u32, NodeKind> = HashMap::new();
    for node in &graph.nodes {
        if kind.insert(node.id, node.kind).is_some() {
            out.push(Violation::DuplicateNode(node.id));
        }
    }
    let roots: Vec<u32> = graph
        .nodes
        .iter()
        .filter(|x| x.kind == NodeKind::Root)
        .map(|x| x.id)
        .collect();
    if roots.len() != 1 {
        out.push(Violation::RootCount(roots.len()));
    }

    let mut anchored = vec![0usize; n + 1];
    let mut terminals: Vec<(usize, u32)> = Vec::new();
    for node in &graph.nodes {
        match (node.kind, node.token) {
            (NodeKind::Terminal, None) => out.push(Violation::TerminalWithoutToken(node.id)),
            (NodeKind::Terminal, Some(t)) if t == 0 || t > n => out.push(Violation::TokenOutOfRange {
                node: node.id,
                token: t,
            }),
            (NodeKind::Terminal, Some(t)) => {
                anchored[t] += 1;
                terminals.push((t, node.id));
            }
            (_, Some(_)) => out.push(Violation::TokenOnNonTerminal(node.id)),
            (_, None) => {}
        }
    }
    for (t, &count) in anchored.iter().enumerate().skip(1) {
        if count != 1 {
            out.push(Violation::TokenCoverage {
                token: t,
                terminals: count,
            });
        }
    }
    terminals.sort();
    for w in terminals.windows(2) {
        if w[1].1 <= w[0].1 {
            out.push(Violation::TerminalOrder(w[1].1));
        }
    }

    let mut seen = HashSet::new();
    let mut primary: HashMap<u32, usize> = HashMap::new();
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for e in &graph.edges {
        let (Some(&pk), Some(&ck)) = (kind.get(&e.parent), kind.get(&e.child)) else {
            for id in [e.parent, e.child] {
                if !kind.contains_key(&id) {
                    out.push(Violation::UnknownNode { node: id });
                }
            }
            continue;
        };
        if e.parent == e.child {
            out.push(Violation::SelfLoop(e.parent));
        }
        if pk == NodeKind::Terminal {
            out.push(Violation::TerminalParent {
                parent: e.parent,
                child: e.child,
            });
        }
        if ck == NodeKind::Root {
            out.push(Violation::RootHasParent(e.parent));
        }
        if !seen.insert(*e) {
            out.push(Violation::DuplicateEdge(*e));
        }
        if !e.remote {
            *primary.entry(e.child).or_default() += 1;
        }
        adj.entry(e.parent).or_default().push(e.child);
    }
    for node in &graph.nodes {
        if node.kind == NodeKind::Root {
            continue;
        }
        let count = primary.get(&node.id).copied().unwrap_or(0);
        if count != 1 {
            out.push(Violation::PrimaryParents { node: node.id, count });
        }
    }

    // Kahn's algorithm: whatever cannot be peeled lies on or behind a cycle.
    let mut indeg: HashMap<u32, usize> = kind.keys().map(|&k| (k, 0)).collect();
    for cs in adj.values() {
        for c in cs {
            if let Some(d) = indeg.get_mut(c) {
                *d += 1;
            }
        }
    }
    let mut queue: Vec<u32> = indeg.iter().filter(|(_, &d)| d == 0).map(|(&k, _)| k).collect();
    let mut peeled = 0;
    while let Some(x) = queue.pop() {
        peeled += 1;
        for c in adj.get(&x).into_iter().flatten() {
            let d = indeg.get_mut(c).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push(*c);
            }
        }
    }
    if peeled < indeg.len() {
        let first = indeg.iter().filter(|(_, &d)| d > 0).map(|(&k, _)| k).min().unwrap();
        out.push(Violation::Cycle(first));
    }

    if let [root] = roots[..] {
        let mut reach = HashSet::from([root]);
        let mut stack = vec![root];
        while let Some(x) = stack.pop() {
            for &c in adj.get(&x).into_iter().flatten() {
                if reach.insert(c) {
                    stack.push(c);
                }
            }
        }
        let mut lost: Vec<u32> = kind.keys().filter(|k| !reach.contains(k)).copied().collect();
        lost.sort();
        out.extend(lost.into_iter().map(Violation::Unreachable));
    }
    out
}

/// A form is punctuation iff every character is Unicode punctuation.
pub fn is_punctuation(form: &str) -> bool {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^\p{P}+$").unwrap()).is_match(form)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Arc {
    pub node: usize,
    pub label: Label,
    pub remote: bool,
}

/// Dense adjacency view of a graph.
///
/// Index 0 is the root and index `k` (1..=n) is the terminal of token `k`;
/// non-terminals follow. For parser states this index doubles as the
/// creation index.
#[derive(Clone, Debug)]
pub struct Dag {
    ids: Vec<u32>,
    n: usize,
    out: Vec<Vec<Arc>>,
    inc: Vec<Vec<Arc>>,
}

impl Dag {
    /// Root plus `n` terminals, no edges.
    pub fn new(n: usize) -> Dag {
        Dag {
            ids: (0..=n as u32).collect(),
            n,
            out: vec![Vec::new(); n + 1],
            inc: vec![Vec::new(); n + 1],
        }
    }

    pub fn from_graph(graph: &Graph) -> Result<Dag> {
        let violations = validate(graph);
        if !violations.is_empty() {
            return Err(Error::InvalidGraph {
                id: graph.id.clone(),
                violations,
            });
        }
        let n = graph.tokens.len();
        let mut dag = Dag::new(n);
        let mut index = HashMap::new();
        for node in &graph.nodes {
            let i = match node.kind {
                NodeKind::Root => 0,
                NodeKind::Terminal => node.token.unwrap(),
                NodeKind::Internal => dag.add_node(),
            };
            dag.ids[i] = node.id;
            index.insert(node.id, i);
        }
        for e in &graph.edges {
            dag.add_edge(index[&e.parent], index[&e.child], e.label, e.remote);
        }
        Ok(dag)
    }

    pub fn to_graph(&self, id: &str, tokens: &[Token]) -> Graph {
        let nodes = (0..self.len())
            .map(|i| Node {
                id: self.ids[i],
                kind: self.kind(i),
                token: self.position(i),
            })
            .collect();
        let mut edges = Vec::new();
        for p in 0..self.len() {
            for a in &self.out[p] {
                edges.push(Edge {
                    parent: self.ids[p],
                    child: self.ids[a.node],
                    label: a.label,
                    remote: a.remote,
                });
            }
        }
        Graph {
            id: id.to_string(),
            tokens: tokens.to_vec(),
            nodes,
            edges,
        }
    }

    pub fn add_node(&mut self) -> usize {
        let i = self.out.len();
        self.ids.push(i as u32);
        self.out.push(Vec::new());
        self.inc.push(Vec::new());
        i
    }

    pub fn add_edge(&mut self, parent: usize, child: usize, label: Label, remote: bool) {
        self.out[parent].push(Arc {
            node: child,
            label,
            remote,
        });
        self.inc[child].push(Arc {
            node: parent,
            label,
            remote,
        });
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n_tokens(&self) -> usize {
        self.n
    }

    /// External id of a node (the id it carries in a [`Graph`]).
    pub fn id(&self, u: usize) -> u32 {
        self.ids[u]
    }

    pub fn kind(&self, u: usize) -> NodeKind {
        if u == 0 {
            NodeKind::Root
        } else if u <= self.n {
            NodeKind::Terminal
        } else {
            NodeKind::Internal
        }
    }

    pub fn is_terminal(&self, u: usize) -> bool {
        u >= 1 && u <= self.n
    }

    pub fn position(&self, u: usize) -> Option<usize> {
        self.is_terminal(u).then_some(u)
    }

    pub fn children(&self, u: usize) -> &[Arc] {
        &self.out[u]
    }

    pub fn parents(&self, u: usize) -> &[Arc] {
        &self.inc[u]
    }

    pub fn primary_parent(&self, u: usize) -> Option<Arc> {
        self.inc[u].iter().find(|a| !a.remote).copied()
    }

    pub fn has_edge(&self, parent: usize, child: usize, label: Label, remote: bool) -> bool {
        self.out[parent].contains(&Arc {
            node: child,
            label,
            remote,
        })
    }

    /// Whether `to` is reachable from `from` over any edges (reflexive).
    pub fn reaches(&self, from: usize, to: usize) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![from];
        while let Some(x) = stack.pop() {
            if x == to {
                return true;
            }
            for a in &self.out[x] {
                if !seen[a.node] {
                    seen[a.node] = true;
                    stack.push(a.node);
                }
            }
        }
        false
    }

    /// Token positions under `u` along primary edges.
    pub fn primary_yield(&self, u: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![u];
        while let Some(x) = stack.pop() {
            if self.is_terminal(x) {
                out.insert(x);
            }
            stack.extend(self.out[x].iter().filter(|a| !a.remote).map(|a| a.node));
        }
        out
    }

    pub fn min_position(&self, u: usize) -> Option<usize> {
        if self.is_terminal(u) {
            return Some(u);
        }
        self.out[u]
            .iter()
            .filter(|a| !a.remote)
            .filter_map(|a| self.min_position(a.node))
            .min()
    }

    /// Primary children ordered left to right by their first token; empty
    /// sub-graphs go last, ties keep insertion order.
    pub fn ordered_children(&self, u: usize) -> Vec<Arc> {
        let mut kids: Vec<(usize, usize, Arc)> = self.out[u]
            .iter()
            .enumerate()
            .filter(|(_, a)| !a.remote)
            .map(|(i, a)| (self.min_position(a.node).unwrap_or(usize::MAX), i, *a))
            .collect();
        kids.sort_by_key(|k| (k.0, k.1));
        kids.into_iter().map(|k| k.2).collect()
    }

    /// h(u): the primary child with the highest-priority label, leftmost on ties.
    pub fn head(&self, u: usize) -> Option<usize> {
        self.ordered_children(u)
            .iter()
            .min_by_key(|a| a.label.priority())
            .map(|a| a.node)
    }

    /// h*(u): the terminal reached by following h; `None` below a childless non-terminal.
    pub fn head_terminal(&self, u: usize) -> Option<usize> {
        let mut x = u;
        while !self.is_terminal(x) {
            x = self.head(x)?;
        }
        Some(x)
    }

    /// Edges as (parent index, child index, label, remote), in parent order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, Arc)> + '_ {
        (0..self.len()).flat_map(move |p| self.out[p].iter().map(move |a| (p, *a)))
    }
}

/// y(e): positions of the terminals below the edge's child, following primary edges.
pub fn edge_yield(graph: &Graph, edge: &Edge) -> Result<BTreeSet<usize>> {
    let dag = Dag::from_graph(graph)?;
    let child = (0..dag.len())
        .find(|&i| dag.id(i) == edge.child)
        .ok_or(Error::InvalidGraph {
            id: graph.id.clone(),
            violations: vec![Violation::UnknownNode { node: edge.child }],
        })?;
    Ok(dag.primary_yield(child))
}

/// Removes linkage (LR/LA edges and the nodes left without content) and
/// implicit units (non-terminals with an empty yield) together with
/// everything hanging under them.
pub fn strip_unsupported(graph: &Graph) -> Result<Graph> {
    let mut edges: Vec<Edge> = graph.edges.iter().filter(|e| !e.label.is_linkage()).copied().collect();
    let terminal: HashSet<u32> = graph
        .nodes
        .iter()
        .filter(|x| x.kind == NodeKind::Terminal)
        .map(|x| x.id)
        .collect();
    let root: HashSet<u32> = graph
        .nodes
        .iter()
        .filter(|x| x.kind == NodeKind::Root)
        .map(|x| x.id)
        .collect();

    // Non-terminals that reach no terminal through primary edges.
    let mut has_content: HashSet<u32> = terminal.clone();
    loop {
        let before = has_content.len();
        for e in edges.iter().filter(|e| !e.remote) {
            if has_content.contains(&e.child) {
                has_content.insert(e.parent);
            }
        }
        if has_content.len() == before {
            break;
        }
    }
    let mut doomed: HashSet<u32> = graph
        .nodes
        .iter()
        .filter(|x| !has_content.contains(&x.id) && !root.contains(&x.id))
        .map(|x| x.id)
        .collect();
    // Primary descendants of doomed nodes go with them.
    loop {
        let before = doomed.len();
        for e in edges.iter().filter(|e| !e.remote) {
            if doomed.contains(&e.parent) {
                doomed.insert(e.child);
            }
        }
        if doomed.len() == before {
            break;
        }
    }
    edges.retain(|e| !doomed.contains(&e.parent) && !doomed.contains(&e.child));
    let out = Graph {
        id: graph.id.clone(),
        tokens: graph.tokens.clone(),
        nodes: graph
            .nodes
            .iter()
            .filter(|x| !doomed.contains(&x.id))
            .cloned()
            .collect(),
        edges,
    };
    let violations = validate(&out);
    if violations.is_empty() {
        Ok(out)
    } else {
        Err(Error::InvalidGraph {
            id: graph.id.clone(),
            violations,
        })
    }
}

/// Collapses pre-terminals: a non-terminal whose only child is a terminal
/// reached by a `Terminal` edge is replaced by that terminal.
pub fn collapse_preterminals(graph: &Graph) -> Graph {
    let mut out_edges: HashMap<u32, Vec<&Edge>> = HashMap::new();
    for e in &graph.edges {
        out_edges.entry(e.parent).or_default().push(e);
    }
    let terminal: HashSet<u32> = graph
        .nodes
        .iter()
        .filter(|x| x.kind == NodeKind::Terminal)
        .map(|x| x.id)
        .collect();
    let mut replace: HashMap<u32, u32> = HashMap::new();
    for node in graph.nodes.iter().filter(|x| x.kind == NodeKind::Internal) {
        if let Some([e]) = out_edges.get(&node.id).map(|v| &v[..]) {
            if e.label == Label::Terminal && !e.remote && terminal.contains(&e.child) {
                replace.insert(node.id, e.child);
            }
        }
    }
    if replace.is_empty() {
        return graph.clone();
    }
    let edges = graph
        .edges
        .iter()
        .filter(|e| !replace.contains_key(&e.parent))
        .map(|e| Edge {
            child: replace.get(&e.child).copied().unwrap_or(e.child),
            ..*e
        })
        .collect();
    Graph {
        id: graph.id.clone(),
        tokens: graph.tokens.clone(),
        nodes: graph
            .nodes
            .iter()
            .filter(|x| !replace.contains_key(&x.id))
            .cloned()
            .collect(),
        edges,
    }
}

/// Builds a graph from (parent, child, label, remote) tuples over dense
/// indices: 0 is the root, 1..=n the terminals, larger indices non-terminals.
pub fn build(id: &str, tokens: Vec<Token>, edges: &[(u32, u32, Label, bool)]) -> Graph {
    let n = tokens.len() as u32;
    let mut ids: BTreeSet<u32> = (0..=n).collect();
    for &(p, c, _, _) in edges {
        ids.insert(p);
        ids.insert(c);
    }
    let nodes = ids
        .into_iter()
        .map(|i| Node {
            id: i,
            kind: if i == 0 {
                NodeKind::Root
            } else if i <= n {
                NodeKind::Terminal
            } else {
                NodeKind::Internal
            },
            token: (i >= 1 && i <= n).then_some(i as usize),
        })
        .collect();
    let edges = edges
        .iter()
        .map(|&(parent, child, label, remote)| Edge {
            parent,
            child,
            label,
            remote,
        })
        .collect();
    Graph {
        id: id.to_string(),
        tokens,
        nodes,
        edges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn figure_graphs_are_valid() {
        for g in fixtures::figure1() {
            assert_eq!(validate(&g), vec![], "{}", g.id);
        }
    }

    #[test]
    fn catches_second_primary_parent() {
        let mut g = fixtures::graduation();
        g.edges.push(Edge {
            parent: 0,
            child: 4,
            label: Label::A,
            remote: false,
        });
        let v = validate(&g);
        assert_eq!(v, vec![Violation::PrimaryParents { node: 4, count: 2 }]);
        assert_eq!(v[0].invariant(), "single-primary-parent");
    }

    #[test]
    fn catches_terminal_parent() {
        let mut g = fixtures::graduation();
        g.edges.push(Edge {
            parent: 4,
            child: 5,
            label: Label::A,
            remote: true,
        });
        let v = validate(&g);
        assert!(v.contains(&Violation::TerminalParent { parent: 4, child: 5 }), "{v:?}");
    }

    #[test]
    fn catches_cycles_and_orphans() {
        let mut g = build(
            "c",
            vec![Token::bare("a")],
            &[(0, 2, Label::H, false), (2, 1, Label::P, false)],
        );
        g.edges.push(Edge {
            parent: 2,
            child: 3,
            label: Label::A,
            remote: false,
        });
        g.nodes.push(Node {
            id: 3,
            kind: NodeKind::Internal,
            token: None,
        });
        g.edges.push(Edge {
            parent: 3,
            child: 2,
            label: Label::A,
            remote: true,
        });
        let names: Vec<_> = validate(&g).iter().map(|v| v.invariant()).collect();
        assert!(names.contains(&"acyclic"), "{names:?}");

        let mut g = fixtures::gave_up();
        g.nodes.push(Node {
            id: 99,
            kind: NodeKind::Internal,
            token: None,
        });
        let v = validate(&g);
        assert!(v.contains(&Violation::Unreachable(99)));
        assert!(v.contains(&Violation::PrimaryParents { node: 99, count: 0 }));
    }

    #[test]
    fn yields_follow_primary_edges() {
        let g = fixtures::graduation();
        let scene = g.edges.iter().find(|e| e.parent == 0 && e.child == 9).unwrap();
        assert_eq!(edge_yield(&g, scene).unwrap(), BTreeSet::from([4, 5, 6, 7]));
        let paris = g.edges.iter().find(|e| e.child == 7).unwrap();
        assert_eq!(edge_yield(&g, paris).unwrap(), BTreeSet::from([7]));
        // remote edge into John yields John only; N1's yield skips it
        let n1 = g.edges.iter().find(|e| e.parent == 0 && e.child == 8).unwrap();
        assert_eq!(edge_yield(&g, n1).unwrap(), BTreeSet::from([2]));

        let g = fixtures::gave_up();
        let p = g.edges.iter().find(|e| e.parent == 0 && e.label == Label::P).unwrap();
        assert_eq!(edge_yield(&g, p).unwrap(), BTreeSet::from([2, 4]));
    }

    #[test]
    fn heads_follow_priority() {
        let dag = Dag::from_graph(&fixtures::graduation()).unwrap();
        assert_eq!(dag.head_terminal(0), Some(2));
        assert_eq!(dag.head_terminal(10), Some(7));
        assert_eq!(dag.head_terminal(4), Some(4));
        let mut empty = Dag::new(1);
        let x = empty.add_node();
        assert_eq!(empty.head_terminal(x), None);
    }

    #[test]
    fn punctuation_is_all_punctuation_chars() {
        for p in [",", ".", "...", "«", "—", "?!", "'"] {
            assert!(is_punctuation(p), "{p}");
        }
        for w in ["a", "'s", "", "1", "$", "+", ",a"] {
            assert!(!is_punctuation(w), "{w}");
        }
    }

    #[test]
    fn strip_recovers_graduation_from_linkage_figure() {
        let stripped = strip_unsupported(&fixtures::graduation_linkage()).unwrap();
        assert_eq!(canon(&stripped), canon(&fixtures::graduation()));
        let g = fixtures::graduation();
        assert_eq!(strip_unsupported(&g).unwrap(), g);
    }

    #[test]
    fn strip_drops_implicit_argument() {
        let g = fixtures::implicit_example();
        assert_eq!(validate(&g), vec![]);
        let stripped = strip_unsupported(&g).unwrap();
        assert_eq!(validate(&stripped), vec![]);
        assert_eq!(stripped.nodes.len(), g.nodes.len() - 1);
        assert_eq!(stripped.edges.len(), g.edges.len() - 1);
        assert!(stripped.edges.iter().all(|e| e.child != fixtures::IMPLICIT_NODE));
        assert_eq!(strip_unsupported(&stripped).unwrap(), stripped);
    }

    #[test]
    fn collapse_removes_unary_preterminals() {
        let g = build(
            "p",
            vec![Token::bare("a"), Token::bare("b")],
            &[
                (0, 3, Label::H, false),
                (3, 1, Label::Terminal, false),
                (3, 4, Label::A, false),
                (4, 2, Label::Terminal, false),
            ],
        );
        let c = collapse_preterminals(&g);
        assert_eq!(validate(&c), vec![]);
        assert_eq!(c.nodes.len(), 4);
        assert!(c.edges.contains(&Edge {
            parent: 3,
            child: 2,
            label: Label::A,
            remote: false
        }));
        assert!(c.edges.contains(&Edge {
            parent: 3,
            child: 1,
            label: Label::Terminal,
            remote: false
        }));
    }

    fn canon(g: &Graph) -> (Vec<Token>, Vec<Edge>) {
        let mut e = g.edges.clone();
        e.sort();
        (g.tokens.clone(), e)
    }
}
