//! Parser state and the nine transitions.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Dag, Graph, Token};
use crate::label::Label;

/// Default action cap multiplier: a parse may take at most `20·(n+1)` steps.
pub const DEFAULT_CAP_FACTOR: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transition {
    Shift,
    Reduce,
    Node(Label),
    LeftEdge(Label),
    RightEdge(Label),
    LeftRemote(Label),
    RightRemote(Label),
    Swap,
    Finish,
}

impl Transition {
    pub fn label(self) -> Option<Label> {
        match self {
            Transition::Node(l)
            | Transition::LeftEdge(l)
            | Transition::RightEdge(l)
            | Transition::LeftRemote(l)
            | Transition::RightRemote(l) => Some(l),
            _ => None,
        }
    }

    pub fn is_edge(self) -> bool {
        matches!(
            self,
            Transition::LeftEdge(_) | Transition::RightEdge(_) | Transition::LeftRemote(_) | Transition::RightRemote(_)
        )
    }

    /// Every transition kind instantiated with every parsable label.
    pub fn all() -> Vec<Transition> {
        let mut out = vec![Transition::Shift, Transition::Reduce];
        let labels: Vec<Label> = Label::ALL.into_iter().filter(|l| l.is_parsable()).collect();
        for make in [
            Transition::Node as fn(Label) -> Transition,
            Transition::LeftEdge,
            Transition::RightEdge,
            Transition::LeftRemote,
            Transition::RightRemote,
        ] {
            out.extend(labels.iter().map(|&l| make(l)));
        }
        out.extend([Transition::Swap, Transition::Finish]);
        out
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transition::Shift => f.write_str("SHIFT"),
            Transition::Reduce => f.write_str("REDUCE"),
            Transition::Node(l) => write!(f, "NODE-{l}"),
            Transition::LeftEdge(l) => write!(f, "LEFT-EDGE-{l}"),
            Transition::RightEdge(l) => write!(f, "RIGHT-EDGE-{l}"),
            Transition::LeftRemote(l) => write!(f, "LEFT-REMOTE-{l}"),
            Transition::RightRemote(l) => write!(f, "RIGHT-REMOTE-{l}"),
            Transition::Swap => f.write_str("SWAP"),
            Transition::Finish => f.write_str("FINISH"),
        }
    }
}

impl FromStr for Transition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format {
            line: 0,
            msg: format!("unknown transition `{s}`"),
        };
        Ok(match s {
            "SHIFT" => Transition::Shift,
            "REDUCE" => Transition::Reduce,
            "SWAP" => Transition::Swap,
            "FINISH" => Transition::Finish,
            _ => {
                let (kind, label) = ["NODE-", "LEFT-EDGE-", "RIGHT-EDGE-", "LEFT-REMOTE-", "RIGHT-REMOTE-"]
                    .iter()
                    .find_map(|p| s.strip_prefix(p).map(|rest| (*p, rest)))
                    .ok_or_else(bad)?;
                let label: Label = label.parse().map_err(|_| bad())?;
                match kind {
                    "NODE-" => Transition::Node(label),
                    "LEFT-EDGE-" => Transition::LeftEdge(label),
                    "RIGHT-EDGE-" => Transition::RightEdge(label),
                    "LEFT-REMOTE-" => Transition::LeftRemote(label),
                    _ => Transition::RightRemote(label),
                }
            }
        })
    }
}

/// The precondition a rejected transition failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    TerminalState,
    ReservedLabel,
    EmptyBuffer,
    EmptyStack,
    ReduceRoot,
    NodeOnRoot,
    StackTooShort,
    TerminalParent,
    RootChild,
    WouldCycle,
    DuplicateEdge,
    HasPrimaryParent,
    SwapOrder,
    FinishNotReady,
}

impl Condition {
    pub fn name(self) -> &'static str {
        match self {
            Condition::TerminalState => "terminal-state",
            Condition::ReservedLabel => "reserved-label",
            Condition::EmptyBuffer => "empty-buffer",
            Condition::EmptyStack => "empty-stack",
            Condition::ReduceRoot => "reduce-root",
            Condition::NodeOnRoot => "node-on-root",
            Condition::StackTooShort => "stack-too-short",
            Condition::TerminalParent => "terminal-parent",
            Condition::RootChild => "root-child",
            Condition::WouldCycle => "would-cycle",
            Condition::DuplicateEdge => "duplicate-edge",
            Condition::HasPrimaryParent => "has-primary-parent",
            Condition::SwapOrder => "swap-order",
            Condition::FinishNotReady => "finish-not-ready",
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct ParserState {
    tokens: Vec<Token>,
    dag: Dag,
    stack: Vec<usize>,
    buffer: VecDeque<usize>,
    history: Vec<Transition>,
    terminal: bool,
    cap: usize,
}

impl ParserState {
    /// Root on the stack, all tokens on the buffer, no edges.
    pub fn new(tokens: &[Token]) -> ParserState {
        ParserState::with_cap_factor(tokens, DEFAULT_CAP_FACTOR)
    }

    pub fn with_cap_factor(tokens: &[Token], factor: usize) -> ParserState {
        let n = tokens.len();
        ParserState {
            tokens: tokens.to_vec(),
            dag: Dag::new(n),
            stack: vec![0],
            buffer: (1..=n).collect(),
            history: Vec::new(),
            terminal: false,
            cap: factor * (n + 1),
        }
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn graph(&self) -> &Dag {
        &self.dag
    }

    /// Bottom first; the top is the last element.
    pub fn stack(&self) -> &[usize] {
        &self.stack
    }

    /// Head first.
    pub fn buffer(&self) -> &VecDeque<usize> {
        &self.buffer
    }

    pub fn history(&self) -> &[Transition] {
        &self.history
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    /// i(x): root is 0, token k is k, created nodes count on from n+1.
    pub fn creation_index(&self, node: usize) -> usize {
        node
    }

    /// s_i, counting from the top.
    pub fn s(&self, i: usize) -> Option<usize> {
        self.stack.len().checked_sub(i + 1).map(|k| self.stack[k])
    }

    /// b_i, counting from the head.
    pub fn b(&self, i: usize) -> Option<usize> {
        self.buffer.get(i).copied()
    }

    /// Checks every precondition of `t` in the current state.
    pub fn check(&self, t: Transition) -> Result<(), Condition> {
        if self.terminal {
            return Err(Condition::TerminalState);
        }
        if let Some(l) = t.label() {
            if !l.is_parsable() {
                return Err(Condition::ReservedLabel);
            }
        }
        match t {
            Transition::Shift => {
                if self.buffer.is_empty() {
                    return Err(Condition::EmptyBuffer);
                }
            }
            Transition::Reduce => match self.s(0) {
                None => return Err(Condition::EmptyStack),
                Some(0) => return Err(Condition::ReduceRoot),
                _ => {}
            },
            Transition::Node(_) => match self.s(0) {
                None => return Err(Condition::EmptyStack),
                Some(0) => return Err(Condition::NodeOnRoot),
                Some(x) => {
                    if self.dag.primary_parent(x).is_some() {
                        return Err(Condition::HasPrimaryParent);
                    }
                }
            },
            Transition::LeftEdge(l)
            | Transition::RightEdge(l)
            | Transition::LeftRemote(l)
            | Transition::RightRemote(l) => {
                let (Some(top), Some(second)) = (self.s(0), self.s(1)) else {
                    return Err(Condition::StackTooShort);
                };
                let left = matches!(t, Transition::LeftEdge(_) | Transition::LeftRemote(_));
                let remote = matches!(t, Transition::LeftRemote(_) | Transition::RightRemote(_));
                let (parent, child) = if left { (top, second) } else { (second, top) };
                if self.dag.is_terminal(parent) {
                    return Err(Condition::TerminalParent);
                }
                if child == 0 {
                    return Err(Condition::RootChild);
                }
                if self.dag.reaches(child, parent) {
                    return Err(Condition::WouldCycle);
                }
                if self.dag.has_edge(parent, child, l, remote) {
                    return Err(Condition::DuplicateEdge);
                }
                if !remote && self.dag.primary_parent(child).is_some() {
                    return Err(Condition::HasPrimaryParent);
                }
            }
            Transition::Swap => {
                let (Some(top), Some(second)) = (self.s(0), self.s(1)) else {
                    return Err(Condition::StackTooShort);
                };
                if self.creation_index(second) >= self.creation_index(top) {
                    return Err(Condition::SwapOrder);
                }
            }
            Transition::Finish => {
                if self.stack != [0] || !self.buffer.is_empty() {
                    return Err(Condition::FinishNotReady);
                }
            }
        }
        Ok(())
    }

    pub fn is_legal(&self, t: Transition) -> bool {
        self.check(t).is_ok()
    }

    /// All legal transitions, in [`Transition::all`] order.
    pub fn legal_transitions(&self) -> Vec<Transition> {
        if self.terminal {
            return Vec::new();
        }
        Transition::all().into_iter().filter(|&t| self.is_legal(t)).collect()
    }

    pub fn apply(&mut self, t: Transition) -> Result<()> {
        self.check(t).map_err(|condition| Error::Illegal {
            transition: t.to_string(),
            condition,
        })?;
        if self.history.len() >= self.cap {
            return Err(Error::ActionCap(self.cap));
        }
        match t {
            Transition::Shift => {
                let x = self.buffer.pop_front().unwrap();
                self.stack.push(x);
            }
            Transition::Reduce => {
                self.stack.pop();
            }
            Transition::Node(l) => {
                let x = self.s(0).unwrap();
                let y = self.dag.add_node();
                self.dag.add_edge(y, x, l, false);
                self.buffer.push_front(y);
            }
            Transition::LeftEdge(l) | Transition::LeftRemote(l) => {
                let (top, second) = (self.s(0).unwrap(), self.s(1).unwrap());
                self.dag
                    .add_edge(top, second, l, matches!(t, Transition::LeftRemote(_)));
            }
            Transition::RightEdge(l) | Transition::RightRemote(l) => {
                let (top, second) = (self.s(0).unwrap(), self.s(1).unwrap());
                self.dag
                    .add_edge(second, top, l, matches!(t, Transition::RightRemote(_)));
            }
            Transition::Swap => {
                let k = self.stack.len() - 2;
                let x = self.stack.remove(k);
                self.buffer.push_front(x);
            }
            Transition::Finish => {
                self.stack.clear();
                self.terminal = true;
            }
        }
        self.history.push(t);
        Ok(())
    }

    pub fn to_graph(&self, id: &str) -> Graph {
        self.dag.to_graph(id, &self.tokens)
    }

    /// The output graph: nodes left without a primary parent (Reduce does
    /// not require one) are attached to the root as `H`.
    pub fn completed_graph(&self, id: &str) -> Graph {
        let mut dag = self.dag.clone();
        for u in 1..dag.len() {
            if dag.primary_parent(u).is_none() {
                dag.add_edge(0, u, Label::H, false);
            }
        }
        dag.to_graph(id, &self.tokens)
    }
}

/// Applies `seq` from the initial state and returns the final graph.
pub fn run_sequence(id: &str, tokens: &[Token], seq: &[Transition]) -> Result<Graph> {
    let mut state = ParserState::new(tokens);
    for (step, &t) in seq.iter().enumerate() {
        state.apply(t).map_err(|e| Error::IllegalAt {
            step,
            source: Box::new(e),
        })?;
    }
    if !state.is_terminal() {
        return Err(Error::NotTerminal);
    }
    Ok(state.to_graph(id))
}
