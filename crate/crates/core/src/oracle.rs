//! Dynamic oracle.
//!
//! The oracle works on an abstract copy of the parser state expressed in gold
//! node ids. Reachability of the gold graph is established constructively: a
//! planner looks for a full transition sequence from the state, first with a
//! cheap greedy policy and, failing that, with a bounded search. A transition
//! is reported as optimal only when a continuation from the resulting state
//! has actually been found, so every member of the oracle set keeps the gold
//! graph reachable. Found continuations are memoized per state, which makes
//! following any optimal transition cheap on the next step.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Dag, Graph, Token};
use crate::label::Label;
use crate::transition::{ParserState, Transition};

const NONE: usize = usize::MAX;
/// Alternative child orders tried before falling back to search.
const ORDER_TRIES: usize = 300;
/// State expansions allowed to the fallback search.
const SEARCH_BUDGET: usize = 400_000;
/// Departures from the greedy policy allowed before exhaustive search.
const MAX_DEVIATIONS: usize = 3;
/// Plan steps allowed to the departure search.
const DEVIATION_BUDGET: usize = 5_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct GoldEdge {
    parent: usize,
    child: usize,
    label: Label,
    remote: bool,
}

/// Plan steps, in gold terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Step {
    Shift,
    Reduce,
    Node,
    Edge(usize),
    Swap,
    Finish,
}

/// A left-to-right order over terminals induced by an ordering of every
/// node's primary children. Drives when nodes are created and swapped.
#[derive(Clone, Debug)]
struct Order {
    /// Smallest order position of any terminal in the node's primary subtree.
    first: Vec<usize>,
    /// For each non-terminal, the child owning `first`.
    lead: Vec<usize>,
}

/// Gold-side alignment: which gold nodes exist in the parser state and which
/// gold edges are already built.
#[derive(Clone, Debug)]
pub struct Alignment {
    gold_of: Vec<usize>,
    state_of: Vec<usize>,
    realized: Vec<bool>,
    broken: bool,
}

impl Alignment {
    /// Whether every state node and edge corresponds to gold.
    pub fn is_consistent(&self) -> bool {
        !self.broken
    }

    pub fn state_node(&self, gold: usize) -> Option<usize> {
        self.state_of.get(gold).copied().filter(|&s| s != NONE)
    }

    pub fn gold_node(&self, state: usize) -> Option<usize> {
        self.gold_of.get(state).copied().filter(|&g| g != NONE)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Plan {
    stack: Vec<usize>,
    buffer: VecDeque<usize>,
    index: Vec<usize>,
    next: usize,
    done: Vec<bool>,
    attached: Vec<bool>,
    pending: Vec<usize>,
    steps: usize,
}

/// Oracle for one gold graph.
pub struct Oracle {
    gold: Dag,
    edges: Vec<GoldEdge>,
    edge_id: HashMap<GoldEdge, usize>,
    incident: Vec<Vec<usize>>,
    primary: Vec<Option<(usize, Label)>>,
    kids: Vec<Vec<usize>>,
    height: Vec<usize>,
    tokens: Vec<Token>,
    factor: usize,
    cap: usize,
    orders: Vec<Order>,
    memo: HashMap<Vec<u32>, Vec<Step>>,
}

impl Oracle {
    pub fn new(gold: &Graph) -> Result<Oracle> {
        Oracle::with_cap_factor(gold, crate::transition::DEFAULT_CAP_FACTOR)
    }

    pub fn with_cap_factor(gold: &Graph, factor: usize) -> Result<Oracle> {
        let dag = Dag::from_graph(gold)?;
        let mut edges = Vec::new();
        for (p, a) in dag.edges() {
            if !a.label.is_parsable() {
                return Err(Error::Unreachable);
            }
            edges.push(GoldEdge {
                parent: p,
                child: a.node,
                label: a.label,
                remote: a.remote,
            });
        }
        edges.sort_by_key(|e| (e.parent, e.child, e.label, e.remote));
        let m = dag.len();
        let mut incident = vec![Vec::new(); m];
        let mut primary = vec![None; m];
        let mut kids = vec![Vec::new(); m];
        let mut edge_id = HashMap::new();
        for (i, e) in edges.iter().enumerate() {
            incident[e.parent].push(i);
            incident[e.child].push(i);
            edge_id.insert(*e, i);
            if !e.remote {
                primary[e.child] = Some((e.parent, e.label));
                kids[e.parent].push(e.child);
            }
        }
        let mut height = vec![0; m];
        fn ht(x: usize, kids: &[Vec<usize>], memo: &mut [usize], n: usize) -> usize {
            if x >= 1 && x <= n {
                return 0;
            }
            if memo[x] == 0 {
                memo[x] = 1 + kids[x].iter().map(|&c| ht(c, kids, memo, n)).max().unwrap_or(0);
            }
            memo[x]
        }
        for x in 0..m {
            ht(x, &kids, &mut height, dag.n_tokens());
        }
        let mut oracle = Oracle {
            gold: dag,
            edges,
            edge_id,
            incident,
            primary,
            kids,
            height,
            tokens: gold.tokens.clone(),
            factor,
            cap: factor * (gold.tokens.len() + 1),
            orders: Vec::new(),
            memo: HashMap::new(),
        };
        let natural = oracle.natural_order();
        oracle.orders.push(oracle.order_from(&natural));
        Ok(oracle)
    }

    pub fn gold(&self) -> &Dag {
        &self.gold
    }

    pub fn alignment(&self) -> Alignment {
        let n = self.gold.n_tokens();
        let mut state_of = vec![NONE; self.gold.len()];
        let mut gold_of = vec![NONE; n + 1];
        for i in 0..=n {
            state_of[i] = i;
            gold_of[i] = i;
        }
        Alignment {
            gold_of,
            state_of,
            realized: vec![false; self.edges.len()],
            broken: false,
        }
    }

    /// Applies `t` to `state` and keeps `align` in step.
    pub fn advance(&self, state: &mut ParserState, align: &mut Alignment, t: Transition) -> Result<()> {
        let top = state.s(0).and_then(|s| align.gold_node(s));
        let second = state.s(1).and_then(|s| align.gold_node(s));
        state.apply(t)?;
        match t {
            Transition::Node(l) => {
                let y = state.graph().len() - 1;
                align.gold_of.resize(y + 1, NONE);
                match top.and_then(|x| self.primary[x]) {
                    Some((p, pl)) if pl == l && align.state_of[p] == NONE => {
                        align.state_of[p] = y;
                        align.gold_of[y] = p;
                        if let Some(&e) = self.edge_id.get(&GoldEdge {
                            parent: p,
                            child: top.unwrap(),
                            label: l,
                            remote: false,
                        }) {
                            align.realized[e] = true;
                        }
                    }
                    _ => align.broken = true,
                }
            }
            Transition::LeftEdge(l)
            | Transition::RightEdge(l)
            | Transition::LeftRemote(l)
            | Transition::RightRemote(l) => {
                let left = matches!(t, Transition::LeftEdge(_) | Transition::LeftRemote(_));
                let remote = matches!(t, Transition::LeftRemote(_) | Transition::RightRemote(_));
                let (p, c) = if left { (top, second) } else { (second, top) };
                let found = p.zip(c).and_then(|(parent, child)| {
                    self.edge_id.get(&GoldEdge {
                        parent,
                        child,
                        label: l,
                        remote,
                    })
                });
                match found {
                    Some(&e) => align.realized[e] = true,
                    None => align.broken = true,
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// The optimal transitions in `state`: each keeps the gold graph reachable
    /// and, apart from the first step of the found plan, is licensed by the
    /// shift and swap rules.
    ///
    /// Fails with [`Error::Unreachable`] when no continuation can be found,
    /// which only happens after a non-optimal transition was applied.
    pub fn optimal(&mut self, state: &ParserState, align: &Alignment) -> Result<Vec<Transition>> {
        if state.is_terminal() {
            return Err(Error::Terminal);
        }
        let plan = self.lift(state, align)?;
        let first = self.solve(&plan, true).ok_or(Error::Unreachable)?[0];
        let mut out = Vec::new();
        for step in self.candidates(&plan) {
            let ok = step == first
                || self.fires(&plan, step) && {
                    let mut next = plan.clone();
                    self.exec(&mut next, step);
                    self.solve(&next, false).is_some()
                };
            if ok {
                let t = self.transition(&plan, step);
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        debug_assert!(out.iter().all(|&t| state.is_legal(t)));
        out.sort();
        Ok(out)
    }

    /// Parses the gold graph's own tokens, always taking the preferred
    /// optimal transition.
    pub fn parse(&mut self) -> Result<(Vec<Transition>, Graph)> {
        let mut state = ParserState::with_cap_factor(&self.tokens, self.factor);
        let mut align = self.alignment();
        while !state.is_terminal() {
            let set = self.optimal(&state, &align)?;
            let t = preferred(&set).ok_or(Error::Unreachable)?;
            self.advance(&mut state, &mut align, t)?;
        }
        Ok((state.history().to_vec(), state.to_graph("oracle")))
    }

    fn lift(&self, state: &ParserState, align: &Alignment) -> Result<Plan> {
        if !align.is_consistent() {
            return Err(Error::Unreachable);
        }
        let map = |s: usize| align.gold_node(s).ok_or(Error::Unreachable);
        let stack = state.stack().iter().map(|&s| map(s)).collect::<Result<Vec<_>>>()?;
        let buffer = state
            .buffer()
            .iter()
            .map(|&s| map(s))
            .collect::<Result<VecDeque<_>>>()?;
        let index: Vec<usize> = align.state_of.clone();
        let done = align.realized.clone();
        let mut attached = vec![false; self.gold.len()];
        let mut pending = vec![0; self.gold.len()];
        for (i, e) in self.edges.iter().enumerate() {
            if done[i] {
                if !e.remote {
                    attached[e.child] = true;
                }
            } else {
                pending[e.parent] += 1;
                pending[e.child] += 1;
            }
        }
        Ok(Plan {
            stack,
            buffer,
            index,
            next: state.graph().len(),
            done,
            attached,
            pending,
            steps: state.history().len(),
        })
    }

    fn key(&self, plan: &Plan) -> Vec<u32> {
        let mut k = Vec::with_capacity(plan.stack.len() + plan.buffer.len() + self.gold.len() + 4);
        k.extend(plan.stack.iter().map(|&x| x as u32));
        k.push(u32::MAX);
        k.extend(plan.buffer.iter().map(|&x| x as u32));
        k.push(u32::MAX);
        k.extend(plan.index[self.gold.n_tokens() + 1..].iter().map(|&x| x as u32));
        k.extend(
            plan.done
                .chunks(32)
                .map(|c| c.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | ((b as u32) << i))),
        );
        k
    }

    /// Finds a complete continuation from `plan`; `deep` enables the
    /// expensive strategies.
    fn solve(&mut self, plan: &Plan, deep: bool) -> Option<Vec<Step>> {
        if let Some(p) = self.memo.get(&self.key(plan)) {
            return Some(p.clone());
        }
        let mut found = None;
        for i in 0..self.orders.len() {
            if let Some(p) = self.greedy(plan, &self.orders[i]) {
                found = Some(p);
                break;
            }
        }
        if found.is_none() && deep {
            let mut rng = ChaCha8Rng::seed_from_u64(self.gold.len() as u64);
            for _ in 0..ORDER_TRIES {
                let mut children = self.natural_order();
                for c in children.iter_mut() {
                    c.shuffle(&mut rng);
                }
                let order = self.order_from(&children);
                if let Some(p) = self.greedy(plan, &order) {
                    self.orders.push(order);
                    found = Some(p);
                    break;
                }
            }
        }
        if found.is_none() && deep {
            let mut budget = DEVIATION_BUDGET;
            for k in 1..=MAX_DEVIATIONS {
                let mut seen = HashSet::new();
                found = self.deviate(plan, &self.orders[0], k, &mut seen, &mut budget);
                if found.is_some() {
                    break;
                }
            }
        }
        if found.is_none() && deep {
            found = self.search(plan);
        }
        let steps = found?;
        self.remember(plan, &steps);
        Some(steps)
    }

    fn remember(&mut self, plan: &Plan, steps: &[Step]) {
        let mut p = plan.clone();
        for i in 0..steps.len() {
            let k = self.key(&p);
            if self.memo.contains_key(&k) {
                break;
            }
            self.memo.insert(k, steps[i..].to_vec());
            self.exec(&mut p, steps[i]);
        }
    }

    /// Children of every node in left-to-right order of first token.
    fn natural_order(&self) -> Vec<Vec<usize>> {
        self.kids
            .iter()
            .map(|ks| {
                let mut ks = ks.clone();
                ks.sort_by_key(|&c| self.gold.min_position(c));
                ks
            })
            .collect()
    }

    fn order_from(&self, children: &[Vec<usize>]) -> Order {
        let m = self.gold.len();
        let mut first = vec![NONE; m];
        let mut lead = vec![NONE; m];
        let mut pos = 0;
        // iterative post-order walk from the root
        let mut stack = vec![(0usize, 0usize)];
        while let Some(&mut (x, ref mut i)) = stack.last_mut() {
            if self.gold.is_terminal(x) {
                first[x] = pos;
                pos += 1;
                stack.pop();
                continue;
            }
            if *i < children[x].len() {
                let c = children[x][*i];
                *i += 1;
                stack.push((c, 0));
            } else {
                stack.pop();
                if let Some(&c) = children[x].iter().min_by_key(|&&c| first[c]) {
                    first[x] = first[c];
                    lead[x] = c;
                }
            }
        }
        Order { first, lead }
    }

    /// Sort key of a node under `order`: blocks by first terminal, taller first.
    fn rank(&self, order: &Order, x: usize) -> (i64, i64) {
        if x == 0 {
            (i64::MIN, 0)
        } else {
            (order.first[x] as i64, -(self.height[x] as i64))
        }
    }

    fn other(&self, e: usize, x: usize) -> usize {
        let e = &self.edges[e];
        if e.parent == x {
            e.child
        } else {
            e.parent
        }
    }

    fn can_node(&self, plan: &Plan, x: usize) -> bool {
        x != 0 && !plan.attached[x] && matches!(self.primary[x], Some((p, _)) if plan.index[p] == NONE)
    }

    /// Pending edges between the top two stack items that may be built now.
    fn open_edges<'a>(&'a self, plan: &'a Plan) -> impl Iterator<Item = usize> + 'a {
        let n = plan.stack.len();
        let pair = (n >= 2).then(|| (plan.stack[n - 2], plan.stack[n - 1]));
        pair.into_iter().flat_map(move |(a, b)| {
            self.incident[b].iter().copied().filter(move |&e| {
                let g = &self.edges[e];
                !plan.done[e] && self.other(e, b) == a && (g.remote || !plan.attached[g.child])
            })
        })
    }

    fn greedy_step(&self, plan: &Plan, order: &Order) -> Option<Step> {
        let n = plan.stack.len();
        if plan.stack == [0] && plan.buffer.is_empty() {
            return plan.done.iter().all(|&d| d).then_some(Step::Finish);
        }
        if let Some(e) = self.open_edges(plan).next() {
            return Some(Step::Edge(e));
        }
        let s0 = *plan.stack.last()?;
        if s0 != 0 && plan.pending[s0] == 0 {
            return Some(Step::Reduce);
        }
        let s1 = (n >= 2).then(|| plan.stack[n - 2]);
        let swappable = s1.is_some_and(|s1| plan.index[s1] < plan.index[s0]);
        if let Some(s1) = s1 {
            if s1 != 0 && plan.pending[s1] == 0 && swappable {
                return Some(Step::Swap);
            }
        }
        if self.can_node(plan, s0) {
            let (p, _) = self.primary[s0].unwrap();
            let ready = order.lead[p] == s0
                && self.kids[s0].iter().all(|&c| plan.attached[c])
                && plan.buffer.iter().all(|&b| self.rank(order, b) > self.rank(order, s0));
            if ready {
                return Some(Step::Node);
            }
        }
        if let Some(s1) = s1 {
            if swappable && self.rank(order, s0) < self.rank(order, s1) {
                return Some(Step::Swap);
            }
            if swappable && n >= 3 {
                let deep: HashSet<usize> = plan.stack[..n - 2].iter().copied().collect();
                let sink = self.incident[s0]
                    .iter()
                    .any(|&e| !plan.done[e] && deep.contains(&self.other(e, s0)));
                if sink {
                    return Some(Step::Swap);
                }
            }
        }
        if !plan.buffer.is_empty() {
            return Some(Step::Shift);
        }
        None
    }

    fn greedy(&self, plan: &Plan, order: &Order) -> Option<Vec<Step>> {
        let mut p = plan.clone();
        let mut steps = Vec::new();
        loop {
            if p.steps >= self.cap {
                return None;
            }
            let step = self.greedy_step(&p, order)?;
            self.exec(&mut p, step);
            steps.push(step);
            if step == Step::Finish {
                return Some(steps);
            }
        }
    }

    /// Steps consistent with gold in `plan`, most promising first.
    /// Whether a gold edge between `a` and `b` is still unbuilt.
    fn owes(&self, plan: &Plan, a: usize, b: usize) -> bool {
        self.incident[a].iter().any(|&i| {
            let e = &self.edges[i];
            !plan.done[i] && (e.parent == b || e.child == b)
        })
    }

    /// The oracle rules beyond reachability: Shift only towards a buffer head
    /// with unbuilt edges, Swap only when the top owes an edge to a node below
    /// the second item and the second item owes nothing to either.
    fn fires(&self, plan: &Plan, step: Step) -> bool {
        match step {
            Step::Shift => plan.buffer.front().is_some_and(|&b| plan.pending[b] > 0),
            Step::Swap => {
                let n = plan.stack.len();
                let (x, y) = (plan.stack[n - 1], plan.stack[n - 2]);
                let below: Vec<usize> = plan.stack[..n - 2]
                    .iter()
                    .copied()
                    .filter(|&z| self.owes(plan, x, z))
                    .collect();
                !below.is_empty() && !self.owes(plan, y, x) && below.iter().all(|&z| !self.owes(plan, y, z))
            }
            _ => true,
        }
    }

    fn candidates(&self, plan: &Plan) -> Vec<Step> {
        let mut out = Vec::new();
        let n = plan.stack.len();
        if plan.stack == [0] && plan.buffer.is_empty() {
            if plan.done.iter().all(|&d| d) {
                out.push(Step::Finish);
            }
            return out;
        }
        out.extend(self.open_edges(plan).map(Step::Edge));
        let Some(&s0) = plan.stack.last() else {
            return out;
        };
        if s0 != 0 && plan.pending[s0] == 0 {
            out.push(Step::Reduce);
        }
        if self.can_node(plan, s0) {
            out.push(Step::Node);
        }
        if !plan.buffer.is_empty() {
            out.push(Step::Shift);
        }
        if n >= 2 && plan.index[plan.stack[n - 2]] < plan.index[s0] {
            out.push(Step::Swap);
        }
        out
    }

    /// Greedy decoding that may depart from the policy at up to `k` points.
    fn deviate(
        &self,
        plan: &Plan,
        order: &Order,
        k: usize,
        seen: &mut HashSet<(Vec<u32>, usize)>,
        budget: &mut usize,
    ) -> Option<Vec<Step>> {
        let mut p = plan.clone();
        let mut prefix = Vec::new();
        loop {
            if *budget == 0 || p.steps >= self.cap {
                return None;
            }
            *budget -= 1;
            let choice = self.greedy_step(&p, order);
            if k > 0 && seen.insert((self.key(&p), k)) {
                for c in self.candidates(&p) {
                    if Some(c) == choice {
                        continue;
                    }
                    if c == Step::Finish {
                        prefix.push(c);
                        return Some(prefix);
                    }
                    let mut q = p.clone();
                    self.exec(&mut q, c);
                    if let Some(rest) = self.deviate(&q, order, k - 1, seen, budget) {
                        prefix.push(c);
                        prefix.extend(rest);
                        return Some(prefix);
                    }
                }
            }
            let step = choice?;
            self.exec(&mut p, step);
            prefix.push(step);
            if step == Step::Finish {
                return Some(prefix);
            }
        }
    }

    /// Bounded depth-first search over gold-consistent steps, greedy choices first.
    fn search(&self, plan: &Plan) -> Option<Vec<Step>> {
        let order = &self.orders[0];
        let mut seen = HashSet::new();
        let mut budget = SEARCH_BUDGET;
        let mut path = Vec::new();
        self.dfs(plan, order, &mut seen, &mut budget, &mut path).then_some(path)
    }

    fn dfs(
        &self,
        plan: &Plan,
        order: &Order,
        seen: &mut HashSet<Vec<u32>>,
        budget: &mut usize,
        path: &mut Vec<Step>,
    ) -> bool {
        if *budget == 0 || plan.steps >= self.cap || !seen.insert(self.key(plan)) {
            return false;
        }
        *budget -= 1;
        let mut options = Vec::new();
        options.extend(self.greedy_step(plan, order));
        for c in self.candidates(plan) {
            if !options.contains(&c) {
                options.push(c);
            }
        }
        for step in options {
            path.push(step);
            if step == Step::Finish {
                return true;
            }
            let mut next = plan.clone();
            self.exec(&mut next, step);
            if self.dfs(&next, order, seen, budget, path) {
                return true;
            }
            path.pop();
        }
        false
    }

    fn exec(&self, p: &mut Plan, step: Step) {
        p.steps += 1;
        match step {
            Step::Shift => {
                let x = p.buffer.pop_front().unwrap();
                p.stack.push(x);
            }
            Step::Reduce => {
                p.stack.pop();
            }
            Step::Swap => {
                let x = p.stack.remove(p.stack.len() - 2);
                p.buffer.push_front(x);
            }
            Step::Node => {
                let x = *p.stack.last().unwrap();
                let (parent, label) = self.primary[x].unwrap();
                p.index[parent] = p.next;
                p.next += 1;
                p.buffer.push_front(parent);
                let e = self.edge_id[&GoldEdge {
                    parent,
                    child: x,
                    label,
                    remote: false,
                }];
                mark(p, e, &self.edges[e]);
            }
            Step::Edge(e) => mark(p, e, &self.edges[e]),
            Step::Finish => {
                p.stack.clear();
            }
        }
    }

    fn transition(&self, plan: &Plan, step: Step) -> Transition {
        match step {
            Step::Shift => Transition::Shift,
            Step::Reduce => Transition::Reduce,
            Step::Swap => Transition::Swap,
            Step::Finish => Transition::Finish,
            Step::Node => Transition::Node(self.primary[*plan.stack.last().unwrap()].unwrap().1),
            Step::Edge(e) => {
                let g = &self.edges[e];
                let top_is_parent = *plan.stack.last().unwrap() == g.parent;
                match (top_is_parent, g.remote) {
                    (true, false) => Transition::LeftEdge(g.label),
                    (false, false) => Transition::RightEdge(g.label),
                    (true, true) => Transition::LeftRemote(g.label),
                    (false, true) => Transition::RightRemote(g.label),
                }
            }
        }
    }
}

fn mark(p: &mut Plan, e: usize, g: &GoldEdge) {
    p.done[e] = true;
    p.pending[g.parent] -= 1;
    p.pending[g.child] -= 1;
    if !g.remote {
        p.attached[g.child] = true;
    }
}

/// Deterministic pick among optimal transitions: edges (primary or remote)
/// before Node before Reduce before Shift before Swap before Finish, then by
/// label name.
pub fn preferred(set: &[Transition]) -> Option<Transition> {
    set.iter().copied().min_by_key(|t| {
        let rank = match t {
            Transition::LeftEdge(_)
            | Transition::RightEdge(_)
            | Transition::LeftRemote(_)
            | Transition::RightRemote(_) => 0,
            Transition::Node(_) => 1,
            Transition::Reduce => 2,
            Transition::Shift => 3,
            Transition::Swap => 4,
            Transition::Finish => 5,
        };
        (rank, t.label().map(|l| l.as_str()).unwrap_or(""), *t)
    })
}

/// The oracle transition sequence for `gold` and the graph it builds.
pub fn oracle_parse(gold: &Graph) -> Result<(Vec<Transition>, Graph)> {
    let mut oracle = Oracle::new(gold)?;
    let (seq, mut graph) = oracle.parse()?;
    graph.id = gold.id.clone();
    Ok((seq, graph))
}
