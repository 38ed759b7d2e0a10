//! Sparse binary feature templates over parser states, plus the real-valued
//! terminal/node ratio.
//!
//! Template names use the usual shorthand: `s0`..`s3` and `b0`..`b3` are stack
//! and buffer items; `l`, `r`, `u` step to the leftmost, rightmost and unary
//! child; `w`, `t`, `d` are the form, POS tag and dependency label of the
//! head terminal; `e` is the label of the node's incoming edge; `x`/`y` the gap
//! type and gap length; `P`/`C`/`R` parent, child and remote-child counts;
//! `p`/`q` the unique separating punctuation between `s0` and `s1` and the
//! separator count; `a0`/`a1` the last actions.

use std::hash::Hasher;

use fnv::FnvHasher;

use crate::graph::{is_punctuation, Dag};
use crate::transition::ParserState;

/// Bits of the hashed feature space.
pub const HASH_BITS: u32 = 22;
pub const HASH_SIZE: u64 = 1 << HASH_BITS;
/// Key reserved for the ratio feature, just outside the hashed space.
pub const RATIO_KEY: u64 = HASH_SIZE;

pub const BLOCKS: &[(&str, &[&str])] = &[
    (
        "unigrams",
        &[
            "s0tde", "s0we", "s1tde", "s1we", "s2tde", "s2we", "s3tde", "s3we", "b0wtd", "b1wtd", "b2wtd", "b3wtd",
            "s0lwe", "s0rwe", "s0uwe", "s1lwe", "s1rwe", "s1uwe",
        ],
    ),
    (
        "bigrams",
        &[
            "s0ws1w", "s0ws1e", "s0es1w", "s0es1e", "s0wb0w", "s0wb0td", "s0eb0w", "s0eb0td", "s1wb0w", "s1wb0td",
            "s1eb0w", "s1eb0td", "b0wb1w", "b0wb1td", "b0tdb1w", "b0tdb1td",
        ],
    ),
    (
        "trigrams",
        &[
            "s0es1es2w",
            "s0es1es2e",
            "s0es1eb0w",
            "s0es1eb0td",
            "s0es1wb0w",
            "s0es1wb0td",
            "s0ws1es2e",
            "s0ws1eb0td",
        ],
    ),
    (
        "separator",
        &[
            "s0wp", "s0wep", "s0wq", "s0weq", "s0es1ep", "s0es1eq", "s1wp", "s1wep", "s1wq", "s1weq",
        ],
    ),
    (
        "extended",
        &[
            "s0llwe", "s0lrwe", "s0luwe", "s0rlwe", "s0rrwe", "s0ruwe", "s0ulwe", "s0urwe", "s0uuwe", "s1llwe",
            "s1lrwe", "s1luwe", "s1rlwe", "s1rrwe", "s1ruwe",
        ],
    ),
    (
        "disco",
        &[
            "s0xwe", "s1xwe", "s2xwe", "s3xwe", "s0xtde", "s1xtde", "s2xtde", "s3xtde", "s0xy", "s1xy", "s2xy", "s3xy",
            "s0xs1e", "s0xs1w", "s0xs1x", "s0ws1x", "s0es1x", "s0xs2e", "s0xs2w", "s0xs2x", "s0ws2x", "s0es2x",
            "s0ys1y", "s0ys2y", "s0xb0td", "s0xb0w",
        ],
    ),
    ("counts", &["s0P", "s0C", "s0wP", "s0wC", "b0P", "b0C", "b0wP", "b0wC"]),
    ("edges", &["s0s1", "s1s0", "s0b0", "b0s0", "s0b0e", "b0s0e"]),
    ("history", &["a0", "a1"]),
    ("remote", &["s0R", "s0wR", "b0R", "b0wR"]),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapType {
    None,
    Gap,
    Pass,
}

impl GapType {
    pub fn as_str(self) -> &'static str {
        match self {
            GapType::None => "none",
            GapType::Gap => "gap",
            GapType::Pass => "pass",
        }
    }
}

/// Gap type and summed gap length of a node's primary yield.
pub fn gap_profile(dag: &Dag, u: usize) -> (GapType, usize) {
    let gaps = |x: usize| {
        let y = dag.primary_yield(x);
        match (y.first(), y.last()) {
            (Some(a), Some(b)) => b - a + 1 - y.len(),
            _ => 0,
        }
    };
    let own = gaps(u);
    if own > 0 {
        (GapType::Gap, own)
    } else if dag.children(u).iter().any(|a| !a.remote && gaps(a.node) > 0) {
        (GapType::Pass, 0)
    } else {
        (GapType::None, 0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Stack(usize),
    Buffer(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Nav {
    Left,
    Right,
    Unary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct Part {
    slot: Slot,
    nav: Vec<Nav>,
    props: Vec<char>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Template {
    Parts(Vec<Part>),
    /// Edge relation between two slots; with `labels` the edge labels are the value.
    Link {
        from: Slot,
        to: Slot,
        labels: bool,
    },
    History(usize),
}

fn parse_template(name: &str) -> Template {
    if let Some(i) = name.strip_prefix('a') {
        return Template::History(i.parse().unwrap());
    }
    let chars: Vec<char> = name.chars().collect();
    let mut parts = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let slot = match chars[i] {
            's' => Slot::Stack(chars[i + 1].to_digit(10).unwrap() as usize),
            'b' => Slot::Buffer(chars[i + 1].to_digit(10).unwrap() as usize),
            c => panic!("bad template {name} at {c}"),
        };
        i += 2;
        let mut nav = Vec::new();
        while i < chars.len() && nav.len() < 2 && matches!(chars[i], 'l' | 'r' | 'u') {
            nav.push(match chars[i] {
                'l' => Nav::Left,
                'r' => Nav::Right,
                _ => Nav::Unary,
            });
            i += 1;
        }
        let mut props = Vec::new();
        while i < chars.len() && !matches!(chars[i], 's' | 'b') {
            props.push(chars[i]);
            i += 1;
        }
        parts.push(Part { slot, nav, props });
    }
    match &parts[..] {
        [a, b] if a.props.is_empty() && a.nav.is_empty() && b.nav.is_empty() => match &b.props[..] {
            [] => Template::Link {
                from: a.slot,
                to: b.slot,
                labels: false,
            },
            ['e'] => Template::Link {
                from: a.slot,
                to: b.slot,
                labels: true,
            },
            _ => Template::Parts(parts),
        },
        _ => Template::Parts(parts),
    }
}

/// All template names, block by block.
pub fn template_names() -> Vec<&'static str> {
    BLOCKS.iter().flat_map(|(_, ts)| ts.iter().copied()).collect()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct FeatureVector {
    /// Hashed indicator keys, sorted and unique.
    pub keys: Vec<u64>,
    /// Terminals over nodes in the partial graph.
    pub ratio: f64,
}

pub struct Extractor {
    templates: Vec<Template>,
    names: Vec<&'static str>,
}

impl Default for Extractor {
    fn default() -> Self {
        Extractor::new()
    }
}

impl Extractor {
    pub fn new() -> Extractor {
        let names = template_names();
        Extractor {
            templates: names.iter().map(|n| parse_template(n)).collect(),
            names,
        }
    }

    pub fn extract(&self, state: &ParserState) -> FeatureVector {
        let mut keys: Vec<u64> = self
            .fired(state)
            .into_iter()
            .map(|(t, v)| hash_feature(t, &v))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        FeatureVector {
            keys,
            ratio: ratio(state.graph()),
        }
    }

    /// Template ids and rendered values of every firing template.
    pub fn fired(&self, state: &ParserState) -> Vec<(usize, String)> {
        let view = View {
            state,
            dag: state.graph(),
        };
        self.templates
            .iter()
            .enumerate()
            .filter_map(|(i, t)| view.value(t).map(|v| (i, v)))
            .collect()
    }

    pub fn name(&self, template: usize) -> &'static str {
        self.names[template]
    }
}

/// Terminals over nodes (root included).
pub fn ratio(dag: &Dag) -> f64 {
    dag.n_tokens() as f64 / dag.len() as f64
}

/// `_` marks a missing column; templates reading it do not fire.
fn defined(v: &str) -> Option<String> {
    (v != "_").then(|| v.to_string())
}

fn hash_feature(template: usize, value: &str) -> u64 {
    let mut h = FnvHasher::default();
    h.write(&(template as u32).to_le_bytes());
    h.write(value.as_bytes());
    h.finish() & (HASH_SIZE - 1)
}

struct View<'a> {
    state: &'a ParserState,
    dag: &'a Dag,
}

impl View<'_> {
    fn slot(&self, s: Slot) -> Option<usize> {
        match s {
            Slot::Stack(i) => self.state.s(i),
            Slot::Buffer(i) => self.state.b(i),
        }
    }

    fn walk(&self, mut x: usize, nav: &[Nav]) -> Option<usize> {
        for step in nav {
            let kids = self.dag.ordered_children(x);
            x = match step {
                Nav::Left => kids.first()?.node,
                Nav::Right => kids.last()?.node,
                Nav::Unary if kids.len() == 1 => kids[0].node,
                Nav::Unary => return None,
            };
        }
        Some(x)
    }

    fn separators(&self) -> Option<Vec<usize>> {
        let a = self.dag.head_terminal(self.state.s(0)?)?;
        let b = self.dag.head_terminal(self.state.s(1)?)?;
        let (lo, hi) = (a.min(b), a.max(b));
        Some(
            (lo + 1..hi)
                .filter(|&p| is_punctuation(&self.state.tokens()[p - 1].form))
                .collect(),
        )
    }

    fn prop(&self, x: usize, c: char) -> Option<String> {
        let tokens = self.state.tokens();
        let head = || self.dag.head_terminal(x).map(|h| &tokens[h - 1]);
        Some(match c {
            'w' => head()?.form.clone(),
            't' => defined(&head()?.pos)?,
            'd' => defined(&head()?.dep)?,
            'e' => {
                let inc = self.dag.parents(x);
                inc.iter().find(|a| !a.remote).or(inc.first())?.label.to_string()
            }
            'x' => gap_profile(self.dag, x).0.as_str().to_string(),
            'y' => gap_profile(self.dag, x).1.to_string(),
            'P' => self.dag.parents(x).len().to_string(),
            'C' => self.dag.children(x).len().to_string(),
            'R' => self.dag.children(x).iter().filter(|a| a.remote).count().to_string(),
            'p' => {
                let seps = self.separators()?;
                match seps[..] {
                    [only] => tokens[only - 1].form.clone(),
                    _ => return None,
                }
            }
            'q' => self.separators()?.len().to_string(),
            _ => unreachable!("unknown property {c}"),
        })
    }

    fn value(&self, t: &Template) -> Option<String> {
        match t {
            Template::History(i) => {
                let h = self.state.history();
                h.len().checked_sub(i + 1).map(|k| h[k].to_string())
            }
            Template::Link { from, to, labels } => {
                let (x, y) = (self.slot(*from)?, self.slot(*to)?);
                let mut found: Vec<String> = self
                    .dag
                    .children(x)
                    .iter()
                    .filter(|a| a.node == y)
                    .map(|a| {
                        if *labels {
                            a.label.to_string()
                        } else {
                            (if a.remote { "*" } else { "+" }).into()
                        }
                    })
                    .collect();
                if found.is_empty() {
                    return None;
                }
                found.sort();
                Some(found.join(","))
            }
            Template::Parts(parts) => {
                let mut out = String::new();
                for part in parts {
                    let x = self.walk(self.slot(part.slot)?, &part.nav)?;
                    for &c in &part.props {
                        out.push_str(&self.prop(x, c)?);
                        out.push('\u{1f}');
                    }
                }
                Some(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::Token;
    use crate::label::Label::*;
    use crate::transition::Transition::*;

    #[test]
    fn manifest_matches_blocks() {
        let counts: Vec<(&str, usize)> = BLOCKS.iter().map(|(b, ts)| (*b, ts.len())).collect();
        assert_eq!(
            counts,
            [
                ("unigrams", 18),
                ("bigrams", 16),
                ("trigrams", 8),
                ("separator", 10),
                ("extended", 15),
                ("disco", 26),
                ("counts", 8),
                ("edges", 6),
                ("history", 2),
                ("remote", 4),
            ]
        );
        let names = template_names();
        let mut uniq = names.clone();
        uniq.sort();
        uniq.dedup();
        assert_eq!(uniq.len(), names.len());
    }

    #[test]
    fn templates_parse() {
        assert_eq!(
            parse_template("s0lrwe"),
            Template::Parts(vec![Part {
                slot: Slot::Stack(0),
                nav: vec![Nav::Left, Nav::Right],
                props: vec!['w', 'e']
            }])
        );
        assert_eq!(
            parse_template("s0es1eb0td"),
            Template::Parts(vec![
                Part {
                    slot: Slot::Stack(0),
                    nav: vec![],
                    props: vec!['e']
                },
                Part {
                    slot: Slot::Stack(1),
                    nav: vec![],
                    props: vec!['e']
                },
                Part {
                    slot: Slot::Buffer(0),
                    nav: vec![],
                    props: vec!['t', 'd']
                },
            ])
        );
        assert_eq!(
            parse_template("b0s0e"),
            Template::Link {
                from: Slot::Buffer(0),
                to: Slot::Stack(0),
                labels: true
            }
        );
        assert_eq!(parse_template("a1"), Template::History(1));
        assert!(matches!(parse_template("s0ws1w"), Template::Parts(_)));
    }

    #[test]
    fn initial_state_features() {
        let g = fixtures::gave_up();
        let toks: Vec<Token> = g.tokens.iter().map(|t| Token::new(&t.form, "NN", "nsubj")).collect();
        let state = ParserState::new(&toks);
        let ex = Extractor::new();
        let fired = ex.fired(&state);
        let names: Vec<&str> = fired.iter().map(|(i, _)| ex.name(*i)).collect();
        assert!(names.iter().all(|n| !n.contains("s1")), "{names:?}");
        let b0 = fired.iter().find(|(i, _)| ex.name(*i) == "b0wtd").unwrap();
        assert_eq!(b0.1, "John\u{1f}NN\u{1f}nsubj\u{1f}");
        assert!(names.contains(&"b1wtd"));
        assert!(!names.contains(&"s0we"), "root has no head yet");
    }

    #[test]
    fn gap_profiles() {
        let dag = Dag::from_graph(&fixtures::gave_up()).unwrap();
        assert_eq!(gap_profile(&dag, 5), (GapType::Gap, 1));
        assert_eq!(gap_profile(&dag, 0), (GapType::Pass, 0));
        let dag = Dag::from_graph(&fixtures::graduation()).unwrap();
        assert_eq!(gap_profile(&dag, 9), (GapType::None, 0));
        assert_eq!(gap_profile(&dag, 4), (GapType::None, 0));
    }

    #[test]
    fn gap_feature_on_partial_graph() {
        let g = fixtures::gave_up();
        let mut s = ParserState::new(&g.tokens);
        for t in [
            Shift,
            RightEdge(A),
            Reduce,
            Shift,
            Node(C),
            Reduce,
            Shift,
            Swap,
            Shift,
            Shift,
            RightEdge(A),
            Reduce,
            Shift,
            Swap,
            RightEdge(C),
            Reduce,
        ] {
            s.apply(t).unwrap();
        }
        assert_eq!(s.stack(), [5]);
        let ex = Extractor::new();
        let fired = ex.fired(&s);
        let get = |n: &str| fired.iter().find(|(i, _)| ex.name(*i) == n).map(|f| f.1.clone());
        assert_eq!(get("s0xy").unwrap(), "gap\u{1f}1\u{1f}");
        // no incoming edge yet, so nothing carrying `e` fires for s0
        assert_eq!(get("s0we"), None);
        assert_eq!(get("s0xwe"), None);
        assert_eq!(get("s0C").unwrap(), "2\u{1f}");
    }

    #[test]
    fn ratio_counts_root() {
        let mut s = ParserState::new(&[Token::bare("a"), Token::bare("b"), Token::bare("c"), Token::bare("d")]);
        s.apply(Shift).unwrap();
        assert_eq!(Extractor::new().extract(&s).ratio, 0.8);
        s.apply(Node(P)).unwrap();
        let r = Extractor::new().extract(&s).ratio;
        assert!(r > 0.0 && r <= 1.0);
    }

    #[test]
    fn separator_punctuation() {
        let toks: Vec<Token> = ["a", ",", "b"].iter().map(|f| Token::bare(f)).collect();
        let mut s = ParserState::new(&toks);
        for t in [Shift, Shift, Reduce, Shift] {
            s.apply(t).unwrap();
        }
        assert_eq!(s.stack(), [0, 1, 3]);
        let ex = Extractor::new();
        let fired = ex.fired(&s);
        let get = |n: &str| fired.iter().find(|(i, _)| ex.name(*i) == n).map(|f| f.1.clone());
        assert_eq!(get("s0wp").unwrap(), "b\u{1f},\u{1f}");
        assert_eq!(get("s1wq").unwrap(), "a\u{1f}1\u{1f}");
        s.apply(Shift).unwrap_err();
        s.apply(Reduce).unwrap();
        s.apply(Reduce).unwrap();
        let fired = ex.fired(&s);
        assert!(fired.iter().all(|(i, _)| !ex.name(*i).ends_with('p')));
    }

    #[test]
    fn extraction_is_pure() {
        let g = fixtures::graduation();
        let (seq, _) = crate::oracle::oracle_parse(&g).unwrap();
        let ex = Extractor::new();
        let mut s = ParserState::new(&g.tokens);
        for t in seq {
            if s.is_terminal() {
                break;
            }
            let a = ex.extract(&s);
            assert_eq!(a, ex.extract(&s.clone()));
            assert!(a.keys.iter().all(|&k| k < HASH_SIZE));
            assert!((0.0..=1.0).contains(&a.ratio));
            s.apply(t).unwrap();
        }
    }
}
