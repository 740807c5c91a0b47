//! Exhaustive bottom-up chart parsing with index coindexation.
//!
//! The chart is built over the context-free backbone only; every complete
//! tree is then instantiated separately, threading index variables through
//! the rules and grounding each dependency cluster to a fresh integer.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::bag::{Bag, ItemId, LexicalItem, Word};
use crate::grammar::{Grammar, MonolingualLexicon};
use crate::term::{BindingStore, Index, IndexTerm, VarGen};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("nothing to parse after tokenization")]
    Empty,
    #[error("unknown words: {}", .0.join(", "))]
    UnknownWords(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetupError {
    #[error("lexicon category `{category}` (word `{word}`) is not a terminal of the grammar")]
    UnknownCategory { word: String, category: String },
    #[error("lexicon entry `{word}` gives `{category}` {found} arguments, the grammar uses {expected}")]
    Arity {
        word: String,
        category: String,
        expected: usize,
        found: usize,
    },
}

/// Lowercases, splits on whitespace and strips trailing `.?!`.
pub fn tokenize(raw: &str) -> Result<Vec<String>, ParseError> {
    let toks: Vec<String> = raw
        .split_whitespace()
        .map(|t| t.trim_end_matches(['.', '?', '!']).to_lowercase())
        .filter(|t| !t.is_empty())
        .collect();
    if toks.is_empty() {
        Err(ParseError::Empty)
    } else {
        Ok(toks)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseNode {
    Leaf {
        item: ItemId,
        category: String,
        surface: String,
    },
    Rule {
        rule: usize,
        symbol: String,
        children: Vec<ParseNode>,
    },
}

impl fmt::Display for ParseNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseNode::Leaf {
                category, surface, ..
            } => write!(f, "({category} {surface})"),
            ParseNode::Rule {
                symbol, children, ..
            } => {
                write!(f, "({symbol}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// One complete parse: tree, bindings and the (unresolved) item bag.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub tree: ParseNode,
    pub store: BindingStore,
    items: Bag,
}

impl Derivation {
    /// The item bag with all bindings applied; every index is ground.
    pub fn get_bag(&self) -> Bag {
        self.store.apply(&self.items)
    }
}

/// Grammar plus lexicon, checked against each other.
#[derive(Debug, Clone)]
pub struct Parser {
    grammar: Grammar,
    lexicon: MonolingualLexicon,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Alt {
    Lexical(usize),
    Rule(usize),
}

/// Chart cell key: symbol and token span.
type Span = (usize, usize, usize);

impl Parser {
    pub fn new(grammar: Grammar, lexicon: MonolingualLexicon) -> Result<Self, SetupError> {
        let terminals = grammar.terminals();
        for (word, e) in lexicon.readings() {
            let category = &e.desc.category;
            if !terminals.contains(category.as_str()) {
                return Err(SetupError::UnknownCategory {
                    word: word.to_string(),
                    category: category.clone(),
                });
            }
            let expected = grammar.arity(category).unwrap_or(0);
            if expected != e.desc.arity() {
                return Err(SetupError::Arity {
                    word: word.to_string(),
                    category: category.clone(),
                    expected,
                    found: e.desc.arity(),
                });
            }
        }
        Ok(Parser { grammar, lexicon })
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn lexicon(&self) -> &MonolingualLexicon {
        &self.lexicon
    }

    pub fn parse_sentence(&self, raw: &str) -> Result<Parses<'_>, ParseError> {
        let tokens = tokenize(raw)?;
        self.parse(&tokens, self.grammar.start())
    }

    /// All complete parses of `tokens` rooted in `start`, in rule order and
    /// then leftmost-split order.
    pub fn parse(&self, tokens: &[String], start: &str) -> Result<Parses<'_>, ParseError> {
        if tokens.is_empty() {
            return Err(ParseError::Empty);
        }
        let mut unknown: Vec<String> = Vec::new();
        for t in tokens {
            if self.lexicon.lookup(t).is_empty() && !unknown.contains(t) {
                unknown.push(t.clone());
            }
        }
        if !unknown.is_empty() {
            return Err(ParseError::UnknownWords(unknown));
        }

        let mut syms: HashMap<&str, usize> = HashMap::new();
        for r in self.grammar.rules() {
            for s in std::iter::once(&r.lhs).chain(&r.rhs) {
                let next = syms.len();
                syms.entry(s.name.as_str()).or_insert(next);
            }
        }
        let rules: Vec<(usize, Vec<usize>)> = self
            .grammar
            .rules()
            .iter()
            .map(|r| {
                (
                    syms[r.lhs.name.as_str()],
                    r.rhs.iter().map(|s| syms[s.name.as_str()]).collect(),
                )
            })
            .collect();

        let n = tokens.len();
        let mut chart: HashMap<Span, Vec<(Alt, Vec<usize>)>> = HashMap::new();
        for (p, t) in tokens.iter().enumerate() {
            for (r, e) in self.lexicon.lookup(t).iter().enumerate() {
                if let Some(&s) = syms.get(e.desc.category.as_str()) {
                    chart
                        .entry((s, p, p + 1))
                        .or_default()
                        .push((Alt::Lexical(r), vec![]));
                }
            }
        }
        for len in 1..=n {
            for i in 0..=n - len {
                let j = i + len;
                for (ri, (lhs, rhs)) in rules.iter().enumerate() {
                    if rhs.len() < 2 || rhs.len() > len {
                        continue;
                    }
                    let mut found = Vec::new();
                    splits(&chart, rhs, i, j, &mut vec![i], &mut found);
                    for bounds in found {
                        chart
                            .entry((*lhs, i, j))
                            .or_default()
                            .push((Alt::Rule(ri), bounds));
                    }
                }
                loop {
                    let mut changed = false;
                    for (ri, (lhs, rhs)) in rules.iter().enumerate() {
                        if rhs.len() != 1 || !chart.contains_key(&(rhs[0], i, j)) {
                            continue;
                        }
                        let alts = chart.entry((*lhs, i, j)).or_default();
                        let alt = (Alt::Rule(ri), vec![i, j]);
                        if !alts.contains(&alt) {
                            alts.push(alt);
                            changed = true;
                        }
                    }
                    if !changed {
                        break;
                    }
                }
            }
        }
        for alts in chart.values_mut() {
            alts.sort();
        }

        let root = syms.get(start).map(|&s| (s, 0, n));
        let mut counts = HashMap::new();
        let total = root.map_or(0, |r| count_trees(&chart, &rules, r, &mut counts));
        Ok(Parses {
            parser: self,
            tokens: tokens.to_vec(),
            chart,
            rules,
            counts,
            root,
            total,
            next: 0,
        })
    }
}

/// Boundary lists `[i, b1, …, j]` splitting `i..j` into one non-empty
/// chart span per right-hand-side symbol.
fn splits(
    chart: &HashMap<Span, Vec<(Alt, Vec<usize>)>>,
    rhs: &[usize],
    at: usize,
    end: usize,
    bounds: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let Some((&sym, rest)) = rhs.split_first() else {
        if at == end {
            out.push(bounds.clone());
        }
        return;
    };
    let last = end.saturating_sub(rest.len());
    for b in at + 1..=last {
        if chart.contains_key(&(sym, at, b)) {
            bounds.push(b);
            splits(chart, rest, b, end, bounds, out);
            bounds.pop();
        }
    }
}

fn children(rules: &[(usize, Vec<usize>)], alt: &(Alt, Vec<usize>)) -> Vec<Span> {
    match alt.0 {
        Alt::Lexical(_) => vec![],
        Alt::Rule(r) => rules[r]
            .1
            .iter()
            .zip(alt.1.windows(2))
            .map(|(&s, w)| (s, w[0], w[1]))
            .collect(),
    }
}

fn count_trees(
    chart: &HashMap<Span, Vec<(Alt, Vec<usize>)>>,
    rules: &[(usize, Vec<usize>)],
    node: Span,
    memo: &mut HashMap<Span, u128>,
) -> u128 {
    if let Some(&c) = memo.get(&node) {
        return c;
    }
    let mut total: u128 = 0;
    for alt in chart.get(&node).into_iter().flatten() {
        let mut prod: u128 = 1;
        for child in children(rules, alt) {
            prod = prod.saturating_mul(count_trees(chart, rules, child, memo));
        }
        total = total.saturating_add(prod);
    }
    memo.insert(node, total);
    total
}

/// Lazily decodes the k-th tree of the packed chart for k = 0, 1, ….
pub struct Parses<'a> {
    parser: &'a Parser,
    tokens: Vec<String>,
    chart: HashMap<Span, Vec<(Alt, Vec<usize>)>>,
    rules: Vec<(usize, Vec<usize>)>,
    counts: HashMap<Span, u128>,
    root: Option<Span>,
    total: u128,
    next: u128,
}

impl Parses<'_> {
    /// Number of complete parses (saturating).
    pub fn total(&self) -> u128 {
        self.total
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    fn decode(&self, node: Span, mut k: u128, gen: &mut Instantiation<'_>) -> (ParseNode, Vec<Index>) {
        let alts = &self.chart[&node];
        for alt in alts {
            let kids = children(&self.rules, alt);
            let sizes: Vec<u128> = kids.iter().map(|c| self.counts[c]).collect();
            let here = sizes.iter().fold(1u128, |a, b| a.saturating_mul(*b));
            if k >= here {
                k -= here;
                continue;
            }
            return match alt.0 {
                Alt::Lexical(r) => gen.leaf(node.1, r),
                Alt::Rule(ri) => {
                    let mut picks = vec![0u128; sizes.len()];
                    for i in (0..sizes.len()).rev() {
                        picks[i] = k % sizes[i];
                        k /= sizes[i];
                    }
                    let built: Vec<(ParseNode, Vec<Index>)> = kids
                        .iter()
                        .zip(picks)
                        .map(|(c, pick)| self.decode(*c, pick, gen))
                        .collect();
                    gen.rule(ri, built)
                }
            };
        }
        unreachable!("tree index within counted total")
    }
}

struct Instantiation<'a> {
    parser: &'a Parser,
    tokens: &'a [String],
    vars: VarGen,
    store: BindingStore,
    items: Vec<LexicalItem>,
}

impl Instantiation<'_> {
    fn leaf(&mut self, position: usize, reading: usize) -> (ParseNode, Vec<Index>) {
        let surface = &self.tokens[position];
        let entry = &self.parser.lexicon.lookup(surface)[reading];
        let mut desc = entry.desc.clone();
        let base = self.vars.reserve(desc.max_var().map_or(0, |m| m + 1));
        desc.shift_vars(base);
        let id = ItemId::token(position as u32 + 1);
        let args = desc.args.clone();
        self.items.push(LexicalItem {
            id,
            word: Word::Lit(entry.stem.clone()),
            surface: Some(surface.clone()),
            desc: desc.clone(),
        });
        let node = ParseNode::Leaf {
            item: id,
            category: desc.category,
            surface: surface.clone(),
        };
        (node, args)
    }

    fn rule(&mut self, ri: usize, kids: Vec<(ParseNode, Vec<Index>)>) -> (ParseNode, Vec<Index>) {
        let rule = &self.parser.grammar.rules()[ri];
        let base = self.vars.reserve(rule.vars);
        let mut nodes = Vec::with_capacity(kids.len());
        for (sym, (node, args)) in rule.rhs.iter().zip(kids) {
            for (v, a) in sym.args.iter().zip(args) {
                self.store
                    .unify_index(Index::var(v.0 + base), a)
                    .expect("grammar indices are variables until grounding");
            }
            nodes.push(node);
        }
        let lhs = rule.lhs.as_description(base).args;
        let node = ParseNode::Rule {
            rule: ri,
            symbol: rule.lhs.name.clone(),
            children: nodes,
        };
        (node, lhs)
    }
}

impl Iterator for Parses<'_> {
    type Item = Derivation;

    fn next(&mut self) -> Option<Derivation> {
        let root = self.root?;
        if self.next >= self.total {
            return None;
        }
        let k = self.next;
        self.next += 1;
        let mut inst = Instantiation {
            parser: self.parser,
            tokens: &self.tokens,
            vars: VarGen::new(),
            store: BindingStore::new(),
            items: Vec::new(),
        };
        let (tree, _) = self.decode(root, k, &mut inst);
        let Instantiation {
            mut store,
            mut items,
            ..
        } = inst;
        items.sort_by_key(|it| it.id);
        // ground each dependency cluster in order of first appearance
        let mut next_ground = 0;
        for it in &items {
            for a in &it.desc.args {
                if let Index::Var(v) = store.resolve(*a) {
                    store
                        .unify_index(Index::Var(v), Index::Ground(next_ground))
                        .expect("unbound representative");
                    next_ground += 1;
                }
            }
        }
        let items = Bag::new(items).expect("one item per token position");
        Some(Derivation { tree, store, items })
    }
}
