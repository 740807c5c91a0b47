//! Matching a transfer-output bag against a target-sentence parse bag.
//!
//! A match is a bijection between the two bags such that paired
//! descriptions unify and the induced mapping between indices is
//! one-to-one in both directions.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::bag::{Bag, ItemId, LexicalItem, Word};
use crate::term::{BindingStore, Index, Mark, VarId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// `(transfer id, target id)`, in transfer-bag order.
    pub item_map: Vec<(ItemId, ItemId)>,
    /// Transfer-side index → target ground, in order of first occurrence
    /// in the transfer bag.
    pub index_map: Vec<(Index, u32)>,
    /// The transfer bag after unification: target words and ground indices.
    pub unified_bag: Bag,
}

impl Matching {
    pub fn target_of(&self, transfer_id: ItemId) -> Option<ItemId> {
        self.item_map
            .iter()
            .find(|(t, _)| *t == transfer_id)
            .map(|(_, g)| *g)
    }

    /// The item map as a sorted set, for order-independent comparison.
    pub fn item_set(&self) -> Vec<(ItemId, ItemId)> {
        let mut s = self.item_map.clone();
        s.sort();
        s
    }

    /// `{<transfer,target>,…}`
    pub fn item_map_string(&self) -> String {
        let pairs: Vec<String> = self
            .item_map
            .iter()
            .map(|(t, g)| format!("<{t},{g}>"))
            .collect();
        format!("{{{}}}", pairs.join(","))
    }

    /// `{<Var,ground>,…}` with variables named canonically by first
    /// occurrence in the transfer bag.
    pub fn index_map_string(&self) -> String {
        let mut next = 0;
        let pairs: Vec<String> = self
            .index_map
            .iter()
            .map(|(i, g)| {
                let name = match i {
                    Index::Var(_) => {
                        next += 1;
                        VarId(next - 1).name()
                    }
                    Index::Ground(h) => h.to_string(),
                };
                format!("<{name},{g}>")
            })
            .collect();
        format!("{{{}}}", pairs.join(","))
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\n{}", self.item_map_string(), self.index_map_string())
    }
}

fn shape_ok(tr: &LexicalItem, tg: &LexicalItem) -> bool {
    tr.word.matches(&tg.word) && tr.desc.shape_compatible(&tg.desc)
}

/// Store plus the reverse index map enforcing injectivity.
#[derive(Default)]
struct IndexBijection {
    store: BindingStore,
    /// target ground → transfer-side index mapped onto it
    rev: HashMap<u32, Index>,
    rev_trail: Vec<u32>,
}

impl IndexBijection {
    fn mark(&self) -> (Mark, usize) {
        (self.store.mark(), self.rev_trail.len())
    }

    fn undo(&mut self, (m, r): (Mark, usize)) {
        self.store.undo(m);
        while self.rev_trail.len() > r {
            let g = self.rev_trail.pop().expect("length checked");
            self.rev.remove(&g);
        }
    }

    fn claim(&mut self, g: u32, by: Index) -> bool {
        match self.rev.get(&g) {
            Some(prev) => *prev == by,
            None => {
                self.rev.insert(g, by);
                self.rev_trail.push(g);
                true
            }
        }
    }

    /// Pairs one transfer index with one target index.
    fn pair(&mut self, t: Index, g: Index) -> bool {
        let Index::Ground(target) = self.store.resolve(g) else {
            // non-ground target side: plain unification
            return self.store.unify_index(t, g).is_ok();
        };
        match t {
            Index::Ground(h) => h == target && self.claim(target, t),
            Index::Var(_) => match self.store.resolve(t) {
                Index::Ground(h) => h == target,
                Index::Var(rep) => {
                    self.claim(target, Index::Var(rep))
                        && self.store.unify_index(Index::Var(rep), g).is_ok()
                }
            },
        }
    }

    fn pair_items(&mut self, tr: &LexicalItem, tg: &LexicalItem) -> bool {
        let mark = self.mark();
        let ok = tr
            .desc
            .args
            .iter()
            .zip(&tg.desc.args)
            .all(|(t, g)| self.pair(*t, *g));
        if !ok {
            self.undo(mark);
        }
        ok
    }
}

fn build(transfer_out: &Bag, target: &Bag, assign: &[usize], store: &BindingStore) -> Matching {
    let mut item_map = Vec::with_capacity(assign.len());
    let mut unified = Vec::with_capacity(assign.len());
    let mut index_map = Vec::new();
    let mut seen = HashSet::new();
    for (tr, &j) in transfer_out.iter().zip(assign) {
        let tg = &target.items()[j];
        item_map.push((tr.id, tg.id));
        for a in &tr.desc.args {
            if seen.insert(*a) {
                if let Index::Ground(g) = store.resolve(*a) {
                    index_map.push((*a, g));
                }
            }
        }
        let word = match &tr.word {
            Word::Lit(w) => Word::Lit(w.clone()),
            _ => tg.word.clone(),
        };
        let mut desc = store.apply(&tr.desc);
        desc.features = tr.desc.unify_features(&tg.desc).unwrap_or_default();
        unified.push(LexicalItem {
            id: tr.id,
            word,
            surface: tg.surface.clone(),
            desc,
        });
    }
    Matching {
        item_map,
        index_map,
        unified_bag: Bag::new(unified).expect("transfer ids are unique"),
    }
}

/// Lazily enumerates every admissible bijection. Transfer items with the
/// fewest compatible target items are placed first.
pub fn match_bags<'a>(target_parse: &'a Bag, transfer_out: &'a Bag) -> Matches<'a> {
    let n = transfer_out.len();
    let cands: Vec<Vec<usize>> = transfer_out
        .iter()
        .map(|tr| {
            target_parse
                .iter()
                .enumerate()
                .filter(|(_, tg)| shape_ok(tr, tg))
                .map(|(j, _)| j)
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (cands[i].len(), i));
    Matches {
        target: target_parse,
        transfer: transfer_out,
        cands,
        order,
        used: vec![false; target_parse.len()],
        assign: vec![usize::MAX; n],
        cursor: Vec::new(),
        marks: Vec::new(),
        bij: IndexBijection::default(),
        started: false,
        done: target_parse.len() != n,
    }
}

pub struct Matches<'a> {
    target: &'a Bag,
    transfer: &'a Bag,
    cands: Vec<Vec<usize>>,
    order: Vec<usize>,
    used: Vec<bool>,
    assign: Vec<usize>,
    /// Next candidate to try, per depth.
    cursor: Vec<usize>,
    /// Undo information for the active choice, per depth.
    marks: Vec<(Mark, usize)>,
    bij: IndexBijection,
    started: bool,
    done: bool,
}

impl Matches<'_> {
    fn retract(&mut self, depth: usize) {
        let t = self.order[depth];
        let j = self.assign[t];
        self.used[j] = false;
        self.assign[t] = usize::MAX;
        let mark = self.marks.pop().expect("one mark per active choice");
        self.bij.undo(mark);
    }
}

impl Iterator for Matches<'_> {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.done {
            return None;
        }
        let n = self.order.len();
        if !self.started {
            self.started = true;
            if n == 0 {
                self.done = true;
                return Some(build(self.transfer, self.target, &[], &self.bij.store));
            }
            self.cursor.push(0);
        }
        'outer: while let Some(&from) = self.cursor.last() {
            let depth = self.cursor.len() - 1;
            if self.marks.len() == self.cursor.len() {
                self.retract(depth);
            }
            let t = self.order[depth];
            for idx in from..self.cands[t].len() {
                let j = self.cands[t][idx];
                if self.used[j] {
                    continue;
                }
                let mark = self.bij.mark();
                if !self
                    .bij
                    .pair_items(&self.transfer.items()[t], &self.target.items()[j])
                {
                    continue;
                }
                self.cursor[depth] = idx + 1;
                self.used[j] = true;
                self.assign[t] = j;
                self.marks.push(mark);
                if depth + 1 == n {
                    return Some(build(self.transfer, self.target, &self.assign, &self.bij.store));
                }
                self.cursor.push(0);
                continue 'outer;
            }
            self.cursor.pop();
        }
        self.done = true;
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("oracle limited to {limit} items, got {size}")]
pub struct OracleTooLarge {
    pub limit: usize,
    pub size: usize,
}

pub const ORACLE_LIMIT: usize = 8;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(n);
    fn go(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for j in 0..n {
            if !cur.contains(&j) {
                cur.push(j);
                go(n, cur, out);
                cur.pop();
            }
        }
    }
    go(n, &mut cur, &mut out);
    out
}

/// Reference semantics for [`match_bags`]: tries all `n!` bijections,
/// unifies each pairing in listing order, then checks injectivity of the
/// resulting index mapping after the fact.
pub fn match_bags_oracle(target_parse: &Bag, transfer_out: &Bag) -> Result<Vec<Matching>, OracleTooLarge> {
    let size = transfer_out.len().max(target_parse.len());
    if size > ORACLE_LIMIT {
        return Err(OracleTooLarge {
            limit: ORACLE_LIMIT,
            size,
        });
    }
    if target_parse.len() != transfer_out.len() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for perm in permutations(transfer_out.len()) {
        let mut store = BindingStore::new();
        let unifies = transfer_out.iter().zip(&perm).all(|(tr, &j)| {
            let tg = &target_parse.items()[j];
            tr.word.matches(&tg.word) && store.unify_description(&tr.desc, &tg.desc).is_ok()
        });
        if !unifies {
            continue;
        }
        let mut onto: HashMap<Index, Index> = HashMap::new();
        let injective = transfer_out
            .iter()
            .flat_map(|tr| tr.desc.args.iter())
            .all(|a| *onto.entry(store.resolve(*a)).or_insert(*a) == *a);
        if injective {
            out.push(build(transfer_out, target_parse, &perm, &store));
        }
    }
    Ok(out)
}

/// Outcome of matching, after removing duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification<T> {
    Unique(T),
    Ambiguous(Vec<T>),
    NoMatch,
}

impl<T> Classification<T> {
    pub fn len(&self) -> usize {
        match self {
            Classification::Unique(_) => 1,
            Classification::Ambiguous(v) => v.len(),
            Classification::NoMatch => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Classification::NoMatch)
    }
}

/// Removes duplicates (first occurrence wins) and classifies by count.
pub fn classify<T: PartialEq>(results: impl IntoIterator<Item = T>) -> Classification<T> {
    let mut distinct: Vec<T> = Vec::new();
    for r in results {
        if !distinct.contains(&r) {
            distinct.push(r);
        }
    }
    match distinct.len() {
        0 => Classification::NoMatch,
        1 => Classification::Unique(distinct.pop().expect("one element")),
        _ => Classification::Ambiguous(distinct),
    }
}
