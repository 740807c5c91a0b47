//! Lexicalist transfer: partition a source bag into cells, each covered by
//! the left-hand side of one bilingual entry or template, and collect the
//! right-hand sides into a coindexed target bag.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bag::{Bag, ItemId, LexicalItem, TemplateId};
use crate::bilingual::{BagPattern, BilingualEntry, BilingualTemplate};
use crate::term::{BindingStore, Description, Index, VarGen, VarId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransferRule {
    Entry(BilingualEntry),
    Template(BilingualTemplate),
}

impl TransferRule {
    pub fn lhs(&self) -> &BagPattern {
        match self {
            TransferRule::Entry(e) => &e.lhs,
            TransferRule::Template(t) => &t.lhs,
        }
    }

    pub fn rhs(&self) -> &BagPattern {
        match self {
            TransferRule::Entry(e) => &e.rhs,
            TransferRule::Template(t) => &t.rhs,
        }
    }

    pub fn is_entry(&self) -> bool {
        matches!(self, TransferRule::Entry(_))
    }

    pub fn template_id(&self) -> Option<&TemplateId> {
        match self {
            TransferRule::Template(t) => Some(&t.id),
            TransferRule::Entry(_) => None,
        }
    }

    fn var_count(&self) -> u32 {
        use crate::term::IndexTerm;
        match self {
            TransferRule::Entry(e) => e.max_var().map_or(0, |m| m + 1),
            TransferRule::Template(t) => t.var_count(),
        }
    }

    /// Whether lhs item `k` can cover `item` on its own.
    fn covers(&self, k: usize, item: &LexicalItem, store: &mut BindingStore) -> bool {
        let pat = &self.lhs()[k];
        pat.word.matches(&item.word) && store.unify_description(&pat.desc, &item.desc).is_ok()
    }
}

/// Rules in candidate order: every entry before every template, file order
/// within each group.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransferRules {
    rules: Vec<TransferRule>,
}

impl TransferRules {
    pub fn new(entries: &[BilingualEntry], templates: &[BilingualTemplate]) -> Self {
        let rules = entries
            .iter()
            .map(|e| TransferRule::Entry(e.canonical()))
            .chain(templates.iter().cloned().map(TransferRule::Template))
            .collect();
        TransferRules { rules }
    }

    pub fn rules(&self) -> &[TransferRule] {
        &self.rules
    }

    pub fn get(&self, i: usize) -> &TransferRule {
        &self.rules[i]
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Adds an entry after the existing entries and before the templates.
    pub fn push_entry(&mut self, e: BilingualEntry) {
        let at = self.rules.iter().take_while(|r| r.is_entry()).count();
        self.rules.insert(at, TransferRule::Entry(e.canonical()));
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransferError {
    #[error("no rule covers {}", fmt_items(.0))]
    NoCover(Vec<LexicalItem>),
}

fn fmt_items(items: &[LexicalItem]) -> String {
    items
        .iter()
        .map(|it| format!("{}:{}", it.word, it.desc))
        .collect::<Vec<_>>()
        .join(", ")
}

/// One partition cell: the rule used, the source items it consumed (in
/// left-hand pattern order) and the target items it produced (in
/// right-hand order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub rule: usize,
    pub consumed: Vec<ItemId>,
    pub produced: Vec<ItemId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferDerivation {
    pub cells: Vec<Cell>,
    /// Source ground index → the output variable standing for it.
    pub index_vars: BTreeMap<u32, VarId>,
    pub bag: Bag,
}

impl TransferDerivation {
    /// One record per cell, in derivation order.
    pub fn used_rules(&self) -> &[Cell] {
        &self.cells
    }

    pub fn template_cells<'r>(
        &'r self,
        rules: &'r TransferRules,
    ) -> impl Iterator<Item = (&'r Cell, &'r BilingualTemplate)> + 'r {
        self.cells.iter().filter_map(move |c| match rules.get(c.rule) {
            TransferRule::Template(t) => Some((c, t)),
            TransferRule::Entry(_) => None,
        })
    }
}

#[derive(Debug, Clone)]
struct Choice {
    rule: usize,
    /// Bag positions, one per lhs item.
    positions: Vec<usize>,
    /// Resolved value of each rule variable.
    values: Vec<Index>,
}

struct Frame {
    options: Vec<Choice>,
    next: usize,
}

/// Enumerates the transfer derivations of `src`, lazily.
///
/// Fails up front if some item cannot be covered by any rule on its own.
pub fn transfer<'a>(src: &'a Bag, rules: &'a TransferRules) -> Result<Transfers<'a>, TransferError> {
    let mut uncovered = Vec::new();
    for item in src {
        let ok = rules.rules().iter().any(|r| {
            (0..r.lhs().len()).any(|k| r.covers(k, item, &mut BindingStore::new()))
        });
        if !ok {
            uncovered.push(item.clone());
        }
    }
    if !uncovered.is_empty() {
        return Err(TransferError::NoCover(uncovered));
    }
    let mut order: Vec<usize> = (0..src.len()).collect();
    order.sort_by_key(|&p| src.items()[p].id);
    Ok(Transfers {
        src,
        rules,
        order,
        covered: vec![false; src.len()],
        stack: Vec::new(),
        cells: Vec::new(),
        started: false,
    })
}

pub struct Transfers<'a> {
    src: &'a Bag,
    rules: &'a TransferRules,
    order: Vec<usize>,
    covered: Vec<bool>,
    stack: Vec<Frame>,
    cells: Vec<Choice>,
    started: bool,
}

impl Transfers<'_> {
    fn anchor(&self) -> Option<usize> {
        self.order.iter().copied().find(|&p| !self.covered[p])
    }

    /// Every way of covering the anchor with one rule application.
    fn options(&self, anchor: usize) -> Vec<Choice> {
        let items = self.src.items();
        let free: Vec<usize> = self
            .order
            .iter()
            .copied()
            .filter(|&p| !self.covered[p] && p != anchor)
            .collect();
        let mut out = Vec::new();
        for (ri, rule) in self.rules.rules().iter().enumerate() {
            let n = rule.lhs().len();
            for k in 0..n {
                let mut store = BindingStore::new();
                if !rule.covers(k, &items[anchor], &mut store) {
                    continue;
                }
                let mut positions = vec![usize::MAX; n];
                positions[k] = anchor;
                assign(rule, items, &free, 0, &mut positions, &mut store, &mut |pos, store| {
                    let values = (0..rule.var_count())
                        .map(|v| store.resolve(Index::var(v)))
                        .collect();
                    out.push(Choice {
                        rule: ri,
                        positions: pos.to_vec(),
                        values,
                    });
                });
            }
        }
        out
    }

    fn build(&self) -> TransferDerivation {
        let items = self.src.items();
        let mut index_vars: BTreeMap<u32, VarId> = BTreeMap::new();
        let mut gen = VarGen::new();
        let mut cells = Vec::new();
        let mut out = Vec::new();
        for (c, choice) in self.cells.iter().enumerate() {
            let cell_no = c as u32 + 1;
            let rule = self.rules.get(choice.rule);
            let consumed: Vec<ItemId> = choice.positions.iter().map(|&p| items[p].id).collect();
            let mut local: BTreeMap<VarId, VarId> = BTreeMap::new();
            let mut produced = Vec::new();
            for (k, pat) in rule.rhs().iter().enumerate() {
                let last = consumed.len() - 1;
                let id = if k <= last {
                    ItemId::transfer(cell_no, consumed[k].src, 0)
                } else {
                    ItemId::transfer(cell_no, consumed[last].src, (k - last) as u32)
                };
                let args = pat
                    .desc
                    .args
                    .iter()
                    .map(|a| {
                        let v = match a {
                            Index::Var(v) => *v,
                            Index::Ground(g) => return Index::Ground(*g),
                        };
                        match choice.values.get(v.0 as usize) {
                            Some(Index::Ground(g)) => {
                                Index::Var(*index_vars.entry(*g).or_insert_with(|| gen.fresh()))
                            }
                            _ => Index::Var(*local.entry(v).or_insert_with(|| gen.fresh())),
                        }
                    })
                    .collect();
                let word = match rule {
                    TransferRule::Entry(_) => pat.word.clone(),
                    TransferRule::Template(t) => t.placeholder(k as u32 + 1),
                };
                out.push(LexicalItem {
                    id,
                    word,
                    surface: None,
                    desc: Description {
                        category: pat.desc.category.clone(),
                        features: pat.desc.features.clone(),
                        args,
                    },
                });
                produced.push(id);
            }
            cells.push(Cell {
                rule: choice.rule,
                consumed,
                produced,
            });
        }
        TransferDerivation {
            cells,
            index_vars,
            bag: Bag::new(out).expect("cell-source ids are unique"),
        }
    }

    fn set(&mut self, choice: &Choice, covered: bool) {
        for &p in &choice.positions {
            self.covered[p] = covered;
        }
    }
}

/// Extends `positions` so every lhs slot is filled with a distinct free
/// item, calling `found` for each complete consistent assignment.
fn assign(
    rule: &TransferRule,
    items: &[LexicalItem],
    free: &[usize],
    k: usize,
    positions: &mut Vec<usize>,
    store: &mut BindingStore,
    found: &mut dyn FnMut(&[usize], &BindingStore),
) {
    if k == positions.len() {
        found(positions, store);
        return;
    }
    if positions[k] != usize::MAX {
        return assign(rule, items, free, k + 1, positions, store, found);
    }
    for &p in free {
        if positions.contains(&p) {
            continue;
        }
        let mark = store.mark();
        if rule.covers(k, &items[p], store) {
            positions[k] = p;
            assign(rule, items, free, k + 1, positions, store, found);
            positions[k] = usize::MAX;
        }
        store.undo(mark);
    }
}

impl Iterator for Transfers<'_> {
    type Item = TransferDerivation;

    fn next(&mut self) -> Option<TransferDerivation> {
        if !self.started {
            self.started = true;
            match self.anchor() {
                None => return Some(self.build()),
                Some(a) => {
                    let options = self.options(a);
                    self.stack.push(Frame { options, next: 0 });
                }
            }
        }
        loop {
            if self.stack.is_empty() {
                return None;
            }
            if self.cells.len() == self.stack.len() {
                let undone = self.cells.pop().expect("one cell per frame");
                self.set(&undone, false);
            }
            let top = self.stack.last_mut().expect("checked non-empty");
            if top.next >= top.options.len() {
                self.stack.pop();
                continue;
            }
            let choice = top.options[top.next].clone();
            top.next += 1;
            self.set(&choice, true);
            self.cells.push(choice);
            match self.anchor() {
                None => return Some(self.build()),
                Some(a) => {
                    let options = self.options(a);
                    self.stack.push(Frame { options, next: 0 });
                }
            }
        }
    }
}

/// Brute-force reference: every set partition of the bag, every rule and
/// every ordering of each cell against the rule's left-hand side.
pub mod oracle {
    use super::*;

    /// A derivation as `(rule, consumed ids in lhs order)` per cell,
    /// sorted, so derivations compare independent of cell order.
    pub type CellSet = Vec<(usize, Vec<ItemId>)>;

    pub fn cell_set(d: &TransferDerivation) -> CellSet {
        let mut cells: CellSet = d
            .cells
            .iter()
            .map(|c| (c.rule, c.consumed.clone()))
            .collect();
        cells.sort();
        cells
    }

    fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
        let mut out = vec![vec![]];
        for i in 0..n {
            let mut next = Vec::new();
            for p in &out {
                for b in 0..p.len() {
                    let mut q: Vec<Vec<usize>> = p.clone();
                    q[b].push(i);
                    next.push(q);
                }
                let mut q = p.clone();
                q.push(vec![i]);
                next.push(q);
            }
            out = next;
        }
        out
    }

    fn permutations(xs: &[usize]) -> Vec<Vec<usize>> {
        if xs.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for i in 0..xs.len() {
            let mut rest = xs.to_vec();
            let x = rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }

    fn cell_readings(src: &Bag, rules: &TransferRules, cell: &[usize]) -> Vec<(usize, Vec<ItemId>)> {
        let items = src.items();
        let mut out = Vec::new();
        for (ri, rule) in rules.rules().iter().enumerate() {
            if rule.lhs().len() != cell.len() {
                continue;
            }
            for perm in permutations(cell) {
                let mut store = BindingStore::new();
                let ok = rule.lhs().iter().zip(&perm).all(|(pat, &p)| {
                    pat.word.matches(&items[p].word)
                        && store.unify_description(&pat.desc, &items[p].desc).is_ok()
                });
                if ok {
                    out.push((ri, perm.iter().map(|&p| items[p].id).collect()));
                }
            }
        }
        out
    }

    pub fn brute_force(src: &Bag, rules: &TransferRules) -> Vec<CellSet> {
        let mut out = Vec::new();
        for partition in set_partitions(src.len()) {
            let mut combos: Vec<CellSet> = vec![vec![]];
            for cell in &partition {
                let readings = cell_readings(src, rules, cell);
                combos = combos
                    .iter()
                    .flat_map(|c| {
                        readings.iter().map(move |r| {
                            let mut c = c.clone();
                            c.push(r.clone());
                            c
                        })
                    })
                    .collect();
            }
            for mut c in combos {
                c.sort();
                out.push(c);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn bell_numbers() {
        let sizes: Vec<usize> = (0..6).map(|n| set_partitions(n).len()).collect();
        assert_eq!(sizes, [1, 1, 2, 5, 15, 52]);
    }
}
