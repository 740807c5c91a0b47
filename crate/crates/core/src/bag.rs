//! Lexical items and the unordered bags they are collected in.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::term::{rename_canonical, Description, Index, IndexTerm};

/// Identifier of a bilingual template, e.g. `cn/n` or `tv+adv/tv`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TemplateId(pub String);

impl TemplateId {
    pub fn new(id: impl Into<String>) -> Self {
        TemplateId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for TemplateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The word half of a `<Word, Description>` pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Word {
    Lit(String),
    /// Anonymous word slot of a template.
    Slot,
    /// `word(Ti,Position)`: routes a target word back to a template slot.
    /// Matches anything, like [`Word::Slot`].
    Placeholder { template: TemplateId, position: u32 },
}

impl Word {
    pub fn lit(w: impl Into<String>) -> Self {
        Word::Lit(w.into())
    }

    pub fn as_lit(&self) -> Option<&str> {
        match self {
            Word::Lit(w) => Some(w),
            _ => None,
        }
    }

    /// Concrete words must be equal; slots and placeholders match anything.
    pub fn matches(&self, other: &Word) -> bool {
        match (self, other) {
            (Word::Lit(a), Word::Lit(b)) => a == b,
            _ => true,
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Word::Lit(w) => f.write_str(w),
            Word::Slot => f.write_str("_"),
            Word::Placeholder { template, position } => write!(f, "word({template},{position})"),
        }
    }
}

/// Item identifier. Parse bags use token positions (`3`); transfer output
/// uses `cell-source` (`2-1`), with a `.n` suffix for extra target items of
/// one cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId {
    pub cell: Option<u32>,
    pub src: u32,
    pub sub: u32,
}

impl ItemId {
    pub fn token(position: u32) -> Self {
        ItemId {
            cell: None,
            src: position,
            sub: 0,
        }
    }

    pub fn transfer(cell: u32, src: u32, sub: u32) -> Self {
        ItemId {
            cell: Some(cell),
            src,
            sub,
        }
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.cell {
            write!(f, "{c}-")?;
        }
        write!(f, "{}", self.src)?;
        if self.sub > 0 {
            write!(f, ".{}", self.sub)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LexicalItem {
    pub id: ItemId,
    pub word: Word,
    /// Surface token the item was read from, for parse-output items.
    pub surface: Option<String>,
    pub desc: Description,
}

impl IndexTerm for LexicalItem {
    fn visit_indices(&self, f: &mut dyn FnMut(&Index)) {
        self.desc.visit_indices(f)
    }
    fn map_indices(&mut self, f: &mut dyn FnMut(&mut Index)) {
        self.desc.map_indices(f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("duplicate item id {0}")]
pub struct DuplicateId(pub ItemId);

/// Unordered collection of lexical items with unique ids. The listing
/// order is kept only for display and deterministic enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bag {
    items: Vec<LexicalItem>,
}

impl Bag {
    pub fn new(items: Vec<LexicalItem>) -> Result<Self, DuplicateId> {
        let mut seen = HashSet::new();
        for it in &items {
            if !seen.insert(it.id) {
                return Err(DuplicateId(it.id));
            }
        }
        Ok(Bag { items })
    }

    pub fn empty() -> Self {
        Bag::default()
    }

    pub fn items(&self) -> &[LexicalItem] {
        &self.items
    }

    pub fn iter(&self) -> std::slice::Iter<'_, LexicalItem> {
        self.items.iter()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, id: ItemId) -> Option<&LexicalItem> {
        self.items.iter().find(|it| it.id == id)
    }

    pub fn position(&self, id: ItemId) -> Option<usize> {
        self.items.iter().position(|it| it.id == id)
    }

    pub fn is_ground(&self) -> bool {
        let mut ground = true;
        self.visit_indices(&mut |i| ground &= i.is_ground());
        ground
    }

    pub fn into_items(self) -> Vec<LexicalItem> {
        self.items
    }

    /// Aligned `Id Word Cat Indices` table, variables renamed canonically.
    pub fn table(&self) -> String {
        let canon = rename_canonical(self);
        let rows: Vec<[String; 4]> = canon
            .items
            .iter()
            .map(|it| {
                let idx: Vec<String> = it.desc.args.iter().map(Index::to_string).collect();
                [
                    it.id.to_string(),
                    it.word.to_string(),
                    it.desc.category.clone(),
                    format!("[{}]", idx.join(",")),
                ]
            })
            .collect();
        let header = ["Id", "Word", "Cat", "Indices"].map(String::from);
        let mut widths = header.clone().map(|h| h.chars().count());
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for r in std::iter::once(&header).chain(&rows) {
            let mut line = String::new();
            for (k, (cell, w)) in r.iter().zip(widths).enumerate() {
                line.push_str(cell);
                if k + 1 < r.len() {
                    let pad = w - cell.chars().count() + 2;
                    line.extend(std::iter::repeat_n(' ', pad));
                }
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        out
    }
}

impl IndexTerm for Bag {
    fn visit_indices(&self, f: &mut dyn FnMut(&Index)) {
        self.items.visit_indices(f)
    }
    fn map_indices(&mut self, f: &mut dyn FnMut(&mut Index)) {
        self.items.map_indices(f)
    }
}

impl<'a> IntoIterator for &'a Bag {
    type Item = &'a LexicalItem;
    type IntoIter = std::slice::Iter<'a, LexicalItem>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}
