//! Bilingual entries, templates and their file format.
//!
//! ```text
//! entry fat :: adj(A) <-> gordo :: adj(A).
//! entry kick :: trans_verb(A,B,C) & out :: advparticle(A) <-> echar :: v(A,B,C) \\ trans_verb.
//! template tv+adv/tv : _ :: trans_verb(A,B,C) & _ :: advparticle(A) <-> _ :: v(A,B,C) \\ trans_verb.
//! ```
//!
//! An entry may name the template it instantiates (`entry {template=adj/adj} …`)
//! and a template may carry its lexicon frequency (`template adj/adj {count=2} : …`).
//! Variables are scoped to one statement.

use std::fmt;

use thiserror::Error;

use crate::bag::{TemplateId, Word};
use crate::syntax::{self, parse_attributes, parse_description, Cursor, SyntaxError, Tok, VarScope};
use crate::term::{rename_canonical, Description, Index, IndexTerm, VarGen};

/// One conjunct of a bag pattern.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternItem {
    pub word: Word,
    pub desc: Description,
}

impl PatternItem {
    pub fn new(word: Word, desc: Description) -> Self {
        PatternItem { word, desc }
    }
}

impl IndexTerm for PatternItem {
    fn visit_indices(&self, f: &mut dyn FnMut(&Index)) {
        self.desc.visit_indices(f)
    }
    fn map_indices(&mut self, f: &mut dyn FnMut(&mut Index)) {
        self.desc.map_indices(f)
    }
}

impl fmt::Display for PatternItem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :: {}", self.word, self.desc)
    }
}

/// Conjunction of items; variables may be shared between items.
pub type BagPattern = Vec<PatternItem>;

fn write_side(f: &mut fmt::Formatter<'_>, side: &[PatternItem]) -> fmt::Result {
    for (i, it) in side.iter().enumerate() {
        if i > 0 {
            f.write_str(" & ")?;
        }
        write!(f, "{it}")?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BilingualEntry {
    pub lhs: BagPattern,
    pub rhs: BagPattern,
    pub macro_name: Option<String>,
    /// Template this entry was built from, when known.
    pub template: Option<TemplateId>,
}

impl BilingualEntry {
    pub fn source_words(&self) -> Vec<String> {
        words_of(&self.lhs)
    }

    pub fn target_words(&self) -> Vec<String> {
        words_of(&self.rhs)
    }

    /// Canonical form ignoring the template tag; two entries are the same
    /// bilingual equivalence iff their keys are equal.
    pub fn key(&self) -> (BagPattern, BagPattern, Option<String>) {
        let (lhs, rhs) = rename_canonical(&(self.lhs.clone(), self.rhs.clone()));
        (lhs, rhs, self.macro_name.clone())
    }

    pub fn alpha_equivalent(&self, other: &BilingualEntry) -> bool {
        self.key() == other.key()
    }

    pub fn canonical(&self) -> BilingualEntry {
        let (lhs, rhs) = rename_canonical(&(self.lhs.clone(), self.rhs.clone()));
        BilingualEntry {
            lhs,
            rhs,
            macro_name: self.macro_name.clone(),
            template: self.template.clone(),
        }
    }
}

fn words_of(side: &[PatternItem]) -> Vec<String> {
    side.iter()
        .map(|it| it.word.to_string())
        .collect()
}

impl IndexTerm for BilingualEntry {
    fn visit_indices(&self, f: &mut dyn FnMut(&Index)) {
        self.lhs.visit_indices(f);
        self.rhs.visit_indices(f);
    }
    fn map_indices(&mut self, f: &mut dyn FnMut(&mut Index)) {
        self.lhs.map_indices(f);
        self.rhs.map_indices(f);
    }
}

impl fmt::Display for BilingualEntry {
    /// File syntax, variables renamed canonically.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.canonical();
        f.write_str("entry ")?;
        if let Some(t) = &c.template {
            write!(f, "{{template={t}}} ")?;
        }
        write_side(f, &c.lhs)?;
        f.write_str(" <-> ")?;
        write_side(f, &c.rhs)?;
        if let Some(m) = &c.macro_name {
            write!(f, " \\\\ {m}")?;
        }
        f.write_str(".")
    }
}

/// A bilingual entry with its words left unspecified. Right-hand item `k`
/// (from 1) is the `word(id,k)` placeholder position.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BilingualTemplate {
    pub id: TemplateId,
    pub lhs: BagPattern,
    pub rhs: BagPattern,
    pub macro_name: Option<String>,
    /// Number of lexicon entries of this shape; 0 for hand-authored ones.
    pub count: u64,
}

impl BilingualTemplate {
    /// Canonical word-abstracted shape; the template's identity up to id
    /// and count.
    pub fn shape(&self) -> (BagPattern, BagPattern, Option<String>) {
        let (lhs, rhs) = rename_canonical(&(self.lhs.clone(), self.rhs.clone()));
        (lhs, rhs, self.macro_name.clone())
    }

    pub fn placeholder(&self, position: u32) -> Word {
        Word::Placeholder {
            template: self.id.clone(),
            position,
        }
    }

    /// Variables are numbered from zero; this is one past the largest.
    pub fn var_count(&self) -> u32 {
        self.lhs
            .max_var()
            .max(self.rhs.max_var())
            .map_or(0, |m| m + 1)
    }
}

impl IndexTerm for BilingualTemplate {
    fn visit_indices(&self, f: &mut dyn FnMut(&Index)) {
        self.lhs.visit_indices(f);
        self.rhs.visit_indices(f);
    }
    fn map_indices(&mut self, f: &mut dyn FnMut(&mut Index)) {
        self.lhs.map_indices(f);
        self.rhs.map_indices(f);
    }
}

impl fmt::Display for BilingualTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lhs, rhs, _) = self.shape();
        write!(f, "template {}", self.id)?;
        if self.count > 0 {
            write!(f, " {{count={}}}", self.count)?;
        }
        f.write_str(" : ")?;
        write_side(f, &lhs)?;
        f.write_str(" <-> ")?;
        write_side(f, &rhs)?;
        if let Some(m) = &self.macro_name {
            write!(f, " \\\\ {m}")?;
        }
        f.write_str(".")
    }
}

/// `<Sw, Tw, T>`: the words of an entry and the template it instantiates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntryTriple {
    pub source_words: Vec<String>,
    pub target_words: Vec<String>,
    pub template: TemplateId,
}

impl fmt::Display for EntryTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "be([{}],[{}],{})",
            self.source_words.join(","),
            self.target_words.join(","),
            self.template
        )
    }
}

/// Abstracts an entry's words: left words become anonymous slots, right
/// words become positional placeholders.
pub fn template_of(e: &BilingualEntry) -> (BilingualTemplate, EntryTriple) {
    let id = e.template.clone().unwrap_or_else(|| TemplateId::new("_"));
    let abstracted = |side: &[PatternItem]| -> BagPattern {
        side.iter()
            .map(|it| PatternItem::new(Word::Slot, it.desc.clone()))
            .collect()
    };
    let (lhs, rhs) = rename_canonical(&(abstracted(&e.lhs), abstracted(&e.rhs)));
    let template = BilingualTemplate {
        id: id.clone(),
        lhs,
        rhs,
        macro_name: e.macro_name.clone(),
        count: 0,
    };
    let triple = EntryTriple {
        source_words: e.source_words(),
        target_words: e.target_words(),
        template: id,
    };
    (template, triple)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstantiateError {
    #[error("triple names template {found}, expected {expected}")]
    WrongTemplate { expected: TemplateId, found: TemplateId },
    #[error("template {template} has {slots} {side} slots, triple gives {words} words")]
    Arity {
        template: TemplateId,
        side: &'static str,
        slots: usize,
        words: usize,
    },
}

/// Fills a template's slots with a triple's words, renaming its variables
/// apart with `vars`.
pub fn instantiate(
    t: &BilingualTemplate,
    triple: &EntryTriple,
    vars: &mut VarGen,
) -> Result<BilingualEntry, InstantiateError> {
    if triple.template != t.id {
        return Err(InstantiateError::WrongTemplate {
            expected: t.id.clone(),
            found: triple.template.clone(),
        });
    }
    let check = |side: &'static str, slots: usize, words: usize| {
        if slots == words {
            Ok(())
        } else {
            Err(InstantiateError::Arity {
                template: t.id.clone(),
                side,
                slots,
                words,
            })
        }
    };
    check("source", t.lhs.len(), triple.source_words.len())?;
    check("target", t.rhs.len(), triple.target_words.len())?;
    let fill = |side: &[PatternItem], words: &[String]| -> BagPattern {
        side.iter()
            .zip(words)
            .map(|(it, w)| PatternItem::new(Word::Lit(w.clone()), it.desc.clone()))
            .collect()
    };
    let mut e = BilingualEntry {
        lhs: fill(&t.lhs, &triple.source_words),
        rhs: fill(&t.rhs, &triple.target_words),
        macro_name: t.macro_name.clone(),
        template: Some(t.id.clone()),
    };
    let base = vars.reserve(t.var_count());
    e.shift_vars(base);
    Ok(e)
}

/// Contents of a bilingual lexicon / template file, in file order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BilingualFile {
    pub entries: Vec<BilingualEntry>,
    pub templates: Vec<BilingualTemplate>,
}

impl BilingualFile {
    pub fn parse(src: &str) -> Result<Self, SyntaxError> {
        let toks = syntax::tokenize(src)?;
        let mut cur = Cursor::new(&toks);
        let mut out = BilingualFile::default();
        while !cur.at_end() {
            match cur.peek() {
                Some(Tok::Ident(k)) if k == "entry" => {
                    cur.advance();
                    out.entries.push(parse_entry(&mut cur)?);
                }
                Some(Tok::Ident(k)) if k == "template" => {
                    cur.advance();
                    out.templates.push(parse_template(&mut cur)?);
                }
                _ => return Err(cur.unexpected("`entry` or `template`")),
            }
        }
        Ok(out)
    }

    /// Entries first, then templates, one statement per line.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            s.push_str(&e.to_string());
            s.push('\n');
        }
        for t in &self.templates {
            s.push_str(&t.to_string());
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SideKind {
    Words,
    Slots,
}

fn parse_side(
    cur: &mut Cursor<'_>,
    vars: &mut VarScope,
    kind: SideKind,
) -> Result<BagPattern, SyntaxError> {
    let mut items = Vec::new();
    loop {
        let word = cur.word("word")?;
        let word = match (kind, word.as_str()) {
            (SideKind::Slots, "_") => Word::Slot,
            (SideKind::Slots, _) => {
                return Err(cur.error(format!("template sides take `_`, found word `{word}`")))
            }
            (SideKind::Words, "_") => return Err(cur.error("entries need concrete words")),
            (SideKind::Words, _) => Word::Lit(word),
        };
        cur.expect(&Tok::ColonColon)?;
        let desc = parse_description(cur, vars, false)?;
        items.push(PatternItem::new(word, desc));
        if !cur.eat(&Tok::Amp) {
            return Ok(items);
        }
    }
}

/// `lhs <-> rhs [\\ macro] .`
fn parse_body(
    cur: &mut Cursor<'_>,
    kind: SideKind,
) -> Result<(BagPattern, BagPattern, Option<String>), SyntaxError> {
    let mut vars = VarScope::new();
    let lhs = parse_side(cur, &mut vars, kind)?;
    cur.expect(&Tok::BiArrow)?;
    let rhs = parse_side(cur, &mut vars, kind)?;
    let macro_name = if cur.eat(&Tok::MacroSep) {
        Some(cur.word("transfer macro name")?)
    } else {
        None
    };
    cur.expect(&Tok::Dot)?;
    Ok((lhs, rhs, macro_name))
}

fn parse_entry(cur: &mut Cursor<'_>) -> Result<BilingualEntry, SyntaxError> {
    let mut template = None;
    if cur.peek() == Some(&Tok::LBrace) {
        let mut attrs = parse_attributes(cur)?;
        template = attrs.remove("template").map(TemplateId);
        if let Some(k) = attrs.keys().next() {
            return Err(cur.error(format!("unknown entry attribute `{k}`")));
        }
    }
    let (lhs, rhs, macro_name) = parse_body(cur, SideKind::Words)?;
    Ok(BilingualEntry {
        lhs,
        rhs,
        macro_name,
        template,
    })
}

fn parse_template(cur: &mut Cursor<'_>) -> Result<BilingualTemplate, SyntaxError> {
    let id = TemplateId(cur.word("template id")?);
    let mut count = 0;
    if cur.peek() == Some(&Tok::LBrace) {
        let mut attrs = parse_attributes(cur)?;
        if let Some(c) = attrs.remove("count") {
            count = c
                .parse()
                .map_err(|_| cur.error(format!("bad template count `{c}`")))?;
        }
        if let Some(k) = attrs.keys().next() {
            return Err(cur.error(format!("unknown template attribute `{k}`")));
        }
    }
    cur.expect(&Tok::Colon)?;
    let (lhs, rhs, macro_name) = parse_body(cur, SideKind::Slots)?;
    Ok(BilingualTemplate {
        id,
        lhs,
        rhs,
        macro_name,
        count,
    })
}
