//! Coindexing context-free grammars and monolingual lexicons.
//!
//! ```text
//! rule s() -> np(S) vp(E,S).
//! rule np(I) -> determiner(I) nbar(I).
//! lex kicked -> kick :: trans_verb(E,S,O).
//! lex man -> man :: noun(I) {count=+}.
//! ```
//!
//! Identifiers starting with an uppercase letter are index variables.
//! Variables shared between a rule's left and right sides express
//! coindexation.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::syntax::{self, parse_args, parse_description, Cursor, SyntaxError, Tok, VarScope};
use crate::term::{Description, Index, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
}

fn invalid(line: usize, message: impl Into<String>) -> GrammarError {
    GrammarError::Invalid {
        line,
        message: message.into(),
    }
}

/// A category with index-variable arguments, as used in grammar rules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub name: String,
    pub args: Vec<VarId>,
}

impl Symbol {
    pub fn new(name: impl Into<String>, args: Vec<VarId>) -> Self {
        Symbol {
            name: name.into(),
            args,
        }
    }

    pub fn as_description(&self, offset: u32) -> Description {
        Description::new(
            self.name.clone(),
            self.args
                .iter()
                .map(|v| Index::var(v.0 + offset))
                .collect(),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrammarRule {
    pub lhs: Symbol,
    pub rhs: Vec<Symbol>,
    /// Number of distinct variables; they are numbered `0..vars`.
    pub vars: u32,
}

impl GrammarRule {
    pub fn new(lhs: Symbol, rhs: Vec<Symbol>) -> Result<Self, String> {
        if rhs.is_empty() {
            return Err(format!("rule for `{}` has an empty right-hand side", lhs.name));
        }
        let rhs_vars: BTreeSet<VarId> = rhs.iter().flat_map(|s| s.args.iter().copied()).collect();
        if let Some(v) = lhs.args.iter().find(|v| !rhs_vars.contains(v)) {
            return Err(format!(
                "variable {v} of `{}` does not occur on the right-hand side",
                lhs.name
            ));
        }
        let vars = lhs
            .args
            .iter()
            .chain(rhs.iter().flat_map(|s| &s.args))
            .map(|v| v.0 + 1)
            .max()
            .unwrap_or(0);
        Ok(GrammarRule { lhs, rhs, vars })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    rules: Vec<GrammarRule>,
    arity: BTreeMap<String, usize>,
}

impl Grammar {
    pub fn new(rules: Vec<GrammarRule>) -> Result<Self, String> {
        if rules.is_empty() {
            return Err("grammar has no rules".into());
        }
        let mut arity = BTreeMap::new();
        for r in &rules {
            for s in std::iter::once(&r.lhs).chain(&r.rhs) {
                let a = *arity.entry(s.name.clone()).or_insert(s.args.len());
                if a != s.args.len() {
                    return Err(format!(
                        "`{}` used with {} and {} arguments",
                        s.name,
                        a,
                        s.args.len()
                    ));
                }
            }
        }
        let g = Grammar { rules, arity };
        g.check_unary_cycles()?;
        Ok(g)
    }

    pub fn parse(src: &str) -> Result<Self, GrammarError> {
        let toks = syntax::tokenize(src)?;
        let mut cur = Cursor::new(&toks);
        let mut rules = Vec::new();
        let mut last_line = 1;
        while !cur.at_end() {
            let line = cur.line();
            last_line = line;
            match cur.advance() {
                Some(Tok::Ident(k)) if k == "rule" => {}
                _ => return Err(cur.error("expected `rule`").into()),
            }
            let mut vars = VarScope::new();
            let lhs = parse_symbol(&mut cur, &mut vars)?;
            cur.expect(&Tok::Arrow)?;
            let mut rhs = Vec::new();
            while cur.peek() != Some(&Tok::Dot) {
                rhs.push(parse_symbol(&mut cur, &mut vars)?);
            }
            cur.expect(&Tok::Dot)?;
            rules.push(GrammarRule::new(lhs, rhs).map_err(|m| invalid(line, m))?);
        }
        Grammar::new(rules).map_err(|m| invalid(last_line, m))
    }

    pub fn rules(&self) -> &[GrammarRule] {
        &self.rules
    }

    /// The first rule's left-hand side.
    pub fn start(&self) -> &str {
        &self.rules[0].lhs.name
    }

    pub fn is_nonterminal(&self, name: &str) -> bool {
        self.rules.iter().any(|r| r.lhs.name == name)
    }

    /// Symbols used on right-hand sides that no rule defines.
    pub fn terminals(&self) -> BTreeSet<&str> {
        self.rules
            .iter()
            .flat_map(|r| &r.rhs)
            .map(|s| s.name.as_str())
            .filter(|n| !self.is_nonterminal(n))
            .collect()
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.arity.get(name).copied()
    }

    fn check_unary_cycles(&self) -> Result<(), String> {
        let mut edges: HashMap<&str, Vec<&str>> = HashMap::new();
        for r in &self.rules {
            if let [only] = r.rhs.as_slice() {
                edges.entry(&r.lhs.name).or_default().push(&only.name);
            }
        }
        fn visit<'a>(
            n: &'a str,
            edges: &HashMap<&'a str, Vec<&'a str>>,
            stack: &mut Vec<&'a str>,
            done: &mut BTreeSet<&'a str>,
        ) -> Result<(), String> {
            if stack.contains(&n) {
                return Err(format!("unary rule cycle through `{n}`"));
            }
            if !done.insert(n) {
                return Ok(());
            }
            stack.push(n);
            for m in edges.get(n).into_iter().flatten() {
                visit(m, edges, stack, done)?;
            }
            stack.pop();
            Ok(())
        }
        let mut done = BTreeSet::new();
        let mut names: Vec<&str> = edges.keys().copied().collect();
        names.sort_unstable();
        for n in names {
            visit(n, &edges, &mut Vec::new(), &mut done)?;
        }
        Ok(())
    }
}

fn parse_symbol(cur: &mut Cursor<'_>, vars: &mut VarScope) -> Result<Symbol, GrammarError> {
    let name = match cur.peek() {
        Some(Tok::Ident(s)) if !syntax::is_var_name(s) => s.clone(),
        _ => return Err(cur.unexpected("symbol").into()),
    };
    cur.advance();
    let args = if cur.peek() == Some(&Tok::LParen) {
        parse_args(cur, vars, false)?
            .into_iter()
            .map(|i| match i {
                Index::Var(v) => v,
                Index::Ground(_) => unreachable!("ground indices rejected by parse_args"),
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(Symbol { name, args })
}

/// One reading of a surface word: its stem and a description pattern
/// whose variables are numbered from zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    pub stem: String,
    pub desc: Description,
}

/// Surface word → readings. Lookup is lowercased.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MonolingualLexicon {
    entries: BTreeMap<String, Vec<LexEntry>>,
}

impl MonolingualLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, surface: &str, entry: LexEntry) {
        self.entries
            .entry(surface.to_lowercase())
            .or_default()
            .push(entry);
    }

    pub fn lookup(&self, surface: &str) -> &[LexEntry] {
        self.entries
            .get(&surface.to_lowercase())
            .map_or(&[], Vec::as_slice)
    }

    pub fn readings(&self) -> impl Iterator<Item = (&str, &LexEntry)> {
        self.entries
            .iter()
            .flat_map(|(w, es)| es.iter().map(move |e| (w.as_str(), e)))
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `lex surface -> stem :: desc.` or `lex word :: desc.`
    pub fn parse(src: &str) -> Result<Self, GrammarError> {
        let toks = syntax::tokenize(src)?;
        let mut cur = Cursor::new(&toks);
        let mut lex = MonolingualLexicon::new();
        while !cur.at_end() {
            match cur.advance() {
                Some(Tok::Ident(k)) if k == "lex" => {}
                _ => return Err(cur.error("expected `lex`").into()),
            }
            let surface = cur.word("surface word")?;
            let stem = if cur.eat(&Tok::Arrow) {
                cur.word("stem")?
            } else {
                surface.clone()
            };
            cur.expect(&Tok::ColonColon)?;
            let desc = parse_description(&mut cur, &mut VarScope::new(), false)?;
            cur.expect(&Tok::Dot)?;
            lex.insert(
                &surface,
                LexEntry {
                    stem: stem.to_lowercase(),
                    desc,
                },
            );
        }
        Ok(lex)
    }
}
