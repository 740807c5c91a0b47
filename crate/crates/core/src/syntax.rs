//! Tokenizer and shared pieces of the line-oriented rule files
//! (grammars, monolingual lexicons, bilingual lexicons and templates).
//!
//! All three formats are sequences of `.`-terminated statements with `#`
//! comments running to end of line.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::term::{Description, Features, Index, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(u32),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Eq,
    Amp,
    Colon,
    ColonColon,
    Arrow,
    BiArrow,
    MacroSep,
    Dot,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBrace => f.write_str("`{`"),
            Tok::RBrace => f.write_str("`}`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::ColonColon => f.write_str("`::`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::BiArrow => f.write_str("`<->`"),
            Tok::MacroSep => f.write_str("`\\\\`"),
            Tok::Dot => f.write_str("`.`"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !"(){},=&:.<>\\#".contains(c)
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let mut out = Vec::new();
    for (lineno, line) in src.lines().enumerate() {
        let line_no = lineno + 1;
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            let err = |message: String| SyntaxError {
                line: line_no,
                col,
                message,
            };
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let starts = |s: &str| chars[i..].iter().copied().take(s.len()).eq(s.chars());
            let (tok, len) = if starts("<->") {
                (Tok::BiArrow, 3)
            } else if starts("->") {
                (Tok::Arrow, 2)
            } else if starts("::") {
                (Tok::ColonColon, 2)
            } else if starts("\\\\") {
                (Tok::MacroSep, 2)
            } else {
                match c {
                    '(' => (Tok::LParen, 1),
                    ')' => (Tok::RParen, 1),
                    '{' => (Tok::LBrace, 1),
                    '}' => (Tok::RBrace, 1),
                    ',' => (Tok::Comma, 1),
                    '=' => (Tok::Eq, 1),
                    '&' => (Tok::Amp, 1),
                    ':' => (Tok::Colon, 1),
                    '.' => (Tok::Dot, 1),
                    c if is_word_char(c) => {
                        let mut j = i;
                        while j < chars.len()
                            && is_word_char(chars[j])
                            && !(chars[j] == '-' && chars.get(j + 1) == Some(&'>'))
                        {
                            j += 1;
                        }
                        if j == i {
                            return Err(err("unexpected `-`".into()));
                        }
                        let text: String = chars[i..j].iter().collect();
                        let tok = if text.chars().all(|c| c.is_ascii_digit()) {
                            match text.parse::<u32>() {
                                Ok(n) => Tok::Int(n),
                                Err(_) => return Err(err(format!("integer `{text}` out of range"))),
                            }
                        } else {
                            Tok::Ident(text)
                        };
                        (tok, j - i)
                    }
                    other => return Err(err(format!("unexpected character `{other}`"))),
                }
            };
            out.push(Token {
                tok,
                line: line_no,
                col,
            });
            i += len;
        }
    }
    Ok(out)
}

pub fn is_var_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_uppercase()) || s == "_"
}

/// Variable names of one statement, numbered in order of first appearance.
#[derive(Debug, Default)]
pub struct VarScope {
    names: HashMap<String, VarId>,
    next: u32,
}

impl VarScope {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&mut self, name: &str) -> VarId {
        if name == "_" {
            return self.fresh();
        }
        if let Some(v) = self.names.get(name) {
            return *v;
        }
        let v = self.fresh();
        self.names.insert(name.to_string(), v);
        v
    }

    pub fn fresh(&mut self) -> VarId {
        let v = VarId(self.next);
        self.next += 1;
        v
    }

    pub fn count(&self) -> u32 {
        self.next
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains_key(name)
    }
}

/// Cursor over a token stream with positioned errors.
pub struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(toks: &'a [Token]) -> Self {
        Cursor { toks, pos: 0 }
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn peek_at(&self, ahead: usize) -> Option<&'a Tok> {
        self.toks.get(self.pos + ahead).map(|t| &t.tok)
    }

    pub fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map_or(1, |t| t.line)
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        let (line, col) = match self.toks.get(self.pos) {
            Some(t) => (t.line, t.col),
            None => self.toks.last().map_or((1, 1), |t| (t.line, t.col + 1)),
        };
        SyntaxError {
            line,
            col,
            message: message.into(),
        }
    }

    pub fn advance(&mut self) -> Option<&'a Tok> {
        let t = self.toks.get(self.pos).map(|t| &t.tok);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<(), SyntaxError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    pub fn unexpected(&self, wanted: &str) -> SyntaxError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {t}")),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    /// An identifier or an integer, as text.
    pub fn word(&mut self, wanted: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s.clone())
            }
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(n.to_string())
            }
            _ => Err(self.unexpected(wanted)),
        }
    }

    /// Skips past the next `.`, for error recovery and diagnostics.
    pub fn skip_statement(&mut self) {
        while let Some(t) = self.advance() {
            if *t == Tok::Dot {
                break;
            }
        }
    }
}

/// `{k=v, k2=v2}`; the opening brace has not been consumed yet.
pub fn parse_attributes(cur: &mut Cursor<'_>) -> Result<Features, SyntaxError> {
    cur.expect(&Tok::LBrace)?;
    let mut feats = Features::new();
    if cur.eat(&Tok::RBrace) {
        return Ok(feats);
    }
    loop {
        let key = cur.word("feature name")?;
        cur.expect(&Tok::Eq)?;
        let value = cur.word("feature value")?;
        if feats.insert(key.clone(), value).is_some() {
            return Err(cur.error(format!("duplicate feature `{key}`")));
        }
        if cur.eat(&Tok::RBrace) {
            return Ok(feats);
        }
        cur.expect(&Tok::Comma)?;
    }
}

/// Index argument list `(A, B, 0)` or `()`.
pub fn parse_args(
    cur: &mut Cursor<'_>,
    vars: &mut VarScope,
    allow_ground: bool,
) -> Result<Vec<Index>, SyntaxError> {
    cur.expect(&Tok::LParen)?;
    let mut args = Vec::new();
    if cur.eat(&Tok::RParen) {
        return Ok(args);
    }
    loop {
        match cur.peek() {
            Some(Tok::Ident(name)) if is_var_name(name) => {
                cur.advance();
                args.push(Index::Var(vars.get(name)));
            }
            Some(Tok::Int(n)) if allow_ground => {
                cur.advance();
                args.push(Index::Ground(*n));
            }
            _ => return Err(cur.unexpected("index variable")),
        }
        if cur.eat(&Tok::RParen) {
            return Ok(args);
        }
        cur.expect(&Tok::Comma)?;
    }
}

/// `category(args) {features}`; both the argument list and the feature
/// block are optional.
pub fn parse_description(
    cur: &mut Cursor<'_>,
    vars: &mut VarScope,
    allow_ground: bool,
) -> Result<Description, SyntaxError> {
    let category = match cur.peek() {
        Some(Tok::Ident(s)) if !is_var_name(s) => {
            cur.advance();
            s.clone()
        }
        _ => return Err(cur.unexpected("category")),
    };
    let args = if cur.peek() == Some(&Tok::LParen) {
        parse_args(cur, vars, allow_ground)?
    } else {
        Vec::new()
    };
    let features = if cur.peek() == Some(&Tok::LBrace) {
        parse_attributes(cur)?
    } else {
        Features::new()
    };
    Ok(Description {
        category,
        features,
        args,
    })
}
