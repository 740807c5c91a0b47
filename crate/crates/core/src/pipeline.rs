//! Parse both sides of a sentence pair, transfer the source bag, match
//! it against the target bag and turn the match into new entries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::bag::{Bag, LexicalItem};
use crate::bilingual::BilingualEntry;
use crate::entries::{
    entry_pairs, is_novel, make_be_info, rank_candidates, CandidateEntrySet, Provenance, Ranking,
};
use crate::matcher::match_bags;
use crate::parser::{ParseError, Parser};
use crate::templates::TemplateDatabase;
use crate::transfer::{transfer, TransferError, TransferRules};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Source,
    Target,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Source => "source",
            Side::Target => "target",
        })
    }
}

/// Why a sentence pair produced nothing.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Failure {
    #[error("no parse ({side}): unknown words {}", words.join(", "))]
    UnknownWords { side: Side, words: Vec<String> },
    #[error("no parse ({0})")]
    NoParse(Side),
    /// `uncovered` lists items no rule covers on its own; it is empty when
    /// each item is coverable but no combination covers the whole bag.
    #[error("no cover: {}", describe_uncovered(uncovered))]
    NoCover { uncovered: Vec<LexicalItem> },
    #[error("no match: {transfers} transfer(s) against {target_parses} target parse(s)")]
    NoMatch { transfers: usize, target_parses: usize },
}

fn describe_uncovered(items: &[LexicalItem]) -> String {
    if items.is_empty() {
        return "no combination of rules covers the source bag".to_string();
    }
    items
        .iter()
        .map(|it| format!("{}:{}", it.word, it.desc))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Failure of a search that found no matching.
fn search_failure(no_cover: Option<Vec<LexicalItem>>, transfers: usize, target_parses: usize) -> Failure {
    if transfers > 0 {
        Failure::NoMatch {
            transfers,
            target_parses,
        }
    } else {
        Failure::NoCover {
            uncovered: no_cover.unwrap_or_default(),
        }
    }
}

impl Failure {
    pub fn stage(&self) -> &'static str {
        match self {
            Failure::UnknownWords { .. } | Failure::NoParse(_) => "no-parse",
            Failure::NoCover { .. } => "no-cover",
            Failure::NoMatch { .. } => "no-match",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Parses considered per side.
    pub max_parses: usize,
    /// Distinct candidate entry sets per pair.
    pub max_candidates: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_parses: 16,
            max_candidates: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Induction {
    Unique(CandidateEntrySet),
    /// Several distinct candidates, or a search cut short by a limit.
    Ambiguous {
        candidates: Vec<CandidateEntrySet>,
        truncated: bool,
    },
}

/// Parsers, templates and the bilingual lexicon for one language pair.
#[derive(Debug, Clone)]
pub struct Inducer {
    source: Parser,
    target: Parser,
    templates: TemplateDatabase,
    bilex: Vec<BilingualEntry>,
    rules: TransferRules,
    limits: Limits,
}

impl Inducer {
    pub fn new(
        source: Parser,
        target: Parser,
        templates: TemplateDatabase,
        bilex: Vec<BilingualEntry>,
        limits: Limits,
    ) -> Self {
        let rules = TransferRules::new(&bilex, templates.templates());
        Inducer {
            source,
            target,
            templates,
            bilex,
            rules,
            limits,
        }
    }

    pub fn source_parser(&self) -> &Parser {
        &self.source
    }

    pub fn target_parser(&self) -> &Parser {
        &self.target
    }

    pub fn templates(&self) -> &TemplateDatabase {
        &self.templates
    }

    pub fn bilex(&self) -> &[BilingualEntry] {
        &self.bilex
    }

    pub fn rules(&self) -> &TransferRules {
        &self.rules
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn set_limits(&mut self, limits: Limits) {
        self.limits = limits;
    }

    /// Adds entries to the lexicon, skipping ones it already has.
    pub fn commit(&mut self, entries: &[BilingualEntry]) -> Vec<BilingualEntry> {
        let mut added = Vec::new();
        for e in entries {
            if is_novel(e, &self.bilex) {
                self.bilex.push(e.clone());
                self.rules.push_entry(e.clone());
                added.push(e.clone());
            }
        }
        added
    }

    fn parse_side(&self, side: Side, sentence: &str) -> Result<(Vec<Bag>, bool), Failure> {
        let parser = match side {
            Side::Source => &self.source,
            Side::Target => &self.target,
        };
        let parses = parser.parse_sentence(sentence).map_err(|e| match e {
            ParseError::Empty => Failure::NoParse(side),
            ParseError::UnknownWords(words) => Failure::UnknownWords { side, words },
        })?;
        let truncated = parses.total() > self.limits.max_parses as u128;
        let bags: Vec<Bag> = parses
            .take(self.limits.max_parses)
            .map(|d| d.get_bag())
            .collect();
        if bags.is_empty() {
            return Err(Failure::NoParse(side));
        }
        Ok((bags, truncated))
    }

    /// Every distinct candidate entry set for a sentence pair, searching
    /// all source parses, transfers, target parses and matchings.
    pub fn make_entries(&self, source: &str, target: &str) -> Result<Induction, Failure> {
        let (sources, src_cut) = self.parse_side(Side::Source, source)?;
        let (targets, tgt_cut) = self.parse_side(Side::Target, target)?;
        let mut truncated = src_cut || tgt_cut;
        let mut candidates: Vec<CandidateEntrySet> = Vec::new();
        let mut seen = BTreeSet::new();
        let mut no_cover = None;
        let mut transfers = 0;
        'search: for (si, sbag) in sources.iter().enumerate() {
            let derivations = match transfer(sbag, &self.rules) {
                Ok(d) => d,
                Err(TransferError::NoCover(items)) => {
                    no_cover.get_or_insert(items);
                    continue;
                }
            };
            for (xi, deriv) in derivations.enumerate() {
                transfers += 1;
                for (ti, tbag) in targets.iter().enumerate() {
                    for (mi, m) in match_bags(tbag, &deriv.bag).enumerate() {
                        let cand = CandidateEntrySet::new(
                            make_be_info(sbag, &m, &deriv, &self.rules),
                            entry_pairs(sbag, &m, &deriv, &self.rules),
                            &self.templates,
                            &self.bilex,
                            Provenance {
                                source_parse: si,
                                transfer: xi,
                                target_parse: ti,
                                matching: mi,
                            },
                        )
                        .expect("transfer only uses templates from the database");
                        if seen.insert(cand.key()) {
                            if candidates.len() == self.limits.max_candidates {
                                truncated = true;
                                break 'search;
                            }
                            candidates.push(cand);
                        }
                    }
                }
            }
        }
        if candidates.is_empty() {
            return Err(search_failure(no_cover, transfers, targets.len()));
        }
        if candidates.len() == 1 && !truncated {
            return Ok(Induction::Unique(candidates.remove(0)));
        }
        Ok(Induction::Ambiguous {
            candidates,
            truncated,
        })
    }
}

/// How ambiguous pairs are settled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Commit nothing; write the candidates for review.
    #[default]
    Block,
    /// Commit the best-scoring candidate unless the best score is shared.
    Rank,
    /// Ask the user.
    Interactive,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Unique(CandidateEntrySet),
    /// Ambiguous, settled by ranking or by the user; `candidates` are in
    /// ranked order.
    Resolved {
        chosen: usize,
        candidates: Vec<CandidateEntrySet>,
    },
    /// Ambiguous and left for review; candidates in ranked order.
    Blocked {
        candidates: Vec<CandidateEntrySet>,
        truncated: bool,
    },
    Failed(Failure),
}

impl Outcome {
    /// The candidate whose entries get committed, if any.
    pub fn chosen(&self) -> Option<&CandidateEntrySet> {
        match self {
            Outcome::Unique(c) => Some(c),
            Outcome::Resolved { chosen, candidates } => candidates.get(*chosen),
            _ => None,
        }
    }
}

/// Settles an induction result. `choose` is consulted in interactive mode
/// with the ranked candidates and returns an index or `None` to skip.
pub fn resolve(
    result: Result<Induction, Failure>,
    mode: Mode,
    inducer: &Inducer,
    choose: &mut dyn FnMut(&[CandidateEntrySet]) -> Option<usize>,
) -> Outcome {
    let (candidates, truncated) = match result {
        Err(f) => return Outcome::Failed(f),
        Ok(Induction::Unique(c)) => return Outcome::Unique(c),
        Ok(Induction::Ambiguous {
            candidates,
            truncated,
        }) => (candidates, truncated),
    };
    let ranking = rank_candidates(candidates, inducer.templates(), inducer.bilex());
    match (mode, ranking) {
        (Mode::Rank, Ranking::Ordered(candidates)) if !truncated => Outcome::Resolved {
            chosen: 0,
            candidates,
        },
        (Mode::Interactive, r) => {
            let candidates = match r {
                Ranking::Ordered(c) | Ranking::Blocked(c) => c,
            };
            match choose(&candidates) {
                Some(chosen) if chosen < candidates.len() => Outcome::Resolved { chosen, candidates },
                _ => Outcome::Blocked {
                    candidates,
                    truncated,
                },
            }
        }
        (_, r) => Outcome::Blocked {
            candidates: match r {
                Ranking::Ordered(c) | Ranking::Blocked(c) => c,
            },
            truncated,
        },
    }
}

/// One aligned sentence pair and its 1-based line in the corpus file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusPair {
    pub line: usize,
    pub source: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct CorpusError {
    pub line: usize,
    pub message: String,
}

/// Reads `source<TAB>target` lines; blank lines and `#` comments are skipped.
pub fn parse_corpus(text: &str) -> Result<Vec<CorpusPair>, CorpusError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: &str| CorpusError {
            line: i + 1,
            message: message.to_string(),
        };
        let mut parts = line.split('\t');
        let (Some(source), Some(target), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err("expected exactly one tab between source and target"));
        };
        if source.trim().is_empty() || target.trim().is_empty() {
            return Err(err("empty sentence"));
        }
        pairs.push(CorpusPair {
            line: i + 1,
            source: source.trim().to_string(),
            target: target.trim().to_string(),
        });
    }
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairReport {
    pub pair: CorpusPair,
    pub outcome: Outcome,
    /// Entries this pair added to the output, in derivation order.
    pub committed: Vec<BilingualEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub mode: Mode,
    /// Make each pair's entries visible to the pairs after it.
    pub feedback: bool,
    /// Worker threads; only used without feedback.
    pub jobs: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            mode: Mode::Block,
            feedback: true,
            jobs: 1,
        }
    }
}

fn induce_all(inducer: &Inducer, pairs: &[CorpusPair], jobs: usize) -> Vec<Result<Induction, Failure>> {
    let run = |p: &CorpusPair| inducer.make_entries(&p.source, &p.target);
    if jobs <= 1 || pairs.len() <= 1 {
        return pairs.iter().map(run).collect();
    }
    let chunk = pairs.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = pairs
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(run).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

/// Runs every pair in corpus order. With feedback, committed entries go
/// into `inducer` before the next pair; without, all pairs see the initial
/// lexicon and the union of their entries is committed at the end.
pub fn run_corpus(
    inducer: &mut Inducer,
    pairs: &[CorpusPair],
    opts: RunOptions,
    choose: &mut dyn FnMut(&CorpusPair, &[CandidateEntrySet]) -> Option<usize>,
) -> Vec<PairReport> {
    let mut reports = Vec::with_capacity(pairs.len());
    if opts.feedback {
        for p in pairs {
            let result = inducer.make_entries(&p.source, &p.target);
            let outcome = resolve(result, opts.mode, inducer, &mut |c| choose(p, c));
            let committed = match outcome.chosen() {
                Some(c) => inducer.commit(&c.entries),
                None => Vec::new(),
            };
            reports.push(PairReport {
                pair: p.clone(),
                outcome,
                committed,
            });
        }
        return reports;
    }
    let results = induce_all(inducer, pairs, opts.jobs);
    let mut added: Vec<BilingualEntry> = Vec::new();
    for (p, result) in pairs.iter().zip(results) {
        let outcome = resolve(result, opts.mode, inducer, &mut |c| choose(p, c));
        let mut committed = Vec::new();
        if let Some(c) = outcome.chosen() {
            for e in &c.entries {
                if is_novel(e, &added) {
                    added.push(e.clone());
                    committed.push(e.clone());
                }
            }
        }
        reports.push(PairReport {
            pair: p.clone(),
            outcome,
            committed,
        });
    }
    inducer.commit(&added);
    reports
}

/// Counts over a corpus run; `pairs = unique + ambiguous + failed`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Summary {
    pub pairs: usize,
    pub unique: usize,
    /// Ambiguous pairs, whether settled or blocked.
    pub ambiguous: usize,
    /// Ambiguous pairs settled by ranking or by the user.
    pub resolved: usize,
    pub failed: usize,
    pub failed_by_stage: BTreeMap<&'static str, usize>,
    pub entries: usize,
}

impl Summary {
    pub fn of(reports: &[PairReport]) -> Self {
        let mut s = Summary {
            pairs: reports.len(),
            ..Summary::default()
        };
        for r in reports {
            s.entries += r.committed.len();
            match &r.outcome {
                Outcome::Unique(_) => s.unique += 1,
                Outcome::Resolved { .. } => {
                    s.ambiguous += 1;
                    s.resolved += 1;
                }
                Outcome::Blocked { .. } => s.ambiguous += 1,
                Outcome::Failed(f) => {
                    s.failed += 1;
                    *s.failed_by_stage.entry(f.stage()).or_default() += 1;
                }
            }
        }
        s
    }

    /// Pairs that produced a committed candidate.
    pub fn succeeded(&self) -> usize {
        self.unique + self.resolved
    }
}

impl fmt::Display for Summary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pairs\t{}", self.pairs)?;
        writeln!(f, "unique\t{}", self.unique)?;
        writeln!(f, "ambiguous\t{}", self.ambiguous)?;
        writeln!(f, "resolved\t{}", self.resolved)?;
        writeln!(f, "failed\t{}", self.failed)?;
        for stage in ["no-parse", "no-cover", "no-match"] {
            let n = self.failed_by_stage.get(stage).copied().unwrap_or(0);
            writeln!(f, "failed.{stage}\t{n}")?;
        }
        writeln!(f, "entries\t{}", self.entries)
    }
}

/// Committed entries of all pairs in corpus order, in file syntax.
pub fn entries_text(reports: &[PairReport]) -> String {
    reports
        .iter()
        .flat_map(|r| &r.committed)
        .map(|e| format!("{e}\n"))
        .collect()
}

/// Candidate sets of every blocked pair.
pub fn review_text(reports: &[PairReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let Outcome::Blocked {
            candidates,
            truncated,
        } = &r.outcome
        else {
            continue;
        };
        let _ = writeln!(
            s,
            "# line {}: {} | {}{}",
            r.pair.line,
            r.pair.source,
            r.pair.target,
            if *truncated { " (search truncated)" } else { "" }
        );
        for (k, c) in candidates.iter().enumerate() {
            let score = c.score.as_ref().map_or_else(|| "-".to_string(), |q| q.to_string());
            let _ = writeln!(
                s,
                "# candidate {} score={} provenance={}",
                k + 1,
                score,
                c.provenance
            );
            s.push_str(&c.serialize());
        }
        s.push('\n');
    }
    s
}

fn section(out: &mut String, title: &str, bag: &Bag) {
    let _ = writeln!(out, "{title}");
    out.push_str(&bag.table());
    out.push('\n');
}

/// Bag tables for both parses, every transfer and every matching.
pub fn match_dump(inducer: &Inducer, source: &str, target: &str) -> Result<(String, usize), Failure> {
    let (sources, _) = inducer.parse_side(Side::Source, source)?;
    let (targets, _) = inducer.parse_side(Side::Target, target)?;
    let mut out = String::new();
    let mut total = 0;
    let mut transfers = 0;
    let mut no_cover = None;
    for (ti, tbag) in targets.iter().enumerate() {
        section(&mut out, &format!("Target bag {}", ti + 1), tbag);
    }
    for (si, sbag) in sources.iter().enumerate() {
        section(&mut out, &format!("Source bag {}", si + 1), sbag);
        let derivations = match transfer(sbag, inducer.rules()) {
            Ok(d) => d,
            Err(TransferError::NoCover(items)) => {
                no_cover.get_or_insert(items);
                continue;
            }
        };
        for (xi, deriv) in derivations.enumerate() {
            transfers += 1;
            section(
                &mut out,
                &format!("Transfer {}.{}", si + 1, xi + 1),
                &deriv.bag,
            );
            for (ti, tbag) in targets.iter().enumerate() {
                for m in match_bags(tbag, &deriv.bag) {
                    total += 1;
                    let _ = writeln!(
                        out,
                        "Matching {} (transfer {}.{}, target bag {})",
                        total,
                        si + 1,
                        xi + 1,
                        ti + 1
                    );
                    let _ = writeln!(out, "{}\n{}\n", m.item_map_string(), m.index_map_string());
                }
            }
        }
    }
    if total == 0 {
        return Err(search_failure(no_cover, transfers, targets.len()));
    }
    let _ = writeln!(out, "matchings\t{total}");
    Ok((out, total))
}
