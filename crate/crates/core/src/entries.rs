//! Building bilingual entries from a successful match, and choosing
//! between competing candidate entry sets.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::bag::{Bag, TemplateId};
use crate::bilingual::{instantiate, BilingualEntry, EntryTriple, InstantiateError, PatternItem};
use crate::matcher::Matching;
use crate::templates::TemplateDatabase;
use crate::term::VarGen;
use crate::transfer::{TransferDerivation, TransferRule, TransferRules};

/// Source words paired with target words.
pub type WordPair = (Vec<String>, Vec<String>);

fn words(bag: &Bag, ids: &[crate::bag::ItemId]) -> Vec<String> {
    ids.iter()
        .map(|id| bag.get(*id).map_or_else(String::new, |it| it.word.to_string()))
        .collect()
}

/// One triple per template-based cell, in derivation order.
pub fn make_be_info(
    src: &Bag,
    matched: &Matching,
    tderiv: &TransferDerivation,
    rules: &TransferRules,
) -> Vec<EntryTriple> {
    tderiv
        .template_cells(rules)
        .map(|(cell, t)| EntryTriple {
            source_words: words(src, &cell.consumed),
            target_words: words(&matched.unified_bag, &cell.produced),
            template: t.id.clone(),
        })
        .collect()
}

/// Word pairs of the cells that used existing entries.
pub fn entry_pairs(
    src: &Bag,
    matched: &Matching,
    tderiv: &TransferDerivation,
    rules: &TransferRules,
) -> Vec<WordPair> {
    tderiv
        .cells
        .iter()
        .filter(|c| matches!(rules.get(c.rule), TransferRule::Entry(_)))
        .map(|c| (words(src, &c.consumed), words(&matched.unified_bag, &c.produced)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EntryError {
    #[error("unknown template {0}")]
    UnknownTemplate(TemplateId),
    #[error(transparent)]
    Instantiate(#[from] InstantiateError),
}

/// Instantiates each triple's template, in canonical variable form.
pub fn be_info_to_entries(
    triples: &[EntryTriple],
    db: &TemplateDatabase,
) -> Result<Vec<BilingualEntry>, EntryError> {
    let mut vars = VarGen::new();
    triples
        .iter()
        .map(|tr| {
            let t = db
                .get(&tr.template)
                .ok_or_else(|| EntryError::UnknownTemplate(tr.template.clone()))?;
            Ok(instantiate(t, tr, &mut vars)?.canonical())
        })
        .collect()
}

/// True unless some entry of `bilex` is the same equivalence on both sides.
pub fn is_novel(e: &BilingualEntry, bilex: &[BilingualEntry]) -> bool {
    !bilex.iter().any(|b| b.alpha_equivalent(e))
}

/// Where a candidate came from: indices into the enumerations of source
/// parses, transfer derivations, target parses and matchings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Provenance {
    pub source_parse: usize,
    pub transfer: usize,
    pub target_parse: usize,
    pub matching: usize,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "src{}.xfer{}.tgt{}.match{}",
            self.source_parse, self.transfer, self.target_parse, self.matching
        )
    }
}

/// One way of explaining a sentence pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateEntrySet {
    /// Triples of all template-based cells.
    pub triples: Vec<EntryTriple>,
    /// Word pairs of entry-based cells.
    pub entry_pairs: Vec<WordPair>,
    /// Entries built from `triples` that are not in the lexicon yet,
    /// parallel to `novel_triples`.
    pub entries: Vec<BilingualEntry>,
    pub novel_triples: Vec<EntryTriple>,
    pub provenance: Provenance,
    pub score: Option<BigRational>,
}

impl CandidateEntrySet {
    /// Builds a candidate, keeping only entries that are new to `bilex`
    /// (and not repeated within the candidate).
    pub fn new(
        triples: Vec<EntryTriple>,
        entry_pairs: Vec<WordPair>,
        db: &TemplateDatabase,
        bilex: &[BilingualEntry],
        provenance: Provenance,
    ) -> Result<Self, EntryError> {
        let built = be_info_to_entries(&triples, db)?;
        let mut entries: Vec<BilingualEntry> = Vec::new();
        let mut novel_triples = Vec::new();
        for (e, t) in built.into_iter().zip(&triples) {
            if is_novel(&e, bilex) && is_novel(&e, &entries) {
                entries.push(e);
                novel_triples.push(t.clone());
            }
        }
        Ok(CandidateEntrySet {
            triples,
            entry_pairs,
            entries,
            novel_triples,
            provenance,
            score: None,
        })
    }

    /// Identity for deduplication: the set of new entries.
    pub fn key(&self) -> BTreeSet<String> {
        self.entries.iter().map(key_string).collect()
    }

    /// Every word pair this candidate asserts or relies on.
    pub fn word_pairs(&self) -> BTreeSet<WordPair> {
        self.triples
            .iter()
            .map(|t| (t.source_words.clone(), t.target_words.clone()))
            .chain(self.entry_pairs.iter().cloned())
            .collect()
    }

    /// New entries in file syntax, one per line.
    pub fn serialize(&self) -> String {
        self.entries.iter().map(|e| format!("{e}\n")).collect()
    }
}

fn key_string(e: &BilingualEntry) -> String {
    let (lhs, rhs, m) = e.key();
    let side = |s: &[PatternItem]| s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" & ");
    format!("{} <-> {} \\\\ {}", side(&lhs), side(&rhs), m.unwrap_or_default())
}

/// Drops candidates whose new entries repeat an earlier candidate's.
pub fn dedup_candidates(cands: Vec<CandidateEntrySet>) -> Vec<CandidateEntrySet> {
    let mut seen = BTreeSet::new();
    cands.into_iter().filter(|c| seen.insert(c.key())).collect()
}

/// Multiplier applied by the related-entry heuristic.
pub const BOOST: u32 = 2;

/// Smoothed relative frequency of a template: the mean of its relative
/// frequency in the lexicon and the uniform distribution over templates.
/// Scaling all counts by a constant leaves it unchanged.
pub fn template_weight(db: &TemplateDatabase, id: &TemplateId) -> BigRational {
    let t = BigInt::from(db.len().max(1));
    let n = BigInt::from(db.total_count());
    if n.is_zero() {
        return BigRational::new(BigInt::one(), t);
    }
    let c = BigInt::from(db.count(id));
    BigRational::new(&t * c + &n, BigInt::from(2) * n * t)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Ranking {
    /// Best first; every candidate carries a score.
    Ordered(Vec<CandidateEntrySet>),
    /// The best score is shared; scored candidates in ranked order.
    Blocked(Vec<CandidateEntrySet>),
}

impl Ranking {
    pub fn candidates(&self) -> &[CandidateEntrySet] {
        match self {
            Ranking::Ordered(c) | Ranking::Blocked(c) => c,
        }
    }
}

/// Scores candidates by the product of their new triples' template
/// weights, adjusted by related lexicon entries:
///
/// * a candidate pair already in the lexicon multiplies that candidate's
///   score by [`BOOST`];
/// * a candidate pair whose source words the lexicon translates otherwise
///   multiplies the score of every competitor without that pair by
///   [`BOOST`].
pub fn rank_candidates(
    cands: Vec<CandidateEntrySet>,
    db: &TemplateDatabase,
    bilex: &[BilingualEntry],
) -> Ranking {
    let known: BTreeSet<WordPair> = bilex
        .iter()
        .map(|e| (e.source_words(), e.target_words()))
        .collect();
    let pairs: Vec<BTreeSet<WordPair>> = cands.iter().map(|c| c.word_pairs()).collect();
    let beta = BigRational::from_integer(BigInt::from(BOOST));
    let mut scores: Vec<BigRational> = cands
        .iter()
        .map(|c| {
            c.novel_triples
                .iter()
                .map(|t| template_weight(db, &t.template))
                .fold(BigRational::one(), |a, b| a * b)
        })
        .collect();
    for (i, ps) in pairs.iter().enumerate() {
        for p in ps {
            if known.contains(p) {
                scores[i] *= &beta;
            } else if known.iter().any(|(s, _)| *s == p.0) {
                for (j, other) in pairs.iter().enumerate() {
                    if j != i && !other.contains(p) {
                        scores[j] *= &beta;
                    }
                }
            }
        }
    }
    let mut scored: Vec<(CandidateEntrySet, String)> = cands
        .into_iter()
        .zip(scores)
        .map(|(mut c, s)| {
            c.score = Some(s);
            let text = c.serialize();
            (c, text)
        })
        .collect();
    scored.sort_by(|(a, ta), (b, tb)| match b.score.cmp(&a.score) {
        Ordering::Equal => ta.cmp(tb),
        o => o,
    });
    let tied = scored.len() >= 2 && scored[0].0.score == scored[1].0.score;
    let ordered = scored.into_iter().map(|(c, _)| c).collect();
    if tied {
        Ranking::Blocked(ordered)
    } else {
        Ranking::Ordered(ordered)
    }
}
