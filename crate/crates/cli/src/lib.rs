//! Commands behind the `bilex` binary.

use std::fs;
use std::io::{self, BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use bilex::bilingual::{BilingualEntry, BilingualFile, BilingualTemplate};
use bilex::bundled;
use bilex::entries::CandidateEntrySet;
use bilex::grammar::{Grammar, MonolingualLexicon};
use bilex::pipeline::{
    entries_text, match_dump, parse_corpus, review_text, run_corpus, CorpusPair, Inducer, Limits,
    Mode, RunOptions, Summary,
};
use bilex::templates::{coverage_report, coverage_tsv, extract_templates, TemplateDatabase};

#[derive(Debug, Parser)]
#[command(name = "bilex", version, about = "Induce bilingual lexical entries from aligned sentence pairs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Learn new bilingual entries from an aligned corpus.
    Induce(InduceArgs),
    /// Abstract a bilingual lexicon into counted templates.
    ExtractTemplates {
        #[arg(long)]
        bilex: PathBuf,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Incremental template coverage of a bilingual lexicon, as TSV.
    Coverage {
        #[arg(long)]
        bilex: PathBuf,
    },
    /// Show the bags, transfers and matchings for one sentence pair.
    Match {
        #[command(flatten)]
        resources: Resources,
        #[arg(long)]
        source: String,
        #[arg(long)]
        target: String,
    },
}

/// Grammars, lexicons and bilingual files. Anything omitted falls back to
/// the bundled English-Spanish fixtures.
#[derive(Debug, Args)]
pub struct Resources {
    /// Source grammar; the bundled English one if omitted
    #[arg(long)]
    pub src_grammar: Option<PathBuf>,
    /// Target grammar; the bundled Spanish one if omitted
    #[arg(long)]
    pub tgt_grammar: Option<PathBuf>,
    /// Source monolingual lexicon
    #[arg(long)]
    pub src_lex: Option<PathBuf>,
    /// Target monolingual lexicon
    #[arg(long)]
    pub tgt_lex: Option<PathBuf>,
    /// Templates, plus any closed-class entries.
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// Existing bilingual entries.
    #[arg(long)]
    pub bilex: Option<PathBuf>,
    /// Parses tried per sentence before giving up on uniqueness
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_parses: u32,
    /// Candidate entry sets kept per pair
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    pub max_candidates: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Block,
    Rank,
    Interactive,
}

#[derive(Debug, Args)]
pub struct InduceArgs {
    #[command(flatten)]
    pub resources: Resources,
    /// `source<TAB>target` per line.
    #[arg(long)]
    pub corpus: PathBuf,
    /// New entries; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Candidates of blocked pairs.
    #[arg(long)]
    pub review: Option<PathBuf>,
    /// Summary counts; standard error if omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Block)]
    pub mode: ModeArg,
    /// Process every pair against the initial lexicon.
    #[arg(long)]
    pub no_feedback: bool,
    /// Worker threads (with --no-feedback).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: u32,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_or(path: &Option<PathBuf>, bundled: &str) -> Result<(String, String)> {
    match path {
        Some(p) => Ok((read(p)?, p.display().to_string())),
        None => Ok((bundled.to_string(), "<bundled>".to_string())),
    }
}

fn bilingual(text: &str, name: &str) -> Result<BilingualFile> {
    BilingualFile::parse(text).with_context(|| name.to_string())
}

fn parser(grammar: &Option<PathBuf>, lexicon: &Option<PathBuf>, g: &str, l: &str) -> Result<bilex::parser::Parser> {
    let (gt, gn) = read_or(grammar, g)?;
    let (lt, ln) = read_or(lexicon, l)?;
    let grammar = Grammar::parse(&gt).with_context(|| gn.clone())?;
    let lexicon = MonolingualLexicon::parse(&lt).with_context(|| ln.clone())?;
    bilex::parser::Parser::new(grammar, lexicon).with_context(|| format!("{ln} against {gn}"))
}

impl Resources {
    pub fn load(&self) -> Result<Inducer> {
        let source = parser(&self.src_grammar, &self.src_lex, bundled::EN_GRAMMAR, bundled::EN_LEXICON)?;
        let target = parser(&self.tgt_grammar, &self.tgt_lex, bundled::ES_GRAMMAR, bundled::ES_LEXICON)?;
        let (tt, tn) = read_or(&self.templates, bundled::EN_ES)?;
        let mut file = bilingual(&tt, &tn)?;
        if let Some(p) = &self.bilex {
            let more = bilingual(&read(p)?, &p.display().to_string())?;
            file.entries.extend(more.entries);
            file.templates.extend(more.templates);
        }
        let templates: Vec<BilingualTemplate> = file.templates;
        let db = TemplateDatabase::new(templates)?;
        let limits = Limits {
            max_parses: self.max_parses as usize,
            max_candidates: self.max_candidates as usize,
        };
        Ok(Inducer::new(source, target, db, file.entries, limits))
    }
}

fn write_out(path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Shows numbered candidates and reads a choice: a number commits that
/// candidate, `s`, `skip` or end of input leaves the pair blocked.
pub fn interactive_resolve<R: BufRead, W: Write>(
    input: &mut R,
    output: &mut W,
    pair: &CorpusPair,
    candidates: &[CandidateEntrySet],
) -> io::Result<Option<usize>> {
    writeln!(output, "line {}: {} | {}", pair.line, pair.source, pair.target)?;
    for (k, c) in candidates.iter().enumerate() {
        let score = c.score.as_ref().map_or_else(|| "-".to_string(), |s| s.to_string());
        writeln!(output, "[{}] score={}", k + 1, score)?;
        for e in &c.entries {
            writeln!(output, "    {e}")?;
        }
    }
    loop {
        write!(output, "choose 1-{} or s to skip: ", candidates.len())?;
        output.flush()?;
        let mut line = String::new();
        if input.read_line(&mut line)? == 0 {
            return Ok(None);
        }
        let answer = line.trim();
        if answer == "s" || answer == "skip" {
            return Ok(None);
        }
        match answer.parse::<usize>() {
            Ok(k) if (1..=candidates.len()).contains(&k) => return Ok(Some(k - 1)),
            _ => writeln!(output, "not a choice: {answer}")?,
        }
    }
}

/// Runs `induce`; returns the process exit code.
pub fn induce(args: &InduceArgs) -> Result<u8> {
    let mut inducer = args.resources.load()?;
    let pairs = parse_corpus(&read(&args.corpus)?).with_context(|| args.corpus.display().to_string())?;
    let mut mode = match args.mode {
        ModeArg::Block => Mode::Block,
        ModeArg::Rank => Mode::Rank,
        ModeArg::Interactive => Mode::Interactive,
    };
    if mode == Mode::Interactive && !io::stdin().is_terminal() {
        eprintln!("warning: standard input is not a terminal; blocking ambiguous pairs instead");
        mode = Mode::Block;
    }
    let opts = RunOptions {
        mode,
        feedback: !args.no_feedback,
        jobs: args.jobs as usize,
    };
    let stdin = io::stdin();
    let mut choose = |p: &CorpusPair, c: &[CandidateEntrySet]| {
        interactive_resolve(&mut stdin.lock(), &mut io::stderr(), p, c).unwrap_or(None)
    };
    let reports = run_corpus(&mut inducer, &pairs, opts, &mut choose);
    let summary = Summary::of(&reports);
    write_out(&args.out, &entries_text(&reports))?;
    let review = review_text(&reports);
    match &args.review {
        Some(p) => fs::write(p, &review).with_context(|| format!("cannot write {}", p.display()))?,
        None if !review.is_empty() => {
            eprintln!("warning: {} ambiguous pair(s) blocked; pass --review to keep their candidates", summary.ambiguous - summary.resolved)
        }
        None => {}
    }
    for r in &reports {
        if let bilex::pipeline::Outcome::Failed(f) = &r.outcome {
            eprintln!("line {}: {f}", r.pair.line);
        }
    }
    match &args.report {
        Some(p) => fs::write(p, summary.to_string()).with_context(|| format!("cannot write {}", p.display()))?,
        None => eprint!("{summary}"),
    }
    Ok(if summary.succeeded() > 0 { 0 } else { 1 })
}

fn lexicon_entries(path: &Path) -> Result<Vec<BilingualEntry>> {
    Ok(bilingual(&read(path)?, &path.display().to_string())?.entries)
}

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Induce(args) => induce(&args),
        Command::ExtractTemplates { bilex, out } => {
            let db = extract_templates(&lexicon_entries(&bilex)?);
            let file = BilingualFile {
                entries: Vec::new(),
                templates: db.templates().to_vec(),
            };
            write_out(&out, &file.serialize())?;
            Ok(0)
        }
        Command::Coverage { bilex } => {
            let entries = lexicon_entries(&bilex)?;
            let db = extract_templates(&entries);
            let rows = coverage_report(&db, entries.len() as u64);
            print!("{}", coverage_tsv(&rows));
            Ok(0)
        }
        Command::Match {
            resources,
            source,
            target,
        } => {
            let inducer = resources.load()?;
            match match_dump(&inducer, &source, &target) {
                Ok((text, _)) => {
                    print!("{text}");
                    Ok(0)
                }
                Err(f) => {
                    println!("failed at {}: {f}", f.stage());
                    Ok(1)
                }
            }
        }
    }
}

/// Fails on an argument combination clap cannot express.
pub fn validate(cli: &Cli) -> Result<()> {
    if let Command::Induce(a) = &cli.command {
        if a.jobs > 1 && !a.no_feedback {
            bail!("--jobs needs --no-feedback");
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use bilex::pipeline::Induction;

    fn two_candidates() -> (CorpusPair, Vec<CandidateEntrySet>) {
        let pair = parse_corpus(include_str!("../../core/fixtures/two-adjectives.tsv"))
            .unwrap()
            .remove(0);
        let ind = bundled::inducer(bundled::EN_ES);
        let Ok(Induction::Ambiguous { candidates, .. }) = ind.make_entries(&pair.source, &pair.target) else {
            panic!("fixture should be ambiguous");
        };
        (pair, candidates)
    }

    #[test]
    fn prompt_accepts_an_index() {
        let (pair, cands) = two_candidates();
        let mut out = Vec::new();
        let got = interactive_resolve(&mut "x\n9\n1\n".as_bytes(), &mut out, &pair, &cands).unwrap();
        assert_eq!(got, Some(0));
        let shown = String::from_utf8(out).unwrap();
        assert!(shown.contains("[2] score=-"));
        assert_eq!(shown.matches("not a choice").count(), 2);
    }

    #[test]
    fn prompt_skip_and_eof() {
        let (pair, cands) = two_candidates();
        let mut sink = Vec::new();
        assert_eq!(interactive_resolve(&mut "skip\n".as_bytes(), &mut sink, &pair, &cands).unwrap(), None);
        assert_eq!(interactive_resolve(&mut "".as_bytes(), &mut sink, &pair, &cands).unwrap(), None);
    }
}
