//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and
//! exits non-zero if any fail.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use bilex::bag::{Bag, ItemId, LexicalItem, TemplateId, Word};
use bilex::bilingual::{instantiate, template_of, BilingualEntry, BilingualFile, PatternItem};
use bilex::bundled::{self, WORKED_SOURCE, WORKED_TARGET};
use bilex::entries::{rank_candidates, Ranking};
use bilex::matcher::{match_bags, match_bags_oracle, Matching};
use bilex::pipeline::{Induction, Inducer, Limits};
use bilex::templates::{coverage_report, extract_templates, TemplateDatabase};
use bilex::term::{Description, Index, VarGen};
use bilex::transfer::{oracle, transfer, TransferRules};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tempfile::TempDir;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn bilex_cmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bilex")).args(args).output().expect("run bilex")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const WORKED_ENTRIES: &str = "
    entry fat :: adjective(A) <-> gordo :: adj(A).
    entry man :: noun(C) {count=+} <-> hombre :: n(C) \\\\ trans_noun.
    entry kick :: trans_verb(F,G,H) & out :: advparticle(F) <-> echar :: v(F,G,H) {subcat=acc} \\\\ trans_verb.
    entry black :: adjective(J) <-> negro :: adj(J).
    entry dog :: noun(L) {count=+} <-> perro :: n(L) \\\\ trans_noun.
";

const WORKED_TRIPLES: [&str; 5] = [
    "be([fat],[gordo],adj/adj)",
    "be([man],[hombre],cn/n)",
    "be([kick,out],[echar],tv+adv/tv)",
    "be([black],[negro],adj/adj)",
    "be([dog],[perro],cn/n)",
];

fn same_entries(got: &[BilingualEntry], want: &[BilingualEntry]) -> Result<(), String> {
    ensure(got.len() == want.len(), || format!("{} entries, want {}", got.len(), want.len()))?;
    for w in want {
        ensure(got.iter().any(|g| g.alpha_equivalent(w)), || format!("missing {w}"))?;
    }
    Ok(())
}

fn worked_example(dir: &TempDir) -> Check {
    let ind = bundled::inducer(bundled::EN_ES);
    let Ok(Induction::Unique(c)) = ind.make_entries(WORKED_SOURCE, WORKED_TARGET) else {
        return Err("library induction is not unique".into());
    };
    let triples: Vec<String> = c.triples.iter().map(|t| t.to_string()).collect();
    ensure(triples == WORKED_TRIPLES, || format!("triples {triples:?}"))?;
    let want = BilingualFile::parse(WORKED_ENTRIES).unwrap().entries;
    same_entries(&c.entries, &want)?;

    let out = dir.path().join("worked.bil");
    let start = Instant::now();
    let run = bilex_cmd(&["induce", "--corpus", path(&fixture("worked.tsv")), "--out", path(&out)]);
    let took = start.elapsed();
    ensure(run.status.success(), || format!("induce exited {}", run.status))?;
    let file = BilingualFile::parse(&fs::read_to_string(&out).unwrap()).map_err(|e| e.to_string())?;
    same_entries(&file.entries, &want)?;
    ensure(took < Duration::from_secs(1), || format!("induce took {took:?}"))?;
    Ok(format!("5 triples, 5 entries; cli run {took:.2?}"))
}

struct Table {
    rows: Vec<(String, String, String, Vec<String>)>,
}

impl Table {
    fn parse(text: &str) -> Table {
        let rows = text
            .lines()
            .filter(|l| !l.starts_with("Id"))
            .map(|l| {
                let f: Vec<&str> = l.split_whitespace().collect();
                let idx = f[3].trim_matches(|c| c == '[' || c == ']');
                (
                    f[0].to_string(),
                    f[1].to_string(),
                    f[2].to_string(),
                    idx.split(',').map(str::to_string).collect(),
                )
            })
            .collect();
        Table { rows }
    }
}

fn pairs(text: &str) -> BTreeSet<(String, String)> {
    text.trim_matches(|c| c == '{' || c == '}')
        .split(">,<")
        .map(|p| {
            let p = p.trim_matches(|c| c == '<' || c == '>');
            let (a, b) = p.split_once(',').unwrap();
            (a.to_string(), b.to_string())
        })
        .collect()
}

/// Records `a -> b` in a renaming that must stay a bijection.
fn rename(fwd: &mut BTreeMap<String, String>, back: &mut BTreeMap<String, String>, a: &str, b: &str) -> Result<(), String> {
    let f = fwd.entry(a.to_string()).or_insert_with(|| b.to_string()).clone();
    let r = back.entry(b.to_string()).or_insert_with(|| a.to_string()).clone();
    ensure(f == b && r == a, || format!("renaming {a}->{b} clashes with {a}->{f} / {r}->{b}"))
}

/// Reference transfer bag, target bag and matching for the worked pair, with
/// their own id and index numbering.
const REF_TARGET: &str = "1 el d [0]\n2 hombre n [0]\n3 gordo adj [0]\n4 echar v [1,0,13]\n\
                          5 el d [13]\n6 perro n [13]\n7 negro adj [13]";
const REF_TRANSFER: &str = "2-1 el d [A]\n3-2 word(adj/adj,1) adj [A]\n4-3 word(cn/n,1) n [A]\n\
                            1-4 word(tv+adv/tv,1) v [B,A,I]\n5-6 el d [I]\n6-7 word(adj/adj,1) adj [I]\n\
                            7-8 word(cn/n,1) n [I]";
const REF_ITEMS: &str = "{<2-1,1>,<3-2,3>,<4-3,2>,<1-4,4>,<5-6,5>,<6-7,7>,<7-8,6>}";
const REF_INDICES: &str = "{<A,0>,<B,1>,<I,13>}";

fn section<'a>(dump: &'a str, header: &str) -> &'a str {
    let start = dump.find(header).unwrap() + header.len() + 1;
    let rest = &dump[start..];
    &rest[..rest.find("\n\n").unwrap_or(rest.len())]
}

fn worked_matching() -> Check {
    let run = bilex_cmd(&["match", "--source", WORKED_SOURCE, "--target", WORKED_TARGET]);
    ensure(run.status.success(), || format!("match exited {}", run.status))?;
    let dump = String::from_utf8(run.stdout).unwrap();
    ensure(dump.ends_with("matchings\t1\n"), || "not exactly one matching".into())?;
    let m_start = dump.find("Matching 1 (").unwrap();
    let m_lines: Vec<&str> = dump[m_start..].lines().collect();
    let header = m_lines[0];
    let (xfer, tgt) = header
        .trim_start_matches("Matching 1 (transfer ")
        .trim_end_matches(')')
        .split_once(", target bag ")
        .unwrap();
    let ours_transfer = Table::parse(section(&dump, &format!("Transfer {xfer}")));
    let ours_target = Table::parse(section(&dump, &format!("Target bag {tgt}")));
    let ref_transfer = Table::parse(REF_TRANSFER);
    let ref_target = Table::parse(REF_TARGET);

    // ids correspond through the source token they come from, variables and
    // grounds through the positions they occupy in corresponding items
    let (mut ids, mut ids_back) = (BTreeMap::new(), BTreeMap::new());
    let (mut vars, mut vars_back) = (BTreeMap::new(), BTreeMap::new());
    let (mut grounds, mut grounds_back) = (BTreeMap::new(), BTreeMap::new());
    ensure(ours_transfer.rows.len() == ref_transfer.rows.len(), || "transfer sizes differ".into())?;
    for r in &ref_transfer.rows {
        let src = r.0.split_once('-').unwrap().1;
        let o = ours_transfer
            .rows
            .iter()
            .find(|o| o.0.split_once('-').unwrap().1 == src)
            .ok_or_else(|| format!("no transfer item from source token {src}"))?;
        ensure((&r.1, &r.2) == (&o.1, &o.2), || format!("{} vs {}", r.0, o.0))?;
        rename(&mut ids, &mut ids_back, &r.0, &o.0)?;
        ensure(r.3.len() == o.3.len(), || format!("arity of {}", r.0))?;
        for (a, b) in r.3.iter().zip(&o.3) {
            rename(&mut vars, &mut vars_back, a, b)?;
        }
    }
    ensure(ours_target.rows.len() == ref_target.rows.len(), || "target sizes differ".into())?;
    for (r, o) in ref_target.rows.iter().zip(&ours_target.rows) {
        ensure(r.0 == o.0 && r.1 == o.1 && r.2 == o.2, || format!("target item {} vs {}", r.0, o.0))?;
        for (a, b) in r.3.iter().zip(&o.3) {
            rename(&mut grounds, &mut grounds_back, a, b)?;
        }
    }
    let items: BTreeSet<(String, String)> =
        pairs(REF_ITEMS).into_iter().map(|(t, g)| (ids[&t].clone(), g)).collect();
    let indices: BTreeSet<(String, String)> = pairs(REF_INDICES)
        .into_iter()
        .map(|(v, g)| (vars[&v].clone(), grounds[&g].clone()))
        .collect();
    ensure(items == pairs(m_lines[1]), || format!("item map {}", m_lines[1]))?;
    ensure(indices == pairs(m_lines[2]), || format!("index map {}", m_lines[2]))?;
    Ok(format!("{} {}", m_lines[1], m_lines[2]))
}

const CATS: [(&str, usize); 5] = [("d", 1), ("adj", 1), ("n", 1), ("v", 3), ("p", 1)];
const TWORDS: [&str; 3] = ["el", "la", "x"];

fn random_item(rng: &mut StdRng) -> (usize, Vec<u32>, usize) {
    let cat = rng.random_range(0..CATS.len());
    let args = (0..CATS[cat].1).map(|_| rng.random_range(0..3)).collect();
    (cat, args, rng.random_range(0..TWORDS.len()))
}

fn random_bag_pair(rng: &mut StdRng) -> (Bag, Bag) {
    let n = rng.random_range(1..=6);
    let specs: Vec<_> = (0..n).map(|_| random_item(rng)).collect();
    let target = Bag::new(
        specs
            .iter()
            .enumerate()
            .map(|(p, (cat, args, w))| LexicalItem {
                id: ItemId::token(p as u32 + 1),
                word: Word::lit(TWORDS[*w]),
                surface: None,
                desc: Description::new(CATS[*cat].0, args.iter().map(|g| Index::Ground(*g)).collect()),
            })
            .collect(),
    )
    .unwrap();
    // shuffled copy, a few items replaced, grounds turned into variables
    // (not necessarily injectively), most words abstracted
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let vars: Vec<u32> = (0..3).map(|_| rng.random_range(0..3)).collect();
    let items = order
        .iter()
        .enumerate()
        .map(|(p, &i)| {
            let (cat, args, w) = if rng.random_bool(0.15) { random_item(rng) } else { specs[i].clone() };
            LexicalItem {
                id: ItemId::transfer(p as u32 + 1, p as u32 + 1, 0),
                word: if rng.random_bool(0.5) {
                    Word::lit(TWORDS[w])
                } else {
                    Word::Placeholder {
                        template: TemplateId::new("t"),
                        position: 1,
                    }
                },
                surface: None,
                desc: Description::new(CATS[cat].0, args.iter().map(|g| Index::var(vars[*g as usize])).collect()),
            }
        })
        .collect();
    (target, Bag::new(items).unwrap())
}

fn item_sets(ms: &[Matching]) -> BTreeSet<Vec<(ItemId, ItemId)>> {
    ms.iter().map(|m| m.item_set()).collect()
}

fn oracle_equivalence() -> Check {
    let mut rng = StdRng::seed_from_u64(0x6d61_7463);
    let start = Instant::now();
    let (cases, mut with_matches) = (2000, 0);
    for case in 0..cases {
        let (tgt, tr) = random_bag_pair(&mut rng);
        let fast: Vec<Matching> = match_bags(&tgt, &tr).collect();
        let slow = match_bags_oracle(&tgt, &tr).map_err(|e| e.to_string())?;
        ensure(fast.len() == item_sets(&fast).len(), || format!("case {case}: duplicate matchings"))?;
        ensure(item_sets(&fast) == item_sets(&slow), || format!("case {case}:\n{}\n{}", tgt.table(), tr.table()))?;
        with_matches += usize::from(!fast.is_empty());
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("{cases} pairs agree ({with_matches} with matches) in {took:.2?}"))
}

const SOURCE_ITEMS: [(&str, &str, usize); 7] = [
    ("the", "determiner", 1),
    ("fat", "adjective", 1),
    ("black", "adjective", 1),
    ("dog", "noun", 1),
    ("man", "noun", 1),
    ("kick", "trans_verb", 3),
    ("out", "advparticle", 1),
];

fn random_source_bag(rng: &mut StdRng, max: usize) -> Bag {
    let n = rng.random_range(0..=max);
    let items = (0..n)
        .map(|p| {
            let (w, c, arity) = SOURCE_ITEMS[rng.random_range(0..SOURCE_ITEMS.len())];
            let mut d = Description::new(c, (0..arity).map(|_| Index::Ground(rng.random_range(0..3))).collect());
            if c == "noun" && rng.random_bool(0.7) {
                d = d.with_feature("count", "+");
            }
            LexicalItem {
                id: ItemId::token(p as u32 + 1),
                word: Word::lit(w),
                surface: None,
                desc: d,
            }
        })
        .collect();
    Bag::new(items).unwrap()
}

fn transfer_partition() -> Check {
    let f = BilingualFile::parse(bundled::EN_ES).unwrap();
    let rules = TransferRules::new(&f.entries, &f.templates);
    let mut rng = StdRng::seed_from_u64(0x7472_616e);
    let start = Instant::now();
    let (cases, mut derivations, mut brute) = (1500, 0, 0);
    for case in 0..cases {
        let src = random_source_bag(&mut rng, 8);
        let all: BTreeSet<ItemId> = src.iter().map(|i| i.id).collect();
        let found: Vec<oracle::CellSet> = match transfer(&src, &rules) {
            Ok(ds) => ds
                .take(200)
                .map(|d| {
                    let consumed: Vec<ItemId> = d.cells.iter().flat_map(|c| c.consumed.clone()).collect();
                    let distinct: BTreeSet<ItemId> = consumed.iter().copied().collect();
                    ensure(consumed.len() == distinct.len() && distinct == all, || {
                        format!("case {case}: cells do not partition\n{}", src.table())
                    })?;
                    Ok(oracle::cell_set(&d))
                })
                .collect::<Result<_, String>>()?,
            Err(_) => Vec::new(),
        };
        derivations += found.len();
        if src.len() <= 6 {
            let mut fast = found;
            fast.sort();
            ensure(fast == oracle::brute_force(&src, &rules), || format!("case {case}: differs from brute force\n{}", src.table()))?;
            brute += 1;
        }
    }
    let took = start.elapsed();
    ensure(took < Duration::from_secs(60), || format!("took {took:?}"))?;
    Ok(format!("{cases} bags, {derivations} derivations, {brute} checked by brute force, {took:.2?}"))
}

/// A lexicon whose entries fall into `shapes` distinct template shapes,
/// with a skewed distribution over shapes.
fn synthetic_lexicon(rng: &mut StdRng, size: usize, shapes: usize) -> Vec<BilingualEntry> {
    let source_cats = ["noun", "adjective", "trans_verb", "adverb", "prep"];
    let target_cats = ["n", "adj", "v", "adv", "p"];
    let macros = [None, Some("trans_noun"), Some("trans_verb")];
    let shape = |k: usize| {
        let lhs_len = 1 + k % 2;
        let rhs_cat = target_cats[(k / 2) % 5];
        let mac = macros[(k / 10) % 3];
        (lhs_len, source_cats[k % 5], rhs_cat, mac)
    };
    (0..size)
        .map(|i| {
            // every shape at least once, then a skewed draw
            let k = if i < shapes { i } else { (rng.random_range(0..shapes) * rng.random_range(0..shapes)) / shapes };
            let (lhs_len, scat, tcat, mac) = shape(k);
            let mut lhs = vec![PatternItem::new(
                Word::lit(format!("s{i}")),
                Description::new(scat, vec![Index::var(0)]),
            )];
            if lhs_len == 2 {
                lhs.push(PatternItem::new(Word::lit(format!("p{i}")), Description::new("particle", vec![Index::var(0)])));
            }
            let rhs = vec![PatternItem::new(Word::lit(format!("t{i}")), Description::new(tcat, vec![Index::var(0)]))];
            BilingualEntry {
                lhs,
                rhs,
                macro_name: mac.map(str::to_string),
                template: None,
            }
        })
        .collect()
}

fn template_round_trip() -> Check {
    let mut rng = StdRng::seed_from_u64(0x726f_756e);
    let lex = synthetic_lexicon(&mut rng, 600, 30);
    for (i, e) in lex.iter().enumerate() {
        let (t, triple) = template_of(e);
        let back = instantiate(&t, &triple, &mut VarGen::starting_at(5)).map_err(|e| e.to_string())?;
        ensure(back.alpha_equivalent(e) && back.source_words() == e.source_words(), || format!("entry {i}: {e} became {back}"))?;
    }
    let db = extract_templates(&lex);
    ensure(db.len() >= 20, || format!("only {} shapes", db.len()))?;
    ensure(db.total_count() == lex.len() as u64, || "templates do not partition the lexicon".into())?;
    let rows = coverage_report(&db, lex.len() as u64);
    ensure(rows.windows(2).all(|w| w[0].entries < w[1].entries && w[0].tenths <= w[1].tenths), || "not monotone".into())?;
    let last = rows.last().unwrap();
    ensure(last.entries == 600 && last.to_string().ends_with("\t100.0%"), || format!("last row {last}"))?;
    Ok(format!("{} entries over {} shapes round trip; final row {}", lex.len(), db.len(), last.to_string().replace('\t', " ")))
}

fn coverage_format(dir: &TempDir) -> Check {
    let mut rng = StdRng::seed_from_u64(0x636f_7665);
    let file = BilingualFile {
        entries: synthetic_lexicon(&mut rng, 800, 24),
        templates: Vec::new(),
    };
    let lex = dir.path().join("synthetic.bil");
    fs::write(&lex, file.serialize()).unwrap();
    let run = bilex_cmd(&["coverage", "--bilex", path(&lex)]);
    ensure(run.status.success(), || format!("coverage exited {}", run.status))?;
    let out = String::from_utf8(run.stdout).unwrap();
    let mut lines = out.lines();
    ensure(lines.next() == Some("templates\tentries\tcoverage"), || "header".into())?;
    let mut prev = (0usize, 0u64);
    let mut rows = 0;
    for l in lines {
        let f: Vec<&str> = l.split('\t').collect();
        ensure(f.len() == 3, || format!("row {l:?}"))?;
        let k: usize = f[0].parse().map_err(|_| format!("row {l:?}"))?;
        let n: u64 = f[1].parse().map_err(|_| format!("row {l:?}"))?;
        let pct = f[2].strip_suffix('%').ok_or_else(|| format!("row {l:?}"))?;
        let (whole, tenth) = pct.split_once('.').ok_or_else(|| format!("row {l:?}"))?;
        ensure(
            tenth.len() == 1 && whole.parse::<u32>().is_ok() && tenth.parse::<u32>().is_ok(),
            || format!("percentage {pct:?}"),
        )?;
        ensure(k == prev.0 + 1 && n > prev.1, || format!("row {l:?} after {prev:?}"))?;
        prev = (k, n);
        rows += 1;
    }
    ensure(out.ends_with("\t800\t100.0%\n"), || "final row".into())?;
    Ok(format!("{rows} rows, strictly increasing, one decimal"))
}

fn ambiguity(dir: &TempDir) -> Check {
    let corpus = fs::read_to_string(fixture("two-adjectives.tsv")).unwrap();
    let (src, tgt) = corpus.trim_end().split_once('\t').unwrap();
    let run = bilex_cmd(&["match", "--source", src, "--target", tgt]);
    let dump = String::from_utf8(run.stdout).unwrap();
    let n: usize = dump.rsplit('\t').next().unwrap().trim().parse().map_err(|_| "no count".to_string())?;
    ensure(n >= 2, || format!("{n} matchings"))?;

    let ind = bundled::inducer(bundled::EN_ES);
    let Ok(Induction::Ambiguous { candidates, .. }) = ind.make_entries(src, tgt) else {
        return Err("library result is not ambiguous".into());
    };
    let out = dir.path().join("ambiguous.bil");
    let review = dir.path().join("ambiguous.review");
    let run = bilex_cmd(&[
        "induce",
        "--corpus",
        path(&fixture("two-adjectives.tsv")),
        "--out",
        path(&out),
        "--review",
        path(&review),
    ]);
    ensure(run.status.code() == Some(1), || format!("induce exited {}", run.status))?;
    ensure(fs::read_to_string(&out).unwrap().is_empty(), || "block mode committed entries".into())?;
    let text = fs::read_to_string(&review).unwrap();
    for c in &candidates {
        ensure(text.contains(&c.serialize()), || format!("review lacks candidate\n{}", c.serialize()))?;
    }
    ensure(text.matches("# candidate ").count() == candidates.len(), || "extra candidates in review".into())?;
    Ok(format!("{n} matchings, {} candidates in review, nothing committed", candidates.len()))
}

fn idiom_order(seed: &str) -> Result<(bool, bool), String> {
    let mut ind = bundled::inducer(bundled::IDIOM);
    ind.commit(&BilingualFile::parse(seed).unwrap().entries);
    let Ok(Induction::Ambiguous { candidates, .. }) =
        ind.make_entries("the man kicked the bucket.", "el hombre estiró la pata.")
    else {
        return Err("idiom pair is not ambiguous".into());
    };
    let Ranking::Ordered(c) = rank_candidates(candidates, ind.templates(), ind.bilex()) else {
        return Err("tied".into());
    };
    let idiomatic = |k: usize| c[k].triples.iter().any(|t| t.template.as_str() == "tv+n/v+n");
    ensure(c.len() == 2 && c[0].score > c[1].score, || "not strict".into())?;
    Ok((idiomatic(0), idiomatic(1)))
}

fn idiom_ranking() -> Check {
    let balde = idiom_order("entry bucket :: noun(A) {count=+} <-> balde :: n(A) \\\\ trans_noun.")?;
    ensure(balde == (true, false), || "with bucket/balde the idiom should win".into())?;
    let pata = idiom_order("entry bucket :: noun(A) {count=+} <-> pata :: n(A) \\\\ trans_noun.")?;
    ensure(pata == (false, true), || "with bucket/pata composition should win".into())?;
    Ok("idiom > composition with balde; composition > idiom with pata".into())
}

fn idempotence(dir: &TempDir) -> Check {
    let first = dir.path().join("first.bil");
    let run = bilex_cmd(&["induce", "--corpus", path(&fixture("worked.tsv")), "--out", path(&first)]);
    ensure(run.status.success(), || format!("first run exited {}", run.status))?;
    let again = dir.path().join("again.bil");
    let report = dir.path().join("again.report");
    let run = bilex_cmd(&[
        "induce",
        "--corpus",
        path(&fixture("worked.tsv")),
        "--bilex",
        path(&first),
        "--out",
        path(&again),
        "--report",
        path(&report),
    ]);
    ensure(run.status.success(), || format!("rerun exited {}", run.status))?;
    let summary = fs::read_to_string(&report).unwrap();
    ensure(fs::read_to_string(&again).unwrap().is_empty(), || "rerun wrote entries".into())?;
    ensure(summary.contains("\nunique\t1\n") && summary.contains("\nentries\t0\n"), || summary.clone())?;
    Ok("rerun is unique with 0 new entries".into())
}

const EXTRA_SHAPES: [&str; 4] = [
    "_ :: adverb(A) <-> _ :: adv(A)",
    "_ :: prep(A,B) <-> _ :: p(A,B)",
    "_ :: noun(A) {count=-} <-> _ :: n(A)",
    "_ :: adjective(A) <-> _ :: adj(A)",
];

/// An inducer over random template counts, extra unrelated templates and a
/// random seed lexicon, together with a sentence pair it finds ambiguous.
fn random_fixture(rng: &mut StdRng) -> (Inducer, &'static str, &'static str) {
    let (base, src, tgt) = if rng.random_bool(0.75) {
        (bundled::IDIOM, "the man kicked the bucket.", "el hombre estiró la pata.")
    } else {
        let pair = ["the big fat man kicked out the dog.", "el hombre gordo grande echó el perro."];
        (bundled::EN_ES, pair[0], pair[1])
    };
    let mut file = BilingualFile::parse(base).unwrap();
    for t in &mut file.templates {
        t.count = rng.random_range(0..30);
    }
    for (i, shape) in EXTRA_SHAPES.iter().enumerate() {
        if rng.random_bool(0.5) {
            let text = format!("template x{i} {{count={}}} : {shape}.", rng.random_range(0..50));
            file.templates.extend(BilingualFile::parse(&text).unwrap().templates);
        }
    }
    let seeds = [
        "entry bucket :: noun(A) {count=+} <-> balde :: n(A) \\\\ trans_noun.",
        "entry bucket :: noun(A) {count=+} <-> pata :: n(A) \\\\ trans_noun.",
        "entry kick :: trans_verb(A,B,C) <-> estirar :: v(A,B,C) {subcat=acc} \\\\ trans_verb.",
        "entry big :: adjective(A) <-> gordo :: adj(A).",
    ];
    for s in seeds {
        if rng.random_bool(0.3) {
            file.entries.extend(BilingualFile::parse(s).unwrap().entries);
        }
    }
    let db = TemplateDatabase::new(file.templates).unwrap();
    let ind = Inducer::new(bundled::english(), bundled::spanish(), db, file.entries, Limits::default());
    (ind, src, tgt)
}

fn order(r: &Ranking) -> (bool, Vec<String>) {
    (matches!(r, Ranking::Blocked(_)), r.candidates().iter().map(|c| c.serialize()).collect())
}

fn scale_invariance() -> Check {
    let mut rng = StdRng::seed_from_u64(0x7363_616c);
    let (mut fixtures, mut strict, mut tries) = (0, 0, 0);
    while fixtures < 100 {
        tries += 1;
        ensure(tries < 10_000, || format!("only {fixtures} ambiguous fixtures found"))?;
        let (ind, src, tgt) = random_fixture(&mut rng);
        let Ok(Induction::Ambiguous { candidates, .. }) = ind.make_entries(src, tgt) else {
            continue;
        };
        if candidates.len() < 2 {
            continue;
        }
        fixtures += 1;
        let base = order(&rank_candidates(candidates.clone(), ind.templates(), ind.bilex()));
        for k in [2, 10] {
            let scaled = order(&rank_candidates(candidates.clone(), &ind.templates().scaled(k), ind.bilex()));
            ensure(scaled == base, || format!("fixture {fixtures}: order changes at k={k}"))?;
        }
        strict += usize::from(!base.0);
    }
    Ok(format!("{fixtures} fixtures ({strict} strictly ordered) keep their order at k=2 and k=10"))
}

fn main() {
    let dir = TempDir::new().unwrap();
    let checks: [(&str, &dyn Fn() -> Check); 10] = [
        ("worked-example induction", &|| worked_example(&dir)),
        ("worked-example matching", &worked_matching),
        ("matcher agrees with oracle", &oracle_equivalence),
        ("transfer partitions the source", &transfer_partition),
        ("template round trip and coverage", &template_round_trip),
        ("coverage table format", &|| coverage_format(&dir)),
        ("ambiguity is blocked", &|| ambiguity(&dir)),
        ("idiom ranking", &idiom_ranking),
        ("idempotent rerun", &|| idempotence(&dir)),
        ("ranking is scale invariant", &scale_invariance),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("PASS {:>2} {name} ({took:.2?}): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({took:.2?}): {why}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
