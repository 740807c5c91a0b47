//! Small English-Spanish grammars, lexicons and bilingual files shipped
//! with the crate, used by the examples and tests.

use crate::bilingual::BilingualFile;
use crate::grammar::{Grammar, MonolingualLexicon};
use crate::parser::Parser;
use crate::pipeline::{Inducer, Limits};
use crate::templates::TemplateDatabase;

pub const EN_GRAMMAR: &str = include_str!("../fixtures/en.grammar");
pub const EN_LEXICON: &str = include_str!("../fixtures/en.lex");
pub const ES_GRAMMAR: &str = include_str!("../fixtures/es.grammar");
pub const ES_LEXICON: &str = include_str!("../fixtures/es.lex");
/// Closed-class entries and three content-word templates.
pub const EN_ES: &str = include_str!("../fixtures/en-es.bil");
/// Closed-class entries and templates that overlap on verb-object idioms.
pub const IDIOM: &str = include_str!("../fixtures/idiom.bil");

pub const WORKED_SOURCE: &str = "the fat man kicked out the black dog.";
pub const WORKED_TARGET: &str = "el hombre gordo echó el perro negro.";

pub fn english() -> Parser {
    Parser::new(
        Grammar::parse(EN_GRAMMAR).expect("bundled grammar parses"),
        MonolingualLexicon::parse(EN_LEXICON).expect("bundled lexicon parses"),
    )
    .expect("bundled lexicon fits its grammar")
}

pub fn spanish() -> Parser {
    Parser::new(
        Grammar::parse(ES_GRAMMAR).expect("bundled grammar parses"),
        MonolingualLexicon::parse(ES_LEXICON).expect("bundled lexicon parses"),
    )
    .expect("bundled lexicon fits its grammar")
}

/// English-to-Spanish inducer over one of the bundled bilingual files.
pub fn inducer(bilingual: &str) -> Inducer {
    let file = BilingualFile::parse(bilingual).expect("bundled bilingual file parses");
    let db = TemplateDatabase::new(file.templates).expect("bundled template ids are unique");
    Inducer::new(english(), spanish(), db, file.entries, Limits::default())
}
