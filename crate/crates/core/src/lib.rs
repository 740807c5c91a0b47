pub mod bag;
pub mod bilingual;
pub mod bundled;
pub mod entries;
pub mod grammar;
pub mod matcher;
pub mod parser;
pub mod pipeline;
pub mod syntax;
pub mod templates;
pub mod term;
pub mod transfer;
