//! Template databases: extraction from an entry lexicon and incremental
//! coverage reporting.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::bag::TemplateId;
use crate::bilingual::{template_of, BagPattern, BilingualEntry, BilingualTemplate};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("duplicate template id {0}")]
pub struct DuplicateTemplate(pub TemplateId);

/// Templates with their lexicon frequencies, in a fixed order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TemplateDatabase {
    templates: Vec<BilingualTemplate>,
    by_id: HashMap<TemplateId, usize>,
}

impl TemplateDatabase {
    pub fn new(templates: Vec<BilingualTemplate>) -> Result<Self, DuplicateTemplate> {
        let mut by_id = HashMap::new();
        for (i, t) in templates.iter().enumerate() {
            if by_id.insert(t.id.clone(), i).is_some() {
                return Err(DuplicateTemplate(t.id.clone()));
            }
        }
        Ok(TemplateDatabase { templates, by_id })
    }

    pub fn get(&self, id: &TemplateId) -> Option<&BilingualTemplate> {
        self.by_id.get(id).map(|&i| &self.templates[i])
    }

    pub fn templates(&self) -> &[BilingualTemplate] {
        &self.templates
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    pub fn count(&self, id: &TemplateId) -> u64 {
        self.get(id).map_or(0, |t| t.count)
    }

    /// Sum of all template counts.
    pub fn total_count(&self) -> u64 {
        self.templates.iter().map(|t| t.count).sum()
    }

    /// Same templates with every count multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Self {
        let mut out = self.clone();
        for t in &mut out.templates {
            t.count *= k;
        }
        out
    }
}

type Shape = (BagPattern, BagPattern, Option<String>);

/// One template per alpha-equivalence class of abstracted entries, counted
/// by class size. Ids come from the first tagged entry of a class, else
/// `tN` by first-seen order.
pub fn extract_templates(lexicon: &[BilingualEntry]) -> TemplateDatabase {
    let mut classes: Vec<(BilingualTemplate, Option<TemplateId>)> = Vec::new();
    let mut index: HashMap<Shape, usize> = HashMap::new();
    for e in lexicon {
        let (t, _) = template_of(e);
        match index.get(&t.shape()) {
            Some(&i) => {
                let class = &mut classes[i];
                class.0.count += 1;
                if class.1.is_none() {
                    class.1 = e.template.clone();
                }
            }
            None => {
                index.insert(t.shape(), classes.len());
                classes.push((BilingualTemplate { count: 1, ..t }, e.template.clone()));
            }
        }
    }

    let mut used: HashSet<TemplateId> = HashSet::new();
    let mut ids: Vec<Option<TemplateId>> = classes
        .iter()
        .map(|(_, tag)| tag.clone().filter(|t| used.insert(t.clone())))
        .collect();
    let mut n = 0;
    for id in ids.iter_mut().filter(|id| id.is_none()) {
        let fresh = loop {
            n += 1;
            let cand = TemplateId(format!("t{n}"));
            if !used.contains(&cand) {
                break cand;
            }
        };
        used.insert(fresh.clone());
        *id = Some(fresh);
    }
    let templates = classes
        .into_iter()
        .zip(ids)
        .map(|((t, _), id)| BilingualTemplate {
            id: id.expect("every class named"),
            ..t
        })
        .collect();
    TemplateDatabase::new(templates).expect("ids made unique above")
}

/// One row of an incremental coverage table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverageRow {
    pub templates: usize,
    pub entries: u64,
    /// Coverage in tenths of a percent, rounded half up.
    pub tenths: u64,
}

impl fmt::Display for CoverageRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}.{}%",
            self.templates,
            self.entries,
            self.tenths / 10,
            self.tenths % 10
        )
    }
}

/// Cumulative entries covered by the k most frequent templates, for each k.
/// Ties in count are broken by id.
pub fn coverage_report(db: &TemplateDatabase, lexicon_size: u64) -> Vec<CoverageRow> {
    if lexicon_size == 0 {
        return Vec::new();
    }
    let mut order: Vec<&BilingualTemplate> = db.templates().iter().collect();
    order.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.id.cmp(&b.id)));
    let mut covered = 0;
    order
        .iter()
        .enumerate()
        .map(|(k, t)| {
            covered += t.count;
            CoverageRow {
                templates: k + 1,
                entries: covered,
                tenths: (2000 * covered + lexicon_size) / (2 * lexicon_size),
            }
        })
        .collect()
}

/// TSV with a `templates entries coverage` header.
pub fn coverage_tsv(rows: &[CoverageRow]) -> String {
    let mut s = String::from("templates\tentries\tcoverage\n");
    for r in rows {
        s.push_str(&r.to_string());
        s.push('\n');
    }
    s
}
