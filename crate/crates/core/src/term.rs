//! Indices, descriptions and the binding store they are unified under.
//!
//! Indices are atomic: either a ground integer or a variable. There are no
//! function symbols, so a binding can never contain the variable it binds
//! and resolution always terminates without an occurs check.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

/// A variable identifier. Displayed as `A`, `B`, … `Z`, `A1`, `B1`, ….
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn name(self) -> String {
        let letter = char::from(b'A' + (self.0 % 26) as u8);
        match self.0 / 26 {
            0 => letter.to_string(),
            n => format!("{letter}{n}"),
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A dependency index: ground after parsing, variable in patterns and
/// transfer output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Index {
    Ground(u32),
    Var(VarId),
}

impl Index {
    pub fn var(id: u32) -> Self {
        Index::Var(VarId(id))
    }

    pub fn is_ground(self) -> bool {
        matches!(self, Index::Ground(_))
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Ground(g) => write!(f, "{g}"),
            Index::Var(v) => write!(f, "{v}"),
        }
    }
}

pub type Features = BTreeMap<String, String>;

/// Category label, open feature record and index arguments.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Description {
    pub category: String,
    pub features: Features,
    pub args: Vec<Index>,
}

impl Description {
    pub fn new(category: impl Into<String>, args: Vec<Index>) -> Self {
        Description {
            category: category.into(),
            features: Features::new(),
            args,
        }
    }

    pub fn with_feature(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.features.insert(key.into(), value.into());
        self
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    /// Category, arity and features agree; indices are not looked at.
    pub fn shape_compatible(&self, other: &Description) -> bool {
        self.category == other.category
            && self.args.len() == other.args.len()
            && features_compatible(&self.features, &other.features)
    }

    /// Union of both feature records, or `None` on a clash.
    pub fn unify_features(&self, other: &Description) -> Option<Features> {
        if !features_compatible(&self.features, &other.features) {
            return None;
        }
        let mut merged = self.features.clone();
        for (k, v) in &other.features {
            merged.entry(k.clone()).or_insert_with(|| v.clone());
        }
        Some(merged)
    }
}

fn features_compatible(a: &Features, b: &Features) -> bool {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .all(|(k, v)| large.get(k).is_none_or(|w| w == v))
}

impl fmt::Display for Description {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.category)?;
        for (i, a) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str(")")?;
        if !self.features.is_empty() {
            f.write_str(" {")?;
            for (i, (k, v)) in self.features.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{k}={v}")?;
            }
            f.write_str("}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("category mismatch: {0} vs {1}")]
    Category(String, String),
    #[error("arity mismatch: {0} vs {1}")]
    Arity(usize, usize),
    #[error("feature clash on `{0}`")]
    Feature(String),
    #[error("index clash: {0} vs {1}")]
    Index(u32, u32),
}

/// Position in a store's trail, for undoing bindings on backtrack.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mark(usize);

/// Variable bindings for one derivation.
///
/// Bindings only ever point a variable at a ground index or at a variable
/// with a smaller id, so chains are acyclic. Every binding is recorded on
/// a trail so a caller can roll back to a [`Mark`].
#[derive(Debug, Clone, Default)]
pub struct BindingStore {
    bindings: HashMap<VarId, Index>,
    trail: Vec<VarId>,
}

impl BindingStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn is_bound(&self, v: VarId) -> bool {
        self.bindings.contains_key(&v)
    }

    pub fn resolve(&self, mut i: Index) -> Index {
        while let Index::Var(v) = i {
            match self.bindings.get(&v) {
                Some(next) => i = *next,
                None => break,
            }
        }
        i
    }

    pub fn mark(&self) -> Mark {
        Mark(self.trail.len())
    }

    pub fn undo(&mut self, mark: Mark) {
        while self.trail.len() > mark.0 {
            let v = self.trail.pop().expect("trail length checked");
            self.bindings.remove(&v);
        }
    }

    /// Variables bound since `mark`, oldest first.
    pub fn bound_since(&self, mark: Mark) -> &[VarId] {
        &self.trail[mark.0..]
    }

    fn bind(&mut self, v: VarId, to: Index) {
        self.bindings.insert(v, to);
        self.trail.push(v);
    }

    /// Makes `a` and `b` resolve to the same representative. The store is
    /// untouched on failure.
    pub fn unify_index(&mut self, a: Index, b: Index) -> Result<(), UnifyError> {
        match (self.resolve(a), self.resolve(b)) {
            (Index::Ground(x), Index::Ground(y)) if x == y => Ok(()),
            (Index::Ground(x), Index::Ground(y)) => Err(UnifyError::Index(x, y)),
            (Index::Var(v), Index::Var(w)) if v == w => Ok(()),
            (Index::Var(v), Index::Var(w)) => {
                let (hi, lo) = if v > w { (v, w) } else { (w, v) };
                self.bind(hi, Index::Var(lo));
                Ok(())
            }
            (Index::Var(v), g @ Index::Ground(_)) | (g @ Index::Ground(_), Index::Var(v)) => {
                self.bind(v, g);
                Ok(())
            }
        }
    }

    /// Unifies two descriptions: equal categories, compatible features and
    /// pointwise unifiable arguments. Rolls back partial work on failure.
    pub fn unify_description(
        &mut self,
        d1: &Description,
        d2: &Description,
    ) -> Result<(), UnifyError> {
        if d1.category != d2.category {
            return Err(UnifyError::Category(d1.category.clone(), d2.category.clone()));
        }
        if d1.args.len() != d2.args.len() {
            return Err(UnifyError::Arity(d1.args.len(), d2.args.len()));
        }
        if let Some(key) = d1
            .features
            .iter()
            .find(|(k, v)| d2.features.get(*k).is_some_and(|w| w != *v))
            .map(|(k, _)| k.clone())
        {
            return Err(UnifyError::Feature(key));
        }
        let mark = self.mark();
        for (a, b) in d1.args.iter().zip(&d2.args) {
            if let Err(e) = self.unify_index(*a, *b) {
                self.undo(mark);
                return Err(e);
            }
        }
        Ok(())
    }

    /// Applies the store to every index in `term`.
    pub fn apply<T: IndexTerm + Clone>(&self, term: &T) -> T {
        let mut out = term.clone();
        out.map_indices(&mut |i| *i = self.resolve(*i));
        out
    }
}

/// Hands out fresh variable ids within one derivation.
#[derive(Debug, Clone, Default)]
pub struct VarGen {
    next: u32,
}

impl VarGen {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn starting_at(next: u32) -> Self {
        VarGen { next }
    }

    pub fn fresh(&mut self) -> VarId {
        let v = VarId(self.next);
        self.next += 1;
        v
    }

    /// Reserves `n` consecutive ids and returns the first.
    pub fn reserve(&mut self, n: u32) -> u32 {
        let base = self.next;
        self.next += n;
        base
    }
}

/// Anything that contains indices in a fixed traversal order.
pub trait IndexTerm {
    fn visit_indices(&self, f: &mut dyn FnMut(&Index));
    fn map_indices(&mut self, f: &mut dyn FnMut(&mut Index));

    fn max_var(&self) -> Option<u32> {
        let mut max = None;
        self.visit_indices(&mut |i| {
            if let Index::Var(v) = i {
                max = max.max(Some(v.0));
            }
        });
        max
    }

    /// Adds `offset` to every variable id.
    fn shift_vars(&mut self, offset: u32) {
        self.map_indices(&mut |i| {
            if let Index::Var(v) = i {
                v.0 += offset;
            }
        });
    }
}

impl IndexTerm for Index {
    fn visit_indices(&self, f: &mut dyn FnMut(&Index)) {
        f(self)
    }
    fn map_indices(&mut self, f: &mut dyn FnMut(&mut Index)) {
        f(self)
    }
}

impl IndexTerm for Description {
    fn visit_indices(&self, f: &mut dyn FnMut(&Index)) {
        self.args.iter().for_each(f);
    }
    fn map_indices(&mut self, f: &mut dyn FnMut(&mut Index)) {
        self.args.iter_mut().for_each(f);
    }
}

impl<T: IndexTerm> IndexTerm for Vec<T> {
    fn visit_indices(&self, f: &mut dyn FnMut(&Index)) {
        self.iter().for_each(|t| t.visit_indices(f));
    }
    fn map_indices(&mut self, f: &mut dyn FnMut(&mut Index)) {
        self.iter_mut().for_each(|t| t.map_indices(f));
    }
}

impl<A: IndexTerm, B: IndexTerm> IndexTerm for (A, B) {
    fn visit_indices(&self, f: &mut dyn FnMut(&Index)) {
        self.0.visit_indices(f);
        self.1.visit_indices(f);
    }
    fn map_indices(&mut self, f: &mut dyn FnMut(&mut Index)) {
        self.0.map_indices(f);
        self.1.map_indices(f);
    }
}

/// Renames variables to `A, B, C, …` in order of first occurrence.
/// Ground indices are left alone.
pub fn rename_canonical<T: IndexTerm + Clone>(term: &T) -> T {
    let mut out = term.clone();
    let mut seen: HashMap<VarId, VarId> = HashMap::new();
    out.map_indices(&mut |i| {
        if let Index::Var(v) = i {
            let next = VarId(seen.len() as u32);
            *v = *seen.entry(*v).or_insert(next);
        }
    });
    out
}

pub fn alpha_equivalent<T: IndexTerm + Clone + PartialEq>(a: &T, b: &T) -> bool {
    rename_canonical(a) == rename_canonical(b)
}
