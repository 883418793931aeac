use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

/// Domain values are untyped strings.
pub type Value = Arc<str>;

pub type Tuple = Vec<Value>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("tuple of length {found} does not fit a relation of degree {degree}")]
pub struct ArityError {
    pub degree: usize,
    pub found: usize,
}

/// A finite set of tuples of one fixed degree. Iteration (and every textual
/// form) is in lexicographic tuple order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelationInstance {
    degree: usize,
    tuples: BTreeSet<Tuple>,
}

impl RelationInstance {
    pub fn empty(degree: usize) -> Self {
        RelationInstance {
            degree,
            tuples: BTreeSet::new(),
        }
    }

    /// `{⟨⟩}`, the identity for cross product.
    pub fn unit() -> Self {
        let mut r = Self::empty(0);
        r.tuples.insert(Vec::new());
        r
    }

    pub fn from_tuples<I, T, S>(degree: usize, tuples: I) -> Result<Self, ArityError>
    where
        I: IntoIterator<Item = T>,
        T: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut r = Self::empty(degree);
        for t in tuples {
            r.insert(t.into_iter().map(|s| Value::from(s.as_ref())).collect())?;
        }
        Ok(r)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn contains(&self, tuple: &[Value]) -> bool {
        self.tuples.contains(tuple)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tuple> {
        self.tuples.iter()
    }

    pub fn tuples(&self) -> &BTreeSet<Tuple> {
        &self.tuples
    }

    pub fn insert(&mut self, tuple: Tuple) -> Result<bool, ArityError> {
        if tuple.len() != self.degree {
            return Err(ArityError {
                degree: self.degree,
                found: tuple.len(),
            });
        }
        Ok(self.tuples.insert(tuple))
    }

    pub fn remove(&mut self, tuple: &[Value]) -> bool {
        self.tuples.remove(tuple)
    }

    pub(crate) fn from_set(degree: usize, tuples: BTreeSet<Tuple>) -> Self {
        debug_assert!(tuples.iter().all(|t| t.len() == degree));
        RelationInstance { degree, tuples }
    }

    /// Column `index` (1-based) as a set of values.
    pub fn column(&self, index: usize) -> BTreeSet<Value> {
        self.tuples.iter().map(|t| t[index - 1].clone()).collect()
    }

    /// Tab-separated rows, one per tuple, in sorted order. With `header`,
    /// the first line lists the 1-based column indices.
    pub fn to_tsv(&self, header: bool) -> String {
        let mut out = String::new();
        if header {
            let cols: Vec<String> = (1..=self.degree).map(|i| i.to_string()).collect();
            out.push_str(&cols.join("\t"));
            out.push('\n');
        }
        for t in &self.tuples {
            let mut first = true;
            for v in t {
                if !first {
                    out.push('\t');
                }
                first = false;
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }
}

/// Named relation instances; the schema is the name → degree map.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DatabaseInstance {
    relations: BTreeMap<String, RelationInstance>,
}

impl DatabaseInstance {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, instance: RelationInstance) {
        self.relations.insert(name.into(), instance);
    }

    pub fn get(&self, name: &str) -> Option<&RelationInstance> {
        self.relations.get(name)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut RelationInstance> {
        self.relations.get_mut(name)
    }

    pub fn schema(&self) -> BTreeMap<String, usize> {
        self.relations.iter().map(|(k, v)| (k.clone(), v.degree())).collect()
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &RelationInstance)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }
}
