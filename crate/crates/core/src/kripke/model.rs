use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::relalg::Value;

/// The concept every model must carry; its values name the states.
pub const ID_CONCEPT: &str = "id";

const RESERVED: [&str; 3] = ["exists", "forall", "lam"];

/// Internal handle of a state. Externally states are always named by their
/// `id` value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("model has no states")]
    NoStates,
    #[error("model has no objects")]
    NoObjects,
    #[error("model declares no accessibility relation")]
    NoRelations,
    #[error("model has no `id` concept")]
    MissingIdConcept,
    #[error("{what} `{name}` declared twice")]
    Duplicate { what: &'static str, name: String },
    #[error("`{0}` is not a usable name (letters, digits and `_`, not a keyword)")]
    InvalidName(String),
    #[error("key violation: id value `{0}` names more than one state")]
    DuplicateId(String),
    #[error("state {state} has no value for concept `{concept}`")]
    NotTotal { state: usize, concept: String },
    #[error("state {state} sets undeclared concept `{concept}`")]
    UndeclaredConcept { state: usize, concept: String },
    #[error("concept `{concept}` takes value `{value}`, which is not a declared object")]
    ValueNotObject { concept: String, value: String },
    #[error("relation `{relation}` refers to unknown state id `{id}`")]
    UnknownStateId { relation: String, id: String },
    #[error("malformed model file: {0}")]
    Format(String),
}

/// A string in a model file; bare integers are accepted and read as their
/// decimal text.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub String);

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct SymbolVisitor;
        impl Visitor<'_> for SymbolVisitor {
            type Value = Symbol;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a string or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Symbol, E> {
                Ok(Symbol(v.to_string()))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Symbol, E> {
                Ok(Symbol(v.to_string()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Symbol, E> {
                Ok(Symbol(v.to_string()))
            }
        }
        d.deserialize_any(SymbolVisitor)
    }
}

impl From<&str> for Symbol {
    fn from(s: &str) -> Self {
        Symbol(s.to_string())
    }
}

/// The on-disk model document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub objects: Vec<Symbol>,
    pub concepts: Vec<String>,
    pub states: Vec<BTreeMap<String, Symbol>>,
    pub relations: BTreeMap<String, Vec<[Symbol; 2]>>,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Format(e.to_string()))
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model file serializes");
        s.push('\n');
        s
    }
}

/// A finite first-order modal model: states, accessibility relations, a
/// constant object domain, and individual concepts (total functions from
/// states to objects). Object constants are the objects themselves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KripkeModel {
    objects: Vec<Value>,
    object_set: BTreeSet<Value>,
    concept_names: Vec<Value>,
    concepts: BTreeMap<Value, Vec<Value>>,
    relations: BTreeMap<String, BTreeSet<(StateId, StateId)>>,
    successors: BTreeMap<String, Vec<Vec<StateId>>>,
    state_count: usize,
}

fn check_name(name: &str) -> Result<(), ModelError> {
    let ok =
        !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !RESERVED.contains(&name);
    if ok {
        Ok(())
    } else {
        Err(ModelError::InvalidName(name.to_string()))
    }
}

impl KripkeModel {
    /// Validates and indexes a model document.
    pub fn from_file(file: &ModelFile) -> Result<Self, ModelError> {
        if file.objects.is_empty() {
            return Err(ModelError::NoObjects);
        }
        if file.states.is_empty() {
            return Err(ModelError::NoStates);
        }
        if file.relations.is_empty() {
            return Err(ModelError::NoRelations);
        }
        let mut object_set = BTreeSet::new();
        let mut objects = Vec::new();
        for o in &file.objects {
            let v = Value::from(o.0.as_str());
            if !object_set.insert(v.clone()) {
                return Err(ModelError::Duplicate {
                    what: "object",
                    name: o.0.clone(),
                });
            }
            objects.push(v);
        }
        let mut concept_names: Vec<Value> = Vec::new();
        for c in &file.concepts {
            check_name(c)?;
            if concept_names.iter().any(|n| &**n == c) {
                return Err(ModelError::Duplicate {
                    what: "concept",
                    name: c.clone(),
                });
            }
            concept_names.push(Value::from(c.as_str()));
        }
        if !file.concepts.iter().any(|c| c == ID_CONCEPT) {
            return Err(ModelError::MissingIdConcept);
        }
        for r in file.relations.keys() {
            check_name(r)?;
        }

        let mut concepts: BTreeMap<Value, Vec<Value>> = concept_names.iter().map(|c| (c.clone(), Vec::new())).collect();
        for (i, record) in file.states.iter().enumerate() {
            if let Some(extra) = record.keys().find(|k| !concepts.contains_key(k.as_str())) {
                return Err(ModelError::UndeclaredConcept {
                    state: i + 1,
                    concept: extra.clone(),
                });
            }
            for name in &concept_names {
                let value = record.get(&**name).ok_or_else(|| ModelError::NotTotal {
                    state: i + 1,
                    concept: name.to_string(),
                })?;
                let value = Value::from(value.0.as_str());
                if !object_set.contains(&value) {
                    return Err(ModelError::ValueNotObject {
                        concept: name.to_string(),
                        value: value.to_string(),
                    });
                }
                concepts.get_mut(name).expect("declared").push(value);
            }
        }

        let mut by_id = HashMap::new();
        for (i, id) in concepts[ID_CONCEPT].iter().enumerate() {
            if by_id.insert(id.clone(), StateId(i)).is_some() {
                return Err(ModelError::DuplicateId(id.to_string()));
            }
        }

        let state_count = file.states.len();
        let mut relations = BTreeMap::new();
        let mut successors = BTreeMap::new();
        for (name, pairs) in &file.relations {
            let mut edges = BTreeSet::new();
            let mut succ = vec![Vec::new(); state_count];
            for [src, dst] in pairs {
                let lookup = |sym: &Symbol| {
                    by_id
                        .get(sym.0.as_str())
                        .copied()
                        .ok_or_else(|| ModelError::UnknownStateId {
                            relation: name.clone(),
                            id: sym.0.clone(),
                        })
                };
                let (s, d) = (lookup(src)?, lookup(dst)?);
                if edges.insert((s, d)) {
                    succ[s.0].push(d);
                }
            }
            relations.insert(name.clone(), edges);
            successors.insert(name.clone(), succ);
        }

        Ok(KripkeModel {
            objects,
            object_set,
            concept_names,
            concepts,
            relations,
            successors,
            state_count,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Self::from_file(&ModelFile::from_json(text)?)
    }

    /// The document this model was (or could have been) loaded from.
    pub fn to_file(&self) -> ModelFile {
        let states = self
            .states()
            .map(|s| {
                self.concept_names
                    .iter()
                    .map(|c| (c.to_string(), Symbol(self.concepts[c][s.0].to_string())))
                    .collect()
            })
            .collect();
        let relations = self
            .relations
            .iter()
            .map(|(name, edges)| {
                let pairs = edges
                    .iter()
                    .map(|&(s, d)| [Symbol(self.id_of(s).to_string()), Symbol(self.id_of(d).to_string())])
                    .collect();
                (name.clone(), pairs)
            })
            .collect();
        ModelFile {
            objects: self.objects.iter().map(|o| Symbol(o.to_string())).collect(),
            concepts: self.concept_names.iter().map(|c| c.to_string()).collect(),
            states,
            relations,
        }
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + Clone {
        (0..self.state_count).map(StateId)
    }

    /// Objects in declaration order.
    pub fn objects(&self) -> &[Value] {
        &self.objects
    }

    pub fn is_object(&self, value: &str) -> bool {
        self.object_set.contains(value)
    }

    /// Concept names in declaration order.
    pub fn concept_names(&self) -> &[Value] {
        &self.concept_names
    }

    pub fn has_concept(&self, name: &str) -> bool {
        self.concepts.contains_key(name)
    }

    /// Value of `concept` at `state`, if the concept exists.
    pub fn concept_value(&self, concept: &str, state: StateId) -> Option<&Value> {
        self.concepts.get(concept).map(|vals| &vals[state.0])
    }

    pub fn id_of(&self, state: StateId) -> &Value {
        &self.concepts[ID_CONCEPT][state.0]
    }

    pub fn state_by_id(&self, id: &str) -> Option<StateId> {
        self.concepts[ID_CONCEPT].iter().position(|v| &**v == id).map(StateId)
    }

    pub fn relation_names(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(String::as_str)
    }

    pub fn has_relation(&self, name: &str) -> bool {
        self.relations.contains_key(name)
    }

    pub fn edges(&self, relation: &str) -> Option<&BTreeSet<(StateId, StateId)>> {
        self.relations.get(relation)
    }

    pub fn successors(&self, relation: &str, state: StateId) -> Option<&[StateId]> {
        self.successors.get(relation).map(|s| s[state.0].as_slice())
    }

    pub fn edge_count(&self) -> usize {
        self.relations.values().map(BTreeSet::len).sum()
    }
}
