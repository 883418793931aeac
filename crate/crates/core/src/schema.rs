//! Derives the four-relation database of a Kripke model.
//!
//! | relation | degree       | contents                                     |
//! |----------|--------------|----------------------------------------------|
//! | `Sta`    | #concepts    | one row per state, concept values by index   |
//! | `Rel`    | 3            | `⟨id(source), id(target), relation name⟩`    |
//! | `Con`    | 1            | concept names                                |
//! | `Obj`    | 1            | objects                                      |
//!
//! Column `k` of `Sta` holds the concept with index `k` under
//! [`ConceptIndex`]; `id` is always column 1.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::kripke::{KripkeModel, ModelError, ModelFile, Symbol, ID_CONCEPT};
use crate::relalg::{DatabaseInstance, RelationInstance, Value};

pub const STA: &str = "Sta";
pub const REL: &str = "Rel";
pub const CON: &str = "Con";
pub const OBJ: &str = "Obj";

/// Bijection from concept names onto `1..=n` with `id ↦ 1` and the
/// remaining concepts in ascending name order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConceptIndex {
    order: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl ConceptIndex {
    pub fn from_names<'a>(names: impl IntoIterator<Item = &'a str>) -> Self {
        let mut rest: Vec<String> = names
            .into_iter()
            .filter(|n| *n != ID_CONCEPT)
            .map(str::to_string)
            .collect();
        rest.sort();
        rest.dedup();
        let order: Vec<String> = std::iter::once(ID_CONCEPT.to_string()).chain(rest).collect();
        let index = order.iter().enumerate().map(|(i, n)| (n.clone(), i + 1)).collect();
        ConceptIndex { order, index }
    }

    pub fn get(&self, concept: &str) -> Option<usize> {
        self.index.get(concept).copied()
    }

    /// Concept names ordered by index.
    pub fn names(&self) -> &[String] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

pub fn concept_index(model: &KripkeModel) -> ConceptIndex {
    ConceptIndex::from_names(model.concept_names().iter().map(|c| &**c))
}

/// The database instance of a model, together with the relation names
/// (the domain of `Rel`'s third column, which `Rel` alone cannot carry when
/// a relation has no edges).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappedDatabase {
    pub instance: DatabaseInstance,
    pub relation_names: BTreeSet<String>,
}

pub fn build_database(model: &KripkeModel) -> MappedDatabase {
    let ci = concept_index(model);

    let mut sta = RelationInstance::empty(ci.len());
    for s in model.states() {
        let row = ci
            .names()
            .iter()
            .map(|c| model.concept_value(c, s).expect("indexed concept exists").clone())
            .collect();
        sta.insert(row).expect("row has one cell per concept");
    }

    let mut rel = RelationInstance::empty(3);
    for name in model.relation_names() {
        let code = Value::from(name);
        for &(src, dst) in model.edges(name).expect("listed relation") {
            rel.insert(vec![model.id_of(src).clone(), model.id_of(dst).clone(), code.clone()])
                .expect("degree 3");
        }
    }

    let unary = |values: &[Value]| {
        let mut r = RelationInstance::empty(1);
        for v in values {
            r.insert(vec![v.clone()]).expect("degree 1");
        }
        r
    };

    let mut instance = DatabaseInstance::new();
    instance.insert(STA, sta);
    instance.insert(REL, rel);
    instance.insert(CON, unary(model.concept_names()));
    instance.insert(OBJ, unary(model.objects()));
    MappedDatabase {
        instance,
        relation_names: model.relation_names().map(str::to_string).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    MissingRelation(&'static str),
    WrongDegree {
        relation: &'static str,
        expected: usize,
        found: usize,
    },
    /// A `Sta` cell holds a value that is not in `Obj`.
    StaValueNotObject {
        id: String,
        column: usize,
        value: String,
    },
    /// `Sta` is empty.
    EmptySta,
    /// Two `Sta` rows share an id.
    DuplicateStateId(String),
    /// A `Rel` endpoint is not a state id.
    DanglingEndpoint {
        value: String,
    },
    /// A `Rel` type code is not a relation name.
    UnknownTypeCode(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingRelation(r) => write!(f, "relation {r} is missing"),
            Violation::WrongDegree {
                relation,
                expected,
                found,
            } => {
                write!(f, "{relation} has degree {found}, expected {expected}")
            }
            Violation::StaValueNotObject { id, column, value } => write!(
                f,
                "Sta row with id `{id}` holds `{value}` in column {column}, which is not in Obj"
            ),
            Violation::EmptySta => write!(f, "Sta is empty"),
            Violation::DuplicateStateId(id) => {
                write!(f, "key violation: id `{id}` appears in more than one Sta row")
            }
            Violation::DanglingEndpoint { value } => {
                write!(f, "Rel refers to `{value}`, which is not a state id")
            }
            Violation::UnknownTypeCode(code) => write!(f, "Rel type code `{code}` is not a relation name"),
        }
    }
}

/// Checks the structural guarantees every mapped instance has. Returns the
/// empty list for a well-formed instance.
pub fn validate_instance(db: &MappedDatabase) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut fetch = |name: &'static str, degree: Option<usize>| match db.instance.get(name) {
        None => {
            out.push(Violation::MissingRelation(name));
            None
        }
        Some(r) => match degree {
            Some(d) if r.degree() != d => {
                out.push(Violation::WrongDegree {
                    relation: name,
                    expected: d,
                    found: r.degree(),
                });
                None
            }
            _ => Some(r),
        },
    };
    let con = fetch(CON, Some(1));
    let obj = fetch(OBJ, Some(1));
    let rel = fetch(REL, Some(3));
    let sta = fetch(STA, con.map(RelationInstance::len));
    let (Some(sta), Some(rel), Some(obj)) = (sta, rel, obj) else {
        return out;
    };

    if sta.is_empty() {
        out.push(Violation::EmptySta);
    }
    let objects = obj.column(1);
    let mut ids = BTreeSet::new();
    for row in sta.iter() {
        let Some(id) = row.first() else { continue };
        if !ids.insert(id.clone()) {
            out.push(Violation::DuplicateStateId(id.to_string()));
        }
        for (i, cell) in row.iter().enumerate() {
            if !objects.contains(cell) {
                out.push(Violation::StaValueNotObject {
                    id: id.to_string(),
                    column: i + 1,
                    value: cell.to_string(),
                });
            }
        }
    }
    for row in rel.iter() {
        for endpoint in &row[..2] {
            if !ids.contains(endpoint) {
                out.push(Violation::DanglingEndpoint {
                    value: endpoint.to_string(),
                });
            }
        }
        if !db.relation_names.contains(&*row[2]) {
            out.push(Violation::UnknownTypeCode(row[2].to_string()));
        }
    }
    out
}

/// Reads a model back out of its database. States come back in `Sta` row
/// order, so handles may differ from the original model.
pub fn model_from_database(db: &MappedDatabase) -> Result<KripkeModel, ModelError> {
    let missing = |name: &str| ModelError::Format(format!("database has no {name} relation"));
    let con = db.instance.get(CON).ok_or_else(|| missing(CON))?;
    let obj = db.instance.get(OBJ).ok_or_else(|| missing(OBJ))?;
    let sta = db.instance.get(STA).ok_or_else(|| missing(STA))?;
    let rel = db.instance.get(REL).ok_or_else(|| missing(REL))?;

    let concept_names: Vec<Value> = con.column(1).into_iter().collect();
    let ci = ConceptIndex::from_names(concept_names.iter().map(|c| &**c));
    if sta.degree() != ci.len() {
        return Err(ModelError::Format(format!(
            "Sta has degree {} but there are {} concepts",
            sta.degree(),
            ci.len()
        )));
    }
    let states = sta
        .iter()
        .map(|row| {
            ci.names()
                .iter()
                .zip(row)
                .map(|(c, v)| (c.clone(), Symbol(v.to_string())))
                .collect()
        })
        .collect();
    let mut relations: BTreeMap<String, Vec<[Symbol; 2]>> =
        db.relation_names.iter().map(|r| (r.clone(), Vec::new())).collect();
    for row in rel.iter() {
        relations
            .entry(row[2].to_string())
            .or_default()
            .push([Symbol(row[0].to_string()), Symbol(row[1].to_string())]);
    }
    KripkeModel::from_file(&ModelFile {
        objects: obj.iter().map(|t| Symbol(t[0].to_string())).collect(),
        concepts: ci.names().to_vec(),
        states,
        relations,
    })
}

/// The four tables as `(file name, TSV body)` pairs, in `Sta, Rel, Con, Obj`
/// order.
pub fn render_tables(db: &MappedDatabase, header: bool) -> Vec<(String, String)> {
    [STA, REL, CON, OBJ]
        .into_iter()
        .map(|name| {
            let body = db.instance.get(name).map_or_else(String::new, |r| r.to_tsv(header));
            (format!("{name}.tsv"), body)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn components() -> KripkeModel {
        KripkeModel::from_json(include_str!("../../../models/components.json")).unwrap()
    }

    fn rows(db: &MappedDatabase, name: &str) -> Vec<Vec<String>> {
        db.instance
            .get(name)
            .unwrap()
            .iter()
            .map(|t| t.iter().map(|v| v.to_string()).collect())
            .collect()
    }

    #[test]
    fn concept_index_examples() {
        let ci = concept_index(&components());
        assert_eq!(ci.get("id"), Some(1));
        assert_eq!(ci.get("code"), Some(2));

        let ci = ConceptIndex::from_names(["id"]);
        assert_eq!(ci.names(), ["id"]);

        let ci = ConceptIndex::from_names(["id", "b", "a"]);
        assert_eq!(ci.names(), ["id", "a", "b"]);
        assert_eq!(ci.get("b"), Some(3));
    }

    #[test]
    fn worked_example_database() {
        let db = build_database(&components());
        assert_eq!(
            rows(&db, STA),
            [["1", "d"], ["2", "a"], ["3", "b"], ["4", "c"]].map(|r| r.map(String::from).to_vec())
        );
        assert_eq!(
            rows(&db, REL),
            [["1", "2", "COMP"], ["1", "3", "COMP"], ["1", "4", "COMP"]].map(|r| r.map(String::from).to_vec())
        );
        assert_eq!(rows(&db, CON), vec![vec!["code"], vec!["id"]]);
        assert_eq!(rows(&db, OBJ).len(), 8);
        assert!(validate_instance(&db).is_empty());
    }

    #[test]
    fn single_state_without_edges() {
        let m =
            KripkeModel::from_json(r#"{"objects":["s"],"concepts":["id"],"states":[{"id":"s"}],"relations":{"R":[]}}"#)
                .unwrap();
        let db = build_database(&m);
        assert_eq!(rows(&db, STA), vec![vec!["s"]]);
        assert!(db.instance.get(REL).unwrap().is_empty());
        assert!(validate_instance(&db).is_empty());
    }

    #[test]
    fn validator_detects_sta_and_key_violations() {
        let mut db = build_database(&components());
        *db.instance.get_mut(STA).unwrap() = RelationInstance::empty(2);
        assert!(validate_instance(&db).contains(&Violation::EmptySta));

        let mut db = build_database(&components());
        db.instance
            .get_mut(STA)
            .unwrap()
            .insert(vec!["1".into(), "a".into()])
            .unwrap();
        assert_eq!(validate_instance(&db), vec![Violation::DuplicateStateId("1".into())]);

        let mut db = build_database(&components());
        db.instance
            .get_mut(STA)
            .unwrap()
            .insert(vec!["9".into(), "a".into()])
            .unwrap();
        assert!(matches!(
            validate_instance(&db).as_slice(),
            [Violation::StaValueNotObject { column: 1, .. }]
        ));

        let mut db = build_database(&components());
        db.instance
            .get_mut(REL)
            .unwrap()
            .insert(vec!["1".into(), "7".into(), "NEXT".into()])
            .unwrap();
        let v = validate_instance(&db);
        assert!(v.contains(&Violation::DanglingEndpoint { value: "7".into() }));
        assert!(v.contains(&Violation::UnknownTypeCode("NEXT".into())));

        let mut db = build_database(&components());
        db.instance.insert(REL, RelationInstance::empty(2));
        assert!(matches!(
            validate_instance(&db).as_slice(),
            [Violation::WrongDegree { relation: "Rel", .. }]
        ));
    }

    #[test]
    fn model_round_trips_through_its_database() {
        let m = components();
        let db = build_database(&m);
        let back = model_from_database(&db).unwrap();
        assert_eq!(build_database(&back), db);
    }

    #[test]
    fn tables_render_in_fixed_order() {
        let tables = render_tables(&build_database(&components()), false);
        let names: Vec<_> = tables.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["Sta.tsv", "Rel.tsv", "Con.tsv", "Obj.tsv"]);
        assert_eq!(tables[0].1, "1\td\n2\ta\n3\tb\n4\tc\n");
    }
}
