use std::collections::BTreeSet;

use thiserror::Error;

use super::model::{KripkeModel, StateId};
use crate::par::{self, Execution};
use crate::relalg::{RelationInstance, Tuple, Value};
use crate::syntax::{ConceptRef, Formula, Kind, ModalQuery, Term, Var};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("variable {0} is unbound")]
    UnboundVariable(Var),
    #[error("concept variable {var} is bound to `{value}`, which is not a concept")]
    NotAConcept { var: Var, value: String },
}

/// Variable bindings. Later bindings shadow earlier ones, which gives the
/// `v[ϱ/d]` override without copying.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    bindings: Vec<(Var, Value)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// `self[var/value]` as a new assignment.
    pub fn with(mut self, var: Var, value: &str) -> Self {
        self.bindings.push((var, Value::from(value)));
        self
    }

    pub fn get(&self, var: &Var) -> Option<&Value> {
        self.bindings.iter().rev().find(|(v, _)| v == var).map(|(_, d)| d)
    }

    fn push(&mut self, var: Var, value: Value) {
        self.bindings.push((var, value));
    }

    fn pop(&mut self) {
        self.bindings.pop();
    }
}

fn lookup<'a>(v: &'a Assignment, var: &Var) -> Result<&'a Value, EvalError> {
    v.get(var).ok_or_else(|| EvalError::UnboundVariable(var.clone()))
}

fn concept_at<'a>(model: &'a KripkeModel, concept: &str, state: StateId) -> Result<&'a Value, EvalError> {
    model
        .concept_value(concept, state)
        .ok_or_else(|| EvalError::UnknownConcept(concept.to_string()))
}

// Borrowing form of term evaluation shared by `term_eval` and `satisfies`.
fn term_value<'a>(
    model: &'a KripkeModel,
    v: &'a Assignment,
    t: &'a Term,
    state: StateId,
) -> Result<&'a str, EvalError> {
    match t {
        Term::Variable(var) => lookup(v, var).map(|d| &**d),
        Term::ObjectConstant(c) => {
            if model.is_object(c) {
                Ok(c)
            } else {
                Err(EvalError::UnknownConstant(c.clone()))
            }
        }
        Term::ConceptConstant(c) => {
            if model.has_concept(c) {
                Ok(c)
            } else {
                Err(EvalError::UnknownConcept(c.clone()))
            }
        }
        Term::Relativized(ConceptRef::Constant(c)) => concept_at(model, c, state).map(|d| &**d),
        Term::Relativized(ConceptRef::Variable(name)) => {
            let var = Var::concept(name.clone());
            let concept = lookup(v, &var)?;
            model
                .concept_value(concept, state)
                .map(|d| &**d)
                .ok_or_else(|| EvalError::NotAConcept {
                    var,
                    value: concept.to_string(),
                })
        }
    }
}

/// Denotation of `t` at `state`: an object for object terms, a concept name
/// for concept terms. Constants denote themselves.
pub fn term_eval(model: &KripkeModel, v: &Assignment, t: &Term, state: StateId) -> Result<Value, EvalError> {
    term_value(model, v, t, state).map(Value::from)
}

/// Whether `formula` holds at `state` under `v`.
pub fn satisfies(model: &KripkeModel, state: StateId, v: &Assignment, formula: &Formula) -> Result<bool, EvalError> {
    let mut scratch = v.clone();
    holds(model, state, &mut scratch, formula)
}

fn domain(model: &KripkeModel, kind: Kind) -> &[Value] {
    match kind {
        Kind::Object => model.objects(),
        Kind::Concept => model.concept_names(),
    }
}

fn holds(model: &KripkeModel, state: StateId, v: &mut Assignment, f: &Formula) -> Result<bool, EvalError> {
    Ok(match f {
        Formula::Eq(a, b) => term_value(model, v, a, state)? == term_value(model, v, b, state)?,
        Formula::Neq(a, b) => term_value(model, v, a, state)? != term_value(model, v, b, state)?,
        Formula::Not(g) => !holds(model, state, v, g)?,
        Formula::And(a, b) => holds(model, state, v, a)? && holds(model, state, v, b)?,
        Formula::Or(a, b) => holds(model, state, v, a)? || holds(model, state, v, b)?,
        Formula::Implies(a, b) => !holds(model, state, v, a)? || holds(model, state, v, b)?,
        Formula::Diamond(rel, g) => {
            let succ = model
                .successors(rel, state)
                .ok_or_else(|| EvalError::UnknownRelation(rel.clone()))?;
            let mut any = false;
            for &next in succ {
                if holds(model, next, v, g)? {
                    any = true;
                    break;
                }
            }
            any
        }
        Formula::Box(rel, g) => {
            let succ = model
                .successors(rel, state)
                .ok_or_else(|| EvalError::UnknownRelation(rel.clone()))?;
            let mut all = true;
            for &next in succ {
                if !holds(model, next, v, g)? {
                    all = false;
                    break;
                }
            }
            all
        }
        Formula::Exists(var, g) | Formula::Forall(var, g) => {
            let universal = matches!(f, Formula::Forall(..));
            let mut result = universal;
            for d in domain(model, var.kind) {
                v.push(var.clone(), d.clone());
                let r = holds(model, state, v, g);
                v.pop();
                if r? != universal {
                    result = !universal;
                    break;
                }
            }
            result
        }
        Formula::Abstraction { var, body, arg } => {
            let d = Value::from(term_value(model, v, arg, state)?);
            v.push(var.clone(), d);
            let r = holds(model, state, v, body);
            v.pop();
            r?
        }
    })
}

/// Rejects constants, concepts and relations the model does not know,
/// wherever they occur in the formula.
pub fn check_signature(model: &KripkeModel, formula: &Formula) -> Result<(), EvalError> {
    let mut err = None;
    let check_term = |t: &Term| -> Result<(), EvalError> {
        match t {
            Term::ObjectConstant(c) if !model.is_object(c) => Err(EvalError::UnknownConstant(c.clone())),
            Term::ConceptConstant(c) | Term::Relativized(ConceptRef::Constant(c)) if !model.has_concept(c) => {
                Err(EvalError::UnknownConcept(c.clone()))
            }
            _ => Ok(()),
        }
    };
    formula.walk(&mut |g| {
        if err.is_some() {
            return;
        }
        let r = match g {
            Formula::Eq(a, b) | Formula::Neq(a, b) => check_term(a).and_then(|_| check_term(b)),
            Formula::Diamond(r, _) | Formula::Box(r, _) if !model.has_relation(r) => {
                Err(EvalError::UnknownRelation(r.clone()))
            }
            Formula::Abstraction { arg, .. } => check_term(arg),
            _ => Ok(()),
        };
        if let Err(e) = r {
            err = Some(e);
        }
    });
    err.map_or(Ok(()), Err)
}

/// Every combination of target-variable values, first variable slowest.
pub fn assignments(model: &KripkeModel, targets: &[Var]) -> Vec<Vec<Value>> {
    targets.iter().fold(vec![Vec::new()], |acc, var| {
        let dom = domain(model, var.kind);
        acc.iter()
            .flat_map(|prefix| {
                dom.iter().map(move |d| {
                    let mut next = prefix.clone();
                    next.push(d.clone());
                    next
                })
            })
            .collect()
    })
}

/// The query image computed from the truth definition: all
/// `⟨d1, …, dn, id(Γ)⟩` such that the formula holds at `Γ` with the targets
/// bound to `d1 … dn`.
pub fn answer_direct(model: &KripkeModel, query: &ModalQuery) -> Result<RelationInstance, EvalError> {
    answer_direct_with(model, query, Execution::Sequential)
}

pub fn answer_direct_with(
    model: &KripkeModel,
    query: &ModalQuery,
    exec: Execution,
) -> Result<RelationInstance, EvalError> {
    check_signature(model, &query.formula)?;
    let combos = assignments(model, &query.targets);
    let per_combo = par::map(exec, &combos, |values| -> Result<Vec<Tuple>, EvalError> {
        let mut v = Assignment::new();
        for (var, d) in query.targets.iter().zip(values) {
            v.push(var.clone(), d.clone());
        }
        let mut rows = Vec::new();
        for state in model.states() {
            if holds(model, state, &mut v, &query.formula)? {
                let mut row = values.clone();
                row.push(model.id_of(state).clone());
                rows.push(row);
            }
        }
        Ok(rows)
    });
    let mut out = BTreeSet::new();
    for rows in per_combo {
        out.extend(rows?);
    }
    Ok(RelationInstance::from_set(query.targets.len() + 1, out))
}
