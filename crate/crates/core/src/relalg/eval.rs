use std::collections::BTreeSet;

use thiserror::Error;

use super::expr::{degree_of, AlgebraExpr, Operand, SelectionPredicate};
use super::instance::{DatabaseInstance, RelationInstance, Tuple, Value};
use super::DegreeError;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AlgebraError {
    #[error(transparent)]
    Degree(#[from] DegreeError),
}

/// Evaluates `expr` on `db` under set semantics. The expression is
/// degree-checked first, so evaluation itself cannot fail.
pub fn eval(expr: &AlgebraExpr, db: &DatabaseInstance) -> Result<RelationInstance, AlgebraError> {
    let degree = degree_of(expr, &db.schema())?;
    let result = eval_checked(expr, db);
    debug_assert_eq!(result.degree(), degree);
    Ok(result)
}

// Selections directly above a product are applied while the pairs are
// enumerated, and a projection above that picks its columns straight from
// the pair. Neither changes the result, only how many intermediate tuples
// get allocated.
fn eval_checked(expr: &AlgebraExpr, db: &DatabaseInstance) -> RelationInstance {
    match expr {
        AlgebraExpr::Base(name) => db.get(name).expect("degree-checked").clone(),
        AlgebraExpr::Singleton(v) => RelationInstance::from_set(1, BTreeSet::from([vec![v.clone()]])),
        AlgebraExpr::Unit => RelationInstance::unit(),
        AlgebraExpr::Select(..) => {
            let (preds, bottom) = peel_selections(expr);
            if let AlgebraExpr::Product(a, b) = bottom {
                let (left, right) = (eval_checked(a, db), eval_checked(b, db));
                let degree = left.degree() + right.degree();
                let mut out = BTreeSet::new();
                join_pairs(&preds, &left, &right, |t, u| {
                    out.insert(concat(t, u));
                });
                RelationInstance::from_set(degree, out)
            } else {
                let input = eval_checked(bottom, db);
                let kept = input
                    .iter()
                    .filter(|t| preds.iter().all(|p| p.holds(t)))
                    .cloned()
                    .collect();
                RelationInstance::from_set(input.degree(), kept)
            }
        }
        AlgebraExpr::Project(cols, inner) => {
            let (preds, bottom) = peel_selections(inner);
            let mut out = BTreeSet::new();
            if let AlgebraExpr::Product(a, b) = bottom {
                let (left, right) = (eval_checked(a, db), eval_checked(b, db));
                let split = left.degree();
                join_pairs(&preds, &left, &right, |t, u| {
                    out.insert(
                        cols.iter()
                            .map(|&c| {
                                if c <= split {
                                    t[c - 1].clone()
                                } else {
                                    u[c - 1 - split].clone()
                                }
                            })
                            .collect::<Tuple>(),
                    );
                });
            } else {
                let input = eval_checked(bottom, db);
                for t in input.iter().filter(|t| preds.iter().all(|p| p.holds(t))) {
                    out.insert(cols.iter().map(|&c| t[c - 1].clone()).collect());
                }
            }
            RelationInstance::from_set(cols.len(), out)
        }
        AlgebraExpr::Product(a, b) => {
            let (left, right) = (eval_checked(a, db), eval_checked(b, db));
            let degree = left.degree() + right.degree();
            let mut out = BTreeSet::new();
            join_pairs(&[], &left, &right, |t, u| {
                out.insert(concat(t, u));
            });
            RelationInstance::from_set(degree, out)
        }
        AlgebraExpr::Union(a, b) => {
            let left = eval_checked(a, db);
            let right = eval_checked(b, db);
            let degree = left.degree();
            let out = left.tuples().union(right.tuples()).cloned().collect();
            RelationInstance::from_set(degree, out)
        }
        AlgebraExpr::Difference(a, b) => {
            let left = eval_checked(a, db);
            let right = eval_checked(b, db);
            let degree = left.degree();
            let out = left.tuples().difference(right.tuples()).cloned().collect();
            RelationInstance::from_set(degree, out)
        }
        AlgebraExpr::Intersection(a, b) => {
            let left = eval_checked(a, db);
            let right = eval_checked(b, db);
            let degree = left.degree();
            let out = left.tuples().intersection(right.tuples()).cloned().collect();
            RelationInstance::from_set(degree, out)
        }
    }
}

fn peel_selections(mut expr: &AlgebraExpr) -> (Vec<&SelectionPredicate>, &AlgebraExpr) {
    let mut preds = Vec::new();
    while let AlgebraExpr::Select(p, inner) = expr {
        preds.push(p);
        expr = inner;
    }
    (preds, expr)
}

fn concat(t: &[Value], u: &[Value]) -> Tuple {
    let mut v = Vec::with_capacity(t.len() + u.len());
    v.extend_from_slice(t);
    v.extend_from_slice(u);
    v
}

fn pair_value<'a>(op: &'a Operand, t: &'a [Value], u: &'a [Value]) -> &'a Value {
    match op {
        Operand::Column(c) if *c <= t.len() => &t[c - 1],
        Operand::Column(c) => &u[c - 1 - t.len()],
        Operand::Constant(v) => v,
    }
}

fn join_pairs(
    preds: &[&SelectionPredicate],
    left: &RelationInstance,
    right: &RelationInstance,
    mut emit: impl FnMut(&[Value], &[Value]),
) {
    for t in left.iter() {
        'pairs: for u in right.iter() {
            for p in preds {
                let equal = pair_value(&p.lhs, t, u) == pair_value(&p.rhs, t, u);
                if equal != (p.op == super::CmpOp::Eq) {
                    continue 'pairs;
                }
            }
            emit(t, u);
        }
    }
}
