use std::collections::BTreeSet;

use super::ast::{ConceptRef, Formula, Kind, Term, Var};

/// Free variables in order of first occurrence, reading the formula left to
/// right. In `<lam ?x . body>(arg)` the body comes before the argument.
pub fn free_vars(formula: &Formula) -> Vec<Var> {
    let mut out = Vec::new();
    let mut bound = Vec::new();
    collect_free(formula, &mut bound, &mut out);
    out
}

fn note(term: &Term, bound: &[Var], out: &mut Vec<Var>) {
    if let Some(v) = term.variable() {
        if !bound.contains(&v) && !out.contains(&v) {
            out.push(v);
        }
    }
}

fn collect_free(f: &Formula, bound: &mut Vec<Var>, out: &mut Vec<Var>) {
    match f {
        Formula::Eq(a, b) | Formula::Neq(a, b) => {
            note(a, bound, out);
            note(b, bound, out);
        }
        Formula::Not(inner) | Formula::Diamond(_, inner) | Formula::Box(_, inner) => collect_free(inner, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Formula::Exists(v, inner) | Formula::Forall(v, inner) => {
            bound.push(v.clone());
            collect_free(inner, bound, out);
            bound.pop();
        }
        Formula::Abstraction { var, body, arg } => {
            bound.push(var.clone());
            collect_free(body, bound, out);
            bound.pop();
            note(arg, bound, out);
        }
    }
}

/// Every variable mentioned anywhere, bound or free.
pub fn all_vars(formula: &Formula) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    formula.walk(&mut |f| match f {
        Formula::Eq(a, b) | Formula::Neq(a, b) => {
            out.extend(a.variable());
            out.extend(b.variable());
        }
        Formula::Exists(v, _) | Formula::Forall(v, _) => {
            out.insert(v.clone());
        }
        Formula::Abstraction { var, arg, .. } => {
            out.insert(var.clone());
            out.extend(arg.variable());
        }
        _ => {}
    });
    out
}

fn occurs_free(var: &Var, f: &Formula) -> bool {
    free_vars(f).contains(var)
}

/// A variable of the same kind as `base` whose name is not in `avoid`.
pub fn fresh_var(base: &Var, avoid: &BTreeSet<Var>) -> Var {
    let stem = base.name.trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|k| Var {
            name: format!("{stem}{k}"),
            kind: base.kind,
        })
        .find(|v| !avoid.contains(v))
        .expect("unbounded name supply")
}

fn substitute_term(term: &Term, var: &Var, replacement: &Term) -> Term {
    match term {
        Term::Variable(v) if v == var => replacement.clone(),
        Term::Relativized(ConceptRef::Variable(name)) if var.kind == Kind::Concept && *name == var.name => {
            match replacement {
                Term::ConceptConstant(c) => Term::Relativized(ConceptRef::Constant(c.clone())),
                Term::Variable(v) => Term::Relativized(ConceptRef::Variable(v.name.clone())),
                other => unreachable!("concept variable replaced by non-concept term {other:?}"),
            }
        }
        _ => term.clone(),
    }
}

/// Capture-avoiding substitution `formula[var := replacement]`.
///
/// `replacement` must be rigid (a constant or a variable) and of the same
/// kind as `var`; substituting a relativized term would change its meaning
/// under modal operators.
pub fn substitute(formula: &Formula, var: &Var, replacement: &Term) -> Formula {
    debug_assert!(replacement.is_rigid());
    debug_assert_eq!(replacement.kind(), var.kind);
    let capturing = replacement.variable();
    subst(formula, var, replacement, capturing.as_ref())
}

fn subst(f: &Formula, var: &Var, rep: &Term, capturing: Option<&Var>) -> Formula {
    let recur = |g: &Formula| subst(g, var, rep, capturing);
    // Rebinds `binder` over `body`, renaming it when it would capture `rep`.
    let rebind = |binder: &Var, body: &Formula| -> (Var, Formula) {
        if binder == var {
            return (binder.clone(), body.clone());
        }
        if capturing == Some(binder) && occurs_free(var, body) {
            let mut avoid = all_vars(body);
            avoid.insert(var.clone());
            avoid.insert(binder.clone());
            let renamed = fresh_var(binder, &avoid);
            let body = subst(body, binder, &Term::Variable(renamed.clone()), None);
            (renamed, recur(&body))
        } else {
            (binder.clone(), recur(body))
        }
    };
    match f {
        Formula::Eq(a, b) => Formula::Eq(substitute_term(a, var, rep), substitute_term(b, var, rep)),
        Formula::Neq(a, b) => Formula::Neq(substitute_term(a, var, rep), substitute_term(b, var, rep)),
        Formula::Not(g) => Formula::not(recur(g)),
        Formula::And(a, b) => Formula::and(recur(a), recur(b)),
        Formula::Or(a, b) => Formula::or(recur(a), recur(b)),
        Formula::Implies(a, b) => Formula::implies(recur(a), recur(b)),
        Formula::Diamond(r, g) => Formula::diamond(r, recur(g)),
        Formula::Box(r, g) => Formula::boxed(r, recur(g)),
        Formula::Exists(v, g) => {
            let (v, g) = rebind(v, g);
            Formula::exists(v, g)
        }
        Formula::Forall(v, g) => {
            let (v, g) = rebind(v, g);
            Formula::forall(v, g)
        }
        Formula::Abstraction { var: binder, body, arg } => {
            let (binder, body) = rebind(binder, body);
            Formula::abstraction(binder, body, substitute_term(arg, var, rep))
        }
    }
}

/// Renames bound variables so that no binder shares a name with a free
/// variable or with another binder. Free variables are untouched.
pub fn rename_apart(formula: &Formula) -> Formula {
    let mut used: BTreeSet<Var> = free_vars(formula).into_iter().collect();
    let mut avoid = all_vars(formula);
    apart(formula, &mut used, &mut avoid)
}

fn apart(f: &Formula, used: &mut BTreeSet<Var>, avoid: &mut BTreeSet<Var>) -> Formula {
    let claim = |binder: &Var, body: &Formula, used: &mut BTreeSet<Var>, avoid: &mut BTreeSet<Var>| {
        if used.contains(binder) {
            let renamed = fresh_var(binder, avoid);
            avoid.insert(renamed.clone());
            used.insert(renamed.clone());
            let body = subst(body, binder, &Term::Variable(renamed.clone()), None);
            (renamed, body)
        } else {
            used.insert(binder.clone());
            (binder.clone(), body.clone())
        }
    };
    match f {
        Formula::Eq(..) | Formula::Neq(..) => f.clone(),
        Formula::Not(g) => Formula::not(apart(g, used, avoid)),
        Formula::And(a, b) => {
            let a = apart(a, used, avoid);
            Formula::and(a, apart(b, used, avoid))
        }
        Formula::Or(a, b) => {
            let a = apart(a, used, avoid);
            Formula::or(a, apart(b, used, avoid))
        }
        Formula::Implies(a, b) => {
            let a = apart(a, used, avoid);
            Formula::implies(a, apart(b, used, avoid))
        }
        Formula::Diamond(r, g) => Formula::diamond(r, apart(g, used, avoid)),
        Formula::Box(r, g) => Formula::boxed(r, apart(g, used, avoid)),
        Formula::Exists(v, g) => {
            let (v, g) = claim(v, g, used, avoid);
            Formula::exists(v, apart(&g, used, avoid))
        }
        Formula::Forall(v, g) => {
            let (v, g) = claim(v, g, used, avoid);
            Formula::forall(v, apart(&g, used, avoid))
        }
        Formula::Abstraction { var, body, arg } => {
            let (v, g) = claim(var, body, used, avoid);
            Formula::abstraction(v, apart(&g, used, avoid), arg.clone())
        }
    }
}
