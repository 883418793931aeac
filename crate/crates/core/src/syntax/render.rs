use super::ast::{ConceptRef, Formula, Term};

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const UNARY: u8 = 4;

pub fn render_term(term: &Term) -> String {
    match term {
        Term::ObjectConstant(value) => quote(value),
        Term::ConceptConstant(name) => name.clone(),
        Term::Variable(v) => v.to_string(),
        Term::Relativized(ConceptRef::Constant(name)) => format!("@{name}"),
        Term::Relativized(ConceptRef::Variable(name)) => format!("@%{name}"),
    }
}

pub(crate) fn quote(value: &str) -> String {
    let mut out = String::with_capacity(value.len() + 2);
    out.push('\'');
    for c in value.chars() {
        if c == '\'' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('\'');
    out
}

/// Canonical text for a formula, with the fewest parentheses that parse back
/// to the same tree.
pub fn render_formula(formula: &Formula) -> String {
    let mut out = String::new();
    write(formula, 0, &mut out);
    out
}

fn write(f: &Formula, ctx: u8, out: &mut String) {
    let binary = |out: &mut String, prec: u8, op: &str, lhs: &Formula, rhs: &Formula, left_assoc: bool| {
        let wrap = ctx > prec;
        if wrap {
            out.push('(');
        }
        let (lp, rp) = if left_assoc { (prec, prec + 1) } else { (prec + 1, prec) };
        write(lhs, lp, out);
        out.push(' ');
        out.push_str(op);
        out.push(' ');
        write(rhs, rp, out);
        if wrap {
            out.push(')');
        }
    };
    match f {
        Formula::Eq(a, b) => {
            out.push_str(&render_term(a));
            out.push_str(" = ");
            out.push_str(&render_term(b));
        }
        Formula::Neq(a, b) => {
            out.push_str(&render_term(a));
            out.push_str(" != ");
            out.push_str(&render_term(b));
        }
        Formula::Not(inner) => {
            out.push('!');
            write(inner, UNARY, out);
        }
        Formula::Diamond(rel, inner) => {
            out.push_str(&format!("<{rel}> "));
            write(inner, UNARY, out);
        }
        Formula::Box(rel, inner) => {
            out.push_str(&format!("[{rel}] "));
            write(inner, UNARY, out);
        }
        Formula::Exists(v, inner) => {
            out.push_str(&format!("exists {v} . "));
            write(inner, UNARY, out);
        }
        Formula::Forall(v, inner) => {
            out.push_str(&format!("forall {v} . "));
            write(inner, UNARY, out);
        }
        Formula::Abstraction { var, body, arg } => {
            out.push_str(&format!("<lam {var} . "));
            write(body, 0, out);
            out.push_str(&format!(">({})", render_term(arg)));
        }
        Formula::And(a, b) => binary(out, AND, "&", a, b, true),
        Formula::Or(a, b) => binary(out, OR, "|", a, b, true),
        Formula::Implies(a, b) => binary(out, IMPLIES, "->", a, b, false),
    }
}
