//! The modal query language: AST, parser, renderer and variable analysis.
//!
//! Surface syntax in brief: object constants are quoted (`'b'`), concept
//! constants are bare names (`code`), object variables are `?x`, concept
//! variables are `%a`, and `@t` relativizes a concept term to the current
//! state. Connectives are `!`, `&`, `|`, `->`; modal operators `<R>` and
//! `[R]`; quantifiers `exists ?x . φ` / `forall %a . φ`; abstraction
//! `<lam ?x . φ>(t)`.

mod ast;
mod parser;
mod render;
mod vars;

use std::fmt;

use thiserror::Error;

pub use ast::{ConceptRef, Formula, Kind, ModalQuery, Term, Var};
pub use parser::parse_formula;
pub(crate) use render::quote;
pub use render::{render_formula, render_term};
pub use vars::{all_vars, free_vars, fresh_var, rename_apart, substitute};

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QueryError {
    #[error("syntax error at {pos}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        pos: Pos,
        expected: Vec<String>,
        found: String,
    },
    #[error("kind error at {pos}: {message}")]
    Kind { pos: Pos, message: String },
    #[error("target list [{}] does not match free variables [{}]", join(targets), join(free))]
    FreeVarMismatch { targets: Vec<Var>, free: Vec<Var> },
    #[error("target variable {0} listed twice")]
    DuplicateTarget(Var),
    #[error("`{0}` is not a variable; targets are written `?x` or `%a`")]
    BadTarget(String),
}

fn join(vars: &[Var]) -> String {
    vars.iter().map(Var::to_string).collect::<Vec<_>>().join(", ")
}

pub(crate) fn check_targets(formula: &Formula, targets: &[Var]) -> Result<(), QueryError> {
    for (i, t) in targets.iter().enumerate() {
        if targets[..i].contains(t) {
            return Err(QueryError::DuplicateTarget(t.clone()));
        }
    }
    let free = free_vars(formula);
    let same = free.len() == targets.len() && free.iter().all(|v| targets.contains(v));
    if !same {
        return Err(QueryError::FreeVarMismatch {
            targets: targets.to_vec(),
            free,
        });
    }
    Ok(())
}

/// Parses query text against an ordered target list (`?x`, `%a`, ...).
pub fn parse_query<S: AsRef<str>>(text: &str, targets: &[S]) -> Result<ModalQuery, QueryError> {
    let targets = targets
        .iter()
        .map(|t| {
            let t = t.as_ref().trim();
            Var::from_sigiled(t).ok_or_else(|| QueryError::BadTarget(t.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let formula = parse_formula(text)?;
    ModalQuery::new(formula, targets)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code() -> Term {
        Term::relativized("code")
    }

    #[test]
    fn parses_relativized_equality() {
        let q = parse_query::<&str>("@code = 'b'", &[]).unwrap();
        assert_eq!(q.formula, Formula::eq(code(), Term::constant("b")));
        assert!(q.targets.is_empty());
    }

    #[test]
    fn parses_identity_atom_with_target() {
        let q = parse_query("?x = ?x", &["?x"]).unwrap();
        assert_eq!(q.formula, Formula::eq(Term::object_var("x"), Term::object_var("x")));
        assert_eq!(q.targets, vec![Var::object("x")]);
    }

    #[test]
    fn bare_concept_in_equality_is_kind_error() {
        let err = parse_query::<&str>("code = 'b'", &[]).unwrap_err();
        assert!(
            matches!(
                err,
                QueryError::Kind {
                    pos: Pos { line: 1, col: 1 },
                    ..
                }
            ),
            "{err}"
        );
        let err = parse_query::<&str>("'b' != %a", &["%a"]).unwrap_err();
        assert!(
            matches!(
                err,
                QueryError::Kind {
                    pos: Pos { line: 1, col: 8 },
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn relativizing_object_terms_is_kind_error() {
        assert!(matches!(parse_formula("@?x = 'a'"), Err(QueryError::Kind { .. })));
        assert!(matches!(parse_formula("@'a' = 'a'"), Err(QueryError::Kind { .. })));
    }

    #[test]
    fn abstraction_argument_kind_must_match_binder() {
        assert!(matches!(
            parse_formula("<lam ?x . ?x = 'a'>(code)"),
            Err(QueryError::Kind { .. })
        ));
        assert!(matches!(
            parse_formula("<lam %a . @%a = 'a'>(@code)"),
            Err(QueryError::Kind { .. })
        ));
        assert!(parse_formula("<lam %a . @%a = 'a'>(code)").is_ok());
    }

    #[test]
    fn syntax_error_reports_line_and_column() {
        let err = parse_formula("@code = 'b' &\n  & 'a' = 'a'").unwrap_err();
        match err {
            QueryError::Syntax { pos, .. } => assert_eq!(pos, Pos { line: 2, col: 3 }),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_formula("'abc"), Err(QueryError::Syntax { .. })));
        assert!(matches!(
            parse_formula("<COMP @code = 'b'"),
            Err(QueryError::Syntax { .. })
        ));
        assert!(matches!(parse_formula("@code = 'b' )"), Err(QueryError::Syntax { .. })));
    }

    #[test]
    fn target_list_must_match_free_vars() {
        assert!(matches!(
            parse_query::<&str>("?x = 'a'", &[]),
            Err(QueryError::FreeVarMismatch { .. })
        ));
        assert!(matches!(
            parse_query("'a' = 'a'", &["?x"]),
            Err(QueryError::FreeVarMismatch { .. })
        ));
        assert!(matches!(
            parse_query("?x = ?x", &["?x", "?x"]),
            Err(QueryError::DuplicateTarget(_))
        ));
        assert!(matches!(parse_query("?x = ?x", &["x"]), Err(QueryError::BadTarget(_))));
        // order is the user's choice
        let q = parse_query("?x = ?y", &["?y", "?x"]).unwrap();
        assert_eq!(q.targets, vec![Var::object("y"), Var::object("x")]);
    }

    #[test]
    fn precedence_and_associativity() {
        let a = || Formula::eq(Term::constant("a"), Term::constant("a"));
        let b = || Formula::eq(Term::constant("b"), Term::constant("b"));
        let c = || Formula::eq(Term::constant("c"), Term::constant("c"));
        assert_eq!(
            parse_formula("'a' = 'a' | 'b' = 'b' & 'c' = 'c'").unwrap(),
            Formula::or(a(), Formula::and(b(), c()))
        );
        assert_eq!(
            parse_formula("'a' = 'a' -> 'b' = 'b' -> 'c' = 'c'").unwrap(),
            Formula::implies(a(), Formula::implies(b(), c()))
        );
        assert_eq!(
            parse_formula("!'a' = 'a' & 'b' = 'b'").unwrap(),
            Formula::and(Formula::not(a()), b())
        );
        assert_eq!(
            parse_formula("<R> [S] !'a' = 'a'").unwrap(),
            Formula::diamond("R", Formula::boxed("S", Formula::not(a())))
        );
    }

    #[test]
    fn free_vars_examples() {
        let f = Formula::eq(Term::object_var("x"), code());
        assert_eq!(free_vars(&f), vec![Var::object("x")]);

        let f = Formula::exists(
            Var::object("x"),
            Formula::eq(Term::object_var("x"), Term::object_var("y")),
        );
        assert_eq!(free_vars(&f), vec![Var::object("y")]);

        let f = parse_formula("<lam ?y . <COMP> @code = ?y>(@code)").unwrap();
        assert!(free_vars(&f).is_empty());

        let f = parse_formula("<lam %a . @%a = ?z>(%b)").unwrap();
        assert_eq!(free_vars(&f), vec![Var::object("z"), Var::concept("b")]);
    }

    #[test]
    fn render_examples() {
        assert_eq!(render_formula(&Formula::eq(code(), Term::constant("b"))), "@code = 'b'");
        assert_eq!(
            render_formula(&Formula::boxed("COMP", Formula::eq(code(), Term::constant("b")))),
            "[COMP] @code = 'b'"
        );
        let a = Formula::eq(Term::constant("a"), Term::constant("a"));
        let nested = Formula::and(
            Formula::or(a.clone(), a.clone()),
            Formula::not(Formula::and(a.clone(), a.clone())),
        );
        assert_eq!(
            render_formula(&nested),
            "('a' = 'a' | 'a' = 'a') & !('a' = 'a' & 'a' = 'a')"
        );
        assert_eq!(render_term(&Term::constant("it's")), r"'it\'s'");
        assert_eq!(
            parse_formula(r"'it\'s' = 'x'").unwrap(),
            Formula::eq(Term::constant("it's"), Term::constant("x"))
        );
    }

    #[test]
    fn substitution_avoids_capture() {
        // (exists ?y . ?x = ?y)[?x := ?y] must not capture ?y
        let f = parse_formula("exists ?y . ?x = ?y").unwrap();
        let g = substitute(&f, &Var::object("x"), &Term::object_var("y"));
        match &g {
            Formula::Exists(v, body) => {
                assert_ne!(v.name, "y");
                assert_eq!(**body, Formula::eq(Term::object_var("y"), Term::Variable(v.clone())));
            }
            other => panic!("unexpected {other:?}"),
        }
        // concept substitution reaches relativized occurrences
        let f = parse_formula("@%a = 'x' & <lam %b . @%b = @%a>(%a)").unwrap();
        let g = substitute(&f, &Var::concept("a"), &Term::ConceptConstant("code".into()));
        assert_eq!(render_formula(&g), "@code = 'x' & <lam %b . @%b = @code>(code)");
    }

    #[test]
    fn rename_apart_separates_binders() {
        let f = parse_formula("?x = 'a' & exists ?x . (exists ?x . ?x = 'b') & forall ?x . ?x = ?x").unwrap();
        let g = rename_apart(&f);
        assert_eq!(free_vars(&g), free_vars(&f));
        let mut binders = Vec::new();
        g.walk(&mut |h| {
            if let Formula::Exists(v, _) | Formula::Forall(v, _) = h {
                binders.push(v.clone());
            }
        });
        assert_eq!(binders.len(), 3);
        assert!(!binders.contains(&Var::object("x")));
        let distinct: std::collections::BTreeSet<_> = binders.iter().collect();
        assert_eq!(distinct.len(), 3);
    }
}
