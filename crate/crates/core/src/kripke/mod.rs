//! Kripke models with individual concepts, and the direct evaluator that
//! implements the truth definition. This is the reference semantics the
//! algebra path is checked against.

mod eval;
mod model;

pub use eval::{
    answer_direct, answer_direct_with, assignments, check_signature, satisfies, term_eval, Assignment, EvalError,
};
pub use model::{KripkeModel, ModelError, ModelFile, StateId, Symbol, ID_CONCEPT};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_query, Formula, Term, Var};

    fn components() -> KripkeModel {
        KripkeModel::from_json(include_str!("../../../../models/components.json")).unwrap()
    }

    fn state(m: &KripkeModel, id: &str) -> StateId {
        m.state_by_id(id).unwrap()
    }

    fn answer(m: &KripkeModel, text: &str, targets: &[&str]) -> Vec<Vec<String>> {
        let q = parse_query(text, targets).unwrap();
        answer_direct(m, &q)
            .unwrap()
            .iter()
            .map(|t| t.iter().map(|v| v.to_string()).collect())
            .collect()
    }

    #[test]
    fn term_eval_examples() {
        let m = components();
        let v = Assignment::new();
        assert_eq!(
            &*term_eval(&m, &v, &Term::relativized("code"), state(&m, "3")).unwrap(),
            "b"
        );

        let v = Assignment::new().with(Var::object("x"), "a");
        for s in m.states() {
            assert_eq!(&*term_eval(&m, &v, &Term::object_var("x"), s).unwrap(), "a");
        }

        let v = Assignment::new().with(Var::concept("g"), "code");
        let t = parse_formula("@%g = 'd'").unwrap();
        let Formula::Eq(lhs, _) = t else { unreachable!() };
        assert_eq!(&*term_eval(&m, &v, &lhs, state(&m, "1")).unwrap(), "d");
    }

    #[test]
    fn term_eval_errors() {
        let m = components();
        let v = Assignment::new();
        let s = state(&m, "1");
        assert_eq!(
            term_eval(&m, &v, &Term::constant("zz"), s),
            Err(EvalError::UnknownConstant("zz".into()))
        );
        assert_eq!(
            term_eval(&m, &v, &Term::object_var("x"), s),
            Err(EvalError::UnboundVariable(Var::object("x")))
        );
        assert_eq!(
            term_eval(&m, &v, &Term::relativized("colour"), s),
            Err(EvalError::UnknownConcept("colour".into()))
        );
    }

    #[test]
    fn satisfies_examples() {
        let m = components();
        let v = Assignment::new();
        let f = parse_formula("@code = 'b'").unwrap();
        assert!(satisfies(&m, state(&m, "3"), &v, &f).unwrap());

        let f = parse_formula("?x = ?x").unwrap();
        for s in m.states() {
            for o in m.objects() {
                let v = Assignment::new().with(Var::object("x"), o);
                assert!(satisfies(&m, s, &v, &f).unwrap());
            }
        }

        let f = parse_formula("<lam ?y . <COMP> @code = ?y>(@code)").unwrap();
        assert!(!satisfies(&m, state(&m, "1"), &v, &f).unwrap());

        let f = parse_formula("<NEXT> 'a' = 'a'").unwrap();
        assert_eq!(
            satisfies(&m, state(&m, "1"), &v, &f),
            Err(EvalError::UnknownRelation("NEXT".into()))
        );
    }

    #[test]
    fn answer_direct_examples() {
        let m = components();
        assert_eq!(answer(&m, "<COMP> @code = 'b'", &[]), vec![vec!["1"]]);
        assert_eq!(
            answer(&m, "[COMP] @code = 'b'", &[]),
            vec![vec!["2"], vec!["3"], vec!["4"]]
        );
        assert_eq!(answer(&m, "@id = '3' & @code = ?a", &["?a"]), vec![vec!["b", "3"]]);
        assert_eq!(answer(&m, "@code = 'b'", &[]), vec![vec!["3"]]);
        assert!(answer(&m, "<lam ?y . <COMP> @code = ?y>(@code)", &[]).is_empty());
    }

    #[test]
    fn concept_quantifiers_range_over_concept_names() {
        let m = components();
        // at state 1 some concept has value d (code), and some has value 1 (id)
        assert_eq!(answer(&m, "exists %c . @%c = 'd'", &[]), vec![vec!["1"]]);
        // every state has a concept equal to its id
        assert_eq!(answer(&m, "exists %c . @%c = @id", &[]).len(), 4);
        assert_eq!(answer(&m, "@%c = '3'", &["%c"]), vec![vec!["id", "3"]]);
    }

    #[test]
    fn answer_direct_rejects_unknown_symbols_even_when_short_circuited() {
        let m = components();
        let q = parse_query::<&str>("'a' = 'b' & 'zz' = 'zz'", &[]).unwrap();
        assert_eq!(answer_direct(&m, &q), Err(EvalError::UnknownConstant("zz".into())));
    }

    #[test]
    fn parallel_and_sequential_answers_agree() {
        let m = components();
        let q = parse_query("<COMP> @code = ?x | ?y = @id", &["?y", "?x"]).unwrap();
        assert_eq!(
            answer_direct_with(&m, &q, crate::par::Execution::Parallel).unwrap(),
            answer_direct_with(&m, &q, crate::par::Execution::Sequential).unwrap()
        );
    }
}
