mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use modalrel::harness::Shape;
use modalrel::kripke::{answer_direct, assignments, satisfies, Assignment, KripkeModel};
use modalrel::syntax::{substitute, Formula, ModalQuery};

// every assignment of the targets, at every state
fn agree(m: &KripkeModel, q: &ModalQuery, f: &Formula, g: &Formula) -> Result<(), TestCaseError> {
    for values in assignments(m, &q.targets) {
        let v = q
            .targets
            .iter()
            .zip(&values)
            .fold(Assignment::new(), |a, (var, d)| a.with(var.clone(), d));
        for s in m.states() {
            prop_assert_eq!(satisfies(m, s, &v, f).unwrap(), satisfies(m, s, &v, g).unwrap());
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn box_diamond_duality(seed in any::<u64>()) {
        let (m, q) = common::model_and_query(seed, 3, Some(Shape::Box));
        let Formula::Box(rel, body) = &q.formula else { unreachable!() };
        let dual = Formula::not(Formula::diamond(rel, Formula::not((**body).clone())));
        agree(&m, &q, &q.formula, &dual)?;
    }

    #[test]
    fn de_morgan(seed in any::<u64>()) {
        let (m, q) = common::model_and_query(seed, 3, Some(Shape::And));
        let Formula::And(a, b) = &q.formula else { unreachable!() };
        let lhs = Formula::not(q.formula.clone());
        let rhs = Formula::or(Formula::not((**a).clone()), Formula::not((**b).clone()));
        agree(&m, &q, &lhs, &rhs)?;
    }

    #[test]
    fn quantifier_duality(seed in any::<u64>()) {
        let (m, q) = common::model_and_query(seed, 3, Some(Shape::Forall));
        let Formula::Forall(var, body) = &q.formula else { unreachable!() };
        let dual = Formula::not(Formula::exists(var.clone(), Formula::not((**body).clone())));
        agree(&m, &q, &q.formula, &dual)?;
    }

    #[test]
    fn rigid_abstraction_is_substitution(seed in any::<u64>()) {
        let (m, q) = common::model_and_query(seed, 3, Some(Shape::Lambda));
        let Formula::Abstraction { var, body, arg } = &q.formula else { unreachable!() };
        if arg.is_rigid() {
            agree(&m, &q, &q.formula, &substitute(body, var, arg))?;
        }
    }

    #[test]
    fn closed_answers_are_state_ids(seed in any::<u64>()) {
        let (m, q) = common::model_and_query(seed, 4, None);
        if q.targets.is_empty() {
            let ids: BTreeSet<_> = m.states().map(|s| vec![m.id_of(s).clone()]).collect();
            let answer = answer_direct(&m, &q).unwrap();
            prop_assert!(answer.iter().all(|t| ids.contains(t)));
        }
    }
}
