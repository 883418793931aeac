//! Differential testing: random models and queries, the correspondence
//! check between the direct evaluator and the compiled algebra, counterexample
//! shrinking, and seeded campaigns.

mod campaign;
mod check;
mod gen;
mod shrink;

pub use campaign::{gen_case, run_campaign, CampaignConfig, CampaignSummary, CaseRecord, Counterexample};
pub use check::{
    algebra_answer, atom_pointwise_violations, box_duality_holds, check, check_with, fingerprint,
    forall_rewrite_agrees, sta_violations, AlgebraPathError, CorrespondenceReport, Side, Witness,
};
pub use gen::{gen_model, gen_query, GenParams, ParamError, QueryGenerator, Shape, MAX_BINDERS};
pub use shrink::shrink;

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::kripke::KripkeModel;
    use crate::par::Execution;
    use crate::schema::{build_database, validate_instance};
    use crate::syntax::{parse_query, render_formula, Formula};
    use crate::translate::{Mutation, TranslateOptions};

    fn components() -> KripkeModel {
        KripkeModel::from_json(include_str!("../../../../models/components.json")).unwrap()
    }

    #[test]
    fn single_state_models() {
        let p = GenParams {
            max_states: 1,
            ..GenParams::default()
        };
        for case in 0..20 {
            let m = gen_model(&p, &mut p.case_rng(case));
            assert_eq!(m.state_count(), 1);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let p = GenParams::default();
        for case in 0..20 {
            let (m1, q1) = gen_case(&p, case);
            let (m2, q2) = gen_case(&p, case);
            assert_eq!(m1, m2);
            assert_eq!(q1, q2);
        }
        assert_ne!(gen_case(&p, 0).0.to_file(), gen_case(&p, 1).0.to_file());
    }

    #[test]
    fn generated_models_pass_the_validator() {
        let p = GenParams::default();
        for case in 0..1000 {
            let m = gen_model(&p, &mut p.case_rng(case));
            assert!(m.state_count() <= 6 && m.objects().len() <= 8);
            assert_eq!(validate_instance(&build_database(&m)), vec![], "case {case}");
        }
    }

    #[test]
    fn depth_zero_is_atomic() {
        let p = GenParams::default();
        let m = components();
        for case in 0..50 {
            let q = QueryGenerator::new(&p, &m).query(&mut p.case_rng(case), 0, None);
            assert!(matches!(q.formula, Formula::Eq(..) | Formula::Neq(..)));
        }
    }

    #[test]
    fn generated_queries_round_trip_and_respect_bounds() {
        let p = GenParams::default();
        for case in 0..300 {
            let (_, q) = gen_case(&p, case);
            assert!(q.formula.depth() <= p.max_depth);
            assert!(q.targets.len() <= p.max_free_vars);
            let targets: Vec<String> = q.targets.iter().map(|v| v.to_string()).collect();
            let back = parse_query(&render_formula(&q.formula), &targets).unwrap();
            assert_eq!(back, q, "case {case}");
        }
    }

    #[test]
    fn depth_four_covers_every_translated_constructor() {
        let p = GenParams::default();
        let mut seen = BTreeSet::new();
        for case in 0..200 {
            let (_, q) = gen_case(&p, case);
            q.formula.walk(&mut |f| {
                seen.insert(Shape::of(f));
            });
        }
        for s in Shape::TRANSLATED {
            assert!(seen.contains(&s), "{s} never generated");
        }
    }

    #[test]
    fn check_on_the_worked_example() {
        let m = components();
        let r = check(&m, &parse_query::<&str>("@code = 'b'", &[]).unwrap());
        assert!(r.equal && r.witness.is_none());
        assert_eq!(r.direct.unwrap().len(), 1);
        let r = check(&m, &parse_query::<&str>("[COMP] @code = 'b'", &[]).unwrap());
        assert!(r.equal);
        assert_eq!(r.algebra.unwrap().len(), 3);
    }

    #[test]
    fn broken_box_rule_is_caught_with_a_witness() {
        let m = components();
        let q = parse_query::<&str>("[COMP] @code = 'b'", &[]).unwrap();
        let opts = TranslateOptions {
            mutation: Some(Mutation::BoxAsDiamond),
            ..TranslateOptions::default()
        };
        let r = check_with(&m, &q, opts);
        assert!(r.is_mismatch());
        let w = r.witness.unwrap();
        let direct = r.direct.unwrap();
        let algebra = r.algebra.unwrap();
        match w.only_in {
            Side::Direct => assert!(direct.contains(&w.tuple) && !algebra.contains(&w.tuple)),
            Side::Algebra => assert!(algebra.contains(&w.tuple) && !direct.contains(&w.tuple)),
        }
    }

    #[test]
    fn relativized_concept_variables_are_direct_only() {
        let m = components();
        let q = parse_query::<&str>("exists %a . @%a = 'b'", &[]).unwrap();
        let r = check(&m, &q);
        assert!(r.direct_only && !r.is_mismatch() && r.error.is_none());
    }

    #[test]
    fn small_campaign_passes_and_is_reproducible() {
        let cfg = CampaignConfig::new(GenParams::default(), 10);
        let a = run_campaign(&cfg).unwrap();
        assert_eq!((a.passed, a.mismatches, a.errors), (10, 0, 0));
        let b = run_campaign(&CampaignConfig {
            execution: Execution::Sequential,
            ..cfg
        })
        .unwrap();
        assert_eq!(a.render(), b.render());
    }

    #[test]
    fn campaign_preconditions() {
        let cfg = CampaignConfig::new(GenParams::default(), 0);
        assert_eq!(run_campaign(&cfg).unwrap_err(), ParamError::NoCases);
        let p = GenParams {
            max_objects: 3,
            max_states: 4,
            ..GenParams::default()
        };
        assert!(matches!(p.validate(), Err(ParamError::TooFewObjects { .. })));
        let p = GenParams {
            max_depth: 0,
            ..GenParams::default()
        };
        assert_eq!(p.validate(), Err(ParamError::ZeroBound("max_depth")));
    }

    #[test]
    fn shrinking_keeps_the_failure_and_gets_smaller() {
        let opts = TranslateOptions {
            mutation: Some(Mutation::NegationIsIdentity),
            ..TranslateOptions::default()
        };
        let mut cfg = CampaignConfig::new(GenParams::default(), 200);
        cfg.options = opts;
        let s = run_campaign(&cfg).unwrap();
        let c = s.first_failure.expect("negation mutation is detected");
        let (m, q) = c.shrunk.unwrap();
        assert!(check_with(&m, &q, opts).is_mismatch());
        assert!(q.formula.size() <= c.query.formula.size());
        assert!(m.state_count() <= c.model.state_count());
        // a single negation over an atom is already a counterexample
        assert!(q.formula.size() <= 2, "{}", render_formula(&q.formula));
    }

    #[test]
    fn atoms_agree_pointwise() {
        let p = GenParams::default();
        for case in 0..200 {
            let mut rng = p.case_rng(case);
            let m = gen_model(&p, &mut rng);
            let q = QueryGenerator::new(&p, &m).query(&mut rng, 0, Some(Shape::Eq));
            assert_eq!(atom_pointwise_violations(&m, &q), Ok(0));
        }
        assert!(atom_pointwise_violations(&components(), &parse_query::<&str>("!'a' = 'a'", &[]).unwrap()).is_err());
    }

    #[test]
    fn duality_checks() {
        let p = GenParams::default();
        for case in 0..100 {
            let mut rng = p.case_rng(case);
            let m = gen_model(&p, &mut rng);
            let q = QueryGenerator::new(&p, &m).query(&mut rng, 3, Some(Shape::Box));
            assert!(matches!(q.formula, Formula::Box(..)));
            assert_eq!(box_duality_holds(&m, &q), Ok(true));
            let q = QueryGenerator::new(&p, &m).query(&mut rng, 3, Some(Shape::Forall));
            assert!(forall_rewrite_agrees(&m, &q).unwrap());
        }
    }

    #[test]
    fn fingerprints_are_stable_and_distinguish_models() {
        let m = components();
        assert_eq!(fingerprint(&m), fingerprint(&m.clone()));
        assert_eq!(fingerprint(&m).len(), 16);
        let p = GenParams::default();
        assert_ne!(fingerprint(&gen_case(&p, 0).0), fingerprint(&gen_case(&p, 1).0));
    }
}
