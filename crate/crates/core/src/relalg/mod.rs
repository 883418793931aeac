//! Relational algebra in the unnamed perspective: attributes are positions
//! `1..=degree`, instances are sets.

mod eval;
mod expr;
mod instance;
mod text;

pub use eval::{eval, AlgebraError};
pub use expr::{degree_of, AlgebraExpr, CmpOp, DegreeError, Operand, SelectionPredicate};
pub use instance::{ArityError, DatabaseInstance, RelationInstance, Tuple, Value};
pub use text::{parse_algebra, render_algebra, AlgebraParseError};

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_db() -> DatabaseInstance {
        let mut db = DatabaseInstance::new();
        db.insert(
            "Sta",
            RelationInstance::from_tuples(2, [["1", "d"], ["2", "a"], ["3", "b"], ["4", "c"]]).unwrap(),
        );
        db.insert(
            "Rel",
            RelationInstance::from_tuples(3, [["1", "2", "COMP"], ["1", "3", "COMP"], ["1", "4", "COMP"]]).unwrap(),
        );
        db.insert("Con", RelationInstance::from_tuples(1, [["id"], ["code"]]).unwrap());
        db.insert(
            "Obj",
            RelationInstance::from_tuples(1, ["1", "2", "3", "4", "a", "b", "c", "d"].map(|v| [v])).unwrap(),
        );
        db
    }

    fn rows(r: &RelationInstance) -> Vec<Vec<String>> {
        r.iter().map(|t| t.iter().map(|v| v.to_string()).collect()).collect()
    }

    #[test]
    fn degree_examples() {
        let schema = sample_db().schema();
        let e = AlgebraExpr::product(AlgebraExpr::base("Sta"), AlgebraExpr::base("Rel"));
        assert_eq!(degree_of(&e, &schema), Ok(5));
        let e = AlgebraExpr::project(vec![], AlgebraExpr::base("Sta"));
        assert_eq!(degree_of(&e, &schema), Ok(0));
        let e = AlgebraExpr::union(AlgebraExpr::base("Con"), AlgebraExpr::base("Rel"));
        assert!(matches!(
            degree_of(&e, &schema),
            Err(DegreeError::NotUnionCompatible { left: 1, right: 3, .. })
        ));
        let e = AlgebraExpr::base("Nope");
        assert_eq!(degree_of(&e, &schema), Err(DegreeError::UnknownRelation("Nope".into())));
        let e = AlgebraExpr::select(SelectionPredicate::cols(1, 3), AlgebraExpr::base("Sta"));
        assert!(matches!(
            degree_of(&e, &schema),
            Err(DegreeError::ColumnOutOfRange { column: 3, .. })
        ));
        let e = AlgebraExpr::project(vec![0], AlgebraExpr::base("Sta"));
        assert!(matches!(
            degree_of(&e, &schema),
            Err(DegreeError::ColumnOutOfRange { column: 0, .. })
        ));
        // repeats are allowed
        let e = AlgebraExpr::project(vec![2, 2, 1], AlgebraExpr::base("Sta"));
        assert_eq!(degree_of(&e, &schema), Ok(3));
    }

    #[test]
    fn eval_examples() {
        let db = sample_db();
        let sel = AlgebraExpr::select(SelectionPredicate::col_const(2, "b"), AlgebraExpr::base("Sta"));
        assert_eq!(rows(&eval(&sel, &db).unwrap()), vec![vec!["3", "b"]]);

        let unit_times_c = AlgebraExpr::product_raw(AlgebraExpr::Unit, AlgebraExpr::singleton("c"));
        assert_eq!(rows(&eval(&unit_times_c, &db).unwrap()), vec![vec!["c"]]);

        let proj = AlgebraExpr::project(vec![1], sel);
        assert_eq!(rows(&eval(&proj, &db).unwrap()), vec![vec!["3"]]);
    }

    #[test]
    fn unit_is_product_identity() {
        let db = sample_db();
        let sta = eval(&AlgebraExpr::base("Sta"), &db).unwrap();
        let left = AlgebraExpr::product_raw(AlgebraExpr::Unit, AlgebraExpr::base("Sta"));
        let right = AlgebraExpr::product_raw(AlgebraExpr::base("Sta"), AlgebraExpr::Unit);
        assert_eq!(eval(&left, &db).unwrap(), sta);
        assert_eq!(eval(&right, &db).unwrap(), sta);
        assert_eq!(
            AlgebraExpr::product(AlgebraExpr::Unit, AlgebraExpr::base("Sta")),
            AlgebraExpr::base("Sta")
        );
    }

    #[test]
    fn constant_only_selection_keeps_all_or_nothing() {
        let db = sample_db();
        let same = AlgebraExpr::select(
            SelectionPredicate::eq(Operand::constant("a"), Operand::constant("a")),
            AlgebraExpr::base("Sta"),
        );
        assert_eq!(eval(&same, &db).unwrap().len(), 4);
        let differ = AlgebraExpr::select(
            SelectionPredicate::eq(Operand::constant("a"), Operand::constant("b")),
            AlgebraExpr::base("Sta"),
        );
        assert!(eval(&differ, &db).unwrap().is_empty());
        let neq = AlgebraExpr::select(
            SelectionPredicate::neq(Operand::Column(1), Operand::constant("1")),
            AlgebraExpr::base("Sta"),
        );
        assert_eq!(eval(&neq, &db).unwrap().len(), 3);
    }

    #[test]
    fn fused_join_matches_plain_evaluation() {
        let db = sample_db();
        // σ over a product is fused; wrapping the product in a no-op
        // projection defeats fusion and gives the reference answer.
        let product = AlgebraExpr::product(AlgebraExpr::base("Sta"), AlgebraExpr::base("Rel"));
        let opaque = AlgebraExpr::project(vec![1, 2, 3, 4, 5], product.clone());
        let preds = [SelectionPredicate::cols(1, 3), SelectionPredicate::col_const(5, "COMP")];
        let fused = AlgebraExpr::project(vec![4, 2], AlgebraExpr::select_all(preds.clone(), product));
        let plain = AlgebraExpr::project(vec![4, 2], AlgebraExpr::select_all(preds, opaque));
        let fused = eval(&fused, &db).unwrap();
        assert_eq!(fused, eval(&plain, &db).unwrap());
        assert_eq!(rows(&fused), vec![vec!["2", "d"], vec!["3", "d"], vec!["4", "d"]]);
    }

    #[test]
    fn render_examples() {
        let e = AlgebraExpr::project(
            vec![1],
            AlgebraExpr::select(SelectionPredicate::col_const(2, "b"), AlgebraExpr::base("Sta")),
        );
        assert_eq!(render_algebra(&e), "(project (1) (select (= 2 'b') Sta))");
        assert_eq!(render_algebra(&AlgebraExpr::singleton("b")), "(const 'b')");
        assert_eq!(
            render_algebra(&AlgebraExpr::difference(
                AlgebraExpr::base("Obj"),
                AlgebraExpr::base("Con")
            )),
            "(diff Obj Con)"
        );
        assert_eq!(
            render_algebra(&AlgebraExpr::project(vec![], AlgebraExpr::Unit)),
            "(project () unit)"
        );
        assert_eq!(parse_algebra("(project (1) (select (= 2 'b') Sta))").unwrap(), e);
        assert!(parse_algebra("(project (1) Sta").is_err());
        assert!(parse_algebra("(frobnicate Sta)").is_err());
    }
}
