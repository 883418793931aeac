//! Compiles modal queries to relational algebra over the mapped database.
//!
//! Every (sub)translation under a variable context `ϱ1 … ϱn` yields an
//! expression of degree `n + 1`: columns `1..=n` hold the variables in
//! context order and column `n + 1` holds the id of a state where the
//! subformula is true. Binders (quantifiers, abstraction) prepend their
//! variable, so inside them it sits at column 1.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::kripke::{check_signature, EvalError, KripkeModel};
use crate::relalg::{AlgebraExpr, Operand, SelectionPredicate, Value};
use crate::schema::{concept_index, ConceptIndex, CON, OBJ, REL, STA};
use crate::syntax::{all_vars, fresh_var, render_term, substitute, ConceptRef, Formula, Kind, ModalQuery, Term, Var};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TranslateError {
    #[error("cannot translate `{0}`: relativized concept variables have no algebra counterpart")]
    UntranslatableTerm(String),
    #[error("variable {0} is not in scope")]
    UnknownVariable(Var),
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("unknown concept `{0}`")]
    UnknownConcept(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("variable {0} bound to a concept term can only be used relativized or as an abstraction argument")]
    ConceptInComparison(Var),
}

impl From<EvalError> for TranslateError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::UnknownConstant(c) => TranslateError::UnknownConstant(c),
            EvalError::UnknownConcept(c) => TranslateError::UnknownConcept(c),
            EvalError::UnknownRelation(r) => TranslateError::UnknownRelation(r),
            EvalError::UnboundVariable(v) => TranslateError::UnknownVariable(v),
            EvalError::NotAConcept { var, .. } => TranslateError::UnknownVariable(var),
        }
    }
}

/// The ordered variables in scope; position `k` (1-based) is column `k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarContext(Vec<Var>);

impl VarContext {
    pub fn new(vars: Vec<Var>) -> Self {
        debug_assert!(
            vars.iter().enumerate().all(|(i, v)| !vars[..i].contains(v)),
            "context variables must be distinct"
        );
        VarContext(vars)
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn column_of(&self, var: &Var) -> Option<usize> {
        self.0.iter().position(|v| v == var).map(|i| i + 1)
    }

    /// `[var] ++ self`
    pub fn prepend(&self, var: Var) -> Self {
        let mut vars = Vec::with_capacity(self.0.len() + 1);
        vars.push(var);
        vars.extend(self.0.iter().cloned());
        VarContext::new(vars)
    }

    pub fn contains(&self, var: &Var) -> bool {
        self.0.contains(var)
    }
}

/// A translated term: an attribute index or a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TermRef {
    Column(usize),
    Constant(Value),
}

impl From<TermRef> for Operand {
    fn from(t: TermRef) -> Self {
        match t {
            TermRef::Column(c) => Operand::Column(c),
            TermRef::Constant(v) => Operand::Constant(v),
        }
    }
}

/// What the translator needs to know about the model.
#[derive(Clone, Debug)]
pub struct Signature {
    pub concepts: ConceptIndex,
    pub relations: BTreeSet<String>,
    pub objects: BTreeSet<Value>,
}

impl Signature {
    pub fn of(model: &KripkeModel) -> Self {
        Signature {
            concepts: concept_index(model),
            relations: model.relation_names().map(str::to_string).collect(),
            objects: model.objects().iter().cloned().collect(),
        }
    }
}

/// How universal quantification is compiled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ForallRule {
    /// Division by difference over the subformula's translation.
    #[default]
    Division,
    /// `¬∃¬`.
    NotExistsNot,
}

/// A deliberately broken translation rule, used to show the differential
/// harness catches translator bugs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// Atoms keep every row instead of selecting on the comparison.
    AtomIgnoresComparison,
    /// Negation returns its operand unchanged.
    NegationIsIdentity,
    /// Diamond follows edges of every relation.
    DiamondIgnoresRelationName,
    /// Box is compiled with the diamond rule.
    BoxAsDiamond,
    /// Disjunction is compiled as intersection.
    OrAsIntersection,
    /// Conjunction is compiled as union.
    AndAsUnion,
    /// Existential is compiled with the universal rule.
    ExistsAsForall,
    /// Universal is compiled with the existential rule.
    ForallAsExists,
    /// Abstraction over `@c` forgets to join on the state.
    LambdaIgnoresStateJoin,
    /// Abstraction over a rigid term skips the substitution and leaves the
    /// binder unconstrained.
    LambdaSkipsSubstitution,
}

impl Mutation {
    pub const ALL: [Mutation; 10] = [
        Mutation::AtomIgnoresComparison,
        Mutation::NegationIsIdentity,
        Mutation::DiamondIgnoresRelationName,
        Mutation::BoxAsDiamond,
        Mutation::OrAsIntersection,
        Mutation::AndAsUnion,
        Mutation::ExistsAsForall,
        Mutation::ForallAsExists,
        Mutation::LambdaIgnoresStateJoin,
        Mutation::LambdaSkipsSubstitution,
    ];
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TranslateOptions {
    pub forall: ForallRule,
    pub mutation: Option<Mutation>,
}

/// Term translation: constants stay constants, the `k`-th context variable
/// is column `k`, and `@c` is column `n + index(c)` of the `VT × Sta` row.
pub fn tt(term: &Term, ctx: &VarContext, ci: &ConceptIndex) -> Result<TermRef, TranslateError> {
    match term {
        Term::ObjectConstant(c) => Ok(TermRef::Constant(Value::from(c.as_str()))),
        Term::Variable(v) if v.kind == Kind::Concept => Err(TranslateError::ConceptInComparison(v.clone())),
        Term::Variable(v) => ctx
            .column_of(v)
            .map(TermRef::Column)
            .ok_or_else(|| TranslateError::UnknownVariable(v.clone())),
        Term::Relativized(ConceptRef::Constant(c)) => ci
            .get(c)
            .map(|k| TermRef::Column(ctx.len() + k))
            .ok_or_else(|| TranslateError::UnknownConcept(c.clone())),
        Term::Relativized(ConceptRef::Variable(_)) => Err(TranslateError::UntranslatableTerm(render_term(term))),
        Term::ConceptConstant(c) => Err(TranslateError::UntranslatableTerm(c.clone())),
    }
}

/// Domain relation of the context: `{⟨⟩}` when empty, otherwise the product
/// of `Obj` / `Con` per variable kind.
pub fn vt(ctx: &VarContext) -> AlgebraExpr {
    ctx.vars().iter().fold(AlgebraExpr::Unit, |acc, v| {
        let domain = match v.kind {
            Kind::Object => OBJ,
            Kind::Concept => CON,
        };
        AlgebraExpr::product(acc, AlgebraExpr::base(domain))
    })
}

/// Formula translation under a variable context.
pub fn ft(formula: &Formula, ctx: &VarContext, sig: &Signature) -> Result<AlgebraExpr, TranslateError> {
    Translator::new(sig).ft(formula, ctx)
}

fn columns(range: std::ops::RangeInclusive<usize>) -> Vec<usize> {
    range.collect()
}

pub struct Translator<'a> {
    sig: &'a Signature,
    options: TranslateOptions,
}

impl<'a> Translator<'a> {
    pub fn new(sig: &'a Signature) -> Self {
        Translator {
            sig,
            options: TranslateOptions::default(),
        }
    }

    pub fn with_options(sig: &'a Signature, options: TranslateOptions) -> Self {
        Translator { sig, options }
    }

    fn mutated(&self, m: Mutation) -> bool {
        self.options.mutation == Some(m)
    }

    fn check_relation(&self, rel: &str) -> Result<(), TranslateError> {
        if self.sig.relations.contains(rel) {
            Ok(())
        } else {
            Err(TranslateError::UnknownRelation(rel.to_string()))
        }
    }

    fn check_term(&self, t: &Term) -> Result<(), TranslateError> {
        match t {
            Term::ObjectConstant(c) if !self.sig.objects.contains(c.as_str()) => {
                Err(TranslateError::UnknownConstant(c.clone()))
            }
            Term::ConceptConstant(c) | Term::Relativized(ConceptRef::Constant(c))
                if self.sig.concepts.get(c).is_none() =>
            {
                Err(TranslateError::UnknownConcept(c.clone()))
            }
            _ => Ok(()),
        }
    }

    /// Binder for a new scope level, renamed if the context already uses it.
    fn open_scope(&self, var: &Var, body: &Formula, ctx: &VarContext) -> (VarContext, Formula) {
        if ctx.contains(var) {
            let mut avoid = all_vars(body);
            avoid.extend(ctx.vars().iter().cloned());
            let renamed = fresh_var(var, &avoid);
            let body = substitute(body, var, &Term::Variable(renamed.clone()));
            (ctx.prepend(renamed), body)
        } else {
            (ctx.prepend(var.clone()), body.clone())
        }
    }

    pub fn ft(&self, f: &Formula, ctx: &VarContext) -> Result<AlgebraExpr, TranslateError> {
        let n = ctx.len();
        let sta = || AlgebraExpr::base(STA);
        Ok(match f {
            Formula::Eq(a, b) | Formula::Neq(a, b) => {
                self.check_term(a)?;
                self.check_term(b)?;
                let lhs = tt(a, ctx, &self.sig.concepts)?.into();
                let rhs = tt(b, ctx, &self.sig.concepts)?.into();
                let pred = if matches!(f, Formula::Eq(..)) {
                    SelectionPredicate::eq(lhs, rhs)
                } else {
                    SelectionPredicate::neq(lhs, rhs)
                };
                let rows = AlgebraExpr::product(vt(ctx), sta());
                let selected = if self.mutated(Mutation::AtomIgnoresComparison) {
                    rows
                } else {
                    AlgebraExpr::select(pred, rows)
                };
                AlgebraExpr::project(columns(1..=n + 1), selected)
            }
            Formula::Not(g) => {
                let inner = self.ft(g, ctx)?;
                if self.mutated(Mutation::NegationIsIdentity) {
                    inner
                } else {
                    let all = AlgebraExpr::product(vt(ctx), AlgebraExpr::project(vec![1], sta()));
                    AlgebraExpr::difference(all, inner)
                }
            }
            Formula::Diamond(rel, g) => {
                self.check_relation(rel)?;
                self.diamond(rel, g, ctx)?
            }
            Formula::Box(rel, g) => {
                self.check_relation(rel)?;
                if self.mutated(Mutation::BoxAsDiamond) {
                    self.diamond(rel, g, ctx)?
                } else {
                    let dual = Formula::not(Formula::diamond(rel, Formula::not((**g).clone())));
                    self.ft(&dual, ctx)?
                }
            }
            Formula::Or(a, b) => {
                let (a, b) = (self.ft(a, ctx)?, self.ft(b, ctx)?);
                if self.mutated(Mutation::OrAsIntersection) {
                    AlgebraExpr::intersection(a, b)
                } else {
                    AlgebraExpr::union(a, b)
                }
            }
            Formula::And(a, b) => {
                let (a, b) = (self.ft(a, ctx)?, self.ft(b, ctx)?);
                if self.mutated(Mutation::AndAsUnion) {
                    AlgebraExpr::union(a, b)
                } else {
                    AlgebraExpr::intersection(a, b)
                }
            }
            Formula::Implies(a, b) => self.ft(&Formula::or(Formula::not((**a).clone()), (**b).clone()), ctx)?,
            Formula::Exists(var, g) => {
                if self.mutated(Mutation::ExistsAsForall) {
                    self.forall(var, g, ctx)?
                } else {
                    self.exists(var, g, ctx)?
                }
            }
            Formula::Forall(var, g) => {
                if self.mutated(Mutation::ForallAsExists) {
                    self.exists(var, g, ctx)?
                } else {
                    match self.options.forall {
                        ForallRule::Division => self.forall(var, g, ctx)?,
                        ForallRule::NotExistsNot => {
                            let rewritten = Formula::not(Formula::exists(var.clone(), Formula::not((**g).clone())));
                            self.ft(&rewritten, ctx)?
                        }
                    }
                }
            }
            Formula::Abstraction { var, body, arg } => self.abstraction(var, body, arg, ctx)?,
        })
    }

    fn diamond(&self, rel: &str, g: &Formula, ctx: &VarContext) -> Result<AlgebraExpr, TranslateError> {
        let n = ctx.len();
        let inner = self.ft(g, ctx)?;
        let mut preds = Vec::with_capacity(2);
        if !self.mutated(Mutation::DiamondIgnoresRelationName) {
            preds.push(SelectionPredicate::col_const(n + 4, rel));
        }
        preds.push(SelectionPredicate::cols(n + 1, n + 3));
        let mut keep = columns(1..=n);
        keep.push(n + 2);
        Ok(AlgebraExpr::project(
            keep,
            AlgebraExpr::select_all(preds, AlgebraExpr::product(inner, AlgebraExpr::base(REL))),
        ))
    }

    fn exists(&self, var: &Var, g: &Formula, ctx: &VarContext) -> Result<AlgebraExpr, TranslateError> {
        let n = ctx.len();
        let (inner_ctx, body) = self.open_scope(var, g, ctx);
        Ok(AlgebraExpr::project(columns(2..=n + 2), self.ft(&body, &inner_ctx)?))
    }

    fn forall(&self, var: &Var, g: &Formula, ctx: &VarContext) -> Result<AlgebraExpr, TranslateError> {
        let n = ctx.len();
        let (inner_ctx, body) = self.open_scope(var, g, ctx);
        let u = self.ft(&body, &inner_ctx)?;
        let image = AlgebraExpr::project(columns(2..=n + 2), u.clone());
        let padded = AlgebraExpr::product(vt(&VarContext::new(vec![inner_ctx.vars()[0].clone()])), image.clone());
        let counterexamples = AlgebraExpr::project(columns(2..=n + 2), AlgebraExpr::difference(padded, u));
        Ok(AlgebraExpr::difference(image, counterexamples))
    }

    fn abstraction(
        &self,
        var: &Var,
        body: &Formula,
        arg: &Term,
        ctx: &VarContext,
    ) -> Result<AlgebraExpr, TranslateError> {
        let n = ctx.len();
        match arg {
            Term::Relativized(ConceptRef::Constant(c)) => {
                let k = self
                    .sig
                    .concepts
                    .get(c)
                    .ok_or_else(|| TranslateError::UnknownConcept(c.clone()))?;
                let (inner_ctx, body) = self.open_scope(var, body, ctx);
                let inner = self.ft(&body, &inner_ctx)?;
                let designation = AlgebraExpr::project(vec![k, 1], AlgebraExpr::base(STA));
                let mut preds = vec![SelectionPredicate::cols(1, n + 3)];
                if !self.mutated(Mutation::LambdaIgnoresStateJoin) {
                    preds.push(SelectionPredicate::cols(n + 2, n + 4));
                }
                Ok(AlgebraExpr::project(
                    columns(2..=n + 2),
                    AlgebraExpr::select_all(preds, AlgebraExpr::product(inner, designation)),
                ))
            }
            Term::Relativized(ConceptRef::Variable(_)) => Err(TranslateError::UntranslatableTerm(render_term(arg))),
            rigid => {
                self.check_term(rigid)?;
                if let Some(v) = rigid.variable() {
                    if !ctx.contains(&v) {
                        return Err(TranslateError::UnknownVariable(v));
                    }
                }
                if self.mutated(Mutation::LambdaSkipsSubstitution) {
                    self.exists(var, body, ctx)
                } else {
                    self.ft(&substitute(body, var, rigid), ctx)
                }
            }
        }
    }
}

/// Compiles a query against a model's signature. The result has degree
/// `targets + 1`.
pub fn translate_query(query: &ModalQuery, model: &KripkeModel) -> Result<AlgebraExpr, TranslateError> {
    translate_query_with(query, &Signature::of(model), TranslateOptions::default())
}

pub fn translate_query_with(
    query: &ModalQuery,
    sig: &Signature,
    options: TranslateOptions,
) -> Result<AlgebraExpr, TranslateError> {
    let formula = query.formula.desugar_implications();
    Translator::with_options(sig, options).ft(&formula, &VarContext::new(query.targets.clone()))
}

/// Signature check with the translator's error type, for callers that want
/// to fail before compiling.
pub fn check_query(query: &ModalQuery, model: &KripkeModel) -> Result<(), TranslateError> {
    check_signature(model, &query.formula).map_err(TranslateError::from)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relalg::{degree_of, eval, render_algebra, RelationInstance};
    use crate::schema::build_database;
    use crate::syntax::{parse_formula, parse_query};

    fn components() -> KripkeModel {
        KripkeModel::from_json(include_str!("../../../models/components.json")).unwrap()
    }

    fn eval_query(model: &KripkeModel, text: &str, targets: &[&str]) -> RelationInstance {
        let q = parse_query(text, targets).unwrap();
        let e = translate_query(&q, model).unwrap();
        eval(&e, &build_database(model).instance).unwrap()
    }

    fn rows(r: &RelationInstance) -> Vec<Vec<String>> {
        r.iter().map(|t| t.iter().map(|v| v.to_string()).collect()).collect()
    }

    #[test]
    fn tt_examples() {
        let ci = concept_index(&components());
        let empty = VarContext::default();
        assert_eq!(tt(&Term::constant("b"), &empty, &ci), Ok(TermRef::Constant("b".into())));
        let ctx = VarContext::new(vec![Var::object("a")]);
        assert_eq!(tt(&Term::object_var("a"), &ctx, &ci), Ok(TermRef::Column(1)));
        assert_eq!(tt(&Term::relativized("code"), &empty, &ci), Ok(TermRef::Column(2)));
        assert_eq!(tt(&Term::relativized("code"), &ctx, &ci), Ok(TermRef::Column(3)));
        assert!(matches!(
            tt(&Term::Relativized(ConceptRef::Variable("g".into())), &empty, &ci),
            Err(TranslateError::UntranslatableTerm(_))
        ));
        assert_eq!(
            tt(&Term::object_var("z"), &ctx, &ci),
            Err(TranslateError::UnknownVariable(Var::object("z")))
        );
    }

    #[test]
    fn vt_examples() {
        let db = build_database(&components());
        let e = vt(&VarContext::default());
        assert_eq!(e, AlgebraExpr::Unit);
        assert_eq!(eval(&e, &db.instance).unwrap(), RelationInstance::unit());
        assert_eq!(vt(&VarContext::new(vec![Var::object("x")])), AlgebraExpr::base("Obj"));
        let e = vt(&VarContext::new(vec![Var::concept("a"), Var::object("x")]));
        assert_eq!(
            e,
            AlgebraExpr::product(AlgebraExpr::base("Con"), AlgebraExpr::base("Obj"))
        );
        assert_eq!(eval(&e, &db.instance).unwrap().len(), 16);
    }

    #[test]
    fn worked_translations() {
        let sig = Signature::of(&components());
        let ctx = VarContext::default();
        let atom = ft(&parse_formula("@code = 'b'").unwrap(), &ctx, &sig).unwrap();
        assert_eq!(render_algebra(&atom), "(project (1) (select (= 2 'b') Sta))");
        let dia = ft(&parse_formula("<COMP> @code = 'b'").unwrap(), &ctx, &sig).unwrap();
        assert_eq!(
            render_algebra(&dia),
            "(project (2) (select (= 4 'COMP') (select (= 1 3) (product (project (1) (select (= 2 'b') Sta)) Rel))))"
        );
    }

    #[test]
    fn query_images() {
        let m = components();
        assert_eq!(rows(&eval_query(&m, "@code = 'b'", &[])), vec![vec!["3"]]);
        assert_eq!(
            rows(&eval_query(&m, "@id = '3' & @code = ?a", &["?a"])),
            vec![vec!["b", "3"]]
        );
        assert_eq!(
            rows(&eval_query(&m, "[COMP] @code = 'b'", &[])),
            vec![vec!["2"], vec!["3"], vec!["4"]]
        );
        assert!(eval_query(&m, "<lam ?y . <COMP> @code = ?y>(@code)", &[]).is_empty());
    }

    #[test]
    fn degree_is_context_plus_one() {
        let m = components();
        let db = build_database(&m);
        let schema = db.instance.schema();
        for (text, targets) in [
            ("@code = 'b'", vec![]),
            ("forall ?x . (?x = @id | ?x != ?y)", vec!["?y"]),
            ("<lam ?q . [COMP] ?q != @code>(@code) & ?a = ?b", vec!["?b", "?a"]),
            ("exists %c . 'a' = 'a'", vec![]),
        ] {
            let q = parse_query(text, &targets).unwrap();
            let e = translate_query(&q, &m).unwrap();
            assert_eq!(degree_of(&e, &schema), Ok(targets.len() + 1), "{text}");
        }
    }

    #[test]
    fn box_is_the_negated_diamond_dual() {
        let sig = Signature::of(&components());
        let ctx = VarContext::new(vec![Var::object("x")]);
        let phi = parse_formula("@code != ?x").unwrap();
        let boxed = ft(&Formula::boxed("COMP", phi.clone()), &ctx, &sig).unwrap();
        let dual = ft(&Formula::not(Formula::diamond("COMP", Formula::not(phi))), &ctx, &sig).unwrap();
        assert_eq!(boxed, dual);
    }

    #[test]
    fn rigid_abstraction_is_substitution() {
        let m = components();
        let a = eval_query(&m, "<lam ?x . <COMP> @code = ?x>('b')", &[]);
        let b = eval_query(&m, "<COMP> @code = 'b'", &[]);
        assert_eq!(a, b);
        let c = eval_query(&m, "<lam %k . @%k = '1'>(id)", &[]);
        assert_eq!(rows(&c), vec![vec!["1"]]);
    }

    #[test]
    fn shadowed_binders_are_renamed() {
        let m = components();
        let r = eval_query(&m, "exists ?x . ?x = @code & ?x = ?x", &["?x"]);
        // ?x free on the right is unconstrained: every object × every state
        assert_eq!(r.len(), 8 * 4);
    }

    #[test]
    fn errors() {
        let m = components();
        let q = parse_query::<&str>("exists %a . @%a = 'b'", &[]).unwrap();
        assert!(matches!(translate_query(&q, &m), Err(TranslateError::UntranslatableTerm(t)) if t == "@%a"));
        let q = parse_query::<&str>("<NEXT> @code = 'b'", &[]).unwrap();
        assert_eq!(
            translate_query(&q, &m),
            Err(TranslateError::UnknownRelation("NEXT".into()))
        );
        let q = parse_query::<&str>("@code = 'zz'", &[]).unwrap();
        assert_eq!(
            translate_query(&q, &m),
            Err(TranslateError::UnknownConstant("zz".into()))
        );
        let q = parse_query::<&str>("@colour = 'a'", &[]).unwrap();
        assert_eq!(
            translate_query(&q, &m),
            Err(TranslateError::UnknownConcept("colour".into()))
        );
    }

    #[test]
    fn implication_matches_its_desugaring() {
        let m = components();
        let a = eval_query(&m, "@code = 'b' -> <COMP> @code = ?x", &["?x"]);
        let b = eval_query(&m, "!@code = 'b' | <COMP> @code = ?x", &["?x"]);
        assert_eq!(a, b);
    }
}
