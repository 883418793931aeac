use std::time::{Duration, Instant};

use sha2::{Digest, Sha256};

use crate::kripke::{answer_direct, assignments, satisfies, Assignment, KripkeModel};
use crate::relalg::{eval, RelationInstance, Tuple};
use crate::schema::{build_database, validate_instance, Violation};
use crate::syntax::{render_formula, Formula, ModalQuery};
use crate::translate::{ft, translate_query_with, ForallRule, Signature, TranslateError, TranslateOptions, VarContext};

/// Short stable digest of a model's canonical JSON.
pub fn fingerprint(model: &KripkeModel) -> String {
    let digest = Sha256::digest(model.to_file().to_json().as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Direct,
    Algebra,
}

/// A tuple in exactly one of the two answers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub tuple: Tuple,
    pub only_in: Side,
}

/// Outcome of comparing the truth definition with the compiled query on one
/// model.
#[derive(Clone, Debug)]
pub struct CorrespondenceReport {
    pub fingerprint: String,
    pub query: String,
    pub direct: Option<RelationInstance>,
    pub algebra: Option<RelationInstance>,
    pub equal: bool,
    pub witness: Option<Witness>,
    /// The query uses `@%a`; only the direct evaluator ran.
    pub direct_only: bool,
    pub error: Option<String>,
    pub elapsed: Duration,
}

impl CorrespondenceReport {
    pub fn is_mismatch(&self) -> bool {
        !self.equal && !self.direct_only && self.error.is_none()
    }
}

fn witness(direct: &RelationInstance, algebra: &RelationInstance) -> Option<Witness> {
    let only = |a: &RelationInstance, b: &RelationInstance| a.iter().find(|t| !b.contains(t)).cloned();
    only(direct, algebra)
        .map(|tuple| Witness {
            tuple,
            only_in: Side::Direct,
        })
        .or_else(|| {
            only(algebra, direct).map(|tuple| Witness {
                tuple,
                only_in: Side::Algebra,
            })
        })
}

pub fn check(model: &KripkeModel, query: &ModalQuery) -> CorrespondenceReport {
    check_with(model, query, TranslateOptions::default())
}

/// Runs both engines. Errors are recorded in the report, never raised.
pub fn check_with(model: &KripkeModel, query: &ModalQuery, options: TranslateOptions) -> CorrespondenceReport {
    let start = Instant::now();
    let mut report = CorrespondenceReport {
        fingerprint: fingerprint(model),
        query: render_formula(&query.formula),
        direct: None,
        algebra: None,
        equal: false,
        witness: None,
        direct_only: false,
        error: None,
        elapsed: Duration::ZERO,
    };
    match answer_direct(model, query) {
        Ok(d) => report.direct = Some(d),
        Err(e) => report.error = Some(format!("direct evaluator: {e}")),
    }
    if report.error.is_none() {
        match algebra_answer(model, query, options) {
            Ok(a) => report.algebra = Some(a),
            Err(AlgebraPathError::Translate(TranslateError::UntranslatableTerm(_))) => report.direct_only = true,
            Err(e) => report.error = Some(e.to_string()),
        }
    }
    if let (Some(d), Some(a)) = (&report.direct, &report.algebra) {
        report.equal = d == a;
        report.witness = witness(d, a);
    }
    report.elapsed = start.elapsed();
    report
}

#[derive(Debug, thiserror::Error)]
pub enum AlgebraPathError {
    #[error("translator: {0}")]
    Translate(#[from] TranslateError),
    #[error("algebra evaluator: {0}")]
    Eval(#[from] crate::relalg::AlgebraError),
}

/// `eval(translate(query))` on the mapped database.
pub fn algebra_answer(
    model: &KripkeModel,
    query: &ModalQuery,
    options: TranslateOptions,
) -> Result<RelationInstance, AlgebraPathError> {
    let expr = translate_query_with(query, &Signature::of(model), options)?;
    Ok(eval(&expr, &build_database(model).instance)?)
}

/// Problems with `Sta` itself: a cell that is not an object,
/// or an empty table.
pub fn sta_violations(model: &KripkeModel) -> Vec<Violation> {
    validate_instance(&build_database(model))
        .into_iter()
        .filter(|v| matches!(v, Violation::StaValueNotObject { .. } | Violation::EmptySta))
        .collect()
}

/// Pointwise check of the atomic base case: for every assignment of the
/// targets and every state, the comparison holds iff the assignment extended
/// with the state id is in the translated relation. Returns the number of
/// disagreeing points.
pub fn atom_pointwise_violations(model: &KripkeModel, query: &ModalQuery) -> Result<usize, String> {
    if !matches!(query.formula, Formula::Eq(..) | Formula::Neq(..)) {
        return Err(format!("not an atomic query: {}", render_formula(&query.formula)));
    }
    let image = algebra_answer(model, query, TranslateOptions::default()).map_err(|e| e.to_string())?;
    let mut bad = 0;
    for values in assignments(model, &query.targets) {
        let v = query
            .targets
            .iter()
            .zip(&values)
            .fold(Assignment::new(), |a, (var, d)| a.with(var.clone(), d));
        for state in model.states() {
            let truth = satisfies(model, state, &v, &query.formula).map_err(|e| e.to_string())?;
            let mut row = values.clone();
            row.push(model.id_of(state).clone());
            if truth != image.contains(&row) {
                bad += 1;
            }
        }
    }
    Ok(bad)
}

/// The box rule produces exactly the tree of `¬⟨π⟩¬φ`.
pub fn box_duality_holds(model: &KripkeModel, query: &ModalQuery) -> Result<bool, TranslateError> {
    let Formula::Box(rel, body) = &query.formula else {
        return Ok(true);
    };
    let sig = Signature::of(model);
    let ctx = VarContext::new(query.targets.clone());
    let formula = query.formula.desugar_implications();
    let dual = Formula::not(Formula::diamond(rel, Formula::not(body.desugar_implications())));
    Ok(ft(&formula, &ctx, &sig)? == ft(&dual, &ctx, &sig)?)
}

/// Division and `¬∃¬` agree on the query's answer.
pub fn forall_rewrite_agrees(model: &KripkeModel, query: &ModalQuery) -> Result<bool, AlgebraPathError> {
    let division = algebra_answer(model, query, TranslateOptions::default())?;
    let rewrite = algebra_answer(
        model,
        query,
        TranslateOptions {
            forall: ForallRule::NotExistsNot,
            mutation: None,
        },
    )?;
    Ok(division == rewrite)
}

pub(crate) fn mentions_forall(f: &Formula) -> bool {
    let mut found = false;
    f.walk(&mut |g| found |= matches!(g, Formula::Forall(..)));
    found
}
