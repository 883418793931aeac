use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use serde_json::json;

use super::check::{check_with, forall_rewrite_agrees, mentions_forall, sta_violations, Side};
use super::gen::{gen_model, GenParams, ParamError, QueryGenerator, Shape};
use super::shrink::shrink;
use crate::kripke::KripkeModel;
use crate::par::{self, Execution};
use crate::syntax::{render_formula, ModalQuery};
use crate::translate::TranslateOptions;

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub params: GenParams,
    pub cases: usize,
    pub execution: Execution,
    pub options: TranslateOptions,
    pub shrink: bool,
}

impl CampaignConfig {
    pub fn new(params: GenParams, cases: usize) -> Self {
        CampaignConfig {
            params,
            cases,
            execution: Execution::default(),
            options: TranslateOptions::default(),
            shrink: true,
        }
    }
}

/// One generated case and its verdicts.
#[derive(Clone, Debug)]
pub struct CaseRecord {
    pub case: usize,
    pub fingerprint: String,
    pub query: String,
    pub targets: Vec<String>,
    pub shapes: Vec<Shape>,
    pub equal: bool,
    pub mismatch: bool,
    pub direct_only: bool,
    pub error: Option<String>,
    pub sta_violations: usize,
    /// `None` when the query has no universal quantifier.
    pub forall_agrees: Option<bool>,
    pub answer_rows: usize,
    pub elapsed: Duration,
}

/// A failing case, before and after shrinking.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub case: usize,
    pub model: KripkeModel,
    pub query: ModalQuery,
    pub witness: Option<(Vec<String>, Side)>,
    pub shrunk: Option<(KripkeModel, ModalQuery)>,
}

#[derive(Clone, Debug)]
pub struct CampaignSummary {
    pub params: GenParams,
    pub cases: usize,
    pub passed: usize,
    pub mismatches: usize,
    pub direct_only: usize,
    pub errors: usize,
    pub sta_violations: usize,
    pub forall_checked: usize,
    pub forall_discrepancies: usize,
    pub histogram: BTreeMap<Shape, usize>,
    pub first_failure: Option<Counterexample>,
    pub records: Vec<CaseRecord>,
    pub elapsed: Duration,
}

fn render_query(q: &ModalQuery) -> String {
    let targets: Vec<String> = q.targets.iter().map(|v| v.to_string()).collect();
    format!("{}  [targets: {}]", render_formula(&q.formula), targets.join(" "))
}

impl CampaignSummary {
    /// No mismatches, no errors, no Sta violations or cross-check failures.
    pub fn ok(&self) -> bool {
        self.mismatches == 0 && self.errors == 0 && self.sta_violations == 0 && self.forall_discrepancies == 0
    }

    /// Line-oriented summary. Contains no timings, so reruns with the same
    /// seed are byte-identical.
    pub fn render(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "seed {} cases {} max_states {} max_objects {} max_concepts {} max_relations {} max_depth {} max_free_vars {} lambda {} concept_vars {}",
            p.seed, self.cases, p.max_states, p.max_objects, p.max_concepts, p.max_relations,
            p.max_depth, p.max_free_vars, p.allow_lambda, p.allow_concept_vars
        );
        let _ = writeln!(s, "passed {}", self.passed);
        let _ = writeln!(s, "mismatches {}", self.mismatches);
        let _ = writeln!(s, "errors {}", self.errors);
        let _ = writeln!(s, "direct-only {}", self.direct_only);
        let _ = writeln!(s, "sta violations {}", self.sta_violations);
        let _ = writeln!(
            s,
            "forall cross-checks {} discrepancies {}",
            self.forall_checked, self.forall_discrepancies
        );
        let hist: Vec<String> = self.histogram.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(s, "constructors {}", hist.join(" "));
        match &self.first_failure {
            None => {
                let _ = writeln!(s, "first counterexample: none");
            }
            Some(c) => {
                let _ = writeln!(s, "first counterexample: case {}", c.case);
                let _ = writeln!(s, "  query {}", render_query(&c.query));
                if let Some((tuple, side)) = &c.witness {
                    let side = match side {
                        Side::Direct => "direct",
                        Side::Algebra => "algebra",
                    };
                    let _ = writeln!(s, "  witness ({}) only in {side} answer", tuple.join(", "));
                }
                if let Some((m, q)) = &c.shrunk {
                    let _ = writeln!(s, "  shrunk query {}", render_query(q));
                    let _ = write!(
                        s,
                        "  shrunk model {}",
                        m.to_file().to_json().trim_end().replace('\n', "\n  ")
                    );
                    let _ = writeln!(s);
                }
            }
        }
        let _ = writeln!(s, "result {}", if self.ok() { "PASS" } else { "FAIL" });
        s
    }

    /// Machine-readable report including per-case timings.
    pub fn to_json(&self) -> String {
        let cases: Vec<_> = self
            .records
            .iter()
            .map(|r| {
                json!({
                    "case": r.case,
                    "model": r.fingerprint,
                    "query": r.query,
                    "targets": r.targets,
                    "equal": r.equal,
                    "mismatch": r.mismatch,
                    "direct_only": r.direct_only,
                    "error": r.error,
                    "sta_violations": r.sta_violations,
                    "forall_agrees": r.forall_agrees,
                    "answer_rows": r.answer_rows,
                    "micros": r.elapsed.as_micros() as u64,
                })
            })
            .collect();
        let hist: BTreeMap<String, usize> = self.histogram.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        let doc = json!({
            "seed": self.params.seed,
            "cases": self.cases,
            "passed": self.passed,
            "mismatches": self.mismatches,
            "errors": self.errors,
            "direct_only": self.direct_only,
            "sta_violations": self.sta_violations,
            "forall_checked": self.forall_checked,
            "forall_discrepancies": self.forall_discrepancies,
            "constructors": hist,
            "first_counterexample": self.first_failure.as_ref().map(|c| c.case),
            "ok": self.ok(),
            "wall_millis": self.elapsed.as_millis() as u64,
            "records": cases,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json value serializes");
        s.push('\n');
        s
    }
}

/// Model and query for one case index. Depends only on the seed and index.
pub fn gen_case(p: &GenParams, case: usize) -> (KripkeModel, ModalQuery) {
    let mut rng = p.case_rng(case as u64);
    let model = gen_model(p, &mut rng);
    let query = QueryGenerator::new(p, &model).query(&mut rng, p.max_depth, None);
    (model, query)
}

fn run_case(cfg: &CampaignConfig, case: usize) -> CaseRecord {
    let start = Instant::now();
    let (model, query) = gen_case(&cfg.params, case);
    let report = check_with(&model, &query, cfg.options);
    let mut shapes = Vec::new();
    query.formula.walk(&mut |f| shapes.push(Shape::of(f)));
    let forall_agrees = if cfg.options.mutation.is_none() && report.equal && mentions_forall(&query.formula) {
        Some(forall_rewrite_agrees(&model, &query).unwrap_or(false))
    } else {
        None
    };
    CaseRecord {
        case,
        fingerprint: report.fingerprint.clone(),
        query: report.query.clone(),
        targets: query.targets.iter().map(|v| v.to_string()).collect(),
        shapes,
        equal: report.equal,
        mismatch: report.is_mismatch(),
        direct_only: report.direct_only,
        error: report.error.clone(),
        sta_violations: sta_violations(&model).len(),
        forall_agrees,
        answer_rows: report.direct.as_ref().map_or(0, |d| d.len()),
        elapsed: start.elapsed(),
    }
}

/// Generates and checks `cases` independent cases. Aggregation is by case
/// index, so the summary does not depend on the execution mode.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<CampaignSummary, ParamError> {
    cfg.params.validate()?;
    if cfg.cases == 0 {
        return Err(ParamError::NoCases);
    }
    let start = Instant::now();
    let indices: Vec<usize> = (0..cfg.cases).collect();
    let records = par::map(cfg.execution, &indices, |&i| run_case(cfg, i));

    let mut histogram: BTreeMap<Shape, usize> = Shape::TRANSLATED.iter().map(|s| (*s, 0)).collect();
    let mut summary = CampaignSummary {
        params: cfg.params.clone(),
        cases: cfg.cases,
        passed: 0,
        mismatches: 0,
        direct_only: 0,
        errors: 0,
        sta_violations: 0,
        forall_checked: 0,
        forall_discrepancies: 0,
        histogram: BTreeMap::new(),
        first_failure: None,
        records: Vec::new(),
        elapsed: Duration::ZERO,
    };
    for r in &records {
        for s in &r.shapes {
            *histogram.entry(*s).or_default() += 1;
        }
        summary.passed += usize::from(r.equal);
        summary.mismatches += usize::from(r.mismatch);
        summary.direct_only += usize::from(r.direct_only);
        summary.errors += usize::from(r.error.is_some());
        summary.sta_violations += r.sta_violations;
        if let Some(agrees) = r.forall_agrees {
            summary.forall_checked += 1;
            summary.forall_discrepancies += usize::from(!agrees);
        }
    }
    summary.histogram = histogram;

    if let Some(r) = records.iter().find(|r| r.mismatch || r.error.is_some()) {
        let (model, query) = gen_case(&cfg.params, r.case);
        let report = check_with(&model, &query, cfg.options);
        let witness = report
            .witness
            .map(|w| (w.tuple.iter().map(|v| v.to_string()).collect(), w.only_in));
        let shrunk = (cfg.shrink && r.mismatch)
            .then(|| shrink(&model, &query, |m, q| check_with(m, q, cfg.options).is_mismatch()));
        summary.first_failure = Some(Counterexample {
            case: r.case,
            model,
            query,
            witness,
            shrunk,
        });
    }
    summary.records = records;
    summary.elapsed = start.elapsed();
    Ok(summary)
}
