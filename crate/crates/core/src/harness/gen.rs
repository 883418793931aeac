use std::collections::BTreeMap;
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kripke::{KripkeModel, ModelFile, Symbol, ID_CONCEPT};
use crate::syntax::{free_vars, ConceptRef, Formula, Kind, ModalQuery, Term, Var};

/// Nested binders (quantifiers and abstractions) per query. The direct
/// evaluator enumerates the domain once per binder and the algebra path
/// materialises `VT` over the whole context, so this keeps cases cheap.
pub const MAX_BINDERS: usize = 2;

/// Bounds and toggles for random models and queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenParams {
    pub seed: u64,
    pub max_states: usize,
    pub max_objects: usize,
    pub max_concepts: usize,
    pub max_relations: usize,
    pub max_depth: usize,
    pub max_free_vars: usize,
    pub allow_lambda: bool,
    /// Lets `@%a` appear under concept quantifiers. Such queries have no
    /// translation and are only run through the direct evaluator.
    pub allow_concept_vars: bool,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 42,
            max_states: 6,
            max_objects: 8,
            max_concepts: 3,
            max_relations: 2,
            max_depth: 4,
            max_free_vars: 2,
            allow_lambda: true,
            allow_concept_vars: false,
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ParamError {
    #[error("{0} must be at least 1")]
    ZeroBound(&'static str),
    #[error("max_objects ({objects}) must be at least max_states ({states}) so state ids can be distinct")]
    TooFewObjects { objects: usize, states: usize },
    #[error("a campaign needs at least one case")]
    NoCases,
}

impl GenParams {
    pub fn validate(&self) -> Result<(), ParamError> {
        for (name, v) in [
            ("max_states", self.max_states),
            ("max_objects", self.max_objects),
            ("max_concepts", self.max_concepts),
            ("max_relations", self.max_relations),
            ("max_depth", self.max_depth),
            ("max_free_vars", self.max_free_vars),
        ] {
            if v == 0 {
                return Err(ParamError::ZeroBound(name));
            }
        }
        if self.max_objects < self.max_states {
            return Err(ParamError::TooFewObjects {
                objects: self.max_objects,
                states: self.max_states,
            });
        }
        Ok(())
    }

    /// Independent stream for one case: same seed and index, same draws,
    /// whatever order cases run in.
    pub fn case_rng(&self, case: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(case);
        rng
    }
}

fn object_name(i: usize) -> String {
    const LETTERS: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
    match LETTERS.get(i) {
        Some(&c) => (c as char).to_string(),
        None => format!("o{i}"),
    }
}

/// A random model within the bounds. Ids are an injective draw from the
/// objects; every other concept value and every edge is independent.
pub fn gen_model<R: Rng>(p: &GenParams, rng: &mut R) -> KripkeModel {
    let states = rng.gen_range(1..=p.max_states);
    let objects: Vec<String> = (0..rng.gen_range(states.max(1)..=p.max_objects))
        .map(object_name)
        .collect();
    let mut concepts = vec![ID_CONCEPT.to_string()];
    concepts.extend((1..rng.gen_range(1..=p.max_concepts)).map(|i| format!("c{i}")));

    let mut ids = objects.clone();
    ids.shuffle(rng);
    let state_rows: Vec<BTreeMap<String, Symbol>> = ids[..states]
        .iter()
        .map(|id| {
            let mut row = BTreeMap::new();
            row.insert(ID_CONCEPT.to_string(), Symbol(id.clone()));
            for c in &concepts[1..] {
                let v = objects.choose(rng).expect("objects are nonempty");
                row.insert(c.clone(), Symbol(v.clone()));
            }
            row
        })
        .collect();

    let density = rng.gen_range(0.15..0.6);
    let mut relations = BTreeMap::new();
    for r in 1..=rng.gen_range(1..=p.max_relations) {
        let mut pairs = Vec::new();
        for a in &ids[..states] {
            for b in &ids[..states] {
                if rng.gen_bool(density) {
                    pairs.push([Symbol(a.clone()), Symbol(b.clone())]);
                }
            }
        }
        relations.insert(format!("R{r}"), pairs);
    }

    let file = ModelFile {
        objects: objects.into_iter().map(Symbol).collect(),
        concepts,
        states: state_rows,
        relations,
    };
    KripkeModel::from_file(&file).expect("generated models satisfy the model invariants")
}

/// Top-level constructor of a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Shape {
    Eq,
    Neq,
    Not,
    And,
    Or,
    Implies,
    Diamond,
    Box,
    Exists,
    Forall,
    Lambda,
}

impl Shape {
    /// The constructors with their own translation rule (implication is
    /// desugared).
    pub const TRANSLATED: [Shape; 10] = [
        Shape::Eq,
        Shape::Neq,
        Shape::Not,
        Shape::And,
        Shape::Or,
        Shape::Diamond,
        Shape::Box,
        Shape::Exists,
        Shape::Forall,
        Shape::Lambda,
    ];

    pub fn of(f: &Formula) -> Shape {
        match f {
            Formula::Eq(..) => Shape::Eq,
            Formula::Neq(..) => Shape::Neq,
            Formula::Not(_) => Shape::Not,
            Formula::And(..) => Shape::And,
            Formula::Or(..) => Shape::Or,
            Formula::Implies(..) => Shape::Implies,
            Formula::Diamond(..) => Shape::Diamond,
            Formula::Box(..) => Shape::Box,
            Formula::Exists(..) => Shape::Exists,
            Formula::Forall(..) => Shape::Forall,
            Formula::Abstraction { .. } => Shape::Lambda,
        }
    }

    fn binds(self) -> bool {
        matches!(self, Shape::Exists | Shape::Forall | Shape::Lambda)
    }

    fn weight(self) -> u32 {
        match self {
            Shape::Eq | Shape::Neq => 0,
            Shape::Not | Shape::And | Shape::Or | Shape::Diamond | Shape::Box => 3,
            Shape::Implies => 1,
            Shape::Exists | Shape::Forall | Shape::Lambda => 2,
        }
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Shape::Eq => "eq",
            Shape::Neq => "neq",
            Shape::Not => "not",
            Shape::And => "and",
            Shape::Or => "or",
            Shape::Implies => "implies",
            Shape::Diamond => "diamond",
            Shape::Box => "box",
            Shape::Exists => "exists",
            Shape::Forall => "forall",
            Shape::Lambda => "lambda",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Default)]
struct Scope {
    objects: Vec<Var>,
    // concept variables that may appear as `@%k`
    relativizable: Vec<String>,
    // concept variables usable as a rigid abstraction argument
    concept_args: Vec<Var>,
    binders: usize,
}

impl Scope {
    fn bind(&self, var: &Var) -> Scope {
        let mut s = self.clone();
        s.objects.retain(|v| v != var);
        s.relativizable
            .retain(|n| !(var.kind == Kind::Concept && *n == var.name));
        s.concept_args.retain(|v| v != var);
        if var.kind == Kind::Object {
            s.objects.push(var.clone());
        }
        s.binders += 1;
        s
    }
}

/// Random well-kinded formulas over one model's signature.
pub struct QueryGenerator<'a> {
    params: &'a GenParams,
    objects: Vec<String>,
    concepts: Vec<String>,
    relations: Vec<String>,
    fresh: usize,
}

impl<'a> QueryGenerator<'a> {
    pub fn new(params: &'a GenParams, model: &KripkeModel) -> Self {
        QueryGenerator {
            params,
            objects: model.objects().iter().map(|o| o.to_string()).collect(),
            concepts: model.concept_names().iter().map(|c| c.to_string()).collect(),
            relations: model.relation_names().map(str::to_string).collect(),
            fresh: 0,
        }
    }

    /// A query of depth at most `depth`, optionally forcing the top-level
    /// constructor. Targets are the free variables in first-occurrence order.
    pub fn query<R: Rng>(&mut self, rng: &mut R, depth: usize, root: Option<Shape>) -> ModalQuery {
        self.fresh = 0;
        let pool = rng.gen_range(0..=self.params.max_free_vars);
        let scope = Scope {
            objects: (1..=pool).map(|i| Var::object(format!("x{i}"))).collect(),
            ..Scope::default()
        };
        let formula = match root {
            Some(shape) => self.shaped(rng, shape, depth.max(shape_min_depth(shape)), &scope),
            None => self.formula(rng, depth, &scope),
        };
        let targets = free_vars(&formula);
        ModalQuery::new(formula, targets).expect("targets are the free variables")
    }

    fn formula<R: Rng>(&mut self, rng: &mut R, depth: usize, scope: &Scope) -> Formula {
        if depth == 0 || rng.gen_bool(0.25) {
            return self.atom(rng, scope);
        }
        let shapes: Vec<Shape> = [
            Shape::Not,
            Shape::And,
            Shape::Or,
            Shape::Implies,
            Shape::Diamond,
            Shape::Box,
            Shape::Exists,
            Shape::Forall,
            Shape::Lambda,
        ]
        .into_iter()
        .filter(|s| !s.binds() || scope.binders < MAX_BINDERS)
        .filter(|s| *s != Shape::Lambda || self.params.allow_lambda)
        .collect();
        let shape = *shapes.choose_weighted(rng, |s| s.weight()).expect("nonempty");
        self.shaped(rng, shape, depth, scope)
    }

    fn shaped<R: Rng>(&mut self, rng: &mut R, shape: Shape, depth: usize, scope: &Scope) -> Formula {
        let sub = depth.saturating_sub(1);
        match shape {
            Shape::Eq | Shape::Neq => {
                let (a, b) = (self.term(rng, scope), self.term(rng, scope));
                if shape == Shape::Eq {
                    Formula::eq(a, b)
                } else {
                    Formula::neq(a, b)
                }
            }
            Shape::Not => Formula::not(self.formula(rng, sub, scope)),
            Shape::And | Shape::Or | Shape::Implies => {
                let other = rng.gen_range(0..=sub);
                let (da, db) = if rng.gen_bool(0.5) { (sub, other) } else { (other, sub) };
                let a = self.formula(rng, da, scope);
                let b = self.formula(rng, db, scope);
                match shape {
                    Shape::And => Formula::and(a, b),
                    Shape::Or => Formula::or(a, b),
                    _ => Formula::implies(a, b),
                }
            }
            Shape::Diamond | Shape::Box => {
                let rel = self.relations.choose(rng).expect("models have a relation").clone();
                let body = self.formula(rng, sub, scope);
                if shape == Shape::Diamond {
                    Formula::diamond(&rel, body)
                } else {
                    Formula::boxed(&rel, body)
                }
            }
            Shape::Exists | Shape::Forall => {
                let var = self.binder(rng, scope, "q");
                let mut inner = scope.bind(&var);
                if var.kind == Kind::Concept && self.params.allow_concept_vars {
                    inner.relativizable.push(var.name.clone());
                    inner.concept_args.push(var.clone());
                }
                let body = self.formula(rng, sub, &inner);
                if shape == Shape::Exists {
                    Formula::exists(var, body)
                } else {
                    Formula::forall(var, body)
                }
            }
            Shape::Lambda => {
                let var = self.binder(rng, scope, "l");
                let arg = match var.kind {
                    Kind::Object => self.lambda_object_arg(rng, scope),
                    Kind::Concept => match scope.concept_args.choose(rng) {
                        Some(v) if rng.gen_bool(0.3) => Term::Variable(v.clone()),
                        _ => Term::ConceptConstant(self.concepts.choose(rng).expect("id exists").clone()),
                    },
                };
                let mut inner = scope.bind(&var);
                if var.kind == Kind::Concept {
                    // substituted away before translation, so always safe
                    inner.relativizable.push(var.name.clone());
                }
                let body = self.formula(rng, sub, &inner);
                Formula::abstraction(var, body, arg)
            }
        }
    }

    fn binder<R: Rng>(&mut self, rng: &mut R, scope: &Scope, stem: &str) -> Var {
        if rng.gen_bool(0.2) {
            self.fresh += 1;
            return Var::concept(format!("{stem}{}", self.fresh));
        }
        // occasionally shadow a variable already in scope
        if let Some(v) = scope.objects.choose(rng) {
            if rng.gen_bool(0.15) {
                return v.clone();
            }
        }
        self.fresh += 1;
        Var::object(format!("{stem}{}", self.fresh))
    }

    fn lambda_object_arg<R: Rng>(&mut self, rng: &mut R, scope: &Scope) -> Term {
        match rng.gen_range(0..10) {
            0..=5 => Term::relativized(self.concepts.choose(rng).expect("id exists")),
            6 | 7 => Term::constant(self.objects.choose(rng).expect("objects exist")),
            _ => match scope.objects.choose(rng) {
                Some(v) => Term::Variable(v.clone()),
                None => Term::relativized(ID_CONCEPT),
            },
        }
    }

    fn atom<R: Rng>(&mut self, rng: &mut R, scope: &Scope) -> Formula {
        let shape = if rng.gen_bool(0.6) { Shape::Eq } else { Shape::Neq };
        self.shaped(rng, shape, 0, scope)
    }

    fn term<R: Rng>(&mut self, rng: &mut R, scope: &Scope) -> Term {
        let mut options: Vec<(u8, u32)> = vec![(0, 3), (1, 4)];
        if !scope.objects.is_empty() {
            options.push((2, 4));
        }
        if !scope.relativizable.is_empty() {
            options.push((3, 3));
        }
        match options.choose_weighted(rng, |o| o.1).expect("nonempty").0 {
            0 => Term::constant(self.objects.choose(rng).expect("objects exist")),
            1 => Term::relativized(self.concepts.choose(rng).expect("id exists")),
            2 => Term::Variable(scope.objects.choose(rng).expect("checked").clone()),
            _ => Term::Relativized(ConceptRef::Variable(
                scope.relativizable.choose(rng).expect("checked").clone(),
            )),
        }
    }
}

fn shape_min_depth(shape: Shape) -> usize {
    usize::from(!matches!(shape, Shape::Eq | Shape::Neq))
}

/// One random query for `model` at the configured depth.
pub fn gen_query<R: Rng>(p: &GenParams, model: &KripkeModel, rng: &mut R) -> ModalQuery {
    QueryGenerator::new(p, model).query(rng, p.max_depth, None)
}
