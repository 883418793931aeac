use std::fmt;

/// The two sorts of the modal language.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Kind {
    Object,
    Concept,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Object => f.write_str("object"),
            Kind::Concept => f.write_str("concept"),
        }
    }
}

/// A variable of either kind. Object variables render as `?name`, concept
/// variables as `%name`; `?x` and `%x` are different variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var {
    pub name: String,
    pub kind: Kind,
}

impl Var {
    pub fn object(name: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            kind: Kind::Object,
        }
    }

    pub fn concept(name: impl Into<String>) -> Self {
        Var {
            name: name.into(),
            kind: Kind::Concept,
        }
    }

    pub fn sigil(&self) -> char {
        match self.kind {
            Kind::Object => '?',
            Kind::Concept => '%',
        }
    }

    /// Parses `?x` / `%a`.
    pub fn from_sigiled(text: &str) -> Option<Self> {
        let mut chars = text.chars();
        let kind = match chars.next()? {
            '?' => Kind::Object,
            '%' => Kind::Concept,
            _ => return None,
        };
        let name = chars.as_str();
        if is_identifier(name) {
            Some(Var {
                name: name.to_string(),
                kind,
            })
        } else {
            None
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.sigil(), self.name)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphanumeric() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// The operand of a relativized term: only concept terms can be relativized.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConceptRef {
    Constant(String),
    Variable(String),
}

impl ConceptRef {
    pub fn as_term(&self) -> Term {
        match self {
            ConceptRef::Constant(c) => Term::ConceptConstant(c.clone()),
            ConceptRef::Variable(v) => Term::Variable(Var::concept(v.clone())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    ObjectConstant(String),
    ConceptConstant(String),
    Variable(Var),
    /// `@c`: the object the concept denotes at the current state.
    Relativized(ConceptRef),
}

impl Term {
    pub fn object_var(name: &str) -> Self {
        Term::Variable(Var::object(name))
    }

    pub fn concept_var(name: &str) -> Self {
        Term::Variable(Var::concept(name))
    }

    pub fn constant(value: &str) -> Self {
        Term::ObjectConstant(value.to_string())
    }

    pub fn relativized(concept: &str) -> Self {
        Term::Relativized(ConceptRef::Constant(concept.to_string()))
    }

    pub fn kind(&self) -> Kind {
        match self {
            Term::ObjectConstant(_) | Term::Relativized(_) => Kind::Object,
            Term::ConceptConstant(_) => Kind::Concept,
            Term::Variable(v) => v.kind,
        }
    }

    /// Constants and variables denote the same thing at every state.
    pub fn is_rigid(&self) -> bool {
        !matches!(self, Term::Relativized(_))
    }

    /// The variable this term mentions, if any.
    pub fn variable(&self) -> Option<Var> {
        match self {
            Term::Variable(v) => Some(v.clone()),
            Term::Relativized(ConceptRef::Variable(name)) => Some(Var::concept(name.clone())),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Neq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Diamond(String, Box<Formula>),
    Box(String, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
    /// `<lam var . body>(arg)`
    Abstraction {
        var: Var,
        body: Box<Formula>,
        arg: Term,
    },
}

impl Formula {
    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Formula::Eq(lhs, rhs)
    }

    pub fn neq(lhs: Term, rhs: Term) -> Self {
        Formula::Neq(lhs, rhs)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Formula) -> Self {
        Formula::Not(Box::new(inner))
    }

    pub fn and(lhs: Formula, rhs: Formula) -> Self {
        Formula::And(Box::new(lhs), Box::new(rhs))
    }

    pub fn or(lhs: Formula, rhs: Formula) -> Self {
        Formula::Or(Box::new(lhs), Box::new(rhs))
    }

    pub fn implies(lhs: Formula, rhs: Formula) -> Self {
        Formula::Implies(Box::new(lhs), Box::new(rhs))
    }

    pub fn diamond(rel: &str, inner: Formula) -> Self {
        Formula::Diamond(rel.to_string(), Box::new(inner))
    }

    pub fn boxed(rel: &str, inner: Formula) -> Self {
        Formula::Box(rel.to_string(), Box::new(inner))
    }

    pub fn exists(var: Var, body: Formula) -> Self {
        Formula::Exists(var, Box::new(body))
    }

    pub fn forall(var: Var, body: Formula) -> Self {
        Formula::Forall(var, Box::new(body))
    }

    pub fn abstraction(var: Var, body: Formula, arg: Term) -> Self {
        Formula::Abstraction {
            var,
            body: Box::new(body),
            arg,
        }
    }

    /// Number of nested constructors on the longest path; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Neq(..) => 0,
            Formula::Not(f)
            | Formula::Diamond(_, f)
            | Formula::Box(_, f)
            | Formula::Exists(_, f)
            | Formula::Forall(_, f)
            | Formula::Abstraction { body: f, .. } => 1 + f.depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Eq(..) | Formula::Neq(..) => 1,
            Formula::Not(f)
            | Formula::Diamond(_, f)
            | Formula::Box(_, f)
            | Formula::Exists(_, f)
            | Formula::Forall(_, f)
            | Formula::Abstraction { body: f, .. } => 1 + f.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => 1 + a.size() + b.size(),
        }
    }

    /// Constructor name, used by generator histograms and error messages.
    pub fn constructor(&self) -> &'static str {
        match self {
            Formula::Eq(..) => "eq",
            Formula::Neq(..) => "neq",
            Formula::Not(_) => "not",
            Formula::And(..) => "and",
            Formula::Or(..) => "or",
            Formula::Implies(..) => "implies",
            Formula::Diamond(..) => "diamond",
            Formula::Box(..) => "box",
            Formula::Exists(..) => "exists",
            Formula::Forall(..) => "forall",
            Formula::Abstraction { .. } => "lambda",
        }
    }

    /// Visits every subformula, this one included, in pre-order.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        match self {
            Formula::Eq(..) | Formula::Neq(..) => {}
            Formula::Not(f)
            | Formula::Diamond(_, f)
            | Formula::Box(_, f)
            | Formula::Exists(_, f)
            | Formula::Forall(_, f)
            | Formula::Abstraction { body: f, .. } => f.walk(visit),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.walk(visit);
                b.walk(visit);
            }
        }
    }

    /// Rewrites every `a -> b` into `!a | b`.
    pub fn desugar_implications(&self) -> Formula {
        match self {
            Formula::Eq(..) | Formula::Neq(..) => self.clone(),
            Formula::Not(f) => Formula::not(f.desugar_implications()),
            Formula::And(a, b) => Formula::and(a.desugar_implications(), b.desugar_implications()),
            Formula::Or(a, b) => Formula::or(a.desugar_implications(), b.desugar_implications()),
            Formula::Implies(a, b) => Formula::or(Formula::not(a.desugar_implications()), b.desugar_implications()),
            Formula::Diamond(r, f) => Formula::diamond(r, f.desugar_implications()),
            Formula::Box(r, f) => Formula::boxed(r, f.desugar_implications()),
            Formula::Exists(v, f) => Formula::exists(v.clone(), f.desugar_implications()),
            Formula::Forall(v, f) => Formula::forall(v.clone(), f.desugar_implications()),
            Formula::Abstraction { var, body, arg } => {
                Formula::abstraction(var.clone(), body.desugar_implications(), arg.clone())
            }
        }
    }
}

/// A formula together with its ordered target list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModalQuery {
    pub formula: Formula,
    pub targets: Vec<Var>,
}

impl ModalQuery {
    /// Checks the target list against the formula's free variables.
    pub fn new(formula: Formula, targets: Vec<Var>) -> Result<Self, crate::syntax::QueryError> {
        crate::syntax::check_targets(&formula, &targets)?;
        Ok(ModalQuery { formula, targets })
    }
}
