use std::collections::BTreeMap;

use thiserror::Error;

use super::instance::Value;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Operand {
    /// 1-based attribute index.
    Column(usize),
    Constant(Value),
}

impl Operand {
    pub fn constant(value: &str) -> Self {
        Operand::Constant(Value::from(value))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CmpOp {
    Eq,
    Neq,
}

/// `lhs = rhs` or `lhs ≠ rhs` over columns and constants. Constant-only
/// predicates keep either all tuples or none.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SelectionPredicate {
    pub lhs: Operand,
    pub op: CmpOp,
    pub rhs: Operand,
}

impl SelectionPredicate {
    pub fn eq(lhs: Operand, rhs: Operand) -> Self {
        SelectionPredicate {
            lhs,
            op: CmpOp::Eq,
            rhs,
        }
    }

    pub fn neq(lhs: Operand, rhs: Operand) -> Self {
        SelectionPredicate {
            lhs,
            op: CmpOp::Neq,
            rhs,
        }
    }

    /// Column/column equality, the common join condition.
    pub fn cols(lhs: usize, rhs: usize) -> Self {
        Self::eq(Operand::Column(lhs), Operand::Column(rhs))
    }

    /// Column/constant equality.
    pub fn col_const(col: usize, value: &str) -> Self {
        Self::eq(Operand::Column(col), Operand::constant(value))
    }

    pub(crate) fn max_column(&self) -> usize {
        [&self.lhs, &self.rhs]
            .into_iter()
            .map(|o| match o {
                Operand::Column(c) => *c,
                Operand::Constant(_) => 0,
            })
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn holds(&self, tuple: &[Value]) -> bool {
        let get = |o: &Operand| -> Value {
            match o {
                Operand::Column(c) => tuple[c - 1].clone(),
                Operand::Constant(v) => v.clone(),
            }
        };
        let equal = get(&self.lhs) == get(&self.rhs);
        match self.op {
            CmpOp::Eq => equal,
            CmpOp::Neq => !equal,
        }
    }

    fn has_zero_column(&self) -> bool {
        matches!(self.lhs, Operand::Column(0)) || matches!(self.rhs, Operand::Column(0))
    }
}

/// Unnamed relational algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraExpr {
    /// An input relation of the database.
    Base(String),
    /// `{⟨c⟩}`
    Singleton(Value),
    /// `{⟨⟩}`
    Unit,
    Select(SelectionPredicate, Box<AlgebraExpr>),
    Project(Vec<usize>, Box<AlgebraExpr>),
    Product(Box<AlgebraExpr>, Box<AlgebraExpr>),
    Union(Box<AlgebraExpr>, Box<AlgebraExpr>),
    Difference(Box<AlgebraExpr>, Box<AlgebraExpr>),
    Intersection(Box<AlgebraExpr>, Box<AlgebraExpr>),
}

impl AlgebraExpr {
    pub fn base(name: &str) -> Self {
        AlgebraExpr::Base(name.to_string())
    }

    pub fn singleton(value: &str) -> Self {
        AlgebraExpr::Singleton(Value::from(value))
    }

    pub fn select(pred: SelectionPredicate, inner: AlgebraExpr) -> Self {
        AlgebraExpr::Select(pred, Box::new(inner))
    }

    /// A conjunction of conditions as nested selections, the first condition
    /// outermost.
    pub fn select_all(preds: impl IntoIterator<Item = SelectionPredicate>, inner: AlgebraExpr) -> Self {
        let preds: Vec<_> = preds.into_iter().collect();
        preds
            .into_iter()
            .rev()
            .fold(inner, |acc, p| AlgebraExpr::select(p, acc))
    }

    pub fn project(columns: Vec<usize>, inner: AlgebraExpr) -> Self {
        AlgebraExpr::Project(columns, Box::new(inner))
    }

    /// Cross product with `{⟨⟩}` dropped on either side.
    pub fn product(lhs: AlgebraExpr, rhs: AlgebraExpr) -> Self {
        match (lhs, rhs) {
            (AlgebraExpr::Unit, other) | (other, AlgebraExpr::Unit) => other,
            (l, r) => AlgebraExpr::Product(Box::new(l), Box::new(r)),
        }
    }

    /// Cross product kept verbatim, even against `{⟨⟩}`.
    pub fn product_raw(lhs: AlgebraExpr, rhs: AlgebraExpr) -> Self {
        AlgebraExpr::Product(Box::new(lhs), Box::new(rhs))
    }

    pub fn union(lhs: AlgebraExpr, rhs: AlgebraExpr) -> Self {
        AlgebraExpr::Union(Box::new(lhs), Box::new(rhs))
    }

    pub fn difference(lhs: AlgebraExpr, rhs: AlgebraExpr) -> Self {
        AlgebraExpr::Difference(Box::new(lhs), Box::new(rhs))
    }

    pub fn intersection(lhs: AlgebraExpr, rhs: AlgebraExpr) -> Self {
        AlgebraExpr::Intersection(Box::new(lhs), Box::new(rhs))
    }

    pub fn node_name(&self) -> &'static str {
        match self {
            AlgebraExpr::Base(_) => "relation",
            AlgebraExpr::Singleton(_) => "const",
            AlgebraExpr::Unit => "unit",
            AlgebraExpr::Select(..) => "select",
            AlgebraExpr::Project(..) => "project",
            AlgebraExpr::Product(..) => "product",
            AlgebraExpr::Union(..) => "union",
            AlgebraExpr::Difference(..) => "diff",
            AlgebraExpr::Intersection(..) => "intersect",
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            AlgebraExpr::Base(_) | AlgebraExpr::Singleton(_) | AlgebraExpr::Unit => 1,
            AlgebraExpr::Select(_, e) | AlgebraExpr::Project(_, e) => 1 + e.size(),
            AlgebraExpr::Product(a, b)
            | AlgebraExpr::Union(a, b)
            | AlgebraExpr::Difference(a, b)
            | AlgebraExpr::Intersection(a, b) => 1 + a.size() + b.size(),
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DegreeError {
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("{node}: column {column} out of range for input of degree {degree}")]
    ColumnOutOfRange {
        node: &'static str,
        column: usize,
        degree: usize,
    },
    #[error("{node}: operands are not union-compatible (degrees {left} and {right})")]
    NotUnionCompatible {
        node: &'static str,
        left: usize,
        right: usize,
    },
}

/// Static degree of `expr` under `schema`.
pub fn degree_of(expr: &AlgebraExpr, schema: &BTreeMap<String, usize>) -> Result<usize, DegreeError> {
    match expr {
        AlgebraExpr::Base(name) => schema
            .get(name)
            .copied()
            .ok_or_else(|| DegreeError::UnknownRelation(name.clone())),
        AlgebraExpr::Singleton(_) => Ok(1),
        AlgebraExpr::Unit => Ok(0),
        AlgebraExpr::Select(pred, inner) => {
            let degree = degree_of(inner, schema)?;
            let max = pred.max_column();
            if pred.has_zero_column() || max > degree {
                return Err(DegreeError::ColumnOutOfRange {
                    node: "select",
                    column: if pred.has_zero_column() { 0 } else { max },
                    degree,
                });
            }
            Ok(degree)
        }
        AlgebraExpr::Project(cols, inner) => {
            let degree = degree_of(inner, schema)?;
            if let Some(&bad) = cols.iter().find(|&&c| c == 0 || c > degree) {
                return Err(DegreeError::ColumnOutOfRange {
                    node: "project",
                    column: bad,
                    degree,
                });
            }
            Ok(cols.len())
        }
        AlgebraExpr::Product(a, b) => Ok(degree_of(a, schema)? + degree_of(b, schema)?),
        AlgebraExpr::Union(a, b) | AlgebraExpr::Difference(a, b) | AlgebraExpr::Intersection(a, b) => {
            let left = degree_of(a, schema)?;
            let right = degree_of(b, schema)?;
            if left != right {
                return Err(DegreeError::NotUnionCompatible {
                    node: expr.node_name(),
                    left,
                    right,
                });
            }
            Ok(left)
        }
    }
}
