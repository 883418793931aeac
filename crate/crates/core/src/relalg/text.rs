//! Prefix s-expression form of algebra expressions, e.g.
//! `(project (1) (select (= 2 'b') Sta))`.

use thiserror::Error;

use super::expr::{AlgebraExpr, CmpOp, Operand, SelectionPredicate};
use super::instance::Value;
use crate::syntax::quote;

pub fn render_algebra(expr: &AlgebraExpr) -> String {
    let mut out = String::new();
    write_expr(expr, &mut out);
    out
}

fn write_operand(op: &Operand, out: &mut String) {
    match op {
        Operand::Column(c) => out.push_str(&c.to_string()),
        Operand::Constant(v) => out.push_str(&quote(v)),
    }
}

fn write_expr(expr: &AlgebraExpr, out: &mut String) {
    let binary = |out: &mut String, name: &str, a: &AlgebraExpr, b: &AlgebraExpr| {
        out.push('(');
        out.push_str(name);
        out.push(' ');
        write_expr(a, out);
        out.push(' ');
        write_expr(b, out);
        out.push(')');
    };
    match expr {
        AlgebraExpr::Base(name) => out.push_str(name),
        AlgebraExpr::Singleton(v) => {
            out.push_str("(const ");
            out.push_str(&quote(v));
            out.push(')');
        }
        AlgebraExpr::Unit => out.push_str("unit"),
        AlgebraExpr::Select(p, e) => {
            out.push_str("(select (");
            out.push_str(match p.op {
                CmpOp::Eq => "=",
                CmpOp::Neq => "!=",
            });
            out.push(' ');
            write_operand(&p.lhs, out);
            out.push(' ');
            write_operand(&p.rhs, out);
            out.push_str(") ");
            write_expr(e, out);
            out.push(')');
        }
        AlgebraExpr::Project(cols, e) => {
            let cols: Vec<String> = cols.iter().map(|c| c.to_string()).collect();
            out.push_str("(project (");
            out.push_str(&cols.join(" "));
            out.push_str(") ");
            write_expr(e, out);
            out.push(')');
        }
        AlgebraExpr::Product(a, b) => binary(out, "product", a, b),
        AlgebraExpr::Union(a, b) => binary(out, "union", a, b),
        AlgebraExpr::Difference(a, b) => binary(out, "diff", a, b),
        AlgebraExpr::Intersection(a, b) => binary(out, "intersect", a, b),
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("algebra syntax error at offset {offset}: {message}")]
pub struct AlgebraParseError {
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Quoted(String),
    Atom(String),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, AlgebraParseError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '(' => {
                chars.next();
                out.push((Tok::Open, i));
            }
            ')' => {
                chars.next();
                out.push((Tok::Close, i));
            }
            '\'' => {
                chars.next();
                let mut value = String::new();
                loop {
                    match chars.next() {
                        Some((_, '\'')) => break,
                        Some((_, '\\')) => match chars.next() {
                            Some((_, e)) => value.push(e),
                            None => break,
                        },
                        Some((_, ch)) => value.push(ch),
                        None => {
                            return Err(AlgebraParseError {
                                offset: i,
                                message: "unterminated constant".into(),
                            })
                        }
                    }
                }
                out.push((Tok::Quoted(value), i));
            }
            _ => {
                let mut atom = String::new();
                while let Some(&(_, ch)) = chars.peek() {
                    if ch.is_whitespace() || ch == '(' || ch == ')' || ch == '\'' {
                        break;
                    }
                    atom.push(ch);
                    chars.next();
                }
                out.push((Tok::Atom(atom), i));
            }
        }
    }
    Ok(out)
}

struct Reader {
    toks: Vec<(Tok, usize)>,
    at: usize,
    len: usize,
}

impl Reader {
    fn offset(&self) -> usize {
        self.toks.get(self.at).map_or(self.len, |t| t.1)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, AlgebraParseError> {
        Err(AlgebraParseError {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.at).map(|t| t.0.clone());
        self.at += 1;
        t
    }

    fn expect(&mut self, tok: Tok) -> Result<(), AlgebraParseError> {
        let offset = self.offset();
        match self.next() {
            Some(t) if t == tok => Ok(()),
            other => Err(AlgebraParseError {
                offset,
                message: format!("expected {tok:?}, found {other:?}"),
            }),
        }
    }

    fn column(&mut self) -> Result<usize, AlgebraParseError> {
        let offset = self.offset();
        match self.next() {
            Some(Tok::Atom(a)) => a.parse().map_err(|_| AlgebraParseError {
                offset,
                message: format!("`{a}` is not a column index"),
            }),
            other => Err(AlgebraParseError {
                offset,
                message: format!("expected column index, found {other:?}"),
            }),
        }
    }

    fn operand(&mut self) -> Result<Operand, AlgebraParseError> {
        match self.toks.get(self.at).map(|t| &t.0) {
            Some(Tok::Quoted(v)) => {
                let v = Value::from(v.as_str());
                self.at += 1;
                Ok(Operand::Constant(v))
            }
            _ => self.column().map(Operand::Column),
        }
    }

    fn expr(&mut self) -> Result<AlgebraExpr, AlgebraParseError> {
        let offset = self.offset();
        match self.next() {
            Some(Tok::Atom(a)) if a == "unit" => Ok(AlgebraExpr::Unit),
            Some(Tok::Atom(a)) => Ok(AlgebraExpr::Base(a)),
            Some(Tok::Open) => {
                let head = match self.next() {
                    Some(Tok::Atom(h)) => h,
                    other => {
                        return Err(AlgebraParseError {
                            offset,
                            message: format!("expected operator, found {other:?}"),
                        })
                    }
                };
                let e = match head.as_str() {
                    "const" => match self.next() {
                        Some(Tok::Quoted(v)) => AlgebraExpr::singleton(&v),
                        _ => return self.err("expected quoted constant"),
                    },
                    "select" => {
                        self.expect(Tok::Open)?;
                        let op = match self.next() {
                            Some(Tok::Atom(o)) if o == "=" => CmpOp::Eq,
                            Some(Tok::Atom(o)) if o == "!=" => CmpOp::Neq,
                            _ => return self.err("expected `=` or `!=`"),
                        };
                        let lhs = self.operand()?;
                        let rhs = self.operand()?;
                        self.expect(Tok::Close)?;
                        let inner = self.expr()?;
                        AlgebraExpr::select(SelectionPredicate { lhs, op, rhs }, inner)
                    }
                    "project" => {
                        self.expect(Tok::Open)?;
                        let mut cols = Vec::new();
                        while self.toks.get(self.at).map(|t| &t.0) != Some(&Tok::Close) {
                            cols.push(self.column()?);
                        }
                        self.expect(Tok::Close)?;
                        AlgebraExpr::project(cols, self.expr()?)
                    }
                    "product" | "union" | "diff" | "intersect" => {
                        let a = self.expr()?;
                        let b = self.expr()?;
                        match head.as_str() {
                            "product" => AlgebraExpr::product_raw(a, b),
                            "union" => AlgebraExpr::union(a, b),
                            "diff" => AlgebraExpr::difference(a, b),
                            _ => AlgebraExpr::intersection(a, b),
                        }
                    }
                    other => {
                        return Err(AlgebraParseError {
                            offset,
                            message: format!("unknown operator `{other}`"),
                        })
                    }
                };
                self.expect(Tok::Close)?;
                Ok(e)
            }
            other => Err(AlgebraParseError {
                offset,
                message: format!("expected expression, found {other:?}"),
            }),
        }
    }
}

/// Inverse of [`render_algebra`].
pub fn parse_algebra(text: &str) -> Result<AlgebraExpr, AlgebraParseError> {
    let mut reader = Reader {
        toks: tokenize(text)?,
        at: 0,
        len: text.len(),
    };
    let e = reader.expr()?;
    if reader.at < reader.toks.len() {
        return reader.err("trailing input");
    }
    Ok(e)
}
