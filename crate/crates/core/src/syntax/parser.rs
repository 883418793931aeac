//! Recursive-descent parser for the query surface syntax.
//!
//! ```text
//! formula     := implication
//! implication := disjunction ( "->" implication )?
//! disjunction := conjunction ( "|" conjunction )*
//! conjunction := unary ( "&" unary )*
//! unary       := "!" unary
//!              | "<" REL ">" unary | "[" REL "]" unary
//!              | ("exists" | "forall") VAR "." unary
//!              | "<" "lam" VAR "." formula ">" "(" term ")"
//!              | "(" formula ")"
//!              | term ("=" | "!=") term
//! term        := 'quoted' | ?var | %var | @concept | @%var | concept
//! ```

use super::ast::{ConceptRef, Formula, Kind, Term, Var};
use super::{Pos, QueryError};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Quoted(String),
    Var(Var),
    Ident(String),
    At,
    Eq,
    Neq,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Lt,
    Gt,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Dot,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Quoted(s) => format!("'{s}'"),
            Tok::Var(v) => v.to_string(),
            Tok::Ident(s) => s.clone(),
            Tok::At => "`@`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Neq => "`!=`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Pipe => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

const KEYWORDS: [&str; 3] = ["exists", "forall", "lam"];

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>, QueryError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }

    let ident_char = |c: char| c.is_ascii_alphanumeric() || c == '_';

    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
        if c.is_whitespace() {
            bump!();
            continue;
        }
        let simple = match c {
            '@' => Some(Tok::At),
            '=' => Some(Tok::Eq),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Pipe),
            '<' => Some(Tok::Lt),
            '>' => Some(Tok::Gt),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '.' => Some(Tok::Dot),
            _ => None,
        };
        if let Some(tok) = simple {
            bump!();
            out.push((tok, pos));
            continue;
        }
        match c {
            '!' => {
                bump!();
                if chars.get(i) == Some(&'=') {
                    bump!();
                    out.push((Tok::Neq, pos));
                } else {
                    out.push((Tok::Bang, pos));
                }
            }
            '-' => {
                bump!();
                if chars.get(i) == Some(&'>') {
                    bump!();
                    out.push((Tok::Arrow, pos));
                } else {
                    return Err(QueryError::Syntax {
                        pos,
                        expected: vec!["`->`".into()],
                        found: "`-`".into(),
                    });
                }
            }
            '\'' => {
                bump!();
                let mut value = String::new();
                loop {
                    match chars.get(i) {
                        None => {
                            return Err(QueryError::Syntax {
                                pos: Pos { line, col },
                                expected: vec!["closing `'`".into()],
                                found: "end of input".into(),
                            })
                        }
                        Some('\'') => {
                            bump!();
                            break;
                        }
                        Some('\\') => {
                            bump!();
                            match chars.get(i) {
                                Some(&e) if e == '\'' || e == '\\' => {
                                    value.push(e);
                                    bump!();
                                }
                                _ => {
                                    return Err(QueryError::Syntax {
                                        pos: Pos { line, col },
                                        expected: vec!["`\\'` or `\\\\`".into()],
                                        found: "invalid escape".into(),
                                    })
                                }
                            }
                        }
                        Some(&ch) => {
                            value.push(ch);
                            bump!();
                        }
                    }
                }
                out.push((Tok::Quoted(value), pos));
            }
            '?' | '%' => {
                bump!();
                let start = i;
                while i < chars.len() && ident_char(chars[i]) {
                    bump!();
                }
                if start == i {
                    return Err(QueryError::Syntax {
                        pos: Pos { line, col },
                        expected: vec!["variable name".into()],
                        found: chars.get(i).map_or("end of input".into(), |c| format!("`{c}`")),
                    });
                }
                let name: String = chars[start..i].iter().collect();
                let kind = if c == '?' { Kind::Object } else { Kind::Concept };
                out.push((Tok::Var(Var { name, kind }), pos));
            }
            c if ident_char(c) => {
                let start = i;
                while i < chars.len() && ident_char(chars[i]) {
                    bump!();
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
            }
            other => {
                return Err(QueryError::Syntax {
                    pos,
                    expected: vec!["a formula".into()],
                    found: format!("`{other}`"),
                })
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let idx = (self.at + offset).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn advance(&mut self) -> (Tok, Pos) {
        let item = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        item
    }

    fn unexpected(&self, expected: &[&str]) -> QueryError {
        QueryError::Syntax {
            pos: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Pos, QueryError> {
        if *self.peek() == tok {
            Ok(self.advance().1)
        } else {
            Err(self.unexpected(&[&tok.describe()]))
        }
    }

    fn name(&mut self, what: &str) -> Result<String, QueryError> {
        match self.peek().clone() {
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.advance();
                Ok(name)
            }
            _ => Err(self.unexpected(&[what])),
        }
    }

    fn variable(&mut self) -> Result<Var, QueryError> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.advance();
                Ok(v)
            }
            _ => Err(self.unexpected(&["a variable (`?x` or `%a`)"])),
        }
    }

    fn formula(&mut self) -> Result<Formula, QueryError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.advance();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, QueryError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Pipe {
            self.advance();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, QueryError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.advance();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, QueryError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.advance();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Lt if *self.peek_at(1) == Tok::Ident("lam".into()) => self.abstraction(),
            Tok::Lt => {
                self.advance();
                let rel = self.name("a relation name")?;
                self.expect(Tok::Gt)?;
                Ok(Formula::diamond(&rel, self.unary()?))
            }
            Tok::LBracket => {
                self.advance();
                let rel = self.name("a relation name")?;
                self.expect(Tok::RBracket)?;
                Ok(Formula::boxed(&rel, self.unary()?))
            }
            Tok::Ident(kw) if kw == "exists" || kw == "forall" => {
                self.advance();
                let var = self.variable()?;
                self.expect(Tok::Dot)?;
                let body = self.unary()?;
                Ok(if kw == "exists" {
                    Formula::exists(var, body)
                } else {
                    Formula::forall(var, body)
                })
            }
            Tok::LParen => {
                self.advance();
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => self.atom(),
        }
    }

    fn abstraction(&mut self) -> Result<Formula, QueryError> {
        self.expect(Tok::Lt)?;
        self.advance(); // lam
        let var = self.variable()?;
        self.expect(Tok::Dot)?;
        let body = self.formula()?;
        self.expect(Tok::Gt)?;
        self.expect(Tok::LParen)?;
        let arg_pos = self.pos();
        let arg = self.term()?;
        self.expect(Tok::RParen)?;
        if arg.kind() != var.kind {
            return Err(QueryError::Kind {
                pos: arg_pos,
                message: format!(
                    "abstraction binds {} variable {var} but its argument is a {} term",
                    var.kind,
                    arg.kind()
                ),
            });
        }
        Ok(Formula::abstraction(var, body, arg))
    }

    fn atom(&mut self) -> Result<Formula, QueryError> {
        let lhs_pos = self.pos();
        let lhs = match self.term() {
            Ok(term) => term,
            Err(QueryError::Syntax { .. }) if self.pos() == lhs_pos => {
                return Err(self.unexpected(&["a term", "`!`", "`<`", "`[`", "`(`", "exists", "forall"]))
            }
            Err(e) => return Err(e),
        };
        let negated = match self.peek() {
            Tok::Eq => false,
            Tok::Neq => true,
            _ => return Err(self.unexpected(&["`=`", "`!=`"])),
        };
        self.advance();
        let rhs_pos = self.pos();
        let rhs = self.term()?;
        for (term, pos) in [(&lhs, lhs_pos), (&rhs, rhs_pos)] {
            if term.kind() != Kind::Object {
                return Err(QueryError::Kind {
                    pos,
                    message: format!(
                        "`{}` is a concept term; equality compares object terms only (relativize with `@`)",
                        super::render_term(term)
                    ),
                });
            }
        }
        Ok(if negated {
            Formula::neq(lhs, rhs)
        } else {
            Formula::eq(lhs, rhs)
        })
    }

    fn term(&mut self) -> Result<Term, QueryError> {
        match self.peek().clone() {
            Tok::Quoted(value) => {
                self.advance();
                Ok(Term::ObjectConstant(value))
            }
            Tok::Var(v) => {
                self.advance();
                Ok(Term::Variable(v))
            }
            Tok::At => {
                let at = self.advance().1;
                match self.peek().clone() {
                    Tok::Var(v) if v.kind == Kind::Concept => {
                        self.advance();
                        Ok(Term::Relativized(ConceptRef::Variable(v.name)))
                    }
                    Tok::Var(v) => Err(QueryError::Kind {
                        pos: at,
                        message: format!("`@` applies to concept terms, not object variable {v}"),
                    }),
                    Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                        self.advance();
                        Ok(Term::Relativized(ConceptRef::Constant(name)))
                    }
                    Tok::Quoted(value) => Err(QueryError::Kind {
                        pos: at,
                        message: format!("`@` applies to concept terms, not object constant '{value}'"),
                    }),
                    _ => Err(self.unexpected(&["a concept name", "a concept variable"])),
                }
            }
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                self.advance();
                Ok(Term::ConceptConstant(name))
            }
            _ => Err(self.unexpected(&["a term"])),
        }
    }
}

/// Parses a formula on its own, without target-list checks.
pub fn parse_formula(text: &str) -> Result<Formula, QueryError> {
    let mut parser = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let formula = parser.formula()?;
    if *parser.peek() != Tok::Eof {
        return Err(parser.unexpected(&["`&`", "`|`", "`->`", "end of input"]));
    }
    Ok(formula)
}
