//! Two-way regular path queries: AST, printer and parser.
//!
//! Concrete syntax, loosely modeled on SPARQL property paths:
//!
//! ```text
//! query := term expr term
//! term  := '?' ident | ident | '<' chars '>'
//! expr  := seq ('|' seq)*
//! seq   := post ('/' post)*
//! post  := atom ('*' | '+' | '?')*
//! atom  := 'eps' | '^'? label | '(' expr ')'
//! label := ident | '<' chars '>'
//! ```
//!
//! A `?` directly followed by an identifier character always starts a
//! variable; otherwise it is the optional operator.

mod parse;

use std::fmt;

pub use parse::{parse_expr, parse_query};

/// A two-way regular expression. `Concat` and `Alt` are n-ary with at
/// least two children and never directly contain a node of their own kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RpqAst {
    Epsilon,
    Label(String),
    InverseLabel(String),
    Concat(Vec<RpqAst>),
    Alt(Vec<RpqAst>),
    Star(Box<RpqAst>),
    Plus(Box<RpqAst>),
    Optional(Box<RpqAst>),
}

impl RpqAst {
    pub fn label(name: impl Into<String>) -> Self {
        RpqAst::Label(name.into())
    }

    pub fn inverse(name: impl Into<String>) -> Self {
        RpqAst::InverseLabel(name.into())
    }

    /// Flattening n-ary concatenation; a single part is returned as is.
    pub fn concat(parts: Vec<RpqAst>) -> Self {
        Self::nary(parts, true)
    }

    /// Flattening n-ary alternation; a single part is returned as is.
    pub fn alt(parts: Vec<RpqAst>) -> Self {
        Self::nary(parts, false)
    }

    fn nary(parts: Vec<RpqAst>, concat: bool) -> Self {
        assert!(!parts.is_empty(), "n-ary node needs a child");
        let mut flat = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                RpqAst::Concat(kids) if concat => flat.extend(kids),
                RpqAst::Alt(kids) if !concat => flat.extend(kids),
                other => flat.push(other),
            }
        }
        if flat.len() == 1 {
            return flat.pop().unwrap();
        }
        if concat {
            RpqAst::Concat(flat)
        } else {
            RpqAst::Alt(flat)
        }
    }

    pub fn star(self) -> Self {
        RpqAst::Star(Box::new(self))
    }

    pub fn plus(self) -> Self {
        RpqAst::Plus(Box::new(self))
    }

    pub fn optional(self) -> Self {
        RpqAst::Optional(Box::new(self))
    }

    /// Every label mentioned, direct or inverse, in first-seen order.
    pub fn labels(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            RpqAst::Epsilon => {}
            RpqAst::Label(l) | RpqAst::InverseLabel(l) => {
                if !out.contains(&l.as_str()) {
                    out.push(l);
                }
            }
            RpqAst::Concat(kids) | RpqAst::Alt(kids) => {
                kids.iter().for_each(|k| k.collect_labels(out));
            }
            RpqAst::Star(k) | RpqAst::Plus(k) | RpqAst::Optional(k) => k.collect_labels(out),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            RpqAst::Alt(_) => 0,
            RpqAst::Concat(_) => 1,
            RpqAst::Star(_) | RpqAst::Plus(_) | RpqAst::Optional(_) => 2,
            _ => 3,
        }
    }

    fn fmt_child(&self, child: &RpqAst, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Same-kind children would be flattened by the parser; parenthesizing
        // them is the only way to keep them apart.
        let same_kind = std::mem::discriminant(self) == std::mem::discriminant(child)
            && matches!(self, RpqAst::Concat(_) | RpqAst::Alt(_));
        if child.precedence() < self.precedence() || same_kind {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

impl fmt::Display for RpqAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RpqAst::Epsilon => f.write_str("eps"),
            RpqAst::Label(l) => write_label(f, l),
            RpqAst::InverseLabel(l) => {
                f.write_str("^")?;
                write_label(f, l)
            }
            RpqAst::Concat(kids) | RpqAst::Alt(kids) => {
                let sep = if matches!(self, RpqAst::Concat(_)) {
                    "/"
                } else {
                    "|"
                };
                for (i, k) in kids.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    self.fmt_child(k, f)?;
                }
                Ok(())
            }
            RpqAst::Star(k) | RpqAst::Plus(k) | RpqAst::Optional(k) => {
                self.fmt_child(k, f)?;
                f.write_str(match self {
                    RpqAst::Star(_) => "*",
                    RpqAst::Plus(_) => "+",
                    _ => "?",
                })
            }
        }
    }
}

pub(crate) fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':')
}

fn is_bare(s: &str) -> bool {
    !s.is_empty() && s.chars().all(is_ident_char)
}

fn write_quoted(f: &mut fmt::Formatter<'_>, s: &str) -> fmt::Result {
    f.write_str("<")?;
    for c in s.chars() {
        match c {
            '\\' => f.write_str("\\\\")?,
            '>' => f.write_str("\\>")?,
            '\t' => f.write_str("\\t")?,
            '\n' => f.write_str("\\n")?,
            c => write!(f, "{c}")?,
        }
    }
    f.write_str(">")
}

fn write_label(f: &mut fmt::Formatter<'_>, l: &str) -> fmt::Result {
    if is_bare(l) && l != "eps" {
        f.write_str(l)
    } else {
        write_quoted(f, l)
    }
}

/// One end of a query.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Variable(String),
    Constant(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Variable(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Constant(name.into())
    }

    pub fn is_variable(&self) -> bool {
        matches!(self, Term::Variable(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Variable(v) => write!(f, "?{v}"),
            Term::Constant(c) if is_bare(c) => f.write_str(c),
            Term::Constant(c) => write_quoted(f, c),
        }
    }
}

/// `(subject, expr, object)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RpqQuery {
    pub subject: Term,
    pub expr: RpqAst,
    pub object: Term,
}

impl RpqQuery {
    pub fn new(subject: Term, expr: RpqAst, object: Term) -> Self {
        Self {
            subject,
            expr,
            object,
        }
    }

    /// Both ends are the same variable, so bindings lie on the diagonal.
    pub fn same_variable(&self) -> bool {
        matches!((&self.subject, &self.object), (Term::Variable(a), Term::Variable(b)) if a == b)
    }
}

impl fmt::Display for RpqQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.expr, self.object)
    }
}

impl std::str::FromStr for RpqQuery {
    type Err = crate::error::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_query(s)
    }
}
