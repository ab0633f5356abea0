//! Recursive-descent parser. Positions in errors are byte offsets.

use super::{is_ident_char, RpqAst, RpqQuery, Term};
use crate::error::ParseError;

type PResult<T> = Result<T, ParseError>;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Var(String),
    Ident(String),
    Quoted(String),
    Caret,
    Slash,
    Bar,
    Star,
    Plus,
    Question,
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Var(v) => format!("variable ?{v}"),
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Quoted(s) => format!("<{s}>"),
            Tok::Caret => "'^'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Bar => "'|'".into(),
            Tok::Star => "'*'".into(),
            Tok::Plus => "'+'".into(),
            Tok::Question => "'?'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
        }
    }
}

fn lex(text: &str) -> PResult<Vec<(usize, Tok)>> {
    let mut out = Vec::new();
    let mut it = text.char_indices().peekable();
    while let Some(&(pos, c)) = it.peek() {
        if c.is_whitespace() {
            it.next();
            continue;
        }
        let single = match c {
            '^' => Some(Tok::Caret),
            '/' => Some(Tok::Slash),
            '|' => Some(Tok::Bar),
            '*' => Some(Tok::Star),
            '+' => Some(Tok::Plus),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            it.next();
            out.push((pos, t));
            continue;
        }
        match c {
            '?' => {
                it.next();
                if it.peek().is_some_and(|&(_, n)| is_ident_char(n)) {
                    out.push((pos, Tok::Var(take_ident(&mut it))));
                } else {
                    out.push((pos, Tok::Question));
                }
            }
            '<' => {
                it.next();
                let mut s = String::new();
                loop {
                    match it.next() {
                        None => return Err(ParseError::new(pos, "unterminated '<'")),
                        Some((_, '>')) => break,
                        Some((epos, '\\')) => match it.next() {
                            Some((_, '\\')) => s.push('\\'),
                            Some((_, '>')) => s.push('>'),
                            Some((_, 't')) => s.push('\t'),
                            Some((_, 'n')) => s.push('\n'),
                            Some((_, other)) => {
                                return Err(ParseError::new(
                                    epos,
                                    format!("unknown escape '\\{other}'"),
                                ))
                            }
                            None => return Err(ParseError::new(epos, "unterminated escape")),
                        },
                        Some((_, ch)) => s.push(ch),
                    }
                }
                out.push((pos, Tok::Quoted(s)));
            }
            c if is_ident_char(c) => out.push((pos, Tok::Ident(take_ident(&mut it)))),
            other => {
                return Err(ParseError::new(
                    pos,
                    format!("unexpected character '{other}'"),
                ))
            }
        }
    }
    Ok(out)
}

fn take_ident(it: &mut std::iter::Peekable<std::str::CharIndices<'_>>) -> String {
    let mut s = String::new();
    while let Some(&(_, c)) = it.peek() {
        if !is_ident_char(c) {
            break;
        }
        s.push(c);
        it.next();
    }
    s
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|(_, t)| t.clone());
        self.i += 1;
        t
    }

    fn unexpected(&self, wanted: &str) -> ParseError {
        match self.peek() {
            Some(t) => ParseError::new(
                self.pos(),
                format!("expected {wanted}, found {}", t.describe()),
            ),
            None => ParseError::new(self.end, format!("expected {wanted}, found end of input")),
        }
    }

    fn term(&mut self) -> PResult<Term> {
        match self.peek() {
            Some(Tok::Var(_)) | Some(Tok::Ident(_)) | Some(Tok::Quoted(_)) => {}
            _ => return Err(self.unexpected("a variable or node")),
        }
        Ok(match self.bump().unwrap() {
            Tok::Var(v) => Term::Variable(v),
            Tok::Ident(s) | Tok::Quoted(s) => Term::Constant(s),
            _ => unreachable!(),
        })
    }

    fn alt(&mut self) -> PResult<RpqAst> {
        let mut parts = vec![self.seq()?];
        while self.peek() == Some(&Tok::Bar) {
            self.bump();
            parts.push(self.seq()?);
        }
        Ok(RpqAst::alt(parts))
    }

    fn seq(&mut self) -> PResult<RpqAst> {
        let mut parts = vec![self.post()?];
        while self.peek() == Some(&Tok::Slash) {
            self.bump();
            parts.push(self.post()?);
        }
        Ok(RpqAst::concat(parts))
    }

    fn post(&mut self) -> PResult<RpqAst> {
        let mut e = self.atom()?;
        loop {
            e = match self.peek() {
                Some(Tok::Star) => e.star(),
                Some(Tok::Plus) => e.plus(),
                Some(Tok::Question) => e.optional(),
                _ => return Ok(e),
            };
            self.bump();
        }
    }

    fn atom(&mut self) -> PResult<RpqAst> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == "eps" => {
                self.bump();
                Ok(RpqAst::Epsilon)
            }
            Some(Tok::Ident(_)) | Some(Tok::Quoted(_)) => Ok(RpqAst::Label(self.label()?)),
            Some(Tok::Caret) => {
                self.bump();
                Ok(RpqAst::InverseLabel(self.label()?))
            }
            Some(Tok::LParen) => {
                self.bump();
                let e = self.alt()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.unexpected("')'"));
                }
                self.bump();
                Ok(e)
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn label(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(_)) | Some(Tok::Quoted(_)) => match self.bump().unwrap() {
                Tok::Ident(s) | Tok::Quoted(s) => Ok(s),
                _ => unreachable!(),
            },
            _ => Err(self.unexpected("a label")),
        }
    }

    fn finish(&self) -> PResult<()> {
        if self.i < self.toks.len() {
            Err(self.unexpected("end of input"))
        } else {
            Ok(())
        }
    }
}

/// Parses `subject expr object`.
pub fn parse_query(text: &str) -> PResult<RpqQuery> {
    let mut p = Parser {
        toks: lex(text)?,
        i: 0,
        end: text.len(),
    };
    let subject = p.term()?;
    let expr = p.alt()?;
    let object = p.term()?;
    p.finish()?;
    Ok(RpqQuery::new(subject, expr, object))
}

/// Parses a bare expression.
pub fn parse_expr(text: &str) -> PResult<RpqAst> {
    let mut p = Parser {
        toks: lex(text)?,
        i: 0,
        end: text.len(),
    };
    let e = p.alt()?;
    p.finish()?;
    Ok(e)
}
