//! Text grammar shared by the CLI and the canonical tower presentation.
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := "-" unary | power
//! power  := atom ("^" ["-"] INT)?
//! atom   := INT | IDENT | "(" expr ")"
//! form   := "<" list ">" | "<<" list ">>" | list
//! ```

use std::sync::Arc;

use crate::fieldtower::{FieldTower, TowerElement, TowerError};
use crate::forms::{quasi_pfister, FormError, QuasilinearForm};
use crate::polyring::{PolyError, PrimeModulus};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TextError {
    #[error("{line}:{column}: expected {}, found {found}", expected.join(" or "))]
    Parse {
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("{line}:{column}: unknown variable `{name}`")]
    UnknownVariable {
        name: String,
        line: usize,
        column: usize,
    },
    #[error("{line}:{column}: division by zero")]
    DivisionByZero { line: usize, column: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Tower(#[from] TowerError),
    #[error(transparent)]
    Form(#[from] FormError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eq,
    Lt,
    Gt,
    LtLt,
    GtGt,
    Newline,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(v) => format!("integer {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::LtLt => "`<<`".into(),
            Tok::GtGt => "`>>`".into(),
            Tok::Newline => "end of line".into(),
            Tok::End => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

/// With `lines` set, newlines are tokens; otherwise they are whitespace.
fn lex(src: &str, lines: bool) -> Result<Vec<Spanned>, TextError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let single = |tok| Spanned {
            tok,
            line: l0,
            column: c0,
        };
        match c {
            '\n' => {
                if lines {
                    out.push(single(Tok::Newline));
                }
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '+' => out.push(single(Tok::Plus)),
            '-' => out.push(single(Tok::Minus)),
            '*' => out.push(single(Tok::Star)),
            '/' => out.push(single(Tok::Slash)),
            '^' => out.push(single(Tok::Caret)),
            '(' => out.push(single(Tok::LParen)),
            ')' => out.push(single(Tok::RParen)),
            ',' => out.push(single(Tok::Comma)),
            '=' => out.push(single(Tok::Eq)),
            '<' | '>' => {
                let double = chars.get(i + 1) == Some(&c);
                let tok = match (c, double) {
                    ('<', true) => Tok::LtLt,
                    ('<', false) => Tok::Lt,
                    ('>', true) => Tok::GtGt,
                    _ => Tok::Gt,
                };
                out.push(single(tok));
                if double {
                    i += 1;
                    col += 1;
                }
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..=i].iter().collect();
                let v = text.parse::<i64>().map_err(|_| TextError::Parse {
                    line: l0,
                    column: c0,
                    expected: vec!["integer below 2^63".into()],
                    found: text.clone(),
                })?;
                col += i - start;
                out.push(single(Tok::Int(v)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i + 1 < chars.len() && (chars[i + 1].is_ascii_alphanumeric() || chars[i + 1] == '_') {
                    i += 1;
                }
                let text: String = chars[start..=i].iter().collect();
                col += i - start;
                out.push(single(Tok::Ident(text)));
            }
            other => {
                return Err(TextError::Parse {
                    line: l0,
                    column: c0,
                    expected: vec!["expression".into()],
                    found: format!("`{other}`"),
                })
            }
        }
        i += 1;
        col += 1;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    tower: Arc<FieldTower>,
}

impl Parser {
    fn new(src: &str, tower: &Arc<FieldTower>) -> Result<Self, TextError> {
        Self::with_lines(src, tower, false)
    }

    fn with_lines(src: &str, tower: &Arc<FieldTower>, lines: bool) -> Result<Self, TextError> {
        Ok(Parser {
            toks: lex(src, lines)?,
            pos: 0,
            tower: Arc::clone(tower),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> TextError {
        let t = &self.toks[self.pos];
        TextError::Parse {
            line: t.line,
            column: t.column,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: t.tok.describe(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), TextError> {
        if *self.peek() == tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(&[&tok.describe()]))
        }
    }

    fn skip_newlines(&mut self) {
        while *self.peek() == Tok::Newline {
            self.next();
        }
    }

    fn expr(&mut self) -> Result<TowerElement, TextError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.next();
                    acc = acc.add(&self.term()?)?;
                }
                Tok::Minus => {
                    self.next();
                    acc = acc.sub(&self.term()?)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<TowerElement, TextError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.next();
                    acc = acc.mul(&self.unary()?)?;
                }
                Tok::Slash => {
                    let at = self.next();
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(TextError::DivisionByZero {
                            line: at.line,
                            column: at.column,
                        });
                    }
                    acc = acc.div(&d)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<TowerElement, TextError> {
        if *self.peek() == Tok::Minus {
            self.next();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<TowerElement, TextError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let at = self.next();
        let negative = if *self.peek() == Tok::Minus {
            self.next();
            true
        } else {
            false
        };
        let Tok::Int(k) = *self.peek() else {
            return Err(self.error(&["integer exponent"]));
        };
        self.next();
        let b = base.pow(k as u64);
        if negative {
            if b.is_zero() {
                return Err(TextError::DivisionByZero {
                    line: at.line,
                    column: at.column,
                });
            }
            Ok(b.inv()?)
        } else {
            Ok(b)
        }
    }

    fn atom(&mut self) -> Result<TowerElement, TextError> {
        let t = self.toks[self.pos].clone();
        match t.tok {
            Tok::Int(v) => {
                self.next();
                Ok(self.tower.constant(v))
            }
            Tok::Ident(name) => {
                self.next();
                self.tower.var(&name).map_err(|_| TextError::UnknownVariable {
                    name,
                    line: t.line,
                    column: t.column,
                })
            }
            Tok::LParen => {
                self.next();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            _ => Err(self.error(&["integer", "identifier", "`(`"])),
        }
    }

    fn list(&mut self) -> Result<Vec<TowerElement>, TextError> {
        let mut items = vec![self.expr()?];
        while *self.peek() == Tok::Comma {
            self.next();
            items.push(self.expr()?);
        }
        Ok(items)
    }

    fn form(&mut self) -> Result<QuasilinearForm, TextError> {
        let f = match self.peek() {
            Tok::LtLt => {
                self.next();
                let gens = if *self.peek() == Tok::GtGt {
                    Vec::new()
                } else {
                    self.list()?
                };
                self.expect(Tok::GtGt)?;
                quasi_pfister(&self.tower, &gens)?
            }
            Tok::Lt => {
                self.next();
                let items = self.list()?;
                self.expect(Tok::Gt)?;
                QuasilinearForm::new(&items)?
            }
            _ => QuasilinearForm::new(&self.list()?)?,
        };
        Ok(f.lift_to(&self.tower)?)
    }

    fn finish(&mut self) -> Result<(), TextError> {
        self.skip_newlines();
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error(&["end of input"]))
        }
    }
}

/// Parse an element expression over `tower`.
pub fn parse_element(tower: &Arc<FieldTower>, src: &str) -> Result<TowerElement, TextError> {
    let mut p = Parser::new(src, tower)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parse `<a, b, …>`, `<<g, …>>` or a bare comma-separated coefficient list.
pub fn parse_form(tower: &Arc<FieldTower>, src: &str) -> Result<QuasilinearForm, TextError> {
    let mut p = Parser::new(src, tower)?;
    let f = p.form()?;
    p.finish()?;
    Ok(f)
}

/// Comma-separated identifiers; the empty string gives no names.
pub fn parse_names(src: &str) -> Result<Vec<String>, TextError> {
    let empty = FieldTower::new::<&str>(PrimeModulus::new(2)?, &[])?;
    let mut p = Parser::new(src, &empty)?;
    let names = names_until(&mut p, &[Tok::End])?;
    p.finish()?;
    Ok(names)
}

fn names_until(p: &mut Parser, stop: &[Tok]) -> Result<Vec<String>, TextError> {
    let mut names = Vec::new();
    if stop.contains(p.peek()) {
        return Ok(names);
    }
    loop {
        match p.peek().clone() {
            Tok::Ident(n) => {
                p.next();
                names.push(n);
            }
            _ => return Err(p.error(&["identifier"])),
        }
        if *p.peek() == Tok::Comma {
            p.next();
        } else {
            return Ok(names);
        }
    }
}

/// Parse the canonical presentation produced by [`FieldTower::to_text`].
pub fn parse_tower(src: &str) -> Result<Arc<FieldTower>, TextError> {
    let placeholder = FieldTower::new::<&str>(PrimeModulus::new(2)?, &[])?;
    let mut p = Parser::with_lines(src, &placeholder, true)?;
    p.skip_newlines();
    keyword(&mut p, "p")?;
    p.expect(Tok::Eq)?;
    let Tok::Int(pv) = *p.peek() else {
        return Err(p.error(&["integer"]));
    };
    p.next();
    let modulus = PrimeModulus::new(u32::try_from(pv).map_err(|_| PolyError::NonPrimeModulus(0))?)?;
    end_of_line(&mut p)?;
    keyword(&mut p, "vars")?;
    p.expect(Tok::Eq)?;
    let vars = names_until(&mut p, &[Tok::Newline, Tok::End])?;
    end_of_line(&mut p)?;
    let mut tower = FieldTower::new(modulus, &vars)?;
    loop {
        p.skip_newlines();
        if *p.peek() == Tok::End {
            return Ok(tower);
        }
        keyword(&mut p, "root")?;
        let Tok::Ident(name) = p.peek().clone() else {
            return Err(p.error(&["identifier"]));
        };
        p.next();
        p.expect(Tok::Eq)?;
        p.expect(Tok::LParen)?;
        p.tower = Arc::clone(&tower);
        let radicand = p.expr()?;
        p.expect(Tok::RParen)?;
        p.expect(Tok::Caret)?;
        p.expect(Tok::LParen)?;
        p.expect(Tok::Int(1))?;
        p.expect(Tok::Slash)?;
        p.expect(Tok::Int(pv))?;
        p.expect(Tok::RParen)?;
        end_of_line(&mut p)?;
        tower = tower.adjoin_pth_root(&radicand, &name)?;
    }
}

fn keyword(p: &mut Parser, word: &str) -> Result<(), TextError> {
    match p.peek() {
        Tok::Ident(w) if w == word => {
            p.next();
            Ok(())
        }
        _ => Err(p.error(&[&format!("`{word}`")])),
    }
}

fn end_of_line(p: &mut Parser) -> Result<(), TextError> {
    match p.peek() {
        Tok::Newline => {
            p.next();
            Ok(())
        }
        Tok::End => Ok(()),
        _ => Err(p.error(&["end of line"])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tower(p: u32, vars: &[&str]) -> Arc<FieldTower> {
        FieldTower::new(PrimeModulus::new(p).unwrap(), vars).unwrap()
    }

    #[test]
    fn precedence_and_render() {
        let t = tower(3, &["t", "u"]);
        let e = parse_element(&t, "2*t^2*u + t + 1").unwrap();
        assert_eq!(e.render(), "2*t^2*u + t + 1");
        let e = parse_element(&t, "-t^2").unwrap();
        assert_eq!(e.render(), "2*t^2");
        let e = parse_element(&t, "(t+u)/(t^2 + 2*t*u + u^2)").unwrap();
        assert_eq!(e.render(), "(1)/(t + u)");
        let e = parse_element(&t, "t^-1 * t").unwrap();
        assert!(e.is_one());
    }

    #[test]
    fn errors_carry_positions() {
        let t = tower(2, &["t"]);
        match parse_element(&t, "t +\n  * t") {
            Err(TextError::Parse {
                line,
                column,
                expected,
                ..
            }) => {
                assert_eq!((line, column), (2, 3));
                assert!(expected.contains(&"identifier".to_string()));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_element(&t, "t + v"),
            Err(TextError::UnknownVariable { column: 5, .. })
        ));
        assert!(matches!(
            parse_element(&t, "1/(t+t)"),
            Err(TextError::DivisionByZero { .. })
        ));
    }

    #[test]
    fn form_literals() {
        let t = tower(2, &["t", "u"]);
        assert_eq!(parse_form(&t, "<<t,u>>").unwrap().render(), "<1, u, t, t*u>");
        assert_eq!(parse_form(&t, "<1, t>").unwrap().dim(), 2);
        assert_eq!(parse_form(&t, "1,t,u").unwrap().dim(), 3);
        assert_eq!(parse_form(&t, "<<>>").unwrap().render(), "<1>");
    }

    #[test]
    fn tower_text_roundtrip() {
        let t = tower(2, &["t", "u"]);
        let r = t.adjoin_pth_root(&parse_element(&t, "t").unwrap(), "r1").unwrap();
        let x = parse_element(&r, "(1 + r1)/u").unwrap();
        let r2 = r.adjoin_pth_root(&x, "r2").unwrap();
        let text = r2.to_text();
        let back = parse_tower(&text).unwrap();
        assert_eq!(*back, *r2);
        assert_eq!(back.to_text(), text);
    }
}
