//! Recursive-descent parser for the textual requirement syntax.
//!
//! ```text
//! formula   := implies
//! implies   := or ("implies" implies)?
//! or        := and ("or" and)*
//! and       := until ("and" until)*
//! until     := unary ("until" interval unary)?
//! unary     := "not" unary | "always" interval unary
//!            | "eventually" interval unary | atom
//! atom      := predicate | "(" formula ")" | "true"
//! predicate := expr ("<" | "<=" | ">" | ">=") expr
//! expr      := term (("+" | "-") term)*
//! term      := factor ("*" factor)?        -- left factor must be a literal
//! factor    := number | ident | "abs" "(" expr ")" | "(" expr ")" | "-" factor
//! interval  := "[" number "," number "]"
//! ```

use super::ast::{Expr, Formula, Interval, Relation};
use super::StlError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Plus,
    Minus,
    Star,
    Rel(Relation),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const KEYWORDS: [&str; 9] = [
    "always",
    "eventually",
    "until",
    "not",
    "and",
    "or",
    "implies",
    "true",
    "abs",
];

fn lex(text: &str) -> Result<Vec<Token>, StlError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: tl, col: tc });
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let value: f64 = s.parse().map_err(|_| StlError::Syntax {
                line: tl,
                col: tc,
                message: format!("invalid number `{s}`"),
            })?;
            col += i - start;
            push(&mut out, Tok::Num(value));
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            push(&mut out, Tok::Ident(s));
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, width) = match (c, two.as_str()) {
            (_, "<=") => (Tok::Rel(Relation::Le), 2),
            (_, ">=") => (Tok::Rel(Relation::Ge), 2),
            ('<', _) => (Tok::Rel(Relation::Lt), 1),
            ('>', _) => (Tok::Rel(Relation::Gt), 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            ('[', _) => (Tok::LBracket, 1),
            (']', _) => (Tok::RBracket, 1),
            (',', _) => (Tok::Comma, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            _ => {
                let mut j = i;
                while j < chars.len() && !chars[j].is_whitespace() && !chars[j].is_alphanumeric() {
                    j += 1;
                }
                let op: String = chars[i..j.max(i + 1)].iter().collect();
                return Err(StlError::UnknownOperator {
                    line: tl,
                    col: tc,
                    op,
                });
            }
        };
        push(&mut out, tok);
        i += width;
        col += width;
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> StlError {
        let t = &self.tokens[self.pos];
        StlError::Syntax {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn describe(tok: &Tok) -> String {
        match tok {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("number {n}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Rel(r) => format!("`{}`", r.symbol()),
            Tok::Eof => "end of input".into(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<(), StlError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!(
                "expected {}, found {}",
                Self::describe(&want),
                Self::describe(self.peek())
            )))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn formula(&mut self) -> Result<Formula, StlError> {
        let lhs = self.or()?;
        if self.is_keyword("implies") {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, StlError> {
        let mut lhs = self.and()?;
        while self.is_keyword("or") {
            self.bump();
            let rhs = self.and()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, StlError> {
        let mut lhs = self.until()?;
        while self.is_keyword("and") {
            self.bump();
            let rhs = self.until()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn until(&mut self) -> Result<Formula, StlError> {
        let lhs = self.unary()?;
        if self.is_keyword("until") {
            self.bump();
            let interval = self.interval()?;
            let rhs = self.unary()?;
            return Ok(Formula::until(interval, lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, StlError> {
        if self.is_keyword("not") {
            self.bump();
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_keyword("always") {
            self.bump();
            let i = self.interval()?;
            return Ok(Formula::always(i, self.unary()?));
        }
        if self.is_keyword("eventually") {
            self.bump();
            let i = self.interval()?;
            return Ok(Formula::eventually(i, self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, StlError> {
        if self.is_keyword("true") {
            self.bump();
            return Ok(Formula::True);
        }
        if let (Tok::Ident(name), Tok::LBracket) = (self.peek(), self.peek_at(1)) {
            let t = &self.tokens[self.pos];
            return Err(StlError::UnknownOperator {
                line: t.line,
                col: t.col,
                op: name.clone(),
            });
        }
        let start = self.pos;
        match self.predicate() {
            Ok(p) => Ok(p),
            Err(pred_err) => {
                self.pos = start;
                if *self.peek() != Tok::LParen {
                    return Err(pred_err);
                }
                self.bump();
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
        }
    }

    fn predicate(&mut self) -> Result<Formula, StlError> {
        let lhs = self.expr()?;
        let rel = match self.peek() {
            Tok::Rel(r) => *r,
            other => {
                let msg = format!("expected a comparison, found {}", Self::describe(other));
                return Err(self.error(msg));
            }
        };
        self.bump();
        let rhs = self.expr()?;
        Ok(Formula::predicate(lhs, rel, rhs))
    }

    fn expr(&mut self) -> Result<Expr, StlError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, StlError> {
        let f = self.factor()?;
        if *self.peek() == Tok::Star {
            let c = match f {
                Expr::Const(c) => c,
                _ => return Err(self.error("only a numeric literal may multiply an expression")),
            };
            self.bump();
            let rhs = self.factor()?;
            return Ok(Expr::Scale(c, Box::new(rhs)));
        }
        Ok(f)
    }

    fn factor(&mut self) -> Result<Expr, StlError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Expr::Const(n))
            }
            Tok::Minus => {
                self.bump();
                match self.factor()? {
                    Expr::Const(c) => Ok(Expr::Const(-c)),
                    e => Ok(Expr::Scale(-1.0, Box::new(e))),
                }
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) if name == "abs" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Abs(Box::new(e)))
            }
            Tok::Ident(name) if KEYWORDS.contains(&name.as_str()) => {
                Err(self.error(format!("unexpected keyword `{name}`")))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Expr::Signal(name))
            }
            other => Err(self.error(format!(
                "expected an expression, found {}",
                Self::describe(&other)
            ))),
        }
    }

    fn signed_number(&mut self) -> Result<f64, StlError> {
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.bump() {
            Tok::Num(n) => Ok(if negative { -n } else { n }),
            other => {
                self.pos -= 1;
                Err(self.error(format!(
                    "expected an interval bound, found {}",
                    Self::describe(&other)
                )))
            }
        }
    }

    fn interval(&mut self) -> Result<Interval, StlError> {
        self.expect(Tok::LBracket)?;
        let lo = self.signed_number()?;
        self.expect(Tok::Comma)?;
        let hi = self.signed_number()?;
        self.expect(Tok::RBracket)?;
        Interval::new(lo, hi)
    }
}

/// Parses a requirement from its textual form.
pub fn parse_stl(text: &str) -> Result<Formula, StlError> {
    let tokens = lex(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(format!(
            "unexpected trailing {}",
            Parser::describe(p.peek())
        )));
    }
    Ok(f)
}
