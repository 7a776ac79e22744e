use num_bigint::BigInt;
use thiserror::Error;

use crate::ring::{Base, RingElem, RingError, RingSpec};
use crate::sl2::Mat2;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("unknown variable '{name}' at byte {offset}")]
    UnknownVariable { name: String, offset: usize },
    #[error("division by zero at byte {offset}")]
    ZeroDenominator { offset: usize },
    #[error("unsupported base '{0}' (use Z or F<p> with p prime)")]
    UnsupportedBase(String),
    #[error("inverted element at byte {offset} is zero")]
    ZeroInverted { offset: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn syntax(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError::SyntaxError { offset, message: message.into() }
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Result<Lexer<'a>, ParseError> {
        let bytes = src.as_bytes();
        let mut toks = Vec::new();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_ascii_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                toks.push((Tok::Int(src[start..i].parse().unwrap()), start));
            } else if c.is_ascii_alphabetic() || c == b'_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            } else if b"+-*/^()[],".contains(&c) {
                toks.push((Tok::Sym(c as char), i));
                i += 1;
            } else {
                let ch = src[i..].chars().next().unwrap();
                return Err(syntax(i, format!("unexpected character '{ch}'")));
            }
        }
        toks.push((Tok::End, src.len()));
        Ok(Lexer { src, toks, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn next(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(syntax(self.offset(), format!("expected '{c}'")))
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            _ => Err(syntax(self.offset(), format!("trailing input '{}'", &self.src[self.offset()..]))),
        }
    }
}

struct ExprParser<'s> {
    spec: &'s RingSpec,
}

impl ExprParser<'_> {
    fn expr(&self, lx: &mut Lexer) -> Result<RingElem, ParseError> {
        let mut acc = self.term(lx)?;
        loop {
            if lx.eat('+') {
                acc = acc + self.term(lx)?;
            } else if lx.eat('-') {
                acc = acc - self.term(lx)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&self, lx: &mut Lexer) -> Result<RingElem, ParseError> {
        let mut acc = self.unary(lx)?;
        loop {
            if lx.eat('*') {
                acc = acc * self.unary(lx)?;
            } else if *lx.peek() == Tok::Sym('/') {
                lx.next();
                let offset = lx.offset();
                let d = self.unary(lx)?;
                if d.is_zero() {
                    return Err(ParseError::ZeroDenominator { offset });
                }
                acc = acc / d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&self, lx: &mut Lexer) -> Result<RingElem, ParseError> {
        if lx.eat('-') {
            return Ok(-self.unary(lx)?);
        }
        if lx.eat('+') {
            return self.unary(lx);
        }
        self.power(lx)
    }

    fn power(&self, lx: &mut Lexer) -> Result<RingElem, ParseError> {
        let base = self.atom(lx)?;
        if !lx.eat('^') {
            return Ok(base);
        }
        match lx.next() {
            (Tok::Int(n), off) => {
                let e: i64 = n
                    .try_into()
                    .map_err(|_| syntax(off, "exponent too large"))?;
                if e > u32::MAX as i64 {
                    return Err(syntax(off, "exponent too large"));
                }
                Ok(base.pow(e))
            }
            (_, off) => Err(syntax(
                off,
                "exponent must be a nonnegative integer literal (write inverses as 1/x)",
            )),
        }
    }

    fn atom(&self, lx: &mut Lexer) -> Result<RingElem, ParseError> {
        match lx.next() {
            (Tok::Int(n), _) => Ok(self.spec.integer(n)),
            (Tok::Ident(name), offset) => match self.spec.ring().var_index(&name) {
                Some(i) => Ok(self.spec.var_at(i)),
                None => Err(ParseError::UnknownVariable { name, offset }),
            },
            (Tok::Sym('('), _) => {
                let e = self.expr(lx)?;
                lx.expect(')')?;
                Ok(e)
            }
            (Tok::End, off) => Err(syntax(off, "unexpected end of input")),
            (Tok::Sym(c), off) => Err(syntax(off, format!("unexpected '{c}'"))),
        }
    }
}

/// Parse an element of the fraction field of `spec`'s polynomial ring.
pub fn parse_elem(text: &str, spec: &RingSpec) -> Result<RingElem, ParseError> {
    let mut lx = Lexer::new(text)?;
    let e = ExprParser { spec }.expr(&mut lx)?;
    lx.expect_end()?;
    Ok(e)
}

/// Parse `[[a,b],[c,d]]`.
pub fn parse_matrix(text: &str, spec: &RingSpec) -> Result<Mat2, ParseError> {
    let mut lx = Lexer::new(text)?;
    let p = ExprParser { spec };
    let mut es = Vec::with_capacity(4);
    lx.expect('[')?;
    for row in 0..2 {
        if row == 1 {
            lx.expect(',')?;
        }
        lx.expect('[')?;
        es.push(p.expr(&mut lx)?);
        lx.expect(',')?;
        es.push(p.expr(&mut lx)?);
        lx.expect(']')?;
    }
    lx.expect(']')?;
    lx.expect_end()?;
    let mut it = es.into_iter();
    let mut n = || it.next().unwrap();
    Ok(Mat2::new(n(), n(), n(), n()))
}

/// Parse `base ('[' var (',' var)* ']')? ('loc' '(' expr (',' expr)* ')')?`.
pub fn parse_ring_spec(text: &str) -> Result<RingSpec, ParseError> {
    let mut lx = Lexer::new(text)?;
    let base = match lx.next() {
        (Tok::Ident(b), _) if b == "Z" => Base::Integers,
        (Tok::Ident(b), _) if b.starts_with('F') && b.len() > 1 && b[1..].bytes().all(|c| c.is_ascii_digit()) => {
            let q: u64 = b[1..].parse().map_err(|_| ParseError::UnsupportedBase(b.clone()))?;
            if !crate::ring::is_prime_u64(q) {
                return Err(ParseError::UnsupportedBase(b));
            }
            Base::PrimeField(q)
        }
        (Tok::Ident(b), _) => return Err(ParseError::UnsupportedBase(b)),
        (_, off) => return Err(syntax(off, "expected a base ring (Z or F<p>)")),
    };
    let mut vars = Vec::new();
    if lx.eat('[') {
        loop {
            match lx.next() {
                (Tok::Ident(v), off) => {
                    if v == "loc" || vars.contains(&v) {
                        return Err(syntax(off, format!("invalid or repeated variable '{v}'")));
                    }
                    vars.push(v)
                }
                (_, off) => return Err(syntax(off, "expected a variable name")),
            }
            if lx.eat(']') {
                break;
            }
            lx.expect(',')?;
        }
    }
    let spec = RingSpec::new(base, vars, Vec::new())?;
    let mut inverted = Vec::new();
    if let Tok::Ident(w) = lx.peek() {
        if w != "loc" {
            return Err(syntax(lx.offset(), "expected 'loc'"));
        }
        lx.next();
        lx.expect('(')?;
        let p = ExprParser { spec: &spec };
        loop {
            let offset = lx.offset();
            let e = p.expr(&mut lx)?;
            if e.is_zero() {
                return Err(ParseError::ZeroInverted { offset });
            }
            inverted.push(e);
            if lx.eat(')') {
                break;
            }
            lx.expect(',')?;
        }
    }
    lx.expect_end()?;
    Ok(spec.localize(inverted)?)
}
