//! Text syntax for free-group words.
//!
//! ```text
//! word   := factor { ['*'] factor }
//! factor := atom [ '^' integer ]
//! atom   := 'x' nat | '[' word ',' word ']' | '(' word ')' | 'e'
//! ```
//!
//! Whitespace is ignored. `[a,b]` denotes `a^-1 b^-1 a b`.

use crate::error::{Error, Result};
use crate::free::{FreeWord, Letter};

/// Largest accepted exponent magnitude.
pub const MAX_EXPONENT: i64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordExpr {
    Identity,
    Generator(usize),
    Power(Box<WordExpr>, i64),
    Product(Vec<WordExpr>),
    Commutator(Box<WordExpr>, Box<WordExpr>),
}

impl WordExpr {
    pub fn max_generator(&self) -> usize {
        match self {
            WordExpr::Identity => 0,
            WordExpr::Generator(i) => *i,
            WordExpr::Power(e, _) => e.max_generator(),
            WordExpr::Product(es) => es.iter().map(WordExpr::max_generator).max().unwrap_or(0),
            WordExpr::Commutator(a, b) => a.max_generator().max(b.max_generator()),
        }
    }

    pub fn flatten(&self, rank: usize) -> Result<FreeWord> {
        Ok(match self {
            WordExpr::Identity => FreeWord::identity(rank),
            WordExpr::Generator(i) => {
                if *i > rank {
                    return Err(Error::LetterOutOfRange { index: *i as i64, rank });
                }
                FreeWord::letter(rank, Letter::new(*i, false))?
            }
            WordExpr::Power(e, k) => e.flatten(rank)?.pow(*k),
            WordExpr::Product(es) => {
                let mut acc = FreeWord::identity(rank);
                for e in es {
                    acc = acc.mul(&e.flatten(rank)?)?;
                }
                acc
            }
            WordExpr::Commutator(a, b) => FreeWord::commutator(&a.flatten(rank)?, &b.flatten(rank)?)?,
        })
    }
}

pub fn parse_word(text: &str) -> Result<WordExpr> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let expr = p.word()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(expr)
}

/// Parses and flattens at the given rank.
pub fn parse_in_rank(text: &str, rank: usize) -> Result<FreeWord> {
    parse_word(text)?.flatten(rank)
}

/// Parses and flattens at the smallest rank covering every generator used
/// (at least 1).
pub fn parse_auto(text: &str) -> Result<FreeWord> {
    let expr = parse_word(text)?;
    let rank = expr.max_generator().max(1);
    expr.flatten(rank)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn starts_atom(c: Option<u8>) -> bool {
        matches!(c, Some(b'x' | b'[' | b'(' | b'e'))
    }

    fn word(&mut self) -> Result<WordExpr> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    factors.push(self.factor()?);
                }
                c if Self::starts_atom(c) => factors.push(self.factor()?),
                _ => break,
            }
        }
        Ok(if factors.len() == 1 { factors.pop().unwrap() } else { WordExpr::Product(factors) })
    }

    fn factor(&mut self) -> Result<WordExpr> {
        let atom = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let k = self.integer()?;
            return Ok(WordExpr::Power(Box::new(atom), k));
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<WordExpr> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let start = self.pos;
                let n = self.digits()?;
                if n == 0 {
                    self.pos = start;
                    return Err(self.error("generators are numbered from 1"));
                }
                Ok(WordExpr::Generator(n as usize))
            }
            Some(b'e') => {
                self.pos += 1;
                Ok(WordExpr::Identity)
            }
            Some(b'(') => {
                self.pos += 1;
                let w = self.word()?;
                self.expect(b')')?;
                Ok(w)
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.word()?;
                self.expect(b',')?;
                let b = self.word()?;
                self.expect(b']')?;
                Ok(WordExpr::Commutator(Box::new(a), Box::new(b)))
            }
            Some(_) => Err(self.error("expected generator, 'e', '(' or '['")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> Result<i64> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected a number"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        match text.parse::<i64>() {
            Ok(v) if v <= MAX_EXPONENT => Ok(v),
            _ => {
                self.pos = start;
                Err(self.error("number too large"))
            }
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let neg = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                true
            }
            Some(b'+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        self.skip_ws();
        let v = self.digits()?;
        Ok(if neg { -v } else { v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutator_convention() {
        let w = parse_auto("[x1,x2]").unwrap();
        assert_eq!(w.signed(), vec![-1, -2, 1, 2]);
        assert_eq!(w.rank(), 2);
    }

    #[test]
    fn powers_and_products() {
        assert_eq!(parse_auto("x1^3").unwrap().signed(), vec![1, 1, 1]);
        assert!(parse_auto("x1*x1^-1").unwrap().is_identity());
        assert_eq!(parse_auto("x1 x2 (x1)^-2").unwrap().signed(), vec![1, 2, -1, -1]);
        assert!(parse_auto("e").unwrap().is_identity());
        assert_eq!(parse_auto("[x1,x2]^2").unwrap().len(), 8);
    }

    #[test]
    fn errors_carry_position() {
        match parse_word("x1*?") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_word("[x1 x2]"), Err(Error::Parse { .. })));
        assert!(matches!(parse_word("x0"), Err(Error::Parse { pos: 1, .. })));
        assert!(matches!(parse_word(""), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse_in_rank("x3", 2), Err(Error::LetterOutOfRange { index: 3, rank: 2 })));
    }

    #[test]
    fn canonical_round_trip() {
        for s in ["e", "x1", "x1^-1*x2^3*x1", "x2^-2*x1^2"] {
            let w = parse_in_rank(s, 2).unwrap();
            assert_eq!(w.to_string(), s);
        }
    }
}
