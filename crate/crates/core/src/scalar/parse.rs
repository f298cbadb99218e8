//! Text encoding of scalars: `p/q`, `p/q+r/s*sqrt(d)`, `liouville(b)*p/q`,
//! and sums, products, quotients, integer powers and negations of those.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{ExactScalar, ScalarError};

const MAX_POWER: u32 = 64;

pub fn parse_scalar(text: &str) -> Result<ExactScalar, ScalarError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.skip_ws();
    if p.at_end() {
        return Err(p.error("empty scalar"));
    }
    let value = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(p.error(&format!("unexpected '{}'", p.peek().unwrap() as char)));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: &str) -> ScalarError {
        ScalarError::Parse { column: self.pos + 1, message: message.to_string() }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ScalarError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<ExactScalar, ScalarError> {
        let mut acc = if self.eat(b'-') {
            self.term()?.neg()
        } else {
            self.eat(b'+');
            self.term()?
        };
        loop {
            let at = self.pos;
            if self.eat(b'+') {
                let t = self.term()?;
                acc = acc.add(&t).map_err(|e| self.at(at, e))?;
            } else if self.eat(b'-') {
                let t = self.term()?;
                acc = acc.sub(&t).map_err(|e| self.at(at, e))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn at(&self, pos: usize, e: ScalarError) -> ScalarError {
        ScalarError::Parse { column: pos + 1, message: e.to_string() }
    }

    fn term(&mut self) -> Result<ExactScalar, ScalarError> {
        let mut acc = self.factor()?;
        loop {
            let at = self.pos;
            if self.eat(b'*') {
                let f = self.factor()?;
                acc = acc.mul(&f).map_err(|e| self.at(at, e))?;
            } else if self.eat(b'/') {
                let f = self.factor()?;
                acc = acc.div(&f).map_err(|e| self.at(at, e))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<ExactScalar, ScalarError> {
        let base = self.atom()?;
        let at = self.pos;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let k = self.integer()?.to_u32().filter(|&k| k <= MAX_POWER).ok_or_else(|| self.error("exponent too large"))?;
        let mut acc = ExactScalar::one();
        for _ in 0..k {
            acc = acc.mul(&base).map_err(|e| self.at(at, e))?;
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<ExactScalar, ScalarError> {
        self.skip_ws();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => Ok(ExactScalar::Rational(BigRational::from_integer(self.integer()?))),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                self.expect(b'(')?;
                self.skip_ws();
                let arg_at = self.pos;
                let arg = self.integer()?;
                self.expect(b')')?;
                match name.as_str() {
                    "sqrt" => {
                        let d = arg.to_u64().ok_or_else(|| self.error("radicand out of range"))?;
                        if d == 0 {
                            return Ok(ExactScalar::zero());
                        }
                        if d == 1 {
                            return Ok(ExactScalar::one());
                        }
                        ExactScalar::sqrt(d).map_err(|e| self.at(arg_at, e))
                    }
                    "liouville" => {
                        let b = arg.to_u32().ok_or_else(|| self.error("base out of range"))?;
                        ExactScalar::liouville(b).map_err(|e| self.at(arg_at, e))
                    }
                    other => Err(ScalarError::Parse {
                        column: start + 1,
                        message: format!("unknown function '{other}'"),
                    }),
                }
            }
            Some(c) => Err(self.error(&format!("unexpected '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ScalarError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(digits.parse().unwrap())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed() {
        for bad in ["1//2", "", "1/", "sqrt(2", "foo(3)", "1/0", "2 3", "liouville(1)", "sqrt(2)+liouville(10)", "2^", "2^99", "1/(liouville(10)-liouville(10))"] {
            assert!(parse_scalar(bad).is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn reports_column() {
        match parse_scalar("1//2") {
            Err(ScalarError::Parse { column, .. }) => assert_eq!(column, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn accepts_documented_shapes() {
        assert_eq!(parse_scalar("4/6").unwrap(), ExactScalar::ratio(2, 3));
        let q = parse_scalar("1/2+3/4*sqrt(2)").unwrap();
        assert_eq!(q.parts(), (BigRational::new(1.into(), 2.into()), BigRational::new(3.into(), 4.into())));
        let l = parse_scalar("liouville(10)*5/3").unwrap();
        assert_eq!(l.parts().1, BigRational::new(5.into(), 3.into()));
        assert_eq!(parse_scalar("liouville(10)*-5").unwrap().parts().1, BigRational::from_integer((-5).into()));
        assert_eq!(parse_scalar("(1+sqrt(2))^2").unwrap(), parse_scalar("3+2*sqrt(2)").unwrap());
        assert_eq!(parse_scalar("-2^2").unwrap(), ExactScalar::from_int(-4));
        let r = parse_scalar("(liouville(10)^2-1)/(liouville(10)+1)").unwrap();
        assert_eq!(r, parse_scalar("liouville(10)-1").unwrap());
    }
}
