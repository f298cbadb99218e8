use std::fmt;

use num_rational::BigRational;

use super::{ExactScalar, ScalarError};

/// `re + i·im` with both parts in the exact tower.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ComplexExact {
    pub re: ExactScalar,
    pub im: ExactScalar,
}

impl ComplexExact {
    pub fn new(re: ExactScalar, im: ExactScalar) -> Self {
        ComplexExact { re, im }
    }

    pub fn real(re: ExactScalar) -> Self {
        ComplexExact { re, im: ExactScalar::zero() }
    }

    pub fn zero() -> Self {
        Self::real(ExactScalar::zero())
    }

    pub fn one() -> Self {
        Self::real(ExactScalar::one())
    }

    pub fn i() -> Self {
        ComplexExact { re: ExactScalar::zero(), im: ExactScalar::one() }
    }

    pub fn gaussian(re: BigRational, im: BigRational) -> Self {
        ComplexExact { re: ExactScalar::Rational(re), im: ExactScalar::Rational(im) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// Both parts rational.
    pub fn is_gaussian_rational(&self) -> bool {
        self.re.is_rational() && self.im.is_rational()
    }

    pub fn add(&self, other: &ComplexExact) -> Result<ComplexExact, ScalarError> {
        Ok(ComplexExact { re: self.re.add(&other.re)?, im: self.im.add(&other.im)? })
    }

    pub fn sub(&self, other: &ComplexExact) -> Result<ComplexExact, ScalarError> {
        Ok(ComplexExact { re: self.re.sub(&other.re)?, im: self.im.sub(&other.im)? })
    }

    pub fn neg(&self) -> ComplexExact {
        ComplexExact { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn conj(&self) -> ComplexExact {
        ComplexExact { re: self.re.clone(), im: self.im.neg() }
    }

    /// Multiplication by `i`.
    pub fn times_i(&self) -> ComplexExact {
        ComplexExact { re: self.im.neg(), im: self.re.clone() }
    }

    pub fn scale(&self, r: &BigRational) -> ComplexExact {
        ComplexExact { re: self.re.scale(r), im: self.im.scale(r) }
    }

    pub fn mul(&self, other: &ComplexExact) -> Result<ComplexExact, ScalarError> {
        // skip products with a zero factor so real·Liouville stays in-tower
        let prod = |a: &ExactScalar, b: &ExactScalar| -> Result<ExactScalar, ScalarError> {
            if a.is_zero() || b.is_zero() {
                Ok(ExactScalar::zero())
            } else {
                a.mul(b)
            }
        };
        let re = prod(&self.re, &other.re)?.sub(&prod(&self.im, &other.im)?)?;
        let im = prod(&self.re, &other.im)?.add(&prod(&self.im, &other.re)?)?;
        Ok(ComplexExact { re, im })
    }

    pub fn div(&self, other: &ComplexExact) -> Result<ComplexExact, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if other.im.is_zero() {
            return Ok(ComplexExact { re: self.re.div(&other.re)?, im: self.im.div(&other.re)? });
        }
        if other.re.is_zero() {
            // x / (i·t) = (x.im / t) - i·(x.re / t)
            let t = &other.im;
            return Ok(ComplexExact { re: self.im.div(t)?, im: self.re.div(t)?.neg() });
        }
        let n = other.norm_sq()?;
        let num = self.mul(&other.conj())?;
        Ok(ComplexExact { re: num.re.div(&n)?, im: num.im.div(&n)? })
    }

    /// `re² + im²`.
    pub fn norm_sq(&self) -> Result<ExactScalar, ScalarError> {
        let sq = |a: &ExactScalar| if a.is_zero() { Ok(ExactScalar::zero()) } else { a.mul(a) };
        sq(&self.re)?.add(&sq(&self.im)?)
    }
}

impl fmt::Display for ComplexExact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "({}) + i*({})", self.re, self.im)
        }
    }
}

impl From<ExactScalar> for ComplexExact {
    fn from(re: ExactScalar) -> Self {
        ComplexExact::real(re)
    }
}
