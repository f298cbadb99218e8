//! Exact scalars for period matrices.
//!
//! The tower holds rationals, quadratic irrationals `a + b·√d`, and rational
//! functions `p(L_b)/q(L_b)` of a Liouville constant `L_b = Σ_{k≥1} b^{-k!}`.
//! Affine values `a + s·L_b` get their own variant since period matrices may
//! only hold those. Arithmetic is closed only inside one sub-tower (plus
//! rationals); anything
//! else is refused with [`ScalarError::IncompatibleTower`] so every verdict
//! built on top stays exact.

mod complex;
mod interval;
mod parse;
mod ratfunc;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use complex::ComplexExact;
pub use interval::{log10_abs, rational_to_f64, Interval};
pub use parse::parse_scalar;

/// Deepest Liouville partial sum ever formed. `b^{-(K+1)!}` at `K = 6`
/// already has 5040 base-`b` digits.
pub const LIOUVILLE_MAX_TERMS: u32 = 6;

/// Extra refinement rounds granted to quadratic enclosures when the nearest
/// integer is not yet decided at the requested depth.
const QUADRATIC_EXTRA_BITS: u64 = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScalarError {
    #[error("incompatible tower: cannot combine {0} with {1} exactly")]
    IncompatibleTower(String, String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid radicand {0}: must be an integer >= 2")]
    InvalidRadicand(u64),
    #[error("invalid Liouville base {0}: must be >= 2")]
    InvalidBase(u32),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

/// Which sub-tower a scalar lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tower {
    Rational,
    Quadratic(u64),
    Liouville(u32),
}

impl Tower {
    fn join(self, other: Tower) -> Option<Tower> {
        match (self, other) {
            (Tower::Rational, t) | (t, Tower::Rational) => Some(t),
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tower::Rational => write!(f, "Q"),
            Tower::Quadratic(d) => write!(f, "Q(sqrt({d}))"),
            Tower::Liouville(b) => write!(f, "Q + Q*liouville({b})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactScalar {
    Rational(BigRational),
    /// `rational + coeff·√radicand`, `coeff != 0`, radicand squarefree and `>= 2`.
    Quadratic { rational: BigRational, coeff: BigRational, radicand: u64 },
    /// `offset + scale·L_base`, `scale != 0`.
    Liouville { offset: BigRational, scale: BigRational, base: u32 },
    /// `numer(L_base)/denom(L_base)` in lowest terms, `denom` monic, not affine.
    /// Coefficients run from degree 0 upwards.
    LiouvilleRatio { numer: Vec<BigRational>, denom: Vec<BigRational>, base: u32 },
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn is_squarefree(d: u64) -> bool {
    let mut p = 2u64;
    while p * p <= d {
        if d % (p * p) == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// Splits `d = s²·d'` with `d'` squarefree.
fn square_part(d: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut rest = d;
    let mut p = 2u64;
    while p * p <= rest {
        while rest % (p * p) == 0 {
            rest /= p * p;
            s *= p;
        }
        p += 1;
    }
    (s, rest)
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        ExactScalar::Rational(BigRational::one())
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        ExactScalar::Rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(p: i64, q: i64) -> Self {
        ExactScalar::Rational(rat(p, q))
    }

    pub fn from_rational(r: BigRational) -> Self {
        ExactScalar::Rational(r)
    }

    /// `a + b·√d`. Non-squarefree radicands are normalized (`√8 = 2√2`);
    /// perfect squares collapse to a rational.
    pub fn quadratic(a: BigRational, b: BigRational, d: u64) -> Result<Self, ScalarError> {
        if d < 2 {
            return Err(ScalarError::InvalidRadicand(d));
        }
        let (s, d) = square_part(d);
        let b = b * BigRational::from_integer(BigInt::from(s));
        if d == 1 {
            return Ok(ExactScalar::Rational(a + b));
        }
        debug_assert!(is_squarefree(d));
        Ok(Self::from_parts(Tower::Quadratic(d), a, b))
    }

    pub fn sqrt(d: u64) -> Result<Self, ScalarError> {
        Self::quadratic(BigRational::zero(), BigRational::one(), d)
    }

    /// The Liouville constant `Σ_{k≥1} base^{-k!}` itself.
    pub fn liouville(base: u32) -> Result<Self, ScalarError> {
        Self::liouville_affine(BigRational::zero(), BigRational::one(), base)
    }

    pub fn liouville_affine(
        offset: BigRational,
        scale: BigRational,
        base: u32,
    ) -> Result<Self, ScalarError> {
        if base < 2 {
            return Err(ScalarError::InvalidBase(base));
        }
        Ok(Self::from_parts(Tower::Liouville(base), offset, scale))
    }

    pub fn tower(&self) -> Tower {
        match self {
            ExactScalar::Rational(_) => Tower::Rational,
            ExactScalar::Quadratic { radicand, .. } => Tower::Quadratic(*radicand),
            ExactScalar::Liouville { base, .. } | ExactScalar::LiouvilleRatio { base, .. } => {
                Tower::Liouville(*base)
            }
        }
    }

    /// False only for non-affine Liouville rational functions.
    pub fn is_affine(&self) -> bool {
        !matches!(self, ExactScalar::LiouvilleRatio { .. })
    }

    /// `(rational part, irrational coefficient)`; the coefficient is zero for rationals.
    ///
    /// # Panics
    /// On a non-affine value; see [`ExactScalar::is_affine`].
    pub fn parts(&self) -> (BigRational, BigRational) {
        match self {
            ExactScalar::Rational(r) => (r.clone(), BigRational::zero()),
            ExactScalar::Quadratic { rational, coeff, .. } => (rational.clone(), coeff.clone()),
            ExactScalar::Liouville { offset, scale, .. } => (offset.clone(), scale.clone()),
            ExactScalar::LiouvilleRatio { .. } => panic!("parts() of a non-affine Liouville value"),
        }
    }

    /// `(numerator, denominator)` polynomials in `L_b`; rationals give constants.
    fn fraction(&self) -> (Vec<BigRational>, Vec<BigRational>) {
        let one = vec![BigRational::one()];
        match self {
            ExactScalar::LiouvilleRatio { numer, denom, .. } => (numer.clone(), denom.clone()),
            ExactScalar::Quadratic { .. } => panic!("fraction() of a quadratic value"),
            _ => {
                let (a, b) = self.parts();
                (ratfunc::trim(vec![a, b]), one)
            }
        }
    }

    fn from_fraction(base: u32, p: Vec<BigRational>, q: Vec<BigRational>) -> ExactScalar {
        let (p, q) = ratfunc::reduce(p, q);
        if q.len() == 1 && p.len() <= 2 {
            let mut p = p.into_iter();
            let a = p.next().unwrap_or_else(BigRational::zero);
            let b = p.next().unwrap_or_else(BigRational::zero);
            return Self::from_parts(Tower::Liouville(base), a, b);
        }
        ExactScalar::LiouvilleRatio { numer: p, denom: q, base }
    }

    pub fn from_parts(tower: Tower, a: BigRational, b: BigRational) -> Self {
        if b.is_zero() {
            return ExactScalar::Rational(a);
        }
        match tower {
            Tower::Rational => panic!("nonzero irrational coefficient in the rational tower"),
            Tower::Quadratic(d) => ExactScalar::Quadratic { rational: a, coeff: b, radicand: d },
            Tower::Liouville(base) => ExactScalar::Liouville { offset: a, scale: b, base },
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExactScalar::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ExactScalar::Rational(_))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExactScalar::Rational(r) if r.is_zero())
    }

    fn incompatible(&self, other: &ExactScalar) -> ScalarError {
        ScalarError::IncompatibleTower(self.tower().to_string(), other.tower().to_string())
    }

    pub fn add(&self, other: &ExactScalar) -> Result<ExactScalar, ScalarError> {
        let tower = self.tower().join(other.tower()).ok_or_else(|| self.incompatible(other))?;
        if let (Tower::Liouville(base), false) = (tower, self.is_affine() && other.is_affine()) {
            let (p1, q1) = self.fraction();
            let (p2, q2) = other.fraction();
            let numer = ratfunc::add(&ratfunc::mul(&p1, &q2), &ratfunc::mul(&p2, &q1));
            return Ok(Self::from_fraction(base, numer, ratfunc::mul(&q1, &q2)));
        }
        let (a, b) = self.parts();
        let (c, d) = other.parts();
        Ok(Self::from_parts(tower, a + c, b + d))
    }

    pub fn sub(&self, other: &ExactScalar) -> Result<ExactScalar, ScalarError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ExactScalar {
        self.scale(&-BigRational::one())
    }

    pub fn scale(&self, r: &BigRational) -> ExactScalar {
        if let ExactScalar::LiouvilleRatio { numer, denom, base } = self {
            if r.is_zero() {
                return ExactScalar::zero();
            }
            return ExactScalar::LiouvilleRatio { numer: ratfunc::scale(numer, r), denom: denom.clone(), base: *base };
        }
        let (a, b) = self.parts();
        Self::from_parts(self.tower(), a * r, b * r)
    }

    pub fn mul(&self, other: &ExactScalar) -> Result<ExactScalar, ScalarError> {
        match (self, other) {
            (ExactScalar::Rational(r), x) | (x, ExactScalar::Rational(r)) => Ok(x.scale(r)),
            (
                ExactScalar::Quadratic { rational: a, coeff: b, radicand: d },
                ExactScalar::Quadratic { rational: c, coeff: e, radicand: d2 },
            ) if d == d2 => {
                let dd = BigRational::from_integer(BigInt::from(*d));
                Ok(Self::from_parts(Tower::Quadratic(*d), a * c + b * e * dd, a * e + b * c))
            }
            _ => match self.tower().join(other.tower()) {
                Some(Tower::Liouville(base)) => {
                    let (p1, q1) = self.fraction();
                    let (p2, q2) = other.fraction();
                    Ok(Self::from_fraction(base, ratfunc::mul(&p1, &p2), ratfunc::mul(&q1, &q2)))
                }
                _ => Err(self.incompatible(other)),
            },
        }
    }

    pub fn div(&self, other: &ExactScalar) -> Result<ExactScalar, ScalarError> {
        if other.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        match other {
            ExactScalar::Rational(r) => Ok(self.scale(&r.recip())),
            ExactScalar::Quadratic { rational: c, coeff: e, radicand: d } => {
                let dd = BigRational::from_integer(BigInt::from(*d));
                let norm = c * c - e * e * dd;
                let conj = Self::from_parts(Tower::Quadratic(*d), c.clone(), -e.clone());
                Ok(self.mul(&conj)?.scale(&norm.recip()))
            }
            ExactScalar::Liouville { base, .. } | ExactScalar::LiouvilleRatio { base, .. } => {
                if self.tower().join(other.tower()).is_none() {
                    return Err(self.incompatible(other));
                }
                let (p1, q1) = self.fraction();
                let (p2, q2) = other.fraction();
                Ok(Self::from_fraction(*base, ratfunc::mul(&p1, &q2), ratfunc::mul(&q1, &p2)))
            }
        }
    }

    /// Exact integrality. Total: every irrational variant is provably irrational.
    pub fn is_integer(&self) -> bool {
        match self {
            ExactScalar::Rational(r) => r.is_integer(),
            _ => false,
        }
    }

    /// Certified enclosure of the value. `precision` is a bit count for
    /// quadratic entries and a partial-sum length for Liouville entries
    /// (clamped to [`LIOUVILLE_MAX_TERMS`]).
    pub fn enclose(&self, precision: u64) -> Interval {
        match self {
            ExactScalar::Rational(r) => Interval::point(r.clone()),
            ExactScalar::Quadratic { rational, coeff, radicand } => {
                let root = sqrt_enclosure(*radicand, precision + coeff_bits(coeff));
                root.scale(coeff).shift(rational)
            }
            ExactScalar::Liouville { offset, scale, base } => {
                let terms = precision.clamp(1, LIOUVILLE_MAX_TERMS as u64) as u32;
                liouville_enclosure(*base, terms).scale(scale).shift(offset)
            }
            ExactScalar::LiouvilleRatio { numer, denom, base } => {
                // q(L) != 0 since L is transcendental, so enough terms always separate it from 0
                let mut terms = precision.clamp(1, LIOUVILLE_MAX_TERMS as u64) as u32;
                loop {
                    let q = ratfunc::enclose(denom, *base, terms);
                    if let Some(inv) = q.recip() {
                        return ratfunc::enclose(numer, *base, terms).mul(&inv);
                    }
                    assert!(terms < LIOUVILLE_MAX_TERMS + 1, "denominator not separated from zero: {self}");
                    terms += 1;
                }
            }
        }
    }

    /// Enclosure of width roughly `2^-bits` (relative to the magnitude for
    /// Liouville rational functions), with dyadic endpoints.
    pub fn enclose_bits(&self, bits: u64) -> Interval {
        let precision = match self {
            ExactScalar::Rational(r) => return Interval::point(r.clone()),
            ExactScalar::Quadratic { .. } => bits + 2,
            ExactScalar::Liouville { base, .. } | ExactScalar::LiouvilleRatio { base, .. } => {
                // smallest K whose tail b^{-(K+1)!} is below 2^{-bits}, with slack
                let per_digit = (*base as f64).log2();
                (1..LIOUVILLE_MAX_TERMS)
                    .find(|&k| factorial(k + 1) as f64 * per_digit >= (bits + 16) as f64 * 2.0)
                    .unwrap_or(LIOUVILLE_MAX_TERMS) as u64
            }
        };
        self.enclose(precision).round_outward(bits + 2)
    }

    /// Nearest integer `eta` (ties to even) and a certified interval for
    /// `|self - eta|`.
    ///
    /// Width is `<= 2^-depth` for quadratic entries and
    /// `<= |scale|·2·b^{-(K+1)!}` with `K = min(depth, LIOUVILLE_MAX_TERMS)`
    /// for Liouville entries; rationals give a point interval.
    pub fn nearest_integer_gap(&self, depth: u32) -> (BigInt, Interval) {
        match self {
            ExactScalar::Rational(r) => {
                let eta = round_half_even(r);
                let gap = (r - BigRational::from_integer(eta.clone())).abs();
                (eta, Interval::point(gap))
            }
            ExactScalar::Quadratic { .. } => {
                let mut bits = depth as u64;
                let limit = depth as u64 + QUADRATIC_EXTRA_BITS;
                loop {
                    let enc = self.enclose(bits);
                    if let Some(eta) = decided_nearest(&enc) {
                        return (eta.clone(), gap_interval(&enc, &eta));
                    }
                    if bits >= limit {
                        let eta = round_half_even(&enc.midpoint());
                        return (eta.clone(), gap_interval(&enc, &eta));
                    }
                    bits += 16;
                }
            }
            ExactScalar::Liouville { .. } | ExactScalar::LiouvilleRatio { .. } => {
                let want = (depth.max(1)).min(LIOUVILLE_MAX_TERMS) as u64;
                let mut terms = 1u64;
                loop {
                    let enc = self.enclose(terms);
                    let decided = decided_nearest(&enc);
                    if terms >= want {
                        if let Some(eta) = decided {
                            return (eta.clone(), gap_interval(&enc, &eta));
                        }
                    }
                    if terms >= LIOUVILLE_MAX_TERMS as u64 {
                        let eta = decided.unwrap_or_else(|| round_half_even(&enc.midpoint()));
                        return (eta.clone(), gap_interval(&enc, &eta));
                    }
                    terms += 1;
                }
            }
        }
    }

    /// For irrational values: an integer `n` and an enclosure strictly inside
    /// `(n, n + 1)`, i.e. a certificate of non-integrality from finite data.
    pub fn integrality_certificate(&self) -> Option<(BigInt, Interval)> {
        if self.is_rational() {
            return None;
        }
        let max_precision = match self {
            ExactScalar::Quadratic { .. } => 512,
            _ => LIOUVILLE_MAX_TERMS as u64,
        };
        let mut p = 1;
        while p <= max_precision {
            let enc = self.enclose(p);
            let n = enc.lo().floor().to_integer();
            let n_r = BigRational::from_integer(n.clone());
            if enc.lo() > &n_r && enc.hi() < &(n_r + BigRational::one()) {
                return Some((n, enc));
            }
            p = if p < 8 { p + 1 } else { p * 2 };
        }
        None
    }

    /// Approximate value, for reports and heuristics only.
    pub fn approx(&self) -> f64 {
        match self {
            ExactScalar::Rational(r) => rational_to_f64(r),
            _ => rational_to_f64(&self.enclose_bits(64).midpoint()),
        }
    }
}

fn coeff_bits(c: &BigRational) -> u64 {
    c.abs().ceil().to_integer().bits() + 1
}

pub(crate) fn round_half_even(r: &BigRational) -> BigInt {
    let fl = r.floor();
    let frac = r - &fl;
    let half = rat(1, 2);
    let fl = fl.to_integer();
    if frac < half {
        fl
    } else if frac > half {
        fl + 1
    } else if fl.is_even() {
        fl
    } else {
        fl + 1
    }
}

/// Nearest integer if the enclosure contains no half-integer.
fn decided_nearest(enc: &Interval) -> Option<BigInt> {
    let half = rat(1, 2);
    let eta = (enc.lo() + &half).floor().to_integer();
    let upper_half = BigRational::from_integer(eta.clone()) + &half;
    let lower_half = BigRational::from_integer(eta.clone()) - &half;
    if enc.hi() < &upper_half && enc.lo() > &lower_half {
        Some(eta)
    } else {
        None
    }
}

fn gap_interval(enc: &Interval, eta: &BigInt) -> Interval {
    enc.shift(&-BigRational::from_integer(eta.clone())).abs()
}

/// `√d` inside an interval of width `2^-bits`.
pub(crate) fn sqrt_enclosure(d: u64, bits: u64) -> Interval {
    let scaled = BigInt::from(d) << (2 * bits);
    let root = scaled.sqrt();
    let denom = BigInt::one() << bits;
    let lo = BigRational::new(root.clone(), denom.clone());
    let hi = BigRational::new(root + 1, denom);
    Interval::new(lo, hi)
}

/// Partial sum `Σ_{k=1}^{terms} b^{-k!}`.
pub fn liouville_partial_sum(base: u32, terms: u32) -> BigRational {
    let b = BigInt::from(base);
    let top = factorial(terms);
    let denom = num_traits::pow(b.clone(), top as usize);
    let mut numer = BigInt::zero();
    for k in 1..=terms {
        let e = top - factorial(k);
        numer += num_traits::pow(b.clone(), e as usize);
    }
    BigRational::new(numer, denom)
}

/// Bounds on the tail `Σ_{k>terms} b^{-k!}`: `[b^{-(terms+1)!}, 2·b^{-(terms+1)!}]`.
pub fn liouville_tail_bounds(base: u32, terms: u32) -> Interval {
    let e = factorial(terms + 1);
    let unit = BigRational::new(BigInt::one(), num_traits::pow(BigInt::from(base), e as usize));
    Interval::new(unit.clone(), unit * BigRational::from_integer(BigInt::from(2)))
}

pub(crate) fn liouville_enclosure(base: u32, terms: u32) -> Interval {
    liouville_tail_bounds(base, terms).shift(&liouville_partial_sum(base, terms))
}

pub(crate) fn factorial(n: u32) -> u64 {
    (1..=n as u64).product()
}

/// `c0+c1*liouville(b)+c2*liouville(b)^2...`, skipping zero coefficients.
fn write_poly(f: &mut fmt::Formatter<'_>, p: &[BigRational], base: u32) -> fmt::Result {
    let mut first = true;
    for (k, c) in p.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
        let mag = c.abs();
        let atom = match k {
            0 => String::new(),
            1 => format!("liouville({base})"),
            _ => format!("liouville({base})^{k}"),
        };
        match (k, mag.is_one()) {
            (0, _) => write!(f, "{sign}{mag}")?,
            (_, true) => write!(f, "{sign}{atom}")?,
            (_, false) => write!(f, "{sign}{mag}*{atom}")?,
        }
        first = false;
    }
    Ok(())
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let ExactScalar::LiouvilleRatio { numer, denom, base } = self {
            if denom.len() == 1 {
                return write_poly(f, numer, *base);
            }
            write!(f, "(")?;
            write_poly(f, numer, *base)?;
            write!(f, ")/(")?;
            write_poly(f, denom, *base)?;
            return write!(f, ")");
        }
        let (a, b) = self.parts();
        let atom = match self {
            ExactScalar::Rational(_) => return write!(f, "{a}"),
            ExactScalar::Quadratic { radicand, .. } => format!("sqrt({radicand})"),
            ExactScalar::Liouville { base, .. } => format!("liouville({base})"),
            ExactScalar::LiouvilleRatio { .. } => unreachable!(),
        };
        let lead = !a.is_zero();
        if lead {
            write!(f, "{a}")?;
        }
        let sign = if b.is_negative() { "-" } else if lead { "+" } else { "" };
        let mag = b.abs();
        if mag.is_one() {
            write!(f, "{sign}{atom}")
        } else {
            write!(f, "{sign}{mag}*{atom}")
        }
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar::from_int(n)
    }
}

impl std::str::FromStr for ExactScalar {
    type Err = ScalarError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_scalar(s)
    }
}
