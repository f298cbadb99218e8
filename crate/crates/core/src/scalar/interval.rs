use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Closed interval with exact rational endpoints, `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(BigRational::zero())
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn shift(&self, by: &BigRational) -> Interval {
        Interval { lo: &self.lo + by, hi: &self.hi + by }
    }

    pub fn scale(&self, by: &BigRational) -> Interval {
        let a = &self.lo * by;
        let b = &self.hi * by;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }

    /// `1/x` over the interval, or `None` if it contains zero.
    pub fn recip(&self) -> Option<Interval> {
        if self.contains(&BigRational::zero()) {
            return None;
        }
        Some(Interval { lo: self.hi.recip(), hi: self.lo.recip() })
    }

    /// Widens to endpoints with denominator `2^bits`.
    pub fn round_outward(&self, bits: u64) -> Interval {
        let unit = BigRational::from_integer(BigInt::from(1) << bits);
        let lo = (&self.lo * &unit).floor() / &unit;
        let hi = (&self.hi * &unit).ceil() / &unit;
        Interval { lo, hi }
    }

    pub fn square(&self) -> Interval {
        let a = self.abs();
        Interval { lo: &a.lo * &a.lo, hi: &a.hi * &a.hi }
    }

    /// `{|x| : x in self}`.
    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            Interval { lo: -&self.hi, hi: -&self.lo }
        } else {
            let hi = if self.hi > -&self.lo { self.hi.clone() } else { -&self.lo };
            Interval { lo: BigRational::zero(), hi }
        }
    }

    /// Componentwise max of two intervals: encloses `max(x, y)`.
    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: std::cmp::max(&self.lo, &other.lo).clone(),
            hi: std::cmp::max(&self.hi, &other.hi).clone(),
        }
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn lo_f64(&self) -> f64 {
        rational_to_f64(&self.lo)
    }

    pub fn hi_f64(&self) -> f64 {
        rational_to_f64(&self.hi)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Nearest-float conversion that survives numerators and denominators far
/// beyond the `f64` exponent range (Liouville partial sums have thousands of digits).
pub fn rational_to_f64(x: &BigRational) -> f64 {
    if let Some(v) = x.to_f64() {
        if v.is_finite() && (v != 0.0 || x.is_zero()) {
            return v;
        }
    }
    let log10 = log10_abs(x);
    let sign = if x.is_negative() { -1.0 } else { 1.0 };
    sign * 10f64.powf(log10)
}

/// `log10 |x|` for nonzero `x`; `-inf` for zero.
pub fn log10_abs(x: &BigRational) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    log10_int(x.numer()) - log10_int(x.denom())
}

fn log10_int(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.abs().to_f64().unwrap().log10();
    }
    let shift = bits - 64;
    let top = (x.abs() >> shift).to_f64().unwrap();
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}
