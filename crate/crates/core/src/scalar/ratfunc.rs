//! Rational functions over `Q` evaluated at a Liouville constant.
//!
//! Polynomials are coefficient vectors, lowest degree first, with no trailing
//! zeros. Because `L_b` is transcendental, `p(L_b) = 0` only for `p = 0`, so
//! reduced fractions `p/q` with monic `q` are a canonical form for `Q(L_b)`.

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::interval::Interval;
use super::{liouville_partial_sum, liouville_tail_bounds};

pub(crate) type Poly = Vec<BigRational>;

pub(crate) fn trim(mut p: Poly) -> Poly {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    p
}

pub(crate) fn add(a: &[BigRational], b: &[BigRational]) -> Poly {
    let n = a.len().max(b.len());
    let zero = BigRational::zero();
    trim((0..n).map(|i| a.get(i).unwrap_or(&zero) + b.get(i).unwrap_or(&zero)).collect())
}

pub(crate) fn scale(a: &[BigRational], r: &BigRational) -> Poly {
    trim(a.iter().map(|c| c * r).collect())
}

pub(crate) fn mul(a: &[BigRational], b: &[BigRational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(out)
}

/// Remainder of `a` modulo nonzero `b`.
fn rem(a: &[BigRational], b: &[BigRational]) -> Poly {
    let mut r = a.to_vec();
    let lead = b.last().expect("nonzero divisor");
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let t = r.last().unwrap() / lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &t * c;
        }
        r.pop();
        r = trim(r);
    }
    r
}

/// Exact quotient `a / b`; `b` must divide `a`.
fn quo(a: &[BigRational], b: &[BigRational]) -> Poly {
    let mut r = a.to_vec();
    let lead = b.last().expect("nonzero divisor");
    let mut q = vec![BigRational::zero(); (a.len() + 1).saturating_sub(b.len())];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let t = r.last().unwrap() / lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &t * c;
        }
        q[shift] = t;
        r.pop();
        r = trim(r);
    }
    trim(q)
}

fn monic(p: &[BigRational]) -> Poly {
    match p.last() {
        Some(lead) => scale(p, &lead.recip()),
        None => Vec::new(),
    }
}

fn gcd(a: &[BigRational], b: &[BigRational]) -> Poly {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b);
        a = b;
        b = r;
    }
    monic(&a)
}

/// Reduces `p/q` to lowest terms with monic denominator. `q` must be nonzero.
pub(crate) fn reduce(p: Poly, q: Poly) -> (Poly, Poly) {
    if p.is_empty() {
        return (Vec::new(), vec![BigRational::one()]);
    }
    let g = gcd(&p, &q);
    let (p, q) = if g.len() > 1 { (quo(&p, &g), quo(&q, &g)) } else { (p, q) };
    let lead = q.last().unwrap().recip();
    (scale(&p, &lead), scale(&q, &lead))
}

/// Coefficients of `p(s + t)` as a polynomial in `t`.
fn taylor_shift(p: &[BigRational], s: &BigRational) -> Poly {
    let mut out: Poly = Vec::new();
    for c in p.iter().rev() {
        out = add(&mul(&out, &[s.clone(), BigRational::one()]), &[c.clone()]);
    }
    out
}

/// Enclosure of `p(L_b)` from the partial sum of length `terms`: expanding
/// around the partial sum keeps the width proportional to the tail.
pub(crate) fn enclose(p: &[BigRational], base: u32, terms: u32) -> Interval {
    let s = liouville_partial_sum(base, terms);
    let tail = liouville_tail_bounds(base, terms);
    let mut power = Interval::point(BigRational::one());
    let mut acc = Interval::zero();
    for c in taylor_shift(p, &s) {
        acc = acc.add(&power.scale(&c));
        power = power.mul(&tail);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(v: &[i64]) -> Poly {
        trim(v.iter().map(|&x| BigRational::from_integer(x.into())).collect())
    }

    #[test]
    fn reduces_common_factor() {
        // (x² - 1) / (2x - 2) = (x + 1)/2 → numerator (1/2)(x+1), denominator 1
        let (n, d) = reduce(p(&[-1, 0, 1]), p(&[-2, 2]));
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(n, vec![half.clone(), half]);
        assert_eq!(d, p(&[1]));
    }

    #[test]
    fn shift_matches_expansion() {
        // (2 + t)² = 4 + 4t + t²
        assert_eq!(taylor_shift(&p(&[0, 0, 1]), &BigRational::from_integer(2.into())), p(&[4, 4, 1]));
    }
}
