//! Simultaneous Diophantine approximation of the period vectors `v_ℓ`.
//!
//! The structure is *weakly non-simultaneously approximable* when
//! `max_ℓ |ξ·v_ℓ − η_ℓ| >= C |ξ|^{-ρ}` for every `ξ ∉ Γ` and `η ∈ Zⁿ`, and
//! *strongly simultaneously approximable* when some `ξ_ν` with strictly
//! increasing norms keep `|ξ_ν|^ν · max_ℓ |ξ_ν·v_ℓ − η_ν,ℓ|` bounded.
//! Norms of frequencies are sup norms throughout.

mod certifier;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::lattice::{box_points, is_member, PeriodMatrix};
use crate::scalar::{liouville_partial_sum, liouville_tail_bounds, sqrt_enclosure, ComplexExact, ExactScalar, Interval, ScalarError};

pub use certifier::{
    CertifyConfig, DiophantineCertifier, DiophantineRegistry, EmpiricalCertifier, LiouvilleCertifier,
    QuadraticCertifier, RationalCertifier,
};

/// Largest witness depth; `b^{ν!}` has 720 digits at `ν = 6`, `b = 10`.
pub const DEFAULT_WITNESS_DEPTH: u32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiophantineError {
    #[error("period matrix has an irrational or non-real entry")]
    NotRational,
    #[error("expected a real 1-row period matrix with a quadratic irrational entry")]
    NotQuadratic,
    #[error("Liouville base must be at least 2 (got {0})")]
    InvalidBase(u32),
    #[error("corank must be at least 1")]
    EmptyCorank,
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    RationalExact,
    QuadIrrCertified,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::RationalExact => "rational_exact",
            Method::QuadIrrCertified => "quad_irr_certified",
        }
    }
}

/// One term of a strongly-approximable witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessTerm {
    pub nu: u32,
    pub xi: Vec<BigInt>,
    pub eta: Vec<BigInt>,
    /// Certified enclosure of `max_ℓ |ξ·v_ℓ − η_ℓ|`.
    pub gap: Interval,
    /// Certified enclosure of `|ξ|^ν · gap`.
    pub bound: Interval,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DiophantineVerdict {
    WeaklyNonSA { c: BigRational, rho: BigRational, method: Method },
    StronglySA { witness: Vec<WitnessTerm> },
    Empirical { exponent_fit: f64, max_ratio: f64, samples: usize },
    Undecided { reason: String },
}

impl DiophantineVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            DiophantineVerdict::WeaklyNonSA { .. } => "weakly_non_sa",
            DiophantineVerdict::StronglySA { .. } => "strongly_sa",
            DiophantineVerdict::Empirical { .. } => "empirical",
            DiophantineVerdict::Undecided { .. } => "undecided",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproximationRecord {
    pub xi: Vec<BigInt>,
    /// Nearest integers to `ξ·v_ℓ`.
    pub eta: Vec<BigInt>,
    /// Certified enclosure of `max_ℓ dist(ξ·v_ℓ, Z)`.
    pub gap: Interval,
}

pub fn sup_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_default()
}

/// Distance of `ξᵀ·Re A` to the integer lattice, column by column.
pub fn check_condition(a: &PeriodMatrix, xi: &[BigInt], depth: u32) -> ApproximationRecord {
    let mut eta = Vec::with_capacity(a.n());
    let mut gap = Interval::zero();
    for c in a.pair(xi) {
        let (e, g) = c.re.nearest_integer_gap(depth);
        eta.push(e);
        gap = gap.max(&g);
    }
    ApproximationRecord { xi: xi.to_vec(), eta, gap }
}

fn rational_entries(a: &PeriodMatrix) -> Result<Vec<Vec<BigRational>>, DiophantineError> {
    if !a.is_real() {
        return Err(DiophantineError::NotRational);
    }
    a.rational_real_part().ok_or(DiophantineError::NotRational)
}

/// `C = 1/λ`, `ρ = 1` with `λ` the common denominator of `A`.
pub fn rational_verdict(a: &PeriodMatrix) -> Result<DiophantineVerdict, DiophantineError> {
    let rows = rational_entries(a)?;
    let lambda = rows.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    Ok(DiophantineVerdict::WeaklyNonSA {
        c: BigRational::new(BigInt::one(), lambda),
        rho: BigRational::one(),
        method: Method::RationalExact,
    })
}

/// Primitive integer polynomial `c2 x² + c1 x + c0` vanishing at `a + b√d`,
/// with `c2 > 0`.
pub fn quadratic_minimal_polynomial(a: &BigRational, b: &BigRational, d: u64) -> [BigInt; 3] {
    // (x − a)² − b²d
    let d = BigRational::from_integer(BigInt::from(d));
    let coeffs = [a * a - b * b * d, -(a + a), BigRational::one()];
    let den = coeffs.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = coeffs.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect();
    let content = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    [&ints[0] / &content, &ints[1] / &content, &ints[2] / &content]
}

/// Liouville-type lower bound for a quadratic irrational `λ`:
/// `|ξλ − η| >= C/|ξ|` for all `ξ ≠ 0`.
///
/// With `P` the primitive minimal polynomial, `|P(η/ξ)| >= 1/ξ²`, and by the
/// mean value theorem `|P(η/ξ)| <= M |λ − η/ξ|` whenever `|λ − η/ξ| <= 1`,
/// where `M = 2|c2||b|√d + 2|c2|` bounds `|P′|` on that window. Otherwise
/// `|ξλ − η| > 1`. Hence `C = min(1, 1/M)`.
pub fn quadratic_constant(a: &BigRational, b: &BigRational, d: u64) -> BigRational {
    let [_, _, c2] = quadratic_minimal_polynomial(a, b, d);
    let c2 = BigRational::from_integer(c2);
    let root_hi = sqrt_enclosure(d, 32).hi().clone();
    let two = BigRational::from_integer(BigInt::from(2));
    let m = &two * &c2 * b.abs() * root_hi + &two * &c2;
    let c = m.recip();
    if c > BigRational::one() {
        BigRational::one()
    } else {
        c
    }
}

/// Certificate for a single real row containing a quadratic irrational.
///
/// Other columns can only increase `max_ℓ`, so the first quadratic column
/// alone carries the bound.
pub fn quad_irr_verdict(a: &PeriodMatrix) -> Result<DiophantineVerdict, DiophantineError> {
    if a.m() != 1 || !a.is_real() {
        return Err(DiophantineError::NotQuadratic);
    }
    let entry = a.rows()[0]
        .iter()
        .find_map(|c| match &c.re {
            ExactScalar::Quadratic { rational, coeff, radicand } => Some((rational.clone(), coeff.clone(), *radicand)),
            _ => None,
        })
        .ok_or(DiophantineError::NotQuadratic)?;
    Ok(DiophantineVerdict::WeaklyNonSA {
        c: quadratic_constant(&entry.0, &entry.1, entry.2),
        rho: BigRational::one(),
        method: Method::QuadIrrCertified,
    })
}

/// `A = [[L_b]]` padded with zero rows to corank `m`, and the witness
/// `ξ_ν = (b^{ν!}, 0, …)` for `ν = 1..=depth`.
pub fn liouville_witness(b: u32, m: usize, depth: u32) -> Result<(PeriodMatrix, Vec<WitnessTerm>), DiophantineError> {
    if b < 2 {
        return Err(DiophantineError::InvalidBase(b));
    }
    if m == 0 {
        return Err(DiophantineError::EmptyCorank);
    }
    let l = ExactScalar::liouville(b)?;
    let mut rows = vec![vec![ComplexExact::real(l)]];
    rows.extend((1..m).map(|_| vec![ComplexExact::zero()]));
    let a = PeriodMatrix::new(rows).expect("well-formed");
    let witness = liouville_row_witness(&a, 0, depth).expect("row 0 is a Liouville row");
    Ok((a, witness))
}

/// Liouville data of a row whose entries are all `o + s·L_b` with integer
/// `o`, `s` and a common base: `(b, [(o, s)])`.
pub(crate) fn liouville_row(a: &PeriodMatrix, k: usize) -> Option<(u32, Vec<(BigInt, BigInt)>)> {
    if !a.is_real() {
        return None;
    }
    let mut base = None;
    let mut parts = Vec::with_capacity(a.n());
    for c in &a.rows()[k] {
        let (o, s) = match &c.re {
            ExactScalar::Rational(r) => (r.clone(), BigRational::zero()),
            ExactScalar::Liouville { offset, scale, base: b } => {
                if base.is_some_and(|x| x != *b) {
                    return None;
                }
                base = Some(*b);
                (offset.clone(), scale.clone())
            }
            ExactScalar::Quadratic { .. } | ExactScalar::LiouvilleRatio { .. } => return None,
        };
        if !o.is_integer() || !s.is_integer() {
            return None;
        }
        parts.push((o.to_integer(), s.to_integer()));
    }
    Some((base?, parts))
}

/// `ξ_ν = b^{ν!} e_k`: then `ξ_ν·v_ℓ = o_ℓ b^{ν!} + s_ℓ b^{ν!} S_ν + s_ℓ b^{ν!} T_ν`
/// with `S_ν` the partial sum (so the middle term is an integer) and
/// `T_ν ∈ [b^{-(ν+1)!}, 2 b^{-(ν+1)!}]`, giving `|ξ_ν|^ν · gap <= 2 max|s_ℓ|`.
pub fn liouville_row_witness(a: &PeriodMatrix, k: usize, depth: u32) -> Option<Vec<WitnessTerm>> {
    let (b, parts) = liouville_row(a, k)?;
    let mut terms = Vec::new();
    for nu in 1..=depth {
        let scale = BigInt::from(b).pow(crate::scalar::factorial(nu) as u32);
        let scale_r = BigRational::from_integer(scale.clone());
        let partial = liouville_partial_sum(b, nu) * &scale_r;
        debug_assert!(partial.is_integer());
        let tail = liouville_tail_bounds(b, nu).scale(&scale_r);
        let mut eta = Vec::with_capacity(parts.len());
        let mut gap = Interval::zero();
        for (o, s) in &parts {
            eta.push(o * &scale + s * partial.to_integer());
            gap = gap.max(&tail.scale(&BigRational::from_integer(s.clone())).abs());
        }
        let mut xi = vec![BigInt::zero(); a.m()];
        xi[k] = scale.clone();
        let bound = gap.scale(&BigRational::from_integer(scale.pow(nu)));
        terms.push(WitnessTerm { nu, xi, eta, gap, bound });
    }
    Some(terms)
}

/// Numerical exploration over `0 < |ξ|_∞ <= radius`, `ξ ∉ Γ`.
///
/// Records are the `ξ` (in order of increasing sup norm) whose gap is a new
/// strict minimum; `exponent_fit` is the least-squares slope of
/// `log(1/gap)` against `log|ξ|` over them. `max_ratio` is the largest
/// `−log gap / log|ξ|` over every sample with `|ξ| >= 2`.
pub fn empirical_exponent(a: &PeriodMatrix, radius: u32, depth: u32) -> DiophantineVerdict {
    let depth = depth.max(32);
    let mut points: Vec<Vec<i64>> = box_points(a.m(), radius).filter(|p| p.iter().any(|&x| x != 0)).collect();
    points.sort_by_key(|p| p.iter().map(|x| x.abs()).max().unwrap_or(0));
    let samples: Vec<(f64, f64)> = points
        .par_iter()
        .filter_map(|p| {
            let xi: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
            if is_member(a, &xi) {
                return None;
            }
            let rec = check_condition(a, &xi, depth);
            let norm = p.iter().map(|x| x.abs()).max().unwrap_or(0) as f64;
            let gap = crate::scalar::log10_abs(&rec.gap.midpoint());
            Some((norm.log10(), gap))
        })
        .collect();
    let mut records = Vec::new();
    let mut best = f64::INFINITY;
    for &(log_norm, log_gap) in &samples {
        if log_gap < best {
            best = log_gap;
            records.push((log_norm, -log_gap));
        }
    }
    let exponent_fit = least_squares_slope(&records);
    let max_ratio = samples
        .iter()
        .filter(|(log_norm, _)| *log_norm > 0.0)
        .map(|(log_norm, log_gap)| -log_gap / log_norm)
        .fold(0.0, f64::max);
    DiophantineVerdict::Empirical { exponent_fit, max_ratio, samples: samples.len() }
}

fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// Common denominator `λ` and integer numerators `λ·A` of a real rational
/// matrix, when both fit comfortably in machine integers.
fn small_rational_form(a: &PeriodMatrix) -> Option<(i128, Vec<Vec<i128>>)> {
    let rows = rational_entries(a).ok()?;
    let lambda = rows.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let limit = BigInt::from(1u64 << 40);
    if lambda > limit {
        return None;
    }
    let numer = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| {
                    let v = (x * BigRational::from_integer(lambda.clone())).to_integer();
                    let v = v.mod_floor(&lambda);
                    i128::try_from(v).ok()
                })
                .collect::<Option<Vec<_>>>()
        })
        .collect::<Option<Vec<_>>>()?;
    Some((i128::try_from(lambda).ok()?, numer))
}

/// Frequencies `ξ ∉ Γ` in the box violating `gap >= C|ξ|^{-ρ}` (with `ρ`
/// an integer), judged on the certified lower end of the gap.
pub fn simult_appr_violations(a: &PeriodMatrix, c: &BigRational, rho: &BigRational, radius: u32, depth: u32) -> Vec<Vec<BigInt>> {
    assert!(rho.is_integer(), "only integral exponents are checked exactly");
    let rho = rho.to_integer().try_into().unwrap_or(u32::MAX);
    let points: Vec<Vec<i64>> = box_points(a.m(), radius).collect();
    if let Some((lambda, numer)) = small_rational_form(a) {
        let lambda_big = BigInt::from(lambda);
        return points
            .par_iter()
            .filter_map(|p| {
                // Σ_k ξ_k A_kj = r_j/λ (mod 1), so the gap is max_j min(r_j, λ - r_j)/λ
                let g = (0..a.n())
                    .map(|j| {
                        let r = p.iter().zip(&numer).map(|(&x, row)| x as i128 * row[j]).sum::<i128>().rem_euclid(lambda);
                        r.min(lambda - r)
                    })
                    .max()
                    .unwrap_or(0);
                if g == 0 {
                    return None;
                }
                let xi: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
                let gap = BigRational::new(BigInt::from(g), lambda_big.clone());
                let need = c / BigRational::from_integer(sup_norm(&xi).pow(rho));
                (gap < need).then_some(xi)
            })
            .collect();
    }
    points
        .par_iter()
        .filter_map(|p| {
            let xi: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
            if is_member(a, &xi) {
                return None;
            }
            let gap = check_condition(a, &xi, depth).gap;
            let need = c / BigRational::from_integer(sup_norm(&xi).pow(rho));
            (gap.lo() < &need).then_some(xi)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(a: (i64, i64), b: (i64, i64), d: u64) -> ExactScalar {
        ExactScalar::quadratic(
            BigRational::new(a.0.into(), a.1.into()),
            BigRational::new(b.0.into(), b.1.into()),
            d,
        )
        .unwrap()
    }

    fn single(x: ExactScalar) -> PeriodMatrix {
        PeriodMatrix::real(vec![vec![x]]).unwrap()
    }

    fn r(p: i64, q: i64) -> BigRational {
        BigRational::new(p.into(), q.into())
    }

    #[test]
    fn fast_path_matches_general_search() {
        let a = PeriodMatrix::rational(&[&[(1, 3), (2, 5)], &[(-1, 4), (0, 1)]]);
        let c = r(1, 2);
        let rho = r(1, 1);
        let fast = simult_appr_violations(&a, &c, &rho, 6, 20);
        let mut slow: Vec<Vec<BigInt>> = box_points(2, 6)
            .map(|p| p.into_iter().map(BigInt::from).collect::<Vec<_>>())
            .filter(|xi| {
                !is_member(&a, xi)
                    && check_condition(&a, xi, 20).gap.lo() < &(&c / BigRational::from_integer(sup_norm(xi)))
            })
            .collect();
        let mut fast_sorted = fast.clone();
        fast_sorted.sort();
        slow.sort();
        assert_eq!(fast_sorted, slow);
        assert!(!slow.is_empty());
    }

    #[test]
    fn condition_examples() {
        let rec = check_condition(&PeriodMatrix::rational(&[&[(1, 3)]]), &[BigInt::one()], 20);
        assert_eq!(rec.gap, Interval::point(r(1, 3)));
        assert_eq!(rec.eta, vec![BigInt::zero()]);
        let root2 = single(ExactScalar::sqrt(2).unwrap());
        let rec = check_condition(&root2, &[BigInt::from(5)], 40);
        assert_eq!(rec.eta, vec![BigInt::from(7)]);
        // 5√2 − 7 to 17 digits
        assert!((rec.gap.lo_f64() - 0.071_067_811_865_475_24).abs() < 1e-12);
        assert!(rec.gap.width() < r(1, 1 << 30));
        assert_eq!(check_condition(&root2, &[BigInt::zero()], 20).gap, Interval::zero());
    }

    #[test]
    fn rational_examples() {
        let v = rational_verdict(&PeriodMatrix::rational(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 3)]])).unwrap();
        assert_eq!(v, DiophantineVerdict::WeaklyNonSA { c: r(1, 6), rho: r(1, 1), method: Method::RationalExact });
        let v = rational_verdict(&PeriodMatrix::rational(&[&[(2, 1), (-3, 1)]])).unwrap();
        assert!(matches!(v, DiophantineVerdict::WeaklyNonSA { c, .. } if c == r(1, 1)));
        let v = rational_verdict(&PeriodMatrix::rational(&[&[(2, 5)]])).unwrap();
        assert!(matches!(v, DiophantineVerdict::WeaklyNonSA { c, .. } if c == r(1, 5)));
        assert_eq!(rational_verdict(&single(ExactScalar::sqrt(2).unwrap())), Err(DiophantineError::NotRational));
    }

    #[test]
    fn minimal_polynomials() {
        let golden = quadratic_minimal_polynomial(&r(1, 2), &r(1, 2), 5);
        assert_eq!(golden, [BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]);
        let p = quadratic_minimal_polynomial(&r(1, 3), &r(2, 1), 3);
        // (x − 1/3)² − 12 → 9x² − 6x − 107
        assert_eq!(p, [BigInt::from(-107), BigInt::from(-6), BigInt::from(9)]);
    }

    #[test]
    fn quadratic_errors() {
        assert_eq!(quad_irr_verdict(&single(ExactScalar::from_int(3))), Err(DiophantineError::NotQuadratic));
        let two_rows = PeriodMatrix::real(vec![vec![ExactScalar::sqrt(2).unwrap()], vec![ExactScalar::zero()]]).unwrap();
        assert_eq!(quad_irr_verdict(&two_rows), Err(DiophantineError::NotQuadratic));
        assert!(quad_irr_verdict(&single(quad((1, 2), (1, 2), 5))).is_ok());
    }

    #[test]
    fn liouville_examples() {
        let (a, w) = liouville_witness(10, 1, 4).unwrap();
        assert_eq!(a.m(), 1);
        assert_eq!(w[1].xi, vec![BigInt::from(100)]);
        assert_eq!(w[1].eta, vec![BigInt::from(11)]);
        let two = r(2, 1);
        // 100·L − 11 = 100·Σ_{k≥3} 10^{-k!}
        assert!(w[1].gap.hi() <= &r(2, 10_000));
        assert!(w[1].gap.lo() >= &r(1, 10_000));
        for t in &w {
            assert!(t.bound.hi() <= &two);
        }
        assert_eq!(w[2].xi, vec![BigInt::from(10).pow(6u32)]);
        let (_, w2) = liouville_witness(2, 3, 1).unwrap();
        assert_eq!(w2[0].xi, vec![BigInt::from(2), BigInt::zero(), BigInt::zero()]);
        assert!(liouville_witness(1, 1, 1).is_err());
    }

    #[test]
    fn empirical_rational_is_flat() {
        let v = empirical_exponent(&PeriodMatrix::rational(&[&[(1, 3)]]), 100, 20);
        let DiophantineVerdict::Empirical { exponent_fit, samples, .. } = v else { panic!() };
        assert_eq!(exponent_fit, 0.0);
        assert_eq!(samples, 200 - 66);
    }

    #[test]
    fn least_squares() {
        assert!((least_squares_slope(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]) - 2.0).abs() < 1e-12);
    }
}
