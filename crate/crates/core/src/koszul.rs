//! Per-mode Koszul complex: at a double frequency `(ξ, κ)` the operator acts
//! as `u ↦ z ∧ u` with `z = i(κ + ξᵀA)` on the exterior algebra of `Cⁿ`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::lattice::PeriodMatrix;
use crate::scalar::{ComplexExact, ExactScalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KoszulError {
    #[error("degree overflow: cannot raise a degree-{q} form in dimension {n}")]
    DegreeOverflow { q: usize, n: usize },
    #[error("degree underflow: cannot lower a degree-0 form")]
    DegreeUnderflow,
    #[error("form is not closed under the mode operator")]
    NotClosed,
    #[error("dimension mismatch: vector has {vector} components, form lives in dimension {form}")]
    DimensionMismatch { vector: usize, form: usize },
    #[error(transparent)]
    Tower(#[from] ScalarError),
}

/// Strictly increasing 0-based indices `j₁ < … < j_q`, naming `dt_{j₁} ∧ … ∧ dt_{j_q}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(mut idx: Vec<usize>) -> Option<Self> {
        let len = idx.len();
        idx.sort_unstable();
        idx.dedup();
        (idx.len() == len).then_some(MultiIndex(idx))
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    /// All multi-indices of length `q` over `0..n`, in lexicographic order.
    pub fn all(n: usize, q: usize) -> Vec<MultiIndex> {
        fn go(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
            if cur.len() == q {
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for j in start..n {
                cur.push(j);
                go(j + 1, n, q, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if q <= n {
            go(0, n, q, &mut Vec::new(), &mut out);
        }
        out
    }

    /// `dt_j ∧ dt_J = sign · dt_{J∪j}`; `None` if `j ∈ J`.
    fn insert(&self, j: usize) -> Option<(bool, MultiIndex)> {
        match self.0.binary_search(&j) {
            Ok(_) => None,
            Err(pos) => {
                let mut v = self.0.clone();
                v.insert(pos, j);
                Some((pos % 2 == 1, MultiIndex(v)))
            }
        }
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|j| format!("dt{}", j + 1)).collect();
        write!(f, "{}", parts.join("^"))
    }
}

/// A `q`-form with constant coefficients on `Cⁿ`; absent keys are zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ModeForm {
    n: usize,
    q: usize,
    coeffs: BTreeMap<MultiIndex, ComplexExact>,
}

impl ModeForm {
    pub fn zero(n: usize, q: usize) -> Self {
        assert!(q <= n, "degree {q} exceeds dimension {n}");
        ModeForm { n, q, coeffs: BTreeMap::new() }
    }

    pub fn single(n: usize, index: MultiIndex, value: ComplexExact) -> Self {
        let mut f = ModeForm::zero(n, index.degree());
        f.set(index, value);
        f
    }

    /// `Σ_j w_j dt_j`.
    pub fn covector(w: &[ComplexExact]) -> Self {
        let mut f = ModeForm::zero(w.len(), 1);
        for (j, c) in w.iter().enumerate() {
            f.set(MultiIndex(vec![j]), c.clone());
        }
        f
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn get(&self, index: &MultiIndex) -> ComplexExact {
        self.coeffs.get(index).cloned().unwrap_or_else(ComplexExact::zero)
    }

    pub fn set(&mut self, index: MultiIndex, value: ComplexExact) {
        assert_eq!(index.degree(), self.q, "multi-index degree mismatch");
        assert!(index.indices().iter().all(|&j| j < self.n), "multi-index out of range");
        if value.is_zero() {
            self.coeffs.remove(&index);
        } else {
            self.coeffs.insert(index, value);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &ComplexExact)> {
        self.coeffs.iter()
    }

    fn accumulate(&mut self, index: MultiIndex, value: ComplexExact) -> Result<(), ScalarError> {
        let next = self.get(&index).add(&value)?;
        self.set(index, next);
        Ok(())
    }

    pub fn add(&self, other: &ModeForm) -> Result<ModeForm, ScalarError> {
        assert_eq!((self.n, self.q), (other.n, other.q), "adding forms of different shape");
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.accumulate(k.clone(), v.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &ModeForm) -> Result<ModeForm, ScalarError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> ModeForm {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, r: &BigRational) -> ModeForm {
        self.map(|c| c.scale(r))
    }

    pub fn mul_scalar(&self, c: &ComplexExact) -> Result<ModeForm, ScalarError> {
        let mut out = ModeForm::zero(self.n, self.q);
        for (k, v) in &self.coeffs {
            out.set(k.clone(), v.mul(c)?);
        }
        Ok(out)
    }

    pub fn div_scalar(&self, c: &ComplexExact) -> Result<ModeForm, ScalarError> {
        let mut out = ModeForm::zero(self.n, self.q);
        for (k, v) in &self.coeffs {
            out.set(k.clone(), v.div(c)?);
        }
        Ok(out)
    }

    fn map(&self, f: impl Fn(&ComplexExact) -> ComplexExact) -> ModeForm {
        let mut out = ModeForm::zero(self.n, self.q);
        for (k, v) in &self.coeffs {
            out.set(k.clone(), f(v));
        }
        out
    }

    /// `Σ_J |c_J|²`.
    pub fn norm_sq(&self) -> Result<ExactScalar, ScalarError> {
        self.coeffs.values().try_fold(ExactScalar::zero(), |acc, c| acc.add(&c.norm_sq()?))
    }

    /// Certified enclosure of the ℓ² norm squared; works in every tower.
    pub fn norm_sq_enclosure(&self, precision: u64) -> crate::scalar::Interval {
        let mut acc = crate::scalar::Interval::zero();
        for c in self.coeffs.values() {
            acc = acc.add(&c.re.enclose_bits(precision).square()).add(&c.im.enclose_bits(precision).square());
        }
        acc
    }
}

/// `z = i(κ + ξᵀA)` at a recorded frequency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeVector {
    pub z: Vec<ComplexExact>,
    pub xi: Vec<BigInt>,
    pub kappa: Vec<BigInt>,
}

impl ModeVector {
    pub fn is_zero(&self) -> bool {
        self.z.iter().all(|c| c.is_zero())
    }

    pub fn n(&self) -> usize {
        self.z.len()
    }
}

pub fn mode_vector(a: &PeriodMatrix, xi: &[BigInt], kappa: &[BigInt]) -> ModeVector {
    assert_eq!(kappa.len(), a.n(), "kappa length must equal the base dimension");
    let pair = a.pair(xi);
    let z = pair
        .iter()
        .zip(kappa)
        .map(|(p, k)| {
            p.add(&ComplexExact::real(ExactScalar::from_int(k.clone())))
                .expect("integers join any tower")
                .times_i()
        })
        .collect();
    ModeVector { z, xi: xi.to_vec(), kappa: kappa.to_vec() }
}

/// The de Rham part alone: `z = iκ`.
pub fn dt_mode_vector(xi: &[BigInt], kappa: &[BigInt]) -> ModeVector {
    let z = kappa.iter().map(|k| ComplexExact::real(ExactScalar::from_int(k.clone())).times_i()).collect();
    ModeVector { z, xi: xi.to_vec(), kappa: kappa.to_vec() }
}

/// Writes `z = c·r` with `r` Gaussian-rational. Keeps products inside a
/// single tower element, so Liouville-valued symbols (whose squares leave
/// the tower) still wedge and solve exactly when they are proportional.
fn factor(z: &[ComplexExact]) -> Option<(ComplexExact, Vec<ComplexExact>)> {
    let pivot = z.iter().find(|c| !c.is_zero())?.clone();
    let mut r = Vec::with_capacity(z.len());
    for c in z {
        let q = c.div(&pivot).ok()?;
        if !q.is_gaussian_rational() {
            return None;
        }
        r.push(q);
    }
    Some((pivot, r))
}

fn check_dim(z: &[ComplexExact], f: &ModeForm) -> Result<(), KoszulError> {
    if z.len() != f.n() {
        return Err(KoszulError::DimensionMismatch { vector: z.len(), form: f.n() });
    }
    Ok(())
}

fn wedge_direct(z: &[ComplexExact], u: &ModeForm) -> Result<ModeForm, KoszulError> {
    let mut out = ModeForm::zero(u.n(), u.degree() + 1);
    for (idx, c) in u.iter() {
        for (j, zj) in z.iter().enumerate() {
            if zj.is_zero() {
                continue;
            }
            if let Some((negative, k)) = idx.insert(j) {
                let term = zj.mul(c)?;
                out.accumulate(k, if negative { term.neg() } else { term })?;
            }
        }
    }
    Ok(out)
}

fn contract_direct(w: &[ComplexExact], f: &ModeForm) -> Result<ModeForm, KoszulError> {
    let mut out = ModeForm::zero(f.n(), f.degree() - 1);
    for (idx, c) in f.iter() {
        for (p, &j) in idx.indices().iter().enumerate() {
            if w[j].is_zero() {
                continue;
            }
            let mut rest = idx.indices().to_vec();
            rest.remove(p);
            let term = w[j].mul(c)?;
            out.accumulate(MultiIndex(rest), if p % 2 == 1 { term.neg() } else { term })?;
        }
    }
    Ok(out)
}

/// `z ∧ u`, raising the degree by one.
pub fn wedge(z: &[ComplexExact], u: &ModeForm) -> Result<ModeForm, KoszulError> {
    check_dim(z, u)?;
    if u.degree() >= u.n() {
        return Err(KoszulError::DegreeOverflow { q: u.degree(), n: u.n() });
    }
    match factor(z) {
        Some((c, r)) => Ok(wedge_direct(&r, u)?.mul_scalar(&c)?),
        None => wedge_direct(z, u),
    }
}

/// Interior product `w ⌟ f`, lowering the degree by one.
pub fn contract(w: &[ComplexExact], f: &ModeForm) -> Result<ModeForm, KoszulError> {
    check_dim(w, f)?;
    if f.degree() == 0 {
        return Err(KoszulError::DegreeUnderflow);
    }
    match factor(w) {
        Some((c, r)) => Ok(contract_direct(&r, f)?.mul_scalar(&c)?),
        None => contract_direct(w, f),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModeSolution {
    /// `z ≠ 0`: the homotopy solution `u = (z̄ ⌟ f)/|z|²`.
    Solved(ModeForm),
    /// `z = 0` and `f = 0`.
    ZeroSolution,
    /// `z = 0` and `f ≠ 0`: the mode carries cohomology.
    Obstructed,
}

/// Solves `z ∧ u = f` for closed `f` of degree `q >= 1`.
///
/// For `z ≠ 0` the Koszul homotopy gives the minimal-norm solution with
/// `|u| <= |f| / |z|`.
pub fn mode_solve(z: &[ComplexExact], f: &ModeForm) -> Result<ModeSolution, KoszulError> {
    check_dim(z, f)?;
    if f.degree() == 0 {
        return Err(KoszulError::DegreeUnderflow);
    }
    if f.degree() < f.n() && !wedge(z, f)?.is_zero() {
        return Err(KoszulError::NotClosed);
    }
    if z.iter().all(|c| c.is_zero()) {
        return Ok(if f.is_zero() { ModeSolution::ZeroSolution } else { ModeSolution::Obstructed });
    }
    let u = match factor(z) {
        Some((c, r)) => {
            // conj(z)/|z|² = conj(r) / (c·|r|²)
            let conj_r: Vec<_> = r.iter().map(|x| x.conj()).collect();
            let r_norm = r.iter().try_fold(ExactScalar::zero(), |acc, x| acc.add(&x.norm_sq()?))?;
            let denom = c.mul(&ComplexExact::real(r_norm))?;
            contract_direct(&conj_r, f)?.div_scalar(&denom)?
        }
        None => {
            let conj_z: Vec<_> = z.iter().map(|x| x.conj()).collect();
            let norm = z.iter().try_fold(ExactScalar::zero(), |acc, x| acc.add(&x.norm_sq()?))?;
            contract_direct(&conj_z, f)?.div_scalar(&ComplexExact::real(norm))?
        }
    };
    Ok(ModeSolution::Solved(u))
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `dim H^q` of the Koszul complex of `z`: zero unless `z = 0`.
pub fn mode_cohomology_dim(z: &[ComplexExact], q: usize) -> usize {
    if z.iter().all(|c| c.is_zero()) {
        binomial(z.len(), q)
    } else {
        0
    }
}

#[cfg(test)]
pub(crate) fn big(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}

pub(crate) fn integer_vector(v: &[ComplexExact]) -> Option<Vec<BigInt>> {
    v.iter()
        .map(|c| match (&c.re, c.im.is_zero()) {
            (ExactScalar::Rational(r), true) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        })
        .collect()
}
