//! Finitely supported double Fourier series on `Tⁿ × Tᵐ`.
//!
//! A [`TubeForm`] stores plain coefficients: the section it represents is
//! `(2π)^e · Σ_{ξ,κ} e^{i(x·ξ + t·κ)} Σ′_J c_{ξ,κ,J} dt_J`, where `e` is the
//! form's `two_pi_exp` (zero for ordinary forms). The partial Fourier
//! coefficient in `x` is `F_ξ f(t) = (2π)^m Σ_κ e^{it·κ} c_{ξ,κ}`, so slices
//! carry their own power of `2π` instead of an approximation of it.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::koszul::{dt_mode_vector, mode_vector, wedge, KoszulError, ModeForm, MultiIndex};
use crate::lattice::{FrequencyLattice, PeriodMatrix};
use crate::scalar::{log10_abs, ComplexExact, ExactScalar, Interval};

pub const DEFAULT_SUPPORT_LIMIT: u64 = 64;

/// `(ξ, κ)`: torus frequency and base frequency.
pub type Mode = (Vec<BigInt>, Vec<BigInt>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("frequency component {value} exceeds the support limit {limit}")]
    SupportLimit { value: BigInt, limit: u64 },
    #[error("mode has shape ({xi}, {kappa}), expected ({m}, {n})")]
    ModeShape { xi: usize, kappa: usize, m: usize, n: usize },
    #[error("coefficient has degree {got} in dimension {got_n}, expected degree {q} in dimension {n}")]
    CoefficientShape { got: usize, got_n: usize, q: usize, n: usize },
    #[error("forms differ in shape or in their power of 2π")]
    Incompatible,
    #[error("period matrix is {am}x{an}, form lives on m = {m}, n = {n}")]
    StructureShape { am: usize, an: usize, m: usize, n: usize },
    #[error(transparent)]
    Koszul(#[from] KoszulError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TubeForm {
    m: usize,
    n: usize,
    q: usize,
    two_pi_exp: i32,
    limit: Option<u64>,
    coeffs: BTreeMap<Mode, ModeForm>,
}

impl TubeForm {
    /// Empty form with the default support limit.
    pub fn new(m: usize, n: usize, q: usize) -> Self {
        assert!(q <= n, "degree {q} exceeds dimension {n}");
        TubeForm { m, n, q, two_pi_exp: 0, limit: Some(DEFAULT_SUPPORT_LIMIT), coeffs: BTreeMap::new() }
    }

    /// Empty form without a support limit.
    pub fn unbounded(m: usize, n: usize, q: usize) -> Self {
        TubeForm { limit: None, ..TubeForm::new(m, n, q) }
    }

    pub fn with_limit(mut self, limit: Option<u64>) -> Self {
        self.limit = limit;
        self
    }

    pub fn with_two_pi_exp(mut self, e: i32) -> Self {
        self.two_pi_exp = e;
        self
    }

    fn empty_like(&self, q: usize) -> TubeForm {
        TubeForm { q, coeffs: BTreeMap::new(), ..self.clone() }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.q
    }

    pub fn two_pi_exp(&self) -> i32 {
        self.two_pi_exp
    }

    pub fn limit(&self) -> Option<u64> {
        self.limit
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn get(&self, xi: &[BigInt], kappa: &[BigInt]) -> Option<&ModeForm> {
        self.coeffs.get(&(xi.to_vec(), kappa.to_vec()))
    }

    /// Modes in lexicographic `(ξ, κ)` order.
    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &ModeForm)> {
        self.coeffs.iter()
    }

    /// Distinct `ξ` rows of the support, ascending.
    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        let mut rows: Vec<Vec<BigInt>> = self.coeffs.keys().map(|(xi, _)| xi.clone()).collect();
        rows.dedup();
        rows
    }

    fn check_mode(&self, xi: &[BigInt], kappa: &[BigInt]) -> Result<(), FormError> {
        if xi.len() != self.m || kappa.len() != self.n {
            return Err(FormError::ModeShape { xi: xi.len(), kappa: kappa.len(), m: self.m, n: self.n });
        }
        if let Some(limit) = self.limit {
            let bound = BigInt::from(limit);
            if let Some(v) = xi.iter().chain(kappa).find(|v| v.abs() > bound) {
                return Err(FormError::SupportLimit { value: v.clone(), limit });
            }
        }
        Ok(())
    }

    fn check_coeff(&self, c: &ModeForm) -> Result<(), FormError> {
        if c.degree() != self.q || c.n() != self.n {
            return Err(FormError::CoefficientShape { got: c.degree(), got_n: c.n(), q: self.q, n: self.n });
        }
        Ok(())
    }

    /// Replaces the coefficient at `(ξ, κ)`; a zero coefficient removes the mode.
    pub fn set(&mut self, xi: Vec<BigInt>, kappa: Vec<BigInt>, c: ModeForm) -> Result<(), FormError> {
        self.check_mode(&xi, &kappa)?;
        self.check_coeff(&c)?;
        if c.is_zero() {
            self.coeffs.remove(&(xi, kappa));
        } else {
            self.coeffs.insert((xi, kappa), c);
        }
        Ok(())
    }

    /// Adds `c` to the coefficient at `(ξ, κ)`.
    pub fn accumulate(&mut self, xi: Vec<BigInt>, kappa: Vec<BigInt>, c: ModeForm) -> Result<(), FormError> {
        self.check_coeff(&c)?;
        let next = match self.coeffs.get(&(xi.clone(), kappa.clone())) {
            Some(old) => old.add(&c).map_err(KoszulError::from)?,
            None => c,
        };
        self.set(xi, kappa, next)
    }

    pub fn add(&self, other: &TubeForm) -> Result<TubeForm, FormError> {
        if (self.m, self.n, self.q, self.two_pi_exp) != (other.m, other.n, other.q, other.two_pi_exp) {
            return Err(FormError::Incompatible);
        }
        let mut out = self.clone();
        out.limit = match (self.limit, other.limit) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        for ((xi, kappa), c) in &other.coeffs {
            out.accumulate(xi.clone(), kappa.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TubeForm) -> Result<TubeForm, FormError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TubeForm {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.neg();
        }
        out
    }

    /// Applies `op` to every mode in parallel and reassembles in key order.
    fn map_modes<F>(&self, q: usize, op: F) -> Result<TubeForm, FormError>
    where
        F: Fn(&Mode, &ModeForm) -> Result<ModeForm, KoszulError> + Sync,
    {
        let modes: Vec<(&Mode, &ModeForm)> = self.coeffs.iter().collect();
        let images: Vec<Result<(Mode, ModeForm), KoszulError>> =
            modes.par_iter().map(|(k, c)| op(k, c).map(|img| ((*k).clone(), img))).collect();
        let mut out = self.empty_like(q);
        for r in images {
            let (k, img) = r?;
            if !img.is_zero() {
                out.coeffs.insert(k, img);
            }
        }
        Ok(out)
    }
}

/// `d′f`: at each mode, wedge with `z = i(κ + ξᵀA)`.
pub fn dprime(a: &PeriodMatrix, f: &TubeForm) -> Result<TubeForm, FormError> {
    check_structure(a, f)?;
    if f.q >= f.n {
        return Err(KoszulError::DegreeOverflow { q: f.q, n: f.n }.into());
    }
    f.map_modes(f.q + 1, |(xi, kappa), c| wedge(&mode_vector(a, xi, kappa).z, c))
}

/// `d_t f`: at each mode, wedge with `iκ`.
pub fn dt_only(f: &TubeForm) -> Result<TubeForm, FormError> {
    if f.q >= f.n {
        return Err(KoszulError::DegreeOverflow { q: f.q, n: f.n }.into());
    }
    f.map_modes(f.q + 1, |(xi, kappa), c| wedge(&dt_mode_vector(xi, kappa).z, c))
}

pub(crate) fn check_structure(a: &PeriodMatrix, f: &TubeForm) -> Result<(), FormError> {
    if a.m() != f.m || a.n() != f.n {
        return Err(FormError::StructureShape { am: a.m(), an: a.n(), m: f.m, n: f.n });
    }
    Ok(())
}

/// `(2π)^two_pi_exp · Σ_κ e^{it·κ} modes[κ]`: a function of `t` alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierSlice {
    pub n: usize,
    pub q: usize,
    pub two_pi_exp: i32,
    pub modes: BTreeMap<Vec<BigInt>, ModeForm>,
}

impl FourierSlice {
    pub fn new(n: usize, q: usize, two_pi_exp: i32) -> Self {
        FourierSlice { n, q, two_pi_exp, modes: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty()
    }

    /// `d′_ξ` on the slice: wedge by `i(κ + ξᵀA)` at each `κ`.
    pub fn apply_dprime(&self, a: &PeriodMatrix, xi: &[BigInt]) -> Result<FourierSlice, KoszulError> {
        let mut out = FourierSlice::new(self.n, self.q + 1, self.two_pi_exp);
        for (kappa, c) in &self.modes {
            let img = wedge(&mode_vector(a, xi, kappa).z, c)?;
            if !img.is_zero() {
                out.modes.insert(kappa.clone(), img);
            }
        }
        Ok(out)
    }
}

/// `F_ξ f`.
pub fn f_hat(f: &TubeForm, xi: &[BigInt]) -> FourierSlice {
    let mut out = FourierSlice::new(f.n, f.q, f.two_pi_exp + f.m as i32);
    for ((x, kappa), c) in &f.coeffs {
        if x.as_slice() == xi {
            out.modes.insert(kappa.clone(), c.clone());
        }
    }
    out
}

/// `E_ξ g`: the section `e^{ix·ξ} g(t)/(2π)^m`, unbounded support.
pub fn embed(xi: &[BigInt], g: &FourierSlice) -> TubeForm {
    let m = xi.len();
    let mut out = TubeForm::unbounded(m, g.n, g.q).with_two_pi_exp(g.two_pi_exp - m as i32);
    for (kappa, c) in &g.modes {
        if !c.is_zero() {
            out.coeffs.insert((xi.to_vec(), kappa.clone()), c.clone());
        }
    }
    out
}

/// `(f_Γ, f − f_Γ)` where `f_Γ` keeps the rows with `ξ ∈ Γ`.
pub fn project_cluster(f: &TubeForm, lattice: &FrequencyLattice) -> (TubeForm, TubeForm) {
    let mut inside = f.empty_like(f.q);
    let mut outside = f.empty_like(f.q);
    for ((xi, kappa), c) in &f.coeffs {
        let target = if lattice.contains(xi) { &mut inside } else { &mut outside };
        target.coeffs.insert((xi.clone(), kappa.clone()), c.clone());
    }
    (inside, outside)
}

fn random_small(rng: &mut ChaCha8Rng) -> ComplexExact {
    let re = rng.gen_range(-5i64..=5);
    let im = rng.gen_range(-5i64..=5);
    ComplexExact::new(ExactScalar::from_int(re), ExactScalar::from_int(im))
}

fn random_frequency(rng: &mut ChaCha8Rng, len: usize, radius: i64) -> Vec<BigInt> {
    (0..len).map(|_| BigInt::from(rng.gen_range(-radius..=radius))).collect()
}

/// Random degree-`q` form with up to `terms` modes, `|freq|_∞ <= radius` and
/// small Gaussian-integer coefficients.
pub fn random_form(rng: &mut ChaCha8Rng, m: usize, n: usize, q: usize, radius: i64, terms: usize) -> TubeForm {
    let mut f = TubeForm::new(m, n, q);
    let indices = MultiIndex::all(n, q);
    for _ in 0..terms {
        let xi = random_frequency(rng, m, radius);
        let kappa = random_frequency(rng, n, radius);
        let mut c = ModeForm::zero(n, q);
        for idx in &indices {
            if rng.gen_bool(0.6) {
                c.set(idx.clone(), random_small(rng));
            }
        }
        f.accumulate(xi, kappa, c).expect("generated within the limit");
    }
    f
}

/// `d′g` for a random `(q−1)`-form `g`; with `cohomology`, also adds
/// nonzero coefficients at a few `z = 0` modes inside the box.
pub fn random_closed_form(seed: u64, a: &PeriodMatrix, q: usize, radius: i64, cohomology: bool) -> TubeForm {
    assert!(q >= 1 && q <= a.n(), "degree must lie in 1..=n");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_form(&mut rng, a.m(), a.n(), q - 1, radius, 4);
    let mut f = dprime(a, &g).expect("degree checked");
    if cohomology {
        for (xi, kappa) in zero_modes(a, radius).into_iter().take(2) {
            let c = ModeForm::single(a.n(), MultiIndex::all(a.n(), q)[0].clone(), ComplexExact::one());
            f.accumulate(xi, kappa, c).expect("inside the box");
        }
    }
    f
}

/// `(ξ, κ)` with `z = 0` and both frequencies inside the box, in
/// lexicographic order of `ξ`. Exact for rational `A`; for other towers
/// `κ = −ξᵀA` is integral only when `ξ ∈ Γ`, which the test covers.
pub fn zero_modes(a: &PeriodMatrix, radius: i64) -> Vec<Mode> {
    let bound = BigInt::from(radius);
    crate::lattice::box_points(a.m(), radius as u32)
        .filter_map(|p| {
            let xi: Vec<BigInt> = p.into_iter().map(BigInt::from).collect();
            let pair = a.pair(&xi);
            let kappa = crate::koszul::integer_vector(&pair)?
                .into_iter()
                .map(|k| -k)
                .collect::<Vec<_>>();
            kappa.iter().all(|k| k.abs() <= bound).then_some((xi, kappa))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayConfig {
    /// How many magnitudes must reach the floor to flag a non-decaying tail.
    pub min_count: usize,
    pub floor: i64,
}

impl Default for DecayConfig {
    fn default() -> Self {
        DecayConfig { min_count: 4, floor: 1 }
    }
}

/// Largest decay exponent reported; also the value for empty forms.
pub const DECAY_EXPONENT_CAP: f64 = 64.0;

#[derive(Clone, Debug, PartialEq)]
pub struct DecaySample {
    /// `|ξ|_∞ + |κ|_∞`
    pub magnitude: BigInt,
    /// Certified enclosure of the largest squared ℓ² mode norm at this magnitude.
    pub norm_sq: Interval,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TailFlag {
    /// Every sample obeys `|c| <= magnitude^{-s_max}` (magnitudes `>= 2`).
    RapidDecay { s_max: f64 },
    NonDecayingTail { count: usize, floor: i64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmoothnessProfile {
    pub samples: Vec<DecaySample>,
    pub tail: TailFlag,
}

const NORM_PRECISION: u64 = 64;

fn inf_norm(v: &[BigInt]) -> BigInt {
    v.iter().map(|x| x.abs()).max().unwrap_or_default()
}

pub fn decay_profile(f: &TubeForm, config: DecayConfig) -> SmoothnessProfile {
    let mut by_mag: BTreeMap<BigInt, Interval> = BTreeMap::new();
    for ((xi, kappa), c) in &f.coeffs {
        let mag = inf_norm(xi) + inf_norm(kappa);
        let norm = c.norm_sq_enclosure(NORM_PRECISION);
        by_mag
            .entry(mag)
            .and_modify(|cur| *cur = cur.max(&norm))
            .or_insert(norm);
    }
    let samples: Vec<DecaySample> =
        by_mag.into_iter().map(|(magnitude, norm_sq)| DecaySample { magnitude, norm_sq }).collect();
    let floor_sq = BigRational::from_integer(BigInt::from(config.floor * config.floor));
    let count = samples.iter().filter(|s| s.norm_sq.lo() >= &floor_sq).count();
    let tail = if count >= config.min_count && !samples.is_empty() {
        TailFlag::NonDecayingTail { count, floor: config.floor }
    } else {
        let two = BigInt::from(2);
        let s_max = samples
            .iter()
            .filter(|s| s.magnitude >= two)
            .map(|s| {
                let log_norm = 0.5 * log10_abs(s.norm_sq.hi());
                let log_mag = log10_abs(&BigRational::from_integer(s.magnitude.clone()));
                -log_norm / log_mag
            })
            .fold(DECAY_EXPONENT_CAP, f64::min);
        // normalizes -0.0 for unit-modulus samples
        TailFlag::RapidDecay { s_max: s_max + 0.0 }
    };
    SmoothnessProfile { samples, tail }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koszul::big;
    use crate::lattice::gamma_lattice;

    fn c(re: i64, im: i64) -> ComplexExact {
        ComplexExact::new(ExactScalar::from_int(re), ExactScalar::from_int(im))
    }

    fn idx(v: &[usize]) -> MultiIndex {
        MultiIndex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn dprime_single_mode() {
        let a = PeriodMatrix::rational(&[&[(1, 2), (0, 1)]]);
        let mut f = TubeForm::new(1, 2, 1);
        f.set(big(&[1]), big(&[-1, 0]), ModeForm::single(2, idx(&[1]), c(1, 0))).unwrap();
        let g = dprime(&a, &f).unwrap();
        let want = ModeForm::single(2, idx(&[0, 1]), ComplexExact::new(ExactScalar::zero(), ExactScalar::ratio(-1, 2)));
        assert_eq!(g.get(&big(&[1]), &big(&[-1, 0])), Some(&want));
        assert_eq!(g.support_len(), 1);
    }

    #[test]
    fn dt_only_examples() {
        let mut f = TubeForm::new(1, 2, 0);
        f.set(big(&[0]), big(&[0, 0]), ModeForm::single(2, MultiIndex::empty(), c(1, 0))).unwrap();
        assert!(dt_only(&f).unwrap().is_zero());
        let mut f = TubeForm::new(1, 2, 0);
        f.set(big(&[0]), big(&[1, 0]), ModeForm::single(2, MultiIndex::empty(), c(1, 0))).unwrap();
        let d = dt_only(&f).unwrap();
        assert_eq!(d.get(&big(&[0]), &big(&[1, 0])), Some(&ModeForm::single(2, idx(&[0]), c(0, 1))));
        let zero = PeriodMatrix::zeros(1, 2);
        assert_eq!(dprime(&zero, &f).unwrap(), d);
    }

    #[test]
    fn support_limit_is_enforced() {
        let mut f = TubeForm::new(1, 1, 0);
        let err = f.set(big(&[65]), big(&[0]), ModeForm::single(1, MultiIndex::empty(), c(1, 0)));
        assert!(matches!(err, Err(FormError::SupportLimit { .. })));
        let mut g = TubeForm::unbounded(1, 1, 0);
        assert!(g.set(big(&[65]), big(&[0]), ModeForm::single(1, MultiIndex::empty(), c(1, 0))).is_ok());
    }

    #[test]
    fn embed_constant_and_biorthogonality() {
        let mut g = FourierSlice::new(1, 0, 1);
        g.modes.insert(big(&[0]), ModeForm::single(1, MultiIndex::empty(), c(1, 0)));
        let e = embed(&big(&[0]), &g);
        assert_eq!(e.two_pi_exp(), 0);
        assert_eq!(e.support_len(), 1);
        assert_eq!(f_hat(&e, &big(&[0])), g);
        assert!(f_hat(&e, &big(&[1])).is_zero());
    }

    #[test]
    fn cluster_projection_example() {
        let a = PeriodMatrix::rational(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 3)]]);
        let l = gamma_lattice(&a);
        let mut f = TubeForm::new(2, 2, 1);
        f.set(big(&[2, 3]), big(&[0, 0]), ModeForm::single(2, idx(&[0]), c(1, 0))).unwrap();
        f.set(big(&[1, 0]), big(&[0, 0]), ModeForm::single(2, idx(&[1]), c(1, 0))).unwrap();
        let (inside, outside) = project_cluster(&f, &l);
        assert_eq!(inside.rows(), vec![big(&[2, 3])]);
        assert_eq!(outside.rows(), vec![big(&[1, 0])]);
        assert_eq!(inside.add(&outside).unwrap(), f);
    }

    #[test]
    fn random_closed_forms_are_closed_and_deterministic() {
        let a = PeriodMatrix::rational(&[&[(1, 2), (1, 3)]]);
        for q in 1..2 {
            let f = random_closed_form(7, &a, q, 4, true);
            assert!(dprime(&a, &f).unwrap().is_zero());
            assert_eq!(f, random_closed_form(7, &a, q, 4, true));
        }
    }

    #[test]
    fn decay_flags() {
        assert_eq!(decay_profile(&TubeForm::new(1, 1, 1), DecayConfig::default()).tail, TailFlag::RapidDecay { s_max: DECAY_EXPONENT_CAP });
        let mut f = TubeForm::new(1, 1, 1);
        for k in 1..=4 {
            f.set(big(&[k * 3]), big(&[0]), ModeForm::single(1, idx(&[0]), c(0, 1))).unwrap();
        }
        assert_eq!(decay_profile(&f, DecayConfig::default()).tail, TailFlag::NonDecayingTail { count: 4, floor: 1 });
        let mut g = TubeForm::new(1, 1, 1);
        for k in 1..=4i64 {
            let coeff = ComplexExact::real(ExactScalar::ratio(1, 10i64.pow(k as u32)));
            g.set(big(&[10 * k]), big(&[0]), ModeForm::single(1, idx(&[0]), coeff)).unwrap();
        }
        assert!(matches!(decay_profile(&g, DecayConfig::default()).tail, TailFlag::RapidDecay { s_max } if s_max > 0.5));
    }
}
