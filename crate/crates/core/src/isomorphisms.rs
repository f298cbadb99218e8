//! Frequency reindexings that conjugate `d′` on the `Γ` cluster to `d_t`,
//! pull functions back from `T^r`, and read off cohomology.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::diophantine::CertifyConfig;
use crate::fourier::{dprime, dt_only, FormError, TubeForm};
use crate::koszul::{binomial, integer_vector, ModeForm, MultiIndex};
use crate::lattice::{box_points, classify, gamma_lattice, FrequencyLattice, GammaClass, PeriodMatrix};
use crate::scalar::ComplexExact;
use crate::solver::{closed_range_verdict, ClosedRange};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("frequency {xi:?} is not in Γ")]
    SupportOutsideGamma { xi: Vec<BigInt> },
    #[error("form is not d_t-closed")]
    NotClosed,
    #[error("the shear needs a real structure; Im A is nonzero")]
    ComplexStructure,
    #[error("function lives on T^{got}, the lattice has rank {rank}")]
    RankMismatch { got: usize, rank: usize },
    #[error("expected a degree-0 form independent of t; found kappa = {kappa:?}")]
    NotTorusFunction { kappa: Vec<BigInt> },
    #[error(transparent)]
    Form(#[from] FormError),
}

/// `(ξ, κ) ↦ (ξ, κ − ξᵀA)` on the `Γ` cluster.
#[derive(Clone, Debug)]
pub struct ShearMap {
    a: PeriodMatrix,
    lattice: FrequencyLattice,
}

impl ShearMap {
    pub fn new(a: &PeriodMatrix) -> Result<Self, IsoError> {
        if !a.is_real() {
            return Err(IsoError::ComplexStructure);
        }
        let lattice = gamma_lattice(a);
        debug_assert!(lattice.basis().iter().all(|xi| integer_vector(&a.pair(xi)).is_some()));
        Ok(ShearMap { a: a.clone(), lattice })
    }

    pub fn lattice(&self) -> &FrequencyLattice {
        &self.lattice
    }

    /// `ξᵀA ∈ Zⁿ` for `ξ ∈ Γ`.
    pub fn shift(&self, xi: &[BigInt]) -> Result<Vec<BigInt>, IsoError> {
        if !self.lattice.contains(xi) {
            return Err(IsoError::SupportOutsideGamma { xi: xi.to_vec() });
        }
        Ok(integer_vector(&self.a.pair(xi)).expect("real members pair to integers"))
    }

    fn apply(&self, f: &TubeForm, sign: i32) -> Result<TubeForm, IsoError> {
        let mut out = TubeForm::unbounded(f.m(), f.n(), f.degree()).with_two_pi_exp(f.two_pi_exp());
        let mut cache: BTreeMap<Vec<BigInt>, Vec<BigInt>> = BTreeMap::new();
        for ((xi, kappa), c) in f.iter() {
            if !cache.contains_key(xi) {
                cache.insert(xi.clone(), self.shift(xi)?);
            }
            let s = &cache[xi];
            let moved = kappa.iter().zip(s).map(|(k, s)| if sign < 0 { k - s } else { k + s }).collect();
            out.set(xi.clone(), moved, c.clone())?;
        }
        Ok(out)
    }

    /// `Θ`: moves the coefficient at `(ξ, κ)` to `(ξ, κ − ξᵀA)`.
    pub fn theta(&self, f: &TubeForm) -> Result<TubeForm, IsoError> {
        self.apply(f, -1)
    }

    pub fn theta_inverse(&self, f: &TubeForm) -> Result<TubeForm, IsoError> {
        self.apply(f, 1)
    }

    /// `d′ ∘ Θ = Θ ∘ d_t` on `f`, compared coefficient by coefficient.
    pub fn conjugation_check(&self, f: &TubeForm) -> Result<bool, IsoError> {
        let lhs = dprime(&self.a, &self.theta(f)?)?;
        let rhs = self.theta(&dt_only(f)?)?;
        Ok(lhs == rhs)
    }
}

/// `g(y) = (2π)^e Σ_η c_η e^{iη·y}` on `T^r`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TorusFunction {
    pub r: usize,
    pub two_pi_exp: i32,
    pub coeffs: BTreeMap<Vec<BigInt>, ComplexExact>,
}

impl TorusFunction {
    pub fn new(r: usize) -> Self {
        TorusFunction { r, ..Default::default() }
    }

    pub fn set(&mut self, eta: Vec<BigInt>, c: ComplexExact) {
        assert_eq!(eta.len(), self.r);
        if c.is_zero() {
            self.coeffs.remove(&eta);
        } else {
            self.coeffs.insert(eta, c);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// `θ*g = g(Bᵀx)` with `B` the basis matrix: the plain coefficient at `η`
/// moves to `ξ = Bη` (with `κ = 0`), so `F_ξ θ*g = (2π)^{m−r} ĝ_η`.
pub fn theta_star(g: &TorusFunction, lattice: &FrequencyLattice, n: usize) -> Result<TubeForm, IsoError> {
    if g.r != lattice.rank() {
        return Err(IsoError::RankMismatch { got: g.r, rank: lattice.rank() });
    }
    let mut out = TubeForm::unbounded(lattice.m(), n, 0).with_two_pi_exp(g.two_pi_exp);
    let zero = vec![BigInt::zero(); n];
    for (eta, c) in &g.coeffs {
        out.set(lattice.combine(eta), zero.clone(), ModeForm::single(n, MultiIndex::empty(), c.clone()))?;
    }
    Ok(out)
}

pub fn theta_star_inverse(f: &TubeForm, lattice: &FrequencyLattice) -> Result<TorusFunction, IsoError> {
    assert_eq!(f.degree(), 0, "pullbacks are functions");
    let mut g = TorusFunction { r: lattice.rank(), two_pi_exp: f.two_pi_exp(), coeffs: BTreeMap::new() };
    for ((xi, kappa), c) in f.iter() {
        if kappa.iter().any(|k| !k.is_zero()) {
            return Err(IsoError::NotTorusFunction { kappa: kappa.clone() });
        }
        let eta = lattice.coordinates(xi).ok_or_else(|| IsoError::SupportOutsideGamma { xi: xi.clone() })?;
        g.set(eta, c.get(&MultiIndex::empty()));
    }
    Ok(g)
}

/// `(c, C)` with `c|η|_∞ <= |Bη|_∞ <= C|η|_∞`.
///
/// `C` is the row-sum norm of `B`. For `c`, the pivot rows of the Hermite
/// basis form a triangular `r × r` block `P` with `P η = ξ|_pivots`, so
/// `|η| <= ‖P⁻¹‖ |ξ|`.
pub fn frequency_norm_constants(lattice: &FrequencyLattice) -> (BigRational, BigInt) {
    let basis = lattice.basis();
    let r = basis.len();
    let upper = (0..lattice.m())
        .map(|i| basis.iter().map(|b| b[i].abs()).sum::<BigInt>())
        .max()
        .unwrap_or_default();
    if r == 0 {
        return (BigRational::one(), upper);
    }
    let pivots: Vec<usize> = basis.iter().map(|b| b.iter().position(|x| !x.is_zero()).expect("nonzero rows")).collect();
    // P[j][k] = basis[k][pivot_j], lower triangular
    let p: Vec<Vec<BigRational>> = (0..r)
        .map(|j| (0..r).map(|k| BigRational::from_integer(basis[k][pivots[j]].clone())).collect())
        .collect();
    // columns of P⁻¹ by forward substitution
    let mut inv = vec![vec![BigRational::zero(); r]; r];
    for col in 0..r {
        for j in 0..r {
            let mut acc = if j == col { BigRational::one() } else { BigRational::zero() };
            for k in 0..j {
                acc -= &p[j][k] * &inv[k][col];
            }
            inv[j][col] = acc / &p[j][j];
        }
    }
    let norm = inv.iter().map(|row| row.iter().map(|x| x.abs()).sum::<BigRational>()).max().expect("r > 0");
    (norm.recip(), upper)
}

/// For each `dt_J` of degree `q`, the function on `T^r` whose coefficients
/// are the `κ = 0` coefficients of `f` along `dt_J`, reindexed by `θ*⁻¹`.
pub fn tee_map(f: &TubeForm, lattice: &FrequencyLattice) -> Result<BTreeMap<MultiIndex, TorusFunction>, IsoError> {
    for xi in f.rows() {
        if !lattice.contains(&xi) {
            return Err(IsoError::SupportOutsideGamma { xi });
        }
    }
    if f.degree() < f.n() && !dt_only(f)?.is_zero() {
        return Err(IsoError::NotClosed);
    }
    let mut out: BTreeMap<MultiIndex, TorusFunction> = MultiIndex::all(f.n(), f.degree())
        .into_iter()
        .map(|j| (j, TorusFunction { r: lattice.rank(), two_pi_exp: f.two_pi_exp(), coeffs: BTreeMap::new() }))
        .collect();
    for ((xi, kappa), c) in f.iter() {
        if kappa.iter().any(|k| !k.is_zero()) {
            continue;
        }
        let eta = lattice.coordinates(xi).expect("membership checked");
        for (j, value) in c.iter() {
            out.get_mut(j).expect("all indices present").set(eta.clone(), value.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CohomologyDimension {
    /// `H^q_{d′} = 0`.
    Zero,
    Finite(usize),
    Infinite,
    /// Equals the given finite value if `d′` has closed range in degree `q`.
    ConditionalOnClosedRange(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsomorphismReport {
    pub m: usize,
    pub n: usize,
    pub q: usize,
    pub gamma_rank: usize,
    pub gamma_class: GammaClass,
    pub box_radius: u32,
    /// `ξ ∉ Γ` scanned in the box.
    pub frequencies_checked: usize,
    /// Modes `(ξ ∉ Γ, κ)` in the box with `z = 0`; empty when the check passes.
    pub vanishing_failures: Vec<(Vec<BigInt>, Vec<BigInt>)>,
    pub de_rham_dim: usize,
    pub degree1_closed_range: ClosedRange,
    pub dimension: CohomologyDimension,
    pub notes: Vec<String>,
}

impl IsomorphismReport {
    pub fn vanishing_holds(&self) -> bool {
        self.vanishing_failures.is_empty()
    }

    /// `H^q ≅ C^∞(T^r) ⊗ H^q_dR(Tⁿ)` in words.
    pub fn shape(&self) -> String {
        format!("C^inf(T^{}) (x) H^{}_dR(T^{}), dim H_dR = {}", self.gamma_rank, self.q, self.n, self.de_rham_dim)
    }
}

/// For `ξ ∉ Γ`, `z(ξ, κ) = 0` forces `κ = −ξᵀA ∈ Zⁿ`; returns that `κ`
/// when it lies in the box.
fn zero_mode_off_gamma(a: &PeriodMatrix, xi: &[BigInt], radius: u32) -> Option<Vec<BigInt>> {
    let kappa: Vec<BigInt> = integer_vector(&a.pair(xi))?.into_iter().map(|k| -k).collect();
    let bound = BigInt::from(radius);
    kappa.iter().all(|k| k.abs() <= bound).then_some(kappa)
}

pub fn strong_isomorphism_report(a: &PeriodMatrix, q: usize, radius: u32, config: &CertifyConfig) -> IsomorphismReport {
    assert!(q <= a.n(), "degree exceeds the base dimension");
    let lattice = gamma_lattice(a);
    let class = classify(&lattice).class;
    let points: Vec<Vec<i64>> = box_points(a.m(), radius).collect();
    let scanned: Vec<Option<(Vec<BigInt>, Vec<BigInt>)>> = points
        .par_iter()
        .filter_map(|p| {
            let xi: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
            if lattice.contains(&xi) {
                return None;
            }
            Some(zero_mode_off_gamma(a, &xi, radius).map(|k| (xi, k)))
        })
        .collect();
    let frequencies_checked = scanned.len();
    let vanishing_failures: Vec<_> = scanned.into_iter().flatten().collect();

    let de_rham_dim = binomial(a.n(), q);
    let closed = closed_range_verdict(a, "auto", config).closed_range;
    let dimension = if de_rham_dim == 0 {
        CohomologyDimension::Zero
    } else if class != GammaClass::Zero {
        CohomologyDimension::Infinite
    } else if q == 0 {
        CohomologyDimension::Finite(1)
    } else if q == 1 {
        match closed {
            ClosedRange::Yes => CohomologyDimension::Finite(de_rham_dim),
            ClosedRange::No => CohomologyDimension::Infinite,
            ClosedRange::Undecided => CohomologyDimension::ConditionalOnClosedRange(de_rham_dim),
        }
    } else {
        CohomologyDimension::ConditionalOnClosedRange(de_rham_dim)
    };

    let mut notes = vec![format!(
        "every xi outside Γ with |xi|_inf <= {radius} has z != 0 for all |kappa|_inf <= {radius}, so H^{q}_xi = 0 there"
    )];
    if !vanishing_failures.is_empty() {
        notes[0] = format!("{} modes outside Γ have z = 0", vanishing_failures.len());
    }
    if class != GammaClass::Zero && de_rham_dim > 0 {
        notes.push("Γ != {0}: shifting along Γ multiplies cohomology classes, so the cohomology is infinite dimensional".into());
    }
    if a.is_rational() && a.is_real() {
        notes.push("rational structures contain λ·Z^m in Γ (λ the common denominator), so Γ has full rank".into());
    }
    if class == GammaClass::Zero && q == 1 && closed == ClosedRange::No {
        notes.push("without closed range the degree-1 cohomology is not Hausdorff and is infinite dimensional".into());
    }
    IsomorphismReport {
        m: a.m(),
        n: a.n(),
        q,
        gamma_rank: lattice.rank(),
        gamma_class: class,
        box_radius: radius,
        frequencies_checked,
        vanishing_failures,
        de_rham_dim,
        degree1_closed_range: closed,
        dimension,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::koszul::big;
    use crate::scalar::ExactScalar;

    fn unit(n: usize) -> ModeForm {
        ModeForm::single(n, MultiIndex::empty(), ComplexExact::one())
    }

    #[test]
    fn theta_examples() {
        let a = PeriodMatrix::rational(&[&[(1, 1), (0, 1)]]);
        let shear = ShearMap::new(&a).unwrap();
        let mut f = TubeForm::new(1, 2, 0);
        f.set(big(&[1]), big(&[0, 0]), unit(2)).unwrap();
        f.set(big(&[0]), big(&[3, 1]), unit(2)).unwrap();
        let t = shear.theta(&f).unwrap();
        assert!(t.get(&big(&[1]), &big(&[-1, 0])).is_some());
        assert!(t.get(&big(&[0]), &big(&[3, 1])).is_some());
        assert_eq!(shear.theta_inverse(&t).unwrap(), f.clone().with_limit(None));
        assert!(shear.conjugation_check(&f).unwrap());
        assert!(shear.conjugation_check(&TubeForm::new(1, 2, 1)).unwrap());
    }

    #[test]
    fn theta_rejects_outside_gamma() {
        let a = PeriodMatrix::rational(&[&[(1, 2)]]);
        let shear = ShearMap::new(&a).unwrap();
        let mut f = TubeForm::new(1, 1, 0);
        f.set(big(&[1]), big(&[0]), unit(1)).unwrap();
        assert!(matches!(shear.theta(&f), Err(IsoError::SupportOutsideGamma { .. })));
        let complex = PeriodMatrix::new(vec![vec![ComplexExact::i()]]).unwrap();
        assert!(matches!(ShearMap::new(&complex), Err(IsoError::ComplexStructure)));
    }

    #[test]
    fn theta_star_examples() {
        let a = PeriodMatrix::rational(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 3)]]);
        let l = gamma_lattice(&a);
        let mut g = TorusFunction::new(2);
        g.set(big(&[1, 0]), ComplexExact::one());
        let f = theta_star(&g, &l, 2).unwrap();
        assert!(f.get(&big(&[2, 0]), &big(&[0, 0])).is_some());
        assert_eq!(theta_star_inverse(&f, &l).unwrap(), g);
        let (c, big_c) = frequency_norm_constants(&l);
        assert_eq!(c, BigRational::new(2.into(), 1.into()));
        assert_eq!(big_c, BigInt::from(3));

        let zero = gamma_lattice(&PeriodMatrix::real(vec![vec![ExactScalar::sqrt(2).unwrap()]]).unwrap());
        let mut constant = TorusFunction::new(0);
        constant.set(vec![], ComplexExact::one());
        let f = theta_star(&constant, &zero, 1).unwrap();
        assert!(f.get(&big(&[0]), &big(&[0])).is_some());
    }

    #[test]
    fn tee_map_reads_constant_forms() {
        let a = PeriodMatrix::zeros(1, 2);
        let l = gamma_lattice(&a);
        let mut f = TubeForm::new(1, 2, 1);
        f.set(big(&[0]), big(&[0, 0]), ModeForm::single(2, MultiIndex::new(vec![0]).unwrap(), ComplexExact::one())).unwrap();
        let t = tee_map(&f, &l).unwrap();
        assert_eq!(t[&MultiIndex::new(vec![0]).unwrap()].coeffs.len(), 1);
        assert!(t[&MultiIndex::new(vec![1]).unwrap()].is_zero());
    }

    #[test]
    fn report_examples() {
        let cfg = CertifyConfig::default();
        let root2 = PeriodMatrix::real(vec![vec![ExactScalar::sqrt(2).unwrap()]]).unwrap();
        let r = strong_isomorphism_report(&root2, 1, 8, &cfg);
        assert!(r.vanishing_holds());
        assert_eq!(r.gamma_rank, 0);
        assert_eq!(r.dimension, CohomologyDimension::Finite(1));
        let int = PeriodMatrix::rational(&[&[(2, 1), (1, 1)]]);
        let r = strong_isomorphism_report(&int, 1, 4, &cfg);
        assert_eq!(r.dimension, CohomologyDimension::Infinite);
        assert_eq!(r.de_rham_dim, 2);
        assert_eq!(r.frequencies_checked, 0);
    }
}
