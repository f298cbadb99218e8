//! Period matrices and the frequency group `Γ = {ξ : ξᵀ·Re A ∈ Zⁿ, ξᵀ·Im A = 0}`.

mod strategy;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::intmat::{hermite_index, solve_in_hermite, IntMatrix};
use crate::scalar::{ComplexExact, ExactScalar, Tower};

pub use strategy::{box_points, BoxLattice, ExactLattice, LatticeRegistry, LatticeStrategy};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("period matrix must have m >= 1 and n >= 1 (got {m}x{n})")]
    EmptyMatrix { m: usize, n: usize },
    #[error("period matrix row {row} has {got} entries, expected {expected}")]
    RaggedRow { row: usize, got: usize, expected: usize },
    #[error("column {column} mixes towers {first} and {second}; membership would not be exact")]
    MixedColumnTower { column: usize, first: String, second: String },
    #[error("entry ({row}, {column}) is not of the form a + s*liouville(b)")]
    NonAffineEntry { row: usize, column: usize },
    #[error("frequency has length {got}, expected {expected}")]
    FrequencyLength { got: usize, expected: usize },
}

/// `m × n` matrix; row `k` holds the coefficients of `ω_k = Σ_j A_kj dt_j`,
/// column `ℓ` is the period vector `v_ℓ` along the `ℓ`-th coordinate circle.
///
/// Within each column, real parts share one tower and imaginary parts share
/// one tower, so `ξᵀA` is always computable exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodMatrix {
    m: usize,
    n: usize,
    entries: Vec<Vec<ComplexExact>>,
    re_towers: Vec<Tower>,
    im_towers: Vec<Tower>,
}

impl PeriodMatrix {
    pub fn new(entries: Vec<Vec<ComplexExact>>) -> Result<Self, LatticeError> {
        let m = entries.len();
        let n = entries.first().map_or(0, |r| r.len());
        if m == 0 || n == 0 {
            return Err(LatticeError::EmptyMatrix { m, n });
        }
        for (row, r) in entries.iter().enumerate() {
            if r.len() != n {
                return Err(LatticeError::RaggedRow { row, got: r.len(), expected: n });
            }
            if let Some(column) = r.iter().position(|c| !(c.re.is_affine() && c.im.is_affine())) {
                return Err(LatticeError::NonAffineEntry { row, column });
            }
        }
        let column_tower = |j: usize, part: fn(&ComplexExact) -> &ExactScalar| {
            let mut tower = Tower::Rational;
            for row in &entries {
                let t = part(&row[j]).tower();
                match (tower, t) {
                    (_, Tower::Rational) => {}
                    (Tower::Rational, t) => tower = t,
                    (a, b) if a == b => {}
                    (a, b) => {
                        return Err(LatticeError::MixedColumnTower {
                            column: j,
                            first: a.to_string(),
                            second: b.to_string(),
                        })
                    }
                }
            }
            Ok(tower)
        };
        let re_towers = (0..n).map(|j| column_tower(j, |c| &c.re)).collect::<Result<_, _>>()?;
        let im_towers = (0..n).map(|j| column_tower(j, |c| &c.im)).collect::<Result<_, _>>()?;
        Ok(PeriodMatrix { m, n, entries, re_towers, im_towers })
    }

    pub fn real(entries: Vec<Vec<ExactScalar>>) -> Result<Self, LatticeError> {
        Self::new(entries.into_iter().map(|r| r.into_iter().map(ComplexExact::real).collect()).collect())
    }

    /// Convenience for tests and fixtures: rational entries `p/q`.
    pub fn rational(entries: &[&[(i64, i64)]]) -> Self {
        Self::real(
            entries
                .iter()
                .map(|r| r.iter().map(|&(p, q)| ExactScalar::ratio(p, q)).collect())
                .collect(),
        )
        .expect("rational matrices are always valid")
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Self::real(vec![vec![ExactScalar::zero(); n]; m]).expect("non-empty zero matrix")
    }

    /// Corank: the dimension of the torus `Tᵐ` carrying the frequencies `ξ`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Dimension of the base torus `Tⁿ`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entry(&self, k: usize, j: usize) -> &ComplexExact {
        &self.entries[k][j]
    }

    pub fn rows(&self) -> &[Vec<ComplexExact>] {
        &self.entries
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().flatten().all(|c| c.is_real())
    }

    pub fn is_rational(&self) -> bool {
        self.entries.iter().flatten().all(|c| c.is_gaussian_rational())
    }

    /// `Re A` as rationals, if `A` is real and rational.
    pub fn rational_real_part(&self) -> Option<Vec<Vec<BigRational>>> {
        if !self.is_real() {
            return None;
        }
        self.entries
            .iter()
            .map(|r| r.iter().map(|c| c.re.as_rational().cloned()).collect())
            .collect()
    }

    /// `ξᵀA`, an `n`-vector.
    pub fn pair(&self, xi: &[BigInt]) -> Vec<ComplexExact> {
        assert_eq!(xi.len(), self.m, "frequency length must equal the corank");
        (0..self.n)
            .map(|j| {
                let mut acc = ComplexExact::zero();
                for (k, x) in xi.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let r = BigRational::from_integer(x.clone());
                    acc = acc
                        .add(&self.entries[k][j].scale(&r))
                        .expect("column towers are validated at construction");
                }
                acc
            })
            .collect()
    }

    /// Adds an integer matrix to `Re A` (a change of cohomology representative).
    pub fn shifted_by_integers(&self, shift: &[Vec<i64>]) -> PeriodMatrix {
        let entries = self
            .entries
            .iter()
            .zip(shift)
            .map(|(row, srow)| {
                row.iter()
                    .zip(srow)
                    .map(|(c, &s)| ComplexExact {
                        re: c.re.add(&ExactScalar::from_int(s)).expect("rationals join any tower"),
                        im: c.im.clone(),
                    })
                    .collect()
            })
            .collect();
        PeriodMatrix::new(entries).expect("shape and towers unchanged")
    }

    pub(crate) fn re_tower(&self, j: usize) -> Tower {
        self.re_towers[j]
    }

    pub(crate) fn im_tower(&self, j: usize) -> Tower {
        self.im_towers[j]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    InGamma,
    NotInGamma,
}

/// Exact test of `ξᵀ·Re A ∈ Zⁿ` and `ξᵀ·Im A = 0`.
pub fn gamma_membership(a: &PeriodMatrix, xi: &[BigInt]) -> Membership {
    let member = a.pair(xi).iter().all(|c| c.re.is_integer() && c.im.is_zero());
    if member {
        Membership::InGamma
    } else {
        Membership::NotInGamma
    }
}

pub fn is_member(a: &PeriodMatrix, xi: &[BigInt]) -> bool {
    gamma_membership(a, xi) == Membership::InGamma
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "radius", rename_all = "snake_case")]
pub enum Completeness {
    Exact,
    BoxCertified(u32),
}

/// A basis of `Γ` in Hermite normal form.
///
/// `basis[j]` is the `j`-th basis vector `ξ^(j)` (a column of the `m × r`
/// basis matrix).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyLattice {
    m: usize,
    basis: IntMatrix,
    completeness: Completeness,
}

impl FrequencyLattice {
    pub fn new(m: usize, basis: IntMatrix, completeness: Completeness) -> Self {
        debug_assert!(basis.iter().all(|b| b.len() == m));
        FrequencyLattice { m, basis, completeness }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn completeness(&self) -> &Completeness {
        &self.completeness
    }

    pub fn contains(&self, xi: &[BigInt]) -> bool {
        solve_in_hermite(&self.basis, xi).is_some()
    }

    /// Lattice coordinates `η` with `ξ = Σ_j η_j ξ^(j)`.
    pub fn coordinates(&self, xi: &[BigInt]) -> Option<Vec<BigInt>> {
        solve_in_hermite(&self.basis, xi)
    }

    /// `Σ_j η_j ξ^(j)`.
    pub fn combine(&self, eta: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(eta.len(), self.rank());
        let mut xi = vec![BigInt::zero(); self.m];
        for (c, row) in eta.iter().zip(&self.basis) {
            for (x, b) in xi.iter_mut().zip(row) {
                *x += c * b;
            }
        }
        xi
    }

    pub fn index(&self) -> Option<BigInt> {
        (self.rank() == self.m).then(|| hermite_index(&self.basis).abs())
    }

    pub fn basis_strings(&self) -> Vec<Vec<String>> {
        self.basis.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaClass {
    /// `Γ = {0}`
    Zero,
    /// `{0} ⊊ Γ ⊊ Zᵐ`
    InfiniteProper,
    /// `Γ = Zᵐ`
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub class: GammaClass,
    pub completeness: Completeness,
}

pub fn classify(lattice: &FrequencyLattice) -> Classification {
    let class = if lattice.rank() == 0 {
        GammaClass::Zero
    } else if lattice.index().is_some_and(|d| d.is_one()) {
        GammaClass::Full
    } else {
        GammaClass::InfiniteProper
    };
    Classification { class, completeness: lattice.completeness().clone() }
}

/// The exact lattice with its canonical basis; see [`ExactLattice`].
pub fn gamma_lattice(a: &PeriodMatrix) -> FrequencyLattice {
    ExactLattice.compute(a, 0)
}

/// `(1/2π) ∮ ω_k` over the `ℓ`-th coordinate circle, by the trapezoid rule
/// with `samples` nodes. Returns `(re, im)` for each `k`.
///
/// Validates the convention that column `ℓ` of the period matrix is `v_ℓ`.
pub fn period_integral_oracle(a: &PeriodMatrix, ell: usize, samples: usize) -> Vec<(f64, f64)> {
    assert!(ell < a.n() && samples > 0);
    let two_pi = std::f64::consts::TAU;
    let h = two_pi / samples as f64;
    // σ_ℓ(s) = s·e_ℓ, so ω_k(σ'(s)) = Σ_j A_kj·δ_jℓ
    let velocity = |_s: f64| -> Vec<f64> { (0..a.n()).map(|j| if j == ell { 1.0 } else { 0.0 }).collect() };
    (0..a.m())
        .map(|k| {
            let coeffs: Vec<(f64, f64)> =
                a.rows()[k].iter().map(|c| (c.re.approx(), c.im.approx())).collect();
            let mut re = 0.0;
            let mut im = 0.0;
            for i in 0..samples {
                let v = velocity(i as f64 * h);
                for (c, vj) in coeffs.iter().zip(&v) {
                    re += c.0 * vj * h;
                    im += c.1 * vj * h;
                }
            }
            (re / two_pi, im / two_pi)
        })
        .collect()
}

#[cfg(test)]
pub(crate) fn int_vec(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().map(|&x| BigInt::from(x)).collect()
}
