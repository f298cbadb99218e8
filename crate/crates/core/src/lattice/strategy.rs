use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use super::{is_member, Completeness, FrequencyLattice, PeriodMatrix};
use crate::intmat::{hermite_rows, smith_normal_form, solve_in_hermite, IntMatrix};
use crate::scalar::Tower;

/// A way of producing a basis of `Γ` from a period matrix.
pub trait LatticeStrategy: Send + Sync {
    fn name(&self) -> &'static str;

    fn describe(&self) -> &'static str;

    /// `radius` bounds the search for strategies that enumerate; exact
    /// strategies ignore it.
    fn compute(&self, a: &PeriodMatrix, radius: u32) -> FrequencyLattice;
}

/// Reduces membership to integer linear algebra.
///
/// Each column of `A` lives in one tower `Q` or `Q + Q·α` with `α` irrational,
/// so `ξᵀ·col ∈ Z` splits into `ξ·(rational parts) ∈ Z` plus
/// `ξ·(α-coefficients) = 0`; the imaginary parts must vanish outright. The
/// congruences are solved with a Smith normal form, the kernel conditions
/// with a second one, and the result is put in Hermite normal form.
pub struct ExactLattice;

/// Enumerates `|ξ|_∞ <= radius`, keeps the members, and spans them.
pub struct BoxLattice;

impl LatticeStrategy for ExactLattice {
    fn name(&self) -> &'static str {
        "exact"
    }

    fn describe(&self) -> &'static str {
        "Smith normal form over the rational and irrational parts of each column"
    }

    fn compute(&self, a: &PeriodMatrix, _radius: u32) -> FrequencyLattice {
        let m = a.m();
        let mut congruences: Vec<Vec<BigRational>> = Vec::new();
        let mut kernels: Vec<Vec<BigRational>> = Vec::new();
        for j in 0..a.n() {
            let re: Vec<_> = (0..m).map(|k| a.entry(k, j).re.parts()).collect();
            let im: Vec<_> = (0..m).map(|k| a.entry(k, j).im.parts()).collect();
            congruences.push(re.iter().map(|p| p.0.clone()).collect());
            if a.re_tower(j) != Tower::Rational {
                kernels.push(re.iter().map(|p| p.1.clone()).collect());
            }
            kernels.push(im.iter().map(|p| p.0.clone()).collect());
            if a.im_tower(j) != Tower::Rational {
                kernels.push(im.iter().map(|p| p.1.clone()).collect());
            }
        }
        kernels.retain(|c| c.iter().any(|x| !x.is_zero()));

        let mut basis = congruence_lattice(m, &congruences);
        if !kernels.is_empty() {
            basis = restrict_to_kernel(m, &basis, &kernels);
        }
        FrequencyLattice::new(m, hermite_rows(&basis, m), Completeness::Exact)
    }
}

/// Columns as rational vectors of length `m`, scaled to integers; returns
/// the common denominator and the `m × cols` integer matrix.
fn clear_denominators(m: usize, columns: &[Vec<BigRational>]) -> (BigInt, IntMatrix) {
    let d = columns.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mat = (0..m)
        .map(|k| columns.iter().map(|c| (&c[k] * BigRational::from_integer(d.clone())).to_integer()).collect())
        .collect();
    (d, mat)
}

/// `{ξ ∈ Zᵐ : ξ·c ∈ Z for every column c}` as basis rows.
fn congruence_lattice(m: usize, columns: &[Vec<BigRational>]) -> IntMatrix {
    let p = columns.len();
    let (d, mat) = clear_denominators(m, columns);
    let smith = smith_normal_form(&mat, m, p);
    // ξᵀ = ζᵀU and ξᵀM = ζᵀSV⁻¹, so the condition is ζ_i s_i ≡ 0 (mod D)
    (0..m)
        .map(|i| {
            let s = smith.diagonal.get(i).cloned().unwrap_or_default();
            let step = &d / d.gcd(&s);
            smith.u[i].iter().map(|x| x * &step).collect()
        })
        .collect()
}

/// Sublattice of `span(basis)` annihilated by every kernel column.
fn restrict_to_kernel(m: usize, basis: &IntMatrix, kernels: &[Vec<BigRational>]) -> IntMatrix {
    let (_, kmat) = clear_denominators(m, kernels);
    let k = kernels.len();
    let r = basis.len();
    // N[i][c] = basis[i] · kmat[·][c]
    let n: IntMatrix = basis
        .iter()
        .map(|b| (0..k).map(|c| (0..m).fold(BigInt::zero(), |acc, t| acc + &b[t] * &kmat[t][c])).collect())
        .collect();
    let smith = smith_normal_form(&n, r, k);
    let rank = smith.rank();
    (rank..r)
        .map(|i| {
            let mut xi = vec![BigInt::zero(); m];
            for (c, b) in smith.u[i].iter().zip(basis) {
                for (x, bt) in xi.iter_mut().zip(b) {
                    *x += c * bt;
                }
            }
            xi
        })
        .collect()
}

impl LatticeStrategy for BoxLattice {
    fn name(&self) -> &'static str {
        "box"
    }

    fn describe(&self) -> &'static str {
        "exact membership over the box |xi|_inf <= radius, spanned in Hermite normal form"
    }

    fn compute(&self, a: &PeriodMatrix, radius: u32) -> FrequencyLattice {
        let m = a.m();
        let members = box_members(a, radius);
        let mut basis: IntMatrix = Vec::new();
        for xi in members {
            if solve_in_hermite(&basis, &xi).is_none() {
                basis.push(xi);
                basis = hermite_rows(&basis, m);
            }
        }
        FrequencyLattice::new(m, basis, Completeness::BoxCertified(radius))
    }
}

/// All `ξ` with `|ξ|_∞ <= radius`, in lexicographic order.
pub fn box_points(m: usize, radius: u32) -> impl Iterator<Item = Vec<i64>> {
    let r = radius as i64;
    let side = (2 * r + 1) as u64;
    let total = side.pow(m as u32);
    (0..total).map(move |mut idx| {
        let mut xi = vec![0i64; m];
        for slot in xi.iter_mut().rev() {
            *slot = (idx % side) as i64 - r;
            idx /= side;
        }
        xi
    })
}

fn box_members(a: &PeriodMatrix, radius: u32) -> Vec<Vec<BigInt>> {
    let points: Vec<Vec<i64>> = box_points(a.m(), radius).collect();
    points
        .par_iter()
        .filter_map(|p| {
            let xi: Vec<BigInt> = p.iter().map(|&x| BigInt::from(x)).collect();
            is_member(a, &xi).then_some(xi)
        })
        .collect()
}

/// Name-keyed set of lattice strategies.
pub struct LatticeRegistry {
    strategies: Vec<Box<dyn LatticeStrategy>>,
}

impl LatticeRegistry {
    pub fn empty() -> Self {
        LatticeRegistry { strategies: Vec::new() }
    }

    pub fn register(&mut self, strategy: Box<dyn LatticeStrategy>) {
        self.strategies.retain(|s| s.name() != strategy.name());
        self.strategies.push(strategy);
    }

    pub fn get(&self, name: &str) -> Option<&dyn LatticeStrategy> {
        self.strategies.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.strategies.iter().map(|s| s.name()).collect()
    }
}

impl Default for LatticeRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(ExactLattice));
        r.register(Box::new(BoxLattice));
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::int_vec;

    #[test]
    fn box_strategy_agrees_on_small_examples() {
        let a = PeriodMatrix::rational(&[&[(1, 2), (0, 1)], &[(0, 1), (1, 3)]]);
        let exact = ExactLattice.compute(&a, 0);
        let boxed = BoxLattice.compute(&a, 6);
        assert_eq!(exact.basis(), boxed.basis());
        assert_eq!(boxed.completeness(), &Completeness::BoxCertified(6));
    }

    #[test]
    fn registry_lookup() {
        let r = LatticeRegistry::default();
        assert_eq!(r.names(), vec!["exact", "box"]);
        assert!(r.get("exact").is_some());
        assert!(r.get("nope").is_none());
    }

    #[test]
    fn box_points_cover_box() {
        let pts: Vec<_> = box_points(2, 1).collect();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], vec![-1, -1]);
        assert_eq!(pts[8], vec![1, 1]);
        let _ = int_vec(&[0]);
    }
}
