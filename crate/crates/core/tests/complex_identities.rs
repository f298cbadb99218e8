use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tube_core::fourier::{dprime, embed, f_hat, random_form, FourierSlice};
use tube_core::koszul::{binomial, mode_cohomology_dim, mode_solve, wedge, ModeForm, ModeSolution, MultiIndex};
use tube_core::lattice::PeriodMatrix;
use tube_core::scalar::{ComplexExact, ExactScalar};
use tube_core::solver::norm_bound_holds;

type Q = BigRational;

fn q(x: i64) -> Q {
    Q::from_integer(x.into())
}

fn rational_matrix() -> impl Strategy<Value = PeriodMatrix> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(m, n)| {
        proptest::collection::vec((-9i64..=9, 1i64..=6), m * n).prop_map(move |raw| {
            let rows: Vec<Vec<ExactScalar>> =
                raw.chunks(n).map(|r| r.iter().map(|&(p, d)| ExactScalar::ratio(p, d)).collect()).collect();
            PeriodMatrix::real(rows).unwrap()
        })
    })
}

fn gaussian_vector(n: usize) -> impl Strategy<Value = Vec<ComplexExact>> {
    proptest::collection::vec((-3i64..=3, -3i64..=3), n)
        .prop_map(|v| v.into_iter().map(|(re, im)| ComplexExact::gaussian(q(re), q(im))).collect())
}

fn random_mode_form(n: usize, degree: usize, seed: u64) -> ModeForm {
    let mut f = ModeForm::zero(n, degree);
    let mut s = seed;
    for j in MultiIndex::all(n, degree) {
        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let re = ((s >> 33) % 11) as i64 - 5;
        let im = ((s >> 45) % 7) as i64 - 3;
        f.set(j, ComplexExact::gaussian(q(re), q(im)));
    }
    f
}

/// Rank over `Q(i)` by Gaussian elimination on `(re, im)` pairs.
fn complex_rank(mut rows: Vec<Vec<(Q, Q)>>) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mul = |a: &(Q, Q), b: &(Q, Q)| (&a.0 * &b.0 - &a.1 * &b.1, &a.0 * &b.1 + &a.1 * &b.0);
    let inv = |a: &(Q, Q)| {
        let n = &a.0 * &a.0 + &a.1 * &a.1;
        (&a.0 / &n, -&a.1 / &n)
    };
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !(rows[r][c].0.is_zero() && rows[r][c].1.is_zero())) else {
            continue;
        };
        rows.swap(rank, p);
        let pinv = inv(&rows[rank][c]);
        for r in 0..rows.len() {
            if r == rank || (rows[r][c].0.is_zero() && rows[r][c].1.is_zero()) {
                continue;
            }
            let factor = mul(&rows[r][c], &pinv);
            for k in 0..cols {
                let t = mul(&factor, &rows[rank][k]);
                rows[r][k] = (&rows[r][k].0 - &t.0, &rows[r][k].1 - &t.1);
            }
        }
        rank += 1;
    }
    rank
}

/// Matrix of `u ↦ z ∧ u` from degree `d` to `d + 1`, built from the sign rule directly.
fn wedge_matrix(z: &[(Q, Q)], d: usize) -> Vec<Vec<(Q, Q)>> {
    let n = z.len();
    let sources = MultiIndex::all(n, d);
    let targets = MultiIndex::all(n, d + 1);
    let mut rows = vec![vec![(Q::zero(), Q::zero()); sources.len()]; targets.len()];
    for (s, j) in sources.iter().enumerate() {
        for (k, zk) in z.iter().enumerate() {
            if j.indices().contains(&k) {
                continue;
            }
            let before = j.indices().iter().filter(|&&x| x < k).count();
            let mut idx = j.indices().to_vec();
            idx.push(k);
            idx.sort();
            let t = targets.iter().position(|m| m.indices() == idx.as_slice()).unwrap();
            rows[t][s] = if before % 2 == 0 { zk.clone() } else { (-&zk.0, -&zk.1) };
        }
    }
    rows
}

fn rank_nullity_dim(z: &[(Q, Q)], d: usize) -> usize {
    let n = z.len();
    let out_rank = if d < n { complex_rank(wedge_matrix(z, d)) } else { 0 };
    let in_rank = if d > 0 { complex_rank(wedge_matrix(z, d - 1)) } else { 0 };
    binomial(n, d) - out_rank - in_rank
}

fn parts(z: &[ComplexExact]) -> Vec<(Q, Q)> {
    z.iter().map(|c| (c.re.as_rational().unwrap().clone(), c.im.as_rational().unwrap().clone())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn cohomology_matches_rank_nullity(n in 1usize..=4, zero in any::<bool>(), z in gaussian_vector(4)) {
        let z: Vec<ComplexExact> = if zero { vec![ComplexExact::zero(); n] } else { z[..n].to_vec() };
        let zp = parts(&z);
        for d in 0..=n {
            prop_assert_eq!(mode_cohomology_dim(&z, d), rank_nullity_dim(&zp, d));
        }
    }

    #[test]
    fn koszul_homotopy_inverts_wedge(n in 1usize..=5, z in gaussian_vector(5), seed in any::<u64>(), d in 0usize..5) {
        let z = &z[..n];
        prop_assume!(z.iter().any(|c| !c.is_zero()) && d < n);
        let g = random_mode_form(n, d, seed);
        let f = wedge(z, &g).unwrap();
        match mode_solve(z, &f).unwrap() {
            ModeSolution::Solved(u) => {
                prop_assert_eq!(wedge(z, &u).unwrap(), f.clone());
                prop_assert!(norm_bound_holds(z, &f, &u));
            }
            other => prop_assert!(false, "unexpected {:?}", other),
        }
    }

    #[test]
    fn dprime_squares_to_zero(a in rational_matrix(), seed in any::<u64>(), q in 0usize..=3) {
        prop_assume!(q + 2 <= a.n());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_form(&mut rng, a.m(), a.n(), q, 4, 6);
        let ddf = dprime(&a, &dprime(&a, &f).unwrap()).unwrap();
        prop_assert!(ddf.is_zero());
    }

    #[test]
    fn slices_are_biorthogonal(seed in any::<u64>(), m in 1usize..=3, n in 1usize..=3, shift in 1i64..=4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_form(&mut rng, m, n, n / 2, 4, 6);
        let Some(xi) = f.rows().into_iter().next() else { return Ok(()) };
        let g = f_hat(&f, &xi);
        let mut eta = xi.clone();
        eta[0] += shift;
        prop_assert_eq!(f_hat(&embed(&xi, &g), &xi), g.clone());
        prop_assert!(f_hat(&embed(&eta, &g), &xi).is_zero());
    }

    #[test]
    fn slicing_commutes_with_dprime(a in rational_matrix(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_form(&mut rng, a.m(), a.n(), a.n() - 1, 4, 6);
        let df = dprime(&a, &f).unwrap();
        for xi in f.rows() {
            let lhs: FourierSlice = f_hat(&df, &xi);
            prop_assert_eq!(lhs, f_hat(&f, &xi).apply_dprime(&a, &xi).unwrap());
        }
    }
}

#[test]
fn dprime_squares_to_zero_on_irrational_structures() {
    let scalar = |s: &str| s.parse::<ExactScalar>().unwrap();
    let structures = [
        vec![vec![scalar("sqrt(2)"), scalar("1/3"), scalar("2-sqrt(2)")], vec![scalar("1/2-sqrt(2)"), scalar("0"), scalar("sqrt(2)")]],
        vec![vec![scalar("liouville(10)"), scalar("1/3"), scalar("0")], vec![scalar("2*liouville(10)"), scalar("1"), scalar("1/2")]],
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for rows in structures {
        let a = PeriodMatrix::real(rows).unwrap();
        for q in 0..=1 {
            let f = random_form(&mut rng, 2, 3, q, 3, 8);
            assert!(dprime(&a, &dprime(&a, &f).unwrap()).unwrap().is_zero());
        }
    }
}

#[test]
fn unit_covector_solution() {
    let one = ComplexExact::one();
    let z = vec![one.clone(), ComplexExact::zero()];
    let f = ModeForm::covector(&z);
    let ModeSolution::Solved(u) = mode_solve(&z, &f).unwrap() else { panic!() };
    assert_eq!(u.get(&MultiIndex::empty()), one);
}
