use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use tube_core::diophantine::{
    check_condition, rational_verdict, simult_appr_violations, DiophantineVerdict,
};
use tube_core::fourier::{dprime, random_closed_form};
use tube_core::koszul::{mode_vector, ModeForm};
use tube_core::lattice::{gamma_lattice, is_member, LatticeRegistry, PeriodMatrix};
use tube_core::scalar::ExactScalar;
use tube_core::solver::{global_solve, norm_bound_holds, SolveOutcome};

/// Numerators and denominators of a small rational matrix.
fn raw_matrix(max_dim: usize) -> impl Strategy<Value = Vec<Vec<(i64, i64)>>> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(m, n)| {
        proptest::collection::vec(proptest::collection::vec((-12i64..=12, 1i64..=6), n), m)
    })
}

fn to_matrix(raw: &[Vec<(i64, i64)>]) -> PeriodMatrix {
    PeriodMatrix::real(raw.iter().map(|r| r.iter().map(|&(p, q)| ExactScalar::ratio(p, q)).collect()).collect()).unwrap()
}

/// `ξ ∈ Γ` iff `Σ_k ξ_k p_kj (L / q_kj) ≡ 0 (mod L)` for every column.
fn machine_member(raw: &[Vec<(i64, i64)>], xi: &[i64]) -> bool {
    let l: i64 = 60;
    (0..raw[0].len()).all(|j| {
        let s: i64 = raw.iter().zip(xi).map(|(row, &x)| x * row[j].0 * (l / row[j].1)).sum();
        s.rem_euclid(l) == 0
    })
}

fn points(m: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..m {
        out = out.into_iter().flat_map(|p| (-r..=r).map(move |x| [p.clone(), vec![x]].concat())).collect();
    }
    out
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn lattice_matches_box_membership(raw in raw_matrix(3)) {
        let a = to_matrix(&raw);
        let gamma = gamma_lattice(&a);
        for b in gamma.basis() {
            let b: Vec<i64> = b.iter().map(|x| i64::try_from(x).unwrap()).collect();
            prop_assert!(machine_member(&raw, &b));
        }
        for p in points(a.m(), 6) {
            prop_assert_eq!(gamma.contains(&big(&p)), machine_member(&raw, &p));
            prop_assert_eq!(is_member(&a, &big(&p)), machine_member(&raw, &p));
        }
    }

    #[test]
    fn strategies_agree_on_small_lattices(raw in raw_matrix(2)) {
        let a = to_matrix(&raw);
        let reg = LatticeRegistry::default();
        let exact = reg.get("exact").unwrap().compute(&a, 0);
        // rational Γ contains 60·Zᵐ, so generators lie within radius 60
        let boxed = reg.get("box").unwrap().compute(&a, 60);
        prop_assert_eq!(exact.basis(), boxed.basis());
    }

    #[test]
    fn solve_round_trip(raw in raw_matrix(3), seed in any::<u64>(), q in 1usize..=3) {
        let a = to_matrix(&raw);
        prop_assume!(q <= a.n());
        let f = random_closed_form(seed, &a, q, 3, false);
        let SolveOutcome::Solved { u, .. } = global_solve(&a, &f).unwrap() else {
            return Err(TestCaseError::fail("exact form reported obstructed"));
        };
        prop_assert_eq!(dprime(&a, &u).unwrap(), f.clone());
        for ((xi, kappa), fm) in f.iter() {
            let z = mode_vector(&a, xi, kappa).z;
            let um = u.get(xi, kappa).cloned().unwrap_or_else(|| ModeForm::zero(a.n(), q - 1));
            prop_assert!(norm_bound_holds(&z, fm, &um));
        }
    }

    #[test]
    fn obstruction_count_matches_zero_modes(raw in raw_matrix(2), seed in any::<u64>()) {
        let a = to_matrix(&raw);
        let q = a.n();
        let f = random_closed_form(seed, &a, q, 3, true);
        let expected: Vec<_> = f
            .iter()
            .filter(|((xi, kappa), c)| {
                !c.is_zero() && mode_vector(&a, xi, kappa).z.iter().all(|x| x.is_zero())
            })
            .map(|(mode, _)| mode.clone())
            .collect();
        match global_solve(&a, &f).unwrap() {
            SolveOutcome::Obstructed { witnesses } => {
                let got: Vec<_> = witnesses.into_iter().map(|(mode, _)| mode).collect();
                prop_assert_eq!(got, expected);
            }
            SolveOutcome::Solved { .. } => prop_assert!(expected.is_empty()),
        }
    }

    #[test]
    fn rational_bound_has_no_violations(raw in raw_matrix(2)) {
        let a = to_matrix(&raw);
        let DiophantineVerdict::WeaklyNonSA { c, rho, .. } = rational_verdict(&a).unwrap() else {
            return Err(TestCaseError::fail("rational verdict"));
        };
        let radius = if a.m() == 1 { 500 } else { 40 };
        prop_assert!(simult_appr_violations(&a, &c, &rho, radius, 20).is_empty());
    }

    #[test]
    fn integer_shifts_preserve_gaps(raw in raw_matrix(2), shift in proptest::collection::vec(-3i64..=3, 4)) {
        let a = to_matrix(&raw);
        let s: Vec<Vec<i64>> = (0..a.m()).map(|k| (0..a.n()).map(|j| shift[(k + j) % 4]).collect()).collect();
        let b = a.shifted_by_integers(&s);
        prop_assert_eq!(gamma_lattice(&a), gamma_lattice(&b));
        prop_assert_eq!(rational_verdict(&a).unwrap(), rational_verdict(&b).unwrap());
        for p in points(a.m(), 4) {
            let xi = big(&p);
            prop_assert_eq!(check_condition(&a, &xi, 20).gap, check_condition(&b, &xi, 20).gap);
        }
    }
}

#[test]
fn rational_constant_is_attained() {
    for den in 2..=9i64 {
        let a = PeriodMatrix::rational(&[&[(1, den)]]);
        let DiophantineVerdict::WeaklyNonSA { c, .. } = rational_verdict(&a).unwrap() else { panic!() };
        assert_eq!(c, BigRational::new(BigInt::one(), den.into()));
        let gap = check_condition(&a, &[BigInt::one()], 20).gap;
        assert_eq!(gap.lo(), &c);
        assert!(gap.width().is_zero());
    }
}
