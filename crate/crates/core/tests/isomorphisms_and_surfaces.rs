use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tube_core::diophantine::CertifyConfig;
use tube_core::fourier::{dt_only, f_hat, random_form, TubeForm};
use tube_core::isomorphisms::{
    frequency_norm_constants, strong_isomorphism_report, tee_map, theta_star, theta_star_inverse, ShearMap,
    TorusFunction,
};
use tube_core::koszul::{binomial, MultiIndex};
use tube_core::lattice::{gamma_lattice, FrequencyLattice, GammaClass, PeriodMatrix};
use tube_core::scalar::{ComplexExact, ExactScalar};
use tube_core::surfaces::{
    dm_failure_summary, euler_characteristic, euler_index_check, finiteness_classifier, mode_dims, DegreeVerdict,
    LambdaClass, SurfaceProfile, Tristate,
};

fn rational_matrix(max_dim: usize) -> impl Strategy<Value = PeriodMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(m, n)| {
        proptest::collection::vec((-8i64..=8, 1i64..=5), m * n).prop_map(move |raw| {
            let rows = raw.chunks(n).map(|r| r.iter().map(|&(p, q)| ExactScalar::ratio(p, q)).collect()).collect();
            PeriodMatrix::real(rows).unwrap()
        })
    })
}

/// A random form on `T^r` pushed onto the `Γ` cluster by `η ↦ Bη`.
fn gamma_supported(lattice: &FrequencyLattice, n: usize, q: usize, seed: u64) -> TubeForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let on_torus = random_form(&mut rng, lattice.rank(), n, q, 3, 6);
    let mut f = TubeForm::unbounded(lattice.m(), n, q);
    for ((eta, kappa), c) in on_torus.iter() {
        f.set(lattice.combine(eta), kappa.clone(), c.clone()).unwrap();
    }
    f
}

fn big(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shear_conjugates_dprime_to_dt(a in rational_matrix(3), seed in any::<u64>(), q in 0usize..3) {
        prop_assume!(q < a.n());
        let shear = ShearMap::new(&a).unwrap();
        let f = gamma_supported(shear.lattice(), a.n(), q, seed);
        prop_assert!(shear.conjugation_check(&f).unwrap());
        prop_assert_eq!(shear.theta_inverse(&shear.theta(&f).unwrap()).unwrap(), f);
    }

    #[test]
    fn pullback_round_trips(a in rational_matrix(3), seed in any::<u64>()) {
        let lattice = gamma_lattice(&a);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = TorusFunction::new(lattice.rank());
        for _ in 0..5 {
            let eta: Vec<i64> = (0..lattice.rank()).map(|_| rng.gen_range(-3..=3)).collect();
            g.set(big(&eta), ComplexExact::gaussian(BigRational::from_integer(rng.gen_range(-4..=4).into()), BigRational::zero()));
        }
        let f = theta_star(&g, &lattice, a.n()).unwrap();
        prop_assert_eq!(theta_star_inverse(&f, &lattice).unwrap(), g.clone());
        let zero = vec![BigInt::zero(); a.n()];
        for (eta, c) in &g.coeffs {
            let slice = f_hat(&f, &lattice.combine(eta));
            prop_assert_eq!(slice.two_pi_exp, g.two_pi_exp + a.m() as i32);
            prop_assert_eq!(slice.modes[&zero].get(&MultiIndex::empty()), c.clone());
        }
    }

    #[test]
    fn frequency_norms_are_comparable(a in rational_matrix(3), eta in proptest::collection::vec(-20i64..=20, 3)) {
        let lattice = gamma_lattice(&a);
        let eta = big(&eta[..lattice.rank()]);
        let (c, upper) = frequency_norm_constants(&lattice);
        let sup = |v: &[BigInt]| v.iter().map(|x| x.magnitude().clone()).max().map(BigInt::from).unwrap_or_default();
        let image = BigRational::from_integer(sup(&lattice.combine(&eta)));
        let norm = BigRational::from_integer(sup(&eta));
        prop_assert!(&c * &norm <= image);
        prop_assert!(image <= BigRational::from_integer(upper) * norm);
    }

    #[test]
    fn exact_forms_map_to_zero(a in rational_matrix(2), seed in any::<u64>()) {
        let lattice = gamma_lattice(&a);
        let g = gamma_supported(&lattice, a.n(), 0, seed);
        let f = dt_only(&g).unwrap();
        let t = tee_map(&f, &lattice).unwrap();
        prop_assert!(t.values().all(TorusFunction::is_zero));
    }
}

#[test]
fn vanishing_off_gamma_on_small_tori() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let cfg = CertifyConfig { radius: 8, ..CertifyConfig::default() };
    for _ in 0..12 {
        let m = rng.gen_range(1..=2usize);
        let n = rng.gen_range(1..=3 - m);
        let rows = (0..m)
            .map(|_| (0..n).map(|_| ExactScalar::ratio(rng.gen_range(-7..=7), rng.gen_range(1..=6))).collect())
            .collect();
        let a = PeriodMatrix::real(rows).unwrap();
        for q in 0..=n {
            let r = strong_isomorphism_report(&a, q, 8, &cfg);
            assert!(r.vanishing_holds(), "{:?}", r.vanishing_failures);
            assert_eq!(r.de_rham_dim, binomial(n, q));
            assert!(r.frequencies_checked > 0 || gamma_lattice(&a).rank() == m);
        }
    }
}

#[test]
fn surface_dimensions_and_index() {
    for g in 0..=100u32 {
        assert_eq!(mode_dims(g, true), (1, 2 * g as u64, 1));
        if g >= 1 {
            assert_eq!(mode_dims(g, false), (0, 2 * g as u64 - 2, 0));
        }
        assert!(euler_index_check(g));
        assert_eq!(euler_characteristic(g), 2 - 2 * g as i64);
    }
}

/// Every `(genus, Γ class, closed range)` combination against an independent table.
#[test]
fn classifier_exhaustive() {
    use DegreeVerdict::*;
    let classes = [GammaClass::Zero, GammaClass::InfiniteProper, GammaClass::Full];
    let states = [Tristate::Yes, Tristate::No, Tristate::Unknown];
    for genus in 0..=6u32 {
        for &gamma_class in &classes {
            for &cr in &states {
                let got = finiteness_classifier(&SurfaceProfile { genus, gamma_class, degree1_closed_range: cr });
                let follow = |yes| match cr {
                    Tristate::Yes => yes,
                    Tristate::No => Infinite,
                    Tristate::Unknown => ConditionalOnSolvability,
                };
                let expected = match (genus, gamma_class) {
                    (0, _) => [Infinite, follow(ZeroSpace), Infinite],
                    (1, GammaClass::Zero) => [FiniteIsoDeRham, follow(FiniteIsoDeRham), ConditionalOnSolvability],
                    (_, GammaClass::Zero) => [FiniteIsoDeRham, Infinite, FiniteIsoDeRham],
                    _ => [Infinite; 3],
                };
                assert_eq!(got, expected, "genus {genus}, {gamma_class:?}, {cr:?}");
            }
        }
    }
}

#[test]
fn failure_summary_structure() {
    for g in 2..=10 {
        let irr = dm_failure_summary(g, LambdaClass::NonLiouvilleIrrational).unwrap();
        assert_eq!(irr.gamma_class, GammaClass::Zero);
        assert_eq!(irr.closed_range, Tristate::Yes);
        assert_eq!(irr.h1, DegreeVerdict::Infinite);
        assert_eq!(irr.de_rham_iso_holds, Some(false));
        assert!(irr.conclusion.contains("cannot be isomorphic"));
        let liou = dm_failure_summary(g, LambdaClass::Liouville).unwrap();
        assert_eq!((liou.closed_range, liou.h1), (Tristate::No, DegreeVerdict::Infinite));
        let rat = dm_failure_summary(g, LambdaClass::RationalQ).unwrap();
        assert_ne!(rat.gamma_class, GammaClass::Zero);
    }
    assert!(dm_failure_summary(1, LambdaClass::Liouville).is_err());
}
