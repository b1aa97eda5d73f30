use proptest::prelude::*;
use recmart_core::green::{martin_kernel, KernelMethod, Policy, Truncation};
use recmart_core::martin::{
    check_harmonic_except, decompose_profile_z, mixture_profile, parse_mixture, profile_from_boundary, total_mass,
    BoundaryMixture, HarmonicProfile, Provenance,
};
use recmart_core::models::{BangBang, ClosedForms, Infinity, Ray, Tree, Word, ZEnd, ZWalk, Z2Infinity, Z2Walk};
use recmart_core::{chain::ball, rat, rint, Chain, PiRational};

#[test]
fn z_profiles() {
    let phi = profile_from_boundary(&ZWalk, &0, &ZEnd::Plus).unwrap();
    for x in -10..=10 {
        assert_eq!(phi.evaluate(&x), PiRational::from_int(2 * x.max(0)));
    }
    let rep = check_harmonic_except(&ZWalk, &phi, &0, &(-5..=5).collect::<Vec<_>>()).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.balance_at_base, Some(PiRational::from_int(1)));
    // A base point other than 0: the rebased profile and the limit of the
    // solved Martin kernel.
    let phi1 = profile_from_boundary(&ZWalk, &1, &ZEnd::Plus).unwrap();
    assert!(phi1.evaluate(&1).is_zero());
    assert!(check_harmonic_except(&ZWalk, &phi1, &1, &(-10..=10).collect::<Vec<_>>()).unwrap().passed());
    for y in [20, 40, 80] {
        let trunc = Truncation::new(1, 100, Policy::Reflect);
        for x in [2i64, 5, 9, -3] {
            let l = martin_kernel(&ZWalk, &1, &x, &y, KernelMethod::Solve(&trunc)).unwrap().value;
            let beta1 = recmart_core::to_f64(&ZWalk.beta(&1));
            assert!((l / beta1 - phi1.evaluate_f64(&x)).abs() < 1e-9, "{x} {y}");
        }
    }
}

#[test]
fn corrupted_profile_has_unit_residuals() {
    let sq = HarmonicProfile::rational(0i64, Provenance::User("x^2".into()), |x: &i64| rint(x * x));
    let rep = check_harmonic_except(&ZWalk, &sq, &0, &(-5..=5).collect::<Vec<_>>()).unwrap();
    assert!(!rep.passed());
    assert_eq!(rep.failures().count(), 10);
    assert!(rep.residuals.iter().all(|(_, r)| *r == PiRational::from_int(1)));
    assert_eq!(rep.max_abs_residual(), 1.0);
}

#[test]
fn bangbang_profile_and_mass() {
    let bb = BangBang::default();
    let phi = profile_from_boundary(&bb, &0, &Infinity).unwrap();
    for x in 0..10u64 {
        assert_eq!(phi.evaluate(&x), PiRational::from_int(4 * ((1 << x) - 1)));
    }
    let rep = check_harmonic_except(&bb, &phi, &0, &(0..=8).collect::<Vec<_>>()).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.balance_at_base, Some(PiRational::from_int(4)));
    assert_eq!(total_mass(&bb, &phi).unwrap(), PiRational::rational(rint(1) / bb.beta(&0)));
}

#[test]
fn tree_profile_and_mass() {
    let t = Tree::new(2).unwrap();
    let alpha = Ray::constant(0);
    let phi = profile_from_boundary(&t, &Word::root(), &alpha).unwrap();
    assert_eq!(phi.evaluate(&t.parse_state("0.0").unwrap()), PiRational::from_int(3));
    let rep = check_harmonic_except(&t, &phi, &Word::root(), &ball(&t, &Word::root(), 6).unwrap()).unwrap();
    assert!(rep.passed());
    assert_eq!(total_mass(&t, &phi).unwrap(), PiRational::rational(rat(1, 2)));
    let t3 = Tree::new(3).unwrap();
    let alpha = t3.parse_boundary("2.1(0.2)*").unwrap();
    let phi = profile_from_boundary(&t3, &Word::root(), &alpha).unwrap();
    assert!(check_harmonic_except(&t3, &phi, &Word::root(), &ball(&t3, &Word::root(), 4).unwrap()).unwrap().passed());
    assert_eq!(total_mass(&t3, &phi).unwrap(), PiRational::rational(rat(2, 3)));
}

#[test]
fn z2_profile_is_the_potential_kernel() {
    let walk = Z2Walk::new();
    let phi = profile_from_boundary(&walk, &(0, 0), &Z2Infinity).unwrap();
    assert_eq!(phi.evaluate(&(1, 1)), PiRational::inv_pi(rint(4)));
    let rep = check_harmonic_except(&walk, &phi, &(0, 0), &ball(&walk, &(0, 0), 10).unwrap()).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.balance_at_base, Some(PiRational::from_int(1)));
}

#[test]
fn mixtures() {
    let mu = BoundaryMixture { atoms: vec![(ZEnd::Plus, rint(1)), (ZEnd::Minus, rint(1))] };
    let phi = mixture_profile(&ZWalk, &0, &mu).unwrap();
    for x in -6..=6i64 {
        assert_eq!(phi.evaluate(&x), PiRational::from_int(2 * x.abs()));
    }
    assert_eq!(total_mass(&ZWalk, &phi).unwrap(), PiRational::from_int(2));
    let empty = mixture_profile(&ZWalk, &0, &BoundaryMixture::default()).unwrap();
    assert!((-5..=5).all(|x| empty.evaluate(&x).is_zero()));
    assert!(mixture_profile(&ZWalk, &3, &mu).is_err());

    let back = decompose_profile_z(&phi, 30).unwrap();
    assert_eq!(back, mu);
    let plus = profile_from_boundary(&ZWalk, &0, &ZEnd::Plus).unwrap();
    assert_eq!(decompose_profile_z(&plus, 30).unwrap().atoms, vec![(ZEnd::Plus, rint(1)), (ZEnd::Minus, rint(0))]);
    let half = plus.scaled(rat(1, 2));
    assert_eq!(decompose_profile_z(&half, 30).unwrap().atoms[0].1, rat(1, 2));
    let sq = HarmonicProfile::rational(0i64, Provenance::User("x^2".into()), |x: &i64| rint(x * x));
    assert!(decompose_profile_z(&sq, 10).is_err());
}

#[test]
fn mixture_parsing() {
    let z = ZWalk;
    let mu = parse_mixture("1/2*+inf+3*-inf", |s| z.parse_boundary(s)).unwrap();
    assert_eq!(mu.atoms, vec![(ZEnd::Plus, rat(1, 2)), (ZEnd::Minus, rint(3))]);
    assert_eq!(mu.total_mass(), rat(7, 2));
    let mu = parse_mixture("+inf", |s| z.parse_boundary(s)).unwrap();
    assert_eq!(mu.atoms, vec![(ZEnd::Plus, rint(1))]);
    let t = Tree::new(2).unwrap();
    let mu = parse_mixture("2*0.1(0)*+(1)*", |s| t.parse_boundary(s)).unwrap();
    assert_eq!(mu.atoms.len(), 2);
    assert_eq!(mu.total_mass(), rint(3));
    assert!(parse_mixture("2*up", |s| z.parse_boundary(s)).is_err());
}

proptest! {
    #[test]
    fn mixture_masses_add_up(a in 0i64..20, b in 0i64..20, d in 1i64..7) {
        let mu = BoundaryMixture { atoms: vec![(ZEnd::Plus, rat(a, d)), (ZEnd::Minus, rat(b, d))] };
        let phi = mixture_profile(&ZWalk, &0, &mu).unwrap();
        prop_assert_eq!(total_mass(&ZWalk, &phi).unwrap(), PiRational::rational(mu.total_mass()));
        prop_assert!(check_harmonic_except(&ZWalk, &phi, &0, &(-8..=8).collect::<Vec<_>>()).unwrap().passed());
    }

    #[test]
    fn tree_rays_have_mass_one_over_beta(prefix in proptest::collection::vec(0u8..3, 0..4), period in proptest::collection::vec(0u8..3, 1..3)) {
        let t = Tree::new(3).unwrap();
        let alpha = Ray::new(prefix, period).unwrap();
        let phi = profile_from_boundary(&t, &Word::root(), &alpha).unwrap();
        prop_assert_eq!(total_mass(&t, &phi).unwrap(), PiRational::rational(rint(1) / t.beta(&Word::root())));
        let deep = alpha.prefix_word(5);
        let mut s = PiRational::zero();
        for (y, p) in t.successors(&deep).unwrap() {
            s += &phi.evaluate(&y).scale(&p);
        }
        prop_assert_eq!(s, phi.evaluate(&deep));
    }
}
