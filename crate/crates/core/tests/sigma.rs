use proptest::prelude::*;
use recmart_core::chain::for_each_path;
use recmart_core::martin::profile_from_boundary;
use recmart_core::models::{BangBang, Infinity, Ray, Tree, Word, ZEnd, ZWalk};
use recmart_core::sigma::{
    avoidance_function, cylinder_measure, expectation, nested_restriction_gap, restricted_measure, sequence_verdict,
    verify_concatenation, AvoidanceConfig, CylinderConfig, HorizonFunctional, Verdict,
};
use recmart_core::{rat, rint, Chain, PiRational, Rational};

const CAP: u64 = 1 << 22;

fn z_phi() -> recmart_core::martin::HarmonicProfile<i64> {
    profile_from_boundary(&ZWalk, &0, &ZEnd::Plus).unwrap()
}

#[test]
fn restricted_measure_examples() {
    let phi = z_phi();
    let f = HorizonFunctional::At { m: 1, state: 1, n: 1 };
    assert_eq!(restricted_measure(&ZWalk, &phi, &0, &f, CAP).unwrap().exact, Some(PiRational::from_int(1)));
    let one = HorizonFunctional::One { n: 0 };
    assert_eq!(restricted_measure(&ZWalk, &phi, &2, &one, CAP).unwrap().value, 4.0);
    let bb = BangBang::default();
    let phi_bb = profile_from_boundary(&bb, &0, &Infinity).unwrap();
    let f = HorizonFunctional::At { m: 1, state: 1u64, n: 1 };
    assert_eq!(restricted_measure(&bb, &phi_bb, &0, &f, CAP).unwrap().exact, Some(PiRational::from_int(4)));
}

/// Independent oracle: sum over explicit paths of `P(path) F(path) φ(X_n)`
/// with the profile written out by hand.
#[test]
fn restricted_measure_matches_enumeration() {
    let phi = z_phi();
    for n in 0..=6 {
        for x in -2..=3i64 {
            let f = HorizonFunctional::Avoid { state: -1, n };
            let mut want = rint(0);
            for_each_path(&ZWalk, &x, n, CAP, |path, p| {
                if path.iter().all(|s| *s != -1) {
                    want += p * rint(2 * path[n].max(0));
                }
            })
            .unwrap();
            let got = restricted_measure(&ZWalk, &phi, &x, &f, CAP).unwrap();
            assert_eq!(got.exact, Some(PiRational::rational(want)));
        }
    }
}

#[test]
fn cylinder_on_z_diverges_but_its_restriction_is_one() {
    let phi = z_phi();
    let a = HorizonFunctional::Path(vec![0, 1, 2]);
    let m = cylinder_measure(&ZWalk, &phi, &0, &a, &[4, 6, 8, 10, 12], &CylinderConfig::default()).unwrap();
    let exact: Vec<Rational> = m.sequence.iter().map(|s| s.exact.clone().unwrap().as_rational().unwrap().clone()).collect();
    assert_eq!(exact, vec![rint(1), rat(17, 16), rat(9, 8), rat(303, 256), rat(317, 256)]);
    assert!(exact.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(m.verdict, Some(Verdict::Diverges));
    assert!(m.infinite);
    let restricted = restricted_measure(&ZWalk, &phi, &0, &a, CAP).unwrap();
    assert_eq!(restricted.exact, Some(PiRational::from_int(1)));
    // Cylinders that do not start at x are null.
    let off = HorizonFunctional::Path(vec![1, 2]);
    let m = cylinder_measure(&ZWalk, &phi, &0, &off, &[2, 4, 6], &CylinderConfig::default()).unwrap();
    assert!(m.sequence.iter().all(|s| s.value == 0.0));
    assert_eq!(m.verdict, Some(Verdict::Converged));
}

#[test]
fn cylinder_falls_back_to_sampling() {
    let phi = z_phi();
    let a = HorizonFunctional::At { m: 3, state: 1, n: 3 };
    let tight = CylinderConfig { path_cap: 4, mc_trajectories: 2000, stream: None };
    assert!(cylinder_measure(&ZWalk, &phi, &0, &a, &[4], &tight).is_err());
    let sampled = CylinderConfig { stream: Some(recmart_core::SeedStream::new(1)), ..tight };
    let m = cylinder_measure(&ZWalk, &phi, &0, &a, &[3, 5], &sampled).unwrap();
    assert!(m.sequence.iter().all(|s| s.stderr.is_some()));
    // E_0[1{X_3 = 1} φ(X_3)] = (3/8) 2.
    let s = &m.sequence[0];
    assert!((s.value - 0.75).abs() < 4.0 * s.stderr.unwrap());
}

#[test]
fn verdicts() {
    assert_eq!(sequence_verdict(&[1.0, 2.0, 3.0, 4.0]), Verdict::Diverges);
    assert_eq!(sequence_verdict(&[1.0, 1.5, 1.75, 1.875]), Verdict::Undetermined);
    assert_eq!(sequence_verdict(&[2.0, 2.0]), Verdict::Converged);
    assert_eq!(sequence_verdict(&[0.0, 0.0]), Verdict::Converged);
}

#[test]
fn concatenation_identity() {
    let phi = z_phi();
    for (n, p) in [(1, 3), (2, 4)] {
        for y in [-1, 0, 1, 2] {
            let rep = verify_concatenation(&ZWalk, &phi, &0, &y, n, p, CAP).unwrap();
            assert!(rep.passed(), "{n} {p} {y}");
        }
    }
    let rep = verify_concatenation(&ZWalk, &phi, &0, &5, 1, 3, CAP).unwrap();
    assert!(rep.passed());
    assert_eq!(rep.nonzero_terms, 0);
    let t = Tree::new(2).unwrap();
    let tphi = profile_from_boundary(&t, &Word::root(), &Ray::constant(0)).unwrap();
    for (n, p) in [(1, 3), (2, 4)] {
        for y in ["0", "1", "@", "0.0"] {
            let y = t.parse_state(y).unwrap();
            assert!(verify_concatenation(&t, &tphi, &Word::root(), &y, n, p, CAP).unwrap().passed());
        }
    }
}

#[test]
fn concatenation_detects_a_broken_profile() {
    use recmart_core::martin::{HarmonicProfile, Provenance};
    // With a non-harmonic φ, restricting at different horizons disagrees.
    let sq = HarmonicProfile::rational(0i64, Provenance::User("x^2".into()), |x: &i64| rint(x * x));
    let f = HorizonFunctional::At { m: 1, state: 1, n: 1 };
    assert!(!nested_restriction_gap(&ZWalk, &sq, &0, &f, 3, CAP).unwrap().is_zero());
    assert!(nested_restriction_gap(&ZWalk, &z_phi(), &0, &f, 5, CAP).unwrap().is_zero());
}

#[test]
fn avoidance_examples() {
    let phi = z_phi();
    let cfg = AvoidanceConfig::default();
    for x in [2i64, 3, 4] {
        let v = avoidance_function(&ZWalk, &phi, &x, &1, &cfg).unwrap();
        let b = v.bracket.unwrap();
        let want = 2.0 * (x - 1) as f64;
        assert!(b.contains(want), "{x}: {b:?}");
        assert!(b.width() < 0.05 * want);
        assert!(v.sequence.windows(2).all(|w| w[1].value <= w[0].value + 1e-12));
    }
    assert_eq!(avoidance_function(&ZWalk, &phi, &1, &1, &cfg).unwrap().value, 0.0);
    let bb = BangBang::default();
    let phi_bb = profile_from_boundary(&bb, &0, &Infinity).unwrap();
    assert_eq!(avoidance_function(&bb, &phi_bb, &0, &0, &cfg).unwrap().value, 0.0);
}

/// Where y does not separate x from the base point the bracket comes from
/// the first-passage decomposition `φ(x) − φ(y) + K(1 − h)/a`. On Z from
/// x = −2 with y = 1: h = 0 and a = 1/2, so `Q^{+∞}` gives 0 − 2 + 1·2 = 0
/// and the two-sided profile 2|x| (K = 2) gives 4 − 2 + 2·2 = 6.
#[test]
fn avoidance_without_separation() {
    let cfg = AvoidanceConfig { horizons: vec![1024, 16384], rel_tol: 0.05, prune: 1e-30 };
    let v = avoidance_function(&ZWalk, &z_phi(), &-2, &1, &cfg).unwrap();
    assert!(v.bracket.unwrap().contains(0.0), "{:?}", v.bracket);
    let mu = recmart_core::martin::BoundaryMixture { atoms: vec![(ZEnd::Plus, rint(1)), (ZEnd::Minus, rint(1))] };
    let both = recmart_core::martin::mixture_profile(&ZWalk, &0, &mu).unwrap();
    let v = avoidance_function(&ZWalk, &both, &-2, &1, &cfg).unwrap();
    let b = v.bracket.unwrap();
    assert!(b.contains(6.0) && b.width() < 0.5, "{b:?}");
    // Bang-bang: from x = 3, avoiding y = 5 forces nothing about 0.
    let bb = BangBang::default();
    let phi_bb = profile_from_boundary(&bb, &0, &Infinity).unwrap();
    let v = avoidance_function(&bb, &phi_bb, &3, &5, &AvoidanceConfig::default()).unwrap();
    assert_eq!(v.verdict, Some(Verdict::Closed));
    assert!(v.bracket.unwrap().lower <= v.certified_upper.unwrap());
}

proptest! {
    #[test]
    fn expectation_is_linear_in_phi(x in -3i64..4, n in 0usize..6, c in 1i64..5) {
        let phi = z_phi();
        let f = HorizonFunctional::Avoid { state: 0, n };
        let a = expectation(&ZWalk, &phi, &x, &f, CAP).unwrap();
        let b = expectation(&ZWalk, &phi.scaled(rint(c)), &x, &f, CAP).unwrap();
        prop_assert_eq!(a.scale(&rint(c)), b);
    }

    #[test]
    fn restriction_does_not_depend_on_the_horizon(x in -2i64..4, m in 0usize..3, extra in 0usize..4) {
        let phi = z_phi();
        let f = HorizonFunctional::At { m, state: 1, n: m };
        prop_assert!(nested_restriction_gap(&ZWalk, &phi, &x, &f, m + extra, CAP).unwrap().is_zero());
    }
}
