use std::collections::BTreeMap;

use proptest::prelude::*;

use super::*;
use crate::coeff::Field;
use crate::gb::GbConfig;

fn u_ring(d: u32, l: u32, invert_x: bool) -> PresentedRing {
    let f = format!("y^{l} + x - x^{d}*z");
    let mut inv = vec![(f.as_str(), "w")];
    if invert_x {
        inv.push(("x", "x_inv"));
    }
    PresentedRing::from_strings(&["x", "y", "z"], &[], &inv, Field::Rational).unwrap()
}

fn d_dl(ring: &PresentedRing, d: u32, l: u32) -> Derivation {
    let dy = format!("x^{d}");
    let dz = format!("{l}*y^{}", l - 1);
    Derivation::from_strings(ring, &[("x", "0"), ("y", &dy), ("z", &dz)], "D").unwrap()
}

#[test]
fn forced_inverse_image_vanishes() {
    let r = u_ring(1, 2, false);
    let d = d_dl(&r, 1, 2);
    assert!(d.image_of("w").unwrap().is_zero());
    let f = r.parse("y^2 + x - x*z").unwrap();
    assert!(kernel_member(&d, &f).unwrap().member);
    let y = kernel_member(&d, &r.var("y").unwrap()).unwrap();
    assert!(!y.member);
    assert_eq!(y.evidence.to_string(), "x");
}

#[test]
fn zero_derivation_is_well_defined_with_unit_chains() {
    let r = u_ring(2, 3, false);
    let d = Derivation::from_strings(&r, &[("x", "0"), ("y", "0"), ("z", "0")], "0").unwrap();
    let c = check_locally_nilpotent(&d, None).unwrap();
    for v in r.vars() {
        assert_eq!(c.chain_length(v), Some(1));
    }
    let e = exponential(&d, &c, "t").unwrap();
    for (i, img) in e.images().iter().enumerate() {
        assert_eq!(img.to_string(), r.vars()[i]);
    }
}

#[test]
fn partial_on_double_point_is_not_well_defined() {
    let r = PresentedRing::from_strings(&["x", "y"], &["y^2"], &[], Field::Rational).unwrap();
    match Derivation::from_strings(&r, &[("x", "0"), ("y", "1")], "D") {
        Err(LndError::NotWellDefined { relation, residual }) => {
            assert_eq!(relation, "y^2");
            assert_eq!(residual, "2*y");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn inverse_images_are_not_user_supplied() {
    let r = u_ring(1, 2, false);
    let e = Derivation::from_strings(&r, &[("x", "0"), ("y", "x"), ("z", "2*y"), ("w", "0")], "D");
    assert!(matches!(e, Err(LndError::Precondition(_))));
}

#[test]
fn chains_for_d12() {
    let r = u_ring(1, 2, false);
    let d = d_dl(&r, 1, 2);
    let c = check_locally_nilpotent(&d, None).unwrap();
    assert_eq!(c.chain_length("y"), Some(2));
    assert_eq!(c.chain_length("z"), Some(3));
    let z: Vec<String> = c.chain("z").unwrap().iter().map(|p| p.to_string()).collect();
    assert_eq!(z, ["z", "2*y", "2*x", "0"]);
    assert!(c.recheck(&d).unwrap());
    assert_eq!(check_locally_nilpotent(&d, None).unwrap(), c);
}

#[test]
fn scaling_derivation_exceeds_bound() {
    let r = PresentedRing::polynomial_ring(&["y"]);
    let d = Derivation::from_strings(&r, &[("y", "y")], "E").unwrap();
    match check_locally_nilpotent(&d, Some(10)) {
        Err(LndError::BoundExceeded { generator, last }) => {
            assert_eq!(generator, "y");
            assert_eq!(last, "y");
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn top_of_z_chain() {
    for d in 1..=3u32 {
        for l in 2..=3u32 {
            let r = u_ring(d, l, false);
            let der = d_dl(&r, d, l);
            let c = check_locally_nilpotent(&der, None).unwrap();
            assert_eq!(c.chain_length("z"), Some(l as usize + 1));
            let top = &c.chain("z").unwrap()[l as usize];
            let fact: i64 = (1..=l as i64).product();
            let expected = r.parse(&format!("{fact}*x^{}", d * (l - 1))).unwrap();
            assert_eq!(top, &expected);
        }
    }
}

#[test]
fn exponential_of_d12() {
    let r = u_ring(1, 2, false);
    let d = d_dl(&r, 1, 2);
    let c = check_locally_nilpotent(&d, None).unwrap();
    let e = exponential(&d, &c, "t").unwrap();
    assert!(e.is_verified());
    let t = e.target();
    assert!(t.equal(e.image_of("y").unwrap(), &t.parse("y + x*t").unwrap()).unwrap());
    assert!(t.equal(e.image_of("z").unwrap(), &t.parse("z + 2*y*t + x*t^2").unwrap()).unwrap());
}

#[test]
fn exponential_of_partial() {
    let r = PresentedRing::polynomial_ring(&["y"]);
    let d = Derivation::from_strings(&r, &[("y", "1")], "D").unwrap();
    let c = check_locally_nilpotent(&d, None).unwrap();
    let e = exponential(&d, &c, "w").unwrap();
    assert_eq!(e.images()[0].to_string(), "y + w");
}

#[test]
fn exponential_inverse_and_coassociativity() {
    let r = u_ring(2, 2, false);
    let d = d_dl(&r, 2, 2);
    let c = check_locally_nilpotent(&d, None).unwrap();
    let cyl = r.tensor_with_polynomial_line("t").unwrap().tensor_with_polynomial_line("t2").unwrap();
    let t = cyl.var("t").unwrap();
    let t2 = cyl.var("t2").unwrap();
    let plus = exponential_images(&c, &cyl, &t).unwrap();
    let minus = exponential_images(&c, &cyl, &t.neg()).unwrap();
    let both = exponential_images(&c, &cyl, &(&t + &t2)).unwrap();
    let second = exponential_images(&c, &cyl, &t2).unwrap();
    let n = r.nvars();
    let mut ext = minus.clone();
    let mut ext2 = second.clone();
    for i in n..cyl.nvars() {
        ext.push(cyl.gen(i));
        ext2.push(cyl.gen(i));
    }
    for i in 0..n {
        // exp(−t)∘exp(t) = id
        let comp = plus[i].substitute(&ext, cyl.ambient()).unwrap();
        assert!(cyl.equal(&comp, &cyl.gen(i)).unwrap());
        // exp over t then t2 equals exp over t + t2
        let comp = plus[i].substitute(&ext2, cyl.ambient()).unwrap();
        assert!(cyl.equal(&comp, &both[i]).unwrap());
    }
}

#[test]
fn fixed_point_freeness() {
    let r = u_ring(1, 2, false);
    let cert = fixed_point_free(&d_dl(&r, 1, 2)).unwrap();
    assert!(cert.recheck());
    assert_eq!(cert.exponent, 1);
    let r = u_ring(2, 2, false);
    let cert = fixed_point_free(&d_dl(&r, 2, 2)).unwrap();
    assert!(cert.recheck());
    assert_eq!(cert.exponent, 2);
    let r = PresentedRing::polynomial_ring(&["x", "y"]);
    let d = Derivation::from_strings(&r, &[("x", "0"), ("y", "1")], "D").unwrap();
    assert!(fixed_point_free(&d).unwrap().recheck());
    let d = Derivation::from_strings(&r, &[("x", "0"), ("y", "x")], "D").unwrap();
    assert!(matches!(fixed_point_free(&d), Err(LndError::NotFixedPointFree)));
}

#[test]
fn slices() {
    for d in 1..=2u32 {
        let r = u_ring(d, 2, true);
        let der = d_dl(&r, d, 2);
        let s = find_slice(&der, &SliceSearch::up_to(d + 1)).unwrap();
        assert!(s.evidence.is_zero());
        assert!(s.recheck(&der).unwrap());
        let expected = r.parse(&format!("y*x_inv^{d}")).unwrap();
        assert!(r.equal(&s.element, &expected).unwrap(), "{}", s.element);
    }
    let r = PresentedRing::polynomial_ring(&["x", "y"]);
    let d = Derivation::from_strings(&r, &[("x", "0"), ("y", "1")], "D").unwrap();
    assert_eq!(find_slice(&d, &SliceSearch::up_to(3)).unwrap().element.to_string(), "y");
}

#[test]
fn no_global_slice_for_d12() {
    let r = u_ring(1, 2, false);
    let d = d_dl(&r, 1, 2);
    assert_eq!(find_slice(&d, &SliceSearch::up_to(6)).unwrap_err(), LndError::NoSliceWithinBound(6));
}

#[test]
fn dixmier_on_the_plane() {
    let r = PresentedRing::polynomial_ring(&["x", "y"]);
    let d = Derivation::from_strings(&r, &[("x", "0"), ("y", "1")], "D").unwrap();
    let s = find_slice(&d, &SliceSearch::up_to(2)).unwrap();
    let t = dixmier_trivialize(&d, &s, "w").unwrap();
    let gens: Vec<String> = t.kernel_gens.iter().map(|g| g.to_string()).collect();
    assert_eq!(gens, ["x"]);
    assert_eq!(t.kernel_ring.vars(), ["x"]);
    assert_eq!(t.cylinder.vars(), ["x", "w"]);
    assert_eq!(t.slice_image(&s).unwrap().to_string(), "w");
    assert!(t.iso.identities().is_ok());
}

#[test]
fn dixmier_on_the_chart() {
    let r = u_ring(1, 2, true);
    let d = d_dl(&r, 1, 2);
    let s = find_slice(&d, &SliceSearch::up_to(2)).unwrap();
    let t = dixmier_trivialize(&d, &s, "w2").unwrap();
    for g in &t.kernel_gens {
        assert!(kernel_member(&d, g).unwrap().member);
    }
    assert!(t.kernel_gens.contains(&r.var("x").unwrap()));
    let pz = r.parse("z - y^2*x_inv").unwrap();
    let pi_z = t.iso.backward.apply(&t.cylinder.var("z").unwrap()).unwrap();
    assert!(r.equal(&pi_z, &pz).unwrap());
    assert!(t.kernel_ring.vars().iter().any(|v| v == "w"));
    assert_eq!(t.cylinder.base_vars().len(), 3);
    assert!(t.iso.identities().is_ok());
    assert!(t.iso.round_trip_element(&r.parse("x*y*z + w").unwrap()).unwrap());
}

#[test]
fn dixmier_needs_a_slice() {
    let r = PresentedRing::polynomial_ring(&["x", "y"]);
    let zero = Derivation::zero(&r);
    let bogus = Slice { element: r.var("y").unwrap(), evidence: r.zero(), degree: 1 };
    assert!(matches!(dixmier_trivialize(&zero, &bogus, "w"), Err(LndError::Precondition(_))));
    assert!(matches!(find_slice(&zero, &SliceSearch::up_to(3)), Err(LndError::NoSliceWithinBound(3))));
}

#[test]
fn slice_search_is_independent_of_jobs() {
    let r = u_ring(2, 2, true);
    let d = d_dl(&r, 2, 2);
    let one = with_jobs(1, || find_slice(&d, &SliceSearch::up_to(3)).unwrap());
    let four = with_jobs(4, || find_slice(&d, &SliceSearch::up_to(3)).unwrap());
    assert_eq!(one, four);
}

fn with_jobs<R>(jobs: usize, f: impl FnOnce() -> R) -> R {
    crate::gb::with_config(GbConfig { jobs, ..GbConfig::default() }, f)
}

#[test]
fn lift_to_cover() {
    let base = u_ring(1, 2, false);
    let d = d_dl(&base, 1, 2);
    let total = PresentedRing::from_strings(
        &["x", "y", "z", "t"],
        &["y^2 + x - x*z - t^3"],
        &[("y^2 + x - x*z", "w")],
        Field::Rational,
    )
    .unwrap();
    let cover = RingMap::from_strings(&base, &total, &[("x", "x"), ("y", "y"), ("z", "z")]).unwrap().verify().unwrap();
    let (lifted, cert) = lift_through_cover(&d, &cover, &["t"]).unwrap();
    assert!(lifted.image_of("t").unwrap().is_zero());
    assert_eq!(cert.chain_length("z"), Some(3));
    // fine on the base, but D(f) = 2y breaks the cover relation
    let bad = Derivation::from_strings(&base, &[("x", "0"), ("y", "1"), ("z", "0")], "B");
    let (zero, _) = lift_through_cover(&Derivation::zero(&base), &cover, &["t"]).unwrap();
    assert!(zero.images().iter().all(|p| p.is_zero()));
    assert!(matches!(lift_through_cover(&bad.unwrap(), &cover, &["t"]), Err(LndError::NotWellDefined { .. })));
}

#[test]
fn equivariance_under_monomial_twist() {
    let r = PresentedRing::polynomial_ring(&["x", "y"]);
    let act = MonomialGroupAction::new(&r, 3, &[("x", 1), ("y", 1)]).unwrap();
    let d = Derivation::from_strings(&r, &[("x", "0"), ("y", "x")], "D").unwrap();
    assert!(derivation_equivariance(&d, &act).is_ok());
    let act = MonomialGroupAction::new(&r, 3, &[("y", 1)]).unwrap();
    let e = Derivation::from_strings(&r, &[("x", "0"), ("y", "1")], "E").unwrap();
    assert!(matches!(derivation_equivariance(&e, &act), Err(LndError::Ring(RingError::NotEquivariant { .. }))));
}

#[test]
fn derivation_file_round_trip() {
    let r = u_ring(1, 2, false);
    let d = d_dl(&r, 1, 2);
    let file = DerivationFile::from_derivation(&d);
    let json = serde_json::to_string(&file).unwrap();
    let back: DerivationFile = serde_json::from_str(&json).unwrap();
    let d2 = back.to_derivation().unwrap();
    assert_eq!(d2.images(), d.images());
}

#[test]
fn conjugation_through_identity() {
    let r = u_ring(1, 2, false);
    let d = d_dl(&r, 1, 2);
    let id = RingMap::identity(&r);
    let c = d.conjugate(&id, &id, "C").unwrap();
    assert_eq!(c.images(), d.images());
    let mut m = BTreeMap::new();
    m.insert("x".to_string(), r.zero());
    assert!(Derivation::make(&r, &m, "D").is_err());
}

fn small_poly(r: &PresentedRing) -> impl Strategy<Value = Polynomial> {
    let r = r.clone();
    proptest::collection::vec((-3i64..=3, 0u32..=2, 0u32..=2, 0u32..=2, 0u32..=1), 1..4).prop_map(move |terms| {
        let mut p = r.zero();
        for (c, a, b, e, w) in terms {
            let s = format!("{c}*x^{a}*y^{b}*z^{e}*w^{w}");
            p = &p + &r.parse(&s).unwrap();
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn leibniz((p, q) in (small_poly(&u_ring(1, 2, false)), small_poly(&u_ring(1, 2, false)))) {
        let r = u_ring(1, 2, false);
        let d = d_dl(&r, 1, 2);
        let lhs = d.apply(&(&p * &q)).unwrap();
        let rhs = &(&d.apply(&p).unwrap() * &q) + &(&p * &d.apply(&q).unwrap());
        prop_assert!(r.equal(&lhs, &rhs).unwrap());
    }
}
