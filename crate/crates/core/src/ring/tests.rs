use std::collections::BTreeMap;

use proptest::prelude::*;

use super::*;
use crate::coeff::FieldElement;
use crate::poly::Monomial;

fn u12() -> PresentedRing {
    PresentedRing::from_strings(&["x", "y", "z"], &[], &[("y^2 + x - x*z", "w")], Field::Rational).unwrap()
}

#[test]
fn present_examples() {
    let r = u12();
    assert_eq!(r.nvars(), 4);
    assert_eq!(r.relations().len(), 1);
    assert_eq!(r.relations()[0], r.parse("w*y^2 + w*x - w*x*z - 1").unwrap());

    let a = Ambient::grevlex(&["u"]);
    let laurent = PresentedRing::present(&["u"], &[], &[Polynomial::var(&a, 0)], Field::Rational).unwrap();
    assert_eq!(laurent.vars(), &["u".to_string(), "u_inv".to_string()]);
    assert!(laurent.is_zero(&laurent.parse("u*u_inv - 1").unwrap()).unwrap());

    let trivial = PresentedRing::from_strings(&["x"], &["x - x"], &[], Field::Rational).unwrap();
    assert!(trivial.relations().is_empty());

    assert_eq!(
        PresentedRing::from_strings(&["x"], &["x", "x - 1"], &[], Field::Rational).unwrap_err(),
        RingError::InconsistentPresentation
    );
}

#[test]
fn present_is_idempotent() {
    let r = u12();
    let again = RingFile::from_ring(&r).to_ring().unwrap();
    assert_eq!(r.describe(), again.describe());
}

#[test]
fn verify_map_examples() {
    let src = PresentedRing::from_strings(&["a", "b"], &["a*b - 1"], &[], Field::Rational).unwrap();
    let laurent = PresentedRing::from_strings(&["u"], &[], &[("u", "v")], Field::Rational).unwrap();
    let f = RingMap::from_strings(&src, &laurent, &[("a", "u"), ("b", "v")]).unwrap();
    assert!(f.verify().unwrap().is_verified());

    let nil = PresentedRing::from_strings(&["x"], &["x^2"], &[], Field::Rational).unwrap();
    let line = PresentedRing::polynomial_ring(&["y"]);
    let bad = RingMap::from_strings(&nil, &line, &[("x", "y")]).unwrap();
    assert_eq!(
        bad.verify().unwrap_err(),
        RingError::RelationNotPreserved { relation: "x^2".into(), residual: "y^2".into() }
    );
}

#[test]
fn phi_induced_map_is_verified() {
    // S_{1,2} x A^1_* -> U_{1,2}
    let s = PresentedRing::from_strings(&["X", "Y", "Z", "u"], &["X*Z - Y^2 - X + 1"], &[("u", "v")], Field::Rational)
        .unwrap();
    let u = u12();
    let phi = RingMap::from_strings(&u, &s, &[("x", "u^2*X"), ("y", "u*Y"), ("z", "Z")]).unwrap();
    // the inverse of f is filled in automatically: f ↦ u^2
    assert_eq!(phi.image_of("w").unwrap(), &s.parse("v^2").unwrap());
    let phi = phi.verify().unwrap();
    for c in phi.relation_certificates().unwrap() {
        assert!(c.recheck());
    }
}

#[test]
fn verify_iso_examples() {
    let r = u12();
    let id = RingMap::identity(&r);
    assert!(verify_iso(&id, &id).is_ok());

    // Φ_{2,2} on the Laurent side and its monomial inverse
    let up = PresentedRing::from_strings(&["X", "Y", "Z", "u"], &[], &[("u", "v")], Field::Rational).unwrap();
    let down = PresentedRing::from_strings(&["x", "y", "z", "t"], &[], &[("t", "s")], Field::Rational).unwrap();
    let fwd = RingMap::from_strings(&down, &up, &[("x", "u^2*X"), ("y", "u*Y"), ("z", "v^2*Z"), ("t", "u")]).unwrap();
    let bwd = RingMap::from_strings(&up, &down, &[("X", "s^2*x"), ("Y", "s*y"), ("Z", "t^2*z"), ("u", "t")]).unwrap();
    let cert = verify_iso(&fwd, &bwd).unwrap();
    for c in cert.identities().unwrap() {
        assert!(c.recheck());
    }

    let line = PresentedRing::polynomial_ring(&["x"]);
    let f = RingMap::from_strings(&line, &line, &[("x", "x + 1")]).unwrap();
    let g = RingMap::from_strings(&line, &line, &[("x", "x - 2")]).unwrap();
    assert_eq!(
        verify_iso(&f, &g).unwrap_err(),
        RingError::NotInverse { generator: "x".into(), residual: "-1".into() }
    );
}

#[test]
fn cylinder_examples() {
    let s1 = PresentedRing::from_strings(&["x", "y", "z"], &["x*z - y^2 + 1"], &[], Field::Rational).unwrap();
    let cyl = s1.tensor_with_polynomial_line("w").unwrap();
    assert_eq!(cyl.nvars(), 4);
    assert_eq!(cyl.relations().len(), 1);
    assert_eq!(s1.tensor_with_polynomial_line("x").unwrap_err(), RingError::VariableClash("x".into()));

    let x232 = PresentedRing::from_strings(&["x", "y", "z", "t", "w"], &["x^2*z - y^2 - x + t^3"], &[], Field::Rational)
        .unwrap();
    let c = x232.tensor_with_polynomial_line("v").unwrap();
    assert_eq!((c.nvars(), c.relations().len()), (6, 1));
    let line = PresentedRing::polynomial_ring(&["x"]).tensor_with_polynomial_line("w").unwrap();
    assert_eq!(line.describe(), PresentedRing::polynomial_ring(&["x", "w"]).describe());
}

#[test]
fn invariant_subring_laurent_example() {
    let r = PresentedRing::from_strings(&["Y", "u"], &[], &[("u", "v")], Field::Rational).unwrap();
    let act = MonomialGroupAction::new(&r, 2, &[("Y", -1), ("u", 1)]).unwrap();
    assert_eq!(act.weights(), &[1, 1, 1]);
    let inv = invariant_subring(&r, &act, 2).unwrap();
    let got: Vec<String> = inv.generators.iter().map(|g| g.to_string()).collect();
    assert_eq!(got, vec!["Y*u", "u^2", "v^2"]);
    for g in &inv.generators {
        assert!(act.is_invariant(&r, g).unwrap());
    }
    // every twist-zero monomial up to the bound lies in the subalgebra
    for e in [[2, 0, 0], [1, 0, 1], [0, 1, 1], [1, 1, 0]] {
        let m = r.reduce(&Polynomial::monomial(r.ambient(), FieldElement::one(), Monomial::from_exponents(&e))).unwrap();
        assert!(action::in_subalgebra_for_tests(&r, &inv.generators, &m));
    }
    assert_eq!(invariant_subring(&r, &act, 1).unwrap_err(), RingError::BoundTooSmall { bound: 1, needed: 2 });
}

#[test]
fn trivial_action_keeps_generators() {
    let r = PresentedRing::polynomial_ring(&["a", "b"]);
    let act = MonomialGroupAction::trivial(&r, 3);
    let inv = invariant_subring(&r, &act, 3).unwrap();
    assert_eq!(inv.generators, vec![r.var("a").unwrap(), r.var("b").unwrap()]);
}

#[test]
fn invariants_of_s12_cylinder_match_u12() {
    let s = PresentedRing::from_strings(&["X", "Y", "Z", "u"], &["X*Z - Y^2 - X + 1"], &[("u", "v")], Field::Rational)
        .unwrap();
    let act = MonomialGroupAction::new(&s, 2, &[("Y", -1), ("u", 1)]).unwrap();
    act.verify(&s).unwrap();
    let u = u12();
    let phi = RingMap::from_strings(&u, &s, &[("x", "u^2*X"), ("y", "u*Y"), ("z", "Z")]).unwrap().verify().unwrap();
    let triv = MonomialGroupAction::trivial(&u, 2);
    equivariance_check(&phi, &triv, &act).unwrap();
    for img in phi.images() {
        assert!(act.is_invariant(&s, img).unwrap());
    }
}

#[test]
fn equivariance_examples() {
    let s = PresentedRing::from_strings(&["X", "Y", "Z", "u"], &[], &[("u", "v")], Field::Rational).unwrap();
    let act = MonomialGroupAction::new(&s, 2, &[("Y", -1), ("u", 1)]).unwrap();
    equivariance_check(&RingMap::identity(&s), &act, &act).unwrap();
    // weights -1 and +1 agree for l = 2, so use l = 3 to separate them
    let s3 = PresentedRing::from_strings(&["X", "Y", "Z", "u"], &[], &[("u", "v")], Field::Rational).unwrap();
    let act3 = MonomialGroupAction::new(&s3, 3, &[("Y", -1), ("u", 1)]).unwrap();
    let bad3 = RingMap::from_strings(&s3, &s3, &[("X", "X"), ("Y", "u"), ("Z", "Z"), ("u", "u")]).unwrap();
    assert!(matches!(equivariance_check(&bad3, &act3, &act3), Err(RingError::NotEquivariant { .. })));
}

#[test]
fn ring_files_roundtrip() {
    let json = r#"{"vars":["x","y","z"],"relations":[],"invert":["y^2 + x - x*z"],"field":"Q"}"#;
    let f: RingFile = serde_json::from_str(json).unwrap();
    let r = f.to_ring().unwrap();
    assert_eq!(r.nvars(), 4);
    let cyc: RingFile = serde_json::from_str(r#"{"vars":["a"],"relations":["a^3 - 1"],"invert":[],"field":{"cyclotomic":3}}"#).unwrap();
    assert_eq!(cyc.to_ring().unwrap().field(), Field::Cyclotomic(3));
    let out = serde_json::to_string(&RingFile::from_ring(&r)).unwrap();
    assert_eq!(serde_json::to_string(&serde_json::from_str::<RingFile>(&out).unwrap()).unwrap(), out);
}

fn small_poly(names: &'static [&'static str]) -> impl Strategy<Value = String> {
    prop::collection::vec((-3i64..=3, prop::collection::vec(0u32..=2, names.len())), 1..=3).prop_map(move |terms| {
        terms
            .iter()
            .map(|(c, e)| {
                let mut s = format!("({c})");
                for (n, k) in names.iter().zip(e) {
                    s.push_str(&format!("*{n}^{k}"));
                }
                s
            })
            .collect::<Vec<_>>()
            .join(" + ")
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn verified_maps_are_multiplicative(p in small_poly(&["x", "y", "z", "w"]), q in small_poly(&["x", "y", "z", "w"])) {
        let s = PresentedRing::from_strings(&["X", "Y", "Z", "u"], &["X*Z - Y^2 - X + 1"], &[("u", "v")], Field::Rational).unwrap();
        let phi = RingMap::from_strings(&u12(), &s, &[("x", "u^2*X"), ("y", "u*Y"), ("z", "Z")]).unwrap().verify().unwrap();
        let u = u12();
        let (p, q) = (u.parse(&p).unwrap(), u.parse(&q).unwrap());
        let lhs = phi.apply(&(&p * &q)).unwrap();
        let rhs = &phi.apply(&p).unwrap() * &phi.apply(&q).unwrap();
        prop_assert!(s.equal(&lhs, &rhs).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn iso_round_trips_random_elements(p in small_poly(&["X", "Y", "Z", "u"])) {
        let up = PresentedRing::from_strings(&["X", "Y", "Z", "u"], &[], &[("u", "v")], Field::Rational).unwrap();
        let down = PresentedRing::from_strings(&["x", "y", "z", "t"], &[], &[("t", "s")], Field::Rational).unwrap();
        let fwd = RingMap::from_strings(&up, &down, &[("X", "s^2*x"), ("Y", "s*y"), ("Z", "t^2*z"), ("u", "t")]).unwrap();
        let bwd = RingMap::from_strings(&down, &up, &[("x", "u^2*X"), ("y", "u*Y"), ("z", "v^2*Z"), ("t", "u")]).unwrap();
        let cert = verify_iso(&fwd, &bwd).unwrap();
        prop_assert!(cert.round_trip_element(&up.parse(&p).unwrap()).unwrap());
    }
}

#[test]
fn unused_map_helpers() {
    let r = u12();
    let mut images = BTreeMap::new();
    images.insert("x".to_string(), r.var("x").unwrap());
    assert!(RingMap::new(&r, &r, &images).is_err());
}
