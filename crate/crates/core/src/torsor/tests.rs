use super::*;
use crate::coeff::Field;

fn danielewski(n: u32) -> Derivation {
    let r = PresentedRing::from_strings(&["x", "y", "z"], &[&format!("x^{n}*z - y^2 + 1")], &[], Field::Rational).unwrap();
    Derivation::from_strings(&r, &[("x", "0"), ("y", &format!("x^{n}")), ("z", "2*y")], "D").unwrap()
}

fn classic_matching() -> Matching {
    Matching {
        shared: vec![("x".into(), "x".into())],
        divisor: "x".into(),
        matched: "y".into(),
        initial: "y".into(),
        actions: None,
    }
}

#[test]
fn classic_carrier() {
    let bp = matched_fiber_product(&danielewski(1), &danielewski(2), &classic_matching(), &PipelineConfig::default()).unwrap();
    assert_eq!(bp.divided.len(), 2);
    assert!(bp.divided_relations_hold().unwrap());
    assert!(bp.carrier.vars().iter().any(|v| v == "y2"));
}

#[test]
fn classic_cylinders() {
    let c = cylinder_iso(&danielewski(1), &danielewski(2), &classic_matching(), &PipelineConfig::default()).unwrap();
    assert!(c.iso.identities().is_ok());
    assert_eq!(c.iso.forward.source().vars(), ["x", "y", "z", "w"]);
    assert_eq!(c.iso.forward.target().vars(), ["x", "y", "z", "w"]);
    for s in &c.slices {
        assert!(s.evidence.is_zero());
    }
    let r = c.iso.forward.source();
    for p in ["x*y*z + w^2", "y^3*w - z", "x^2*w*z"] {
        assert!(c.iso.round_trip_element(&r.parse(p).unwrap()).unwrap());
    }
}

#[test]
fn low_degree_bound_is_inconclusive() {
    let cfg = PipelineConfig { max_degree: 1, ..PipelineConfig::default() };
    let e = cylinder_iso(&danielewski(1), &danielewski(2), &classic_matching(), &cfg).unwrap_err();
    assert!(e.is_bound(), "{e}");
    assert!(matches!(e.root(), TorsorError::MatchingSearchExhausted(1)));
}

#[test]
fn same_surface_gives_identity() {
    let c = cylinder_iso(&danielewski(1), &danielewski(1), &classic_matching(), &PipelineConfig::default()).unwrap();
    assert!(c.pair.is_none());
    for (i, img) in c.iso.forward.images().iter().enumerate() {
        assert_eq!(img, &c.iso.forward.source().gen(i));
    }
}

#[test]
fn trivial_pair_trivializes_to_identity_shape() {
    let a = PresentedRing::from_strings(&["x", "y"], &["x*y - 1"], &[], Field::Rational).unwrap();
    let w = a.tensor_with_polynomial_line("t").unwrap();
    let inj = RingMap::from_strings(&a, &w, &[("x", "x"), ("y", "y")]).unwrap().verify().unwrap();
    let dw = Derivation::from_strings(&w, &[("x", "0"), ("y", "0"), ("t", "1")], "dt").unwrap();
    let bp = BundlePair::new(inj.clone(), inj, dw.clone(), dw);
    let ((t1, s1), (t2, _)) = trivialize_pair(&bp, &PipelineConfig::default()).unwrap();
    assert_eq!(s1.element.to_string(), "t");
    assert_eq!(t1.forward.images()[2].to_string(), "w");
    assert_eq!(t2.backward.images()[2].to_string(), "t");
}

#[test]
fn unverified_injection_is_rejected() {
    let a = PresentedRing::polynomial_ring(&["x"]);
    let w = a.tensor_with_polynomial_line("t").unwrap();
    let inj = RingMap::from_strings(&a, &w, &[("x", "x")]).unwrap();
    let dw = Derivation::from_strings(&w, &[("x", "0"), ("t", "1")], "dt").unwrap();
    let bp = BundlePair::new(inj.clone(), inj, dw.clone(), dw);
    assert!(matches!(trivialize_pair(&bp, &PipelineConfig::default()), Err(TorsorError::Precondition(_))));
}

#[test]
fn transport_through_identity_and_zero() {
    let d = danielewski(1);
    let cyl = d.ring().tensor_with_polynomial_line("w").unwrap();
    let id = RingMap::identity(&cyl);
    let iso = verify_iso(&id, &id).unwrap();
    let dc = Derivation::from_strings(&cyl, &[("x", "0"), ("y", "x"), ("z", "2*y"), ("w", "0")], "D").unwrap();
    let (moved, cert) = transport_derivation(&iso, &dc, "D").unwrap();
    assert_eq!(moved.images(), dc.images());
    assert_eq!(cert.chain_length("z"), Some(3));
    let (zero, _) = transport_derivation(&iso, &Derivation::zero(&cyl), "0").unwrap();
    assert!(zero.images().iter().all(|p| p.is_zero()));
}

#[test]
fn clearing_denominators() {
    let r = PresentedRing::from_strings(&["x", "y"], &[], &[("x", "v")], Field::Rational).unwrap();
    let d = Derivation::from_strings(&r, &[("x", "0"), ("y", "v^2")], "D").unwrap();
    let x = r.var("x").unwrap();
    let c = clear_denominators(&d, &x, 4).unwrap();
    assert_eq!(c.exponent, 2);
    assert_eq!(c.derivation.ring().vars(), ["x", "y"]);
    assert_eq!(c.derivation.images()[1].to_string(), "1");
    let p = Derivation::from_strings(&r, &[("x", "0"), ("y", "x")], "P").unwrap();
    assert_eq!(clear_denominators(&p, &x, 4).unwrap().exponent, 0);
    assert_eq!(clear_denominators(&d, &x, 1).unwrap_err(), TorsorError::NotClearable(1));
    let q = Derivation::from_strings(&r, &[("x", "1"), ("y", "0")], "Q").unwrap();
    assert!(matches!(clear_denominators(&q, &x, 4), Err(TorsorError::Precondition(_))));
}

#[test]
fn chart_cover_is_a_cover() {
    let base = PresentedRing::polynomial_ring(&["X", "Y"]);
    let c = ChartCover::new(&base, "Y", 2).unwrap();
    assert!(c.certificate.recheck());
    assert_eq!(c.localizers.len(), 2);
    assert!(c.chart(0).unwrap().nvars() == 3);
}

fn upstairs(d: u32, l: u32) -> (Derivation, MonomialGroupAction) {
    let rel = format!("X^{d}*Z - Y^{l} - X + 1");
    let r = PresentedRing::from_strings(&["X", "Y", "Z", "u"], &[&rel], &[("u", "u_inv")], Field::Rational).unwrap();
    let e = Derivation::from_strings(
        &r,
        &[("X", "0"), ("Y", &format!("u^{}*X^{d}", l * d - 1)), ("Z", &format!("{l}*u^{}*Y^{}", l * d - 1, l - 1)), ("u", "0")],
        "E",
    )
    .unwrap();
    let act = MonomialGroupAction::new(&r, l, &[("Y", -1), ("u", 1)]).unwrap();
    (e, act)
}

fn phi(d: u32, l: u32, target: &PresentedRing) -> RingMap {
    let f = format!("y^{l} + x - x^{d}*z");
    let u = PresentedRing::from_strings(&["x", "y", "z"], &[], &[(&f, "f_inv")], Field::Rational).unwrap();
    let xi = format!("u^{l}*X");
    let zi = format!("u_inv^{}*Z", (d - 1) * l);
    let fi = format!("u_inv^{l}");
    RingMap::from_strings(&u, target, &[("x", &xi), ("y", "u*Y"), ("z", &zi), ("f_inv", &fi)]).unwrap().verify().unwrap()
}

#[test]
fn upstairs_run_descends() {
    let (e1, a1) = upstairs(1, 2);
    let (e2, a2) = upstairs(2, 2);
    let m = Matching {
        shared: vec![("X".into(), "X".into()), ("u".into(), "u".into())],
        divisor: "X".into(),
        matched: "Y".into(),
        initial: "Y".into(),
        actions: Some((a1, a2)),
    };
    let c = cylinder_iso(&e1, &e2, &m, &PipelineConfig::default()).unwrap();
    let p1 = phi(1, 2, e1.ring());
    let p2 = phi(2, 2, e2.ring());
    let down = descend(&c.iso, &p1, &p2, "w").unwrap();
    assert!(down.consistent_with(&c.iso).unwrap());
    assert_eq!(down.iso.forward.source().vars(), ["x", "y", "z", "f_inv", "w"]);
}
