use std::collections::BTreeMap;

use crate::coeff::{Field, FieldElement, Rational};
use crate::gb::membership;
use crate::lnd::{
    check_locally_nilpotent, exponential_images, find_slice, fixed_point_free, kernel_member, lift_through_cover,
    Derivation, DerivationFile, SliceSearch,
};
use crate::poly::Polynomial;
use crate::ring::{verify_iso, IsoCertificate, MapFile, PresentedRing, RingMap};
use crate::torsor::{
    clear_denominators, cylinder_iso, cylinder_param, descend, transport_derivation, Matching, PipelineConfig,
};

use super::{CatalogEntry, Certificate, Claims, LabError, Status};

fn pipeline(b: &Claims, depth: u32) -> PipelineConfig {
    let cfg = b.config();
    PipelineConfig {
        max_degree: cfg.max_degree,
        max_depth: Some(cfg.max_depth.unwrap_or(depth)),
        retry: cfg.retry,
        param: "w".into(),
    }
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), LabError> {
    if ok {
        Ok(())
    } else {
        Err(LabError::Report(what()))
    }
}

/// `exp(±w·D)` as automorphisms of the cylinder.
fn exp_pair(d: &Derivation) -> Result<IsoCertificate, LabError> {
    let r = d.ring();
    let cert = check_locally_nilpotent(d, None)?;
    let cyl = r.tensor_with_polynomial_line(&cylinder_param(r, r, "w"))?;
    let w = cyl.gen(cyl.nvars() - 1);
    let mut maps = Vec::new();
    for param in [w.clone(), w.neg()] {
        let ims = exponential_images(&cert, &cyl, &param)?;
        let mut named: BTreeMap<String, Polynomial> = r.vars().iter().cloned().zip(ims).collect();
        named.insert(cyl.vars()[cyl.nvars() - 1].clone(), w.clone());
        maps.push(RingMap::new(&cyl, &cyl, &named)?);
    }
    Ok(verify_iso(&maps[0], &maps[1])?)
}

pub fn scenario_foundations(b: &mut Claims, d: u32, l: u32) {
    let e = match CatalogEntry::new(d, l) {
        Ok(e) => e,
        Err(err) => return b.failed("catalog", "", err),
    };
    let anchor = "free Ga-action on U_{d,l} by x^d∂_y + l·y^{l−1}∂_z";
    let Some(der) = b.claim("derivation is well defined", anchor, || {
        let der = e.d_dl()?;
        Ok((Certificate::derivation(&der), der))
    }) else {
        for n in ["f in the kernel", "nilpotency chains", "fixed-point free", "exponential round trip"] {
            b.blocked(n, anchor, "derivation is well defined");
        }
        return;
    };
    b.claim("f in the kernel", "the equation f_{d,l} = y^l + x − x^d·z", || {
        let f = der.ring().parse(&e.f())?;
        check(kernel_member(&der, &f)?.member, || "D(f) ≠ 0".into())?;
        Ok((Certificate::kernel(&der, &f), ()))
    });
    b.claim("nilpotency chains", anchor, || {
        let cert = check_locally_nilpotent(&der, None)?;
        let len = cert.chain_length("z").unwrap_or(0);
        check(len == l as usize + 1, || format!("z-chain has length {len}"))?;
        let top = cert.chain("z").unwrap()[l as usize].clone();
        let fact: i64 = (1..=l as i64).product();
        let expected = der.ring().parse(&format!("{fact}*x^{}", d * (l - 1)))?;
        check(top == expected, || format!("D^l(z) = {top}"))?;
        let eq = Certificate::equality(der.ring(), &top, &expected);
        Ok((Certificate::all(vec![Certificate::nilpotent(&der, &cert), eq]), ()))
    });
    b.claim("fixed-point free", anchor, || {
        let c = fixed_point_free(&der)?;
        check(c.exponent <= d, || format!("saturation exponent {} exceeds d", c.exponent))?;
        Ok((Certificate::membership(&c), ()))
    });
    b.claim("exponential round trip", anchor, || {
        let iso = exp_pair(&der)?;
        Ok((Certificate::iso(&iso)?, ()))
    });
}

pub fn scenario_phi(b: &mut Claims, d: u32, l: u32) {
    let e = match CatalogEntry::new(d, l) {
        Ok(e) => e,
        Err(err) => return b.failed("catalog", "", err),
    };
    let anchor = "Φ_{d,l}: (X,Y,Z,u) ↦ (u^l·X, u·Y, u^{(1−d)l}·Z, u)";
    b.claim("pullback of f", anchor, || {
        let phi = e.phi_chart()?;
        let f = phi.source().parse(&e.f())?;
        let lhs = phi.apply(&f)?;
        let rhs = phi.target().parse(&format!("u^{l}*(Y^{l} + X - X^{d}*Z)"))?;
        check(phi.target().equal(&lhs, &rhs)?, || format!("Φ*(f) = {lhs}"))?;
        let raw = phi.apply_raw(&f)?;
        Ok((Certificate::equality(phi.target(), &raw, &rhs), ()))
    });
    b.claim("monomial inverse", anchor, || {
        let iso = verify_iso(&e.phi()?, &e.phi_inverse()?)?;
        Ok((Certificate::iso(&iso)?, ()))
    });
    let eq_anchor = "u^{ld−1}(X^d∂_Y + l·Y^{l−1}∂_Z) commutes with μ_l";
    b.claim("lifted derivation is equivariant", eq_anchor, || {
        let lifted = e.lifted()?;
        let act = e.action()?;
        crate::lnd::derivation_equivariance(&lifted, &act)?;
        let nil = check_locally_nilpotent(&lifted, None)?;
        Ok((Certificate::all(vec![Certificate::equivariant(&lifted, &act), Certificate::nilpotent(&lifted, &nil)]), ()))
    });
    b.claim("lifted derivation is the pullback", eq_anchor, || {
        let phi = e.phi()?.verify()?;
        let down = e.d_fiber()?;
        let up = e.lifted()?;
        let cert = Certificate::intertwines(&phi, &down, &up);
        Ok((cert, ()))
    });
}

fn danielewski(n: u32) -> Result<Derivation, LabError> {
    let r = PresentedRing::from_strings(&["x", "y", "z"], &[&format!("x^{n}*z - y^2 + 1")], &[], Field::Rational)?;
    Ok(Derivation::from_strings(&r, &[("x", "0"), ("y", &format!("x^{n}")), ("z", "2*y")], "D")?)
}

/// Claims for a pipeline run; returns the cylinder iso when it certifies.
fn cylinder_claims(
    b: &mut Claims,
    d1: &Derivation,
    d2: &Derivation,
    m: &Matching,
    cfg: &PipelineConfig,
    anchor: &str,
    iso_name: &str,
) -> Option<IsoCertificate> {
    let run = cylinder_iso(d1, d2, m, cfg);
    let run = match run {
        Ok(c) => c,
        Err(err) => {
            let err = LabError::from(err);
            b.claim::<()>(iso_name, anchor, || Err(err));
            return None;
        }
    };
    if let Some(bp) = &run.pair {
        b.claim("carrier with two bundle structures", anchor, || {
            check(bp.divided_relations_hold()?, || "divided relations fail".into())?;
            let n1 = check_locally_nilpotent(&bp.first, None)?;
            let n2 = check_locally_nilpotent(&bp.second, None)?;
            let mut parts = vec![
                Certificate::map(&bp.inj1),
                Certificate::map(&bp.inj2),
                Certificate::nilpotent(&bp.first, &n1),
                Certificate::nilpotent(&bp.second, &n2),
            ];
            let x = bp.carrier.var(bp.divisor.as_deref().unwrap_or_default())?;
            for (name, num) in &bp.divided {
                let lhs = &x * &bp.carrier.var(name)?;
                parts.push(Certificate::equality(&bp.carrier, &lhs, num));
            }
            for (i, inj) in [&bp.inj1, &bp.inj2].into_iter().enumerate() {
                let der = if i == 0 { &bp.first } else { &bp.second };
                for g in inj.images() {
                    parts.push(Certificate::kernel(der, g));
                }
            }
            if let Some(act) = &bp.action {
                parts.push(Certificate::equivariant(&bp.first, act));
                parts.push(Certificate::equivariant(&bp.second, act));
            }
            Ok((Certificate::all(parts), ()))
        });
        b.claim("slices on the carrier", anchor, || {
            let parts = [(&bp.first, &run.slices[0]), (&bp.second, &run.slices[1])]
                .into_iter()
                .map(|(der, s)| Certificate::slice(der, &s.element))
                .collect();
            Ok((Certificate::all(parts), ()))
        });
    }
    let iso = run.iso;
    b.claim(iso_name, anchor, || Ok((Certificate::iso(&iso)?, iso.clone())))
}

pub fn scenario_danielewski(b: &mut Claims) {
    let anchor = "S₁ × A¹ ≅ S₁ ×_{Ã¹} S₂ ≅ S₂ × A¹ for S_n = {xⁿz = y² − 1}";
    let (Some(d1), Some(d2)) = (
        b.claim("D_1 is locally nilpotent", anchor, || {
            let d = danielewski(1)?;
            let c = check_locally_nilpotent(&d, None)?;
            Ok((Certificate::nilpotent(&d, &c), d))
        }),
        b.claim("D_2 is locally nilpotent", anchor, || {
            let d = danielewski(2)?;
            let c = check_locally_nilpotent(&d, None)?;
            Ok((Certificate::nilpotent(&d, &c), d))
        }),
    ) else {
        b.blocked("cylinder iso", anchor, "D_1 is locally nilpotent");
        return;
    };
    let m = Matching {
        shared: vec![("x".into(), "x".into())],
        divisor: "x".into(),
        matched: "y".into(),
        initial: "y".into(),
        actions: None,
    };
    let cfg = pipeline(b, 8);
    cylinder_claims(b, &d1, &d2, &m, &cfg, anchor, "cylinder iso");
}

const THEOREM1: &str = "the fourfolds U_{d,l} × A¹, d ≥ 1, are all isomorphic";

/// The cylinder iso `O(U_{d,l})[w] ≅ O(U_{d',l})[w]`, through the equivariant
/// upstairs run and descent. Claim names are prefixed with `prefix`.
fn theorem1_claims(b: &mut Claims, d: u32, dprime: u32, l: u32, prefix: &str) -> Option<IsoCertificate> {
    let name = |s: &str| format!("{prefix}{s}");
    let (e1, e2) = match (CatalogEntry::new(d, l), CatalogEntry::new(dprime, l)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(err), _) | (_, Err(err)) => {
            b.failed(&name("catalog"), THEOREM1, err);
            return None;
        }
    };
    if d == dprime {
        return b.claim(&name("cylinder iso"), THEOREM1, || {
            let der = e1.d_dl()?;
            let c = cylinder_iso(&der, &der, &identity_matching(), &pipeline_default())?;
            Ok((Certificate::iso(&c.iso)?, c.iso))
        });
    }
    let lifted = b.claim(&name("upstairs derivations"), THEOREM1, || {
        let mut parts = Vec::new();
        let mut out = Vec::new();
        for e in [&e1, &e2] {
            let der = e.lifted()?;
            let act = e.action()?;
            crate::lnd::derivation_equivariance(&der, &act)?;
            let nil = check_locally_nilpotent(&der, None)?;
            parts.push(Certificate::nilpotent(&der, &nil));
            parts.push(Certificate::equivariant(&der, &act));
            out.push((der, act));
        }
        Ok((Certificate::all(parts), out))
    });
    let phis = b.claim(&name("quotient maps"), THEOREM1, || {
        let p1 = e1.phi_down()?.verify()?;
        let p2 = e2.phi_down()?.verify()?;
        Ok((Certificate::all(vec![Certificate::map(&p1), Certificate::map(&p2)]), (p1, p2)))
    });
    let (Some(lifted), Some((p1, p2))) = (lifted, phis) else {
        b.blocked(&name("cylinder iso"), THEOREM1, &name("upstairs derivations"));
        return None;
    };
    let m = Matching {
        shared: vec![("X".into(), "X".into()), ("u".into(), "u".into())],
        divisor: "X".into(),
        matched: "Y".into(),
        initial: "Y".into(),
        actions: Some((lifted[0].1.clone(), lifted[1].1.clone())),
    };
    let cfg = pipeline(b, d.max(dprime) * l);
    let before = b.claims.len();
    let up = cylinder_claims(b, &lifted[0].0, &lifted[1].0, &m, &cfg, THEOREM1, "upstairs cylinder iso");
    for c in &mut b.claims[before..] {
        c.name = format!("{prefix}{}", c.name);
    }
    let Some(up) = up else {
        b.blocked(&name("cylinder iso"), THEOREM1, &name("upstairs cylinder iso"));
        return None;
    };
    let param = cylinder_param(lifted[0].0.ring(), lifted[1].0.ring(), "w");
    let down = b.claim(&name("cylinder iso"), THEOREM1, || {
        let down = descend(&up, &p1, &p2, &param)?;
        Ok((Certificate::iso(&down.iso)?, down))
    })?;
    b.claim(&name("descent is consistent"), THEOREM1, || {
        check(down.consistent_with(&up)?, || "lift2 ∘ down ≠ up ∘ lift1".into())?;
        let cert = Certificate::Square {
            down: MapFile::from_map(&down.iso.forward),
            lift1: MapFile::from_map(&down.lift1),
            lift2: MapFile::from_map(&down.lift2),
            up: MapFile::from_map(&up.forward),
        };
        Ok((cert, ()))
    });
    Some(down.iso)
}

fn identity_matching() -> Matching {
    Matching { shared: vec![], divisor: "x".into(), matched: "y".into(), initial: "y".into(), actions: None }
}

fn pipeline_default() -> PipelineConfig {
    PipelineConfig::default()
}

pub fn scenario_theorem1(b: &mut Claims, d: u32, dprime: u32, l: u32) -> Option<IsoCertificate> {
    theorem1_claims(b, d, dprime, l, "")
}

pub fn scenario_corollary3(b: &mut Claims, d: u32, k: u32, l: u32) {
    let anchor = "all the cylinders X_{d,k,l} × A¹ have a trivial Makar-Limanov invariant";
    let (e, e1) = match (CatalogEntry::koras_russell(d, k, l), CatalogEntry::new(1, l)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(err), _) | (_, Err(err)) => return b.failed("catalog", anchor, err),
    };
    let ders = b.claim("two derivations of U_{1,l} kill f", anchor, || {
        let d1 = e1.d_dl()?;
        let d2 = e.second_lnd()?;
        let f = d1.ring().parse(&e1.f())?;
        let mut parts = Vec::new();
        for der in [&d1, &d2] {
            check(kernel_member(der, &f)?.member, || format!("{}(f) ≠ 0", der.name()))?;
            let nil = check_locally_nilpotent(der, None)?;
            parts.push(Certificate::nilpotent(der, &nil));
            parts.push(Certificate::kernel(der, &f));
        }
        Ok((Certificate::all(parts), d2))
    });
    let iso = theorem1_claims(b, 1, d, l, "theorem1: ");
    let rest = [
        "transported derivation",
        "cleared derivation",
        "f-stable",
        "lift to the cylinder over X_{d,k,l}",
        "x is not in the kernel",
        "trivial Makar-Limanov invariant",
    ];
    let (Some(delta), Some(iso)) = (ders, iso) else {
        let on = if b.claim_status("two derivations of U_{1,l} kill f").is_some_and(Status::is_verified) {
            "theorem1: cylinder iso"
        } else {
            "two derivations of U_{1,l} kill f"
        };
        for n in rest {
            b.blocked(n, anchor, on);
        }
        return;
    };
    let moved = b.claim(rest[0], anchor, || {
        let src = iso.forward.source();
        let param = &src.vars()[src.nvars() - 1];
        let mut images: BTreeMap<String, Polynomial> = BTreeMap::new();
        for (v, p) in delta.named_images() {
            if delta.ring().base_vars().contains(&v) {
                images.insert(v, p.to_ambient(src.ambient())?);
            }
        }
        images.insert(param.clone(), src.zero());
        let dw = Derivation::make(src, &images, "delta")?;
        let (moved, nil) = transport_derivation(&iso, &dw, "delta")?;
        let cert = Certificate::all(vec![
            Certificate::intertwines(&iso.forward, &dw, &moved),
            Certificate::nilpotent(&moved, &nil),
        ]);
        Ok((cert, moved))
    });
    let Some(moved) = moved else {
        for n in &rest[1..] {
            b.blocked(n, anchor, rest[0]);
        }
        return;
    };
    let cleared = b.claim(rest[1], anchor, || {
        let f = moved.ring().parse(&e.f())?;
        let c = clear_denominators(&moved, &f, 16)?;
        let factor = f.pow(c.exponent);
        let cert = Certificate::Cleared {
            original: DerivationFile::from_derivation(&moved),
            cleared: DerivationFile::from_derivation(&c.derivation),
            factor: factor.to_string(),
        };
        Ok((cert, c.derivation))
    });
    let Some(cleared) = cleared else {
        for n in &rest[2..] {
            b.blocked(n, anchor, rest[1]);
        }
        return;
    };
    b.claim(rest[2], anchor, || {
        let r = cleared.ring();
        let f = r.parse(&e.f())?;
        let df = cleared.apply(&f)?;
        let c = membership(&df, &[f.clone()], None, 0)?;
        Ok((Certificate::membership(&c), ()))
    });
    let lifted = b.claim(rest[3], anchor, || {
        let param = cleared.ring().vars().last().unwrap().clone();
        let cover = e.cover(cleared.ring(), &param)?;
        let (lifted, nil) = lift_through_cover(&cleared, &cover, &["t"])?;
        let t = lifted.ring().var("t")?;
        let cert = Certificate::all(vec![
            Certificate::nilpotent(&lifted, &nil),
            Certificate::kernel(&lifted, &t),
            Certificate::intertwines(&cover, &cleared, &lifted),
        ]);
        Ok((cert, lifted))
    });
    let Some(lifted) = lifted else {
        for n in &rest[4..] {
            b.blocked(n, anchor, rest[3]);
        }
        return;
    };
    let moved_x = b.claim(rest[4], anchor, || {
        let x = lifted.ring().var("x")?;
        let ev = kernel_member(&lifted, &x)?;
        check(!ev.member, || "x is in the kernel".into())?;
        let cert = Certificate::NotInKernel {
            derivation: DerivationFile::from_derivation(&lifted),
            element: "x".into(),
            evidence: ev.evidence.to_string(),
        };
        Ok((cert, ()))
    });
    if moved_x.is_none() {
        b.blocked(rest[5], anchor, rest[4]);
        return;
    }
    b.claim_with(rest[5], anchor, Status::VerifiedModuloCitation, || {
        let statement = "ML(X_{d,k,l}) ⊆ ℚ[x] for every Koras-Russell threefold; with an LND of the cylinder \
                         moving x, the invariant of the cylinder is the ground field";
        Ok((Certificate::Citation { statement: statement.into() }, ()))
    });
}

pub fn scenario_remark3(b: &mut Claims, d: u32, l: u32) {
    let anchor = "the kernel is ℚ[x, t^{±1}] and the bundle is trivial over x ≠ 0";
    let e = match CatalogEntry::new(d, l) {
        Ok(e) => e,
        Err(err) => return b.failed("catalog", anchor, err),
    };
    let Some(der) = b.claim("x and t in the kernel", anchor, || {
        let r = e.remark_ring()?;
        let der = e.d_remark(&r)?;
        let mut parts = vec![Certificate::derivation(&der)];
        for v in ["x", "t"] {
            let p = r.var(v)?;
            check(kernel_member(&der, &p)?.member, || format!("D({v}) ≠ 0"))?;
            parts.push(Certificate::kernel(&der, &p));
        }
        Ok((Certificate::all(parts), der))
    }) else {
        for n in ["y is not in the kernel", "slice over x ≠ 0", "translations on the fiber over x = 0"] {
            b.blocked(n, anchor, "x and t in the kernel");
        }
        return;
    };
    b.claim("y is not in the kernel", anchor, || {
        let r = der.ring();
        let ev = kernel_member(&der, &r.var("y")?)?;
        let expected = r.parse(&format!("x^{d}"))?;
        check(!ev.member && ev.evidence == expected, || format!("D(y) = {}", ev.evidence))?;
        let cert = Certificate::NotInKernel {
            derivation: DerivationFile::from_derivation(&der),
            element: "y".into(),
            evidence: ev.evidence.to_string(),
        };
        Ok((cert, ()))
    });
    b.claim("slice over x ≠ 0", anchor, || {
        let r = der.ring();
        let rx = r.localize(&[(r.var("x")?, "x_inv".into())])?;
        let mut images = BTreeMap::new();
        for v in r.base_vars() {
            images.insert(v.clone(), der.image_of(&v).unwrap().to_ambient(rx.ambient())?);
        }
        let dx = Derivation::make(&rx, &images, "D")?;
        let s = find_slice(&dx, &SliceSearch::up_to(d + 1))?;
        let expected = rx.parse(&format!("y*x_inv^{d}"))?;
        check(rx.equal(&s.element, &expected)?, || format!("slice {}", s.element))?;
        Ok((Certificate::slice(&dx, &expected), ()))
    });
    b.claim("translations on the fiber over x = 0", anchor, || {
        let r = der.ring();
        let fib = e.remark_fiber()?;
        let q = RingMap::from_strings(r, &fib, &[("x", "0"), ("y", "y"), ("z", "z"), ("t", "t"), ("t_inv", "t_inv")])?
            .verify()?;
        let residual = Derivation::from_strings(
            &fib,
            &[("y", "0"), ("z", &format!("{l}*y^{}", l - 1)), ("t", "0")],
            "D0",
        )?;
        // l·y^{l−1} is a unit with inverse y·t_inv/l
        let inv_l = FieldElement::Rational(Rational::from_integer(l as i64).recip().unwrap());
        let unit_inv = fib.parse("y*t_inv")?.scale(&inv_l);
        let product = &unit_inv * residual.image_of("z").unwrap();
        check(fib.equal(&product, &fib.one())?, || "l·y^{l−1} is not inverted".into())?;
        let scaled = Derivation::from_strings(&fib, &[("y", "0"), ("z", "1"), ("t", "0")], "dz")?;
        let cert = Certificate::all(vec![
            Certificate::intertwines(&q, &der, &residual),
            Certificate::equality(&fib, &product, &fib.one()),
            Certificate::Cleared {
                original: DerivationFile::from_derivation(&residual),
                cleared: DerivationFile::from_derivation(&scaled),
                factor: unit_inv.to_string(),
            },
            Certificate::slice(&scaled, &fib.var("z")?),
        ]);
        Ok((cert, ()))
    });
}
