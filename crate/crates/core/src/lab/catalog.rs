//! The rings, maps and derivations of the catalog, built from `(d, l)` or `(d, k, l)`.

use num_integer::Integer;

use crate::coeff::Field;
use crate::lnd::Derivation;
use crate::ring::{MonomialGroupAction, PresentedRing, RingMap};

use super::LabError;

/// `u^e` for any integer `e`, written with `u_inv` when `e < 0`.
fn upow(e: i64) -> String {
    match e {
        0 => "1".into(),
        e if e > 0 => format!("u^{e}"),
        e => format!("u_inv^{}", -e),
    }
}

/// Parameters of one catalog family. Objects are built on demand.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub d: u32,
    pub l: u32,
    pub k: Option<u32>,
}

impl CatalogEntry {
    /// `d ≥ 1`, `l ≥ 2`.
    pub fn new(d: u32, l: u32) -> Result<Self, LabError> {
        if d < 1 {
            return Err(LabError::Parameter(format!("d must be at least 1, got {d}")));
        }
        if l < 2 {
            return Err(LabError::Parameter(format!("l must be at least 2, got {l}")));
        }
        Ok(CatalogEntry { d, l, k: None })
    }

    /// `d ≥ 2`, `2 ≤ l < k`, `gcd(k, l) = 1`.
    pub fn koras_russell(d: u32, k: u32, l: u32) -> Result<Self, LabError> {
        if d < 2 {
            return Err(LabError::Parameter(format!("d must be at least 2, got {d}")));
        }
        if l < 2 || l >= k {
            return Err(LabError::Parameter(format!("need 2 ≤ l < k, got l = {l}, k = {k}")));
        }
        if k.gcd(&l) != 1 {
            return Err(LabError::Parameter(format!("k = {k} and l = {l} are not coprime")));
        }
        Ok(CatalogEntry { d, l, k: Some(k) })
    }

    /// `f = y^l + x − x^d·z`.
    pub fn f(&self) -> String {
        format!("y^{} + x - x^{}*z", self.l, self.d)
    }

    /// `D_{d,l} = x^d ∂_y + l·y^{l−1} ∂_z`, as images of `x, y, z`.
    fn d_images(&self) -> [(String, String); 3] {
        [
            ("x".into(), "0".into()),
            ("y".into(), format!("x^{}", self.d)),
            ("z".into(), format!("{}*y^{}", self.l, self.l - 1)),
        ]
    }

    /// `ℚ[x, y, z]`.
    pub fn b(&self) -> PresentedRing {
        PresentedRing::polynomial_ring(&["x", "y", "z"])
    }

    /// `ℚ[x, y, z][1/f]`, the inverse of `f` named `f_inv`.
    pub fn u(&self) -> Result<PresentedRing, LabError> {
        Ok(PresentedRing::from_strings(&["x", "y", "z"], &[], &[(&self.f(), "f_inv")], Field::Rational)?)
    }

    /// `D_{d,l}` on `U`.
    pub fn d_dl(&self) -> Result<Derivation, LabError> {
        let u = self.u()?;
        derivation(&u, &self.d_images(), "D")
    }

    /// `ℚ[X, Y, Z]/(X^d·Z − Y^l − X + 1)`.
    pub fn s(&self) -> Result<PresentedRing, LabError> {
        let rel = format!("X^{}*Z - Y^{} - X + 1", self.d, self.l);
        Ok(PresentedRing::from_strings(&["X", "Y", "Z"], &[&rel], &[], Field::Rational)?)
    }

    /// `S[u, 1/u]`.
    pub fn s_star(&self) -> Result<PresentedRing, LabError> {
        let rel = format!("X^{}*Z - Y^{} - X + 1", self.d, self.l);
        Ok(PresentedRing::from_strings(&["X", "Y", "Z", "u"], &[&rel], &[("u", "u_inv")], Field::Rational)?)
    }

    /// `ℚ[x, y, z, u]/(u^l − f)[1/u]`, the fiber product of `U` with the `l`-th power map.
    pub fn fiber(&self) -> Result<PresentedRing, LabError> {
        let rel = format!("u^{} - y^{} - x + x^{}*z", self.l, self.l, self.d);
        Ok(PresentedRing::from_strings(&["x", "y", "z", "u"], &[&rel], &[("u", "u_inv")], Field::Rational)?)
    }

    /// `ℚ[X, Y, Z, u][1/u]`, where the pullback identity is checked.
    pub fn chart(&self) -> Result<PresentedRing, LabError> {
        Ok(PresentedRing::from_strings(&["X", "Y", "Z", "u"], &[], &[("u", "u_inv")], Field::Rational)?)
    }

    fn phi_images(&self) -> [(String, String); 3] {
        let (d, l) = (self.d as i64, self.l as i64);
        [
            ("x".into(), format!("{}*X", upow(l))),
            ("y".into(), "u*Y".into()),
            ("z".into(), format!("{}*Z", upow((1 - d) * l))),
        ]
    }

    /// `Φ*`: fiber product → `S[u, 1/u]`.
    pub fn phi(&self) -> Result<RingMap, LabError> {
        self.phi_into(&self.fiber()?, &self.s_star()?, &[("u", "u"), ("u_inv", "u_inv")])
    }

    /// `Φ*` on the polynomial level, into `ℚ[X, Y, Z, u][1/u]`.
    pub fn phi_chart(&self) -> Result<RingMap, LabError> {
        let src = PresentedRing::from_strings(&["x", "y", "z"], &[], &[], Field::Rational)?;
        self.phi_into(&src, &self.chart()?, &[])
    }

    /// `U → S[u, 1/u]`, the composite of `Φ*` with `U →` fiber product.
    pub fn phi_down(&self) -> Result<RingMap, LabError> {
        let fi = upow(-(self.l as i64));
        self.phi_into(&self.u()?, &self.s_star()?, &[("f_inv", &fi)])
    }

    fn phi_into(&self, src: &PresentedRing, dst: &PresentedRing, extra: &[(&str, &str)]) -> Result<RingMap, LabError> {
        let ims = self.phi_images();
        let mut all: Vec<(&str, &str)> = ims.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        all.extend_from_slice(extra);
        Ok(RingMap::from_strings(src, dst, &all)?)
    }

    /// The monomial inverse of `Φ*`.
    pub fn phi_inverse(&self) -> Result<RingMap, LabError> {
        let (d, l) = (self.d as i64, self.l as i64);
        let x = format!("{}*x", upow(-l));
        let z = format!("{}*z", upow((d - 1) * l));
        let ims = [("X", x.as_str()), ("Y", "u_inv*y"), ("Z", z.as_str()), ("u", "u"), ("u_inv", "u_inv")];
        Ok(RingMap::from_strings(&self.s_star()?, &self.fiber()?, &ims)?)
    }

    /// `μ_l` on `S[u, 1/u]` with weights `Y ↦ −1`, `u ↦ 1`.
    pub fn action(&self) -> Result<MonomialGroupAction, LabError> {
        Ok(MonomialGroupAction::new(&self.s_star()?, self.l, &[("Y", -1), ("u", 1)])?)
    }

    /// `u^{ld−1}(X^d ∂_Y + l·Y^{l−1} ∂_Z)`.
    pub fn lifted(&self) -> Result<Derivation, LabError> {
        let (d, l) = (self.d, self.l);
        let e = l * d - 1;
        let y = format!("u^{e}*X^{d}");
        let z = format!("{l}*u^{e}*Y^{}", l - 1);
        let ims = [("X".into(), "0".into()), ("Y".into(), y), ("Z".into(), z), ("u".into(), "0".into())];
        derivation(&self.s_star()?, &ims, "E")
    }

    /// `D_{d,l}` on the fiber product, killing `u`.
    pub fn d_fiber(&self) -> Result<Derivation, LabError> {
        let mut ims = self.d_images().to_vec();
        ims.push(("u".into(), "0".into()));
        derivation(&self.fiber()?, &ims, "D")
    }

    /// `l·y^{l−1} ∂_x + (z − 1) ∂_y` on `U_{1,l}`.
    pub fn second_lnd(&self) -> Result<Derivation, LabError> {
        let u = CatalogEntry::new(1, self.l)?.u()?;
        let ims = [
            ("x".into(), format!("{}*y^{}", self.l, self.l - 1)),
            ("y".into(), "z - 1".into()),
            ("z".into(), "0".into()),
        ];
        derivation(&u, &ims, "delta")
    }

    fn k(&self) -> Result<u32, LabError> {
        self.k.ok_or_else(|| LabError::Parameter("not a Koras-Russell entry".into()))
    }

    /// `ℚ[x, y, z, t]/(x^d·z − y^l − x + t^k)`.
    pub fn x_dkl(&self) -> Result<PresentedRing, LabError> {
        let rel = format!("x^{}*z - y^{} - x + t^{}", self.d, self.l, self.k()?);
        Ok(PresentedRing::from_strings(&["x", "y", "z", "t"], &[&rel], &[], Field::Rational)?)
    }

    /// The cylinder over `X_{d,k,l}`.
    pub fn x_dkl_cylinder(&self, param: &str) -> Result<PresentedRing, LabError> {
        Ok(self.x_dkl()?.tensor_with_polynomial_line(param)?)
    }

    /// The cover `ℚ[x, y, z, w] → X_{d,k,l}[w]`, identity on names.
    pub fn cover(&self, base: &PresentedRing, param: &str) -> Result<RingMap, LabError> {
        let total = self.x_dkl_cylinder(param)?;
        let ims: Vec<(&str, &str)> = ["x", "y", "z", param].iter().map(|v| (*v, *v)).collect();
        Ok(RingMap::from_strings(base, &total, &ims)?.verify()?)
    }

    /// `ℚ[x, y, z, t]/(x^d·z − y^l − x + t)[1/t]`.
    pub fn remark_ring(&self) -> Result<PresentedRing, LabError> {
        let rel = format!("x^{}*z - y^{} - x + t", self.d, self.l);
        Ok(PresentedRing::from_strings(&["x", "y", "z", "t"], &[&rel], &[("t", "t_inv")], Field::Rational)?)
    }

    /// `D_{d,l}` on the remark ring, killing `t`.
    pub fn d_remark(&self, ring: &PresentedRing) -> Result<Derivation, LabError> {
        let mut ims = self.d_images().to_vec();
        ims.push(("t".into(), "0".into()));
        derivation(ring, &ims, "D")
    }

    /// `ℚ[y, z, t]/(y^l − t)[1/t]`, the fiber over `x = 0`.
    pub fn remark_fiber(&self) -> Result<PresentedRing, LabError> {
        let rel = format!("y^{} - t", self.l);
        Ok(PresentedRing::from_strings(&["y", "z", "t"], &[&rel], &[("t", "t_inv")], Field::Rational)?)
    }
}

fn derivation(ring: &PresentedRing, images: &[(String, String)], name: &str) -> Result<Derivation, LabError> {
    let ims: Vec<(&str, &str)> = images.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    Ok(Derivation::from_strings(ring, &ims, name)?)
}
