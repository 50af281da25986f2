//! Canonical multivariate polynomials over an exact coefficient field.

mod monomial;
mod parse;
mod polynomial;

pub use monomial::{BaseOrder, Monomial, MonomialOrder};
pub use polynomial::{Ambient, Polynomial, Term};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PolyError {
    #[error("polynomials live over different variable lists or orders")]
    AmbientMismatch,
    #[error("no image given for variable `{0}`")]
    MissingImage(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;
    use std::sync::Arc;

    use super::*;
    use crate::coeff::{Field, FieldElement};

    fn xyz() -> Arc<Ambient> {
        Ambient::grevlex(&["x", "y", "z"])
    }

    fn p(s: &str, a: &Arc<Ambient>) -> Polynomial {
        Polynomial::parse_q(s, a).unwrap()
    }

    #[test]
    fn arithmetic_examples() {
        let a = xyz();
        assert_eq!(&p("y^2 + x", &a) - &p("y^2", &a), p("x", &a));
        assert_eq!(&p("y - 1", &a) * &p("y + 1", &a), p("y^2 - 1", &a));
    }

    #[test]
    fn f22_grevlex_term_order() {
        let a = xyz();
        let f = p("y^2 + x - x^2*z", &a);
        let monos: Vec<Vec<u32>> = f.terms().iter().map(|t| t.mono.exponents().to_vec()).collect();
        assert_eq!(monos, vec![vec![2, 0, 1], vec![0, 2, 0], vec![1, 0, 0]]);
        assert_eq!(f.terms()[0].coeff, FieldElement::from_integer(-1));
        assert_eq!(f.to_string(), "-x^2*z + y^2 + x");
    }

    #[test]
    fn substitution_examples() {
        let a = xyz();
        let t = Ambient::grevlex(&["X", "Y", "Z", "u"]);
        let images: BTreeMap<String, Polynomial> = [
            ("x".to_string(), p("u^2*X", &t)),
            ("y".to_string(), p("u*Y", &t)),
            ("z".to_string(), p("Z", &t)),
        ]
        .into_iter()
        .collect();
        let pulled = p("y^2 + x - x*z", &a).substitute_map(&images, &t).unwrap();
        assert_eq!(pulled, p("u^2*Y^2 + u^2*X - u^2*X*Z", &t));

        let id: Vec<Polynomial> = (0..3).map(|i| Polynomial::var(&a, i)).collect();
        let q = p("3*x^2*y - z + 7/2", &a);
        assert_eq!(q.substitute(&id, &a).unwrap(), q);

        let shift = vec![p("x", &a), p("y + 1", &a), p("z", &a)];
        assert_eq!(p("y^2 - 1", &a).substitute(&shift, &a).unwrap(), p("y^2 + 2*y", &a));

        let mut partial_map = images.clone();
        partial_map.remove("z");
        assert_eq!(
            p("x*z", &a).substitute_map(&partial_map, &t),
            Err(PolyError::MissingImage("z".into()))
        );
    }

    #[test]
    fn partial_examples() {
        let a = xyz();
        assert_eq!(p("y^5", &a).partial(1), p("5*y^4", &a));
        assert_eq!(p("y^2 + x - x^2*z", &a).partial_named("x").unwrap(), p("1 - 2*x*z", &a));
        assert!(p("7/3", &a).partial(0).is_zero());
        assert_eq!(p("x", &a).partial_named("w"), Err(PolyError::UnknownVariable("w".into())));
    }

    #[test]
    fn ambient_mismatch() {
        let a = xyz();
        let b = Ambient::lex(&["x", "y", "z"]);
        assert_eq!(p("x", &a).try_add(&p("x", &b)), Err(PolyError::AmbientMismatch));
    }

    #[test]
    fn parse_errors_and_forms() {
        let a = xyz();
        assert!(Polynomial::parse_q("x +", &a).is_err());
        assert!(Polynomial::parse_q("x^-1", &a).is_err());
        assert!(Polynomial::parse_q("x/y", &a).is_err());
        assert!(Polynomial::parse_q("(x", &a).is_err());
        assert_eq!(Polynomial::parse_q("q", &a), Err(PolyError::UnknownVariable("q".into())));
        assert_eq!(p("  -(x+1)^2 ", &a), p("-x^2 - 2*x - 1", &a));
        assert_eq!(p("1/2*x - -y", &a).to_string(), "1/2*x + y");
        let primed = Ambient::grevlex(&["y'", "m_1"]);
        assert_eq!(p("y'*m_1 - y'", &primed).to_string(), "y'*m_1 - y'");
    }

    #[test]
    fn cyclotomic_coefficients_roundtrip() {
        let a = xyz();
        let f = Field::Cyclotomic(3);
        let q = Polynomial::parse("(1 + zeta)*x^2 - zeta*y + zeta^2", &a, f).unwrap();
        let printed = q.to_string();
        assert_eq!(printed, "(1 + zeta)*x^2 - zeta*y + (-1 - zeta)");
        assert_eq!(Polynomial::parse(&printed, &a, f).unwrap(), q);
        assert_eq!(f.parse_element("1 - zeta^2").unwrap().to_string(), "2 + zeta");
        assert!(Polynomial::parse("zeta*x", &a, Field::Rational).is_err());
    }
}
