//! Exact certificates for locally nilpotent derivations, Ga-torsors and
//! cylinder isomorphisms between affine varieties.

pub mod coeff;
pub mod gb;
pub mod linalg;
pub mod lnd;
pub mod poly;
pub mod ring;
pub mod torsor;
pub mod lab;
