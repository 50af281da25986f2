//! JSON descriptions of rings and maps.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coeff::Field;
use crate::poly::{Ambient, Polynomial};

use super::{PresentedRing, RingError, RingMap};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Named(String),
    Cyclotomic { cyclotomic: u32 },
}

impl FieldSpec {
    pub fn to_field(&self) -> Result<Field, RingError> {
        match self {
            FieldSpec::Named(s) if s == "Q" => Ok(Field::Rational),
            FieldSpec::Named(s) => Err(RingError::Invalid(format!("unknown field `{s}`"))),
            FieldSpec::Cyclotomic { cyclotomic } if *cyclotomic >= 1 => Ok(Field::cyclotomic(*cyclotomic)),
            FieldSpec::Cyclotomic { .. } => Err(RingError::Invalid("cyclotomic order must be positive".into())),
        }
    }

    pub fn from_field(f: Field) -> Self {
        match f {
            Field::Rational => FieldSpec::Named("Q".into()),
            Field::Cyclotomic(l) => FieldSpec::Cyclotomic { cyclotomic: l },
        }
    }
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Named("Q".into())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingFile {
    pub vars: Vec<String>,
    #[serde(default)]
    pub relations: Vec<String>,
    #[serde(default)]
    pub invert: Vec<String>,
    /// Names for the inverse variables; generated when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse_names: Option<Vec<String>>,
    #[serde(default)]
    pub field: FieldSpec,
}

impl RingFile {
    pub fn to_ring(&self) -> Result<PresentedRing, RingError> {
        let field = self.field.to_field()?;
        let a = Ambient::grevlex(&self.vars);
        let rels = self.relations.iter().map(|r| Polynomial::parse(r, &a, field)).collect::<Result<Vec<_>, _>>()?;
        let inv = self.invert.iter().map(|r| Polynomial::parse(r, &a, field)).collect::<Result<Vec<_>, _>>()?;
        match &self.inverse_names {
            Some(names) => {
                if names.len() != inv.len() {
                    return Err(RingError::Invalid("inverse_names and invert differ in length".into()));
                }
                let pairs: Vec<(Polynomial, String)> = inv.into_iter().zip(names.iter().cloned()).collect();
                PresentedRing::present_named(&self.vars, &rels, &pairs, field)
            }
            None => PresentedRing::present(&self.vars, &rels, &inv, field),
        }
    }

    pub fn from_ring(ring: &PresentedRing) -> Self {
        let pairs = ring.inverted_pairs();
        RingFile {
            vars: ring.base_vars(),
            relations: ring.base_relations().iter().map(|r| r.to_string()).collect(),
            invert: pairs.iter().map(|(f, _)| f.to_string()).collect(),
            inverse_names: if pairs.is_empty() { None } else { Some(pairs.iter().map(|(_, n)| n.clone()).collect()) },
            field: FieldSpec::from_field(ring.field()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub source: RingFile,
    pub target: RingFile,
    pub images: BTreeMap<String, String>,
}

impl MapFile {
    pub fn to_map(&self) -> Result<RingMap, RingError> {
        let source = self.source.to_ring()?;
        let target = self.target.to_ring()?;
        let mut images = BTreeMap::new();
        for (v, s) in &self.images {
            images.insert(v.clone(), target.parse(s)?);
        }
        RingMap::new(&source, &target, &images)
    }

    pub fn from_map(f: &RingMap) -> Self {
        MapFile {
            source: RingFile::from_ring(f.source()),
            target: RingFile::from_ring(f.target()),
            images: f.named_images().into_iter().map(|(k, v)| (k, v.to_string())).collect(),
        }
    }
}
