//! Named verification scenarios, JSON reports and their re-checking.

mod catalog;
mod certificate;
mod scenarios;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::gb::{with_config, GbConfig, GbError};
use crate::lnd::LndError;
use crate::poly::{BaseOrder, PolyError};
use crate::ring::RingError;
use crate::torsor::TorsorError;

pub use catalog::CatalogEntry;
pub use certificate::Certificate;
pub use scenarios::{
    scenario_corollary3, scenario_danielewski, scenario_foundations, scenario_phi, scenario_remark3, scenario_theorem1,
};

pub const TOOL_VERSION: &str = concat!("lndlab ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("malformed report: {0}")]
    Report(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Torsor(#[from] TorsorError),
    #[error(transparent)]
    Lnd(#[from] LndError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Gb(#[from] GbError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

impl LabError {
    /// Bounded searches that ran out.
    pub fn is_bound(&self) -> bool {
        match self {
            LabError::Torsor(e) => e.is_bound(),
            LabError::Lnd(e) => TorsorError::Lnd(e.clone()).is_bound(),
            LabError::Ring(e) => TorsorError::Ring(e.clone()).is_bound(),
            LabError::Gb(e) => TorsorError::Gb(e.clone()).is_bound(),
            _ => false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Verified,
    Failed,
    InconclusiveAtBound,
    VerifiedModuloCitation,
}

impl Status {
    pub fn is_verified(self) -> bool {
        matches!(self, Status::Verified | Status::VerifiedModuloCitation)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub anchor: String,
    pub status: Status,
    /// SHA-256 of the serialized certificate.
    pub digest: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<u64>,
}

/// Bounds and switches for a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabConfig {
    pub max_degree: u32,
    pub max_depth: Option<u32>,
    pub retry: bool,
    pub jobs: usize,
    pub order: BaseOrder,
    /// Record wall times; reports are then no longer byte-stable.
    pub timings: bool,
}

impl Default for LabConfig {
    fn default() -> Self {
        LabConfig { max_degree: 16, max_depth: None, retry: true, jobs: 1, order: BaseOrder::Grevlex, timings: false }
    }
}

/// The part of [`LabConfig`] that can change results.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub max_degree: u32,
    pub max_depth: Option<u32>,
    pub retry: bool,
    pub order: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub parameters: BTreeMap<String, u32>,
    pub claims: Vec<Claim>,
    pub tool_version: String,
    pub config: ConfigEcho,
}

impl Report {
    /// Verified unless some claim failed or ran out of bounds.
    pub fn status(&self) -> Status {
        if self.claims.iter().any(|c| c.status == Status::Failed) {
            Status::Failed
        } else if self.claims.iter().any(|c| c.status == Status::InconclusiveAtBound) {
            Status::InconclusiveAtBound
        } else {
            Status::Verified
        }
    }

    /// 0 when verified, 2 when inconclusive, 1 on failure.
    pub fn exit_code(&self) -> i32 {
        match self.status() {
            Status::Failed => 1,
            Status::InconclusiveAtBound => 2,
            _ => 0,
        }
    }

    pub fn claim(&self, name: &str) -> Option<&Claim> {
        self.claims.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Report, LabError> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn digest(cert: &Certificate) -> String {
    use sha2::{Digest, Sha256};
    let bytes = serde_json::to_vec(cert).expect("certificate serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Outcome of re-checking one claim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recheck {
    pub name: String,
    pub ok: bool,
    pub detail: String,
}

/// Re-expands every certificate of every verified claim, without searching.
pub fn recheck(report: &Report) -> Vec<Recheck> {
    report
        .claims
        .iter()
        .filter(|c| c.status.is_verified())
        .map(|c| {
            let (ok, detail) = match &c.certificate {
                None => (false, "no certificate".to_string()),
                Some(cert) if c.digest.as_deref() != Some(digest(cert).as_str()) => (false, "digest mismatch".into()),
                Some(cert) => match cert.recheck() {
                    Ok(true) => (true, "ok".into()),
                    Ok(false) => (false, "identity does not hold".into()),
                    Err(e) => (false, e.to_string()),
                },
            };
            Recheck { name: c.name.clone(), ok, detail }
        })
        .collect()
}

/// A named scenario with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    Foundations { d: u32, l: u32 },
    Phi { d: u32, l: u32 },
    Danielewski,
    Theorem1 { d: u32, dprime: u32, l: u32 },
    Corollary3 { d: u32, k: u32, l: u32 },
    Remark3 { d: u32, l: u32 },
}

impl Scenario {
    pub fn id(&self) -> &'static str {
        match self {
            Scenario::Foundations { .. } => "foundations",
            Scenario::Phi { .. } => "phi",
            Scenario::Danielewski => "danielewski",
            Scenario::Theorem1 { .. } => "theorem1",
            Scenario::Corollary3 { .. } => "corollary3",
            Scenario::Remark3 { .. } => "remark3",
        }
    }

    pub fn parameters(&self) -> BTreeMap<String, u32> {
        let list: Vec<(&str, u32)> = match *self {
            Scenario::Foundations { d, l } | Scenario::Phi { d, l } | Scenario::Remark3 { d, l } => vec![("d", d), ("l", l)],
            Scenario::Danielewski => vec![],
            Scenario::Theorem1 { d, dprime, l } => vec![("d", d), ("dprime", dprime), ("l", l)],
            Scenario::Corollary3 { d, k, l } => vec![("d", d), ("k", k), ("l", l)],
        };
        list.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
    }

    /// Checks parameters without running anything.
    pub fn validate(&self) -> Result<(), LabError> {
        match *self {
            Scenario::Foundations { d, l } | Scenario::Phi { d, l } => {
                CatalogEntry::new(d, l)?;
            }
            Scenario::Remark3 { d, l } => {
                CatalogEntry::new(d, l)?;
            }
            Scenario::Danielewski => {}
            Scenario::Theorem1 { d, dprime, l } => {
                CatalogEntry::new(d, l)?;
                CatalogEntry::new(dprime, l)?;
            }
            Scenario::Corollary3 { d, k, l } => {
                CatalogEntry::koras_russell(d, k, l)?;
            }
        }
        Ok(())
    }

    /// Runs the scenario under `cfg`. Parameter errors are returned; every
    /// other failure is recorded in the report.
    pub fn run(&self, cfg: &LabConfig) -> Result<Report, LabError> {
        self.validate()?;
        let gb = GbConfig { jobs: cfg.jobs.max(1), order: cfg.order, ..GbConfig::default() };
        let claims = with_config(gb, || {
            let mut b = Claims::new(cfg);
            match *self {
                Scenario::Foundations { d, l } => scenario_foundations(&mut b, d, l),
                Scenario::Phi { d, l } => scenario_phi(&mut b, d, l),
                Scenario::Danielewski => scenario_danielewski(&mut b),
                Scenario::Theorem1 { d, dprime, l } => {
                    scenario_theorem1(&mut b, d, dprime, l);
                }
                Scenario::Corollary3 { d, k, l } => scenario_corollary3(&mut b, d, k, l),
                Scenario::Remark3 { d, l } => scenario_remark3(&mut b, d, l),
            }
            b.claims
        });
        Ok(Report {
            scenario: self.id().to_string(),
            parameters: self.parameters(),
            claims,
            tool_version: TOOL_VERSION.to_string(),
            config: ConfigEcho {
                max_degree: cfg.max_degree,
                max_depth: cfg.max_depth,
                retry: cfg.retry,
                order: match cfg.order {
                    BaseOrder::Lex => "lex".into(),
                    BaseOrder::Grevlex => "grevlex".into(),
                },
            },
        })
    }
}

/// Collects claims in order; a claim is verified only if its certificate rechecks.
pub struct Claims {
    pub claims: Vec<Claim>,
    cfg: LabConfig,
}

impl Claims {
    fn new(cfg: &LabConfig) -> Self {
        Claims { claims: Vec::new(), cfg: cfg.clone() }
    }

    pub fn config(&self) -> &LabConfig {
        &self.cfg
    }

    /// Runs `f` and records its certificate, returning the value it produced.
    pub fn claim<T>(
        &mut self,
        name: &str,
        anchor: &str,
        f: impl FnOnce() -> Result<(Certificate, T), LabError>,
    ) -> Option<T> {
        self.claim_with(name, anchor, Status::Verified, f)
    }

    pub fn claim_with<T>(
        &mut self,
        name: &str,
        anchor: &str,
        on_success: Status,
        f: impl FnOnce() -> Result<(Certificate, T), LabError>,
    ) -> Option<T> {
        let start = Instant::now();
        let result = f();
        let wall_ms = self.cfg.timings.then(|| start.elapsed().as_millis() as u64);
        let (status, detail, certificate, value) = match result {
            Ok((cert, value)) => match cert.recheck() {
                Ok(true) => (on_success, None, Some(cert), Some(value)),
                Ok(false) => (Status::Failed, Some("certificate does not recheck".to_string()), None, None),
                Err(e) => (Status::Failed, Some(format!("certificate does not recheck: {e}")), None, None),
            },
            Err(e) if e.is_bound() => (Status::InconclusiveAtBound, Some(e.to_string()), None, None),
            Err(e) => (Status::Failed, Some(e.to_string()), None, None),
        };
        let digest = certificate.as_ref().map(digest);
        self.claims.push(Claim { name: name.into(), anchor: anchor.into(), status, digest, detail, certificate, wall_ms });
        value
    }

    /// Records a failure that happened before any claim could run.
    pub fn failed(&mut self, name: &str, anchor: &str, err: LabError) {
        self.claim::<()>(name, anchor, || Err(err));
    }

    pub fn claim_status(&self, name: &str) -> Option<Status> {
        self.claims.iter().find(|c| c.name == name).map(|c| c.status)
    }

    /// Records a claim that could not run because an earlier one did not verify.
    pub fn blocked(&mut self, name: &str, anchor: &str, on: &str) {
        let status = match self.claims.iter().find(|c| c.name == on).map(|c| c.status) {
            Some(Status::InconclusiveAtBound) => Status::InconclusiveAtBound,
            _ => Status::Failed,
        };
        self.claims.push(Claim {
            name: name.into(),
            anchor: anchor.into(),
            status,
            digest: None,
            detail: Some(format!("depends on `{on}`")),
            certificate: None,
            wall_ms: None,
        });
    }
}
