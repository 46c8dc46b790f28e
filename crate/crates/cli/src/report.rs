//! The report envelope shared by every subcommand.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use twistlab_core::analysis::{HTableReport, PsiReport};
use twistlab_core::conics::{ConicRecord, SweepRow};
use twistlab_core::surface::{NearMiss, SingularLocus};
use twistlab_core::{
    ClassificationReport, IntervalLabel, SurfaceParams, TangencyReport, TouchingKind,
    ValidationReport,
};

use crate::args::RunConfig;

pub const SCHEMA: &str = "twistlab.report/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Self::Pass => 0,
            Self::Fail => 1,
            Self::Inconclusive => 2,
        }
    }
}

impl From<twistlab_core::Status> for Status {
    fn from(s: twistlab_core::Status) -> Self {
        match s {
            twistlab_core::Status::Pass => Self::Pass,
            twistlab_core::Status::Fail => Self::Fail,
            twistlab_core::Status::Inconclusive => Self::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchSection {
    pub found: bool,
    pub near_miss: Option<NearMiss>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConicSection {
    pub record: ConicRecord,
    /// Certification of a generic or special conic.
    pub check: Option<SweepRow>,
    pub touching: Option<TangencyReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitRow {
    pub lambda: f64,
    pub alpha: f64,
    pub kind: TouchingKind,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitCertificate {
    pub alpha: f64,
    pub no_real_points: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TangencySection {
    pub rows: Vec<SweepRow>,
    pub orbit_rows: Vec<OrbitRow>,
    pub orbit_certificates: Vec<OrbitCertificate>,
    pub failures: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HscanRow {
    pub kind: &'static str,
    pub ell1: &'static str,
    pub ell2: &'static str,
    pub ell3: &'static str,
    pub interval: IntervalLabel,
    pub lambda: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct HscanSection {
    pub rows: Vec<HscanRow>,
}

/// Top-level document. The fixed sections are always present (`null` when a
/// command does not compute them); command-specific sections are omitted.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub status: Status,
    pub config: RunConfig,
    pub params: Option<SurfaceParams>,
    pub validation: Option<ValidationReport>,
    pub singular_locus: Option<SingularLocus>,
    pub h_tables: Option<HTableReport>,
    pub classification: Option<ClassificationReport>,
    pub psi: Option<PsiReport>,
    pub timings: Option<BTreeMap<&'static str, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conic: Option<ConicSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangency: Option<TangencySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hscan: Option<HscanSection>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub errors: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str, config: RunConfig) -> Self {
        Self {
            schema: SCHEMA,
            version: twistlab_core::VERSION,
            command,
            status: Status::Pass,
            config,
            params: None,
            validation: None,
            singular_locus: None,
            h_tables: None,
            classification: None,
            psi: None,
            timings: None,
            search: None,
            conic: None,
            tangency: None,
            hscan: None,
            errors: Vec::new(),
        }
    }

    /// Lowers the status; `Fail` dominates `Inconclusive`, which dominates `Pass`.
    pub fn degrade(&mut self, status: Status) {
        self.status = self.status.max(status);
    }

    pub fn fail(&mut self, status: Status, error: impl ToString) {
        self.degrade(status);
        self.errors.push(error.to_string());
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn hscan_csv(&self) -> anyhow::Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in self.hscan.iter().flat_map(|h| &h.rows) {
            w.serialize(row)?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

/// Wall-clock time per stage, in seconds.
#[derive(Debug, Default)]
pub struct Timer {
    stages: BTreeMap<&'static str, f64>,
}

impl Timer {
    pub fn time<T>(&mut self, stage: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.stages.entry(stage).or_default() += start.elapsed().as_secs_f64();
        out
    }

    pub fn into_stages(self) -> BTreeMap<&'static str, f64> {
        self.stages
    }
}
