//! The JSON report and the CSV residual history. The schema is documented
//! in docs/report-format.md; keep the two in sync.

use crate::stability::{CatalogEntry, StabilityKind, Verdict};
use crate::vortex::{HistoryRow, SolveReport, SolveStatus, VortexConstants};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    /// Passes when `value` ≤ `tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Check {
        Check { name: name.into(), passed: value <= tolerance, value, tolerance }
    }

    /// Passes when `value` ≥ `tolerance`.
    pub fn at_least(name: &str, value: f64, tolerance: f64) -> Check {
        Check { name: name.into(), passed: value >= tolerance, value, tolerance }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsBlock {
    pub tau: String,
    pub tau_prime: String,
    pub sigma: String,
    /// [re, im] of λ; absent when σ ≤ 0.
    pub lambda: Option<[f64; 2]>,
}

impl From<&VortexConstants> for ConstantsBlock {
    fn from(c: &VortexConstants) -> Self {
        ConstantsBlock {
            tau: c.tau.to_string(),
            tau_prime: c.tau_prime.to_string(),
            sigma: c.sigma.to_string(),
            lambda: c.lambda_he.map(|l| [l.re, l.im]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub status: SolveStatus,
    pub converged: bool,
    pub iterations: usize,
    pub final_sup_r1: f64,
    pub final_sup_r2: f64,
    pub history: Vec<HistoryRow>,
}

impl From<&SolveReport> for SolverSummary {
    fn from(r: &SolveReport) -> Self {
        SolverSummary {
            status: r.status,
            converged: r.converged,
            iterations: r.iterations,
            final_sup_r1: r.final_sup_r1,
            final_sup_r2: r.final_sup_r2,
            history: r.history.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilitySummary {
    pub verdict: StabilityKind,
    pub parameter: String,
    /// Largest Θ_τ over the catalog, exact.
    pub max_value: Option<String>,
    pub witnesses: Vec<CatalogEntry>,
    pub vacuous: bool,
    pub catalog_size: usize,
}

impl StabilitySummary {
    pub fn new(v: &Verdict, parameter: String, catalog_size: usize) -> StabilitySummary {
        StabilitySummary {
            verdict: v.kind,
            parameter,
            max_value: v.max_value.as_ref().map(|m| m.to_string()),
            witnesses: v.witnesses.clone(),
            vacuous: v.vacuous,
            catalog_size,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub schema_version: u32,
    /// SHA-256 of the configuration text, hex.
    pub config_sha256: Option<String>,
    pub seed: Option<u64>,
}

impl Provenance {
    pub fn new(config_text: Option<&str>, seed: Option<u64>) -> Provenance {
        Provenance {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            schema_version: SCHEMA_VERSION,
            config_sha256: config_text.map(|t| hex::encode(Sha256::digest(t.as_bytes()))),
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub passed: bool,
    pub constants: Option<ConstantsBlock>,
    pub solver: Option<SolverSummary>,
    pub stability: Option<StabilitySummary>,
    /// Named measured quantities that are not pass/fail checks.
    pub values: Vec<(String, f64)>,
    pub checks: Vec<Check>,
    pub provenance: Provenance,
}

impl Report {
    pub fn new(command: &str, provenance: Provenance) -> Report {
        Report {
            command: command.into(),
            passed: true,
            constants: None,
            solver: None,
            stability: None,
            values: vec![],
            checks: vec![],
            provenance,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn value(&mut self, name: &str, v: f64) {
        self.values.push((name.into(), v));
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Invalid(format!("report serialization: {e}")))
    }

    pub fn from_json(s: &str) -> Result<Report> {
        serde_json::from_str(s).map_err(|e| Error::Invalid(format!("report parse: {e}")))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}

/// iteration,sup_r1,sup_r2 with full-precision floats.
pub fn write_history_csv<W: Write>(rows: &[HistoryRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for r in rows {
        wr.serialize(r).map_err(|e| Error::Invalid(e.to_string()))?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stability::QuadInvariants;

    fn sample() -> Report {
        let mut r = Report::new("solve", Provenance::new(Some("[grid]\nn = 8\n"), Some(3)));
        r.check(Check::at_most("residual", 1.0e-9, 1e-8));
        r.check(Check::at_least("broken", 0.1 / 3.0, 1e-2));
        r.value("raw", std::f64::consts::PI);
        r.solver = Some(SolverSummary {
            status: SolveStatus::Converged,
            converged: true,
            iterations: 2,
            final_sup_r1: 1.0 / 3.0,
            final_sup_r2: 2e-9,
            history: vec![HistoryRow { iteration: 0, sup_r1: 0.1, sup_r2: 0.7 }],
        });
        r.stability = Some(StabilitySummary {
            verdict: StabilityKind::Unstable,
            parameter: "1".into(),
            max_value: Some("1".into()),
            witnesses: vec![CatalogEntry::new(QuadInvariants::new(0, 1, 0, 0), "coordinate:[]|[0]")],
            vacuous: false,
            catalog_size: 2,
        });
        r
    }

    #[test]
    fn report_round_trips() {
        let r = sample();
        assert!(r.passed);
        assert_eq!(Report::from_json(&r.to_json().unwrap()).unwrap(), r);
    }

    #[test]
    fn failing_check_fails_report() {
        let mut r = sample();
        r.check(Check::at_most("bad", 2.0, 1.0));
        assert!(!r.passed);
    }

    #[test]
    fn config_hash_is_hex_sha256() {
        let p = Provenance::new(Some(""), None);
        assert_eq!(p.config_sha256.unwrap(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    #[test]
    fn history_csv_header() {
        let mut buf = Vec::new();
        write_history_csv(&[HistoryRow { iteration: 1, sup_r1: 0.5, sup_r2: 0.25 }], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "iteration,sup_r1,sup_r2\n1,0.5,0.25\n");
    }
}
