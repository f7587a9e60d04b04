//! Deterministic machine-readable reports.
//!
//! The JSON schema is versioned (`"schema": 1`); lengths and `q` are
//! serialized as decimal strings and normalized values as exact `num/den`
//! strings with a float convenience field, because `q^{ed}` overflows
//! native integers quickly. Two runs over identical input and flags produce
//! byte-identical output.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::invariants::{SequenceReport, SplittingProbe, TcVerdict};
use crate::table::{rational_to_f64, Estimate, InvariantTable};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct RowOut {
    pub e: u32,
    pub q: String,
    pub length: String,
    pub normalized: String,
    pub normalized_float: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilized_t: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TableOut {
    pub kind: &'static str,
    pub d: usize,
    pub rows: Vec<RowOut>,
}

impl TableOut {
    pub fn from_table(table: &InvariantTable) -> TableOut {
        TableOut {
            kind: table.kind.as_str(),
            d: table.d,
            rows: table
                .rows
                .iter()
                .map(|r| RowOut {
                    e: r.e,
                    q: r.q.to_string(),
                    length: r.length.to_string(),
                    normalized: format!("{}/{}", r.normalized.numer(), r.normalized.denom()),
                    normalized_float: rational_to_f64(&r.normalized),
                    stabilized_t: r.stabilized_t,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateOut {
    pub eta: String,
    pub eta_float: f64,
    pub alpha_float: f64,
    pub error_bound: f64,
    pub model: String,
    pub samples_used: (u32, u32),
}

impl EstimateOut {
    pub fn from_estimate(est: &Estimate) -> EstimateOut {
        EstimateOut {
            eta: format!("{}/{}", est.eta.numer(), est.eta.denom()),
            eta_float: est.eta_f64,
            alpha_float: est.alpha_f64,
            error_bound: est.error_bound,
            model: est.model.clone(),
            samples_used: est.samples_used,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictOut {
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplier_ideal: Option<Vec<String>>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplittingOut {
    pub prime_generators: Vec<String>,
    pub prime_is_zero_ideal: bool,
    pub stabilized: bool,
    pub n_est: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SequenceOut {
    pub intersection_generators: Vec<String>,
    pub intersection_stabilized: bool,
    pub intersection_is_zero: bool,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct Diagnostics {
    pub budget_hit: bool,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RingEcho {
    pub p: u64,
    pub vars: Vec<String>,
    pub relations: Vec<String>,
    pub order: String,
}

/// The complete report for one command invocation.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub engine: String,
    pub command: String,
    pub args: BTreeMap<String, String>,
    pub input_hash: String,
    pub ring: RingEcho,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub groebner_basis: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colength: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tables: Vec<TableOut>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub estimates: Vec<EstimateOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<VerdictOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub splitting: Option<SplittingOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<SequenceOut>,
    pub diagnostics: Diagnostics,
}

impl Report {
    pub fn new(
        command: &str,
        args: BTreeMap<String, String>,
        input_hash: String,
        ring: RingEcho,
    ) -> Report {
        Report {
            schema: SCHEMA_VERSION,
            engine: crate::ENGINE_VERSION.to_string(),
            command: command.to_string(),
            args,
            input_hash,
            ring,
            groebner_basis: Vec::new(),
            colength: None,
            tables: Vec::new(),
            estimates: Vec::new(),
            verdict: None,
            splitting: None,
            sequence: None,
            diagnostics: Diagnostics::default(),
        }
    }

    pub fn push_table(&mut self, table: &InvariantTable) {
        self.tables.push(TableOut::from_table(table));
    }

    pub fn push_estimate(&mut self, est: &Estimate) {
        self.estimates.push(EstimateOut::from_estimate(est));
    }

    pub fn set_verdict(&mut self, v: &TcVerdict) {
        if let Some(t) = &v.table {
            self.push_table(t);
        }
        if let Some(e) = &v.estimate {
            self.push_estimate(e);
        }
        self.verdict = Some(VerdictOut {
            status: v.status.as_str(),
            multiplier_ideal: v.multiplier_ideal.clone(),
            notes: v.notes.clone(),
        });
    }

    pub fn set_splitting(&mut self, probe: &SplittingProbe, budget: &crate::groebner::Budget) {
        let gens = probe
            .prime
            .groebner(budget)
            .map(|gb| gb.elements().iter().map(|g| g.to_string()).collect())
            .unwrap_or_default();
        let is_zero = probe.prime.is_zero(budget).unwrap_or(false);
        self.splitting = Some(SplittingOut {
            prime_generators: gens,
            prime_is_zero_ideal: is_zero,
            stabilized: probe.stabilized,
            n_est: probe.n_est,
        });
        self.push_estimate(&probe.ratio);
    }

    pub fn set_sequence(&mut self, report: &SequenceReport, budget: &crate::groebner::Budget) {
        let gens = report
            .intersection
            .groebner(budget)
            .map(|gb| gb.elements().iter().map(|g| g.to_string()).collect())
            .unwrap_or_default();
        self.sequence = Some(SequenceOut {
            intersection_generators: gens,
            intersection_stabilized: report.intersection_stabilized,
            intersection_is_zero: report.intersection_is_zero,
        });
        self.push_table(&report.table);
        self.push_estimate(&report.estimate);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// CSV rows for every table: e, q, length, normalized_num, normalized_den.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for table in &self.tables {
            out.push_str(&format!("# kind={} d={}\n", table.kind, table.d));
            out.push_str("e,q,length,normalized_num,normalized_den\n");
            for row in &table.rows {
                let (num, den) = row.normalized.split_once('/').unwrap_or((&row.normalized, "1"));
                out.push_str(&format!("{},{},{},{},{}\n", row.e, row.q, row.length, num, den));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::TableKind;
    use num_bigint::BigUint;

    #[test]
    fn json_is_deterministic_and_versioned() {
        let mut table = InvariantTable::new(TableKind::Hk, 3, 2);
        table.push(0, BigUint::from(1u32), None);
        table.push(1, BigUint::from(13u32), None);
        let mut args = BTreeMap::new();
        args.insert("emax".to_string(), "1".to_string());
        let ring = RingEcho {
            p: 3,
            vars: vec!["x".into(), "y".into(), "z".into()],
            relations: vec!["x*y + 2*z^2".into()],
            order: "grevlex".into(),
        };
        let mut report = Report::new("hk", args.clone(), "sha256:abc".into(), ring.clone());
        report.push_table(&table);
        let a = report.to_json();
        let ring2 = ring.clone();
        let mut report2 = Report::new("hk", args, "sha256:abc".into(), ring2);
        report2.push_table(&table);
        assert_eq!(a, report2.to_json());
        assert!(a.contains("\"schema\": 1"));
        assert!(a.contains("\"13/9\""));
    }

    #[test]
    fn csv_has_the_documented_columns() {
        let mut table = InvariantTable::new(TableKind::Fsig, 3, 2);
        table.push(0, BigUint::from(1u32), None);
        table.push(1, BigUint::from(5u32), Some(2));
        let mut report = Report::new(
            "fsig",
            BTreeMap::new(),
            "sha256:x".into(),
            RingEcho { p: 3, vars: vec!["x".into()], relations: vec![], order: "grevlex".into() },
        );
        report.push_table(&table);
        let csv = report.to_csv();
        assert!(csv.contains("e,q,length,normalized_num,normalized_den"));
        assert!(csv.contains("1,3,5,5,9"));
    }
}
