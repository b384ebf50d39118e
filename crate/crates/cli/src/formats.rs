//! JSON documents and CSV tables written and read by the command-line tool.
//!
//! Reals are written in the shortest decimal form that parses back to the
//! identical `f64`. Channel indices in documents are 1-based and refer to the
//! order in which probabilities were given on the command line.

use std::io::Write;

use parseval_erasure::{ComparisonReport, Frame, Matrix, ParsevalCertificate};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// On-disk frame: rows are frame vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameFile {
    pub n: usize,
    pub m: usize,
    pub vectors: Vec<Vec<f64>>,
}

impl FrameFile {
    pub fn from_frame(f: &Frame) -> Self {
        FrameFile {
            n: f.n(),
            m: f.m(),
            vectors: f.vectors().map(<[f64]>::to_vec).collect(),
        }
    }

    pub fn into_frame(self) -> Result<Frame, CliError> {
        if self.vectors.len() != self.m || self.vectors.iter().any(|v| v.len() != self.n) {
            return Err(CliError::Io(format!(
                "frame file declares m={} n={} but vectors do not match",
                self.m, self.n
            )));
        }
        let mat = Matrix::from_rows(&self.vectors).map_err(|e| CliError::Io(e.to_string()))?;
        Frame::from_matrix(mat).map_err(CliError::from)
    }

    /// Accepts a bare frame object or any document carrying a `frame` field.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Bare(FrameFile),
            Wrapped { frame: FrameFile },
        }
        match serde_json::from_str::<Either>(text) {
            Ok(Either::Bare(f)) | Ok(Either::Wrapped { frame: f }) => Ok(f),
            Err(e) => Err(CliError::Io(format!("malformed frame file: {e}"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub residual: f64,
    pub is_parseval: bool,
    pub norms_sq: Vec<f64>,
}

impl CertificateDoc {
    pub fn new(c: &ParsevalCertificate, norms_user: Vec<f64>) -> Self {
        CertificateDoc {
            residual: c.residual,
            is_parseval: c.is_parseval,
            norms_sq: norms_user,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SortedView {
    pub probs: Vec<f64>,
    /// `order[k]` is the 1-based input channel placed at sorted position `k`.
    pub order: Vec<usize>,
    pub tilde_weights: Vec<f64>,
    pub norms_sq: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DesignChecks {
    pub tol: f64,
    pub parseval_within_tol: bool,
    pub norms_within_tol: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DesignDoc {
    pub n: usize,
    pub m: usize,
    pub probs: Vec<f64>,
    pub holds_h: bool,
    pub index: usize,
    pub e_p1: f64,
    pub norms_sq: Vec<f64>,
    pub sorted: SortedView,
    pub frame: FrameFile,
    pub certificate: CertificateDoc,
    pub checks: DesignChecks,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ErasureDoc {
    pub r: usize,
    pub d_p_r: f64,
    pub argmax: Vec<usize>,
    pub cond_expectation: Option<f64>,
    #[serde(rename = "prob_N_eq_r")]
    pub prob_n_eq_r: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NormsDoc {
    pub cm: Vec<f64>,
    pub pm: Vec<f64>,
    pub rpm: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct VerdictsDoc {
    pub pm_le_cm: bool,
    pub rpm_le_pm: bool,
    pub gap_bound_holds: bool,
    pub cor_bound_le_gap_bound: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ComparisonDoc {
    pub e_cm: f64,
    pub e_pm: f64,
    pub e_rpm: f64,
    pub gap_lower_bound: f64,
    pub cor_bound: f64,
    pub index: usize,
    pub norms: NormsDoc,
    pub pm_feasible: bool,
    pub verdicts: VerdictsDoc,
}

impl ComparisonDoc {
    /// `to_user` maps sorted-order vectors back to input order.
    pub fn new(rep: &ComparisonReport, to_user: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        ComparisonDoc {
            e_cm: rep.e_cm,
            e_pm: rep.e_pm,
            e_rpm: rep.e_rpm,
            gap_lower_bound: rep.gap_lower_bound,
            cor_bound: rep.cor_bound,
            index: rep.index,
            norms: NormsDoc {
                cm: to_user(&rep.norms_cm),
                pm: to_user(&rep.norms_pm),
                rpm: to_user(&rep.norms_rpm),
            },
            pm_feasible: rep.pm_feasible,
            verdicts: VerdictsDoc {
                pm_le_cm: rep.verdicts.pm_le_cm,
                rpm_le_pm: rep.verdicts.rpm_le_pm,
                gap_bound_holds: rep.verdicts.gap_bound_holds,
                cor_bound_le_gap_bound: rep.verdicts.cor_bound_le_gap_bound,
            },
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SimulationDoc {
    pub estimate: f64,
    /// `null` when fewer than two trials were accepted.
    pub std_error: Option<f64>,
    pub trials: u64,
    pub accepted: u64,
    pub seed: u64,
    pub r: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub m: usize,
    pub d_p2: f64,
    pub d_p2_closed_form: f64,
    pub reference: f64,
    pub ratio: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SweepDoc {
    pub p: f64,
    pub n: usize,
    pub rows: Vec<SweepRow>,
}

/// Minimal CSV writer: comma separator, LF endings, header first.
pub struct CsvTable {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&'static str]) -> Self {
        CsvTable {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, out: &mut impl Write) -> std::io::Result<()> {
        writeln!(out, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

impl std::fmt::Display for CsvTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{}", self.header.join(","))?;
        for row in &self.rows {
            writeln!(f, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// `f64` as the shortest round-trip decimal.
pub fn real(x: f64) -> String {
    format!("{x:?}")
}

pub fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}
