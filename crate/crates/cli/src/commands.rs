//! One function per subcommand. Each returns a serializable document; the
//! binary only parses flags, dispatches and writes the result.
//!
//! Frames passed between commands carry rows in input channel order. The core
//! library works in sorted order, so rows are permuted on the way in and out.

use std::path::Path;

use parseval_erasure::comparison::compare_models;
use parseval_erasure::frame::{certify_parseval, construct_parseval_with_norms, harmonic_frame};
use parseval_erasure::metrics::{d_p2_closed_form, d_p_r};
use parseval_erasure::simulation::{MonteCarloPlan, Tally};
use parseval_erasure::{rpm_design, ErasureDistribution, Frame};
use rayon::prelude::*;

use crate::formats::{
    opt_real, real, CertificateDoc, ComparisonDoc, CsvTable, DesignChecks, DesignDoc, ErasureDoc,
    FrameFile, SimulationDoc, SortedView, SweepDoc, SweepRow,
};
use crate::CliError;

/// Where `erasure` and `simulate` take their frame from.
#[derive(Debug, Clone)]
pub enum FrameSource<'a> {
    File(&'a Path),
    /// The optimal design for the distribution, needs `n`.
    FromDesign,
    /// Real harmonic frame, needs `n`.
    Harmonic,
}

/// Output side of every command.
pub trait Document: serde::Serialize {
    fn csv(&self) -> CsvTable;

    fn json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }
}

/// `--p` list or `--uniform-p` with `--m`.
pub fn distribution(
    p: Option<&[f64]>,
    uniform_p: Option<f64>,
    m: Option<usize>,
) -> Result<ErasureDistribution, CliError> {
    let dist = match (p, uniform_p, m) {
        (Some(p), None, None) => ErasureDistribution::new(p),
        (None, Some(q), Some(m)) => ErasureDistribution::uniform(q, m),
        (None, Some(_), None) => return Err(invalid("--uniform-p needs --m")),
        (None, None, _) => return Err(invalid("give --p or --uniform-p with --m")),
        _ => return Err(invalid("--p cannot be combined with --uniform-p or --m")),
    };
    Ok(dist?)
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

fn require_n(n: Option<usize>, what: &str) -> Result<usize, CliError> {
    n.ok_or_else(|| invalid(format!("{what} needs --n")))
}

fn check_tol(tol: f64) -> Result<(), CliError> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("--tol={tol} must be positive and finite")))
    }
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &u) in perm.iter().enumerate() {
        inv[u] = k;
    }
    inv
}

/// Optimal frame for `dist`, rows in sorted order.
fn designed_frame(dist: &ErasureDistribution, n: usize) -> Result<Frame, CliError> {
    let design = rpm_design(dist, n)?;
    Ok(construct_parseval_with_norms(&design.norms_sq, n)?)
}

/// Loads a frame and returns it with rows in sorted channel order.
pub fn load_frame(
    source: &FrameSource<'_>,
    dist: &ErasureDistribution,
    n: Option<usize>,
) -> Result<Frame, CliError> {
    match source {
        FrameSource::FromDesign => designed_frame(dist, require_n(n, "--from-design")?),
        FrameSource::Harmonic => {
            let user = harmonic_frame(dist.m(), require_n(n, "--harmonic")?)?;
            Ok(user.permuted(dist.permutation())?)
        }
        FrameSource::File(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            let user = FrameFile::parse(&text)?.into_frame()?;
            if let Some(n) = n.filter(|&n| n != user.n()) {
                return Err(invalid(format!("--n={n} but frame has n={}", user.n())));
            }
            if user.m() != dist.m() {
                return Err(invalid(format!(
                    "frame has m={} vectors but {} probabilities were given",
                    user.m(),
                    dist.m()
                )));
            }
            Ok(user.permuted(dist.permutation())?)
        }
    }
}

pub fn design(dist: &ErasureDistribution, n: usize, tol: f64) -> Result<DesignDoc, CliError> {
    check_tol(tol)?;
    let design = rpm_design(dist, n)?;
    let sorted = construct_parseval_with_norms(&design.norms_sq, n)?;
    let cert = certify_parseval(&sorted)?;
    let user = sorted.permuted(&inverse(dist.permutation()))?;
    let norm_err = cert
        .norms_sq
        .iter()
        .zip(&design.norms_sq)
        .fold(0.0f64, |e, (a, b)| e.max((a - b).abs()));
    Ok(DesignDoc {
        n,
        m: dist.m(),
        probs: dist.user_probs(),
        holds_h: design.holds_h,
        index: design.index,
        e_p1: design.e_p1,
        norms_sq: dist.to_user_order(&design.norms_sq),
        sorted: SortedView {
            probs: dist.probs().to_vec(),
            order: dist.permutation().iter().map(|u| u + 1).collect(),
            tilde_weights: design.weights.singles.clone(),
            norms_sq: design.norms_sq.clone(),
        },
        frame: FrameFile::from_frame(&user),
        certificate: CertificateDoc::new(&cert, dist.to_user_order(&cert.norms_sq)),
        checks: DesignChecks {
            tol,
            parseval_within_tol: cert.residual <= tol,
            norms_within_tol: norm_err <= tol,
        },
    })
}

/// `frame` rows must be in sorted order (see [`load_frame`]).
pub fn erasure(
    dist: &ErasureDistribution,
    frame: &Frame,
    r: usize,
) -> Result<ErasureDoc, CliError> {
    let rep = d_p_r(frame, dist, r)?;
    let perm = dist.permutation();
    let mut argmax: Vec<usize> = rep
        .argmax_pattern
        .lost()
        .iter()
        .map(|&k| perm[k] + 1)
        .collect();
    argmax.sort_unstable();
    Ok(ErasureDoc {
        r,
        d_p_r: rep.d_p_r,
        argmax,
        cond_expectation: rep.conditional_expectation,
        prob_n_eq_r: rep.prob_n_eq_r,
    })
}

pub fn compare(dist: &ErasureDistribution, n: usize) -> Result<ComparisonDoc, CliError> {
    let rep = compare_models(dist, n)?;
    Ok(ComparisonDoc::new(&rep, |v| dist.to_user_order(v)))
}

/// Blocks run in parallel; tallies are merged in block order, so the result
/// does not depend on the thread count.
pub fn simulate(
    dist: &ErasureDistribution,
    frame: &Frame,
    trials: u64,
    seed: u64,
    r: Option<usize>,
) -> Result<SimulationDoc, CliError> {
    let plan = MonteCarloPlan::new(frame, dist, trials, seed, r)?;
    let tallies = (0..plan.blocks())
        .into_par_iter()
        .map(|k| plan.run_block(k))
        .collect::<Result<Vec<Tally>, _>>()?;
    let est = plan.finish(tallies)?;
    Ok(SimulationDoc {
        estimate: est.estimate,
        std_error: Some(est.std_error).filter(|s| s.is_finite()),
        trials: est.trials,
        accepted: est.accepted,
        seed: est.seed,
        r,
    })
}

/// `d_{p,2}` of harmonic frames against `np²/(m(1−p))` for each `m`.
pub fn sweep(p: f64, n: usize, ms: &[usize]) -> Result<SweepDoc, CliError> {
    if ms.is_empty() {
        return Err(invalid("--m list is empty"));
    }
    let rows = ms
        .par_iter()
        .map(|&m| {
            let dist = ErasureDistribution::uniform(p, m)?;
            let f = harmonic_frame(m, n)?;
            let d = d_p_r(&f, &dist, 2)?.d_p_r;
            let reference = n as f64 * p * p / (m as f64 * (1.0 - p));
            Ok(SweepRow {
                m,
                d_p2: d,
                d_p2_closed_form: d_p2_closed_form(&f, &dist)?,
                reference,
                ratio: d / reference,
            })
        })
        .collect::<Result<Vec<_>, parseval_erasure::Error>>()?;
    Ok(SweepDoc { p, n, rows })
}

impl Document for DesignDoc {
    fn csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["channel", "p", "norm_sq"]);
        for (i, (p, a)) in self.probs.iter().zip(&self.norms_sq).enumerate() {
            t.push(vec![(i + 1).to_string(), real(*p), real(*a)]);
        }
        t
    }
}

impl Document for ErasureDoc {
    fn csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["r", "d_p_r", "argmax", "cond_expectation", "prob_N_eq_r"]);
        let argmax: Vec<String> = self.argmax.iter().map(usize::to_string).collect();
        t.push(vec![
            self.r.to_string(),
            real(self.d_p_r),
            argmax.join(";"),
            opt_real(self.cond_expectation),
            real(self.prob_n_eq_r),
        ]);
        t
    }
}

impl Document for ComparisonDoc {
    fn csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["model", "expected_error"]);
        for (name, e) in [("cm", self.e_cm), ("pm", self.e_pm), ("rpm", self.e_rpm)] {
            t.push(vec![name.into(), real(e)]);
        }
        t
    }
}

impl Document for SimulationDoc {
    fn csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["estimate", "std_error", "trials", "accepted", "seed"]);
        t.push(vec![
            real(self.estimate),
            opt_real(self.std_error),
            self.trials.to_string(),
            self.accepted.to_string(),
            self.seed.to_string(),
        ]);
        t
    }
}

impl Document for SweepDoc {
    fn csv(&self) -> CsvTable {
        let mut t = CsvTable::new(&["m", "d_p2", "d_p2_closed_form", "reference", "ratio"]);
        for row in &self.rows {
            t.push(vec![
                row.m.to_string(),
                real(row.d_p2),
                real(row.d_p2_closed_form),
                real(row.reference),
                real(row.ratio),
            ]);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked() -> ErasureDistribution {
        distribution(Some(&[0.01, 0.5, 0.5]), None, None).unwrap()
    }

    #[test]
    fn distribution_flag_combinations() {
        assert_eq!(distribution(None, Some(0.2), Some(4)).unwrap().m(), 4);
        assert!(matches!(
            distribution(None, None, None),
            Err(CliError::Invalid(_))
        ));
        assert!(matches!(
            distribution(None, Some(0.2), None),
            Err(CliError::Invalid(_))
        ));
        assert!(matches!(
            distribution(Some(&[0.1, 0.2]), Some(0.2), Some(2)),
            Err(CliError::Invalid(_))
        ));
        let e = distribution(Some(&[0.1, 0.2, 1.0]), None, None).unwrap_err();
        assert_eq!(e.to_string(), "p[3]=1.0 outside (0,1)");
    }

    #[test]
    fn design_reports_user_order() {
        let dist = distribution(Some(&[0.5, 0.01, 0.5]), None, None).unwrap();
        let doc = design(&dist, 2, 1e-10).unwrap();
        assert_eq!(doc.index, 1);
        assert_eq!(doc.sorted.order[0], 2);
        assert!((doc.norms_sq[1] - 1.0).abs() < 1e-15);
        assert!((doc.frame.vectors[1].iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(doc.checks.parseval_within_tol && doc.checks.norms_within_tol);
        assert!(design(&dist, 2, 0.0).is_err());
    }

    #[test]
    fn erasure_on_designed_frame() {
        let dist = worked();
        let f = load_frame(&FrameSource::FromDesign, &dist, Some(2)).unwrap();
        let doc = erasure(&dist, &f, 1).unwrap();
        assert!((doc.d_p_r - 0.12375).abs() < 1e-12);
        assert!(matches!(erasure(&dist, &f, 4), Err(CliError::Invalid(_))));
    }

    #[test]
    fn simulate_matches_serial_core() {
        let dist = distribution(Some(&[0.1, 0.3, 0.2, 0.4]), None, None).unwrap();
        let f = load_frame(&FrameSource::Harmonic, &dist, Some(2)).unwrap();
        let par = simulate(&dist, &f, 20_000, 7, None).unwrap();
        let ser = parseval_erasure::monte_carlo_error(&f, &dist, 20_000, 7, None).unwrap();
        assert_eq!(par.estimate.to_bits(), ser.estimate.to_bits());
        assert_eq!(par.std_error.unwrap().to_bits(), ser.std_error.to_bits());
    }

    #[test]
    fn simulate_zero_acceptance_is_distinct() {
        let dist = distribution(None, Some(1e-6), Some(4)).unwrap();
        let f = load_frame(&FrameSource::Harmonic, &dist, Some(2)).unwrap();
        let e = simulate(&dist, &f, 10, 0, Some(4)).unwrap_err();
        assert_eq!(e.exit_code(), 4);
    }

    #[test]
    fn sweep_rows_follow_input() {
        let doc = sweep(0.3, 2, &[6, 4]).unwrap();
        assert_eq!(doc.rows.iter().map(|r| r.m).collect::<Vec<_>>(), vec![6, 4]);
        for row in &doc.rows {
            assert!((row.d_p2 - row.d_p2_closed_form).abs() < 1e-12);
        }
        assert!(sweep(0.3, 2, &[]).is_err());
        assert!(sweep(1.0, 2, &[4]).is_err());
    }

    #[test]
    fn compare_csv_shape() {
        let t = compare(&worked(), 2).unwrap().csv().to_string();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines[0], "model,expected_error");
        assert_eq!(lines.len(), 4);
    }
}
