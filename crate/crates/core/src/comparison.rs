//! Expected single-erasure error of three optimal norm profiles.
//!
//! Given the loss distribution, each model prescribes squared norms for its
//! optimal Parseval frame:
//!
//! - equal-norm (`cm`): every `‖f_i‖² = n/m`;
//! - transformed-weight (`pm`): `‖f_i‖² = n/(m−1) · (1 − p_i/Σp_k)`;
//! - revisited probabilistic (`rpm`): the minimax profile of [`rpm_design`].
//!
//! All three are scored by `E = Σ p̃_i a_i / Σ p̃_i`, the expected error given
//! exactly one erasure.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::probability::{rpm_design, ErasureDistribution};

/// Equal-norm profile `n/m`.
pub fn norms_cm(m: usize, n: usize) -> Result<Vec<f64>> {
    if n < 1 || n > m {
        return Err(Error::InvalidDimension { n, m });
    }
    Ok(alloc::vec![n as f64 / m as f64; m])
}

/// Transformed-weight profile, sorted channel order. Entries may exceed one.
pub fn norms_pm(dist: &ErasureDistribution, n: usize) -> Result<Vec<f64>> {
    let m = dist.m();
    if n < 1 || n > m {
        return Err(Error::InvalidDimension { n, m });
    }
    let total = dist.total();
    let scale = n as f64 / (m - 1) as f64;
    Ok(dist
        .probs()
        .iter()
        .map(|p| scale * (1.0 - p / total))
        .collect())
}

/// Whether a profile can be realized by a Parseval frame (entries at most one).
pub fn is_parseval_feasible(norms: &[f64]) -> bool {
    norms
        .iter()
        .all(|&a| a <= 1.0 + crate::frame::FEASIBILITY_TOL)
}

/// Minimax profile, sorted channel order.
pub fn norms_rpm(dist: &ErasureDistribution, n: usize) -> Result<Vec<f64>> {
    Ok(rpm_design(dist, n)?.norms_sq)
}

/// `Σ p̃_i a_i / Σ p̃_i`.
pub fn expected_one_erasure_error(norms_sq: &[f64], dist: &ErasureDistribution) -> Result<f64> {
    if norms_sq.len() != dist.m() {
        return Err(Error::LengthMismatch {
            expected: dist.m(),
            found: norms_sq.len(),
        });
    }
    let w = dist.tilde_weights();
    let num: f64 = w.singles.iter().zip(norms_sq).map(|(p, a)| p * a).sum();
    Ok(num / w.sum())
}

/// `Σ a_i b_i − (1/m)(Σ a_i)(Σ b_i)`; non-negative for similarly ordered inputs.
pub fn chebyshev_gap(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let sa: f64 = a.iter().sum();
    let sb: f64 = b.iter().sum();
    Ok(dot - sa * sb / a.len() as f64)
}

/// Pass/fail of the ordering and gap inequalities on one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdicts {
    /// `e_pm ≤ e_cm + 1e-12`.
    pub pm_le_cm: bool,
    /// `e_rpm ≤ e_pm + 1e-12`.
    pub rpm_le_pm: bool,
    /// `e_pm − e_rpm ≥ gap_lower_bound − 1e-10`.
    pub gap_bound_holds: bool,
    /// `gap_lower_bound ≥ cor_bound − 1e-10`.
    pub cor_bound_le_gap_bound: bool,
}

/// Three-way comparison for one distribution and dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub n: usize,
    pub e_cm: f64,
    pub e_pm: f64,
    pub e_rpm: f64,
    pub gap_lower_bound: f64,
    pub cor_bound: f64,
    pub index: usize,
    pub norms_cm: Vec<f64>,
    pub norms_pm: Vec<f64>,
    pub norms_rpm: Vec<f64>,
    pub pm_feasible: bool,
    pub verdicts: Verdicts,
}

pub fn compare_models(dist: &ErasureDistribution, n: usize) -> Result<ComparisonReport> {
    let m = dist.m();
    let design = rpm_design(dist, n)?;
    let w = &design.weights;
    let d = design.index;
    let total_w = w.sum();

    let cm = norms_cm(m, n)?;
    let pm = norms_pm(dist, n)?;
    let e_cm = n as f64 / m as f64;
    let e_pm = expected_one_erasure_error(&pm, dist)?;
    let pinned: f64 = w.singles[..d].iter().sum();
    let e_rpm = (pinned + ((m - d) * (n - d)) as f64 / w.reciprocal_sum_suffixes[d]) / total_w;

    let (gap_lower_bound, cor_bound) = if d == 0 || m == n {
        (0.0, 0.0)
    } else {
        let factor = (d * (m - n) * (m - n - 1)) as f64 / (n * (m - d) * (m - d - 1)) as f64;
        let p = dist.probs();
        let tail_w: f64 = w.singles[d..].iter().sum();
        let tail_p: f64 = p[d..].iter().sum();
        let tail_wp: f64 = w.singles[d..].iter().zip(&p[d..]).map(|(a, b)| a * b).sum();
        let gap = factor * (tail_w - tail_wp / tail_p) / total_w;
        // 1-based i = k + 1 runs over d+1..=m
        let cor_sum: f64 = (d..m)
            .map(|k| w.singles[k] * (1.0 - 1.0 / (m - k) as f64))
            .sum();
        (gap, factor * cor_sum / total_w)
    };

    let verdicts = Verdicts {
        pm_le_cm: e_pm <= e_cm + 1e-12,
        rpm_le_pm: e_rpm <= e_pm + 1e-12,
        gap_bound_holds: e_pm - e_rpm >= gap_lower_bound - 1e-10,
        cor_bound_le_gap_bound: gap_lower_bound >= cor_bound - 1e-10,
    };

    Ok(ComparisonReport {
        n,
        e_cm,
        e_pm,
        e_rpm,
        gap_lower_bound,
        cor_bound,
        index: d,
        pm_feasible: is_parseval_feasible(&pm),
        norms_cm: cm,
        norms_pm: pm,
        norms_rpm: design.norms_sq,
        verdicts,
    })
}
