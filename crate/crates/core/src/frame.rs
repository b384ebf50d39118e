//! Finite frames in `R^n`, Parseval certification, and constructions.
//!
//! A frame is stored as its `m × n` analysis matrix: row `i` is the frame
//! vector `f_i`, and the matrix maps `x` to the coefficients `⟨x, f_i⟩`. The
//! frame is Parseval exactly when the columns of that matrix are orthonormal.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::{self, Matrix, SymmetricMatrix};

/// Parseval residual below which a frame counts as Parseval.
pub const PARSEVAL_TOL: f64 = 1e-8;
/// Squared-norm targets below this are rejected by the construction.
pub const MIN_NORM_SQ: f64 = 1e-12;
/// Slack on the feasibility checks of the construction.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// `m` vectors spanning `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    vectors: Matrix,
    pub label: Option<String>,
}

impl Frame {
    /// Wraps an `m × n` matrix whose rows are the frame vectors.
    pub fn from_matrix(vectors: Matrix) -> Result<Self> {
        let (m, n) = (vectors.rows(), vectors.cols());
        if n == 0 || m < n {
            return Err(Error::NotAFrame("need m >= n >= 1 vectors"));
        }
        if !vectors.as_slice().iter().all(|x| x.is_finite()) {
            return Err(Error::NotAFrame("non-finite entry"));
        }
        let s = vectors.gram_of_columns();
        let ev = spectral::symmetric_eigenvalues(&s)?;
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if !(lo > 1e-13 * hi.max(f64::MIN_POSITIVE)) {
            return Err(Error::NotAFrame("vectors do not span the space"));
        }
        Ok(Frame {
            vectors,
            label: None,
        })
    }

    /// Builds a frame from its vectors.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let m = Matrix::from_rows(rows).map_err(|_| Error::NotAFrame("ragged vectors"))?;
        Self::from_matrix(m)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.vectors.cols()
    }

    /// Number of vectors.
    pub fn m(&self) -> usize {
        self.vectors.rows()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        self.vectors.row(i)
    }

    pub fn vectors(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.m()).map(|i| self.vectors.row(i))
    }

    /// The analysis matrix (rows are the frame vectors).
    pub fn analysis(&self) -> &Matrix {
        &self.vectors
    }

    pub fn norms_sq(&self) -> Vec<f64> {
        self.vectors().map(|v| dot(v, v)).collect()
    }

    pub fn inner(&self, i: usize, j: usize) -> f64 {
        dot(self.vector(i), self.vector(j))
    }

    /// `m × m` Gram matrix `⟨f_i, f_j⟩`.
    pub fn gram(&self) -> SymmetricMatrix {
        self.vectors.transpose().gram_of_columns()
    }

    /// Same frame with rows reordered: row `k` of the result is row `order[k]`.
    pub fn permuted(&self, order: &[usize]) -> Result<Frame> {
        if order.len() != self.m() {
            return Err(Error::LengthMismatch {
                expected: self.m(),
                found: order.len(),
            });
        }
        let mut seen = vec![false; order.len()];
        for &i in order {
            if i >= order.len() || core::mem::replace(&mut seen[i], true) {
                return Err(Error::InvalidArgument("row order is not a permutation"));
            }
        }
        let rows: Vec<&[f64]> = order.iter().map(|&i| self.vector(i)).collect();
        Ok(Frame {
            vectors: Matrix::from_rows(&rows)?,
            label: self.label.clone(),
        })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `S = Σ_i f_i f_iᵀ`.
pub fn frame_operator(f: &Frame) -> SymmetricMatrix {
    f.vectors.gram_of_columns()
}

/// Outcome of [`certify_parseval`].
#[derive(Debug, Clone, PartialEq)]
pub struct ParsevalCertificate {
    /// Spectral norm of `S − I`.
    pub residual: f64,
    pub is_parseval: bool,
    pub norms_sq: Vec<f64>,
}

pub fn certify_parseval(f: &Frame) -> Result<ParsevalCertificate> {
    let shifted = frame_operator(f).shifted(1.0);
    let ev = spectral::symmetric_eigenvalues(&shifted)?;
    let residual = ev.iter().fold(0.0f64, |acc, l| acc.max(libm::fabs(*l)));
    Ok(ParsevalCertificate {
        residual,
        is_parseval: residual <= PARSEVAL_TOL,
        norms_sq: f.norms_sq(),
    })
}

/// `g_i = S^{-1/2} f_i`, the Parseval frame closest to `f`.
pub fn canonical_parseval(f: &Frame) -> Result<Frame> {
    let b = spectral::spd_inverse_sqrt(&frame_operator(f))?;
    // rows f_iᵀ B (B symmetric)
    let g = f.vectors.mul(b.as_matrix())?;
    Ok(Frame {
        vectors: g,
        label: f.label.clone(),
    })
}

/// Parseval frame in `R^n` whose `i`-th vector has squared norm `norms_sq[i]`.
///
/// Feasible exactly when every target lies in `(0, 1]` and they sum to `n`.
/// Starts from `[I_n; 0]` and applies at most `m − 1` plane rotations between
/// rows; each rotation fixes one row at its target. Targets are taken in
/// ascending order. The rows not yet fixed stay mutually orthogonal with
/// squared norms of the form `(1, …, 1, f, 0, …, 0)`, which majorizes any
/// remaining feasible targets, so a suitable pair always exists.
pub fn construct_parseval_with_norms(norms_sq: &[f64], n: usize) -> Result<Frame> {
    let m = norms_sq.len();
    if n < 1 || n > m {
        return Err(Error::InvalidDimension { n, m });
    }
    for (index, &value) in norms_sq.iter().enumerate() {
        if !(value >= MIN_NORM_SQ) {
            return Err(Error::NormTooSmall { index, value });
        }
        if value > 1.0 + FEASIBILITY_TOL {
            return Err(Error::NormAboveOne { index, value });
        }
    }
    let sum: f64 = norms_sq.iter().sum();
    if libm::fabs(sum - n as f64) > FEASIBILITY_TOL {
        return Err(Error::NormSumMismatch { sum, n });
    }

    let mut slots = Matrix::zeros(m, n);
    for k in 0..n {
        slots[(k, k)] = 1.0;
    }
    let mut weight: Vec<f64> = (0..m).map(|k| if k < n { 1.0 } else { 0.0 }).collect();
    let mut active = vec![true; m];
    let mut assigned = vec![usize::MAX; m];

    let mut targets: Vec<usize> = (0..m).collect();
    targets.sort_by(|&i, &j| norms_sq[i].total_cmp(&norms_sq[j]));

    const MATCH_TOL: f64 = 1e-13;
    for (step, &target) in targets.iter().enumerate() {
        let t = norms_sq[target].min(1.0);
        let live = || (0..m).filter(|&k| active[k]);

        let slot = if step + 1 == m {
            live().next().expect("one slot left")
        } else if let Some(k) = live().find(|&k| libm::fabs(weight[k] - t) <= MATCH_TOL) {
            k
        } else {
            let is_frac = |k: usize| weight[k] > MATCH_TOL && weight[k] < 1.0 - MATCH_TOL;
            let frac = live().find(|&k| is_frac(k));
            let one = live().find(|&k| weight[k] >= 1.0 - MATCH_TOL);
            let zero = live().find(|&k| weight[k] <= MATCH_TOL);
            let (hi, lo) = match (frac, one, zero) {
                (Some(f), _, Some(z)) if t < weight[f] => (f, z),
                (Some(f), Some(o), _) if t > weight[f] => (o, f),
                (None, Some(o), Some(z)) => (o, z),
                // only reachable through rounding; fall back to the extremes
                _ => extreme_pair(&weight, &active),
            };
            rotate_rows(&mut slots, &mut weight, hi, lo, t);
            hi
        };
        active[slot] = false;
        assigned[target] = slot;
    }

    let rows: Vec<&[f64]> = assigned.iter().map(|&k| slots.row(k)).collect();
    Ok(Frame {
        vectors: Matrix::from_rows(&rows)?,
        label: None,
    })
}

fn extreme_pair(weight: &[f64], active: &[bool]) -> (usize, usize) {
    let live = (0..weight.len()).filter(|&k| active[k]);
    let hi = live
        .clone()
        .max_by(|&a, &b| weight[a].total_cmp(&weight[b]))
        .expect("active slot");
    let lo = live
        .filter(|&k| k != hi)
        .min_by(|&a, &b| weight[a].total_cmp(&weight[b]))
        .unwrap_or(hi);
    (hi, lo)
}

// Rotates orthogonal rows `hi` (weight >= t) and `lo` (weight <= t) so that
// row `hi` ends with squared norm `t`.
fn rotate_rows(slots: &mut Matrix, weight: &mut [f64], hi: usize, lo: usize, t: f64) {
    if hi == lo {
        return;
    }
    let (wh, wl) = (weight[hi], weight[lo]);
    let c2 = if wh - wl > 0.0 {
        ((t - wl) / (wh - wl)).clamp(0.0, 1.0)
    } else {
        1.0
    };
    let c = libm::sqrt(c2);
    let s = libm::sqrt(1.0 - c2);
    let n = slots.cols();
    for col in 0..n {
        let a = slots[(hi, col)];
        let b = slots[(lo, col)];
        slots[(hi, col)] = c * a + s * b;
        slots[(lo, col)] = -s * a + c * b;
    }
    weight[hi] = dot(slots.row(hi), slots.row(hi));
    weight[lo] = dot(slots.row(lo), slots.row(lo));
}

/// Real harmonic Parseval frame of `m` equal-norm vectors in `R^n`.
///
/// Columns are sampled cosines and sines `√(2/m)·(cos, sin)(2πik/m)` for
/// `k = 1, 2, …`, plus the constant column `√(1/m)` when `n` is odd. When
/// `m = n` is even the last pair would hit the Nyquist frequency, so it is
/// replaced by the constant and alternating-sign columns.
pub fn harmonic_frame(m: usize, n: usize) -> Result<Frame> {
    if n < 1 || n > m {
        return Err(Error::InvalidDimension { n, m });
    }
    let mf = m as f64;
    let amp = libm::sqrt(2.0 / mf);
    let flat = libm::sqrt(1.0 / mf);
    let nyquist_case = n % 2 == 0 && m == n;
    let mut data = Vec::with_capacity(m * n);
    for i in 0..m {
        let mut row = Vec::with_capacity(n);
        if n % 2 == 1 || nyquist_case {
            row.push(flat);
        }
        let pairs = if nyquist_case { n / 2 - 1 } else { n / 2 };
        for k in 1..=pairs {
            let angle = 2.0 * PI * (i * k % m) as f64 / mf;
            row.push(amp * libm::cos(angle));
            row.push(amp * libm::sin(angle));
        }
        if nyquist_case {
            row.push(if i % 2 == 0 { flat } else { -flat });
        }
        data.extend(row);
    }
    Frame::from_matrix(Matrix::from_row_major(m, n, data)?)
        .map(|f| f.with_label(alloc::format!("harmonic({m},{n})")))
}
