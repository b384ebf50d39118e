//! Exact erasure-risk functionals.
//!
//! For an erasure pattern `J` (the set of lost channels) the reconstruction
//! error of a Parseval frame is `‖Σ_{i∈J} f_i f_iᵀ‖`, which equals the
//! spectral norm of the Gram matrix of `{f_i : i ∈ J}`. Weighting by the
//! probability that exactly `J` is lost and maximizing over `|J| = r` gives
//! `d_{p,r}`; summing instead gives the conditional expected error.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::frame::{certify_parseval, dot, Frame};
use crate::probability::{check_condition_h, pair_tilde_weight, ErasureDistribution};
use crate::spectral::{self, Matrix, SymmetricMatrix};

/// Largest number of subsets exact enumeration will visit.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// Set of lost channels (0-based, sorted, distinct).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ErasurePattern {
    lost: Vec<usize>,
}

impl ErasurePattern {
    pub fn new(mut lost: Vec<usize>, m: usize) -> Result<Self> {
        lost.sort_unstable();
        lost.dedup();
        if lost.is_empty() || lost.len() > m {
            return Err(Error::InvalidOrder { r: lost.len(), m });
        }
        if lost.last().is_some_and(|&i| i >= m) {
            return Err(Error::InvalidArgument("erased channel index out of range"));
        }
        Ok(ErasurePattern { lost })
    }

    pub fn lost(&self) -> &[usize] {
        &self.lost
    }

    pub fn r(&self) -> usize {
        self.lost.len()
    }

    /// `Π_{i∈J} p_i · Π_{i∉J} (1 − p_i)`.
    pub fn probability(&self, probs: &[f64]) -> f64 {
        let mut it = self.lost.iter().peekable();
        probs.iter().enumerate().fold(1.0, |acc, (i, &p)| {
            if it.peek() == Some(&&i) {
                it.next();
                acc * p
            } else {
                acc * (1.0 - p)
            }
        })
    }
}

/// `C(m, r)` without overflow for the sizes we care about.
pub fn binomial(m: usize, r: usize) -> u128 {
    if r > m {
        return 0;
    }
    let r = r.min(m - r);
    (0..r as u128).fold(1u128, |acc, k| acc * (m as u128 - k) / (k + 1))
}

/// Lexicographic walk over the `r`-subsets of `0..m`.
pub struct Combinations {
    m: usize,
    current: Vec<usize>,
    done: bool,
}

impl Combinations {
    pub fn new(m: usize, r: usize) -> Self {
        Combinations {
            m,
            current: (0..r).collect(),
            done: r > m || r == 0,
        }
    }

    /// Current subset, or `None` when exhausted.
    pub fn current(&self) -> Option<&[usize]> {
        (!self.done).then_some(&self.current[..])
    }

    pub fn advance(&mut self) {
        let r = self.current.len();
        let mut i = r;
        while i > 0 {
            i -= 1;
            if self.current[i] < self.m - r + i {
                self.current[i] += 1;
                for k in i + 1..r {
                    self.current[k] = self.current[k - 1] + 1;
                }
                return;
            }
        }
        self.done = true;
    }
}

/// Spectral norm of the Gram matrix of the frame vectors indexed by `lost`.
pub(crate) fn gram_norm_of(f: &Frame, lost: &[usize]) -> Result<f64> {
    match lost {
        [i] => Ok(dot(f.vector(*i), f.vector(*i))),
        _ if lost.len() <= f.n() => {
            let r = lost.len();
            let mut g = Matrix::zeros(r, r);
            for (a, &i) in lost.iter().enumerate() {
                for (b, &j) in lost.iter().enumerate().skip(a) {
                    let v = dot(f.vector(i), f.vector(j));
                    g[(a, b)] = v;
                    g[(b, a)] = v;
                }
            }
            spectral::psd_operator_norm(&SymmetricMatrix::new(g)?)
        }
        _ => {
            // the n × n outer form has the same nonzero spectrum
            let rows: Vec<&[f64]> = lost.iter().map(|&i| f.vector(i)).collect();
            spectral::psd_operator_norm(&Matrix::from_rows(&rows)?.gram_of_columns())
        }
    }
}

/// `‖(f_i)_{i∈J} (f_i)_{i∈J}ᵀ‖` for a pattern `J`.
pub fn sub_gram_norm(f: &Frame, pattern: &ErasurePattern) -> Result<f64> {
    if pattern.lost.last().is_some_and(|&i| i >= f.m()) {
        return Err(Error::InvalidArgument("erased channel index out of range"));
    }
    gram_norm_of(f, &pattern.lost)
}

/// Exact `r`-erasure statistics of a frame under a distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ErasureReport {
    pub r: usize,
    /// `max_J ‖Gram(J)‖ · P(exactly J lost)` over `|J| = r`.
    pub d_p_r: f64,
    /// Lexicographically first pattern attaining `d_p_r`.
    pub argmax_pattern: ErasurePattern,
    /// `E(‖T*D_X T‖ | N = r)`; present only for Parseval frames.
    pub conditional_expectation: Option<f64>,
    pub prob_n_eq_r: f64,
}

fn check_pairing(f: &Frame, dist: &ErasureDistribution) -> Result<()> {
    if f.m() != dist.m() {
        return Err(Error::LengthMismatch {
            expected: dist.m(),
            found: f.m(),
        });
    }
    Ok(())
}

fn check_enumeration(m: usize, r: usize) -> Result<()> {
    if r < 1 || r > m {
        return Err(Error::InvalidOrder { r, m });
    }
    let subsets = binomial(m, r);
    if subsets > ENUMERATION_CAP {
        return Err(Error::EnumerationTooLarge {
            subsets,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(())
}

struct Sweep {
    best: f64,
    argmax: Vec<usize>,
    weighted_sum: f64,
}

fn sweep(f: &Frame, probs: &[f64], r: usize) -> Result<Sweep> {
    let mut out = Sweep {
        best: f64::NEG_INFINITY,
        argmax: Vec::new(),
        weighted_sum: 0.0,
    };
    let mut combos = Combinations::new(probs.len(), r);
    while let Some(lost) = combos.current() {
        let weight = ErasurePattern {
            lost: lost.to_vec(),
        }
        .probability(probs);
        let value = gram_norm_of(f, lost)? * weight;
        out.weighted_sum += value;
        if value > out.best {
            out.best = value;
            out.argmax = lost.to_vec();
        }
        combos.advance();
    }
    Ok(out)
}

/// `d_{p,r}` by exhaustive enumeration, with the conditional expectation and `P(N = r)`.
pub fn d_p_r(f: &Frame, dist: &ErasureDistribution, r: usize) -> Result<ErasureReport> {
    check_pairing(f, dist)?;
    check_enumeration(dist.m(), r)?;
    let s = sweep(f, dist.probs(), r)?;
    let prob = prob_n_equals_r(dist, r)?;
    let parseval = certify_parseval(f)?.is_parseval;
    Ok(ErasureReport {
        r,
        d_p_r: s.best,
        argmax_pattern: ErasurePattern { lost: s.argmax },
        conditional_expectation: parseval.then(|| s.weighted_sum / prob),
        prob_n_eq_r: prob,
    })
}

/// `d_{p,1} = max_i p̃_i ‖f_i‖²`.
pub fn d_p1(f: &Frame, dist: &ErasureDistribution) -> Result<f64> {
    check_pairing(f, dist)?;
    let w = dist.tilde_weights();
    Ok(w.singles
        .iter()
        .zip(f.norms_sq())
        .map(|(p, a)| p * a)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// `d_{p,2}` through the 2 × 2 closed form
/// `½ max_{i≠j} p̃_{ij} (a_i + a_j + √((a_i − a_j)² + 4⟨f_i, f_j⟩²))`.
pub fn d_p2_closed_form(f: &Frame, dist: &ErasureDistribution) -> Result<f64> {
    check_pairing(f, dist)?;
    let norms = f.norms_sq();
    let mut best = f64::NEG_INFINITY;
    for i in 0..f.m() {
        for j in i + 1..f.m() {
            let v = pair_tilde_weight(dist, i, j)?
                * spectral::two_by_two_gram_norm(norms[i], norms[j], f.inner(i, j))?;
            best = best.max(v);
        }
    }
    Ok(best)
}

/// `d_{p,2}` of an optimal single-erasure frame when condition (H) holds:
///
/// ```text
/// ½ max_{i≠j} [ c(ρ_i + ρ_j) + √(c²(ρ_i − ρ_j)² + 4(p̃_{ij}⟨f_i, f_j⟩)²) ]
/// ```
///
/// with `ρ_i = p_i/(1 − p_i)` and `c = n / Σ_k 1/p̃_k`. The frame's norms are
/// not read, only its inner products; the caller is responsible for `f` having
/// the optimal profile.
pub fn d_p2_under_condition_h(f: &Frame, dist: &ErasureDistribution) -> Result<f64> {
    check_pairing(f, dist)?;
    let w = dist.tilde_weights();
    if !check_condition_h(&w, f.n()) {
        return Err(Error::InvalidArgument(
            "distribution does not satisfy condition (H)",
        ));
    }
    let c = f.n() as f64 / w.reciprocal_sum();
    let rho: Vec<f64> = dist.probs().iter().map(|p| p / (1.0 - p)).collect();
    let mut best = f64::NEG_INFINITY;
    for i in 0..f.m() {
        for j in i + 1..f.m() {
            let cross = pair_tilde_weight(dist, i, j)? * f.inner(i, j);
            let diff = c * (rho[i] - rho[j]);
            let v = 0.5 * (c * (rho[i] + rho[j]) + libm::sqrt(diff * diff + 4.0 * cross * cross));
            best = best.max(v);
        }
    }
    Ok(best)
}

/// Law of `N = X_1 + … + X_m` by the O(m²) convolution recurrence.
pub fn poisson_binomial_pmf(probs: &[f64]) -> Vec<f64> {
    let mut pmf = alloc::vec![0.0; probs.len() + 1];
    pmf[0] = 1.0;
    for (k, &p) in probs.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            pmf[j] = pmf[j] * (1.0 - p) + pmf[j - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    pmf
}

/// `P(N = r)`.
pub fn prob_n_equals_r(dist: &ErasureDistribution, r: usize) -> Result<f64> {
    if r > dist.m() {
        return Err(Error::InvalidOrder { r, m: dist.m() });
    }
    Ok(poisson_binomial_pmf(dist.probs())[r])
}

/// `E(‖T*D_X T‖ | N = r)` for a Parseval frame, by exact enumeration.
pub fn conditional_expected_error(f: &Frame, dist: &ErasureDistribution, r: usize) -> Result<f64> {
    check_pairing(f, dist)?;
    check_enumeration(dist.m(), r)?;
    let cert = certify_parseval(f)?;
    if !cert.is_parseval {
        return Err(Error::NotParseval {
            residual: cert.residual,
        });
    }
    let s = sweep(f, dist.probs(), r)?;
    Ok(s.weighted_sum / prob_n_equals_r(dist, r)?)
}
