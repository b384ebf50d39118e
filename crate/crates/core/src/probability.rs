//! Channel loss probabilities and the optimal single-erasure norm profile.
//!
//! Channel `i` loses its coefficient with probability `p_i`, independently of
//! the others. The probability that channel `i` is the *only* one lost is
//! `p̃_i = p_i · Π_{k≠i} (1 − p_k)`. A Parseval frame with squared norms `a_i`
//! has worst weighted single-erasure error `max_i p̃_i a_i`, and the optimal
//! profile solves a capped minimax allocation:
//!
//! ```text
//! minimize max_i p̃_i a_i   subject to   Σ a_i = n,  0 ≤ a_i ≤ 1.
//! ```
//!
//! Channels whose `p̃_i` is small enough get pinned at `a_i = 1`; the rest
//! share the remaining budget so that every product `p̃_i a_i` is equal.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Single-erasure weights below this are treated as underflow.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// Loss probabilities, sorted ascending, with the permutation back to caller order.
#[derive(Debug, Clone, PartialEq)]
pub struct ErasureDistribution {
    probs: Vec<f64>,
    // probs[k] == user_probs[order[k]]
    order: Vec<usize>,
}

impl ErasureDistribution {
    /// Validates and sorts caller-order probabilities.
    pub fn new(user_probs: &[f64]) -> Result<Self> {
        let m = user_probs.len();
        if m < 2 {
            return Err(Error::TooFewChannels { m });
        }
        for (index, &value) in user_probs.iter().enumerate() {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::ProbabilityOutOfRange { index, value });
            }
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| user_probs[i].total_cmp(&user_probs[j]));
        let probs: Vec<f64> = order.iter().map(|&i| user_probs[i]).collect();

        for (k, w) in single_weights(&probs).into_iter().enumerate() {
            if w < WEIGHT_FLOOR {
                return Err(Error::DegenerateWeights {
                    index: order[k],
                    value: w,
                });
            }
        }
        Ok(ErasureDistribution { probs, order })
    }

    /// `m` channels sharing one loss probability.
    pub fn uniform(p: f64, m: usize) -> Result<Self> {
        Self::new(&alloc::vec![p; m])
    }

    /// Sorted probabilities.
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn m(&self) -> usize {
        self.probs.len()
    }

    /// `permutation()[k]` is the caller index of sorted channel `k`.
    pub fn permutation(&self) -> &[usize] {
        &self.order
    }

    /// Probabilities in the order they were supplied.
    pub fn user_probs(&self) -> Vec<f64> {
        self.to_user_order(&self.probs)
    }

    /// Maps a per-channel vector from sorted order to caller order.
    pub fn to_user_order<T: Clone>(&self, sorted: &[T]) -> Vec<T> {
        let mut out: Vec<Option<T>> = alloc::vec![None; sorted.len()];
        for (k, &user) in self.order.iter().enumerate() {
            out[user] = Some(sorted[k].clone());
        }
        out.into_iter().map(|v| v.expect("permutation")).collect()
    }

    /// Maps a per-channel vector from caller order to sorted order.
    pub fn to_sorted_order<T: Clone>(&self, user: &[T]) -> Vec<T> {
        self.order.iter().map(|&u| user[u].clone()).collect()
    }

    /// Single-erasure weights of the sorted channels.
    pub fn tilde_weights(&self) -> TildeWeights {
        tilde_weights(self)
    }

    /// Total loss probability mass `Σ p_k`.
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

fn single_weights(probs: &[f64]) -> Vec<f64> {
    (0..probs.len())
        .map(|i| {
            probs.iter().enumerate().fold(
                probs[i],
                |acc, (k, &p)| if k == i { acc } else { acc * (1.0 - p) },
            )
        })
        .collect()
}

/// `p̃_i` for every channel plus the suffix sums of their reciprocals.
#[derive(Debug, Clone, PartialEq)]
pub struct TildeWeights {
    /// `p̃_i`, in sorted channel order (hence non-decreasing).
    pub singles: Vec<f64>,
    /// Length `m + 1`; entry `j` is `Σ_{k ≥ j} 1/p̃_k` (0-based), so entry 0
    /// is the full reciprocal sum and entry `m` is zero.
    pub reciprocal_sum_suffixes: Vec<f64>,
}

impl TildeWeights {
    pub fn m(&self) -> usize {
        self.singles.len()
    }

    /// `Σ_k 1/p̃_k`.
    pub fn reciprocal_sum(&self) -> f64 {
        self.reciprocal_sum_suffixes[0]
    }

    /// `Σ_k p̃_k`, the probability of exactly one erasure.
    pub fn sum(&self) -> f64 {
        self.singles.iter().sum()
    }
}

/// Computes `p̃_i = p_i Π_{k≠i}(1 − p_k)` and the reciprocal suffix sums.
pub fn tilde_weights(dist: &ErasureDistribution) -> TildeWeights {
    let singles = single_weights(&dist.probs);
    let m = singles.len();
    let mut suffixes = alloc::vec![0.0; m + 1];
    for j in (0..m).rev() {
        suffixes[j] = suffixes[j + 1] + 1.0 / singles[j];
    }
    TildeWeights {
        singles,
        reciprocal_sum_suffixes: suffixes,
    }
}

/// Probability that channels `i` and `j` (sorted, 0-based) are exactly the ones lost.
pub fn pair_tilde_weight(dist: &ErasureDistribution, i: usize, j: usize) -> Result<f64> {
    let m = dist.m();
    if i == j {
        return Err(Error::InvalidArgument(
            "pair weight needs two distinct channels",
        ));
    }
    if i >= m || j >= m {
        return Err(Error::InvalidOrder { r: i.max(j) + 1, m });
    }
    let p = &dist.probs;
    Ok(p.iter()
        .enumerate()
        .filter(|&(k, _)| k != i && k != j)
        .fold(p[i] * p[j], |acc, (_, &q)| acc * (1.0 - q)))
}

/// Condition (H): every `p̃_i ≥ n / Σ_k 1/p̃_k`.
pub fn check_condition_h(weights: &TildeWeights, n: usize) -> bool {
    let bound = n as f64 / weights.reciprocal_sum();
    weights.singles.iter().all(|&w| w >= bound)
}

/// Number of leading channels pinned at unit squared norm.
///
/// Zero when condition (H) holds; otherwise the largest 1-based `j` with
/// `p̃_j · Σ_{k>j} 1/p̃_k < n − j` (strict).
pub fn distribution_index(weights: &TildeWeights, n: usize) -> Result<usize> {
    if check_condition_h(weights, n) {
        return Ok(0);
    }
    let m = weights.m();
    (1..=m)
        .rev()
        .find(|&j| {
            weights.singles[j - 1] * weights.reciprocal_sum_suffixes[j] < n as f64 - j as f64
        })
        .ok_or(Error::IndexScanFailed)
}

/// Solution of `min max_i α_i t_i` over `t ≥ 0`, `Σ t_i = h`.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimaxSolution {
    pub allocation: Vec<f64>,
    /// Common value of every product `α_i t_i`.
    pub value: f64,
}

/// Equalizes `α_i t_i`: `t_i = (h / Σ 1/α_k) / α_i`.
pub fn solve_weighted_minimax(alphas: &[f64], h: f64) -> Result<MinimaxSolution> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("minimax needs at least one weight"));
    }
    if !alphas.iter().all(|&a| a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidArgument("minimax weights must be positive"));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument("minimax budget must be positive"));
    }
    let value = h / alphas.iter().map(|a| 1.0 / a).sum::<f64>();
    Ok(MinimaxSolution {
        allocation: alphas.iter().map(|a| value / a).collect(),
        value,
    })
}

/// Optimal single-erasure design for a distribution and dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct RpmDesign {
    pub n: usize,
    pub holds_h: bool,
    /// Number of channels pinned at squared norm one.
    pub index: usize,
    /// Optimal worst weighted single-erasure error.
    pub e_p1: f64,
    /// Optimal squared norms, sorted channel order.
    pub norms_sq: Vec<f64>,
    pub weights: TildeWeights,
}

impl RpmDesign {
    pub fn m(&self) -> usize {
        self.norms_sq.len()
    }
}

/// Builds the optimal profile: `a_i = 1` for the first `index` channels,
/// `a_i = e_p1 / p̃_i` for the rest, with `e_p1 = (n − d) / Σ_{k>d} 1/p̃_k`.
pub fn rpm_design(dist: &ErasureDistribution, n: usize) -> Result<RpmDesign> {
    let m = dist.m();
    if n < 1 || n > m {
        return Err(Error::InvalidDimension { n, m });
    }
    let weights = tilde_weights(dist);
    let holds_h = check_condition_h(&weights, n);
    let index = distribution_index(&weights, n)?;
    let e_p1 = (n - index) as f64 / weights.reciprocal_sum_suffixes[index];
    let norms_sq = weights
        .singles
        .iter()
        .enumerate()
        .map(|(i, &w)| if i < index { 1.0 } else { e_p1 / w })
        .collect();
    Ok(RpmDesign {
        n,
        holds_h,
        index,
        e_p1,
        norms_sq,
        weights,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rejects_bad_distributions() {
        assert_eq!(
            ErasureDistribution::new(&[0.5]),
            Err(Error::TooFewChannels { m: 1 })
        );
        assert_eq!(
            ErasureDistribution::new(&[0.3, 0.2, 1.0]),
            Err(Error::ProbabilityOutOfRange {
                index: 2,
                value: 1.0
            })
        );
        assert!(ErasureDistribution::new(&[0.0, 0.5]).is_err());
        assert!(ErasureDistribution::new(&[f64::NAN, 0.5]).is_err());
        let e = ErasureDistribution::new(&[0.3, 0.2, 1.0]).unwrap_err();
        assert_eq!(alloc::format!("{e}"), "p[3]=1.0 outside (0,1)");
        assert!(matches!(
            ErasureDistribution::new(&[0.5, 1e-301, 0.5]),
            Err(Error::DegenerateWeights { index: 1, .. })
        ));
    }

    #[test]
    fn sorting_keeps_permutation() {
        let d = ErasureDistribution::new(&[0.5, 0.01, 0.3]).unwrap();
        assert_eq!(d.probs(), &[0.01, 0.3, 0.5]);
        assert_eq!(d.permutation(), &[1, 2, 0]);
        assert_eq!(d.user_probs(), vec![0.5, 0.01, 0.3]);
        assert_eq!(d.to_sorted_order(&['a', 'b', 'c']), vec!['b', 'c', 'a']);
    }

    #[test]
    fn tilde_weight_examples() {
        let w = tilde_weights(&ErasureDistribution::uniform(0.2, 4).unwrap());
        assert!(w.singles.iter().all(|&x| close(x, 0.1024, 1e-15)));

        let w = tilde_weights(&ErasureDistribution::new(&[0.01, 0.5, 0.5]).unwrap());
        assert!(close(w.singles[0], 0.0025, 1e-15));
        assert!(close(w.singles[1], 0.2475, 1e-15));
        assert!(close(w.singles[2], 0.2475, 1e-15));
        assert_eq!(w.reciprocal_sum_suffixes[3], 0.0);
        assert!(close(w.reciprocal_sum(), 408.080_808_080_808, 1e-9));

        let w = tilde_weights(&ErasureDistribution::new(&[0.5, 0.5]).unwrap());
        assert_eq!(w.singles, vec![0.25, 0.25]);
    }

    #[test]
    fn pair_weight_examples() {
        let d = ErasureDistribution::new(&[0.5, 0.5]).unwrap();
        assert_eq!(pair_tilde_weight(&d, 0, 1).unwrap(), 0.25);
        let d = ErasureDistribution::uniform(0.2, 4).unwrap();
        assert!(close(pair_tilde_weight(&d, 1, 3).unwrap(), 0.0256, 1e-15));
        assert_eq!(pair_tilde_weight(&d, 1, 3), pair_tilde_weight(&d, 3, 1));
        let d = ErasureDistribution::new(&[0.01, 0.5, 0.5]).unwrap();
        assert!(close(pair_tilde_weight(&d, 0, 1).unwrap(), 0.0025, 1e-15));
        assert!(pair_tilde_weight(&d, 1, 1).is_err());
    }

    #[test]
    fn condition_h_and_index() {
        let uniform = tilde_weights(&ErasureDistribution::uniform(0.37, 5).unwrap());
        for n in 1..=5 {
            assert!(check_condition_h(&uniform, n));
            assert_eq!(distribution_index(&uniform, n).unwrap(), 0);
        }

        let skewed = tilde_weights(&ErasureDistribution::new(&[0.01, 0.5, 0.5]).unwrap());
        assert!(!check_condition_h(&skewed, 2));
        assert_eq!(distribution_index(&skewed, 2).unwrap(), 1);

        let w = tilde_weights(&ErasureDistribution::new(&[0.1, 0.1, 0.1, 0.9]).unwrap());
        assert!(close(w.singles[0], 0.0081, 1e-15));
        assert!(check_condition_h(&w, 2));
    }

    #[test]
    fn minimax_examples() {
        let s = solve_weighted_minimax(&[1.0, 1.0], 2.0).unwrap();
        assert_eq!(s.allocation, vec![1.0, 1.0]);
        let s = solve_weighted_minimax(&[1.0, 2.0], 3.0).unwrap();
        assert_eq!(s.value, 2.0);
        assert_eq!(s.allocation, vec![2.0, 1.0]);
        let s = solve_weighted_minimax(&[0.0025, 0.2475, 0.2475], 2.0).unwrap();
        assert!(close(s.value, 2.0 / 408.080_808_080_808_1, 1e-15));
        assert!(solve_weighted_minimax(&[1.0, -1.0], 1.0).is_err());
        assert!(solve_weighted_minimax(&[1.0], 0.0).is_err());
    }

    #[test]
    fn design_examples() {
        let d = rpm_design(&ErasureDistribution::uniform(0.2, 4).unwrap(), 2).unwrap();
        assert!(d.holds_h);
        assert_eq!(d.index, 0);
        assert!(close(d.e_p1, 0.0512, 1e-15));
        assert!(d.norms_sq.iter().all(|&a| close(a, 0.5, 1e-14)));

        let d = rpm_design(&ErasureDistribution::new(&[0.01, 0.5, 0.5]).unwrap(), 2).unwrap();
        assert!(!d.holds_h);
        assert_eq!(d.index, 1);
        assert!(close(d.e_p1, 0.12375, 1e-15));
        assert_eq!(d.norms_sq[0], 1.0);
        assert!(close(d.norms_sq[1], 0.5, 1e-14) && close(d.norms_sq[2], 0.5, 1e-14));

        let d = rpm_design(&ErasureDistribution::uniform(0.3, 3).unwrap(), 3).unwrap();
        assert!(d.norms_sq.iter().all(|&a| close(a, 1.0, 1e-14)));

        let dist = ErasureDistribution::uniform(0.3, 3).unwrap();
        assert_eq!(
            rpm_design(&dist, 4),
            Err(Error::InvalidDimension { n: 4, m: 3 })
        );
        assert_eq!(
            rpm_design(&dist, 0),
            Err(Error::InvalidDimension { n: 0, m: 3 })
        );
    }

    #[test]
    fn square_case_pins_all_channels() {
        let d = rpm_design(&ErasureDistribution::new(&[0.1, 0.2, 0.4]).unwrap(), 3).unwrap();
        assert_eq!(d.index, 2);
        assert!(d.norms_sq.iter().all(|&a| close(a, 1.0, 1e-14)));
    }
}
