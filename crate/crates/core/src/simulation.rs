//! Seeded Monte Carlo estimate of the random reconstruction error.
//!
//! Each trial draws `X_i ~ Bernoulli(p_i)` independently and evaluates
//! `‖S⁻¹ T* D_X T‖`, which reduces to `‖T* D_X T‖` for a Parseval frame.
//!
//! Streams: trials are grouped in blocks of [`BLOCK_TRIALS`]. Block `k` draws
//! from ChaCha8 keyed by `seed_from_u64(seed)` on stream `k`, consuming one
//! `u64` per channel per trial (channel order = sorted order). Blocks are
//! independent, so they may run on any number of threads; merging their
//! tallies in block order gives bit-identical results to a serial run.

use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::frame::{certify_parseval, frame_operator, Frame};
use crate::probability::ErasureDistribution;
use crate::spectral::{self, Matrix, SymmetricMatrix};

/// Trials per independent random stream.
pub const BLOCK_TRIALS: u64 = 4096;

/// Mean and standard error of the simulated error.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    /// Sample standard deviation over `√accepted`; NaN with fewer than two accepted trials.
    pub std_error: f64,
    pub trials: u64,
    /// Trials kept after conditioning (all of them when unconditioned).
    pub accepted: u64,
    pub seed: u64,
    pub condition_on: Option<usize>,
}

/// Running count, mean and sum of squared deviations (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Tally {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Combines two tallies (Chan et al. pairwise update).
    pub fn merge(self, other: Tally) -> Tally {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let wa = self.count as f64;
        let wb = other.count as f64;
        Tally {
            count,
            mean: self.mean + delta * wb / count as f64,
            m2: self.m2 + other.m2 + delta * delta * wa * wb / count as f64,
        }
    }
}

enum Evaluator {
    Parseval,
    General { s_inv: Matrix },
}

/// A prepared simulation: frame, distribution and stream layout.
pub struct MonteCarloPlan<'a> {
    frame: &'a Frame,
    probs: &'a [f64],
    evaluator: Evaluator,
    trials: u64,
    seed: u64,
    condition_on: Option<usize>,
}

impl<'a> MonteCarloPlan<'a> {
    pub fn new(
        frame: &'a Frame,
        dist: &'a ErasureDistribution,
        trials: u64,
        seed: u64,
        condition_on: Option<usize>,
    ) -> Result<Self> {
        if trials == 0 {
            return Err(Error::ZeroTrials);
        }
        if frame.m() != dist.m() {
            return Err(Error::LengthMismatch {
                expected: dist.m(),
                found: frame.m(),
            });
        }
        if let Some(r) = condition_on {
            if r > dist.m() {
                return Err(Error::InvalidOrder { r, m: dist.m() });
            }
        }
        let evaluator = if certify_parseval(frame)?.is_parseval {
            Evaluator::Parseval
        } else {
            let s = frame_operator(frame);
            let s_inv = spectral::symmetric_eigen(&s)?.map_spectrum(|l| 1.0 / l);
            Evaluator::General {
                s_inv: s_inv.into_matrix(),
            }
        };
        Ok(MonteCarloPlan {
            frame,
            probs: dist.probs(),
            evaluator,
            trials,
            seed,
            condition_on,
        })
    }

    pub fn blocks(&self) -> u64 {
        self.trials.div_ceil(BLOCK_TRIALS)
    }

    /// Runs block `k` and returns its tally of accepted trial values.
    pub fn run_block(&self, k: u64) -> Result<Tally> {
        let start = k * BLOCK_TRIALS;
        let len = BLOCK_TRIALS.min(self.trials.saturating_sub(start));
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(k);

        let n = self.frame.n();
        let mut lost = Vec::with_capacity(self.probs.len());
        let mut tally = Tally::default();
        for _ in 0..len {
            lost.clear();
            for (i, &p) in self.probs.iter().enumerate() {
                if unit_f64(rng.next_u64()) < p {
                    lost.push(i);
                }
            }
            if self.condition_on.is_some_and(|r| r != lost.len()) {
                continue;
            }
            tally.push(self.trial_error(&lost, n)?);
        }
        Ok(tally)
    }

    fn trial_error(&self, lost: &[usize], n: usize) -> Result<f64> {
        if lost.is_empty() {
            return Ok(0.0);
        }
        // T* D_X T = Σ_{i lost} f_i f_iᵀ
        let mut erased = Matrix::zeros(n, n);
        for &i in lost {
            let v = self.frame.vector(i);
            for a in 0..n {
                for b in a..n {
                    erased[(a, b)] += v[a] * v[b];
                }
            }
        }
        for a in 0..n {
            for b in 0..a {
                erased[(a, b)] = erased[(b, a)];
            }
        }
        match &self.evaluator {
            Evaluator::Parseval => spectral::psd_operator_norm(&SymmetricMatrix::new(erased)?),
            Evaluator::General { s_inv } => s_inv.mul(&erased)?.spectral_norm(),
        }
    }

    /// Folds block tallies (in block order) into the final estimate.
    pub fn finish(&self, tallies: impl IntoIterator<Item = Tally>) -> Result<MonteCarloEstimate> {
        let total = tallies.into_iter().fold(Tally::default(), Tally::merge);
        if total.count == 0 {
            return Err(Error::NoAcceptedTrials {
                trials: self.trials,
                r: self.condition_on.unwrap_or(0),
            });
        }
        let std_error = if total.count > 1 {
            libm::sqrt(total.m2 / (total.count - 1) as f64 / total.count as f64)
        } else {
            f64::NAN
        };
        Ok(MonteCarloEstimate {
            estimate: total.mean,
            std_error,
            trials: self.trials,
            accepted: total.count,
            seed: self.seed,
            condition_on: self.condition_on,
        })
    }
}

// 53 high bits into [0, 1).
fn unit_f64(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Serial Monte Carlo estimate of the (optionally `N = r`-conditioned) error.
pub fn monte_carlo_error(
    f: &Frame,
    dist: &ErasureDistribution,
    trials: u64,
    seed: u64,
    condition_on: Option<usize>,
) -> Result<MonteCarloEstimate> {
    let plan = MonteCarloPlan::new(f, dist, trials, seed, condition_on)?;
    let tallies = (0..plan.blocks())
        .map(|k| plan.run_block(k))
        .collect::<Result<Vec<_>>>()?;
    plan.finish(tallies)
}
