//! Maximum-likelihood estimation of a scalar parameter and Monte Carlo
//! checks of the Cramér–Rao bounds.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{fisher_info, require_povm_dim, require_scalar};
use crate::error::{Error, Result};
use crate::measurements::{prob, sample_indices, Povm};
use crate::models::{qfi, ParametricModel};
use crate::Label;

/// Absolute tolerance of the golden-section search.
pub const MLE_TOL: f64 = 1e-7;
const SCAN_POINTS: usize = 64;

fn check_range(range: (f64, f64)) -> Result<()> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!("invalid search range [{lo}, {hi}]")));
    }
    Ok(())
}

fn log_likelihood(model: &ParametricModel, m: &Povm, counts: &[usize], theta: f64) -> Result<f64> {
    let p = prob(&model.state_at(&[theta])?, m)?;
    let mut ll = 0.0;
    for (&n, &px) in counts.iter().zip(&p) {
        if n > 0 {
            if px <= 0.0 {
                return Ok(f64::NEG_INFINITY);
            }
            ll += n as f64 * px.ln();
        }
    }
    Ok(ll)
}

/// Maximizes `Σ_i log p(x_i; θ)` over `range`.
///
/// A uniform scan of the range brackets the best point, golden-section search
/// refines it to `MLE_TOL`, and the larger of the scanned and refined values
/// is returned.
pub fn mle_1d(model: &ParametricModel, m: &Povm, data: &[Label], range: (f64, f64)) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::InvalidArgument("no data".into()));
    }
    let mut counts = vec![0usize; m.len()];
    for x in data {
        let i = m.index_of(x).ok_or_else(|| Error::UnknownLabel(x.to_string()))?;
        counts[i] += 1;
    }
    mle_from_counts(model, m, &counts, range)
}

/// Same as [`mle_1d`] with the data summarized as per-outcome counts aligned
/// with `m.labels()`.
pub fn mle_from_counts(model: &ParametricModel, m: &Povm, counts: &[usize], range: (f64, f64)) -> Result<f64> {
    require_scalar(model)?;
    require_povm_dim(model, m)?;
    check_range(range)?;
    if counts.len() != m.len() {
        return Err(Error::DimensionMismatch {
            expected: m.len(),
            found: counts.len(),
        });
    }
    if counts.iter().all(|&n| n == 0) {
        return Err(Error::InvalidArgument("no data".into()));
    }
    let ll = |t: f64| log_likelihood(model, m, counts, t);
    let (lo, hi) = range;
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let grid: Vec<f64> = (0..SCAN_POINTS)
        .map(|k| if k == SCAN_POINTS - 1 { hi } else { lo + step * k as f64 })
        .collect();
    let mut best_k = 0;
    let mut best = f64::NEG_INFINITY;
    for (k, &t) in grid.iter().enumerate() {
        let v = ll(t)?;
        if v > best {
            best = v;
            best_k = k;
        }
    }
    if best == f64::NEG_INFINITY {
        return Err(Error::ZeroLikelihood);
    }

    let mut a = grid[best_k.saturating_sub(1)];
    let mut b = grid[(best_k + 1).min(SCAN_POINTS - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = ll(x1)?;
    let mut f2 = ll(x2)?;
    while b - a > MLE_TOL {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = ll(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = ll(x2)?;
        }
    }
    let refined = 0.5 * (a + b);
    Ok(if ll(refined)? > best { refined } else { grid[best_k] })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloConfig {
    /// Sample size per replicate.
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    /// MLE search interval.
    pub range: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    /// One estimate per replicate, in replicate order.
    pub estimates: Vec<f64>,
    /// Unbiased sample variance of the estimates.
    pub var_emp: f64,
    /// `1 / (n i(θ₀; M))`
    pub var_cr: f64,
    /// `1 / (n I(θ₀))`
    pub var_qcr: f64,
}

/// Runs `reps` independent maximum-likelihood fits on `n` simulated outcomes
/// each. Replicate `r` draws from a ChaCha8 stream seeded by `seed` with
/// stream number `r`, so the result does not depend on scheduling.
pub fn monte_carlo_variance(
    model: &ParametricModel,
    theta0: f64,
    m: &Povm,
    cfg: &MonteCarloConfig,
) -> Result<MonteCarloReport> {
    if cfg.reps < 2 {
        return Err(Error::InvalidArgument(format!(
            "at least 2 replicates are needed for a variance, got {}",
            cfg.reps
        )));
    }
    if cfg.n == 0 {
        return Err(Error::InvalidArgument("sample size must be positive".into()));
    }
    check_range(cfg.range)?;
    let i = fisher_info(model, theta0, m)?;
    if i <= 0.0 {
        return Err(Error::ZeroInformation);
    }
    let quantum = qfi(model, theta0)?;
    let p = prob(&model.state_at(&[theta0])?, m)?;

    let estimates = (0..cfg.reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(rep as u64);
            let mut counts = vec![0usize; m.len()];
            for k in sample_indices(&p, cfg.n, &mut rng)? {
                counts[k] += 1;
            }
            mle_from_counts(model, m, &counts, cfg.range)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mean = estimates.iter().sum::<f64>() / cfg.reps as f64;
    let var_emp = estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (cfg.reps - 1) as f64;
    Ok(MonteCarloReport {
        estimates,
        var_emp,
        var_cr: 1.0 / (cfg.n as f64 * i),
        var_qcr: 1.0 / (cfg.n as f64 * quantum),
    })
}
