//! Minimum-error discrimination among finitely many states.

use crate::error::{Error, Result};
use crate::measurements::{prob, triad_directions, Povm};
use crate::states::{bloch_to_density, density_to_bloch, BlochVector, DensityMatrix};
use crate::Label;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscriminationResult {
    pub success_probability: f64,
    /// Guessed state index per outcome, aligned with `labels`.
    pub rule: Vec<usize>,
    pub labels: Vec<Label>,
}

impl DiscriminationResult {
    pub fn guess(&self, x: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == x).map(|i| self.rule[i])
    }
}

fn check_priors(priors: &[f64], n: usize) -> Result<()> {
    if priors.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: priors.len(),
        });
    }
    if n == 0 {
        return Err(Error::InvalidWeights("no states".into()));
    }
    if priors.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::InvalidWeights("priors must be finite and nonnegative".into()));
    }
    let total: f64 = priors.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidWeights(format!("priors sum to {total}")));
    }
    Ok(())
}

/// Guesses `argmax_j π_j trace(ρ_j m(x))` on outcome `x`, lowest index on
/// ties.
pub fn discriminate(states: &[DensityMatrix], priors: &[f64], m: &Povm) -> Result<DiscriminationResult> {
    check_priors(priors, states.len())?;
    let table = states.iter().map(|rho| prob(rho, m)).collect::<Result<Vec<_>>>()?;
    let mut rule = Vec::with_capacity(m.len());
    let mut success = 0.0;
    for x in 0..m.len() {
        let mut best = 0;
        let mut best_w = priors[0] * table[0][x];
        for (j, row) in table.iter().enumerate().skip(1) {
            let w = priors[j] * row[x];
            if w > best_w {
                best = j;
                best_w = w;
            }
        }
        rule.push(best);
        success += best_w;
    }
    Ok(DiscriminationResult {
        success_probability: success,
        rule,
        labels: m.labels().to_vec(),
    })
}

fn projective_success(blochs: &[[f64; 3]], priors: &[f64], n: [f64; 3]) -> f64 {
    let (mut plus, mut minus) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (r, &p) in blochs.iter().zip(priors) {
        let dot = r[0] * n[0] + r[1] * n[1] + r[2] * n[2];
        plus = plus.max(0.5 * p * (1.0 + dot));
        minus = minus.max(0.5 * p * (1.0 - dot));
    }
    plus + minus
}

fn direction(eta: f64, phi: f64) -> [f64; 3] {
    [eta.sin() * phi.cos(), eta.sin() * phi.sin(), eta.cos()]
}

/// Best success probability over projective qubit measurements.
///
/// Rank-one measurements are searched over `grid_n²` Bloch directions
/// (colatitude `(i + ½)π/grid_n`, longitude `2πj/grid_n`), and the best few
/// are polished by a compass search. The one-outcome measurement, which
/// guesses the most likely state, is included. Randomizing over measurements
/// cannot do better than the best deterministic one.
pub fn best_projective_success(states: &[DensityMatrix], priors: &[f64], grid_n: usize) -> Result<f64> {
    check_priors(priors, states.len())?;
    if grid_n == 0 {
        return Err(Error::InvalidArgument("grid resolution must be positive".into()));
    }
    if let Some(rho) = states.iter().find(|r| r.dim() != 2) {
        return Err(Error::InvalidArgument(format!(
            "projective search needs qubit states, got dimension {}",
            rho.dim()
        )));
    }
    let blochs = states
        .iter()
        .map(|r| density_to_bloch(r).map(|b| b.0))
        .collect::<Result<Vec<_>>>()?;
    let f = |eta: f64, phi: f64| projective_success(&blochs, priors, direction(eta, phi));

    let step = std::f64::consts::PI / grid_n as f64;
    let mut scored = Vec::with_capacity(grid_n * grid_n);
    for i in 0..grid_n {
        let eta = (i as f64 + 0.5) * step;
        for j in 0..grid_n {
            let phi = 2.0 * step * j as f64;
            scored.push((f(eta, phi), eta, phi));
        }
    }
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));

    let trivial = priors.iter().copied().fold(0.0, f64::max);
    let mut best = trivial.max(scored[0].0);
    for &(mut value, mut eta, mut phi) in scored.iter().take(8) {
        let mut h = step;
        while h > 1e-12 {
            let mut moved = false;
            for (de, dp) in [(h, 0.0), (-h, 0.0), (0.0, h), (0.0, -h)] {
                let v = f(eta + de, phi + dp);
                if v > value {
                    value = v;
                    eta += de;
                    phi += dp;
                    moved = true;
                    break;
                }
            }
            if !moved {
                h *= 0.5;
            }
        }
        best = best.max(value);
    }
    Ok(best.min(1.0))
}

/// Equiprobable trine states `½(1 + v_i·σ)` along the triad directions.
pub fn triad_ensemble() -> (Vec<DensityMatrix>, Vec<f64>) {
    let states = triad_directions()
        .iter()
        .map(|v| bloch_to_density(BlochVector(*v)).expect("unit Bloch vector"))
        .collect();
    (states, vec![1.0 / 3.0; 3])
}
