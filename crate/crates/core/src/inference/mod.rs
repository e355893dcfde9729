//! Classical and quantum information of measurements, and the
//! Braunstein–Caves inequality `i(θ;M) ≤ I(θ)`.

mod discrimination;
mod estimation;

pub use discrimination::{best_projective_success, discriminate, triad_ensemble, DiscriminationResult};
pub use estimation::{mle_1d, mle_from_counts, monte_carlo_variance, MonteCarloConfig, MonteCarloReport};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, TOL_PSD};
use crate::measurements::{prob, simple_from_observable, Povm};
use crate::models::{qfi, sld, ParametricModel};

/// Outcomes at or below this probability are left out of Fisher sums.
pub const MIN_OUTCOME_PROB: f64 = 1e-12;

fn require_scalar(model: &ParametricModel) -> Result<()> {
    if model.param_dim() != 1 {
        return Err(Error::InvalidArgument(format!(
            "expected a one-parameter model, got {} parameters",
            model.param_dim()
        )));
    }
    Ok(())
}

fn require_povm_dim(model: &ParametricModel, m: &Povm) -> Result<()> {
    if m.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            found: m.dim(),
        });
    }
    Ok(())
}

/// `i(θ;M) = Σ_x (Re trace(ρ L m(x)))² / p(x)`.
pub fn fisher_info(model: &ParametricModel, theta: f64, m: &Povm) -> Result<f64> {
    require_scalar(model)?;
    require_povm_dim(model, m)?;
    let rho = model.state_at(&[theta])?;
    let score = sld(model, &[theta], 0)?;
    let rho_l = rho.matrix().matmul(score.matrix())?;
    let p = prob(&rho, m)?;
    let mut total = 0.0;
    for (e, &px) in m.elements().iter().zip(&p) {
        if px > MIN_OUTCOME_PROB {
            let dp = rho_l.trace_product(e)?.re;
            total += dp * dp / px;
        }
    }
    Ok(total)
}

/// `E[(∂_θ log p)²]` with `∂_θ p` by central difference of the outcome law.
pub fn fisher_info_direct(model: &ParametricModel, theta: f64, m: &Povm) -> Result<f64> {
    require_scalar(model)?;
    require_povm_dim(model, m)?;
    let h = crate::models::FD_STEP;
    let p = prob(&model.state_at(&[theta])?, m)?;
    let pp = prob(&model.state_at(&[theta + h])?, m)?;
    let pm = prob(&model.state_at(&[theta - h])?, m)?;
    Ok(p.iter()
        .zip(pp.iter().zip(&pm))
        .filter(|(px, _)| **px > MIN_OUTCOME_PROB)
        .map(|(px, (a, b))| {
            let dp = (a - b) / (2.0 * h);
            dp * dp / px
        })
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub fisher: f64,
    pub quantum: f64,
    /// `quantum − fisher`
    pub gap: f64,
    /// Per outcome, `min_r ‖m^{1/2} L ρ^{1/2} − r m^{1/2} ρ^{1/2}‖_F`.
    pub attainment_residuals: Vec<f64>,
}

impl BoundReport {
    pub fn max_residual(&self) -> f64 {
        self.attainment_residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Compares the measured information with the quantum information and
/// measures how far each outcome is from the equality condition
/// `m^{1/2} L ρ^{1/2} = r(x) m^{1/2} ρ^{1/2}`.
pub fn check_bound(model: &ParametricModel, theta: f64, m: &Povm) -> Result<BoundReport> {
    let fisher = fisher_info(model, theta, m)?;
    let quantum = qfi(model, theta)?;
    let rho = model.state_at(&[theta])?;
    let score = sld(model, &[theta], 0)?;
    let rho_half = root(rho.matrix())?;
    let l_rho_half = score.matrix().matmul(&rho_half)?;
    let attainment_residuals = m
        .elements()
        .iter()
        .map(|e| {
            let m_half = root(e)?;
            let a = m_half.matmul(&l_rho_half)?;
            let b = m_half.matmul(&rho_half)?;
            Ok(least_squares_residual(&a, &b))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport {
        fisher,
        quantum,
        gap: quantum - fisher,
        attainment_residuals,
    })
}

/// Square root of a PSD matrix with eigenvalues at or below `TOL_PSD` taken
/// as exact zeros, so roundoff in a projector does not leak in as `√ε`.
fn root(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.func_hermitian(|x| if x > TOL_PSD { x.sqrt() } else { 0.0 })
}

/// `‖A − rB‖_F` at the real least-squares `r = Re⟨B, A⟩ / ‖B‖²`.
fn least_squares_residual(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let bb: f64 = b.as_slice().iter().map(|z| z.norm_sqr()).sum();
    let r = if bb > 0.0 {
        b.as_slice().iter().zip(a.as_slice()).map(|(x, y)| (x.conj() * y).re).sum::<f64>() / bb
    } else {
        0.0
    };
    (a - &b.scale_real(r)).frobenius_norm()
}

/// Projective measurement onto the eigenspaces of the quantum score at `θ`.
pub fn attaining_measurement(model: &ParametricModel, theta: f64) -> Result<Povm> {
    require_scalar(model)?;
    Ok(simple_from_observable(sld(model, &[theta], 0)?.observable()))
}

/// Helstrom bound `1 / I(θ)`.
pub fn qcrb(model: &ParametricModel, theta: f64) -> Result<f64> {
    let i = qfi(model, theta)?;
    if i <= 0.0 {
        return Err(Error::ZeroInformation);
    }
    Ok(1.0 / i)
}
