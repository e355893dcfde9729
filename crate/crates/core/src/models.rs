//! Parametric quantum models `θ ↦ ρ(θ)` and their quantum score.
//!
//! The quantum score (symmetric logarithmic derivative) `L` solves
//! `ρ' = ½(ρL + Lρ)`. In the eigenbasis of `ρ` with eigenvalues `p_a` the
//! solution is `L_ab = 2 ρ'_ab / (p_a + p_b)`; entries with
//! `p_a + p_b ≤ TOL_SUPP` (the kernel–kernel block) are set to zero, which
//! is the minimal-norm choice. The quantum information is
//! `I(θ) = trace(ρ L²)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{c, pauli, ComplexMatrix, TOL_HERM};
use crate::measurements::Observable;
use crate::states::{spin_half_pure, DensityMatrix};

/// Eigenvalue-sum threshold below which a score entry is left at zero.
pub const TOL_SUPP: f64 = 1e-9;
/// Central-difference step for first derivatives.
pub const FD_STEP: f64 = 1e-5;
/// Central-difference step for the derivative of the score.
pub const FD_STEP_SECOND: f64 = 1e-4;
/// Allowed Jordan-equation residual, relative to `max(1, ‖ρ'‖_max)`.
pub const TOL_SCORE: f64 = 1e-8;

type StateFn = dyn Fn(&[f64]) -> Result<DensityMatrix> + Send + Sync;
type DerivativeFn = dyn Fn(&[f64]) -> Result<Vec<ComplexMatrix>> + Send + Sync;
type KappaFn = dyn Fn(&[f64]) -> Result<f64> + Send + Sync;

/// A differentiable family of density matrices on `C^dim` indexed by
/// `θ ∈ R^param_dim`. `state_at` must be a pure function of `θ`.
#[derive(Clone)]
pub struct ParametricModel {
    dim: usize,
    param_dim: usize,
    state: Arc<StateFn>,
    derivative: Option<Arc<DerivativeFn>>,
    kappa: Option<Arc<KappaFn>>,
    step: f64,
}

impl fmt::Debug for ParametricModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricModel")
            .field("dim", &self.dim)
            .field("param_dim", &self.param_dim)
            .field("analytic_derivative", &self.derivative.is_some())
            .field("step", &self.step)
            .finish()
    }
}

impl ParametricModel {
    pub fn new<F>(dim: usize, param_dim: usize, state: F) -> Self
    where
        F: Fn(&[f64]) -> Result<DensityMatrix> + Send + Sync + 'static,
    {
        Self {
            dim,
            param_dim,
            state: Arc::new(state),
            derivative: None,
            kappa: None,
            step: FD_STEP,
        }
    }

    /// Supplies `θ ↦ (∂ρ/∂θ_1, ..., ∂ρ/∂θ_k)`.
    pub fn with_derivative<G>(mut self, derivative: G) -> Self
    where
        G: Fn(&[f64]) -> Result<Vec<ComplexMatrix>> + Send + Sync + 'static,
    {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    fn with_kappa<K>(mut self, kappa: K) -> Self
    where
        K: Fn(&[f64]) -> Result<f64> + Send + Sync + 'static,
    {
        self.kappa = Some(Arc::new(kappa));
        self
    }

    /// Finite-difference step used when no analytic derivative is present.
    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    /// Same model with the analytic derivative discarded.
    pub fn without_derivative(mut self) -> Self {
        self.derivative = None;
        self
    }

    pub fn constant(rho: DensityMatrix, param_dim: usize) -> Self {
        let d = rho.dim();
        let zero = ComplexMatrix::zeros(d, d);
        Self::new(d, param_dim, move |_| Ok(rho.clone()))
            .with_derivative(move |theta| Ok(vec![zero.clone(); theta.len()]))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn has_analytic_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_dim {
            return Err(Error::DimensionMismatch {
                expected: self.param_dim,
                found: theta.len(),
            });
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidArgument("parameter must be finite".into()));
        }
        Ok(())
    }

    pub fn state_at(&self, theta: &[f64]) -> Result<DensityMatrix> {
        self.check_theta(theta)?;
        let rho = (self.state)(theta)?;
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        Ok(rho)
    }

    /// Log-normalizer `κ(θ)` of an exponential family.
    pub fn kappa(&self, theta: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        match &self.kappa {
            Some(k) => k(theta),
            None => Err(Error::InvalidArgument("model has no log-normalizer".into())),
        }
    }

    /// `ρ(θ) ⊗ ρ'(θ)` with a shared parameter.
    pub fn tensor(&self, other: &ParametricModel) -> Result<ParametricModel> {
        if self.param_dim != other.param_dim {
            return Err(Error::DimensionMismatch {
                expected: self.param_dim,
                found: other.param_dim,
            });
        }
        let (a, b) = (self.clone(), other.clone());
        let (da, db) = (self.clone(), other.clone());
        Ok(ParametricModel::new(self.dim * other.dim, self.param_dim, move |theta| {
            Ok(a.state_at(theta)?.tensor(&b.state_at(theta)?))
        })
        .with_derivative(move |theta| {
            let (ra, rb) = (da.state_at(theta)?, db.state_at(theta)?);
            (0..theta.len())
                .map(|j| {
                    let left = derivative(&da, theta, j)?.tensor(rb.matrix());
                    let right = ra.matrix().tensor(&derivative(&db, theta, j)?);
                    Ok(&left + &right)
                })
                .collect()
        }))
    }

    /// `n` independent copies, `ρ(θ)^{⊗n}`.
    pub fn power(&self, n: usize) -> Result<ParametricModel> {
        if n == 0 {
            return Err(Error::InvalidArgument("tensor power needs n >= 1".into()));
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor(self)?;
        }
        Ok(out)
    }
}

fn scalar(model: &ParametricModel) -> Result<()> {
    if model.param_dim != 1 {
        return Err(Error::InvalidArgument(format!(
            "operation needs a scalar parameter, model has {}",
            model.param_dim
        )));
    }
    Ok(())
}

/// `∂ρ/∂θ_j`: analytic when the model provides it, otherwise a central
/// difference. The result is symmetrized and must be traceless.
pub fn derivative(model: &ParametricModel, theta: &[f64], j: usize) -> Result<ComplexMatrix> {
    model.check_theta(theta)?;
    if j >= model.param_dim {
        return Err(Error::InvalidArgument(format!("coordinate {j} out of range")));
    }
    let raw = match &model.derivative {
        Some(g) => {
            let all = g(theta)?;
            all.into_iter()
                .nth(j)
                .ok_or_else(|| Error::Numerical("analytic derivative returned too few components".into()))?
        }
        None => {
            let h = model.step;
            let mut plus = theta.to_vec();
            let mut minus = theta.to_vec();
            plus[j] += h;
            minus[j] -= h;
            let rp = model.state_at(&plus)?;
            let rm = model.state_at(&minus)?;
            (rp.matrix() - rm.matrix()).scale_real(0.5 / h)
        }
    };
    raw.require_dim(model.dim)?;
    let herm = raw.hermiticity_error();
    if herm > TOL_HERM * raw.max_abs().max(1.0) {
        return Err(Error::NotHermitian(herm));
    }
    let d = raw.hermitian_part();
    let tr = d.trace()?.re;
    if tr.abs() > 1e-8 {
        return Err(Error::NotTraceless(tr));
    }
    Ok(d)
}

/// The quantum score at one parameter value.
#[derive(Debug, Clone)]
pub struct QuantumScore {
    observable: Observable,
    jordan_residual: f64,
}

impl QuantumScore {
    pub fn observable(&self) -> &Observable {
        &self.observable
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.observable.matrix()
    }

    pub fn into_observable(self) -> Observable {
        self.observable
    }

    /// `‖½(ρL + Lρ) − ρ'‖_max`
    pub fn jordan_residual(&self) -> f64 {
        self.jordan_residual
    }
}

/// Solves the Jordan equation `ρ' = ρ ∘ L` for a given state and derivative.
pub fn solve_score(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<QuantumScore> {
    drho.require_dim(rho.dim())?;
    let eig = rho.matrix().eig_hermitian()?;
    let v = &eig.vectors;
    let mut in_basis = v.adjoint().matmul(drho)?.matmul(v)?;
    let p = &eig.values;
    let n = p.len();
    for a in 0..n {
        for b in 0..n {
            let s = p[a] + p[b];
            in_basis[(a, b)] = if s > TOL_SUPP {
                in_basis[(a, b)] * (2.0 / s)
            } else {
                c(0.0, 0.0)
            };
        }
    }
    let l = v.matmul(&in_basis)?.matmul(&v.adjoint())?.hermitian_part();
    let residual = rho.matrix().jordan(&l)?.max_diff(drho);
    if residual > TOL_SCORE * drho.max_abs().max(1.0) {
        return Err(Error::ScoreResidual(residual));
    }
    Ok(QuantumScore {
        observable: Observable::new(l)?,
        jordan_residual: residual,
    })
}

/// Quantum score (symmetric logarithmic derivative) for coordinate `j`.
pub fn sld(model: &ParametricModel, theta: &[f64], j: usize) -> Result<QuantumScore> {
    let rho = model.state_at(theta)?;
    let drho = derivative(model, theta, j)?;
    solve_score(&rho, &drho)
}

/// `I(θ) = trace(ρ L²)` for a scalar parameter.
pub fn qfi(model: &ParametricModel, theta: f64) -> Result<f64> {
    scalar(model)?;
    let rho = model.state_at(&[theta])?;
    let l = sld(model, &[theta], 0)?;
    let l2 = l.matrix().matmul(l.matrix())?;
    Ok(rho.matrix().trace_product(&l2)?.re.max(0.0))
}

/// `I_jk = ½ trace(L_j ρ L_k + L_k ρ L_j)`.
pub fn qfi_matrix(model: &ParametricModel, theta: &[f64]) -> Result<Vec<Vec<f64>>> {
    let rho = model.state_at(theta)?;
    let k = model.param_dim;
    let scores = (0..k)
        .map(|j| sld(model, theta, j).map(QuantumScore::into_observable))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![vec![0.0; k]; k];
    for a in 0..k {
        let rl = rho.matrix().matmul(scores[a].matrix())?;
        for b in a..k {
            // ½ tr(L_a ρ L_b + L_b ρ L_a) = Re tr(ρ L_a L_b)
            let v = rl.trace_product(scores[b].matrix())?.re;
            out[a][b] = v;
            out[b][a] = v;
        }
    }
    Ok(out)
}

/// `J(θ) = −∂L/∂θ`, by central difference of the score.
pub fn observable_information(model: &ParametricModel, theta: f64) -> Result<Observable> {
    scalar(model)?;
    let h = FD_STEP_SECOND;
    let lp = sld(model, &[theta + h], 0)?;
    let lm = sld(model, &[theta - h], 0)?;
    let j = (lm.matrix() - lp.matrix()).scale_real(0.5 / h);
    Observable::new(j.hermitian_part())
}

fn require_commuting(ops: &[&ComplexMatrix]) -> Result<()> {
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            let worst = a.commutator(b)?.max_abs();
            if worst > 1e-10 {
                return Err(Error::NonCommuting(worst));
            }
        }
    }
    Ok(())
}

fn pairwise_commute(ops: &[Observable]) -> bool {
    require_commuting(&ops.iter().map(Observable::matrix).collect::<Vec<_>>()).is_ok()
}

fn generator(ts: &[Observable], theta: &[f64], d: usize) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(d, d);
    for (t, &th) in ts.iter().zip(theta) {
        h += &t.matrix().scale_real(th);
    }
    h
}

fn check_generators(ts: &[Observable], d: usize) -> Result<()> {
    if ts.is_empty() {
        return Err(Error::InvalidArgument("exponential model needs at least one generator".into()));
    }
    for t in ts {
        t.matrix().require_dim(d)?;
    }
    Ok(())
}

/// `ρ' = ρ∘T − trace(ρT) ρ` for each generator; valid whenever the
/// generators commute.
fn commuting_exponential_derivative(rho: &DensityMatrix, ts: &[Observable]) -> Result<Vec<ComplexMatrix>> {
    ts.iter()
        .map(|t| {
            let mean = rho.expectation(t.matrix())?;
            Ok(&rho.matrix().jordan(t.matrix())? - &rho.matrix().scale_real(mean))
        })
        .collect()
}

/// Symmetric exponential family
/// `ρ(θ) = e^{−κ(θ)} exp(½θ·T) ρ₀ exp(½θ·T)`.
///
/// `ρ₀` may be any nonzero PSD matrix (it is normalized implicitly through
/// `κ`). An analytic derivative is attached when the generators commute.
pub fn exp_model_symmetric(rho0: &ComplexMatrix, ts: Vec<Observable>) -> Result<ParametricModel> {
    let d = rho0.dim()?;
    check_generators(&ts, d)?;
    rho0.require_hermitian()?;
    let lo = rho0.min_eigenvalue()?;
    if lo < -crate::linalg::TOL_PSD {
        return Err(Error::NotPsd(lo));
    }
    let tr = rho0.trace()?.re;
    if !(tr > 1e-14) {
        return Err(Error::InvalidArgument("reference operator must be nonzero".into()));
    }
    let rho0 = rho0.hermitian_part();
    let k = ts.len();

    // returns (unnormalized sandwich scaled by e^{-shift}, shift)
    let sandwich = {
        let ts = ts.clone();
        let rho0 = rho0.clone();
        move |theta: &[f64]| -> Result<(ComplexMatrix, f64)> {
            let h = generator(&ts, theta, d);
            let eig = h.eig_hermitian()?;
            let shift = eig.values.last().copied().unwrap_or(0.0);
            let a = eig.map_spectrum(|x| (0.5 * (x - shift)).exp())?;
            Ok((a.matmul(&rho0)?.matmul(&a)?, shift))
        }
    };
    let kappa = {
        let sandwich = sandwich.clone();
        move |theta: &[f64]| -> Result<f64> {
            let (s, shift) = sandwich(theta)?;
            Ok(s.trace()?.re.ln() + shift)
        }
    };
    let state = move |theta: &[f64]| -> Result<DensityMatrix> {
        let (s, _) = sandwich(theta)?;
        DensityMatrix::from_unnormalized(s)
    };
    let model = ParametricModel::new(d, k, state).with_kappa(kappa);
    if pairwise_commute(&ts) {
        let m = model.clone();
        Ok(model.with_derivative(move |theta| commuting_exponential_derivative(&m.state_at(theta)?, &ts)))
    } else {
        Ok(model)
    }
}

/// Unitary family `ρ(θ) = exp(−i½θ·T) ρ₀ exp(i½θ·T)`.
pub fn exp_model_unitary(rho0: &DensityMatrix, ts: Vec<Observable>) -> Result<ParametricModel> {
    let d = rho0.dim();
    check_generators(&ts, d)?;
    let k = ts.len();
    let state = {
        let ts = ts.clone();
        let rho0 = rho0.clone();
        move |theta: &[f64]| -> Result<DensityMatrix> {
            let u = generator(&ts, theta, d).exp_hermitian(c(0.0, -0.5))?;
            DensityMatrix::new(rho0.matrix().conjugate_by(&u)?)
        }
    };
    let model = ParametricModel::new(d, k, state);
    if pairwise_commute(&ts) {
        let m = model.clone();
        Ok(model.with_derivative(move |theta| {
            let rho = m.state_at(theta)?;
            ts.iter()
                .map(|t| Ok(t.matrix().commutator(rho.matrix())?.scale(c(0.0, -0.5))))
                .collect()
        }))
    } else {
        Ok(model)
    }
}

/// Gibbs-type family `ρ(θ) = e^{−κ(θ)} exp(T₀ + θ·T)` with commuting
/// `T₀, T₁, ..., T_k`.
pub fn exp_model_mechanical(t0: &Observable, ts: Vec<Observable>) -> Result<ParametricModel> {
    let d = t0.dim();
    check_generators(&ts, d)?;
    let mut all: Vec<&ComplexMatrix> = vec![t0.matrix()];
    all.extend(ts.iter().map(Observable::matrix));
    require_commuting(&all)?;
    let k = ts.len();

    let shifted = {
        let ts = ts.clone();
        let t0 = t0.clone();
        move |theta: &[f64]| -> Result<(ComplexMatrix, f64)> {
            let mut h = generator(&ts, theta, d);
            h += t0.matrix();
            let eig = h.eig_hermitian()?;
            let shift = eig.values.last().copied().unwrap_or(0.0);
            Ok((eig.map_spectrum(|x| (x - shift).exp())?, shift))
        }
    };
    let kappa = {
        let shifted = shifted.clone();
        move |theta: &[f64]| -> Result<f64> {
            let (e, shift) = shifted(theta)?;
            Ok(e.trace()?.re.ln() + shift)
        }
    };
    let state = move |theta: &[f64]| -> Result<DensityMatrix> {
        let (e, _) = shifted(theta)?;
        DensityMatrix::from_unnormalized(e)
    };
    let model = ParametricModel::new(d, k, state).with_kappa(kappa);
    let m = model.clone();
    Ok(model.with_derivative(move |theta| commuting_exponential_derivative(&m.state_at(theta)?, &ts)))
}

/// `ρ(θ) = U ½(1 + cos θ σ_x + sin θ σ_y) U*`: a great circle on the
/// Poincaré sphere.
pub fn great_circle_model(u: &ComplexMatrix) -> Result<ParametricModel> {
    u.require_dim(2)?;
    let err = u.unitarity_error();
    if err > 1e-10 {
        return Err(Error::NotUnitary(err));
    }
    let (u1, u2) = (u.clone(), u.clone());
    Ok(ParametricModel::new(2, 1, move |theta| {
        let t = theta[0];
        let mut m = ComplexMatrix::identity(2);
        m += &pauli::dot([t.cos(), t.sin(), 0.0]);
        DensityMatrix::new(m.scale_real(0.5).conjugate_by(&u1)?)
    })
    .with_derivative(move |theta| {
        let t = theta[0];
        let d = pauli::dot([-t.sin(), t.cos(), 0.0]).scale_real(0.5);
        Ok(vec![d.conjugate_by(&u2)?])
    }))
}

/// Pure spin-half states at fixed colatitude `eta`, with the longitude as
/// the parameter.
pub fn spin_half_longitude_model(eta: f64) -> ParametricModel {
    ParametricModel::new(2, 1, move |theta| Ok(spin_half_pure(eta, theta[0]))).with_derivative(move |theta| {
        let t = theta[0];
        Ok(vec![pauli::dot([-t.sin(), t.cos(), 0.0]).scale_real(0.5 * eta.sin())])
    })
}
