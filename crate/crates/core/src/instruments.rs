//! Quantum instruments in Kraus form.
//!
//! Outcome `x` occurs with probability `Σ_i trace(ρ n_i(x)* n_i(x))` and
//! leaves the system in `Σ_i n_i(x) ρ n_i(x)* / p(x)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::label::check_distinct;
use crate::linalg::{c, inner, ComplexMatrix};
use crate::measurements::{Observable, Povm};
use crate::models::ParametricModel;
use crate::states::DensityMatrix;
use crate::Label;

/// Outcomes at or below this probability have no posterior.
pub const MIN_POSTERIOR_PROB: f64 = 1e-12;
/// Reduced Planck constant in J·s.
pub const HBAR_SI: f64 = 1.054_571_817e-34;

#[derive(Debug, Clone, PartialEq)]
pub struct Instrument {
    labels: Vec<Label>,
    kraus: Vec<Vec<ComplexMatrix>>,
}

impl Instrument {
    pub fn new(labels: Vec<Label>, kraus: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        if labels.len() != kraus.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                found: kraus.len(),
            });
        }
        check_distinct(&labels)?;
        let d = kraus
            .first()
            .and_then(|ops| ops.first())
            .ok_or_else(|| Error::InvalidArgument("an instrument needs at least one Kraus operator".into()))?
            .dim()?;
        let mut total = ComplexMatrix::zeros(d, d);
        for ops in &kraus {
            if ops.is_empty() {
                return Err(Error::InvalidArgument("every outcome needs a Kraus operator".into()));
            }
            for n in ops {
                n.require_dim(d)?;
                total += &n.adjoint().matmul(n)?;
            }
        }
        let dev = total.max_diff(&ComplexMatrix::identity(d));
        if dev > 1e-10 {
            return Err(Error::Incomplete(dev));
        }
        Ok(Self { labels, kraus })
    }

    /// One outcome, one Kraus operator `U`.
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        let err = u.unitarity_error();
        if err > 1e-10 {
            return Err(Error::NotUnitary(err));
        }
        Self::new(vec![Label::Int(0)], vec![vec![u.clone()]])
    }

    pub fn identity(d: usize) -> Self {
        Self {
            labels: vec![Label::Int(0)],
            kraus: vec![vec![ComplexMatrix::identity(d)]],
        }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn kraus(&self) -> &[Vec<ComplexMatrix>] {
        &self.kraus
    }

    pub fn kraus_for(&self, x: &Label) -> Option<&[ComplexMatrix]> {
        self.index_of(x).map(|i| self.kraus[i].as_slice())
    }

    pub fn index_of(&self, x: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == x)
    }

    pub fn dim(&self) -> usize {
        self.kraus[0][0].rows()
    }

    fn require_dim(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
            });
        }
        Ok(())
    }
}

fn branch(rho: &DensityMatrix, ops: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let d = rho.dim();
    let mut acc = ComplexMatrix::zeros(d, d);
    for n in ops {
        acc += &rho.matrix().conjugate_by(n)?;
    }
    Ok(acc)
}

/// `p(x) = Σ_i trace(ρ n_i(x)* n_i(x))`, aligned with `n.labels()`.
pub fn outcome_dist(rho: &DensityMatrix, n: &Instrument) -> Result<Vec<f64>> {
    n.require_dim(rho)?;
    n.kraus
        .iter()
        .map(|ops| Ok(branch(rho, ops)?.trace()?.re.max(0.0)))
        .collect()
}

/// State after observing `x`.
pub fn posterior(rho: &DensityMatrix, n: &Instrument, x: &Label) -> Result<DensityMatrix> {
    n.require_dim(rho)?;
    let ops = n.kraus_for(x).ok_or_else(|| Error::UnknownLabel(x.to_string()))?;
    let unnormalized = branch(rho, ops)?;
    let p = unnormalized.trace()?.re;
    if p <= MIN_POSTERIOR_PROB {
        return Err(Error::ZeroProbability {
            label: x.to_string(),
            probability: p,
        });
    }
    DensityMatrix::new(unnormalized.scale_real(1.0 / p))
}

/// `m(x) = Σ_i n_i(x)* n_i(x)`.
pub fn induced_povm(n: &Instrument) -> Povm {
    let elements = n
        .kraus
        .iter()
        .map(|ops| {
            let d = ops[0].rows();
            let mut m = ComplexMatrix::zeros(d, d);
            for k in ops {
                m += &k.adjoint().matmul(k).expect("square Kraus operator");
            }
            m.hermitian_part()
        })
        .collect();
    Povm::new(n.labels.clone(), elements).expect("complete instrument induces a measurement")
}

/// Applies `first`, then the instrument `chooser(x)` picked by its outcome.
/// Outcomes are pairs `(x, y)` with Kraus operators `n'_j(y) n_i(x)`.
pub fn compose<F>(first: &Instrument, chooser: F) -> Result<Instrument>
where
    F: Fn(&Label) -> Instrument,
{
    let d = first.dim();
    let mut labels = Vec::new();
    let mut kraus = Vec::new();
    for (x, ops) in first.labels.iter().zip(&first.kraus) {
        let second = chooser(x);
        if second.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: second.dim(),
            });
        }
        for (y, ops2) in second.labels.iter().zip(&second.kraus) {
            let mut list = Vec::with_capacity(ops.len() * ops2.len());
            for a in ops {
                for b in ops2 {
                    list.push(b.matmul(a)?);
                }
            }
            labels.push(Label::pair(x.clone(), y.clone()));
            kraus.push(list);
        }
    }
    Instrument::new(labels, kraus)
}

/// Lüders instrument of `x`: one projector `Π(x)` per distinct eigenvalue.
pub fn simple_instrument(x: &Observable) -> Instrument {
    let (labels, kraus) = x
        .spectral_projectors()
        .into_iter()
        .map(|(v, p)| (Label::Real(v), vec![p]))
        .unzip();
    Instrument { labels, kraus }
}

/// `ρ_t = e^{tH/iħ} ρ e^{−tH/iħ}`.
pub fn schroedinger_evolve(rho: &DensityMatrix, h: &Observable, t: f64, hbar: f64) -> Result<DensityMatrix> {
    if !(hbar > 0.0) {
        return Err(Error::InvalidArgument(format!("hbar must be positive, got {hbar}")));
    }
    h.matrix().require_dim(rho.dim())?;
    let u = h.matrix().exp_hermitian(c(0.0, -t / hbar))?;
    DensityMatrix::new(rho.matrix().conjugate_by(&u)?)
}

/// One outcome of a Wiseman-form instrument: Kraus operators
/// `n_i(x) = |φ_{i,x}⟩⟨ψ_x|`.
#[derive(Debug, Clone)]
pub struct WisemanBranch {
    pub label: Label,
    pub phis: Vec<Vec<Complex64>>,
    pub psi: Vec<Complex64>,
}

/// Builds the instrument `n_i(x) = |φ_{i,x}⟩⟨ψ_x|`, whose posterior
/// `Σ_i |φ_{i,x}⟩⟨φ_{i,x}| / Σ_i ⟨φ_{i,x}|φ_{i,x}⟩` does not depend on the
/// input state. Completeness `Σ_x Σ_i ⟨φ_{i,x}|φ_{i,x}⟩ |ψ_x⟩⟨ψ_x| = 1` is
/// checked.
pub fn wiseman_instrument(branches: &[WisemanBranch]) -> Result<Instrument> {
    let mut labels = Vec::with_capacity(branches.len());
    let mut kraus = Vec::with_capacity(branches.len());
    for b in branches {
        if b.phis.is_empty() {
            return Err(Error::InvalidArgument(format!("outcome {} has no output vectors", b.label)));
        }
        let ops = b
            .phis
            .iter()
            .map(|phi| {
                if phi.len() != b.psi.len() {
                    return Err(Error::DimensionMismatch {
                        expected: b.psi.len(),
                        found: phi.len(),
                    });
                }
                Ok(ComplexMatrix::outer(phi, &b.psi))
            })
            .collect::<Result<Vec<_>>>()?;
        labels.push(b.label.clone());
        kraus.push(ops);
    }
    Instrument::new(labels, kraus)
}

/// The state-independent posterior of a Wiseman-form outcome.
pub fn wiseman_posterior(branch: &WisemanBranch) -> Result<DensityMatrix> {
    let d = branch.psi.len();
    let mut num = ComplexMatrix::zeros(d, d);
    let mut den = 0.0;
    for phi in &branch.phis {
        num += &ComplexMatrix::outer(phi, phi);
        den += inner(phi, phi).re;
    }
    if !(den > 0.0) {
        return Err(Error::ZeroVector);
    }
    DensityMatrix::new(num.scale_real(1.0 / den))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExhaustivityReport {
    pub exhaustive: bool,
    /// Largest `‖σ(x;θ) − σ(x;θ')‖_max` over grid pairs and eligible outcomes.
    pub max_deviation: f64,
    /// Outcomes with probability above `1e-9` at every grid point.
    pub outcomes_checked: usize,
}

/// Checks whether the posterior states of `n` are the same at every grid
/// point of `model`.
pub fn is_exhaustive(
    n: &Instrument,
    model: &ParametricModel,
    theta_grid: &[Vec<f64>],
    tol: f64,
) -> Result<ExhaustivityReport> {
    if theta_grid.is_empty() {
        return Err(Error::InvalidArgument("parameter grid is empty".into()));
    }
    let per_point: Vec<(Vec<f64>, Vec<Option<DensityMatrix>>)> = theta_grid
        .par_iter()
        .map(|theta| {
            let rho = model.state_at(theta)?;
            let p = outcome_dist(&rho, n)?;
            let post = n
                .labels
                .iter()
                .zip(&p)
                .map(|(x, &px)| {
                    if px > 1e-9 {
                        posterior(&rho, n, x).map(Some)
                    } else {
                        Ok(None)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((p, post))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut max_deviation: f64 = 0.0;
    let mut outcomes_checked = 0;
    for x in 0..n.labels.len() {
        if per_point.iter().any(|(p, _)| p[x] <= 1e-9) {
            continue;
        }
        outcomes_checked += 1;
        let states: Vec<&DensityMatrix> = per_point.iter().map(|(_, s)| s[x].as_ref().expect("eligible")).collect();
        for (i, a) in states.iter().enumerate() {
            for b in &states[i + 1..] {
                max_deviation = max_deviation.max(a.matrix().max_diff(b.matrix()));
            }
        }
    }
    Ok(ExhaustivityReport {
        exhaustive: max_deviation <= tol,
        max_deviation,
        outcomes_checked,
    })
}
