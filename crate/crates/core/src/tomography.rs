//! Tomography of data-less operations through the maximally entangled probe.
//!
//! The Choi state of a channel `N` is `(N ⊗ 1)(|Ψ⟩⟨Ψ|)` with
//! `|Ψ⟩ = Σ_j |j⟩⊗|j⟩ / √d`; it determines `N` completely.

use crate::error::{Error, Result};
use crate::linalg::{c, ComplexMatrix, Subsystem};
use crate::states::{maximally_entangled, pure, DensityMatrix};

/// Eigenvalues of `d·choi` above this become Kraus operators.
pub const TOL_KRAUS: f64 = 1e-10;

/// A trace-preserving map `ρ ↦ Σ_i n_i ρ n_i*`.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    kraus: Vec<ComplexMatrix>,
}

impl Channel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(kraus, 1e-10)
    }

    fn with_tolerance(kraus: Vec<ComplexMatrix>, tol: f64) -> Result<Self> {
        let d = kraus
            .first()
            .ok_or_else(|| Error::InvalidArgument("a channel needs at least one Kraus operator".into()))?
            .dim()?;
        let mut total = ComplexMatrix::zeros(d, d);
        for n in &kraus {
            n.require_dim(d)?;
            total += &n.adjoint().matmul(n)?;
        }
        let dev = total.max_diff(&ComplexMatrix::identity(d));
        if dev > tol {
            return Err(Error::Incomplete(dev));
        }
        Ok(Self { kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(d)],
        }
    }

    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        let err = u.unitarity_error();
        if err > 1e-10 {
            return Err(Error::NotUnitary(err));
        }
        Self::new(vec![u.clone()])
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    pub fn dim(&self) -> usize {
        self.kraus[0].rows()
    }
}

/// `Σ_i n_i ρ n_i*`.
pub fn apply_channel(ch: &Channel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != ch.dim() {
        return Err(Error::DimensionMismatch {
            expected: ch.dim(),
            found: rho.dim(),
        });
    }
    let d = ch.dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for n in &ch.kraus {
        out += &rho.matrix().conjugate_by(n)?;
    }
    DensityMatrix::new(out.hermitian_part())
}

/// A state on `C^d ⊗ C^d` whose second marginal is `1/d`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiState {
    mat: DensityMatrix,
    dim: usize,
}

impl ChoiState {
    /// Validates a candidate Choi state of a `d`-dimensional channel.
    pub fn new(mat: DensityMatrix, d: usize) -> Result<Self> {
        if mat.dim() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: mat.dim(),
            });
        }
        let dev = marginal_residual(&mat, d)?;
        if dev > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "second marginal deviates from the maximally mixed state by {dev:e}"
            )));
        }
        Ok(Self { mat, dim: d })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.mat
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.mat.matrix()
    }

    /// Dimension of the channel's input space.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `‖trace_1(choi) − 1/d‖_max`
    pub fn marginal_residual(&self) -> f64 {
        marginal_residual(&self.mat, self.dim).expect("validated dimensions")
    }
}

fn marginal_residual(mat: &DensityMatrix, d: usize) -> Result<f64> {
    let reduced = mat.partial_trace((d, d), Subsystem::Second)?;
    Ok(reduced
        .matrix()
        .max_diff(&ComplexMatrix::identity(d).scale_real(1.0 / d as f64)))
}

/// `(N ⊗ 1)(|Ψ⟩⟨Ψ|)`.
pub fn choi_state(ch: &Channel) -> Result<ChoiState> {
    let d = ch.dim();
    let psi = pure(&maximally_entangled(d)?);
    let id = ComplexMatrix::identity(d);
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for n in &ch.kraus {
        out += &psi.matrix().conjugate_by(&n.tensor(&id))?;
    }
    ChoiState::new(DensityMatrix::new(out.hermitian_part())?, d)
}

/// Kraus operators from the eigendecomposition of `d·choi`, in descending
/// eigenvalue order. The eigenvector `w` with components `w[a·d + j]` becomes
/// `n[a][j] = √λ·w[a·d + j]`, matching `|Ψ⟩ = Σ_j |j⟩⊗|j⟩/√d`.
pub fn channel_from_choi(choi: &ChoiState) -> Result<Channel> {
    let d = choi.dim;
    let eig = choi.matrix().scale_real(d as f64).eig_hermitian()?;
    let mut order: Vec<usize> = (0..eig.values.len()).filter(|&k| eig.values[k] > TOL_KRAUS).collect();
    order.sort_by(|&a, &b| eig.values[b].total_cmp(&eig.values[a]).then(a.cmp(&b)));
    let kraus = order
        .into_iter()
        .map(|k| {
            let w = eig.vector(k);
            let s = eig.values[k].sqrt();
            let mut n = ComplexMatrix::zeros(d, d);
            for a in 0..d {
                for j in 0..d {
                    n[(a, j)] = w[a * d + j] * c(s, 0.0);
                }
            }
            n
        })
        .collect();
    Channel::with_tolerance(kraus, 1e-8)
}

/// Deterministic panel of `d² + 2` probe states: the maximally mixed state,
/// the basis projectors `|j⟩⟨j|`, the states `(|j⟩+|k⟩)` and `(|j⟩+i|k⟩)`
/// for `j < k` (together spanning the Hermitian matrices), and one state
/// with unequal populations and complex coherences.
pub fn probe_panel(d: usize) -> Vec<DensityMatrix> {
    let mut panel = vec![DensityMatrix::maximally_mixed(d)];
    let ket = |entries: &[(usize, num_complex::Complex64)]| {
        let mut v = vec![c(0.0, 0.0); d];
        for &(i, z) in entries {
            v[i] = z;
        }
        let n = crate::states::StateVector::normalized(v).expect("nonzero probe");
        pure(&n)
    };
    for j in 0..d {
        panel.push(ket(&[(j, c(1.0, 0.0))]));
    }
    for j in 0..d {
        for k in j + 1..d {
            panel.push(ket(&[(j, c(1.0, 0.0)), (k, c(1.0, 0.0))]));
            panel.push(ket(&[(j, c(1.0, 0.0)), (k, c(0.0, 1.0))]));
        }
    }
    let amps: Vec<(usize, num_complex::Complex64)> = (0..d)
        .map(|j| (j, c(1.0 + j as f64, 0.5 * j as f64 - 0.25)))
        .collect();
    let skew = ket(&amps);
    panel.push(
        crate::states::mix(&[(0.7, &skew), (0.3, &DensityMatrix::maximally_mixed(d))]).expect("valid mixture"),
    );
    panel
}

/// `max_ρ ‖A(ρ) − B(ρ)‖_max` over the probe panel.
pub fn behavioral_distance(a: &Channel, b: &Channel) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let mut worst: f64 = 0.0;
    for rho in probe_panel(a.dim()) {
        let x = apply_channel(a, &rho)?;
        let y = apply_channel(b, &rho)?;
        worst = worst.max(x.matrix().max_diff(y.matrix()));
    }
    Ok(worst)
}
