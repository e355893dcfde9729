//! Measurements (POVMs) and observables.
//!
//! A [`Povm`] is a labelled family of PSD matrices summing to the identity;
//! outcome `x` occurs with probability `trace(ρ m(x))`.

mod naimark;

pub use naimark::{naimark_dilate, Dilation};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::label::check_distinct;
use crate::linalg::{pauli, ComplexMatrix, TOL_DEGENERATE, TOL_HERM, TOL_PSD};
use crate::states::DensityMatrix;
use crate::Label;

/// Tolerance on `Σ m(x) - 1` (max norm).
pub const TOL_COMPLETE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    labels: Vec<Label>,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(labels: Vec<Label>, elements: Vec<ComplexMatrix>) -> Result<Self> {
        if labels.len() != elements.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                found: elements.len(),
            });
        }
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidArgument("a measurement needs at least one outcome".into()))?;
        let d = first.dim()?;
        check_distinct(&labels)?;
        let mut total = ComplexMatrix::zeros(d, d);
        let mut clean = Vec::with_capacity(elements.len());
        for m in &elements {
            m.require_dim(d)?;
            let herm = m.hermiticity_error();
            if herm > TOL_HERM {
                return Err(Error::NotHermitian(herm));
            }
            let m = m.hermitian_part();
            let lo = m.min_eigenvalue()?;
            if lo < -TOL_PSD {
                return Err(Error::NotPsd(lo));
            }
            total += &m;
            clean.push(m);
        }
        let dev = total.max_diff(&ComplexMatrix::identity(d));
        if dev > TOL_COMPLETE {
            return Err(Error::Incomplete(dev));
        }
        Ok(Self {
            labels,
            elements: clean,
        })
    }

    /// Outcomes labelled `0, 1, ...` in order.
    pub fn indexed(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let labels = (0..elements.len() as i64).map(Label::Int).collect();
        Self::new(labels, elements)
    }

    /// The trivial one-outcome measurement `{1}`.
    pub fn trivial(d: usize) -> Self {
        Self {
            labels: vec![Label::Int(0)],
            elements: vec![ComplexMatrix::identity(d)],
        }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn element(&self, label: &Label) -> Option<&ComplexMatrix> {
        self.index_of(label).map(|i| &self.elements[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, &ComplexMatrix)> {
        self.labels.iter().zip(&self.elements)
    }

    /// True when every element is an orthogonal projector.
    pub fn is_projective(&self, tol: f64) -> bool {
        self.elements
            .iter()
            .all(|m| m.matmul(m).map(|m2| m2.max_diff(m) <= tol).unwrap_or(false))
    }

    /// `U* m(x) U` for every element.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Povm> {
        let elements = self
            .elements
            .iter()
            .map(|m| m.conjugate_by(&u.adjoint()))
            .collect::<Result<Vec<_>>>()?;
        Povm::new(self.labels.clone(), elements)
    }
}

/// Hermitian matrix viewed as a physical quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    mat: ComplexMatrix,
}

impl Observable {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        mat.require_hermitian()?;
        Ok(Self {
            mat: mat.hermitian_part(),
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// Distinct eigenvalues (clustered within [`TOL_DEGENERATE`]) with
    /// their spectral projectors, ascending.
    pub fn spectral_projectors(&self) -> Vec<(f64, ComplexMatrix)> {
        let eig = self.mat.eig_hermitian().expect("validated Hermitian");
        let d = eig.dim();
        eig.clusters(TOL_DEGENERATE)
            .into_iter()
            .map(|range| {
                let value = range.clone().map(|k| eig.values[k]).sum::<f64>() / range.len() as f64;
                let mut proj = ComplexMatrix::zeros(d, d);
                for k in range {
                    let v = eig.vector(k);
                    proj += &ComplexMatrix::outer(&v, &v);
                }
                (value, proj.hermitian_part())
            })
            .collect()
    }
}

fn require_same_dim(rho: &DensityMatrix, m: &Povm) -> Result<()> {
    if rho.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// Outcome probabilities `trace(ρ m(x))`, aligned with `m.labels()`.
pub fn prob(rho: &DensityMatrix, m: &Povm) -> Result<Vec<f64>> {
    require_same_dim(rho, m)?;
    Ok(m.elements
        .iter()
        .map(|e| rho.matrix().trace_product(e).expect("square").re.max(0.0))
        .collect())
}

pub(crate) fn sample_indices<R: Rng + ?Sized>(probs: &[f64], n: usize, rng: &mut R) -> Result<Vec<usize>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let dist = WeightedIndex::new(probs).map_err(|e| Error::Numerical(format!("sampling weights: {e}")))?;
    Ok((0..n).map(|_| dist.sample(rng)).collect())
}

/// `n` i.i.d. outcomes of measuring `m` on `ρ`; deterministic in `seed`.
pub fn sample(rho: &DensityMatrix, m: &Povm, n: usize, seed: u64) -> Result<Vec<Label>> {
    let p = prob(rho, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_indices(&p, n, &mut rng)?
        .into_iter()
        .map(|i| m.labels[i].clone())
        .collect())
}

/// Projective measurement of `x`: labels are its distinct eigenvalues.
pub fn simple_from_observable(x: &Observable) -> Povm {
    let (labels, elements): (Vec<_>, Vec<_>) = x
        .spectral_projectors()
        .into_iter()
        .map(|(v, p)| (Label::Real(v), p))
        .unzip();
    Povm::new(labels, elements).expect("spectral projectors form a measurement")
}

/// `E f(outcome) = trace(ρ f(X))`.
pub fn expectation_of_function<F>(rho: &DensityMatrix, x: &Observable, f: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let fx = x.matrix().func_hermitian(f)?;
    rho.expectation(&fx)
}

/// Pushes outcomes through `t`: `m'(y) = Σ_{t(x)=y} m(x)`. New labels keep
/// the order in which they first appear.
pub fn coarsen<F>(m: &Povm, t: F) -> Povm
where
    F: Fn(&Label) -> Label,
{
    let mut labels: Vec<Label> = Vec::new();
    let mut elements: Vec<ComplexMatrix> = Vec::new();
    for (x, e) in m.iter() {
        let y = t(x);
        match labels.iter().position(|l| *l == y) {
            Some(i) => elements[i] += e,
            None => {
                labels.push(y);
                elements.push(e.clone());
            }
        }
    }
    Povm { labels, elements }
}

/// Splits every element into its rank-one spectral parts `λ_k |v_k⟩⟨v_k|`,
/// labelled `(x, k)`. Zero eigenvalues are dropped.
pub fn refine_rank1(m: &Povm) -> Povm {
    let mut labels = Vec::new();
    let mut elements = Vec::new();
    for (x, e) in m.iter() {
        let eig = e.eig_hermitian().expect("validated element");
        let mut k = 0;
        for (i, &lam) in eig.values.iter().enumerate().rev() {
            if lam <= TOL_PSD {
                continue;
            }
            let v = eig.vector(i);
            labels.push(Label::pair(x.clone(), Label::Int(k)));
            elements.push(ComplexMatrix::outer(&v, &v).scale_real(lam));
            k += 1;
        }
    }
    Povm { labels, elements }
}

/// Product measurement with elements `a(x) ⊗ b(y)` labelled `(x, y)`.
pub fn tensor_povm(a: &Povm, b: &Povm) -> Povm {
    let mut labels = Vec::with_capacity(a.len() * b.len());
    let mut elements = Vec::with_capacity(a.len() * b.len());
    for (x, ea) in a.iter() {
        for (y, eb) in b.iter() {
            labels.push(Label::pair(x.clone(), y.clone()));
            elements.push(ea.tensor(eb));
        }
    }
    Povm { labels, elements }
}

/// The three coplanar unit vectors at 120° used by [`triad`], in the x–y plane.
pub fn triad_directions() -> [[f64; 3]; 3] {
    let h = 3f64.sqrt() / 2.0;
    [[1.0, 0.0, 0.0], [-0.5, h, 0.0], [-0.5, -h, 0.0]]
}

/// `m(i) = ⅓(1 + v_i·σ)`, outcomes `1, 2, 3`.
pub fn triad() -> Povm {
    let elements = triad_directions()
        .iter()
        .map(|&v| (&ComplexMatrix::identity(2) + &pauli::dot(v)).scale_real(1.0 / 3.0))
        .collect();
    Povm::new((1..=3).map(Label::Int).collect(), elements).expect("triad is a measurement")
}

/// Two-outcome projective qubit measurement along the unit direction `n`,
/// outcomes `+1` and `-1`.
pub fn qubit_projective(n: [f64; 3]) -> Result<Povm> {
    let len = n.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (len - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidArgument(format!("direction must be a unit vector, norm {len}")));
    }
    let i2 = ComplexMatrix::identity(2);
    let s = pauli::dot(n);
    Povm::new(
        vec![Label::Real(1.0), Label::Real(-1.0)],
        vec![(&i2 + &s).scale_real(0.5), (&i2 - &s).scale_real(0.5)],
    )
}
