//! Quantum states: density matrices, state vectors and qubit Bloch vectors.
//!
//! [`DensityMatrix`] validates on construction (Hermitian within
//! [`TOL_HERM`], spectrum above `-TOL_PSD`, unit trace within `1e-10`).
//! Constructors returning a [`StateVector`] fix the global phase so that the
//! first nonzero component is real and positive.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, kron_vec, pauli, ComplexMatrix, Subsystem, TOL_HERM, TOL_PSD, ZERO};

pub const TOL_TRACE: f64 = 1e-10;
pub const TOL_NORM: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let d = mat.dim()?;
        let herm = mat.hermiticity_error();
        if herm > TOL_HERM {
            return Err(Error::NotHermitian(herm));
        }
        let mat = mat.hermitian_part();
        let tr = mat.trace()?.re;
        if (tr - 1.0).abs() > TOL_TRACE {
            return Err(Error::InvalidTrace(tr));
        }
        if d > 1 {
            let lo = mat.min_eigenvalue()?;
            if lo < -TOL_PSD {
                return Err(Error::NotPsd(lo));
            }
        }
        Ok(Self { mat })
    }

    /// Scales a nonzero PSD matrix to unit trace before validating.
    pub fn from_unnormalized(mat: ComplexMatrix) -> Result<Self> {
        let tr = mat.trace()?.re;
        if !(tr > 0.0) {
            return Err(Error::InvalidTrace(tr));
        }
        Self::new(mat.scale_real(1.0 / tr))
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            mat: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
        }
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

    /// `trace(ρ²)`
    pub fn purity(&self) -> f64 {
        self.mat.trace_product(&self.mat).expect("square").re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.mat.eig_hermitian().expect("validated Hermitian").values
    }

    /// `trace(ρ X)` for a Hermitian `X`; the imaginary part is dropped.
    pub fn expectation(&self, x: &ComplexMatrix) -> Result<f64> {
        x.require_dim(self.dim())?;
        Ok(self.mat.trace_product(x)?.re)
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            mat: self.mat.tensor(&other.mat),
        }
    }

    pub fn partial_trace(&self, dims: (usize, usize), keep: Subsystem) -> Result<DensityMatrix> {
        DensityMatrix::new(self.mat.partial_trace(dims, keep)?)
    }

    /// `U ρ U*`; `u` must be unitary.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        let err = u.unitarity_error();
        if err > 1e-10 {
            return Err(Error::NotUnitary(err));
        }
        DensityMatrix::new(self.mat.conjugate_by(u)?)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    vec: Vec<Complex64>,
}

impl StateVector {
    /// Accepts an already normalized vector as given.
    pub fn new(vec: Vec<Complex64>) -> Result<Self> {
        if vec.is_empty() {
            return Err(Error::ZeroVector);
        }
        let n = linalg::norm(&vec);
        if (n - 1.0).abs() > TOL_NORM {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { vec })
    }

    /// Normalizes and fixes the global phase.
    pub fn normalized(vec: Vec<Complex64>) -> Result<Self> {
        let n = linalg::norm(&vec);
        if !(n >= 1e-12) {
            return Err(Error::ZeroVector);
        }
        let mut v: Vec<Complex64> = vec.into_iter().map(|z| z / n).collect();
        canonical_phase(&mut v);
        Ok(Self { vec: v })
    }

    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return Err(Error::InvalidArgument(format!("basis index {k} out of range for dimension {d}")));
        }
        let mut v = vec![ZERO; d];
        v[k] = c(1.0, 0.0);
        Ok(Self { vec: v })
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.vec
    }

    pub fn dim(&self) -> usize {
        self.vec.len()
    }

    pub fn tensor(&self, other: &StateVector) -> StateVector {
        StateVector {
            vec: kron_vec(&self.vec, &other.vec),
        }
    }
}

fn canonical_phase(v: &mut [Complex64]) {
    if let Some(z) = v.iter().copied().find(|z| z.norm() > 1e-12) {
        let ph = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

/// Real 3-vector `u` with `ρ = ½(1 + u·σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector(pub [f64; 3]);

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let b = BlochVector([x, y, z]);
        let n = b.norm();
        if !n.is_finite() || n > 1.0 + 1e-10 {
            return Err(Error::BlochOutOfBall(n));
        }
        Ok(b)
    }

    /// Point on the unit sphere at colatitude `eta`, longitude `theta`.
    pub fn from_polar(eta: f64, theta: f64) -> Self {
        BlochVector([eta.sin() * theta.cos(), eta.sin() * theta.sin(), eta.cos()])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_pure(&self) -> bool {
        (self.norm() - 1.0).abs() <= 1e-8
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }
}

/// `|ψ⟩⟨ψ|`
pub fn pure(psi: &StateVector) -> DensityMatrix {
    let v = psi.as_slice();
    DensityMatrix {
        mat: ComplexMatrix::outer(v, v).hermitian_part(),
    }
}

/// Convex combination `Σ p_i ρ_i`.
pub fn mix(components: &[(f64, &DensityMatrix)]) -> Result<DensityMatrix> {
    let (_, first) = components
        .first()
        .ok_or_else(|| Error::InvalidWeights("no components".into()))?;
    let d = first.dim();
    let mut total = 0.0;
    let mut acc = ComplexMatrix::zeros(d, d);
    for &(w, rho) in components {
        if !(w >= 0.0) {
            return Err(Error::InvalidWeights(format!("negative or NaN weight {w}")));
        }
        if rho.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: rho.dim(),
            });
        }
        total += w;
        acc += &rho.matrix().scale_real(w);
    }
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidWeights(format!("weights sum to {total}")));
    }
    DensityMatrix::new(acc)
}

/// Normalized linear combination `Σ c_i |φ_i⟩`.
pub fn superpose(components: &[(Complex64, &StateVector)]) -> Result<StateVector> {
    let (_, first) = components.first().ok_or(Error::ZeroVector)?;
    let d = first.dim();
    let mut acc = vec![ZERO; d];
    for &(amp, v) in components {
        if v.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
        for (a, x) in acc.iter_mut().zip(v.as_slice()) {
            *a += amp * x;
        }
    }
    StateVector::normalized(acc)
}

pub fn bloch_to_density(u: BlochVector) -> Result<DensityMatrix> {
    let n = u.norm();
    if !n.is_finite() || n > 1.0 + 1e-10 {
        return Err(Error::BlochOutOfBall(n));
    }
    let mut m = ComplexMatrix::identity(2);
    m += &pauli::dot(u.0);
    DensityMatrix::new(m.scale_real(0.5))
}

/// `u_k = trace(ρ σ_k)`
pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: rho.dim(),
        });
    }
    let [x, y, z] = pauli::all().map(|s| rho.expectation(&s).expect("qubit"));
    Ok(BlochVector([x, y, z]))
}

/// `|ψ(η,θ)⟩ = (e^{−iθ/2} cos(η/2), e^{iθ/2} sin(η/2))`.
pub fn spin_half_vector(eta: f64, theta: f64) -> Vec<Complex64> {
    vec![
        Complex64::from_polar((eta / 2.0).cos(), -theta / 2.0),
        Complex64::from_polar((eta / 2.0).sin(), theta / 2.0),
    ]
}

/// Pure qubit state with Bloch vector at colatitude `eta`, longitude `theta`.
pub fn spin_half_pure(eta: f64, theta: f64) -> DensityMatrix {
    let v = spin_half_vector(eta, theta);
    DensityMatrix {
        mat: ComplexMatrix::outer(&v, &v).hermitian_part(),
    }
}

/// `Σ_j |j⟩⊗|j⟩ / √d`
pub fn maximally_entangled(d: usize) -> Result<StateVector> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("maximally entangled state needs d >= 2, got {d}")));
    }
    let amp = c(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![ZERO; d * d];
    for j in 0..d {
        v[j * d + j] = amp;
    }
    Ok(StateVector { vec: v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn half_plus(s: ComplexMatrix) -> ComplexMatrix {
        (&ComplexMatrix::identity(2) + &s).scale_real(0.5)
    }

    #[test]
    fn pure_examples() {
        let rho = pure(&StateVector::basis(2, 0).unwrap());
        assert_eq!(rho.matrix(), &ComplexMatrix::diag_real(&[1.0, 0.0]));
        let plus = StateVector::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let rho = pure(&plus);
        assert!(rho.matrix().max_diff(&ComplexMatrix::from_real(2, 2, &[0.5; 4]).unwrap()) < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        assert_eq!(StateVector::normalized(vec![ZERO, ZERO]), Err(Error::ZeroVector));
    }

    #[test]
    fn mix_examples() {
        let zero = pure(&StateVector::basis(2, 0).unwrap());
        let one = pure(&StateVector::basis(2, 1).unwrap());
        let m = mix(&[(0.5, &zero), (0.5, &one)]).unwrap();
        assert_eq!(m, DensityMatrix::maximally_mixed(2));
        assert_eq!(mix(&[(1.0, &zero)]).unwrap(), zero);
        assert!(matches!(mix(&[(0.4, &zero), (0.4, &one)]), Err(Error::InvalidWeights(_))));
        let q = DensityMatrix::maximally_mixed(3);
        assert!(matches!(mix(&[(0.5, &zero), (0.5, &q)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn mixture_bloch_is_convex_combination() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random::density_matrix(2, &mut rng);
            let b = random::density_matrix(2, &mut rng);
            let w = 0.3;
            let m = mix(&[(w, &a), (1.0 - w, &b)]).unwrap();
            let (ua, ub, um) = (
                density_to_bloch(&a).unwrap(),
                density_to_bloch(&b).unwrap(),
                density_to_bloch(&m).unwrap(),
            );
            for k in 0..3 {
                assert!((um.0[k] - (w * ua.0[k] + (1.0 - w) * ub.0[k])).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn superposition_examples() {
        let e0 = StateVector::basis(2, 0).unwrap();
        let e1 = StateVector::basis(2, 1).unwrap();
        let one = c(1.0, 0.0);
        let psi = superpose(&[(one, &e0), (one, &e1)]).unwrap();
        let expected = [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)];
        assert!(psi.as_slice().iter().zip(&expected).all(|(a, b)| (a - b).norm() < 1e-15));

        let single = superpose(&[(c(0.0, 2.0), &e1)]).unwrap();
        assert_eq!(single, e1);

        assert_eq!(superpose(&[(one, &e0), (-one, &e0)]), Err(Error::ZeroVector));
    }

    #[test]
    fn bloch_examples() {
        assert_eq!(
            bloch_to_density(BlochVector([0.0, 0.0, 0.0])).unwrap(),
            DensityMatrix::maximally_mixed(2)
        );
        assert_eq!(
            bloch_to_density(BlochVector([0.0, 0.0, 1.0])).unwrap().matrix(),
            &ComplexMatrix::diag_real(&[1.0, 0.0])
        );
        assert_eq!(
            bloch_to_density(BlochVector([1.0, 0.0, 0.0])).unwrap().matrix(),
            &ComplexMatrix::from_real(2, 2, &[0.5; 4]).unwrap()
        );
        assert!(matches!(
            bloch_to_density(BlochVector([1.0, 1.0, 0.0])),
            Err(Error::BlochOutOfBall(_))
        ));
        assert!(matches!(
            density_to_bloch(&DensityMatrix::maximally_mixed(3)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(density_to_bloch(&DensityMatrix::maximally_mixed(2)).unwrap(), BlochVector([0.0; 3]));
    }

    #[test]
    fn spin_half_examples() {
        for theta in [0.0, 1.0, 4.0] {
            assert!(spin_half_pure(0.0, theta).matrix().max_diff(&ComplexMatrix::diag_real(&[1.0, 0.0])) < 1e-15);
        }
        assert!(spin_half_pure(PI / 2.0, 0.0).matrix().max_diff(&half_plus(pauli::x())) < 1e-15);
        assert!(spin_half_pure(PI / 2.0, PI / 2.0).matrix().max_diff(&half_plus(pauli::y())) < 1e-15);
        for (eta, theta) in [(0.3, 1.2), (2.0, -0.7), (PI / 2.0, 3.0)] {
            let u = density_to_bloch(&spin_half_pure(eta, theta)).unwrap();
            let expected = BlochVector::from_polar(eta, theta);
            for k in 0..3 {
                assert!((u.0[k] - expected.0[k]).abs() < 1e-14);
            }
            assert!(u.is_pure());
        }
    }

    #[test]
    fn maximally_entangled_examples() {
        let v = maximally_entangled(2).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = [h, 0.0, 0.0, h];
        assert!(v.as_slice().iter().zip(expected).all(|(a, b)| (a - c(b, 0.0)).norm() < 1e-15));
        for d in 2..=8 {
            let psi = maximally_entangled(d).unwrap();
            assert!((linalg::norm(psi.as_slice()) - 1.0).abs() < 1e-14);
            let rho = pure(&psi);
            for keep in [Subsystem::First, Subsystem::Second] {
                let reduced = rho.partial_trace((d, d), keep).unwrap();
                assert!(reduced.matrix().max_diff(DensityMatrix::maximally_mixed(d).matrix()) < 1e-14);
            }
        }
        assert!(maximally_entangled(1).is_err());
    }

    #[test]
    fn partial_trace_of_products_recovers_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let a = random::density_matrix(2, &mut rng);
            let b = random::density_matrix(2, &mut rng);
            let ab = a.tensor(&b);
            assert!(ab.partial_trace((2, 2), Subsystem::First).unwrap().matrix().max_diff(a.matrix()) < 1e-14);
            assert!(ab.partial_trace((2, 2), Subsystem::Second).unwrap().matrix().max_diff(b.matrix()) < 1e-14);
        }
    }

    #[test]
    fn purity_bounds_and_bloch_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for d in [2, 3, 4] {
            for _ in 0..10 {
                let rho = random::density_matrix(d, &mut rng);
                let p = rho.purity();
                assert!(p >= 1.0 / d as f64 - 1e-12 && p <= 1.0 + 1e-12);
                if d == 2 {
                    let u = density_to_bloch(&rho).unwrap();
                    assert!((p - (1.0 + u.norm().powi(2)) / 2.0).abs() < 1e-10);
                    let back = bloch_to_density(u).unwrap();
                    assert!(back.matrix().max_diff(rho.matrix()) < 1e-12);
                }
            }
        }
    }

    #[test]
    fn invalid_density_rejected() {
        let m = ComplexMatrix::diag_real(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotPsd(_))));
        let m = ComplexMatrix::diag_real(&[0.5, 0.4]);
        assert!(matches!(DensityMatrix::new(m), Err(Error::InvalidTrace(_))));
        let m = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian(_))));
    }
}
