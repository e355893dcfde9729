use num_complex::Complex64;

use super::{prob, Povm};
use crate::error::{Error, Result};
use crate::linalg::{inner, norm, ComplexMatrix, ZERO};
use crate::states::{DensityMatrix, StateVector};

/// Realisation of a measurement as a projective measurement on `H ⊗ K`
/// with the ancilla `K` prepared in `ancilla_state`.
#[derive(Debug, Clone)]
pub struct Dilation {
    pub ancilla_dim: usize,
    pub ancilla_state: DensityMatrix,
    pub unitary: ComplexMatrix,
    pub projective: Povm,
}

impl Dilation {
    /// Outcome law of the projective measurement on `ρ ⊗ ρ_a`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        prob(&rho.tensor(&self.ancilla_state), &self.projective)
    }

    /// Largest `|trace(ρ m(x)) − trace((ρ⊗ρ_a) m̃(x))|` over outcomes and states.
    pub fn reproduction_residual(&self, original: &Povm, states: &[DensityMatrix]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for rho in states {
            let p = prob(rho, original)?;
            let q = self.probabilities(rho)?;
            for (a, b) in p.iter().zip(&q) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst)
    }
}

/// Naimark–Holevo realisation of `m`.
///
/// With `n` outcomes the ancilla is `C^n` in `|0⟩`. The isometry
/// `Vψ = Σ_x (√m(x) ψ) ⊗ |x⟩` fills the columns of `U` indexed `(j, 0)`;
/// the rest are completed by Gram–Schmidt over the standard basis, taken in
/// order. The projective elements are `U* (1 ⊗ |x⟩⟨x|) U`.
pub fn naimark_dilate(m: &Povm) -> Result<Dilation> {
    let d = m.dim();
    let n = m.len();
    let big = d * n;

    let roots = m
        .elements()
        .iter()
        .map(ComplexMatrix::sqrt_psd)
        .collect::<Result<Vec<_>>>()?;

    let mut columns: Vec<Option<Vec<Complex64>>> = vec![None; big];
    for j in 0..d {
        let mut col = vec![ZERO; big];
        for (x, root) in roots.iter().enumerate() {
            for i in 0..d {
                col[i * n + x] = root[(i, j)];
            }
        }
        columns[j * n] = Some(col);
    }

    let mut basis: Vec<Vec<Complex64>> = columns.iter().flatten().cloned().collect();
    let threshold = 0.5 / (big as f64).sqrt();
    let mut fill = Vec::with_capacity(big - d);
    for e in 0..big {
        if basis.len() == big {
            break;
        }
        let mut w = vec![ZERO; big];
        w[e] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for u in &basis {
                let ov = inner(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= ov * ui;
                }
            }
        }
        let nrm = norm(&w);
        if nrm >= threshold {
            for wi in w.iter_mut() {
                *wi /= nrm;
            }
            basis.push(w.clone());
            fill.push(w);
        }
    }
    if basis.len() != big {
        return Err(Error::Numerical("unitary completion of the dilation isometry failed".into()));
    }

    let mut fill = fill.into_iter();
    let cols: Vec<Vec<Complex64>> = columns
        .into_iter()
        .map(|c| c.unwrap_or_else(|| fill.next().expect("completion count")))
        .collect();
    let unitary = ComplexMatrix::from_columns(&cols)?;
    let err = unitary.unitarity_error();
    if err > 1e-10 {
        return Err(Error::Numerical(format!("dilation unitary deviates from unitarity by {err:e}")));
    }

    let u_adj = unitary.adjoint();
    let elements = (0..n)
        .map(|x| {
            let mut ket = vec![ZERO; n];
            ket[x] = Complex64::new(1.0, 0.0);
            let proj = ComplexMatrix::identity(d).tensor(&ComplexMatrix::outer(&ket, &ket));
            u_adj.matmul(&proj)?.matmul(&unitary).map(|p| p.hermitian_part())
        })
        .collect::<Result<Vec<_>>>()?;
    let projective = Povm::new(m.labels().to_vec(), elements)?;
    let ancilla_state = crate::states::pure(&StateVector::basis(n, 0)?);

    Ok(Dilation {
        ancilla_dim: n,
        ancilla_state,
        unitary,
        projective,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurements::triad;
    use crate::random;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn panel(d: usize, rng: &mut ChaCha8Rng) -> Vec<DensityMatrix> {
        (0..10).map(|_| random::density_matrix(d, rng)).collect()
    }

    #[test]
    fn projective_input_is_reproduced_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = Povm::indexed(vec![ComplexMatrix::diag_real(&[1.0, 0.0]), ComplexMatrix::diag_real(&[0.0, 1.0])]).unwrap();
        let dil = naimark_dilate(&m).unwrap();
        assert!(dil.reproduction_residual(&m, &panel(2, &mut rng)).unwrap() <= 1e-12);
        assert!(dil.projective.is_projective(1e-12));
    }

    #[test]
    fn triad_dilation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let dil = naimark_dilate(&triad()).unwrap();
        assert_eq!(dil.ancilla_dim, 3);
        assert_eq!(dil.unitary.rows(), 6);
        assert_eq!(dil.projective.len(), 3);
        assert!(dil.projective.is_projective(1e-10));
        assert!(dil.reproduction_residual(&triad(), &panel(2, &mut rng)).unwrap() <= 1e-10);
    }

    #[test]
    fn random_povm_dilation() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [2, 3] {
            for _ in 0..5 {
                let m = random::povm(d, 4, &mut rng);
                let dil = naimark_dilate(&m).unwrap();
                assert!(dil.unitary.unitarity_error() <= 1e-10);
                assert!(dil.projective.is_projective(1e-10));
                let states = panel(d, &mut rng);
                assert!(dil.reproduction_residual(&m, &states).unwrap() <= 1e-10);
            }
        }
    }

    #[test]
    fn dilation_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = random::povm(2, 3, &mut rng);
        assert_eq!(naimark_dilate(&m).unwrap().unitary, naimark_dilate(&m).unwrap().unitary);
    }
}
