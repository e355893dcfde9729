//! Random operators for tests and randomized scenarios.
//!
//! All generators draw from Ginibre (i.i.d. complex Gaussian) matrices.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c, ComplexMatrix};
use crate::measurements::Povm;
use crate::states::{DensityMatrix, StateVector};
use crate::Label;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::from_vec(rows, cols, data).expect("finite gaussian entries")
}

pub fn hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    ginibre(d, d, rng).hermitian_part()
}

pub fn state_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> StateVector {
    let v: Vec<Complex64> = (0..d).map(|_| gaussian(rng)).collect();
    StateVector::normalized(v).expect("nonzero gaussian vector")
}

/// Full-rank (almost surely) state `G G* / trace`.
pub fn density_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(d, d, rng);
    DensityMatrix::from_unnormalized(g.matmul(&g.adjoint()).expect("square")).expect("valid Ginibre state")
}

/// Haar-ish unitary `exp(iH)` for a random Hermitian `H`.
pub fn unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    hermitian(d, rng)
        .scale_real(2.0)
        .exp_hermitian(c(0.0, 1.0))
        .expect("Hermitian generator")
}

/// Random isometry `V: C^d → C^{k d}` split into `k` blocks with `Σ n_i* n_i = 1`.
pub fn kraus_operators<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Vec<ComplexMatrix> {
    let g = ginibre(k * d, d, rng);
    let gram = g.adjoint().matmul(&g).expect("shape");
    let inv_sqrt = gram.func_hermitian(|x| 1.0 / x.sqrt()).expect("full-rank gram");
    let v = g.matmul(&inv_sqrt).expect("shape");
    (0..k)
        .map(|b| {
            let mut n = ComplexMatrix::zeros(d, d);
            for i in 0..d {
                for j in 0..d {
                    n[(i, j)] = v[(b * d + i, j)];
                }
            }
            n
        })
        .collect()
}

/// Random POVM with `n` outcomes labelled `0..n`, `m(x) = S^{-1/2} A_x S^{-1/2}`.
pub fn povm<R: Rng + ?Sized>(d: usize, n: usize, rng: &mut R) -> Povm {
    let parts: Vec<ComplexMatrix> = (0..n)
        .map(|_| {
            let g = ginibre(d, d, rng);
            g.matmul(&g.adjoint()).expect("square")
        })
        .collect();
    let mut total = ComplexMatrix::zeros(d, d);
    for p in &parts {
        total += p;
    }
    let inv_sqrt = total.func_hermitian(|x| 1.0 / x.sqrt()).expect("positive sum");
    let elements = parts
        .iter()
        .map(|a| a.conjugate_by(&inv_sqrt).expect("shape").hermitian_part())
        .collect();
    let labels = (0..n as i64).map(Label::Int).collect();
    Povm::new(labels, elements).expect("normalized random POVM")
}

/// Generic full-rank one-parameter model
/// `ρ(θ) = e^{−iθH} ((1−s)A + sB) e^{iθH}` with `s = (1 + sin θ)/2` and
/// random states `A`, `B`. It has no analytic derivative.
pub fn model<R: Rng + ?Sized>(d: usize, rng: &mut R) -> crate::models::ParametricModel {
    let a = density_matrix(d, rng).into_matrix();
    let b = density_matrix(d, rng).into_matrix();
    let h = hermitian(d, rng);
    crate::models::ParametricModel::new(d, 1, move |theta| {
        let t = theta[0];
        let s = 0.5 * (1.0 + t.sin());
        let mix = &a.scale_real(1.0 - s) + &b.scale_real(s);
        let u = h.exp_hermitian(c(0.0, -t))?;
        DensityMatrix::new(mix.conjugate_by(&u)?)
    })
}
