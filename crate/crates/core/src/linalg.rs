//! Dense complex matrices for small dimensions.
//!
//! Everything in the crate is expressed through [`ComplexMatrix`]: states,
//! measurement elements, Kraus operators and scores. Matrices are stored
//! row-major. The Kronecker product puts the first factor on the slow
//! (outer) index, so entry `(i*db + k, j*db + l)` of `a ⊗ b` equals
//! `a[(i, j)] * b[(k, l)]`; [`ComplexMatrix::partial_trace`] and the
//! process tomography reshaping rely on that layout.
//!
//! Hermitian eigendecomposition uses cyclic complex Jacobi rotations, which
//! are accurate to working precision on the dimensions used here (d ≤ 64)
//! and produce small eigenvalues with absolute (not relative) error.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Max-norm tolerance on `m - m*` for a matrix to count as Hermitian.
pub const TOL_HERM: f64 = 1e-10;
/// Lower bound on the spectrum for a matrix to count as positive semidefinite.
pub const TOL_PSD: f64 = 1e-10;
/// Eigenvalues closer than this are treated as one degenerate eigenspace.
pub const TOL_DEGENERATE: f64 = 1e-8;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Which factor of a bipartite system to keep in [`ComplexMatrix::partial_trace`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = Self::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting NaN/Inf.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidArgument("ragged matrix rows".into()));
        }
        Self::from_vec(n, m, rows.concat())
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| c(x, 0.0)).collect())
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        Self::diag(&values.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>())
    }

    /// Column vector `v` as a `len × 1` matrix.
    pub fn column(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Outer product `|a⟩⟨b|`.
    pub fn outer(a: &[Complex64], b: &[Complex64]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                m[(i, j)] = x * y.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> Result<usize> {
        self.require_square()?;
        Ok(self.rows)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn from_columns(cols: &[Vec<Complex64>]) -> Result<Self> {
        let n = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(n, cols.len());
        for (j, col) in cols.iter().enumerate() {
            if col.len() != n {
                return Err(Error::InvalidArgument("ragged matrix columns".into()));
            }
            for (i, &z) in col.iter().enumerate() {
                m[(i, j)] = z;
            }
        }
        Ok(m)
    }

    fn require_square(&self) -> Result<()> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    pub fn require_dim(&self, d: usize) -> Result<()> {
        self.require_square()?;
        if self.rows != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: self.rows,
            });
        }
        Ok(())
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn trace(&self) -> Result<Complex64> {
        self.require_square()?;
        Ok((0..self.rows).map(|i| self[(i, i)]).sum())
    }

    /// `trace(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        Ok(acc)
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c(s, 0.0))
    }

    /// `a b - b a`
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(&self.matmul(other)? - &other.matmul(self)?)
    }

    /// Jordan product `½(ab + ba)`.
    pub fn jordan(&self, other: &Self) -> Result<Self> {
        Ok((&self.matmul(other)? + &other.matmul(self)?).scale_real(0.5))
    }

    /// `a · b · a*`
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        u.matmul(self)?.matmul(&u.adjoint())
    }

    /// Kronecker product, first factor outer.
    pub fn tensor(&self, other: &Self) -> Self {
        let (ra, ca, rb, cb) = (self.rows, self.cols, other.rows, other.cols);
        let mut m = Self::zeros(ra * rb, ca * cb);
        for i in 0..ra {
            for j in 0..ca {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..rb {
                    for l in 0..cb {
                        m[(i * rb + k, j * cb + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    /// Reduced matrix on one factor of a `dims.0 ⊗ dims.1` system:
    /// keeping the first factor gives `(ρ₁)_{ij} = Σ_k ρ_{ik,jk}`.
    pub fn partial_trace(&self, dims: (usize, usize), keep: Subsystem) -> Result<Self> {
        let (da, db) = dims;
        if da == 0 || db == 0 {
            return Err(Error::InvalidArgument("subsystem dimensions must be positive".into()));
        }
        self.require_dim(da * db)?;
        let out = match keep {
            Subsystem::First => {
                let mut m = Self::zeros(da, da);
                for i in 0..da {
                    for j in 0..da {
                        m[(i, j)] = (0..db).map(|k| self[(i * db + k, j * db + k)]).sum();
                    }
                }
                m
            }
            Subsystem::Second => {
                let mut m = Self::zeros(db, db);
                for k in 0..db {
                    for l in 0..db {
                        m[(k, l)] = (0..da).map(|i| self[(i * db + k, i * db + l)]).sum();
                    }
                }
                m
            }
        };
        Ok(out)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-norm distance between two matrices of equal shape.
    pub fn max_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `½(m + m*)`
    pub fn hermitian_part(&self) -> Self {
        (self + &self.adjoint()).scale_real(0.5)
    }

    /// Max-norm of `U*U - 1`.
    pub fn unitarity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        match self.adjoint().matmul(self) {
            Ok(p) => p.max_diff(&Self::identity(self.rows)),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn require_hermitian(&self) -> Result<()> {
        self.require_square()?;
        let err = self.hermiticity_error();
        if err > TOL_HERM {
            return Err(Error::NotHermitian(err));
        }
        Ok(())
    }

    /// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
    pub fn eig_hermitian(&self) -> Result<HermitianEig> {
        self.require_hermitian()?;
        Ok(jacobi_eigen(&self.hermitian_part()))
    }

    /// `Σ f(λ_k) |v_k⟩⟨v_k|` over the spectrum of a Hermitian matrix.
    pub fn func_hermitian<F, T>(&self, f: F) -> Result<Self>
    where
        F: Fn(f64) -> T,
        T: Into<Complex64>,
    {
        self.eig_hermitian()?.map_spectrum(f)
    }

    /// Principal square root of a PSD matrix. Eigenvalues in `[-TOL_PSD, 0)`
    /// are clamped to zero.
    pub fn sqrt_psd(&self) -> Result<Self> {
        let eig = self.eig_hermitian()?;
        if let Some(&lo) = eig.values.first() {
            if lo < -TOL_PSD {
                return Err(Error::Domain(lo));
            }
        }
        eig.map_spectrum(|x| x.max(0.0).sqrt())
    }

    /// `exp(z · H)` for Hermitian `H` and any complex `z`.
    pub fn exp_hermitian(&self, z: Complex64) -> Result<Self> {
        self.func_hermitian(|x| (z * x).exp())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig_hermitian()?.values.first().copied().unwrap_or(0.0))
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(TOL_HERM) && self.min_eigenvalue().is_ok_and(|lo| lo >= -tol)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

fn zip_with(a: &ComplexMatrix, b: &ComplexMatrix, op: impl Fn(Complex64, Complex64) -> Complex64) -> ComplexMatrix {
    assert_eq!(
        (a.rows, a.cols),
        (b.rows, b.cols),
        "elementwise operation on matrices of different shape"
    );
    ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| op(x, y)).collect(),
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (x, y) in self.data.iter_mut().zip(&rhs.data) {
            *x += y;
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for a checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// `vectors` holds orthonormal eigenvectors as columns, in the order of
/// `values` (ascending). Within a numerically degenerate eigenspace the
/// basis is canonical: it is obtained by projecting the standard basis
/// vectors onto the eigenspace and orthonormalizing greedily, so the output
/// does not depend on how the solver happened to rotate inside that space.
/// Each column is phased so that its first largest-modulus component is
/// real and positive.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.col(k)
    }

    pub fn map_spectrum<F, T>(&self, f: F) -> Result<ComplexMatrix>
    where
        F: Fn(f64) -> T,
        T: Into<Complex64>,
    {
        let d = self.dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for (k, &lam) in self.values.iter().enumerate() {
            let fk: Complex64 = f(lam).into();
            if !fk.re.is_finite() || !fk.im.is_finite() {
                return Err(Error::Domain(lam));
            }
            if fk == ZERO {
                continue;
            }
            let v = self.vector(k);
            for i in 0..d {
                let vi = v[i] * fk;
                for j in 0..d {
                    out[(i, j)] += vi * v[j].conj();
                }
            }
        }
        Ok(out)
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| x).expect("finite spectrum")
    }

    /// Groups of column indices whose eigenvalues agree within [`TOL_DEGENERATE`].
    pub fn clusters(&self, tol: f64) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=self.values.len() {
            if k == self.values.len() || self.values[k] - self.values[k - 1] > tol {
                out.push(start..k);
                start = k;
            }
        }
        out
    }
}

fn jacobi_eigen(a: &ComplexMatrix) -> HermitianEig {
    let n = a.rows;
    let mut a = a.clone();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm();

    if scale > 0.0 {
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
                .map(|(p, q)| a[(p, q)].norm_sqr())
                .sum::<f64>()
                .sqrt();
            if off <= 1e-17 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]).then(i.cmp(&j)));

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let columns: Vec<Vec<Complex64>> = order.iter().map(|&i| v.col(i)).collect();
    let mut eig = HermitianEig {
        values,
        vectors: ComplexMatrix::from_columns(&columns).expect("square eigenvector matrix"),
    };
    canonicalize(&mut eig);
    eig
}

/// One complex Jacobi rotation zeroing `a[(p, q)]`; accumulates into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;

    // R = diag(1, e^{-iφ}) · [[c, s], [-s, c]] restricted to (p, q)
    let rpp = c(cs, 0.0);
    let rpq = c(sn, 0.0);
    let rqp = -phase.conj() * sn;
    let rqq = phase.conj() * cs;

    let n = a.rows;
    for k in 0..n {
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = akp * rpp + akq * rqp;
        a[(k, q)] = akp * rpq + akq * rqq;
    }
    for k in 0..n {
        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = rpp.conj() * apk + rqp.conj() * aqk;
        a[(q, k)] = rpq.conj() * apk + rqq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = c(a[(p, p)].re, 0.0);
    a[(q, q)] = c(a[(q, q)].re, 0.0);

    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = vkp * rpp + vkq * rqp;
        v[(k, q)] = vkp * rpq + vkq * rqq;
    }
}

fn canonicalize(eig: &mut HermitianEig) {
    let n = eig.dim();
    let scale = eig.values.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    for range in eig.clusters(TOL_DEGENERATE * scale) {
        let mut basis: Vec<Vec<Complex64>> = if range.len() == 1 {
            vec![eig.vectors.col(range.start)]
        } else {
            let span: Vec<Vec<Complex64>> = range.clone().map(|k| eig.vectors.col(k)).collect();
            canonical_subspace_basis(&span, n)
        };
        for v in basis.iter_mut() {
            fix_phase(v);
        }
        if range.len() > 1 {
            basis.sort_by_key(|v| pivot_index(v));
            let mean = range.clone().map(|k| eig.values[k]).sum::<f64>() / range.len() as f64;
            for k in range.clone() {
                eig.values[k] = mean;
            }
        }
        for (k, v) in range.zip(basis) {
            for (i, z) in v.into_iter().enumerate() {
                eig.vectors[(i, k)] = z;
            }
        }
    }
}

/// Orthonormal basis of `span(vs)` built from projections of e_0, e_1, ...
fn canonical_subspace_basis(vs: &[Vec<Complex64>], n: usize) -> Vec<Vec<Complex64>> {
    let r = vs.len();
    let project = |e: usize| -> Vec<Complex64> {
        let mut out = vec![ZERO; n];
        for v in vs {
            let coeff = v[e].conj();
            for (o, x) in out.iter_mut().zip(v) {
                *o += coeff * x;
            }
        }
        out
    };
    let candidates: Vec<Vec<Complex64>> = (0..n).map(project).collect();
    let mut chosen: Vec<Vec<Complex64>> = Vec::with_capacity(r);
    let mut used = vec![false; n];
    while chosen.len() < r {
        let mut best: Option<(usize, Vec<Complex64>, f64)> = None;
        for (e, cand) in candidates.iter().enumerate() {
            if used[e] {
                continue;
            }
            let mut w = cand.clone();
            for _ in 0..2 {
                for u in &chosen {
                    let ov: Complex64 = u.iter().zip(&w).map(|(a, b)| a.conj() * b).sum();
                    for (wi, ui) in w.iter_mut().zip(u) {
                        *wi -= ov * ui;
                    }
                }
            }
            let nrm = norm(&w);
            if best.as_ref().is_none_or(|(_, _, bn)| nrm > bn + 1e-9) {
                best = Some((e, w, nrm));
            }
        }
        let (e, mut w, nrm) = best.expect("eigenspace has a candidate");
        used[e] = true;
        for x in w.iter_mut() {
            *x /= nrm;
        }
        chosen.push(w);
    }
    chosen
}

fn pivot_index(v: &[Complex64]) -> usize {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    v.iter().position(|z| z.norm() >= max - 1e-12).unwrap_or(0)
}

fn fix_phase(v: &mut [Complex64]) {
    let k = pivot_index(v);
    let z = v[k];
    if z.norm() > 0.0 {
        let ph = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `⟨a|b⟩`, antilinear in the first argument.
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn kron_vec(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// The Pauli matrices.
pub mod pauli {
    use super::{c, ComplexMatrix};

    pub fn identity() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_vec(2, 2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    /// `(σ_x, σ_y, σ_z)`
    pub fn all() -> [ComplexMatrix; 3] {
        [x(), y(), z()]
    }

    /// `u · σ`
    pub fn dot(u: [f64; 3]) -> ComplexMatrix {
        let [sx, sy, sz] = all();
        let mut m = sx.scale_real(u[0]);
        m += &sy.scale_real(u[1]);
        m += &sz.scale_real(u[2]);
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn seeded_matrix(n: usize, seed: u64) -> ComplexMatrix {
        // small LCG, independent of the crate's sampling code
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let data = (0..n * n).map(|_| c(next(), next())).collect();
        ComplexMatrix::from_vec(n, n, data).unwrap()
    }

    fn seeded_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        seeded_matrix(n, seed).hermitian_part()
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(pauli::y().adjoint(), pauli::y());
        assert_eq!(ComplexMatrix::identity(3).adjoint(), ComplexMatrix::identity(3));
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        let expected = ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(m.adjoint(), expected);
        let r = seeded_matrix(4, 1);
        assert_eq!(r.adjoint().adjoint(), r);
    }

    #[test]
    fn trace_examples() {
        assert_eq!(ComplexMatrix::identity(2).trace().unwrap(), c(2.0, 0.0));
        assert_eq!(pauli::z().trace().unwrap(), ZERO);
        let a = seeded_matrix(3, 2);
        let b = seeded_matrix(3, 3);
        let ab = a.matmul(&b).unwrap().trace().unwrap();
        let ba = b.matmul(&a).unwrap().trace().unwrap();
        assert!((ab - ba).norm() < 1e-14);
        assert!((a.trace_product(&b).unwrap() - ab).norm() < 1e-14);
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(rect.trace(), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn tensor_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.tensor(&i2), ComplexMatrix::identity(4));
        let zi = pauli::z().tensor(&i2);
        let diag: Vec<f64> = (0..4).map(|i| zi[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, -1.0, -1.0]);
        let a = seeded_matrix(2, 4);
        let b = seeded_matrix(2, 5);
        let lhs = a.tensor(&b).trace().unwrap();
        let rhs = a.trace().unwrap() * b.trace().unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn partial_trace_examples() {
        let i4 = ComplexMatrix::identity(4);
        assert_eq!(
            i4.partial_trace((2, 2), Subsystem::First).unwrap(),
            ComplexMatrix::identity(2).scale_real(2.0)
        );
        let a = seeded_matrix(2, 6);
        let b = seeded_matrix(3, 7);
        let ab = a.tensor(&b);
        let keep_first = ab.partial_trace((2, 3), Subsystem::First).unwrap();
        let keep_second = ab.partial_trace((2, 3), Subsystem::Second).unwrap();
        assert!(keep_first.max_diff(&a.scale(b.trace().unwrap())) < 1e-14);
        assert!(keep_second.max_diff(&b.scale(a.trace().unwrap())) < 1e-14);
        assert!(matches!(
            i4.partial_trace((2, 3), Subsystem::First),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn eig_examples() {
        let e = pauli::x().eig_hermitian().unwrap();
        assert_abs_diff_eq!(e.values[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e.values[1], 1.0, epsilon = 1e-15);

        let e = ComplexMatrix::identity(3).eig_hermitian().unwrap();
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);
        assert_eq!(e.vectors, ComplexMatrix::identity(3));

        let e = ComplexMatrix::diag_real(&[3.0, 1.0, 2.0]).eig_hermitian().unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
        let perm = ComplexMatrix::from_real(3, 3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(e.vectors, perm);

        let not_herm = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(not_herm.eig_hermitian(), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eig_reconstruction_and_orthonormality() {
        for (n, seed) in [(2, 10), (3, 11), (5, 12), (8, 13), (16, 14)] {
            let m = seeded_hermitian(n, seed);
            let e = m.eig_hermitian().unwrap();
            assert!(e.reconstruct().max_diff(&m) <= 1e-10);
            let gram = e.vectors.adjoint().matmul(&e.vectors).unwrap();
            assert!(gram.max_diff(&ComplexMatrix::identity(n)) <= 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn degenerate_eigenspaces_are_canonical() {
        // the same projector built from two frames that differ by a rotation
        // inside the eigenspace
        let u = seeded_hermitian(4, 20).exp_hermitian(I).unwrap();
        let q = seeded_hermitian(2, 21).exp_hermitian(I).unwrap();
        let mut block = ComplexMatrix::identity(4);
        for i in 0..2 {
            for j in 0..2 {
                block[(i, j)] = q[(i, j)];
            }
        }
        let u2 = u.matmul(&block).unwrap();
        let d = ComplexMatrix::diag_real(&[1.0, 1.0, 0.0, 0.0]);
        let p1 = d.conjugate_by(&u).unwrap();
        let p2 = d.conjugate_by(&u2).unwrap();
        assert!(p1.max_diff(&p2) < 1e-13);
        let e1 = p1.eig_hermitian().unwrap();
        let e2 = p2.eig_hermitian().unwrap();
        assert!(e1.vectors.max_diff(&e2.vectors) < 1e-10);
        assert!(e1.reconstruct().max_diff(&p1) < 1e-10);
    }

    #[test]
    fn func_examples() {
        let e = std::f64::consts::E;
        let ez = pauli::z().func_hermitian(f64::exp).unwrap();
        assert!(ez.max_diff(&ComplexMatrix::diag_real(&[e, 1.0 / e])) < 1e-14);

        let sq = pauli::x().func_hermitian(|x| x * x).unwrap();
        assert!(sq.max_diff(&ComplexMatrix::identity(2)) < 1e-14);

        let a = seeded_matrix(4, 30);
        let psd = a.matmul(&a.adjoint()).unwrap();
        let root = psd.sqrt_psd().unwrap();
        assert!(root.matmul(&root).unwrap().max_diff(&psd) < 1e-10);

        let neg = ComplexMatrix::diag_real(&[-1.0, 1.0]);
        assert!(matches!(neg.sqrt_psd(), Err(Error::Domain(_))));
        assert!(matches!(neg.func_hermitian(f64::sqrt), Err(Error::Domain(_))));
    }

    #[test]
    fn pauli_algebra() {
        let [x, y, z] = pauli::all();
        let two_i = c(0.0, 2.0);
        assert_eq!(x.commutator(&y).unwrap(), z.scale(two_i));
        assert_eq!(y.commutator(&z).unwrap(), x.scale(two_i));
        assert_eq!(z.commutator(&x).unwrap(), y.scale(two_i));
        for s in [&x, &y, &z] {
            assert_eq!(s.matmul(s).unwrap(), ComplexMatrix::identity(2));
        }
    }

    #[test]
    fn commutator_and_jordan_symmetry() {
        let a = seeded_hermitian(4, 40);
        let b = seeded_hermitian(4, 41);
        let comm = a.commutator(&b).unwrap();
        assert!((&comm + &comm.adjoint()).max_abs() <= 1e-12);
        assert!(a.jordan(&b).unwrap().hermiticity_error() <= 1e-12);
    }

    #[test]
    fn non_finite_entries_rejected() {
        assert_eq!(
            ComplexMatrix::from_vec(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        );
    }
}
