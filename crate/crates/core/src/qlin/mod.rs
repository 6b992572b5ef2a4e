//! Dense complex linear algebra for exact small-system simulation.
//!
//! Matrices are row-major. Subsystem index 0 is the leftmost tensor factor,
//! so for a register with dimensions `[d0, d1, ..., dm]` the basis index is
//! `i0 * (d1 * ... * dm) + ... + im`.

mod eigen;

use std::fmt;
use std::ops::{Index, IndexMut};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use eigen::{hermitian_eigen, hermitian_eigenvalues, psd_sqrt, singular_values, HermitianEigen};

/// Largest row or column count any matrix (and any amplitude vector) may have.
pub const MAX_DIM: usize = 1 << 14;

/// Default tolerance for [`density_check`].
pub const DENSITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![Complex::new(T::zero(), T::zero()); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Builds a matrix from row-major entries, rejecting bad lengths and non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if rows > MAX_DIM || cols > MAX_DIM {
            return Err(Error::TooLarge {
                what: "matrix dimension",
                value: rows.max(cols),
                limit: MAX_DIM,
            });
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { rows, cols, data })
    }

    /// Real-valued matrix from nested rows; convenient for hand-written fixtures.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex::new(T::lit(x), T::zero())))
            .collect();
        Self::from_vec(rows.len(), cols, data)
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    /// `|a⟩⟨b|`.
    pub fn outer(a: &[Complex<T>], b: &[Complex<T>]) -> Self {
        let mut m = Self::zeros(a.len(), b.len());
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                m.data[i * b.len() + j] = x * y.conj();
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

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Matrix product. Panics on incompatible shapes.
    pub fn dot(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "incompatible shapes for product");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d = *d + a * b;
                }
            }
        }
        out
    }

    /// `u · self · u†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.dot(self).dot(&u.dagger())
    }

    pub fn scale(&self, factor: T) -> Self {
        self.map(|z| z * factor)
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// Entrywise sum. Panics on shape mismatch.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    /// Largest entrywise modulus of `self - other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return T::infinity();
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }

    /// Largest `|m_ij - conj(m_ji)|`.
    pub fn hermiticity_error(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Casts every entry into another scalar type.
    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::lit(z.re.to_f64().unwrap()), U::lit(z.im.to_f64().unwrap())))
                .collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;

    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor_product<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let rows = checked_dim(a.rows, b.rows)?;
    let cols = checked_dim(a.cols, b.cols)?;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let x = a[(i, j)];
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = x * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

fn checked_dim(x: usize, y: usize) -> Result<usize> {
    match x.checked_mul(y) {
        Some(d) if d <= MAX_DIM => Ok(d),
        _ => Err(Error::TooLarge {
            what: "tensor product dimension",
            value: x.saturating_mul(y),
            limit: MAX_DIM,
        }),
    }
}

pub fn dagger<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    m.dagger()
}

/// Basis-index offsets contributed by every joint configuration of `subset`,
/// in row-major order over `subset` (first listed subsystem most significant).
fn subsystem_offsets(dims: &[usize], subset: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for s in (0..dims.len().saturating_sub(1)).rev() {
        strides[s] = strides[s + 1] * dims[s + 1];
    }
    let mut offsets = vec![0usize];
    for &s in subset {
        let (dim, stride) = (dims[s], strides[s]);
        offsets = offsets
            .iter()
            .flat_map(|&base| (0..dim).map(move |d| base + d * stride))
            .collect();
    }
    offsets
}

/// Validates `keep` against `dims` and splits the register into sorted kept and traced lists.
fn split_subsystems(dims: &[usize], keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if dims.contains(&0) {
        return Err(Error::DimensionMismatch("subsystem dimension 0".into()));
    }
    let mut kept = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    if kept.len() != keep.len() {
        return Err(Error::DimensionMismatch(format!(
            "duplicate subsystem in keep set {keep:?}"
        )));
    }
    if let Some(&bad) = kept.iter().find(|&&s| s >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "subsystem {bad} out of range for {} subsystems",
            dims.len()
        )));
    }
    let traced = (0..dims.len()).filter(|s| kept.binary_search(s).is_err()).collect();
    Ok((kept, traced))
}

fn total_dim(dims: &[usize]) -> Result<usize> {
    dims.iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or(Error::TooLarge {
            what: "register dimension",
            value: usize::MAX,
            limit: MAX_DIM,
        })
}

/// Traces out every subsystem not listed in `keep`.
///
/// Kept subsystems appear in ascending index order in the result regardless
/// of the order of `keep`. An empty `keep` returns the 1x1 trace.
pub fn partial_trace<T: Real>(rho: &ComplexMatrix<T>, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix<T>> {
    if !rho.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} is not square",
            rho.rows, rho.cols
        )));
    }
    let total = total_dim(dims)?;
    if total != rho.rows {
        return Err(Error::DimensionMismatch(format!(
            "subsystem dimensions {dims:?} multiply to {total}, matrix is {}x{}",
            rho.rows, rho.cols
        )));
    }
    let (kept, traced) = split_subsystems(dims, keep)?;
    let ko = subsystem_offsets(dims, &kept);
    let to = subsystem_offsets(dims, &traced);
    let mut out = ComplexMatrix::zeros(ko.len(), ko.len());
    for (i, &oi) in ko.iter().enumerate() {
        for (j, &oj) in ko.iter().enumerate() {
            out[(i, j)] = to
                .iter()
                .map(|&e| rho[(oi + e, oj + e)])
                .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z);
        }
    }
    Ok(out)
}

/// Pure state over `num_qubits` qubits followed by an optional ancilla of
/// dimension `ancilla_dim` (the least significant tensor factor).
#[derive(Debug, Clone, PartialEq)]
pub struct PureState<T> {
    num_qubits: usize,
    ancilla_dim: usize,
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> PureState<T> {
    pub fn new(num_qubits: usize, ancilla_dim: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if ancilla_dim == 0 {
            return Err(Error::DimensionMismatch("ancilla dimension must be positive".into()));
        }
        let expected = 1usize
            .checked_shl(num_qubits as u32)
            .and_then(|d| d.checked_mul(ancilla_dim))
            .filter(|&d| d <= MAX_DIM)
            .ok_or(Error::TooLarge {
                what: "amplitude vector length",
                value: usize::MAX,
                limit: MAX_DIM,
            })?;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {num_qubits} qubits with ancilla dimension {ancilla_dim}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("amplitudes"));
        }
        Ok(Self {
            num_qubits,
            ancilla_dim,
            amplitudes,
        })
    }

    /// Qubit-only state from real amplitudes.
    pub fn from_real(num_qubits: usize, amplitudes: &[T]) -> Result<Self> {
        Self::new(
            num_qubits,
            1,
            amplitudes.iter().map(|&a| Complex::new(a, T::zero())).collect(),
        )
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << num_qubits];
        if index >= amps.len() {
            return Err(Error::DimensionMismatch(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        amps[index] = Complex::new(T::one(), T::zero());
        Self::new(num_qubits, 1, amps)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == T::zero() {
            return Err(Error::DimensionMismatch("cannot normalize the zero vector".into()));
        }
        for z in &mut self.amplitudes {
            *z = *z / n;
        }
        Ok(())
    }

    pub fn normalized(&self) -> Result<Self> {
        let mut s = self.clone();
        s.normalize()?;
        Ok(s)
    }

    /// Subsystem dimensions: one 2 per qubit, then the ancilla when present.
    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![2; self.num_qubits];
        if self.ancilla_dim > 1 {
            d.push(self.ancilla_dim);
        }
        d
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix<T> {
        ComplexMatrix::outer(&self.amplitudes, &self.amplitudes)
    }

    /// Reduced density matrix over `keep`, computed directly from the amplitudes
    /// without forming the full projector.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<ComplexMatrix<T>> {
        let dims = self.dims();
        let (kept, traced) = split_subsystems(&dims, keep)?;
        let ko = subsystem_offsets(&dims, &kept);
        let to = subsystem_offsets(&dims, &traced);
        let mut out = ComplexMatrix::zeros(ko.len(), ko.len());
        for (i, &oi) in ko.iter().enumerate() {
            for (j, &oj) in ko.iter().enumerate().skip(i) {
                let z = to
                    .iter()
                    .map(|&e| self.amplitudes[oi + e] * self.amplitudes[oj + e].conj())
                    .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z);
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        Ok(out)
    }

    /// Largest amplitude-wise modulus difference; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.amplitudes.len() != other.amplitudes.len() || self.ancilla_dim != other.ancilla_dim {
            return T::infinity();
        }
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max)
    }
}

/// Which density-matrix condition failed, with the offending magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DensityFailure<T> {
    NotSquare { rows: usize, cols: usize },
    Hermiticity(T),
    Trace(T),
    Positivity(T),
}

impl<T: Real> DensityFailure<T> {
    /// Short name of the failed check: "shape", "hermiticity", "trace" or "positivity".
    pub fn check(&self) -> &'static str {
        match self {
            DensityFailure::NotSquare { .. } => "shape",
            DensityFailure::Hermiticity(_) => "hermiticity",
            DensityFailure::Trace(_) => "trace",
            DensityFailure::Positivity(_) => "positivity",
        }
    }
}

impl<T: Real> fmt::Display for DensityFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DensityFailure::NotSquare { rows, cols } => {
                write!(f, "shape: {rows}x{cols} is not square")
            }
            DensityFailure::Hermiticity(d) => {
                write!(f, "hermiticity: max |m_ij - conj(m_ji)| = {d:e}")
            }
            DensityFailure::Trace(d) => write!(f, "trace: |tr - 1| = {d:e}"),
            DensityFailure::Positivity(e) => write!(f, "positivity: minimum eigenvalue {e:e}"),
        }
    }
}

/// Outcome of [`density_check`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport<T> {
    pub hermiticity_error: T,
    pub trace_error: T,
    /// `None` when the spectrum was not computed (non-square or non-Hermitian input).
    pub min_eigenvalue: Option<T>,
    /// First failed check, in the order shape, hermiticity, trace, positivity.
    pub failure: Option<DensityFailure<T>>,
}

impl<T: Real> DensityReport<T> {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks Hermiticity, unit trace and positive semidefiniteness within `tol`.
pub fn density_check<T: Real>(m: &ComplexMatrix<T>, tol: T) -> DensityReport<T> {
    if !m.is_square() {
        return DensityReport {
            hermiticity_error: T::infinity(),
            trace_error: T::infinity(),
            min_eigenvalue: None,
            failure: Some(DensityFailure::NotSquare {
                rows: m.rows,
                cols: m.cols,
            }),
        };
    }
    let herm = m.hermiticity_error();
    let tr = m.trace();
    let trace_error = (tr - Complex::new(T::one(), T::zero())).norm();
    let mut report = DensityReport {
        hermiticity_error: herm,
        trace_error,
        min_eigenvalue: None,
        failure: None,
    };
    if herm > tol {
        report.failure = Some(DensityFailure::Hermiticity(herm));
        return report;
    }
    let min_eig = hermitian_eigenvalues(m)
        .map(|v| v.into_iter().fold(T::infinity(), T::min))
        .unwrap_or(T::nan());
    report.min_eigenvalue = Some(min_eig);
    if trace_error > tol {
        report.failure = Some(DensityFailure::Trace(trace_error));
    } else if min_eig.is_nan() || min_eig < -tol {
        report.failure = Some(DensityFailure::Positivity(min_eig));
    }
    report
}

pub fn is_density_matrix<T: Real>(m: &ComplexMatrix<T>, tol: T) -> bool {
    density_check(m, tol).is_valid()
}

#[cfg(test)]
mod tests;
