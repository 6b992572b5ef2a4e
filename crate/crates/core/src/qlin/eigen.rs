//! Cyclic Jacobi routines: Hermitian eigendecomposition and one-sided SVD.

use num_complex::Complex;

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order; `vectors` holds the matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    pub values: Vec<T>,
    pub vectors: ComplexMatrix<T>,
}

/// Unitary 2x2 rotation `[[c, s·e^{iφ}], [-s·e^{-iφ}, c]]` that zeroes the
/// off-diagonal entry `g` of the Hermitian block `[[a, g], [g*, b]]`.
#[derive(Clone, Copy)]
struct Rotation<T> {
    c: T,
    s_phase: Complex<T>,
}

impl<T: Real> Rotation<T> {
    fn new(a: T, b: T, g: Complex<T>) -> Self {
        let mag = g.norm();
        let phase = g / mag;
        let tau = (b - a) / (mag + mag);
        let t = if tau >= T::zero() {
            T::one() / (tau + (T::one() + tau * tau).sqrt())
        } else {
            -T::one() / (-tau + (T::one() + tau * tau).sqrt())
        };
        let c = T::one() / (T::one() + t * t).sqrt();
        Self {
            c,
            s_phase: phase * (t * c),
        }
    }

    /// `m ← m·J` on columns `p`, `q`.
    fn apply_right(&self, m: &mut ComplexMatrix<T>, p: usize, q: usize) {
        for k in 0..m.rows() {
            let (mp, mq) = (m[(k, p)], m[(k, q)]);
            m[(k, p)] = mp * self.c - mq * self.s_phase.conj();
            m[(k, q)] = mp * self.s_phase + mq * self.c;
        }
    }

    /// `m ← J†·m` on rows `p`, `q`.
    fn apply_left_adjoint(&self, m: &mut ComplexMatrix<T>, p: usize, q: usize) {
        for k in 0..m.cols() {
            let (mp, mq) = (m[(p, k)], m[(q, k)]);
            m[(p, k)] = mp * self.c - mq * self.s_phase;
            m[(q, k)] = mp * self.s_phase.conj() + mq * self.c;
        }
    }
}

/// Eigendecomposition of the Hermitian part `(m + m†)/2` of a square matrix.
pub fn hermitian_eigen<T: Real>(m: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let half = T::lit(0.5);
    let mut a = m.add(&m.dagger()).scale(half);
    let mut v = ComplexMatrix::identity(n);
    let frob_sq: T = a.as_slice().iter().map(|z| z.norm_sqr()).sum();
    let threshold = T::epsilon() * T::epsilon() * frob_sq;

    for _ in 0..MAX_SWEEPS {
        let off: T = (0..n)
            .flat_map(|p| (p + 1..n).map(move |q| (p, q)))
            .map(|(p, q)| a[(p, q)].norm_sqr())
            .sum();
        if off <= threshold || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let g = a[(p, q)];
                if g.norm() <= T::min_positive_value() {
                    continue;
                }
                let rot = Rotation::new(a[(p, p)].re, a[(q, q)].re, g);
                rot.apply_right(&mut a, p, q);
                rot.apply_left_adjoint(&mut a, p, q);
                a[(p, q)] = Complex::new(T::zero(), T::zero());
                a[(q, p)] = Complex::new(T::zero(), T::zero());
                a[(p, p)].im = T::zero();
                a[(q, q)].im = T::zero();
                rot.apply_right(&mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[(row, col)] = v[(row, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Ascending eigenvalues of the Hermitian part of `m`.
pub fn hermitian_eigenvalues<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    hermitian_eigen(m).map(|e| e.values)
}

/// Principal square root of a positive semidefinite matrix; eigenvalues below
/// zero are clipped to zero.
pub fn psd_sqrt<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eigen(m)?;
    let n = m.rows();
    let roots: Vec<T> = eig.values.iter().map(|&x| x.max(T::zero()).sqrt()).collect();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = (0..n)
                .map(|k| eig.vectors[(i, k)] * eig.vectors[(j, k)].conj() * roots[k])
                .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z);
        }
    }
    Ok(out)
}

/// Singular values in descending order (one-sided Jacobi on columns).
///
/// Small singular values come out with absolute error on the order of
/// machine epsilon times the largest one, unlike square roots of the
/// eigenvalues of `m†m`.
pub fn singular_values<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    let mut a = m.clone();
    let n = a.cols();
    let col_norm_sq = |a: &ComplexMatrix<T>, j: usize| -> T { (0..a.rows()).map(|k| a[(k, j)].norm_sqr()).sum() };
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = col_norm_sq(&a, p);
                let beta = col_norm_sq(&a, q);
                let g = (0..a.rows())
                    .map(|k| a[(k, p)].conj() * a[(k, q)])
                    .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z);
                let mag = g.norm();
                if mag <= T::min_positive_value() || mag <= T::epsilon() * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                Rotation::new(alpha, beta, g).apply_right(&mut a, p, q);
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = (0..n).map(|j| col_norm_sq(&a, j).sqrt()).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}
