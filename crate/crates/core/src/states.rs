//! Initial states, the dual (Hadamard) basis change, and the converters from
//! physical inputs to the two channel parameters.
//!
//! Basis kets `|b1 b2 ... bn⟩` map to the integer with `b1` as the most
//! significant bit, so atom 0 is the leftmost factor.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlin::{ComplexMatrix, PureState};
use crate::scalar::{binomial, Real};

/// Measurement basis a two-qubit or single-qubit matrix is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BasisLabel {
    Computational,
    /// `{|pos⟩, |neg⟩} = {(|0⟩ ± |1⟩)/√2}`.
    Dual,
}

/// Protocol knobs in dimensionless form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolParams<T> {
    /// Number of atoms, at least 2.
    pub n: usize,
    /// Excited atoms in the Z state, `1..=n-1`.
    pub k: usize,
    /// Acceleration parameter in `[0, 1)`.
    pub q: T,
    /// Effective coupling, non-negative.
    pub nu: T,
    /// The product Ωδ in radians.
    pub omega_delta: T,
    /// Bipartite state angle in `[0, π/2]`.
    pub theta: T,
}

impl<T: Real> ProtocolParams<T> {
    pub fn new(n: usize, k: usize, q: T, nu: T, omega_delta: T, theta: T) -> Result<Self> {
        let p = Self {
            n,
            k,
            q,
            nu,
            omega_delta,
            theta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_n(self.n)?;
        check_k(self.n, self.k)?;
        check_q(self.q)?;
        check_nu(self.nu)?;
        if !self.omega_delta.is_finite() {
            return Err(Error::param("omega_delta", self.omega_delta, "must be finite"));
        }
        if !(self.theta >= T::zero() && self.theta <= T::FRAC_PI_2()) {
            return Err(Error::param("theta", self.theta, "must lie in [0, π/2]"));
        }
        Ok(())
    }
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::param("n", n, "need at least two atoms"));
    }
    Ok(())
}

pub(crate) fn check_k(n: usize, k: usize) -> Result<()> {
    if k < 1 || k >= n {
        return Err(Error::param("k", k, "must satisfy 1 <= k <= n-1"));
    }
    Ok(())
}

pub(crate) fn check_q<T: Real>(q: T) -> Result<()> {
    if !(q >= T::zero() && q < T::one()) {
        return Err(Error::param("q", q, "must lie in [0, 1)"));
    }
    Ok(())
}

pub(crate) fn check_nu<T: Real>(nu: T) -> Result<()> {
    if !(nu >= T::zero() && nu.is_finite()) {
        return Err(Error::param("nu", nu, "must be finite and non-negative"));
    }
    Ok(())
}

/// Physical quantities the dimensionless parameters derive from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalInputs<T> {
    /// Energy gap Ω.
    pub omega: T,
    /// Proper acceleration of the moving detector.
    pub accel: T,
    /// Coupling constant ε.
    pub eps: T,
    /// Interaction duration Δ.
    pub duration: T,
    /// Width κ of the Gaussian suppression factor.
    pub kappa: T,
    /// Clock offset δ = τ_A − τ_B.
    pub delta: T,
}

impl<T: Real> PhysicalInputs<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > T::zero() && self.omega.is_finite()) {
            return Err(Error::param("omega", self.omega, "must be positive"));
        }
        if self.accel.is_nan() || self.accel <= T::zero() {
            return Err(Error::param("accel", self.accel, "must be positive"));
        }
        if !(self.duration > T::zero() && self.duration.is_finite()) {
            return Err(Error::param("duration", self.duration, "must be positive"));
        }
        if !(self.eps >= T::zero() && self.eps.is_finite()) {
            return Err(Error::param("eps", self.eps, "must be finite and non-negative"));
        }
        if !(self.kappa >= T::zero() && self.kappa.is_finite()) {
            return Err(Error::param("kappa", self.kappa, "must be finite and non-negative"));
        }
        if !self.delta.is_finite() {
            return Err(Error::param("delta", self.delta, "must be finite"));
        }
        Ok(())
    }

    pub fn q(&self) -> Result<T> {
        acceleration_to_q(self.omega, self.accel)
    }

    pub fn nu(&self) -> Result<T> {
        self.validate()?;
        Ok(effective_coupling(self))
    }

    pub fn omega_delta(&self) -> T {
        self.omega * self.delta
    }
}

/// `ν = sqrt(ε²ΩΔ/(2π) · exp(−Ω²κ²))`.
pub fn effective_coupling<T: Real>(p: &PhysicalInputs<T>) -> T {
    let gaussian = (-(p.omega * p.omega * p.kappa * p.kappa)).exp();
    (p.eps * p.eps * p.omega * p.duration / T::TAU() * gaussian).sqrt()
}

/// `q = exp(−2πΩ/a)`; strictly increasing in the acceleration.
pub fn acceleration_to_q<T: Real>(omega: T, accel: T) -> Result<T> {
    if !(omega > T::zero() && omega.is_finite()) {
        return Err(Error::param("omega", omega, "must be positive"));
    }
    if accel.is_nan() || accel <= T::zero() {
        return Err(Error::param("accel", accel, "must be positive"));
    }
    Ok((-T::TAU() * omega / accel).exp())
}

/// Basis indices of Hamming weight `k` among `n` bits, in lexicographic order
/// of the bit strings.
pub fn dicke_indices(n: usize, k: usize) -> Vec<usize> {
    (0..1usize << n).filter(|i| i.count_ones() as usize == k).collect()
}

/// `(|10…0⟩ + |01…0⟩ + … + |0…01⟩)/√n`.
pub fn build_w_state<T: Real>(n: usize) -> Result<PureState<T>> {
    check_n(n)?;
    build_dicke(n, 1)
}

/// Equal superposition of all `C(n, k)` kets with `k` excitations.
pub fn build_z_state<T: Real>(n: usize, k: usize) -> Result<PureState<T>> {
    check_n(n)?;
    check_k(n, k)?;
    build_dicke(n, k)
}

fn build_dicke<T: Real>(n: usize, k: usize) -> Result<PureState<T>> {
    if n > 14 {
        return Err(Error::TooLarge {
            what: "atoms in a full state vector",
            value: n,
            limit: 14,
        });
    }
    let amp = Complex::new(T::one() / binomial::<T>(n, k).sqrt(), T::zero());
    let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << n];
    for i in dicke_indices(n, k) {
        amps[i] = amp;
    }
    PureState::new(n, 1, amps)
}

/// `sinθ|01⟩ + cosθ|10⟩`, defined for any real θ.
pub fn build_bipartite_theta<T: Real>(theta: T) -> PureState<T> {
    let (s, c) = theta.sin_cos();
    PureState::from_real(2, &[T::zero(), s, c, T::zero()]).expect("four amplitudes for two qubits")
}

/// Conjugates `rho` by `H^{⊗qubit_count}`. The map is an involution.
pub fn dual_basis_transform<T: Real>(rho: &ComplexMatrix<T>, qubit_count: usize) -> Result<ComplexMatrix<T>> {
    let dim = 1usize
        .checked_shl(qubit_count as u32)
        .ok_or(Error::DimensionMismatch(format!("{qubit_count} qubits")))?;
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} matrix for {qubit_count} qubits",
            rho.rows(),
            rho.cols()
        )));
    }
    let mut m = rho.clone();
    // Unnormalized Walsh-Hadamard along columns, then rows.
    for col in 0..dim {
        let mut v: Vec<_> = (0..dim).map(|r| m[(r, col)]).collect();
        walsh_hadamard(&mut v);
        for (r, z) in v.into_iter().enumerate() {
            m[(r, col)] = z;
        }
    }
    for row in 0..dim {
        let mut v: Vec<_> = (0..dim).map(|c| m[(row, c)]).collect();
        walsh_hadamard(&mut v);
        for (c, z) in v.into_iter().enumerate() {
            m[(row, c)] = z;
        }
    }
    Ok(m.scale(T::one() / T::count(dim)))
}

fn walsh_hadamard<T: Real>(v: &mut [Complex<T>]) {
    let mut h = 1;
    while h < v.len() {
        for start in (0..v.len()).step_by(2 * h) {
            for i in start..start + h {
                let (a, b) = (v[i], v[i + h]);
                v[i] = a + b;
                v[i + h] = a - b;
            }
        }
        h *= 2;
    }
}
