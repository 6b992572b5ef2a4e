//! The accelerated-detector channel.
//!
//! To first order in the coupling, the accelerated atom `t` and the field
//! evolve as
//!
//! ```text
//! |ψ⟩|0_M⟩  ↦  |ψ⟩|0_M⟩ + ν/√(1−q) · ( √q · D_t†|ψ⟩|1_F2⟩ + D_t|ψ⟩|1_F1⟩ )
//! ```
//!
//! where `D_t` lowers atom `t`. The state is then renormalized and the field
//! traced out. [`apply_unruh_map`] carries this out literally on a three-level
//! field ancilla; [`closed_form_rho_full`] and [`closed_form_rho_ab`] write
//! the result down directly for Z-state inputs.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::qlin::{ComplexMatrix, PureState};
use crate::scalar::{binomial, Real};
use crate::states::{check_k, check_n, check_nu, check_q, dicke_indices};

/// Largest atom count for operations that build a full `2^n x 2^n` matrix.
pub const MAX_FULL_ATOMS: usize = 12;

/// Index of the accelerated atom.
pub const ACCELERATED_ATOM: usize = 1;

/// Orthonormal field states entering the map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldSector {
    /// Minkowski vacuum `|0_M⟩`.
    Vacuum,
    /// One quantum in mode F1 (emitted on de-excitation).
    F1,
    /// One quantum in mode F2 (absorbed on excitation).
    F2,
}

impl FieldSector {
    pub const COUNT: usize = 3;

    pub fn index(self) -> usize {
        match self {
            FieldSector::Vacuum => 0,
            FieldSector::F1 => 1,
            FieldSector::F2 => 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChannelOutput<T> {
    /// Normalized atoms ⊗ field state.
    pub joint_state: PureState<T>,
    /// Norm of the state before normalization.
    pub norm_const: T,
    /// Atom density matrix with the field traced out.
    pub rho_atoms: ComplexMatrix<T>,
}

/// Applies the channel to qubit `target` of a field-free state.
pub fn apply_unruh_map<T: Real>(psi: &PureState<T>, target: usize, q: T, nu: T) -> Result<ChannelOutput<T>> {
    if psi.ancilla_dim() != 1 {
        return Err(Error::AncillaPresent(psi.ancilla_dim()));
    }
    let n = psi.num_qubits();
    if target >= n {
        return Err(Error::param("target", target, "qubit index out of range"));
    }
    check_q(q)?;
    check_nu(nu)?;

    let branch = nu / (T::one() - q).sqrt();
    let raise = branch * q.sqrt();
    let mask = 1usize << (n - 1 - target);
    let sectors = FieldSector::COUNT;
    let mut joint = vec![Complex::new(T::zero(), T::zero()); psi.amplitudes().len() * sectors];
    for (s, &a) in psi.amplitudes().iter().enumerate() {
        joint[s * sectors + FieldSector::Vacuum.index()] = joint[s * sectors + FieldSector::Vacuum.index()] + a;
        if s & mask == 0 {
            let up = s | mask;
            joint[up * sectors + FieldSector::F2.index()] = joint[up * sectors + FieldSector::F2.index()] + a * raise;
        } else {
            let down = s & !mask;
            joint[down * sectors + FieldSector::F1.index()] =
                joint[down * sectors + FieldSector::F1.index()] + a * branch;
        }
    }
    let mut joint_state = PureState::new(n, sectors, joint)?;
    let norm_const = joint_state.norm();
    joint_state.normalize()?;
    let atoms: Vec<usize> = (0..n).collect();
    let rho_atoms = joint_state.reduced_density(&atoms)?;
    Ok(ChannelOutput {
        joint_state,
        norm_const,
        rho_atoms,
    })
}

fn check_inputs<T: Real>(n: usize, k: usize, q: T, nu: T) -> Result<()> {
    check_n(n)?;
    check_k(n, k)?;
    check_q(q)?;
    check_nu(nu)
}

/// Norm `C` of the unnormalized post-interaction state for a Z(n, k) input:
/// `C² = 1 + (qν²(n−k) + ν²k) / ((1−q)n)`.
pub fn normalization_constant<T: Real>(n: usize, k: usize, q: T, nu: T) -> Result<T> {
    check_inputs(n, k, q, nu)?;
    Ok(norm_sq(n, k, q, nu).sqrt())
}

fn norm_sq<T: Real>(n: usize, k: usize, q: T, nu: T) -> T {
    let (nf, kf) = (T::count(n), T::count(k));
    let nu2 = nu * nu;
    T::one() + (q * nu2 * (nf - kf) + nu2 * kf) / ((T::one() - q) * nf)
}

/// The diagonal entries `S1..S4` of the reduced Alice–Bob matrix.
pub fn s_terms<T: Real>(n: usize, k: usize, q: T, nu: T) -> [T; 4] {
    let (nf, kf) = (T::count(n), T::count(k));
    let one = T::one();
    let w = nu * nu / (one - q);
    [
        (nf - kf - one) / kf + w,
        one + q * w * (nf - kf - one) / kf,
        one + w * (kf - one) / (nf - kf),
        (kf - one) / (nf - kf) + q * w,
    ]
}

/// Reduced state of atoms 0 and 1 after the channel, in the basis
/// `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn closed_form_rho_ab<T: Real>(n: usize, k: usize, q: T, nu: T) -> Result<ComplexMatrix<T>> {
    check_inputs(n, k, q, nu)?;
    let (nf, kf) = (T::count(n), T::count(k));
    let prefactor = kf * (nf - kf) / (norm_sq(n, k, q, nu) * nf * (nf - T::one()));
    let s = s_terms(n, k, q, nu);
    let mut m = ComplexMatrix::from_diagonal(&[s[0], s[1], s[2], s[3]]);
    m[(1, 2)] = Complex::new(T::one(), T::zero());
    m[(2, 1)] = Complex::new(T::one(), T::zero());
    Ok(m.scale(prefactor))
}

/// Full n-atom density matrix after the channel acts on atom 1 of Z(n, k):
/// the initial projector plus the excitation and de-excitation branch
/// projectors, weighted `qν²/(1−q)` and `ν²/(1−q)`, over `C²`.
pub fn closed_form_rho_full<T: Real>(n: usize, k: usize, q: T, nu: T) -> Result<ComplexMatrix<T>> {
    check_inputs(n, k, q, nu)?;
    if n > MAX_FULL_ATOMS {
        return Err(Error::TooLarge {
            what: "atoms",
            value: n,
            limit: MAX_FULL_ATOMS,
        });
    }
    let bob = 1usize << (n - 1 - ACCELERATED_ATOM);
    let amp = T::one() / binomial::<T>(n, k).sqrt();
    let w = nu * nu / (T::one() - q);
    let initial = dicke_indices(n, k);
    let raised: Vec<usize> = dicke_indices(n, k + 1).into_iter().filter(|i| i & bob != 0).collect();
    let lowered: Vec<usize> = dicke_indices(n, k - 1).into_iter().filter(|i| i & bob == 0).collect();

    let mut rho = ComplexMatrix::zeros(1 << n, 1 << n);
    let inv_c2 = T::one() / norm_sq(n, k, q, nu);
    for (kets, weight) in [(&initial, T::one()), (&raised, q * w), (&lowered, w)] {
        let entry = Complex::new(weight * amp * amp * inv_c2, T::zero());
        for &i in kets.iter() {
            for &j in kets.iter() {
                rho[(i, j)] = rho[(i, j)] + entry;
            }
        }
    }
    Ok(rho)
}
