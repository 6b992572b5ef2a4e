//! Synchronization mathematics.
//!
//! Alice (atom 0) holds the standard clock and Bob (atom 1) the accelerated
//! one. After the channel, Alice measures `|pos⟩` at her proper time τ,
//! Bob's qubit collapses, evolves freely for the clock offset δ, and Bob
//! measures in the dual basis. The probability of `|pos⟩` has the form
//! `1/2 + A·cos(Ωδ)`; the amplitude `A` sets the synchronization accuracy.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlin::{density_check, partial_trace, psd_sqrt, singular_values, ComplexMatrix, PureState, DENSITY_TOL};
use crate::scalar::Real;
use crate::states::{build_bipartite_theta, check_k, check_n, check_nu, check_q, dual_basis_transform, BasisLabel};
use crate::unruh::{apply_unruh_map, ACCELERATED_ATOM};

/// Agreement required between closed forms and the numeric pipeline.
pub const PIPELINE_TOL: f64 = 1e-10;
/// Conditioning on an Alice outcome less likely than this is refused.
pub const NULL_EVENT_PROB: f64 = 1e-15;
/// Largest modulus tolerated outside the X pattern of a two-qubit matrix.
pub const X_STATE_TOL: f64 = 1e-10;
/// Slack allowed when `|p_obs − 1/2|` exceeds the amplitude through rounding.
pub const ESTIMATE_SLACK: f64 = 1e-12;

/// Initial-state family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Z,
    W,
    Bipartite,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Z => "Z",
            Family::W => "W",
            Family::Bipartite => "bipartite",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "z" => Ok(Family::Z),
            "w" => Ok(Family::W),
            "bipartite" | "b" | "theta" => Ok(Family::Bipartite),
            _ => Err(Error::param("family", s, "expected z, w or bipartite")),
        }
    }
}

/// A 4x4 density matrix of atoms (Alice, Bob), tagged with its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState<T> {
    matrix: ComplexMatrix<T>,
    basis: BasisLabel,
}

impl<T: Real> TwoQubitState<T> {
    pub fn new(matrix: ComplexMatrix<T>, basis: BasisLabel) -> Result<Self> {
        Self::with_tolerance(matrix, basis, T::lit(DENSITY_TOL))
    }

    pub fn with_tolerance(matrix: ComplexMatrix<T>, basis: BasisLabel, tol: T) -> Result<Self> {
        if matrix.rows() != 4 || matrix.cols() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "two-qubit state needs a 4x4 matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let report = density_check(&matrix, tol);
        if let Some(failure) = report.failure {
            return Err(Error::param("two-qubit matrix", failure, "not a density matrix"));
        }
        Ok(Self { matrix, basis })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn basis(&self) -> BasisLabel {
        self.basis
    }

    pub fn to_dual(&self) -> Self {
        match self.basis {
            BasisLabel::Dual => self.clone(),
            BasisLabel::Computational => Self {
                matrix: dual_basis_transform(&self.matrix, 2).expect("4x4 matrix"),
                basis: BasisLabel::Dual,
            },
        }
    }

    pub fn to_computational(&self) -> Self {
        match self.basis {
            BasisLabel::Computational => self.clone(),
            BasisLabel::Dual => Self {
                matrix: dual_basis_transform(&self.matrix, 2).expect("4x4 matrix"),
                basis: BasisLabel::Computational,
            },
        }
    }
}

/// Bob's qubit after Alice's `|pos⟩` outcome, in the dual basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BobState<T> {
    matrix: ComplexMatrix<T>,
    gamma: T,
}

impl<T: Real> BobState<T> {
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn basis(&self) -> BasisLabel {
        BasisLabel::Dual
    }

    /// Normalization γ, read off as a quarter of the `|pos⟩`/`|neg⟩`
    /// population gap of the freshly conditioned state; equals `1/(4 + 2α₊)`
    /// for Z-state inputs.
    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// Probability of measuring `|pos⟩`.
    pub fn prob_pos(&self) -> T {
        self.matrix[(0, 0)].re
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityResult<T> {
    pub p_pos: T,
    pub p_neg: T,
    /// Coefficient of cos(Ωδ) in `p_pos`.
    pub amplitude: T,
    /// `None` for states run through [`pipeline_probability`].
    pub family: Option<Family>,
}

impl<T: Real> ProbabilityResult<T> {
    pub fn from_amplitude(amplitude: T, omega_delta: T, family: Family) -> Self {
        let p_pos = T::lit(0.5) + amplitude * omega_delta.cos();
        Self {
            p_pos,
            p_neg: T::one() - p_pos,
            amplitude,
            family: Some(family),
        }
    }
}

/// The coefficients α± and β± of the dual-basis reduced matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualCoefficients<T> {
    pub alpha_plus: T,
    pub alpha_minus: T,
    pub beta_plus: T,
    pub beta_minus: T,
}

fn check_inputs<T: Real>(n: usize, k: usize, q: T, nu: T) -> Result<()> {
    check_n(n)?;
    check_k(n, k)?;
    check_q(q)?;
    check_nu(nu)
}

pub fn dual_coefficients<T: Real>(n: usize, k: usize, q: T, nu: T) -> Result<DualCoefficients<T>> {
    check_inputs(n, k, q, nu)?;
    let (nf, kf) = (T::count(n), T::count(k));
    let one = T::one();
    let nu2 = nu * nu;
    let omq = one - q;
    let low = (nf - kf - one) / (omq * kf);
    let high = (kf - one) / (omq * (nf - kf));
    let tail = q * nu2 / omq;
    let a1 = (omq + q * nu2) * low + nu2 / omq;
    let a2 = (omq + nu2) * high;
    let b1 = (omq - q * nu2) * low + nu2 / omq;
    let b2 = (-omq + nu2) * high;
    Ok(DualCoefficients {
        alpha_plus: a1 + a2 + tail,
        alpha_minus: a1 - a2 - tail,
        beta_plus: b1 + b2 - tail,
        beta_minus: b1 - b2 + tail,
    })
}

/// Reduced Alice–Bob matrix of a channel-processed Z(n, k) state written
/// directly in the dual basis `|pos pos⟩, |pos neg⟩, |neg pos⟩, |neg neg⟩`.
pub fn closed_form_rho_ab_dual<T: Real>(n: usize, k: usize, q: T, nu: T) -> Result<ComplexMatrix<T>> {
    let d = dual_coefficients(n, k, q, nu)?;
    let four = T::lit(4.0);
    let (ap, am, bp, bm) = (d.alpha_plus, d.alpha_minus, d.beta_plus, d.beta_minus);
    let rows = [
        [four + ap, bp, am, bm - four],
        [bp, ap, bm, am],
        [am, bm, ap, bp],
        [bm - four, am, bp, four + ap],
    ];
    let data = rows.iter().flatten().map(|&x| Complex::new(x, T::zero())).collect();
    let m = ComplexMatrix::from_vec(4, 4, data)?;
    Ok(m.scale(T::one() / (T::lit(8.0) + four * ap)))
}

/// Bob's state after Alice's `|pos⟩` outcome and a clock offset with phase
/// `omega_delta`, from the dual coefficients:
/// `γ [[2+α₊+2cos, β₊+2i·sin], [β₊−2i·sin, 2+α₊−2cos]]`, `γ = 1/(4+2α₊)`.
pub fn closed_form_bob_state<T: Real>(n: usize, k: usize, q: T, nu: T, omega_delta: T) -> Result<ComplexMatrix<T>> {
    let d = dual_coefficients(n, k, q, nu)?;
    let two = T::lit(2.0);
    let gamma = T::one() / (T::lit(4.0) + two * d.alpha_plus);
    let (s, c) = omega_delta.sin_cos();
    let data = vec![
        Complex::new(two + d.alpha_plus + two * c, T::zero()),
        Complex::new(d.beta_plus, two * s),
        Complex::new(d.beta_plus, -two * s),
        Complex::new(two + d.alpha_plus - two * c, T::zero()),
    ];
    Ok(ComplexMatrix::from_vec(2, 2, data)?.scale(gamma))
}

/// Projects Alice onto `|pos⟩`, traces her out and renormalizes.
pub fn conditional_bob_state<T: Real>(rho: &TwoQubitState<T>) -> Result<BobState<T>> {
    if rho.basis != BasisLabel::Dual {
        return Err(Error::WrongBasis { expected: "dual" });
    }
    let m = &rho.matrix;
    let p = (m[(0, 0)] + m[(1, 1)]).re;
    if p.is_nan() || p < T::lit(NULL_EVENT_PROB) {
        return Err(Error::NullConditioning(p.to_f64().unwrap_or(f64::NAN)));
    }
    let data = vec![m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
    let matrix = ComplexMatrix::from_vec(2, 2, data)?.scale(T::one() / p);
    let gamma = (matrix[(0, 0)].re - matrix[(1, 1)].re) / T::lit(4.0);
    Ok(BobState { matrix, gamma })
}

/// Free evolution through phase Ωδ between the energy eigenstates, i.e.
/// conjugation by `diag(1, e^{iΩδ})`, applied in the dual basis.
pub fn evolve_bob_state<T: Real>(b: &BobState<T>, omega_delta: T) -> BobState<T> {
    let half = T::lit(0.5);
    let one = Complex::new(T::one(), T::zero());
    let phase = Complex::from_polar(T::one(), omega_delta);
    let plus = (one + phase) * half;
    let minus = (one - phase) * half;
    let u = ComplexMatrix::from_vec(2, 2, vec![plus, minus, minus, plus]).expect("2x2 unitary");
    BobState {
        matrix: b.matrix.conjugate_by(&u),
        gamma: b.gamma,
    }
}

/// `A = k(n−k)(1−q) / ((n−1)((1−q)n + ν²k + qν²(n−k)))`, unchecked.
fn z_amplitude_raw<T: Real>(n: usize, k: usize, q: T, nu: T) -> T {
    let (nf, kf) = (T::count(n), T::count(k));
    let omq = T::one() - q;
    let nu2 = nu * nu;
    kf * (nf - kf) * omq / ((nf - T::one()) * (omq * nf + nu2 * kf + q * nu2 * (nf - kf)))
}

pub fn z_amplitude<T: Real>(n: usize, k: usize, q: T, nu: T) -> Result<T> {
    check_inputs(n, k, q, nu)?;
    Ok(z_amplitude_raw(n, k, q, nu))
}

/// Probability of `|pos⟩` for a Z(n, k) initial state.
pub fn prob_pos_z<T: Real>(n: usize, k: usize, q: T, nu: T, omega_delta: T) -> Result<ProbabilityResult<T>> {
    let amplitude = z_amplitude(n, k, q, nu)?;
    Ok(ProbabilityResult::from_amplitude(amplitude, omega_delta, Family::Z))
}

/// Probability of `|pos⟩` for the W state:
/// `1/2 + (1−q)cos(Ωδ) / ((1−q)n + ν² + qν²(n−1))`.
pub fn prob_pos_w<T: Real>(n: usize, q: T, nu: T, omega_delta: T) -> Result<ProbabilityResult<T>> {
    check_n(n)?;
    check_q(q)?;
    check_nu(nu)?;
    let nf = T::count(n);
    let omq = T::one() - q;
    let nu2 = nu * nu;
    let amplitude = omq / (omq * nf + nu2 + q * nu2 * (nf - T::one()));
    Ok(ProbabilityResult::from_amplitude(amplitude, omega_delta, Family::W))
}

/// Probability of `|pos⟩` for `sinθ|01⟩ + cosθ|10⟩`:
/// `1/2 + (1−q)sin2θ·cos(Ωδ) / (2(1−q) + 2ν²(sin²θ + q·cos²θ))`.
///
/// Bob's excited amplitude is `sinθ`, so `sin²θ` carries the de-excitation
/// weight and `q·cos²θ` the excitation weight. Outside `[0, π/2]` the
/// returned amplitude is the signed cosine coefficient.
pub fn prob_pos_bipartite<T: Real>(theta: T, q: T, nu: T, omega_delta: T) -> Result<ProbabilityResult<T>> {
    check_q(q)?;
    check_nu(nu)?;
    let two = T::lit(2.0);
    let omq = T::one() - q;
    let (s, c) = theta.sin_cos();
    let amplitude = omq * (two * theta).sin() / (two * omq + two * nu * nu * (s * s + q * c * c));
    Ok(ProbabilityResult::from_amplitude(
        amplitude,
        omega_delta,
        Family::Bipartite,
    ))
}

/// Bipartite cosine coefficient with denominator
/// `2(1−q) + 2ν²(cos²θ + q·sin²θ)`, i.e. with the two branch weights
/// exchanged relative to the channel output of [`build_bipartite_theta`].
/// Agrees with [`prob_pos_bipartite`] only at θ = π/4 (mod π/2); diagnostic use.
pub fn bipartite_amplitude_swapped<T: Real>(theta: T, q: T, nu: T) -> T {
    let two = T::lit(2.0);
    let omq = T::one() - q;
    let (s, c) = theta.sin_cos();
    omq * (two * theta).sin() / (two * omq + two * nu * nu * (c * c + q * s * s))
}

/// Result of the optimal excitation search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalK<T> {
    /// Exhaustive argmax over `1..=n-1`, smaller k on ties.
    pub k_opt: usize,
    pub amplitude: T,
    /// `clamp(⌊Y⌋, 1, n−1)` from [`y_expression`].
    pub y_formula_k: usize,
    /// `|k_opt − y_formula_k| ≤ 1`.
    pub agreement: bool,
    /// `clamp(⌊Y*⌋, 1, n−1)` from [`y_stationary`].
    pub y_stationary_k: usize,
}

pub fn optimal_k<T: Real>(n: usize, q: T, nu: T) -> Result<OptimalK<T>> {
    check_n(n)?;
    check_q(q)?;
    check_nu(nu)?;
    let (mut k_opt, mut best) = (1, z_amplitude_raw(n, 1, q, nu));
    for k in 2..n {
        let a = z_amplitude_raw(n, k, q, nu);
        if a > best {
            k_opt = k;
            best = a;
        }
    }
    let y_formula_k = clamp_floor(y_expression(n, q, nu), n);
    Ok(OptimalK {
        k_opt,
        amplitude: best,
        y_formula_k,
        agreement: k_opt.abs_diff(y_formula_k) <= 1,
        y_stationary_k: clamp_floor(y_stationary(n, q, nu), n),
    })
}

/// `clamp(⌊y⌋, 1, n−1)`; NaN and values below 1 map to 1, +∞ to `n − 1`.
pub fn clamp_floor<T: Real>(y: T, n: usize) -> usize {
    let hi = n - 1;
    if y.is_nan() || y < T::one() {
        return 1;
    }
    match y.floor().to_usize() {
        Some(v) => v.clamp(1, hi),
        None => hi,
    }
}

/// Closed-form candidate Y for the optimal excitation number, with `n`
/// multiplying the whole polynomial over one common denominator:
///
/// ```text
/// Y = [ n(−1 − q(−2+ν²) + q²(−1+ν²)) + sqrt(−n²(q−1)²(−1 − ν² + q²(−1+ν²) − q(−2+ν²))) ] / ((q−1)²ν²)
/// ```
///
/// Not finite at ν = 0. Its radicand carries `qν²` where [`y_stationary`]
/// has `qν⁴`, so the two differ unless `q = 0` or `ν = 1`.
pub fn y_expression<T: Real>(n: usize, q: T, nu: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let nf = T::count(n);
    let nu2 = nu * nu;
    let qm1 = q - one;
    let poly = -one - q * (-two + nu2) + q * q * (-one + nu2);
    let radicand = -(nf * nf) * qm1 * qm1 * (-one - nu2 + q * q * (-one + nu2) - q * (-two + nu2));
    (nf * poly + radicand.sqrt()) / (qm1 * qm1 * nu2)
}

/// Stationary point of `k ↦ k(n−k)/((1−q)n + ν²k + qν²(n−k))` on `(0, n)`:
///
/// ```text
/// Y* = [ −n(1−q)a + sqrt(n²(1−q)² a (1−q+ν²)) ] / ((1−q)²ν²),   a = 1−q+qν²
///    = n / (1 + sqrt(1 + ν²(1−q)/a))
/// ```
///
/// The second form is evaluated; it is finite at ν = 0 where Y* = n/2.
pub fn y_stationary<T: Real>(n: usize, q: T, nu: T) -> T {
    let omq = T::one() - q;
    let nu2 = nu * nu;
    let a = omq + q * nu2;
    T::count(n) / (T::one() + (T::one() + nu2 * omq / a).sqrt())
}

/// All clock offsets δ with `|Ωδ| ≤ 2π` consistent with an observed
/// `|pos⟩` probability, sorted and deduplicated.
///
/// With `x = arccos((p_obs − 1/2)/A)` the candidates are `±x/Ω` and
/// `±(2π − x)/Ω`; picking among them needs information beyond one
/// probability.
pub fn estimate_delta<T: Real>(p_obs: T, amplitude: T, omega: T) -> Result<Vec<T>> {
    if amplitude.is_nan() || amplitude <= T::zero() {
        return Err(Error::NoTimingInformation(amplitude.to_f64().unwrap_or(f64::NAN)));
    }
    if !(T::zero()..=T::one()).contains(&p_obs) {
        return Err(Error::param("p_obs", p_obs, "must lie in [0, 1]"));
    }
    if !(omega > T::zero() && omega.is_finite()) {
        return Err(Error::param("omega", omega, "must be positive"));
    }
    let offset = p_obs - T::lit(0.5);
    if offset.abs() > amplitude + T::lit(ESTIMATE_SLACK) {
        return Err(Error::param(
            "p_obs",
            p_obs,
            "farther from 1/2 than the amplitude allows",
        ));
    }
    let x = (offset / amplitude).max(-T::one()).min(T::one()).acos();
    let far = T::TAU() - x;
    let mut out: Vec<T> = [x, -x, far, -far].iter().map(|&v| v / omega).collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite candidates"));
    out.dedup();
    Ok(out)
}

/// Concurrence of an X-shaped two-qubit state:
/// `2·max{0, |ρ14| − sqrt(ρ22ρ33), |ρ23| − sqrt(ρ11ρ44)}`.
pub fn concurrence_x_state<T: Real>(rho: &TwoQubitState<T>) -> Result<T> {
    if rho.basis != BasisLabel::Computational {
        return Err(Error::WrongBasis {
            expected: "computational",
        });
    }
    let m = &rho.matrix;
    for i in 0..4 {
        for j in 0..4 {
            let magnitude = m[(i, j)].norm();
            if j != i && j != 3 - i && magnitude > T::lit(X_STATE_TOL) {
                return Err(Error::NotXState {
                    row: i,
                    col: j,
                    magnitude: magnitude.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
    }
    let d = |i: usize| m[(i, i)].re.max(T::zero());
    let c1 = (m[(0, 3)] * m[(3, 0)]).norm().sqrt() - (d(1) * d(2)).sqrt();
    let c2 = (m[(1, 2)] * m[(2, 1)]).norm().sqrt() - (d(0) * d(3)).sqrt();
    Ok(T::lit(2.0) * T::zero().max(c1).max(c2))
}

/// Spin-flip concurrence of an arbitrary two-qubit density matrix:
/// `max{0, λ1 − λ2 − λ3 − λ4}` with `λi` the decreasing singular values of
/// `√ρ (σy⊗σy) √ρ*`.
pub fn wootters_concurrence<T: Real>(rho: &ComplexMatrix<T>) -> Result<T> {
    if rho.rows() != 4 || rho.cols() != 4 {
        return Err(Error::DimensionMismatch("concurrence needs a 4x4 matrix".into()));
    }
    let root = psd_sqrt(rho)?;
    let mut flip = ComplexMatrix::zeros(4, 4);
    for (i, sign) in [(0, -1.0), (1, 1.0), (2, 1.0), (3, -1.0)] {
        flip[(i, 3 - i)] = Complex::new(T::lit(sign), T::zero());
    }
    let s = root.dot(&flip).dot(&root.map(|z| z.conj()));
    let sv = singular_values(&s);
    Ok(T::zero().max(sv[0] - sv[1] - sv[2] - sv[3]))
}

/// Channel output of the bipartite θ state, reduced to its computational-basis 4x4 matrix.
pub fn bipartite_channel_state<T: Real>(theta: T, q: T, nu: T) -> Result<TwoQubitState<T>> {
    let out = apply_unruh_map(&build_bipartite_theta(theta), ACCELERATED_ATOM, q, nu)?;
    TwoQubitState::new(out.rho_atoms, BasisLabel::Computational)
}

/// Runs the whole protocol numerically: channel on atom 1, reduction to
/// atoms {0, 1}, dual basis, Alice's `|pos⟩` conditioning, evolution by
/// Ωδ and Bob's `|pos⟩` measurement.
///
/// `amplitude` is the cosine coefficient `(b₊₊ − b₋₋)/2` of the
/// conditioned state; `p_pos = 1/2 + amplitude·cos(Ωδ)` holds whenever
/// the conditioned state has a real off-diagonal entry, as for all three
/// families.
pub fn pipeline_probability<T: Real>(
    initial: &PureState<T>,
    q: T,
    nu: T,
    omega_delta: T,
) -> Result<ProbabilityResult<T>> {
    let n = initial.num_qubits();
    if n < 2 {
        return Err(Error::param("initial", n, "need at least two qubits"));
    }
    let channel = apply_unruh_map(initial, ACCELERATED_ATOM, q, nu)?;
    let rho_ab = partial_trace(&channel.rho_atoms, &vec![2; n], &[0, 1])?;
    let dual = TwoQubitState::new(rho_ab, BasisLabel::Computational)?.to_dual();
    let bob = conditional_bob_state(&dual)?;
    let amplitude = T::lit(2.0) * bob.gamma();
    let p_pos = evolve_bob_state(&bob, omega_delta).prob_pos();
    Ok(ProbabilityResult {
        p_pos,
        p_neg: T::one() - p_pos,
        amplitude,
        family: None,
    })
}
