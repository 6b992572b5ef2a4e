//! Simulation of a multipartite relativistic quantum clock synchronization
//! protocol.
//!
//! `n` two-level detectors share a W, Z (Dicke) or bipartite entangled state.
//! One of them, carried by an accelerated observer, couples to a massless
//! scalar field and sees the Unruh thermal channel, parameterized by the
//! acceleration parameter `q = exp(-2πΩ/a)` and the effective coupling `ν`.
//! The static observer measures in the Hadamard (dual) basis, the
//! accelerated one measures after a clock offset `δ`, and the probability of
//! the `|pos⟩` outcome oscillates as `1/2 + A·cos(Ωδ)`.
//!
//! * [`qlin`]: dense complex linear algebra (Kronecker products, partial traces, spectra).
//! * [`states`]: initial states, the dual-basis change and parameter converters.
//! * [`unruh`]: the accelerated-detector channel, as brute force and closed form.
//! * [`protocol`]: time probabilities, optimal Z excitation, concurrence, offset estimation.
//! * [`sweep`]: figure-style parameter sweeps with CSV/JSON emission.
//! * [`selftest`]: seeded oracle-equivalence checks.
//!
//! Numerics are generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the scalar type.

pub mod error;
pub mod protocol;
pub mod qlin;
pub mod scalar;
pub mod selftest;
pub mod states;
pub mod sweep;
pub mod unruh;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;
pub type Complex32 = num_complex::Complex<f32>;

pub type Matrix64 = qlin::ComplexMatrix<f64>;
pub type Matrix32 = qlin::ComplexMatrix<f32>;
pub type State64 = qlin::PureState<f64>;
pub type State32 = qlin::PureState<f32>;
pub type Params64 = states::ProtocolParams<f64>;
pub type Params32 = states::ProtocolParams<f32>;
pub type Probability64 = protocol::ProbabilityResult<f64>;
pub type Probability32 = protocol::ProbabilityResult<f32>;
pub type TwoQubit64 = protocol::TwoQubitState<f64>;
pub type Bob64 = protocol::BobState<f64>;
pub type Channel64 = unruh::ChannelOutput<f64>;
