//! Scattering models for transmission-type microwave photonic gates.
//!
//! * [`network`]: chain-matrix algebra and scattering parameters.
//! * [`squid`]: the three-SQUID linear phase shifter, its inverse design and
//!   flux-plane maps.
//! * [`flux`]: bias-line crosstalk compensation.
//! * [`wqed`]: three qubits side-coupled to a waveguide, with analytic
//!   single-photon scattering and a two-photon time-bin simulator.
//!
//! The analytic parts are generic over [`Real`] (`f32` or `f64`); the
//! two-photon simulator runs in `f64`.

pub mod constants;
mod error;
pub mod flux;
pub mod network;
mod scalar;
pub mod squid;
pub mod wqed;

pub use error::{Error, Result};
pub use scalar::Real;

/// Chain matrix in double precision.
pub type Abcd = network::TwoPortAbcd<f64>;
/// Scattering matrix in double precision.
pub type SParams = network::SMatrix<f64>;
/// Phase-shifter device in double precision.
pub type Device = squid::SquidDevice<f64>;
/// Phase-shifter design in double precision.
pub type Design = squid::PhaseShifterDesign<f64>;
/// Mutual-inductance matrix in double precision.
pub type Mutuals = flux::InductanceMatrix<f64>;
/// Waveguide-QED parameters in double precision.
pub type Qed = wqed::WqedParams<f64>;
