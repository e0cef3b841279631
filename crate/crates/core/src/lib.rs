//! Measurement-driven quantum information engine.
//!
//! A two-state working system (gap `ΔE`, thermal populations `a`, `b`) is
//! coupled for a time `t_m` to a free-particle meter prepared in a Gaussian
//! momentum wavepacket. The meter momentum is read out, and excitation energy
//! is harvested only when the outcome falls below a threshold. This crate
//! evaluates the information gain, energetic costs, extracted work,
//! efficiency and power of that cycle, and carries two independent checks of
//! the closed forms: split-operator propagation of the meter branches and a
//! seeded Monte Carlo cycle simulator.
//!
//! Everything here is `no_std` + `alloc`; IO, CLI and parallel drivers live
//! in the companion `infoengine-cli` crate.
//!
//! All analytic quantities use reduced variables: meter momentum
//! `u = p / (ħ√B)` and measurement time `t̄ = t_m / τ*` with `τ* = √(ħ²B) / g`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod engine;
mod error;
pub mod model;
pub mod numerics;
pub mod optimize;
pub mod oracle;

pub use engine::CycleReport;
pub use error::{Error, Result};
pub use model::{Branch, EngineParams, OperatingPoint, K_B};
pub use numerics::QuadratureSpec;
