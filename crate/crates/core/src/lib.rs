//! Simulation toolkit for measurement-based entanglement of atoms coupled to
//! optical cavities.
//!
//! The crate is organised in four layers:
//!
//! * [`linalg`] — dense complex linear algebra for small composite Hilbert
//!   spaces (tensor products, propagators, partial trace, fidelity).
//! * [`models`] — cavity-design formulas and builders that turn physical
//!   parameter bundles into concrete Hamiltonians and jump channels.
//! * [`trajectory`] — quantum-jump (Monte Carlo wavefunction) unraveling,
//!   detector-efficiency thinning and a direct master-equation integrator.
//! * [`protocols`] — the entanglement experiments themselves: a no-emission
//!   phase gate, telegraph-signal heralded entanglement, a single-photon
//!   source, and a repeat-until-success photon-pair gate.
//!
//! Everything works in natural units with `hbar = 1`; rates and Rabi
//! frequencies are expressed in units of the atom-cavity coupling `g` unless
//! a function is explicitly documented as SI.

pub mod linalg;
pub mod models;
pub mod protocols;
pub mod trajectory;

pub use linalg::{Operator, PureState, MixedState};
pub use models::{CavityGeometry, SystemModel, SystemParams};
