//! The measurement-based entanglement protocols, each packaged as a
//! reproducible experiment:
//!
//! * [`zeno`](self) — the no-emission controlled phase gate and its
//!   fidelity/success sweep over drive strength and detuning.
//! * [`telegraph`](self) — heralding on macroscopic dark periods of the
//!   cavity fluorescence signal, with dwell-time segmentation and estimation.
//! * [`source`](self) — the driven single-photon source, integrated with the
//!   master-equation oracle.
//! * [`rus`](self) — the repeat-until-success photon-pair gate at the
//!   abstract state-map level (time-bin encoding, pair measurement,
//!   heralding).

mod rus;
mod source;
mod telegraph;
mod zeno;

pub use rus::{
    default_pair_basis, rus_encode, rus_encode_pair, rus_gate, rus_measure, OutcomeClass,
    PairBasis, RusAttempt, RusGateResult,
};
pub use source::{photon_source_experiment, PhotonSourceResult};
pub use telegraph::{
    segment_periods, telegraph_experiment, telegraph_experiment_with, Period, PeriodKind,
    TelegraphAnalysis, TelegraphConfig, TelegraphRun,
};
pub use zeno::{
    fig3_inputs, sweep_gate, zeno_gate_experiment, GateOutcome, SweepBest, SweepRow, SweepTable,
};

use crate::linalg::LinalgError;
use crate::models::ModelError;
use crate::trajectory::EngineError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProtocolError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid argument: {0}")]
    Invalid(String),
}
