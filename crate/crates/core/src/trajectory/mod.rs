//! Quantum-jump (Monte Carlo wavefunction) unraveling of a [`SystemModel`],
//! detector-efficiency thinning of emission records, and a direct
//! master-equation integrator used as the brute-force oracle.
//!
//! Between jumps the conditional state evolves under the non-Hermitian
//! `H - (i/2) sum_k L_k^dag L_k`; a jump fires when the squared norm crosses
//! a pre-drawn uniform threshold, with the channel chosen proportional to
//! `<psi|L_k^dag L_k|psi>`. For time-independent Hamiltonians the per-step
//! propagator `exp(-i H_nh dt)` is compiled once (exact up to the matrix
//! exponential) together with its dyadic roots, which locate jump times to
//! `dt/128` by binary subdivision.
//!
//! Determinism: every trajectory owns a counter-based RNG stream seeded from
//! `splitmix64(master_seed XOR index * GOLDEN)`; rerunning with the same
//! master seed reproduces all records bit for bit, independent of the
//! parallel execution schedule.

mod master;
mod noclick;
mod propagator;
mod runner;
mod thinning;

pub use master::{master_equation_expectations, master_equation_solve};
pub use noclick::{conditional_no_click_fidelity, NoClickPoint};
pub use runner::{run_ensemble, run_trajectory, TrajectoryConfig};
pub use thinning::thin_records;

use crate::linalg::{LinalgError, MixedState, PureState};
use crate::models::Detectability;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("norm underflow (norm^2 = {norm_sqr:.3e}) at t = {time} without a jump")]
    NormUnderflow { time: f64, norm_sqr: f64 },
    #[error("trajectory {index} (seed {seed}) failed: {source}")]
    TrajectoryFailed { index: usize, seed: u64, source: Box<EngineError> },
    #[error("linear algebra failure: {0}")]
    Linalg(#[from] LinalgError),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

/// One emission event in a trajectory. `channel` indexes into the model's
/// `jump_channels`; `detected` starts out true for every cavity-output event
/// (perfect detector) and is rewritten by [`thin_records`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonRecord {
    pub time: f64,
    pub channel: u16,
    pub detectability: Detectability,
    pub detected: bool,
}

impl PhotonRecord {
    pub fn label<'m>(&self, model: &'m crate::models::SystemModel) -> &'m str {
        &model.jump_channels[self.channel as usize].label
    }
}

/// One stochastic realization: its emission record, the normalized final
/// state, optional sampled snapshots, and the RNG seed that produced it.
#[derive(Debug, Clone)]
pub struct TrajectoryResult {
    pub records: Vec<PhotonRecord>,
    pub final_state: PureState,
    pub state_snapshots: Option<Vec<(f64, PureState)>>,
    pub seed: u64,
}

impl TrajectoryResult {
    /// Time of the last detected record, if any.
    pub fn last_detected_time(&self) -> Option<f64> {
        self.records.iter().rev().find(|r| r.detected).map(|r| r.time)
    }
}

/// A batch of independent trajectories sharing one master seed.
#[derive(Debug, Clone)]
pub struct Ensemble {
    pub trajectories: Vec<TrajectoryResult>,
    pub master_seed: u64,
    pub t_end: f64,
    pub dt: f64,
}

impl Ensemble {
    /// Ensemble average of `|psi><psi|` over the final states.
    pub fn average_final_density(&self) -> MixedState {
        let dims = self.trajectories[0].final_state.dims().to_vec();
        let mut rho = MixedState::zeros(dims);
        let w = 1.0 / self.trajectories.len() as f64;
        for traj in &self.trajectories {
            rho.add_scaled(&traj.final_state.to_mixed(), w);
        }
        rho
    }
}

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(GOLDEN);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-trajectory seed: `hash(master_seed, index)`.
pub fn derive_trajectory_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ index.wrapping_mul(GOLDEN))
}

/// Deterministic thinning seed, distinct from the trajectory stream.
pub fn derive_thinning_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ index.wrapping_mul(GOLDEN) ^ 0xD1F3_5C2E_0B69_A743)
}
