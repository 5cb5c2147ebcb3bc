//! Single-photon source: one three-level atom (`|g>, |u>, |e>`) in a cavity.
//!
//! The u-e transition couples resonantly to the cavity mode with strength
//! `g`; a laser pulse with an adiabatically increasing Rabi frequency
//! `Omega(t)` drives g-e. The instantaneous dark state rotates from `|g, 0>`
//! toward `|u, 1>`, scattering exactly one photon into the cavity, which then
//! leaks out through the output mirror.
//!
//! `H(t) = (Omega(t)/2)(|e><g| + h.c.) + g (a^dag |u><e| + h.c.)`.
//!
//! Spontaneous emission from `|e>` is modeled as a single channel into the
//! uncoupled ground state `|u>`; this keeps the emitted-probability
//! bookkeeping exact (a decay to `|g>` would re-enter the pump cycle).

use crate::linalg::{kron, Operator, C64};

use super::{fock_labels, labels, Detectability, Hamiltonian, JumpChannel, ModelError,
            SystemModel, SystemParams};

const ATOM_DIM: usize = 3;
/// Level indices: `|g> = 0`, `|u> = 1`, `|e> = 2`.
const G: usize = 0;
const U: usize = 1;
const E: usize = 2;

/// Shape of the drive ramp.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RampShape {
    Linear,
    /// `sin^2(pi t / (2 T))`: smooth start and end.
    SinSquared,
}

/// Drive envelope: rises from zero to `amplitude` over `duration`, then holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RampSpec {
    pub shape: RampShape,
    pub duration: f64,
    pub amplitude: f64,
}

impl RampSpec {
    pub fn new(shape: RampShape, duration: f64, amplitude: f64) -> Result<Self, ModelError> {
        if duration <= 0.0 {
            return Err(ModelError::OutOfRange("ramp duration must be positive".into()));
        }
        Ok(Self { shape, duration, amplitude })
    }

    /// Envelope value at time `t` (clamped to the plateau after `duration`).
    pub fn envelope(&self, t: f64) -> f64 {
        let x = (t / self.duration).clamp(0.0, 1.0);
        let shape = match self.shape {
            RampShape::Linear => x,
            RampShape::SinSquared => {
                let s = (0.5 * std::f64::consts::PI * x).sin();
                s * s
            }
        };
        self.amplitude * shape
    }
}

/// Build the driven single-atom photon-source model.
pub fn build_photon_source(params: &SystemParams, pulse: RampSpec) -> Result<SystemModel, ModelError> {
    params.validate()?;
    if pulse.duration <= 0.0 {
        return Err(ModelError::OutOfRange("ramp duration must be positive".into()));
    }
    let cavity_dim = params.n_max + 1;
    let dims = vec![ATOM_DIM, cavity_dim];

    let i_cav = Operator::identity(vec![cavity_dim]);
    let a = Operator::annihilation(cavity_dim);
    let tue = Operator::transition(ATOM_DIM, U, E);
    let teg = Operator::transition(ATOM_DIM, E, G);

    let cavity = kron(&tue, &a.dagger());
    let base = cavity.add(&cavity.dagger()).unwrap().scale(C64::new(params.g, 0.0));
    let drive_raw = kron(&teg, &i_cav);
    // envelope(t) multiplies the full (Omega/2)(|e><g| + h.c.) term
    let drive = drive_raw.add(&drive_raw.dagger()).unwrap().scale(C64::new(0.5, 0.0));

    let jump_channels = vec![
        JumpChannel {
            op: kron(&Operator::identity(vec![ATOM_DIM]), &a)
                .scale(C64::new(params.kappa.sqrt(), 0.0)),
            label: "cavity".into(),
            detectability: Detectability::CavityOutput,
        },
        JumpChannel {
            op: kron(&Operator::transition(ATOM_DIM, U, E), &i_cav)
                .scale(C64::new(params.gamma.sqrt(), 0.0)),
            label: "spontaneous".into(),
            detectability: Detectability::FreeSpace,
        },
    ];

    Ok(SystemModel {
        hamiltonian: Hamiltonian::Ramped { base, drive, ramp: pulse },
        jump_channels,
        dims,
        basis_labels: vec![labels(&["g", "u", "e"]), fock_labels(params.n_max)],
        regime_warnings: Vec::new(),
    })
}
