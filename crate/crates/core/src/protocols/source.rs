//! Single-photon source experiment, evaluated on the master-equation oracle.
//!
//! From `|g, 0>`, the ramped drive adiabatically transfers the atom to `|u>`
//! while scattering one photon into the cavity mode, which leaks out through
//! the mirrors. The experiment integrates the cavity-output flux
//! `kappa <a^dag a>(t)` and the free-space flux `Gamma <P_e>(t)` and reports
//! both emission probabilities together with the flux waveform.

use crate::linalg::{kron, Operator, PureState};
use crate::models::{build_photon_source, RampSpec, SystemModel, SystemParams};
use crate::trajectory::master_equation_expectations;

use super::ProtocolError;

#[derive(Debug, Clone)]
pub struct PhotonSourceResult {
    /// Integrated cavity-output emission probability.
    pub emission_prob: f64,
    /// Integrated free-space (spontaneous) emission probability.
    pub free_space_prob: f64,
    /// `(t, kappa <a^dag a>)` sampled at every integrator step.
    pub waveform: Vec<(f64, f64)>,
    /// `(t, Gamma <P_e>)` sampled at every integrator step.
    pub free_space_waveform: Vec<(f64, f64)>,
    /// Excitation still stored at `t_end`: `<a^dag a> + <P_e>`.
    pub residual_excitation: f64,
}

/// Run the source from `|g, 0>` for `t_end` with integrator step `dt`.
pub fn photon_source_experiment(
    params: &SystemParams,
    pulse: RampSpec,
    t_end: f64,
    dt: f64,
) -> Result<PhotonSourceResult, ProtocolError> {
    let model = build_photon_source(params, pulse)?;
    let rho0 = PureState::basis(model.dims.clone(), &[0, 0]).to_mixed();
    let (number_op, excited_op) = observables(&model, params);
    let (_, rows) = master_equation_expectations(
        &model,
        &rho0,
        t_end,
        dt,
        &[number_op, excited_op],
    )?;

    let waveform: Vec<(f64, f64)> =
        rows.iter().map(|(t, v)| (*t, params.kappa * v[0])).collect();
    let free_space_waveform: Vec<(f64, f64)> =
        rows.iter().map(|(t, v)| (*t, params.gamma * v[1])).collect();
    let emission_prob = trapezoid(&waveform);
    let free_space_prob = trapezoid(&free_space_waveform);
    let (_, last) = rows.last().expect("at least one integrator step");
    let residual_excitation = last[0] + last[1];

    Ok(PhotonSourceResult {
        emission_prob,
        free_space_prob,
        waveform,
        free_space_waveform,
        residual_excitation,
    })
}

fn observables(model: &SystemModel, params: &SystemParams) -> (Operator, Operator) {
    let cavity_dim = params.n_max + 1;
    let a = Operator::annihilation(cavity_dim);
    let number = kron(&Operator::identity(vec![3]), &a.dagger().matmul(&a).unwrap());
    let excited = kron(&Operator::transition(3, 2, 2), &Operator::identity(vec![cavity_dim]));
    let _ = model;
    (number, excited)
}

fn trapezoid(rows: &[(f64, f64)]) -> f64 {
    rows.windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum()
}
