use crate::linalg::{fidelity, partial_trace, MixedState, PureState};
use crate::models::SystemModel;

use super::{derive_thinning_seed, run_ensemble, thin_records, EngineError, TrajectoryConfig};

/// One point of the no-click fidelity curve: conditioning window length,
/// conditional fidelity (`None` when the selection is empty, reported as
/// undefined rather than zero) and the number of selected trajectories.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoClickPoint {
    pub window: f64,
    pub fidelity: Option<f64>,
    pub n_selected: usize,
}

/// Fidelity of the state prepared by observing *no* detected photon for a
/// time `t`, for each `t` in `t_grid`.
///
/// Window convention: all windows trail a common observation time `t_obs`
/// chosen well past the dwell-time mixing scale, i.e. a trajectory enters the
/// `t`-selection when its detected record has no click in `[t_obs - t,
/// t_obs]`. Detection inefficiency is modeled by binomial thinning of the
/// full-information trajectories (seeded deterministically per trajectory)
/// followed by post-selection; the selected pure states at `t_obs` are
/// averaged into a density matrix and compared against `target`.
///
/// `target` may live on the full model space or on a leading subset of its
/// subsystems, in which case the complement is traced out first.
#[allow(clippy::too_many_arguments)]
pub fn conditional_no_click_fidelity(
    model: &SystemModel,
    psi0: &PureState,
    eta: f64,
    t_grid: &[f64],
    n_traj: usize,
    master_seed: u64,
    target: &PureState,
    t_obs: f64,
    dt: f64,
) -> Result<Vec<NoClickPoint>, EngineError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(EngineError::Invalid(format!("eta = {eta} not in [0, 1]")));
    }
    if t_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EngineError::Invalid("t_grid must be strictly increasing".into()));
    }
    if t_grid.iter().any(|&t| t < 0.0 || t > t_obs) {
        return Err(EngineError::Invalid("windows must lie in [0, t_obs]".into()));
    }
    if (target.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(EngineError::Invalid("target state must be normalized".into()));
    }
    let keep = matching_prefix(model, target)?;

    let ensemble = run_ensemble(model, psi0, n_traj, TrajectoryConfig::new(t_obs, dt), master_seed)?;

    // last *detected* click per trajectory after thinning
    let last_detected: Vec<Option<f64>> = ensemble
        .trajectories
        .iter()
        .enumerate()
        .map(|(idx, traj)| {
            let thinned =
                thin_records(&traj.records, eta, derive_thinning_seed(master_seed, idx as u64));
            thinned.iter().rev().find(|r| r.detected).map(|r| r.time)
        })
        .collect();

    let mut points = Vec::with_capacity(t_grid.len());
    for &window in t_grid {
        let cutoff = t_obs - window;
        let selected: Vec<usize> = (0..n_traj)
            .filter(|&i| match last_detected[i] {
                None => true,
                Some(t_last) => t_last <= cutoff,
            })
            .collect();
        if selected.is_empty() {
            points.push(NoClickPoint { window, fidelity: None, n_selected: 0 });
            continue;
        }
        let mut rho = MixedState::zeros(model.dims.clone());
        let w = 1.0 / selected.len() as f64;
        for &i in &selected {
            rho.add_scaled(&ensemble.trajectories[i].final_state.to_mixed(), w);
        }
        let reduced = match &keep {
            Some(indices) => partial_trace(&rho, indices)?,
            None => rho,
        };
        let f = fidelity(&reduced, target)?;
        points.push(NoClickPoint { window, fidelity: Some(f), n_selected: selected.len() });
    }
    Ok(points)
}

/// Returns `Some(keep_indices)` when the target lives on a strict leading
/// subset of the model's subsystems, `None` when it covers the full space.
fn matching_prefix(model: &SystemModel, target: &PureState) -> Result<Option<Vec<usize>>, EngineError> {
    if target.dims() == model.dims.as_slice() {
        return Ok(None);
    }
    let k = target.dims().len();
    if k < model.dims.len() && target.dims() == &model.dims[..k] {
        return Ok(Some((0..k).collect()));
    }
    Err(EngineError::Invalid(format!(
        "target dims {:?} match neither the model dims {:?} nor a leading prefix",
        target.dims(),
        model.dims
    )))
}
