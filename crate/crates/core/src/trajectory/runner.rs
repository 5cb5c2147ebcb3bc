use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::linalg::{apply, expm_apply, Operator, PureState, C64, MAX_STEP_NORM};
use crate::models::{Detectability, Hamiltonian, SystemModel};

use super::propagator::{PropagatorSet, BISECT_DEPTH};
use super::{derive_trajectory_seed, Ensemble, EngineError, PhotonRecord, TrajectoryResult};

/// Norm-squared floor below which the integration is reported as failed
/// rather than silently renormalized.
const NORM_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryConfig {
    pub t_end: f64,
    /// Outer step at which the norm is monitored for threshold crossings;
    /// also the snapshot/jump-time quantum (jumps are located to `dt/128`).
    pub dt: f64,
    /// When set, normalized state snapshots are stored every
    /// `snapshot_interval` (quantized to achieved step times).
    pub snapshot_interval: Option<f64>,
}

impl TrajectoryConfig {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self { t_end, dt, snapshot_interval: None }
    }

    pub fn with_snapshots(mut self, interval: f64) -> Self {
        self.snapshot_interval = Some(interval);
        self
    }

    fn validate(&self) -> Result<(), EngineError> {
        if !(self.t_end > 0.0) || !(self.dt > 0.0) {
            return Err(EngineError::Invalid("t_end and dt must be positive".into()));
        }
        if self.dt > self.t_end {
            return Err(EngineError::Invalid("dt must not exceed t_end".into()));
        }
        Ok(())
    }
}

/// Unravel one stochastic trajectory of the model.
///
/// Standard quantum-jump scheme: deterministic evolution under
/// `H - (i/2) sum L^dag L`; when the squared norm crosses a pre-drawn uniform
/// threshold a jump fires, the channel is sampled with probability
/// proportional to `<psi|L_k^dag L_k|psi>`, the state is renormalized and a
/// fresh threshold drawn. Every jump is appended to the record with
/// `detected = (detectability == CavityOutput)`; detector inefficiency is
/// applied afterwards by [`super::thin_records`].
pub fn run_trajectory(
    model: &SystemModel,
    psi0: &PureState,
    cfg: TrajectoryConfig,
    seed: u64,
) -> Result<TrajectoryResult, EngineError> {
    cfg.validate()?;
    check_initial_state(model, psi0)?;
    let engine = Engine::prepare(model, cfg.dt);
    engine.run(psi0, cfg, seed)
}

/// Run `n_traj` independent trajectories in parallel; results are ordered by
/// trajectory index regardless of the execution schedule, and seeds derive
/// deterministically from `master_seed`.
pub fn run_ensemble(
    model: &SystemModel,
    psi0: &PureState,
    n_traj: usize,
    cfg: TrajectoryConfig,
    master_seed: u64,
) -> Result<Ensemble, EngineError> {
    if n_traj == 0 {
        return Err(EngineError::Invalid("n_traj must be at least 1".into()));
    }
    cfg.validate()?;
    check_initial_state(model, psi0)?;
    let engine = Engine::prepare(model, cfg.dt);
    let results: Result<Vec<TrajectoryResult>, EngineError> = (0..n_traj)
        .into_par_iter()
        .map(|index| {
            let seed = derive_trajectory_seed(master_seed, index as u64);
            engine.run(psi0, cfg, seed).map_err(|e| EngineError::TrajectoryFailed {
                index,
                seed,
                source: Box::new(e),
            })
        })
        .collect();
    Ok(Ensemble { trajectories: results?, master_seed, t_end: cfg.t_end, dt: cfg.dt })
}

fn check_initial_state(model: &SystemModel, psi0: &PureState) -> Result<(), EngineError> {
    if psi0.dims() != model.dims.as_slice() {
        return Err(EngineError::Invalid(format!(
            "initial state dims {:?} do not match model dims {:?}",
            psi0.dims(),
            model.dims
        )));
    }
    if (psi0.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(EngineError::Invalid(format!(
            "initial state not normalized (norm^2 = {})",
            psi0.norm_sqr()
        )));
    }
    Ok(())
}

/// Shared per-run machinery: compiled propagators for static Hamiltonians or
/// the pieces needed to integrate a time-dependent one.
enum Evolution {
    Static { props: PropagatorSet, h_nh: Operator },
    Driven { static_part: Operator, drive: Operator, ramp: crate::models::RampSpec, norm_bound: f64 },
}

struct Engine<'m> {
    model: &'m SystemModel,
    evolution: Evolution,
}

impl<'m> Engine<'m> {
    fn prepare(model: &'m SystemModel, dt: f64) -> Self {
        let evolution = match &model.hamiltonian {
            Hamiltonian::Static(_) => {
                let h_nh = model.non_hermitian_hamiltonian(0.0);
                Evolution::Static { props: PropagatorSet::compile(&h_nh, dt), h_nh }
            }
            Hamiltonian::Ramped { base, drive, ramp } => {
                let static_part = base.add(&model.decay_term()).unwrap();
                let norm_bound =
                    static_part.norm_inf() + ramp.amplitude.abs() * drive.norm_inf();
                Evolution::Driven {
                    static_part,
                    drive: drive.clone(),
                    ramp: *ramp,
                    norm_bound,
                }
            }
        };
        Self { model, evolution }
    }

    /// Propagate the conditional state from `t` by `step`.
    fn advance(&self, psi: &PureState, t: f64, step: f64, full: bool) -> PureState {
        match &self.evolution {
            Evolution::Static { props, h_nh } => {
                if full {
                    apply(props.full_step(), psi).unwrap()
                } else {
                    expm_apply(h_nh, psi, step).unwrap()
                }
            }
            Evolution::Driven { static_part, drive, ramp, norm_bound } => {
                integrate_driven(static_part, drive, ramp, *norm_bound, psi, t, step)
            }
        }
    }

    /// Locate the threshold crossing inside `[t, t + step]` to `step/2^7`.
    /// Returns the pre-jump state and its offset from `t`. The invariant
    /// `norm^2(state) >= threshold` holds on entry and throughout.
    fn bisect_jump(
        &self,
        psi: &PureState,
        t: f64,
        step: f64,
        full: bool,
        threshold: f64,
    ) -> (PureState, f64) {
        match (&self.evolution, full) {
            (Evolution::Static { props, .. }, true) => {
                let mut state = psi.clone();
                let mut offset = 0.0;
                for j in 1..=BISECT_DEPTH {
                    let candidate = apply(props.fraction(j), &state).unwrap();
                    if candidate.norm_sqr() >= threshold {
                        state = candidate;
                        offset += step / 2f64.powi(j as i32);
                    }
                }
                (state, offset)
            }
            _ => {
                // generic halving with re-integration from the last good state
                let mut state = psi.clone();
                let mut offset = 0.0;
                let mut span = step;
                for _ in 0..BISECT_DEPTH {
                    span /= 2.0;
                    let candidate = self.advance(&state, t + offset, span, false);
                    if candidate.norm_sqr() >= threshold {
                        state = candidate;
                        offset += span;
                    }
                }
                (state, offset)
            }
        }
    }

    fn run(
        &self,
        psi0: &PureState,
        cfg: TrajectoryConfig,
        seed: u64,
    ) -> Result<TrajectoryResult, EngineError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut psi = psi0.clone();
        let mut t = 0.0_f64;
        // threshold in (0, 1]: norm^2 = 1 never triggers a jump
        let mut threshold: f64 = 1.0 - rng.gen::<f64>();
        let mut records: Vec<PhotonRecord> = Vec::new();
        let mut snapshots: Option<Vec<(f64, PureState)>> =
            cfg.snapshot_interval.map(|_| Vec::new());
        let mut next_snapshot = cfg.snapshot_interval.unwrap_or(f64::INFINITY);

        let time_eps = cfg.dt * 1e-9;
        while t < cfg.t_end - time_eps {
            let remaining = cfg.t_end - t;
            let full = remaining >= cfg.dt * (1.0 - 1e-12);
            let step = if full { cfg.dt } else { remaining };
            let candidate = self.advance(&psi, t, step, full);
            let n2 = candidate.norm_sqr();
            if !n2.is_finite() {
                return Err(EngineError::Linalg(crate::linalg::LinalgError::NonFinite(
                    "trajectory state",
                )));
            }
            if n2 < threshold {
                // jump inside this step: locate, collapse, restart threshold
                let (pre_jump, offset) = self.bisect_jump(&psi, t, step, full, threshold);
                let t_jump = t + offset;
                let (channel, collapsed) = self.sample_jump(&pre_jump, t_jump, &mut rng)?;
                let detectability = self.model.jump_channels[channel].detectability;
                records.push(PhotonRecord {
                    time: t_jump,
                    channel: channel as u16,
                    detectability,
                    detected: detectability == Detectability::CavityOutput,
                });
                psi = collapsed;
                t = t_jump;
                threshold = 1.0 - rng.gen::<f64>();
            } else {
                if n2 < NORM_FLOOR {
                    return Err(EngineError::NormUnderflow { time: t + step, norm_sqr: n2 });
                }
                psi = candidate;
                t += step;
                while t >= next_snapshot - time_eps {
                    if let Some(snaps) = snapshots.as_mut() {
                        snaps.push((t, psi.normalized()));
                    }
                    next_snapshot += cfg.snapshot_interval.unwrap();
                }
            }
        }

        Ok(TrajectoryResult {
            records,
            final_state: psi.normalized(),
            state_snapshots: snapshots,
            seed,
        })
    }

    /// Sample the jump channel proportional to `||L_k psi||^2` and return the
    /// collapsed, renormalized state.
    fn sample_jump(
        &self,
        psi: &PureState,
        t: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<(usize, PureState), EngineError> {
        let jumped: Vec<PureState> = self
            .model
            .jump_channels
            .iter()
            .map(|ch| apply(&ch.op, psi).unwrap())
            .collect();
        let weights: Vec<f64> = jumped.iter().map(|s| s.norm_sqr()).collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 || !total.is_finite() {
            return Err(EngineError::NormUnderflow { time: t, norm_sqr: total });
        }
        let mut u = rng.gen::<f64>() * total;
        let mut channel = weights.len() - 1;
        for (k, w) in weights.iter().enumerate() {
            if u < *w {
                channel = k;
                break;
            }
            u -= w;
        }
        Ok((channel, jumped[channel].normalized()))
    }
}

/// RK4 integration of `dpsi/dt = -i H_nh(t) psi` for the ramped Hamiltonian,
/// with `H_nh(t) = static_part + envelope(t) * drive` and substeps chosen so
/// `|H| dt <= 0.05`.
fn integrate_driven(
    static_part: &Operator,
    drive: &Operator,
    ramp: &crate::models::RampSpec,
    norm_bound: f64,
    psi: &PureState,
    t0: f64,
    dt: f64,
) -> PureState {
    let n_sub = ((norm_bound * dt / MAX_STEP_NORM).ceil() as usize).max(1);
    let h = dt / n_sub as f64;
    let d = psi.dim();
    let minus_i = C64::new(0.0, -1.0);

    let sm = static_part.data();
    let dm = drive.data();
    let mut state: Vec<C64> = psi.amplitudes().to_vec();
    let mut stage = vec![C64::new(0.0, 0.0); d];
    let mut k1 = stage.clone();
    let mut k2 = stage.clone();
    let mut k3 = stage.clone();
    let mut k4 = stage.clone();
    let mut tmp = stage.clone();

    let apply_h = |t: f64, x: &[C64], out: &mut Vec<C64>, scratch: &mut Vec<C64>| {
        crate::linalg::operator_matvec(sm, x, out);
        crate::linalg::operator_matvec(dm, x, scratch);
        let env = ramp.envelope(t);
        for (o, s) in out.iter_mut().zip(scratch.iter()) {
            *o = (*o + s * env) * minus_i;
        }
    };

    for n in 0..n_sub {
        let t = t0 + n as f64 * h;
        apply_h(t, &state, &mut k1, &mut stage);
        for i in 0..d {
            tmp[i] = state[i] + k1[i] * (h / 2.0);
        }
        apply_h(t + h / 2.0, &tmp, &mut k2, &mut stage);
        for i in 0..d {
            tmp[i] = state[i] + k2[i] * (h / 2.0);
        }
        apply_h(t + h / 2.0, &tmp, &mut k3, &mut stage);
        for i in 0..d {
            tmp[i] = state[i] + k3[i] * h;
        }
        apply_h(t + h, &tmp, &mut k4, &mut stage);
        for i in 0..d {
            state[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    PureState::new(psi.dims().to_vec(), ndarray::Array1::from(state)).unwrap()
}
