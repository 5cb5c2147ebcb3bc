//! The telegraph (electron-shelving) entanglement scheme: two atoms with
//! ground states `|0>, |1>` and excited state `|e>`, identical drives on
//! both.
//!
//! The 1-e transition couples to the cavity with detuning `Delta`; a laser
//! with Rabi frequency `Omega_L` drives 0-e with the same detuning (Raman
//! resonance with the cavity), and a weak resonant field `Omega_M` mixes the
//! ground states. In the frame where both drives are stationary,
//!
//! `H = sum_i [ (Omega_M/2)(|0>_i<1| + h.c.) + (Omega_L/2)(|e>_i<0| + h.c.) ]
//!      + Delta sum_i |e>_i<e| + g sum_i (a^dag |1>_i<e| + h.c.)`.
//!
//! The antisymmetric ground state `|a01> = (|01> - |10>)/sqrt(2)` is then the
//! only state that never scatters photons into the cavity: the fluorescence
//! signal switches between macroscopic light and dark periods, and a long
//! dark period heralds the maximally entangled state.

use crate::linalg::{kron_all, Operator, PureState, C64};

use super::{fock_labels, labels, Detectability, Hamiltonian, JumpChannel, ModelError,
            SystemModel, SystemParams};

const ATOM_DIM: usize = 3;
/// Index of the excited level `|e>`.
const E: usize = 2;

/// Build the two-atom telegraph model. Spontaneous decay from `|e>` goes to
/// `|0>` and `|1>` with equal rates by default (`branching_to_zero = 0.5`).
pub fn build_telegraph_system(params: &SystemParams) -> Result<SystemModel, ModelError> {
    params.validate()?;
    let cavity_dim = params.n_max + 1;
    let dims = vec![ATOM_DIM, ATOM_DIM, cavity_dim];

    let i_atom = Operator::identity(vec![ATOM_DIM]);
    let i_cav = Operator::identity(vec![cavity_dim]);
    let t01 = Operator::transition(ATOM_DIM, 0, 1); // |0><1|
    let te0 = Operator::transition(ATOM_DIM, E, 0); // |e><0|
    let t1e = Operator::transition(ATOM_DIM, 1, E); // |1><e|
    let pe = Operator::transition(ATOM_DIM, E, E);
    let a = Operator::annihilation(cavity_dim);

    let on_atom = |op: &Operator, site: usize| -> Operator {
        match site {
            0 => kron_all(&[op, &i_atom, &i_cav]),
            1 => kron_all(&[&i_atom, op, &i_cav]),
            _ => unreachable!(),
        }
    };

    let mut h = Operator::zeros(dims.clone());
    for site in 0..2 {
        let mix = on_atom(&t01, site);
        h = h
            .add(&mix.add(&mix.dagger()).unwrap().scale(C64::new(0.5 * params.omega_m, 0.0)))
            .unwrap();
        let raman = on_atom(&te0, site);
        h = h
            .add(&raman.add(&raman.dagger()).unwrap().scale(C64::new(0.5 * params.omega_l, 0.0)))
            .unwrap();
        h = h.add(&on_atom(&pe, site).scale(C64::new(params.delta, 0.0))).unwrap();
        let lower = match site {
            0 => kron_all(&[&t1e, &i_atom, &a.dagger()]),
            _ => kron_all(&[&i_atom, &t1e, &a.dagger()]),
        };
        h = h
            .add(&lower.add(&lower.dagger()).unwrap().scale(C64::new(params.g, 0.0)))
            .unwrap();
    }

    let mut jump_channels = vec![JumpChannel {
        op: kron_all(&[&i_atom, &i_atom, &a]).scale(C64::new(params.kappa.sqrt(), 0.0)),
        label: "cavity".into(),
        detectability: Detectability::CavityOutput,
    }];
    for site in 0..2 {
        for target in 0..2 {
            let branch = if target == 0 {
                params.branching_to_zero
            } else {
                1.0 - params.branching_to_zero
            };
            if branch == 0.0 {
                continue;
            }
            let t = Operator::transition(ATOM_DIM, target, E);
            jump_channels.push(JumpChannel {
                op: on_atom(&t, site).scale(C64::new((params.gamma * branch).sqrt(), 0.0)),
                label: format!("atom{}_to_{}", site + 1, target),
                detectability: Detectability::FreeSpace,
            });
        }
    }

    let regime_warnings = telegraph_regime_warnings(params);
    Ok(SystemModel {
        hamiltonian: Hamiltonian::Static(h),
        jump_channels,
        dims,
        basis_labels: vec![
            labels(&["0", "1", "e"]),
            labels(&["0", "1", "e"]),
            fock_labels(params.n_max),
        ],
        regime_warnings,
    })
}

/// Regime of the telegraph scheme: `Omega_M < g, kappa` and
/// `kappa, Gamma, Omega_L << Delta`, with a factor-5 margin on the strong
/// inequalities; the dwell-time formulas additionally require
/// `Omega_L^2/(4 Delta Omega_M) << 1`.
pub fn telegraph_regime_warnings(params: &SystemParams) -> Vec<String> {
    let mut warnings = Vec::new();
    let margin = 5.0;
    if params.omega_m.abs() >= params.g {
        warnings.push(format!(
            "telegraph regime: |Omega_M| = {:.3} should be below g = {:.3}",
            params.omega_m.abs(),
            params.g
        ));
    }
    if params.omega_m.abs() >= params.kappa {
        warnings.push(format!(
            "telegraph regime: |Omega_M| = {:.3} should be below kappa = {:.3}",
            params.omega_m.abs(),
            params.kappa
        ));
    }
    for (name, v) in [("kappa", params.kappa), ("Gamma", params.gamma), ("|Omega_L|", params.omega_l.abs())] {
        if params.delta.abs() < margin * v {
            warnings.push(format!(
                "telegraph regime: Delta = {:.3} not >> {name} = {v:.3} (margin {margin})",
                params.delta.abs()
            ));
        }
    }
    let validity = validity_ratio(params);
    if validity >= 0.25 {
        warnings.push(format!(
            "telegraph regime: Omega_L^2/(4 Delta Omega_M) = {validity:.3} not << 1"
        ));
    }
    warnings
}

/// The dwell-time formula validity parameter `Omega_L^2 / (4 Delta Omega_M)`.
pub fn validity_ratio(params: &SystemParams) -> f64 {
    params.omega_l * params.omega_l / (4.0 * params.delta * params.omega_m)
}

/// Analytic dwell-time scales of the telegraph signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TelegraphTimescales {
    /// Mean time between cavity photons during a light period,
    /// `T_cav = 3 kappa Delta^2 / (4 g^2 Omega_L^2)`.
    pub t_cav: f64,
    /// Mean dark-period duration, `T_dark = (64/9) C T_cav`.
    pub t_dark: f64,
    /// Mean light-period duration, `T_light = (64/3) C T_cav`.
    pub t_light: f64,
    /// `Omega_L^2/(4 Delta Omega_M)`; the formulas hold when this is small.
    pub validity_ratio: f64,
}

/// Evaluate the analytic timescales for a parameter set.
pub fn telegraph_timescales(params: &SystemParams) -> Result<TelegraphTimescales, ModelError> {
    params.validate()?;
    if params.omega_l == 0.0 {
        return Err(ModelError::OutOfRange("telegraph_timescales requires Omega_L != 0".into()));
    }
    if params.delta == 0.0 {
        return Err(ModelError::OutOfRange("telegraph_timescales requires Delta != 0".into()));
    }
    let t_cav = 3.0 * params.kappa * params.delta * params.delta
        / (4.0 * params.g * params.g * params.omega_l * params.omega_l);
    let c = params.cooperativity();
    Ok(TelegraphTimescales {
        t_cav,
        t_dark: 64.0 / 9.0 * c * t_cav,
        t_light: 64.0 / 3.0 * c * t_cav,
        validity_ratio: validity_ratio(params),
    })
}

/// The maximally entangled ground dark state `(|01> - |10>)/sqrt(2)` on the
/// two-atom space (dims `[3, 3]`).
pub fn ground_dark_state() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::superposition(
        vec![ATOM_DIM, ATOM_DIM],
        &[(vec![0, 1], C64::new(s, 0.0)), (vec![1, 0], C64::new(-s, 0.0))],
    )
}
