//! Cross-checks between the stochastic trajectory engine and deterministic
//! oracles: conditional no-jump norms and the master-equation average.

use cavsim_core::linalg::{expm_apply, trace_distance, PureState, C64};
use cavsim_core::models::{build_telegraph_system, build_zeno_system, SystemParams};
use cavsim_core::trajectory::{
    master_equation_solve, run_ensemble, TrajectoryConfig,
};

#[test]
fn zeno_no_emission_fraction_matches_no_jump_norm() {
    // fraction of trajectories with zero jumps == squared norm of the
    // conditional no-jump state, within 2 sigma binomial error
    let p = SystemParams::zeno_defaults();
    let model = build_zeno_system(&p).unwrap();
    let psi0 = PureState::basis(model.dims.clone(), &[0, 1, 0]);
    let t_end = 150.0;

    let h_nh = model.non_hermitian_hamiltonian(0.0);
    let conditional = expm_apply(&h_nh, &psi0, t_end).unwrap();
    let survival = conditional.norm_sqr();

    let n = 2000usize;
    let ens = run_ensemble(&model, &psi0, n, TrajectoryConfig::new(t_end, 0.5), 314).unwrap();
    let no_jump = ens.trajectories.iter().filter(|t| t.records.is_empty()).count();
    let frac = no_jump as f64 / n as f64;
    let sigma = (survival * (1.0 - survival) / n as f64).sqrt();
    assert!(
        (frac - survival).abs() < 2.0 * sigma + 1e-3,
        "fraction {frac} vs survival {survival} (sigma {sigma})"
    );
}

#[test]
fn ensemble_average_matches_master_equation_zeno() {
    // bright initial state |12, 0>: decays through both channels
    let p = SystemParams::zeno_defaults();
    let model = build_zeno_system(&p).unwrap();
    let psi0 = PureState::basis(model.dims.clone(), &[1, 2, 0]);
    let t_end = 30.0;

    let n = 3000usize;
    let cfg = TrajectoryConfig::new(t_end, 0.1);
    let ens = run_ensemble(&model, &psi0, n, cfg, 2718).unwrap();
    let rho_traj = ens.average_final_density();

    let snaps = master_equation_solve(&model, &psi0.to_mixed(), t_end, 0.01, 1).unwrap();
    let (_, rho_me) = snaps.last().unwrap();
    let d = trace_distance(&rho_traj, rho_me);
    // MC error at n = 3000 is ~ sqrt(D)/sqrt(n) ~ 0.03; acceptance runs 1e4
    assert!(d < 0.05, "trace distance {d}");
}

#[test]
fn telegraph_dark_state_emits_no_cavity_photons() {
    // evolve |a01, 0> conditionally for 10/kappa: integrated cavity emission
    // stays below 1e-5 (rate < 1e-6 kappa)
    let p = SystemParams::telegraph_defaults();
    let model = build_telegraph_system(&p).unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let a01 = PureState::superposition(
        model.dims.clone(),
        &[(vec![0, 1, 0], C64::new(s, 0.0)), (vec![1, 0, 0], C64::new(-s, 0.0))],
    );
    let t_end = 10.0 / p.kappa;
    let snaps =
        master_equation_solve(&model, &a01.to_mixed(), t_end, 0.005, 20).unwrap();
    // integrate kappa <n> over the run with the trapezoid rule on snapshots
    let number = {
        use cavsim_core::linalg::{kron_all, Operator};
        let a = Operator::annihilation(p.n_max + 1);
        kron_all(&[
            &Operator::identity(vec![3]),
            &Operator::identity(vec![3]),
            &a.dagger().matmul(&a).unwrap(),
        ])
    };
    let flux: Vec<(f64, f64)> = snaps
        .iter()
        .map(|(t, rho)| {
            let mut n_exp = C64::new(0.0, 0.0);
            for i in 0..rho.dim() {
                for j in 0..rho.dim() {
                    n_exp += number.data()[[i, j]] * rho.data()[[j, i]];
                }
            }
            (*t, p.kappa * n_exp.re)
        })
        .collect();
    let emitted: f64 = flux
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum();
    assert!(emitted < 1e-5, "cavity emission probability {emitted:.3e}");
}

#[test]
fn telegraph_steady_state_populates_dark_sector() {
    // long-time master equation from |00, 0>: the antisymmetric ground state
    // acquires weight (dark periods must occur)
    let p = SystemParams::telegraph_defaults();
    let model = build_telegraph_system(&p).unwrap();
    let rho0 = PureState::basis(model.dims.clone(), &[0, 0, 0]).to_mixed();
    // several multiples of T_dark mixing would be ideal; a few hundred /g is
    // enough to see clear weight transfer
    let snaps = master_equation_solve(&model, &rho0, 400.0, 0.01, 1).unwrap();
    let (_, rho) = snaps.last().unwrap();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let a01 = PureState::superposition(
        model.dims.clone(),
        &[(vec![0, 1, 0], C64::new(s, 0.0)), (vec![1, 0, 0], C64::new(-s, 0.0))],
    );
    let f = cavsim_core::linalg::fidelity(rho, &a01).unwrap();
    assert!(f > 0.005, "a01 weight {f}");
}
