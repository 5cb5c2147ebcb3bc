//! Cross-cutting model invariants: Hermiticity of every builder's H(t) at
//! random times and Fock-truncation convergence of the default models.

use cavsim_core::linalg::PureState;
use cavsim_core::models::{
    build_photon_source, build_telegraph_system, build_zeno_system, RampShape, RampSpec,
    SystemParams,
};
use cavsim_core::protocols::{photon_source_experiment, zeno_gate_experiment};
use rand::{Rng, SeedableRng};

#[test]
fn hamiltonians_hermitian_at_100_random_times() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
    let zeno = build_zeno_system(&SystemParams::zeno_defaults()).unwrap();
    let tele = build_telegraph_system(&SystemParams::telegraph_defaults()).unwrap();
    let src = build_photon_source(
        &SystemParams::source_defaults(),
        RampSpec::new(RampShape::SinSquared, 50.0, 2.0).unwrap(),
    )
    .unwrap();
    for _ in 0..100 {
        let t = rng.gen::<f64>() * 200.0;
        for model in [&zeno, &tele, &src] {
            assert!(model.hamiltonian.at(t).is_hermitian(1e-10), "t = {t}");
        }
    }
}

#[test]
fn zeno_gate_converged_in_fock_truncation() {
    // n_max = 2 vs n_max = 3: observables shift by < 1%
    let p2 = SystemParams::zeno_defaults();
    let mut p3 = p2.clone();
    p3.n_max = 3;
    let input = PureState::basis(vec![2, 2], &[0, 1]);
    let a = zeno_gate_experiment(&p2, &input).unwrap();
    let b = zeno_gate_experiment(&p3, &input).unwrap();
    assert!((a.conditional_fidelity - b.conditional_fidelity).abs() < 0.01);
    assert!((a.success_prob - b.success_prob).abs() / a.success_prob < 0.01);
}

#[test]
fn photon_source_converged_in_fock_truncation() {
    let p2 = SystemParams::source_defaults();
    let mut p3 = p2.clone();
    p3.n_max = 3;
    let pulse = RampSpec::new(RampShape::SinSquared, 20.0, 2.0).unwrap();
    let a = photon_source_experiment(&p2, pulse, 80.0, 0.02).unwrap();
    let b = photon_source_experiment(&p3, pulse, 80.0, 0.02).unwrap();
    assert!((a.emission_prob - b.emission_prob).abs() / a.emission_prob < 0.01);
}

#[test]
fn telegraph_master_equation_converged_in_fock_truncation() {
    use cavsim_core::trajectory::master_equation_solve;
    let p2 = SystemParams::telegraph_defaults();
    let mut p3 = p2.clone();
    p3.n_max = 3;
    let m2 = build_telegraph_system(&p2).unwrap();
    let m3 = build_telegraph_system(&p3).unwrap();
    let rho2 = PureState::basis(m2.dims.clone(), &[0, 0, 0]).to_mixed();
    let rho3 = PureState::basis(m3.dims.clone(), &[0, 0, 0]).to_mixed();
    let s2 = master_equation_solve(&m2, &rho2, 50.0, 0.01, 1).unwrap();
    let s3 = master_equation_solve(&m3, &rho3, 50.0, 0.01, 1).unwrap();
    // compare a physical observable: total excited-state population
    let pe = |snaps: &Vec<(f64, cavsim_core::linalg::MixedState)>, dims: &[usize]| {
        let (_, rho) = snaps.last().unwrap();
        let dc: usize = dims[2];
        let mut pop = 0.0;
        for i in 0..rho.dim() {
            let a1 = i / (3 * dc);
            let a2 = (i / dc) % 3;
            if a1 == 2 || a2 == 2 {
                pop += rho.data()[[i, i]].re;
            }
        }
        pop
    };
    let e2 = pe(&s2, &m2.dims);
    let e3 = pe(&s3, &m3.dims);
    assert!((e2 - e3).abs() / e2.max(1e-12) < 0.01, "e2={e2:.3e} e3={e3:.3e}");
}
