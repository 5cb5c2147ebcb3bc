use ndarray::Array2;

use crate::linalg::{MixedState, Operator, C64};
use crate::models::SystemModel;

use super::EngineError;

/// Integrate the Lindblad master equation
/// `drho/dt = -i[H, rho] + sum_k (L_k rho L_k^dag - (1/2){L_k^dag L_k, rho})`
/// with fixed-step RK4, returning `n_snapshots + 1` evenly spaced
/// `(time, state)` pairs including `t = 0` and `t = t_end`.
///
/// The state is re-symmetrized after every step; trace is preserved to 1e-6
/// over runs at the recommended step (`|H| dt <~ 0.2`).
pub fn master_equation_solve(
    model: &SystemModel,
    rho0: &MixedState,
    t_end: f64,
    dt: f64,
    n_snapshots: usize,
) -> Result<Vec<(f64, MixedState)>, EngineError> {
    let observer = |_t: f64, _rho: &MixedState| ();
    solve_with_observer(model, rho0, t_end, dt, n_snapshots, observer)
}

/// Like [`master_equation_solve`] but additionally records the expectation
/// values `Tr(O rho)` of the given Hermitian observables at every integrator
/// step (for flux integrals and convergence checks). Returns
/// `(snapshots, per-step rows of (time, expectations))`.
pub fn master_equation_expectations(
    model: &SystemModel,
    rho0: &MixedState,
    t_end: f64,
    dt: f64,
    observables: &[Operator],
) -> Result<(Vec<(f64, MixedState)>, Vec<(f64, Vec<f64>)>), EngineError> {
    let mut rows: Vec<(f64, Vec<f64>)> = Vec::new();
    let snaps = {
        let observer = |t: f64, rho: &MixedState| {
            let values = observables
                .iter()
                .map(|o| expectation(o, rho))
                .collect::<Vec<f64>>();
            rows.push((t, values));
        };
        solve_with_observer(model, rho0, t_end, dt, 1, observer)?
    };
    Ok((snaps, rows))
}

fn expectation(op: &Operator, rho: &MixedState) -> f64 {
    // Tr(O rho) = sum_ij O[i,j] rho[j,i]
    let d = rho.dim();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += op.data()[[i, j]] * rho.data()[[j, i]];
        }
    }
    acc.re
}

fn solve_with_observer<F: FnMut(f64, &MixedState)>(
    model: &SystemModel,
    rho0: &MixedState,
    t_end: f64,
    dt: f64,
    n_snapshots: usize,
    mut observe: F,
) -> Result<Vec<(f64, MixedState)>, EngineError> {
    if rho0.dims() != model.dims.as_slice() {
        return Err(EngineError::Invalid(format!(
            "initial density matrix dims {:?} do not match model dims {:?}",
            rho0.dims(),
            model.dims
        )));
    }
    if !(t_end > 0.0) || !(dt > 0.0) {
        return Err(EngineError::Invalid("t_end and dt must be positive".into()));
    }
    let n_steps = (t_end / dt).ceil() as usize;
    let h = t_end / n_steps as f64;
    let n_snapshots = n_snapshots.clamp(1, n_steps);
    let snap_stride = (n_steps / n_snapshots).max(1);

    let channels: Vec<(Array2<C64>, Array2<C64>, Array2<C64>)> = model
        .jump_channels
        .iter()
        .map(|ch| {
            let l = ch.op.data().clone();
            let ldag = ch.op.dagger().into_data();
            let ldl = ch.op.dagger().matmul(&ch.op).unwrap().into_data();
            (l, ldag, ldl)
        })
        .collect();
    let static_h = model.hamiltonian.is_static().then(|| model.hamiltonian.at(0.0));

    let rhs = |t: f64, rho: &Array2<C64>| -> Array2<C64> {
        let h_op = match &static_h {
            Some(h) => h.clone(),
            None => model.hamiltonian.at(t),
        };
        let hm = h_op.data();
        let mut out = mat_mul(hm, rho);
        out -= &mat_mul(rho, hm);
        out.mapv_inplace(|z| z * C64::new(0.0, -1.0));
        for (l, ldag, ldl) in &channels {
            out += &mat_mul(&mat_mul(l, rho), ldag);
            let anti = mat_mul(ldl, rho);
            out.scaled_add(C64::new(-0.5, 0.0), &anti);
            let anti2 = mat_mul(rho, ldl);
            out.scaled_add(C64::new(-0.5, 0.0), &anti2);
        }
        out
    };

    let mut rho = rho0.clone();
    let mut out = vec![(0.0, rho.clone())];
    observe(0.0, &rho);
    for step in 0..n_steps {
        let t = step as f64 * h;
        let y = rho.data();
        let k1 = rhs(t, y);
        let k2 = rhs(t + h / 2.0, &(y + &k1.mapv(|z| z * (h / 2.0))));
        let k3 = rhs(t + h / 2.0, &(y + &k2.mapv(|z| z * (h / 2.0))));
        let k4 = rhs(t + h, &(y + &k3.mapv(|z| z * h)));
        let mut next = y.clone();
        next.scaled_add(C64::new(h / 6.0, 0.0), &k1);
        next.scaled_add(C64::new(h / 3.0, 0.0), &k2);
        next.scaled_add(C64::new(h / 3.0, 0.0), &k3);
        next.scaled_add(C64::new(h / 6.0, 0.0), &k4);
        if next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(EngineError::Linalg(crate::linalg::LinalgError::NonFinite(
                "master equation state",
            )));
        }
        rho = MixedState::new(rho0.dims().to_vec(), next).unwrap();
        rho.hermitize();
        let t_next = (step + 1) as f64 * h;
        observe(t_next, &rho);
        if (step + 1) % snap_stride == 0 || step + 1 == n_steps {
            if out.last().map(|(tt, _)| (tt - t_next).abs() > 1e-12).unwrap_or(true) {
                out.push((t_next, rho.clone()));
            }
        }
    }
    Ok(out)
}

fn mat_mul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (n, m) = (a.nrows(), b.ncols());
    let k = a.ncols();
    let mut out = Array2::zeros((n, m));
    for i in 0..n {
        for p in 0..k {
            let aip = a[[i, p]];
            if aip == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..m {
                out[[i, j]] += aip * b[[p, j]];
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PureState;
    use crate::models::{Detectability, Hamiltonian, JumpChannel};

    fn decay_model(kappa: f64, dim: usize) -> SystemModel {
        SystemModel {
            hamiltonian: Hamiltonian::Static(Operator::zeros(vec![dim])),
            jump_channels: vec![JumpChannel {
                op: Operator::annihilation(dim).scale(C64::new(kappa.sqrt(), 0.0)),
                label: "cavity".into(),
                detectability: Detectability::CavityOutput,
            }],
            dims: vec![dim],
            basis_labels: vec![(0..dim).map(|n| n.to_string()).collect()],
            regime_warnings: vec![],
        }
    }

    #[test]
    fn constant_without_channels() {
        let mut model = decay_model(1.0, 2);
        model.jump_channels.clear();
        let rho0 = PureState::superposition(
            vec![2],
            &[(vec![0], C64::new(0.6, 0.0)), (vec![1], C64::new(0.8, 0.0))],
        )
        .to_mixed();
        let snaps = master_equation_solve(&model, &rho0, 5.0, 0.01, 5).unwrap();
        for (_, rho) in &snaps {
            assert!(rho.max_abs_diff(&rho0) < 1e-9);
        }
    }

    #[test]
    fn single_mode_decay_matches_closed_form() {
        let kappa = 0.8;
        let model = decay_model(kappa, 2);
        let rho0 = PureState::basis(vec![2], &[1]).to_mixed();
        let snaps = master_equation_solve(&model, &rho0, 3.0, 0.002, 6).unwrap();
        for (t, rho) in &snaps {
            let p1 = rho.data()[[1, 1]].re;
            assert!((p1 - (-kappa * t).exp()).abs() < 1e-6, "t={t}");
            assert!((rho.trace().re - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn trace_and_positivity_preserved_on_telegraph_model() {
        let p = crate::models::SystemParams::telegraph_defaults();
        let model = crate::models::build_telegraph_system(&p).unwrap();
        let rho0 = PureState::basis(model.dims.clone(), &[0, 0, 0]).to_mixed();
        let snaps = master_equation_solve(&model, &rho0, 20.0, 0.01, 4).unwrap();
        let (_, last) = snaps.last().unwrap();
        assert!((last.trace().re - 1.0).abs() < 1e-6);
        let min_eig = last.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        assert!(min_eig > -1e-6, "min eigenvalue {min_eig}");
        assert!(last.hermiticity_deviation() < 1e-10);
    }
}
