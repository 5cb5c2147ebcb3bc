use ndarray::{Array1, Array2};

use super::operator::{matmul, matvec_into, Operator};
use super::state::PureState;
use super::{C64, LinalgError};

/// Largest allowed `|H| * dt` per integrator substep; keeps the local RK4
/// truncation error (`(|H| dt)^5/120`) below 1e-9 per substep.
pub const MAX_STEP_NORM: f64 = 0.04;

/// Propagate `|psi>` by `exp(-i H dt)` with fixed-step 4th-order integration
/// of the Schroedinger equation (`hbar = 1`).
///
/// `h` may be non-Hermitian; with `H - (i/2) sum L^dag L` the norm of the
/// result is non-increasing and equals the no-jump survival amplitude. The
/// substep is chosen so that `|H|_inf * dt_sub <= 0.05`.
pub fn expm_apply(h: &Operator, psi: &PureState, dt: f64) -> Result<PureState, LinalgError> {
    if h.dims() != psi.dims() {
        return Err(LinalgError::DimensionMismatch(format!(
            "expm_apply: {:?} vs {:?}",
            h.dims(),
            psi.dims()
        )));
    }
    assert!(dt > 0.0, "expm_apply requires dt > 0");
    let norm = h.norm_inf();
    let n_sub = ((norm * dt / MAX_STEP_NORM).ceil() as usize).max(1);
    let dt_sub = dt / n_sub as f64;

    let d = psi.dim();
    let m = h.data();
    let mut state: Vec<C64> = psi.amplitudes().to_vec();
    let mut k1 = vec![C64::new(0.0, 0.0); d];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    let minus_i = C64::new(0.0, -1.0);

    for _ in 0..n_sub {
        // k1 = -i H psi
        matvec_into(m, &state, &mut k1);
        for v in k1.iter_mut() {
            *v *= minus_i;
        }
        // k2 = -i H (psi + dt/2 k1)
        for i in 0..d {
            tmp[i] = state[i] + k1[i] * (dt_sub / 2.0);
        }
        matvec_into(m, &tmp, &mut k2);
        for v in k2.iter_mut() {
            *v *= minus_i;
        }
        // k3 = -i H (psi + dt/2 k2)
        for i in 0..d {
            tmp[i] = state[i] + k2[i] * (dt_sub / 2.0);
        }
        matvec_into(m, &tmp, &mut k3);
        for v in k3.iter_mut() {
            *v *= minus_i;
        }
        // k4 = -i H (psi + dt k3)
        for i in 0..d {
            tmp[i] = state[i] + k3[i] * dt_sub;
        }
        matvec_into(m, &tmp, &mut k4);
        for v in k4.iter_mut() {
            *v *= minus_i;
        }
        for i in 0..d {
            state[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt_sub / 6.0);
        }
    }

    let out = PureState::new(psi.dims().to_vec(), Array1::from(state))?;
    if !out.is_finite() {
        return Err(LinalgError::NonFinite("expm_apply result"));
    }
    Ok(out)
}

/// Dense matrix exponential `exp(A)` by scaling-and-squaring with a Taylor
/// series.
///
/// The argument is scaled so `|A/2^s|_inf <= 0.25`, expanded to 18 Taylor
/// terms (truncation below 1e-24 at that norm) and squared back up. Used to
/// compile exact per-step propagators `exp(-i H_nh dt)` for time-independent
/// models, where it is both faster and more accurate than step integration.
pub fn expm(a: &Operator) -> Operator {
    let d = a.dim();
    let norm = a.norm_inf();
    let s = if norm <= 0.25 { 0 } else { (norm / 0.25).log2().ceil() as u32 };
    let scale = 2f64.powi(s as i32);
    let scaled = a.data().mapv(|z| z / scale);

    let mut result: Array2<C64> = Array2::eye(d);
    let mut term: Array2<C64> = Array2::eye(d);
    for k in 1..=18 {
        term = matmul(&term, &scaled).mapv(|z| z / k as f64);
        result += &term;
    }
    for _ in 0..s {
        result = matmul(&result, &result);
    }
    Operator::new(a.dims().to_vec(), result).expect("square by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::apply;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn zero_hamiltonian_leaves_state_unchanged() {
        let psi = PureState::superposition(
            vec![2],
            &[(vec![0], c(0.6, 0.0)), (vec![1], c(0.0, 0.8))],
        );
        let out = expm_apply(&Operator::zeros(vec![2]), &psi, 2.7).unwrap();
        assert!(out.max_abs_diff(&psi) < 1e-12);
    }

    #[test]
    fn diagonal_phase_accumulates() {
        // H = Delta |e><e| on |e> for t = pi/Delta gives the phase -1
        let delta = 0.7;
        let h = Operator::transition(2, 1, 1).scale(c(delta, 0.0));
        let psi = PureState::basis(vec![2], &[1]);
        let out = expm_apply(&h, &psi, std::f64::consts::PI / delta).unwrap();
        let expect = psi.scale(c(-1.0, 0.0));
        assert!(out.max_abs_diff(&expect) < 1e-7);
    }

    #[test]
    fn non_hermitian_decay_matches_closed_form() {
        // H_nh = -(i/2) kappa a^dag a on a one-photon state: norm^2 = e^{-kappa t}
        let kappa = 1.0;
        let a = Operator::annihilation(2);
        let n = a.dagger().matmul(&a).unwrap();
        let h = n.scale(c(0.0, -0.5 * kappa));
        let psi = PureState::basis(vec![2], &[1]);
        let out = expm_apply(&h, &psi, 1.0).unwrap();
        assert!((out.norm_sqr() - 0.36787944117144233).abs() < 1e-6);
    }

    #[test]
    fn expm_matches_stepped_propagation() {
        // random-ish non-Hermitian generator: compare exp(-iH t)|psi> against RK4
        let mut data = ndarray::Array2::zeros((3, 3));
        data[[0, 1]] = c(0.3, 0.0);
        data[[1, 0]] = c(0.3, 0.0);
        data[[1, 2]] = c(0.1, 0.05);
        data[[2, 1]] = c(0.1, -0.05);
        data[[2, 2]] = c(0.5, -0.2);
        let h = Operator::new(vec![3], data).unwrap();
        let t = 3.0;
        let u = expm(&h.scale(c(0.0, -t)));
        let psi = PureState::basis(vec![3], &[0]);
        let via_expm = apply(&u, &psi).unwrap();
        let via_rk4 = expm_apply(&h, &psi, t).unwrap();
        assert!(via_expm.max_abs_diff(&via_rk4) < 1e-7);
    }

    #[test]
    fn expm_of_zero_is_identity() {
        let u = expm(&Operator::zeros(vec![2, 2]));
        assert!(u.max_abs_diff(&Operator::identity(vec![2, 2])) < 1e-15);
    }
}
