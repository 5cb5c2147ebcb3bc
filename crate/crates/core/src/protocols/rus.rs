//! Repeat-until-success photon-pair gate, at the abstract state-map level.
//!
//! Each atomic qubit is entangled with a freshly generated time-bin photon,
//! `alpha|0> + beta|1> -> alpha|0, E> + beta|1, L>`; a joint measurement of
//! the photon pair in a basis of two maximally entangled and two product
//! states then acts back on the atoms. Detecting a maximally entangled pair
//! heralds an entangling phase gate (controlled-Z up to local phases);
//! detecting a product state heralds a local phase map, after which the
//! attempt is repeated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{PureState, C64};
use crate::trajectory::derive_trajectory_seed;

use super::ProtocolError;

/// Time-bin basis indices on the photon factor.
const EARLY: usize = 0;
const LATE: usize = 1;

/// Classification of one measurement attempt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeClass {
    /// The induced atomic map is locally equivalent to controlled-Z
    /// (maximally entangled photon-pair outcome).
    Entangling,
    /// The induced map is a local (product) phase map.
    Local,
    /// Photon loss, or an outcome whose induced map is neither.
    Failure,
}

impl std::fmt::Display for OutcomeClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OutcomeClass::Entangling => write!(f, "entangling"),
            OutcomeClass::Local => write!(f, "local"),
            OutcomeClass::Failure => write!(f, "failure"),
        }
    }
}

/// Orthonormal photon-pair measurement basis (four states on dims `[2, 2]`).
#[derive(Debug, Clone)]
pub struct PairBasis {
    states: [PureState; 4],
}

impl PairBasis {
    pub fn new(states: [PureState; 4]) -> Result<Self, ProtocolError> {
        for s in &states {
            if s.dims() != [2, 2] {
                return Err(ProtocolError::Invalid(
                    "pair-basis states must live on the two-photon space".into(),
                ));
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                let ip = states[i].inner(&states[j])?;
                let expect = if i == j { 1.0 } else { 0.0 };
                if (ip - C64::new(expect, 0.0)).norm() > 1e-10 {
                    return Err(ProtocolError::Invalid(format!(
                        "basis not orthonormal: <b{i}|b{j}> = {ip}"
                    )));
                }
            }
        }
        Ok(Self { states })
    }

    pub fn states(&self) -> &[PureState; 4] {
        &self.states
    }

    /// Classify a basis state by the singular values of its 2x2 amplitude
    /// matrix: both 1/sqrt(2) -> maximally entangled (entangling herald), one
    /// zero -> product (local herald), anything else -> failure class.
    ///
    /// For a full-support state the maximal-entanglement condition is
    /// algebraically the same as its induced diagonal map being locally
    /// equivalent to controlled-Z.
    pub fn classify(&self, k: usize) -> OutcomeClass {
        let amps = self.states[k].amplitudes();
        // B = [[a_EE, a_EL], [a_LE, a_LL]]; eigenvalues of B^dag B
        let bee = amps[EARLY * 2 + EARLY];
        let bel = amps[EARLY * 2 + LATE];
        let ble = amps[LATE * 2 + EARLY];
        let bll = amps[LATE * 2 + LATE];
        let g00 = bee.norm_sqr() + ble.norm_sqr();
        let g11 = bel.norm_sqr() + bll.norm_sqr();
        let g01 = (bee.conj() * bel + ble.conj() * bll).norm();
        let tr = g00 + g11;
        let det = g00 * g11 - g01 * g01;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        let (hi, lo) = (tr / 2.0 + disc, tr / 2.0 - disc);
        if (hi - lo).abs() < 1e-10 {
            OutcomeClass::Entangling
        } else if lo < 1e-10 {
            OutcomeClass::Local
        } else {
            OutcomeClass::Failure
        }
    }
}

/// The linear-optics pair basis: two maximally entangled states and two
/// product states,
/// `{(|EE> + |LL>)/sqrt(2), (|EE> - |LL>)/sqrt(2), |EL>, |LE>}`.
pub fn default_pair_basis() -> PairBasis {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let dims = vec![2usize, 2usize];
    let phi_plus = PureState::superposition(
        dims.clone(),
        &[(vec![EARLY, EARLY], C64::new(s, 0.0)), (vec![LATE, LATE], C64::new(s, 0.0))],
    );
    let phi_minus = PureState::superposition(
        dims.clone(),
        &[(vec![EARLY, EARLY], C64::new(s, 0.0)), (vec![LATE, LATE], C64::new(-s, 0.0))],
    );
    let el = PureState::basis(dims.clone(), &[EARLY, LATE]);
    let le = PureState::basis(dims, &[LATE, EARLY]);
    PairBasis::new([phi_plus, phi_minus, el, le]).expect("canonical basis is orthonormal")
}

/// Encode one atomic qubit into atom x time-bin-photon:
/// `alpha|0> + beta|1>  ->  alpha|0, E> + beta|1, L>`.
pub fn rus_encode(atom: &PureState) -> Result<PureState, ProtocolError> {
    if atom.dims() != [2] {
        return Err(ProtocolError::Invalid("rus_encode expects a single qubit".into()));
    }
    if (atom.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(ProtocolError::Invalid("rus_encode expects a normalized state".into()));
    }
    let mut amps = ndarray::Array1::zeros(4);
    amps[0 * 2 + EARLY] = atom.amplitudes()[0];
    amps[1 * 2 + LATE] = atom.amplitudes()[1];
    Ok(PureState::new(vec![2, 2], amps)?)
}

/// Encode a two-qubit atomic state into atoms x photon pair (dims
/// `[2, 2, 2, 2]` ordered atom1, atom2, photon1, photon2):
/// `sum_xy c_xy |xy>  ->  sum_xy c_xy |xy> |bin(x) bin(y)>`.
pub fn rus_encode_pair(atoms: &PureState) -> Result<PureState, ProtocolError> {
    if atoms.dims() != [2, 2] {
        return Err(ProtocolError::Invalid("rus_encode_pair expects a two-qubit state".into()));
    }
    if (atoms.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(ProtocolError::Invalid("rus_encode_pair expects a normalized state".into()));
    }
    let mut amps = ndarray::Array1::zeros(16);
    for x in 0..2 {
        for y in 0..2 {
            let c = atoms.amplitudes()[x * 2 + y];
            amps[((x * 2 + y) * 2 + x) * 2 + y] = c;
        }
    }
    Ok(PureState::new(vec![2, 2, 2, 2], amps)?)
}

/// Result of one photon-pair measurement attempt.
#[derive(Debug, Clone)]
pub struct RusAttempt {
    /// Measured pair-basis index; `None` when no pair detection happened
    /// (photon loss without a dark count).
    pub outcome_index: Option<u8>,
    pub outcome_class: OutcomeClass,
    /// Renormalized two-qubit atomic state after the attempt.
    pub post_state: PureState,
    /// Whether the detectors reported a pair. With `dark_count_prob = 0`,
    /// `herald` implies `photons_lost == 0`; dark counts can fake a herald on
    /// a lost-photon event.
    pub herald: bool,
    pub photons_lost: u8,
}

/// Measure the photon pair of an encoded state.
///
/// Each photon is independently lost with probability `loss_prob`. On any
/// loss the attempt fails: the environment is taken to absorb the photons in
/// the time-bin basis (which collapses the atoms onto a computational state,
/// keeping the post-state pure), and a dark count fakes a herald with
/// probability `dark_count_prob`. Otherwise the pair outcome is sampled with
/// Born probabilities, the atoms collapse accordingly, and the outcome is
/// classified.
pub fn rus_measure(
    joint: &PureState,
    basis: &PairBasis,
    loss_prob: f64,
    dark_count_prob: f64,
    seed: u64,
) -> Result<RusAttempt, ProtocolError> {
    if joint.dims() != [2, 2, 2, 2] {
        return Err(ProtocolError::Invalid(
            "rus_measure expects an encoded atoms x photon-pair state".into(),
        ));
    }
    if !(0.0..=1.0).contains(&loss_prob) || !(0.0..=1.0).contains(&dark_count_prob) {
        return Err(ProtocolError::Invalid("probabilities must lie in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lost1 = rng.gen::<f64>() < loss_prob;
    let lost2 = rng.gen::<f64>() < loss_prob;

    if lost1 || lost2 {
        let photons_lost = lost1 as u8 + lost2 as u8;
        // environment measures the time bins: Born sample over (p1, p2)
        let mut weights = [0.0f64; 4];
        for x in 0..2 {
            for y in 0..2 {
                for p1 in 0..2 {
                    for p2 in 0..2 {
                        weights[p1 * 2 + p2] +=
                            joint.amplitudes()[((x * 2 + y) * 2 + p1) * 2 + p2].norm_sqr();
                    }
                }
            }
        }
        let pick = sample_index(&weights, rng.gen::<f64>());
        let (p1, p2) = (pick / 2, pick % 2);
        let mut amps = ndarray::Array1::zeros(4);
        for x in 0..2 {
            for y in 0..2 {
                amps[x * 2 + y] = joint.amplitudes()[((x * 2 + y) * 2 + p1) * 2 + p2];
            }
        }
        let post_state = PureState::new(vec![2, 2], amps)?.normalized();
        let herald = rng.gen::<f64>() < dark_count_prob;
        let outcome_index = herald.then(|| (rng.gen::<f64>() * 4.0) as u8);
        return Ok(RusAttempt {
            outcome_index,
            outcome_class: OutcomeClass::Failure,
            post_state,
            herald,
            photons_lost,
        });
    }

    // Born weights of the four pair outcomes
    let mut projections: Vec<PureState> = Vec::with_capacity(4);
    let mut weights = [0.0f64; 4];
    for (k, b) in basis.states().iter().enumerate() {
        let mut amps = ndarray::Array1::zeros(4);
        for x in 0..2 {
            for y in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for p1 in 0..2 {
                    for p2 in 0..2 {
                        acc += b.amplitudes()[p1 * 2 + p2].conj()
                            * joint.amplitudes()[((x * 2 + y) * 2 + p1) * 2 + p2];
                    }
                }
                amps[x * 2 + y] = acc;
            }
        }
        let proj = PureState::new(vec![2, 2], amps)?;
        weights[k] = proj.norm_sqr();
        projections.push(proj);
    }
    let k = sample_index(&weights, rng.gen::<f64>());
    Ok(RusAttempt {
        outcome_index: Some(k as u8),
        outcome_class: basis.classify(k),
        post_state: projections[k].normalized(),
        herald: true,
        photons_lost: 0,
    })
}

fn sample_index(weights: &[f64; 4], u: f64) -> usize {
    let total: f64 = weights.iter().sum();
    let mut threshold = u * total;
    for (k, w) in weights.iter().enumerate() {
        if threshold < *w {
            return k;
        }
        threshold -= w;
    }
    3
}

/// Local `|1>`-phase corrections `(theta1, theta2)` that bring the induced
/// diagonal map of outcome `k` to canonical form: the `|01>`/`|10>` phases
/// are removed where defined, leaving controlled-Z for a full-support
/// entangling outcome and the phase-free Bell projector for the
/// degenerate-support ones.
pub fn correction_phases(basis: &PairBasis, k: usize) -> (f64, f64) {
    let amps = basis.states()[k].amplitudes();
    // induced map m_xy = conj(<bin(x) bin(y)|b_k>)
    let m00 = amps[EARLY * 2 + EARLY].conj();
    let m01 = amps[EARLY * 2 + LATE].conj();
    let m10 = amps[LATE * 2 + EARLY].conj();
    let m11 = amps[LATE * 2 + LATE].conj();
    let tol = 1e-12;
    let has = |z: C64| z.norm() > tol;
    if has(m00) && has(m01) && has(m10) {
        ((m00 / m10).arg(), (m00 / m01).arg())
    } else if has(m00) && has(m11) && !has(m01) && !has(m10) {
        ((m00 / m11).arg(), 0.0)
    } else if has(m01) && has(m10) && !has(m00) && !has(m11) {
        ((m01 / m10).arg(), 0.0)
    } else {
        (0.0, 0.0)
    }
}

fn apply_phase_correction(state: &PureState, theta1: f64, theta2: f64) -> PureState {
    let mut amps = state.amplitudes().clone();
    for x in 0..2 {
        for y in 0..2 {
            let phase = C64::from_polar(1.0, theta1 * x as f64 + theta2 * y as f64);
            amps[x * 2 + y] *= phase;
        }
    }
    PureState::new(vec![2, 2], amps).unwrap()
}

/// Result of a repeat-until-success gate run.
#[derive(Debug, Clone)]
pub struct RusGateResult {
    pub final_state: PureState,
    pub attempts_used: usize,
    pub success: bool,
    pub class_history: Vec<OutcomeClass>,
}

/// Repeat encode-and-measure until an entangling herald (success), a failure
/// (photon loss or inconclusive outcome), or `max_attempts` is reached.
///
/// Local heralds apply their known phase correction and retry; the entangling
/// herald applies the correction bringing the map to canonical controlled-Z /
/// Bell form and stops. Attempt seeds derive deterministically from `seed`.
pub fn rus_gate(
    atoms: &PureState,
    loss_prob: f64,
    max_attempts: usize,
    seed: u64,
) -> Result<RusGateResult, ProtocolError> {
    if max_attempts < 1 {
        return Err(ProtocolError::Invalid("max_attempts must be at least 1".into()));
    }
    let basis = default_pair_basis();
    let mut state = atoms.clone();
    let mut class_history = Vec::new();
    for attempt in 1..=max_attempts {
        let joint = rus_encode_pair(&state)?;
        let att = rus_measure(
            &joint,
            &basis,
            loss_prob,
            0.0,
            derive_trajectory_seed(seed, attempt as u64),
        )?;
        class_history.push(att.outcome_class);
        match att.outcome_class {
            OutcomeClass::Entangling => {
                let k = att.outcome_index.unwrap() as usize;
                let (t1, t2) = correction_phases(&basis, k);
                return Ok(RusGateResult {
                    final_state: apply_phase_correction(&att.post_state, t1, t2),
                    attempts_used: attempt,
                    success: true,
                    class_history,
                });
            }
            OutcomeClass::Local => {
                let k = att.outcome_index.unwrap() as usize;
                let (t1, t2) = correction_phases(&basis, k);
                state = apply_phase_correction(&att.post_state, t1, t2);
            }
            OutcomeClass::Failure => {
                return Ok(RusGateResult {
                    final_state: att.post_state,
                    attempts_used: attempt,
                    success: false,
                    class_history,
                });
            }
        }
    }
    Ok(RusGateResult {
        final_state: state,
        attempts_used: max_attempts,
        success: false,
        class_history,
    })
}
