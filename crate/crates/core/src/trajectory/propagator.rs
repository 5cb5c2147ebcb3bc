use crate::linalg::{expm, Operator, C64};

/// Number of binary subdivisions used to locate a jump inside one step;
/// gives a time resolution of `dt / 128`, within the documented `dt/100`.
pub(crate) const BISECT_DEPTH: u32 = 7;

/// Exact step propagators `exp(-i H_nh dt / 2^j)` for `j = 0..=BISECT_DEPTH`,
/// compiled once per (static model, dt).
///
/// All powers derive from a single matrix exponential of the finest step, so
/// the dyadic family is exactly self-consistent under squaring.
pub(crate) struct PropagatorSet {
    /// `levels[j] = exp(-i H_nh dt / 2^j)`; `levels[0]` is the full step.
    levels: Vec<Operator>,
}

impl PropagatorSet {
    pub fn compile(h_nh: &Operator, dt: f64) -> Self {
        let finest = dt / 2f64.powi(BISECT_DEPTH as i32);
        let gen = h_nh.scale(C64::new(0.0, -finest));
        let mut levels = vec![expm(&gen)];
        for _ in 0..BISECT_DEPTH {
            let prev = levels.last().unwrap();
            levels.push(prev.matmul(prev).unwrap());
        }
        levels.reverse();
        Self { levels }
    }

    pub fn full_step(&self) -> &Operator {
        &self.levels[0]
    }

    /// Propagator for `dt / 2^j`, `j <= BISECT_DEPTH`.
    pub fn fraction(&self, j: u32) -> &Operator {
        &self.levels[j as usize]
    }
}
