use ndarray::{Array1, Array2};

use super::operator::{matvec_into, Operator};
use super::{C64, LinalgError};

/// Pure state over a composite Hilbert space; may be un-normalized while it
/// represents a conditional (no-jump) state, in which case `norm_sqr` carries
/// the accumulated survival probability.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Array1<C64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: Array1<C64>) -> Result<Self, LinalgError> {
        let d: usize = dims.iter().product();
        if amplitudes.len() != d {
            return Err(LinalgError::BadLength { got: amplitudes.len(), expected: d });
        }
        Ok(Self { dims, amplitudes })
    }

    /// Computational basis state `|indices[0], indices[1], ...>`.
    pub fn basis(dims: Vec<usize>, indices: &[usize]) -> Self {
        assert_eq!(dims.len(), indices.len(), "one index per subsystem");
        let d: usize = dims.iter().product();
        let mut flat = 0usize;
        for (dim, &idx) in dims.iter().zip(indices) {
            assert!(idx < *dim, "basis index out of range");
            flat = flat * dim + idx;
        }
        let mut amplitudes = Array1::zeros(d);
        amplitudes[flat] = C64::new(1.0, 0.0);
        Self { dims, amplitudes }
    }

    /// Superposition of basis states with the given amplitudes (not
    /// normalized automatically).
    pub fn superposition(dims: Vec<usize>, terms: &[(Vec<usize>, C64)]) -> Self {
        let d: usize = dims.iter().product();
        let mut out = Self { dims: dims.clone(), amplitudes: Array1::zeros(d) };
        for (indices, amp) in terms {
            let basis = Self::basis(dims.clone(), indices);
            out.amplitudes = out.amplitudes + basis.amplitudes.mapv(|z| z * amp);
        }
        out
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut Array1<C64> {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        assert!(n > 0.0, "cannot normalize the zero vector");
        Self { dims: self.dims.clone(), amplitudes: self.amplitudes.mapv(|z| z / n) }
    }

    pub fn inner(&self, other: &Self) -> Result<C64, LinalgError> {
        if self.dims != other.dims {
            return Err(LinalgError::DimensionMismatch(format!(
                "inner: {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product of two states.
    pub fn kron(&self, other: &Self) -> Self {
        let (da, db) = (self.dim(), other.dim());
        let mut amplitudes = Array1::zeros(da * db);
        for i in 0..da {
            for j in 0..db {
                amplitudes[i * db + j] = self.amplitudes[i] * other.amplitudes[j];
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims, amplitudes }
    }

    /// Density matrix `|psi><psi|`.
    pub fn to_mixed(&self) -> MixedState {
        let d = self.dim();
        let mut data = Array2::zeros((d, d));
        for i in 0..d {
            for j in 0..d {
                data[[i, j]] = self.amplitudes[i] * self.amplitudes[j].conj();
            }
        }
        MixedState { dims: self.dims.clone(), data }
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { dims: self.dims.clone(), amplitudes: self.amplitudes.mapv(|z| z * factor) }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Density matrix over a composite Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    dims: Vec<usize>,
    data: Array2<C64>,
}

impl MixedState {
    pub fn new(dims: Vec<usize>, data: Array2<C64>) -> Result<Self, LinalgError> {
        let d: usize = dims.iter().product();
        if data.nrows() != data.ncols() {
            return Err(LinalgError::NotSquare { rows: data.nrows(), cols: data.ncols() });
        }
        if data.nrows() != d {
            return Err(LinalgError::BadLength { got: data.nrows(), expected: d });
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self { dims, data: Array2::zeros((d, d)) }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn data(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut Array2<C64> {
        &mut self.data
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().sum()
    }

    /// Deviation from Hermiticity (max entry of `rho - rho^dag`).
    pub fn hermiticity_deviation(&self) -> f64 {
        let d = self.dim();
        let mut dev: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                dev = dev.max((self.data[[i, j]] - self.data[[j, i]].conj()).norm());
            }
        }
        dev
    }

    /// Replace `rho` by `(rho + rho^dag)/2`; the master-equation stepper calls
    /// this to keep round-off from accumulating asymmetry.
    pub fn hermitize(&mut self) {
        let d = self.dim();
        for i in 0..d {
            for j in i..d {
                let avg = (self.data[[i, j]] + self.data[[j, i]].conj()) * 0.5;
                self.data[[i, j]] = avg;
                self.data[[j, i]] = avg.conj();
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, factor: f64) {
        self.data.zip_mut_with(&other.data, |a, b| *a += b * factor);
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { dims: self.dims.clone(), data: self.data.mapv(|z| z * factor) }
    }

    /// Eigenvalues (ascending) of the Hermitian part.
    pub fn eigenvalues(&self) -> Vec<f64> {
        super::eig::eigh(&self.data).0
    }

    /// Checks the density-matrix invariants: Hermitian to 1e-10, unit trace to
    /// `trace_tol`, eigenvalues above `-1e-8`.
    pub fn validate(&self, trace_tol: f64) -> Result<(), LinalgError> {
        let dev = self.hermiticity_deviation();
        if dev > 1e-10 {
            return Err(LinalgError::NotHermitian(dev));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > trace_tol || tr.im.abs() > trace_tol {
            return Err(LinalgError::NotNormalized(tr.re));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -1e-8 {
            return Err(LinalgError::DimensionMismatch(format!(
                "negative eigenvalue {min:.3e} in density matrix"
            )));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Apply an operator to a pure state (plain matrix-vector product; the result
/// may be un-normalized).
pub fn apply(a: &Operator, psi: &PureState) -> Result<PureState, LinalgError> {
    if a.dims() != psi.dims() {
        return Err(LinalgError::DimensionMismatch(format!(
            "apply: {:?} vs {:?}",
            a.dims(),
            psi.dims()
        )));
    }
    let mut out = vec![C64::new(0.0, 0.0); psi.dim()];
    matvec_into(a.data(), psi.amplitudes().as_slice().unwrap(), &mut out);
    PureState::new(psi.dims().to_vec(), Array1::from(out))
}

/// Partial trace keeping the subsystems listed in `keep` (in their original
/// order); everything else is traced out.
pub fn partial_trace(rho: &MixedState, keep: &[usize]) -> Result<MixedState, LinalgError> {
    let n = rho.dims().len();
    let mut seen = vec![false; n];
    for &k in keep {
        if k >= n {
            return Err(LinalgError::InvalidSubsystems(format!("index {k} out of range")));
        }
        if seen[k] {
            return Err(LinalgError::InvalidSubsystems(format!("index {k} repeated")));
        }
        seen[k] = true;
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    if keep_sorted.as_slice() != keep {
        return Err(LinalgError::InvalidSubsystems(
            "keep indices must be given in ascending order".into(),
        ));
    }

    let dims = rho.dims();
    let traced: Vec<usize> = (0..n).filter(|i| !seen[*i]).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&i| dims[i]).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&i| dims[i]).collect();
    let dk: usize = keep_dims.iter().product();
    let dt: usize = traced_dims.iter().product();

    // strides of each subsystem in the flat composite index
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let flatten = |multi_keep: usize, multi_traced: usize| -> usize {
        let mut idx = 0usize;
        let mut mk = multi_keep;
        for (pos, &sub) in keep.iter().enumerate().rev() {
            let dim = dims[sub];
            idx += (mk % dim) * strides[sub];
            mk /= dim;
            let _ = pos;
        }
        let mut mt = multi_traced;
        for &sub in traced.iter().rev() {
            let dim = dims[sub];
            idx += (mt % dim) * strides[sub];
            mt /= dim;
        }
        idx
    };

    let mut out = Array2::zeros((dk, dk));
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..dt {
                acc += rho.data()[[flatten(a, t), flatten(b, t)]];
            }
            out[[a, b]] = acc;
        }
    }
    MixedState::new(keep_dims, out)
}

/// Fidelity of a density matrix against a pure target, `<t|rho|t>`.
pub fn fidelity(rho: &MixedState, target: &PureState) -> Result<f64, LinalgError> {
    if rho.dims() != target.dims() {
        return Err(LinalgError::DimensionMismatch(format!(
            "fidelity: {:?} vs {:?}",
            rho.dims(),
            target.dims()
        )));
    }
    let d = rho.dim();
    let amps = target.amplitudes();
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += amps[i].conj() * rho.data()[[i, j]] * amps[j];
        }
    }
    Ok(acc.re)
}
