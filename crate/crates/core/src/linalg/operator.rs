use ndarray::Array2;

use super::{C64, LinalgError};

/// Dense operator on a composite Hilbert space.
///
/// `dims` lists the subsystem dimensions in tensor order (first factor varies
/// slowest); `data` is the `D x D` matrix with `D = dims.iter().product()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dims: Vec<usize>,
    data: Array2<C64>,
}

impl Operator {
    /// Wrap a matrix, checking squareness and the dims product.
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

    /// Like [`Operator::new`] but additionally verifies Hermiticity to 1e-12.
    pub fn new_hermitian(dims: Vec<usize>, data: Array2<C64>) -> Result<Self, LinalgError> {
        let op = Self::new(dims, data)?;
        let dev = op.hermiticity_deviation();
        if dev >= 1e-12 {
            return Err(LinalgError::NotHermitian(dev));
        }
        Ok(op)
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self { dims, data: Array2::zeros((d, d)) }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self { dims, data: Array2::eye(d) }
    }

    /// Single-subsystem transition operator `|i><j|` embedded as a bare factor
    /// (dims = [dim]). Combine with [`kron`] to place it in a larger space.
    pub fn transition(dim: usize, i: usize, j: usize) -> Self {
        assert!(i < dim && j < dim, "transition indices out of range");
        let mut data = Array2::zeros((dim, dim));
        data[[i, j]] = C64::new(1.0, 0.0);
        Self { dims: vec![dim], data }
    }

    /// Bosonic annihilation operator truncated to `dim` Fock states
    /// (`a|n> = sqrt(n)|n-1>`).
    pub fn annihilation(dim: usize) -> Self {
        let mut data = Array2::zeros((dim, dim));
        for n in 1..dim {
            data[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
        }
        Self { dims: vec![dim], data }
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

    pub fn into_data(self) -> Array2<C64> {
        self.data
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let data = self.data.t().mapv(|z| z.conj());
        Self { dims: self.dims.clone(), data }
    }

    /// Max-entry deviation from Hermiticity, `max |A - A^dag|`.
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

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() < tol
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dims != other.dims {
            return Err(LinalgError::DimensionMismatch(format!(
                "matmul: {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(Self { dims: self.dims.clone(), data: matmul(&self.data, &other.data) })
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { dims: self.dims.clone(), data: self.data.mapv(|z| z * factor) }
    }

    pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.dims != other.dims {
            return Err(LinalgError::DimensionMismatch(format!(
                "add: {:?} vs {:?}",
                self.dims, other.dims
            )));
        }
        Ok(Self { dims: self.dims.clone(), data: &self.data + &other.data })
    }

    pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn trace(&self) -> C64 {
        self.data.diag().sum()
    }

    /// Infinity norm (max absolute row sum); cheap bound on the spectral norm,
    /// used to pick propagator substeps.
    pub fn norm_inf(&self) -> f64 {
        let d = self.dim();
        let mut best: f64 = 0.0;
        for i in 0..d {
            let row: f64 = (0..d).map(|j| self.data[[i, j]].norm()).sum();
            best = best.max(row);
        }
        best
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut dev: f64 = 0.0;
        for (x, y) in self.data.iter().zip(other.data.iter()) {
            dev = dev.max((x - y).norm());
        }
        dev
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Kronecker product; result dims are the concatenation of the factor dims.
///
/// `(A ⊗ B)[(i*Db+k), (j*Db+l)] = A[i,j] * B[k,l]`.
pub fn kron(a: &Operator, b: &Operator) -> Operator {
    let (da, db) = (a.dim(), b.dim());
    let mut data = Array2::zeros((da * db, da * db));
    for i in 0..da {
        for j in 0..da {
            let aij = a.data[[i, j]];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    data[[i * db + k, j * db + l]] = aij * b.data[[k, l]];
                }
            }
        }
    }
    let mut dims = a.dims.clone();
    dims.extend_from_slice(&b.dims);
    Operator { dims, data }
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all(ops: &[&Operator]) -> Operator {
    assert!(!ops.is_empty());
    let mut out = ops[0].clone();
    for op in &ops[1..] {
        out = kron(&out, op);
    }
    out
}

/// Dense complex matrix product. ndarray's generic `dot` does not use a fast
/// kernel for `Complex64`, and the matrices here are tiny, so a plain loop
/// over rows is both simple and fast enough.
pub(crate) fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    let (n, m) = (a.nrows(), b.ncols());
    let k = a.ncols();
    assert_eq!(k, b.nrows());
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

/// `out = M v` on raw slices; the hot loop of the trajectory engine.
pub(crate) fn matvec_into(m: &Array2<C64>, v: &[C64], out: &mut [C64]) {
    let d = m.nrows();
    debug_assert_eq!(v.len(), d);
    debug_assert_eq!(out.len(), d);
    let data = m.as_slice().expect("operator storage must be contiguous");
    for (i, o) in out.iter_mut().enumerate() {
        let row = &data[i * d..(i + 1) * d];
        let mut acc = C64::new(0.0, 0.0);
        for (a, x) in row.iter().zip(v.iter()) {
            acc += a * x;
        }
        *o = acc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = Operator::identity(vec![2]);
        let i3 = Operator::identity(vec![3]);
        let i6 = kron(&i2, &i3);
        assert_eq!(i6.dims(), &[2, 3]);
        assert_eq!(i6.dim(), 6);
        assert!(i6.max_abs_diff(&Operator::new(vec![2, 3], Array2::eye(6)).unwrap()) < 1e-15);
    }

    #[test]
    fn kron_tracks_dims() {
        let a = Operator::zeros(vec![2, 3]);
        let b = Operator::zeros(vec![2]);
        let ab = kron(&a, &b);
        assert_eq!(ab.dims(), &[2, 3, 2]);
        assert_eq!(ab.dim(), 12);
    }

    #[test]
    fn sigma_x_kron_identity_flips_first_qubit() {
        let sx = Operator::new(
            vec![2],
            ndarray::arr2(&[[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]),
        )
        .unwrap();
        let op = kron(&sx, &Operator::identity(vec![2]));
        let psi = PureStateHelper::basis(vec![2, 2], &[0, 0]);
        let out = super::super::apply(&op, &psi).unwrap();
        let expect = PureStateHelper::basis(vec![2, 2], &[1, 0]);
        assert!(out.max_abs_diff(&expect) < 1e-15);
    }

    // small local helper to avoid a circular import in the test above
    use super::super::PureState as PureStateHelper;

    #[test]
    fn annihilation_matrix_elements() {
        let a = Operator::annihilation(3);
        assert_eq!(a.data()[[0, 1]], c(1.0, 0.0));
        assert!((a.data()[[1, 2]].re - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.data()[[2, 2]], c(0.0, 0.0));
    }

    #[test]
    fn hermitian_constructor_rejects_non_hermitian() {
        let m = ndarray::arr2(&[[c(0.0, 0.0), c(1.0, 0.0)], [c(0.5, 0.0), c(0.0, 0.0)]]);
        assert!(Operator::new_hermitian(vec![2], m).is_err());
    }

    #[test]
    fn matmul_against_known_product() {
        let a = Operator::new(
            vec![2],
            ndarray::arr2(&[[c(1.0, 0.0), c(0.0, 1.0)], [c(0.0, 0.0), c(2.0, 0.0)]]),
        )
        .unwrap();
        let b = Operator::new(
            vec![2],
            ndarray::arr2(&[[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]]),
        )
        .unwrap();
        let ab = a.matmul(&b).unwrap();
        assert!((ab.data()[[0, 0]] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((ab.data()[[0, 1]] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((ab.data()[[1, 0]] - c(2.0, 0.0)).norm() < 1e-15);
    }
}
