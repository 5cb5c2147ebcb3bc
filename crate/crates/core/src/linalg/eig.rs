use ndarray::Array2;

use super::state::MixedState;
use super::C64;

/// Eigendecomposition of a complex Hermitian matrix by cyclic Jacobi
/// rotations.
///
/// Returns `(eigenvalues ascending, eigenvectors as columns)`. Matrices here
/// never exceed dimension ~40, where Jacobi is plenty fast and needs no
/// external LAPACK. The strictly lower triangle is ignored (the upper triangle
/// and diagonal define the Hermitian input).
pub fn eigh(m: &Array2<C64>) -> (Vec<f64>, Array2<C64>) {
    let d = m.nrows();
    assert_eq!(d, m.ncols(), "eigh requires a square matrix");
    let mut a = m.clone();
    // enforce exact Hermiticity of the working copy
    for i in 0..d {
        a[[i, i]] = C64::new(a[[i, i]].re, 0.0);
        for j in (i + 1)..d {
            let avg = (a[[i, j]] + a[[j, i]].conj()) * 0.5;
            a[[i, j]] = avg;
            a[[j, i]] = avg.conj();
        }
    }
    let mut v: Array2<C64> = Array2::eye(d);

    let off = |a: &Array2<C64>| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in (i + 1)..d {
                s += a[[i, j]].norm_sqr();
            }
        }
        s
    };

    for _sweep in 0..100 {
        if off(&a) < 1e-26 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[[p, q]];
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = apq / r; // e^{i phi}
                let tau = (a[[q, q]].re - a[[p, p]].re) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // columns of the rotation: J[p,p]=c, J[q,p]=-s e^{-i phi},
                // J[p,q]=s e^{i phi}, J[q,q]=c; update A <- J^dag A J, V <- V J
                for k in 0..d {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = akp * c - akq * s * phase.conj();
                    a[[k, q]] = akp * s * phase + akq * c;
                }
                for k in 0..d {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = apk * c - aqk * s * phase;
                    a[[q, k]] = apk * s * phase.conj() + aqk * c;
                }
                for k in 0..d {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = vkp * c - vkq * s * phase.conj();
                    v[[k, q]] = vkp * s * phase + vkq * c;
                }
            }
        }
    }

    let mut pairs: Vec<(f64, usize)> =
        (0..d).map(|i| (a[[i, i]].re, i)).collect();
    pairs.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let eigenvalues: Vec<f64> = pairs.iter().map(|(w, _)| *w).collect();
    let mut vectors = Array2::zeros((d, d));
    for (new_col, (_, old_col)) in pairs.iter().enumerate() {
        for k in 0..d {
            vectors[[k, new_col]] = v[[k, *old_col]];
        }
    }
    (eigenvalues, vectors)
}

/// Trace distance `(1/2) ||rho - sigma||_1` between two density matrices.
pub fn trace_distance(rho: &MixedState, sigma: &MixedState) -> f64 {
    assert_eq!(rho.dims(), sigma.dims(), "trace_distance: dims mismatch");
    let diff = rho.data() - sigma.data();
    let (w, _) = eigh(&diff);
    0.5 * w.iter().map(|x| x.abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PureState;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigh_diagonal() {
        let m = ndarray::arr2(&[
            [c(3.0, 0.0), c(0.0, 0.0)],
            [c(0.0, 0.0), c(-1.0, 0.0)],
        ]);
        let (w, _) = eigh(&m);
        assert!((w[0] + 1.0).abs() < 1e-12);
        assert!((w[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_known_two_level() {
        // [[0, v], [v, delta]] has eigenvalues (delta +- sqrt(delta^2+4v^2))/2
        let (v, delta) = (0.35, 1.2);
        let m = ndarray::arr2(&[[c(0.0, 0.0), c(v, 0.0)], [c(v, 0.0), c(delta, 0.0)]]);
        let (w, _) = eigh(&m);
        let disc = (delta * delta + 4.0 * v * v).sqrt();
        assert!((w[0] - (delta - disc) / 2.0).abs() < 1e-12);
        assert!((w[1] - (delta + disc) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_reconstructs_matrix() {
        // deterministic pseudo-random Hermitian matrix
        let d = 7;
        let mut m = Array2::zeros((d, d));
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for i in 0..d {
            let diag = next();
            m[[i, i]] = c(diag, 0.0);
            for j in (i + 1)..d {
                let z = c(next(), next());
                m[[i, j]] = z;
                m[[j, i]] = z.conj();
            }
        }
        let (w, v) = eigh(&m);
        // check M V = V diag(w) entrywise
        for col in 0..d {
            for row in 0..d {
                let mut mv = c(0.0, 0.0);
                for k in 0..d {
                    mv += m[[row, k]] * v[[k, col]];
                }
                let dv = v[[row, col]] * w[col];
                assert!((mv - dv).norm() < 1e-10, "residual at ({row},{col})");
            }
        }
        // eigenvalue sum equals trace
        let tr: f64 = (0..d).map(|i| m[[i, i]].re).sum();
        let sum: f64 = w.iter().sum();
        assert!((tr - sum).abs() < 1e-10);
    }

    #[test]
    fn trace_distance_orthogonal_pure_states_is_one() {
        let rho = PureState::basis(vec![2], &[0]).to_mixed();
        let sigma = PureState::basis(vec![2], &[1]).to_mixed();
        assert!((trace_distance(&rho, &sigma) - 1.0).abs() < 1e-12);
        assert!(trace_distance(&rho, &rho) < 1e-12);
    }
}
