//! Dense Bartels-Stewart solver for `A X + X A^T + Q = 0`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const SCHUR_MAX_ITER: usize = 10_000;

/// Diagonal blocks (start, size) of a real quasi-upper-triangular matrix.
fn diagonal_blocks(t: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = t.nrows();
    let tol = 1e-14 * t.amax().max(f64::MIN_POSITIVE);
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)].abs() > tol {
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    blocks
}

/// Solve `T_ii Y + Y T_jj^T = R` for blocks of size 1 or 2.
fn solve_block(tii: &DMatrix<f64>, tjj: &DMatrix<f64>, r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let p = tii.nrows();
    let q = tjj.nrows();
    let k = p * q;
    // column-major vec: (I_q (x) T_ii + T_jj (x) I_p) vec(Y) = vec(R)
    let mut m = DMatrix::<f64>::zeros(k, k);
    for c in 0..q {
        for a in 0..p {
            for b in 0..p {
                m[(c * p + a, c * p + b)] += tii[(a, b)];
            }
        }
    }
    for c in 0..q {
        for d in 0..q {
            for a in 0..p {
                m[(c * p + a, d * p + a)] += tjj[(c, d)];
            }
        }
    }
    let rhs = DMatrix::from_column_slice(k, 1, r.as_slice());
    let y = m
        .lu()
        .solve(&rhs)
        .ok_or(Error::SolverFailure("eigenvalues of A sum to zero"))?;
    Ok(DMatrix::from_column_slice(p, q, y.as_slice()))
}

/// Solve the continuous Lyapunov equation `A X + X A^T + Q = 0`.
///
/// `A` is reduced to real Schur form `A = U T U^T`, the transformed equation
/// is solved block by block from the bottom-right corner, and the result is
/// rotated back. The returned matrix is symmetrized when `Q` is symmetric.
pub fn solve_continuous_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || q.nrows() != n || q.ncols() != n {
        return Err(Error::SolverFailure("dimension mismatch"));
    }
    let schur = a
        .clone()
        .try_schur(f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or(Error::SolverFailure("Schur decomposition did not converge"))?;
    let (u, t) = schur.unpack();
    let c = -(u.transpose() * q * &u);

    let blocks = diagonal_blocks(&t);
    let mut y = DMatrix::<f64>::zeros(n, n);
    for &(ri, si) in blocks.iter().rev() {
        for &(rj, sj) in blocks.iter().rev() {
            let mut r = c.view((ri, rj), (si, sj)).clone_owned();
            let after_i = ri + si;
            if after_i < n {
                r -= t.view((ri, after_i), (si, n - after_i)) * y.view((after_i, rj), (n - after_i, sj));
            }
            let after_j = rj + sj;
            if after_j < n {
                r -= y.view((ri, after_j), (si, n - after_j))
                    * t.view((rj, after_j), (sj, n - after_j)).transpose();
            }
            let tii = t.view((ri, ri), (si, si)).clone_owned();
            let tjj = t.view((rj, rj), (sj, sj)).clone_owned();
            let blk = solve_block(&tii, &tjj, &r)?;
            y.view_mut((ri, rj), (si, sj)).copy_from(&blk);
        }
    }
    let x = &u * y * u.transpose();
    if q == &q.transpose() {
        Ok((&x + x.transpose()) * 0.5)
    } else {
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Independent route: vectorize into an n^2 x n^2 linear system.
    fn kronecker_oracle(a: &DMatrix<f64>, q: &DMatrix<f64>) -> DMatrix<f64> {
        let n = a.nrows();
        let id = DMatrix::<f64>::identity(n, n);
        let m = id.kronecker(a) + a.kronecker(&id);
        let rhs = -DMatrix::from_column_slice(n * n, 1, q.as_slice());
        let x = m.lu().solve(&rhs).unwrap();
        DMatrix::from_column_slice(n, n, x.as_slice())
    }

    #[test]
    fn scalar_case() {
        let a = DMatrix::from_element(1, 1, -3.0);
        let q = DMatrix::from_element(1, 1, 2.0);
        let x = solve_continuous_lyapunov(&a, &q).unwrap();
        assert!((x[(0, 0)] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn damped_oscillator_has_complex_block() {
        // x' = p, p' = -x - 0.1 p + noise on p
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, -0.1]);
        let q = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 0.2]);
        let x = solve_continuous_lyapunov(&a, &q).unwrap();
        // equipartition: <x^2> = <p^2> = q22 / (2 gamma) = 1
        assert!((x[(0, 0)] - 1.0).abs() < 1e-12);
        assert!((x[(1, 1)] - 1.0).abs() < 1e-12);
        assert!(x[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn rejects_mismatched_shapes() {
        let a = DMatrix::<f64>::identity(2, 2);
        let q = DMatrix::<f64>::identity(3, 3);
        assert!(solve_continuous_lyapunov(&a, &q).is_err());
    }

    fn stable_matrix(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
        prop::collection::vec(-2.0f64..2.0, n * n).prop_map(move |v| {
            let m = DMatrix::from_row_slice(n, n, &v);
            // shift spectrum into the left half plane
            let bound = m.row_iter().map(|r| r.iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
            m - DMatrix::identity(n, n) * (bound + 0.1)
        })
    }

    proptest! {
        #[test]
        fn matches_kronecker_oracle(a in stable_matrix(6), w in prop::collection::vec(-1.0f64..1.0, 36)) {
            let g = DMatrix::from_row_slice(6, 6, &w);
            let q = &g * g.transpose();
            let x = solve_continuous_lyapunov(&a, &q).unwrap();
            let oracle = kronecker_oracle(&a, &q);
            let scale = oracle.amax().max(1e-12);
            prop_assert!((&x - &oracle).amax() < 1e-10 * scale);
            let res = &a * &x + &x * a.transpose() + &q;
            prop_assert!(res.amax() < 1e-10 * q.amax().max(1e-12));
        }
    }
}
