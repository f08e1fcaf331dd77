//! Cyclic Jacobi diagonalization for small complex Hermitian matrices.

use super::{CMatrix, C64};
use crate::error::{Error, Result};

/// Default tolerance on `max |h - h^dagger|` before a matrix is rejected.
pub const DEFAULT_HERMITIAN_TOL: f64 = 1e-9;

const MAX_SWEEPS: usize = 64;

/// All eigenvalues of a Hermitian matrix in ascending order.
///
/// The input is symmetrized as `(h + h^dagger) / 2` after the Hermiticity
/// check, so asymmetry below `tol` does not leak into the spectrum.
pub fn hermitian_eigenvalues(h: &CMatrix, tol: f64) -> Result<Vec<f64>> {
    let asymmetry = h.hermitian_asymmetry();
    if asymmetry > tol {
        return Err(Error::NotHermitian { asymmetry, tol });
    }
    let n = h.dim();
    let mut a = CMatrix::from_fn(n, |r, c| (h[(r, c)] + h[(c, r)].conj()) * 0.5);
    for i in 0..n {
        a[(i, i)] = C64::new(a[(i, i)].re, 0.0);
    }
    jacobi_sweeps(&mut a);
    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Smallest eigenvalue, using [`DEFAULT_HERMITIAN_TOL`].
pub fn min_eigenvalue(h: &CMatrix) -> Result<f64> {
    Ok(hermitian_eigenvalues(h, DEFAULT_HERMITIAN_TOL)?[0])
}

fn off_diagonal_sq(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for r in 0..n {
        for c in (r + 1)..n {
            s += a[(r, c)].norm_sqr();
        }
    }
    s
}

fn jacobi_sweeps(a: &mut CMatrix) {
    let n = a.dim();
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return;
    }
    let target = (f64::EPSILON * scale).powi(2);
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_sq(a) <= target {
            return;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(a, p, q);
            }
        }
    }
}

/// Zeroes `a[p][q]` with the unitary `J = E R`, where `E` rotates the phase
/// of column `q` so the pivot is real and `R` is the classic real rotation.
fn rotate(a: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Skip rotations that cannot change the diagonal at working precision.
    if r <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r;
    let tau = (aqq - app) / (2.0 * r);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let ph_conj = phase.conj();
    let n = a.dim();

    // A <- A J
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c - akq * ph_conj * s;
        a[(k, q)] = akp * s + akq * ph_conj * c;
    }
    // A <- J^dagger A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c - aqk * phase * s;
        a[(q, k)] = apk * s + aqk * phase * c;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::Pauli;

    #[test]
    fn pauli_spectra() {
        for p in Pauli::ALL {
            let ev = hermitian_eigenvalues(&p.matrix(), 1e-12).unwrap();
            assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15, "{p:?}: {ev:?}");
        }
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(min_eigenvalue(&CMatrix::identity(8)).unwrap(), 1.0);
        assert_eq!(hermitian_eigenvalues(&CMatrix::zeros(4), 0.0).unwrap(), vec![0.0; 4]);
    }

    #[test]
    fn rejects_non_hermitian_with_diagnostic() {
        let m = CMatrix::from_real_rows([[0.0, 1.0], [0.0, 0.0]]);
        let err = hermitian_eigenvalues(&m, 1e-9).unwrap_err();
        match err {
            Error::NotHermitian { asymmetry, .. } => assert_eq!(asymmetry, 1.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(err_text(&m).contains("1.000e0"));
    }

    fn err_text(m: &CMatrix) -> String {
        hermitian_eigenvalues(m, 1e-9).unwrap_err().to_string()
    }

    #[test]
    fn complex_two_by_two() {
        // [[1, 1-i], [1+i, 2]] has eigenvalues (3 +- 3)/2.
        let m = CMatrix::from_rows([
            [C64::new(1.0, 0.0), C64::new(1.0, -1.0)],
            [C64::new(1.0, 1.0), C64::new(2.0, 0.0)],
        ]);
        let ev = hermitian_eigenvalues(&m, 1e-12).unwrap();
        assert!((ev[0] - 0.0).abs() < 1e-14);
        assert!((ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn degenerate_spectrum() {
        let m = CMatrix::diagonal(&[2.0, -1.0, 2.0, 0.5]);
        assert_eq!(hermitian_eigenvalues(&m, 0.0).unwrap(), vec![-1.0, 0.5, 2.0, 2.0]);
    }
}
