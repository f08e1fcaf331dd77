//! Independent eigenvalue oracle: characteristic polynomial by
//! Faddeev-LeVerrier, roots from the companion matrix, Newton polish.
//! Shares nothing with the Jacobi solver under test.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

use nmgme::CMatrix;

type Cm = DMatrix<Complex64>;

fn to_nalgebra(h: &CMatrix) -> Cm {
    let n = h.dim();
    Cm::from_row_slice(n, n, h.as_slice())
}

/// Monic characteristic polynomial coefficients, lowest degree first.
/// Coefficients of a Hermitian matrix are real.
pub fn char_poly(h: &CMatrix) -> Vec<f64> {
    let n = h.dim();
    let a = to_nalgebra(h);
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = Cm::zeros(n, n);
    for k in 1..=n {
        m = &a * &m + Cm::identity(n, n) * Complex64::new(coeffs[n - k + 1], 0.0);
        coeffs[n - k] = -(&a * &m).trace().re / k as f64;
    }
    coeffs
}

fn eval(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut p = 0.0;
    let mut dp = 0.0;
    for &c in coeffs.iter().rev() {
        dp = dp * x + p;
        p = p * x + c;
    }
    (p, dp)
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn oracle_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let coeffs = char_poly(h);
    let n = h.dim();
    let companion = DMatrix::<f64>::from_fn(n, n, |r, c| {
        if c == n - 1 {
            -coeffs[r]
        } else if r == c + 1 {
            1.0
        } else {
            0.0
        }
    });
    let mut roots: Vec<f64> = companion
        .complex_eigenvalues()
        .iter()
        .map(|z| {
            let mut x = z.re;
            for _ in 0..50 {
                let (p, dp) = eval(&coeffs, x);
                if dp == 0.0 {
                    break;
                }
                let step = p / dp;
                x -= step;
                if step.abs() <= 1e-15 * x.abs().max(1.0) {
                    break;
                }
            }
            x
        })
        .collect();
    roots.sort_by(f64::total_cmp);
    roots
}
