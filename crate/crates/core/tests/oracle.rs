mod common;

use common::{char_poly, oracle_eigenvalues};
use nmgme::matcore::{hermitian_eigenvalues, Pauli};
use nmgme::states::random_unit_trace_hermitian;
use nmgme::CMatrix;

#[test]
fn oracle_on_known_spectra() {
    let ev = oracle_eigenvalues(&Pauli::Y.matrix());
    assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    let d = CMatrix::diagonal(&[0.3, -0.2, 0.1, 0.8]);
    let ev = oracle_eigenvalues(&d);
    for (a, b) in ev.iter().zip([-0.2, 0.1, 0.3, 0.8]) {
        assert!((a - b).abs() < 1e-13);
    }
    // det(x I - X) = x^2 - 1
    assert_eq!(char_poly(&Pauli::X.matrix()), vec![-1.0, 0.0, 1.0]);
}

#[test]
fn jacobi_agrees_with_oracle() {
    for dim in [2, 4, 8] {
        for seed in 0..100 {
            let h = random_unit_trace_hermitian(dim, 1_000 * dim as u64 + seed);
            let jac = hermitian_eigenvalues(&h, 1e-12).unwrap();
            let orc = oracle_eigenvalues(&h);
            for (a, b) in jac.iter().zip(&orc) {
                assert!((a - b).abs() <= 1e-8, "dim {dim} seed {seed}: {jac:?} vs {orc:?}");
            }
        }
    }
}
