//! The eternally non-Markovian qubit depolarizing channel.
//!
//! The generator is
//! `L(rho) = (Gamma_1/2)(X rho X + Y rho Y - 2 rho) - (Gamma_2/2)(Z rho Z - rho)`,
//! whose exact solution damps populations by `exp(-2 zeta_1)` and coherences
//! by `exp(-zeta_2)`. A single short step `I + eps L` is positive but not
//! completely positive whenever `Gamma_2 > 0`.

mod rates;

pub use rates::{adaptive_simpson, ln_cosh, zeta, Rate, RateSchedule, RateTable, ZetaPair, QUADRATURE_TOL};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{conjugate_by, hermitian_eigenvalues, Block2, CMatrix, DensityMatrix, Pauli, ONE};

/// Tolerance on the Choi spectrum when classifying a map as CP.
pub const CP_TOL: f64 = 1e-9;

/// Parameters `(alpha, beta) = (eps Gamma_1 / 2, eps Gamma_2 / 2)` of one
/// short-time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MapParams {
    alpha: f64,
    beta: f64,
}

impl MapParams {
    /// Requires `0 <= beta <= alpha` and `|alpha - beta| <= 1/2`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        let reject = |reason| Err(Error::InvalidMapParams { alpha, beta, reason });
        if !alpha.is_finite() || !beta.is_finite() {
            return reject("values must be finite");
        }
        if beta < 0.0 {
            return reject("beta must be non-negative");
        }
        if beta > alpha {
            return reject("beta must not exceed alpha");
        }
        if !is_positive_map(alpha, beta) {
            return reject("|alpha - beta| exceeds 1/2, the step map is not positive");
        }
        Ok(Self { alpha, beta })
    }

    /// Parameters of the step `t -> t + eps` under `rates`.
    pub fn from_rates(rates: &RateSchedule, t: f64, eps: f64) -> Result<Self> {
        rates.check_non_negative(t)?;
        Self::new(eps * rates.gamma1(t) / 2.0, eps * rates.gamma2(t) / 2.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Positivity of the step map: `|alpha - beta| <= 1/2`.
pub fn is_positive_map(alpha: f64, beta: f64) -> bool {
    (alpha - beta).abs() <= 0.5
}

fn expect_qubit(m: &CMatrix) -> Result<()> {
    if m.dim() != 2 {
        return Err(Error::UnexpectedDimension {
            expected: 2,
            got: m.dim(),
        });
    }
    Ok(())
}

/// `X m X + Y m Y - 2 m` and `Z m Z - m`, the two dissipator shapes.
fn dissipators(m: &CMatrix) -> (CMatrix, CMatrix) {
    let conj = |p: Pauli| conjugate_by(&p.matrix(), m).expect("2x2 operands");
    let xy = &(&conj(Pauli::X) + &conj(Pauli::Y)) - &m.scale(2.0);
    let z = &conj(Pauli::Z) - m;
    (xy, z)
}

/// The generator applied to a 2x2 operator at time `t`.
pub fn generator(rho: &CMatrix, rates: &RateSchedule, t: f64) -> Result<CMatrix> {
    expect_qubit(rho)?;
    rates.check_non_negative(t)?;
    let (xy, z) = dissipators(rho);
    Ok(&xy.scale(rates.gamma1(t) / 2.0) - &z.scale(rates.gamma2(t) / 2.0))
}

fn dynamical_block(b: &Block2, z: ZetaPair) -> Block2 {
    let pop = (-2.0 * z.zeta1).exp();
    let keep = 0.5 * (1.0 + pop);
    let swap = 0.5 * (1.0 - pop);
    let coh = (-z.zeta2).exp();
    [
        [b[0][0] * keep + b[1][1] * swap, b[0][1] * coh],
        [b[1][0] * coh, b[0][0] * swap + b[1][1] * keep],
    ]
}

fn block_of(m: &CMatrix) -> Block2 {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn matrix_of(b: Block2) -> CMatrix {
    CMatrix::from_rows(b)
}

/// The exact channel for accumulated rates `z`.
pub fn dynamical_map(rho0: &DensityMatrix, z: ZetaPair) -> Result<DensityMatrix> {
    expect_qubit(rho0.matrix())?;
    let out = matrix_of(dynamical_block(&block_of(rho0.matrix()), z));
    DensityMatrix::new(out)
}

/// The step map `rho + alpha(X rho X + Y rho Y - 2 rho) - beta(Z rho Z - rho)`.
pub fn intermediate_map(rho: &CMatrix, p: MapParams) -> Result<CMatrix> {
    intermediate_map_raw(rho, p.alpha, p.beta)
}

/// [`intermediate_map`] for arbitrary `(alpha, beta)`, including values
/// outside the positive regime.
pub fn intermediate_map_raw(rho: &CMatrix, alpha: f64, beta: f64) -> Result<CMatrix> {
    expect_qubit(rho)?;
    let (xy, z) = dissipators(rho);
    Ok(&(rho + &xy.scale(alpha)) - &z.scale(beta))
}

/// Smallest output eigenvalue of the raw step map over `probes`.
pub fn min_output_eigenvalue(alpha: f64, beta: f64, probes: &[CMatrix]) -> Result<f64> {
    let mut worst = f64::INFINITY;
    for rho in probes {
        let out = intermediate_map_raw(rho, alpha, beta)?;
        worst = worst.min(hermitian_eigenvalues(&out, 1e-10)?[0]);
    }
    Ok(worst)
}

/// A linear single-qubit map whose Choi matrix can be formed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SingleQubitMap {
    Identity,
    Dynamical(ZetaPair),
    Intermediate(MapParams),
}

impl SingleQubitMap {
    pub fn apply(&self, m: &CMatrix) -> Result<CMatrix> {
        expect_qubit(m)?;
        match self {
            SingleQubitMap::Identity => Ok(m.clone()),
            SingleQubitMap::Dynamical(z) => Ok(matrix_of(dynamical_block(&block_of(m), *z))),
            SingleQubitMap::Intermediate(p) => intermediate_map(m, *p),
        }
    }

    pub fn apply_block(&self, b: &Block2) -> Block2 {
        match self {
            SingleQubitMap::Identity => *b,
            SingleQubitMap::Dynamical(z) => dynamical_block(b, *z),
            SingleQubitMap::Intermediate(p) => {
                block_of(&intermediate_map(&matrix_of(*b), *p).expect("2x2 operand"))
            }
        }
    }
}

fn unit(i: usize, j: usize) -> CMatrix {
    let mut e = CMatrix::zeros(2);
    e[(i, j)] = ONE;
    e
}

/// Normalized Choi matrix `(map x I)[|psi+><psi+|]`, trace 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ChoiMatrix {
    matrix: CMatrix,
}

impl ChoiMatrix {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix, 1e-10).expect("Choi matrix of a Hermiticity-preserving map")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }
}

pub fn choi(map: &SingleQubitMap) -> ChoiMatrix {
    let mut matrix = CMatrix::zeros(4);
    for i in 0..2 {
        for j in 0..2 {
            let image = map.apply(&unit(i, j)).expect("2x2 operand");
            for a in 0..2 {
                for b in 0..2 {
                    matrix[(2 * a + i, 2 * b + j)] += image[(a, b)] * 0.5;
                }
            }
        }
    }
    ChoiMatrix { matrix }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CpReport {
    pub completely_positive: bool,
    /// Minimum eigenvalue of the trace-1 Choi state.
    pub min_eigenvalue: f64,
    /// The same eigenvalue for the unnormalized Choi matrix (twice the above).
    pub min_eigenvalue_unnormalized: f64,
}

pub fn is_completely_positive(map: &SingleQubitMap, tol: f64) -> CpReport {
    let min_eigenvalue = choi(map).min_eigenvalue();
    CpReport {
        completely_positive: min_eigenvalue >= -tol,
        min_eigenvalue,
        min_eigenvalue_unnormalized: 2.0 * min_eigenvalue,
    }
}

/// Max entrywise deviation between `Phi(t2, tp) o Phi(tp, t1)` and
/// `Phi(t2, t1)` on the matrix-unit basis.
pub fn composition_residual(rates: &RateSchedule, t1: f64, tp: f64, t2: f64) -> Result<f64> {
    if !(t1 <= tp && tp <= t2) {
        return Err(Error::InvalidArgument(format!(
            "need t1 <= t' <= t2, got ({t1}, {tp}, {t2})"
        )));
    }
    let (z1, zp, z2) = (zeta(rates, t1)?, zeta(rates, tp)?, zeta(rates, t2)?);
    let direct = SingleQubitMap::Dynamical(z2.since(z1));
    let first = SingleQubitMap::Dynamical(zp.since(z1));
    let second = SingleQubitMap::Dynamical(z2.since(zp));
    let mut worst = 0.0_f64;
    for i in 0..2 {
        for j in 0..2 {
            let e = block_of(&unit(i, j));
            let composed = second.apply_block(&first.apply_block(&e));
            let expected = direct.apply_block(&e);
            for a in 0..2 {
                for b in 0..2 {
                    worst = worst.max((composed[a][b] - expected[a][b]).norm());
                }
            }
        }
    }
    Ok(worst)
}

/// Composition residual maximized over `samples` intermediate times spaced
/// uniformly inside `[t1, t2]`.
pub fn check_divisibility(rates: &RateSchedule, t1: f64, t2: f64, samples: usize) -> Result<f64> {
    if !(0.0 <= t1 && t1 <= t2) {
        return Err(Error::InvalidArgument(format!("need 0 <= t1 <= t2, got ({t1}, {t2})")));
    }
    let mut worst = 0.0_f64;
    for i in 1..=samples {
        let tp = t1 + (t2 - t1) * i as f64 / (samples + 1) as f64;
        worst = worst.max(composition_residual(rates, t1, tp, t2)?);
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EternalNmSample {
    pub t: f64,
    pub gamma3: f64,
    pub choi_min_eigenvalue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EternalNmReport {
    pub eternal: bool,
    /// `gamma_3 < 0` at every sample.
    pub rate_always_negative: bool,
    /// The full map is CP at every sample.
    pub always_cp: bool,
    pub samples: Vec<EternalNmSample>,
}

/// Eternal non-Markovianity on the uniform grid `horizon * k / samples`,
/// `k = 1..=samples`: a permanently negative `gamma_3` with a CP map throughout.
pub fn is_eternal_nm(rates: &RateSchedule, horizon: f64, samples: usize) -> Result<EternalNmReport> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let samples: Vec<EternalNmSample> = (1..=samples)
        .map(|k| {
            let t = horizon * k as f64 / samples as f64;
            let z = zeta(rates, t)?;
            Ok(EternalNmSample {
                t,
                gamma3: rates.lindblad_coefficients(t)[2],
                choi_min_eigenvalue: choi(&SingleQubitMap::Dynamical(z)).min_eigenvalue(),
            })
        })
        .collect::<Result<_>>()?;
    let rate_always_negative = samples.iter().all(|s| s.gamma3 < 0.0);
    let always_cp = samples.iter().all(|s| s.choi_min_eigenvalue >= -CP_TOL);
    Ok(EternalNmReport {
        eternal: rate_always_negative && always_cp,
        rate_always_negative,
        always_cp,
        samples,
    })
}

/// `|psi+><psi+|` on two qubits.
#[cfg(test)]
fn bell_projector() -> CMatrix {
    let h = crate::C64::new(0.5, 0.0);
    let mut m = CMatrix::zeros(4);
    for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
        m[(r, c)] = h;
    }
    m
}
