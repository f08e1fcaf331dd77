//! Genuine multipartite entanglement detection for three qubits.
//!
//! The one-qubit positive map
//!
//! ```text
//! Lambda[rho] = [ (1-2a) r11 + 2a r22     (1-2a+2b) r12       ]
//!               [ (1-2a+2b) r21           2a r11 + (1-2a) r22 ]
//! ```
//!
//! is the short-time step of the eternally non-Markovian channel. Summed over
//! the three parties and shifted by `c * Tr(rho) * I`, it becomes
//! `Phi_Lambda`, which stays PSD on every biseparable state once
//! `c >= 2 beta`. A negative eigenvalue of `Phi_Lambda[rho]` therefore
//! certifies genuine multipartite entanglement.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lindblad::{MapParams, RateSchedule, SingleQubitMap};
use crate::matcore::{apply_on_site, min_eigenvalue, Block2, CMatrix, DensityMatrix, C64};
use crate::states::{ghz_tilde, noisy_ghz, werner};

/// A minimum eigenvalue below `-DETECTION_TOL` counts as negative.
pub const DETECTION_TOL: f64 = 1e-9;

fn lambda_block(b: &Block2, p: MapParams) -> Block2 {
    let (a, beta) = (p.alpha(), p.beta());
    let coh = 1.0 - 2.0 * a + 2.0 * beta;
    [
        [b[0][0] * (1.0 - 2.0 * a) + b[1][1] * (2.0 * a), b[0][1] * coh],
        [b[1][0] * coh, b[0][0] * (2.0 * a) + b[1][1] * (1.0 - 2.0 * a)],
    ]
}

/// `Lambda` on a single-qubit operator, in matrix-element form.
pub fn lambda_map(rho: &CMatrix, p: MapParams) -> Result<CMatrix> {
    if rho.dim() != 2 {
        return Err(Error::UnexpectedDimension {
            expected: 2,
            got: rho.dim(),
        });
    }
    let b = [[rho[(0, 0)], rho[(0, 1)]], [rho[(1, 0)], rho[(1, 1)]]];
    Ok(CMatrix::from_rows(lambda_block(&b, p)))
}

/// `Lambda_site x I_rest` on an n-qubit operator.
pub fn apply_lambda_on(rho: &CMatrix, site: usize, p: MapParams) -> Result<CMatrix> {
    apply_on_site(rho, site, |b| lambda_block(b, p))
}

/// Smaller eigenvalue of `(Lambda x I)[|psi><psi|]` for
/// `|psi> = c0 |00> + c1 |11>`.
pub fn pair_min_eigenvalue_closed_form(p: MapParams, c0: C64, c1: C64) -> Result<f64> {
    let norm = c0.norm_sqr() + c1.norm_sqr();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::NotNormalized(norm.sqrt()));
    }
    let (a, b) = (p.alpha(), p.beta());
    let d = 1.0 - 2.0 * a;
    let radicand = d * d + 16.0 * c0.norm_sqr() * c1.norm_sqr() * b * (1.0 - 2.0 * a + b);
    Ok(0.5 * (d - radicand.sqrt()))
}

/// `Phi_Lambda = sum_J Lambda_J x I + c * I * Tr`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GmeMap {
    params: MapParams,
    c: f64,
}

impl GmeMap {
    /// The map with the minimal safe constant `c = 2 beta`.
    pub fn new(params: MapParams) -> Self {
        Self {
            params,
            c: 2.0 * params.beta(),
        }
    }

    pub fn with_trace_constant(params: MapParams, c: f64) -> Result<Self> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidTraceConstant(c));
        }
        Ok(Self { params, c })
    }

    pub fn params(&self) -> MapParams {
        self.params
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Whether `c >= 2 beta`, the condition for PSD output on all
    /// biseparable states.
    pub fn is_biseparable_safe(&self) -> bool {
        self.c >= 2.0 * self.params.beta()
    }
}

pub fn phi_lambda(rho: &CMatrix, m: &GmeMap) -> Result<CMatrix> {
    if rho.dim() != 8 {
        return Err(Error::UnexpectedDimension {
            expected: 8,
            got: rho.dim(),
        });
    }
    let mut out = CMatrix::identity(8).scale_complex(rho.trace() * m.c);
    for site in 0..3 {
        out = &out + &apply_lambda_on(rho, site, m.params)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    GmeDetected,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::GmeDetected => "GME-detected",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionReport {
    pub verdict: Verdict,
    pub min_eigenvalue: f64,
    pub witness_value: Option<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub c: f64,
    pub tol: f64,
}

impl DetectionReport {
    /// Adds `Tr[W rho]`; a negative witness value also counts as detection.
    pub fn with_witness(mut self, w: &WitnessOperator, rho: &DensityMatrix) -> Self {
        let value = w.value(rho.matrix());
        self.witness_value = Some(value);
        if value < -self.tol {
            self.verdict = Verdict::GmeDetected;
        }
        self
    }
}

/// Sufficient test: GME is certified iff `Phi_Lambda[rho]` has an
/// eigenvalue below `-tol`.
pub fn detect_gme(rho: &DensityMatrix, m: &GmeMap, tol: f64) -> Result<DetectionReport> {
    let min_eigenvalue = min_eigenvalue(&phi_lambda(rho.matrix(), m)?)?;
    let verdict = if min_eigenvalue < -tol {
        Verdict::GmeDetected
    } else {
        Verdict::Inconclusive
    };
    Ok(DetectionReport {
        verdict,
        min_eigenvalue,
        witness_value: None,
        alpha: m.params.alpha(),
        beta: m.params.beta(),
        c: m.c,
        tol,
    })
}

/// `W = Phi_Lambda(|ghz~><ghz~|)` with `c = 2 beta`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessOperator {
    matrix: CMatrix,
    params: MapParams,
}

impl WitnessOperator {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn params(&self) -> MapParams {
        self.params
    }

    /// `Tr[W rho]`.
    pub fn value(&self, rho: &CMatrix) -> f64 {
        self.matrix.trace_product(rho).re
    }
}

pub fn witness_operator(params: MapParams) -> WitnessOperator {
    let m = GmeMap::new(params);
    let matrix = phi_lambda(ghz_tilde().projector().matrix(), &m).expect("8x8 input");
    WitnessOperator { matrix, params }
}

pub fn witness_value(w: &WitnessOperator, rho: &DensityMatrix) -> f64 {
    w.value(rho.matrix())
}

/// The two candidate closed forms for `EV_min(Phi_Lambda[rho_ghz^p])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoisyGhzForm {
    /// `(1/8)[3(1-p) + (2-3p) beta]`.
    Printed,
    /// `(3/8)(1-p) + (2-3p) beta`.
    Rederived,
}

impl NoisyGhzForm {
    pub const ALL: [NoisyGhzForm; 2] = [NoisyGhzForm::Printed, NoisyGhzForm::Rederived];

    pub fn eval(self, p: f64, beta: f64) -> f64 {
        match self {
            NoisyGhzForm::Printed => (3.0 * (1.0 - p) + (2.0 - 3.0 * p) * beta) / 8.0,
            NoisyGhzForm::Rederived => 0.375 * (1.0 - p) + (2.0 - 3.0 * p) * beta,
        }
    }

    /// `beta` at which the form crosses zero for fixed `p`; `None` when it
    /// stays non-negative for all `beta >= 0` (`p <= 2/3`).
    pub fn zero_contour(self, p: f64) -> Option<f64> {
        let slope = 2.0 - 3.0 * p;
        if slope >= 0.0 {
            return None;
        }
        let offset = match self {
            NoisyGhzForm::Printed => 3.0 * (1.0 - p),
            NoisyGhzForm::Rederived => 0.375 * (1.0 - p),
        };
        Some(-offset / slope)
    }
}

impl fmt::Display for NoisyGhzForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoisyGhzForm::Printed => "(1/8)[3(1-p)+(2-3p)beta]",
            NoisyGhzForm::Rederived => "(3/8)(1-p)+(2-3p)beta",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoisyGhzEigen {
    pub numerical: f64,
    pub printed_form: f64,
    pub rederived_form: f64,
}

pub fn noisy_ghz_min_ev(p: f64, m: &GmeMap) -> Result<NoisyGhzEigen> {
    let rho = noisy_ghz(p)?;
    let beta = m.params.beta();
    Ok(NoisyGhzEigen {
        numerical: min_eigenvalue(&phi_lambda(rho.matrix(), m)?)?,
        printed_form: NoisyGhzForm::Printed.eval(p, beta),
        rederived_form: NoisyGhzForm::Rederived.eval(p, beta),
    })
}

/// Which closed forms agree with the numerical spectrum on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormResolution {
    /// Forms that match at every grid point within `tol`.
    pub matching: Vec<NoisyGhzForm>,
    pub max_deviation_printed: f64,
    pub max_deviation_rederived: f64,
    pub points: usize,
    pub tol: f64,
}

impl FormResolution {
    /// The unique matching form, if exactly one matched.
    pub fn winner(&self) -> Option<NoisyGhzForm> {
        match self.matching.as_slice() {
            [only] => Some(*only),
            _ => None,
        }
    }
}

/// Compares both closed forms against the eigensolver on `p_grid x beta_grid`.
pub fn resolve_noisy_ghz_form(
    p_grid: &[f64],
    beta_grid: &[f64],
    rule: AlphaRule,
    tol: f64,
) -> Result<FormResolution> {
    let mut dev = [0.0_f64; 2];
    let mut points = 0;
    for &beta in beta_grid {
        let params = MapParams::new(rule.alpha(beta), beta)?;
        let m = GmeMap::new(params);
        for &p in p_grid {
            let e = noisy_ghz_min_ev(p, &m)?;
            dev[0] = dev[0].max((e.numerical - e.printed_form).abs());
            dev[1] = dev[1].max((e.numerical - e.rederived_form).abs());
            points += 1;
        }
    }
    let matching = NoisyGhzForm::ALL
        .into_iter()
        .zip(dev)
        .filter(|&(_, d)| d <= tol)
        .map(|(f, _)| f)
        .collect();
    Ok(FormResolution {
        matching,
        max_deviation_printed: dev[0],
        max_deviation_rederived: dev[1],
        points,
        tol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WernerReport {
    /// `beta > p / (4 (1 - p))`.
    pub detected: bool,
    /// `p / (4 (1 - p))`; `None` at `p = 1`.
    pub threshold: Option<f64>,
    /// `EV_min((Lambda x I)[rho_w])`, equal to `p/4 - (1-p) beta`.
    pub min_eigenvalue: f64,
}

pub fn werner_detect(p: f64, params: MapParams) -> Result<WernerReport> {
    let rho = werner(p)?;
    let min_eigenvalue = min_eigenvalue(&apply_lambda_on(rho.matrix(), 0, params)?)?;
    let threshold = (p < 1.0).then(|| p / (4.0 * (1.0 - p)));
    Ok(WernerReport {
        detected: threshold.is_some_and(|t| params.beta() > t),
        threshold,
        min_eigenvalue,
    })
}

/// How `alpha` is chosen for each `beta` in a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AlphaRule {
    Fixed(f64),
    EqualToBeta,
    /// `alpha = beta + offset`.
    Offset(f64),
}

impl AlphaRule {
    pub fn alpha(self, beta: f64) -> f64 {
        match self {
            AlphaRule::Fixed(a) => a,
            AlphaRule::EqualToBeta => beta,
            AlphaRule::Offset(d) => beta + d,
        }
    }

    /// A second valid `alpha` distinct from `primary` where possible.
    fn companion(primary: f64, beta: f64) -> f64 {
        if primary > beta {
            0.5 * (primary + beta)
        } else {
            beta + 0.25
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionRow {
    pub p: f64,
    pub beta: f64,
    /// `NaN` for skipped points.
    pub min_ev: f64,
    /// `|EV(alpha_1) - EV(alpha_2)|` for two valid `alpha` values.
    pub alpha_deviation: f64,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionTable {
    pub rows: Vec<RegionRow>,
    pub max_alpha_deviation: f64,
    pub skipped: usize,
}

fn region_point(p: f64, beta: f64, rule: AlphaRule) -> RegionRow {
    let skip = |note: String| RegionRow {
        p,
        beta,
        min_ev: f64::NAN,
        alpha_deviation: f64::NAN,
        note: Some(note),
    };
    let rho = match noisy_ghz(p) {
        Ok(r) => r,
        Err(e) => return skip(format!("skipped: {e}")),
    };
    let alpha = rule.alpha(beta);
    let (first, second) = match (
        MapParams::new(alpha, beta),
        MapParams::new(AlphaRule::companion(alpha, beta), beta),
    ) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return skip(format!("skipped: {e}")),
    };
    let ev = |params| {
        phi_lambda(rho.matrix(), &GmeMap::new(params))
            .and_then(|m| min_eigenvalue(&m))
            .expect("8x8 Hermitian input")
    };
    let (e1, e2) = (ev(first), ev(second));
    RegionRow {
        p,
        beta,
        min_ev: e1,
        alpha_deviation: (e1 - e2).abs(),
        note: None,
    }
}

/// `EV_min(Phi_Lambda[rho_ghz^p])` over `p_grid x beta_grid`, p-major.
///
/// Points are evaluated in parallel; each row depends only on its own
/// `(p, beta)`, so the table equals the sequential one bit for bit.
pub fn region_scan(p_grid: &[f64], beta_grid: &[f64], rule: AlphaRule) -> RegionTable {
    let grid: Vec<(f64, f64)> = p_grid
        .iter()
        .flat_map(|&p| beta_grid.iter().map(move |&b| (p, b)))
        .collect();
    let rows: Vec<RegionRow> = grid
        .par_iter()
        .map(|&(p, beta)| region_point(p, beta, rule))
        .collect();
    let max_alpha_deviation = rows
        .iter()
        .filter(|r| r.note.is_none())
        .map(|r| r.alpha_deviation)
        .fold(0.0, f64::max);
    let skipped = rows.iter().filter(|r| r.note.is_some()).count();
    RegionTable {
        rows,
        max_alpha_deviation,
        skipped,
    }
}

/// Which qubits the channel acts on between detections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvolveMode {
    None,
    Site0,
    #[default]
    AllSites,
}

impl EvolveMode {
    fn sites(self) -> &'static [usize] {
        match self {
            EvolveMode::None => &[],
            EvolveMode::Site0 => &[0],
            EvolveMode::AllSites => &[0, 1, 2],
        }
    }
}

impl FromStr for EvolveMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(EvolveMode::None),
            "site0" => Ok(EvolveMode::Site0),
            "all" | "all-sites" => Ok(EvolveMode::AllSites),
            other => Err(Error::InvalidArgument(format!(
                "evolve mode `{other}` (expected none, site0 or all)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub min_ev: f64,
    pub alpha: f64,
    pub beta: f64,
}

/// Minimum eigenvalue of the step detector along the channel's evolution.
///
/// Row `k = 1..=steps` covers the step `(t_{k-1}, t_k]` with `t_k = k eps`:
/// `Phi_Lambda` is built from `alpha = eps Gamma_1(t_k)/2`,
/// `beta = eps Gamma_2(t_k)/2`, `c = 2 beta` and applied to the state at
/// the start of the step, after which the state is advanced to `t_k` by the
/// exact channel on the sites selected by `mode`.
pub fn trajectory(
    initial: &DensityMatrix,
    rates: &RateSchedule,
    eps: f64,
    steps: usize,
    mode: EvolveMode,
) -> Result<Vec<TrajectoryRow>> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("step size must be positive, got {eps}")));
    }
    if initial.dim() != 8 {
        return Err(Error::UnexpectedDimension {
            expected: 8,
            got: initial.dim(),
        });
    }
    let mut rho = initial.matrix().clone();
    let mut zeta_prev = rates.zeta(0.0)?;
    let mut rows = Vec::with_capacity(steps);
    for k in 1..=steps {
        let t = k as f64 * eps;
        let at_step = |e: Error| Error::TrajectoryStep { t, source: Box::new(e) };
        let params = MapParams::from_rates(rates, t, eps).map_err(at_step)?;
        let min_ev = min_eigenvalue(&phi_lambda(&rho, &GmeMap::new(params))?)?;
        rows.push(TrajectoryRow {
            t,
            min_ev,
            alpha: params.alpha(),
            beta: params.beta(),
        });
        if mode != EvolveMode::None {
            let zeta_now = rates.zeta(t).map_err(at_step)?;
            let step = SingleQubitMap::Dynamical(zeta_now.since(zeta_prev));
            for &site in mode.sites() {
                rho = apply_on_site(&rho, site, |b| step.apply_block(b))?;
            }
            zeta_prev = zeta_now;
        }
    }
    Ok(rows)
}
