use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

/// Absolute tolerance for integrating tabulated rates.
pub const QUADRATURE_TOL: f64 = 1e-10;
const MAX_DEPTH: u32 = 48;

/// A single non-negative rate function `t -> Gamma(t)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Rate {
    Constant(f64),
    /// `Gamma(t) = tanh t`.
    Tanh,
    Table(RateTable),
}

impl Rate {
    pub fn constant(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::RateDescriptor {
                descriptor: format!("const:{value}"),
                reason: "constant rate must be finite and non-negative".into(),
            });
        }
        Ok(Rate::Constant(value))
    }

    /// Parses `const:<value>`, `tanh` or `table:<path>`.
    pub fn parse(descriptor: &str) -> Result<Self> {
        let d = descriptor.trim();
        let bad = |reason: String| Error::RateDescriptor {
            descriptor: d.to_string(),
            reason,
        };
        if d == "tanh" {
            return Ok(Rate::Tanh);
        }
        if let Some(v) = d.strip_prefix("const:") {
            let value: f64 = v.trim().parse().map_err(|e| bad(format!("{e}")))?;
            return Rate::constant(value).map_err(|_| bad("constant rate must be finite and non-negative".into()));
        }
        if let Some(path) = d.strip_prefix("table:") {
            return RateTable::from_csv_path(path.trim())
                .map(Rate::Table)
                .map_err(|e| bad(e.to_string()));
        }
        Err(bad("expected `const:<value>`, `tanh` or `table:<path>`".into()))
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Rate::Constant(v) => *v,
            Rate::Tanh => t.tanh(),
            Rate::Table(table) => table.value(t),
        }
    }

    /// `int_0^t Gamma(s) ds`; analytic for presets, adaptive Simpson for tables.
    pub fn integral(&self, t: f64) -> f64 {
        match self {
            Rate::Constant(v) => v * t,
            Rate::Tanh => ln_cosh(t),
            Rate::Table(table) => table.integral(t),
        }
    }
}

impl fmt::Display for Rate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rate::Constant(v) => write!(f, "const:{v}"),
            Rate::Tanh => write!(f, "tanh"),
            Rate::Table(t) => match &t.source {
                Some(p) => write!(f, "table:{}", p.display()),
                None => write!(f, "table:<{} points>", t.points.len()),
            },
        }
    }
}

/// `ln cosh t` without overflow for large `|t|`.
pub fn ln_cosh(t: f64) -> f64 {
    let a = t.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Piecewise-linear rate through `(t_k, value_k)` knots, held constant
/// outside the tabulated range.
#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    points: Vec<(f64, f64)>,
    source: Option<PathBuf>,
}

impl RateTable {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::RateTable("need at least two (t, gamma) rows".into()));
        }
        for (i, &(t, g)) in points.iter().enumerate() {
            if !t.is_finite() || !g.is_finite() {
                return Err(Error::RateTable(format!("row {i}: non-finite value")));
            }
            if t < 0.0 {
                return Err(Error::RateTable(format!("row {i}: negative time {t}")));
            }
            if g < 0.0 {
                return Err(Error::RateTable(format!("row {i}: negative rate {g}")));
            }
            if i > 0 && t <= points[i - 1].0 {
                return Err(Error::RateTable(format!("row {i}: times must increase strictly")));
            }
        }
        Ok(Self { points, source: None })
    }

    /// Reads a CSV with header `t,gamma`.
    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::RateTable(format!("{}: {e}", path.display())))?;
        let headers = reader
            .headers()
            .map_err(|e| Error::RateTable(e.to_string()))?
            .clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "gamma" {
            return Err(Error::RateTable(format!(
                "expected header `t,gamma`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            )));
        }
        let mut points = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::RateTable(e.to_string()))?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| Error::RateTable(format!("row {i}: `{s}`: {e}")))
            };
            points.push((parse(&record[0])?, parse(&record[1])?));
        }
        let mut table = Self::new(points)?;
        table.source = Some(path.to_path_buf());
        Ok(table)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn value(&self, t: f64) -> f64 {
        let pts = &self.points;
        let first = pts[0];
        let last = pts[pts.len() - 1];
        if t <= first.0 {
            return first.1;
        }
        if t >= last.0 {
            return last.1;
        }
        let k = pts.partition_point(|&(tk, _)| tk <= t);
        let (t0, g0) = pts[k - 1];
        let (t1, g1) = pts[k];
        g0 + (g1 - g0) * (t - t0) / (t1 - t0)
    }

    pub fn integral(&self, t: f64) -> f64 {
        adaptive_simpson(|s| self.value(s), 0.0, t, QUADRATURE_TOL)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(&f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// The pair `Gamma_1(t), Gamma_2(t)` driving the depolarizing channel, with
/// Lindblad coefficients `gamma_1 = gamma_2 = Gamma_1/2` and
/// `gamma_3 = -Gamma_2/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateSchedule {
    pub gamma1: Rate,
    pub gamma2: Rate,
}

impl RateSchedule {
    pub fn new(gamma1: Rate, gamma2: Rate) -> Self {
        Self { gamma1, gamma2 }
    }

    /// `Gamma_1 = 1`, `Gamma_2 = tanh t`: the canonical eternally
    /// non-Markovian yet CP channel.
    pub fn eternal_default() -> Self {
        Self::new(Rate::Constant(1.0), Rate::Tanh)
    }

    /// Parses `<gamma2>` (with `Gamma_1 = 1`) or `<gamma1>,<gamma2>`.
    pub fn parse(descriptor: &str) -> Result<Self> {
        match descriptor.split_once(',') {
            Some((g1, g2)) => Ok(Self::new(Rate::parse(g1)?, Rate::parse(g2)?)),
            None => Ok(Self::new(Rate::Constant(1.0), Rate::parse(descriptor)?)),
        }
    }

    pub fn gamma1(&self, t: f64) -> f64 {
        self.gamma1.value(t)
    }

    pub fn gamma2(&self, t: f64) -> f64 {
        self.gamma2.value(t)
    }

    /// `[gamma_1, gamma_2, gamma_3](t)` of the Pauli-form generator.
    pub fn lindblad_coefficients(&self, t: f64) -> [f64; 3] {
        let g1 = self.gamma1(t) / 2.0;
        [g1, g1, -self.gamma2(t) / 2.0]
    }

    /// Fails if either rate is negative at `t`.
    pub fn check_non_negative(&self, t: f64) -> Result<()> {
        for (name, value) in [("Gamma_1", self.gamma1(t)), ("Gamma_2", self.gamma2(t))] {
            if value < 0.0 || !value.is_finite() {
                return Err(Error::NegativeRate { t, name, value });
            }
        }
        Ok(())
    }

    /// Whether `Gamma_1(t) >= Gamma_2(t)`.
    pub fn is_ordered_at(&self, t: f64) -> bool {
        self.gamma1(t) >= self.gamma2(t)
    }

    pub fn zeta(&self, t: f64) -> Result<ZetaPair> {
        zeta(self, t)
    }
}

impl fmt::Display for RateSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.gamma1, self.gamma2)
    }
}

/// Accumulated rates `zeta_1 = int Gamma_1`, `zeta_2 = int (Gamma_1 - Gamma_2)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ZetaPair {
    pub zeta1: f64,
    pub zeta2: f64,
}

impl ZetaPair {
    pub const ZERO: ZetaPair = ZetaPair { zeta1: 0.0, zeta2: 0.0 };

    pub fn new(zeta1: f64, zeta2: f64) -> Self {
        Self { zeta1, zeta2 }
    }

    /// Increment from `earlier` to `self`, i.e. the pair for the map between
    /// the two times.
    pub fn since(self, earlier: ZetaPair) -> ZetaPair {
        ZetaPair {
            zeta1: self.zeta1 - earlier.zeta1,
            zeta2: self.zeta2 - earlier.zeta2,
        }
    }
}

pub fn zeta(rates: &RateSchedule, t: f64) -> Result<ZetaPair> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    if t == 0.0 {
        return Ok(ZetaPair::ZERO);
    }
    let zeta1 = rates.gamma1.integral(t);
    let zeta2 = zeta1 - rates.gamma2.integral(t);
    Ok(ZetaPair { zeta1, zeta2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn constant_zeta() {
        let rates = RateSchedule::new(Rate::Constant(1.0), Rate::Constant(0.25));
        let z = zeta(&rates, 2.0).unwrap();
        assert_eq!(z.zeta1, 2.0);
        assert_eq!(z.zeta2, 1.5);
    }

    #[test]
    fn zeta_at_zero_and_negative() {
        let rates = RateSchedule::eternal_default();
        assert_eq!(zeta(&rates, 0.0).unwrap(), ZetaPair::ZERO);
        assert!(matches!(zeta(&rates, -0.1), Err(Error::InvalidTime(_))));
    }

    #[test]
    fn tanh_zeta_matches_quadrature() {
        let rates = RateSchedule::eternal_default();
        for &t in &[0.1, 0.5, 1.0, 2.0, 3.0, 7.5] {
            let z = zeta(&rates, t).unwrap();
            let closed = t - t.cosh().ln();
            assert!((z.zeta2 - closed).abs() < 1e-12, "t={t}");
            let quad = adaptive_simpson(|s| 1.0 - s.tanh(), 0.0, t, 1e-12);
            assert!((z.zeta2 - quad).abs() < 1e-10, "t={t}: {} vs {quad}", z.zeta2);
        }
    }

    #[test]
    fn ln_cosh_large_argument() {
        assert!((ln_cosh(800.0) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
        assert!(ln_cosh(800.0).is_finite());
    }

    #[test]
    fn table_interpolates_and_clamps() {
        let table = RateTable::new(vec![(0.0, 0.0), (1.0, 1.0), (2.0, 0.5)]).unwrap();
        assert_eq!(table.value(0.5), 0.5);
        assert_eq!(table.value(1.5), 0.75);
        assert_eq!(table.value(5.0), 0.5);
        // Trapezoids: 0.5 + 0.75 + 0.5 * 1.0
        assert!((table.integral(3.0) - 1.75).abs() < 1e-10);
    }

    #[test]
    fn table_validation() {
        assert!(RateTable::new(vec![(0.0, 1.0)]).is_err());
        assert!(RateTable::new(vec![(0.0, 1.0), (0.0, 1.0)]).is_err());
        assert!(RateTable::new(vec![(0.0, 1.0), (1.0, -1.0)]).is_err());
    }

    #[test]
    fn descriptors() {
        assert_eq!(Rate::parse("tanh").unwrap(), Rate::Tanh);
        assert_eq!(Rate::parse("const:0.5").unwrap(), Rate::Constant(0.5));
        assert!(Rate::parse("const:-1").is_err());
        assert!(Rate::parse("cosh").is_err());
        let s = RateSchedule::parse("const:0,tanh").unwrap();
        assert_eq!(s, RateSchedule::new(Rate::Constant(0.0), Rate::Tanh));
        assert_eq!(RateSchedule::parse("tanh").unwrap(), RateSchedule::eternal_default());
        assert_eq!(RateSchedule::eternal_default().to_string(), "const:1,tanh");
    }

    #[test]
    fn table_from_csv() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "t,gamma\n0,0\n1, 2\n").unwrap();
        let rate = Rate::parse(&format!("table:{}", file.path().display())).unwrap();
        assert_eq!(rate.value(0.5), 1.0);
        assert!((rate.integral(1.0) - 1.0).abs() < 1e-10);

        let mut bad = tempfile::NamedTempFile::new().unwrap();
        writeln!(bad, "time,rate\n0,0\n1,1").unwrap();
        let err = Rate::parse(&format!("table:{}", bad.path().display())).unwrap_err();
        assert!(err.to_string().contains("t,gamma"), "{err}");
    }

    #[test]
    fn negative_rate_detected() {
        let rates = RateSchedule::eternal_default();
        assert!(rates.check_non_negative(1.0).is_ok());
        assert!(matches!(
            rates.check_non_negative(-1.0),
            Err(Error::NegativeRate { name: "Gamma_2", .. })
        ));
    }
}
