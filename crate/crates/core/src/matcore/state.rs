use super::{hermitian_eigenvalues, CMatrix, C64, DEFAULT_HERMITIAN_TOL};
use crate::error::{Error, Result};

const NORM_TOL: f64 = 1e-12;

/// A validated quantum state: Hermitian, unit trace and PSD, each within `tol`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    tol: f64,
}

impl DensityMatrix {
    pub const DEFAULT_TOL: f64 = DEFAULT_HERMITIAN_TOL;

    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tol(matrix, Self::DEFAULT_TOL)
    }

    pub fn with_tol(matrix: CMatrix, tol: f64) -> Result<Self> {
        let deviation = (matrix.trace() - C64::new(1.0, 0.0)).norm();
        if deviation > tol {
            return Err(Error::InvalidTrace { deviation, tol });
        }
        let min_eigenvalue = hermitian_eigenvalues(&matrix, tol)?[0];
        if min_eigenvalue < -tol {
            return Err(Error::NotPositive { min_eigenvalue, tol });
        }
        Ok(Self { matrix, tol })
    }

    /// For outputs of constructions that are states by construction.
    pub(crate) fn trusted(matrix: CMatrix) -> Self {
        debug_assert!(matrix.hermitian_asymmetry() < 1e-9);
        Self {
            matrix,
            tol: Self::DEFAULT_TOL,
        }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::trusted(CMatrix::identity(dim).scale(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Convex combination `w * self + (1 - w) * other`.
    pub fn mix(&self, w: f64, other: &DensityMatrix) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::ProbabilityOutOfRange { name: "weight", value: w });
        }
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Self::trusted(&self.matrix.scale(w) + &other.matrix.scale(1.0 - w)))
    }
}

impl AsRef<CMatrix> for DensityMatrix {
    fn as_ref(&self) -> &CMatrix {
        &self.matrix
    }
}

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL || amplitudes.is_empty() {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::trusted(CMatrix::outer(&self.amplitudes, &self.amplitudes))
    }

    /// `<self| m |self>`.
    pub fn expectation(&self, m: &CMatrix) -> C64 {
        let mv = m.mul_vec(&self.amplitudes);
        self.amplitudes.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_each_invariant() {
        let bad_trace = CMatrix::diagonal(&[0.5, 0.4]);
        assert!(matches!(DensityMatrix::new(bad_trace), Err(Error::InvalidTrace { .. })));

        let not_psd = CMatrix::diagonal(&[1.5, -0.5]);
        assert!(matches!(DensityMatrix::new(not_psd), Err(Error::NotPositive { .. })));

        let not_herm = CMatrix::from_real_rows([[0.5, 0.3], [0.0, 0.5]]);
        assert!(matches!(DensityMatrix::new(not_herm), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn tolerance_is_respected() {
        let slightly_negative = CMatrix::diagonal(&[1.0 + 1e-11, -1e-11]);
        assert!(DensityMatrix::new(slightly_negative.clone()).is_ok());
        assert!(DensityMatrix::with_tol(slightly_negative, 1e-12).is_err());
    }

    #[test]
    fn pure_state_normalization() {
        let s = C64::new(0.6, 0.0);
        assert!(PureState::new(vec![s, C64::new(0.8, 0.0)]).is_ok());
        assert!(matches!(PureState::new(vec![s, s]), Err(Error::NotNormalized(_))));
        let n = PureState::normalized(vec![s, s]).unwrap();
        assert!((n.norm() - 1.0).abs() < 1e-15);
    }
}
