//! Dense complex matrices sized for one to three qubits.
//!
//! Qubit ordering is fixed across the crate: site 0 (party A) is the most
//! significant bit of a basis index, so `|000>` is index 0 and `|111>` is
//! index 7.

mod eigen;
mod state;

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub use eigen::{hermitian_eigenvalues, min_eigenvalue, DEFAULT_HERMITIAN_TOL};
pub use state::{DensityMatrix, PureState};

/// Shorthand for the scalar type used everywhere.
pub type C64 = Complex64;

/// A 2x2 block, the unit a single-site map acts on.
pub type Block2 = [[C64; 2]; 2];

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries, rejecting non-square lengths
    /// and non-finite values.
    pub fn from_row_major(data: Vec<C64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != data.len() {
            return Err(Error::NotSquare {
                entries: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(pos / dim, pos % dim));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self::from_fn(N, |r, c| C64::new(rows[r][c], 0.0))
    }

    pub fn from_rows<const N: usize>(rows: [[C64; N]; N]) -> Self {
        Self::from_fn(N, |r, c| rows[r][c])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        assert_eq!(u.len(), v.len(), "outer product of unequal lengths");
        Self::from_fn(u.len(), |r, c| u[r] * v[c].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        self.map(|z| z * s)
    }

    fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &CMatrix) -> C64 {
        assert_eq!(self.dim, other.dim, "trace_product dimension mismatch");
        let n = self.dim;
        let mut acc = ZERO;
        for r in 0..n {
            for k in 0..n {
                acc += self.data[r * n + k] * other.data[k * n + r];
            }
        }
        acc
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - self^dagger`.
    pub fn hermitian_asymmetry(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.dim, v.len(), "mul_vec dimension mismatch");
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self[(r, c)] * v[c]).sum())
            .collect()
    }

    fn check_same_dim(&self, other: &CMatrix) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(self.dim, other.dim));
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.dim + c]
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix add dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix sub dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix mul dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * rhs.data[k * n + c];
                }
            }
        }
        out
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Pauli operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        let i = C64::new(0.0, 1.0);
        match self {
            Pauli::X => CMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]]),
            Pauli::Y => CMatrix::from_rows([[ZERO, -i], [i, ZERO]]),
            Pauli::Z => CMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]]),
        }
    }
}

/// Kronecker product with `a`'s indices major.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (na, nb) = (a.dim, b.dim);
    CMatrix::from_fn(na * nb, |r, c| a[(r / nb, c / nb)] * b[(r % nb, c % nb)])
}

/// Kronecker product of state vectors.
pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// `op * rho * op^dagger`.
pub fn conjugate_by(op: &CMatrix, rho: &CMatrix) -> Result<CMatrix> {
    op.check_same_dim(rho)?;
    Ok(&(op * rho) * &op.adjoint())
}

/// Number of qubits for a `2^n`-dimensional space.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotQubitDimension(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

fn check_site(site: usize, qubits: usize) -> Result<()> {
    if site >= qubits {
        return Err(Error::SiteOutOfRange { site, qubits });
    }
    Ok(())
}

/// `I x .. x op x .. x I` with `op` at `site` among `n` qubits.
pub fn embed_site_operator(op: &CMatrix, site: usize, n: usize) -> Result<CMatrix> {
    if op.dim != 2 {
        return Err(Error::UnexpectedDimension {
            expected: 2,
            got: op.dim,
        });
    }
    check_site(site, n)?;
    let left = CMatrix::identity(1 << site);
    let right = CMatrix::identity(1 << (n - 1 - site));
    Ok(kron(&kron(&left, op), &right))
}

/// Applies a linear single-qubit map to one site of a multi-qubit operator,
/// i.e. `(f)_site x I_rest`.
///
/// `f` receives each 2x2 block obtained by fixing the other qubits' row and
/// column indices and must return the image of that block.
pub fn apply_on_site(m: &CMatrix, site: usize, f: impl Fn(&Block2) -> Block2) -> Result<CMatrix> {
    let n = qubit_count(m.dim)?;
    check_site(site, n)?;
    let bit = 1usize << (n - 1 - site);
    let mut out = CMatrix::zeros(m.dim);
    for r in (0..m.dim).filter(|r| r & bit == 0) {
        for c in (0..m.dim).filter(|c| c & bit == 0) {
            let rows = [r, r | bit];
            let cols = [c, c | bit];
            let block = [
                [m[(rows[0], cols[0])], m[(rows[0], cols[1])]],
                [m[(rows[1], cols[0])], m[(rows[1], cols[1])]],
            ];
            let image = f(&block);
            for (a, &rr) in rows.iter().enumerate() {
                for (b, &cc) in cols.iter().enumerate() {
                    out[(rr, cc)] = image[a][b];
                }
            }
        }
    }
    Ok(out)
}

/// Traces out the qubit at `site`.
pub fn partial_trace(m: &CMatrix, site: usize) -> Result<CMatrix> {
    let n = qubit_count(m.dim)?;
    check_site(site, n)?;
    let low_bits = n - 1 - site;
    // Reinsert a zero bit at the traced position.
    let expand = |i: usize| {
        let low = i & ((1 << low_bits) - 1);
        let high = i >> low_bits;
        (high << (low_bits + 1)) | low
    };
    let bit = 1usize << low_bits;
    Ok(CMatrix::from_fn(m.dim / 2, |r, c| {
        let (r, c) = (expand(r), expand(c));
        m[(r, c)] + m[(r | bit, c | bit)]
    }))
}

/// Reorders qubits: qubit `k` of the output is qubit `perm[k]` of the input.
pub fn permute_qubits(m: &CMatrix, perm: &[usize]) -> Result<CMatrix> {
    let n = qubit_count(m.dim)?;
    let mut seen = vec![false; n];
    if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
        return Err(Error::InvalidArgument(format!(
            "{perm:?} is not a permutation of {n} qubits"
        )));
    }
    let source_index = |out: usize| {
        let mut src = 0;
        for (k, &p) in perm.iter().enumerate() {
            let b = (out >> (n - 1 - k)) & 1;
            src |= b << (n - 1 - p);
        }
        src
    };
    let map: Vec<usize> = (0..m.dim).map(source_index).collect();
    Ok(CMatrix::from_fn(m.dim, |r, c| m[(map[r], map[c])]))
}
