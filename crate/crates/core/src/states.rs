//! State constructors and seeded samplers.
//!
//! Random states come from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, Gaussian amplitudes from `rand_distr::StandardNormal`
//! and simplex weights from normalized `Exp(1)` draws, so every sampler is
//! reproducible from its seed alone.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::{kron, partial_trace, permute_qubits, CMatrix, DensityMatrix, PureState, C64};

const WEIGHT_SUM_TOL: f64 = 1e-12;

pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn basis_combination(dim: usize, terms: &[(usize, f64)]) -> PureState {
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    for &(i, a) in terms {
        amps[i] = C64::new(a, 0.0);
    }
    PureState::new(amps).expect("normalized by construction")
}

/// `(|000> + |111>) / sqrt 2`.
pub fn ghz() -> PureState {
    basis_combination(8, &[(0, FRAC_1_SQRT_2), (7, FRAC_1_SQRT_2)])
}

/// `(|000> - |111>) / sqrt 2`.
pub fn ghz_tilde() -> PureState {
    basis_combination(8, &[(0, FRAC_1_SQRT_2), (7, -FRAC_1_SQRT_2)])
}

/// `(|001> + |010> + |100>) / sqrt 3`.
pub fn w_state() -> PureState {
    let a = 1.0 / 3f64.sqrt();
    basis_combination(8, &[(1, a), (2, a), (4, a)])
}

/// `(|00> + |11>) / sqrt 2`.
pub fn bell_state() -> PureState {
    basis_combination(4, &[(0, FRAC_1_SQRT_2), (3, FRAC_1_SQRT_2)])
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::ProbabilityOutOfRange { name, value });
    }
    Ok(())
}

/// `p |GHZ><GHZ| + (1 - p) I/8`.
pub fn noisy_ghz(p: f64) -> Result<DensityMatrix> {
    check_probability("p", p)?;
    ghz().projector().mix(p, &DensityMatrix::maximally_mixed(8))
}

/// Werner state with weight `p` on the identity: `p I/4 + (1 - p) |psi+><psi+|`.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    check_probability("p", p)?;
    DensityMatrix::maximally_mixed(4).mix(p, &bell_state().projector())
}

/// `c0 |00> + c1 |11>`.
pub fn pure_entangled_2q(c0: C64, c1: C64) -> Result<PureState> {
    let zero = C64::new(0.0, 0.0);
    PureState::new(vec![c0, zero, zero, c1])
}

pub fn random_pure_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> PureState {
    let dim = 1usize << n_qubits;
    loop {
        let amps: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if let Ok(state) = PureState::normalized(amps) {
            return state;
        }
    }
}

fn random_simplex<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let draws: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1) + f64::MIN_POSITIVE).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

/// Mixture of `rank` random pure states with random simplex weights.
pub fn random_density_with<R: Rng + ?Sized>(n_qubits: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let dim = 1usize << n_qubits;
    if rank == 0 || rank > dim {
        return Err(Error::InvalidArgument(format!(
            "rank {rank} outside 1..={dim} for {n_qubits} qubit(s)"
        )));
    }
    let weights = if rank == 1 { vec![1.0] } else { random_simplex(rank, rng) };
    let mut m = CMatrix::zeros(dim);
    for w in weights {
        let v = random_pure_state(n_qubits, rng);
        m = &m + &CMatrix::outer(v.amplitudes(), v.amplitudes()).scale(w);
    }
    Ok(DensityMatrix::new(m).expect("convex mixture of pure states"))
}

pub fn random_density(n_qubits: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(n_qubits, rank, &mut seeded_rng(seed))
}

/// Random Hermitian matrix with unit trace (not necessarily PSD).
pub fn random_unit_trace_hermitian(dim: usize, seed: u64) -> CMatrix {
    let mut rng = seeded_rng(seed);
    let mut m = CMatrix::zeros(dim);
    for r in 0..dim {
        m[(r, r)] = C64::new(rng.sample(StandardNormal), 0.0);
        for c in (r + 1)..dim {
            let z = C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            m[(r, c)] = z;
            m[(c, r)] = z.conj();
        }
    }
    let shift = (1.0 - m.trace().re) / dim as f64;
    for i in 0..dim {
        m[(i, i)] += shift;
    }
    m
}

/// The single party `X` of a bipartition `X | rest` of three qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Partition {
    A,
    B,
    C,
}

impl Partition {
    pub const ALL: [Partition; 3] = [Partition::A, Partition::B, Partition::C];

    pub fn site(self) -> usize {
        self as usize
    }

    /// Qubit order of `single x pair`: the lone party, then the rest ascending.
    fn factor_order(self) -> [usize; 3] {
        match self {
            Partition::A => [0, 1, 2],
            Partition::B => [1, 0, 2],
            Partition::C => [2, 0, 1],
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Partition::A => "A|BC",
            Partition::B => "B|AC",
            Partition::C => "C|AB",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiseparableTerm {
    pub partition: Partition,
    pub weight: f64,
    pub single: DensityMatrix,
    pub pair: DensityMatrix,
}

impl BiseparableTerm {
    /// `single x pair` with qubits returned to A, B, C order.
    pub fn state(&self) -> CMatrix {
        let raw = kron(self.single.matrix(), self.pair.matrix());
        let order = self.partition.factor_order();
        let mut perm = [0usize; 3];
        for (pos, &party) in order.iter().enumerate() {
            perm[party] = pos;
        }
        permute_qubits(&raw, &perm).expect("three-qubit permutation")
    }

    /// Recovers the two-qubit factor by tracing out the lone party.
    pub fn trace_out_single(&self) -> CMatrix {
        partial_trace(&self.state(), self.partition.site()).expect("three-qubit state")
    }
}

/// Certificate of biseparability: a convex combination of products across
/// single-party cuts.
#[derive(Debug, Clone, PartialEq)]
pub struct BiseparableSpec {
    terms: Vec<BiseparableTerm>,
}

impl BiseparableSpec {
    pub fn new(terms: Vec<BiseparableTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("biseparable state needs at least one term".into()));
        }
        for t in &terms {
            if !(t.weight >= 0.0) {
                return Err(Error::ProbabilityOutOfRange { name: "weight", value: t.weight });
            }
            if t.single.dim() != 2 {
                return Err(Error::UnexpectedDimension { expected: 2, got: t.single.dim() });
            }
            if t.pair.dim() != 4 {
                return Err(Error::UnexpectedDimension { expected: 4, got: t.pair.dim() });
            }
        }
        let total: f64 = terms.iter().map(|t| t.weight).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[BiseparableTerm] {
        &self.terms
    }

    pub fn assemble(&self) -> DensityMatrix {
        let mut m = CMatrix::zeros(8);
        for t in &self.terms {
            m = &m + &t.state().scale(t.weight);
        }
        DensityMatrix::new(m).expect("convex mixture of product states")
    }
}

fn random_term<R: Rng + ?Sized>(partition: Partition, weight: f64, rng: &mut R) -> BiseparableTerm {
    let single_rank = rng.random_range(1..=2);
    let pair_rank = rng.random_range(1..=4);
    BiseparableTerm {
        partition,
        weight,
        single: random_density_with(1, single_rank, rng).expect("valid rank"),
        pair: random_density_with(2, pair_rank, rng).expect("valid rank"),
    }
}

/// Random biseparable state with `terms` product terms; each term picks its
/// cut uniformly from A|BC, B|AC, C|AB.
pub fn random_biseparable(terms: usize, seed: u64) -> Result<(DensityMatrix, BiseparableSpec)> {
    random_biseparable_with(terms, None, &mut seeded_rng(seed))
}

/// As [`random_biseparable`], with every term on the given cut.
pub fn random_biseparable_on(terms: usize, partition: Partition, seed: u64) -> Result<(DensityMatrix, BiseparableSpec)> {
    random_biseparable_with(terms, Some(partition), &mut seeded_rng(seed))
}

fn random_biseparable_with<R: Rng + ?Sized>(
    terms: usize,
    partition: Option<Partition>,
    rng: &mut R,
) -> Result<(DensityMatrix, BiseparableSpec)> {
    if terms == 0 {
        return Err(Error::InvalidArgument("terms must be at least 1".into()));
    }
    let weights = random_simplex(terms, rng);
    let list = weights
        .into_iter()
        .map(|w| {
            let cut = partition.unwrap_or_else(|| Partition::ALL[rng.random_range(0..3)]);
            random_term(cut, w, rng)
        })
        .collect();
    let spec = BiseparableSpec::new(list)?;
    Ok((spec.assemble(), spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::min_eigenvalue;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn ghz_examples() {
        let g = ghz();
        assert!((g.norm() - 1.0).abs() < 1e-15);
        let proj = g.projector();
        assert!((proj.matrix().trace().re - 1.0).abs() < 1e-15);
        assert!((proj.matrix()[(0, 7)].re - 0.5).abs() < 1e-15);

        let gt = ghz_tilde();
        assert!(gt.inner(&g).norm() < 1e-15);
        assert!((gt.projector().matrix()[(0, 7)].re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn noisy_ghz_examples() {
        assert_eq!(noisy_ghz(1.0).unwrap(), ghz().projector());
        let mixed = noisy_ghz(0.0).unwrap();
        assert!(mixed.matrix().max_abs_diff(&CMatrix::identity(8).scale(0.125)) < 1e-16);
        assert!((noisy_ghz(0.5).unwrap().matrix()[(0, 0)].re - 0.3125).abs() < 1e-15);
        assert!(noisy_ghz(1.5).is_err());
    }

    #[test]
    fn werner_examples() {
        let w = werner(1.0).unwrap();
        assert!(w.matrix().max_abs_diff(&CMatrix::identity(4).scale(0.25)) < 1e-16);
        assert_eq!(werner(0.0).unwrap(), bell_state().projector());
        assert!((werner(0.2).unwrap().matrix()[(0, 3)].re - 0.4).abs() < 1e-15);
        assert!(werner(-0.1).is_err());
    }

    #[test]
    fn entangled_pair_examples() {
        let product = pure_entangled_2q(c(1.0), c(0.0)).unwrap();
        assert_eq!(product.amplitudes()[0], c(1.0));
        let bell = pure_entangled_2q(c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)).unwrap();
        assert_eq!(bell, bell_state());
        let s = pure_entangled_2q(c(0.6), c(0.8)).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-15);
        assert!(pure_entangled_2q(c(0.6), c(0.6)).is_err());
    }

    #[test]
    fn random_density_properties() {
        let pure = random_density(2, 1, 7).unwrap();
        assert!(min_eigenvalue(pure.matrix()).unwrap().abs() < 1e-12);
        for seed in 0..20 {
            let rho = random_density(3, 1 + (seed as usize % 8), seed).unwrap();
            assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        }
        assert_eq!(random_density(3, 4, 11).unwrap(), random_density(3, 4, 11).unwrap());
        assert!(random_density(1, 3, 0).is_err());
    }

    #[test]
    fn unit_trace_hermitian() {
        let m = random_unit_trace_hermitian(8, 3);
        assert!((m.trace().re - 1.0).abs() < 1e-12);
        assert_eq!(m.hermitian_asymmetry(), 0.0);
    }

    #[test]
    fn biseparable_factors_survive_permutation() {
        for seed in 0..30 {
            let (_, spec) = random_biseparable(3, seed).unwrap();
            for term in spec.terms() {
                let recovered = term.trace_out_single();
                assert!(
                    recovered.max_abs_diff(term.pair.matrix()) < 1e-12,
                    "{} seed {seed}",
                    term.partition
                );
                let other: Vec<usize> = (0..3).filter(|&s| s != term.partition.site()).collect();
                let single = partial_trace(&partial_trace(&term.state(), other[1]).unwrap(), other[0]).unwrap();
                assert!(single.max_abs_diff(term.single.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn biseparable_is_a_state_and_deterministic() {
        let (rho, spec) = random_biseparable(4, 99).unwrap();
        assert_eq!(spec.terms().len(), 4);
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-12);
        assert_eq!(random_biseparable(4, 99).unwrap().0, rho);
        assert!(random_biseparable(0, 1).is_err());
    }

    #[test]
    fn spec_validation() {
        let term = |w| BiseparableTerm {
            partition: Partition::A,
            weight: w,
            single: DensityMatrix::maximally_mixed(2),
            pair: DensityMatrix::maximally_mixed(4),
        };
        assert!(BiseparableSpec::new(vec![term(0.5), term(0.5)]).is_ok());
        assert!(BiseparableSpec::new(vec![term(0.5), term(0.4)]).is_err());
        assert!(BiseparableSpec::new(vec![]).is_err());
    }
}
