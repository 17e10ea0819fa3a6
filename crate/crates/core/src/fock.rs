//! Sparse occupation-number states for a handful of bosonic modes.
//!
//! A [`FockState`] stores complex amplitudes keyed by [`Occupation`] vectors
//! in a `BTreeMap`, so iteration is lexicographic and every operation is
//! reproducible bit-for-bit. Photon number is bounded by a cutoff; raising a
//! term past the cutoff is an error rather than a silent truncation.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitudes with modulus below this are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// Default photon cutoff: every state in this crate carries at most a pair.
pub const DEFAULT_CUTOFF: u32 = 2;

/// Photon counts per mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Occupation(counts)
    }

    pub fn zeros(mode_count: usize) -> Self {
        Occupation(vec![0; mode_count])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "⟩")
    }
}

/// A (not necessarily normalized) superposition of occupation kets.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    mode_count: usize,
    cutoff: u32,
    amplitudes: BTreeMap<Occupation, Complex64>,
}

impl FockState {
    /// The vacuum `|0,…,0⟩` with unit amplitude.
    pub fn vacuum(mode_count: usize, cutoff: u32) -> Self {
        assert!(mode_count >= 1, "a Fock space needs at least one mode");
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(Occupation::zeros(mode_count), Complex64::new(1.0, 0.0));
        FockState {
            mode_count,
            cutoff,
            amplitudes,
        }
    }

    /// The zero vector of the space.
    pub fn zero(mode_count: usize, cutoff: u32) -> Self {
        FockState {
            mode_count,
            cutoff,
            amplitudes: BTreeMap::new(),
        }
    }

    /// Builds a state from explicit terms. Repeated kets are summed.
    pub fn from_terms<I>(mode_count: usize, cutoff: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        let mut state = FockState::zero(mode_count, cutoff);
        for (counts, amp) in terms {
            if counts.len() != mode_count {
                return Err(Error::DimensionMismatch {
                    expected: mode_count,
                    found: counts.len(),
                });
            }
            let occ = Occupation(counts);
            if occ.total() > cutoff {
                return Err(Error::CutoffExceeded {
                    cutoff,
                    occupation: occ.0,
                });
            }
            *state.amplitudes.entry(occ).or_default() += amp;
        }
        state.prune();
        Ok(state)
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    /// Terms in lexicographic order of their occupation vectors.
    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn amplitude(&self, counts: &[u32]) -> Complex64 {
        self.amplitudes
            .get(&Occupation(counts.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-12 {
            return Err(Error::ZeroState);
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        let mut out = self.clone();
        for a in out.amplitudes.values_mut() {
            *a *= factor;
        }
        out.prune();
        out
    }

    /// `self + factor · other`.
    pub fn add_scaled(&self, other: &FockState, factor: Complex64) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (occ, a) in &other.amplitudes {
            *out.amplitudes.entry(occ.clone()).or_default() += factor * a;
        }
        out.prune();
        Ok(out)
    }

    /// Applies `a†_mode`, raising each term with the factor `√(n+1)`.
    pub fn create(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let mut out = FockState::zero(self.mode_count, self.cutoff);
        for (occ, a) in &self.amplitudes {
            let mut counts = occ.0.clone();
            counts[mode] += 1;
            let raised = Occupation(counts);
            if raised.total() > self.cutoff {
                return Err(Error::CutoffExceeded {
                    cutoff: self.cutoff,
                    occupation: raised.0,
                });
            }
            let factor = f64::from(raised.0[mode]).sqrt();
            *out.amplitudes.entry(raised).or_default() += a * factor;
        }
        out.prune();
        Ok(out)
    }

    /// Applies `a_mode`, lowering each term with the factor `√n`; empty
    /// modes annihilate their term.
    pub fn annihilate(&self, mode: usize) -> Result<Self> {
        self.check_mode(mode)?;
        let mut out = FockState::zero(self.mode_count, self.cutoff);
        for (occ, a) in &self.amplitudes {
            let n = occ.0[mode];
            if n == 0 {
                continue;
            }
            let mut counts = occ.0.clone();
            counts[mode] -= 1;
            *out.amplitudes.entry(Occupation(counts)).or_default() += a * f64::from(n).sqrt();
        }
        out.prune();
        Ok(out)
    }

    /// Hermitian inner product `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &FockState) -> Result<Complex64> {
        self.check_compatible(other)?;
        let (small, large, conj_small) = if self.amplitudes.len() <= other.amplitudes.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (occ, a) in &small.amplitudes {
            if let Some(b) = large.amplitudes.get(occ) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// Lifts a linear map on creation operators, `a_j† → Σ_k U_kj a_k†`, to
    /// the state by re-expanding each term as a product of transformed
    /// creation operators acting on the vacuum.
    pub fn apply_mode_map(&self, map: &ModeMap) -> Result<Self> {
        if map.dim() != self.mode_count {
            return Err(Error::DimensionMismatch {
                expected: self.mode_count,
                found: map.dim(),
            });
        }
        let mut out = FockState::zero(self.mode_count, self.cutoff);
        for (occ, amp) in &self.amplitudes {
            // |n⟩ = Π_j (a_j†)^{n_j} / √(n_j!) |vac⟩
            let norm: f64 = occ.0.iter().map(|&n| factorial(n)).product::<f64>().sqrt();
            let mut term = FockState::vacuum(self.mode_count, self.cutoff).scaled(amp / norm);
            for (j, &n) in occ.0.iter().enumerate() {
                for _ in 0..n {
                    term = term.create_combination(map, j)?;
                }
            }
            out = out.add_scaled(&term, Complex64::new(1.0, 0.0))?;
        }
        Ok(out)
    }

    /// `Σ_k U_kj a_k†` applied to `self`.
    fn create_combination(&self, map: &ModeMap, column: usize) -> Result<Self> {
        let mut acc = FockState::zero(self.mode_count, self.cutoff);
        for k in 0..self.mode_count {
            let u = map.matrix[(k, column)];
            if u.norm() == 0.0 {
                continue;
            }
            acc = acc.add_scaled(&self.create(k)?, u)?;
        }
        Ok(acc)
    }

    /// `⟨n_mode⟩ = Σ n_mode |amplitude|²`, divided by the squared norm.
    pub fn number_expectation(&self, mode: usize) -> Result<f64> {
        self.check_mode(mode)?;
        let norm = self.norm_sqr();
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        let weighted: f64 = self
            .amplitudes
            .iter()
            .map(|(occ, a)| f64::from(occ.0[mode]) * a.norm_sqr())
            .sum();
        Ok(weighted / norm)
    }

    /// Total weight of the terms whose occupation satisfies `pattern`.
    pub fn outcome_probability<F>(&self, pattern: F) -> f64
    where
        F: Fn(&[u32]) -> bool,
    {
        self.amplitudes
            .iter()
            .filter(|(occ, _)| pattern(&occ.0))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.mode_count {
            return Err(Error::ModeOutOfRange {
                index: mode,
                mode_count: self.mode_count,
            });
        }
        Ok(())
    }

    fn check_compatible(&self, other: &FockState) -> Result<()> {
        if self.mode_count != other.mode_count {
            return Err(Error::DimensionMismatch {
                expected: self.mode_count,
                found: other.mode_count,
            });
        }
        if self.cutoff != other.cutoff {
            return Err(Error::CutoffMismatch(self.cutoff, other.cutoff));
        }
        Ok(())
    }

    fn prune(&mut self) {
        self.amplitudes.retain(|_, a| a.norm() >= PRUNE_THRESHOLD);
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Linear map on creation operators of `M` modes; column `j` holds the
/// image of `a_j†`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMap {
    matrix: DMatrix<Complex64>,
}

impl ModeMap {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        Ok(ModeMap { matrix })
    }

    pub fn from_row_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(ModeMap {
            matrix: DMatrix::from_row_slice(dim, dim, entries),
        })
    }

    pub fn identity(dim: usize) -> Self {
        ModeMap {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    /// Lossless 50/50 splitter on two modes with `i` on the reflected port.
    pub fn balanced_splitter() -> Self {
        let t = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let r = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
        ModeMap {
            matrix: DMatrix::from_row_slice(2, 2, &[t, r, r, t]),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn adjoint(&self) -> Self {
        ModeMap {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `‖U†U − I‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let d = self.matrix.adjoint() * &self.matrix - DMatrix::<Complex64>::identity(n, n);
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_defect() < 1e-12
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn vacuum_is_single_unit_term() {
        let v = FockState::vacuum(4, 2);
        let terms: Vec<_> = v.terms().collect();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0.counts(), &[0, 0, 0, 0]);
        assert_eq!(*terms[0].1, c(1.0, 0.0));
        assert_eq!(FockState::vacuum(2, 2).norm(), 1.0);
    }

    #[test]
    fn ladder_factors() {
        let two = FockState::vacuum(1, 2).create(0).unwrap().create(0).unwrap();
        assert!(close(two.amplitude(&[2]), c(2f64.sqrt(), 0.0)));
        let one_h = FockState::vacuum(2, 2).create(0).unwrap();
        assert!(close(one_h.amplitude(&[1, 0]), c(1.0, 0.0)));
        let err = two.create(0).unwrap_err();
        assert!(matches!(err, Error::CutoffExceeded { cutoff: 2, .. }));
    }

    #[test]
    fn annihilation() {
        let one_h = FockState::vacuum(2, 2).create(0).unwrap();
        assert_eq!(one_h.annihilate(0).unwrap(), FockState::vacuum(2, 2));
        let gone = FockState::vacuum(2, 2).annihilate(0).unwrap();
        assert!(gone.is_zero());
        assert_eq!(gone.norm(), 0.0);
    }

    #[test]
    fn commutator_on_basis_states() {
        // a a† − a† a = 1 on every basis ket with room for one more photon
        for counts in [[0, 0], [1, 0], [0, 1]] {
            let s = FockState::from_terms(2, 2, [(counts.to_vec(), c(1.0, 0.0))]).unwrap();
            for m in 0..2 {
                let aa_dag = s.create(m).unwrap().annihilate(m).unwrap();
                let a_dag_a = match s.annihilate(m).unwrap() {
                    z if z.is_zero() => z,
                    z => z.create(m).unwrap(),
                };
                let diff = aa_dag.add_scaled(&a_dag_a, c(-1.0, 0.0)).unwrap();
                let resid = diff.add_scaled(&s, c(-1.0, 0.0)).unwrap();
                assert!(resid.norm() < 1e-12, "{counts:?} mode {m}");
            }
        }
    }

    #[test]
    fn inner_products() {
        let h = FockState::vacuum(2, 2).create(0).unwrap();
        let v = FockState::vacuum(2, 2).create(1).unwrap();
        assert_eq!(h.inner(&v).unwrap(), c(0.0, 0.0));
        assert!(close(h.inner(&h).unwrap(), c(1.0, 0.0)));
        // ⟨vac| a_H a_V a_H† a_V† |vac⟩ = 1
        let vac = FockState::vacuum(2, 2);
        let ket = vac.create(1).unwrap().create(0).unwrap();
        let back = ket.annihilate(0).unwrap().annihilate(1).unwrap();
        assert!(close(vac.inner(&back).unwrap(), c(1.0, 0.0)));
        let other = FockState::vacuum(3, 2);
        assert!(matches!(
            vac.inner(&other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn identity_map_is_noop() {
        let s = FockState::from_terms(
            3,
            2,
            [(vec![1, 1, 0], c(0.6, 0.0)), (vec![0, 0, 2], c(0.0, 0.8))],
        )
        .unwrap();
        let out = s.apply_mode_map(&ModeMap::identity(3)).unwrap();
        assert!(out.add_scaled(&s, c(-1.0, 0.0)).unwrap().norm() < 1e-15);
    }

    #[test]
    fn hong_ou_mandel() {
        let s = FockState::from_terms(2, 2, [(vec![1, 1], c(1.0, 0.0))]).unwrap();
        let out = s.apply_mode_map(&ModeMap::balanced_splitter()).unwrap();
        assert_eq!(out.amplitude(&[1, 1]), c(0.0, 0.0));
        assert!(close(out.amplitude(&[2, 0]), c(0.0, FRAC_1_SQRT_2)));
        assert!(close(out.amplitude(&[0, 2]), c(0.0, FRAC_1_SQRT_2)));
        assert_eq!(out.outcome_probability(|n| n == [1, 1]), 0.0);
    }

    #[test]
    fn single_input_pair_on_splitter() {
        // a_H†²|vac⟩/√2 → (a₁† + i a₂†)²|vac⟩/(2√2)
        let s = FockState::from_terms(2, 2, [(vec![2, 0], c(1.0, 0.0))]).unwrap();
        let out = s.apply_mode_map(&ModeMap::balanced_splitter()).unwrap();
        assert!(close(out.amplitude(&[1, 1]), c(0.0, FRAC_1_SQRT_2)));
        assert!(close(out.amplitude(&[2, 0]), c(0.5, 0.0)));
        assert!(close(out.amplitude(&[0, 2]), c(-0.5, 0.0)));
    }

    #[test]
    fn number_expectation_values() {
        let h = FockState::vacuum(2, 2).create(0).unwrap();
        assert_eq!(h.number_expectation(0).unwrap(), 1.0);
        let hh = FockState::from_terms(2, 2, [(vec![2, 0], c(1.0, 0.0))]).unwrap();
        assert_eq!(hh.number_expectation(1).unwrap(), 0.0);
        let noon = FockState::from_terms(
            2,
            2,
            [
                (vec![2, 0], c(FRAC_1_SQRT_2, 0.0)),
                (vec![0, 2], c(FRAC_1_SQRT_2, 0.0)),
            ],
        )
        .unwrap();
        assert!((noon.number_expectation(0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn mode_map_checks() {
        assert!(ModeMap::balanced_splitter().is_unitary());
        let skew = ModeMap::from_row_slice(2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)])
            .unwrap();
        assert!(!skew.is_unitary());
        let s = FockState::vacuum(3, 2);
        assert!(s.apply_mode_map(&ModeMap::identity(2)).is_err());
    }

    #[test]
    fn iteration_is_lexicographic() {
        let s = FockState::from_terms(
            2,
            2,
            [
                (vec![2, 0], c(1.0, 0.0)),
                (vec![0, 2], c(1.0, 0.0)),
                (vec![1, 1], c(1.0, 0.0)),
            ],
        )
        .unwrap();
        let order: Vec<Vec<u32>> = s.terms().map(|(o, _)| o.counts().to_vec()).collect();
        assert_eq!(order, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }
}
