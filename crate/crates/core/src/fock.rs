//! Truncated Fock-space state representations and moment computations.
//!
//! Every state carries a certified `tail_bound`: an upper bound on the
//! probability mass discarded by the truncation. Constructors (see
//! [`crate::states`]) are responsible for producing that bound; the
//! operations here only propagate it.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special::log_factorial;
use crate::sum::KahanSum;

/// Default cap on the dimension of dense density matrices, chosen so
/// eigendecompositions stay sub-second.
pub const DEFAULT_DENSE_DIM: usize = 256;

// Floating-point slack allowed on top of the stated norm invariants.
const NORM_SLACK: f64 = 1e-9;

/// A truncated single-mode pure state Σ cₙ |n⟩ with amplitudes c₀..c_N.
#[derive(Debug, Clone)]
pub struct PureFockState {
    amps: Vec<Complex64>,
    tail_bound: f64,
}

impl PureFockState {
    /// Wrap amplitudes with a certified bound on the neglected mass.
    /// The squared norm must lie in [1 - tail_bound, 1] up to rounding slack.
    pub fn new(amps: Vec<Complex64>, tail_bound: f64) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::InvalidState(
                "state needs at least the |0> amplitude".into(),
            ));
        }
        if !tail_bound.is_finite() || tail_bound < 0.0 {
            return Err(Error::InvalidState(format!(
                "tail bound must be finite and >= 0, got {tail_bound}"
            )));
        }
        let n2: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if !n2.is_finite() || n2 > 1.0 + NORM_SLACK || n2 < 1.0 - tail_bound - NORM_SLACK {
            return Err(Error::InvalidState(format!(
                "squared norm {n2} outside [1 - {tail_bound}, 1]"
            )));
        }
        Ok(PureFockState { amps, tail_bound })
    }

    /// Highest retained photon number N.
    pub fn cutoff(&self) -> usize {
        self.amps.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Photon-number distribution Pₙ = |cₙ|².
    pub fn number_distribution(&self) -> NumberDistribution {
        let probs = self.amps.iter().map(|c| c.norm_sqr()).collect();
        NumberDistribution {
            probs,
            degeneracy: None,
            tail_bound: self.tail_bound,
        }
    }

    /// Normally ordered moment ⟨â†ᵏ âˡ⟩ on the truncated state:
    /// Σₙ c̄_{n+k} c_{n+l} √((n+k)!/n!) √((n+l)!/n!), factorial ratios in log space.
    pub fn moment(&self, k: u32, l: u32) -> Complex64 {
        let n_max = self.cutoff();
        let (k, l) = (k as usize, l as usize);
        let reach = k.max(l);
        if reach > n_max {
            return Complex64::new(0.0, 0.0);
        }
        let mut re = KahanSum::new();
        let mut im = KahanSum::new();
        for n in 0..=(n_max - reach) {
            let lf_n = log_factorial(n as u64);
            let weight = (0.5 * (log_factorial((n + k) as u64) - lf_n)
                + 0.5 * (log_factorial((n + l) as u64) - lf_n))
                .exp();
            let term = self.amps[n + k].conj() * self.amps[n + l] * weight;
            re.add(term.re);
            im.add(term.im);
        }
        Complex64::new(re.value(), im.value())
    }

    /// Dense rank-1 projector |ψ⟩⟨ψ| under the default dimension cap.
    pub fn densify(&self) -> Result<DensityMatrix> {
        self.densify_with_bound(DEFAULT_DENSE_DIM)
    }

    pub fn densify_with_bound(&self, max_dim: usize) -> Result<DensityMatrix> {
        let dim = self.amps.len();
        if dim > max_dim {
            return Err(Error::CapacityExceeded(format!(
                "cutoff {} needs dimension {dim} > dense bound {max_dim}",
                self.cutoff()
            )));
        }
        let v = DVector::from_column_slice(&self.amps);
        let m = &v * v.adjoint();
        DensityMatrix::with_trace_slack(m, self.tail_bound + 1e-12)
    }
}

/// Probabilities over photon numbers, optionally with a degeneracy count
/// gₙ per total photon number (multi-mode distributions depending only on
/// |n|₁ store one probability and the number of basis states carrying it).
#[derive(Debug, Clone)]
pub struct NumberDistribution {
    probs: Vec<f64>,
    degeneracy: Option<Vec<f64>>,
    tail_bound: f64,
}

impl NumberDistribution {
    pub fn new(probs: Vec<f64>, tail_bound: f64) -> Result<Self> {
        Self::build(probs, None, tail_bound)
    }

    pub fn with_degeneracy(probs: Vec<f64>, degeneracy: Vec<f64>, tail_bound: f64) -> Result<Self> {
        if probs.len() != degeneracy.len() {
            return Err(Error::InvalidArgument(format!(
                "degeneracy length {} does not match probabilities length {}",
                degeneracy.len(),
                probs.len()
            )));
        }
        if degeneracy.iter().any(|&g| !g.is_finite() || g < 1.0) {
            return Err(Error::InvalidArgument(
                "degeneracies must be finite counts >= 1".into(),
            ));
        }
        Self::build(probs, Some(degeneracy), tail_bound)
    }

    fn build(probs: Vec<f64>, degeneracy: Option<Vec<f64>>, tail_bound: f64) -> Result<Self> {
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::InvalidState(
                "probabilities must be finite and >= 0".into(),
            ));
        }
        if !tail_bound.is_finite() || tail_bound < 0.0 {
            return Err(Error::InvalidState(format!(
                "tail bound must be finite and >= 0, got {tail_bound}"
            )));
        }
        let dist = NumberDistribution {
            probs,
            degeneracy,
            tail_bound,
        };
        let total = dist.total_mass();
        if total > 1.0 + NORM_SLACK || total < 1.0 - tail_bound - NORM_SLACK {
            return Err(Error::InvalidState(format!(
                "total mass {total} outside [1 - {tail_bound}, 1]"
            )));
        }
        Ok(dist)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// gₙ for index n; 1 when no degeneracy field is present.
    pub fn degeneracy_at(&self, n: usize) -> f64 {
        self.degeneracy.as_ref().map_or(1.0, |g| g[n])
    }

    pub fn degeneracy(&self) -> Option<&[f64]> {
        self.degeneracy.as_deref()
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Σ gₙ Pₙ.
    pub fn total_mass(&self) -> f64 {
        let mut s = KahanSum::new();
        for n in 0..self.probs.len() {
            s.add(self.degeneracy_at(n) * self.probs[n]);
        }
        s.value()
    }

    /// Σ gₙ Pₙ n — for multi-mode distributions n is the total photon number.
    pub fn mean_n(&self) -> f64 {
        let mut s = KahanSum::new();
        for n in 0..self.probs.len() {
            s.add(self.degeneracy_at(n) * self.probs[n] * n as f64);
        }
        s.value()
    }

    /// Σ gₙ Pₙ n².
    pub fn second_moment(&self) -> f64 {
        let mut s = KahanSum::new();
        for n in 0..self.probs.len() {
            s.add(self.degeneracy_at(n) * self.probs[n] * (n as f64) * (n as f64));
        }
        s.value()
    }
}

/// Dense Hermitian density matrix in the number basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-10;

impl DensityMatrix {
    /// Validate Hermiticity (1e-12) and unit trace (1e-10).
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        Self::with_trace_slack(m, 0.0)
    }

    /// Like [`DensityMatrix::new`] but allowing the trace to fall short of 1
    /// by an extra `slack` — the certified tail of a truncated state.
    pub fn with_trace_slack(m: DMatrix<Complex64>, slack: f64) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "density matrix must be square and nonempty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        for i in 0..m.nrows() {
            for j in i..m.ncols() {
                for (a, b) in [(i, j), (j, i)] {
                    if !m[(a, b)].re.is_finite() || !m[(a, b)].im.is_finite() {
                        return Err(Error::InvalidState(format!(
                            "non-finite entry at ({a},{b})"
                        )));
                    }
                }
                let d = (m[(i, j)] - m[(j, i)].conj()).norm();
                if d > HERMITICITY_TOL {
                    return Err(Error::InvalidState(format!(
                        "not Hermitian: |rho[{i},{j}] - conj(rho[{j},{i}])| = {d:e}"
                    )));
                }
            }
        }
        let tr: Complex64 = m.diagonal().iter().sum();
        if (tr.re - 1.0).abs() > TRACE_TOL + slack || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace {tr} not within tolerance of 1"
            )));
        }
        Ok(DensityMatrix { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.diagonal().iter().map(|c| c.re).sum()
    }

    /// Diagonal as a number distribution; entries in [-1e-12, 0) are
    /// clamped to zero, the tail bound is the missing trace.
    pub fn number_distribution(&self) -> NumberDistribution {
        let probs: Vec<f64> = self
            .m
            .diagonal()
            .iter()
            .map(|c| if c.re < 0.0 { 0.0 } else { c.re })
            .collect();
        let total: f64 = probs.iter().sum();
        NumberDistribution {
            probs,
            degeneracy: None,
            tail_bound: (1.0 - total).max(0.0) + 1e-12,
        }
    }

    /// Eigenvalues of the Hermitian matrix, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = self.m.clone().symmetric_eigenvalues();
        let mut v: Vec<f64> = eig.iter().copied().collect();
        v.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        v
    }
}

/// Sparse two-mode pure state: occupation pairs (n₁, n₂) → amplitude.
#[derive(Debug, Clone)]
pub struct TwoModePureState {
    amps: BTreeMap<(u32, u32), Complex64>,
    tail_bound: f64,
}

impl TwoModePureState {
    pub fn new(amps: BTreeMap<(u32, u32), Complex64>, tail_bound: f64) -> Result<Self> {
        if !tail_bound.is_finite() || tail_bound < 0.0 {
            return Err(Error::InvalidState(format!(
                "tail bound must be finite and >= 0, got {tail_bound}"
            )));
        }
        let n2: f64 = amps.values().map(|c| c.norm_sqr()).sum();
        if !n2.is_finite() || n2 > 1.0 + NORM_SLACK || n2 < 1.0 - tail_bound - NORM_SLACK {
            return Err(Error::InvalidState(format!(
                "squared norm {n2} outside [1 - {tail_bound}, 1]"
            )));
        }
        Ok(TwoModePureState { amps, tail_bound })
    }

    /// Largest retained n₁ + n₂.
    pub fn total_cutoff(&self) -> u32 {
        self.amps.keys().map(|&(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (&(u32, u32), &Complex64)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, n1: u32, n2: u32) -> Complex64 {
        self.amps
            .get(&(n1, n2))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn support_len(&self) -> usize {
        self.amps.len()
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.values().map(|c| c.norm_sqr()).sum()
    }

    /// Flattened joint distribution over occupation pairs, in key order.
    /// The index enumerates pairs; it is not a photon number.
    pub fn number_distribution(&self) -> NumberDistribution {
        let probs = self.amps.values().map(|c| c.norm_sqr()).collect();
        NumberDistribution {
            probs,
            degeneracy: None,
            tail_bound: self.tail_bound,
        }
    }

    /// ⟨n̂₁ + n̂₂⟩ on the truncated state.
    pub fn mean_total_photons(&self) -> f64 {
        let mut s = KahanSum::new();
        for (&(n1, n2), c) in &self.amps {
            s.add(c.norm_sqr() * (n1 + n2) as f64);
        }
        s.value()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn plus_state() -> PureFockState {
        let h = 1.0 / 2.0f64.sqrt();
        PureFockState::new(vec![Complex64::new(h, 0.0), Complex64::new(h, 0.0)], 0.0).unwrap()
    }

    #[test]
    fn vacuum_distribution() {
        let v = PureFockState::new(vec![Complex64::new(1.0, 0.0)], 0.0).unwrap();
        let d = v.number_distribution();
        assert_eq!(d.probs(), &[1.0]);
        assert_eq!(d.mean_n(), 0.0);
        assert_eq!(d.second_moment(), 0.0);
    }

    #[test]
    fn plus_state_distribution_and_moments() {
        let s = plus_state();
        let d = s.number_distribution();
        assert!(close(d.probs()[0], 0.5, 1e-15));
        assert!(close(d.probs()[1], 0.5, 1e-15));
        // normalization moment
        assert!(close(s.moment(0, 0).re, 1.0, 1e-15));
        // <a> = c1* c0 ... = 0.5
        assert!(close(s.moment(0, 1).re, 0.5, 1e-15));
    }

    #[test]
    fn moment_is_conjugate_symmetric() {
        let amps = [
            Complex64::new(0.5, 0.1),
            Complex64::new(0.2, -0.4),
            Complex64::new(0.3, 0.2),
            Complex64::new(0.1, 0.0),
        ];
        let n2: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        let amps: Vec<_> = amps.iter().map(|c| c / n2.sqrt()).collect();
        let s = PureFockState::new(amps, 0.0).unwrap();
        for k in 0..=4u32 {
            for l in 0..=4u32 {
                let a = s.moment(k, l);
                let b = s.moment(l, k).conj();
                assert!((a - b).norm() < 1e-14, "k={k} l={l}");
            }
        }
    }

    #[test]
    fn densify_matches_distribution_and_trace() {
        let s = plus_state();
        let rho = s.densify().unwrap();
        assert_eq!(rho.dim(), 2);
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(rho.entries()[(i, j)].re, 0.5, 1e-15));
                assert!(close(rho.entries()[(i, j)].im, 0.0, 1e-15));
            }
        }
        let d_direct = s.number_distribution();
        let d_dense = rho.number_distribution();
        for n in 0..2 {
            assert!(close(d_direct.probs()[n], d_dense.probs()[n], 1e-15));
        }
        assert!(close(rho.trace(), s.norm_sqr(), 1e-12));
    }

    #[test]
    fn densify_rejects_oversized_state() {
        let mut amps = vec![Complex64::new(0.0, 0.0); 400];
        amps[0] = Complex64::new(1.0, 0.0);
        let s = PureFockState::new(amps, 0.0).unwrap();
        assert!(matches!(s.densify(), Err(Error::CapacityExceeded(_))));
        assert!(s.densify_with_bound(512).is_ok());
    }

    #[test]
    fn density_matrix_validation() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(1, 1)] = Complex64::new(0.5, 0.0);
        m[(0, 1)] = Complex64::new(0.1, 0.2);
        m[(1, 0)] = Complex64::new(0.1, -0.2);
        assert!(DensityMatrix::new(m.clone()).is_ok());

        m[(1, 0)] = Complex64::new(0.1, 0.2); // breaks Hermiticity
        assert!(DensityMatrix::new(m.clone()).is_err());

        m[(1, 0)] = Complex64::new(0.1, -0.2);
        m[(1, 1)] = Complex64::new(0.9, 0.0); // breaks trace
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn two_mode_state_basics() {
        let mut amps = BTreeMap::new();
        let h = 1.0 / 2.0f64.sqrt();
        amps.insert((0, 0), Complex64::new(h, 0.0));
        amps.insert((2, 1), Complex64::new(0.0, h));
        let s = TwoModePureState::new(amps, 0.0).unwrap();
        assert_eq!(s.total_cutoff(), 3);
        assert!(close(s.mean_total_photons(), 1.5, 1e-15));
        let d = s.number_distribution();
        assert_eq!(d.len(), 2);
        assert!(close(d.probs()[0], 0.5, 1e-15));
        assert_eq!(s.amplitude(5, 5), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn degeneracy_weighted_moments() {
        // g = [1, 2], P = [0.5, 0.25]: total = 1, mean = 0.5, m2 = 0.5
        let d = NumberDistribution::with_degeneracy(vec![0.5, 0.25], vec![1.0, 2.0], 0.0).unwrap();
        assert!(close(d.total_mass(), 1.0, 1e-15));
        assert!(close(d.mean_n(), 0.5, 1e-15));
        assert!(close(d.second_moment(), 0.5, 1e-15));
    }

    #[test]
    fn norm_violations_are_rejected() {
        let bad = PureFockState::new(vec![Complex64::new(0.5, 0.0)], 0.0);
        assert!(bad.is_err());
        let bad = NumberDistribution::new(vec![0.7, 0.7], 0.0);
        assert!(bad.is_err());
    }

    #[test]
    fn non_finite_inputs_are_rejected() {
        assert!(PureFockState::new(vec![Complex64::new(f64::NAN, 0.0)], 0.0).is_err());
        assert!(NumberDistribution::new(vec![f64::NAN], 0.0).is_err());
        let mut amps = BTreeMap::new();
        amps.insert((0u32, 0u32), Complex64::new(f64::INFINITY, 0.0));
        assert!(TwoModePureState::new(amps, 0.0).is_err());
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 0)] = Complex64::new(f64::NAN, 0.0);
        m[(1, 1)] = Complex64::new(1.0, 0.0);
        assert!(DensityMatrix::new(m).is_err());
    }
}
