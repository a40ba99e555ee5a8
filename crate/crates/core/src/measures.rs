//! Coherence quantifiers and entropies.
//!
//! Relative entropy of coherence is S(ρ_diag) - S(ρ); for pure states that
//! is the Shannon entropy of the photon-number distribution. The l1 norm of
//! coherence is Σ_{i≠j}|ρ_{ij}|, which for pure states collapses to
//! (Σ√Pₙ)² - 1. Entropies are computed in nats and converted on output.

use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, NumberDistribution, PureFockState, TwoModePureState};
use crate::special::{log_binomial, log_factorial};
use crate::sum::KahanSum;

/// Base used for every entropy-valued output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
}

impl LogBase {
    /// Convert a value measured in nats to this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Natural => nats,
            LogBase::Two => nats / std::f64::consts::LN_2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LogBase::Natural => "natural",
            LogBase::Two => "two",
        }
    }
}

/// -Σ gₙ Pₙ log Pₙ with 0·log 0 = 0; each of the gₙ equally likely basis
/// states contributes -Pₙ log Pₙ.
pub fn shannon_entropy(dist: &NumberDistribution, base: LogBase) -> f64 {
    let mut s = KahanSum::new();
    for n in 0..dist.len() {
        let p = dist.probs()[n];
        if p > 0.0 {
            s.add(-dist.degeneracy_at(n) * p * p.ln());
        }
    }
    base.from_nats(s.value())
}

/// -Σ λᵢ log λᵢ over the eigenvalues; eigenvalues in [-1e-10, 0) are
/// clamped to zero, anything below that signals an invalid state.
pub fn von_neumann_entropy(rho: &DensityMatrix, base: LogBase) -> Result<f64> {
    let mut s = KahanSum::new();
    for lambda in rho.eigenvalues() {
        if lambda < -1e-10 {
            return Err(Error::InvalidState(format!(
                "density matrix has eigenvalue {lambda} below -1e-10"
            )));
        }
        if lambda > 0.0 {
            s.add(-lambda * lambda.ln());
        }
    }
    Ok(base.from_nats(s.value()))
}

/// Anything the relative entropy of coherence is defined on: it needs the
/// diagonal distribution and the state's own von Neumann entropy.
pub trait CoherentState {
    fn diagonal_distribution(&self) -> NumberDistribution;

    /// S(ρ) in nats; identically zero for pure states.
    fn entropy_nats(&self) -> Result<f64>;
}

impl CoherentState for PureFockState {
    fn diagonal_distribution(&self) -> NumberDistribution {
        self.number_distribution()
    }

    fn entropy_nats(&self) -> Result<f64> {
        Ok(0.0)
    }
}

impl CoherentState for TwoModePureState {
    fn diagonal_distribution(&self) -> NumberDistribution {
        self.number_distribution()
    }

    fn entropy_nats(&self) -> Result<f64> {
        Ok(0.0)
    }
}

impl CoherentState for DensityMatrix {
    fn diagonal_distribution(&self) -> NumberDistribution {
        self.number_distribution()
    }

    fn entropy_nats(&self) -> Result<f64> {
        von_neumann_entropy(self, LogBase::Natural)
    }
}

/// S(ρ_diag) - S(ρ).
pub fn rel_ent_coherence<S: CoherentState + ?Sized>(state: &S, base: LogBase) -> Result<f64> {
    let diag = shannon_entropy(&state.diagonal_distribution(), LogBase::Natural);
    let own = state.entropy_nats()?;
    Ok(base.from_nats(diag - own))
}

/// Pure-state l1 norm of coherence (Σ gₙ √Pₙ)² - 1 from a number
/// distribution (degeneracy-aware: every basis state contributes √Pₙ).
pub fn l1_from_distribution(dist: &NumberDistribution) -> f64 {
    let mut s = KahanSum::new();
    for n in 0..dist.len() {
        s.add(dist.degeneracy_at(n) * dist.probs()[n].sqrt());
    }
    let t = s.value();
    t * t - 1.0
}

/// l1 norm of coherence of a pure state: (Σ√Pₙ)² - 1.
pub fn l1_coherence_pure(state: &PureFockState) -> f64 {
    l1_from_distribution(&state.number_distribution())
}

/// Dense-path l1 norm of coherence Σ_{i≠j}|ρ_{ij}|, compensated summation
/// in row-major order.
pub fn l1_coherence_dense(rho: &DensityMatrix) -> f64 {
    let m = rho.entries();
    let mut s = KahanSum::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j {
                s.add(m[(i, j)].norm());
            }
        }
    }
    s.value()
}

/// Normalized second-order correlation g²(0) = ⟨â†â†ââ⟩ / ⟨n̂⟩².
pub fn g2_zero(state: &PureFockState) -> Result<f64> {
    let mean = state.moment(1, 1).re;
    if mean <= 0.0 {
        return Err(Error::UndefinedCorrelation(
            "g2(0) requires a strictly positive mean photon number".into(),
        ));
    }
    Ok(state.moment(2, 2).re / (mean * mean))
}

/// Largest attainable relative entropy of coherence at mean photon number
/// n̄: (n̄+1) log(n̄+1) - n̄ log n̄, with the limit value 0 at n̄ = 0.
pub fn max_rel_ent_coherence(nbar: f64, base: LogBase) -> f64 {
    if nbar <= 0.0 {
        return 0.0;
    }
    base.from_nats((nbar + 1.0) * (nbar + 1.0).ln() - nbar * nbar.ln())
}

/// S_d(n̄ₜ) = Σₙ (n̄ₜⁿ/(n̄ₜ+1)^{n+1}) log C(n+d-1, d-1).
///
/// Terms are summed until the analytic tail bound — geometric weights times
/// the majorant log C(n+d-1, d-1) <= (d-1) log(n+d), linearized at the cut —
/// falls below `tol`.
pub fn s_d_series(d: u32, nbar_t: f64, tol: f64, base: LogBase) -> f64 {
    if d <= 1 || nbar_t <= 0.0 {
        return 0.0; // log C(n, 0) = 0
    }
    let q = nbar_t / (nbar_t + 1.0);
    let one_minus_q = 1.0 / (nbar_t + 1.0);
    let dm1 = (d - 1) as f64;
    let mut s = KahanSum::new();
    let mut qn = 1.0_f64; // q^n
    let mut n = 0u64;
    loop {
        let ln_c = log_binomial(n + d as u64 - 1, d as i64 - 1).expect("valid binomial");
        s.add(one_minus_q * qn * ln_c);
        // remaining mass past n, with ln(m+d) <= ln(n+1+d) + (m-n-1)/(n+1+d):
        // tail <= (d-1) [ ln(n+1+d) q^{n+1} + q^{n+2} / ((n+1+d)(1-q)) ]
        let anchor = (n + 1) as f64 + d as f64;
        let tail = dm1 * (anchor.ln() * qn * q + qn * q * q / (anchor * one_minus_q));
        if tail <= tol {
            return base.from_nats(s.value());
        }
        qn *= q;
        n += 1;
    }
}

/// Largest relative entropy of coherence over d modes at fixed total mean
/// photon number: the single-mode maximum plus S_d(n̄ₜ).
pub fn max_rel_ent_coherence_multimode(d: u32, nbar_t: f64, base: LogBase) -> f64 {
    const SERIES_TOL: f64 = 1e-12;
    max_rel_ent_coherence(nbar_t, base) + s_d_series(d, nbar_t, SERIES_TOL, base)
}

/// Error bar on an entropy computed from a truncated distribution: the
/// neglected tail of mass t can contribute at most t (1 + |log t|).
pub fn entropy_error_bar(tail_bound: f64, base: LogBase) -> f64 {
    if tail_bound <= 0.0 {
        return 0.0;
    }
    base.from_nats(tail_bound * (1.0 + tail_bound.ln().abs()))
}

/// Entropy of a Poisson photon-number distribution in closed series form:
/// e^{-n̄} Σ n̄ⁿ log(n!)/n! - n̄ log(n̄/e). Used as a cross-check for the
/// coherent-state coherence.
pub fn coherent_rel_ent_series(nbar: f64, terms: usize, base: LogBase) -> f64 {
    if nbar <= 0.0 {
        return 0.0;
    }
    let ln_nbar = nbar.ln();
    let mut s = KahanSum::new();
    for n in 0..terms as u64 {
        let lf = log_factorial(n);
        s.add((n as f64 * ln_nbar - lf).exp() * lf);
    }
    base.from_nats((-nbar).exp() * s.value() - nbar * (ln_nbar - 1.0))
}
