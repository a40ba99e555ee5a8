//! Constructors for the bosonic states under study, each delivering a
//! certified truncation tail bound.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    DensityMatrix, NumberDistribution, PureFockState, TwoModePureState, DEFAULT_DENSE_DIM,
};
use crate::special::{
    hermite_sequence, log_binomial, log_double_factorial_odd, log_factorial, LogReal,
};
use crate::sum::KahanSum;

/// Truncation contract: keep cutting the series until the certified tail
/// falls below `tol`, giving up past `max_cutoff`.
#[derive(Debug, Clone, Copy)]
pub struct TruncationPolicy {
    pub tol: f64,
    pub max_cutoff: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            tol: 1e-12,
            max_cutoff: 1_000_000,
        }
    }
}

impl TruncationPolicy {
    pub fn with_tol(tol: f64) -> Self {
        TruncationPolicy {
            tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !self.tol.is_finite() || self.tol <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "tol must be > 0, got {}",
                self.tol
            )));
        }
        if self.max_cutoff < 1 {
            return Err(Error::InvalidArgument("max_cutoff must be >= 1".into()));
        }
        Ok(())
    }
}

/// Phase rule φₙ for amplitude constructors: all zero, or linear φₙ = nφ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhaseRule {
    Zero,
    Linear(f64),
}

impl PhaseRule {
    fn phase(&self, n: usize) -> f64 {
        match self {
            PhaseRule::Zero => 0.0,
            PhaseRule::Linear(phi) => n as f64 * phi,
        }
    }
}

/// Smallest N with q^{N+1} <= tol for a geometric tail, plus that tail.
fn geometric_cutoff(q: f64, policy: &TruncationPolicy) -> Result<(usize, f64)> {
    debug_assert!((0.0..1.0).contains(&q));
    if q == 0.0 {
        return Ok((0, 0.0));
    }
    let needed = (policy.tol.ln() / q.ln()).ceil() as i64 - 1;
    let n = needed.max(0) as usize;
    if n > policy.max_cutoff {
        return Err(Error::CapacityExceeded(format!(
            "geometric truncation needs cutoff {n} > max_cutoff {}",
            policy.max_cutoff
        )));
    }
    Ok((n, q.powi(n as i32 + 1)))
}

/// Pure state with a thermal (geometric) photon-number distribution:
/// cₙ = n̄^{n/2} / (n̄+1)^{(n+1)/2} · e^{iφₙ}. The coherence maximizer at
/// fixed mean photon number.
pub fn pstd(nbar: f64, phases: PhaseRule, policy: &TruncationPolicy) -> Result<PureFockState> {
    policy.validate()?;
    check_nbar(nbar)?;
    if nbar == 0.0 {
        return PureFockState::new(vec![Complex64::new(1.0, 0.0)], 0.0);
    }
    let q = nbar / (nbar + 1.0);
    let (cutoff, tail) = geometric_cutoff(q, policy)?;
    let ln_q = q.ln();
    let ln_p0 = (nbar + 1.0).recip().ln();
    let amps = (0..=cutoff)
        .map(|n| {
            let mag = (0.5 * (n as f64 * ln_q + ln_p0)).exp();
            Complex64::from_polar(mag, phases.phase(n))
        })
        .collect();
    PureFockState::new(amps, tail)
}

/// Coherent state |α⟩ with amplitudes e^{-|α|²/2} αⁿ/√n!.
pub fn coherent(alpha: Complex64, policy: &TruncationPolicy) -> Result<PureFockState> {
    policy.validate()?;
    if !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(Error::InvalidArgument("alpha must be finite".into()));
    }
    let nbar = alpha.norm_sqr();
    if nbar == 0.0 {
        return PureFockState::new(vec![Complex64::new(1.0, 0.0)], 0.0);
    }
    let (cutoff, tail) = poisson_cutoff(nbar, policy)?;
    let ln_abs_alpha = alpha.norm().ln();
    let arg = alpha.arg();
    let amps = (0..=cutoff)
        .map(|n| {
            let mag = (-0.5 * nbar + n as f64 * ln_abs_alpha - 0.5 * log_factorial(n as u64)).exp();
            Complex64::from_polar(mag, n as f64 * arg)
        })
        .collect();
    PureFockState::new(amps, tail)
}

/// Poisson tail: once N+1 >= 2n̄ the term ratio n̄/(n+1) is dominated by
/// r = n̄/(N+2) <= 1/2, so the tail is below P_{N+1} / (1 - r).
fn poisson_cutoff(nbar: f64, policy: &TruncationPolicy) -> Result<(usize, f64)> {
    let ln_nbar = nbar.ln();
    let mut n = (2.0 * nbar).ceil().max(8.0) as usize;
    loop {
        if n > policy.max_cutoff {
            return Err(Error::CapacityExceeded(format!(
                "Poisson truncation for nbar={nbar} exceeded max_cutoff {}",
                policy.max_cutoff
            )));
        }
        let m = n + 1;
        let ln_pm = -nbar + m as f64 * ln_nbar - log_factorial(m as u64);
        let r = nbar / (m as f64 + 1.0);
        let bound = ln_pm.exp() / (1.0 - r);
        if bound <= policy.tol {
            return Ok((n, bound));
        }
        n += 1;
    }
}

/// Photon-number distribution of the displaced squeezed state
/// D(α) S(ξ) |0⟩ with ξ = r e^{i2φ}, evaluated through scale-carried
/// Hermite polynomials. α = 0 reduces to the even-support closed form
/// Pₙ = tanhⁿr ((n-1)!!)² / (n! cosh r).
pub fn squeezed(
    alpha: Complex64,
    r: f64,
    phi: f64,
    policy: &TruncationPolicy,
) -> Result<NumberDistribution> {
    policy.validate()?;
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "squeeze magnitude must be >= 0, got {r}"
        )));
    }
    if r == 0.0 {
        // squeeze is the identity: Poisson statistics of |α⟩
        return Ok(coherent(alpha, policy)?.number_distribution());
    }
    if alpha == Complex64::new(0.0, 0.0) {
        return squeezed_vacuum_distribution(r, policy);
    }
    let theta = 2.0 * phi; // squeeze phase of ξ = r e^{i2φ}
    let t = r.tanh();
    let ln_t = t.ln();
    let ln_cosh = r.cosh().ln();
    let phase = Complex64::from_polar(1.0, theta);
    let ln_pref = -alpha.norm_sqr() - t * (alpha.conj() * alpha.conj() * phase).re;
    let z = (alpha + alpha.conj() * phase * t) / (2.0 * phase * t).sqrt();

    // No clean analytic tail for the displaced case; positivity and unit
    // total mass make the running normalization deficit a certified bound.
    let mean_hint = (alpha.norm_sqr() + r.sinh().powi(2)).ceil() as usize;
    let min_terms = 8 * (mean_hint + 2);
    let mut chunk = (2 * min_terms).max(64);
    loop {
        let herm = hermite_sequence(chunk as u32, z);
        let mut probs = Vec::with_capacity(chunk + 1);
        let mut cum = KahanSum::new();
        for (n, h) in herm.iter().enumerate() {
            let ln_p = ln_pref + n as f64 * (ln_t - std::f64::consts::LN_2)
                - log_factorial(n as u64)
                - ln_cosh
                + 2.0 * h.log_abs();
            let p = ln_p.exp();
            probs.push(p);
            cum.add(p);
            let deficit = 1.0 - cum.value();
            if n >= min_terms && deficit <= policy.tol {
                probs.truncate(n + 1);
                return NumberDistribution::new(probs, deficit.max(0.0));
            }
        }
        if chunk >= policy.max_cutoff {
            return Err(Error::CapacityExceeded(format!(
                "displaced squeezed state did not reach tail {} by cutoff {}",
                policy.tol, policy.max_cutoff
            )));
        }
        chunk = (chunk * 2).min(policy.max_cutoff);
    }
}

fn squeezed_vacuum_distribution(r: f64, policy: &TruncationPolicy) -> Result<NumberDistribution> {
    let t = r.tanh();
    let t2 = t * t;
    let ln_t = t.ln();
    let ln_cosh = r.cosh().ln();
    let ln_p_even = |n: u64| -> f64 {
        n as f64 * ln_t + 2.0 * log_double_factorial_odd(n).expect("even n")
            - log_factorial(n)
            - ln_cosh
    };
    // ratio test: P_{n+2}/P_n = tanh²r (n+1)/(n+2) <= tanh²r, so the tail
    // past even N is below P_N t²/(1-t²)
    let geo = t2 / (1.0 - t2);
    let mut n = 0u64;
    loop {
        let tail = ln_p_even(n).exp() * geo;
        if tail <= policy.tol {
            let mut probs = vec![0.0; n as usize + 1];
            for m in (0..=n).step_by(2) {
                probs[m as usize] = ln_p_even(m).exp();
            }
            return NumberDistribution::new(probs, tail);
        }
        n += 2;
        if n as usize > policy.max_cutoff {
            return Err(Error::CapacityExceeded(format!(
                "squeezed vacuum truncation for r={r} exceeded max_cutoff {}",
                policy.max_cutoff
            )));
        }
    }
}

/// Squeezed vacuum S(r)|0⟩ (real squeeze phase) as an amplitude-level state:
/// c_{2m} = (-tanh r)^m √((2m)!) / (2^m m! √cosh r), odd amplitudes zero.
/// Its number distribution matches [`squeezed`] at α = 0.
pub fn squeezed_vacuum(r: f64, policy: &TruncationPolicy) -> Result<PureFockState> {
    policy.validate()?;
    if !r.is_finite() || r < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "squeeze magnitude must be >= 0, got {r}"
        )));
    }
    if r == 0.0 {
        return PureFockState::new(vec![Complex64::new(1.0, 0.0)], 0.0);
    }
    let dist = squeezed_vacuum_distribution(r, policy)?;
    let t = r.tanh();
    let ln_t = t.ln();
    let ln_cosh = r.cosh().ln();
    let mut amps = vec![Complex64::new(0.0, 0.0); dist.len()];
    for m in (0..dist.len()).step_by(2) {
        let k = (m / 2) as u64;
        let ln_mag = 0.5 * (m as f64) * ln_t + 0.5 * log_factorial(m as u64)
            - k as f64 * std::f64::consts::LN_2
            - log_factorial(k)
            - 0.5 * ln_cosh;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        amps[m] = Complex64::new(sign * ln_mag.exp(), 0.0);
    }
    PureFockState::new(amps, dist.tail_bound())
}

/// Thermal state: diagonal density matrix with entries n̄ⁿ/(n̄+1)^{n+1}.
pub fn thermal(nbar: f64, policy: &TruncationPolicy) -> Result<DensityMatrix> {
    thermal_with_bound(nbar, policy, DEFAULT_DENSE_DIM)
}

pub fn thermal_with_bound(
    nbar: f64,
    policy: &TruncationPolicy,
    max_dim: usize,
) -> Result<DensityMatrix> {
    policy.validate()?;
    check_nbar(nbar)?;
    let (probs, tail) = geometric_probs(nbar, policy)?;
    if probs.len() > max_dim {
        return Err(Error::CapacityExceeded(format!(
            "thermal state at nbar={nbar} needs dimension {} > dense bound {max_dim}",
            probs.len()
        )));
    }
    let mut m = DMatrix::<Complex64>::zeros(probs.len(), probs.len());
    for (n, &p) in probs.iter().enumerate() {
        m[(n, n)] = Complex64::new(p, 0.0);
    }
    DensityMatrix::with_trace_slack(m, tail + 1e-12)
}

fn geometric_probs(nbar: f64, policy: &TruncationPolicy) -> Result<(Vec<f64>, f64)> {
    if nbar == 0.0 {
        return Ok((vec![1.0], 0.0));
    }
    let q = nbar / (nbar + 1.0);
    let (cutoff, tail) = geometric_cutoff(q, policy)?;
    let ln_q = q.ln();
    let ln_p0 = (nbar + 1.0).recip().ln();
    let probs = (0..=cutoff)
        .map(|n| (n as f64 * ln_q + ln_p0).exp())
        .collect();
    Ok((probs, tail))
}

/// Total-photon-number distribution of the d-mode maximal coherent state:
/// each basis state with |n|₁ = n carries
/// Pₙ = n̄ₜⁿ / ((n̄ₜ+1)^{n+1} C(n+d-1, d-1)), with degeneracy C(n+d-1, d-1).
pub fn multimode_max_coherent(
    d: u32,
    nbar_t: f64,
    policy: &TruncationPolicy,
) -> Result<NumberDistribution> {
    policy.validate()?;
    check_nbar(nbar_t)?;
    if d < 1 {
        return Err(Error::InvalidArgument("mode count d must be >= 1".into()));
    }
    let (geo, tail) = geometric_probs(nbar_t, policy)?;
    let mut probs = Vec::with_capacity(geo.len());
    let mut degen = Vec::with_capacity(geo.len());
    for (n, &g) in geo.iter().enumerate() {
        let ln_c = log_binomial(n as u64 + d as u64 - 1, d as i64 - 1).expect("0 <= d-1 <= n+d-1");
        let count = ln_c.exp();
        probs.push(g / count);
        degen.push(count);
    }
    NumberDistribution::with_degeneracy(probs, degen, tail)
}

/// Two-mode squeezed vacuum: Σₙ (n̄ₜ/2)^{n/2}/(n̄ₜ/2+1)^{(n+1)/2} |n,n⟩.
pub fn tmsv(nbar_t: f64, policy: &TruncationPolicy) -> Result<TwoModePureState> {
    policy.validate()?;
    check_nbar(nbar_t)?;
    let half = nbar_t / 2.0;
    let mut amps = BTreeMap::new();
    if half == 0.0 {
        amps.insert((0, 0), Complex64::new(1.0, 0.0));
        return TwoModePureState::new(amps, 0.0);
    }
    let q = half / (half + 1.0);
    let (cutoff, tail) = geometric_cutoff(q, policy)?;
    let ln_q = q.ln();
    let ln_p0 = (half + 1.0).recip().ln();
    for n in 0..=cutoff {
        let mag = (0.5 * (n as f64 * ln_q + ln_p0)).exp();
        amps.insert((n as u32, n as u32), Complex64::new(mag, 0.0));
    }
    TwoModePureState::new(amps, tail)
}

/// Product state |α⟩₁|α⟩₂.
pub fn two_mode_coherent(alpha: Complex64, policy: &TruncationPolicy) -> Result<TwoModePureState> {
    policy.validate()?;
    // each factor at tol/2 so the composed tail bound stays within tol
    let factor_policy = TruncationPolicy {
        tol: policy.tol / 2.0,
        ..*policy
    };
    let single = coherent(alpha, &factor_policy)?;
    let amps1 = single.amplitudes();
    let mut amps = BTreeMap::new();
    for (m, &am) in amps1.iter().enumerate() {
        for (n, &an) in amps1.iter().enumerate() {
            amps.insert((m as u32, n as u32), am * an);
        }
    }
    TwoModePureState::new(amps, 2.0 * single.tail_bound())
}

/// 50:50 beam splitter exp[θ(â†b̂ - âb̂†)] at θ = π/4, applied exactly
/// within each total-photon-number block. The generator conserves
/// n₁ + n₂, so each block is an (n+1)-dimensional rotation; with the
/// diagonal gauge D = diag(i^j) the block Hamiltonian becomes a real
/// symmetric tridiagonal matrix and the exponential follows from its
/// eigendecomposition.
pub fn beam_splitter_50_50(state: &TwoModePureState) -> TwoModePureState {
    let theta = std::f64::consts::FRAC_PI_4;
    let mut blocks: BTreeMap<u32, Vec<Complex64>> = BTreeMap::new();
    for (&(n1, n2), &amp) in state.amplitudes() {
        let total = n1 + n2;
        let block = blocks
            .entry(total)
            .or_insert_with(|| vec![Complex64::new(0.0, 0.0); total as usize + 1]);
        block[n2 as usize] = amp; // index j = photons in mode 2
    }

    let mut out = BTreeMap::new();
    for (&total, block) in &blocks {
        let dim = total as usize + 1;
        if dim == 1 {
            out.insert((0u32, 0u32), block[0]);
            continue;
        }
        // S[j-1][j] = sqrt(j (total - j + 1)), real symmetric tridiagonal
        let mut s = DMatrix::<f64>::zeros(dim, dim);
        for j in 1..dim {
            let v = ((j as f64) * (total as f64 - j as f64 + 1.0)).sqrt();
            s[(j - 1, j)] = v;
            s[(j, j - 1)] = v;
        }
        let eig = nalgebra::SymmetricEigen::new(s);

        // w = D† v, y = Vᵀ w, y_k *= e^{iθ μ_k}, w' = V y, v' = D w'
        let i_pow = |j: usize| -> Complex64 {
            match j % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            }
        };
        let w: Vec<Complex64> = (0..dim).map(|j| i_pow(j).conj() * block[j]).collect();
        let mut y = vec![Complex64::new(0.0, 0.0); dim];
        for k in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                acc += eig.eigenvectors[(j, k)] * w[j];
            }
            y[k] = acc * Complex64::from_polar(1.0, theta * eig.eigenvalues[k]);
        }
        for j in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim {
                acc += eig.eigenvectors[(j, k)] * y[k];
            }
            let n2 = j as u32;
            out.insert((total - n2, n2), i_pow(j) * acc);
        }
    }
    TwoModePureState::new(out, state.tail_bound()).expect("unitary preserves the norm")
}

/// TMSV through the 50:50 beam splitter, built directly from the closed
/// form: layer n of weight λₙ spreads over |2n-2k⟩|2k⟩ with coefficients
/// (-1)ᵏ C(n,k) √((2n-2k)!(2k)!) / (2ⁿ n!).
pub fn tmsv_through_bs(nbar_t: f64, policy: &TruncationPolicy) -> Result<TwoModePureState> {
    policy.validate()?;
    check_nbar(nbar_t)?;
    let half = nbar_t / 2.0;
    let mut amps = BTreeMap::new();
    if half == 0.0 {
        amps.insert((0, 0), Complex64::new(1.0, 0.0));
        return TwoModePureState::new(amps, 0.0);
    }
    let q = half / (half + 1.0);
    let (cutoff, tail) = geometric_cutoff(q, policy)?;
    let ln_q = q.ln();
    let ln_p0 = (half + 1.0).recip().ln();
    for n in 0..=cutoff as u64 {
        let layer = (0.5 * (n as f64 * ln_q + ln_p0)).exp();
        let ln_norm = n as f64 * std::f64::consts::LN_2 + log_factorial(n);
        for k in 0..=n {
            let coeff = LogReal::new(
                if k % 2 == 0 { 1 } else { -1 },
                log_binomial(n, k as i64).expect("0 <= k <= n")
                    + 0.5 * (log_factorial(2 * n - 2 * k) + log_factorial(2 * k))
                    - ln_norm,
            );
            let amp = layer * coeff.value();
            amps.insert(
                ((2 * n - 2 * k) as u32, (2 * k) as u32),
                Complex64::new(amp, 0.0),
            );
        }
    }
    TwoModePureState::new(amps, tail)
}

fn check_nbar(nbar: f64) -> Result<()> {
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "mean photon number must be finite and >= 0, got {nbar}"
        )));
    }
    Ok(())
}
