//! Covariance-matrix diagnostics over the canonical quadratures
//! x = (â+â†)/√2, p = (â-â†)/(√2 i), ħ = 1.
//!
//! A pure Gaussian state has det γ = 1, so the determinant measures how
//! far a pure state sits from the Gaussian family. The moment route here
//! is the source of truth; the geometric-law closed forms are a
//! cross-check (they assume real amplitudes).

use crate::error::{Error, Result};
use crate::fock::PureFockState;
use crate::special::polylog_neg_half;
use crate::sum::KahanSum;

/// 2x2 real symmetric covariance matrix γ of the quadratures, scaled so
/// the vacuum gives the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    xx: f64,
    xp: f64,
    pp: f64,
}

impl CovarianceMatrix {
    pub fn new(xx: f64, xp: f64, pp: f64) -> Self {
        CovarianceMatrix { xx, xp, pp }
    }

    pub fn identity() -> Self {
        CovarianceMatrix {
            xx: 1.0,
            xp: 0.0,
            pp: 1.0,
        }
    }

    /// (γ₁₁, γ₁₂, γ₂₂); γ₂₁ equals γ₁₂ by construction.
    pub fn entries(&self) -> (f64, f64, f64) {
        (self.xx, self.xp, self.pp)
    }

    pub fn det(&self) -> f64 {
        self.xx * self.pp - self.xp * self.xp
    }
}

/// det γ; equals 1 exactly for pure Gaussian states.
pub fn det_gamma(gamma: &CovarianceMatrix) -> f64 {
    gamma.det()
}

/// γ from first principles through the normally ordered moments
/// ⟨â⟩, ⟨â²⟩, ⟨â†â⟩ of the truncated state:
/// γ₁₁ = 2⟨x²⟩ - 2⟨x⟩², γ₂₂ = 2⟨p²⟩ - 2⟨p⟩², and the symmetrized
/// cross term γ₁₂ = 2(Im⟨â²⟩ - ⟨x⟩⟨p⟩).
pub fn covariance_matrix(state: &PureFockState) -> CovarianceMatrix {
    let a = state.moment(0, 1);
    let a2 = state.moment(0, 2);
    let nbar = state.moment(1, 1).re;

    let mean_x = std::f64::consts::SQRT_2 * a.re;
    let mean_p = std::f64::consts::SQRT_2 * a.im;
    let x2 = a2.re + nbar + 0.5; // <x²> = Re<a²> + <n> + 1/2
    let p2 = -a2.re + nbar + 0.5;

    CovarianceMatrix {
        xx: 2.0 * x2 - 2.0 * mean_x * mean_x,
        xp: 2.0 * (a2.im - mean_x * mean_p),
        pp: 2.0 * p2 - 2.0 * mean_p * mean_p,
    }
}

/// Closed-form γ of the zero-phase geometric-amplitude state at mean n̄,
/// assembled from two certified series with q = n̄/(n̄+1):
/// ⟨â²⟩ = n̄/(n̄+1)² Σ qⁿ √(n+2)√(n+1) and ⟨â⟩ = Li₋₁/₂(q)/√(n̄(n̄+1)).
pub fn pstd_covariance_closed_form(nbar: f64, tol: f64) -> Result<CovarianceMatrix> {
    if !nbar.is_finite() || nbar < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "mean photon number must be finite and >= 0, got {nbar}"
        )));
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tol must be > 0, got {tol}"
        )));
    }
    if nbar == 0.0 {
        return Ok(CovarianceMatrix::identity());
    }
    let q = nbar / (nbar + 1.0);
    let inner_tol = tol.min(1e-13) / 8.0;

    // Σ qⁿ √((n+1)(n+2)), tail dominated by Σ (n+2) qⁿ which telescopes to
    // q^{M+1} [ (M+3)/(1-q) + q/(1-q)² ]
    let mut series = KahanSum::new();
    let mut qn = 1.0_f64;
    let mut m = 0u64;
    let one_minus_q = 1.0 - q;
    loop {
        series.add(qn * (((m + 1) * (m + 2)) as f64).sqrt());
        let tail = qn * q * ((m as f64 + 3.0) / one_minus_q + q / (one_minus_q * one_minus_q));
        if tail <= inner_tol {
            break;
        }
        qn *= q;
        m += 1;
    }
    let a2 = nbar / ((nbar + 1.0) * (nbar + 1.0)) * series.value();
    let mean_a = polylog_neg_half(q, inner_tol * (nbar * (nbar + 1.0)).sqrt())?
        / (nbar * (nbar + 1.0)).sqrt();

    Ok(CovarianceMatrix {
        xx: 2.0 * (nbar + 0.5 + a2 - 2.0 * mean_a * mean_a),
        xp: 0.0,
        pp: 2.0 * (nbar + 0.5 - a2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{coherent, pstd, squeezed_vacuum, PhaseRule, TruncationPolicy};
    use num_complex::Complex64;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn policy() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn vacuum_gives_identity() {
        let v = coherent(Complex64::new(0.0, 0.0), &policy()).unwrap();
        let g = covariance_matrix(&v);
        let (xx, xp, pp) = g.entries();
        assert!(close(xx, 1.0, 1e-12));
        assert!(close(pp, 1.0, 1e-12));
        assert!(close(xp, 0.0, 1e-12));
    }

    #[test]
    fn displacement_leaves_covariance_at_identity() {
        for alpha in [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(1.0, 1.0),
        ] {
            let c = coherent(alpha, &policy()).unwrap();
            let g = covariance_matrix(&c);
            let (xx, xp, pp) = g.entries();
            assert!(close(xx, 1.0, 1e-9), "alpha={alpha}: xx={xx}");
            assert!(close(pp, 1.0, 1e-9), "alpha={alpha}: pp={pp}");
            assert!(close(xp, 0.0, 1e-9), "alpha={alpha}: xp={xp}");
            assert!(close(det_gamma(&g), 1.0, 1e-9));
        }
    }

    #[test]
    fn squeezed_vacuum_is_pure_gaussian() {
        for r in [0.2, 0.5, 1.0] {
            let s = squeezed_vacuum(r, &policy()).unwrap();
            let g = covariance_matrix(&s);
            let (xx, xp, pp) = g.entries();
            assert!(close(xx, (-2.0 * r).exp(), 1e-9), "r={r}: xx={xx}");
            assert!(close(pp, (2.0 * r).exp(), 1e-8), "r={r}: pp={pp}");
            assert!(close(xp, 0.0, 1e-10));
            assert!(
                close(det_gamma(&g), 1.0, 1e-8),
                "r={r}: det={}",
                det_gamma(&g)
            );
        }
    }

    #[test]
    fn geometric_state_is_not_gaussian_at_unit_mean() {
        let s = pstd(1.0, PhaseRule::Zero, &policy()).unwrap();
        let g = covariance_matrix(&s);
        let det = det_gamma(&g);
        // golden value from two independent 40-digit evaluations
        assert!(close(det, 1.01723326967968, 1e-9), "{det}");
        assert!(det > 1.01);
        // the closed-form route assumes zero off-diagonals; confirm
        assert!(g.entries().1.abs() < 1e-9);
    }

    #[test]
    fn closed_form_matches_first_principles() {
        for nbar in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let s = pstd(nbar, PhaseRule::Zero, &policy()).unwrap();
            let direct = covariance_matrix(&s);
            let closed = pstd_covariance_closed_form(nbar, 1e-10).unwrap();
            let (dxx, dxp, dpp) = direct.entries();
            let (cxx, cxp, cpp) = closed.entries();
            assert!(close(dxx, cxx, 1e-8), "nbar={nbar}: xx {dxx} vs {cxx}");
            assert!(close(dpp, cpp, 1e-8), "nbar={nbar}: pp {dpp} vs {cpp}");
            assert!(close(dxp, cxp, 1e-9), "nbar={nbar}: xp {dxp} vs {cxp}");
        }
    }

    #[test]
    fn closed_form_limits() {
        let id = pstd_covariance_closed_form(0.0, 1e-12).unwrap();
        assert_eq!(id, CovarianceMatrix::identity());
        // near the vacuum the determinant approaches the pure-Gaussian value
        let g = pstd_covariance_closed_form(0.01, 1e-12).unwrap();
        assert!(close(det_gamma(&g), 1.0, 0.01), "{}", det_gamma(&g));
        assert!(close(det_gamma(&g), 1.00000008366306, 1e-9));
    }

    #[test]
    fn determinant_grows_with_mean() {
        let mut prev = 1.0;
        for nbar in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let det = det_gamma(&pstd_covariance_closed_form(nbar, 1e-12).unwrap());
            assert!(det > prev, "nbar={nbar}: det {det} <= {prev}");
            assert!(det >= 1.0 - 1e-8);
            prev = det;
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(pstd_covariance_closed_form(-1.0, 1e-12).is_err());
        assert!(pstd_covariance_closed_form(1.0, 0.0).is_err());
    }
}
