//! Constrained maximization of coherence quantifiers over photon-number
//! distributions on a truncated support {0..cutoff}.
//!
//! Entropy maximization under a mean constraint is solved in the dual: the
//! optimum has the form Pₙ ∝ exp(-λn), so a one-dimensional solve on λ is
//! exact. The √P objective is handled through the substitution Pₙ = yₙ²,
//! which removes the boundary singularity of the gradient; stationarity
//! then forces yₙ = 1/(a + bn) (mean constraint) or yₙ = 1/(a + bn + cn²)
//! (mean and second moment), and the solver finds the multiplier
//! coefficients by bisection plus damped Newton.

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};

use crate::error::{Error, Result};
use crate::fock::NumberDistribution;
use crate::sum::{kahan_sum, KahanSum};

/// Outcome of a constrained maximization run.
#[derive(Debug, Clone)]
pub struct OptimizationReport {
    /// Maximizing distribution on {0..cutoff}.
    pub distribution: NumberDistribution,
    /// Value of the maximized objective (entropy in nats, or (Σ√Pₙ)² - 1).
    pub objective: f64,
    /// |mean - target| and, when a second moment is constrained, |m₂ - target|.
    pub constraint_residuals: Vec<f64>,
    /// Normalized stationarity residual at the reported solution.
    pub kkt_residual: f64,
    /// Lagrange multipliers paired with `moment_orders`.
    /// For the √P objectives the stationarity condition reads
    /// Σ_m √P_m / √P_n + Σ_j λ_j n^{o_j} = 0; for the entropy objective the
    /// multipliers belong to the Lagrangian of -Σ Pₙ ln Pₙ.
    pub multipliers: Vec<f64>,
    /// Moment order oⱼ for each multiplier (0 for normalization, 1 for the
    /// mean, 2 for the second moment).
    pub moment_orders: Vec<u32>,
    pub cutoff: usize,
    pub iterations: usize,
    pub converged: bool,
}

fn validate_problem(nbar: f64, cutoff: usize) -> Result<()> {
    if cutoff < 2 {
        return Err(Error::InvalidArgument(format!(
            "cutoff must be >= 2, got {cutoff}"
        )));
    }
    if !nbar.is_finite() || nbar <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "mean must be finite and > 0, got {nbar}"
        )));
    }
    if nbar >= cutoff as f64 {
        return Err(Error::InvalidArgument(format!(
            "mean {nbar} must lie below the cutoff {cutoff}"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// entropy maximization, dual route
// ---------------------------------------------------------------------------

/// Maximize -Σ Pₙ ln Pₙ subject to Σ Pₙ = 1 and Σ n Pₙ = n̄ on {0..cutoff}.
///
/// The dual variable λ of the mean constraint is bracketed and bisected,
/// then polished by Newton using dmean/dλ = -var; the distribution follows
/// as Pₙ = e^{-λn}/Z.
pub fn maximize_entropy_mean_constraint(
    nbar: f64,
    cutoff: usize,
    tol: f64,
) -> Result<OptimizationReport> {
    validate_problem(nbar, cutoff)?;
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tol must be > 0".into()));
    }

    let mean_at = |lambda: f64| -> f64 {
        let (probs, _) = exponential_family(lambda, cutoff);
        probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
    };

    // mean(λ) decreases from cutoff (λ → -inf) to 0 (λ → +inf)
    let mut lo = 0.0_f64;
    let mut hi = 0.0_f64;
    let mut iterations = 0usize;
    if mean_at(0.0) >= nbar {
        hi = 1.0;
        while mean_at(hi) > nbar {
            hi *= 2.0;
            iterations += 1;
            if hi > 1e6 {
                return Err(Error::SolverFailure(format!(
                    "failed to bracket the dual variable for nbar={nbar}"
                )));
            }
        }
    } else {
        lo = -1.0;
        while mean_at(lo) < nbar {
            lo *= 2.0;
            iterations += 1;
            if lo < -1e6 {
                return Err(Error::SolverFailure(format!(
                    "failed to bracket the dual variable for nbar={nbar}"
                )));
            }
        }
    }
    for _ in 0..200 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) >= nbar {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-16 * (1.0 + lo.abs()) {
            break;
        }
    }
    let mut lambda = 0.5 * (lo + hi);
    // Newton polish: d mean / d lambda = -variance
    for _ in 0..4 {
        iterations += 1;
        let (probs, _) = exponential_family(lambda, cutoff);
        let mean: f64 = probs.iter().enumerate().map(|(n, p)| n as f64 * p).sum();
        let m2: f64 = probs
            .iter()
            .enumerate()
            .map(|(n, p)| (n * n) as f64 * p)
            .sum();
        let var = m2 - mean * mean;
        if var <= 0.0 {
            break;
        }
        lambda += (mean - nbar) / var;
    }

    let (probs, ln_z) = exponential_family(lambda, cutoff);
    let mean = kahan_sum(probs.iter().enumerate().map(|(n, p)| n as f64 * p));
    let objective = kahan_sum(
        probs
            .iter()
            .map(|&p| if p > 0.0 { -p * p.ln() } else { 0.0 }),
    );
    let lambda0 = ln_z - 1.0;
    // stationarity of the entropy Lagrangian: -ln Pₙ - 1 - λn - λ₀ = 0
    let kkt = probs
        .iter()
        .enumerate()
        .map(|(n, &p)| (-p.ln() - 1.0 - lambda * n as f64 - lambda0).abs())
        .fold(0.0, f64::max);
    let mean_err = (mean - nbar).abs();
    let converged = mean_err <= tol;
    Ok(OptimizationReport {
        distribution: NumberDistribution::new(probs, 0.0)?,
        objective,
        constraint_residuals: vec![mean_err],
        kkt_residual: kkt,
        multipliers: vec![lambda0, lambda],
        moment_orders: vec![0, 1],
        cutoff,
        iterations,
        converged,
    })
}

/// Pₙ = e^{-λn}/Z on {0..cutoff}, with max-exponent shifting; also returns ln Z.
fn exponential_family(lambda: f64, cutoff: usize) -> (Vec<f64>, f64) {
    let shift = if lambda >= 0.0 {
        0.0
    } else {
        -lambda * cutoff as f64
    };
    let weights: Vec<f64> = (0..=cutoff)
        .map(|n| (-lambda * n as f64 - shift).exp())
        .collect();
    let z: f64 = kahan_sum(weights.iter().copied());
    let probs = weights.iter().map(|w| w / z).collect();
    (probs, z.ln() + shift)
}

/// Independent primal route for the entropy problem: projected steepest
/// ascent. The gradient is projected onto the null space of the equality
/// constraints and the step length comes from an exact line search (the
/// directional derivative blows up to -inf at the boundary, so iterates
/// stay interior). Kept as a cross-check of the dual solver.
pub fn maximize_entropy_projected_gradient(
    nbar: f64,
    cutoff: usize,
    steps: usize,
) -> Result<OptimizationReport> {
    validate_problem(nbar, cutoff)?;
    let dim = cutoff + 1;
    let ns: Vec<f64> = (0..dim).map(|n| n as f64).collect();
    let sum_n: f64 = ns.iter().sum();
    let sum_n2: f64 = ns.iter().map(|n| n * n).sum();
    // A = [1ᵀ; nᵀ]; null-space projection uses the 2x2 Gram matrix
    let gram = Matrix2::new(dim as f64, sum_n, sum_n, sum_n2);
    let gram_inv = gram.try_inverse().expect("Gram matrix of distinct moments");

    let project_null = |v: &mut [f64]| {
        let r1: f64 = v.iter().sum();
        let r2: f64 = v.iter().zip(&ns).map(|(x, n)| x * n).sum();
        let corr = gram_inv * Vector2::new(r1, r2);
        for (x, n) in v.iter_mut().zip(&ns) {
            *x -= corr[0] + corr[1] * n;
        }
    };

    // feasible interior start: truncated geometric, affine-corrected
    let q = nbar / (nbar + 1.0);
    let mut p: Vec<f64> = (0..dim).map(|n| (1.0 - q) * q.powi(n as i32)).collect();
    {
        let r1: f64 = p.iter().sum::<f64>() - 1.0;
        let r2: f64 = p.iter().zip(&ns).map(|(x, n)| x * n).sum::<f64>() - nbar;
        let corr = gram_inv * Vector2::new(r1, r2);
        for (x, n) in p.iter_mut().zip(&ns) {
            *x -= corr[0] + corr[1] * n;
        }
    }
    if p.iter().any(|&x| x <= 0.0) {
        return Err(Error::SolverFailure(
            "could not build an interior starting point".into(),
        ));
    }

    let mut iterations = 0usize;
    for _ in 0..steps {
        iterations += 1;
        let mut d: Vec<f64> = p.iter().map(|&x| -x.ln() - 1.0).collect();
        project_null(&mut d);
        let d_norm: f64 = d.iter().map(|x| x * x).sum::<f64>().sqrt();
        if d_norm < 1e-13 {
            break;
        }
        // largest step keeping every component strictly positive
        let mut t_max = f64::INFINITY;
        for (x, dn) in p.iter().zip(&d) {
            if *dn < 0.0 {
                t_max = t_max.min(x / -dn);
            }
        }
        let t_hi = if t_max.is_finite() {
            t_max * (1.0 - 1e-12)
        } else {
            1.0
        };
        // exact line search on φ'(t) = Σ dₙ (-ln(pₙ + t dₙ) - 1)
        let dphi = |t: f64| -> f64 {
            p.iter()
                .zip(&d)
                .map(|(x, dn)| dn * (-(x + t * dn).ln() - 1.0))
                .sum()
        };
        let t = if dphi(t_hi) > 0.0 {
            t_hi
        } else {
            let (mut lo, mut hi) = (0.0, t_hi);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if dphi(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        for (x, dn) in p.iter_mut().zip(&d) {
            *x = (*x + t * dn).max(f64::MIN_POSITIVE);
        }
    }

    let mean: f64 = p.iter().zip(&ns).map(|(x, n)| x * n).sum();
    let objective = kahan_sum(p.iter().map(|&x| if x > 0.0 { -x * x.ln() } else { 0.0 }));
    let mean_err = (mean - nbar).abs();
    Ok(OptimizationReport {
        distribution: NumberDistribution::new(p, 0.0)?,
        objective,
        constraint_residuals: vec![mean_err],
        kkt_residual: f64::NAN, // not certified on this route
        multipliers: vec![],
        moment_orders: vec![],
        cutoff,
        iterations,
        converged: mean_err <= 1e-9,
    })
}

// ---------------------------------------------------------------------------
// l1 maximization, mean constraint
// ---------------------------------------------------------------------------

/// Maximize (Σ√Pₙ)² - 1 subject to Σ Pₙ = 1 and Σ n Pₙ = n̄ on {0..cutoff}.
///
/// Stationarity in y (Pₙ = yₙ²) forces yₙ = 1/(a + bn); a one-dimensional
/// bisection on the tilt fixes the mean, a 2x2 Newton polish drives both
/// constraint residuals to machine precision. The maximum grows without
/// bound as the cutoff increases — that growth is the numerical witness
/// that no maximal coherent state exists under the mean constraint alone.
pub fn maximize_l1_mean_constraint(
    nbar: f64,
    cutoff: usize,
    tol: f64,
) -> Result<OptimizationReport> {
    validate_problem(nbar, cutoff)?;
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tol must be > 0".into()));
    }
    // mirror n -> cutoff - n when the target mean sits above cutoff/2, so
    // the tilt parameter stays nonnegative
    let mirrored = nbar > cutoff as f64 / 2.0;
    let target = if mirrored { cutoff as f64 - nbar } else { nbar };
    let dim = cutoff + 1;
    let ns: Vec<f64> = (0..dim).map(|n| n as f64).collect();

    let mean_of_s = |s: f64| -> f64 {
        let mut num = KahanSum::new();
        let mut den = KahanSum::new();
        for &n in &ns {
            let w = (1.0 + s * n).powi(-2);
            num.add(n * w);
            den.add(w);
        }
        num.value() / den.value()
    };

    let mut iterations = 0usize;
    let mut s_lo = 0.0_f64;
    let mut s_hi = 0.0_f64;
    if mean_of_s(0.0) > target {
        s_hi = 1.0;
        while mean_of_s(s_hi) > target {
            s_hi *= 2.0;
            iterations += 1;
            if s_hi > 1e12 {
                return Err(Error::SolverFailure(format!(
                    "failed to bracket the tilt for nbar={nbar}, cutoff={cutoff}"
                )));
            }
        }
        for _ in 0..120 {
            iterations += 1;
            let mid = 0.5 * (s_lo + s_hi);
            if mean_of_s(mid) > target {
                s_lo = mid;
            } else {
                s_hi = mid;
            }
            if s_hi - s_lo <= 1e-16 * s_hi.max(1e-300) {
                break;
            }
        }
    }
    let s = 0.5 * (s_lo + s_hi);

    // scale to the unit sphere: y = c/(1+sn) with c² Σ(1+sn)^{-2} = 1
    let norm: f64 = kahan_sum(ns.iter().map(|&n| (1.0 + s * n).powi(-2)));
    let c = norm.sqrt().recip();
    let mut a = 1.0 / c;
    let mut b = s / c;

    // Newton polish on (a, b)
    for _ in 0..60 {
        iterations += 1;
        let mut g0 = KahanSum::new();
        let mut g1 = KahanSum::new();
        let (mut j00, mut j01, mut j11) = (0.0, 0.0, 0.0);
        for &n in &ns {
            let qn = a + b * n;
            let w2 = qn.powi(-2);
            let w3 = w2 / qn;
            g0.add(w2);
            g1.add(n * w2);
            j00 += -2.0 * w3;
            j01 += -2.0 * n * w3;
            j11 += -2.0 * n * n * w3;
        }
        let f = Vector2::new(g0.value() - 1.0, g1.value() - target);
        if f[0].abs() <= 1e-15 && f[1].abs() <= 1e-15 * target.max(1.0) {
            break;
        }
        let jac = Matrix2::new(j00, j01, j01, j11);
        let Some(step) = jac.lu().solve(&f) else {
            break;
        };
        let (mut na, mut nb) = (a - step[0], b - step[1]);
        let mut damp = 1.0;
        while na <= 0.0 || na + nb * cutoff as f64 <= 0.0 {
            damp *= 0.5;
            na = a - damp * step[0];
            nb = b - damp * step[1];
            if damp < 1e-12 {
                break;
            }
        }
        if na <= 0.0 || na + nb * cutoff as f64 <= 0.0 {
            break; // keep the bisection point rather than leave the domain
        }
        a = na;
        b = nb;
    }

    let mut y: Vec<f64> = ns.iter().map(|&n| 1.0 / (a + b * n)).collect();
    let (a_eff, b_eff) = if mirrored {
        y.reverse();
        (a + b * cutoff as f64, -b)
    } else {
        (a, b)
    };
    finish_l1_report(y, &[nbar], &[a_eff, b_eff], cutoff, iterations, tol)
}

// ---------------------------------------------------------------------------
// l1 maximization, mean and second moment
// ---------------------------------------------------------------------------

/// Maximize (Σ√Pₙ)² - 1 subject to ΣPₙ = 1, Σ n Pₙ = n̄ and Σ n² Pₙ = m₂.
///
/// With the second moment pinned, the maximizer yₙ = 1/(a + bn + cn²) has a
/// convergent √P series, so the objective is cutoff-stable — the numerical
/// content of the claim that a finite second moment restores a well-defined
/// maximal coherent state.
pub fn maximize_l1_two_moment_constraint(
    nbar: f64,
    m2: f64,
    cutoff: usize,
    tol: f64,
) -> Result<OptimizationReport> {
    validate_problem(nbar, cutoff)?;
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidArgument("tol must be > 0".into()));
    }
    if !m2.is_finite() {
        return Err(Error::InvalidArgument(
            "second moment must be finite".into(),
        ));
    }

    const BOUNDARY_SLACK: f64 = 1e-9;
    // feasibility window for the second moment at fixed mean on {0..cutoff}
    let floor_n = nbar.floor();
    let frac = nbar - floor_n;
    let m2_min = floor_n * floor_n + frac * (2.0 * floor_n + 1.0);
    let m2_max = nbar * cutoff as f64;
    if m2 < m2_min - BOUNDARY_SLACK || m2 > m2_max + BOUNDARY_SLACK {
        return Err(Error::Infeasible(format!(
            "no distribution on 0..{cutoff} has mean {nbar} and second moment {m2}; \
             feasible range is [{m2_min}, {m2_max}]"
        )));
    }
    if m2 <= m2_min + BOUNDARY_SLACK {
        // zero-variance geometry: the only feasible point is supported on
        // {floor(nbar), floor(nbar)+1} (a point mass when nbar is integral)
        let mut y = vec![0.0; cutoff + 1];
        let fi = floor_n as usize;
        if frac <= BOUNDARY_SLACK {
            y[fi] = 1.0;
        } else {
            y[fi] = (1.0 - frac).sqrt();
            y[fi + 1] = frac.sqrt();
        }
        return boundary_l1_report(y, nbar, m2, cutoff);
    }

    // continuum heuristic init: y ≈ 1/(c((n-μ)² + w²)) with μ = n̄, w = σ
    let sigma = (m2 - nbar * nbar).sqrt();
    let w = sigma.max(0.05);
    let c0 = (2.0 * w.powi(3) / std::f64::consts::PI).sqrt();
    let mut u = Vector3::new(c0 * (nbar * nbar + w * w), -2.0 * c0 * nbar, c0);

    let ns: Vec<f64> = (0..=cutoff).map(|n| n as f64).collect();
    let residual = |u: &Vector3<f64>| -> Vector3<f64> {
        let mut g = [KahanSum::new(), KahanSum::new(), KahanSum::new()];
        for &n in &ns {
            let q = u[0] + u[1] * n + u[2] * n * n;
            let w2 = q.powi(-2);
            g[0].add(w2);
            g[1].add(n * w2);
            g[2].add(n * n * w2);
        }
        Vector3::new(g[0].value() - 1.0, g[1].value() - nbar, g[2].value() - m2)
    };
    let min_q = |u: &Vector3<f64>| -> f64 {
        ns.iter()
            .map(|&n| u[0] + u[1] * n + u[2] * n * n)
            .fold(f64::INFINITY, f64::min)
    };

    if min_q(&u) <= 0.0 {
        u = Vector3::new(c0 * (nbar * nbar + w * w) + c0, -2.0 * c0 * nbar, c0);
    }
    let scale = Vector3::new(1.0, nbar.max(1.0), m2.max(1.0));
    let mut iterations = 0usize;
    let mut f = residual(&u);
    let mut converged_newton = false;
    for _ in 0..200 {
        iterations += 1;
        if (0..3).all(|i| f[i].abs() <= 1e-13 * scale[i]) {
            converged_newton = true;
            break;
        }
        // J_{kj} = -2 Σ n^{k+j} q^{-3}
        let mut moments = [0.0f64; 5];
        for &n in &ns {
            let q = u[0] + u[1] * n + u[2] * n * n;
            let w3 = q.powi(-3);
            let mut nk = 1.0;
            for mk in moments.iter_mut() {
                *mk += nk * w3;
                nk *= n;
            }
        }
        let jac = Matrix3::new(
            -2.0 * moments[0],
            -2.0 * moments[1],
            -2.0 * moments[2],
            -2.0 * moments[1],
            -2.0 * moments[2],
            -2.0 * moments[3],
            -2.0 * moments[2],
            -2.0 * moments[3],
            -2.0 * moments[4],
        );
        let Some(step) = jac.lu().solve(&f) else {
            return Err(Error::SolverFailure(
                "singular Jacobian in the two-moment Newton iteration".into(),
            ));
        };
        let f_norm = f.norm();
        let mut damp = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = u - damp * step;
            if min_q(&trial) > 0.0 {
                let ft = residual(&trial);
                if ft.norm() < f_norm {
                    u = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            damp *= 0.5;
        }
        if !accepted {
            return Err(Error::SolverFailure(format!(
                "two-moment Newton stalled at residual {:e} (nbar={nbar}, m2={m2}, cutoff={cutoff})",
                f_norm
            )));
        }
    }
    if !converged_newton {
        return Err(Error::SolverFailure(format!(
            "two-moment Newton did not converge within 200 iterations \
             (nbar={nbar}, m2={m2}, cutoff={cutoff}, residual={:e})",
            f.norm()
        )));
    }

    let y: Vec<f64> = ns
        .iter()
        .map(|&n| 1.0 / (u[0] + u[1] * n + u[2] * n * n))
        .collect();
    finish_l1_report(y, &[nbar, m2], &[u[0], u[1], u[2]], cutoff, iterations, tol)
}

/// Shared tail of the interior l1 solvers: build the report from y with
/// stationarity coefficients q(n) = Σ coeffs[j] n^j, i.e. yₙ = 1/q(n).
fn finish_l1_report(
    y: Vec<f64>,
    moment_targets: &[f64],
    coeffs: &[f64],
    cutoff: usize,
    iterations: usize,
    tol: f64,
) -> Result<OptimizationReport> {
    let s = kahan_sum(y.iter().copied());
    let probs: Vec<f64> = y.iter().map(|v| v * v).collect();
    let objective = s * s - 1.0;

    let mean = kahan_sum(probs.iter().enumerate().map(|(n, p)| n as f64 * p));
    let mut residuals = vec![(mean - moment_targets[0]).abs()];
    if moment_targets.len() > 1 {
        let m2 = kahan_sum(probs.iter().enumerate().map(|(n, p)| (n * n) as f64 * p));
        residuals.push((m2 - moment_targets[1]).abs());
    }

    // paper-form multipliers: Σ√P_m/√P_n + Σ_j λ_j n^{o_j} = 0 with
    // √P_n = 1/q(n) gives λ_j = -S · coeffs[j]
    let multipliers: Vec<f64> = coeffs.iter().map(|&c| -s * c).collect();
    let moment_orders: Vec<u32> = (0..coeffs.len() as u32).collect();
    let distribution = NumberDistribution::new(probs, 0.0)?;
    let kkt = kkt_residual(&distribution, &multipliers, &moment_orders)?;

    let scales: Vec<f64> = moment_targets.iter().map(|t| t.abs().max(1.0)).collect();
    let converged = residuals
        .iter()
        .zip(&scales)
        .all(|(r, sc)| r <= &(tol * sc))
        && kkt < 1e-6;
    Ok(OptimizationReport {
        distribution,
        objective,
        constraint_residuals: residuals,
        kkt_residual: kkt,
        multipliers,
        moment_orders,
        cutoff,
        iterations,
        converged,
    })
}

/// Degenerate boundary case: support too small for interior stationarity.
fn boundary_l1_report(
    y: Vec<f64>,
    nbar: f64,
    m2: f64,
    cutoff: usize,
) -> Result<OptimizationReport> {
    let s = kahan_sum(y.iter().copied());
    let probs: Vec<f64> = y.iter().map(|v| v * v).collect();
    let mean = kahan_sum(probs.iter().enumerate().map(|(n, p)| n as f64 * p));
    let second = kahan_sum(probs.iter().enumerate().map(|(n, p)| (n * n) as f64 * p));
    Ok(OptimizationReport {
        distribution: NumberDistribution::new(probs, 0.0)?,
        objective: s * s - 1.0,
        constraint_residuals: vec![(mean - nbar).abs(), (second - m2).abs()],
        kkt_residual: 0.0, // constraints pin the point; no interior stationarity
        multipliers: vec![],
        moment_orders: vec![],
        cutoff,
        iterations: 0,
        converged: true,
    })
}

// ---------------------------------------------------------------------------
// stationarity residual
// ---------------------------------------------------------------------------

/// Normalized stationarity residual of the √P objective:
/// max over n of |Σ_m √P_m / √P_n + Σ_j λ_j n^{o_j}| divided by Σ_m √P_m.
///
/// The distribution must be strictly positive on its support; a zero
/// probability makes the gradient undefined.
pub fn kkt_residual(
    dist: &NumberDistribution,
    multipliers: &[f64],
    moment_orders: &[u32],
) -> Result<f64> {
    if multipliers.len() != moment_orders.len() {
        return Err(Error::InvalidArgument(format!(
            "{} multipliers paired with {} moment orders",
            multipliers.len(),
            moment_orders.len()
        )));
    }
    if dist.probs().iter().any(|&p| p <= 0.0) {
        return Err(Error::UndefinedGradient(
            "the √P gradient is undefined where a probability vanishes".into(),
        ));
    }
    let s = kahan_sum(dist.probs().iter().map(|p| p.sqrt()));
    let mut worst = 0.0_f64;
    for (n, &p) in dist.probs().iter().enumerate() {
        let mut r = s / p.sqrt();
        for (lam, &order) in multipliers.iter().zip(moment_orders) {
            r += lam * (n as f64).powi(order as i32);
        }
        worst = worst.max(r.abs());
    }
    Ok(worst / s)
}
