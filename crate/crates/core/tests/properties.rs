//! Cross-module invariants: recurrence identities, norm contracts, measure
//! bounds, and agreement between independent computation routes.

use coherence_core::fock::PureFockState;
use coherence_core::gaussian::{covariance_matrix, det_gamma};
use coherence_core::measures::{
    l1_coherence_dense, l1_coherence_pure, max_rel_ent_coherence, rel_ent_coherence,
    shannon_entropy, LogBase,
};
use coherence_core::special::{hermite_sequence, polylog_neg_half, LogReal};
use coherence_core::states::{
    beam_splitter_50_50, coherent, multimode_max_coherent, pstd, squeezed, squeezed_vacuum,
    thermal, tmsv, tmsv_through_bs, two_mode_coherent, PhaseRule, TruncationPolicy,
};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn policy() -> TruncationPolicy {
    TruncationPolicy::default()
}

fn random_pure_state(rng: &mut ChaCha8Rng, cutoff: usize) -> PureFockState {
    let amps: Vec<Complex64> = (0..=cutoff)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    PureFockState::new(amps.into_iter().map(|c| c / norm).collect(), 0.0).unwrap()
}

proptest! {
    #[test]
    fn hermite_recurrence_holds(
        n in 1u32..100,
        re in -10.0f64..10.0,
        im in -10.0f64..10.0,
    ) {
        // H_{n+1}(z) - 2z H_n(z) + 2n H_{n-1}(z) = 0, relative to the scale
        let z = Complex64::new(re, im);
        let h = hermite_sequence(n + 1, z);
        let scale = h[n as usize].log_scale();
        let rebase = |k: usize| h[k].mantissa() * (h[k].log_scale() - scale).exp();
        let residual = rebase(n as usize + 1) - 2.0 * z * rebase(n as usize)
            + 2.0 * n as f64 * rebase(n as usize - 1);
        let magnitude = rebase(n as usize + 1).norm().max(rebase(n as usize).norm()).max(1e-300);
        prop_assert!(residual.norm() / magnitude < 1e-9);
    }

    #[test]
    fn polylog_is_monotone_in_q(a in 0.0f64..0.95, b in 0.0f64..0.95) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let f_lo = polylog_neg_half(lo, 1e-12).unwrap();
        let f_hi = polylog_neg_half(hi, 1e-12).unwrap();
        prop_assert!(f_lo <= f_hi + 1e-12);
    }

    #[test]
    fn log_real_multiplication_matches_values(
        a in -50.0f64..50.0,
        b in -50.0f64..50.0,
    ) {
        let prod = (LogReal::from_value(a) * LogReal::from_value(b)).value();
        prop_assert!((prod - a * b).abs() <= 1e-12 * (a * b).abs().max(1.0));
    }

    #[test]
    fn moments_are_conjugate_symmetric(seed in 0u64..500, cutoff in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_pure_state(&mut rng, cutoff);
        for k in 0..=4u32 {
            for l in 0..=4u32 {
                let d = (s.moment(k, l) - s.moment(l, k).conj()).norm();
                prop_assert!(d < 1e-13, "k={k} l={l}: {d}");
            }
        }
        // normalization moment sits inside the tail window
        let m00 = s.moment(0, 0).re;
        prop_assert!(m00 <= 1.0 + 1e-12 && m00 >= 1.0 - s.tail_bound() - 1e-12);
        // first-moment consistency between the two computation routes
        let mean = s.number_distribution().mean_n();
        prop_assert!((mean - s.moment(1, 1).re).abs() < 1e-12);
    }

    #[test]
    fn beam_splitter_applied_twice_swaps_magnitudes(seed in 0u64..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps = std::collections::BTreeMap::new();
        for _ in 0..6 {
            let n1 = rng.random_range(0u32..5);
            let n2 = rng.random_range(0u32..5);
            amps.insert(
                (n1, n2),
                Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            );
        }
        let norm: f64 = amps.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let amps: std::collections::BTreeMap<_, _> =
            amps.into_iter().map(|(k, v)| (k, v / norm)).collect();
        let s = coherence_core::TwoModePureState::new(amps, 0.0).unwrap();
        let twice = beam_splitter_50_50(&beam_splitter_50_50(&s));
        for (&(n1, n2), amp) in s.amplitudes() {
            let swapped = twice.amplitude(n2, n1);
            prop_assert!((amp.norm() - swapped.norm()).abs() < 1e-10);
        }
    }
}

#[test]
fn constructor_norms_stay_within_tail_windows() {
    let p = policy();
    for nbar in [0.0, 0.1, 0.5, 1.0, 2.0, 5.0] {
        let s = pstd(nbar, PhaseRule::Zero, &p).unwrap();
        assert!(s.norm_sqr() <= 1.0 + 1e-12 && s.norm_sqr() >= 1.0 - s.tail_bound() - 1e-12);
        assert!(s.tail_bound() <= p.tol);

        let c = coherent(Complex64::new(nbar.sqrt(), 0.0), &p).unwrap();
        assert!(c.norm_sqr() <= 1.0 + 1e-12 && c.norm_sqr() >= 1.0 - c.tail_bound() - 1e-12);
        assert!(c.tail_bound() <= p.tol);

        let sv = squeezed_vacuum(nbar.sqrt().asinh(), &p).unwrap();
        assert!(sv.norm_sqr() <= 1.0 + 1e-12 && sv.norm_sqr() >= 1.0 - sv.tail_bound() - 1e-12);

        let d = squeezed(Complex64::new(0.3, 0.1), 0.4, 0.2, &p).unwrap();
        assert!(d.total_mass() >= 1.0 - d.tail_bound() - 1e-12);

        let m = multimode_max_coherent(3, nbar, &p).unwrap();
        assert!(m.total_mass() >= 1.0 - m.tail_bound() - 1e-12);

        let t = tmsv(nbar, &p).unwrap();
        assert!(t.norm_sqr() >= 1.0 - t.tail_bound() - 1e-12);

        let tb = tmsv_through_bs(nbar, &p).unwrap();
        assert!(tb.norm_sqr() >= 1.0 - tb.tail_bound() - 1e-12);

        let tc = two_mode_coherent(Complex64::new((nbar / 2.0).sqrt(), 0.0), &p).unwrap();
        assert!(tc.norm_sqr() >= 1.0 - tc.tail_bound() - 1e-12);
    }
}

#[test]
fn rel_ent_is_bounded_by_the_closed_form_maximum() {
    let p = policy();
    for nbar in [0.1, 0.5, 1.0, 2.0, 5.0] {
        let states: Vec<(&str, f64, f64)> = vec![
            {
                let s = pstd(nbar, PhaseRule::Zero, &p).unwrap();
                (
                    "pstd",
                    s.number_distribution().mean_n(),
                    rel_ent_coherence(&s, LogBase::Natural).unwrap(),
                )
            },
            {
                let s = coherent(Complex64::new(nbar.sqrt(), 0.0), &p).unwrap();
                (
                    "coherent",
                    s.number_distribution().mean_n(),
                    rel_ent_coherence(&s, LogBase::Natural).unwrap(),
                )
            },
            {
                let s = squeezed_vacuum(nbar.sqrt().asinh(), &p).unwrap();
                (
                    "squeezed_vacuum",
                    s.number_distribution().mean_n(),
                    rel_ent_coherence(&s, LogBase::Natural).unwrap(),
                )
            },
            {
                let s = thermal(nbar, &p).unwrap();
                (
                    "thermal",
                    s.number_distribution().mean_n(),
                    rel_ent_coherence(&s, LogBase::Natural).unwrap(),
                )
            },
        ];
        for (name, mean, c) in states {
            let bound = max_rel_ent_coherence(mean, LogBase::Natural);
            assert!(
                c <= bound + 1e-8,
                "{name} at nbar={nbar}: C={c} exceeds bound {bound}"
            );
            assert!(c >= -1e-10, "{name}: negative coherence {c}");
        }
    }
}

#[test]
fn coherence_is_convex_under_mixing() {
    // C(p ρ₁ + (1-p) ρ₂) <= p C(ρ₁) + (1-p) C(ρ₂) on the dense path
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for case in 0..100 {
        let cutoff = rng.random_range(2usize..=16);
        let s1 = random_pure_state(&mut rng, cutoff);
        let s2 = random_pure_state(&mut rng, cutoff);
        let w: f64 = rng.random_range(0.0..1.0);
        let r1 = s1.densify().unwrap();
        let r2 = s2.densify().unwrap();
        let mixed = coherence_core::DensityMatrix::new(
            r1.entries() * Complex64::new(w, 0.0) + r2.entries() * Complex64::new(1.0 - w, 0.0),
        )
        .unwrap();
        let c_mix = rel_ent_coherence(&mixed, LogBase::Natural).unwrap();
        let c1 = rel_ent_coherence(&r1, LogBase::Natural).unwrap();
        let c2 = rel_ent_coherence(&r2, LogBase::Natural).unwrap();
        assert!(
            c_mix <= w * c1 + (1.0 - w) * c2 + 1e-9,
            "case {case}: {c_mix} > {w}*{c1} + {}*{c2}",
            1.0 - w
        );
    }
}

#[test]
fn pure_and_dense_paths_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let cutoff = rng.random_range(2usize..=64);
        let s = random_pure_state(&mut rng, cutoff);
        let rho = s.densify().unwrap();

        let c_pure = rel_ent_coherence(&s, LogBase::Natural).unwrap();
        let c_dense = rel_ent_coherence(&rho, LogBase::Natural).unwrap();
        assert!((c_pure - c_dense).abs() < 1e-9, "{c_pure} vs {c_dense}");

        let l_pure = l1_coherence_pure(&s);
        let l_dense = l1_coherence_dense(&rho);
        assert!((l_pure - l_dense).abs() < 1e-9, "{l_pure} vs {l_dense}");
    }
}

#[test]
fn diagonal_states_have_exactly_no_coherence() {
    for nbar in [0.2, 1.0, 2.5] {
        let t = thermal(nbar, &policy()).unwrap();
        let c = rel_ent_coherence(&t, LogBase::Natural).unwrap();
        assert!(c.abs() <= 1e-10);
        assert!(l1_coherence_dense(&t).abs() <= 1e-12);
    }
}

#[test]
fn every_physical_state_satisfies_the_uncertainty_bound() {
    let p = policy();
    for nbar in [0.1, 0.5, 1.0, 2.0, 5.0] {
        for gamma in [
            covariance_matrix(&pstd(nbar, PhaseRule::Zero, &p).unwrap()),
            covariance_matrix(&coherent(Complex64::new(nbar.sqrt(), 0.0), &p).unwrap()),
            covariance_matrix(&squeezed_vacuum(nbar.sqrt().asinh(), &p).unwrap()),
        ] {
            assert!(
                det_gamma(&gamma) >= 1.0 - 1e-8,
                "nbar={nbar}: det={}",
                det_gamma(&gamma)
            );
        }
    }
}

#[test]
fn l1_objective_matches_dense_path_on_the_reconstructed_state() {
    // the maximizer's (Σ√Pₙ)² - 1 equals Σ_{i≠j}|ρ_{ij}| of the
    // real-amplitude pure state built from √Pₙ
    for cutoff in [10usize, 32, 64] {
        let report =
            coherence_core::optimize::maximize_l1_mean_constraint(1.0, cutoff, 1e-9).unwrap();
        let amps: Vec<Complex64> = report
            .distribution
            .probs()
            .iter()
            .map(|&p| Complex64::new(p.sqrt(), 0.0))
            .collect();
        let state = PureFockState::new(amps, 1e-12).unwrap();
        let dense = l1_coherence_dense(&state.densify().unwrap());
        assert!(
            (report.objective - dense).abs() < 1e-9,
            "cutoff={cutoff}: {} vs {dense}",
            report.objective
        );
    }
}

#[test]
fn multimode_entropy_decomposes_into_single_mode_plus_series() {
    for d in 1..=5u32 {
        for nbar_t in [0.5, 1.0, 3.0] {
            let dist = multimode_max_coherent(d, nbar_t, &policy()).unwrap();
            let h = shannon_entropy(&dist, LogBase::Natural);
            let closed = coherence_core::measures::max_rel_ent_coherence_multimode(
                d,
                nbar_t,
                LogBase::Natural,
            );
            assert!(
                (h - closed).abs() < 1e-8,
                "d={d} nbar_t={nbar_t}: {h} vs {closed}"
            );
        }
    }
}
