mod common;

use common::{max_rel_dev, rel_dev, with_delta_a};
use num_complex::Complex64;
use optoacoustic::analytic::{
    analytic_readout_covariance, covariance_entangle, lambda_minus_cubic, lambda_minus_rational, readout_correlations,
    readout_correlations_from,
};
use optoacoustic::gaussian::log_negativity_from_lambda;
use optoacoustic::model::{delay_drift_diffusion, stokes_drift_diffusion};
use optoacoustic::propagator::{
    lyapunov_propagate, mc_oracle, run_protocol, Pair, Phase, Sampling, Trajectory,
};
use optoacoustic::{extract_pair, lambda_minus, CovMat, ProtocolTimeline, SystemParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn m_ab(v: &CovMat) -> Complex64 {
    let m = v.matrix();
    Complex64::new(0.5 * (m[(0, 2)] - m[(1, 3)]), 0.5 * (m[(0, 3)] + m[(1, 2)]))
}

fn readout_start_state(tr: &Trajectory) -> &CovMat {
    let i = tr.phases.iter().position(|p| *p == Phase::Readout).unwrap();
    &tr.covariances[i]
}

#[test]
fn readout_closed_form_matches_three_mode_lyapunov() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let base = SystemParams::reference_point();
    let gam = base.gamma_ac;
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let mut p = with_delta_a(base, rng.random_range(0.0..=0.5) * gam);
        p.g = rng.random_range(10.0..=50.0) * gam;
        p.g_tilde = rng.random_range(20.0..=50.0) * gam;
        p.gamma = rng.random_range(0.01..=0.1) * gam;
        p.t_m = if rng.random_bool(0.5) { 30.0 } else { 300.0 };
        let tau1 = rng.random_range(0.2..=1.0) / (gam * p.n_th());
        let tau_d = rng.random_range(0.0..=0.5) / gam;
        let tau2 = std::f64::consts::PI / p.g_tilde;
        let tl = ProtocolTimeline::new(tau1, tau_d, tau2).unwrap();
        let tr = run_protocol(&p, &tl, &Sampling { write: 2, delay: 2, readout: 20 }).unwrap();
        let corr = readout_correlations(&p, tau1, tau_d).unwrap();
        for ((t, v), ph) in tr.times.iter().zip(&tr.covariances).zip(&tr.phases) {
            if *ph != Phase::Readout {
                continue;
            }
            let exact = analytic_readout_covariance(&p, &corr, &tl, *t).unwrap().to_covmat().unwrap();
            let num = extract_pair(v, 0, 2).unwrap().to_covmat().unwrap();
            worst = worst.max(max_rel_dev(&num, &exact));
        }
    }
    assert!(worst <= 1e-5, "max deviation {worst:e}");
}

#[test]
fn lossless_beam_splitter_conserves_excitations() {
    let mut p = SystemParams::reference_point();
    p.k = 0.0;
    p.gamma = 0.0;
    p.gamma_ac = 0.0;
    p.gamma_tilde = Some(0.0);
    p.t_m = 300.0;
    let period = std::f64::consts::PI / p.g_tilde;
    let tr = run_protocol(&p, &ProtocolTimeline::new(0.0, 0.0, period).unwrap(), &Sampling::uniform(41)).unwrap();
    let total0 = tr.n_b[0] + tr.n_as[0];
    for (nb, nas) in tr.n_b.iter().zip(&tr.n_as) {
        assert!(rel_dev(nb + nas, total0) < 1e-9, "{} vs {}", nb + nas, total0);
    }
    // Full swap at a quarter period, back at a half.
    let last = tr.n_b.last().unwrap();
    assert!(rel_dev(*last, p.n_th()) < 1e-9);
}

#[test]
fn uncoupled_product_state_is_stationary() {
    let mut p = SystemParams::reference_point();
    p.g = 0.0;
    p.g_tilde = 0.0;
    let gam = p.gamma_ac;
    let tl = ProtocolTimeline::new(4.0 / gam, 2.0 / gam, 4.0 / gam).unwrap();
    let tr = run_protocol(&p, &tl, &Sampling::uniform(11)).unwrap();
    let n = p.n_th();
    for v in &tr.covariances {
        let want = if v.dim() == 2 {
            CovMat::thermal(&[0.0, n]).unwrap()
        } else {
            CovMat::thermal(&[0.0, n, 0.0]).unwrap()
        };
        assert!(max_rel_dev(v, &want) <= 1e-10, "{:?}", v.matrix());
    }
    assert!(tr.en_ab.iter().chain(&tr.en_a_atilde).all(|&e| e == 0.0));
}

#[test]
fn delay_decay_matches_lyapunov() {
    let p = with_delta_a(SystemParams::reference_point(), 0.3 * SystemParams::reference_point().gamma_ac);
    let mut p = p;
    p.gamma_tilde = Some(0.4 * p.gamma_ac);
    let t1 = 0.5 / (p.gamma_ac * p.n_th());
    let v1 = covariance_entangle(&p, t1, p.n_th()).unwrap();
    let dd = delay_drift_diffusion(&p);
    for k in 1..=5 {
        let td = k as f64 * 0.4 / p.gamma_ac;
        let v = lyapunov_propagate(&dd, &v1, (0.0, td), &[td]).unwrap().remove(0);
        let c = readout_correlations_from(&p, v1.occupancy(0), v1.occupancy(1), m_ab(&v1), td);
        let scale = (v.get(0, 0) * v.get(2, 2)).sqrt();
        assert!(rel_dev(c.n_s, v.occupancy(0)) < 1e-8, "n_s {} vs {}", c.n_s, v.occupancy(0));
        assert!(rel_dev(c.n_b, v.occupancy(1)) < 1e-8, "n_b {} vs {}", c.n_b, v.occupancy(1));
        let m = m_ab(&v);
        assert!((c.m_ab() - m).norm() / scale < 1e-8, "m_ab {} vs {}", c.m_ab(), m);
    }
}

#[test]
fn readout_correlations_match_protocol_at_readout_start() {
    let p = SystemParams::reference_point();
    let tl = ProtocolTimeline::new(11e-9, 0.1e-9, 3e-9).unwrap();
    let tr = run_protocol(&p, &tl, &Sampling::uniform(5)).unwrap();
    let v = extract_pair(readout_start_state(&tr), 0, 1).unwrap().to_covmat().unwrap();
    let c = readout_correlations(&p, tl.tau1, tl.tau_d).unwrap();
    let scale = (v.get(0, 0) * v.get(2, 2)).sqrt();
    assert!(rel_dev(c.n_s, v.occupancy(0)) < 1e-6);
    assert!(rel_dev(c.n_b, v.occupancy(1)) < 1e-6);
    assert!((c.m_ab() - m_ab(&v)).norm() / scale < 1e-6);
}

#[test]
fn phases_join_continuously() {
    let p = SystemParams::reference_point();
    let full = ProtocolTimeline::new(11e-9, 0.1e-9, 3e-9).unwrap();
    let tr = run_protocol(&p, &full, &Sampling::uniform(7)).unwrap();
    let head = run_protocol(&p, &ProtocolTimeline::new(11e-9, 0.1e-9, 0.0).unwrap(), &Sampling::uniform(7)).unwrap();
    let start = extract_pair(readout_start_state(&tr), 0, 1).unwrap().to_covmat().unwrap();
    assert!(max_rel_dev(&start, head.covariances.last().unwrap()) <= 1e-9);
    // The stored anti-Stokes mode starts in vacuum, uncorrelated.
    let s = readout_start_state(&tr);
    assert_eq!(s.get(4, 4), 0.5);
    assert_eq!(s.get(5, 5), 0.5);
    for i in 0..4 {
        assert_eq!(s.get(i, 4), 0.0);
        assert_eq!(s.get(i, 5), 0.0);
    }
    let mut last = 0.0;
    for (t, ph) in tr.times.iter().zip(&tr.phases) {
        assert!(*t > last || *t == 0.0, "times not increasing at {t}");
        last = *t;
        let _ = ph;
    }
}

#[test]
fn refined_peak_does_not_depend_on_the_grid() {
    let p = SystemParams::reference_point();
    let tl = ProtocolTimeline::new(4.0 / (p.gamma_ac * p.n_th()), 0.0, 0.0).unwrap();
    let coarse = run_protocol(&p, &tl, &Sampling::uniform(101)).unwrap().peak(Pair::StokesPhonon).unwrap();
    let fine = run_protocol(&p, &tl, &Sampling::uniform(401)).unwrap().peak(Pair::StokesPhonon).unwrap();
    assert!(rel_dev(coarse.value, fine.value) <= 1e-6, "{coarse:?} vs {fine:?}");
    assert!((coarse.time - fine.time).abs() <= 1e-3 * fine.time, "{coarse:?} vs {fine:?}");
}

/// Largest |ΔE_N| between two λ₋ forms over t ≤ 0.05/g at Δ = 0, T = 30 K.
fn short_time_gap(g_over: f64, f: impl Fn(&SystemParams, f64) -> f64, h: impl Fn(&SystemParams, f64) -> f64) -> f64 {
    let mut p = with_delta_a(SystemParams::reference_point(), 0.0);
    p.g = g_over * p.gamma_ac;
    (1..=50)
        .map(|k| {
            let t = 0.001 * k as f64 / p.g;
            (log_negativity_from_lambda(f(&p, t)) - log_negativity_from_lambda(h(&p, t))).abs()
        })
        .fold(0.0, f64::max)
}

fn exact(p: &SystemParams, t: f64) -> f64 {
    lambda_minus(&extract_pair(&covariance_entangle(p, t, p.n_th()).unwrap(), 0, 1).unwrap()).unwrap()
}

fn cubic(p: &SystemParams, t: f64) -> f64 {
    lambda_minus_cubic(p.g, p.gamma_ac, p.n_th(), t)
}

fn rational(p: &SystemParams, t: f64) -> f64 {
    lambda_minus_rational(p.g, p.gamma_ac, p.n_th(), t)
}

#[test]
fn cubic_form_tracks_exact_at_short_times() {
    for g_over in [10.0, 20.0, 40.0] {
        let gap = short_time_gap(g_over, exact, cubic);
        assert!(gap <= 1e-3, "g/Γ = {g_over}: {gap:e}");
    }
}

#[test]
fn rational_form_tracks_exact_at_short_times() {
    for g_over in [10.0, 20.0, 40.0] {
        let gap = short_time_gap(g_over, exact, rational);
        assert!(gap <= 1e-3, "g/Γ = {g_over}: {gap:e}");
    }
}

#[test]
fn rational_form_tracks_cubic_at_short_times() {
    for g_over in [10.0, 20.0, 40.0] {
        let gap = short_time_gap(g_over, cubic, rational);
        assert!(gap <= 1e-3, "g/Γ = {g_over}: {gap:e}");
    }
}

#[test]
fn monte_carlo_relaxes_to_the_thermal_variance() {
    let mut p = SystemParams::reference_point();
    p.g = 0.0;
    p.t_m = 300.0;
    let dd = stokes_drift_diffusion(&p);
    let v0 = CovMat::thermal(&[0.0, 0.0]).unwrap();
    let t = 3.0 / p.gamma_ac;
    let est = mc_oracle(&dd, &v0, t, 10_000, 5).unwrap();
    let exact = lyapunov_propagate(&dd, &v0, (0.0, t), &[t]).unwrap().remove(0);
    let z = (est.covariance.get(2, 2) - exact.get(2, 2)).abs() / est.std_errors[(2, 2)];
    assert!(z <= 3.0, "V33 {} vs {} ({z} SE)", est.covariance.get(2, 2), exact.get(2, 2));
}

#[test]
fn monte_carlo_is_reproducible_and_noise_free_without_loss() {
    let mut p = SystemParams::reference_point();
    p.gamma = 0.0;
    p.gamma_ac = 0.0;
    p.g = 2e6;
    let dd = stokes_drift_diffusion(&p);
    assert!(dd.d.iter().all(|&x| x == 0.0));
    let v0 = CovMat::thermal(&[0.0, 1.0]).unwrap();
    let t = 1e-7;
    let a = mc_oracle(&dd, &v0, t, 2000, 1).unwrap();
    let b = mc_oracle(&dd, &v0, t, 2000, 1).unwrap();
    assert_eq!(a, b);
    let exact = lyapunov_propagate(&dd, &v0, (0.0, t), &[t]).unwrap().remove(0);
    for i in 0..4 {
        for j in i..4 {
            let z = (a.covariance.get(i, j) - exact.get(i, j)).abs() / a.std_errors[(i, j)];
            assert!(z <= 4.0, "({i},{j}): {z} SE");
        }
    }
}

#[test]
fn monte_carlo_at_time_zero_returns_the_initial_state() {
    let p = SystemParams::reference_point();
    let dd = stokes_drift_diffusion(&p);
    let v0 = CovMat::thermal(&[0.0, p.n_th()]).unwrap();
    let est = mc_oracle(&dd, &v0, 0.0, 1000, 3).unwrap();
    assert_eq!(est.n_steps, 0);
    let pair = extract_pair(&est.covariance, 0, 1).unwrap();
    assert!(lambda_minus(&pair).unwrap() >= 0.5 - 0.05);
    let z_max = (0..4)
        .flat_map(|i| (i..4).map(move |j| (i, j)))
        .filter(|&(i, j)| est.std_errors[(i, j)] > 0.0)
        .map(|(i, j)| (est.covariance.get(i, j) - v0.get(i, j)).abs() / est.std_errors[(i, j)])
        .fold(0.0, f64::max);
    assert!(z_max <= 4.5, "{z_max}");
}

#[test]
fn long_delay_without_fiber_loss_kills_the_readout_entanglement() {
    let mut p = SystemParams::reference_point();
    p.gamma_tilde = Some(0.0);
    let tau1 = 1.0 / (p.gamma_ac * p.n_th());
    let tl = ProtocolTimeline::new(tau1, 20.0 / p.gamma_ac, std::f64::consts::PI / p.g_tilde).unwrap();
    let tr = run_protocol(&p, &tl, &Sampling::uniform(41)).unwrap();
    let peak = tr.peak(Pair::StokesAntiStokes).unwrap();
    assert!(peak.value < 1e-3, "{peak:?}");
}

#[test]
fn numerical_and_closed_form_states_are_physical() {
    let p = SystemParams::reference_point();
    let t = 2.0 / (p.gamma_ac * p.n_th());
    let v = covariance_entangle(&p, t, p.n_th()).unwrap();
    assert!(v.is_physical());
    assert!(v.matrix().clone().symmetric_eigenvalues().iter().all(|&l| l > 0.0));
}
