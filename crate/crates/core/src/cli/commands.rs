use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::config::{RunConfig, Spacing, SweepSpec};
use super::output::{Cell, CsvTable, OutputMeta};
use super::CliError;
use crate::analytic::{
    analytic_readout_covariance, covariance_entangle, en_max, lambda_minus_cubic, lambda_minus_rational,
    lambda_tilde_minus_cubic, lambda_tilde_minus_poly, readout_correlations, readout_correlations_from,
    ReadoutCorrelations,
};
use crate::gaussian::{extract_pair, lambda_minus, log_negativity, log_negativity_from_lambda, CovMat};
use crate::model::{antistokes_drift_diffusion, delay_drift_diffusion, stokes_drift_diffusion, SystemParams};
use crate::propagator::{
    lyapunov_propagate_with, mc_oracle, run_protocol_with, Pair, Phase, ProtocolTimeline, Sampling, Tolerances,
    Trajectory, RNG_ALGORITHM,
};

/// Default write window `4/(Γ·max(n_th, 1))`, a few heating times.
fn write_window(cfg: &RunConfig, p: &SystemParams) -> f64 {
    cfg.t_max_s
        .unwrap_or_else(|| 4.0 / (p.rate_scale() * p.n_th().max(1.0)))
}

fn write_trajectory(cfg: &RunConfig, p: &SystemParams) -> Result<Trajectory, CliError> {
    let tl = ProtocolTimeline::new(write_window(cfg, p), 0.0, 0.0)?;
    Ok(run_protocol_with(p, &tl, &Sampling::uniform(cfg.samples), cfg.tolerances())?)
}

fn en_from_lambda(l: f64) -> f64 {
    if l > 0.0 {
        log_negativity_from_lambda(l)
    } else {
        f64::INFINITY
    }
}

/// E_N(t) during the write pulse, one table per write coupling.
pub fn cmd_entangle(cfg: &RunConfig, meta: &OutputMeta) -> Result<Vec<CsvTable>, CliError> {
    (0..cfg.g_over_gamma.len())
        .map(|i| {
            let p = cfg.params(i);
            let tr = write_trajectory(cfg, &p)?;
            let n = p.n_th();
            let mut t = CsvTable::new(&[
                "t_s",
                "E_N_exact",
                "E_N_cubic",
                "E_N_rational",
                "lambda_minus",
                "V11",
                "V33",
                "V14",
                "V13",
                "n_b",
            ]);
            t.meta = meta.lines(cfg, i);
            for (time, v) in tr.times.iter().zip(&tr.covariances) {
                let lam = lambda_minus(&extract_pair(v, 0, 1)?)?;
                let m = v.matrix();
                t.push(vec![
                    Cell::Num(*time),
                    Cell::Num(log_negativity_from_lambda(lam)),
                    Cell::Num(en_from_lambda(lambda_minus_cubic(p.g, p.gamma_ac, n, *time))),
                    Cell::Num(en_from_lambda(lambda_minus_rational(p.g, p.gamma_ac, n, *time))),
                    Cell::Num(lam),
                    Cell::Num(m[(0, 0)]),
                    Cell::Num(m[(2, 2)]),
                    Cell::Num(m[(0, 3)]),
                    Cell::Num(m[(0, 2)]),
                    Cell::Num(v.occupancy(1)),
                ]);
            }
            let peak = tr.peak(Pair::StokesPhonon)?;
            t.summary.push(format!("summary peak_E_N = {:.16e}", peak.value));
            t.summary.push(format!("summary peak_time_s = {:.16e}", peak.time));
            match en_max(p.g, p.gamma_ac, n) {
                Ok(x) => t.summary.push(format!("summary en_max = {x:.16e}")),
                Err(e) => t.summary.push(format!("summary en_max = NaN ({e})")),
            }
            Ok(t)
        })
        .collect()
}

fn sweep_or_default(cfg: &RunConfig, allowed: &[&str], default: SweepSpec) -> Result<SweepSpec, CliError> {
    match &cfg.sweep {
        None => Ok(default),
        Some(s) if allowed.contains(&s.var.as_str()) => Ok(s.clone()),
        Some(s) => Err(CliError::Config {
            line: 0,
            key: "sweep_var".into(),
            msg: format!("this command sweeps {}, not {}", allowed.join(" or "), s.var),
        }),
    }
}

/// Runs `f` on each sweep point in parallel; rows come back in axis order.
fn sweep_rows<F>(cfg: &RunConfig, index: usize, spec: &SweepSpec, f: F) -> Result<Vec<Vec<Cell>>, CliError>
where
    F: Fn(f64, &RunConfig, &SystemParams) -> Result<Vec<Cell>, CliError> + Sync,
{
    spec.points()
        .into_par_iter()
        .map(|x| {
            let mut c = cfg.clone();
            c.g_over_gamma = vec![cfg.g_over_gamma[index]];
            c.set(&spec.var, x)?;
            let p = c.params(0);
            f(x, &c, &p)
        })
        .collect()
}

/// Peak write-phase E_N against bath temperature.
pub fn cmd_sweep_temp(cfg: &RunConfig, meta: &OutputMeta) -> Result<Vec<CsvTable>, CliError> {
    let spec = sweep_or_default(
        cfg,
        &["T_m_K"],
        SweepSpec {
            var: "T_m_K".into(),
            min: 10.0,
            max: 300.0,
            count: 30,
            spacing: Spacing::Linear,
        },
    )?;
    (0..cfg.g_over_gamma.len())
        .map(|i| {
            let rows = sweep_rows(cfg, i, &spec, |x, c, p| {
                let pk = write_trajectory(c, p)?.peak(Pair::StokesPhonon)?;
                Ok(vec![x.into(), p.n_th().into(), pk.value.into(), pk.time.into()])
            })?;
            let mut t = CsvTable::new(&["T_m_K", "n_th", "peak_E_N", "peak_time_s"]);
            t.meta = meta.lines(cfg, i);
            t.rows = rows;
            let peaks = t.column("peak_E_N").unwrap();
            let monotone = peaks.windows(2).all(|w| w[1] <= w[0]);
            if !monotone {
                eprintln!("warning: peak_E_N is not nonincreasing in T_m_K (g/Γ = {})", cfg.g_over_gamma[i]);
            }
            t.summary.push(format!("summary peak_E_N_nonincreasing = {monotone}"));
            Ok(t)
        })
        .collect()
}

/// Peak write-phase E_N against wavenumber.
pub fn cmd_sweep_k(cfg: &RunConfig, meta: &OutputMeta) -> Result<Vec<CsvTable>, CliError> {
    (0..cfg.g_over_gamma.len())
        .map(|i| {
            let span = 3.0 * cfg.g_over_gamma[i].abs().max(1.0);
            let spec = sweep_or_default(
                cfg,
                &["k_per_m", "delta_a_over_Gamma"],
                SweepSpec {
                    var: "delta_a_over_Gamma".into(),
                    min: -span,
                    max: span,
                    count: 61,
                    spacing: Spacing::Linear,
                },
            )?;
            let rows = sweep_rows(cfg, i, &spec, |_, c, p| {
                let pk = write_trajectory(c, p)?.peak(Pair::StokesPhonon)?;
                let (da, db) = p.detunings();
                Ok(vec![
                    p.k.into(),
                    (da / p.gamma_ac).into(),
                    da.into(),
                    db.into(),
                    pk.value.into(),
                    pk.time.into(),
                ])
            })?;
            let mut t = CsvTable::new(&[
                "k_per_m",
                "delta_a_over_Gamma",
                "delta_a_rad_s",
                "delta_b_rad_s",
                "peak_E_N",
                "peak_time_s",
            ]);
            t.meta = meta.lines(cfg, i);
            t.rows = rows;
            Ok(t)
        })
        .collect()
}

/// `⟨ab + ba⟩/2` from the quadrature cross block.
fn m_ab_from(v: &CovMat) -> Complex64 {
    let m = v.matrix();
    Complex64::new(0.5 * (m[(0, 2)] - m[(1, 3)]), 0.5 * (m[(0, 3)] + m[(1, 2)]))
}

/// Stokes/phonon statistics of the stored state at the readout start.
fn correlations_at_readout(p: &SystemParams, tr: &Trajectory) -> Option<ReadoutCorrelations> {
    let i = tr.phases.iter().position(|ph| *ph == Phase::Readout)?;
    let v = &tr.covariances[i];
    Some(readout_correlations_from(p, v.occupancy(0), v.occupancy(1), m_ab_from(v), 0.0))
}

/// Full write / delay / readout protocol.
pub fn cmd_readout(cfg: &RunConfig, meta: &OutputMeta) -> Result<Vec<CsvTable>, CliError> {
    let tl = cfg.timeline()?;
    let sampling = Sampling {
        write: cfg.samples,
        delay: (cfg.samples / 10).max(2),
        readout: cfg.samples,
    };
    (0..cfg.g_over_gamma.len())
        .map(|i| {
            let p = cfg.params(i);
            let tr = run_protocol_with(&p, &tl, &sampling, cfg.tolerances())?;
            let corr = correlations_at_readout(&p, &tr);
            let start = tl.readout_start();
            let n = p.n_th();
            let mut t = CsvTable::new(&[
                "t_s",
                "phase",
                "E_N_ab",
                "E_N_a_atilde",
                "E_N_tilde_cubic",
                "E_N_tilde_poly",
                "N_as",
                "n_b",
            ]);
            t.meta = meta.lines(cfg, i);
            for k in 0..tr.times.len() {
                let (cubic, poly) = match (&corr, tr.phases[k]) {
                    (Some(c), Phase::Readout) => {
                        let tr_ = tr.times[k] - start;
                        (
                            en_from_lambda(lambda_tilde_minus_cubic(p.g_tilde, p.gamma_ac, n, c, tr_)),
                            en_from_lambda(lambda_tilde_minus_poly(p.g_tilde, p.gamma_ac, n, c, tr_)),
                        )
                    }
                    _ => (f64::NAN, f64::NAN),
                };
                t.push(vec![
                    tr.times[k].into(),
                    tr.phases[k].as_str().into(),
                    tr.en_ab[k].into(),
                    tr.en_a_atilde[k].into(),
                    cubic.into(),
                    poly.into(),
                    tr.n_as[k].into(),
                    tr.n_b[k].into(),
                ]);
            }
            let pk = tr.peak(Pair::StokesAntiStokes)?;
            let pw = tr.peak(Pair::StokesPhonon)?;
            t.summary.push(format!("summary peak_E_N_tilde = {:.16e}", pk.value));
            t.summary.push(format!("summary peak_E_N_tilde_time_s = {:.16e}", pk.time));
            t.summary.push(format!("summary peak_E_N_ab = {:.16e}", pw.value));
            t.summary.push(format!("summary peak_E_N_ab_time_s = {:.16e}", pw.time));
            if let Some(c) = corr {
                t.summary.push(format!(
                    "summary readout_start n_s = {:.16e}, n_b = {:.16e}, C_ns = {:.16e}, eta_sq = {:.16e}",
                    c.n_s,
                    c.n_b,
                    c.c_ns,
                    c.eta_sq(p.g_tilde)
                ));
            }
            Ok(t)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationCheck {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

impl ValidationCheck {
    fn at_most(name: &str, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            bound,
            pass: measured <= bound,
        }
    }
}

/// Largest deviation of `a` from `b`, each element measured against its
/// Cauchy–Schwarz scale `√(b_ii b_jj)`.
fn max_scaled_dev(a: &CovMat, b: &CovMat) -> f64 {
    let (x, y) = (a.matrix(), b.matrix());
    let n = y.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let scale = (y[(i, i)] * y[(j, j)]).sqrt().max(y[(i, j)].abs());
            worst = worst.max((x[(i, j)] - y[(i, j)]).abs() / scale);
        }
    }
    worst
}

fn max_z(exact: &CovMat, est: &crate::propagator::McEstimate) -> f64 {
    let n = exact.matrix().nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let z = (est.covariance.get(i, j) - exact.get(i, j)).abs() / est.std_errors[(i, j)];
            worst = worst.max(if z.is_nan() { f64::INFINITY } else { z });
        }
    }
    worst
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Cross-path and Monte-Carlo checks at the configured operating point.
/// Returns the report and whether every check passed.
pub fn cmd_validate(cfg: &RunConfig, meta: &OutputMeta) -> Result<(CsvTable, bool), CliError> {
    let p = cfg.params(0);
    let tol = cfg.tolerances();
    let mut states: Vec<CovMat> = Vec::new();
    let mut checks = Vec::new();
    let v0 = CovMat::thermal(&[0.0, p.n_th()])?;

    // Write: analytic vs Lyapunov.
    let window = write_window(cfg, &p);
    let ts = linspace(0.0, window, 21);
    let dd1 = stokes_drift_diffusion(&p);
    let num = lyapunov_propagate_with(&dd1, &v0, (0.0, window), &ts, tol)?;
    let mut worst: f64 = 0.0;
    for (t, v) in ts.iter().zip(&num) {
        let exact = covariance_entangle(&p, *t, p.n_th())?;
        worst = worst.max(max_scaled_dev(v, &exact));
        states.push(exact);
    }
    states.extend(num.iter().cloned());
    checks.push(ValidationCheck::at_most("write_analytic_vs_lyapunov", worst, 1e-6));

    // Halving rtol.
    let half = Tolerances {
        rtol: tol.rtol / 2.0,
        atol: tol.atol,
    };
    let num_half = lyapunov_propagate_with(&dd1, &v0, (0.0, window), &ts, half)?;
    let drift = num
        .iter()
        .zip(&num_half)
        .map(|(a, b)| max_scaled_dev(a, b))
        .fold(0.0, f64::max);
    checks.push(ValidationCheck::at_most("lyapunov_rtol_halving", drift, 10.0 * tol.rtol));

    // Readout: analytic vs three-mode Lyapunov, pair (a, ã).
    let tl = cfg.timeline()?;
    if tl.tau2 > 0.0 {
        let corr = readout_correlations(&p, tl.tau1, tl.tau_d)?;
        let tr = run_protocol_with(
            &p,
            &tl,
            &Sampling {
                write: 2,
                delay: 2,
                readout: 20,
            },
            tol,
        )?;
        let mut worst: f64 = 0.0;
        for (t, (v, ph)) in tr.times.iter().zip(tr.covariances.iter().zip(&tr.phases)) {
            if *ph != Phase::Readout {
                continue;
            }
            let exact = analytic_readout_covariance(&p, &corr, &tl, *t)?.to_covmat()?;
            let num = extract_pair(v, 0, 2)?.to_covmat()?;
            worst = worst.max(max_scaled_dev(&num, &exact));
            states.push(exact);
        }
        states.extend(tr.covariances.iter().cloned());
        checks.push(ValidationCheck::at_most("readout_analytic_vs_lyapunov", worst, 1e-5));
    }

    // Lossless swap.
    {
        let mut q = p;
        q.k = 0.0;
        q.gamma = 0.0;
        q.gamma_ac = 0.0;
        q.gamma_tilde = Some(0.0);
        if q.g_tilde == 0.0 {
            q.g_tilde = 40.0 * p.gamma_ac.max(1.0);
        }
        let t_swap = PI / (2.0 * q.g_tilde.abs());
        let tr = run_protocol_with(&q, &ProtocolTimeline::new(0.0, 0.0, t_swap)?, &Sampling::uniform(11), tol)?;
        let n_as = *tr.n_as.last().unwrap();
        let n = q.n_th();
        let dev = if n > 0.0 { (n_as - n).abs() / n } else { n_as.abs() };
        states.extend(tr.covariances.iter().cloned());
        checks.push(ValidationCheck::at_most("swap_lossless_relative", dev, 1e-6));
    }

    // Monte-Carlo oracle in three regimes.
    let n_traj = cfg.mc_trajectories;
    let seed = cfg.seed;
    {
        let mut q = p;
        q.g = 10.0 * p.gamma_ac;
        let dd = stokes_drift_diffusion(&q);
        let t = 0.5 / q.gamma_ac;
        let exact = lyapunov_propagate_with(&dd, &v0, (0.0, t), &[t], tol)?.remove(0);
        let est = mc_oracle(&dd, &v0, t, n_traj, seed)?;
        checks.push(ValidationCheck::at_most("mc_write_max_z", max_z(&exact, &est), 4.0));
        states.push(exact);
    }
    let t1 = 1.0 / (p.gamma_ac * p.n_th().max(1.0));
    let v_corr = covariance_entangle(&p, t1, p.n_th())?;
    {
        let dd = delay_drift_diffusion(&p);
        let t = 0.5 / p.gamma_ac;
        let exact = lyapunov_propagate_with(&dd, &v_corr, (0.0, t), &[t], tol)?.remove(0);
        let est = mc_oracle(&dd, &v_corr, t, n_traj, seed.wrapping_add(1))?;
        checks.push(ValidationCheck::at_most("mc_free_decay_max_z", max_z(&exact, &est), 4.0));
        states.push(exact);
    }
    {
        let mut q = p;
        q.g_tilde = 20.0 * p.gamma_ac;
        let v3 = v_corr.embed_with_vacuum(3)?;
        let dd = antistokes_drift_diffusion(&q, 3)?;
        let t = PI / (4.0 * q.g_tilde);
        let exact = lyapunov_propagate_with(&dd, &v3, (0.0, t), &[t], tol)?.remove(0);
        let est = mc_oracle(&dd, &v3, t, n_traj, seed.wrapping_add(2))?;
        checks.push(ValidationCheck::at_most("mc_readout_max_z", max_z(&exact, &est), 4.0));
        states.push(exact);
    }

    // Bona-fide states.
    let nu_min = states
        .iter()
        .map(|v| v.symplectic_spectrum()[0])
        .fold(f64::INFINITY, f64::min);
    checks.push(ValidationCheck {
        name: "min_symplectic_eigenvalue".into(),
        measured: nu_min,
        bound: 0.5 * (1.0 - crate::gaussian::TOL_PHYSICAL),
        pass: nu_min >= 0.5 * (1.0 - crate::gaussian::TOL_PHYSICAL),
    });

    // Product initial state carries no entanglement.
    let en0 = log_negativity(&extract_pair(&v0, 0, 1)?)?;
    checks.push(ValidationCheck::at_most("initial_E_N", en0, 0.0));

    let mut table = CsvTable::new(&["check", "measured", "bound", "pass"]);
    let mut m = meta.clone();
    m.extra.push(format!("rng = {RNG_ALGORITHM}"));
    m.extra.push(format!("mc_trajectories = {n_traj}"));
    table.meta = m.lines(cfg, 0);
    let all = checks.iter().all(|c| c.pass);
    for c in &checks {
        table.push(vec![
            c.name.as_str().into(),
            c.measured.into(),
            c.bound.into(),
            if c.pass { "PASS" } else { "FAIL" }.into(),
        ]);
    }
    table.summary.push(format!("summary all_pass = {all}"));
    Ok((table, all))
}
