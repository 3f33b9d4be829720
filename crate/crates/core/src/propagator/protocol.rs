//! The write / delay / readout protocol.
//!
//! Phase 1 runs the two-mode write dynamics from vacuum ⊗ thermal(n_th).
//! Phase 2 lets the Stokes light decay in the fiber while the phonon
//! relaxes. Phase 3 embeds the state into `(a, b, ã)` with `ã` in vacuum
//! and runs the beam splitter between `b` and `ã`.

use crate::error::{Error, Result};
use crate::gaussian::{extract_pair, log_negativity, CovMat};
use crate::model::{
    antistokes_drift_diffusion, delay_drift_diffusion, stokes_drift_diffusion, DriftDiffusion, ProtocolTimeline,
    SystemParams,
};

use super::lyapunov::{lyapunov_propagate_with, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Write,
    Delay,
    Readout,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Write => "write",
            Phase::Delay => "delay",
            Phase::Readout => "readout",
        }
    }
}

/// Number of samples per phase, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sampling {
    pub write: usize,
    pub delay: usize,
    pub readout: usize,
}

impl Sampling {
    pub fn uniform(per_phase: usize) -> Self {
        Self {
            write: per_phase,
            delay: per_phase,
            readout: per_phase,
        }
    }
}

/// Mode pair whose entanglement is tracked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pair {
    /// Stokes photon and phonon.
    StokesPhonon,
    /// Stokes and anti-Stokes photons.
    StokesAntiStokes,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub value: f64,
    pub time: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// Two-mode `(a, b)` states in the write and delay phases, three-mode
    /// `(a, b, ã)` states in the readout.
    pub covariances: Vec<CovMat>,
    pub phases: Vec<Phase>,
    pub en_ab: Vec<f64>,
    pub en_a_atilde: Vec<f64>,
    pub n_as: Vec<f64>,
    pub n_b: Vec<f64>,
    pub params: SystemParams,
    pub timeline: ProtocolTimeline,
    pub tol: Tolerances,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 || b == a {
        return vec![a];
    }
    (0..n)
        .map(|k| if k == n - 1 { b } else { a + (b - a) * k as f64 / (n - 1) as f64 })
        .collect()
}

pub fn run_protocol(params: &SystemParams, timeline: &ProtocolTimeline, sampling: &Sampling) -> Result<Trajectory> {
    run_protocol_with(params, timeline, sampling, Tolerances::default())
}

pub fn run_protocol_with(
    params: &SystemParams,
    timeline: &ProtocolTimeline,
    sampling: &Sampling,
    tol: Tolerances,
) -> Result<Trajectory> {
    params.validate()?;
    let tl = ProtocolTimeline::new(timeline.tau1, timeline.tau_d, timeline.tau2)?;
    let (t1, t2, t3) = (tl.tau1, tl.readout_start(), tl.end());
    let has_delay = tl.tau_d > 0.0;
    let has_readout = tl.tau2 > 0.0;

    let mut times = Vec::new();
    let mut covs = Vec::new();
    let mut phases = Vec::new();

    // Phase 1.
    let v0 = CovMat::thermal(&[0.0, params.n_th()])?;
    let write_times = linspace(0.0, t1, sampling.write.max(2));
    let dd1 = stokes_drift_diffusion(params);
    let vs = lyapunov_propagate_with(&dd1, &v0, (0.0, t1), &write_times, tol)?;
    let v_t1 = vs.last().unwrap().clone();
    for (t, v) in write_times.iter().zip(vs) {
        times.push(*t);
        covs.push(v);
        phases.push(Phase::Write);
    }

    // Phase 2.
    let mut v_t2 = v_t1;
    if has_delay {
        let nd = sampling.delay.max(2);
        let mut grid: Vec<f64> = linspace(t1, t2, nd).into_iter().skip(1).collect();
        if *grid.last().unwrap() != t2 {
            grid.push(t2);
        }
        let vs = lyapunov_propagate_with(&delay_drift_diffusion(params), &v_t2, (t1, t2), &grid, tol)?;
        v_t2 = vs.last().unwrap().clone();
        let keep = if has_readout { grid.len() - 1 } else { grid.len() };
        for (t, v) in grid.iter().zip(vs).take(keep) {
            times.push(*t);
            covs.push(v);
            phases.push(Phase::Delay);
        }
    }

    // Phase 3.
    if has_readout {
        let v3 = v_t2.embed_with_vacuum(3)?;
        let grid = linspace(t2, t3, sampling.readout.max(2));
        let dd3 = antistokes_drift_diffusion(params, 3)?;
        let vs = lyapunov_propagate_with(&dd3, &v3, (t2, t3), &grid, tol)?;
        // The readout start supersedes a coincident write sample (τ_d = 0).
        if times.last() == Some(&t2) {
            times.pop();
            covs.pop();
            phases.pop();
        }
        for (t, v) in grid.iter().zip(vs) {
            times.push(*t);
            covs.push(v);
            phases.push(Phase::Readout);
        }
    }

    let mut en_ab = Vec::with_capacity(times.len());
    let mut en_aa = Vec::with_capacity(times.len());
    let mut n_as = Vec::with_capacity(times.len());
    let mut n_b = Vec::with_capacity(times.len());
    for v in &covs {
        en_ab.push(log_negativity(&extract_pair(v, 0, 1)?)?);
        if v.dim() == 3 {
            en_aa.push(log_negativity(&extract_pair(v, 0, 2)?)?);
            n_as.push(v.occupancy(2));
        } else {
            en_aa.push(0.0);
            n_as.push(0.0);
        }
        n_b.push(v.occupancy(1));
    }

    Ok(Trajectory {
        times,
        covariances: covs,
        phases,
        en_ab,
        en_a_atilde: en_aa,
        n_as,
        n_b,
        params: *params,
        timeline: tl,
        tol,
    })
}

impl Trajectory {
    pub fn series(&self, pair: Pair) -> &[f64] {
        match pair {
            Pair::StokesPhonon => &self.en_ab,
            Pair::StokesAntiStokes => &self.en_a_atilde,
        }
    }

    fn drift(&self, phase: Phase) -> Result<DriftDiffusion> {
        Ok(match phase {
            Phase::Write => stokes_drift_diffusion(&self.params),
            Phase::Delay => delay_drift_diffusion(&self.params),
            Phase::Readout => antistokes_drift_diffusion(&self.params, 3)?,
        })
    }

    /// Largest sampled value of the series.
    pub fn grid_peak(&self, pair: Pair) -> Peak {
        let s = self.series(pair);
        let mut best = 0;
        for (i, &v) in s.iter().enumerate() {
            if v > s[best] {
                best = i;
            }
        }
        Peak {
            value: s[best],
            time: self.times[best],
        }
    }

    /// Peak located on the grid and refined by golden-section search
    /// between the neighbouring samples of the same phase.
    pub fn peak(&self, pair: Pair) -> Result<Peak> {
        let s = self.series(pair);
        let grid = self.grid_peak(pair);
        if grid.value <= 0.0 {
            return Ok(grid);
        }
        let i = self.times.iter().position(|&t| t == grid.time).unwrap();
        let phase = self.phases[i];
        let lo = if i > 0 && self.phases[i - 1] == phase { i - 1 } else { i };
        let hi = if i + 1 < s.len() && self.phases[i + 1] == phase { i + 1 } else { i };
        if lo == hi {
            return Ok(grid);
        }
        let dd = self.drift(phase)?;
        let v_left = &self.covariances[lo];
        let t_left = self.times[lo];
        let (a, b) = match pair {
            Pair::StokesPhonon => (0, 1),
            Pair::StokesAntiStokes => (0, 2),
        };
        if b >= v_left.dim() {
            return Ok(grid);
        }
        let tol = self.tol;
        let f = |t: f64| -> Result<f64> {
            let v = lyapunov_propagate_with(&dd, v_left, (t_left, t), &[t], tol)?;
            log_negativity(&extract_pair(&v[0], a, b)?)
        };
        let refined = refine_peak(f, t_left, self.times[hi])?;
        Ok(if refined.value > grid.value { refined } else { grid })
    }
}

/// Golden-section maximization of `f` on `[lo, hi]`.
pub fn refine_peak<F>(f: F, lo: f64, hi: f64) -> Result<Peak>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(hi >= lo) {
        return Err(Error::InvalidArgument(format!("empty bracket [{lo}, {hi}]")));
    }
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    for _ in 0..200 {
        if b - a <= 1e-13 * b.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { Peak { value: f1, time: x1 } } else { Peak { value: f2, time: x2 } })
}
