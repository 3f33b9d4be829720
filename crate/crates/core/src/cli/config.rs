//! Flat `key = value` run configuration.
//!
//! Frequencies are ordinary (Hz) in the file and angular (rad/s) inside the
//! library. Missing keys take the reference operating point.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::model::{SystemParams, SPEED_OF_LIGHT};
use crate::model::ProtocolTimeline;
use crate::propagator::Tolerances;

use super::CliError;

const TWO_PI: f64 = 2.0 * PI;

/// Prefix of the header lines that carry the resolved configuration.
pub const CONFIG_PREFIX: &str = "# config ";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Detuning {
    KPerM(f64),
    DeltaAOverGamma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub var: String,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl SweepSpec {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let f = i as f64 / n;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * f,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * f).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub gamma_hz: f64,
    pub gamma_ac_hz: f64,
    pub omega_ac_hz: f64,
    /// One output per value.
    pub g_over_gamma: Vec<f64>,
    pub g_tilde_over_gamma: f64,
    pub gamma_tilde_hz: Option<f64>,
    pub n_opt: f64,
    pub v_ac_mps: f64,
    pub t_m_k: f64,
    pub detuning: Detuning,
    pub delta_a_tilde_over_gamma: Option<f64>,
    pub tau1_s: f64,
    pub tau_d_s: f64,
    pub tau2_s: f64,
    pub seed: u64,
    pub rtol: f64,
    pub atol: f64,
    pub samples: usize,
    /// Write-phase window for `entangle` and the sweeps; default `4/(Γ·max(n_th, 1))`.
    pub t_max_s: Option<f64>,
    pub sweep: Option<SweepSpec>,
    pub mc_trajectories: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            gamma_hz: 0.1e6,
            gamma_ac_hz: 2e6,
            omega_ac_hz: 7.7e9,
            g_over_gamma: vec![30.0],
            g_tilde_over_gamma: 40.0,
            gamma_tilde_hz: None,
            n_opt: 2.4,
            v_ac_mps: 6000.0,
            t_m_k: 30.0,
            detuning: Detuning::DeltaAOverGamma(0.2),
            delta_a_tilde_over_gamma: None,
            tau1_s: 11e-9,
            tau_d_s: 0.1e-9,
            tau2_s: 3e-9,
            seed: 1,
            rtol: 1e-10,
            atol: 1e-12,
            samples: 401,
            t_max_s: None,
            sweep: None,
            mc_trajectories: 20_000,
        }
    }
}

pub const KEYS: &[&str] = &[
    "gamma_hz",
    "Gamma_hz",
    "omega_ac_hz",
    "g_over_Gamma",
    "g_tilde_over_Gamma",
    "gamma_tilde_hz",
    "n_opt",
    "v_ac_mps",
    "T_m_K",
    "k_per_m",
    "delta_a_over_Gamma",
    "delta_a_tilde_over_Gamma",
    "tau1_s",
    "tau_d_s",
    "tau2_s",
    "seed",
    "rtol",
    "atol",
    "samples",
    "t_max_s",
    "sweep_var",
    "sweep_min",
    "sweep_max",
    "sweep_count",
    "sweep_spacing",
    "mc_trajectories",
];

/// Keys a sweep may range over.
pub const SWEEPABLE: &[&str] = &[
    "gamma_hz",
    "Gamma_hz",
    "omega_ac_hz",
    "g_over_Gamma",
    "g_tilde_over_Gamma",
    "gamma_tilde_hz",
    "n_opt",
    "v_ac_mps",
    "T_m_K",
    "k_per_m",
    "delta_a_over_Gamma",
    "delta_a_tilde_over_Gamma",
    "tau1_s",
    "tau_d_s",
    "tau2_s",
];

fn err(line: usize, key: &str, msg: impl Into<String>) -> CliError {
    CliError::Config {
        line,
        key: key.to_string(),
        msg: msg.into(),
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v
        .parse()
        .map_err(|_| err(line, key, format!("expected a number, got {v:?}")))?;
    if !x.is_finite() {
        return Err(err(line, key, format!("value must be finite, got {v}")));
    }
    Ok(x)
}

fn parse_nonneg(line: usize, key: &str, v: &str) -> Result<f64, CliError> {
    let x = parse_f64(line, key, v)?;
    if x < 0.0 {
        return Err(err(line, key, format!("value must be >= 0, got {v}")));
    }
    Ok(x)
}

fn parse_positive(line: usize, key: &str, v: &str) -> Result<f64, CliError> {
    let x = parse_f64(line, key, v)?;
    if x <= 0.0 {
        return Err(err(line, key, format!("value must be > 0, got {v}")));
    }
    Ok(x)
}

fn parse_count(line: usize, key: &str, v: &str) -> Result<usize, CliError> {
    v.parse()
        .map_err(|_| err(line, key, format!("expected a non-negative integer, got {v:?}")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen: Vec<(&str, usize)> = Vec::new();
        let (mut sweep_var, mut sweep_min, mut sweep_max) = (None, None, None);
        let (mut sweep_count, mut sweep_spacing) = (None, None);
        let mut k_line = None;
        let mut delta_line = None;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, content, "expected `key = value`"))?;
            let (key, value) = (key.trim(), value.trim());
            let Some(&known) = KEYS.iter().find(|&&k| k == key) else {
                return Err(err(line, key, "unknown key"));
            };
            if let Some((_, first)) = seen.iter().find(|(k, _)| *k == known) {
                return Err(err(line, key, format!("duplicate key (first set on line {first})")));
            }
            seen.push((known, line));
            if value.is_empty() {
                return Err(err(line, key, "missing value"));
            }
            match known {
                "gamma_hz" => cfg.gamma_hz = parse_nonneg(line, key, value)?,
                "Gamma_hz" => cfg.gamma_ac_hz = parse_nonneg(line, key, value)?,
                "omega_ac_hz" => cfg.omega_ac_hz = parse_positive(line, key, value)?,
                "g_over_Gamma" => {
                    cfg.g_over_gamma = value
                        .split(',')
                        .map(|v| parse_f64(line, key, v.trim()))
                        .collect::<Result<_, _>>()?;
                }
                "g_tilde_over_Gamma" => cfg.g_tilde_over_gamma = parse_f64(line, key, value)?,
                "gamma_tilde_hz" => cfg.gamma_tilde_hz = Some(parse_nonneg(line, key, value)?),
                "n_opt" => cfg.n_opt = parse_positive(line, key, value)?,
                "v_ac_mps" => cfg.v_ac_mps = parse_nonneg(line, key, value)?,
                "T_m_K" => cfg.t_m_k = parse_nonneg(line, key, value)?,
                "k_per_m" => {
                    cfg.detuning = Detuning::KPerM(parse_f64(line, key, value)?);
                    k_line = Some(line);
                }
                "delta_a_over_Gamma" => {
                    cfg.detuning = Detuning::DeltaAOverGamma(parse_f64(line, key, value)?);
                    delta_line = Some(line);
                }
                "delta_a_tilde_over_Gamma" => cfg.delta_a_tilde_over_gamma = Some(parse_f64(line, key, value)?),
                "tau1_s" => cfg.tau1_s = parse_nonneg(line, key, value)?,
                "tau_d_s" => cfg.tau_d_s = parse_nonneg(line, key, value)?,
                "tau2_s" => cfg.tau2_s = parse_nonneg(line, key, value)?,
                "seed" => {
                    cfg.seed = value
                        .parse()
                        .map_err(|_| err(line, key, format!("expected an unsigned integer, got {value:?}")))?
                }
                "rtol" => cfg.rtol = parse_positive(line, key, value)?,
                "atol" => cfg.atol = parse_positive(line, key, value)?,
                "samples" => {
                    cfg.samples = parse_count(line, key, value)?;
                    if cfg.samples < 2 {
                        return Err(err(line, key, "samples must be >= 2"));
                    }
                }
                "t_max_s" => cfg.t_max_s = Some(parse_positive(line, key, value)?),
                "sweep_var" => {
                    if !SWEEPABLE.contains(&value) {
                        return Err(err(line, key, format!("{value:?} is not a sweepable config key")));
                    }
                    sweep_var = Some(value.to_string());
                }
                "sweep_min" => sweep_min = Some((line, parse_f64(line, key, value)?)),
                "sweep_max" => sweep_max = Some((line, parse_f64(line, key, value)?)),
                "sweep_count" => {
                    let n = parse_count(line, key, value)?;
                    if n < 1 {
                        return Err(err(line, key, "sweep_count must be >= 1"));
                    }
                    sweep_count = Some(n);
                }
                "sweep_spacing" => {
                    sweep_spacing = Some(match value {
                        "linear" => Spacing::Linear,
                        "log" => Spacing::Log,
                        _ => return Err(err(line, key, format!("expected linear or log, got {value:?}"))),
                    })
                }
                "mc_trajectories" => {
                    cfg.mc_trajectories = parse_count(line, key, value)?;
                    if cfg.mc_trajectories < 100 {
                        return Err(err(line, key, "mc_trajectories must be >= 100"));
                    }
                }
                _ => unreachable!("key list and match arms differ"),
            }
        }

        if let (Some(kl), Some(dl)) = (k_line, delta_line) {
            return Err(err(
                kl.max(dl),
                "k_per_m",
                format!("k_per_m (line {kl}) and delta_a_over_Gamma (line {dl}) are mutually exclusive"),
            ));
        }

        let any_sweep = sweep_var.is_some()
            || sweep_min.is_some()
            || sweep_max.is_some()
            || sweep_count.is_some()
            || sweep_spacing.is_some();
        if any_sweep {
            let var = sweep_var.ok_or_else(|| err(0, "sweep_var", "sweep keys given without sweep_var"))?;
            let (min_line, min) = sweep_min.ok_or_else(|| err(0, "sweep_min", "missing"))?;
            let (_, max) = sweep_max.ok_or_else(|| err(0, "sweep_max", "missing"))?;
            if min > max {
                return Err(err(min_line, "sweep_min", format!("sweep_min {min} > sweep_max {max}")));
            }
            let spacing = sweep_spacing.unwrap_or(Spacing::Linear);
            if spacing == Spacing::Log && min <= 0.0 {
                return Err(err(min_line, "sweep_min", "log spacing needs sweep_min > 0"));
            }
            cfg.sweep = Some(SweepSpec {
                var,
                min,
                max,
                count: sweep_count.unwrap_or(11),
                spacing,
            });
        }
        if cfg.g_over_gamma.is_empty() {
            return Err(err(0, "g_over_Gamma", "no value"));
        }
        Ok(cfg)
    }

    /// Parses the configuration embedded in a data file's header.
    pub fn from_data_header(text: &str) -> Result<Self, CliError> {
        let lines: Vec<&str> = text
            .lines()
            .filter_map(|l| l.strip_prefix(CONFIG_PREFIX))
            .collect();
        Self::parse(&lines.join("\n"))
    }

    /// Sets the named key to `value`, as a sweep does.
    pub fn set(&mut self, key: &str, value: f64) -> Result<(), CliError> {
        if !SWEEPABLE.contains(&key) {
            return Err(err(0, key, "not a sweepable config key"));
        }
        let text = format!("{key} = {value:e}");
        // Re-use the parser's validation for the single key.
        let single = Self::parse(&text)?;
        match key {
            "gamma_hz" => self.gamma_hz = single.gamma_hz,
            "Gamma_hz" => self.gamma_ac_hz = single.gamma_ac_hz,
            "omega_ac_hz" => self.omega_ac_hz = single.omega_ac_hz,
            "g_over_Gamma" => self.g_over_gamma = single.g_over_gamma,
            "g_tilde_over_Gamma" => self.g_tilde_over_gamma = single.g_tilde_over_gamma,
            "gamma_tilde_hz" => self.gamma_tilde_hz = single.gamma_tilde_hz,
            "n_opt" => self.n_opt = single.n_opt,
            "v_ac_mps" => self.v_ac_mps = single.v_ac_mps,
            "T_m_K" => self.t_m_k = single.t_m_k,
            "k_per_m" | "delta_a_over_Gamma" => self.detuning = single.detuning,
            "delta_a_tilde_over_Gamma" => self.delta_a_tilde_over_gamma = single.delta_a_tilde_over_gamma,
            "tau1_s" => self.tau1_s = single.tau1_s,
            "tau_d_s" => self.tau_d_s = single.tau_d_s,
            "tau2_s" => self.tau2_s = single.tau2_s,
            _ => unreachable!(),
        }
        Ok(())
    }

    /// Physical parameters for the `index`-th write coupling.
    pub fn params(&self, index: usize) -> SystemParams {
        let gamma_ac = TWO_PI * self.gamma_ac_hz;
        let v_opt = SPEED_OF_LIGHT / self.n_opt;
        let k = match self.detuning {
            Detuning::KPerM(k) => k,
            Detuning::DeltaAOverGamma(r) => r * gamma_ac / v_opt,
        };
        SystemParams {
            gamma: TWO_PI * self.gamma_hz,
            gamma_ac,
            omega_ac: TWO_PI * self.omega_ac_hz,
            g: self.g_over_gamma[index] * gamma_ac,
            g_tilde: self.g_tilde_over_gamma * gamma_ac,
            gamma_tilde: self.gamma_tilde_hz.map(|h| TWO_PI * h),
            v_opt,
            v_ac: self.v_ac_mps,
            t_m: self.t_m_k,
            k,
            delta_a_tilde: self.delta_a_tilde_over_gamma.map(|r| r * gamma_ac),
        }
    }

    pub fn timeline(&self) -> Result<ProtocolTimeline, CliError> {
        ProtocolTimeline::new(self.tau1_s, self.tau_d_s, self.tau2_s).map_err(|e| err(0, "tau1_s", e.to_string()))
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances {
            rtol: self.rtol,
            atol: self.atol,
        }
    }

    /// `key = value` lines that reproduce this configuration; frequencies
    /// are recovered in Hz from the internal angular values.
    pub fn resolved_lines(&self, index: usize) -> Vec<String> {
        let p = self.params(index);
        let mut out = Vec::new();
        let mut push = |k: &str, v: String| out.push(format!("{k} = {v}"));
        push("gamma_hz", format!("{:.16e}", p.gamma / TWO_PI));
        push("Gamma_hz", format!("{:.16e}", p.gamma_ac / TWO_PI));
        push("omega_ac_hz", format!("{:.16e}", p.omega_ac / TWO_PI));
        push("g_over_Gamma", format!("{:.16e}", self.g_over_gamma[index]));
        push("g_tilde_over_Gamma", format!("{:.16e}", self.g_tilde_over_gamma));
        if let Some(gt) = p.gamma_tilde {
            push("gamma_tilde_hz", format!("{:.16e}", gt / TWO_PI));
        }
        push("n_opt", format!("{:.16e}", self.n_opt));
        push("v_ac_mps", format!("{:.16e}", p.v_ac));
        push("T_m_K", format!("{:.16e}", p.t_m));
        match self.detuning {
            Detuning::KPerM(k) => push("k_per_m", format!("{k:.16e}")),
            Detuning::DeltaAOverGamma(r) => push("delta_a_over_Gamma", format!("{r:.16e}")),
        }
        if let Some(r) = self.delta_a_tilde_over_gamma {
            push("delta_a_tilde_over_Gamma", format!("{r:.16e}"));
        }
        push("tau1_s", format!("{:.16e}", self.tau1_s));
        push("tau_d_s", format!("{:.16e}", self.tau_d_s));
        push("tau2_s", format!("{:.16e}", self.tau2_s));
        push("seed", self.seed.to_string());
        push("rtol", format!("{:.16e}", self.rtol));
        push("atol", format!("{:.16e}", self.atol));
        push("samples", self.samples.to_string());
        if let Some(t) = self.t_max_s {
            push("t_max_s", format!("{t:.16e}"));
        }
        if let Some(s) = &self.sweep {
            push("sweep_var", s.var.clone());
            push("sweep_min", format!("{:.16e}", s.min));
            push("sweep_max", format!("{:.16e}", s.max));
            push("sweep_count", s.count.to_string());
            push(
                "sweep_spacing",
                match s.spacing {
                    Spacing::Linear => "linear".into(),
                    Spacing::Log => "log".into(),
                },
            );
        }
        push("mc_trajectories", self.mc_trajectories.to_string());
        out
    }

    /// Derived quantities in internal units, for the header.
    pub fn derived_lines(&self, index: usize) -> Vec<String> {
        let p = self.params(index);
        let (da, db) = p.detunings();
        let mut s = String::new();
        let _ = write!(
            s,
            "gamma_rad_s = {:.16e}; Gamma_rad_s = {:.16e}; omega_ac_rad_s = {:.16e}; g_rad_s = {:.16e}; \
             g_tilde_rad_s = {:.16e}; gamma_tilde_rad_s = {:.16e}; v_opt_mps = {:.16e}; k_per_m = {:.16e}; \
             delta_a_rad_s = {:.16e}; delta_b_rad_s = {:.16e}; delta_a_tilde_rad_s = {:.16e}; n_th = {:.16e}",
            p.gamma,
            p.gamma_ac,
            p.omega_ac,
            p.g,
            p.g_tilde,
            p.gamma_tilde(),
            p.v_opt,
            p.k,
            da,
            db,
            p.delta_a_tilde(),
            p.n_th()
        );
        s.split("; ").map(String::from).collect()
    }
}
