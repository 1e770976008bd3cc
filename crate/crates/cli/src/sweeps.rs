//! Sweep tables behind the fidelity and nonclassical-depth plots.

use cvtele::analytics::{
    crossover, crossover_discriminant, depth_threshold_r, depth_transfer_dir, depth_transfer_tel,
    fidelity_cat_dir, fidelity_cat_tel, fidelity_fock_dir, fidelity_fock_tel, fidelity_generic_dir,
    fidelity_generic_tel,
};
use cvtele::{ChannelParams, StateSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::format::{g12, opt, CsvRow};

/// Squeezing values of the reference curves.
pub const DEFAULT_R_VALUES: [f64; 3] = [2.0, 0.7, 0.2];
/// `|α|²` of the cat input and photon number of the Fock input.
pub const DEFAULT_PHOTONS: f64 = 6.0;
pub const DEFAULT_POINTS: usize = 201;
/// Transmittances of the depth-versus-squeezing curves.
pub const DEPTH_T_VALUES: [f64; 5] = [1.0, 0.9, 0.8, 0.7, 0.6];
pub const DEFAULT_R_MAX: f64 = 3.0;
/// Indices of the sampled points re-checked against the Fock-basis oracle.
pub const VALIDATION_SAMPLES: usize = 5;
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-3;

/// `n` evenly spaced points on `[a, b]`, endpoints exact.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n)
        .map(|k| {
            if k == n - 1 {
                b
            } else {
                a + (b - a) * k as f64 / (n - 1) as f64
            }
        })
        .collect()
}

/// Label for a squeezing value in a curve id, e.g. `2.0`, `0.34`.
pub fn r_label(r: f64) -> String {
    format!("{r:?}")
}

fn check_points(points: usize) -> Result<()> {
    if points < 2 {
        return Err(CliError::Config(format!(
            "need at least 2 points, got {points}"
        )));
    }
    Ok(())
}

fn check_r(r: f64) -> Result<()> {
    if !r.is_finite() || r < 0.0 {
        return Err(CliError::Config(format!(
            "squeezing r = {r} must be finite and non-negative"
        )));
    }
    Ok(())
}

fn check_tau(tau: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(CliError::Config(format!(
            "tau_in = {tau} must lie in [0, 1]"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySweepConfig {
    pub r_values: Vec<f64>,
    /// `|α|²` of the odd cat.
    pub cat_photons: f64,
    /// Photon number of the Fock input.
    pub fock_n: usize,
    pub points: usize,
    /// Compare teleportation over `T` with direct transmission over `T`
    /// instead of `T²`.
    pub raw_t: bool,
    pub validate: bool,
    pub cutoff: Option<usize>,
    pub tol: f64,
}

impl Default for FidelitySweepConfig {
    fn default() -> Self {
        Self {
            r_values: DEFAULT_R_VALUES.to_vec(),
            cat_photons: DEFAULT_PHOTONS,
            fock_n: DEFAULT_PHOTONS as usize,
            points: DEFAULT_POINTS,
            raw_t: false,
            validate: false,
            cutoff: None,
            tol: DEFAULT_VALIDATION_TOL,
        }
    }
}

impl FidelitySweepConfig {
    pub fn check(&self) -> Result<()> {
        check_points(self.points)?;
        if self.r_values.is_empty() {
            return Err(CliError::Config("no squeezing values given".into()));
        }
        for &r in &self.r_values {
            check_r(r)?;
        }
        if !(self.cat_photons.is_finite() && self.cat_photons >= 1e-6) {
            return Err(CliError::Config(format!(
                "cat |α|² = {} must be positive",
                self.cat_photons
            )));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(CliError::Config(format!(
                "tolerance {} must be positive",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityRow {
    pub curve_id: String,
    #[serde(rename = "T_direct")]
    pub t_direct: f64,
    pub value: f64,
    pub r: Option<f64>,
    /// Transmittance the channel map is evaluated at.
    #[serde(rename = "T")]
    pub t: f64,
    pub lambda: Option<f64>,
    pub nbar: Option<f64>,
    pub oracle: Option<f64>,
    pub abs_diff: Option<f64>,
}

impl CsvRow for FidelityRow {
    const HEADER: &'static [&'static str] = &[
        "curve_id", "T_direct", "value", "r", "T", "lambda", "nbar", "oracle", "abs_diff",
    ];

    fn record(&self) -> Vec<String> {
        vec![
            self.curve_id.clone(),
            g12(self.t_direct),
            g12(self.value),
            opt(self.r),
            g12(self.t),
            opt(self.lambda),
            opt(self.nbar),
            opt(self.oracle),
            opt(self.abs_diff),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Input {
    Cat,
    Fock,
}

#[derive(Debug, Clone, PartialEq)]
struct Curve {
    id: String,
    input: Input,
    /// `None` for direct transmission.
    r: Option<f64>,
}

fn fidelity_curves(cfg: &FidelitySweepConfig) -> Vec<Curve> {
    let suffix = if cfg.raw_t { "_rawT" } else { "" };
    let mut curves = Vec::new();
    for (input, name) in [(Input::Cat, "cat"), (Input::Fock, "fock")] {
        curves.push(Curve {
            id: format!("{name}_dir{suffix}"),
            input,
            r: None,
        });
        for &r in &cfg.r_values {
            curves.push(Curve {
                id: format!("{name}_tel_r{}{suffix}", r_label(r)),
                input,
                r: Some(r),
            });
        }
    }
    curves
}

/// Fidelity curves against the direct-channel transmittance. Teleportation
/// over two arms of transmittance `T` is compared with direct transmission
/// over `T²`, so each teleportation point uses arm transmittance `√T_direct`.
pub fn fidelity_sweep(cfg: &FidelitySweepConfig) -> Result<Vec<FidelityRow>> {
    cfg.check()?;
    let alpha = Complex64::new(cfg.cat_photons.sqrt(), 0.0);
    let grid = linspace(0.0, 1.0, cfg.points);
    let jobs: Vec<(Curve, usize, f64)> = fidelity_curves(cfg)
        .into_iter()
        .flat_map(|c| {
            grid.iter()
                .enumerate()
                .map(move |(k, &t)| (c.clone(), k, t))
        })
        .collect();
    let sample_every = (cfg.points - 1) / (VALIDATION_SAMPLES - 1).max(1);
    let rows: Vec<Result<FidelityRow>> = jobs
        .par_iter()
        .map(|(curve, k, t_direct)| {
            let sampled = cfg.validate && (k % sample_every.max(1) == 0 || *k == cfg.points - 1);
            fidelity_row(cfg, curve, *t_direct, alpha, sampled)
        })
        .collect();
    rows.into_iter().collect()
}

fn fidelity_row(
    cfg: &FidelitySweepConfig,
    curve: &Curve,
    t_direct: f64,
    alpha: Complex64,
    sampled: bool,
) -> Result<FidelityRow> {
    let spec = match curve.input {
        Input::Cat => StateSpec::Cat { alpha },
        Input::Fock => StateSpec::fock(cfg.fock_n),
    };
    let (value, t, params) = match curve.r {
        None => {
            let v = match curve.input {
                Input::Cat => fidelity_cat_dir(alpha, t_direct)?,
                Input::Fock => fidelity_fock_dir(cfg.fock_n, t_direct)?,
            };
            (v, t_direct, None)
        }
        Some(r) => {
            let arm = if cfg.raw_t { t_direct } else { t_direct.sqrt() };
            let p = ChannelParams::new(r, arm)?;
            let v = match curve.input {
                Input::Cat => fidelity_cat_tel(alpha, &p)?,
                Input::Fock => fidelity_fock_tel(cfg.fock_n, &p),
            };
            (v, arm, Some(p))
        }
    };
    let oracle = if sampled {
        Some(match params {
            Some(p) => fidelity_generic_tel(&spec, &p, cfg.cutoff)?,
            None => fidelity_generic_dir(&spec, t_direct, cfg.cutoff)?,
        })
    } else {
        None
    };
    Ok(FidelityRow {
        curve_id: curve.id.clone(),
        t_direct,
        value,
        r: curve.r,
        t,
        lambda: params.map(|p| p.lambda()),
        nbar: params.map(|p| p.nbar()),
        oracle,
        abs_diff: oracle.map(|o| (o - value).abs()),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DepthSweepConfig {
    pub tau_in: f64,
    pub r_values: Vec<f64>,
    pub t_values: Vec<f64>,
    pub r_max: f64,
    pub points: usize,
    pub families: DepthFamilies,
}

/// Which groups of depth curves to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepthFamilies {
    /// Teleported depth versus squeezing, plus the squeezing threshold versus T.
    pub versus_r: bool,
    /// Teleported, direct and difference depths versus T, with crossover rows.
    pub versus_t: bool,
}

impl Default for DepthSweepConfig {
    fn default() -> Self {
        Self {
            tau_in: 0.5,
            r_values: DEFAULT_R_VALUES.to_vec(),
            t_values: DEPTH_T_VALUES.to_vec(),
            r_max: DEFAULT_R_MAX,
            points: DEFAULT_POINTS,
            families: DepthFamilies {
                versus_r: true,
                versus_t: true,
            },
        }
    }
}

impl DepthSweepConfig {
    /// Depth versus squeezing at `τ_in = 1/2`.
    pub fn figure2() -> Self {
        Self {
            tau_in: 0.5,
            families: DepthFamilies {
                versus_r: true,
                versus_t: false,
            },
            ..Self::default()
        }
    }

    /// Teleportation versus direct transmission at `τ_in = 1`.
    pub fn figure4() -> Self {
        Self {
            tau_in: 1.0,
            families: DepthFamilies {
                versus_r: false,
                versus_t: true,
            },
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        check_points(self.points)?;
        check_tau(self.tau_in)?;
        check_r(self.r_max)?;
        for &r in &self.r_values {
            check_r(r)?;
        }
        for &t in &self.t_values {
            if !(0.0..=1.0).contains(&t) {
                return Err(CliError::Config(format!(
                    "transmittance {t} must lie in [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DepthRow {
    pub curve_id: String,
    pub tau_in: Option<f64>,
    pub r: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub value: f64,
}

impl CsvRow for DepthRow {
    const HEADER: &'static [&'static str] = &["curve_id", "tau_in", "r", "T", "value"];

    fn record(&self) -> Vec<String> {
        vec![
            self.curve_id.clone(),
            opt(self.tau_in),
            opt(self.r),
            opt(self.t),
            g12(self.value),
        ]
    }
}

fn row(
    curve_id: String,
    tau_in: Option<f64>,
    r: Option<f64>,
    t: Option<f64>,
    value: f64,
) -> DepthRow {
    DepthRow {
        curve_id,
        tau_in,
        r,
        t,
        value,
    }
}

/// `−½ ln(1 − 2√(τ(1−τ)))`: the squeezing above which a crossover window
/// exists for input depth `τ ≥ 1/2`.
pub fn crossover_bound(tau_in: f64) -> f64 {
    -0.5 * (-2.0 * (tau_in * (1.0 - tau_in)).sqrt()).ln_1p()
}

/// Depth curves. Curve ids:
///
/// * `tau_tel_T<T>`: teleported depth against `r`
/// * `r_threshold`: smallest squeezing with surviving depth, against `T`
/// * `tau_tel_r<r>`, `tau_dir_r<r>`, `tau_diff_r<r>`: against arm
///   transmittance `T`, the direct channel taken over `T²`
/// * `crossover_flag_r<r>`: 1 if a crossover window exists, else 0;
///   `window_lo_r<r>` / `window_hi_r<r>` give its ends when it does
/// * `crossover_bound`: [`crossover_bound`] against `τ_in ∈ [1/2, 1]`
pub fn depth_sweep(cfg: &DepthSweepConfig) -> Result<Vec<DepthRow>> {
    cfg.check()?;
    let tau = cfg.tau_in;
    let t_grid = linspace(0.0, 1.0, cfg.points);
    let mut rows = Vec::new();

    if cfg.families.versus_r {
        let r_grid = linspace(0.0, cfg.r_max, cfg.points);
        for &t in &cfg.t_values {
            for &r in &r_grid {
                let p = ChannelParams::new(r, t)?;
                rows.push(row(
                    format!("tau_tel_T{}", r_label(t)),
                    Some(tau),
                    Some(r),
                    Some(t),
                    depth_transfer_tel(tau, &p),
                ));
            }
        }
        for &t in &t_grid {
            rows.push(row(
                "r_threshold".into(),
                Some(tau),
                None,
                Some(t),
                depth_threshold_r(tau, t)?,
            ));
        }
    }

    if cfg.families.versus_t {
        for &r in &cfg.r_values {
            let label = r_label(r);
            for &t in &t_grid {
                let p = ChannelParams::new(r, t)?;
                let tel = depth_transfer_tel(tau, &p);
                let dir = depth_transfer_dir(tau, t * t);
                rows.push(row(
                    format!("tau_tel_r{label}"),
                    Some(tau),
                    Some(r),
                    Some(t),
                    tel,
                ));
                rows.push(row(
                    format!("tau_dir_r{label}"),
                    Some(tau),
                    Some(r),
                    Some(t),
                    dir,
                ));
                rows.push(row(
                    format!("tau_diff_r{label}"),
                    Some(tau),
                    Some(r),
                    Some(t),
                    tel - dir,
                ));
            }
        }
        for &r in &cfg.r_values {
            let label = r_label(r);
            let window = crossover(tau, r);
            rows.push(row(
                format!("crossover_flag_r{label}"),
                Some(tau),
                Some(r),
                None,
                f64::from(u8::from(window.is_some())),
            ));
            if let Some(w) = window {
                rows.push(row(
                    format!("window_lo_r{label}"),
                    Some(tau),
                    Some(r),
                    Some(w.t_lo),
                    w.t_lo,
                ));
                rows.push(row(
                    format!("window_hi_r{label}"),
                    Some(tau),
                    Some(r),
                    Some(w.t_hi),
                    w.t_hi,
                ));
            }
        }
        for &t in &linspace(0.5, 1.0, cfg.points) {
            rows.push(row(
                "crossover_bound".into(),
                Some(t),
                None,
                None,
                crossover_bound(t),
            ));
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverConfig {
    pub tau_values: Vec<f64>,
    pub r_values: Vec<f64>,
}

impl CrossoverConfig {
    pub fn grid(
        tau_in: Option<f64>,
        r: Option<f64>,
        tau_points: usize,
        r_max: f64,
        r_points: usize,
    ) -> Result<Self> {
        let tau_values = match tau_in {
            Some(t) => vec![t],
            None => {
                check_points(tau_points)?;
                linspace(0.0, 1.0, tau_points)
            }
        };
        let r_values = match r {
            Some(r) => vec![r],
            None => {
                check_points(r_points)?;
                check_r(r_max)?;
                linspace(0.0, r_max, r_points)
            }
        };
        let cfg = Self {
            tau_values,
            r_values,
        };
        for &t in &cfg.tau_values {
            check_tau(t)?;
        }
        for &r in &cfg.r_values {
            check_r(r)?;
        }
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossoverRow {
    pub tau_in: f64,
    pub r: f64,
    pub exists: bool,
    #[serde(rename = "T_lo")]
    pub t_lo: Option<f64>,
    #[serde(rename = "T_hi")]
    pub t_hi: Option<f64>,
    pub disc: f64,
}

impl CsvRow for CrossoverRow {
    const HEADER: &'static [&'static str] = &["tau_in", "r", "exists", "T_lo", "T_hi", "disc"];

    fn record(&self) -> Vec<String> {
        vec![
            g12(self.tau_in),
            g12(self.r),
            self.exists.to_string(),
            opt(self.t_lo),
            opt(self.t_hi),
            g12(self.disc),
        ]
    }
}

pub fn crossover_table(cfg: &CrossoverConfig) -> Vec<CrossoverRow> {
    let mut rows = Vec::with_capacity(cfg.tau_values.len() * cfg.r_values.len());
    for &tau in &cfg.tau_values {
        for &r in &cfg.r_values {
            let w = crossover(tau, r);
            rows.push(CrossoverRow {
                tau_in: tau,
                r,
                exists: w.is_some(),
                t_lo: w.map(|w| w.t_lo),
                t_hi: w.map(|w| w.t_hi),
                disc: crossover_discriminant(tau, r),
            });
        }
    }
    rows
}
