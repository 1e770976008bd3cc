//! s-ordered quasiprobabilities on grids, Gaussian smoothing, closed-form
//! R-functions and numeric nonclassical-depth estimation.
//!
//! Phase-space points are `α = x + i p`, so `x = Re α`, `p = Im α`, and
//! densities integrate to one against `dx dp`. The order convention is
//! `s = 1` for P, `s = 1/2` for Wigner and `s = 0` for Q; the R-function at
//! smoothing `τ` is the `s = 1 − τ` quasiprobability.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{displacement_elements, DensityMatrix, StateSpec};
use crate::special::ln_factorials;

/// Values above this floor count as non-negative in depth tests.
pub const POSITIVITY_FLOOR: f64 = -1e-9;
/// Smallest tolerance accepted by [`depth_estimate`].
pub const MIN_DEPTH_TOLERANCE: f64 = 1e-4;
const SUPPORT_THRESHOLD: f64 = 1e-8;
const SERIES_TOLERANCE: f64 = 1e-14;

/// Ordering of a sampled quasiprobability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Order {
    /// s-ordered, `s < 1`.
    S(f64),
    /// Gaussian smoothing `τ` of the P-function.
    Smoothing(f64),
}

impl Order {
    /// Equivalent smoothing `τ = 1 − s`.
    pub fn smoothing(&self) -> f64 {
        match *self {
            Order::S(s) => 1.0 - s,
            Order::Smoothing(t) => t,
        }
    }

    fn smoothed(self, v: f64) -> Order {
        match self {
            Order::S(s) => Order::S(s - v),
            Order::Smoothing(t) => Order::Smoothing(t + v),
        }
    }
}

/// Uniform rectangular grid over `x = Re α`, `p = Im α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub p_min: f64,
    pub p_max: f64,
    pub nx: usize,
    pub np: usize,
}

impl GridSpec {
    pub fn new(
        x_min: f64,
        x_max: f64,
        p_min: f64,
        p_max: f64,
        nx: usize,
        np: usize,
    ) -> Result<Self> {
        let spec = Self {
            x_min,
            x_max,
            p_min,
            p_max,
            nx,
            np,
        };
        if x_min >= x_max || p_min >= p_max || nx < 2 || np < 2 {
            return Err(Error::GridTooSmall(format!("degenerate grid {spec:?}")));
        }
        if ![x_min, x_max, p_min, p_max].iter().all(|v| v.is_finite()) {
            return Err(Error::GridTooSmall(format!(
                "non-finite grid bounds {spec:?}"
            )));
        }
        Ok(spec)
    }

    /// Square grid `[−half, half]²` with `n` points per axis.
    pub fn square(half_width: f64, n: usize) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width, n, n)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    pub fn alpha(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.x(i), self.p(j))
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dp()
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A quasiprobability sampled on a [`GridSpec`], stored row-major with `x`
/// as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiprobGrid {
    spec: GridSpec,
    values: Vec<f64>,
    order: Order,
}

impl QuasiprobGrid {
    pub fn new(spec: GridSpec, values: Vec<f64>, order: Order) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::GridTooSmall(format!(
                "{} values for a {}x{} grid",
                values.len(),
                spec.nx,
                spec.np
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::GridTooSmall(format!("non-finite grid value {v}")));
        }
        Ok(Self {
            spec,
            values,
            order,
        })
    }

    /// Samples `f(α)` at every grid point.
    pub fn from_fn<F>(spec: GridSpec, order: Order, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> f64 + Sync,
    {
        let values: Vec<f64> = (0..spec.len())
            .into_par_iter()
            .map(|k| f(spec.alpha(k / spec.np, k % spec.np)))
            .collect();
        Self::new(spec, values, order)
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.spec.np + j]
    }

    /// Riemann sum times cell area.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.spec.cell_area()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diff(&self, other: &QuasiprobGrid) -> Result<f64> {
        if self.spec != other.spec {
            return Err(Error::GridTooSmall("grids differ".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Convolves with `e^{−|α−β|²/v}/(πv)`, i.e. adds smoothing `v`.
///
/// The kernel is applied separably along each axis with weights
/// renormalized to sum to one on the lattice. Fails with
/// [`Error::GridTooSmall`] when the significant support of the input,
/// widened by `5√v`, leaves the grid.
pub fn smooth(grid: &QuasiprobGrid, extra_variance: f64) -> Result<QuasiprobGrid> {
    if !extra_variance.is_finite() || extra_variance <= 0.0 {
        return Err(Error::InvalidTau(extra_variance));
    }
    let spec = grid.spec;
    check_support(grid, 5.0 * extra_variance.sqrt())?;

    let kx = lattice_kernel(spec.dx(), extra_variance);
    let kp = lattice_kernel(spec.dp(), extra_variance);
    let (nx, np) = (spec.nx, spec.np);

    let mut along_p = vec![0.0; nx * np];
    along_p
        .par_chunks_mut(np)
        .enumerate()
        .for_each(|(i, row)| convolve_line(&grid.values[i * np..(i + 1) * np], &kp, row));

    let mut out = vec![0.0; nx * np];
    let columns: Vec<Vec<f64>> = (0..np)
        .into_par_iter()
        .map(|j| {
            let col: Vec<f64> = (0..nx).map(|i| along_p[i * np + j]).collect();
            let mut res = vec![0.0; nx];
            convolve_line(&col, &kx, &mut res);
            res
        })
        .collect();
    for (j, col) in columns.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            out[i * np + j] = *v;
        }
    }
    QuasiprobGrid::new(spec, out, grid.order.smoothed(extra_variance))
}

fn check_support(grid: &QuasiprobGrid, margin: f64) -> Result<()> {
    let spec = grid.spec;
    let peak = grid.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Ok(());
    }
    let (mut i0, mut i1, mut j0, mut j1) = (usize::MAX, 0, usize::MAX, 0);
    for i in 0..spec.nx {
        for j in 0..spec.np {
            if grid.get(i, j).abs() > SUPPORT_THRESHOLD * peak {
                i0 = i0.min(i);
                i1 = i1.max(i);
                j0 = j0.min(j);
                j1 = j1.max(j);
            }
        }
    }
    let fits = spec.x(i0) - margin >= spec.x_min
        && spec.x(i1) + margin <= spec.x_max
        && spec.p(j0) - margin >= spec.p_min
        && spec.p(j1) + margin <= spec.p_max;
    if !fits {
        return Err(Error::GridTooSmall(format!(
            "support [{:.3}, {:.3}] x [{:.3}, {:.3}] plus margin {margin:.3} exceeds the grid",
            spec.x(i0),
            spec.x(i1),
            spec.p(j0),
            spec.p(j1)
        )));
    }
    Ok(())
}

// One-dimensional weights h·e^{−d²/v}/√(πv) over offsets −K..=K, summing to one.
fn lattice_kernel(h: f64, v: f64) -> Vec<f64> {
    let half = (8.0 * v.sqrt() / h).ceil() as usize;
    let w: Vec<f64> = (0..=2 * half)
        .map(|k| {
            let d = (k as f64 - half as f64) * h;
            (-d * d / v).exp()
        })
        .collect();
    let total: f64 = w.iter().sum();
    w.into_iter().map(|x| x / total).collect()
}

fn convolve_line(input: &[f64], kernel: &[f64], out: &mut [f64]) {
    let n = input.len() as isize;
    let half = (kernel.len() / 2) as isize;
    for (i, o) in out.iter_mut().enumerate() {
        let i = i as isize;
        let mut acc = 0.0;
        for (k, w) in kernel.iter().enumerate() {
            let src = i + k as isize - half;
            if (0..n).contains(&src) {
                acc += w * input[src as usize];
            }
        }
        *o = acc;
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !tau.is_finite() || tau <= 0.0 {
        return Err(Error::InvalidTau(tau));
    }
    Ok(())
}

// Coefficients of q(u) = Σ_k C(n,k) (τ−1)^{n−k} u^k / k!, so that the Fock
// R-function is e^{−u} q(u) / (π τ^{n+1}) with u = |α|²/τ.
fn fock_poly(n: usize, tau: f64) -> Vec<f64> {
    let lf = ln_factorials(n + 1);
    (0..=n)
        .map(|k| {
            let binom_over_kfact = (lf[n] - lf[k] - lf[n - k] - lf[k]).exp();
            binom_over_kfact * (tau - 1.0).powi((n - k) as i32)
        })
        .collect()
}

fn poly_eval(coeffs: &[f64], u: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * u + c)
}

/// R-function of the Fock state `|n⟩`:
///
/// ```text
/// R(α, τ) = e^{−|α|²/τ} / (π τ^{n+1}) · Σ_k C(n,k) (τ−1)^{n−k} (|α|²/τ)^k / k!
///         = (1/(πτ)) ((τ−1)/τ)ⁿ e^{−|α|²/τ} Lₙ(|α|²/(τ(1−τ)))
/// ```
///
/// The sum form has no singularity at `τ = 1`.
pub fn r_function_fock(n: usize, tau: f64, alpha: Complex64) -> Result<f64> {
    check_tau(tau)?;
    let u = alpha.norm_sqr() / tau;
    let q = poly_eval(&fock_poly(n, tau), u);
    Ok((-u).exp() * q / (PI * tau.powi(n as i32 + 1)))
}

/// Infimum over the phase plane of [`r_function_fock`].
///
/// The function is radial and vanishes as `|α| → ∞`; otherwise its extremes
/// over `u ≥ 0` sit at `u = 0` or at a real root of `q' − q`, found from
/// companion-matrix eigenvalues and refined by Newton steps.
pub fn r_function_fock_min(n: usize, tau: f64) -> Result<f64> {
    check_tau(tau)?;
    let q = fock_poly(n, tau);
    let scale = PI * tau.powi(n as i32 + 1);
    let f = |u: f64| (-u).exp() * poly_eval(&q, u) / scale;
    let mut best = f(0.0).min(0.0);
    if n == 0 {
        return Ok(best);
    }
    // g = q' − q, degree n with leading coefficient −1/n!
    let mut g: Vec<f64> = (0..=n)
        .map(|k| {
            let dq = if k < n {
                (k + 1) as f64 * q[k + 1]
            } else {
                0.0
            };
            dq - q[k]
        })
        .collect();
    let lead = g[n];
    for c in g.iter_mut() {
        *c /= lead;
    }
    let dg: Vec<f64> = (1..=n).map(|k| k as f64 * g[k]).collect();
    let mut companion = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        companion[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        companion[(i, n - 1)] = -g[i];
    }
    for root in companion.complex_eigenvalues().iter() {
        let mut u = root.re;
        for _ in 0..4 {
            let d = poly_eval(&dg, u);
            if d == 0.0 {
                break;
            }
            let step = poly_eval(&g, u) / d;
            if !step.is_finite() {
                break;
            }
            u -= step;
        }
        if u > 0.0 && u.is_finite() {
            best = best.min(f(u));
        }
    }
    Ok(best)
}

/// P-level Gaussian: mean, principal variances and the angle of the
/// `cov_minus` axis. Smoothing `τ` adds `τ` to both variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianStateParams {
    pub mean: Complex64,
    pub cov_plus: f64,
    pub cov_minus: f64,
    pub orientation: f64,
}

impl GaussianStateParams {
    pub fn coherent(alpha: Complex64) -> Self {
        Self {
            mean: alpha,
            cov_plus: 0.0,
            cov_minus: 0.0,
            orientation: 0.0,
        }
    }

    pub fn thermal(mean_photons: f64) -> Self {
        Self {
            mean: Complex64::new(0.0, 0.0),
            cov_plus: mean_photons,
            cov_minus: mean_photons,
            orientation: 0.0,
        }
    }

    /// `S(ξ)|0⟩`: variances `(e^{2r} − 1)/2` and `−(1 − e^{−2r})/2`, the
    /// squeezed axis at angle `arg(ξ)/2`.
    pub fn squeezed_vacuum(xi: Complex64) -> Self {
        let r = xi.norm();
        Self {
            mean: Complex64::new(0.0, 0.0),
            cov_plus: 0.5 * (2.0 * r).exp_m1(),
            cov_minus: 0.5 * (-2.0 * r).exp_m1(),
            orientation: 0.5 * xi.arg(),
        }
    }

    pub fn from_spec(spec: &StateSpec) -> Result<Self> {
        spec.validate()?;
        match *spec {
            StateSpec::Coherent { alpha } => Ok(Self::coherent(alpha)),
            StateSpec::Thermal { mean_photons } => Ok(Self::thermal(mean_photons)),
            StateSpec::SqueezedVacuum { xi } => Ok(Self::squeezed_vacuum(xi)),
            StateSpec::Fock { n: 0 } => Ok(Self::coherent(Complex64::new(0.0, 0.0))),
            other => Err(Error::UnsupportedSpec(format!("{other:?} is not Gaussian"))),
        }
    }

    /// Pure loss: mean scales by `√T`, variances by `T`.
    pub fn after_loss(&self, t: f64) -> Self {
        Self {
            mean: self.mean * t.sqrt(),
            cov_plus: self.cov_plus * t,
            cov_minus: self.cov_minus * t,
            orientation: self.orientation,
        }
    }

    /// Teleportation: both variances gain `n̄`.
    pub fn after_teleport(&self, nbar: f64) -> Self {
        Self {
            cov_plus: self.cov_plus + nbar,
            cov_minus: self.cov_minus + nbar,
            ..*self
        }
    }

    /// Smallest smoothing at which the R-function is a finite Gaussian.
    pub fn depth(&self) -> f64 {
        (-self.cov_minus).max(0.0)
    }
}

/// Gaussian R-function
/// `exp(−u²/(τ+c₊) − v²/(τ+c₋)) / (π √((τ+c₊)(τ+c₋)))`, with `(u, v)` the
/// offset from the mean along the principal axes.
pub fn r_function_gaussian(gauss: &GaussianStateParams, tau: f64, alpha: Complex64) -> Result<f64> {
    check_tau(tau)?;
    let a = tau + gauss.cov_plus;
    let b = tau + gauss.cov_minus;
    if b <= 0.0 || a <= 0.0 {
        return Err(Error::NotRepresentable(b.min(a)));
    }
    let d = (alpha - gauss.mean) * Complex64::from_polar(1.0, -gauss.orientation);
    // d.re lies along the cov_minus axis
    let (v, u) = (d.re, d.im);
    Ok((-u * u / a - v * v / b).exp() / (PI * (a * b).sqrt()))
}

fn nonnegative_at(spec: &StateSpec, tau: f64) -> Result<bool> {
    match *spec {
        StateSpec::Fock { n } => Ok(r_function_fock_min(n, tau)? >= POSITIVITY_FLOOR),
        StateSpec::Cat { .. } => Err(Error::UnsupportedSpec(
            "cat states have no closed-form R-function here; their depth is 1".into(),
        )),
        _ => {
            let g = GaussianStateParams::from_spec(spec)?;
            Ok(tau + g.cov_minus > 0.0 && tau + g.cov_plus > 0.0)
        }
    }
}

/// Smallest `τ` such that the R-function of `spec` at total smoothing
/// `τ + effective_smoothing` is non-negative everywhere, to within `tol`.
pub fn depth_estimate(spec: &StateSpec, effective_smoothing: f64, tol: f64) -> Result<f64> {
    if !tol.is_finite() || tol < MIN_DEPTH_TOLERANCE {
        return Err(Error::InvalidTolerance(tol));
    }
    if !effective_smoothing.is_finite() || effective_smoothing < 0.0 {
        return Err(Error::InvalidTau(effective_smoothing));
    }
    spec.validate()?;
    let probe = (0.25 * tol).min(1e-6);
    if nonnegative_at(spec, probe + effective_smoothing)? {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (probe, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if nonnegative_at(spec, mid + effective_smoothing)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((0.5 * (lo + hi)).clamp(0.0, 1.0))
}

/// `W^{(s)}(α) = Σ_k (s/(s−1))^k ⟨k|D†(α) ρ D(α)|k⟩ / (π(1−s))`, sampled on
/// `grid`. The series converges for `s < 1/2`.
pub fn quasiprob_from_density(
    rho: &DensityMatrix,
    s: f64,
    grid: &GridSpec,
) -> Result<QuasiprobGrid> {
    if !s.is_finite() || s >= 0.5 {
        return Err(Error::OrderOutOfRange(s));
    }
    let ratio = s / (s - 1.0);
    let terms = if ratio == 0.0 {
        1
    } else {
        ((SERIES_TOLERANCE.ln() / ratio.abs().ln()).ceil() as usize).max(1)
    };
    let weights: Vec<f64> = (0..terms as i32).map(|k| ratio.powi(k)).collect();
    let d = rho.dim();
    let m = rho.matrix();
    let prefactor = 1.0 / (PI * (1.0 - s));
    QuasiprobGrid::from_fn(*grid, Order::S(s), |alpha| {
        let b = displacement_elements(alpha, d, terms);
        let rb = m * &b;
        let mut acc = 0.0;
        for (k, w) in weights.iter().enumerate() {
            let mut diag = Complex64::new(0.0, 0.0);
            for i in 0..d {
                diag += b[(i, k)].conj() * rb[(i, k)];
            }
            acc += w * diag.re;
        }
        prefactor * acc
    })
}
