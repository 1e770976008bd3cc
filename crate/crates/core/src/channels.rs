//! The lossy teleportation channel and the direct-transmission (pure loss)
//! channel, each as a Fock-basis map, plus the per-outcome reduction and the
//! position-basis kernel of the teleportation map.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{
    default_dim, displaced_thermal, displacement_real, trace_distance, ComplexMatrix, DensityMatrix,
};
use crate::quadrature::{gauss_laguerre_log, gauss_legendre};
use crate::special::ln_factorials;

pub(crate) fn check_transmittance(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidTransmittance(t));
    }
    Ok(())
}

/// Two-mode squeezing `r` and per-arm transmittance `T`, with the derived
/// channel scalars.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    r: f64,
    t: f64,
}

impl ChannelParams {
    pub fn new(r: f64, t: f64) -> Result<Self> {
        if !r.is_finite() || r < 0.0 {
            return Err(Error::InvalidSqueezing(r));
        }
        check_transmittance(t)?;
        Ok(Self { r, t })
    }

    /// Parameters from `λ = tanh r` directly.
    pub fn from_lambda(lambda: f64, t: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&lambda) {
            return Err(Error::InvalidSqueezing(lambda));
        }
        Self::new(lambda.atanh(), t)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn lambda(&self) -> f64 {
        self.r.tanh()
    }

    /// Loss exponent `g = −ln T`.
    pub fn g(&self) -> f64 {
        -self.t.ln()
    }

    /// Thermal photon number injected by the channel, `1 − (1 − e^{−2r}) T`.
    pub fn nbar(&self) -> f64 {
        nbar_at(self.r, self.t)
    }

    /// Same quantity through `1 − 2λT/(1+λ)`.
    pub fn nbar_from_lambda(&self) -> f64 {
        let l = self.lambda();
        1.0 - 2.0 * l * self.t / (1.0 + l)
    }

    /// `1 + 2λT/(1−λ)`: the `λ → −λ` partner of [`Self::nbar_from_lambda`].
    pub fn nbar_minus(&self) -> f64 {
        let l = self.lambda();
        1.0 + 2.0 * l * self.t / (1.0 - l)
    }

    /// Thermal photon number of a single-outcome output,
    /// `λ²T(1−T)/(1−λ²(1−T))`.
    pub fn ntilde(&self) -> f64 {
        let l2 = self.lambda().powi(2);
        l2 * self.t * (1.0 - self.t) / (1.0 - l2 * (1.0 - self.t))
    }

    fn outcome_denominator(&self) -> f64 {
        1.0 - self.lambda().powi(2) * (1.0 - self.t)
    }
}

/// `n̄ = 1 − (1 − e^{−2r}) T`.
pub fn nbar_at(r: f64, t: f64) -> f64 {
    1.0 + (-2.0 * r).exp_m1() * t
}

/// Alice's joint quadrature outcome; `μ = (x + ip)/√2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome {
    pub x: f64,
    pub p: f64,
}

impl MeasurementOutcome {
    pub fn new(x: f64, p: f64) -> Self {
        Self { x, p }
    }

    pub fn from_mu(mu: Complex64) -> Self {
        Self {
            x: mu.re * std::f64::consts::SQRT_2,
            p: mu.im * std::f64::consts::SQRT_2,
        }
    }

    pub fn mu(&self) -> Complex64 {
        Complex64::new(self.x, self.p) * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Pure-loss map with transmittance `T`:
/// `ρ'_{mn} = Σ_k √(C(m+k,k) C(n+k,k)) T^{(m+n)/2} (1−T)^k ρ_{m+k,n+k}`.
pub fn loss_map(rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    check_transmittance(t)?;
    let d = rho.dim();
    let lf = ln_factorials(d);
    let st = t.sqrt();
    let sl = (1.0 - t).sqrt();
    // amp[m][k] = √C(m+k,k) T^{m/2} (1−T)^{k/2}, m + k < d
    let mut amp = vec![vec![0.0; d]; d];
    for m in 0..d {
        for k in 0..d - m {
            let binom = (0.5 * (lf[m + k] - lf[m] - lf[k])).exp();
            amp[m][k] = binom * st.powi(m as i32) * sl.powi(k as i32);
        }
    }
    let src = rho.matrix();
    let mut out = ComplexMatrix::zeros(d, d);
    for m in 0..d {
        for n in 0..d {
            let kmax = d - m.max(n);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..kmax {
                acc += src[(m + k, n + k)] * (amp[m][k] * amp[n][k]);
            }
            out[(m, n)] = acc;
        }
    }
    DensityMatrix::from_matrix_unchecked(out)
}

/// Direct transmission through the loss channel; identical to [`loss_map`].
pub fn direct_transmit(rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    loss_map(rho, t)
}

/// Controls for the displacement quadrature in [`teleport_average_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Starting radial node count; `None` uses the cutoff.
    pub initial_nodes: Option<usize>,
    pub max_nodes: usize,
    /// Trace-distance change between successive refinements that counts as converged.
    pub tolerance: f64,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            initial_nodes: None,
            max_nodes: 1024,
            tolerance: 1e-5,
        }
    }
}

/// Averaged teleportation output: the additive Gaussian noise channel
/// `∫ d²β e^{−|β|²/n̄}/(π n̄) D(β) ρ D†(β)`.
pub fn teleport_average(rho_in: &DensityMatrix, params: &ChannelParams) -> Result<DensityMatrix> {
    teleport_average_with(rho_in, params, &QuadratureOptions::default())
}

/// [`teleport_average`] with explicit quadrature controls.
///
/// The angular integral is done exactly: `⟨m|D(β)|j⟩ ∝ e^{i(m−j)φ}`, so the
/// average over the phase of β keeps only terms with `m − j = n − k`. The
/// radial integral uses Gauss–Laguerre nodes in `v = (1+n̄)|β|²/n̄`, which is
/// exact once the node count reaches the cutoff; the node count doubles until
/// two successive results agree in trace distance.
pub fn teleport_average_with(
    rho_in: &DensityMatrix,
    params: &ChannelParams,
    opts: &QuadratureOptions,
) -> Result<DensityMatrix> {
    let d = rho_in.dim();
    let nbar = params.nbar();
    let required = default_dim(rho_in.mean_photons() + nbar);
    if required > d {
        return Err(Error::CutoffTooSmall {
            dim: d,
            required,
            reason: format!("output mean photon number plus noise {nbar:.4} needs a larger cutoff"),
        });
    }

    let entries: Vec<(usize, usize, Complex64)> = (0..d)
        .flat_map(|j| (0..d).map(move |k| (j, k)))
        .map(|(j, k)| (j, k, rho_in.get(j, k)))
        .filter(|&(_, _, z)| z != Complex64::new(0.0, 0.0))
        .collect();

    let mut nodes = opts.initial_nodes.unwrap_or(d).max(4);
    let mut prev = gaussian_noise_pass(&entries, d, nbar, nodes);
    let mut last_change = f64::INFINITY;
    while nodes * 2 <= opts.max_nodes {
        nodes *= 2;
        let next = gaussian_noise_pass(&entries, d, nbar, nodes);
        let change = trace_distance(&prev, &next)?;
        prev = next;
        last_change = change;
        if change <= opts.tolerance {
            break;
        }
    }
    if last_change > opts.tolerance {
        return Err(Error::QuadratureNotConverged(last_change));
    }

    let leak = (prev.trace() - rho_in.trace()).abs();
    if leak > 1e-6 {
        return Err(Error::CutoffTooSmall {
            dim: d,
            required: required.max(d + 1),
            reason: format!("teleported state loses trace {leak:e} past the cutoff"),
        });
    }
    Ok(prev)
}

fn gaussian_noise_pass(
    entries: &[(usize, usize, Complex64)],
    d: usize,
    nbar: f64,
    nodes: usize,
) -> DensityMatrix {
    let (v, logw) = gauss_laguerre_log(nodes);
    let mut out = ComplexMatrix::zeros(d, d);
    for (&vi, &lw) in v.iter().zip(&logw) {
        let u = vi / (1.0 + nbar);
        let weight = (lw + nbar * u).exp() / (1.0 + nbar);
        if weight < 1e-22 {
            continue;
        }
        let disp = displacement_real((nbar * u).sqrt(), d, d);
        for &(j, k, z) in entries {
            let c = z * weight;
            let delta = k as isize - j as isize;
            let lo = 0.max(-delta) as usize;
            let hi = (d as isize).min(d as isize - delta) as usize;
            for m in lo..hi {
                let n = (m as isize + delta) as usize;
                out[(m, n)] += c * (disp[(m, j)] * disp[(n, k)]);
            }
        }
    }
    DensityMatrix::from_matrix_unchecked(out).expect("square by construction")
}

/// Bob's corrected state for coherent input `α_in` and outcome `μ`:
/// the displaced thermal state `D(μ') ρ_ñ D†(μ')` with
/// `μ' = μ + λT(α − μ)/(1 − λ²(1−T))`.
pub fn teleport_outcome(
    alpha_in: Complex64,
    outcome: &MeasurementOutcome,
    params: &ChannelParams,
    dim: usize,
) -> Result<DensityMatrix> {
    let center = outcome_center(alpha_in, outcome, params);
    let nt = params.ntilde();
    let required = default_dim(center.norm_sqr() + nt);
    if required > dim {
        return Err(Error::CutoffTooSmall {
            dim,
            required,
            reason: format!("displaced thermal state at |μ'| = {:.4}", center.norm()),
        });
    }
    Ok(displaced_thermal(center, nt, dim))
}

/// Displacement `μ'` of the single-outcome output state.
pub fn outcome_center(
    alpha_in: Complex64,
    outcome: &MeasurementOutcome,
    params: &ChannelParams,
) -> Complex64 {
    let mu = outcome.mu();
    let k = params.lambda() * params.t() / params.outcome_denominator();
    mu + (alpha_in - mu) * k
}

/// Outcome probability density `P(x, p)` for coherent input `α_in`
/// (normalized against `dx dp`).
pub fn outcome_density(
    alpha_in: Complex64,
    outcome: &MeasurementOutcome,
    params: &ChannelParams,
) -> f64 {
    let l2 = params.lambda().powi(2);
    let den = params.outcome_denominator();
    let c = (1.0 - l2) / den;
    c / (2.0 * PI) * (-c * (alpha_in - outcome.mu()).norm_sqr()).exp()
}

/// Disk-shaped outcome grid for [`average_over_outcomes`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeGrid {
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    /// Disk radius in μ; `None` picks `√(25/c)` where `c` is the Gaussian
    /// rate of the outcome density, leaving `e^{−25}` of the mass outside.
    pub radius: Option<f64>,
}

impl Default for OutcomeGrid {
    fn default() -> Self {
        Self {
            radial_nodes: 40,
            angular_nodes: 48,
            radius: None,
        }
    }
}

/// `∫ dx dp P(x,p) ρ_out(x,p)` for coherent input, by quadrature over a disk
/// of outcomes centered on `α_in` (Gauss–Legendre in radius, trapezoid in
/// angle). Summation order is fixed, so the result does not depend on the
/// thread schedule.
pub fn average_over_outcomes(
    alpha_in: Complex64,
    params: &ChannelParams,
    dim: usize,
    grid: &OutcomeGrid,
) -> Result<DensityMatrix> {
    let l2 = params.lambda().powi(2);
    let rate = (1.0 - l2) / params.outcome_denominator();
    let radius = grid.radius.unwrap_or_else(|| (25.0 / rate).sqrt());
    let radial = gauss_legendre(grid.radial_nodes, 0.0, radius);
    let dphi = 2.0 * PI / grid.angular_nodes as f64;

    let points: Vec<(Complex64, f64)> = radial
        .nodes
        .iter()
        .zip(&radial.weights)
        .flat_map(|(&rho, &w)| {
            (0..grid.angular_nodes).map(move |k| {
                let phi = k as f64 * dphi;
                (Complex64::from_polar(rho, phi), w * rho * dphi)
            })
        })
        .collect();

    let terms: Vec<Result<ComplexMatrix>> = points
        .par_iter()
        .map(|&(offset, area)| {
            let outcome = MeasurementOutcome::from_mu(alpha_in + offset);
            // dx dp = 2 d²μ
            let weight = 2.0 * area * outcome_density(alpha_in, &outcome, params);
            let state = teleport_outcome(alpha_in, &outcome, params, dim)?;
            Ok(state.into_matrix().scale(weight))
        })
        .collect();

    let mut acc = ComplexMatrix::zeros(dim, dim);
    for term in terms {
        acc += term?;
    }
    DensityMatrix::from_matrix_unchecked(acc)
}

/// Prefactor convention for [`kernel_g_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelPrefactor {
    /// `1/(2π² √(n̄_{λT} n̄_{−λT}))`; reduces to `1/(2π²)` at `T = 1`.
    #[default]
    Symmetric,
    /// `1/(2π² n̄_{λT})`, the literal `√(n̄_{λT} n̄_{λT})` reading.
    Literal,
}

/// Position-basis arguments of the teleportation kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelArgs {
    pub y1: f64,
    pub y2: f64,
    pub z1: f64,
    pub z2: f64,
}

impl KernelArgs {
    pub fn new(y1: f64, y2: f64, z1: f64, z2: f64) -> Self {
        Self { y1, y2, z1, z2 }
    }
}

/// Kernel `G(y₁, y₂, z₁, z₂)` of the teleportation map in the position basis,
/// with the symmetric prefactor.
pub fn kernel_g(args: &KernelArgs, params: &ChannelParams) -> f64 {
    kernel_g_with(args, params, KernelPrefactor::Symmetric)
}

pub fn kernel_g_with(args: &KernelArgs, params: &ChannelParams, prefactor: KernelPrefactor) -> f64 {
    let l = params.lambda();
    let t = params.t();
    let np = params.nbar_from_lambda();
    let nm = params.nbar_minus();
    let a = l * (1.0 - t) / (1.0 + l * t);
    let b = l * (1.0 - t) / (1.0 - l * t);
    let f = |x: f64, y: f64| (x + a * y) * (x - b * y) + (y + a * x) * (y - b * x);

    let KernelArgs { y1, y2, z1, z2 } = *args;
    let cross = 0.5 * (l * (1.0 - t)).powi(2);
    let bracket = 0.25 * (1.0 + l * t).powi(2) * f(z1 - y1, z2 - y2)
        + 0.25 * (1.0 - l * t).powi(2) * f(z1 + y1, z2 + y2)
        - cross * f(y1, y2)
        - cross * f(z1, z2);
    let rate = (1.0 - (l * t).powi(2)) / ((1.0 - l * l).powi(2) * np * nm);
    let norm = match prefactor {
        KernelPrefactor::Symmetric => (np * nm).sqrt(),
        KernelPrefactor::Literal => np,
    };
    (-rate * bracket).exp() / (2.0 * PI * PI * norm)
}

/// One-mode factor of the noiseless kernel:
/// `g(x,y) = e^{−e^{2r}(x−y)²/4 − e^{−2r}(x+y)²/4} / (π√2)`.
pub fn kernel_factor(x: f64, y: f64, r: f64) -> f64 {
    let e = (2.0 * r).exp();
    (-0.25 * e * (x - y).powi(2) - 0.25 / e * (x + y).powi(2)).exp()
        / (PI * std::f64::consts::SQRT_2)
}

/// Noise photon numbers for `n` chained hops versus one hop over `Tⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationComparison {
    pub hops: usize,
    /// `n · n̄_{λT}`
    pub iterated: f64,
    /// `n̄_{λT}` at transmittance `Tⁿ`
    pub single_hop: f64,
}

pub fn iterate_teleport_nbar(params: &ChannelParams, n: usize) -> Result<IterationComparison> {
    if n == 0 {
        return Err(Error::InvalidSpec("hop count must be at least 1".into()));
    }
    Ok(IterationComparison {
        hops: n,
        iterated: n as f64 * params.nbar(),
        single_hop: nbar_at(params.r(), params.t().powi(n as i32)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_state, fidelity, StateSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn params_derived_scalars() {
        let p = ChannelParams::new(0.34, 0.81).unwrap();
        assert!((p.nbar() - p.nbar_from_lambda()).abs() < 1e-12);
        assert!((p.g() + 0.81f64.ln()).abs() < 1e-15);
        assert!(p.ntilde() >= 0.0);
        assert!(ChannelParams::new(-0.1, 0.5).is_err());
        assert!(matches!(
            ChannelParams::new(0.1, 1.5),
            Err(Error::InvalidTransmittance(_))
        ));
        let zero = ChannelParams::new(0.7, 0.0).unwrap();
        assert_eq!(zero.nbar(), 1.0);
    }

    #[test]
    fn outcome_mu_roundtrip() {
        let o = MeasurementOutcome::from_mu(c(0.3, -1.1));
        assert!((o.mu() - c(0.3, -1.1)).norm() < 1e-14);
    }

    #[test]
    fn loss_identity_at_unit_transmittance() {
        let rho = build_state(&StateSpec::cat(1.5, 0.2), 30).unwrap();
        let out = loss_map(&rho, 1.0).unwrap();
        assert!(trace_distance(&rho, &out).unwrap() < 1e-10);
    }

    #[test]
    fn loss_single_photon() {
        let rho = build_state(&StateSpec::fock(1), 6).unwrap();
        let out = loss_map(&rho, 0.81).unwrap();
        assert!((out.get(0, 0).re - 0.19).abs() < 1e-14);
        assert!((out.get(1, 1).re - 0.81).abs() < 1e-14);
        assert!(out.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn loss_scales_coherent_amplitude() {
        let rho = build_state(&StateSpec::coherent(1.0, 0.0), 30).unwrap();
        let out = loss_map(&rho, 0.49).unwrap();
        let want = build_state(&StateSpec::coherent(0.7, 0.0), 30).unwrap();
        assert!(trace_distance(&out, &want).unwrap() < 1e-6);
    }

    #[test]
    fn loss_zero_transmittance_is_vacuum() {
        let rho = build_state(&StateSpec::fock(3), 8).unwrap();
        let out = loss_map(&rho, 0.0).unwrap();
        assert!((out.get(0, 0).re - 1.0).abs() < 1e-15);
        assert!(loss_map(&rho, -0.1).is_err());
    }

    #[test]
    fn direct_fock_overlap_is_power() {
        for n in 0..5usize {
            let rho = build_state(&StateSpec::fock(n), 10).unwrap();
            let out = direct_transmit(&rho, 0.9).unwrap();
            assert!((out.get(n, n).re - 0.9f64.powi(n as i32)).abs() < 1e-13);
        }
    }

    #[test]
    fn direct_thermal_scales_photon_number() {
        let rho = build_state(&StateSpec::thermal(0.8), 80).unwrap();
        let out = direct_transmit(&rho, 0.6).unwrap();
        let want = build_state(&StateSpec::thermal(0.48), 80).unwrap();
        assert!(trace_distance(&out, &want).unwrap() < 1e-9);
    }

    #[test]
    fn noiseless_limit_is_identity() {
        let p = ChannelParams::new(10.0, 1.0).unwrap();
        let vac = build_state(&StateSpec::fock(0), 20).unwrap();
        let out = teleport_average(&vac, &p).unwrap();
        assert!(trace_distance(&vac, &out).unwrap() < 1e-8);
    }

    #[test]
    fn unsqueezed_vacuum_becomes_thermal() {
        let p = ChannelParams::new(0.0, 0.37).unwrap();
        let vac = build_state(&StateSpec::fock(0), 60).unwrap();
        let out = teleport_average(&vac, &p).unwrap();
        let th = build_state(&StateSpec::thermal(1.0), 60).unwrap();
        assert!(trace_distance(&out, &th).unwrap() < 1e-8);
        assert!((fidelity(&vac, &out).unwrap() - 0.5).abs() < 1e-8);
    }

    #[test]
    fn coherent_input_gives_displaced_thermal() {
        let p = ChannelParams::new(0.5, 0.85).unwrap();
        let alpha = c(0.9, -0.6);
        let dim = 40;
        let rho = build_state(&StateSpec::Coherent { alpha }, dim).unwrap();
        let out = teleport_average(&rho, &p).unwrap();
        let want = displaced_thermal(alpha, p.nbar(), dim);
        assert!(trace_distance(&out, &want).unwrap() < 1e-4);
        assert!((out.trace() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn teleport_cutoff_precheck() {
        let p = ChannelParams::new(0.1, 0.5).unwrap();
        let rho = build_state(&StateSpec::fock(4), 12).unwrap();
        assert!(matches!(
            teleport_average(&rho, &p),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn tiny_refinement_budget_reports_nonconvergence() {
        let p = ChannelParams::new(0.3, 0.9).unwrap();
        let rho = build_state(&StateSpec::fock(3), 40).unwrap();
        let opts = QuadratureOptions {
            initial_nodes: Some(2),
            max_nodes: 4,
            tolerance: 1e-12,
        };
        assert!(matches!(
            teleport_average_with(&rho, &p, &opts),
            Err(Error::QuadratureNotConverged(_))
        ));
    }

    #[test]
    fn outcome_without_displacement_is_thermal() {
        let p = ChannelParams::new(0.8, 0.7).unwrap();
        let out =
            teleport_outcome(c(0.0, 0.0), &MeasurementOutcome::new(0.0, 0.0), &p, 30).unwrap();
        let th = build_state(&StateSpec::thermal(p.ntilde()), 30).unwrap();
        assert!(trace_distance(&out, &th).unwrap() < 1e-12);
    }

    #[test]
    fn outcome_noiseless_arm_is_coherent() {
        let p = ChannelParams::new(0.4, 1.0).unwrap();
        let o = MeasurementOutcome::from_mu(c(1.0, 0.0));
        let out = teleport_outcome(c(1.0, 0.0), &o, &p, 30).unwrap();
        let coh = build_state(&StateSpec::coherent(1.0, 0.0), 30).unwrap();
        assert_eq!(p.ntilde(), 0.0);
        assert!(trace_distance(&out, &coh).unwrap() < 1e-12);
    }

    #[test]
    fn outcome_center_arithmetic() {
        let p = ChannelParams::from_lambda(0.6, 0.8).unwrap();
        let o = MeasurementOutcome::new(0.0, 0.0);
        let center = outcome_center(c(2.0, 0.0), &o, &p);
        assert!((center.re - 2.0 * 0.48 / 0.928).abs() < 1e-12);
        assert!((p.ntilde() - 0.36 * 0.8 * 0.2 / 0.928).abs() < 1e-12);
    }

    #[test]
    fn outcome_density_prefactor() {
        let p = ChannelParams::new(0.0, 0.6).unwrap();
        let v = outcome_density(c(0.0, 0.0), &MeasurementOutcome::new(0.0, 0.0), &p);
        assert!((v - 1.0 / (2.0 * PI)).abs() < 1e-15);
    }

    #[test]
    fn outcome_density_flattens_under_strong_squeezing() {
        let p = ChannelParams::from_lambda(0.999, 0.8).unwrap();
        let alpha = c(0.5, 0.5);
        let at = |mu: Complex64| outcome_density(alpha, &MeasurementOutcome::from_mu(mu), &p);
        let center = at(alpha);
        for k in 0..16 {
            let mu = alpha + Complex64::from_polar(1.0, k as f64 * PI / 8.0);
            assert!((at(mu) / center - 1.0).abs() < 0.01);
        }
    }

    #[test]
    fn kernel_origin_is_prefactor() {
        let p = ChannelParams::new(0.7, 0.6).unwrap();
        let g = kernel_g(&KernelArgs::new(0.0, 0.0, 0.0, 0.0), &p);
        let want = 1.0 / (2.0 * PI * PI * (p.nbar() * p.nbar_minus()).sqrt());
        assert!((g - want).abs() < 1e-15);
        let lit = kernel_g_with(
            &KernelArgs::new(0.0, 0.0, 0.0, 0.0),
            &p,
            KernelPrefactor::Literal,
        );
        assert!((lit - 1.0 / (2.0 * PI * PI * p.nbar())).abs() < 1e-15);
    }

    #[test]
    fn kernel_swap_symmetry() {
        let p = ChannelParams::new(0.5, 0.7).unwrap();
        let a = kernel_g(&KernelArgs::new(0.3, -1.2, 0.8, 0.1), &p);
        let b = kernel_g(&KernelArgs::new(-1.2, 0.3, 0.1, 0.8), &p);
        assert!((a - b).abs() < 1e-15 * a.abs().max(1e-300));
        assert!(a.is_finite() && a > 0.0);
    }

    #[test]
    fn kernel_factor_unsqueezed() {
        for &(x, y) in &[(0.0f64, 0.0f64), (0.4, -1.0), (1.5, 0.7)] {
            let want = (-(x * x + y * y) / 2.0).exp() / (PI * 2f64.sqrt());
            assert!((kernel_factor(x, y, 0.0) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn iteration_values() {
        let p = ChannelParams::new(0.34, 0.81).unwrap();
        let one = iterate_teleport_nbar(&p, 1).unwrap();
        assert_eq!(one.iterated, p.nbar());
        assert!((one.single_hop - p.nbar()).abs() < 1e-15);
        let two = iterate_teleport_nbar(&p, 2).unwrap();
        let c = -(-0.68f64).exp_m1();
        assert!((two.iterated - 2.0 * (1.0 - c * 0.81)).abs() < 1e-14);
        assert!((two.single_hop - (1.0 - c * 0.81 * 0.81)).abs() < 1e-14);
        assert!((two.single_hop - 0.6763).abs() < 1e-4);
        assert!(two.iterated >= two.single_hop);
        let ideal = ChannelParams::new(15.0, 1.0).unwrap();
        let it = iterate_teleport_nbar(&ideal, 4).unwrap();
        assert!(it.iterated < 1e-12 && it.single_hop < 1e-12);
        assert!(iterate_teleport_nbar(&p, 0).is_err());
    }
}
