//! Closed-form fidelities, nonclassical depths and the comparison between
//! teleportation and direct transmission.

use num_complex::Complex64;

use crate::channels::{
    check_transmittance, direct_transmit, nbar_at, teleport_average, ChannelParams,
};
use crate::error::{Error, Result};
use crate::fock::{build_state, default_dim, fidelity, StateSpec, MIN_CAT_AMPLITUDE};
use crate::special::scaled_legendre;

/// `|1 − n̄|` below which the Fock fidelity switches to its `n̄ = 1` limit.
pub const NBAR_ONE_TOLERANCE: f64 = 1e-9;
/// Discriminants smaller than this in magnitude are treated as zero.
pub const DISCRIMINANT_FLOOR: f64 = 1e-14;
/// Crossover windows narrower than this are reported as empty.
pub const MIN_WINDOW_WIDTH: f64 = 1e-7;

fn check_cat_amplitude(alpha: Complex64) -> Result<()> {
    if !alpha.is_finite() || alpha.norm() < MIN_CAT_AMPLITUDE {
        return Err(Error::InvalidSpec(format!(
            "cat amplitude |α| = {} below {MIN_CAT_AMPLITUDE}",
            alpha.norm()
        )));
    }
    Ok(())
}

/// `1/(1+n̄)`.
pub fn fidelity_coherent_at(nbar: f64) -> f64 {
    1.0 / (1.0 + nbar)
}

/// Coherent-state teleportation fidelity `1/(1+n̄_{λT})`.
pub fn fidelity_coherent_tel(params: &ChannelParams) -> f64 {
    fidelity_coherent_at(params.nbar())
}

/// The same fidelity in its λ form, `(1+λ)/(2(1+λ−λT))`.
pub fn fidelity_coherent_tel_lambda(params: &ChannelParams) -> f64 {
    let l = params.lambda();
    (1.0 + l) / (2.0 * (1.0 + l - l * params.t()))
}

/// `zⁿ Pₙ(y)/(1+n̄)` with `z = (1−n̄)/(1+n̄)`, `y = (1+n̄²)/(1−n̄²)`.
pub fn fidelity_fock_at(n: usize, nbar: f64) -> f64 {
    if (1.0 - nbar).abs() < NBAR_ONE_TOLERANCE {
        // zⁿPₙ(y) → C(2n,n)/4ⁿ as n̄ → 1
        let mut c = 1.0;
        for k in 0..n {
            c *= (2 * k + 1) as f64 / (2 * k + 2) as f64;
        }
        return 0.5 * c;
    }
    let z = (1.0 - nbar) / (1.0 + nbar);
    let yz = (1.0 + nbar * nbar) / (1.0 + nbar).powi(2);
    scaled_legendre(n, yz, z) / (1.0 + nbar)
}

/// Teleportation fidelity for the Fock state `|n⟩`.
pub fn fidelity_fock_tel(n: usize, params: &ChannelParams) -> f64 {
    fidelity_fock_at(n, params.nbar())
}

/// `{1 + [sinh(z|α|²)/sinh|α|²]²} / (2(1+n̄))`.
pub fn fidelity_cat_at(alpha: Complex64, nbar: f64) -> Result<f64> {
    check_cat_amplitude(alpha)?;
    let a = alpha.norm_sqr();
    let z = (1.0 - nbar) / (1.0 + nbar);
    let ratio = sinh_ratio(z * a, a);
    Ok((1.0 + ratio * ratio) / (2.0 * (1.0 + nbar)))
}

/// Odd-cat teleportation fidelity.
pub fn fidelity_cat_tel(alpha: Complex64, params: &ChannelParams) -> Result<f64> {
    fidelity_cat_at(alpha, params.nbar())
}

// sinh(u)/sinh(a) for 0 ≤ u ≤ a, a > 0, without overflow.
fn sinh_ratio(u: f64, a: f64) -> f64 {
    (u - a).exp() * (-2.0 * u).exp_m1() / (-2.0 * a).exp_m1()
}

/// `Tⁿ`; `T = 0` gives `0ⁿ` with `0⁰ = 1`.
pub fn fidelity_fock_dir(n: usize, t: f64) -> Result<f64> {
    check_transmittance(t)?;
    Ok(t.powi(n as i32))
}

/// `[sinh(√T|α|²)/sinh|α|²]² cosh((1−T)|α|²)`.
pub fn fidelity_cat_dir(alpha: Complex64, t: f64) -> Result<f64> {
    check_cat_amplitude(alpha)?;
    check_transmittance(t)?;
    let a = alpha.norm_sqr();
    let st = t.sqrt();
    let q = (-2.0 * st * a).exp_m1() / (-2.0 * a).exp_m1();
    // exponents of sinh² and cosh combine to −a(1−√T)²
    let cosh_part = 0.5 * (1.0 + (-2.0 * (1.0 - t) * a).exp());
    Ok(q * q * (-a * (1.0 - st).powi(2)).exp() * cosh_part)
}

/// Cutoff used by the Fock-basis fidelity routines when none is given.
pub fn oracle_dim(spec: &StateSpec, extra_noise: f64) -> usize {
    spec.default_dim()
        .max(default_dim(spec.mean_photons() + extra_noise) + 10)
}

/// `⟨ψ| teleport_average(|ψ⟩⟨ψ|) |ψ⟩` in the truncated Fock basis.
pub fn fidelity_generic_tel(
    input: &StateSpec,
    params: &ChannelParams,
    dim: Option<usize>,
) -> Result<f64> {
    if !input.is_pure() {
        return Err(Error::UnsupportedSpec(
            "fidelity needs a pure input state".into(),
        ));
    }
    let dim = dim.unwrap_or_else(|| oracle_dim(input, params.nbar()));
    let rho = build_state(input, dim)?;
    let out = teleport_average(&rho, params)?;
    fidelity(&rho, &out)
}

/// `⟨ψ| L_T(|ψ⟩⟨ψ|) |ψ⟩` in the truncated Fock basis.
pub fn fidelity_generic_dir(input: &StateSpec, t: f64, dim: Option<usize>) -> Result<f64> {
    if !input.is_pure() {
        return Err(Error::UnsupportedSpec(
            "fidelity needs a pure input state".into(),
        ));
    }
    let dim = dim.unwrap_or_else(|| input.default_dim());
    let rho = build_state(input, dim)?;
    let out = direct_transmit(&rho, t)?;
    fidelity(&rho, &out)
}

/// Channel a fidelity refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel {
    Teleport(ChannelParams),
    /// Direct transmission with the given transmittance.
    Direct(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FidelityMethod {
    ClosedForm,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityReport {
    pub input: StateSpec,
    pub channel: Channel,
    pub value: f64,
    pub method: FidelityMethod,
}

impl FidelityReport {
    /// Closed-form fidelity; coherent, Fock and cat inputs only.
    pub fn closed_form(input: StateSpec, channel: Channel) -> Result<Self> {
        input.validate()?;
        let value = match (input, channel) {
            (StateSpec::Coherent { .. }, Channel::Teleport(p)) => fidelity_coherent_tel(&p),
            (StateSpec::Coherent { alpha }, Channel::Direct(t)) => {
                check_transmittance(t)?;
                (-alpha.norm_sqr() * (1.0 - t.sqrt()).powi(2)).exp()
            }
            (StateSpec::Fock { n }, Channel::Teleport(p)) => fidelity_fock_tel(n, &p),
            (StateSpec::Fock { n }, Channel::Direct(t)) => fidelity_fock_dir(n, t)?,
            (StateSpec::Cat { alpha }, Channel::Teleport(p)) => fidelity_cat_tel(alpha, &p)?,
            (StateSpec::Cat { alpha }, Channel::Direct(t)) => fidelity_cat_dir(alpha, t)?,
            (other, _) => {
                return Err(Error::UnsupportedSpec(format!(
                    "no closed-form fidelity for {other:?}"
                )))
            }
        };
        Ok(Self {
            input,
            channel,
            value,
            method: FidelityMethod::ClosedForm,
        })
    }

    /// Fidelity from the Fock-basis channel maps.
    pub fn oracle(input: StateSpec, channel: Channel, dim: Option<usize>) -> Result<Self> {
        let value = match channel {
            Channel::Teleport(p) => fidelity_generic_tel(&input, &p, dim)?,
            Channel::Direct(t) => fidelity_generic_dir(&input, t, dim)?,
        };
        Ok(Self {
            input,
            channel,
            value,
            method: FidelityMethod::Oracle,
        })
    }
}

/// Nonclassical depth of an input state.
pub fn depth_of_state(spec: &StateSpec) -> Result<f64> {
    spec.validate()?;
    Ok(match *spec {
        StateSpec::Coherent { .. } | StateSpec::Thermal { .. } => 0.0,
        StateSpec::Fock { n } => {
            if n == 0 {
                0.0
            } else {
                1.0
            }
        }
        StateSpec::Cat { .. } => 1.0,
        StateSpec::SqueezedVacuum { xi } => squeezed_depth(xi.norm()),
    })
}

/// `(1 − e^{−2|ξ|})/2 = tanh|ξ|/(1 + tanh|ξ|)`.
pub fn squeezed_depth(modulus: f64) -> f64 {
    -0.5 * (-2.0 * modulus).exp_m1()
}

/// `max(τ_in − n̄_{λT}, 0)`, clamped to `[0, 1]`.
pub fn depth_transfer_tel(tau_in: f64, params: &ChannelParams) -> f64 {
    depth_transfer_at(tau_in, params.nbar())
}

/// `max(τ_in − n̄, 0)`, clamped to `[0, 1]`.
pub fn depth_transfer_at(tau_in: f64, nbar: f64) -> f64 {
    (tau_in - nbar).clamp(0.0, 1.0)
}

/// Depth after direct transmission with transmittance `t`: `τ_in · t`.
pub fn depth_transfer_dir(tau_in: f64, t: f64) -> f64 {
    tau_in * t
}

/// Smallest squeezing for which some depth survives teleportation:
/// `−½ ln(1 − (1−τ_in)/T)`, or `+∞` when `T ≤ 1 − τ_in`.
pub fn depth_threshold_r(tau_in: f64, t: f64) -> Result<f64> {
    check_transmittance(t)?;
    if !(0.0..=1.0).contains(&tau_in) {
        return Err(Error::InvalidTau(tau_in));
    }
    if t <= 1.0 - tau_in {
        return Ok(f64::INFINITY);
    }
    Ok(-0.5 * (-(1.0 - tau_in) / t).ln_1p())
}

/// Smallest transmittance for which some depth survives teleportation at
/// squeezing `r`: `(1 − τ_in)/(1 − e^{−2r})`, or `None` if that exceeds 1.
pub fn depth_threshold_t(tau_in: f64, r: f64) -> Option<f64> {
    let c = -(-2.0 * r).exp_m1();
    if c <= 0.0 {
        return None;
    }
    let t = (1.0 - tau_in) / c;
    (t <= 1.0).then_some(t)
}

/// `τ_tel(r, T) − τ_dir(T²)` with the `max(·, 0)` of the teleported depth kept.
pub fn tau_diff(tau_in: f64, r: f64, t: f64) -> f64 {
    depth_transfer_at(tau_in, nbar_at(r, t)) - depth_transfer_dir(tau_in, t * t)
}

/// `−τ_in T² + (1 − e^{−2r}) T + τ_in − 1`; has the same sign as
/// [`tau_diff`] wherever either is positive.
pub fn tau_diff_poly(tau_in: f64, r: f64, t: f64) -> f64 {
    let c = -(-2.0 * r).exp_m1();
    -tau_in * t * t + c * t + tau_in - 1.0
}

/// `(1 − e^{−2r})² − 4τ_in(1 − τ_in)`.
pub fn crossover_discriminant(tau_in: f64, r: f64) -> f64 {
    let c = -(-2.0 * r).exp_m1();
    c * c - 4.0 * tau_in * (1.0 - tau_in)
}

/// Open interval of `T` where teleportation keeps strictly more depth than
/// direct transmission over the same total distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossoverWindow {
    pub t_lo: f64,
    pub t_hi: f64,
}

impl CrossoverWindow {
    pub fn contains(&self, t: f64) -> bool {
        t > self.t_lo && t < self.t_hi
    }

    pub fn width(&self) -> f64 {
        self.t_hi - self.t_lo
    }
}

/// Crossover window for `τ_in` and squeezing `r` (`r = +∞` allowed), or
/// `None` when the direct channel is never worse.
pub fn crossover(tau_in: f64, r: f64) -> Option<CrossoverWindow> {
    if !(0.5..=1.0).contains(&tau_in) || r.is_nan() || r < 0.0 {
        return None;
    }
    let c = -(-2.0 * r).exp_m1();
    if tau_in == 1.0 {
        return (c >= MIN_WINDOW_WIDTH).then_some(CrossoverWindow { t_lo: 0.0, t_hi: c });
    }
    let mut disc = crossover_discriminant(tau_in, r);
    if disc.abs() < DISCRIMINANT_FLOOR {
        disc = 0.0;
    }
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // τT² − cT + (1−τ) = 0; the smaller root via the product of roots
    let hi = (c + sq) / (2.0 * tau_in);
    let lo = (1.0 - tau_in) / (tau_in * hi);
    let window = CrossoverWindow {
        t_lo: lo.max(0.0),
        t_hi: hi.min(1.0),
    };
    (window.width() >= MIN_WINDOW_WIDTH).then_some(window)
}

/// All depth quantities for one input depth and channel setting. The
/// direct-transmission comparison uses `T²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthReport {
    pub tau_in: f64,
    pub tau_tel: f64,
    pub tau_dir: f64,
    pub tau_diff: f64,
    pub r_threshold: f64,
    pub t_window: Option<CrossoverWindow>,
}

impl DepthReport {
    pub fn new(tau_in: f64, params: &ChannelParams) -> Result<Self> {
        if !(0.0..=1.0).contains(&tau_in) {
            return Err(Error::InvalidTau(tau_in));
        }
        let t = params.t();
        let tau_tel = depth_transfer_tel(tau_in, params);
        let tau_dir = depth_transfer_dir(tau_in, t * t);
        Ok(Self {
            tau_in,
            tau_tel,
            tau_dir,
            tau_diff: tau_tel - tau_dir,
            r_threshold: depth_threshold_r(tau_in, t)?,
            t_window: crossover(tau_in, params.r()),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(r: f64, t: f64) -> ChannelParams {
        ChannelParams::new(r, t).unwrap()
    }

    #[test]
    fn coherent_forms_agree() {
        for i in 0..=20 {
            for j in 0..=20 {
                let q = p(0.15 * i as f64, 0.05 * j as f64);
                assert!(
                    (fidelity_coherent_tel(&q) - fidelity_coherent_tel_lambda(&q)).abs() < 1e-12
                );
            }
        }
    }

    #[test]
    fn coherent_limits() {
        assert_eq!(fidelity_coherent_tel(&p(0.0, 0.3)), 0.5);
        assert!((fidelity_coherent_tel(&p(20.0, 1.0)) - 1.0).abs() < 1e-15);
        let f = fidelity_coherent_tel(&p(0.34, 0.81));
        assert!((f - 0.62).abs() < 0.005, "{f}");
    }

    #[test]
    fn fock_low_orders() {
        for &x in &[0.0, 0.1, 0.3, 0.7, 0.95] {
            assert!((fidelity_fock_at(0, x) - 1.0 / (1.0 + x)).abs() < 1e-15);
            let want = (1.0 + x * x) / (1.0 + x).powi(3);
            assert!((fidelity_fock_at(1, x) - want).abs() < 1e-14);
        }
    }

    #[test]
    fn fock_limit_at_unit_noise_is_continuous() {
        for n in 0..12 {
            let at = fidelity_fock_at(n, 1.0);
            let near = fidelity_fock_at(n, 1.0 - 1e-6);
            assert!((at - near).abs() < 1e-5, "n={n}");
        }
        assert_eq!(fidelity_fock_at(1, 1.0), 0.25);
        assert!((fidelity_fock_at(2, 1.0) - 6.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn fock_fidelity_noiseless_is_one() {
        for n in 0..20 {
            assert!((fidelity_fock_at(n, 0.0) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cat_limits() {
        let a = Complex64::new(6f64.sqrt(), 0.0);
        assert!((fidelity_cat_at(a, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((fidelity_cat_at(a, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(fidelity_cat_at(Complex64::new(1e-4, 0.0), 0.5).is_err());
        let big = Complex64::new(30.0, 0.0);
        assert!(fidelity_cat_at(big, 0.3).unwrap().is_finite());
    }

    #[test]
    fn direct_closed_forms() {
        assert_eq!(fidelity_fock_dir(0, 0.4).unwrap(), 1.0);
        assert!((fidelity_fock_dir(1, 0.81).unwrap() - 0.81).abs() < 1e-15);
        assert!((fidelity_fock_dir(3, 0.9).unwrap() - 0.729).abs() < 1e-14);
        assert_eq!(fidelity_fock_dir(0, 0.0).unwrap(), 1.0);
        assert!(fidelity_fock_dir(1, 1.2).is_err());
        let a = Complex64::new(2.0, 1.0);
        assert!((fidelity_cat_dir(a, 1.0).unwrap() - 1.0).abs() < 1e-14);
        let a2: f64 = 1.7;
        let (st, t) = (0.8f64, 0.64f64);
        let want = ((st * a2).sinh() / a2.sinh()).powi(2) * ((1.0 - t) * a2).cosh();
        let got = fidelity_cat_dir(Complex64::new(a2.sqrt(), 0.0), t).unwrap();
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn depth_of_states() {
        assert_eq!(depth_of_state(&StateSpec::coherent(1.0, 2.0)).unwrap(), 0.0);
        assert_eq!(depth_of_state(&StateSpec::thermal(0.4)).unwrap(), 0.0);
        assert_eq!(depth_of_state(&StateSpec::fock(0)).unwrap(), 0.0);
        assert_eq!(depth_of_state(&StateSpec::fock(3)).unwrap(), 1.0);
        assert_eq!(depth_of_state(&StateSpec::cat(1.0, 0.0)).unwrap(), 1.0);
        let sq = depth_of_state(&StateSpec::squeezed(0.69, 0.0)).unwrap();
        assert!((sq - 0.374).abs() < 5e-4);
        assert!((sq - 0.38).abs() <= 0.01);
        let t = 0.69f64.tanh();
        assert!((sq - t / (1.0 + t)).abs() < 1e-15);
        assert!((squeezed_depth(40.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn depth_threshold_examples() {
        assert_eq!(depth_threshold_r(1.0, 0.3).unwrap(), 0.0);
        assert_eq!(depth_threshold_r(0.5, 0.5).unwrap(), f64::INFINITY);
        let r = depth_threshold_r(0.5, 0.6).unwrap();
        assert!((r + 0.5 * (1.0f64 / 6.0).ln()).abs() < 1e-12);
        assert!(depth_transfer_tel(0.5, &p(r, 0.6)).abs() < 1e-9);
        assert!(depth_threshold_r(0.5, 1.1).is_err());
    }

    #[test]
    fn six_db_threshold_transmittance() {
        let tau = squeezed_depth(0.69);
        let t = depth_threshold_t(tau, 0.69).unwrap();
        assert!((t - 0.83).abs() <= 0.01);
        assert!((t - 0.836).abs() < 5e-4);
        assert!(depth_transfer_tel(tau, &p(0.69, t - 1e-6)) == 0.0);
        assert!(depth_transfer_tel(tau, &p(0.69, t + 1e-6)) > 0.0);
        assert_eq!(depth_threshold_t(0.3, 0.0), None);
    }

    #[test]
    fn depth_transfer_unsqueezed_is_zero() {
        for &tau in &[0.0, 0.4, 1.0] {
            assert_eq!(depth_transfer_tel(tau, &p(0.0, 0.9)), 0.0);
        }
        assert!((depth_transfer_tel(1.0, &p(20.0, 1.0)) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn crossover_examples() {
        let w = crossover(1.0, 2.0).unwrap();
        assert_eq!(w.t_lo, 0.0);
        assert_eq!(w.t_hi, -(-4.0f64).exp_m1());
        let inf = crossover(1.0, f64::INFINITY).unwrap();
        assert_eq!((inf.t_lo, inf.t_hi), (0.0, 1.0));
        assert!(crossover(0.4, 3.0).is_none());
        assert!(crossover(0.7, 0.0).is_none());
        let d = crossover_discriminant(0.75, 0.5);
        assert_eq!(crossover(0.75, 0.5).is_some(), d > 0.0);
    }

    #[test]
    fn crossover_roots_are_zeros() {
        let w = crossover(0.8, 1.5).unwrap();
        assert!(tau_diff_poly(0.8, 1.5, w.t_lo).abs() < 1e-12);
        assert!(tau_diff_poly(0.8, 1.5, w.t_hi).abs() < 1e-12);
        let mid = 0.5 * (w.t_lo + w.t_hi);
        assert!(tau_diff(0.8, 1.5, mid) > 0.0);
    }

    #[test]
    fn crossover_matches_scan_on_grid() {
        for i in 0..50 {
            for j in 0..50 {
                let tau = i as f64 / 49.0;
                let r = 3.0 * j as f64 / 49.0;
                let window = crossover(tau, r);
                let positive = (0..=10_000).any(|k| tau_diff(tau, r, k as f64 * 1e-4) > 0.0);
                assert_eq!(window.is_some(), positive, "tau={tau} r={r}");
            }
        }
    }

    #[test]
    fn depth_report_fields() {
        let q = p(0.7, 0.9);
        let rep = DepthReport::new(0.9, &q).unwrap();
        assert_eq!(rep.tau_tel, depth_transfer_tel(0.9, &q));
        assert!((rep.tau_dir - 0.9 * 0.81).abs() < 1e-15);
        assert_eq!(rep.tau_diff, rep.tau_tel - rep.tau_dir);
        assert_eq!(rep.t_window, crossover(0.9, 0.7));
        assert!(DepthReport::new(1.5, &q).is_err());
    }

    #[test]
    fn report_dispatch() {
        let q = p(0.5, 0.9);
        let rep = FidelityReport::closed_form(StateSpec::fock(2), Channel::Teleport(q)).unwrap();
        assert_eq!(rep.value, fidelity_fock_tel(2, &q));
        assert_eq!(rep.method, FidelityMethod::ClosedForm);
        assert!(matches!(
            FidelityReport::closed_form(StateSpec::squeezed(0.3, 0.0), Channel::Direct(0.5)),
            Err(Error::UnsupportedSpec(_))
        ));
        let coh = FidelityReport::closed_form(StateSpec::coherent(1.0, 0.0), Channel::Direct(0.64))
            .unwrap();
        assert!((coh.value - (-0.04f64).exp()).abs() < 1e-15);
    }
}
