//! Truncated Fock-basis states and the matrix utilities the numeric oracles
//! are built on.
//!
//! A [`DensityMatrix`] of dimension `dim` lives on the span of `|0⟩ … |dim-1⟩`.
//! States are never renormalized after truncation: a state whose tail mass
//! exceeds [`TAIL_TOLERANCE`] is rejected with [`Error::CutoffTooSmall`].

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;

/// Largest admissible `|Tr ρ − 1|` for a constructed state.
pub const TAIL_TOLERANCE: f64 = 1e-8;
/// Largest admissible `max |ρ_mn − ρ*_nm|`.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
/// Most negative admissible eigenvalue.
pub const EIGEN_FLOOR: f64 = -1e-8;
/// Smallest cat amplitude accepted.
pub const MIN_CAT_AMPLITUDE: f64 = 1e-3;

/// Default cutoff `⌈μ + 6√(μ+1) + 10⌉` for a state of mean photon number `μ`.
pub fn default_dim(mean_photons: f64) -> usize {
    let mu = mean_photons.max(0.0);
    (mu + 6.0 * (mu + 1.0).sqrt() + 10.0).ceil() as usize
}

/// Symbolic description of an input state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSpec {
    Coherent {
        alpha: Complex64,
    },
    Fock {
        n: usize,
    },
    /// Odd cat `(|α⟩ − |−α⟩)/√(2(1−e^{−2|α|²}))`.
    Cat {
        alpha: Complex64,
    },
    /// Single-mode squeezed vacuum with `ξ = r e^{iθ}`.
    SqueezedVacuum {
        xi: Complex64,
    },
    Thermal {
        mean_photons: f64,
    },
}

impl StateSpec {
    pub fn coherent(re: f64, im: f64) -> Self {
        StateSpec::Coherent {
            alpha: Complex64::new(re, im),
        }
    }

    pub fn cat(re: f64, im: f64) -> Self {
        StateSpec::Cat {
            alpha: Complex64::new(re, im),
        }
    }

    pub fn squeezed(r: f64, theta: f64) -> Self {
        StateSpec::SqueezedVacuum {
            xi: Complex64::from_polar(r, theta),
        }
    }

    pub fn fock(n: usize) -> Self {
        StateSpec::Fock { n }
    }

    pub fn thermal(mean_photons: f64) -> Self {
        StateSpec::Thermal { mean_photons }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StateSpec::Coherent { alpha } if !alpha.is_finite() => {
                Err(Error::InvalidSpec(format!("non-finite amplitude {alpha}")))
            }
            StateSpec::Cat { alpha } if !alpha.is_finite() || alpha.norm() < MIN_CAT_AMPLITUDE => {
                Err(Error::InvalidSpec(format!(
                    "cat amplitude |α| = {} below {MIN_CAT_AMPLITUDE}",
                    alpha.norm()
                )))
            }
            StateSpec::SqueezedVacuum { xi } if !xi.is_finite() => {
                Err(Error::InvalidSpec(format!("non-finite squeezing {xi}")))
            }
            StateSpec::Thermal { mean_photons }
                if !mean_photons.is_finite() || mean_photons < 0.0 =>
            {
                Err(Error::InvalidSpec(format!(
                    "thermal mean photon number {mean_photons} must be finite and non-negative"
                )))
            }
            _ => Ok(()),
        }
    }

    /// Mean photon number ⟨a†a⟩.
    pub fn mean_photons(&self) -> f64 {
        match *self {
            StateSpec::Coherent { alpha } => alpha.norm_sqr(),
            StateSpec::Fock { n } => n as f64,
            StateSpec::Cat { alpha } => {
                let a2 = alpha.norm_sqr();
                a2 / a2.tanh()
            }
            StateSpec::SqueezedVacuum { xi } => xi.norm().sinh().powi(2),
            StateSpec::Thermal { mean_photons } => mean_photons,
        }
    }

    /// Cutoff from [`default_dim`], never below what the tail criteria demand.
    pub fn default_dim(&self) -> usize {
        let base = default_dim(self.mean_photons());
        match *self {
            StateSpec::Fock { n } => base.max(n + 2),
            StateSpec::Coherent { alpha } | StateSpec::Cat { alpha } => {
                base.max(amplitude_tail_dim(alpha.norm()))
            }
            StateSpec::SqueezedVacuum { xi } => base.max(squeezed_tail_dim(xi.norm())),
            StateSpec::Thermal { mean_photons } => base.max(thermal_tail_dim(mean_photons)),
        }
    }

    pub fn is_pure(&self) -> bool {
        !matches!(self, StateSpec::Thermal { .. })
    }
}

// Smallest cutoff whose truncated trace is within a hundredth of the tail tolerance.
fn squeezed_tail_dim(r: f64) -> usize {
    let t2 = r.tanh().powi(2);
    let mut p = 1.0 / r.cosh();
    let mut total = 0.0;
    let mut m = 0usize;
    while 1.0 - total > 0.01 * TAIL_TOLERANCE && m < 100_000 {
        total += p;
        let mf = m as f64;
        p *= t2 * (2.0 * mf + 1.0) / (2.0 * mf + 2.0);
        m += 1;
    }
    2 * m
}

fn thermal_tail_dim(mean_photons: f64) -> usize {
    if mean_photons <= 0.0 {
        return 1;
    }
    let q = mean_photons / (1.0 + mean_photons);
    ((0.01 * TAIL_TOLERANCE).ln() / q.ln()).ceil() as usize
}

fn amplitude_tail_dim(modulus: f64) -> usize {
    (modulus * modulus + 6.0 * modulus + 10.0).ceil() as usize
}

/// Hermitian, positive, unit-trace (to within truncation) matrix in the
/// truncated Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    elems: ComplexMatrix,
}

impl DensityMatrix {
    /// Wraps `elems` after checking every invariant.
    pub fn new(elems: ComplexMatrix) -> Result<Self> {
        let rho = Self::from_matrix_unchecked(elems)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Wraps a square matrix without the spectral checks.
    pub fn from_matrix_unchecked(elems: ComplexMatrix) -> Result<Self> {
        if elems.nrows() != elems.ncols() {
            return Err(Error::InvalidDensityMatrix(format!(
                "not square: {}x{}",
                elems.nrows(),
                elems.ncols()
            )));
        }
        if elems.nrows() == 0 {
            return Err(Error::InvalidDensityMatrix("empty matrix".into()));
        }
        Ok(Self { elems })
    }

    /// `|ψ⟩⟨ψ|` from amplitudes.
    pub fn from_pure(amps: &[Complex64]) -> Self {
        let v = nalgebra::DVector::from_column_slice(amps);
        Self {
            elems: &v * v.adjoint(),
        }
    }

    /// Diagonal state from real populations.
    pub fn from_diagonal(populations: &[f64]) -> Self {
        let n = populations.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (i, &p) in populations.iter().enumerate() {
            m[(i, i)] = Complex64::new(p, 0.0);
        }
        Self { elems: m }
    }

    pub fn dim(&self) -> usize {
        self.elems.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.elems
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.elems
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.elems[(m, n)]
    }

    pub fn trace(&self) -> f64 {
        self.elems.diagonal().iter().map(|z| z.re).sum()
    }

    /// Photon-number populations ρ_nn.
    pub fn populations(&self) -> Vec<f64> {
        self.elems.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn mean_photons(&self) -> f64 {
        self.populations()
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// `Tr ρ²`, assuming ρ Hermitian.
    pub fn purity(&self) -> f64 {
        self.elems.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `max |ρ_mn − ρ*_nm|`.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for m in 0..d {
            for n in m..d {
                worst = worst.max((self.elems[(m, n)] - self.elems[(n, m)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = hermitian_part(&self.elems);
        let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermitian_defect();
        if herm > HERMITIAN_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!(
                "Hermitian defect {herm:e}"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TAIL_TOLERANCE {
            return Err(Error::InvalidDensityMatrix(format!("trace {tr}")));
        }
        let min_ev = self.eigenvalues()[0];
        if min_ev < EIGEN_FLOOR {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min_ev:e}"
            )));
        }
        Ok(())
    }

    /// `a·self + (1−a)·other`.
    pub fn mix(&self, a: f64, other: &DensityMatrix) -> Result<DensityMatrix> {
        same_dim(self, other)?;
        Ok(Self {
            elems: self.elems.scale(a) + other.elems.scale(1.0 - a),
        })
    }

    /// `D(α) ρ D†(α)` restricted to the same cutoff.
    pub fn displaced(&self, alpha: Complex64) -> DensityMatrix {
        let d = self.dim();
        let disp = displacement_elements(alpha, d, d);
        Self {
            elems: &disp * &self.elems * disp.adjoint(),
        }
    }

    /// Copy padded with zeros (or truncated) to dimension `dim`.
    pub fn resized(&self, dim: usize) -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(dim, dim);
        let k = dim.min(self.dim());
        m.view_mut((0, 0), (k, k))
            .copy_from(&self.elems.view((0, 0), (k, k)));
        Self { elems: m }
    }
}

fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch(a.dim(), b.dim()));
    }
    Ok(())
}

/// Coherent-state amplitudes `e^{−|α|²/2} αⁿ/√n!` for `n < dim`.
pub fn coherent_amplitudes(alpha: Complex64, dim: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(dim);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        out.push(c);
        c = c * alpha / ((n + 1) as f64).sqrt();
    }
    out
}

/// Thermal populations `ñⁿ/(1+ñ)^{n+1}` for `n < dim`.
pub fn thermal_populations(mean_photons: f64, dim: usize) -> Vec<f64> {
    let q = mean_photons / (1.0 + mean_photons);
    let mut p = 1.0 / (1.0 + mean_photons);
    let mut out = Vec::with_capacity(dim);
    for _ in 0..dim {
        out.push(p);
        p *= q;
    }
    out
}

/// Builds the density matrix for `spec` at cutoff `dim`.
pub fn build_state(spec: &StateSpec, dim: usize) -> Result<DensityMatrix> {
    spec.validate()?;
    if dim < 2 {
        return Err(Error::CutoffTooSmall {
            dim,
            required: 2,
            reason: "cutoff must be at least 2".into(),
        });
    }
    let rho = match *spec {
        StateSpec::Coherent { alpha } => {
            check_amplitude_tail(alpha, dim)?;
            DensityMatrix::from_pure(&coherent_amplitudes(alpha, dim))
        }
        StateSpec::Cat { alpha } => {
            check_amplitude_tail(alpha, dim)?;
            let a2 = alpha.norm_sqr();
            // |α⟩ − |−α⟩ keeps the odd terms, doubled.
            let norm = 1.0 / (2.0 * (-(-2.0 * a2).exp_m1())).sqrt();
            let amps: Vec<Complex64> = coherent_amplitudes(alpha, dim)
                .into_iter()
                .enumerate()
                .map(|(n, c)| {
                    if n % 2 == 1 {
                        c * (2.0 * norm)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            DensityMatrix::from_pure(&amps)
        }
        StateSpec::Fock { n } => {
            if n >= dim {
                return Err(Error::CutoffTooSmall {
                    dim,
                    required: n + 1,
                    reason: format!("Fock state |{n}⟩ needs dimension above {n}"),
                });
            }
            let mut amps = vec![Complex64::new(0.0, 0.0); dim];
            amps[n] = Complex64::new(1.0, 0.0);
            DensityMatrix::from_pure(&amps)
        }
        StateSpec::SqueezedVacuum { xi } => {
            DensityMatrix::from_pure(&squeezed_vacuum_amplitudes(xi, dim))
        }
        StateSpec::Thermal { mean_photons } => {
            DensityMatrix::from_diagonal(&thermal_populations(mean_photons, dim))
        }
    };
    let tr = rho.trace();
    if (tr - 1.0).abs() > TAIL_TOLERANCE {
        return Err(Error::CutoffTooSmall {
            dim,
            required: spec.default_dim().max(dim + 1),
            reason: format!("truncated trace {tr} misses 1 by more than {TAIL_TOLERANCE:e}"),
        });
    }
    Ok(rho)
}

fn check_amplitude_tail(alpha: Complex64, dim: usize) -> Result<()> {
    let required = amplitude_tail_dim(alpha.norm());
    if required > dim {
        return Err(Error::CutoffTooSmall {
            dim,
            required,
            reason: format!(
                "|α|² + 6|α| + 10 exceeds the cutoff for |α| = {}",
                alpha.norm()
            ),
        });
    }
    Ok(())
}

/// Even-photon amplitudes of `S(ξ)|0⟩`:
/// `c_{2m} = (−e^{iθ} tanh r)^m √((2m)!) / (2^m m! √cosh r)`.
pub fn squeezed_vacuum_amplitudes(xi: Complex64, dim: usize) -> Vec<Complex64> {
    let r = xi.norm();
    let phase = if r > 0.0 {
        xi / r
    } else {
        Complex64::new(1.0, 0.0)
    };
    let ratio = -phase * r.tanh();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let mut c = Complex64::new(1.0 / r.cosh().sqrt(), 0.0);
    let mut m = 0usize;
    while 2 * m < dim {
        amps[2 * m] = c;
        let mf = m as f64;
        c = c * ratio * (((2.0 * mf + 1.0) * (2.0 * mf + 2.0)).sqrt() / (2.0 * (mf + 1.0)));
        m += 1;
    }
    amps
}

/// Matrix elements `⟨m|D(α)|n⟩` for `m < rows`, `n < cols`.
///
/// Entries are those of the untruncated operator, computed from the
/// coherent-state boundary and the recurrence
/// `√(m+1) D_{m+1,n} = √n D_{m,n−1} + α D_{m,n}` that follows from
/// `a D(α) = D(α)(a + α)`.
pub fn displacement_elements(alpha: Complex64, rows: usize, cols: usize) -> ComplexMatrix {
    let mut d = ComplexMatrix::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return d;
    }
    let first_col = coherent_amplitudes(alpha, rows);
    let first_row = coherent_amplitudes(-alpha.conj(), cols);
    for m in 0..rows {
        d[(m, 0)] = first_col[m];
    }
    for n in 0..cols {
        d[(0, n)] = first_row[n];
    }
    let sq: Vec<f64> = (0..rows.max(cols) + 1).map(|k| (k as f64).sqrt()).collect();
    for m in 1..rows {
        for n in 1..cols {
            d[(m, n)] = (d[(m - 1, n - 1)] * sq[n] + alpha * d[(m - 1, n)]) / sq[m];
        }
    }
    d
}

/// Real-amplitude variant of [`displacement_elements`]; `D(x)` is real for real `x`.
pub(crate) fn displacement_real(x: f64, rows: usize, cols: usize) -> DMatrix<f64> {
    let mut d = DMatrix::<f64>::zeros(rows, cols);
    if rows == 0 || cols == 0 {
        return d;
    }
    let g = (-0.5 * x * x).exp();
    let mut c = g;
    for m in 0..rows {
        d[(m, 0)] = c;
        c *= x / ((m + 1) as f64).sqrt();
    }
    let mut c = g;
    for n in 0..cols {
        d[(0, n)] = c;
        c *= -x / ((n + 1) as f64).sqrt();
    }
    let sq: Vec<f64> = (0..rows.max(cols) + 1).map(|k| (k as f64).sqrt()).collect();
    for m in 1..rows {
        for n in 1..cols {
            d[(m, n)] = (d[(m - 1, n - 1)] * sq[n] + x * d[(m - 1, n)]) / sq[m];
        }
    }
    d
}

/// `D(α)` on the `dim`-dimensional truncated space.
pub fn displacement_matrix(alpha: Complex64, dim: usize) -> Result<ComplexMatrix> {
    if dim < 2 {
        return Err(Error::CutoffTooSmall {
            dim,
            required: 2,
            reason: "cutoff must be at least 2".into(),
        });
    }
    if alpha.norm_sqr() > dim as f64 / 4.0 {
        return Err(Error::CutoffTooSmall {
            dim,
            required: (4.0 * alpha.norm_sqr()).ceil() as usize,
            reason: format!("|α|² = {} exceeds dim/4", alpha.norm_sqr()),
        });
    }
    Ok(displacement_elements(alpha, dim, dim))
}

/// `D(μ) ρ_th(n̄) D†(μ)` truncated to `dim`.
///
/// The sum over the intermediate thermal index runs past `dim` until the
/// thermal weights drop below 1e-18, so the returned entries are exact up to
/// that cutoff.
pub fn displaced_thermal(mu: Complex64, mean_photons: f64, dim: usize) -> DensityMatrix {
    let inner = thermal_support(mean_photons).max(dim);
    let pops = thermal_populations(mean_photons, inner);
    let disp = displacement_elements(mu, dim, inner);
    let mut scaled = disp.clone();
    for (j, &p) in pops.iter().enumerate() {
        scaled.column_mut(j).scale_mut(p);
    }
    DensityMatrix {
        elems: scaled * disp.adjoint(),
    }
}

fn thermal_support(mean_photons: f64) -> usize {
    if mean_photons <= 0.0 {
        return 1;
    }
    let q = mean_photons / (1.0 + mean_photons);
    ((1e-18f64).ln() / q.ln()).ceil().max(1.0) as usize + 1
}

/// Overlap `Tr(pure · mixed)` between a pure state and an arbitrary state.
pub fn fidelity(pure: &DensityMatrix, mixed: &DensityMatrix) -> Result<f64> {
    same_dim(pure, mixed)?;
    let purity = pure.purity();
    if purity < 1.0 - 1e-6 {
        return Err(Error::NotPure(purity));
    }
    let d = pure.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += pure.elems[(i, j)] * mixed.elems[(j, i)];
        }
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

/// `½ Σ |eig(a − b)|`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    same_dim(a, b)?;
    let diff = hermitian_part(&(&a.elems - &b.elems));
    let ev = SymmetricEigen::new(diff).eigenvalues;
    Ok(0.5 * ev.iter().map(|e| e.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn vacuum_is_projector() {
        let rho = build_state(&StateSpec::fock(0), 10).unwrap();
        assert_eq!(rho.get(0, 0), c(1.0, 0.0));
        let rest: f64 = rho.matrix().iter().map(|z| z.norm()).sum::<f64>() - 1.0;
        assert_eq!(rest, 0.0);
    }

    #[test]
    fn thermal_one_photon_is_geometric() {
        let rho = build_state(&StateSpec::thermal(1.0), 60).unwrap();
        for n in 0..60 {
            let want = 0.5 * 0.5f64.powi(n as i32);
            assert!((rho.get(n, n).re - want).abs() < 1e-15);
        }
        rho.validate().unwrap();
    }

    #[test]
    fn coherent_diagonal_is_poisson() {
        let rho = build_state(&StateSpec::coherent(2.0, 0.0), 40).unwrap();
        let mut fact = 1.0;
        for n in 0..40 {
            if n > 0 {
                fact *= n as f64;
            }
            let poisson = (-4.0f64).exp() * 4f64.powi(n as i32) / fact;
            assert!((rho.get(n, n).re - poisson).abs() < 1e-14);
        }
        assert!(rho.trace() >= 1.0 - 1e-10);
    }

    #[test]
    fn cutoff_rules() {
        assert!(matches!(
            build_state(&StateSpec::coherent(3.0, 0.0), 20),
            Err(Error::CutoffTooSmall { .. })
        ));
        assert!(matches!(
            build_state(&StateSpec::fock(5), 5),
            Err(Error::CutoffTooSmall { .. })
        ));
        assert!(matches!(
            build_state(&StateSpec::fock(0), 1),
            Err(Error::CutoffTooSmall { .. })
        ));
        assert!(matches!(
            build_state(&StateSpec::thermal(-0.1), 10),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            build_state(&StateSpec::cat(1e-4, 0.0), 10),
            Err(Error::InvalidSpec(_))
        ));
        // thermal tail at n̄ = 5 with 20 levels is (5/6)^20 ≈ 0.026
        assert!(matches!(
            build_state(&StateSpec::thermal(5.0), 20),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn pure_kinds_have_unit_purity() {
        let specs = [
            StateSpec::coherent(1.0, -0.5),
            StateSpec::fock(3),
            StateSpec::cat(6f64.sqrt(), 0.0),
            StateSpec::squeezed(0.69, 0.3),
        ];
        for spec in specs {
            let rho = build_state(&spec, spec.default_dim()).unwrap();
            assert!((rho.purity() - 1.0).abs() < 1e-8, "{spec:?}");
            rho.validate().unwrap();
        }
    }

    #[test]
    fn mean_photons_match_spec() {
        let specs = [
            StateSpec::coherent(1.5, 0.5),
            StateSpec::cat(2.0, 0.0),
            StateSpec::squeezed(0.8, 0.0),
            StateSpec::thermal(0.7),
        ];
        for spec in specs {
            let rho = build_state(&spec, spec.default_dim()).unwrap();
            assert!(
                (rho.mean_photons() - spec.mean_photons()).abs() < 1e-7,
                "{spec:?}"
            );
        }
    }

    #[test]
    fn build_is_deterministic() {
        let spec = StateSpec::squeezed(0.5, 1.0);
        assert_eq!(
            build_state(&spec, 30).unwrap(),
            build_state(&spec, 30).unwrap()
        );
    }

    #[test]
    fn displacement_identity_and_vacuum_overlap() {
        let d0 = displacement_matrix(c(0.0, 0.0), 8).unwrap();
        assert!((d0 - ComplexMatrix::identity(8, 8))
            .iter()
            .all(|z| z.norm() < 1e-15));
        let d1 = displacement_matrix(c(1.0, 0.0), 30).unwrap();
        assert!((d1[(0, 0)].re - (-0.5f64).exp()).abs() < 1e-10);
        assert!(matches!(
            displacement_matrix(c(3.0, 0.0), 30),
            Err(Error::CutoffTooSmall { .. })
        ));
    }

    #[test]
    fn displaced_vacuum_is_coherent() {
        let alpha = c(0.5, 0.5);
        let vac = build_state(&StateSpec::fock(0), 30).unwrap();
        let moved = vac.displaced(alpha);
        let coh = build_state(&StateSpec::Coherent { alpha }, 30).unwrap();
        assert!(trace_distance(&moved, &coh).unwrap() < 1e-8);
    }

    #[test]
    fn displacement_unitary_on_leading_block() {
        let alpha = c(1.2, -0.7);
        let dim = 80;
        let d = displacement_matrix(alpha, dim).unwrap();
        let keep = 20;
        let prod = d.adjoint() * &d;
        for i in 0..keep {
            for j in 0..keep {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - want).norm() < 1e-6, "({i},{j})");
            }
        }
    }

    #[test]
    fn displacement_matches_real_variant() {
        let a = displacement_elements(c(1.3, 0.0), 12, 15);
        let b = displacement_real(1.3, 12, 15);
        for i in 0..12 {
            for j in 0..15 {
                assert!((a[(i, j)].re - b[(i, j)]).abs() < 1e-13 * b[(i, j)].abs().max(1e-3));
                assert_eq!(a[(i, j)].im, 0.0);
            }
        }
    }

    #[test]
    fn fidelity_vacuum_thermal() {
        let vac = build_state(&StateSpec::fock(0), 60).unwrap();
        for &nbar in &[0.0, 0.3, 1.0, 2.5] {
            let th = build_state(&StateSpec::thermal(nbar), 60).unwrap();
            // geometric series: first term of the thermal diagonal
            assert!((fidelity(&vac, &th).unwrap() - 1.0 / (1.0 + nbar)).abs() < 1e-14);
        }
        let coh = build_state(&StateSpec::coherent(0.3, 0.1), 20).unwrap();
        assert!((fidelity(&coh, &coh).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn fidelity_errors() {
        let th = build_state(&StateSpec::thermal(0.5), 20).unwrap();
        let vac = build_state(&StateSpec::fock(0), 20).unwrap();
        assert!(matches!(fidelity(&th, &vac), Err(Error::NotPure(_))));
        let vac10 = build_state(&StateSpec::fock(0), 10).unwrap();
        assert!(matches!(
            fidelity(&vac, &vac10),
            Err(Error::DimMismatch(20, 10))
        ));
        assert!(matches!(
            trace_distance(&vac, &vac10),
            Err(Error::DimMismatch(20, 10))
        ));
    }

    #[test]
    fn trace_distance_examples() {
        let v = build_state(&StateSpec::fock(0), 6).unwrap();
        let one = build_state(&StateSpec::fock(1), 6).unwrap();
        assert!(trace_distance(&v, &v).unwrap() < 1e-15);
        assert!((trace_distance(&v, &one).unwrap() - 1.0).abs() < 1e-12);

        let dim = 120;
        let a = build_state(&StateSpec::thermal(0.5), dim).unwrap();
        let b = build_state(&StateSpec::thermal(0.6), dim).unwrap();
        let oracle: f64 = 0.5
            * thermal_populations(0.5, dim)
                .iter()
                .zip(thermal_populations(0.6, dim))
                .map(|(p, q)| (p - q).abs())
                .sum::<f64>();
        assert!((trace_distance(&a, &b).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn displaced_thermal_zero_temperature_is_coherent() {
        let mu = c(0.8, -0.4);
        let a = displaced_thermal(mu, 0.0, 25);
        let b = build_state(&StateSpec::Coherent { alpha: mu }, 25).unwrap();
        assert!(trace_distance(&a, &b).unwrap() < 1e-12);
    }

    #[test]
    fn squeezed_quadrature_variance() {
        // θ = 0 squeezes x = (a + a†)/√2 to e^{-2r}/2.
        let r = 0.6;
        let dim = 60;
        let rho = build_state(&StateSpec::squeezed(r, 0.0), dim).unwrap();
        let mut a = ComplexMatrix::zeros(dim, dim);
        for n in 1..dim {
            a[(n - 1, n)] = c((n as f64).sqrt(), 0.0);
        }
        let x = (&a + a.adjoint()).scale(std::f64::consts::FRAC_1_SQRT_2);
        let x2 = &x * &x;
        let var = (rho.matrix() * x2).trace().re;
        assert!((var - 0.5 * (-2.0 * r).exp()).abs() < 1e-9);
    }
}
