//! Phase-space quasi-probabilities in `(x, p)` quadrature units, measure
//! `dx dp`, normalised so that `∫∫ W = 1` and `2π ∫∫ W² = 1` for pure
//! states.

mod grid;
mod npss;

pub use grid::{overlap_fidelity, GridSpec, WignerGrid, BOUNDARY_WARN};
pub use npss::{wigner_npss, NpssParams, NpssState, MAX_NPSS_ORDER};

use alloc::vec;
#[allow(unused_imports)]
use num_traits::Float;

use core::f64::consts::{FRAC_1_PI, SQRT_2};

use num_complex::Complex64;

use crate::analytic::IdealSubtractAddState;
use crate::error::Result;
use crate::fock::DensityMatrix;
use crate::target::CatTarget;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: f64,
    pub p: f64,
}

impl PhasePoint {
    pub fn new(x: f64, p: f64) -> Self {
        PhasePoint { x, p }
    }

    /// Coherent amplitude `β = (x + ip)/√2` of the point.
    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.x, self.p) / SQRT_2
    }

    pub fn from_amplitude(beta: Complex64) -> Self {
        PhasePoint {
            x: SQRT_2 * beta.re,
            p: SQRT_2 * beta.im,
        }
    }

    pub fn neg(&self) -> Self {
        PhasePoint {
            x: -self.x,
            p: -self.p,
        }
    }
}

/// Wigner function of `N S(r)(|0⟩ − √2 τ|2⟩)`, i.e. of `a² S(r)|0⟩`
/// (`τ = tanh r`) or `a† a S(r)|0⟩` (`τ = coth r`).
///
/// With `Z = e^{2r}β_r² + e^{−2r}β_i²` and `Z′ = −4e^{2r}β_r² + 4e^{−2r}β_i²`
/// for the amplitude `β`,
/// `W = N²/π e^{−2Z} [1 + 2τ{Z′ + τ[1 + 8Z(Z − 1)]}]`, `N² = 1/(1 + 2τ²)`.
pub fn wigner_ideal(state: &IdealSubtractAddState, pt: PhasePoint) -> f64 {
    let tau = -state.two_photon_weight();
    let beta = pt.amplitude();
    let (er, emr) = ((2.0 * state.r).exp(), (-2.0 * state.r).exp());
    let (br2, bi2) = (beta.re * beta.re, beta.im * beta.im);
    let z = er * br2 + emr * bi2;
    let zp = -4.0 * er * br2 + 4.0 * emr * bi2;
    let poly = 1.0 + 2.0 * tau * (zp + tau * (1.0 + 8.0 * z * (z - 1.0)));
    state.norm * state.norm * FRAC_1_PI * (-2.0 * z).exp() * poly
}

/// Wigner function of the ideal two-photon-subtracted squeezed vacuum.
pub fn wigner_tpss(pt: PhasePoint, r: f64) -> Result<f64> {
    Ok(wigner_ideal(&IdealSubtractAddState::tpss(r)?, pt))
}

/// Wigner function of the ideal subtracted-then-added squeezed vacuum.
pub fn wigner_psas(pt: PhasePoint, r: f64) -> Result<f64> {
    Ok(wigner_ideal(&IdealSubtractAddState::psas(r)?, pt))
}

/// Wigner function of `N± S(r′)(|α⟩ ± |−α⟩)` with `g = e^{−2r′}`:
///
/// `N²/π e^{−gp²} {e^{−(x−√(2g)α)²/g} + e^{−(x+√(2g)α)²/g} ± 2e^{−x²/g} cos(2√(2g)αp)}`.
pub fn wigner_sscs(x: f64, p: f64, target: &CatTarget) -> Result<f64> {
    let n = target.normalization()?;
    Ok(sscs_unchecked(x, p, target, n))
}

#[inline]
pub(crate) fn sscs_unchecked(x: f64, p: f64, target: &CatTarget, norm: f64) -> f64 {
    let g = target.width();
    let c = (2.0 * g).sqrt() * target.alpha;
    let lobes = (-(x - c) * (x - c) / g).exp() + (-(x + c) * (x + c) / g).exp();
    let fringe = 2.0 * (-x * x / g).exp() * (2.0 * c * p).cos();
    norm * norm * FRAC_1_PI * (-g * p * p).exp() * (lobes + target.parity.sign() * fringe)
}

/// Wigner function of a number-basis density matrix at one point.
///
/// Uses the Laguerre recursion for the `|m⟩⟨n|` components, equivalent to
/// `W(β) = (2/π) Tr[ρ D(β) (−1)^{a†a} D†(β)]` in amplitude units.
pub fn fock_wigner(rho: &DensityMatrix, x: f64, p: f64) -> f64 {
    let d = rho.dim();
    let a2 = Complex64::new(x, p) * SQRT_2;
    let mut wl = vec![Complex64::new(0.0, 0.0); d];
    wl[0] = Complex64::new((-0.5 * a2.norm_sqr()).exp() * FRAC_1_PI, 0.0);
    let mut w = rho.get(0, 0).re * wl[0].re;
    for n in 1..d {
        wl[n] = a2 * wl[n - 1] / (n as f64).sqrt();
        w += 2.0 * (rho.get(0, n) * wl[n]).re;
    }
    let a2c = a2.conj();
    for m in 1..d {
        let sm = (m as f64).sqrt();
        let mut temp = wl[m];
        wl[m] = (a2c * temp - wl[m - 1] * sm) / sm;
        w += (rho.get(m, m) * wl[m]).re;
        for n in m + 1..d {
            let next = (a2 * wl[n - 1] - temp * sm) / (n as f64).sqrt();
            temp = wl[n];
            wl[n] = next;
            w += 2.0 * (rho.get(m, n) * wl[n]).re;
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{self, FockVector};

    #[test]
    fn vacuum_forms() {
        let v = wigner_sscs(0.3, -0.2, &CatTarget::even(0.0, 0.0)).unwrap();
        assert!((v - (-0.13f64).exp() * FRAC_1_PI).abs() < 1e-15);
        let rho = DensityMatrix::from_pure(&FockVector::vacuum(4).unwrap());
        assert!((fock_wigner(&rho, 0.3, -0.2) - v).abs() < 1e-15);
    }

    #[test]
    fn coherent_state_peaks_where_expected() {
        let a = Complex64::new(0.4, 0.8);
        let rho = DensityMatrix::from_pure(&fock::coherent_fock(a, 40).unwrap());
        let (x0, p0) = (SQRT_2 * 0.4, SQRT_2 * 0.8);
        assert!((fock_wigner(&rho, x0, p0) - FRAC_1_PI).abs() < 1e-12);
        let off = fock_wigner(&rho, x0 + 0.5, p0 - 0.25);
        assert!((off - FRAC_1_PI * (-0.3125f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn fringe_zero_crossings() {
        let t = CatTarget::even(1.3, -0.2);
        let g = t.width();
        let c = (2.0 * g).sqrt() * t.alpha;
        // at x = 0 the lobes are exp(−2α²)-small relative to the fringe term
        for k in 0..3 {
            let p = core::f64::consts::PI * (2 * k + 1) as f64 / (4.0 * c);
            let w = wigner_sscs(0.0, p, &t).unwrap();
            let lobes = 2.0
                * (-c * c / g).exp()
                * (-g * p * p).exp()
                * FRAC_1_PI
                * t.normalization().unwrap().powi(2);
            assert!((w - lobes).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn closed_forms_match_fock() {
        let pts = [
            (0.0, 0.0),
            (0.7, -0.3),
            (-1.9, 0.45),
            (2.6, 0.1),
            (0.2, 1.1),
        ];
        let r = -0.7;
        let tp = DensityMatrix::from_pure(&fock::photon_subtracted_squeezed(r, 2, 64).unwrap());
        let ps = DensityMatrix::from_pure(&fock::subtract_add_squeezed(r, 64).unwrap());
        let target = CatTarget::odd(1.4, -0.3);
        let cat = DensityMatrix::from_pure(&fock::cat_target_fock(&target, 64).unwrap());
        for (x, p) in pts {
            let pt = PhasePoint::new(x, p);
            let (a, b) = (wigner_tpss(pt, r).unwrap(), fock_wigner(&tp, x, p));
            assert!((a - b).abs() < 1e-8, "({x},{p}) {a} {b}");
            assert!((wigner_psas(pt, r).unwrap() - fock_wigner(&ps, x, p)).abs() < 1e-8);
            assert!((wigner_sscs(x, p, &target).unwrap() - fock_wigner(&cat, x, p)).abs() < 1e-8);
        }
    }

    #[test]
    fn tpss_fringes() {
        assert!(wigner_tpss(PhasePoint::new(0.0, 0.0), -0.7).unwrap() > 0.0);
        assert!(wigner_tpss(PhasePoint::new(0.0, 0.576), -0.7).unwrap() < 0.0);
        assert!(wigner_psas(PhasePoint::new(0.0, 0.0), 0.0).is_err());
        assert!(wigner_sscs(0.0, 0.0, &CatTarget::odd(0.0, 0.0)).is_err());
    }
}
