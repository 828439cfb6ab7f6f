//! N-photon-subtracted squeezed vacuum.
//!
//! Subtracting `N` photons from `S(r)|0⟩` with a beam splitter of
//! transmissivity `T` and a photon-number-resolving detector leaves
//! `a^N S(r_eff)|0⟩` with `tanh|r_eff| = R = T tanh|r|`. Its Wigner function is
//!
//! `W ∝ exp(−λx² − p²/λ) Σ_k (−2R)^k / (k! [(N−k)!]²) |H_{N−k}(i√(Rλ)(x + ip/λ))|²`
//!
//! with `λ = (1 − R)/(1 + R)`. The prefactor is fixed numerically.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::grid::{GridSpec, WignerGrid};
use super::PhasePoint;
use crate::error::{invalid, Error, Result};
use crate::fock::{self, FockVector};
use crate::hermite::hermite_table;
use crate::target::Parity;

/// Hermite orders above this are refused.
pub const MAX_NPSS_ORDER: u32 = 15;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NpssParams {
    pub n: u32,
    /// Effective parameter `R ∈ (0, 1)`.
    pub r_eff: f64,
    /// `λ = (1 − R)/(1 + R)`.
    pub lambda: f64,
}

impl NpssParams {
    pub fn new(n: u32, r_eff: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("at least one photon must be subtracted"));
        }
        if n > MAX_NPSS_ORDER {
            return Err(Error::OverflowGuard {
                order: n,
                max: MAX_NPSS_ORDER,
            });
        }
        if !(r_eff > 0.0 && r_eff < 1.0) {
            return Err(invalid("effective parameter R must lie in (0, 1)"));
        }
        Ok(NpssParams {
            n,
            r_eff,
            lambda: (1.0 - r_eff) / (1.0 + r_eff),
        })
    }

    /// `R = T tanh|r|` for source squeezing `r` and tap transmissivity `T`.
    pub fn from_source(n: u32, transmissivity: f64, r: f64) -> Result<Self> {
        if !(transmissivity > 0.0 && transmissivity <= 1.0) {
            return Err(invalid("transmissivity must lie in (0, 1]"));
        }
        Self::new(n, transmissivity * r.abs().tanh())
    }

    /// Squeezing of the equivalent ideal state, negative so the state is
    /// stretched along `x`.
    pub fn effective_squeezing(&self) -> f64 {
        -self.r_eff.atanh()
    }

    pub fn parity(&self) -> Parity {
        Parity::of(self.n)
    }

    /// Grid that holds the state with negligible weight outside.
    pub fn natural_grid(&self) -> GridSpec {
        let reach = (2.0 * self.n as f64 + 1.0).sqrt() + 6.5;
        let sl = self.lambda.sqrt();
        let (xh, ph) = (reach / sl, reach * sl);
        GridSpec {
            x_min: -xh,
            x_max: xh,
            nx: 601,
            p_min: -ph,
            p_max: ph,
            np: 601,
        }
    }

    /// `a^N S(r_eff)|0⟩` in the number basis.
    pub fn to_fock(&self, dim: usize) -> Result<FockVector> {
        fock::photon_subtracted_squeezed(self.effective_squeezing(), self.n, dim)
    }
}

/// Unnormalised sum, without the overall constant.
pub fn wigner_npss(pt: PhasePoint, params: &NpssParams) -> f64 {
    let (n, rr, lam) = (params.n, params.r_eff, params.lambda);
    let z = Complex64::new(0.0, (rr * lam).sqrt()) * Complex64::new(pt.x, pt.p / lam);
    let h = hermite_table(n, z);
    let mut sum = 0.0;
    let mut kfact = 1.0;
    let mut pow = 1.0;
    for k in 0..=n {
        if k > 0 {
            kfact *= k as f64;
            pow *= -2.0 * rr;
        }
        let m = (n - k) as usize;
        let mf = factorial(m);
        sum += pow / (kfact * mf * mf) * h[m].norm_sqr();
    }
    (-lam * pt.x * pt.x - pt.p * pt.p / lam).exp() * sum
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// NPSS with its normalisation constant fixed by integrating over
/// [`NpssParams::natural_grid`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NpssState {
    pub params: NpssParams,
    scale: f64,
}

impl NpssState {
    pub fn new(params: NpssParams) -> Result<Self> {
        let raw = WignerGrid::from_fn(params.natural_grid(), "", |x, p| {
            wigner_npss(PhasePoint::new(x, p), &params)
        });
        let total = raw.integrate();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::DegenerateState(
                "NPSS Wigner function does not normalise",
            ));
        }
        Ok(NpssState {
            params,
            scale: 1.0 / total,
        })
    }

    pub fn eval(&self, pt: PhasePoint) -> f64 {
        self.scale * wigner_npss(pt, &self.params)
    }

    pub fn grid(&self, spec: GridSpec) -> WignerGrid {
        let meta = alloc::format!("npss N={} R={}", self.params.n, self.params.r_eff);
        WignerGrid::from_fn(spec, meta, |x, p| self.eval(PhasePoint::new(x, p)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::DensityMatrix;
    use crate::wigner::{fock_wigner, wigner_tpss};

    #[test]
    fn parameter_guards() {
        assert!(NpssParams::new(0, 0.6).is_err());
        assert!(matches!(
            NpssParams::new(16, 0.6),
            Err(Error::OverflowGuard { order: 16, max: 15 })
        ));
        assert!(NpssParams::new(3, 1.0).is_err());
        let p = NpssParams::from_source(2, 0.99, -0.7).unwrap();
        assert!((p.r_eff - 0.99 * 0.7f64.tanh()).abs() < 1e-15);
        assert!(p.lambda > 0.0 && p.lambda < 1.0);
    }

    #[test]
    fn matches_fock_reconstruction() {
        for n in [1, 2, 3, 5] {
            let params = NpssParams::new(n, 0.6).unwrap();
            let st = NpssState::new(params).unwrap();
            let v = params.to_fock(96).unwrap();
            let rho = DensityMatrix::from_pure(&v);
            for (x, p) in [(0.0, 0.0), (1.3, 0.2), (-2.1, -0.4), (3.0, 0.05)] {
                let a = st.eval(PhasePoint::new(x, p));
                let b = fock_wigner(&rho, x, p);
                assert!((a - b).abs() < 1e-9, "N={n} ({x},{p}): {a} vs {b}");
            }
            let parity_zero = if n % 2 == 0 { 1 } else { 0 };
            assert!(v
                .amps()
                .iter()
                .skip(parity_zero)
                .step_by(2)
                .all(|c| c.norm() == 0.0));
        }
    }

    #[test]
    fn two_photon_case_is_tpss() {
        let r = -0.7;
        let params = NpssParams::from_source(2, 1.0, r).unwrap();
        let st = NpssState::new(params).unwrap();
        for (x, p) in [(0.0, 0.0), (1.0, 0.3), (-2.2, 0.1)] {
            let pt = PhasePoint::new(x, p);
            assert!((st.eval(pt) - wigner_tpss(pt, r).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn point_symmetry() {
        let st = NpssState::new(NpssParams::new(7, 0.6).unwrap()).unwrap();
        for (x, p) in [(0.4, 0.3), (2.5, -0.7), (-5.0, 0.01)] {
            let pt = PhasePoint::new(x, p);
            let (a, b) = (st.eval(pt), st.eval(pt.neg()));
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300), "{a} {b}");
        }
    }
}
