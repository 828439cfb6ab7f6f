//! Closed-form ideal states and their fidelities against squeezed cats.
//!
//! Both ideal states reduce to `S(r)(|0⟩ + √2 c |2⟩)` up to normalisation:
//! `a² S(r)|0⟩` has `c = −tanh r` and `a† a S(r)|0⟩` has `c = −coth r`.
//! Overlaps with `S(r′)(|α⟩ + |−α⟩)` then only need `⟨0|S(r′−r)|α⟩` and
//! `⟨2|S(r′−r)|α⟩`, which are Gaussian integrals in the position
//! representation.

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::fock::{self, FockVector};
use crate::target::{CatTarget, Parity};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IdealKind {
    /// `a² S(r)|0⟩`
    Tpss,
    /// `a† a S(r)|0⟩`
    Psas,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IdealSubtractAddState {
    pub kind: IdealKind,
    pub r: f64,
    /// `ν = −tanh r` for subtraction, `μ = coth r` for subtraction-addition.
    pub coeff: f64,
    /// `[1 + 2 coeff²]^{−1/2}`.
    pub norm: f64,
}

impl IdealSubtractAddState {
    pub fn new(kind: IdealKind, r: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(invalid("squeezing must be finite"));
        }
        let coeff = match kind {
            IdealKind::Tpss => -r.tanh(),
            IdealKind::Psas => {
                if r == 0.0 {
                    return Err(Error::SingularParameter("coth r diverges at r = 0"));
                }
                1.0 / r.tanh()
            }
        };
        Ok(IdealSubtractAddState {
            kind,
            r,
            coeff,
            norm: (1.0 + 2.0 * coeff * coeff).powf(-0.5),
        })
    }

    pub fn tpss(r: f64) -> Result<Self> {
        Self::new(IdealKind::Tpss, r)
    }

    pub fn psas(r: f64) -> Result<Self> {
        Self::new(IdealKind::Psas, r)
    }

    /// Coefficient `c` of `√2|2⟩` relative to `|0⟩` before squeezing.
    pub fn two_photon_weight(&self) -> f64 {
        match self.kind {
            IdealKind::Tpss => self.coeff,
            IdealKind::Psas => -self.coeff,
        }
    }

    /// Normalised number-basis amplitudes.
    pub fn to_fock(&self, dim: usize) -> Result<FockVector> {
        if dim < 3 {
            return Err(invalid("ideal states need dim >= 3"));
        }
        let mut amps = alloc::vec![0.0; dim];
        amps[0] = self.norm;
        amps[2] = self.norm * core::f64::consts::SQRT_2 * self.two_photon_weight();
        fock::squeeze_fock(&FockVector::from_real(&amps)?, self.r)
    }

    pub fn fidelity(&self, target: &CatTarget) -> Result<f64> {
        match self.kind {
            IdealKind::Tpss => fidelity_tpss(self.r, target),
            IdealKind::Psas => fidelity_psas(self.r, target),
        }
    }
}

/// `g = exp[−(r − r′)]`, the relative squeezing between source and target.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapParam {
    pub g: f64,
}

impl GapParam {
    pub fn new(r: f64, rprime: f64) -> Self {
        GapParam {
            g: (-(r - rprime)).exp(),
        }
    }

    /// `X = (1 + 4α²g² − g⁴)/(1 + g²)²`.
    pub fn x_factor(&self, alpha: f64) -> f64 {
        let g2 = self.g * self.g;
        (1.0 + 4.0 * alpha * alpha * g2 - g2 * g2) / ((1.0 + g2) * (1.0 + g2))
    }

    /// `8g e^{−2α²/(1+g²)}/(1+g²)`.
    pub fn prefactor(&self, alpha: f64) -> f64 {
        let g2 = self.g * self.g;
        8.0 * self.g * (-2.0 * alpha * alpha / (1.0 + g2)).exp() / (1.0 + g2)
    }
}

fn check_point(r: f64, target: &CatTarget) -> Result<()> {
    if !r.is_finite() {
        return Err(invalid("squeezing must be finite"));
    }
    target.validate()
}

/// Fidelity of the normalised `a² S(r)|0⟩` with an even squeezed cat.
/// Odd targets are orthogonal by parity and give 0.
pub fn fidelity_tpss(r: f64, target: &CatTarget) -> Result<f64> {
    check_point(r, target)?;
    if target.parity == Parity::Odd {
        return Ok(0.0);
    }
    let a = target.alpha;
    let gap = GapParam::new(r, target.rprime);
    let nu = -r.tanh();
    let n_a2 = (1.0 + 2.0 * r.tanh().powi(2)).powf(-0.5);
    let bracket = target.normalization()? * n_a2 * (1.0 + nu * gap.x_factor(a));
    Ok(gap.prefactor(a) * bracket * bracket)
}

/// Fidelity of the normalised `a† a S(r)|0⟩` with an even squeezed cat.
///
/// The `|2⟩` coefficient enters with `−coth r`; the bracket is therefore
/// `1 − μ X` with `μ = coth r`.
pub fn fidelity_psas(r: f64, target: &CatTarget) -> Result<f64> {
    check_point(r, target)?;
    if r == 0.0 {
        return Err(Error::SingularParameter("coth r diverges at r = 0"));
    }
    if target.parity == Parity::Odd {
        return Ok(0.0);
    }
    let a = target.alpha;
    let gap = GapParam::new(r, target.rprime);
    let mu = 1.0 / r.tanh();
    let n_as = (1.0 + 2.0 * mu * mu).powf(-0.5);
    let bracket = target.normalization()? * n_as * (1.0 - mu * gap.x_factor(a));
    Ok(gap.prefactor(a) * bracket * bracket)
}

/// Which number state the overlap projects onto.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XrepLevel {
    Zero,
    Two,
}

/// `⟨n|S†(r − r′)|α⟩` for `n ∈ {0, 2}`, from the Gaussian integrals
/// `∫ ψ_n(x) [S(r′−r) ψ_α](x) dx`.
///
/// With `s = r′ − r`, `⟨0|S(s)|α⟩ = exp(−|γ|²/2 − γ*² tanh s / 2)/√cosh s`
/// where `γ = α cosh s − α* sinh s`, and
/// `⟨2|S(s)|α⟩ = ⟨0|S(s)|α⟩ (α²/cosh² s − tanh s)/√2`.
pub fn xrep_overlap(level: XrepLevel, alpha: Complex64, gap: GapParam) -> Complex64 {
    let s = gap.g.ln();
    let (ch, sh, th) = (s.cosh(), s.sinh(), s.tanh());
    let gamma = alpha * ch - alpha.conj() * sh;
    let i0 = (-(0.5 * gamma.norm_sqr()) - 0.5 * gamma.conj() * gamma.conj() * th).exp() / ch.sqrt();
    match level {
        XrepLevel::Zero => i0,
        XrepLevel::Two => i0 * (alpha * alpha / (ch * ch) - th) * core::f64::consts::FRAC_1_SQRT_2,
    }
}
