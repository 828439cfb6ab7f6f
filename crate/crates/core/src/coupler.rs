//! Two-mode couplers: beam splitter (photon subtraction tap) and
//! non-degenerate parametric amplifier (photon addition tap).
//!
//! In the Heisenberg picture the quadrature vector `(x₁, p₁, x₂, p₂)` maps
//! to `V (x₁, p₁, x₂, p₂)ᵀ` with
//!
//! ```text
//!     ⎡  t   0   r   0 ⎤
//! V = ⎢  0   t   0   χ ⎥
//!     ⎢ −χ   0   t   0 ⎥
//!     ⎣  0  −r   0   t ⎦
//! ```
//!
//! Beam splitter: `t = √T`, `r = χ = √(1−T)`, i.e. `a₁ → t a₁ + r a₂`.
//! Amplifier: `t = √G`, `r = −χ = √(G−1)`, i.e. `a₁ → t a₁ + r a₂†`.
//! For the beam splitter the lower-left block is the familiar `−r`; for the
//! amplifier it has to carry `−χ` on `x` and `−r` on `p` or `V` would not
//! preserve the symplectic form.

use crate::error::{invalid, Result};
use crate::linalg::Mat;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CouplerKind {
    BeamSplitter,
    Amplifier,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplerParams {
    pub kind: CouplerKind,
    /// Transmissivity `T ∈ (0, 1]` or gain `G ≥ 1`.
    pub strength: f64,
}

impl CouplerParams {
    pub fn beam_splitter(transmissivity: f64) -> Result<Self> {
        if !(transmissivity > 0.0 && transmissivity <= 1.0) {
            return Err(invalid("beam-splitter transmissivity must lie in (0, 1]"));
        }
        Ok(CouplerParams {
            kind: CouplerKind::BeamSplitter,
            strength: transmissivity,
        })
    }

    pub fn amplifier(gain: f64) -> Result<Self> {
        if !(gain >= 1.0 && gain.is_finite()) {
            return Err(invalid("amplifier gain must be finite and at least 1"));
        }
        Ok(CouplerParams {
            kind: CouplerKind::Amplifier,
            strength: gain,
        })
    }

    /// Diagonal amplitude `t`.
    pub fn t(&self) -> f64 {
        self.strength.sqrt()
    }

    /// Off-diagonal `x` coupling `r`.
    pub fn r(&self) -> f64 {
        match self.kind {
            CouplerKind::BeamSplitter => (1.0 - self.strength).sqrt(),
            CouplerKind::Amplifier => (self.strength - 1.0).sqrt(),
        }
    }

    /// Off-diagonal `p` coupling `χ`.
    pub fn chi(&self) -> f64 {
        match self.kind {
            CouplerKind::BeamSplitter => self.r(),
            CouplerKind::Amplifier => -self.r(),
        }
    }

    /// `true` when the coupler acts as the identity.
    pub fn is_trivial(&self) -> bool {
        self.strength == 1.0
    }

    /// The 4×4 quadrature transform on `(x₁, p₁, x₂, p₂)`.
    pub fn matrix(&self) -> Mat {
        self.embedded(2, 0, 1)
    }

    /// The transform acting on modes `a` and `b` of an `modes`-mode system.
    pub fn embedded(&self, modes: usize, a: usize, b: usize) -> Mat {
        assert!(a < modes && b < modes && a != b);
        let (t, r, chi) = (self.t(), self.r(), self.chi());
        let mut m = Mat::identity(2 * modes);
        let (xa, pa, xb, pb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
        m[(xa, xa)] = t;
        m[(pa, pa)] = t;
        m[(xb, xb)] = t;
        m[(pb, pb)] = t;
        m[(xa, xb)] = r;
        m[(pa, pb)] = chi;
        m[(xb, xa)] = -chi;
        m[(pb, pa)] = -r;
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symplectic_form;

    #[test]
    fn derived_parameters() {
        let bs = CouplerParams::beam_splitter(0.99).unwrap();
        assert!((bs.t() - 0.99f64.sqrt()).abs() < 1e-15);
        assert_eq!(bs.r(), bs.chi());
        let amp = CouplerParams::amplifier(1.01).unwrap();
        assert!((amp.r() + amp.chi()).abs() < 1e-15);
        assert!((amp.r() - 0.1).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(CouplerParams::beam_splitter(0.0).is_err());
        assert!(CouplerParams::beam_splitter(1.2).is_err());
        assert!(CouplerParams::amplifier(0.9).is_err());
        assert!(CouplerParams::amplifier(f64::INFINITY).is_err());
    }

    #[test]
    fn beam_splitter_is_orthogonal() {
        let v = CouplerParams::beam_splitter(0.7).unwrap().matrix();
        assert!((&v * &v.transpose()).max_abs_diff(&Mat::identity(4)) < 1e-12);
    }

    #[test]
    fn both_kinds_are_symplectic() {
        let om = symplectic_form(2);
        for c in [
            CouplerParams::beam_splitter(0.3).unwrap(),
            CouplerParams::amplifier(1.7).unwrap(),
        ] {
            let v = c.matrix();
            assert!(om.congruence(&v).max_abs_diff(&om) < 1e-12, "{c:?}");
        }
        let om3 = symplectic_form(3);
        let v = CouplerParams::amplifier(1.2).unwrap().embedded(3, 0, 2);
        assert!(om3.congruence(&v).max_abs_diff(&om3) < 1e-12);
    }
}
