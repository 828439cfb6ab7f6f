//! Target states: squeezed superpositions of coherent states.

use crate::error::{invalid, Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity of an `n`-photon state.
    pub fn of(n: u32) -> Parity {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// `+1` for even, `−1` for odd.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// `N S(r′)(|α⟩ ± |−α⟩)` with real `α ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatTarget {
    pub alpha: f64,
    pub rprime: f64,
    pub parity: Parity,
}

impl CatTarget {
    pub fn even(alpha: f64, rprime: f64) -> Self {
        CatTarget {
            alpha,
            rprime,
            parity: Parity::Even,
        }
    }

    pub fn odd(alpha: f64, rprime: f64) -> Self {
        CatTarget {
            alpha,
            rprime,
            parity: Parity::Odd,
        }
    }

    pub fn new(alpha: f64, rprime: f64, parity: Parity) -> Self {
        CatTarget {
            alpha,
            rprime,
            parity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || !self.rprime.is_finite() {
            return Err(invalid("cat target parameters must be finite"));
        }
        if self.alpha < 0.0 {
            return Err(invalid("cat amplitude must be non-negative"));
        }
        if self.parity == Parity::Odd && self.alpha == 0.0 {
            return Err(Error::DegenerateState("odd cat with zero amplitude"));
        }
        Ok(())
    }

    /// `⟨α|∓α⟩` sign-weighted overlap term `1 ± e^{−2α²}`.
    pub fn overlap_term(&self) -> f64 {
        1.0 + self.parity.sign() * (-2.0 * self.alpha * self.alpha).exp()
    }

    /// Normalisation `N± = [2 ± 2e^{−2α²}]^{−1/2}`.
    pub fn normalization(&self) -> Result<f64> {
        self.validate()?;
        let t = 2.0 * self.overlap_term();
        if t <= 0.0 {
            return Err(Error::DegenerateState("odd cat with vanishing norm"));
        }
        Ok(t.powf(-0.5))
    }

    /// Width parameter `g = e^{−2r′}` of the target's Wigner function.
    pub fn width(&self) -> f64 {
        crate::convention::cat_width(self.rprime)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizations() {
        assert!((CatTarget::even(0.0, 0.0).normalization().unwrap() - 0.5).abs() < 1e-15);
        let odd = CatTarget::odd(1.0, 0.0).normalization().unwrap();
        assert!((odd - (2.0 - 2.0 * (-2.0f64).exp()).powf(-0.5)).abs() < 1e-15);
        assert!(matches!(
            CatTarget::odd(0.0, 0.3).normalization(),
            Err(Error::DegenerateState(_))
        ));
        assert!(CatTarget::even(-1.0, 0.0).validate().is_err());
    }

    #[test]
    fn parity_of_photon_number() {
        assert_eq!(Parity::of(4), Parity::Even);
        assert_eq!(Parity::of(3), Parity::Odd);
    }
}
