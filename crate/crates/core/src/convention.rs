//! Quadrature and squeezing conventions shared by every back-end.
//!
//! * Quadratures are `x = (a + a†)/√2`, `p = (a − a†)/(i√2)`, so `[x, p] = i`
//!   and the vacuum has variance 1/2 in each. The vacuum Wigner function is
//!   `exp(−x² − p²)/π` with measure `dx dp`.
//! * The squeezing operator is `S(r) = exp[(r/2)(a² − a†²)]`, which gives
//!   `S†(r) x S(r) = e^{−r} x`. Hence `S(r)|0⟩` has
//!   `V_x = e^{−2r}/2` and `V_p = e^{2r}/2`: negative `r` squeezes `p` and
//!   stretches the state along `x`, where real-amplitude cats live.
//! * A coherent state `|α⟩` sits at `x = √2 Re α`, `p = √2 Im α`.
//! * The squeezed cat `S(r′)(|α⟩ ± |−α⟩)` has Wigner width parameter
//!   `g = e^{−2r′}` (x-variance `g/2`).

#[allow(unused_imports)] // redundant when std is linked
use num_traits::Float;

/// `x`-variance of `S(r)|0⟩`.
pub fn x_variance(r: f64) -> f64 {
    0.5 * (-2.0 * r).exp()
}

/// `p`-variance of `S(r)|0⟩`.
pub fn p_variance(r: f64) -> f64 {
    0.5 * (2.0 * r).exp()
}

/// Width parameter of a squeezed cat with target squeezing `r′`.
pub fn cat_width(rprime: f64) -> f64 {
    (-2.0 * rprime).exp()
}

/// Phase-space position of `|α⟩` for a real amplitude.
pub fn coherent_x(alpha: f64) -> f64 {
    core::f64::consts::SQRT_2 * alpha
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_r_stretches_x() {
        assert!(x_variance(-0.7) > 0.5);
        assert!(p_variance(-0.7) < 0.5);
        assert!((x_variance(-0.7) * p_variance(-0.7) - 0.25).abs() < 1e-15);
    }
}
