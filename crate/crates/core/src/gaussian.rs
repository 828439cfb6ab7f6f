//! Covariance-matrix simulation of heralded subtraction and addition.
//!
//! The signal `S(r)|0⟩` meets one vacuum ancilla per stage through a
//! [`CouplerParams`] transform; every ancilla then goes to an on/off detector
//! and the run is kept when all of them click. Writing the click projector
//! as `1 − |0⟩⟨0|` and expanding the product turns the conditional Wigner
//! function into a signed sum of Gaussians, one per subset `S` of ancillas
//! projected onto vacuum:
//!
//! `W = (1/N) Σ_S (−2)^{|S|} √(|Σ_S| / |Σ|) G[A_S]`,
//! `Σ_S = (Σ⁻¹ + Π_S)⁻¹`, `Π_S = 2 𝟙` on the quadratures of `S`,
//!
//! where `A_S` is the signal block of `Σ_S` and `N` the success probability.
//! Detector efficiency `η` acts as a loss beam splitter in front of each
//! detector, applied after the couplers.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use core::f64::consts::PI;

use crate::coupler::CouplerParams;
use crate::error::{invalid, Error, Result};
use crate::linalg::{is_physical_covariance, Mat};
use crate::target::{CatTarget, Parity};
use crate::wigner::{self, GridSpec, WignerGrid};

/// Largest accepted condition number when inverting a covariance.
pub const MAX_CONDITION: f64 = 1e12;

/// Heralding probabilities below this are treated as zero.
pub const MIN_PROBABILITY: f64 = 1e-14;

/// Supported number of heralding stages.
pub const MAX_STAGES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorModel {
    pub eta: f64,
}

impl DetectorModel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return Err(invalid("detector efficiency must lie in (0, 1]"));
        }
        Ok(DetectorModel { eta })
    }

    pub fn ideal() -> Self {
        DetectorModel { eta: 1.0 }
    }
}

/// Zero-mean Gaussian state over `(x₁, p₁, x₂, p₂, …)`, mode 0 the signal.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiModeGaussian {
    pub cov: Mat,
}

impl MultiModeGaussian {
    pub fn new(cov: Mat) -> Result<Self> {
        if !cov.is_square() || cov.rows() % 2 != 0 || cov.rows() == 0 {
            return Err(invalid("covariance must be 2M×2M"));
        }
        if !is_physical_covariance(&cov, 1e-10) {
            return Err(invalid("covariance violates the uncertainty principle"));
        }
        Ok(MultiModeGaussian { cov })
    }

    /// `S(r)|0⟩ ⊗ |0⟩^{⊗ ancillas}`: `diag(V_x, V_p, ½, ½, …)`.
    pub fn squeezed_with_vacua(r: f64, ancillas: usize) -> Self {
        let mut d = alloc::vec![0.5; 2 * (ancillas + 1)];
        d[0] = crate::convention::x_variance(r);
        d[1] = crate::convention::p_variance(r);
        MultiModeGaussian { cov: Mat::diag(&d) }
    }

    pub fn modes(&self) -> usize {
        self.cov.rows() / 2
    }

    pub fn transformed(&self, v: &Mat) -> Self {
        MultiModeGaussian {
            cov: self.cov.congruence(v),
        }
    }

    /// Loss `η` on every mode except the signal:
    /// `Σ → Ξ Σ Ξ + (1 − η)/2` on the ancilla diagonal, `Ξ = diag(1, 1, √η, …)`.
    pub fn with_ancilla_loss(&self, eta: f64) -> Self {
        if eta == 1.0 {
            return self.clone();
        }
        let n = self.cov.rows();
        let s = eta.sqrt();
        let scale = |i: usize| if i < 2 { 1.0 } else { s };
        let mut c = self.cov.clone();
        for i in 0..n {
            for j in 0..n {
                c[(i, j)] *= scale(i) * scale(j);
            }
            if i >= 2 {
                c[(i, i)] += 0.5 * (1.0 - eta);
            }
        }
        MultiModeGaussian { cov: c }
    }
}

/// Prepared, immutable experiment: couplers applied, detectors dressed.
#[derive(Clone, Debug, PartialEq)]
pub struct Pipeline {
    pub r: f64,
    pub stages: Vec<CouplerParams>,
    pub detector: DetectorModel,
    /// Input covariance.
    pub initial: MultiModeGaussian,
    /// Combined transform `V_K ⋯ V_1`.
    pub transform: Mat,
    /// Covariance seen by the detectors.
    pub dressed: MultiModeGaussian,
}

/// Stage `k` couples the signal to ancilla `k + 1`.
pub fn build_experiment(r: f64, stages: &[CouplerParams], det: DetectorModel) -> Result<Pipeline> {
    if !r.is_finite() {
        return Err(invalid("squeezing must be finite"));
    }
    if stages.is_empty() || stages.len() > MAX_STAGES {
        return Err(invalid(format!(
            "between 1 and {MAX_STAGES} stages are supported"
        )));
    }
    for s in stages {
        // re-validate in case the struct was built by hand
        match s.kind {
            crate::coupler::CouplerKind::BeamSplitter => CouplerParams::beam_splitter(s.strength)?,
            crate::coupler::CouplerKind::Amplifier => CouplerParams::amplifier(s.strength)?,
        };
    }
    let det = DetectorModel::new(det.eta)?;
    let modes = stages.len() + 1;
    let initial = MultiModeGaussian::squeezed_with_vacua(r, stages.len());
    let mut transform = Mat::identity(2 * modes);
    for (k, s) in stages.iter().enumerate() {
        transform = &s.embedded(modes, 0, k + 1) * &transform;
    }
    let dressed = initial.transformed(&transform).with_ancilla_loss(det.eta);
    Ok(Pipeline {
        r,
        stages: stages.to_vec(),
        detector: det,
        initial,
        transform,
        dressed,
    })
}

/// One signed Gaussian term.
#[derive(Clone, Debug, PartialEq)]
pub struct MixtureComponent {
    /// `(−2)^{|S|} √(|Σ_S|/|Σ|)`; the weights sum to the success probability.
    pub weight: f64,
    /// Signal covariance `A_S`.
    pub cov: Mat,
    /// Ancillas projected onto vacuum, as a bit mask (bit `k` = stage `k`).
    pub vacuum_mask: u32,
}

/// Conditional single-mode state as a signed sum of Gaussians.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedGaussianMixture {
    pub components: Vec<MixtureComponent>,
    /// Sum of the weights: the probability that every detector clicks.
    pub probability: f64,
}

fn gaussian_2(inv: &Mat, det: f64, x: f64, p: f64) -> f64 {
    let q = inv[(0, 0)] * x * x + 2.0 * inv[(0, 1)] * x * p + inv[(1, 1)] * p * p;
    (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
}

impl SignedGaussianMixture {
    /// Single Gaussian with unit weight.
    pub fn gaussian(cov: Mat) -> Result<Self> {
        if cov.rows() != 2 || !cov.is_symmetric(1e-12) || !(cov.det() > 0.0) {
            return Err(invalid(
                "single-mode covariance must be 2×2 symmetric positive definite",
            ));
        }
        Ok(SignedGaussianMixture {
            components: alloc::vec![MixtureComponent {
                weight: 1.0,
                cov,
                vacuum_mask: 0
            }],
            probability: 1.0,
        })
    }

    /// Normalised conditional Wigner function.
    pub fn wigner(&self, x: f64, p: f64) -> f64 {
        self.evaluator()(x, p)
    }

    fn evaluator(&self) -> impl Fn(f64, f64) -> f64 + '_ {
        let pre: Vec<(f64, Mat, f64)> = self
            .components
            .iter()
            .map(|c| {
                let det = c.cov.det();
                let inv = c
                    .cov
                    .inverse_with_condition()
                    .map(|(m, _)| m)
                    .unwrap_or_else(|_| Mat::zeros(2, 2));
                (c.weight / self.probability, inv, det)
            })
            .collect();
        move |x, p| {
            pre.iter()
                .map(|(w, inv, det)| w * gaussian_2(inv, *det, x, p))
                .sum()
        }
    }

    /// All component covariances are diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.components.iter().all(|c| {
            let scale = c.cov[(0, 0)].abs().max(c.cov[(1, 1)].abs());
            c.cov[(0, 1)].abs() <= 1e-12 * scale && c.cov[(1, 0)].abs() <= 1e-12 * scale
        })
    }

    /// `(⟨x²⟩, ⟨p²⟩)` of the normalised state.
    pub fn second_moments(&self) -> (f64, f64) {
        let mut m = (0.0, 0.0);
        for c in &self.components {
            m.0 += c.weight * c.cov[(0, 0)];
            m.1 += c.weight * c.cov[(1, 1)];
        }
        (m.0 / self.probability, m.1 / self.probability)
    }

    /// Grid wide enough for every component and the given extra reach.
    pub fn default_grid(&self, extra: f64, step: f64) -> Result<GridSpec> {
        let mut sx: f64 = 0.5;
        let mut sp: f64 = 0.5;
        for c in &self.components {
            sx = sx.max(c.cov[(0, 0)]);
            sp = sp.max(c.cov[(1, 1)]);
        }
        GridSpec::symmetric(9.0 * sx.sqrt() + extra, 9.0 * sp.sqrt() + extra, step)
    }
}

/// Conditions on every detector clicking.
pub fn condition_clicks(pl: &Pipeline) -> Result<SignedGaussianMixture> {
    let k = pl.stages.len();
    let sig_inv = pl.dressed.cov.inverse_guarded(MAX_CONDITION)?;
    let det_full = pl.dressed.cov.det();
    let mut components = Vec::with_capacity(1 << k);
    for mask in 0u32..(1 << k) {
        let mut m = sig_inv.clone();
        for j in 0..k {
            if mask & (1 << j) != 0 {
                let (xi, pi) = (2 * (j + 1), 2 * (j + 1) + 1);
                m[(xi, xi)] += 2.0;
                m[(pi, pi)] += 2.0;
            }
        }
        let sigma_s = m.inverse_guarded(MAX_CONDITION)?;
        let c = (sigma_s.det() / det_full).sqrt();
        let sign = if mask.count_ones() % 2 == 1 {
            -1.0
        } else {
            1.0
        };
        let weight = sign * 2f64.powi(mask.count_ones() as i32) * c;
        components.push(MixtureComponent {
            weight,
            cov: sigma_s.block(0, 0, 2, 2),
            vacuum_mask: mask,
        });
    }
    let probability: f64 = components.iter().map(|c| c.weight).sum();
    if !(probability >= MIN_PROBABILITY) {
        return Err(Error::ZeroProbability { probability });
    }
    Ok(SignedGaussianMixture {
        components,
        probability,
    })
}

/// Probability that every detector clicks, clamped to `[0, 1]`.
pub fn success_probability(pl: &Pipeline) -> Result<f64> {
    match condition_clicks(pl) {
        Ok(m) => Ok(m.probability.clamp(0.0, 1.0)),
        Err(Error::ZeroProbability { .. }) => Ok(0.0),
        Err(e) => Err(e),
    }
}

/// `2π ∫ G[diag(μ, ν)] W_cat` for a squeezed cat of width `g = e^{−2r′}`:
///
/// `2[(1 ± e^{−2α²}) √((g + 2μ)(1/g + 2ν))]^{−1}
///  × [exp(−2α²/(1 + 2μ/g)) ± exp(−2α²/(1 + 1/(2gν)))]`.
pub fn diagonal_overlap(mu: f64, nu: f64, target: &CatTarget) -> f64 {
    let g = target.width();
    let a2 = target.alpha * target.alpha;
    let s = target.parity.sign();
    let lobes = (-2.0 * a2 / (1.0 + 2.0 * mu / g)).exp();
    let fringe = (-2.0 * a2 / (1.0 + 1.0 / (2.0 * g * nu))).exp();
    2.0 / ((1.0 + s * (-2.0 * a2).exp()) * ((g + 2.0 * mu) * (1.0 / g + 2.0 * nu)).sqrt())
        * (lobes + s * fringe)
}

/// Fidelity of the conditional state with a squeezed cat.
///
/// Uses [`diagonal_overlap`] when every `A_S` is diagonal, otherwise a grid
/// overlap. Results are clipped to `[0, 1 + 1e−9]`.
pub fn mixture_fidelity_vs_sscs(m: &SignedGaussianMixture, target: &CatTarget) -> Result<f64> {
    target.validate()?;
    if target.parity == Parity::Odd && target.alpha == 0.0 {
        return Err(Error::DegenerateState("odd cat with zero amplitude"));
    }
    let f = if m.is_diagonal() {
        m.components
            .iter()
            .map(|c| c.weight * diagonal_overlap(c.cov[(0, 0)], c.cov[(1, 1)], target))
            .sum::<f64>()
            / m.probability
    } else {
        let reach =
            (2.0 * target.width()).sqrt() * target.alpha + 3.0 * (target.width().sqrt() + 1.0);
        let spec = m.default_grid(reach, 0.02)?;
        let a = mixture_to_grid(m, spec);
        let t = *target;
        let b = WignerGrid::from_fn(spec, "", |x, p| {
            wigner::wigner_sscs(x, p, &t).unwrap_or(0.0)
        });
        wigner::overlap_fidelity(&a, &b)?
    };
    if !(f >= 0.0 && f <= 1.0 + 1e-9) {
        log::warn!("fidelity {f:.12} outside [0, 1]; clipped");
        return Ok(f.clamp(0.0, 1.0 + 1e-9));
    }
    Ok(f)
}

pub fn mixture_to_grid(m: &SignedGaussianMixture, spec: GridSpec) -> WignerGrid {
    let eval = m.evaluator();
    WignerGrid::from_fn(spec, format!("mixture P={:e}", m.probability), eval)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic;

    fn bs(t: f64) -> CouplerParams {
        CouplerParams::beam_splitter(t).unwrap()
    }

    fn amp(g: f64) -> CouplerParams {
        CouplerParams::amplifier(g).unwrap()
    }

    #[test]
    fn ideal_detectors_leave_covariance_untouched() {
        let pl = build_experiment(-0.7, &[bs(0.99), amp(1.01)], DetectorModel::ideal()).unwrap();
        assert_eq!(pl.dressed.cov, pl.initial.cov.congruence(&pl.transform));
        let g = MultiModeGaussian::squeezed_with_vacua(-0.7, 2);
        assert_eq!(g.with_ancilla_loss(1.0), g);
        assert_eq!(
            g.with_ancilla_loss(0.6),
            g,
            "vacuum ancillas are loss invariant"
        );
    }

    #[test]
    fn input_validation() {
        assert!(DetectorModel::new(0.0).is_err());
        assert!(DetectorModel::new(1.1).is_err());
        assert!(build_experiment(-0.7, &[], DetectorModel::ideal()).is_err());
        let bad = CouplerParams {
            kind: crate::coupler::CouplerKind::Amplifier,
            strength: 0.5,
        };
        assert!(build_experiment(-0.7, &[bad], DetectorModel::ideal()).is_err());
    }

    #[test]
    fn dressed_state_stays_physical() {
        for eta in [1.0, 0.6, 0.1] {
            let pl = build_experiment(-0.9, &[bs(0.8), amp(1.3)], DetectorModel::new(eta).unwrap())
                .unwrap();
            assert!(is_physical_covariance(&pl.dressed.cov, 1e-10));
        }
    }

    #[test]
    fn no_coupling_means_no_clicks() {
        let pl = build_experiment(-0.7, &[bs(1.0), bs(1.0)], DetectorModel::ideal()).unwrap();
        assert!(matches!(
            condition_clicks(&pl),
            Err(Error::ZeroProbability { .. })
        ));
        assert_eq!(success_probability(&pl).unwrap(), 0.0);
    }

    #[test]
    fn weights_follow_the_sign_pattern() {
        let pl = build_experiment(-0.7, &[bs(0.99), bs(0.99)], DetectorModel::ideal()).unwrap();
        let m = condition_clicks(&pl).unwrap();
        let signs: Vec<f64> = m.components.iter().map(|c| c.weight.signum()).collect();
        assert_eq!(signs, [1.0, -1.0, -1.0, 1.0]);
        assert!(m.is_diagonal());
        assert!(
            m.probability > 1e-4 && m.probability < 2e-4,
            "{}",
            m.probability
        );
    }

    #[test]
    fn inefficiency_lowers_success() {
        let ideal = build_experiment(-0.7, &[bs(0.99), amp(1.01)], DetectorModel::ideal()).unwrap();
        let lossy = build_experiment(
            -0.7,
            &[bs(0.99), amp(1.01)],
            DetectorModel::new(0.6).unwrap(),
        )
        .unwrap();
        assert!(success_probability(&lossy).unwrap() < success_probability(&ideal).unwrap());
    }

    #[test]
    fn single_gaussian_overlap() {
        let vac = SignedGaussianMixture::gaussian(Mat::diag(&[0.5, 0.5])).unwrap();
        let t = CatTarget::even(1.1, 0.0);
        let expect = 2.0 * (-1.21f64).exp() / (1.0 + (-2.42f64).exp());
        assert!((mixture_fidelity_vs_sscs(&vac, &t).unwrap() - expect).abs() < 1e-14);
        assert!(mixture_fidelity_vs_sscs(&vac, &CatTarget::odd(1.1, 0.0)).unwrap() < 1e-15);
        let spec = GridSpec::symmetric(7.0, 7.0, 0.05).unwrap();
        let g = mixture_to_grid(&vac, spec);
        assert!((g.get(140, 140) - core::f64::consts::FRAC_1_PI).abs() < 1e-15);
    }

    #[test]
    fn diagonal_overlap_matches_grid() {
        let cov = Mat::diag(&[0.9, 0.3]);
        let m = SignedGaussianMixture::gaussian(cov).unwrap();
        for t in [CatTarget::even(1.3, -0.3), CatTarget::odd(0.8, 0.2)] {
            let spec = GridSpec::symmetric(10.0, 8.0, 0.02).unwrap();
            let a = mixture_to_grid(&m, spec);
            let b = WignerGrid::from_fn(spec, "", |x, p| wigner::wigner_sscs(x, p, &t).unwrap());
            let grid = wigner::overlap_fidelity(&a, &b).unwrap();
            let closed = mixture_fidelity_vs_sscs(&m, &t).unwrap();
            assert!((grid - closed).abs() < 1e-10, "{t:?}: {grid} {closed}");
        }
    }

    #[test]
    fn near_ideal_tap_reproduces_tpss() {
        let pl = build_experiment(
            -0.7,
            &[bs(1.0 - 1e-4), bs(1.0 - 1e-4)],
            DetectorModel::ideal(),
        )
        .unwrap();
        let m = condition_clicks(&pl).unwrap();
        let t = CatTarget::even(1.26, -0.425);
        let f = mixture_fidelity_vs_sscs(&m, &t).unwrap();
        let ideal = analytic::fidelity_tpss(-0.7, &t).unwrap();
        assert!((f - ideal).abs() < 1e-3, "{f} {ideal}");
    }
}
