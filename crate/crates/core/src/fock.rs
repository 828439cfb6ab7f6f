//! Truncated number-basis states and operators.
//!
//! This is the reference back-end: every closed form and the Gaussian
//! pipeline are checked against it. States are built from exact expansion
//! coefficients rather than by exponentiating truncated generators, so the
//! only error is the amplitude that would live beyond the cutoff, which
//! constructors measure and report.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::Zero;

use crate::coupler::{CouplerKind, CouplerParams};
use crate::error::{invalid, Error, Result};
use crate::target::CatTarget;

/// Default cutoff, adequate for `|r| ≤ 1`, `α ≤ 3`.
pub const DEFAULT_DIM: usize = 64;

/// Largest tolerated probability at the last two basis levels, or norm lost
/// by a truncated operator.
pub const LEAK_TOL: f64 = 1e-10;

/// `ln n!` for `n = 0..=max`.
pub(crate) fn ln_factorials(max: usize) -> Vec<f64> {
    let mut lf = Vec::with_capacity(max + 1);
    lf.push(0.0);
    for n in 1..=max {
        lf.push(lf[n - 1] + (n as f64).ln());
    }
    lf
}

#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    amps: Vec<Complex64>,
}

impl FockVector {
    pub fn from_amps(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(invalid("Fock dimension must be positive"));
        }
        Ok(FockVector { amps })
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::from_amps(amps.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::number_state(0, dim)
    }

    pub fn number_state(n: usize, dim: usize) -> Result<Self> {
        if n >= dim {
            return Err(Error::Truncation { dim, leakage: 1.0 });
        }
        let mut amps = vec![Complex64::zero(); dim];
        amps[n] = Complex64::new(1.0, 0.0);
        Ok(FockVector { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability carried by the last two levels (both parities).
    pub fn tail_weight(&self) -> f64 {
        self.amps.iter().rev().take(2).map(|a| a.norm_sqr()).sum()
    }

    /// Fails with [`Error::Truncation`] if the tail exceeds `tol` relative to
    /// the norm.
    pub fn check_leakage(&self, tol: f64) -> Result<()> {
        let n = self.norm_sqr();
        let leak = if n > 0.0 { self.tail_weight() / n } else { 0.0 };
        if leak > tol {
            return Err(Error::Truncation {
                dim: self.dim(),
                leakage: leak,
            });
        }
        Ok(())
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::DegenerateState("zero vector cannot be normalised"));
        }
        Ok(self.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        FockVector {
            amps: self.amps.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        same_dim(self, other)?;
        Ok(FockVector {
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Zero-pad or cut to `dim`. Cutting fails if it would drop more than
    /// [`LEAK_TOL`] of the norm.
    pub fn resized(&self, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("Fock dimension must be positive"));
        }
        let mut amps = self.amps.clone();
        if dim < amps.len() {
            let dropped: f64 = amps[dim..].iter().map(|a| a.norm_sqr()).sum();
            let total = self.norm_sqr();
            if total > 0.0 && dropped / total > LEAK_TOL {
                return Err(Error::Truncation {
                    dim,
                    leakage: dropped / total,
                });
            }
        }
        amps.resize(dim, Complex64::zero());
        Ok(FockVector { amps })
    }

    pub fn mean_photon_number(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(n, a)| n as f64 * a.norm_sqr())
            .sum::<f64>()
            / self.norm_sqr()
    }

    /// `(⟨x⟩, Var x, ⟨p⟩, Var p)` with `x = (a + a†)/√2`.
    pub fn quadrature_moments(&self) -> (f64, f64, f64, f64) {
        let norm = self.norm_sqr();
        let d = self.dim();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        let mut xv = vec![Complex64::zero(); d + 1];
        let mut pv = vec![Complex64::zero(); d + 1];
        for n in 0..d {
            if n + 1 < d {
                let lower = self.amps[n + 1] * (n as f64 + 1.0).sqrt();
                xv[n] += lower * s;
                pv[n] += lower * Complex64::new(0.0, -s);
            }
            let raise = self.amps[n] * (n as f64 + 1.0).sqrt();
            xv[n + 1] += raise * s;
            pv[n + 1] += raise * Complex64::new(0.0, s);
        }
        let mean = |v: &[Complex64]| -> f64 {
            self.amps
                .iter()
                .zip(v)
                .map(|(a, b)| (a.conj() * b).re)
                .sum::<f64>()
                / norm
        };
        let second =
            |v: &[Complex64]| -> f64 { v.iter().map(|c| c.norm_sqr()).sum::<f64>() / norm };
        let (mx, mp) = (mean(&xv), mean(&pv));
        (mx, second(&xv) - mx * mx, mp, second(&pv) - mp * mp)
    }
}

fn same_dim(a: &FockVector, b: &FockVector) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(())
}

/// `S(r)|0⟩` from its even-photon expansion.
pub fn squeezed_vacuum_fock(r: f64, dim: usize) -> Result<FockVector> {
    if dim < 2 {
        return Err(invalid("squeezed vacuum needs dim >= 2"));
    }
    if !r.is_finite() {
        return Err(invalid("squeezing must be finite"));
    }
    let mut amps = vec![Complex64::zero(); dim];
    let ratio = -0.5 * r.tanh();
    let mut c = (1.0 / r.cosh()).sqrt();
    let mut k = 0usize;
    while 2 * k < dim {
        amps[2 * k] = Complex64::new(c, 0.0);
        let n = 2.0 * k as f64;
        c *= ratio * ((n + 1.0) * (n + 2.0)).sqrt() / (k as f64 + 1.0);
        k += 1;
    }
    let v = FockVector { amps };
    v.check_leakage(LEAK_TOL)?;
    Ok(v)
}

/// Poissonian coherent state `|α⟩`.
pub fn coherent_fock(alpha: Complex64, dim: usize) -> Result<FockVector> {
    squeezed_coherent_fock(alpha, 0.0, dim)
}

/// `S(r)|α⟩` from the Hermite-type recursion for squeezed coherent
/// amplitudes. With `γ = α cosh r − α* sinh r` the displacement of the
/// squeezed state,
/// `⟨n|S(r)|α⟩ = exp(−|γ|²/2 − γ*² tanh r / 2) / √cosh r · e_n`, where
/// `e₀ = 1`, `e₁ = α / cosh r`,
/// `e_{n+1} = α e_n / (cosh r √(n+1)) − tanh r √(n/(n+1)) e_{n−1}`.
pub fn squeezed_coherent_fock(alpha: Complex64, r: f64, dim: usize) -> Result<FockVector> {
    if dim == 0 {
        return Err(invalid("Fock dimension must be positive"));
    }
    if !r.is_finite() || !alpha.re.is_finite() || !alpha.im.is_finite() {
        return Err(invalid("state parameters must be finite"));
    }
    let (ch, sh, th) = (r.cosh(), r.sinh(), r.tanh());
    let gamma = alpha * ch - alpha.conj() * sh;
    let pref =
        (-(0.5 * gamma.norm_sqr()) - 0.5 * gamma.conj() * gamma.conj() * th).exp() / ch.sqrt();
    let mut amps = vec![Complex64::zero(); dim];
    let mut prev = Complex64::zero();
    let mut cur = Complex64::new(1.0, 0.0);
    for (n, slot) in amps.iter_mut().enumerate() {
        *slot = pref * cur;
        let nf = n as f64;
        let next = alpha * cur / (ch * (nf + 1.0).sqrt()) - prev * (th * (nf / (nf + 1.0)).sqrt());
        prev = cur;
        cur = next;
    }
    let v = FockVector { amps };
    v.check_leakage(LEAK_TOL)?;
    Ok(v)
}

/// `a|s⟩`, unnormalised.
pub fn apply_annihilation(s: &FockVector) -> FockVector {
    let d = s.dim();
    let mut out = vec![Complex64::zero(); d];
    for n in 0..d - 1 {
        out[n] = s.amps[n + 1] * (n as f64 + 1.0).sqrt();
    }
    FockVector { amps: out }
}

/// `a†|s⟩`, unnormalised. The component pushed past the cutoff must be
/// negligible.
pub fn apply_creation(s: &FockVector) -> Result<FockVector> {
    let d = s.dim();
    let lost = d as f64 * s.amps[d - 1].norm_sqr();
    let total = s.norm_sqr();
    if total > 0.0 && lost / total > LEAK_TOL {
        return Err(Error::Truncation {
            dim: d,
            leakage: lost / total,
        });
    }
    let mut out = vec![Complex64::zero(); d];
    for n in 1..d {
        out[n] = s.amps[n - 1] * (n as f64).sqrt();
    }
    Ok(FockVector { amps: out })
}

/// Number-basis matrix `⟨m|S(r)|n⟩` for `m, n < dim`, row-major.
///
/// Column 0 is the squeezed vacuum; further columns follow from
/// `a† S = S (a† cosh r − a sinh r)`:
/// `⟨m|S|n+1⟩ = [√m ⟨m−1|S|n⟩ + sinh r √n ⟨m|S|n−1⟩] / (cosh r √(n+1))`.
/// Every entry is exact; only rows beyond `dim` are dropped.
pub fn squeeze_matrix(r: f64, dim: usize) -> Vec<f64> {
    let mut s = vec![0.0; dim * dim];
    let (ch, sh) = (r.cosh(), r.sinh());
    let ratio = -0.5 * r.tanh();
    let mut c = (1.0 / ch).sqrt();
    let mut k = 0;
    while 2 * k < dim {
        s[2 * k * dim] = c;
        let n = 2.0 * k as f64;
        c *= ratio * ((n + 1.0) * (n + 2.0)).sqrt() / (k as f64 + 1.0);
        k += 1;
    }
    for n in 0..dim.saturating_sub(1) {
        let nf = n as f64;
        let denom = ch * (nf + 1.0).sqrt();
        for m in 0..dim {
            let mut v = 0.0;
            if m > 0 {
                v += (m as f64).sqrt() * s[(m - 1) * dim + n];
            }
            if n > 0 {
                v += sh * nf.sqrt() * s[m * dim + n - 1];
            }
            s[m * dim + n + 1] = v / denom;
        }
    }
    s
}

/// `S(r)|s⟩` projected onto the same cutoff. Fails if more than `1e−8` of
/// the norm leaves the space or the tail exceeds [`LEAK_TOL`].
pub fn squeeze_fock(s: &FockVector, r: f64) -> Result<FockVector> {
    if !r.is_finite() {
        return Err(invalid("squeezing must be finite"));
    }
    let d = s.dim();
    if r == 0.0 {
        return Ok(s.clone());
    }
    let m = squeeze_matrix(r, d);
    let mut out = vec![Complex64::zero(); d];
    for (i, o) in out.iter_mut().enumerate() {
        let row = &m[i * d..(i + 1) * d];
        *o = row.iter().zip(&s.amps).map(|(&a, b)| b * a).sum();
    }
    let out = FockVector { amps: out };
    let before = s.norm_sqr();
    if before > 0.0 {
        let loss = 1.0 - out.norm_sqr() / before;
        if loss > 1e-8 {
            return Err(Error::Truncation {
                dim: d,
                leakage: loss,
            });
        }
    }
    out.check_leakage(LEAK_TOL)?;
    Ok(out)
}

/// Normalised `N± S(r′)(|α⟩ ± |−α⟩)` from squeezed coherent amplitudes.
pub fn cat_target_fock(t: &CatTarget, dim: usize) -> Result<FockVector> {
    let norm = t.normalization()?;
    let a = Complex64::new(t.alpha, 0.0);
    let plus = squeezed_coherent_fock(a, t.rprime, dim)?;
    let minus = squeezed_coherent_fock(-a, t.rprime, dim)?;
    Ok(plus
        .add(&minus.scaled(Complex64::new(t.parity.sign(), 0.0)))?
        .scaled(Complex64::new(norm, 0.0)))
}

/// Same state built the other way round: superpose coherent states, then
/// apply the truncated squeezing operator.
pub fn cat_target_fock_via_squeeze(t: &CatTarget, dim: usize) -> Result<FockVector> {
    let norm = t.normalization()?;
    let a = Complex64::new(t.alpha, 0.0);
    let cat = coherent_fock(a, dim)?
        .add(&coherent_fock(-a, dim)?.scaled(Complex64::new(t.parity.sign(), 0.0)))?
        .scaled(Complex64::new(norm, 0.0));
    squeeze_fock(&cat, t.rprime)
}

/// `⟨a|b⟩`.
pub fn inner_product(a: &FockVector, b: &FockVector) -> Result<Complex64> {
    same_dim(a, b)?;
    Ok(a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum())
}

/// `|⟨a|b⟩|² / (‖a‖² ‖b‖²)`.
pub fn fidelity_fock(a: &FockVector, b: &FockVector) -> Result<f64> {
    let ip = inner_product(a, b)?;
    let (na, nb) = (a.norm_sqr(), b.norm_sqr());
    if !(na > 0.0 && nb > 0.0) {
        return Err(Error::DegenerateState("fidelity with a zero vector"));
    }
    Ok((ip.norm_sqr() / (na * nb)).min(1.0))
}

/// Ideal `a^N S(r)|0⟩`, normalised.
pub fn photon_subtracted_squeezed(r: f64, photons: u32, dim: usize) -> Result<FockVector> {
    let mut v = squeezed_vacuum_fock(r, dim)?;
    for _ in 0..photons {
        v = apply_annihilation(&v);
    }
    v.normalized()
}

/// Ideal `a† a S(r)|0⟩`, normalised.
pub fn subtract_add_squeezed(r: f64, dim: usize) -> Result<FockVector> {
    let v = squeezed_vacuum_fock(r, dim)?;
    apply_creation(&apply_annihilation(&v))?.normalized()
}

/// Pure two-mode state `Σ c(n₁, n₂)|n₁, n₂⟩`, row-major in `n₁`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoModeFockState {
    dims: (usize, usize),
    amps: Vec<Complex64>,
}

impl TwoModeFockState {
    pub fn product(a: &FockVector, b: &FockVector) -> Self {
        let dims = (a.dim(), b.dim());
        let mut amps = Vec::with_capacity(dims.0 * dims.1);
        for x in &a.amps {
            for y in &b.amps {
                amps.push(x * y);
            }
        }
        TwoModeFockState { dims, amps }
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn amp(&self, n1: usize, n2: usize) -> Complex64 {
        self.amps[n1 * self.dims.1 + n2]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if !(n > 0.0) {
            return Err(Error::DegenerateState("zero two-mode state"));
        }
        let s = 1.0 / n.sqrt();
        Ok(TwoModeFockState {
            dims: self.dims,
            amps: self.amps.iter().map(|a| a * s).collect(),
        })
    }

    /// `(⟨n₁⟩, ⟨n₂⟩)` for the normalised state.
    pub fn mean_photon_numbers(&self) -> (f64, f64) {
        let norm = self.norm_sqr();
        let (mut m1, mut m2) = (0.0, 0.0);
        for n1 in 0..self.dims.0 {
            for n2 in 0..self.dims.1 {
                let w = self.amp(n1, n2).norm_sqr();
                m1 += n1 as f64 * w;
                m2 += n2 as f64 * w;
            }
        }
        (m1 / norm, m2 / norm)
    }

    /// Norm in each total-photon-number sector `n₁ + n₂ = N`.
    pub fn total_number_distribution(&self) -> Vec<f64> {
        let mut dist = vec![0.0; self.dims.0 + self.dims.1 - 1];
        for n1 in 0..self.dims.0 {
            for n2 in 0..self.dims.1 {
                dist[n1 + n2] += self.amp(n1, n2).norm_sqr();
            }
        }
        dist
    }

    /// Unnormalised signal vector for a fixed ancilla number.
    pub fn signal_slice(&self, n2: usize) -> FockVector {
        FockVector {
            amps: (0..self.dims.0).map(|n1| self.amp(n1, n2)).collect(),
        }
    }

    /// Unnormalised ancilla vector for a fixed signal number.
    pub fn ancilla_slice(&self, n1: usize) -> FockVector {
        FockVector {
            amps: (0..self.dims.1).map(|n2| self.amp(n1, n2)).collect(),
        }
    }
}

/// Applies the two-mode coupler (beam splitter or parametric amplifier) to
/// `st`, first mode = signal, second = ancilla. Conventions follow
/// [`crate::coupler`]: the Heisenberg map is `a₁ → t a₁ + r a₂` or
/// `a₁ → t a₁ + r a₂†`.
pub fn oracle_coupler_fock(
    st: &TwoModeFockState,
    coupler: &CouplerParams,
) -> Result<TwoModeFockState> {
    if coupler.is_trivial() {
        return Ok(st.clone());
    }
    let (d1, d2) = st.dims;
    let lf = ln_factorials(2 * (d1 + d2) + 2);
    let mut out = vec![Complex64::zero(); d1 * d2];
    let (t, r) = (coupler.t(), coupler.r());
    match coupler.kind {
        CouplerKind::BeamSplitter => {
            // a₁† → t a₁† − r a₂†, a₂† → r a₁† + t a₂†
            for n1 in 0..d1 {
                for n2 in 0..d2 {
                    let c = st.amp(n1, n2);
                    if c.is_zero() {
                        continue;
                    }
                    let total = n1 + n2;
                    for j in 0..=n1 {
                        for k in 0..=n2 {
                            let p = j + k;
                            let q = total - p;
                            if p >= d1 || q >= d2 {
                                continue;
                            }
                            let ln_mag = lf[n1] - lf[j] - lf[n1 - j] + lf[n2] - lf[k] - lf[n2 - k]
                                + 0.5 * (lf[p] + lf[q] - lf[n1] - lf[n2]);
                            let mut coef = ln_mag.exp()
                                * t.powi((j + n2 - k) as i32)
                                * r.powi((n1 - j + k) as i32);
                            if (n1 - j) % 2 == 1 {
                                coef = -coef;
                            }
                            out[p * d2 + q] += c * coef;
                        }
                    }
                }
            }
        }
        CouplerKind::Amplifier => {
            // exp[s(a₁†a₂† − a₁a₂)] = e^{τ a₁†a₂†} (cosh s)^{−(n₁+n₂+1)} e^{−τ a₁a₂}
            let tau = r / t;
            let ln_tau = tau.ln();
            for n1 in 0..d1 {
                for n2 in 0..d2 {
                    let c = st.amp(n1, n2);
                    if c.is_zero() {
                        continue;
                    }
                    for k in 0..=n1.min(n2) {
                        let (m1, m2) = (n1 - k, n2 - k);
                        let ln_down =
                            k as f64 * ln_tau - lf[k] + 0.5 * (lf[n1] + lf[n2] - lf[m1] - lf[m2]);
                        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
                        let ln_mid = -((m1 + m2 + 1) as f64) * t.ln();
                        let mut j = 0;
                        while m1 + j < d1 && m2 + j < d2 {
                            let ln_up = j as f64 * ln_tau - lf[j]
                                + 0.5 * (lf[m1 + j] + lf[m2 + j] - lf[m1] - lf[m2]);
                            let coef = sign * (ln_down + ln_mid + ln_up).exp();
                            out[(m1 + j) * d2 + m2 + j] += c * coef;
                            j += 1;
                        }
                    }
                }
            }
        }
    }
    let out = TwoModeFockState {
        dims: st.dims,
        amps: out,
    };
    let before = st.norm_sqr();
    if before > 0.0 {
        let loss = 1.0 - out.norm_sqr() / before;
        if loss > LEAK_TOL {
            return Err(Error::Truncation {
                dim: d1.min(d2),
                leakage: loss,
            });
        }
    }
    Ok(out)
}

/// Which mode of a [`TwoModeFockState`] is measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AncillaMode {
    First,
    Second,
}

/// On/off detector: click POVM `E = 1 − Σ (1−η)ⁿ |n⟩⟨n|`, i.e. a loss
/// beam splitter of transmissivity `η` before an ideal on/off detector.
pub fn click_weight(n: usize, efficiency: f64) -> f64 {
    1.0 - (1.0 - efficiency).powi(n as i32)
}

/// Dense Hermitian density matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zeros(dim: usize) -> Self {
        DensityMatrix {
            dim,
            data: vec![Complex64::zero(); dim * dim],
        }
    }

    pub fn from_pure(v: &FockVector) -> Self {
        let mut rho = Self::zeros(v.dim());
        rho.add_pure(v, 1.0);
        rho
    }

    /// `ρ += w |v⟩⟨v|`.
    pub fn add_pure(&mut self, v: &FockVector, w: f64) {
        let d = self.dim;
        for (i, a) in v.amps.iter().enumerate().take(d) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in v.amps.iter().enumerate().take(d) {
                self.data[i * d + j] += a * b.conj() * w;
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `⟨m|ρ|n⟩`.
    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.data[m * self.dim + n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let tr = self.trace();
        if !(tr > 0.0) {
            return Err(Error::DegenerateState("zero density matrix"));
        }
        Ok(DensityMatrix {
            dim: self.dim,
            data: self.data.iter().map(|c| c / tr).collect(),
        })
    }

    /// `⟨ψ|ρ|ψ⟩ / ‖ψ‖²`.
    pub fn fidelity_with_pure(&self, psi: &FockVector) -> Result<f64> {
        if psi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: psi.dim(),
            });
        }
        let d = self.dim;
        let mut acc = Complex64::zero();
        for i in 0..d {
            let mut row = Complex64::zero();
            for j in 0..d {
                row += self.data[i * d + j] * psi.amps[j];
            }
            acc += psi.amps[i].conj() * row;
        }
        Ok(acc.re / psi.norm_sqr())
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Outcome of heralding on detector clicks.
#[derive(Clone, Debug)]
pub struct ClickOutcome {
    /// Normalised conditional signal state.
    pub state: DensityMatrix,
    pub probability: f64,
}

/// Weighted ensemble of pure signal states; a mixed state that can still be
/// pushed through further pure-state couplers.
#[derive(Clone, Debug)]
struct Ensemble {
    branches: Vec<(f64, FockVector)>,
}

impl Ensemble {
    fn probability(&self) -> f64 {
        self.branches.iter().map(|(w, _)| w).sum()
    }

    fn to_density(&self, dim: usize) -> DensityMatrix {
        let mut rho = DensityMatrix::zeros(dim);
        for (w, v) in &self.branches {
            rho.add_pure(v, *w);
        }
        rho
    }
}

fn click_branches(
    st: &TwoModeFockState,
    ancilla: AncillaMode,
    efficiency: f64,
) -> Vec<(f64, FockVector)> {
    let (d1, d2) = st.dims;
    let (count, slice): (usize, &dyn Fn(usize) -> FockVector) = match ancilla {
        AncillaMode::Second => (d2, &|n| st.signal_slice(n)),
        AncillaMode::First => (d1, &|n| st.ancilla_slice(n)),
    };
    let mut out = Vec::new();
    for n in 1..count {
        let e = click_weight(n, efficiency);
        let v = slice(n);
        let w = v.norm_sqr();
        if e * w > 0.0 {
            out.push((e * w, v.scaled(Complex64::new(1.0 / w.sqrt(), 0.0))));
        }
    }
    out
}

/// Projects `ancilla` onto "click" and traces it out. The result is mixed
/// in general, hence a density matrix; `probability` is its trace before
/// normalisation.
pub fn oracle_click_condition(
    st: &TwoModeFockState,
    ancilla: AncillaMode,
    efficiency: f64,
) -> Result<ClickOutcome> {
    if !(efficiency > 0.0 && efficiency <= 1.0) {
        return Err(invalid("detector efficiency must lie in (0, 1]"));
    }
    let ens = Ensemble {
        branches: click_branches(st, ancilla, efficiency),
    };
    let norm = st.norm_sqr();
    let probability = ens.probability() / norm;
    if !(probability >= 1e-14) {
        return Err(Error::ZeroProbability { probability });
    }
    let dim = match ancilla {
        AncillaMode::Second => st.dims.0,
        AncillaMode::First => st.dims.1,
    };
    Ok(ClickOutcome {
        state: ens.to_density(dim).normalized()?,
        probability,
    })
}

/// Truncation plan for [`oracle_click_chain`].
#[derive(Clone, Copy, Debug)]
pub struct ChainDims {
    pub signal: usize,
    pub ancilla: usize,
}

/// Sends the pure `signal` through each coupler in turn, each with a fresh
/// vacuum ancilla measured by an on/off detector of efficiency `efficiency`,
/// and keeps the runs where every detector clicked.
pub fn oracle_click_chain(
    signal: &FockVector,
    stages: &[CouplerParams],
    efficiency: f64,
    dims: ChainDims,
) -> Result<ClickOutcome> {
    if !(efficiency > 0.0 && efficiency <= 1.0) {
        return Err(invalid("detector efficiency must lie in (0, 1]"));
    }
    let start = signal.resized(dims.signal)?.normalized()?;
    let vac = FockVector::vacuum(dims.ancilla)?;
    let mut ens = Ensemble {
        branches: vec![(1.0, start)],
    };
    for stage in stages {
        let mut next = Vec::new();
        for (w, v) in &ens.branches {
            let joint = oracle_coupler_fock(&TwoModeFockState::product(v, &vac), stage)?;
            let (_, top) = joint.mean_photon_numbers();
            let tail = joint.ancilla_tail();
            if tail > LEAK_TOL {
                log::debug!("ancilla mean {top:.3e}, tail {tail:.3e}");
                return Err(Error::Truncation {
                    dim: dims.ancilla,
                    leakage: tail,
                });
            }
            for (bw, bv) in click_branches(&joint, AncillaMode::Second, efficiency) {
                next.push((w * bw, bv));
            }
        }
        ens = Ensemble { branches: next };
    }
    let probability = ens.probability();
    if !(probability >= 1e-14) {
        return Err(Error::ZeroProbability { probability });
    }
    Ok(ClickOutcome {
        state: ens.to_density(dims.signal).normalized()?,
        probability,
    })
}

impl TwoModeFockState {
    /// Relative weight on the last ancilla level.
    fn ancilla_tail(&self) -> f64 {
        let n2 = self.dims.1 - 1;
        let w: f64 = (0..self.dims.0).map(|n1| self.amp(n1, n2).norm_sqr()).sum();
        w / self.norm_sqr()
    }
}
