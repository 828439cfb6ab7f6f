use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use core::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Uniform tensor-product grid, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub p_min: f64,
    pub p_max: f64,
    pub np: usize,
}

impl GridSpec {
    pub fn new(
        x_min: f64,
        x_max: f64,
        nx: usize,
        p_min: f64,
        p_max: f64,
        np: usize,
    ) -> Result<Self> {
        let ok = |lo: f64, hi: f64, n: usize| lo.is_finite() && hi.is_finite() && lo < hi && n >= 2;
        if !ok(x_min, x_max, nx) || !ok(p_min, p_max, np) {
            return Err(invalid(
                "grid needs finite bounds lo < hi and at least 2 points per axis",
            ));
        }
        Ok(GridSpec {
            x_min,
            x_max,
            nx,
            p_min,
            p_max,
            np,
        })
    }

    /// `[−x_half, x_half] × [−p_half, p_half]` with spacing close to `step`.
    pub fn symmetric(x_half: f64, p_half: f64, step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(invalid("grid step must be positive"));
        }
        let nx = (2.0 * x_half / step).round() as usize + 1;
        let np = (2.0 * p_half / step).round() as usize + 1;
        Self::new(-x_half, x_half, nx, -p_half, p_half, np)
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_max - self.p_min) / (self.np - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + i as f64 * self.dx()
    }

    pub fn p(&self, j: usize) -> f64 {
        self.p_min + j as f64 * self.dp()
    }

    pub fn len(&self) -> usize {
        self.nx * self.np
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Same grid with both spacings halved.
    pub fn refined(&self) -> Self {
        GridSpec {
            nx: 2 * self.nx - 1,
            np: 2 * self.np - 1,
            ..*self
        }
    }

    fn weight(&self, i: usize, j: usize) -> f64 {
        let wx = if i == 0 || i + 1 == self.nx { 0.5 } else { 1.0 };
        let wp = if j == 0 || j + 1 == self.np { 0.5 } else { 1.0 };
        wx * wp * self.dx() * self.dp()
    }
}

/// Sampled Wigner function; `values[j * nx + i]` is `W(x_i, p_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WignerGrid {
    pub spec: GridSpec,
    pub values: Vec<f64>,
    /// Free-form description of the state and its parameters.
    pub meta: String,
}

impl WignerGrid {
    pub fn from_fn(spec: GridSpec, meta: impl Into<String>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut values = Vec::with_capacity(spec.len());
        for j in 0..spec.np {
            let p = spec.p(j);
            for i in 0..spec.nx {
                values.push(f(spec.x(i), p));
            }
        }
        WignerGrid {
            spec,
            values,
            meta: meta.into(),
        }
    }

    pub fn from_values(spec: GridSpec, meta: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::GridMismatch);
        }
        Ok(WignerGrid {
            spec,
            values,
            meta: meta.into(),
        })
    }

    pub fn x_axis(&self) -> Vec<f64> {
        (0..self.spec.nx).map(|i| self.spec.x(i)).collect()
    }

    pub fn p_axis(&self) -> Vec<f64> {
        (0..self.spec.np).map(|j| self.spec.p(j)).collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[j * self.spec.nx + i]
    }

    fn weighted_sum(&self, f: impl Fn(usize, f64) -> f64) -> f64 {
        let nx = self.spec.nx;
        self.values
            .iter()
            .enumerate()
            .map(|(k, &v)| self.spec.weight(k % nx, k / nx) * f(k, v))
            .sum()
    }

    /// Trapezoid estimate of `∫∫ W dx dp`.
    pub fn integrate(&self) -> f64 {
        self.weighted_sum(|_, v| v)
    }

    /// `2π ∫∫ W²`.
    pub fn purity(&self) -> f64 {
        2.0 * PI * self.weighted_sum(|_, v| v * v)
    }

    /// Largest `|W|` on the grid edge.
    pub fn boundary_max(&self) -> f64 {
        let (nx, np) = (self.spec.nx, self.spec.np);
        let mut m: f64 = 0.0;
        for i in 0..nx {
            m = m.max(self.get(i, 0).abs()).max(self.get(i, np - 1).abs());
        }
        for j in 0..np {
            m = m.max(self.get(0, j).abs()).max(self.get(nx - 1, j).abs());
        }
        m
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diff(&self, other: &WignerGrid) -> Result<f64> {
        if self.spec != other.spec {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }
}

/// Boundary level above which an overlap is reported as leaking.
pub const BOUNDARY_WARN: f64 = 1e-10;

/// `2π ∫∫ W_a W_b dx dp`; equals `|⟨a|b⟩|²` when both are pure.
pub fn overlap_fidelity(a: &WignerGrid, b: &WignerGrid) -> Result<f64> {
    if a.spec != b.spec {
        return Err(Error::GridMismatch);
    }
    let edge = a.boundary_max().max(b.boundary_max());
    if edge > BOUNDARY_WARN {
        log::warn!("Wigner grid boundary reaches {edge:.3e}; overlap may be truncated");
    }
    Ok(2.0 * PI * a.weighted_sum(|k, v| v * b.values[k]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_PI;

    fn vac(x: f64, p: f64) -> f64 {
        (-x * x - p * p).exp() * FRAC_1_PI
    }

    #[test]
    fn vacuum_integrals() {
        let spec = GridSpec::symmetric(7.0, 7.0, 0.05).unwrap();
        let g = WignerGrid::from_fn(spec, "vacuum", vac);
        assert!((g.integrate() - 1.0).abs() < 1e-12);
        assert!((g.purity() - 1.0).abs() < 1e-12);
        assert!((overlap_fidelity(&g, &g).unwrap() - 1.0).abs() < 1e-12);
        assert!(g.boundary_max() < 1e-20);
    }

    #[test]
    fn vacuum_and_one_photon_are_orthogonal() {
        let spec = GridSpec::symmetric(7.0, 7.0, 0.05).unwrap();
        let a = WignerGrid::from_fn(spec, "vacuum", vac);
        let b = WignerGrid::from_fn(spec, "n=1", |x, p| {
            vac(x, p) * (2.0 * (x * x + p * p) - 1.0)
        });
        assert!(overlap_fidelity(&a, &b).unwrap().abs() < 1e-10);
    }

    #[test]
    fn mismatched_grids() {
        let a = WignerGrid::from_fn(GridSpec::symmetric(5.0, 5.0, 0.1).unwrap(), "", vac);
        let b = WignerGrid::from_fn(GridSpec::symmetric(5.0, 4.0, 0.1).unwrap(), "", vac);
        assert_eq!(overlap_fidelity(&a, &b), Err(Error::GridMismatch));
        assert!(WignerGrid::from_values(a.spec, "", alloc::vec![0.0; 3]).is_err());
        assert!(GridSpec::new(1.0, 0.0, 10, 0.0, 1.0, 10).is_err());
    }

    #[test]
    fn refinement_keeps_endpoints() {
        let s = GridSpec::symmetric(3.0, 2.0, 0.5).unwrap();
        let r = s.refined();
        assert_eq!(r.x(r.nx - 1), s.x_max);
        assert!((r.dx() - s.dx() / 2.0).abs() < 1e-15);
    }
}
