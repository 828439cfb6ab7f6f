//! Fidelity landscapes: best target squeezing per amplitude, amplitude
//! sweeps and the fixed-squeezing amplitude search for N-photon subtraction.

use alloc::vec::Vec;

use crate::analytic;
use crate::coupler::CouplerParams;
use crate::error::{invalid, Error, Result};
use crate::gaussian::{self, DetectorModel, SignedGaussianMixture};
use crate::target::{CatTarget, Parity};
use crate::wigner::{self, GridSpec, NpssParams, NpssState, WignerGrid};

/// Inverse golden ratio.
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Coarse scan resolution before the line search.
pub const COARSE_POINTS: usize = 21;

/// Maximises `f` on `[lo, hi]` by golden-section search.
pub fn golden_section(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    let fx = f(x)?;
    // the interior probes may beat the midpoint on a flat top
    let best = [(x, fx), (c, fc), (d, fd)]
        .into_iter()
        .fold((x, fx), |m, v| if v.1 > m.1 { v } else { m });
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineOptimum {
    pub arg: f64,
    pub value: f64,
    /// Optimum within `tol` of a bound.
    pub at_boundary: bool,
    /// Objective constant over the scan; `arg` is the midpoint.
    pub flat: bool,
}

/// Coarse 21-point scan, then golden section around every local maximum of
/// the scan; the best refined peak wins.
pub fn maximize_on_interval(
    mut f: impl FnMut(f64) -> Result<f64>,
    bounds: (f64, f64),
    tol: f64,
) -> Result<LineOptimum> {
    let (lo, hi) = bounds;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(invalid("line search needs lo < hi and tol > 0"));
    }
    let h = (hi - lo) / (COARSE_POINTS - 1) as f64;
    let xs: Vec<f64> = (0..COARSE_POINTS).map(|i| lo + i as f64 * h).collect();
    let mut fs = Vec::with_capacity(COARSE_POINTS);
    for &x in &xs {
        fs.push(f(x)?);
    }
    let (fmin, fmax) = fs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if fmax - fmin <= 1e-15 * (1.0 + fmax.abs()) {
        let mid = 0.5 * (lo + hi);
        return Ok(LineOptimum {
            arg: mid,
            value: f(mid)?,
            at_boundary: false,
            flat: true,
        });
    }
    let n = COARSE_POINTS;
    let mut best = LineOptimum {
        arg: xs[0],
        value: f64::NEG_INFINITY,
        at_boundary: false,
        flat: false,
    };
    for i in 0..n {
        let left = if i == 0 { f64::NEG_INFINITY } else { fs[i - 1] };
        let right = if i + 1 == n {
            f64::NEG_INFINITY
        } else {
            fs[i + 1]
        };
        if !(fs[i] >= left && fs[i] >= right) {
            continue;
        }
        let a = xs[i.saturating_sub(1)];
        let b = xs[(i + 1).min(n - 1)];
        let (x, v) = golden_section(&mut f, a, b, tol)?;
        let (x, v) = if fs[i] > v { (xs[i], fs[i]) } else { (x, v) };
        if v > best.value {
            best = LineOptimum {
                arg: x,
                value: v,
                at_boundary: false,
                flat: false,
            };
        }
    }
    best.at_boundary = (best.arg - lo).abs() <= tol || (hi - best.arg).abs() <= tol;
    Ok(best)
}

/// Best target squeezing `r′` for a fixed amplitude.
pub fn optimize_rprime(
    objective: impl FnMut(f64) -> Result<f64>,
    bounds: (f64, f64),
    tol: f64,
) -> Result<LineOptimum> {
    maximize_on_interval(objective, bounds, tol)
}

/// Which fidelity a sweep maximises.
#[derive(Clone, Debug, PartialEq)]
pub enum Objective {
    AnalyticTpss {
        r: f64,
    },
    AnalyticPsas {
        r: f64,
    },
    /// Heralded state from the covariance pipeline.
    Realistic {
        r: f64,
        stages: Vec<CouplerParams>,
        eta: f64,
    },
    /// N-photon-subtracted state, phase-space overlap on `grid` (or a
    /// default grid when `None`).
    NpssGrid {
        n: u32,
        r_eff: f64,
        grid: Option<GridSpec>,
    },
}

/// An objective with its expensive parts (conditioned mixture, NPSS grid)
/// computed once.
#[derive(Clone, Debug)]
pub enum PreparedObjective {
    AnalyticTpss(f64),
    AnalyticPsas(f64),
    Realistic(SignedGaussianMixture),
    Npss { parity: Parity, grid: WignerGrid },
}

impl Objective {
    pub fn prepare(&self) -> Result<PreparedObjective> {
        Ok(match self {
            Objective::AnalyticTpss { r } => PreparedObjective::AnalyticTpss(*r),
            Objective::AnalyticPsas { r } => {
                if *r == 0.0 {
                    return Err(Error::SingularParameter("coth r diverges at r = 0"));
                }
                PreparedObjective::AnalyticPsas(*r)
            }
            Objective::Realistic { r, stages, eta } => {
                let pl = gaussian::build_experiment(*r, stages, DetectorModel::new(*eta)?)?;
                PreparedObjective::Realistic(gaussian::condition_clicks(&pl)?)
            }
            Objective::NpssGrid { n, r_eff, grid } => {
                let params = NpssParams::new(*n, *r_eff)?;
                let spec = grid.unwrap_or_else(|| default_npss_grid(&params));
                let state = NpssState::new(params)?;
                PreparedObjective::Npss {
                    parity: params.parity(),
                    grid: state.grid(spec),
                }
            }
        })
    }
}

impl PreparedObjective {
    /// Parity of the state; targets of the other parity are orthogonal.
    pub fn parity(&self) -> Parity {
        match self {
            PreparedObjective::Npss { parity, .. } => *parity,
            _ => Parity::Even,
        }
    }

    pub fn fidelity(&self, alpha: f64, rprime: f64) -> Result<f64> {
        let target = CatTarget::new(alpha, rprime, self.parity());
        match self {
            PreparedObjective::AnalyticTpss(r) => analytic::fidelity_tpss(*r, &target),
            PreparedObjective::AnalyticPsas(r) => analytic::fidelity_psas(*r, &target),
            PreparedObjective::Realistic(m) => gaussian::mixture_fidelity_vs_sscs(m, &target),
            PreparedObjective::Npss { grid, .. } => {
                let norm = target.normalization()?;
                let cat = WignerGrid::from_fn(grid.spec, "", |x, p| {
                    wigner::sscs_unchecked(x, p, &target, norm)
                });
                wigner::overlap_fidelity(grid, &cat)
            }
        }
    }
}

/// Grid covering an NPSS and its matching cats, step 0.03.
pub fn default_npss_grid(params: &NpssParams) -> GridSpec {
    let nat = params.natural_grid();
    GridSpec::symmetric(nat.x_max, nat.p_max.max(4.0), 0.03).expect("natural grid is valid")
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    /// `(lo, hi, steps)`, endpoints included.
    pub alpha: (f64, f64, usize),
    pub rprime_bounds: (f64, f64),
    pub objective: Objective,
    /// Pin `r′` instead of optimising it (`Some(0.0)` is the unsqueezed cat).
    pub fixed_rprime: Option<f64>,
    pub tol: f64,
    /// Narrow each row's search around the previous optimum.
    pub warm_start: bool,
}

impl SweepSpec {
    pub fn new(objective: Objective) -> Self {
        SweepSpec {
            alpha: (0.0, 3.5, 71),
            rprime_bounds: (-1.5, 1.5),
            objective,
            fixed_rprime: None,
            tol: 1e-4,
            warm_start: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi, n) = self.alpha;
        if !(lo < hi) || n < 2 || lo < 0.0 {
            return Err(invalid(
                "alpha range needs 0 <= lo < hi and at least 2 steps",
            ));
        }
        let (a, b) = self.rprime_bounds;
        if !(a < b) {
            return Err(invalid("r' bounds need lo < hi"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tolerance must be positive"));
        }
        Ok(())
    }

    pub fn alphas(&self) -> Vec<f64> {
        let (lo, hi, n) = self.alpha;
        (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RowOptimum {
    pub fidelity: f64,
    pub rprime: f64,
    pub at_boundary: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    pub result: Result<RowOptimum>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// `(α*, F*, r′*)` over the successful rows.
    pub fn best(&self) -> Option<(f64, f64, f64)> {
        self.rows
            .iter()
            .filter_map(|row| {
                row.result
                    .as_ref()
                    .ok()
                    .map(|o| (row.alpha, o.fidelity, o.rprime))
            })
            .fold(None, |m: Option<(f64, f64, f64)>, v| match m {
                Some(b) if b.1 >= v.1 => Some(b),
                _ => Some(v),
            })
    }
}

/// Optimises one row on `bounds` (ignored when `r′` is pinned).
pub fn sweep_row(
    obj: &PreparedObjective,
    spec: &SweepSpec,
    alpha: f64,
    bounds: (f64, f64),
) -> Result<RowOptimum> {
    if let Some(rp) = spec.fixed_rprime {
        return Ok(RowOptimum {
            fidelity: obj.fidelity(alpha, rp)?,
            rprime: rp,
            at_boundary: false,
        });
    }
    let opt = optimize_rprime(|rp| obj.fidelity(alpha, rp), bounds, spec.tol)?;
    let (lo, hi) = spec.rprime_bounds;
    let at_boundary = (opt.arg - lo).abs() <= spec.tol || (hi - opt.arg).abs() <= spec.tol;
    Ok(RowOptimum {
        fidelity: opt.value,
        rprime: opt.arg,
        at_boundary,
    })
}

/// Half-width of the warm-start window.
const WARM_WINDOW: f64 = 0.3;

/// Per-α optimisation in increasing α. Row failures are kept in place.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let obj = spec.objective.prepare()?;
    Ok(sweep_prepared(&obj, spec))
}

pub fn sweep_prepared(obj: &PreparedObjective, spec: &SweepSpec) -> SweepResult {
    let full = spec.rprime_bounds;
    let mut prev: Option<f64> = None;
    let mut rows = Vec::new();
    for alpha in spec.alphas() {
        let result = match (spec.warm_start, prev) {
            (true, Some(c)) => {
                let win = ((c - WARM_WINDOW).max(full.0), (c + WARM_WINDOW).min(full.1));
                match sweep_row(obj, spec, alpha, win) {
                    Ok(o) if window_interior(o.rprime, win, full, spec.tol) => Ok(o),
                    _ => sweep_row(obj, spec, alpha, full),
                }
            }
            _ => sweep_row(obj, spec, alpha, full),
        };
        prev = result.as_ref().ok().map(|o| o.rprime);
        rows.push(SweepRow { alpha, result });
    }
    SweepResult { rows }
}

/// A warm optimum pressed against a window edge that is not a true bound
/// is not trusted.
fn window_interior(x: f64, win: (f64, f64), full: (f64, f64), tol: f64) -> bool {
    let near = |a: f64, b: f64| (a - b).abs() <= 2.0 * tol;
    !((near(x, win.0) && win.0 > full.0) || (near(x, win.1) && win.1 < full.1))
}

/// Refines the best row of a sweep by a golden-section search over α
/// within one grid step on either side, re-optimising `r′` at every probe.
pub fn refine_alpha(
    obj: &PreparedObjective,
    spec: &SweepSpec,
    result: &SweepResult,
) -> Result<(f64, RowOptimum)> {
    let (a0, _, _) = result
        .best()
        .ok_or(Error::DegenerateState("sweep has no successful rows"))?;
    let (lo, hi, n) = spec.alpha;
    let h = (hi - lo) / (n - 1) as f64;
    let bounds = ((a0 - h).max(lo), (a0 + h).min(hi));
    let (a, _) = golden_section(
        |a| Ok(sweep_row(obj, spec, a, spec.rprime_bounds)?.fidelity),
        bounds.0,
        bounds.1,
        spec.tol,
    )?;
    Ok((a, sweep_row(obj, spec, a, spec.rprime_bounds)?))
}

/// Amplitude maximising the fidelity of an N-photon-subtracted state with
/// the squeezed cat of matching parity at fixed `r′`.
pub fn npss_optimal_alpha(
    n: u32,
    r_eff: f64,
    rprime: f64,
    grid: Option<GridSpec>,
    alpha_bounds: (f64, f64),
) -> Result<(f64, f64)> {
    let obj = Objective::NpssGrid { n, r_eff, grid }.prepare()?;
    let opt = maximize_on_interval(|a| obj.fidelity(a, rprime), alpha_bounds, 1e-4)?;
    Ok((opt.arg, opt.value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, v) =
            golden_section(|x| Ok(1.0 - (x - 0.37) * (x - 0.37)), -1.0, 2.0, 1e-8).unwrap();
        assert!((x - 0.37).abs() < 1e-7 && (v - 1.0).abs() < 1e-14);
        let o =
            maximize_on_interval(|x| Ok(1.0 - (x - 0.37) * (x - 0.37)), (-1.5, 1.5), 1e-4).unwrap();
        assert!((o.arg - 0.37).abs() < 1e-4 && !o.at_boundary && !o.flat);
    }

    #[test]
    fn flat_and_boundary_cases() {
        let o = maximize_on_interval(|_| Ok(0.5), (-1.0, 3.0), 1e-4).unwrap();
        assert!(o.flat && o.arg == 1.0);
        let o = maximize_on_interval(|x| Ok(x), (-1.0, 3.0), 1e-4).unwrap();
        assert!(o.at_boundary && (o.arg - 3.0).abs() < 1e-4);
    }

    #[test]
    fn picks_the_higher_of_two_peaks() {
        let f = |x: f64| {
            Ok((-(x + 1.0) * (x + 1.0) * 20.0).exp() * 0.8 + (-(x - 0.9) * (x - 0.9) * 20.0).exp())
        };
        let o = maximize_on_interval(f, (-1.5, 1.5), 1e-5).unwrap();
        assert!((o.arg - 0.9).abs() < 1e-3, "{o:?}");
    }

    #[test]
    fn tpss_point() {
        let obj = Objective::AnalyticTpss { r: -0.7 }.prepare().unwrap();
        let o = optimize_rprime(|rp| obj.fidelity(1.26, rp), (-1.5, 1.5), 1e-4).unwrap();
        assert!((o.arg + 0.425).abs() < 0.015 && o.value > 0.999, "{o:?}");
    }

    #[test]
    fn warm_and_cold_agree() {
        let mut spec = SweepSpec::new(Objective::AnalyticPsas { r: -0.7 });
        spec.alpha = (0.2, 3.0, 15);
        let warm = sweep(&spec).unwrap();
        spec.warm_start = false;
        let cold = sweep(&spec).unwrap();
        for (a, b) in warm.rows.iter().zip(&cold.rows) {
            let (a, b) = (a.result.as_ref().unwrap(), b.result.as_ref().unwrap());
            assert!((a.rprime - b.rprime).abs() <= 2.0 * spec.tol, "{a:?} {b:?}");
        }
    }

    #[test]
    fn row_errors_are_kept() {
        let mut spec = SweepSpec::new(Objective::AnalyticTpss { r: -0.7 });
        spec.alpha = (0.0, 1.0, 3);
        spec.fixed_rprime = Some(f64::NAN);
        let res = sweep(&spec).unwrap();
        assert_eq!(res.rows.len(), 3);
        assert!(res.rows.iter().all(|r| r.result.is_err()));
        assert!(res.best().is_none());
    }

    #[test]
    fn invalid_specs() {
        let mut spec = SweepSpec::new(Objective::AnalyticTpss { r: -0.7 });
        spec.alpha = (1.0, 1.0, 5);
        assert!(sweep(&spec).is_err());
        assert!(Objective::AnalyticPsas { r: 0.0 }.prepare().is_err());
    }
}
