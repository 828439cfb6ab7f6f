use std::fs;
use std::path::{Path, PathBuf};

use catforge_core::analytic::{self, IdealSubtractAddState};
use catforge_core::fock::{self, ChainDims, DensityMatrix};
use catforge_core::gaussian::{self, DetectorModel, SignedGaussianMixture};
use catforge_core::optimize::{
    self, Objective, PreparedObjective, SweepResult, SweepRow, SweepSpec,
};
use catforge_core::wigner::{
    self, GridSpec, NpssParams, NpssState, PhasePoint, WignerGrid, BOUNDARY_WARN,
};
use catforge_core::{CatTarget, CouplerParams, Parity};
use rayon::prelude::*;
use serde_json::{json, Map, Value};

use crate::cli::{Common, FidelityArgs, FigureArgs, ValidateArgs, WignerArgs};
use crate::config::ConfigFile;
use crate::output;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn format_of(cfg: &ConfigFile, common: &Common, default: &str) -> Result<Format, CliError> {
    match cfg
        .resolve("format", common.format.clone(), default.to_string())?
        .as_str()
    {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        other => Err(CliError::usage(format!(
            "unknown format '{other}' (csv or json)"
        ))),
    }
}

fn load(common: &Common, keys: &[&str]) -> Result<ConfigFile, CliError> {
    let cfg = ConfigFile::load(common.config.as_deref())?;
    cfg.check_keys(keys)?;
    Ok(cfg)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text)
        .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))
}

fn bs(t: f64) -> Result<CouplerParams, CliError> {
    Ok(CouplerParams::beam_splitter(t)?)
}

fn amp(g: f64) -> Result<CouplerParams, CliError> {
    Ok(CouplerParams::amplifier(g)?)
}

/// Coupler chain of a heralded scheme: two taps, or a tap then an amplifier.
fn chain(scheme: &str, t: f64, g: f64) -> Result<Vec<CouplerParams>, CliError> {
    match scheme {
        "tpss" => Ok(vec![bs(t)?, bs(t)?]),
        "psas" => Ok(vec![bs(t)?, amp(g)?]),
        other => Err(CliError::usage(format!(
            "unknown coupler chain '{other}' (tpss or psas)"
        ))),
    }
}

fn heralded(r: f64, stages: &[CouplerParams], eta: f64) -> Result<SignedGaussianMixture, CliError> {
    let pl = gaussian::build_experiment(r, stages, DetectorModel::new(eta)?)?;
    Ok(gaussian::condition_clicks(&pl)?)
}

const FIDELITY_KEYS: &[&str] = &["format", "scheme", "r", "alpha", "rprime", "T", "G", "eta"];

pub fn fidelity(a: FidelityArgs) -> Result<(), CliError> {
    let cfg = load(&a.common, FIDELITY_KEYS)?;
    let fmt = format_of(&cfg, &a.common, "csv")?;
    let scheme = cfg.resolve("scheme", a.scheme, "tpss".to_string())?;
    let r = cfg.resolve("r", a.r, -0.7)?;
    let alpha = cfg.resolve("alpha", a.alpha, 1.26)?;
    let rprime = cfg.resolve("rprime", a.rprime, -0.425)?;
    let t = cfg.resolve("T", a.t, 0.99)?;
    let g = cfg.resolve("G", a.g, 1.01)?;
    let eta = cfg.resolve("eta", a.eta, 1.0)?;
    let target = CatTarget::even(alpha, rprime);
    target.validate()?;

    let mut report = Map::new();
    report.insert("scheme".into(), json!(scheme));
    report.insert("r".into(), json!(r));
    report.insert("alpha".into(), json!(alpha));
    report.insert("rprime".into(), json!(rprime));
    let mut cols = vec![
        scheme.clone(),
        output::sig12(r),
        output::sig12(alpha),
        output::sig12(rprime),
    ];
    let mut header = String::from("scheme,r,alpha,rprime");
    match scheme.as_str() {
        "tpss" | "psas" => {
            let f = if scheme == "tpss" {
                analytic::fidelity_tpss(r, &target)?
            } else {
                analytic::fidelity_psas(r, &target)?
            };
            report.insert("fidelity".into(), json!(f));
            header.push_str(",F");
            cols.push(output::sig12(f));
        }
        "realistic-tpss" | "realistic-psas" => {
            let m = heralded(r, &chain(&scheme["realistic-".len()..], t, g)?, eta)?;
            let f = gaussian::mixture_fidelity_vs_sscs(&m, &target)?;
            for (k, v) in [
                ("T", t),
                ("G", g),
                ("eta", eta),
                ("fidelity", f),
                ("success_probability", m.probability),
            ] {
                report.insert(k.into(), json!(v));
            }
            header.push_str(",T,G,eta,F,P");
            cols.extend([t, g, eta, f, m.probability].map(output::sig12));
        }
        other => return Err(CliError::usage(format!("unknown scheme '{other}'"))),
    }
    match fmt {
        Format::Json => print!("{}", output::pretty(&Value::Object(report))),
        Format::Csv => print!("{header}\n{}\n", cols.join(",")),
    }
    Ok(())
}

const FIGURE_KEYS: &[&str] = &[
    "format",
    "id",
    "out",
    "r",
    "T",
    "G",
    "eta",
    "alpha-min",
    "alpha-max",
    "alpha-steps",
    "rprime-min",
    "rprime-max",
    "tol",
    "R",
    "rprime",
    "n-min",
    "n-max",
    "grid-step",
];

/// Every row optimised independently from the full `r′` range, so rows can
/// run in parallel and the output does not depend on scheduling.
fn parallel_sweep(obj: &PreparedObjective, spec: &SweepSpec) -> SweepResult {
    let rows = spec
        .alphas()
        .into_par_iter()
        .map(|alpha| SweepRow {
            alpha,
            result: optimize::sweep_row(obj, spec, alpha, spec.rprime_bounds),
        })
        .collect();
    SweepResult { rows }
}

struct Emitter<'a> {
    dir: &'a Path,
    fmt: Format,
    files: Vec<Value>,
}

impl Emitter<'_> {
    fn emit(
        &mut self,
        stem: &str,
        curve: &str,
        body: (String, Value),
        info: Value,
    ) -> Result<(), CliError> {
        let name = format!("{stem}.{}", self.fmt.ext());
        let text = match self.fmt {
            Format::Csv => body.0,
            Format::Json => output::pretty(&body.1),
        };
        write_file(&self.dir.join(&name), &text)?;
        self.files
            .push(json!({ "file": name, "curve": curve, "parameters": info }));
        Ok(())
    }
}

pub fn figure(a: FigureArgs) -> Result<(), CliError> {
    let cfg = load(&a.common, FIGURE_KEYS)?;
    let fmt = format_of(&cfg, &a.common, "csv")?;
    let id: u32 = cfg
        .resolve_opt("id", a.id)?
        .ok_or_else(|| CliError::usage("figure id required (1, 2, 5, 6, 7, 8 or 9)"))?;
    if ![1, 2, 5, 6, 7, 8, 9].contains(&id) {
        return Err(CliError::usage(format!(
            "unknown figure id {id} (1, 2, 5, 6, 7, 8 or 9)"
        )));
    }
    let dir: PathBuf = cfg.resolve("out", a.out, PathBuf::from("."))?;
    fs::create_dir_all(&dir)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", dir.display())))?;
    let r = cfg.resolve("r", a.r, -0.7)?;
    let t = cfg.resolve("T", a.t, 0.99)?;
    let g = cfg.resolve("G", a.g, 1.01)?;
    let eta = cfg.resolve("eta", a.eta, if id >= 7 { 0.6 } else { 1.0 })?;
    let alpha_min = cfg.resolve("alpha-min", a.alpha_min, if id == 9 { 0.05 } else { 0.0 })?;
    let alpha_max = cfg.resolve("alpha-max", a.alpha_max, 3.5)?;
    let alpha_steps = cfg.resolve("alpha-steps", a.alpha_steps, if id == 9 { 70 } else { 71 })?;
    let rprime_min = cfg.resolve("rprime-min", a.rprime_min, -1.5)?;
    let rprime_max = cfg.resolve("rprime-max", a.rprime_max, 1.5)?;
    let tol = cfg.resolve("tol", a.tol, 1e-4)?;

    let mut params = Map::new();
    for (k, v) in [
        ("alpha_min", json!(alpha_min)),
        ("alpha_max", json!(alpha_max)),
        ("alpha_steps", json!(alpha_steps)),
    ] {
        params.insert(k.into(), v);
    }
    let mut em = Emitter {
        dir: &dir,
        fmt,
        files: Vec::new(),
    };
    let stem = format!("fig{id}");

    if id == 9 {
        let big_r = cfg.resolve("R", a.big_r, 0.6)?;
        let rprime = cfg.resolve("rprime", a.rprime, -0.44)?;
        let n_min = cfg.resolve("n-min", a.n_min, 3)?;
        let n_max = cfg.resolve("n-max", a.n_max, 8)?;
        let step = cfg.resolve("grid-step", a.grid_step, 0.03)?;
        if n_min == 0 || n_min > n_max {
            return Err(CliError::usage("need 1 <= n-min <= n-max"));
        }
        for (k, v) in [
            ("R", json!(big_r)),
            ("rprime", json!(rprime)),
            ("grid_step", json!(step)),
        ] {
            params.insert(k.into(), v);
        }
        for n in n_min..=n_max {
            let np = NpssParams::new(n, big_r)?;
            let nat = optimize::default_npss_grid(&np);
            let grid = GridSpec::symmetric(nat.x_max, nat.p_max, step)?;
            let obj = Objective::NpssGrid {
                n,
                r_eff: big_r,
                grid: Some(grid),
            };
            let mut spec = SweepSpec::new(obj.clone());
            spec.alpha = (alpha_min, alpha_max, alpha_steps);
            spec.fixed_rprime = Some(rprime);
            spec.validate()?;
            let prep = obj.prepare()?;
            let res = parallel_sweep(&prep, &spec);
            let best = optimize::maximize_on_interval(
                |x| prep.fidelity(x, rprime),
                (alpha_min, alpha_max),
                tol,
            )?;
            let info = json!({
                "N": n, "R": big_r, "rprime": rprime, "parity": parity_name(Parity::of(n)),
                "grid": grid_json(&grid), "optimum": { "alpha": best.arg, "F": best.value },
            });
            em.emit(
                &format!("{stem}_N{n}"),
                &format!("N={n}"),
                (output::sweep_csv(&res), output::sweep_json(&res)),
                info,
            )?;
        }
    } else {
        let objective = match id {
            1 => Objective::AnalyticTpss { r },
            2 => Objective::AnalyticPsas { r },
            _ => {
                let scheme = if id % 2 == 1 { "tpss" } else { "psas" };
                for (k, v) in [("T", json!(t)), ("eta", json!(eta))] {
                    params.insert(k.into(), v);
                }
                if scheme == "psas" {
                    params.insert("G".into(), json!(g));
                }
                Objective::Realistic {
                    r,
                    stages: chain(scheme, t, g)?,
                    eta,
                }
            }
        };
        params.insert("r".into(), json!(r));
        params.insert("rprime_bounds".into(), json!([rprime_min, rprime_max]));
        params.insert("tol".into(), json!(tol));
        params.insert("objective".into(), json!(objective_name(&objective)));
        let mut spec = SweepSpec::new(objective);
        spec.alpha = (alpha_min, alpha_max, alpha_steps);
        spec.rprime_bounds = (rprime_min, rprime_max);
        spec.tol = tol;
        spec.warm_start = false;
        spec.validate()?;
        let prep = spec.objective.prepare()?;
        let solid = parallel_sweep(&prep, &spec);
        let mut fixed = spec.clone();
        fixed.fixed_rprime = Some(0.0);
        let dashed = parallel_sweep(&prep, &fixed);
        let best = |res: &SweepResult| {
            res.best()
                .map(|(a, f, rp)| json!({ "alpha": a, "F_opt": f, "rprime_opt": rp }))
        };
        em.emit(
            &format!("{stem}_solid"),
            "solid",
            (output::sweep_csv(&solid), output::sweep_json(&solid)),
            json!({ "target": "squeezed cat, r' optimised", "best": best(&solid) }),
        )?;
        em.emit(
            &format!("{stem}_dashed"),
            "dashed",
            (output::sweep_csv(&dashed), output::sweep_json(&dashed)),
            json!({ "target": "regular cat, r' = 0", "best": best(&dashed) }),
        )?;
        em.emit(
            &format!("{stem}_panel_b"),
            "panel_b",
            (output::rprime_csv(&solid), output::rprime_json(&solid)),
            json!({ "target": "optimising r' of the solid curve" }),
        )?;
    }
    let manifest =
        json!({ "figure": id, "format": fmt.ext(), "parameters": params, "files": em.files });
    write_file(
        &dir.join(format!("{stem}_manifest.json")),
        &output::pretty(&manifest),
    )?;
    Ok(())
}

fn objective_name(o: &Objective) -> &'static str {
    match o {
        Objective::AnalyticTpss { .. } => "ideal a^2",
        Objective::AnalyticPsas { .. } => "ideal a^dagger a",
        Objective::Realistic { stages, .. }
            if stages.len() == 2 && stages[1].kind == catforge_core::CouplerKind::Amplifier =>
        {
            "heralded a^dagger a"
        }
        Objective::Realistic { .. } => "heralded a^2",
        Objective::NpssGrid { .. } => "a^N",
    }
}

fn parity_name(p: Parity) -> &'static str {
    match p {
        Parity::Even => "even",
        Parity::Odd => "odd",
    }
}

fn grid_json(s: &GridSpec) -> Value {
    json!({ "x": [s.x_min, s.x_max, s.nx], "p": [s.p_min, s.p_max, s.np] })
}

const WIGNER_KEYS: &[&str] = &[
    "format", "state", "out", "r", "alpha", "rprime", "parity", "N", "R", "scheme", "T", "G",
    "eta", "x-max", "p-max", "step",
];

pub fn wigner(a: WignerArgs) -> Result<(), CliError> {
    let cfg = load(&a.common, WIGNER_KEYS)?;
    let fmt = format_of(&cfg, &a.common, "csv")?;
    let state = cfg.resolve("state", a.state, "tpss".to_string())?;
    let x_max = cfg.resolve("x-max", a.x_max, 7.0)?;
    let p_max = cfg.resolve("p-max", a.p_max, 5.0)?;
    let step = cfg.resolve("step", a.step, 0.05)?;
    let spec = GridSpec::symmetric(x_max, p_max, step)?;
    let r = cfg.resolve("r", a.r, -0.7)?;
    let grid = match state.as_str() {
        "tpss" | "psas" => {
            let s = if state == "tpss" {
                IdealSubtractAddState::tpss(r)?
            } else {
                IdealSubtractAddState::psas(r)?
            };
            WignerGrid::from_fn(spec, format!("{state} r={r}"), |x, p| {
                wigner::wigner_ideal(&s, PhasePoint::new(x, p))
            })
        }
        "sscs" => {
            let alpha = cfg.resolve("alpha", a.alpha, 1.26)?;
            let rprime = cfg.resolve("rprime", a.rprime, -0.425)?;
            let parity = match cfg
                .resolve("parity", a.parity, "even".to_string())?
                .as_str()
            {
                "even" => Parity::Even,
                "odd" => Parity::Odd,
                other => {
                    return Err(CliError::usage(format!(
                        "unknown parity '{other}' (even or odd)"
                    )))
                }
            };
            let t = CatTarget::new(alpha, rprime, parity);
            wigner::wigner_sscs(0.0, 0.0, &t)?;
            let meta = format!(
                "sscs alpha={alpha} rprime={rprime} parity={}",
                parity_name(parity)
            );
            WignerGrid::from_fn(spec, meta, |x, p| {
                wigner::wigner_sscs(x, p, &t).unwrap_or(f64::NAN)
            })
        }
        "npss" => {
            let n = cfg.resolve("N", a.n, 3)?;
            let big_r = cfg.resolve("R", a.big_r, 0.6)?;
            NpssState::new(NpssParams::new(n, big_r)?)?.grid(spec)
        }
        "realistic" => {
            let scheme = cfg.resolve("scheme", a.scheme, "tpss".to_string())?;
            let t = cfg.resolve("T", a.t, 0.99)?;
            let g = cfg.resolve("G", a.g, 1.01)?;
            let eta = cfg.resolve("eta", a.eta, 1.0)?;
            let m = heralded(r, &chain(&scheme, t, g)?, eta)?;
            let mut grid = gaussian::mixture_to_grid(&m, spec);
            grid.meta = format!(
                "realistic {scheme} r={r} T={t} G={g} eta={eta} P={}",
                output::sig12(m.probability)
            );
            grid
        }
        other => return Err(CliError::usage(format!("unknown state '{other}'"))),
    };
    let edge = grid.boundary_max();
    if edge > BOUNDARY_WARN {
        eprintln!(
            "warning: Wigner function reaches {edge:.3e} on the grid boundary; enlarge x-max/p-max"
        );
    }
    let text = match fmt {
        Format::Csv => output::grid_csv(&grid),
        Format::Json => output::pretty(&output::grid_json(&grid)),
    };
    match cfg.resolve_opt("out", a.out)? {
        Some(path) => write_file(&path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

const VALIDATE_KEYS: &[&str] = &["format", "level", "out"];

struct Check {
    name: &'static str,
    max_error: f64,
    tolerance: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

fn check_closed_forms() -> Result<Check, CliError> {
    let mut worst: f64 = 0.0;
    for r in [-1.0, -0.7, -0.3] {
        let tp = IdealSubtractAddState::tpss(r)?.to_fock(200)?;
        let ps = IdealSubtractAddState::psas(r)?.to_fock(200)?;
        for alpha in [0.5, 1.5, 2.5] {
            for rprime in [-0.8, -0.3, 0.2] {
                let t = CatTarget::even(alpha, rprime);
                let cat = fock::cat_target_fock(&t, 200)?;
                worst = worst
                    .max((analytic::fidelity_tpss(r, &t)? - fock::fidelity_fock(&tp, &cat)?).abs())
                    .max((analytic::fidelity_psas(r, &t)? - fock::fidelity_fock(&ps, &cat)?).abs());
            }
        }
    }
    Ok(Check {
        name: "closed-form fidelities vs Fock",
        max_error: worst,
        tolerance: 1e-8,
    })
}

fn check_heralded() -> Result<Check, CliError> {
    let sets = [
        ("tpss", 0.99, 1.0),
        ("psas", 0.99, 1.0),
        ("tpss", 0.99, 0.6),
        ("psas", 0.95, 0.7),
    ];
    let pts = [(0.0, 0.0), (0.7, 0.2), (-1.5, -0.4), (2.4, 0.1)];
    let r = -0.7;
    let mut worst: f64 = 0.0;
    for (scheme, t, eta) in sets {
        let stages = chain(scheme, t, 2.0 - t)?;
        let m = heralded(r, &stages, eta)?;
        let sv = fock::squeezed_vacuum_fock(r, 96)?;
        let out = fock::oracle_click_chain(
            &sv,
            &stages,
            eta,
            ChainDims {
                signal: 96,
                ancilla: 24,
            },
        )?;
        for (x, p) in pts {
            worst = worst.max((m.wigner(x, p) - wigner::fock_wigner(&out.state, x, p)).abs());
        }
    }
    Ok(Check {
        name: "heralded mixture vs Fock Wigner",
        max_error: worst,
        tolerance: 1e-4,
    })
}

fn check_npss_two() -> Result<Check, CliError> {
    let r = -0.7;
    let st = NpssState::new(NpssParams::from_source(2, 1.0, r)?)?;
    let mut worst: f64 = 0.0;
    for (x, p) in [(0.0, 0.0), (1.0, 0.3), (-2.2, 0.1), (0.3, -0.9)] {
        let pt = PhasePoint::new(x, p);
        worst = worst.max((st.eval(pt) - wigner::wigner_tpss(pt, r)?).abs());
    }
    Ok(Check {
        name: "two-photon subtraction vs closed form",
        max_error: worst,
        tolerance: 1e-8,
    })
}

fn check_npss_purity() -> Result<Check, CliError> {
    let params = NpssParams::new(3, 0.6)?;
    let st = NpssState::new(params)?;
    let g = st.grid(params.natural_grid());
    let v = params.to_fock(128)?;
    let rho = DensityMatrix::from_pure(&v.normalized()?);
    let at_origin =
        (st.eval(PhasePoint::new(0.3, 0.2)) - wigner::fock_wigner(&rho, 0.3, 0.2)).abs();
    Ok(Check {
        name: "three-photon subtraction purity and Fock match",
        max_error: (g.purity() - 1.0).abs().max(at_origin),
        tolerance: 1e-5,
    })
}

pub fn validate(a: ValidateArgs) -> Result<(), CliError> {
    let cfg = load(&a.common, VALIDATE_KEYS)?;
    let fmt = format_of(&cfg, &a.common, "json")?;
    let level = cfg.resolve("level", a.level, "fast".to_string())?;
    let mut checks = vec![check_closed_forms()?];
    match level.as_str() {
        "fast" => {}
        "full" => {
            checks.push(check_heralded()?);
            checks.push(check_npss_two()?);
            checks.push(check_npss_purity()?);
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown level '{other}' (fast or full)"
            )))
        }
    }
    let passed = checks.iter().all(Check::passed);
    let text = match fmt {
        Format::Json => {
            let list: Vec<Value> = checks
                .iter()
                .map(|c| json!({ "name": c.name, "max_error": c.max_error, "tolerance": c.tolerance, "passed": c.passed() }))
                .collect();
            output::pretty(&json!({ "level": level, "passed": passed, "checks": list }))
        }
        Format::Csv => {
            let mut s = String::from("name,max_error,tolerance,passed\n");
            for c in &checks {
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    c.name,
                    output::sig12(c.max_error),
                    output::sig12(c.tolerance),
                    c.passed()
                ));
            }
            s
        }
    };
    print!("{text}");
    if let Some(path) = cfg.resolve_opt::<PathBuf>("out", a.out)? {
        write_file(&path, &text)?;
    }
    if passed {
        Ok(())
    } else {
        let failed: Vec<&str> = checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name)
            .collect();
        Err(CliError::validation(format!(
            "failed: {}",
            failed.join("; ")
        )))
    }
}
