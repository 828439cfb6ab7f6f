//! CSV and JSON renderings. CSV uses `,` separators, `\n` line endings and
//! 12 significant digits.

use catforge_core::optimize::SweepResult;
use catforge_core::wigner::WignerGrid;
use serde_json::{json, Value};

use std::fmt::Write as _;

/// `v` rounded to 12 significant digits, trailing zeros dropped.
pub fn sig12(v: f64) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{v:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let e: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&e) {
        trim(format!("{:.*}", (11 - e) as usize, v))
    } else {
        format!("{}e{e}", trim(mant.to_string()))
    }
}

fn trim(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn cell(v: Option<f64>) -> String {
    v.map(sig12).unwrap_or_default()
}

pub fn sweep_csv(res: &SweepResult) -> String {
    let mut s = String::from("alpha,F_opt,rprime_opt\n");
    for row in &res.rows {
        let ok = row.result.as_ref().ok();
        let _ = writeln!(
            s,
            "{},{},{}",
            sig12(row.alpha),
            cell(ok.map(|o| o.fidelity)),
            cell(ok.map(|o| o.rprime))
        );
    }
    s
}

/// Panel (b): the optimising `r′` against `α`.
pub fn rprime_csv(res: &SweepResult) -> String {
    let mut s = String::from("alpha,rprime_opt\n");
    for row in &res.rows {
        let _ = writeln!(
            s,
            "{},{}",
            sig12(row.alpha),
            cell(row.result.as_ref().ok().map(|o| o.rprime))
        );
    }
    s
}

fn best_json(res: &SweepResult) -> Value {
    match res.best() {
        Some((a, f, rp)) => json!({ "alpha": a, "F_opt": f, "rprime_opt": rp }),
        None => Value::Null,
    }
}

pub fn sweep_json(res: &SweepResult) -> Value {
    let col = |f: &dyn Fn(&catforge_core::optimize::RowOptimum) -> f64| -> Vec<Value> {
        res.rows
            .iter()
            .map(|r| {
                r.result
                    .as_ref()
                    .map(|o| json!(f(o)))
                    .unwrap_or(Value::Null)
            })
            .collect()
    };
    let errors: Vec<Value> = res
        .rows
        .iter()
        .filter_map(|r| {
            r.result
                .as_ref()
                .err()
                .map(|e| json!({ "alpha": r.alpha, "error": e.to_string() }))
        })
        .collect();
    json!({
        "alpha": res.rows.iter().map(|r| r.alpha).collect::<Vec<_>>(),
        "F_opt": col(&|o| o.fidelity),
        "rprime_opt": col(&|o| o.rprime),
        "best": best_json(res),
        "errors": errors,
    })
}

pub fn rprime_json(res: &SweepResult) -> Value {
    let v = sweep_json(res);
    json!({ "alpha": v["alpha"], "rprime_opt": v["rprime_opt"] })
}

/// One header line, then one row per `p` sample with `x` increasing
/// along the row.
pub fn grid_csv(g: &WignerGrid) -> String {
    let s = g.spec;
    let mut out = format!(
        "# x_min={},x_max={},nx={},dx={},p_min={},p_max={},np={},dp={},state={}\n",
        sig12(s.x_min),
        sig12(s.x_max),
        s.nx,
        sig12(s.dx()),
        sig12(s.p_min),
        sig12(s.p_max),
        s.np,
        sig12(s.dp()),
        g.meta.replace(['\n', '\r'], " ")
    );
    for j in 0..s.np {
        let row: Vec<String> = (0..s.nx).map(|i| sig12(g.get(i, j))).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// `values[j][i] = W(x_i, p_j)`.
pub fn grid_json(g: &WignerGrid) -> Value {
    let values: Vec<Vec<f64>> = (0..g.spec.np)
        .map(|j| (0..g.spec.nx).map(|i| g.get(i, j)).collect())
        .collect();
    json!({ "x_axis": g.x_axis(), "p_axis": g.p_axis(), "values": values, "meta": g.meta })
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialise");
    s.push('\n');
    s
}
