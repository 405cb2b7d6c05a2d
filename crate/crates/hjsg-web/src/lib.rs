//! Browser bindings for the adaptive sparse-grid LDG solver.
//!
//! Three interactive operations are exposed to the demo page, all returning
//! JSON strings so the page needs no generated glue beyond wasm-bindgen:
//!
//! - [`run_benchmark`]: solve a 2D benchmark and return a sampled solution
//!   field, the active elements, a diagonal cut against the reference, and
//!   run statistics;
//! - [`sample_basis`]: sample one hierarchical basis function (orthonormal
//!   or interpolatory family) for the basis explorer;
//! - [`sweep_thresholds`]: run a short adaptivity-threshold sweep and return
//!   the error/DoF table with convergence rates.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use hjsg_core::alpert::AlpertBasis1d;
use hjsg_core::bench::{
    annotate_rates, run_case, BenchmarkCase, CaseId, ConvergenceRow, GridMode, RateMode, RunConfig,
};
use hjsg_core::interp::InterpBasis1d;
use hjsg_core::project::eval_field_at;

#[derive(Serialize)]
struct ActiveElement {
    levels: Vec<u8>,
    translations: Vec<u32>,
    support: Vec<(f64, f64)>,
    indicator: f64,
}

#[derive(Serialize)]
struct SlicePoint {
    x: f64,
    numeric: f64,
    reference: Option<f64>,
}

#[derive(Serialize)]
struct BenchmarkResult {
    case: String,
    samples: usize,
    /// Row-major `samples x samples` grid over `[0,1]^2` (x fastest).
    grid: Vec<f64>,
    min: f64,
    max: f64,
    elements: Vec<ActiveElement>,
    /// Values along the diagonal `x = y`.
    slice: Vec<SlicePoint>,
    dof: usize,
    steps: usize,
    l2_error: Option<f64>,
    dof_trace: Vec<usize>,
}

fn run_benchmark_impl(
    case: &str,
    k: usize,
    m: usize,
    eps: f64,
    max_level: u8,
    t_final: f64,
    samples: usize,
) -> Result<String, String> {
    let case_id = CaseId::parse(case).map_err(|e| e.to_string())?;
    let mut cfg = RunConfig::defaults(case_id, 2, k).map_err(|e| e.to_string())?;
    cfg.m = m.max(k);
    cfg.max_level = max_level.clamp(2, 8);
    cfg.mode = GridMode::Adaptive;
    cfg.eps = eps;
    cfg.eta = eps / 10.0;
    if t_final > 0.0 {
        cfg.t_final = t_final;
    }
    let out = run_case(&cfg).map_err(|e| e.to_string())?;
    let bench = BenchmarkCase::new(case_id, 2).map_err(|e| e.to_string())?;

    let n = samples.clamp(17, 257);
    let mut grid = Vec::with_capacity(n * n);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for j in 0..n {
        for i in 0..n {
            let x = [i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64];
            let v = eval_field_at(&out.phi, &out.space, &out.tables.alpert, &out.tables.interp, &x)
                .map_err(|e| e.to_string())?;
            lo = lo.min(v);
            hi = hi.max(v);
            grid.push(v);
        }
    }

    let elements = out
        .space
        .keys()
        .iter()
        .enumerate()
        .map(|(slot, key)| ActiveElement {
            levels: key.levels(2).0,
            translations: key.translations(2),
            support: key.support(2),
            indicator: out.phi.block(slot).iter().map(|c| c * c).sum::<f64>().sqrt(),
        })
        .collect();

    let slice = (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            let x = [t, t];
            let numeric =
                eval_field_at(&out.phi, &out.space, &out.tables.alpert, &out.tables.interp, &x)
                    .unwrap_or(f64::NAN);
            let reference = bench.reference(&x, cfg.t_final).ok();
            SlicePoint { x: t, numeric, reference }
        })
        .collect();

    let result = BenchmarkResult {
        case: case_id.name().to_string(),
        samples: n,
        grid,
        min: lo,
        max: hi,
        elements,
        slice,
        dof: out.max_dof,
        steps: out.steps,
        l2_error: out.l2_error,
        dof_trace: out.trace.iter().map(|r| r.dof).collect(),
    };
    serde_json::to_string(&result).map_err(|e| e.to_string())
}

/// Solve a 2D benchmark adaptively and return the sampled field, active
/// elements, diagonal cut, and statistics as JSON.
#[wasm_bindgen]
pub fn run_benchmark(
    case: &str,
    k: usize,
    m: usize,
    eps: f64,
    max_level: u8,
    t_final: f64,
    samples: usize,
) -> Result<String, JsValue> {
    run_benchmark_impl(case, k, m, eps, max_level, t_final, samples)
        .map_err(|e| JsValue::from_str(&e))
}

#[derive(Serialize)]
struct BasisCurve {
    xs: Vec<f64>,
    ys: Vec<f64>,
    label: String,
}

fn sample_basis_impl(
    family: &str,
    degree: usize,
    level: u8,
    translation: u32,
    index: usize,
    samples: usize,
) -> Result<String, String> {
    let n = samples.clamp(32, 4096);
    let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
    let ys: Vec<f64> = match family {
        "orthonormal" => {
            let basis = AlpertBasis1d::new(degree).map_err(|e| e.to_string())?;
            if index > degree {
                return Err(format!("index {index} exceeds degree {degree}"));
            }
            xs.iter().map(|&x| basis.eval(level, translation, index, x)).collect()
        }
        "interpolatory" => {
            let basis = InterpBasis1d::new(degree).map_err(|e| e.to_string())?;
            if index > degree {
                return Err(format!("index {index} exceeds degree {degree}"));
            }
            xs.iter().map(|&x| basis.eval(level, translation, index, x)).collect()
        }
        other => return Err(format!("unknown family `{other}`")),
    };
    let label = format!("{family} deg {degree}, level {level}, j {translation}, i {index}");
    serde_json::to_string(&BasisCurve { xs, ys, label }).map_err(|e| e.to_string())
}

/// Sample one 1D hierarchical basis function for plotting.
#[wasm_bindgen]
pub fn sample_basis(
    family: &str,
    degree: usize,
    level: u8,
    translation: u32,
    index: usize,
    samples: usize,
) -> Result<String, JsValue> {
    sample_basis_impl(family, degree, level, translation, index, samples)
        .map_err(|e| JsValue::from_str(&e))
}

#[derive(Serialize)]
struct SweepRow {
    eps: f64,
    dof: usize,
    error: f64,
    r_eps: Option<f64>,
    r_dof: Option<f64>,
}

fn sweep_thresholds_impl(case: &str, k: usize, decades: usize) -> Result<String, String> {
    let case_id = CaseId::parse(case).map_err(|e| e.to_string())?;
    let decades = decades.clamp(2, 5);
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for p in 0..decades {
        let eps = 1e-3 / 10f64.powi(p as i32);
        let mut cfg = RunConfig::defaults(case_id, 2, k).map_err(|e| e.to_string())?;
        cfg.max_level = 6;
        cfg.eps = eps;
        cfg.eta = eps / 10.0;
        let out = run_case(&cfg).map_err(|e| e.to_string())?;
        let error = out.l2_error.ok_or("case has no reference solution")?;
        rows.push(ConvergenceRow::new(eps, out.max_dof, error));
    }
    annotate_rates(&mut rows, RateMode::ByThreshold).map_err(|e| e.to_string())?;
    let payload: Vec<SweepRow> = rows
        .iter()
        .map(|r| SweepRow {
            eps: r.control,
            dof: r.dof,
            error: r.error,
            r_eps: r.r_eps,
            r_dof: r.r_dof,
        })
        .collect();
    serde_json::to_string(&payload).map_err(|e| e.to_string())
}

/// Run a small threshold sweep (2D, N = 6) and return the convergence table.
#[wasm_bindgen]
pub fn sweep_thresholds(case: &str, k: usize, decades: usize) -> Result<String, JsValue> {
    sweep_thresholds_impl(case, k, decades).map_err(|e| JsValue::from_str(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_payload_is_well_formed() {
        let json = run_benchmark_impl("burgers", 1, 2, 1e-3, 4, 0.005, 33).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["samples"], 33);
        assert_eq!(v["grid"].as_array().unwrap().len(), 33 * 33);
        assert!(v["dof"].as_u64().unwrap() > 0);
        assert!(v["l2_error"].as_f64().unwrap() > 0.0);
        assert!(!v["elements"].as_array().unwrap().is_empty());
    }

    #[test]
    fn basis_payload_is_well_formed() {
        for family in ["orthonormal", "interpolatory"] {
            let json = sample_basis_impl(family, 2, 3, 1, 1, 64).unwrap();
            let v: serde_json::Value = serde_json::from_str(&json).unwrap();
            assert_eq!(v["xs"].as_array().unwrap().len(), 64);
            assert_eq!(v["ys"].as_array().unwrap().len(), 64);
        }
        assert!(sample_basis_impl("fourier", 2, 3, 1, 1, 64).is_err());
    }

    #[test]
    fn sweep_payload_has_rates() {
        let json = sweep_thresholds_impl("nonlinear2d", 1, 2).unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let rows = v.as_array().unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[1]["r_eps"].as_f64().is_some());
    }
}
