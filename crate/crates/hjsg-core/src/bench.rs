//! Benchmark problems, reference solutions, convergence rates, and the
//! end-to-end run driver shared by the CLI, the browser demo, and the
//! acceptance suite.
//!
//! Six problems are registered:
//!
//! | id            | Hamiltonian                      | bc       | reference |
//! |---------------|----------------------------------|----------|-----------|
//! | `burgers`     | `(sum q)^2 / 2`                  | periodic | characteristics |
//! | `cos`         | `-cos(sum q + 1)`                | periodic | characteristics |
//! | `nonlinear2d` | `q1 q2`                          | periodic | characteristics |
//! | `eikonal`     | `|q|` (regularized)              | outflow  | closed form |
//! | `hjb`         | `sum |q_m|` (regularized)        | outflow  | closed form |
//! | `control`     | steering/cost (regularized)      | periodic | none |
//!
//! The first three share the profile `-cos(2 pi sum x_m) / (2 pi)` (or its
//! sine/cosine variant) whose smooth-regime solution follows from the method
//! of characteristics; the reduced scalar problems are solved per point by a
//! safeguarded Newton iteration.

use std::f64::consts::PI;

use crate::adapt::{adaptive_initial_projection, AdaptConfig};
use crate::error::{Result, SolverError};
use crate::field::CoeffField;
use crate::hamiltonian::{regularize, AlphaStrategy, Hamiltonian, HamiltonianSpec};
use crate::ldg::SolverTables;
use crate::norms::l2_error_vs;
use crate::project::project_l2;
use crate::space::AdaptiveSpace;
use crate::tables::BoundaryCondition;
use crate::time::{evolve, Evolution, StepRecord, TimeConfig};

pub const BALL_RADIUS: f64 = 0.125; // r0 of the distance-profile cases

/// `g(z) = (z^2 - r0^2) / (2 r0)` shared by the eikonal and HJB cases.
pub fn distance_profile(z: f64) -> f64 {
    (z * z - BALL_RADIUS * BALL_RADIUS) / (2.0 * BALL_RADIUS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseId {
    Burgers,
    Cos,
    Nonlinear2d,
    Eikonal,
    Hjb,
    Control,
}

impl CaseId {
    pub fn parse(s: &str) -> Result<CaseId> {
        match s {
            "burgers" => Ok(CaseId::Burgers),
            "cos" => Ok(CaseId::Cos),
            "nonlinear2d" => Ok(CaseId::Nonlinear2d),
            "eikonal" => Ok(CaseId::Eikonal),
            "hjb" => Ok(CaseId::Hjb),
            "control" => Ok(CaseId::Control),
            other => Err(SolverError::InvalidConfig(format!("unknown case `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CaseId::Burgers => "burgers",
            CaseId::Cos => "cos",
            CaseId::Nonlinear2d => "nonlinear2d",
            CaseId::Eikonal => "eikonal",
            CaseId::Hjb => "hjb",
            CaseId::Control => "control",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchmarkCase {
    pub id: CaseId,
    pub d: usize,
}

impl BenchmarkCase {
    pub fn new(id: CaseId, d: usize) -> Result<Self> {
        if d < 1 || d > crate::element::MAX_DIM {
            return Err(SolverError::InvalidConfig(format!("dimension {d} unsupported")));
        }
        if matches!(id, CaseId::Nonlinear2d | CaseId::Control) && d != 2 {
            return Err(SolverError::InvalidConfig(format!(
                "case `{}` is two-dimensional",
                id.name()
            )));
        }
        Ok(BenchmarkCase { id, d })
    }

    /// Hamiltonian with analytic dissipation bounds.
    pub fn hamiltonian_spec(&self) -> HamiltonianSpec {
        let d = self.d;
        match self.id {
            CaseId::Burgers => HamiltonianSpec::new(
                Hamiltonian::SquaredSum,
                // |dH/dq_m| = |sum q| <= d for this initial profile
                AlphaStrategy::Fixed(vec![d as f64; d]),
            ),
            CaseId::Cos => HamiltonianSpec::new(
                Hamiltonian::NegCosSum,
                AlphaStrategy::Fixed(vec![1.0; d]),
            ),
            CaseId::Nonlinear2d => HamiltonianSpec::new(
                Hamiltonian::Product2d,
                // |dH/dq_1| = |q_2| <= 1 and vice versa for this profile
                AlphaStrategy::Fixed(vec![1.0, 1.0]),
            ),
            CaseId::Eikonal => HamiltonianSpec::new(
                Hamiltonian::EuclideanNorm { delta: 0.0 },
                AlphaStrategy::Fixed(vec![1.0; d]),
            ),
            CaseId::Hjb => HamiltonianSpec::new(
                Hamiltonian::SumAbs { delta: 0.0 },
                AlphaStrategy::Fixed(vec![1.0; d]),
            ),
            CaseId::Control => HamiltonianSpec::new(
                Hamiltonian::Control2d { delta: 0.0 },
                AlphaStrategy::Fixed(vec![1.0, 2.0]),
            ),
        }
    }

    pub fn bc(&self) -> BoundaryCondition {
        match self.id {
            CaseId::Eikonal | CaseId::Hjb => BoundaryCondition::Outflow,
            _ => BoundaryCondition::Periodic,
        }
    }

    pub fn initial(&self) -> Box<dyn Fn(&[f64]) -> f64 + Send + Sync> {
        match self.id {
            CaseId::Burgers | CaseId::Cos => Box::new(|x: &[f64]| {
                let s: f64 = x.iter().sum();
                -(2.0 * PI * s).cos() / (2.0 * PI)
            }),
            CaseId::Nonlinear2d => Box::new(|x: &[f64]| {
                -((2.0 * PI * x[0]).sin() + (2.0 * PI * x[1]).cos()) / (2.0 * PI)
            }),
            CaseId::Eikonal | CaseId::Hjb => Box::new(|x: &[f64]| {
                let r = x.iter().map(|&v| (v - 0.5) * (v - 0.5)).sum::<f64>().sqrt();
                distance_profile(r)
            }),
            CaseId::Control => Box::new(|_: &[f64]| 0.0),
        }
    }

    /// Default interpolation degree per problem class.
    pub fn default_m(&self, k: usize) -> usize {
        match self.id {
            CaseId::Burgers | CaseId::Cos | CaseId::Nonlinear2d => k,
            CaseId::Eikonal => k + 1,
            CaseId::Hjb | CaseId::Control => k + 2,
        }
    }

    pub fn default_t_final(&self) -> f64 {
        match self.id {
            CaseId::Burgers | CaseId::Cos => {
                if self.d >= 3 {
                    0.005
                } else {
                    0.01
                }
            }
            CaseId::Nonlinear2d => 0.03,
            CaseId::Eikonal | CaseId::Hjb => 0.1,
            CaseId::Control => 0.15,
        }
    }

    pub fn needs_regularization(&self) -> bool {
        matches!(self.id, CaseId::Eikonal | CaseId::Hjb | CaseId::Control)
    }

    pub fn has_reference(&self) -> bool {
        self.id != CaseId::Control
    }

    /// Closed-form viscosity solution (eikonal and HJB cases only).
    pub fn exact_solution(&self, x: &[f64], t: f64) -> Result<f64> {
        match self.id {
            CaseId::Eikonal => {
                let r = x.iter().map(|&v| (v - 0.5) * (v - 0.5)).sum::<f64>().sqrt();
                Ok(distance_profile((r - t).max(0.0)))
            }
            CaseId::Hjb => {
                let norm_sq: f64 = x
                    .iter()
                    .map(|&v| {
                        let c = v - 0.5;
                        let shrunk = (c - t).max(0.0).min(c + t);
                        shrunk * shrunk
                    })
                    .sum();
                Ok(distance_profile(norm_sq.sqrt()))
            }
            _ => Err(SolverError::NoExactSolution { case: self.id.name().into() }),
        }
    }

    /// Reference value in the smooth regime: closed form when available,
    /// otherwise the characteristics solve.
    pub fn reference(&self, x: &[f64], t: f64) -> Result<f64> {
        match self.id {
            CaseId::Eikonal | CaseId::Hjb => self.exact_solution(x, t),
            CaseId::Burgers => {
                let xi: f64 = x.iter().sum();
                let d = self.d as f64;
                let (xi0, _) = solve_reduced_characteristic(xi, t, |w| d * d * w, d * d)?;
                let w0 = (2.0 * PI * xi0).sin();
                Ok(-(2.0 * PI * xi0).cos() / (2.0 * PI) + t * d * d * w0 * w0 / 2.0)
            }
            CaseId::Cos => {
                let xi: f64 = x.iter().sum();
                let d = self.d as f64;
                let (xi0, _) =
                    solve_reduced_characteristic(xi, t, |w| d * (d * w + 1.0).sin(), d)?;
                let w0 = (2.0 * PI * xi0).sin();
                Ok(-(2.0 * PI * xi0).cos() / (2.0 * PI)
                    + t * (w0 * d * (d * w0 + 1.0).sin() + (d * w0 + 1.0).cos()))
            }
            CaseId::Nonlinear2d => nonlinear2d_reference(x, t),
            CaseId::Control => Err(SolverError::NoExactSolution { case: "control".into() }),
        }
    }
}

/// Solves `xi0 + t G'(w0(xi0)) = xi` with `w0(s) = sin(2 pi s)` by Newton
/// iteration with a bisection safeguard; valid before characteristics cross.
/// Returns `(xi0, derivative of the map at the root)`.
fn solve_reduced_characteristic(
    xi: f64,
    t: f64,
    g_prime: impl Fn(f64) -> f64,
    speed_bound: f64,
) -> Result<(f64, f64)> {
    let f = |s: f64| s + t * g_prime((2.0 * PI * s).sin()) - xi;
    // derivative by central differences: robust for every Hamiltonian here
    let fp = |s: f64| {
        let h = 1e-7;
        (f(s + h) - f(s - h)) / (2.0 * h)
    };
    let mut lo = xi - speed_bound * t - 1e-9;
    let mut hi = xi + speed_bound * t + 1e-9;
    let mut s = xi;
    let mut converged = false;
    for _ in 0..60 {
        let val = f(s);
        if val.abs() < 1e-13 {
            converged = true;
            break;
        }
        let der = fp(s);
        let next = if der.abs() > 1e-14 { s - val / der } else { f64::NAN };
        s = if next.is_finite() && next > lo && next < hi {
            next
        } else {
            // bisection fallback step
            if f(lo).signum() != val.signum() {
                hi = s;
            } else {
                lo = s;
            }
            0.5 * (lo + hi)
        };
    }
    if !converged {
        // pure bisection as a last resort
        let (mut a, mut b) = (lo, hi);
        if f(a).signum() == f(b).signum() {
            return Err(SolverError::CharacteristicsDiverged { at: vec![xi], t });
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if f(mid).signum() == f(a).signum() {
                a = mid;
            } else {
                b = mid;
            }
        }
        s = 0.5 * (a + b);
        if f(s).abs() > 1e-10 {
            return Err(SolverError::CharacteristicsDiverged { at: vec![xi], t });
        }
    }
    let der = fp(s);
    if der <= 1e-10 {
        // the characteristic map is no longer invertible: past the kink
        return Err(SolverError::CharacteristicsDiverged { at: vec![xi], t });
    }
    Ok((s, der))
}

/// Characteristics reference for the genuinely 2D nonlinear problem
/// `phi_t + phi_x phi_y = 0`.
fn nonlinear2d_reference(x: &[f64], t: f64) -> Result<f64> {
    let q1 = |s: f64| -(2.0 * PI * s).cos();
    let q2 = |s: f64| (2.0 * PI * s).sin();
    // fixed-point warm start
    let mut y = [x[0], x[1]];
    for _ in 0..50 {
        let ny = [x[0] - t * q2(y[1]), x[1] - t * q1(y[0])];
        if (ny[0] - y[0]).abs() + (ny[1] - y[1]).abs() < 1e-15 {
            y = ny;
            break;
        }
        y = ny;
    }
    // Newton polish on F(y) = y + t (q2(y2), q1(y1)) - x
    for _ in 0..30 {
        let f0 = y[0] + t * q2(y[1]) - x[0];
        let f1 = y[1] + t * q1(y[0]) - x[1];
        if f0.abs() + f1.abs() < 1e-14 {
            break;
        }
        let a = 1.0;
        let b = t * 2.0 * PI * (2.0 * PI * y[1]).cos();
        let c = t * 2.0 * PI * (2.0 * PI * y[0]).sin();
        let det = a - b * c;
        if det.abs() < 1e-12 {
            return Err(SolverError::CharacteristicsDiverged { at: x.to_vec(), t });
        }
        y[0] -= (f0 - b * f1) / det;
        y[1] -= (f1 - c * f0) / det;
    }
    let f0 = y[0] + t * q2(y[1]) - x[0];
    let f1 = y[1] + t * q1(y[0]) - x[1];
    if f0.abs() + f1.abs() > 1e-10 {
        return Err(SolverError::CharacteristicsDiverged { at: x.to_vec(), t });
    }
    let phi0 = -((2.0 * PI * y[0]).sin() + (2.0 * PI * y[1]).cos()) / (2.0 * PI);
    Ok(phi0 + t * q1(y[0]) * q2(y[1]))
}

// ---------------------------------------------------------------------------
// convergence rates
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    /// Control variable is the mesh level `N`: order = log2 of error ratio.
    ByLevel,
    /// Control variable is the threshold: report rates against both the
    /// threshold and the degrees of freedom.
    ByThreshold,
}

#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    /// `N` or `eps`, depending on the mode.
    pub control: f64,
    pub dof: usize,
    pub error: f64,
    pub order: Option<f64>,
    pub r_eps: Option<f64>,
    pub r_dof: Option<f64>,
}

impl ConvergenceRow {
    pub fn new(control: f64, dof: usize, error: f64) -> Self {
        ConvergenceRow { control, dof, error, order: None, r_eps: None, r_dof: None }
    }
}

/// Fills the rate columns from consecutive rows.
pub fn annotate_rates(rows: &mut [ConvergenceRow], mode: RateMode) -> Result<()> {
    if rows.len() < 2 {
        return Err(SolverError::InvalidRateInput);
    }
    if rows.iter().any(|r| !(r.error > 0.0)) {
        return Err(SolverError::InvalidRateInput);
    }
    for l in 1..rows.len() {
        let ratio = rows[l - 1].error / rows[l].error;
        match mode {
            RateMode::ByLevel => {
                let dn = rows[l].control - rows[l - 1].control;
                rows[l].order = Some(ratio.log2() / dn);
            }
            RateMode::ByThreshold => {
                let de = (rows[l - 1].control / rows[l].control).ln();
                rows[l].r_eps = Some(ratio.ln() / de);
                let dd = (rows[l].dof as f64 / rows[l - 1].dof as f64).ln();
                rows[l].r_dof = Some(ratio.ln() / dd);
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// run driver
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    Full,
    Sparse,
    Adaptive,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub case: CaseId,
    pub d: usize,
    pub k: usize,
    pub m: usize,
    pub max_level: u8,
    pub mode: GridMode,
    pub eps: f64,
    pub eta: f64,
    pub cfl: f64,
    pub t_final: f64,
    pub bc_override: Option<BoundaryCondition>,
    pub sampled_alpha: bool,
    /// Disable to reproduce the instability of nonsmooth Hamiltonians.
    pub regularization: bool,
    pub dt_override: Option<f64>,
}

impl RunConfig {
    pub fn defaults(case: CaseId, d: usize, k: usize) -> Result<Self> {
        let bench = BenchmarkCase::new(case, d)?;
        Ok(RunConfig {
            case,
            d,
            k,
            m: bench.default_m(k),
            max_level: 6,
            mode: GridMode::Adaptive,
            eps: 1e-5,
            eta: 1e-6,
            cfl: 0.1,
            t_final: bench.default_t_final(),
            bc_override: None,
            sampled_alpha: false,
            regularization: true,
            dt_override: None,
        })
    }
}

pub struct RunOutcome {
    pub phi: CoeffField,
    pub space: AdaptiveSpace,
    pub tables: SolverTables,
    pub trace: Vec<StepRecord>,
    pub max_dof: usize,
    pub steps: usize,
    /// `L^2` error against the case reference at the final time, when a
    /// reference exists.
    pub l2_error: Option<f64>,
}

/// Quadrature depth for error evaluation: enough to resolve the smooth
/// references without blowing up high-dimensional cost.
fn error_quadrature(d: usize, k: usize) -> (u8, usize) {
    let base = if d >= 4 { 3 } else { 4 };
    let pts = match d {
        1 | 2 => (k + 3).max(8),
        3 => (k + 3).max(6),
        _ => k + 3,
    };
    (base, pts)
}

/// Runs one benchmark configuration end to end.
pub fn run_case(cfg: &RunConfig) -> Result<RunOutcome> {
    run_case_with_hook(cfg, |_, _, _| {})
}

pub fn run_case_with_hook<F>(cfg: &RunConfig, hook: F) -> Result<RunOutcome>
where
    F: FnMut(&StepRecord, &CoeffField, &AdaptiveSpace),
{
    let bench = BenchmarkCase::new(cfg.case, cfg.d)?;
    if cfg.m < cfg.k {
        return Err(SolverError::InvalidConfig(format!(
            "interpolation degree M = {} below polynomial degree k = {}",
            cfg.m, cfg.k
        )));
    }
    let bc = cfg.bc_override.unwrap_or_else(|| bench.bc());
    let tables = SolverTables::build(cfg.k, cfg.m, cfg.max_level, bc)?;

    let mut spec = bench.hamiltonian_spec();
    if cfg.sampled_alpha {
        spec.alpha = AlphaStrategy::Sampled { safety: 1.1 };
    }
    if cfg.regularization && bench.needs_regularization() {
        let h = 2.0f64.powi(-(cfg.max_level as i32));
        spec = regularize(&spec, h);
    }

    let initial = bench.initial();
    let adapt_cfg = match cfg.mode {
        GridMode::Adaptive => AdaptConfig::new(cfg.eps, cfg.eta, cfg.max_level),
        _ => AdaptConfig::disabled(cfg.max_level),
    };
    let (phi0, space0) = match cfg.mode {
        GridMode::Full => {
            let space = AdaptiveSpace::full_grid(cfg.d, cfg.max_level, cfg.max_level);
            let phi = project_l2(&initial, &space, &tables.alpert, cfg.k + 3)?;
            (phi, space)
        }
        GridMode::Sparse => {
            let space = AdaptiveSpace::sparse_grid(cfg.d, cfg.max_level, cfg.max_level);
            let phi = project_l2(&initial, &space, &tables.alpert, cfg.k + 3)?;
            (phi, space)
        }
        GridMode::Adaptive => {
            adaptive_initial_projection(&initial, cfg.d, &tables.alpert, &adapt_cfg, cfg.k + 3)?
        }
    };

    let mut time_cfg = TimeConfig::new(cfg.t_final, cfg.cfl);
    time_cfg.dt_override = cfg.dt_override;
    let Evolution { phi, space, trace, max_dof, steps } =
        evolve(phi0, space0, &spec, &tables, &time_cfg, &adapt_cfg, hook)?;

    let l2_error = if bench.has_reference() {
        let t = cfg.t_final;
        let reference = |x: &[f64]| bench.reference(x, t).unwrap_or(f64::NAN);
        let (base, pts) = error_quadrature(cfg.d, cfg.k);
        let e = l2_error_vs(&phi, &space, &tables.alpert, &reference, base, pts)?;
        Some(e)
    } else {
        None
    };

    Ok(RunOutcome { phi, space, tables, trace, max_dof, steps, l2_error })
}

/// Mean one-sided gradient along a dimension as an Alpert field (the control
/// benchmark reports `sign` of the second component).
pub fn mean_gradient_field(
    phi: &CoeffField,
    space: &AdaptiveSpace,
    tables: &SolverTables,
    dim: usize,
) -> Result<CoeffField> {
    let grads = crate::ldg::reconstruct_gradients(phi, space, tables)?;
    let (lower, upper) = &grads[dim];
    let mut mean = lower.clone();
    mean.axpy(1.0, upper);
    mean.scale(0.5);
    Ok(mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_solution_examples() {
        // eikonal at the center, t = 0: g(0) = -r0/2 = -1/16
        let eik = BenchmarkCase::new(CaseId::Eikonal, 2).unwrap();
        let v = eik.exact_solution(&[0.5, 0.5], 0.0).unwrap();
        assert!((v + 0.0625).abs() < 1e-15);

        // hjb at t = 0 equals the initial condition
        let hjb = BenchmarkCase::new(CaseId::Hjb, 3).unwrap();
        let x = [0.3, 0.7, 0.55];
        let v0 = hjb.exact_solution(&x, 0.0).unwrap();
        assert!((v0 - hjb.initial()(&x)).abs() < 1e-15);

        // quoted point: d=2, x=(0.9, 0.5), t=0.1 -> 0.2975
        let hjb2 = BenchmarkCase::new(CaseId::Hjb, 2).unwrap();
        let v = hjb2.exact_solution(&[0.9, 0.5], 0.1).unwrap();
        assert!((v - 0.2975).abs() < 1e-12, "{v}");
    }

    #[test]
    fn characteristics_match_initial_condition_at_t0() {
        for (case, d) in [(CaseId::Burgers, 2), (CaseId::Cos, 3), (CaseId::Nonlinear2d, 2)] {
            let bench = BenchmarkCase::new(case, d).unwrap();
            let f0 = bench.initial();
            for probe in 0..20 {
                let x: Vec<f64> = (0..d)
                    .map(|m| ((probe * 7 + m * 3) as f64 * 0.047) % 1.0)
                    .collect();
                let r = bench.reference(&x, 0.0).unwrap();
                assert!((r - f0(&x)).abs() < 1e-12, "{case:?} at {x:?}: {r}");
            }
        }
    }

    #[test]
    fn burgers_reference_is_permutation_symmetric() {
        let bench = BenchmarkCase::new(CaseId::Burgers, 3).unwrap();
        let t = 0.004;
        let a = bench.reference(&[0.2, 0.5, 0.9], t).unwrap();
        let b = bench.reference(&[0.9, 0.2, 0.5], t).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn burgers_reference_agrees_across_dimensions() {
        // the solution depends on xi = sum x only: evaluating the 2D case at
        // (xi, 0) must equal the 1D case at xi
        let b1 = BenchmarkCase::new(CaseId::Burgers, 1).unwrap();
        let b2 = BenchmarkCase::new(CaseId::Burgers, 2).unwrap();
        // match the time scaling: the d-dim problem with H = (sum q)^2/2
        // reduces to u_t + (d u_xi)^2/2 = 0, so equal xi needs t2 = t1 only
        // when comparing the same d; instead check the stated reduction:
        // 2D reference at (a, b) equals 2D reference at (a+b, 0)
        let t = 0.006;
        let v1 = b2.reference(&[0.3, 0.45], t).unwrap();
        let v2 = b2.reference(&[0.75, 0.0], t).unwrap();
        assert!((v1 - v2).abs() < 1e-12);
        let _ = b1;
    }

    #[test]
    fn characteristics_fail_past_the_kink() {
        // d=2: characteristics of the quadratic case cross at
        // t* = 1/(8 pi) ~ 0.0398; far past it the solve must report failure
        // somewhere on the kink line xi = 0.5
        let bench = BenchmarkCase::new(CaseId::Burgers, 2).unwrap();
        let res = bench.reference(&[0.25, 0.2501], 0.2);
        assert!(res.is_err());
    }

    #[test]
    fn rate_formulas_match_quoted_examples() {
        // errors (1.56e-3, 6.92e-4), eps (1e-3, 1e-4), DoF (448, 1376)
        let mut rows = vec![
            ConvergenceRow::new(1e-3, 448, 1.56e-3),
            ConvergenceRow::new(1e-4, 1376, 6.92e-4),
        ];
        annotate_rates(&mut rows, RateMode::ByThreshold).unwrap();
        assert!((rows[1].r_eps.unwrap() - 0.35).abs() < 0.01);
        assert!((rows[1].r_dof.unwrap() - 0.73).abs() < 0.01);

        // halving errors at consecutive levels gives order 1
        let mut rows = vec![
            ConvergenceRow::new(3.0, 100, 2.0e-3),
            ConvergenceRow::new(4.0, 200, 1.0e-3),
        ];
        annotate_rates(&mut rows, RateMode::ByLevel).unwrap();
        assert!((rows[1].order.unwrap() - 1.0).abs() < 1e-12);

        // quoted level pair: (5.88e-3, 2.42e-3) -> 1.28
        let mut rows = vec![
            ConvergenceRow::new(4.0, 0, 5.88e-3),
            ConvergenceRow::new(5.0, 0, 2.42e-3),
        ];
        annotate_rates(&mut rows, RateMode::ByLevel).unwrap();
        assert!((rows[1].order.unwrap() - 1.28).abs() < 0.01);
    }

    #[test]
    fn rates_reject_bad_input() {
        let mut one = vec![ConvergenceRow::new(1e-3, 10, 1.0)];
        assert!(annotate_rates(&mut one, RateMode::ByThreshold).is_err());
        let mut zero = vec![
            ConvergenceRow::new(1e-3, 10, 0.0),
            ConvergenceRow::new(1e-4, 20, 1.0),
        ];
        assert!(annotate_rates(&mut zero, RateMode::ByThreshold).is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(BenchmarkCase::new(CaseId::Nonlinear2d, 3).is_err());
        assert!(CaseId::parse("vortex").is_err());
        let mut cfg = RunConfig::defaults(CaseId::Burgers, 2, 2).unwrap();
        cfg.m = 1;
        assert!(run_case(&cfg).is_err());
    }
}
