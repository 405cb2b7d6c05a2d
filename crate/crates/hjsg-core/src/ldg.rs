//! The semi-discrete LDG operator for `phi_t + H(grad phi) = 0`.
//!
//! One evaluation of the right-hand side runs the pipeline
//!
//! 1. reconstruct the one-sided gradients `p_m` by applying the 1D
//!    flux-derivative tables along each dimension (the orthonormal basis
//!    makes the Galerkin solve explicit),
//! 2. evaluate all `2d` gradient fields at the interpolation points of every
//!    active element,
//! 3. form the global Lax-Friedrichs numerical Hamiltonian pointwise,
//! 4. transform the point values to hierarchical surpluses and project the
//!    interpolant onto the trial space through the pairing table,
//! 5. negate.

use crate::alpert::AlpertBasis1d;
use crate::apply::{
    alpert_to_point_values, apply_along_dim, interp_to_alpert_volume, point_values_to_hier,
};
use crate::error::{ElementDiagnostic, Result, SolverError};
use crate::field::{BasisFamily, CoeffField};
use crate::hamiltonian::{lax_friedrichs, AlphaStrategy, HamiltonianSpec, ALPHA_FLOOR};
use crate::interp::InterpBasis1d;
use crate::project::for_each_multi_index;
use crate::space::AdaptiveSpace;
use crate::tables::{
    alpert_point_eval_table, coupling_table, flux_derivative_table, interp_point_eval_table,
    BoundaryCondition, FluxSide, Table1D,
};

/// All 1D tables and bases needed by the semi-discrete operator, built once
/// per `(k, M, N_max, bc)` configuration and immutable afterwards.
pub struct SolverTables {
    pub k: usize,
    pub m: usize,
    pub n_max: u8,
    pub bc: BoundaryCondition,
    pub alpert: AlpertBasis1d,
    pub interp: InterpBasis1d,
    pub flux_lower: Table1D,
    pub flux_upper: Table1D,
    pub alpert_eval: Table1D,
    pub interp_eval: Table1D,
    pub coupling: Table1D,
    /// Interpolation-point abscissae per 1D node id.
    point_coords: Vec<Vec<f64>>,
}

impl SolverTables {
    pub fn build(k: usize, m: usize, n_max: u8, bc: BoundaryCondition) -> Result<Self> {
        if m < k {
            return Err(SolverError::InvalidConfig(format!(
                "interpolation degree M = {m} must be at least the polynomial degree k = {k}"
            )));
        }
        let alpert = AlpertBasis1d::new(k)?;
        let interp = InterpBasis1d::new(m)?;
        let flux_lower = flux_derivative_table(&alpert, n_max, FluxSide::Lower, bc);
        let flux_upper = flux_derivative_table(&alpert, n_max, FluxSide::Upper, bc);
        let alpert_eval = alpert_point_eval_table(&alpert, &interp, n_max);
        let interp_eval = interp_point_eval_table(&interp, n_max);
        let coupling = coupling_table(&alpert, &interp, n_max);
        let point_coords = (0..(1u16 << n_max))
            .map(|id| {
                interp
                    .points_of_node(crate::element::Node1d(id))
                    .iter()
                    .map(|p| p.value())
                    .collect()
            })
            .collect();
        Ok(SolverTables {
            k,
            m,
            n_max,
            bc,
            alpert,
            interp,
            flux_lower,
            flux_upper,
            alpert_eval,
            interp_eval,
            coupling,
            point_coords,
        })
    }

    pub fn point_coords(&self, node: crate::element::Node1d) -> &[f64] {
        &self.point_coords[node.0 as usize]
    }
}

/// One-sided gradient reconstructions: `grads[m] = (lower, upper)` both
/// approximating the `m`-th partial derivative of `phi`.
pub fn reconstruct_gradients(
    phi: &CoeffField,
    space: &AdaptiveSpace,
    tables: &SolverTables,
) -> Result<Vec<(CoeffField, CoeffField)>> {
    let d = space.dim();
    let mut out = Vec::with_capacity(d);
    for m in 0..d {
        let lower = apply_along_dim(&tables.flux_lower, m, phi, space)?;
        let upper = apply_along_dim(&tables.flux_upper, m, phi, space)?;
        out.push((lower, upper));
    }
    Ok(out)
}

/// Point values of all `2d` gradient reconstructions at the interpolation
/// points of every active element.
pub fn gradient_point_values(
    phi: &CoeffField,
    space: &AdaptiveSpace,
    tables: &SolverTables,
) -> Result<Vec<(CoeffField, CoeffField)>> {
    let grads = reconstruct_gradients(phi, space, tables)?;
    grads
        .into_iter()
        .map(|(lo, hi)| {
            Ok((
                alpert_to_point_values(&lo, space, &tables.alpert_eval)?,
                alpert_to_point_values(&hi, space, &tables.alpert_eval)?,
            ))
        })
        .collect()
}

/// Resolves the per-dimension dissipation bounds: fixed analytic values take
/// precedence; otherwise `safety * max |dH/dq_m|` over all sampled mean
/// gradients, floored away from zero.
pub fn estimate_alpha(
    spec: &HamiltonianSpec,
    point_grads: &[(CoeffField, CoeffField)],
    space: &AdaptiveSpace,
    tables: &SolverTables,
) -> Vec<f64> {
    let d = space.dim();
    match &spec.alpha {
        AlphaStrategy::Fixed(a) => {
            debug_assert_eq!(a.len(), d);
            a.clone()
        }
        AlphaStrategy::Sampled { safety } => {
            let mp = tables.m + 1;
            let mut alpha = vec![0.0f64; d];
            let mut x = vec![0.0f64; d];
            let mut mean = vec![0.0f64; d];
            for (slot, &key) in space.keys().iter().enumerate() {
                let coords: Vec<&[f64]> =
                    (0..d).map(|mm| tables.point_coords(key.node(mm))).collect();
                let block_len = point_grads[0].0.block_len();
                let base = slot * block_len;
                let mut flat = 0usize;
                for_each_multi_index(&vec![mp; d], |pidx| {
                    for mm in 0..d {
                        x[mm] = coords[mm][pidx[mm]];
                        let lo = point_grads[mm].0.as_slice()[base + flat];
                        let hi = point_grads[mm].1.as_slice()[base + flat];
                        mean[mm] = 0.5 * (lo + hi);
                    }
                    for mm in 0..d {
                        let p = spec.h.partial(&x, &mean, mm).abs();
                        if p > alpha[mm] {
                            alpha[mm] = p;
                        }
                    }
                    flat += 1;
                });
            }
            alpha
                .into_iter()
                .map(|a| (a * safety).max(ALPHA_FLOOR))
                .collect()
        }
    }
}

/// Evaluates `L_h(phi)`: minus the projection of the interpolated numerical
/// Hamiltonian of the gradient reconstructions. `t` only labels diagnostics.
pub fn semidiscrete_rhs(
    phi: &CoeffField,
    space: &AdaptiveSpace,
    spec: &HamiltonianSpec,
    alpha: &[f64],
    tables: &SolverTables,
    t: f64,
) -> Result<CoeffField> {
    let d = space.dim();
    let point_grads = gradient_point_values(phi, space, tables)?;

    // pointwise numerical Hamiltonian
    let mut hhat = CoeffField::zeros(space, BasisFamily::PointValues, tables.m);
    let mp = tables.m + 1;
    let block_len = hhat.block_len();
    let mut x = vec![0.0f64; d];
    let mut lower = vec![0.0f64; d];
    let mut upper = vec![0.0f64; d];
    let mut bad = false;
    for (slot, &key) in space.keys().iter().enumerate() {
        let coords: Vec<&[f64]> = (0..d).map(|mm| tables.point_coords(key.node(mm))).collect();
        let base = slot * block_len;
        let mut flat = 0usize;
        let mut any_bad = false;
        for_each_multi_index(&vec![mp; d], |pidx| {
            for mm in 0..d {
                x[mm] = coords[mm][pidx[mm]];
                lower[mm] = point_grads[mm].0.as_slice()[base + flat];
                upper[mm] = point_grads[mm].1.as_slice()[base + flat];
            }
            let v = lax_friedrichs(&spec.h, &x, &lower, &upper, alpha);
            if !v.is_finite() {
                any_bad = true;
            }
            hhat.as_mut_slice()[base + flat] = v;
            flat += 1;
        });
        bad |= any_bad;
    }
    if bad {
        return Err(SolverError::NumericalFailure {
            t,
            diagnostics: collect_diagnostics(space, &hhat, &point_grads),
        });
    }

    let surpluses = point_values_to_hier(&hhat, space, &tables.interp_eval)?;
    let mut volume = interp_to_alpert_volume(&surpluses, space, &tables.coupling)?;
    volume.scale(-1.0);
    Ok(volume)
}

fn collect_diagnostics(
    space: &AdaptiveSpace,
    hhat: &CoeffField,
    point_grads: &[(CoeffField, CoeffField)],
) -> Vec<ElementDiagnostic> {
    let d = space.dim();
    let block_len = hhat.block_len();
    space
        .keys()
        .iter()
        .enumerate()
        .filter_map(|(slot, &key)| {
            let hblock = hhat.block(slot);
            let max_h = hblock.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
            let mut max_g = 0.0f64;
            for g in point_grads {
                for f in [&g.0, &g.1] {
                    let b = &f.as_slice()[slot * block_len..(slot + 1) * block_len];
                    max_g = b.iter().fold(max_g, |m, &v| m.max(v.abs()));
                }
            }
            let non_finite = hblock.iter().any(|v| !v.is_finite());
            if non_finite || !max_g.is_finite() {
                Some(ElementDiagnostic {
                    levels: key.levels(d).0,
                    translations: key.translations(d),
                    max_abs_hamiltonian: max_h,
                    max_abs_gradient: max_g,
                })
            } else {
                None
            }
        })
        .collect()
}
