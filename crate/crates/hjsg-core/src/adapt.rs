//! Coefficient-driven refinement and coarsening of the active set.
//!
//! The error indicator of an element is the Euclidean norm of its detail
//! coefficient block, which by orthonormality is the `L^2` norm of that
//! element's contribution to the solution. Refinement activates all children
//! (in every dimension) of elements whose indicator exceeds `eps`;
//! coarsening removes leaves whose indicator falls below `eta < eps`.
//! Hierarchical completeness is maintained by construction.

use crate::alpert::AlpertBasis1d;
use crate::element::ElementKey;
use crate::error::{Result, SolverError};
use crate::field::CoeffField;
use crate::project::project_element;
use crate::space::AdaptiveSpace;

#[derive(Debug, Clone)]
pub struct AdaptConfig {
    /// Refinement threshold on the per-element `L^2` indicator.
    pub eps: f64,
    /// Coarsening threshold; keep `eta < eps` to avoid thrashing.
    pub eta: f64,
    pub n_max: u8,
    /// When false, refine/coarsen are no-ops (fixed-space evolution).
    pub enabled: bool,
}

impl AdaptConfig {
    pub fn new(eps: f64, eta: f64, n_max: u8) -> Self {
        AdaptConfig { eps, eta, n_max, enabled: true }
    }

    /// Threshold pair with the default `eta = eps / 10`.
    pub fn with_default_eta(eps: f64, n_max: u8) -> Self {
        Self::new(eps, eps / 10.0, n_max)
    }

    pub fn disabled(n_max: u8) -> Self {
        AdaptConfig { eps: f64::INFINITY, eta: 0.0, n_max, enabled: false }
    }
}

/// `L^2` norm of one element's coefficient block.
pub fn element_indicator(
    phi: &CoeffField,
    space: &AdaptiveSpace,
    key: ElementKey,
) -> Result<f64> {
    let slot = space.slot(key).ok_or_else(|| SolverError::InactiveElement {
        levels: key.levels(space.dim()).0,
        translations: key.translations(space.dim()),
    })?;
    Ok(phi.block(slot).iter().map(|c| c * c).sum::<f64>().sqrt())
}

fn indicator_of_slot(phi: &CoeffField, slot: usize) -> f64 {
    phi.block(slot).iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Activates every child (along each dimension) of elements whose indicator
/// exceeds `eps`, plus the ancestors required for completeness. New elements
/// carry zero coefficients.
pub fn refine(
    phi: &CoeffField,
    space: &AdaptiveSpace,
    cfg: &AdaptConfig,
) -> (CoeffField, AdaptiveSpace) {
    if !cfg.enabled {
        return (phi.clone(), space.clone());
    }
    let mut wanted: Vec<ElementKey> = Vec::new();
    let d = space.dim();
    for (slot, &key) in space.keys().iter().enumerate() {
        if indicator_of_slot(phi, slot) <= cfg.eps {
            continue;
        }
        for m in 0..d {
            for child in key.children_along(m, d, cfg.n_max).expect("dim in range") {
                if !space.contains(child) {
                    wanted.push(child);
                }
            }
        }
    }
    if wanted.is_empty() {
        return (phi.clone(), space.clone());
    }
    let bigger = space.with_activated(&wanted);
    let remapped = phi.remapped(space, &bigger);
    (remapped, bigger)
}

/// Removes leaves with indicator below `eta` until stable; the root always
/// stays. Dropping a leaf discards its coefficients, so the `L^2` error
/// introduced equals the root-sum-square of the removed indicators.
pub fn coarsen(
    phi: &CoeffField,
    space: &AdaptiveSpace,
    cfg: &AdaptConfig,
) -> (CoeffField, AdaptiveSpace) {
    if !cfg.enabled {
        return (phi.clone(), space.clone());
    }
    let mut cur_phi = phi.clone();
    let mut cur_space = space.clone();
    let root = ElementKey::root(space.dim());
    loop {
        let removable: Vec<ElementKey> = cur_space
            .keys()
            .iter()
            .enumerate()
            .filter(|&(slot, &key)| {
                key != root
                    && indicator_of_slot(&cur_phi, slot) < cfg.eta
                    && cur_space.is_leaf(key)
            })
            .map(|(_, &key)| key)
            .collect();
        if removable.is_empty() {
            return (cur_phi, cur_space);
        }
        let smaller = cur_space.with_removed(&removable);
        cur_phi = cur_phi.remapped(&cur_space, &smaller);
        cur_space = smaller;
    }
}

/// Projects `f` onto a space grown from the root by threshold-driven
/// refinement: project, refine, re-project the new elements, repeat until the
/// refinement is a no-op, then coarsen once.
pub fn adaptive_initial_projection<F: Fn(&[f64]) -> f64>(
    f: &F,
    d: usize,
    basis: &AlpertBasis1d,
    cfg: &AdaptConfig,
    points_per_piece: usize,
) -> Result<(CoeffField, AdaptiveSpace)> {
    let mut space = AdaptiveSpace::root(d, cfg.n_max);
    let mut phi = crate::project::project_l2(f, &space, basis, points_per_piece)?;
    loop {
        let (mut next_phi, next_space) = refine(&phi, &space, cfg);
        if next_space.len() == space.len() {
            break;
        }
        // project the freshly activated elements (others are unchanged:
        // coefficients are independent integrals)
        for (slot, &key) in next_space.keys().iter().enumerate() {
            if space.contains(key) {
                continue;
            }
            let block = project_element(f, key, d, basis, points_per_piece, 0)?;
            next_phi.block_mut(slot).copy_from_slice(&block);
        }
        phi = next_phi;
        space = next_space;
    }
    let (phi, space) = coarsen(&phi, &space, cfg);
    Ok((phi, space))
}
