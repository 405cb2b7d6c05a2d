//! `L^2` error against a reference function.
//!
//! The squared error is integrated over a partition of `[0, 1]^d` into
//! dyadic boxes refined (anisotropically, per dimension) until no active
//! element has a breakpoint inside a box, so the DG part of the integrand is
//! polynomial on every box and Gauss quadrature integrates it exactly; a base
//! refinement level resolves the reference function. The partition is
//! equivalent to quadrature on the uniform grid at the maximum active level
//! but costs `O(elements)` boxes instead of `O(2^{d L})` cells.

use crate::alpert::AlpertBasis1d;
use crate::error::Result;
use crate::field::CoeffField;
use crate::legendre::GaussRule;
use crate::project::for_each_multi_index;
use crate::space::AdaptiveSpace;

/// Dimensions-agnostic quadrature box.
struct QuadBox {
    level: Vec<u8>,
    index: Vec<u64>,
    /// Slots of active elements whose support intersects the box interior.
    members: Vec<usize>,
}

fn box_bounds(b: &QuadBox, d: usize) -> (Vec<f64>, Vec<f64>) {
    let mut lo = Vec::with_capacity(d);
    let mut hi = Vec::with_capacity(d);
    for m in 0..d {
        let w = 2.0f64.powi(-(b.level[m] as i32));
        lo.push(b.index[m] as f64 * w);
        hi.push((b.index[m] + 1) as f64 * w);
    }
    (lo, hi)
}

/// Support of an element node in dimension `m` as `(lo, hi)` fractions.
fn node_support(space: &AdaptiveSpace, slot: usize, m: usize) -> (f64, f64) {
    space.keys()[slot].node(m).support()
}

/// `|phi - reference|_{L^2([0,1]^d)}` by per-box tensor Gauss quadrature.
///
/// `base_level` forces boxes at least that fine in every dimension so a
/// smooth (or mildly kinked) reference is resolved; `points` Gauss nodes per
/// dimension per box are used (floored at `k + 3`).
pub fn l2_error_vs<F: Fn(&[f64]) -> f64>(
    phi: &CoeffField,
    space: &AdaptiveSpace,
    basis: &AlpertBasis1d,
    reference: &F,
    base_level: u8,
    points: usize,
) -> Result<f64> {
    let d = space.dim();
    let k = basis.degree();
    let q = points.max(k + 3);
    let rule = GaussRule::new(q);
    let base_level = base_level.min(space.n_max().max(1));

    let root = QuadBox {
        level: vec![0; d],
        index: vec![0; d],
        members: (0..space.len()).collect(),
    };
    let mut stack = vec![root];
    let mut total = 0.0f64;

    while let Some(b) = stack.pop() {
        // find a dimension that still needs splitting
        let mut split_dim = None;
        for m in 0..d {
            if b.level[m] < base_level {
                split_dim = Some(m);
                break;
            }
            let needs = b
                .members
                .iter()
                .any(|&slot| space.keys()[slot].node(m).level() > b.level[m]);
            if needs {
                split_dim = Some(m);
                break;
            }
        }

        if let Some(m) = split_dim {
            for half in 0..2u64 {
                let mut level = b.level.clone();
                let mut index = b.index.clone();
                level[m] += 1;
                index[m] = 2 * b.index[m] + half;
                let w = 2.0f64.powi(-(level[m] as i32));
                let lo = index[m] as f64 * w;
                let hi = lo + w;
                let members: Vec<usize> = b
                    .members
                    .iter()
                    .copied()
                    .filter(|&slot| {
                        let (slo, shi) = node_support(space, slot, m);
                        slo < hi - 1e-15 && lo < shi - 1e-15
                    })
                    .collect();
                stack.push(QuadBox { level, index, members });
            }
            continue;
        }

        // leaf: the DG field is polynomial here; integrate the squared error
        let (lo, hi) = box_bounds(&b, d);
        // per-member, per-dimension basis values at the mapped nodes
        let mut grids: Vec<(Vec<f64>, Vec<f64>)> = Vec::with_capacity(d);
        for m in 0..d {
            grids.push(rule.mapped(lo[m], hi[m]));
        }
        let member_evals: Vec<Vec<Vec<Vec<f64>>>> = b
            .members
            .iter()
            .map(|&slot| {
                (0..d)
                    .map(|m| {
                        let node = space.keys()[slot].node(m);
                        grids[m]
                            .0
                            .iter()
                            .map(|&x| {
                                (0..=k)
                                    .map(|i| basis.eval(node.level(), node.translation(), i, x))
                                    .collect()
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();

        let mut x = vec![0.0f64; d];
        let dims = vec![q; d];
        let mut acc = 0.0;
        for_each_multi_index(&dims, |pt| {
            let mut w = 1.0;
            for m in 0..d {
                x[m] = grids[m].0[pt[m]];
                w *= grids[m].1[pt[m]];
            }
            let mut val = 0.0;
            for (mi, &slot) in b.members.iter().enumerate() {
                let block = phi.block(slot);
                let mut flat = 0usize;
                for_each_multi_index(&vec![k + 1; d], |deg| {
                    let mut prod = block[flat];
                    for m in 0..d {
                        prod *= member_evals[mi][m][pt[m]][deg[m]];
                    }
                    val += prod;
                    flat += 1;
                });
            }
            let diff = val - reference(&x);
            acc += w * diff * diff;
        });
        total += acc;
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::BasisFamily;
    use crate::project::project_l2;

    #[test]
    fn zero_field_against_unit_reference() {
        let basis = AlpertBasis1d::new(1).unwrap();
        let space = AdaptiveSpace::sparse_grid(2, 2, 4);
        let phi = CoeffField::zeros(&space, BasisFamily::Alpert, 1);
        let one = |_: &[f64]| 1.0;
        let err = l2_error_vs(&phi, &space, &basis, &one, 2, 4).unwrap();
        assert!((err - 1.0).abs() < 1e-13);
    }

    #[test]
    fn field_against_its_own_reconstruction() {
        let basis = AlpertBasis1d::new(2).unwrap();
        let interp = crate::interp::InterpBasis1d::new(2).unwrap();
        let space = AdaptiveSpace::sparse_grid(2, 3, 4);
        let f = |x: &[f64]| (x[0] * 2.0 - x[1]).powi(3) * 0.1 + x[0];
        let phi = project_l2(&f, &space, &basis, 6).unwrap();
        let (b2, i2, s2, p2) = (basis.clone(), interp.clone(), space.clone(), phi.clone());
        let recon = move |x: &[f64]| {
            crate::project::eval_field_at(&p2, &s2, &b2, &i2, x).unwrap()
        };
        let err = l2_error_vs(&phi, &space, &basis, &recon, 3, 5).unwrap();
        assert!(err < 1e-13, "self error {err}");
    }

    #[test]
    fn projection_error_matches_direct_computation() {
        // full-grid projection of sin(2 pi x): the L2 error from quadrature
        // must match the directly computed projection error
        let k = 1;
        let n = 4;
        let basis = AlpertBasis1d::new(k).unwrap();
        let space = AdaptiveSpace::full_grid(1, n, n);
        let f = |x: &[f64]| (2.0 * std::f64::consts::PI * x[0]).sin();
        let phi = project_l2(&f, &space, &basis, 12).unwrap();
        let err = l2_error_vs(&phi, &space, &basis, &f, 4, 8).unwrap();
        // direct: |f|^2 - sum c^2 (projection is the L2-orthogonal part)
        let rule = GaussRule::new(10);
        let mut f_sq = 0.0;
        for c in 0..64 {
            let a = c as f64 / 64.0;
            let b = (c + 1) as f64 / 64.0;
            f_sq += rule.integrate(a, b, |x| f(&[x]).powi(2));
        }
        let direct = (f_sq - phi.norm_sq()).max(0.0).sqrt();
        assert!(
            (err - direct).abs() < 1e-12,
            "quadrature {err} vs direct {direct}"
        );
    }

    #[test]
    fn zero_coefficient_elements_do_not_change_the_error() {
        let basis = AlpertBasis1d::new(1).unwrap();
        let space = AdaptiveSpace::sparse_grid(2, 2, 5);
        let f = |x: &[f64]| (x[0] - 0.4) * (x[1] + 0.2);
        let phi = project_l2(&f, &space, &basis, 5).unwrap();
        let reference = |x: &[f64]| (2.0 * std::f64::consts::PI * (x[0] + x[1])).cos() * 0.1;
        let e1 = l2_error_vs(&phi, &space, &basis, &reference, 4, 8).unwrap();
        // enlarge the space with zero-coefficient elements at already
        // resolved levels
        let extra = crate::element::ElementKey::from_levels_translations(&[3, 2], &[3, 1]);
        let bigger = space.with_activated(&[extra]);
        let phi2 = phi.remapped(&space, &bigger);
        let e2 = l2_error_vs(&phi2, &bigger, &basis, &reference, 4, 8).unwrap();
        assert!((e1 - e2).abs() < 1e-13, "{e1} vs {e2}");
    }
}
