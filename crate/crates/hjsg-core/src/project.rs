//! `L^2` projection onto the active basis and pointwise reconstruction.
//!
//! Projection coefficients are per-element integrals `c = int f v dx`
//! computed with tensor Gauss-Legendre quadrature on the 2^d sub-boxes
//! obtained by splitting the element support at the wavelet breakpoint in
//! each dimension, so the basis factor of the integrand is polynomial on
//! every quadrature box. Orthonormality makes each coefficient independent of
//! the rest of the space.

use crate::alpert::AlpertBasis1d;
use crate::element::ElementKey;
use crate::error::{Result, SolverError};
use crate::field::{BasisFamily, CoeffField};
use crate::interp::InterpBasis1d;
use crate::legendre::GaussRule;
use crate::space::AdaptiveSpace;

/// Iterates all multi-indices `0 <= idx[m] < dims[m]` in row-major order.
pub fn for_each_multi_index<F: FnMut(&[usize])>(dims: &[usize], mut f: F) {
    let d = dims.len();
    if dims.iter().any(|&n| n == 0) {
        return;
    }
    let mut idx = vec![0usize; d];
    loop {
        f(&idx);
        let mut m = d;
        loop {
            if m == 0 {
                return;
            }
            m -= 1;
            idx[m] += 1;
            if idx[m] < dims[m] {
                break;
            }
            idx[m] = 0;
        }
    }
}

/// Projects a pointwise-evaluable function onto the active Alpert space with
/// `points_per_piece` Gauss nodes per dimension per quadrature piece. Pieces
/// are the element support split at its own wavelet breakpoint; pass
/// `resolve_level > 0` to split further down to that dyadic level when the
/// integrand has finer breakpoints of its own (reconstructed fields, basis
/// functions).
pub fn project_l2<F: Fn(&[f64]) -> f64>(
    f: &F,
    space: &AdaptiveSpace,
    basis: &AlpertBasis1d,
    points_per_piece: usize,
) -> Result<CoeffField> {
    project_l2_resolved(f, space, basis, points_per_piece, 0)
}

pub fn project_l2_resolved<F: Fn(&[f64]) -> f64>(
    f: &F,
    space: &AdaptiveSpace,
    basis: &AlpertBasis1d,
    points_per_piece: usize,
    resolve_level: u8,
) -> Result<CoeffField> {
    let mut out = CoeffField::zeros(space, BasisFamily::Alpert, basis.degree());
    for slot in 0..space.len() {
        let key = space.keys()[slot];
        let block =
            project_element(f, key, space.dim(), basis, points_per_piece, resolve_level)?;
        out.block_mut(slot).copy_from_slice(&block);
    }
    Ok(out)
}

/// Projection coefficients of a single element (used for incremental
/// re-projection during adaptive refinement).
pub fn project_element<F: Fn(&[f64]) -> f64>(
    f: &F,
    key: ElementKey,
    d: usize,
    basis: &AlpertBasis1d,
    points_per_piece: usize,
    resolve_level: u8,
) -> Result<Vec<f64>> {
    let k = basis.degree();
    let q = points_per_piece.max(k + 3);
    let rule = GaussRule::new(q);
    let block_len = (k + 1).pow(d as u32);
    let mut block = vec![0.0; block_len];

    // per-dimension dyadic pieces of the support and basis values at their
    // mapped quadrature nodes
    struct DimPiece {
        xs: Vec<f64>,
        ws: Vec<f64>,
        /// evals[p][i] = basis_i(x_p)
        evals: Vec<Vec<f64>>,
    }
    let mut pieces: Vec<Vec<DimPiece>> = Vec::with_capacity(d);
    for m in 0..d {
        let node = key.node(m);
        let (lo, hi) = node.support();
        let split_level = node.level().max(resolve_level).max(1);
        let supp_level = node.level().saturating_sub(1);
        let count = 1usize << (split_level as usize - supp_level as usize);
        let width = (hi - lo) / count as f64;
        let mut list = Vec::with_capacity(count);
        for c in 0..count {
            let a = lo + c as f64 * width;
            let b = a + width;
            let (xs, ws) = rule.mapped(a, b);
            let evals = xs
                .iter()
                .map(|&x| {
                    (0..=k)
                        .map(|i| basis.eval(node.level(), node.translation(), i, x))
                        .collect()
                })
                .collect();
            list.push(DimPiece { xs, ws, evals });
        }
        pieces.push(list);
    }

    let piece_counts: Vec<usize> = pieces.iter().map(|p| p.len()).collect();
    let mut x = vec![0.0f64; d];
    let mut err: Option<SolverError> = None;
    for_each_multi_index(&piece_counts, |piece_idx| {
        if err.is_some() {
            return;
        }
        let dims: Vec<usize> = vec![q; d];
        for_each_multi_index(&dims, |pt| {
            if err.is_some() {
                return;
            }
            let mut w = 1.0;
            for m in 0..d {
                let piece = &pieces[m][piece_idx[m]];
                x[m] = piece.xs[pt[m]];
                w *= piece.ws[pt[m]];
            }
            let fv = f(&x);
            if !fv.is_finite() {
                err = Some(SolverError::NonFiniteSample { point: x.clone() });
                return;
            }
            let wf = w * fv;
            let mut flat = 0usize;
            for_each_multi_index(&vec![k + 1; d], |deg| {
                let mut prod = wf;
                for m in 0..d {
                    prod *= pieces[m][piece_idx[m]].evals[pt[m]][deg[m]];
                }
                block[flat] += prod;
                flat += 1;
            });
        });
    });
    match err {
        Some(e) => Err(e),
        None => Ok(block),
    }
}

/// 1D node chain containing an abscissa: element ids at every level whose
/// support contains `x` (exact dyadic ties resolve to the lower cell).
fn containing_chain(x: f64, n_max: u8) -> Vec<crate::element::Node1d> {
    use crate::element::Node1d;
    let mut chain = vec![Node1d(0), Node1d(1)];
    for level in 2..=n_max {
        let scale = (1u64 << (level - 1)) as f64;
        let t = x * scale;
        let mut j = if t.fract() == 0.0 && t > 0.0 { t as i64 - 1 } else { t.floor() as i64 };
        j = j.clamp(0, (scale as i64) - 1);
        chain.push(Node1d::from_level_translation(level, j as u32));
    }
    chain
}

/// Evaluates a coefficient field at an arbitrary point by walking the active
/// lattice of elements whose supports contain it.
pub fn eval_field_at(
    field: &CoeffField,
    space: &AdaptiveSpace,
    alpert: &AlpertBasis1d,
    interp: &InterpBasis1d,
    x: &[f64],
) -> Result<f64> {
    let d = space.dim();
    assert_eq!(x.len(), d);
    let deg = field.degs[0];
    let chains: Vec<Vec<crate::element::Node1d>> =
        x.iter().map(|&xm| containing_chain(xm, space.n_max())).collect();
    // per-dimension basis values along each chain entry
    let evals: Vec<Vec<Vec<f64>>> = (0..d)
        .map(|m| {
            chains[m]
                .iter()
                .map(|n| {
                    (0..=deg)
                        .map(|i| match field.family {
                            BasisFamily::Alpert => {
                                alpert.eval(n.level(), n.translation(), i, x[m])
                            }
                            BasisFamily::Interpolatory => {
                                interp.eval(n.level(), n.translation(), i, x[m])
                            }
                            BasisFamily::PointValues => f64::NAN,
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    if field.family == BasisFamily::PointValues {
        return Err(SolverError::BasisFamilyMismatch {
            expected: "alpert or interpolatory",
            got: "point-values",
        });
    }

    // depth-first walk over the chain lattice with ancestor pruning
    fn walk(
        dim: usize,
        key: ElementKey,
        field: &CoeffField,
        space: &AdaptiveSpace,
        chains: &[Vec<crate::element::Node1d>],
        evals: &[Vec<Vec<f64>>],
        picked: &mut Vec<usize>,
        acc: &mut f64,
    ) {
        let d = space.dim();
        if dim == d {
            let slot = space.slot(key).expect("walk only visits active keys");
            let deg = field.degs[0];
            let block = field.block(slot);
            let mut flat = 0usize;
            let mut val = 0.0;
            for_each_multi_index(&vec![deg + 1; d], |idx| {
                let mut prod = block[flat];
                for m in 0..d {
                    prod *= evals[m][picked[m]][idx[m]];
                }
                val += prod;
                flat += 1;
            });
            *acc += val;
            return;
        }
        for (c, node) in chains[dim].iter().enumerate() {
            let next = key.with_node(dim, *node);
            // prefix prune: `next` still has root nodes in dims > dim, and a
            // root-completed prefix is an ancestor of every completion, so an
            // inactive prefix rules out the whole branch
            if !space.contains(next) {
                continue;
            }
            picked.push(c);
            walk(dim + 1, next, field, space, chains, evals, picked, acc);
            picked.pop();
        }
    }

    let mut acc = 0.0;
    let mut picked = Vec::with_capacity(d);
    walk(0, ElementKey::root(d), field, space, &chains, &evals, &mut picked, &mut acc);
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_projects_to_single_coefficient() {
        let basis = AlpertBasis1d::new(2).unwrap();
        let space = AdaptiveSpace::full_grid(1, 3, 3);
        let f = |_: &[f64]| 1.0;
        let phi = project_l2(&f, &space, &basis, 5).unwrap();
        for (slot, key) in space.keys().iter().enumerate() {
            for (i, &c) in phi.block(slot).iter().enumerate() {
                let expect = if *key == ElementKey::root(1) && i == 0 { 1.0 } else { 0.0 };
                assert!((c - expect).abs() < 1e-13, "slot {slot} i {i}: {c}");
            }
        }
    }

    #[test]
    fn linear_function_matches_analytic_coefficients() {
        // d = 1, k = 1, f(x) = x: c(l=0,i=0) = 1/2, c(l=0,i=1) = sqrt(3)/6,
        // and all wavelet coefficients vanish
        let basis = AlpertBasis1d::new(1).unwrap();
        let space = AdaptiveSpace::full_grid(1, 2, 2);
        let f = |x: &[f64]| x[0];
        let phi = project_l2(&f, &space, &basis, 4).unwrap();
        let root = space.slot(ElementKey::root(1)).unwrap();
        assert!((phi.block(root)[0] - 0.5).abs() < 1e-14);
        assert!((phi.block(root)[1] - 3.0f64.sqrt() / 6.0).abs() < 1e-14);
        for (slot, key) in space.keys().iter().enumerate() {
            if *key != ElementKey::root(1) {
                for &c in phi.block(slot) {
                    assert!(c.abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn basis_function_projects_to_unit_coefficient() {
        let basis = AlpertBasis1d::new(2).unwrap();
        let space = AdaptiveSpace::full_grid(1, 3, 3);
        // f = basis function (level 2, j = 0, i = 1)
        let b2 = basis.clone();
        let f = move |x: &[f64]| b2.eval(2, 0, 1, x[0]);
        let phi = project_l2_resolved(&f, &space, &basis, 6, 2).unwrap();
        let target = ElementKey::from_levels_translations(&[2], &[0]);
        for (slot, key) in space.keys().iter().enumerate() {
            for (i, &c) in phi.block(slot).iter().enumerate() {
                let expect = if *key == target && i == 1 { 1.0 } else { 0.0 };
                assert!((c - expect).abs() < 1e-12, "key {key:?} i {i}: {c}");
            }
        }
    }

    #[test]
    fn projection_is_idempotent() {
        let basis = AlpertBasis1d::new(2).unwrap();
        let interp = InterpBasis1d::new(2).unwrap();
        let space = AdaptiveSpace::sparse_grid(2, 3, 4);
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) * (x[1] + 0.4);
        let phi = project_l2(&f, &space, &basis, 6).unwrap();
        let b2 = basis.clone();
        let i2 = interp.clone();
        let s2 = space.clone();
        let p2 = phi.clone();
        let recon = move |x: &[f64]| eval_field_at(&p2, &s2, &b2, &i2, x).unwrap();
        let again = project_l2_resolved(&recon, &space, &basis, 6, space.max_active_level()).unwrap();
        for (a, b) in phi.as_slice().iter().zip(again.as_slice()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn non_finite_samples_are_flagged() {
        let basis = AlpertBasis1d::new(1).unwrap();
        let space = AdaptiveSpace::root(1, 2);
        let f = |x: &[f64]| 1.0 / (x[0] - x[0]); // NaN everywhere
        assert!(matches!(
            project_l2(&f, &space, &basis, 4),
            Err(SolverError::NonFiniteSample { .. })
        ));
    }
}
