//! Dimension-wise application of 1D operator tables over an active set.
//!
//! [`apply_along_dim`] contracts a [`Table1D`] with the chosen dimension of
//! every coefficient block, gathering only from source elements present in
//! the space; other dimensions are untouched. That is exact for operators
//! used along a single dimension (the LDG flux derivatives).
//!
//! Operators applied in *every* dimension (point evaluation, the
//! interpolatory-to-orthonormal pairing) need care on adaptive sets: a plain
//! per-dimension sweep restricted to the active set drops cross terms whose
//! intermediate index (finer in one dimension, coarser in another) is
//! inactive. Splitting each 1D table into its root-path part (`anc`) and its
//! subtree part (`desc`) fixes this: for every subset S of dimensions, apply
//! the `desc` part in the dimensions of S first and the `anc` part in the
//! rest. Along such a chain every intermediate index is dominated by either
//! the source or the target element, so hierarchical completeness keeps it
//! active, and summing the 2^d chains reproduces the full tensor sum.

use crate::element::ElementKey;
use crate::error::{Result, SolverError};
use crate::field::{BasisFamily, CoeffField};
use crate::space::AdaptiveSpace;
use crate::tables::Table1D;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Part {
    All,
    Anc,
    Desc,
}

/// Contracts `table` with dimension `dim` of `field`; identity elsewhere.
/// Sums only over source elements active in `space`.
pub fn apply_along_dim(
    table: &Table1D,
    dim: usize,
    field: &CoeffField,
    space: &AdaptiveSpace,
) -> Result<CoeffField> {
    apply_part(table, dim, field, space, Part::All, field.family).map(|(f, _)| f)
}

fn apply_part(
    table: &Table1D,
    dim: usize,
    field: &CoeffField,
    space: &AdaptiveSpace,
    part: Part,
    out_family: BasisFamily,
) -> Result<(CoeffField, bool)> {
    let d = space.dim();
    if dim >= d {
        return Err(SolverError::DimensionOutOfRange { dim, d });
    }
    debug_assert_eq!(field.degs[dim], table.deg_in);
    let mut out_degs = field.degs.clone();
    out_degs[dim] = table.deg_out;
    let mut out = CoeffField::zeros_mixed(space, out_family, out_degs);

    // strides for the fiber walk in input and output blocks
    let bi = table.deg_in + 1;
    let bo = table.deg_out + 1;
    let outer: usize = field.degs[..dim].iter().map(|&k| k + 1).product();
    let inner: usize = field.degs[dim + 1..].iter().map(|&k| k + 1).product();

    let mut any = false;
    let block_out_len = out.block_len();
    for (slot, &key) in space.keys().iter().enumerate() {
        let node = key.node(dim);
        let row = node.0 as usize;
        let lists: [&[(crate::element::Node1d, Vec<f64>)]; 3] = match part {
            Part::All => [&table.anc[row], &table.desc[row], &table.other[row]],
            Part::Anc => [&table.anc[row], &[], &[]],
            Part::Desc => [&table.desc[row], &[], &[]],
        };
        let out_block =
            &mut out.as_mut_slice()[slot * block_out_len..(slot + 1) * block_out_len];
        for list in lists {
            for (src_node, block) in list {
                let src_key = key.with_node(dim, *src_node);
                let Some(src_slot) = space.slot(src_key) else { continue };
                let in_block = field.block(src_slot);
                // out[a, o, b] += B[o, i] * in[a, i, b]
                for a in 0..outer {
                    let in_base = a * bi * inner;
                    let out_base = a * bo * inner;
                    for o in 0..bo {
                        let brow = &block[o * bi..(o + 1) * bi];
                        let ob = out_base + o * inner;
                        for (i, &w) in brow.iter().enumerate() {
                            if w == 0.0 {
                                continue;
                            }
                            let ib = in_base + i * inner;
                            for b in 0..inner {
                                out_block[ob + b] += w * in_block[ib + b];
                            }
                            any = true;
                        }
                    }
                }
            }
        }
    }
    Ok((out, any))
}

/// Applies `table` along every dimension (full tensor contraction over the
/// active set), using the subset decomposition described in the module docs.
pub fn tensor_apply(
    table: &Table1D,
    field: &CoeffField,
    space: &AdaptiveSpace,
    out_family: BasisFamily,
) -> Result<CoeffField> {
    assert!(
        !table.has_other(),
        "tensor application requires a tree-structured table"
    );
    let d = space.dim();
    let mut result = CoeffField::zeros_mixed(space, out_family, vec![table.deg_out; d]);
    for subset in 0u32..(1 << d) {
        let mut tmp = field.clone();
        let mut dead = false;
        // subtree parts first: intermediates stay dominated by the source
        for m in 0..d {
            if subset & (1 << m) != 0 {
                let (next, any) = apply_part(table, m, &tmp, space, Part::Desc, out_family)?;
                tmp = next;
                if !any {
                    dead = true;
                    break;
                }
            }
        }
        if dead {
            continue;
        }
        for m in 0..d {
            if subset & (1 << m) == 0 {
                let (next, any) = apply_part(table, m, &tmp, space, Part::Anc, out_family)?;
                tmp = next;
                if !any {
                    dead = true;
                    break;
                }
            }
        }
        if !dead {
            result.axpy(1.0, &tmp);
        }
    }
    Ok(result)
}

/// Hierarchical-surplus transform: given values at the interpolation points
/// of every active element, computes the interpolatory wavelet coefficients
/// whose reconstruction matches all supplied values. One triangular sweep per
/// dimension, coarse levels first.
pub fn point_values_to_hier(
    values: &CoeffField,
    space: &AdaptiveSpace,
    interp_eval: &Table1D,
) -> Result<CoeffField> {
    if values.family != BasisFamily::PointValues {
        return Err(SolverError::BasisFamilyMismatch {
            expected: "point-values",
            got: values.family.name(),
        });
    }
    let d = space.dim();
    let m = interp_eval.deg_in;
    debug_assert!(values.degs.iter().all(|&q| q == m));
    let mut coeffs = values.clone();
    coeffs.family = BasisFamily::Interpolatory;
    let b = m + 1;

    for dim in 0..d {
        // process elements by increasing level in this dimension
        let mut order: Vec<usize> = (0..space.len()).collect();
        order.sort_by_key(|&s| (space.keys()[s].node(dim).level(), s));

        let outer: usize = coeffs.degs[..dim].iter().map(|&k| k + 1).product();
        let inner: usize = coeffs.degs[dim + 1..].iter().map(|&k| k + 1).product();
        let block_len = coeffs.block_len();

        for &slot in &order {
            let key = space.keys()[slot];
            let node = key.node(dim);
            let row = node.0 as usize;
            for (src_node, block) in &interp_eval.anc[row] {
                if *src_node == node {
                    continue; // identity diagonal
                }
                let src_key = key.with_node(dim, *src_node);
                let src_slot = space
                    .slot(src_key)
                    .ok_or(SolverError::MissingPointValues)?;
                // subtract B (x)_dim coeffs[src] from coeffs[slot]
                let (lo, hi) = (slot * block_len, (slot + 1) * block_len);
                let src_base = src_slot * block_len;
                let data = coeffs.as_mut_slice();
                for a in 0..outer {
                    for o in 0..b {
                        let ob = lo + a * b * inner + o * inner;
                        debug_assert!(ob + inner <= hi);
                        let brow = &block[o * b..(o + 1) * b];
                        for (i, &w) in brow.iter().enumerate() {
                            if w == 0.0 {
                                continue;
                            }
                            let ib = src_base + a * b * inner + i * inner;
                            for q in 0..inner {
                                data[ob + q] -= w * data[ib + q];
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(coeffs)
}

/// Inverse of [`point_values_to_hier`]: evaluates an interpolatory field at
/// the interpolation points of every active element.
pub fn hier_to_point_values(
    coeffs: &CoeffField,
    space: &AdaptiveSpace,
    interp_eval: &Table1D,
) -> Result<CoeffField> {
    if coeffs.family != BasisFamily::Interpolatory {
        return Err(SolverError::BasisFamilyMismatch {
            expected: "interpolatory",
            got: coeffs.family.name(),
        });
    }
    tensor_apply(interp_eval, coeffs, space, BasisFamily::PointValues)
}

/// Evaluates an Alpert field at the interpolation points of every active
/// element (values carry one-sided traces at shared abscissae).
pub fn alpert_to_point_values(
    field: &CoeffField,
    space: &AdaptiveSpace,
    alpert_eval: &Table1D,
) -> Result<CoeffField> {
    if field.family != BasisFamily::Alpert {
        return Err(SolverError::BasisFamilyMismatch {
            expected: "alpert",
            got: field.family.name(),
        });
    }
    tensor_apply(alpert_eval, field, space, BasisFamily::PointValues)
}

/// Projects the interpolant with surplus coefficients `b` onto the active
/// Alpert space by applying the pairing table in every dimension.
pub fn interp_to_alpert_volume(
    coeffs: &CoeffField,
    space: &AdaptiveSpace,
    coupling: &Table1D,
) -> Result<CoeffField> {
    if coeffs.family != BasisFamily::Interpolatory {
        return Err(SolverError::BasisFamilyMismatch {
            expected: "interpolatory",
            got: coeffs.family.name(),
        });
    }
    tensor_apply(coupling, coeffs, space, BasisFamily::Alpert)
}

/// Gathers an element key from an `ElementKey`-indexed map of blocks into a
/// field (test helper shared by oracle suites).
pub fn field_from_blocks(
    space: &AdaptiveSpace,
    family: BasisFamily,
    deg: usize,
    blocks: &[(ElementKey, Vec<f64>)],
) -> CoeffField {
    let mut f = CoeffField::zeros(space, family, deg);
    for (key, block) in blocks {
        let slot = space.slot(*key).expect("inactive element in test data");
        f.block_mut(slot).copy_from_slice(block);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::Table1D;

    #[test]
    fn identity_table_is_identity() {
        let space = AdaptiveSpace::sparse_grid(2, 3, 4);
        let table = Table1D::identity(2, 4);
        let mut u = CoeffField::zeros(&space, BasisFamily::Alpert, 2);
        for s in 0..space.len() {
            for (i, c) in u.block_mut(s).iter_mut().enumerate() {
                *c = (s + 1) as f64 + 0.01 * i as f64;
            }
        }
        let v = apply_along_dim(&table, 0, &u, &space).unwrap();
        for (a, b) in u.as_slice().iter().zip(v.as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }
        let w = tensor_apply(&table, &u, &space, BasisFamily::Alpert).unwrap();
        for (a, b) in u.as_slice().iter().zip(w.as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_field_stays_zero() {
        let space = AdaptiveSpace::sparse_grid(2, 2, 3);
        let table = Table1D::identity(1, 3);
        let u = CoeffField::zeros(&space, BasisFamily::Alpert, 1);
        let v = apply_along_dim(&table, 1, &u, &space).unwrap();
        assert!(v.as_slice().iter().all(|&x| x == 0.0));
    }
}
