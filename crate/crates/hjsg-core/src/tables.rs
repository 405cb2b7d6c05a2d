//! Precomputed 1D operator tables over the dyadic node hierarchy.
//!
//! Every multi-dimensional operator of the scheme factorizes into tensor
//! products of 1D maps between hierarchical bases (flux derivatives, point
//! evaluation, interpolatory-coefficient pairing). A [`Table1D`] stores, for
//! each target node, the nonzero coupling blocks to source nodes, split by
//! tree relation: `anc` holds sources on the root path of the target
//! (ancestors and the node itself), `desc` holds sources strictly inside the
//! target's subtree, and `other` holds the remaining couplings (only the flux
//! tables have those, through faces shared by adjacent supports). The split
//! is what allows dimension-wise application over hierarchically complete
//! active sets to reproduce the full tensor sum exactly.

use crate::alpert::AlpertBasis1d;
use crate::element::Node1d;
use crate::interp::InterpBasis1d;
use crate::legendre::GaussRule;
use crate::point::{ExactPoint, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    Periodic,
    Outflow,
}

/// Which one-sided trace the numerical flux takes at interior faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxSide {
    /// Trace from the lower-coordinate side (`{phi} + [phi]/2`).
    Lower,
    /// Trace from the higher-coordinate side (`{phi} - [phi]/2`).
    Upper,
}

/// A sparse 1D operator: block entries between (node, degree) pairs.
#[derive(Debug, Clone)]
pub struct Table1D {
    /// Rows per block minus one (output degree).
    pub deg_out: usize,
    /// Columns per block minus one (input degree).
    pub deg_in: usize,
    pub n_max: u8,
    /// Indexed by target node id; sources on the target's root path.
    pub anc: Vec<Vec<(Node1d, Vec<f64>)>>,
    /// Sources strictly below the target in the tree.
    pub desc: Vec<Vec<(Node1d, Vec<f64>)>>,
    /// Sources neither above nor below (face-coupled neighbours).
    pub other: Vec<Vec<(Node1d, Vec<f64>)>>,
}

impl Table1D {
    fn empty(deg_out: usize, deg_in: usize, n_max: u8) -> Self {
        let n = 1usize << n_max;
        Table1D {
            deg_out,
            deg_in,
            n_max,
            anc: vec![Vec::new(); n],
            desc: vec![Vec::new(); n],
            other: vec![Vec::new(); n],
        }
    }

    fn push(&mut self, target: Node1d, source: Node1d, block: Vec<f64>) {
        if block.iter().all(|&v| v == 0.0) {
            return;
        }
        let row = target.0 as usize;
        if source.is_ancestor_or_self_of(target) {
            self.anc[row].push((source, block));
        } else if target.is_ancestor_or_self_of(source) {
            self.desc[row].push((source, block));
        } else {
            self.other[row].push((source, block));
        }
    }

    fn sort_rows(&mut self) {
        for rows in [&mut self.anc, &mut self.desc, &mut self.other] {
            for row in rows.iter_mut() {
                row.sort_by_key(|(n, _)| *n);
            }
        }
    }

    pub fn has_other(&self) -> bool {
        self.other.iter().any(|r| !r.is_empty())
    }

    /// Identity operator (for tests and trivial pipelines).
    pub fn identity(deg: usize, n_max: u8) -> Self {
        let mut t = Self::empty(deg, deg, n_max);
        let b = deg + 1;
        for id in 0..(1u16 << n_max) {
            let mut block = vec![0.0; b * b];
            for q in 0..b {
                block[q * b + q] = 1.0;
            }
            t.anc[id as usize].push((Node1d(id), block));
        }
        t
    }
}

fn all_nodes(n_max: u8) -> Vec<Node1d> {
    (0..(1u16 << n_max)).map(Node1d).collect()
}

/// Dyadic support of a node as an exact fraction pair `(lo, hi)` over `den`.
fn support_frac(node: Node1d) -> (u64, u64, u64) {
    let l = node.level();
    if l <= 1 {
        (0, 1, 1)
    } else {
        let den = 1u64 << (l - 1);
        let j = node.translation() as u64;
        (j, j + 1, den)
    }
}

fn supports_touch(a: Node1d, b: Node1d) -> bool {
    let (lo_a, hi_a, den_a) = support_frac(a);
    let (lo_b, hi_b, den_b) = support_frac(b);
    lo_a * den_b <= hi_b * den_a && lo_b * den_a <= hi_a * den_b
}

fn touches_boundary(n: Node1d) -> bool {
    let (lo, hi, den) = support_frac(n);
    lo == 0 || hi == den
}

/// Builds the LDG flux-derivative operator: applied along one dimension it
/// maps the coefficients of `phi` to those of the one-sided derivative
/// reconstruction `p`. Entries are the weak-form pairings
/// `-int u w' dx + sum_faces flux(u) [w]` over hierarchical basis pairs,
/// with faces taken at the jump points of the test function `w`.
pub fn flux_derivative_table(
    basis: &AlpertBasis1d,
    n_max: u8,
    side: FluxSide,
    bc: BoundaryCondition,
) -> Table1D {
    let k = basis.degree();
    let mut table = Table1D::empty(k, k, n_max);
    let rule = GaussRule::new(k + 2);
    let nodes = all_nodes(n_max);

    for &w in &nodes {
        let w_level = w.level();
        let w_j = w.translation();
        // jump abscissae of the test function, as fractions
        let (w_lo, w_hi, w_den) = support_frac(w);
        let faces: Vec<(u64, u64)> = if w_level == 0 {
            vec![(0, 1), (1, 1)]
        } else {
            vec![(w_lo, w_den), (2 * w_lo + 1, 2 * w_den), (w_hi, w_den)]
        };

        for &u in &nodes {
            let boundary_pair =
                bc == BoundaryCondition::Periodic && touches_boundary(u) && touches_boundary(w);
            if !supports_touch(u, w) && !boundary_pair {
                continue;
            }
            let u_level = u.level();
            let u_j = u.translation();
            let mut block = vec![0.0; (k + 1) * (k + 1)];

            // volume term over the pieces of the common support refinement
            let (ulo, uhi, uden) = support_frac(u);
            let lo = f64::max(ulo as f64 / uden as f64, w_lo as f64 / w_den as f64);
            let hi = f64::min(uhi as f64 / uden as f64, w_hi as f64 / w_den as f64);
            if hi - lo > 1e-15 {
                let mut xs: Vec<f64> = [
                    ((2 * ulo + 1) as f64) / ((2 * uden) as f64),
                    ((2 * w_lo + 1) as f64) / ((2 * w_den) as f64),
                ]
                .into_iter()
                .filter(|&x| x > lo && x < hi)
                .collect();
                xs.push(lo);
                xs.push(hi);
                xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                xs.dedup();
                for pair in xs.windows(2) {
                    let (a, b) = (pair[0], pair[1]);
                    if b - a < 1e-15 {
                        continue;
                    }
                    for o in 0..=k {
                        for i in 0..=k {
                            block[o * (k + 1) + i] -= rule.integrate(a, b, |x| {
                                basis.eval(u_level, u_j, i, x)
                                    * basis.eval_deriv(w_level, w_j, o, x)
                            });
                        }
                    }
                }
            }

            // face terms: one wrapped face per boundary under periodic bc
            let mut wrap_done = false;
            for &(fnum, fden) in &faces {
                let is_left_boundary = fnum == 0;
                let is_right_boundary = fnum == fden;
                let at_boundary = is_left_boundary || is_right_boundary;
                if bc == BoundaryCondition::Periodic && at_boundary {
                    if wrap_done {
                        continue;
                    }
                    wrap_done = true;
                    for o in 0..=k {
                        let jump = basis
                            .eval_exact(w_level, w_j, o, ExactPoint::new(1, 1, Side::Below))
                            - basis.eval_exact(w_level, w_j, o, ExactPoint::new(0, 1, Side::Above));
                        if jump == 0.0 {
                            continue;
                        }
                        for i in 0..=k {
                            let flux = match side {
                                FluxSide::Lower => basis.eval_exact(
                                    u_level,
                                    u_j,
                                    i,
                                    ExactPoint::new(1, 1, Side::Below),
                                ),
                                FluxSide::Upper => basis.eval_exact(
                                    u_level,
                                    u_j,
                                    i,
                                    ExactPoint::new(0, 1, Side::Above),
                                ),
                            };
                            block[o * (k + 1) + i] += flux * jump;
                        }
                    }
                } else if bc == BoundaryCondition::Outflow && at_boundary {
                    // interior trace for both flux sides at the domain boundary
                    let trace = if is_left_boundary { Side::Above } else { Side::Below };
                    let sign = if is_left_boundary { -1.0 } else { 1.0 };
                    for o in 0..=k {
                        let wt =
                            basis.eval_exact(w_level, w_j, o, ExactPoint::new(fnum, fden, trace));
                        if wt == 0.0 {
                            continue;
                        }
                        for i in 0..=k {
                            let flux = basis
                                .eval_exact(u_level, u_j, i, ExactPoint::new(fnum, fden, trace));
                            block[o * (k + 1) + i] += sign * flux * wt;
                        }
                    }
                } else {
                    for o in 0..=k {
                        let jump = basis
                            .eval_exact(w_level, w_j, o, ExactPoint::new(fnum, fden, Side::Below))
                            - basis
                                .eval_exact(w_level, w_j, o, ExactPoint::new(fnum, fden, Side::Above));
                        if jump == 0.0 {
                            continue;
                        }
                        let trace = match side {
                            FluxSide::Lower => Side::Below,
                            FluxSide::Upper => Side::Above,
                        };
                        for i in 0..=k {
                            let flux = basis
                                .eval_exact(u_level, u_j, i, ExactPoint::new(fnum, fden, trace));
                            block[o * (k + 1) + i] += flux * jump;
                        }
                    }
                }
            }

            // drop pure round-off entries so support sparsity is preserved
            for v in &mut block {
                if v.abs() < 1e-13 {
                    *v = 0.0;
                }
            }
            table.push(w, u, block);
        }
    }
    table.sort_rows();
    table
}

/// Point-evaluation table for Alpert fields: block `[p][i]` is basis function
/// `i` of the source node evaluated at interpolation point `p` of the target
/// node. Sources are the target's root path plus the descendants whose
/// supports contain a point.
pub fn alpert_point_eval_table(
    basis: &AlpertBasis1d,
    points: &InterpBasis1d,
    n_max: u8,
) -> Table1D {
    let k = basis.degree();
    let m = points.degree();
    let mut table = Table1D::empty(m, k, n_max);

    for t in all_nodes(n_max) {
        let pts = points.points_of_node(t);
        for s in covering_sources(t, &pts, n_max) {
            let mut block = vec![0.0; (m + 1) * (k + 1)];
            for (p, pt) in pts.iter().enumerate() {
                for i in 0..=k {
                    block[p * (k + 1) + i] = basis.eval_exact(s.level(), s.translation(), i, *pt);
                }
            }
            table.push(t, s, block);
        }
    }
    table.sort_rows();
    table
}

/// Point-evaluation table for interpolatory fields. By construction wavelets
/// of finer elements vanish at coarser elements' points, so the table is
/// block-triangular along root paths with identity diagonal blocks.
pub fn interp_point_eval_table(points: &InterpBasis1d, n_max: u8) -> Table1D {
    let m = points.degree();
    let mut table = Table1D::empty(m, m, n_max);

    for t in all_nodes(n_max) {
        let pts = points.points_of_node(t);
        let mut chain = vec![t];
        let mut cur = t;
        while let Some(p) = cur.parent() {
            chain.push(p);
            cur = p;
        }
        for s in chain {
            let mut block = vec![0.0; (m + 1) * (m + 1)];
            for (p, pt) in pts.iter().enumerate() {
                for i in 0..=m {
                    block[p * (m + 1) + i] = points.eval_exact(s.level(), s.translation(), i, *pt);
                }
            }
            if s == t {
                // the diagonal must be the identity: wavelets are dual to
                // their own new points
                for (p, row) in block.chunks(m + 1).enumerate() {
                    for (i, &v) in row.iter().enumerate() {
                        debug_assert!(
                            (v - if i == p { 1.0 } else { 0.0 }).abs() < 1e-12,
                            "non-cardinal diagonal at node {t:?}"
                        );
                    }
                }
            }
            table.push(t, s, block);
        }
    }
    table.sort_rows();
    table
}

/// Pairing table between interpolatory and Alpert bases: block `[i][q]` is
/// the integral of Alpert function `i` of the target node against
/// interpolatory wavelet `q` of the source node. Applying it dimension-wise
/// to hierarchical surplus coefficients yields the `L^2` projection of the
/// interpolant onto the Alpert space.
pub fn coupling_table(basis: &AlpertBasis1d, points: &InterpBasis1d, n_max: u8) -> Table1D {
    let k = basis.degree();
    let m = points.degree();
    let mut table = Table1D::empty(k, m, n_max);
    let rule = GaussRule::new(k.max(m) + 2);

    for t in all_nodes(n_max) {
        for s in all_nodes(n_max) {
            if !(s.is_ancestor_or_self_of(t) || t.is_ancestor_or_self_of(s)) {
                continue;
            }
            if !supports_touch(t, s) {
                continue;
            }
            let mut block = vec![0.0; (k + 1) * (m + 1)];
            // integrate on the cells of the finer of the two levels
            let fine = t.level().max(s.level()).max(1);
            let (lo_t, hi_t, den_t) = support_frac(t);
            let (lo_s, hi_s, den_s) = support_frac(s);
            let lo = f64::max(lo_t as f64 / den_t as f64, lo_s as f64 / den_s as f64);
            let hi = f64::min(hi_t as f64 / den_t as f64, hi_s as f64 / den_s as f64);
            let cells = 1u64 << fine;
            let start = (lo * cells as f64).round() as u64;
            let stop = (hi * cells as f64).round() as u64;
            for c in start..stop {
                let a = c as f64 / cells as f64;
                let b = (c + 1) as f64 / cells as f64;
                for i in 0..=k {
                    for q in 0..=m {
                        block[i * (m + 1) + q] += rule.integrate(a, b, |x| {
                            basis.eval(t.level(), t.translation(), i, x)
                                * points.eval(s.level(), s.translation(), q, x)
                        });
                    }
                }
            }
            for v in &mut block {
                if v.abs() < 1e-14 {
                    *v = 0.0;
                }
            }
            table.push(t, s, block);
        }
    }
    table.sort_rows();
    table
}

/// Source nodes whose basis functions can be nonzero at the given points of
/// target `t`: the root path of `t` plus, per point, the chain of descendants
/// containing it.
fn covering_sources(t: Node1d, pts: &[ExactPoint], n_max: u8) -> Vec<Node1d> {
    let mut out: Vec<Node1d> = Vec::new();
    let mut cur = t;
    out.push(cur);
    while let Some(p) = cur.parent() {
        out.push(p);
        cur = p;
    }
    for pt in pts {
        for level in (t.level() + 1)..=n_max {
            let scale = 1u64 << (level - 1);
            let j = match pt.side {
                Side::Below => {
                    let tnum = pt.num * scale;
                    (tnum + pt.den - 1) / pt.den - 1
                }
                Side::Above => pt.num * scale / pt.den,
            };
            out.push(Node1d::from_level_translation(level, j as u32));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// On-disk cache of a table in a flat binary format with a version header.
pub mod cache {
    use super::{BoundaryCondition, FluxSide, Table1D};
    use crate::element::Node1d;
    use crate::error::{Result, SolverError};
    use std::io::{Read, Write};
    use std::path::Path;

    const MAGIC: &[u8; 8] = b"HJSGTBL\x01";

    pub fn cache_name(k: usize, n_max: u8, side: FluxSide, bc: BoundaryCondition) -> String {
        format!(
            "flux-k{}-n{}-{}-{}.tbl",
            k,
            n_max,
            match side {
                FluxSide::Lower => "lo",
                FluxSide::Upper => "hi",
            },
            match bc {
                BoundaryCondition::Periodic => "periodic",
                BoundaryCondition::Outflow => "outflow",
            }
        )
    }

    pub fn save(table: &Table1D, path: &Path) -> Result<()> {
        let mut buf: Vec<u8> = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&(table.deg_out as u32).to_le_bytes());
        buf.extend_from_slice(&(table.deg_in as u32).to_le_bytes());
        buf.push(table.n_max);
        for rows in [&table.anc, &table.desc, &table.other] {
            buf.extend_from_slice(&(rows.len() as u32).to_le_bytes());
            for row in rows {
                buf.extend_from_slice(&(row.len() as u32).to_le_bytes());
                for (node, block) in row {
                    buf.extend_from_slice(&node.0.to_le_bytes());
                    buf.extend_from_slice(&(block.len() as u32).to_le_bytes());
                    for v in block {
                        buf.extend_from_slice(&v.to_le_bytes());
                    }
                }
            }
        }
        let tmp = path.with_extension("tmp");
        std::fs::File::create(&tmp)?.write_all(&buf)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Table1D> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let mut at = 0usize;
        fn take<'a>(bytes: &'a [u8], at: &mut usize, n: usize) -> Result<&'a [u8]> {
            if *at + n > bytes.len() {
                return Err(SolverError::InvalidConfig("truncated table cache".into()));
            }
            let s = &bytes[*at..*at + n];
            *at += n;
            Ok(s)
        }
        if take(&bytes, &mut at, 8)? != MAGIC {
            return Err(SolverError::InvalidConfig("bad table cache header".into()));
        }
        let deg_out = u32::from_le_bytes(take(&bytes, &mut at, 4)?.try_into().unwrap()) as usize;
        let deg_in = u32::from_le_bytes(take(&bytes, &mut at, 4)?.try_into().unwrap()) as usize;
        let n_max = take(&bytes, &mut at, 1)?[0];
        let mut parts: Vec<Vec<Vec<(Node1d, Vec<f64>)>>> = Vec::new();
        for _ in 0..3 {
            let nrows = u32::from_le_bytes(take(&bytes, &mut at, 4)?.try_into().unwrap()) as usize;
            let mut rows = Vec::with_capacity(nrows);
            for _ in 0..nrows {
                let nent =
                    u32::from_le_bytes(take(&bytes, &mut at, 4)?.try_into().unwrap()) as usize;
                let mut row = Vec::with_capacity(nent);
                for _ in 0..nent {
                    let node =
                        Node1d(u16::from_le_bytes(take(&bytes, &mut at, 2)?.try_into().unwrap()));
                    let len =
                        u32::from_le_bytes(take(&bytes, &mut at, 4)?.try_into().unwrap()) as usize;
                    let mut block = Vec::with_capacity(len);
                    for _ in 0..len {
                        block.push(f64::from_le_bytes(
                            take(&bytes, &mut at, 8)?.try_into().unwrap(),
                        ));
                    }
                    row.push((node, block));
                }
                rows.push(row);
            }
            parts.push(rows);
        }
        let other = parts.pop().unwrap();
        let desc = parts.pop().unwrap();
        let anc = parts.pop().unwrap();
        Ok(Table1D { deg_out, deg_in, n_max, anc, desc, other })
    }
}
