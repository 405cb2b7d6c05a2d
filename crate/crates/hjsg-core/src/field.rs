//! Coefficient storage over an active element set.
//!
//! A [`CoeffField`] stores one dense block per active element, indexed by the
//! element's slot in its [`AdaptiveSpace`] snapshot. Blocks are laid out
//! row-major over the per-dimension degree indices (dimension 0 slowest).
//! Because the Alpert basis is orthonormal, the `L^2` inner product of two
//! Alpert fields is the Euclidean dot product of their coefficient blocks.

use crate::element::ElementKey;
use crate::error::{Result, SolverError};
use crate::space::AdaptiveSpace;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisFamily {
    /// Orthonormal piecewise-polynomial multiwavelets (the DG trial space).
    Alpert,
    /// Lagrange interpolatory multiwavelets (hierarchical surpluses).
    Interpolatory,
    /// Raw values at the interpolation points of each element.
    PointValues,
}

impl BasisFamily {
    pub fn name(self) -> &'static str {
        match self {
            BasisFamily::Alpert => "alpert",
            BasisFamily::Interpolatory => "interpolatory",
            BasisFamily::PointValues => "point-values",
        }
    }
}

#[derive(Debug, Clone)]
pub struct CoeffField {
    pub family: BasisFamily,
    /// Per-dimension block degree; uniform for user-facing fields, mixed for
    /// the intermediates of dimension-wise operator application.
    pub degs: Vec<usize>,
    data: Vec<f64>,
}

impl CoeffField {
    pub fn zeros(space: &AdaptiveSpace, family: BasisFamily, deg: usize) -> Self {
        Self::zeros_mixed(space, family, vec![deg; space.dim()])
    }

    pub fn zeros_mixed(space: &AdaptiveSpace, family: BasisFamily, degs: Vec<usize>) -> Self {
        assert_eq!(degs.len(), space.dim());
        let block = degs.iter().map(|&k| k + 1).product::<usize>();
        CoeffField {
            family,
            degs,
            data: vec![0.0; block * space.len()],
        }
    }

    pub fn block_len(&self) -> usize {
        self.degs.iter().map(|&k| k + 1).product()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn block(&self, slot: usize) -> &[f64] {
        let b = self.block_len();
        &self.data[slot * b..(slot + 1) * b]
    }

    pub fn block_mut(&mut self, slot: usize) -> &mut [f64] {
        let b = self.block_len();
        &mut self.data[slot * b..(slot + 1) * b]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn fill(&mut self, value: f64) {
        self.data.fill(value);
    }

    /// `self += alpha * other` (same space, same shape).
    pub fn axpy(&mut self, alpha: f64, other: &CoeffField) {
        assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in &mut self.data {
            *a *= alpha;
        }
    }

    /// `gamma * self + alpha * u + beta * v`, in place on `self`.
    pub fn combine(&mut self, gamma: f64, alpha: f64, u: &CoeffField, beta: f64, v: &CoeffField) {
        assert_eq!(self.data.len(), u.data.len());
        assert_eq!(self.data.len(), v.data.len());
        for ((s, a), b) in self.data.iter_mut().zip(&u.data).zip(&v.data) {
            *s = gamma * *s + alpha * a + beta * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, &v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Squared `L^2` norm; exact for Alpert fields by orthonormality.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Copies blocks over to a new space snapshot; elements absent from the
    /// old space start at zero.
    pub fn remapped(&self, old_space: &AdaptiveSpace, new_space: &AdaptiveSpace) -> CoeffField {
        let mut out = CoeffField::zeros_mixed(new_space, self.family, self.degs.clone());
        let b = self.block_len();
        for (new_slot, &key) in new_space.keys().iter().enumerate() {
            if let Some(old_slot) = old_space.slot(key) {
                out.data[new_slot * b..(new_slot + 1) * b]
                    .copy_from_slice(&self.data[old_slot * b..(old_slot + 1) * b]);
            }
        }
        out
    }
}

/// `L^2` inner product of two Alpert fields, summed over the keys the two
/// spaces share. Equals the integral of the product of the reconstructions.
pub fn inner_product(
    u: &CoeffField,
    u_space: &AdaptiveSpace,
    v: &CoeffField,
    v_space: &AdaptiveSpace,
) -> Result<f64> {
    for f in [u, v] {
        if f.family != BasisFamily::Alpert {
            return Err(SolverError::BasisFamilyMismatch {
                expected: "alpert",
                got: f.family.name(),
            });
        }
    }
    if u.degs != v.degs {
        return Err(SolverError::InvalidConfig(
            "inner product needs matching block shapes".into(),
        ));
    }
    // iterate the smaller key set in sorted order for determinism
    let (small, small_f, big, big_f) = if u_space.len() <= v_space.len() {
        (u_space, u, v_space, v)
    } else {
        (v_space, v, u_space, u)
    };
    let mut acc = 0.0;
    for (slot, &key) in small.keys().iter().enumerate() {
        if let Some(other) = big.slot(key) {
            let a = small_f.block(slot);
            let b = big_f.block(other);
            acc += a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        }
    }
    Ok(acc)
}

/// One dumped coefficient row: element indices, degree multi-index, value.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffRow {
    pub levels: Vec<u8>,
    pub translations: Vec<u32>,
    pub degrees: Vec<usize>,
    pub value: f64,
}

impl CoeffField {
    /// Flattens the field into sorted rows, one per stored coefficient.
    pub fn rows(&self, space: &AdaptiveSpace) -> Vec<CoeffRow> {
        let d = space.dim();
        let mut rows = Vec::with_capacity(self.data.len());
        for (slot, &key) in space.keys().iter().enumerate() {
            let levels = key.levels(d).0;
            let translations = key.translations(d);
            let block = self.block(slot);
            let mut idx = vec![0usize; d];
            for &value in block {
                rows.push(CoeffRow {
                    levels: levels.clone(),
                    translations: translations.clone(),
                    degrees: idx.clone(),
                    value,
                });
                // row-major increment, last dimension fastest
                for m in (0..d).rev() {
                    idx[m] += 1;
                    if idx[m] <= self.degs[m] {
                        break;
                    }
                    idx[m] = 0;
                }
            }
        }
        rows
    }

    /// Rebuilds a field from dumped rows on the given space.
    pub fn from_rows(
        space: &AdaptiveSpace,
        family: BasisFamily,
        deg: usize,
        rows: &[CoeffRow],
    ) -> Result<Self> {
        let mut field = CoeffField::zeros(space, family, deg);
        let base = deg + 1;
        let b = field.block_len();
        for row in rows {
            let key = ElementKey::from_levels_translations(&row.levels, &row.translations);
            let slot = space.slot(key).ok_or_else(|| SolverError::InactiveElement {
                levels: row.levels.clone(),
                translations: row.translations.clone(),
            })?;
            let flat = row.degrees.iter().fold(0, |acc, &i| acc * base + i);
            field.data[slot * b + flat] = row.value;
        }
        Ok(field)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_coefficient_has_unit_norm() {
        let space = AdaptiveSpace::sparse_grid(2, 2, 4);
        let mut u = CoeffField::zeros(&space, BasisFamily::Alpert, 1);
        u.block_mut(3)[2] = 1.0;
        let ip = inner_product(&u, &space, &u, &space).unwrap();
        assert!((ip - 1.0).abs() < 1e-15);
    }

    #[test]
    fn disjoint_key_sets_give_zero() {
        let small = AdaptiveSpace::root(1, 4);
        let big = AdaptiveSpace::full_grid(1, 2, 4);
        let mut u = CoeffField::zeros(&small, BasisFamily::Alpert, 1);
        u.block_mut(0)[0] = 3.0;
        let mut v = CoeffField::zeros(&big, BasisFamily::Alpert, 1);
        // only put mass on elements the small space lacks
        for (slot, key) in big.keys().iter().enumerate() {
            if !small.contains(*key) {
                v.block_mut(slot)[0] = 1.0;
            }
        }
        let ip = inner_product(&u, &small, &v, &big).unwrap();
        assert_eq!(ip, 0.0);
    }

    #[test]
    fn family_mismatch_is_an_error() {
        let space = AdaptiveSpace::root(1, 2);
        let u = CoeffField::zeros(&space, BasisFamily::Alpert, 1);
        let v = CoeffField::zeros(&space, BasisFamily::Interpolatory, 1);
        assert!(inner_product(&u, &space, &v, &space).is_err());
    }

    #[test]
    fn row_dump_round_trip() {
        let space = AdaptiveSpace::sparse_grid(2, 2, 3);
        let mut u = CoeffField::zeros(&space, BasisFamily::Alpert, 2);
        for s in 0..space.len() {
            for (i, c) in u.block_mut(s).iter_mut().enumerate() {
                *c = (s * 31 + i) as f64 * 0.125;
            }
        }
        let rows = u.rows(&space);
        let v = CoeffField::from_rows(&space, BasisFamily::Alpert, 2, &rows).unwrap();
        assert_eq!(u.as_slice(), v.as_slice());
    }

    #[test]
    fn remap_preserves_shared_blocks() {
        let old = AdaptiveSpace::sparse_grid(2, 1, 3);
        let new = AdaptiveSpace::sparse_grid(2, 2, 3);
        let mut u = CoeffField::zeros(&old, BasisFamily::Alpert, 1);
        for s in 0..old.len() {
            u.block_mut(s).fill(s as f64 + 1.0);
        }
        let v = u.remapped(&old, &new);
        for (slot, key) in new.keys().iter().enumerate() {
            match old.slot(*key) {
                Some(os) => assert_eq!(v.block(slot), u.block(os)),
                None => assert!(v.block(slot).iter().all(|&c| c == 0.0)),
            }
        }
    }
}
