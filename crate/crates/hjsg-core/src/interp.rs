//! Lagrange interpolatory multiwavelets on nested interface points.
//!
//! The degree-`M` interpolation grid on `[0, 1]` is the equispaced family
//! `X_0 = {i / M}` (for `M = 1`: `{0, 1}`), which contains the cell endpoints
//! and is closed under the dyadic doubling map, so the per-level point sets
//! are nested. Because DG functions carry one-sided traces, a point shared by
//! two cells is stored twice, once per owning cell; the hierarchy's "new"
//! points of a detail element are those per-cell points of the refined mesh
//! whose `(abscissa, side)` pair does not already appear at the coarser
//! level. Each interpolatory wavelet is the Lagrange cardinal function of one
//! new point on its owning half-cell, extended by zero.

use crate::error::{Result, SolverError};
use crate::point::{ExactPoint, LocalPoint, Side};

pub const MAX_INTERP_DEGREE: usize = 5;
pub const MIN_INTERP_DEGREE: usize = 1;

/// A mother-level point: abscissa `num / den` with a trace side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MotherPoint {
    pub num: u64,
    pub den: u64,
    pub side: Side,
}

/// Nested interface interpolation points and their multiwavelets for one
/// degree `M`.
#[derive(Debug, Clone)]
pub struct InterpBasis1d {
    m: usize,
    /// Level-0 nodes `i / M` with canonical sides.
    base: Vec<MotherPoint>,
    /// The `M + 1` new points of the first refinement, in mother coordinates
    /// over `[0, 1]`, sorted by `(abscissa, side)`.
    detail: Vec<MotherPoint>,
    /// Wavelet `i` is the Lagrange cardinal polynomial of `detail[i]` on its
    /// owning half-cell: `(cell, node index within the cell)`.
    wavelet_home: Vec<(u8, usize)>,
}

impl InterpBasis1d {
    pub fn new(m: usize) -> Result<Self> {
        if !(MIN_INTERP_DEGREE..=MAX_INTERP_DEGREE).contains(&m) {
            return Err(SolverError::UnsupportedDegree {
                degree: m,
                min: MIN_INTERP_DEGREE,
                max: MAX_INTERP_DEGREE,
            });
        }
        let md = m as u64;
        let base: Vec<MotherPoint> = (0..=md)
            .map(|i| MotherPoint {
                num: i,
                den: md,
                side: if i == 0 { Side::Above } else { Side::Below },
            })
            .collect();

        // per-cell points of the once-refined mesh, with within-cell sides
        let mut fine: Vec<MotherPoint> = Vec::new();
        for cell in 0..2u64 {
            for i in 0..=md {
                let num = cell * md + i;
                let side = if i == 0 { Side::Above } else { Side::Below };
                fine.push(MotherPoint { num, den: 2 * md, side });
            }
        }
        // drop the pairs already present at level 0 (same abscissa and side)
        let mut detail: Vec<MotherPoint> = fine
            .into_iter()
            .filter(|p| {
                !base
                    .iter()
                    .any(|b| 2 * b.num * p.den == 2 * p.num * b.den && b.side == p.side)
            })
            .collect();
        debug_assert_eq!(detail.len(), m + 1);
        detail.sort_by_key(|p| (p.num, p.side == Side::Above));

        let wavelet_home = detail
            .iter()
            .map(|p| {
                let left = match p.side {
                    Side::Below => 2 * p.num <= p.den,
                    Side::Above => 2 * p.num < p.den,
                };
                let cell = if left { 0u8 } else { 1u8 };
                let node = (p.num - cell as u64 * md) as usize;
                (cell, node)
            })
            .collect();

        Ok(InterpBasis1d { m, base, detail, wavelet_home })
    }

    pub fn degree(&self) -> usize {
        self.m
    }

    /// Level-0 interpolation abscissae.
    pub fn base_points(&self) -> &[MotherPoint] {
        &self.base
    }

    pub fn detail_points(&self) -> &[MotherPoint] {
        &self.detail
    }

    /// The `M + 1` interpolation points owned by a 1D element node.
    pub fn points_of_node(&self, node: crate::element::Node1d) -> Vec<ExactPoint> {
        let level = node.level();
        if level == 0 {
            self.base
                .iter()
                .map(|p| ExactPoint::new(p.num, p.den, p.side))
                .collect()
        } else {
            let j = node.translation() as u64;
            let scale = 1u64 << (level - 1);
            self.detail
                .iter()
                .map(|p| ExactPoint::new(p.num + j * p.den, p.den * scale, p.side))
                .collect()
        }
    }

    /// Lagrange basis polynomial `L_q` on the equispaced nodes `{r / M}`.
    fn lagrange(&self, q: usize, x: f64) -> f64 {
        let m = self.m as f64;
        let xq = q as f64 / m;
        let mut prod = 1.0;
        for r in 0..=self.m {
            if r == q {
                continue;
            }
            let xr = r as f64 / m;
            prod *= (x - xr) / (xq - xr);
        }
        prod
    }

    /// Level-0 scaling function `phi_i` (a global polynomial).
    pub fn scaling(&self, i: usize, x: f64) -> f64 {
        self.lagrange(i, x)
    }

    /// Mother wavelet `psi_i` at an exact local point of `[0, 1]`.
    pub fn mother_exact(&self, i: usize, p: LocalPoint) -> f64 {
        let (cell, node) = self.wavelet_home[i];
        let left = p.in_left_half();
        if (cell == 0) != left {
            return 0.0;
        }
        let local = p.half_local(left);
        self.lagrange(node, local.value())
    }

    /// Mother wavelet at a float coordinate (ties go to the left piece).
    pub fn mother(&self, i: usize, u: f64) -> f64 {
        if !(0.0..=1.0).contains(&u) {
            return 0.0;
        }
        let (cell, node) = self.wavelet_home[i];
        let left = u <= 0.5;
        if (cell == 0) != left {
            return 0.0;
        }
        let v = if left { 2.0 * u } else { 2.0 * u - 1.0 };
        self.lagrange(node, v)
    }

    /// Interpolatory basis function of node `(level, j)`, index `i`, at an
    /// exact point; zero outside the half-open support.
    pub fn eval_exact(&self, level: u8, j: u32, i: usize, p: ExactPoint) -> f64 {
        if level == 0 {
            return self.scaling(i, p.value());
        }
        match p.support_local(level, j) {
            None => 0.0,
            Some(local) => self.mother_exact(i, local),
        }
    }

    /// Float-coordinate variant for reconstruction at arbitrary points.
    pub fn eval(&self, level: u8, j: u32, i: usize, x: f64) -> f64 {
        if level == 0 {
            return self.scaling(i, x);
        }
        let scale = 2.0f64.powi(level as i32 - 1);
        self.mother(i, scale * x - j as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::element::Node1d;

    #[test]
    fn base_points_match_stated_sets() {
        // M = 1 -> {0, 1}; M = 2 -> {0, 1/2, 1}
        let p1 = InterpBasis1d::new(1).unwrap();
        let xs: Vec<f64> = p1.base_points().iter().map(|p| p.num as f64 / p.den as f64).collect();
        assert_eq!(xs, vec![0.0, 1.0]);
        let p2 = InterpBasis1d::new(2).unwrap();
        let xs: Vec<f64> = p2.base_points().iter().map(|p| p.num as f64 / p.den as f64).collect();
        assert_eq!(xs, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn nestedness_of_abscissae() {
        // X_0 subset of X_1 subset of X_2 subset of X_3 as abscissa sets
        for m in MIN_INTERP_DEGREE..=MAX_INTERP_DEGREE {
            let md = m as u64;
            let level_set = |n: u32| -> Vec<(u64, u64)> {
                // all per-cell abscissae at mesh level n over den = M 2^n
                let den = md << n;
                let mut v: Vec<(u64, u64)> = (0..(1u64 << n))
                    .flat_map(|j| (0..=md).map(move |i| (j * md + i, den)))
                    .collect();
                v.sort_unstable();
                v.dedup();
                v
            };
            for n in 0..3u32 {
                let coarse = level_set(n);
                let fine = level_set(n + 1);
                for (num, den) in coarse {
                    assert!(
                        fine.iter().any(|&(n2, d2)| n2 * den == num * d2),
                        "M={m}: point {num}/{den} lost at level {}",
                        n + 1
                    );
                }
            }
        }
    }

    #[test]
    fn point_counts_per_level() {
        // |X_n| = (M+1) 2^n as a multiset of per-cell nodes; detail elements
        // at level n own the (M+1) 2^{n-1} points not present at level n-1
        for m in [1usize, 3, 5] {
            let basis = InterpBasis1d::new(m).unwrap();
            for level in [1u8, 2, 3] {
                let count: usize = (0..Node1d::count_at_level(level))
                    .map(|j| {
                        basis
                            .points_of_node(Node1d::from_level_translation(level, j))
                            .len()
                    })
                    .sum();
                assert_eq!(count, (m + 1) * (1 << (level - 1)) as usize);
            }
        }
    }

    #[test]
    fn wavelet_point_conditions() {
        // psi_i vanishes at the level-0 points and is the delta at new points
        for m in MIN_INTERP_DEGREE..=MAX_INTERP_DEGREE {
            let basis = InterpBasis1d::new(m).unwrap();
            for i in 0..=m {
                for (q, b) in basis.base.iter().enumerate() {
                    let val = basis.mother_exact(
                        i,
                        LocalPoint { num: b.num * 2, den: b.den * 2, side: b.side },
                    );
                    assert!(val.abs() < 1e-13, "M={m} psi_{i} at base {q}: {val}");
                }
                for (q, t) in basis.detail.iter().enumerate() {
                    let val = basis.mother_exact(
                        i,
                        LocalPoint { num: t.num, den: t.den, side: t.side },
                    );
                    let expect = if q == i { 1.0 } else { 0.0 };
                    assert!((val - expect).abs() < 1e-13, "M={m} psi_{i} at new {q}: {val}");
                }
            }
        }
    }

    #[test]
    fn m1_wavelets_are_one_sided_hats() {
        let basis = InterpBasis1d::new(1).unwrap();
        // first wavelet: 2x on the left half, 0 on the right
        assert!((basis.mother(0, 0.25) - 0.5).abs() < 1e-14);
        assert_eq!(basis.mother(0, 0.75), 0.0);
        // second wavelet: 0 on the left, 2 - 2x on the right
        assert_eq!(basis.mother(1, 0.25), 0.0);
        assert!((basis.mother(1, 0.75) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn unsupported_degrees_rejected() {
        assert!(InterpBasis1d::new(0).is_err());
        assert!(InterpBasis1d::new(6).is_err());
    }
}
