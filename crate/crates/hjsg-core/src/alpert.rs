//! Orthonormal multiwavelet basis of the dyadic DG hierarchy.
//!
//! Level 0 carries the normalized shifted Legendre polynomials on `[0, 1]`.
//! For `l >= 1` the detail space of level `l` is spanned by
//! `2^{(l-1)/2} h_i(2^{l-1} x - j)` where the mother wavelets `h_i` are
//! piecewise polynomials on the two halves of `[0, 1]`, orthonormal, and
//! orthogonal to all polynomials of degree `<= k`.
//!
//! The mother wavelets are built by Gram-Schmidt inside the two-cell space of
//! piecewise degree-`k` polynomials: project out the global polynomials, then
//! orthonormalize what remains. The basis of the complement is not unique;
//! this implementation fixes the ordering by seeding Gram-Schmidt with the
//! half-cell Legendre modes in degree order, and fixes signs by making the
//! highest-degree Legendre coefficient of each wavelet's right-half piece
//! positive. All solver output is invariant under this choice except raw
//! coefficient dumps, which are tied to the convention above.

use crate::error::{Result, SolverError};
use crate::legendre::{shifted_normalized, GaussRule};
use crate::point::LocalPoint;

/// Largest supported polynomial degree.
pub const MAX_ALPERT_DEGREE: usize = 3;

/// The 1D orthonormal basis for one polynomial degree `k`.
#[derive(Debug, Clone)]
pub struct AlpertBasis1d {
    k: usize,
    /// `left[i]` / `right[i]`: coefficients of mother wavelet `h_i` on the
    /// half-cell orthonormal Legendre bases `sqrt(2) b_p(2x)` (on `(0, 1/2]`)
    /// and `sqrt(2) b_p(2x - 1)` (on `(1/2, 1]`).
    left: Vec<Vec<f64>>,
    right: Vec<Vec<f64>>,
}

impl AlpertBasis1d {
    /// Builds the mother wavelets for degree `k <= 3`.
    pub fn new(k: usize) -> Result<Self> {
        if k > MAX_ALPERT_DEGREE {
            return Err(SolverError::UnsupportedDegree {
                degree: k,
                min: 0,
                max: MAX_ALPERT_DEGREE,
            });
        }
        let n = k + 1;
        let fine = 2 * n; // dimension of the two-cell space

        // coarse polynomials expanded in the half-cell orthonormal basis:
        // <b_i, sqrt(2) b_p(2x)> over (0, 1/2) and the right-half twin
        let rule = GaussRule::new(k + 3);
        let mut coarse = vec![vec![0.0; fine]; n];
        for (i, row) in coarse.iter_mut().enumerate() {
            for p in 0..n {
                row[p] = rule.integrate(0.0, 0.5, |x| {
                    shifted_normalized(i, x) * 2.0f64.sqrt() * shifted_normalized(p, 2.0 * x)
                });
                row[n + p] = rule.integrate(0.5, 1.0, |x| {
                    shifted_normalized(i, x) * 2.0f64.sqrt() * shifted_normalized(p, 2.0 * x - 1.0)
                });
            }
        }

        // Gram-Schmidt against the coarse rows, seeded by the fine basis
        // vectors in degree order (left half first).
        let mut wavelets: Vec<Vec<f64>> = Vec::with_capacity(n);
        for seed in 0..fine {
            if wavelets.len() == n {
                break;
            }
            let mut v = vec![0.0; fine];
            v[seed] = 1.0;
            for basis in coarse.iter().chain(wavelets.iter()) {
                let dot: f64 = v.iter().zip(basis).map(|(a, b)| a * b).sum();
                for (x, b) in v.iter_mut().zip(basis) {
                    *x -= dot * b;
                }
            }
            let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-8 {
                for x in &mut v {
                    *x /= norm;
                }
                wavelets.push(v);
            }
        }
        debug_assert_eq!(wavelets.len(), n);

        // sign convention: highest nonzero right-half Legendre mode positive
        for w in &mut wavelets {
            let lead = (0..n)
                .rev()
                .map(|p| w[n + p])
                .find(|c| c.abs() > 1e-10)
                .unwrap_or(1.0);
            if lead < 0.0 {
                for x in w.iter_mut() {
                    *x = -*x;
                }
            }
        }

        let (left, right) = wavelets
            .into_iter()
            .map(|w| (w[..n].to_vec(), w[n..].to_vec()))
            .unzip();
        Ok(AlpertBasis1d { k, left, right })
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    /// Mother wavelet `h_i` at a local coordinate (interior float path; the
    /// midpoint itself belongs to the left piece).
    pub fn mother(&self, i: usize, u: f64) -> f64 {
        if !(0.0..=1.0).contains(&u) {
            return 0.0;
        }
        let (coeffs, v) = if u <= 0.5 {
            (&self.left[i], 2.0 * u)
        } else {
            (&self.right[i], 2.0 * u - 1.0)
        };
        let s = 2.0f64.sqrt();
        coeffs
            .iter()
            .enumerate()
            .map(|(p, &c)| c * s * shifted_normalized(p, v))
            .sum()
    }

    /// Mother wavelet piece selected by an exact local point with side.
    pub fn mother_exact(&self, i: usize, p: LocalPoint) -> f64 {
        let left = p.in_left_half();
        let coeffs = if left { &self.left[i] } else { &self.right[i] };
        let v = p.half_local(left).value();
        let s = 2.0f64.sqrt();
        coeffs
            .iter()
            .enumerate()
            .map(|(q, &c)| c * s * shifted_normalized(q, v))
            .sum()
    }

    /// Derivative of `h_i` at an interior point of a piece.
    pub fn mother_deriv(&self, i: usize, u: f64) -> f64 {
        let (coeffs, v) = if u <= 0.5 {
            (&self.left[i], 2.0 * u)
        } else {
            (&self.right[i], 2.0 * u - 1.0)
        };
        let s = 2.0f64.sqrt();
        // piece(u) = sum c sqrt(2) b_p(v), v = 2u (or 2u - 1); d b_p / dv
        // carries its own factor 2 from the shift to [-1, 1]
        coeffs
            .iter()
            .enumerate()
            .map(|(p, &c)| c * s * 4.0 * shifted_deriv(p, v))
            .sum()
    }

    /// Basis function `(level, j, i)` at a float coordinate; breakpoint ties
    /// resolve to the piece below (half-open cells).
    pub fn eval(&self, level: u8, j: u32, i: usize, x: f64) -> f64 {
        if level == 0 {
            return shifted_normalized(i, x);
        }
        let scale = 2.0f64.powi(level as i32 - 1);
        let u = scale * x - j as f64;
        if !(0.0..=1.0).contains(&u) {
            return 0.0;
        }
        scale.sqrt() * self.mother(i, u)
    }

    /// Derivative of basis function `(level, j, i)` at an interior point.
    pub fn eval_deriv(&self, level: u8, j: u32, i: usize, x: f64) -> f64 {
        if level == 0 {
            return 2.0 * shifted_deriv(i, x);
        }
        let scale = 2.0f64.powi(level as i32 - 1);
        let u = scale * x - j as f64;
        if !(0.0..=1.0).contains(&u) {
            return 0.0;
        }
        scale.sqrt() * scale * self.mother_deriv(i, u)
    }

    /// Basis function at an exact point with a trace side; returns 0 outside
    /// the half-open support.
    pub fn eval_exact(&self, level: u8, j: u32, i: usize, p: crate::point::ExactPoint) -> f64 {
        if level == 0 {
            return shifted_normalized(i, p.value());
        }
        match p.support_local(level, j) {
            None => 0.0,
            Some(local) => {
                let scale = 2.0f64.powi(level as i32 - 1);
                scale.sqrt() * self.mother_exact(i, local)
            }
        }
    }
}

/// `sqrt(2i+1) P_i'(2x - 1)`: the `t`-derivative of the normalized shifted
/// Legendre polynomial. Callers supply the chain-rule factor.
fn shifted_deriv(i: usize, x: f64) -> f64 {
    let t = 2.0 * x - 1.0;
    ((2 * i + 1) as f64).sqrt() * legendre_deriv(i, t)
}

fn legendre_deriv(n: usize, t: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut p0 = 1.0;
    let mut p1 = t;
    for m in 1..n {
        let m = m as f64;
        let p2 = ((2.0 * m + 1.0) * t * p1 - m * p0) / (m + 1.0);
        p0 = p1;
        p1 = p2;
    }
    if t.abs() < 1.0 {
        n as f64 * (p0 - t * p1) / (1.0 - t * t)
    } else {
        let s = if t > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 - 1) };
        s * (n * (n + 1)) as f64 / 2.0
    }
}
