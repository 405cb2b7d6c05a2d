//! Legendre polynomials and Gauss-Legendre quadrature on arbitrary intervals.
//!
//! The scaling functions of the multiresolution hierarchy are normalized
//! shifted Legendre polynomials, and every integral in the solver reduces to
//! Gauss-Legendre quadrature over dyadic pieces, so this module is the single
//! source for both.

/// Evaluates the Legendre polynomial `P_n` at `t` in `[-1, 1]` via the
/// three-term recurrence.
pub fn legendre(n: usize, t: f64) -> f64 {
    let mut p0 = 1.0;
    if n == 0 {
        return p0;
    }
    let mut p1 = t;
    for m in 1..n {
        let m = m as f64;
        let p2 = ((2.0 * m + 1.0) * t * p1 - m * p0) / (m + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Evaluates `P_n` and its derivative at `t`.
fn legendre_with_deriv(n: usize, t: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p0 = 1.0;
    let mut p1 = t;
    for m in 1..n {
        let m = m as f64;
        let p2 = ((2.0 * m + 1.0) * t * p1 - m * p0) / (m + 1.0);
        p0 = p1;
        p1 = p2;
    }
    // derivative from the standard identity (1 - t^2) P_n' = n (P_{n-1} - t P_n)
    let dp = if t.abs() < 1.0 {
        n as f64 * (p0 - t * p1) / (1.0 - t * t)
    } else {
        // endpoint limit: P_n'(±1) = ±1^{n-1} n(n+1)/2
        let s = if t > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 - 1) };
        s * (n * (n + 1)) as f64 / 2.0
    };
    (p1, dp)
}

/// Normalized shifted Legendre polynomial on `[0, 1]`:
/// `sqrt(2 i + 1) * P_i(2 x - 1)`, an orthonormal family in `L^2([0, 1])`.
pub fn shifted_normalized(i: usize, x: f64) -> f64 {
    ((2 * i + 1) as f64).sqrt() * legendre(i, 2.0 * x - 1.0)
}

/// A Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Builds the `n`-point rule (exact for polynomials of degree `2n - 1`)
    /// by Newton iteration on the Legendre roots.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for k in 0..(n + 1) / 2 {
            // Chebyshev-like initial guess, then Newton.
            let mut t = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre_with_deriv(n, t);
                let dt = p / dp;
                t -= dt;
                if dt.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_with_deriv(n, t);
            let w = 2.0 / ((1.0 - t * t) * dp * dp);
            nodes[k] = -t.abs();
            nodes[n - 1 - k] = t.abs();
            weights[k] = w;
            weights[n - 1 - k] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussRule { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * t);
        }
        acc * half
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let xs = self.nodes.iter().map(|&t| mid + half * t).collect();
        let ws = self.weights.iter().map(|&w| w * half).collect();
        (xs, ws)
    }
}
