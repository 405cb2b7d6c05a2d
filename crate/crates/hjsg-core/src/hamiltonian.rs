//! Hamiltonians, regularization, and the monotone numerical flux.
//!
//! The solver treats `H` as a pointwise map from the reconstructed gradient
//! (and, for problems with spatial coefficients, the position) to a scalar.
//! Nonsmooth Hamiltonians built from norms or absolute values are optionally
//! `C^1`-regularized by replacing the kink with a quadratic blend of width
//! `delta` (chosen as twice the finest mesh size); without the blend the
//! interpolation of the numerical flux loses accuracy at the kink and can
//! destabilize high-order runs.

/// Quadratic `C^1` blend of `|t|` below `delta`.
fn abs_blend(t: f64, delta: f64) -> f64 {
    if delta <= 0.0 || t.abs() >= delta {
        t.abs()
    } else {
        t * t / (2.0 * delta) + 0.5 * delta
    }
}

fn abs_blend_deriv(t: f64, delta: f64) -> f64 {
    if delta <= 0.0 || t.abs() >= delta {
        t.signum()
    } else {
        t / delta
    }
}

#[derive(Debug, Clone)]
pub enum Hamiltonian {
    /// `H(q) = 1/2 (sum_m q_m)^2`
    SquaredSum,
    /// `H(q) = -cos(sum_m q_m + 1)`
    NegCosSum,
    /// `H(q) = q_1 q_2`
    Product2d,
    /// `H(q) = |q|_2`, regularized below `delta` when `delta > 0`
    EuclideanNorm { delta: f64 },
    /// `H(q) = sum_m |q_m|`, per-component regularization
    SumAbs { delta: f64 },
    /// Steering/cost Hamiltonian of the 2D optimal-control benchmark:
    /// `-sin(2 pi x2) q1 - sin(2 pi x1) q2 - |q2| - sin^2(2 pi x2)/2
    ///  - cos(2 pi x1) - 1`
    Control2d { delta: f64 },
    /// `H(q) = c . q`
    Linear { coeffs: Vec<f64> },
    /// Constant in `q` (pure drift; useful in stability regressions)
    Constant { value: f64 },
}

impl Hamiltonian {
    pub fn value(&self, x: &[f64], q: &[f64]) -> f64 {
        match self {
            Hamiltonian::SquaredSum => {
                let s: f64 = q.iter().sum();
                0.5 * s * s
            }
            Hamiltonian::NegCosSum => {
                let s: f64 = q.iter().sum();
                -(s + 1.0).cos()
            }
            Hamiltonian::Product2d => q[0] * q[1],
            Hamiltonian::EuclideanNorm { delta } => {
                let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
                if *delta <= 0.0 || n >= *delta {
                    n
                } else {
                    n * n / (2.0 * delta) + 0.5 * delta
                }
            }
            Hamiltonian::SumAbs { delta } => q.iter().map(|&v| abs_blend(v, *delta)).sum(),
            Hamiltonian::Control2d { delta } => {
                let tau = 2.0 * std::f64::consts::PI;
                let s2 = (tau * x[1]).sin();
                let s1 = (tau * x[0]).sin();
                -s2 * q[0] - s1 * q[1] - abs_blend(q[1], *delta)
                    - 0.5 * s2 * s2
                    - (tau * x[0]).cos()
                    - 1.0
            }
            Hamiltonian::Linear { coeffs } => coeffs.iter().zip(q).map(|(c, v)| c * v).sum(),
            Hamiltonian::Constant { value } => *value,
        }
    }

    /// Analytic partial derivative with respect to `q_m`.
    pub fn partial(&self, x: &[f64], q: &[f64], m: usize) -> f64 {
        match self {
            Hamiltonian::SquaredSum => q.iter().sum(),
            Hamiltonian::NegCosSum => {
                let s: f64 = q.iter().sum();
                (s + 1.0).sin()
            }
            Hamiltonian::Product2d => q[1 - m],
            Hamiltonian::EuclideanNorm { delta } => {
                let n = q.iter().map(|v| v * v).sum::<f64>().sqrt();
                if *delta <= 0.0 || n >= *delta {
                    if n == 0.0 {
                        0.0
                    } else {
                        q[m] / n
                    }
                } else {
                    q[m] / delta
                }
            }
            Hamiltonian::SumAbs { delta } => abs_blend_deriv(q[m], *delta),
            Hamiltonian::Control2d { delta } => {
                let tau = 2.0 * std::f64::consts::PI;
                if m == 0 {
                    -(tau * x[1]).sin()
                } else {
                    -(tau * x[0]).sin() - abs_blend_deriv(q[1], *delta)
                }
            }
            Hamiltonian::Linear { coeffs } => coeffs[m],
            Hamiltonian::Constant { .. } => 0.0,
        }
    }

    /// Whether the quadratic blend applies to this variant.
    pub fn needs_regularization(&self) -> bool {
        matches!(
            self,
            Hamiltonian::EuclideanNorm { .. }
                | Hamiltonian::SumAbs { .. }
                | Hamiltonian::Control2d { .. }
        )
    }

    fn with_delta(&self, new_delta: f64) -> Hamiltonian {
        match self {
            Hamiltonian::EuclideanNorm { .. } => Hamiltonian::EuclideanNorm { delta: new_delta },
            Hamiltonian::SumAbs { .. } => Hamiltonian::SumAbs { delta: new_delta },
            Hamiltonian::Control2d { .. } => Hamiltonian::Control2d { delta: new_delta },
            other => other.clone(),
        }
    }
}

/// How the global dissipation bounds `alpha_m` are obtained.
#[derive(Debug, Clone)]
pub enum AlphaStrategy {
    /// Analytic bounds supplied with the problem.
    Fixed(Vec<f64>),
    /// `safety * max |dH/dq_m|` over all sampled gradient points.
    Sampled { safety: f64 },
}

pub const ALPHA_FLOOR: f64 = 1e-12;

/// The problem description consumed by the semi-discrete operator.
#[derive(Debug, Clone)]
pub struct HamiltonianSpec {
    pub h: Hamiltonian,
    pub alpha: AlphaStrategy,
}

impl HamiltonianSpec {
    pub fn new(h: Hamiltonian, alpha: AlphaStrategy) -> Self {
        HamiltonianSpec { h, alpha }
    }
}

/// Installs the quadratic blend width `delta = 2 h` on Hamiltonians that
/// need smoothing; `h` is the finest active mesh size. Other variants pass
/// through unchanged.
pub fn regularize(spec: &HamiltonianSpec, h: f64) -> HamiltonianSpec {
    if spec.h.needs_regularization() {
        HamiltonianSpec { h: spec.h.with_delta(2.0 * h), alpha: spec.alpha.clone() }
    } else {
        spec.clone()
    }
}

/// Global Lax-Friedrichs numerical Hamiltonian at one point:
/// `H(mean) - sum_m alpha_m/2 (upper_m - lower_m)`. Monotone whenever each
/// `alpha_m` bounds `|dH/dq_m|` over the sampled gradient range.
pub fn lax_friedrichs(
    h: &Hamiltonian,
    x: &[f64],
    lower: &[f64],
    upper: &[f64],
    alpha: &[f64],
) -> f64 {
    let d = lower.len();
    let mut mean = [0.0f64; crate::element::MAX_DIM];
    for m in 0..d {
        mean[m] = 0.5 * (lower[m] + upper[m]);
    }
    let mut v = h.value(x, &mean[..d]);
    for m in 0..d {
        v -= 0.5 * alpha[m] * (upper[m] - lower[m]);
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consistency_when_sides_agree() {
        let h = Hamiltonian::SquaredSum;
        let q = [0.3, -0.7];
        let v = lax_friedrichs(&h, &[0.0, 0.0], &q, &q, &[2.0, 2.0]);
        assert_eq!(v, h.value(&[0.0, 0.0], &q));
    }

    #[test]
    fn quoted_burgers_point() {
        // d=1, H = q^2/2, lower = 2, upper = -2, alpha = 2 -> 4
        let h = Hamiltonian::SquaredSum;
        let v = lax_friedrichs(&h, &[0.0], &[2.0], &[-2.0], &[2.0]);
        assert!((v - 4.0).abs() < 1e-15);
    }

    #[test]
    fn linear_hamiltonian_upwinds() {
        // positive coefficients with alpha = c reduce to pure lower traces
        let coeffs = vec![1.5, 0.25];
        let h = Hamiltonian::Linear { coeffs: coeffs.clone() };
        let lower = [0.4, -0.3];
        let upper = [-1.0, 2.0];
        let v = lax_friedrichs(&h, &[0.0, 0.0], &lower, &upper, &coeffs);
        let want: f64 = coeffs.iter().zip(&lower).map(|(c, p)| c * p).sum();
        assert!((v - want).abs() < 1e-14);
    }

    #[test]
    fn regularized_norm_is_c1_at_the_switch() {
        let spec = HamiltonianSpec::new(
            Hamiltonian::EuclideanNorm { delta: 0.0 },
            AlphaStrategy::Fixed(vec![1.0, 1.0]),
        );
        let reg = regularize(&spec, 0.125);
        let delta = 0.25; // 2 h
        // value continuity at |q| = delta
        let q_at = [delta, 0.0];
        assert!((reg.h.value(&[0.0, 0.0], &q_at) - delta).abs() < 1e-12);
        // derivative continuity across the switch
        let below = reg.h.partial(&[0.0, 0.0], &[delta - 1e-9, 0.0], 0);
        let above = reg.h.partial(&[0.0, 0.0], &[delta + 1e-9, 0.0], 0);
        assert!((below - above).abs() < 1e-6);
        // zero gradient sits on the blend cap
        assert!((reg.h.value(&[0.0, 0.0], &[0.0, 0.0]) - 0.5 * delta).abs() < 1e-15);
        // far from the switch the blend is inactive
        let q_far = [10.0 * delta, 0.0];
        assert_eq!(reg.h.value(&[0.0, 0.0], &q_far), 10.0 * delta);
    }

    #[test]
    fn monotone_in_each_argument_with_valid_alpha() {
        // sampled monotonicity: nondecreasing in lower, nonincreasing in upper
        let h = Hamiltonian::NegCosSum;
        let alpha = [1.0, 1.0];
        let mut state = 0x243f6a8885a308d3u64;
        let mut rnd = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
        };
        for _ in 0..500 {
            let lower = [rnd(), rnd()];
            let upper = [rnd(), rnd()];
            let base = lax_friedrichs(&h, &[0.0, 0.0], &lower, &upper, &alpha);
            for m in 0..2 {
                let mut lo2 = lower;
                lo2[m] += 1e-3;
                let up = lax_friedrichs(&h, &[0.0, 0.0], &lo2, &upper, &alpha);
                assert!(up >= base - 1e-12);
                let mut hi2 = upper;
                hi2[m] += 1e-3;
                let down = lax_friedrichs(&h, &[0.0, 0.0], &lower, &hi2, &alpha);
                assert!(down <= base + 1e-12);
            }
        }
    }

    #[test]
    fn control_hamiltonian_collapses_sign_times_gradient() {
        // sign(q2) q2 = |q2|: the variant must agree with the explicit form
        let h = Hamiltonian::Control2d { delta: 0.0 };
        let tau = 2.0 * std::f64::consts::PI;
        let x = [0.3, 0.8];
        let q = [0.7, -1.3];
        let explicit = -(tau * x[1]).sin() * q[0]
            - ((tau * x[0]).sin() + q[1].signum()) * q[1]
            - 0.5 * (tau * x[1]).sin().powi(2)
            - (tau * x[0]).cos()
            - 1.0;
        assert!((h.value(&x, &q) - explicit).abs() < 1e-14);
    }
}
