//! Gauss rules for Gegenbauer and Jacobi weights.

mod refined;
mod tridiag;

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::orthopoly::{ultra_offdiag, weight_mass, UltraParam};
use crate::specfun::{ln_gamma, ExtendedReal};

pub use refined::{
    gauss_gegenbauer_refined, leading_ratios_extended, monic_all_extended, offdiag_sq_extended, ultra_offdiag_extended,
    RefinedRule,
};
pub use tridiag::eigen_first_components;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Interval {
    /// `[-1, 1]`
    Symmetric,
    /// `[0, 1]`
    Unit,
}

/// The weight function a rule integrates against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightId {
    /// `(1-t²)^{λ-1/2}` on `[-1,1]`, or `(x(1-x))^{λ-1/2}` on `[0,1]`.
    Gegenbauer { lambda: f64 },
    /// `(1-t)^α (1+t)^β` on `[-1,1]`, or `(1-x)^α x^β` on `[0,1]`.
    Jacobi { alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub interval: Interval,
    pub weight: WeightId,
    pub exact_degree: usize,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn mass(&self) -> f64 {
        integrate(self, |_| 1.0)
    }
}

fn golub_welsch(
    diag: &[f64],
    offdiag: &[f64],
    mass: f64,
    interval: Interval,
    weight: WeightId,
) -> Result<QuadratureRule> {
    let (nodes, z) = eigen_first_components(diag, offdiag)?;
    let weights = z.iter().map(|v| mass * v * v).collect();
    Ok(QuadratureRule { exact_degree: 2 * nodes.len() - 1, nodes, weights, interval, weight })
}

/// `n`-point Gauss rule for `(1-t²)^{λ-1/2}` on `[-1, 1]`.
pub fn gauss_gegenbauer(lambda: UltraParam, n: usize) -> Result<QuadratureRule> {
    assert!(n >= 1, "a Gauss rule needs at least one node");
    let off: Vec<f64> = (1..n).map(|k| ultra_offdiag(lambda, k)).collect();
    let mass = weight_mass(lambda).to_real();
    let mut rule = golub_welsch(
        &alloc::vec![0.0; n],
        &off,
        mass,
        Interval::Symmetric,
        WeightId::Gegenbauer { lambda: lambda.value() },
    )?;
    // restore the exact reflection symmetry of the weight
    for k in 0..n / 2 {
        let m = n - 1 - k;
        let x = 0.5 * (rule.nodes[m] - rule.nodes[k]);
        let w = 0.5 * (rule.weights[m] + rule.weights[k]);
        rule.nodes[k] = -x;
        rule.nodes[m] = x;
        rule.weights[k] = w;
        rule.weights[m] = w;
    }
    if n % 2 == 1 {
        rule.nodes[n / 2] = 0.0;
    }
    Ok(rule)
}

/// `n`-point Gauss rule for `(1-t)^α (1+t)^β` on `[-1, 1]`.
pub fn gauss_jacobi(alpha: f64, beta: f64, n: usize) -> Result<QuadratureRule> {
    assert!(n >= 1, "a Gauss rule needs at least one node");
    if !(alpha > -1.0 && beta > -1.0) {
        return Err(Error::Domain { what: "Jacobi exponent", value: alpha.min(beta) });
    }
    let s = alpha + beta;
    let diag: Vec<f64> = (0..n)
        .map(|k| {
            if k == 0 {
                (beta - alpha) / (s + 2.0)
            } else {
                let m = 2.0 * k as f64 + s;
                (beta * beta - alpha * alpha) / (m * (m + 2.0))
            }
        })
        .collect();
    let off: Vec<f64> = (1..n)
        .map(|k| {
            let kf = k as f64;
            let m = 2.0 * kf + s;
            let sq = if k == 1 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((s + 2.0) * (s + 2.0) * (s + 3.0))
            } else {
                4.0 * kf * (kf + alpha) * (kf + beta) * (kf + s) / (m * m * (m + 1.0) * (m - 1.0))
            };
            libm::sqrt(sq)
        })
        .collect();
    let ln_mass = (s + 1.0) * core::f64::consts::LN_2 + ln_gamma(alpha + 1.0)? + ln_gamma(beta + 1.0)?
        - ln_gamma(s + 2.0)?;
    golub_welsch(&diag, &off, libm::exp(ln_mass), Interval::Symmetric, WeightId::Jacobi { alpha, beta })
}

/// Map a `[-1,1]` rule to `[0,1]` via `x = (t+1)/2`.
pub fn shift_to_unit(rule: &QuadratureRule) -> QuadratureRule {
    assert_eq!(rule.interval, Interval::Symmetric, "rule is already on [0, 1]");
    let factor = match rule.weight {
        WeightId::Gegenbauer { lambda } => libm::exp2(-2.0 * lambda),
        WeightId::Jacobi { alpha, beta } => libm::exp2(-(alpha + beta + 1.0)),
    };
    QuadratureRule {
        nodes: rule.nodes.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        weights: rule.weights.iter().map(|w| w * factor).collect(),
        interval: Interval::Unit,
        weight: rule.weight,
        exact_degree: rule.exact_degree,
    }
}

/// `Σ w_k f(x_k)` with compensated summation in ascending node order.
pub fn integrate<F: FnMut(f64) -> f64>(rule: &QuadratureRule, mut f: F) -> f64 {
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .fold(ExtendedReal::ZERO, |acc, (&x, &w)| acc.add_f64(w * f(x)))
        .to_f64()
}

/// Largest node count tried by [`integrate_endpoint_singular`].
pub const MAX_SINGULAR_NODES: usize = 1 << 12;

/// `∫_0^1 g(x) x^{2λ-1} ((1-x)/(1+x))^{λ-1/2} dx` for `λ > 0`.
///
/// Uses Gauss–Jacobi rules for `x^{2λ-1}(1-x)^{λ-1/2}` on the smooth factor
/// `g(x)(1+x)^{1/2-λ}`, doubling the node count until two successive values
/// differ by less than `tol`.
pub fn integrate_endpoint_singular<G: Fn(f64) -> f64>(lambda: UltraParam, g: G, tol: f64) -> Result<f64> {
    let l = lambda.value();
    if l <= 0.0 {
        return Err(Error::Domain { what: "endpoint-singular weight needs lambda > 0", value: l });
    }
    let alpha = l - 0.5;
    let beta = 2.0 * l - 1.0;
    let h = |x: f64| g(x) * libm::pow(1.0 + x, 0.5 - l);
    let mut n = 8;
    let mut prev = integrate(&shift_to_unit(&gauss_jacobi(alpha, beta, n)?), h);
    while n < MAX_SINGULAR_NODES {
        n *= 2;
        let cur = integrate(&shift_to_unit(&gauss_jacobi(alpha, beta, n)?), h);
        if (cur - prev).abs() < tol {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NoConvergence { what: "endpoint-singular quadrature", iterations: MAX_SINGULAR_NODES })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orthopoly::eval_orthonormal;
    use core::f64::consts::PI;

    fn lam(x: f64) -> UltraParam {
        UltraParam::new(x).unwrap()
    }

    #[test]
    fn small_rules() {
        let r = gauss_gegenbauer(lam(0.5), 1).unwrap();
        assert_eq!(r.nodes, [0.0]);
        assert!((r.weights[0] - 2.0).abs() < 4e-15);
        let r = gauss_gegenbauer(lam(0.5), 2).unwrap();
        assert!((r.nodes[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 4e-15 && (r.weights[1] - 1.0).abs() < 4e-15);
        let r = gauss_gegenbauer(lam(1.0), 1).unwrap();
        assert!((r.weights[0] - PI / 2.0).abs() < 4e-15);
        assert_eq!(r.exact_degree, 1);
    }

    #[test]
    fn shifted_masses() {
        let r = shift_to_unit(&gauss_gegenbauer(lam(0.5), 3).unwrap());
        assert!((r.mass() - 1.0).abs() < 4e-15);
        let r = shift_to_unit(&gauss_gegenbauer(lam(1.0), 1).unwrap());
        assert!((r.mass() - PI / 8.0).abs() < 4e-15);
        assert_eq!(r.nodes, [0.5]);
    }

    #[test]
    fn integrate_examples() {
        let l = lam(1.3);
        let rule = gauss_gegenbauer(l, 6).unwrap();
        let mass = weight_mass(l).to_real();
        assert!((integrate(&rule, |_| 1.0) - mass).abs() < 1e-14);
        let off = integrate(&rule, |t| eval_orthonormal(l, 3, t) * eval_orthonormal(l, 5, t));
        assert!(off.abs() < 1e-12);
        let norm = integrate(&rule, |t| eval_orthonormal(l, 4, t).powi(2));
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_reduces_to_gegenbauer() {
        let g = gauss_gegenbauer(lam(1.5), 9).unwrap();
        let j = gauss_jacobi(1.0, 1.0, 9).unwrap();
        for k in 0..9 {
            assert!((g.nodes[k] - j.nodes[k]).abs() < 1e-14);
            assert!((g.weights[k] - j.weights[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_examples() {
        let one = integrate_endpoint_singular(lam(0.5), |_| 1.0, 1e-15).unwrap();
        assert!((one - 1.0).abs() < 1e-14);
        let p0 = eval_orthonormal(lam(0.5), 0, 0.0);
        let half = integrate_endpoint_singular(lam(0.5), |_| p0 * p0, 1e-15).unwrap();
        assert!((half - 0.5).abs() < 1e-14);
        assert!(integrate_endpoint_singular(lam(-0.25), |_| 1.0, 1e-12).is_err());
    }

    /// Composite Gauss–Legendre in θ after x = sin²θ, which makes the
    /// λ = 1 integrand smooth at both ends.
    fn brute_lambda_one() -> f64 {
        let gl = gauss_gegenbauer(lam(0.5), 20).unwrap();
        let pieces = 64;
        let top = PI / 2.0;
        let mut s = 0.0;
        for p in 0..pieces {
            let a = top * p as f64 / pieces as f64;
            let b = top * (p + 1) as f64 / pieces as f64;
            for (t, w) in gl.nodes.iter().zip(&gl.weights) {
                let th = a + (b - a) * 0.5 * (t + 1.0);
                let (sn, cs) = (libm::sin(th), libm::cos(th));
                let x = sn * sn;
                let f = x * cs / libm::sqrt(1.0 + x) * 2.0 * sn * cs;
                s += w * 0.5 * (b - a) * f;
            }
        }
        s
    }

    #[test]
    fn singular_lambda_one_against_subdivision() {
        let got = integrate_endpoint_singular(lam(1.0), |_| 1.0, 1e-15).unwrap();
        let want = brute_lambda_one();
        assert!((got - want).abs() < 1e-10, "{got} {want}");
    }
}
