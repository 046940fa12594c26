use alloc::vec::Vec;

use crate::error::Result;
use crate::orthopoly::{weight_mass, UltraParam};
use crate::specfun::Expansion;

use super::gauss_gegenbauer;

/// `a_k² = k(k+2λ-1)/(4(k+λ-1)(k+λ))` as an expansion.
pub fn offdiag_sq_extended(lambda: f64, k: usize) -> Expansion {
    let kk = Expansion::new(k as f64);
    let l = Expansion::new(lambda);
    let one = Expansion::new(1.0);
    let num = kk * (kk + l + l - one);
    let den = (kk + l - one) * (kk + l);
    (num / den).ldexp(-2)
}

/// The orthonormal recurrence coefficient `a_n` as an expansion; `a_0 = 0`.
pub fn ultra_offdiag_extended(lambda: UltraParam, n: usize) -> Expansion {
    if n == 0 {
        Expansion::ZERO
    } else {
        offdiag_sq_extended(lambda.value(), n).sqrt()
    }
}

/// `κ_n / κ_0 = 1/(a_1 ⋯ a_n)` for `n = 0..=nmax`, the factors turning monic into orthonormal polynomials.
pub fn leading_ratios_extended(lambda: UltraParam, nmax: usize) -> Vec<Expansion> {
    let mut out = Vec::with_capacity(nmax + 1);
    let mut r = Expansion::new(1.0);
    out.push(r);
    for n in 1..=nmax {
        r = r / ultra_offdiag_extended(lambda, n);
        out.push(r);
    }
    out
}

/// Monic ultraspherical values `p_0(x), ..., p_n(x)` in extended precision.
pub fn monic_all_extended(lambda: UltraParam, n: usize, x: Expansion) -> Vec<Expansion> {
    let l = lambda.value();
    let mut out = Vec::with_capacity(n + 1);
    let mut prev = Expansion::ZERO;
    let mut cur = Expansion::new(1.0);
    out.push(cur);
    for k in 0..n {
        let next = if k == 0 { x * cur } else { x * cur - offdiag_sq_extended(l, k) * prev };
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Gauss–Gegenbauer rule whose nodes and weights carry about 200 bits.
///
/// Nodes are Newton-polished from the double-precision rule; weights come from
/// the Christoffel function `1/Σ p_m(x)²/h_m`. `weights` sum to one, and `mass`
/// restores the weight's total mass.
#[derive(Debug, Clone)]
pub struct RefinedRule {
    pub nodes: Vec<Expansion>,
    pub weights: Vec<Expansion>,
    pub mass: f64,
}

pub fn gauss_gegenbauer_refined(lambda: UltraParam, n: usize) -> Result<RefinedRule> {
    let l = lambda.value();
    let start = gauss_gegenbauer(lambda, n)?;
    let norms: Vec<Expansion> = (0..n)
        .scan(Expansion::new(1.0), |h, m| {
            if m > 0 {
                *h = *h * offdiag_sq_extended(l, m);
            }
            Some(*h)
        })
        .collect();
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x0 in &start.nodes {
        let mut x = Expansion::new(x0);
        if x0 != 0.0 {
            for _ in 0..3 {
                let (p, dp) = value_and_derivative(l, n, x);
                if dp.is_zero() {
                    break;
                }
                x = x - p / dp;
            }
        }
        let p = monic_all_extended(lambda, n - 1, x);
        let mut s = Expansion::ZERO;
        for (pm, hm) in p.iter().zip(&norms) {
            s = s + *pm * *pm / *hm;
        }
        nodes.push(x);
        weights.push(Expansion::new(1.0) / s);
    }
    Ok(RefinedRule { nodes, weights, mass: weight_mass(lambda).to_real() })
}

fn value_and_derivative(lambda: f64, n: usize, x: Expansion) -> (Expansion, Expansion) {
    let (mut p0, mut p1) = (Expansion::ZERO, Expansion::new(1.0));
    let (mut d0, mut d1) = (Expansion::ZERO, Expansion::ZERO);
    for k in 0..n {
        let a = if k == 0 { Expansion::ZERO } else { offdiag_sq_extended(lambda, k) };
        let p2 = x * p1 - a * p0;
        let d2 = p1 + x * d1 - a * d0;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1)
}
