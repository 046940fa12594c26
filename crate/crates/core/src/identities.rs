//! Orthogonality sums over one index, the `4F3` integral displays, the
//! `2F1(-1)` double sum and Chebyshev triple products.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::asymptotics::kj_true;
use crate::coeffs::{f_closed_auto, f_quadrature};
use crate::error::{Error, Result};
use crate::orthopoly::{eval_monic_all, eval_orthonormal_all, leading_coeff, UltraParam};
use crate::quadrature::{gauss_gegenbauer, integrate, integrate_endpoint_singular, shift_to_unit};
use crate::spectral::propagate_i;
use crate::specfun::{
    compensated_sum, factorial_signed, gamma_signed, hyp2f1_at_minus_one, hyp4f3_terminating, poch_signed, Precision,
    SignedLog,
};

/// A truncated sum against its limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumReport {
    pub truncation: usize,
    pub partial_sum: f64,
    pub reference: f64,
    /// `|partial_sum - reference|`
    pub gap: f64,
    /// `log₂(gap(2N)/gap(N))`, when a doubled truncation was computed.
    pub rate: Option<f64>,
    /// `reference - partial_sum` predicted from the fixed-`j` asymptotics.
    pub predicted_tail: Option<f64>,
}

/// `Σ_j f_{k,j} f_{l,j}` (finite, `j ≤ min(k,l)`) against
/// `2^{-2λ} ∫_0^1 p̂_k(y) p̂_l(y) (y(1-y))^{λ-1/2} dy`.
pub fn sum_over_j(lambda: UltraParam, k: usize, l: usize) -> Result<SumReport> {
    let terms = (0..=k.min(l))
        .map(|j| Ok(f_quadrature(lambda, k, j)? * f_quadrature(lambda, l, j)?))
        .collect::<Result<Vec<f64>>>()?;
    let partial = compensated_sum(terms);
    let rule = shift_to_unit(&gauss_gegenbauer(lambda, (k + l) / 2 + 1)?);
    let n = k.max(l);
    let integral = integrate(&rule, |y| {
        let p = eval_orthonormal_all(lambda, n, y);
        p[k] * p[l]
    });
    // the shifted weights integrate against (y(1-y))^{λ-1/2} on [0, 1]
    let reference = libm::exp2(-2.0 * lambda.value()) * integral;
    Ok(SumReport {
        truncation: k.min(l) + 1,
        partial_sum: partial,
        reference,
        gap: (partial - reference).abs(),
        rate: None,
        predicted_tail: None,
    })
}

/// Closed form of `Σ_j f^{(1/2)}_{k,j} f^{(1/2)}_{l,j}`: `1/4` on the
/// diagonal, 0 for equal parity, otherwise (with `k` even, `l` odd)
/// `(-1)^{(k+l+1)/2} k! l! √(2k+1) √(2l+1) / (2^{k+l+1} (k-l)(k+l+1) ((k/2)!)² (((l-1)/2)!)²)`.
pub fn legendre_sum_j_closed(k: usize, l: usize) -> f64 {
    0.25 * legendre_sum_j_unscaled(k, l)
}

/// The same expression with `2^{k+l-1}` in the denominator, four times
/// [`legendre_sum_j_closed`]; kept to document the discrepancy.
pub fn legendre_sum_j_unscaled(k: usize, l: usize) -> f64 {
    if k == l {
        return 1.0;
    }
    if (k + l) % 2 == 0 {
        return 0.0;
    }
    let (k, l) = if k % 2 == 0 { (k, l) } else { (l, k) };
    let sign = if ((k + l + 1) / 2) % 2 == 0 { 1 } else { -1 };
    let num = factorial_signed(k)
        * factorial_signed(l)
        * SignedLog::from_real(libm::sqrt((2 * k + 1) as f64) * libm::sqrt((2 * l + 1) as f64));
    let den = SignedLog::pow2((k + l) as f64 - 1.0)
        * SignedLog::from_real((k as f64 - l as f64) * (k + l + 1) as f64)
        * factorial_signed(k / 2).powf(2.0)
        * factorial_signed((l - 1) / 2).powf(2.0);
    sign as f64 * (num / den).to_real()
}

/// `∫_0^1 p̂_k(2x-1) p̂_l(2x-1) x^{2λ-1} ((1-x)/(1+x))^{λ-1/2} dx`, `λ > 0`.
pub fn sum_over_i_reference(lambda: UltraParam, k: usize, l: usize, tol: f64) -> Result<f64> {
    let n = k.max(l);
    integrate_endpoint_singular(
        lambda,
        |x| {
            let p = eval_orthonormal_all(lambda, n, 2.0 * x - 1.0);
            p[k] * p[l]
        },
        tol,
    )
}

/// `(-1)^{k-l} K_k K_l / (4πλ N^{2λ})`, the tail `Σ_{i≥N} f_{i,k} f_{i,l}`
/// implied by the fixed-`j` leading term (the cosines average to `(-1)^{k-l}/2`).
pub fn predicted_tail(lambda: UltraParam, k: usize, l: usize, n: usize) -> f64 {
    let lv = lambda.value();
    let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
    let kk = (kj_true(lambda, k) * kj_true(lambda, l)).to_real();
    sign * kk / (4.0 * PI * lv * libm::pow(n as f64, 2.0 * lv))
}

/// `Σ_{i<N} f_{i,k} f_{i,l}` against its limit; also sums to `2N` for a rate.
pub fn sum_over_i(lambda: UltraParam, k: usize, l: usize, n: usize) -> Result<SumReport> {
    if lambda.value() <= 0.0 {
        return Err(Error::Domain { what: "sum over i needs lambda > 0", value: lambda.value() });
    }
    let fk = propagate_i(lambda, k, 2 * n)?;
    let fl = propagate_i(lambda, l, 2 * n)?;
    let partial = |m: usize| compensated_sum((0..m).map(|i| fk[i] * fl[i]));
    let reference = sum_over_i_reference(lambda, k, l, 1e-15)?;
    let (s1, s2) = (partial(n), partial(2 * n));
    let (g1, g2) = ((s1 - reference).abs(), (s2 - reference).abs());
    let rate = if g1 > 0.0 && g2 > 0.0 { Some(libm::log2(g2 / g1)) } else { None };
    Ok(SumReport {
        truncation: n,
        partial_sum: s1,
        reference,
        gap: g1,
        rate,
        predicted_tail: Some(predicted_tail(lambda, k, l, n)),
    })
}

/// Least-squares slope of `log gap` against `log N`.
pub fn sum_over_i_slope(lambda: UltraParam, k: usize, l: usize, ns: &[usize]) -> Result<f64> {
    let top = ns.iter().copied().max().unwrap_or(1);
    let fk = propagate_i(lambda, k, top)?;
    let fl = propagate_i(lambda, l, top)?;
    let reference = sum_over_i_reference(lambda, k, l, 1e-15)?;
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| {
            let s = compensated_sum((0..n).map(|i| fk[i] * fl[i]));
            (libm::log(n as f64), libm::log((s - reference).abs()))
        })
        .collect();
    Ok(slope(&pts))
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Which of the three parity displays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// `I²_{2k,2l}`
    EvenEven,
    /// `I²_{2k,2l+1}`
    EvenOdd,
    /// `I²_{2k+1,2l+1}`
    OddOdd,
}

impl Parity {
    pub const ALL: [Parity; 3] = [Parity::EvenEven, Parity::EvenOdd, Parity::OddOdd];

    pub fn name(self) -> &'static str {
        match self {
            Parity::EvenEven => "even_even",
            Parity::EvenOdd => "even_odd",
            Parity::OddOdd => "odd_odd",
        }
    }

    /// Degrees `(m, n)` of the two monic polynomials.
    pub fn degrees(self, k: usize, l: usize) -> (usize, usize) {
        match self {
            Parity::EvenEven => (2 * k, 2 * l),
            Parity::EvenOdd => (2 * k, 2 * l + 1),
            Parity::OddOdd => (2 * k + 1, 2 * l + 1),
        }
    }
}

/// Shift constants `(s_k, s_l, t)` so that the displays read uniformly:
/// first-index half-offset `s_k`, second `s_l`, and weight-moment shift `t`.
fn parity_shifts(p: Parity) -> (f64, f64, f64) {
    match p {
        Parity::EvenEven => (0.0, 0.0, 0.0),
        Parity::EvenOdd => (0.0, 1.0, 1.0),
        Parity::OddOdd => (1.0, 1.0, 2.0),
    }
}

/// Inner `4F3` upper/lower parameters for outer index `j`.
fn inner_params(p: Parity, lambda: f64, l: usize, j: usize) -> ([f64; 3], [f64; 3]) {
    let (sk, sl, tw) = parity_shifts(p);
    let (jf, lf) = (j as f64, l as f64);
    let num = [lf + lambda + sl, jf + lambda / 2.0 + 0.25 + tw / 2.0, jf + lambda / 2.0 + 0.75 + tw / 2.0];
    let den = [0.5 + sl, jf + lambda + 1.0 + sk, jf + lambda + 0.5 + sl];
    (num, den)
}

/// `∫_0^1 p_m(y) p_n(y) (y(1-y))^{λ-1/2} dy` for monic `p`, from the balanced
/// `4F3` displays; `inner` evaluates the inner `4F3` given `(l, num, den)`.
fn i2_with<F>(lambda: UltraParam, p: Parity, k: usize, l: usize, inner: F) -> Result<f64>
where
    F: Fn(usize, [f64; 3], [f64; 3]) -> Result<f64>,
{
    let lv = lambda.value();
    let (sk, sl, tw) = parity_shifts(p);
    let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
    let g = |x: f64| gamma_signed(x);
    let pre = poch_signed(0.5 + sk, k) * poch_signed(0.5 + sl, l) * g(lv + 0.5)? * g(lv + 0.5 + tw)?
        / (poch_signed(k as f64 + lv + sk, k) * poch_signed(l as f64 + lv + sl, l) * g(2.0 * lv + 1.0 + tw)?);
    let mut terms = Vec::with_capacity(k + 1);
    for j in 0..=k {
        let outer = poch_signed(-(k as f64), j) * poch_signed(k as f64 + lv + sk, j) * poch_signed(lv + 0.5 + tw, 2 * j)
            / (factorial_signed(j) * poch_signed(0.5 + sk, j) * poch_signed(2.0 * lv + 1.0 + tw, 2 * j));
        if outer.is_zero() {
            continue;
        }
        let (num, den) = inner_params(p, lv, l, j);
        terms.push(outer.to_real() * inner(l, num, den)?);
    }
    Ok(sign * pre.to_real() * compensated_sum(terms))
}

/// The `4F3` display for `I²` with monic polynomials.
pub fn i2_hypergeometric(lambda: UltraParam, p: Parity, k: usize, l: usize) -> Result<f64> {
    i2_with(lambda, p, k, l, |l, num, den| {
        Ok(hyp4f3_terminating(l, num, den, 1.0, Precision::Extended)?.value.to_real())
    })
}

/// The same integral by Gauss quadrature on `[0, 1]`.
pub fn i2_quadrature(lambda: UltraParam, p: Parity, k: usize, l: usize) -> Result<f64> {
    let (m, n) = p.degrees(k, l);
    let rule = shift_to_unit(&gauss_gegenbauer(lambda, (m + n) / 2 + 1)?);
    Ok(integrate(&rule, |y| {
        let v = eval_monic_all(lambda, m.max(n), y);
        v[m] * v[n]
    }))
}

/// At `λ = 1/2` each inner `4F3` has a cancelling pair and collapses to a
/// balanced `3F2(-l, a, b; c, 1+a+b-c-l; 1) = (c-a)_l (c-b)_l / ((c)_l (c-a-b)_l)`.
/// Returns the display evaluated that way.
pub fn i2_saalschutz(p: Parity, k: usize, l: usize) -> Result<f64> {
    let half = UltraParam::new(0.5).expect("valid");
    i2_with(half, p, k, l, |l, num, den| {
        // the third upper parameter cancels one of the last two lower ones
        let other = if (num[2] - den[2]).abs() < 1e-12 {
            den[1]
        } else if (num[2] - den[1]).abs() < 1e-12 {
            den[2]
        } else {
            return Err(Error::Domain { what: "no cancelling pair", value: l as f64 });
        };
        let (a, b, c) = (num[0], num[1], den[0]);
        if (1.0 + a + b - c - l as f64 - other).abs() > 1e-12 {
            return Err(Error::Domain { what: "3F2 is not balanced", value: l as f64 });
        }
        let v = poch_signed(c - a, l) * poch_signed(c - b, l) / (poch_signed(c, l) * poch_signed(c - a - b, l));
        Ok(v.to_real())
    })
}

/// The three values attached to the `2F1(-1)` double-sum display.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondIntegral {
    /// The double sum as it stands, with the orthonormal leading coefficients.
    pub raw: f64,
    /// `2^{k+l}` times the raw value.
    pub corrected: f64,
    /// Singular-weight quadrature of the integral.
    pub quadrature: f64,
    /// `|corrected - quadrature|` exceeded the tolerance.
    pub flagged: bool,
}

/// `∫_0^1 p̂_k(2x-1) p̂_l(2x-1) x^{2λ-1} ((1-x)/(1+x))^{λ-1/2} dx` from the
/// double sum over `(j, n)` with `2F1(λ-1/2, j+n+2λ; j+n+3λ+1/2; -1)`.
pub fn second_integral_formula(lambda: UltraParam, k: usize, l: usize, tol: f64) -> Result<SecondIntegral> {
    let lv = lambda.value();
    let sign = if (k + l) % 2 == 0 { 1.0 } else { -1.0 };
    let pre = leading_coeff(lambda, k) * leading_coeff(lambda, l) * poch_signed(lv + 0.5, k) * poch_signed(lv + 0.5, l)
        / (poch_signed(k as f64 + 2.0 * lv, k) * poch_signed(l as f64 + 2.0 * lv, l))
        * gamma_signed(lv + 0.5)?;
    let mut terms = Vec::new();
    for j in 0..=k {
        for n in 0..=l {
            let s = (j + n) as f64;
            let t = poch_signed(-(k as f64), j)
                * poch_signed(k as f64 + 2.0 * lv, j)
                * poch_signed(-(l as f64), n)
                * poch_signed(l as f64 + 2.0 * lv, n)
                * gamma_signed(s + 2.0 * lv)?
                / (factorial_signed(j)
                    * poch_signed(lv + 0.5, j)
                    * factorial_signed(n)
                    * poch_signed(lv + 0.5, n)
                    * gamma_signed(s + 3.0 * lv + 0.5)?);
            let h = hyp2f1_at_minus_one(lv - 0.5, s + 2.0 * lv, s + 3.0 * lv + 0.5, 1e-17)?;
            terms.push(t.to_real() * h);
        }
    }
    let raw = sign * pre.to_real() * compensated_sum(terms);
    let corrected = libm::exp2((k + l) as f64) * raw;
    let quadrature = sum_over_i_reference(lambda, k, l, 1e-15)?;
    let flagged = (corrected - quadrature).abs() > tol * quadrature.abs().max(1.0);
    Ok(SecondIntegral { raw, corrected, quadrature, flagged })
}

/// Largest `i+j+k` for which the rescaled count is reported; rounding to
/// the nearest integer stays unambiguous at 1e-9 up to here.
pub const MAX_TRIPLE_DEGREE: usize = 24;

/// `(2/π) ∫ p_i p_j p_k (1-t²)^{1/2} dt` with monic Chebyshev-U polynomials,
/// and that value times `2^{i+j+k}`, which counts Dyck-type paths.
pub fn chebyshev_triple(i: usize, j: usize, k: usize) -> Result<(f64, f64)> {
    if i + j + k > MAX_TRIPLE_DEGREE {
        return Err(Error::Domain { what: "triple product degree above 24", value: (i + j + k) as f64 });
    }
    let one = UltraParam::new(1.0).expect("valid");
    let rule = gauss_gegenbauer(one, (i + j + k) / 2 + 1)?;
    let n = i.max(j).max(k);
    let raw = 2.0 / PI
        * integrate(&rule, |t| {
            let v = eval_monic_all(one, n, t);
            v[i] * v[j] * v[k]
        });
    Ok((raw, raw * libm::exp2((i + j + k) as f64)))
}

/// One line of an identity report.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub identity: &'static str,
    pub params: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub flagged: bool,
}

impl IdentityRow {
    pub fn new(identity: &'static str, params: String, lhs: f64, rhs: f64, tol: f64) -> Self {
        let gap = (lhs - rhs).abs();
        IdentityRow { identity, params, lhs, rhs, gap, flagged: gap.is_nan() || gap > tol }
    }
}

/// Rows for the finite `j`-sums with `k, l ≤ kmax`.
pub fn sum_over_j_rows(lambda: UltraParam, kmax: usize, tol: f64) -> Result<Vec<IdentityRow>> {
    let mut rows = Vec::new();
    for k in 0..=kmax {
        for l in k..=kmax {
            let r = sum_over_j(lambda, k, l)?;
            rows.push(IdentityRow::new(
                "sum_over_j",
                format!("lambda={};k={k};l={l}", lambda.value()),
                r.partial_sum,
                r.reference,
                tol,
            ));
        }
    }
    Ok(rows)
}

/// Brute `Σ_j f^{(1/2)}_{k,j} f^{(1/2)}_{l,j}` from closed-form entries.
pub fn legendre_sum_j_brute(k: usize, l: usize) -> Result<f64> {
    let half = UltraParam::new(0.5).expect("valid");
    let terms = (0..=k.min(l))
        .map(|j| Ok(f_closed_auto(half, k, j)?.to_real() * f_closed_auto(half, l, j)?.to_real()))
        .collect::<Result<Vec<f64>>>()?;
    Ok(compensated_sum(terms))
}
