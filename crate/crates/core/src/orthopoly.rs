//! Ultraspherical polynomials: orthonormal, monic and argument-doubled.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::{Error, Result};
use crate::specfun::{factorial_signed, gamma_signed, poch_signed, SignedLog};

/// The ultraspherical parameter, restricted to `λ > -1/2`, `λ ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct UltraParam(f64);

impl UltraParam {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda > -0.5 && lambda != 0.0 {
            Ok(UltraParam(lambda))
        } else {
            Err(Error::InvalidLambda(lambda))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for UltraParam {
    type Error = Error;
    fn try_from(x: f64) -> Result<Self> {
        UltraParam::new(x)
    }
}

impl fmt::Display for UltraParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Recurrence coefficient `a_n` of the orthonormal polynomials; `a_0 = 0`.
pub fn ultra_offdiag(lambda: UltraParam, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let l = lambda.0;
    let n = n as f64;
    0.5 * libm::sqrt(n * (n + 2.0 * l - 1.0) / ((n + l - 1.0) * (n + l)))
}

/// Total mass `√π Γ(λ+1/2)/Γ(λ+1)` of `(1-t²)^{λ-1/2}` on `[-1, 1]`.
pub fn weight_mass(lambda: UltraParam) -> SignedLog {
    let l = lambda.0;
    let g = gamma_signed(l + 0.5).expect("λ > -1/2") / gamma_signed(l + 1.0).expect("λ > -1/2");
    g * SignedLog::from_real(libm::sqrt(PI))
}

/// Constant orthonormal polynomial `p̂_0`.
pub fn orthonormal_p0(lambda: UltraParam) -> f64 {
    weight_mass(lambda).powf(-0.5).to_real()
}

/// Values `p̂_0(t), ..., p̂_n(t)`.
pub fn eval_orthonormal_all(lambda: UltraParam, n: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut prev = 0.0;
    let mut cur = orthonormal_p0(lambda);
    out.push(cur);
    for k in 0..n {
        let next = (t * cur - ultra_offdiag(lambda, k) * prev) / ultra_offdiag(lambda, k + 1);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Orthonormal ultraspherical polynomial `p̂_n(t)`.
pub fn eval_orthonormal(lambda: UltraParam, n: usize, t: f64) -> f64 {
    eval_orthonormal_all(lambda, n, t)[n]
}

/// Values of the monic polynomials `p_0(t), ..., p_n(t)`.
pub fn eval_monic_all(lambda: UltraParam, n: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut prev = 0.0;
    let mut cur = 1.0;
    out.push(cur);
    for k in 0..n {
        let a = ultra_offdiag(lambda, k);
        let next = t * cur - a * a * prev;
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// Monic ultraspherical polynomial `p_n(t)`.
pub fn eval_monic(lambda: UltraParam, n: usize, t: f64) -> f64 {
    eval_monic_all(lambda, n, t)[n]
}

/// `p_n(1) = 2^n (λ+1/2)_n / (n+2λ)_n`.
pub fn monic_at_one(lambda: UltraParam, n: usize) -> SignedLog {
    let l = lambda.0;
    SignedLog::pow2(n as f64) * poch_signed(l + 0.5, n) / poch_signed(n as f64 + 2.0 * l, n)
}

/// Leading coefficient `κ_n` of `p̂_n`, so that `p̂_n = κ_n p_n`.
pub fn leading_coeff(lambda: UltraParam, n: usize) -> SignedLog {
    let l = lambda.0;
    let r = poch_signed(l, n) * poch_signed(l + 1.0, n) / (factorial_signed(n) * poch_signed(2.0 * l, n));
    SignedLog::from_real(orthonormal_p0(lambda)) * SignedLog::pow2(n as f64) * r.sqrt()
}

/// `2^{2λ} Σ_{j≤k} p̂_j(2x-1) p̂_j(2y-1)`, the reproducing kernel on `[0, 1]`.
pub fn christoffel_darboux(lambda: UltraParam, k: usize, x: f64, y: f64) -> f64 {
    let px = eval_orthonormal_all(lambda, k, 2.0 * x - 1.0);
    let py = eval_orthonormal_all(lambda, k, 2.0 * y - 1.0);
    let s = crate::specfun::compensated_sum(px.iter().zip(&py).map(|(a, b)| a * b));
    libm::exp2(2.0 * lambda.0) * s
}

type Coefficient = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

/// A family `t P_n = a_{n+1} P_{n+1} + b_n P_n + a_n P_{n-1}` with `P_0 = 1`.
#[derive(Clone)]
pub struct RecurrenceFamily {
    offdiag: Coefficient,
    diag: Coefficient,
    pub label: String,
}

impl fmt::Debug for RecurrenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RecurrenceFamily").field("label", &self.label).finish()
    }
}

impl RecurrenceFamily {
    pub fn new<A, B>(label: impl Into<String>, offdiag: A, diag: B) -> Self
    where
        A: Fn(usize) -> f64 + Send + Sync + 'static,
        B: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        RecurrenceFamily { offdiag: Arc::new(offdiag), diag: Arc::new(diag), label: label.into() }
    }

    /// The ultraspherical family, normalized by `P_0 = 1` (so `P_n = p̂_n / p̂_0`).
    pub fn ultraspherical(lambda: UltraParam) -> Self {
        let mut label = String::from("ultraspherical(");
        fmt::Write::write_fmt(&mut label, format_args!("{lambda})")).ok();
        RecurrenceFamily::new(label, move |n| ultra_offdiag(lambda, n), |_| 0.0)
    }

    pub fn offdiag(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            (self.offdiag)(n)
        }
    }

    pub fn diag(&self, n: usize) -> f64 {
        (self.diag)(n)
    }

    /// `P_0(t), ..., P_n(t)`.
    pub fn eval_all(&self, n: usize, t: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut prev = 0.0;
        let mut cur = 1.0;
        out.push(cur);
        for k in 0..n {
            let next = ((t - self.diag(k)) * cur - self.offdiag(k) * prev) / self.offdiag(k + 1);
            prev = cur;
            cur = next;
            out.push(cur);
        }
        out
    }
}
