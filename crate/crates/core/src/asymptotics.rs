//! Large-index behaviour of `f^{(λ)}_{i,j}`: fixed `j` with `i → ∞`, and
//! rays `(i, j) = (k₁t, k₂t)`.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use crate::coeffs::{calibration_gamma, f_closed_auto};
use crate::error::{Error, Result};
use crate::orthopoly::UltraParam;
use crate::spectral::propagate_i;
use crate::specfun::{factorial_signed, gamma_signed, poch_signed, SignedLog};

/// `k_j = 2^{2λ-j-1} √((2λ)_j/(j!(λ)_j(λ+1)_j λΓ(2λ))) Γ(2j+2λ+1)(λ+1/2)_j`,
/// times `γ(λ)` when `corrected`.
///
/// Neither variant is the constant the data show; see [`kj_true`].
pub fn kj_constant(lambda: UltraParam, j: usize, corrected: bool) -> SignedLog {
    let l = lambda.value();
    let under = poch_signed(2.0 * l, j)
        / (factorial_signed(j)
            * poch_signed(l, j)
            * poch_signed(l + 1.0, j)
            * SignedLog::from_real(l)
            * gamma_signed(2.0 * l).expect("2λ > -1"));
    let v = SignedLog::pow2(2.0 * l - j as f64 - 1.0)
        * under.sqrt()
        * gamma_signed(2.0 * j as f64 + 2.0 * l + 1.0).expect("positive argument")
        * poch_signed(l + 0.5, j);
    if corrected {
        v * SignedLog::from_real(calibration_gamma(lambda))
    } else {
        v
    }
}

/// The constant `K_j` with `f_{i,j} ~ K_j cos(π(j+λ/2-i/2+1/4))/(√π i^{λ+1/2})`:
/// `√(2Γ(λ+1/2)Γ(λ+1)/√π) · √((2λ)_j(j+λ)/(j! λ))`.
///
/// The second factor is `p̂_j(1)/p̂_0(1)`.
pub fn kj_true(lambda: UltraParam, j: usize) -> SignedLog {
    let l = lambda.value();
    let base = SignedLog::from_real(2.0) * gamma_signed(l + 0.5).expect("λ > -1/2")
        * gamma_signed(l + 1.0).expect("λ > -1/2")
        / SignedLog::from_real(libm::sqrt(PI));
    let ratio = poch_signed(2.0 * l, j) * SignedLog::from_real((j as f64 + l) / l) / factorial_signed(j);
    (base * ratio).sqrt()
}

/// `cos(πx)`, exact at multiples of `1/2`.
pub fn cos_pi(x: f64) -> f64 {
    let r = libm::fmod(x.abs(), 2.0);
    if r == 0.0 {
        1.0
    } else if r == 0.5 || r == 1.5 {
        0.0
    } else if r == 1.0 {
        -1.0
    } else {
        libm::cos(PI * r)
    }
}

/// Which constant multiplies the fixed-`j` leading term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixedJConstant {
    /// [`kj_true`].
    Fitted,
    /// [`kj_constant`] with `γ(λ)`.
    Calibrated,
    /// [`kj_constant`] without `γ(λ)`.
    Uncorrected,
}

/// `K cos(π(j+λ/2-i/2+1/4))/(√π i^{λ+1/2})`.
pub fn leading_term(lambda: UltraParam, i: usize, j: usize, constant: FixedJConstant) -> f64 {
    assert!(i >= 1, "the leading term needs i >= 1");
    let l = lambda.value();
    let k = match constant {
        FixedJConstant::Fitted => kj_true(lambda, j),
        FixedJConstant::Calibrated => kj_constant(lambda, j, true),
        FixedJConstant::Uncorrected => kj_constant(lambda, j, false),
    };
    let c = cos_pi(j as f64 + l / 2.0 - i as f64 / 2.0 + 0.25);
    let mag = k / SignedLog::from_real(libm::sqrt(PI)) / SignedLog::from_real(i as f64).powf(l + 0.5);
    c * mag.to_real()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    RealSaddles,
    ComplexSaddles,
    Boundary,
}

impl Regime {
    pub fn name(self) -> &'static str {
        match self {
            Regime::RealSaddles => "real_saddles",
            Regime::ComplexSaddles => "complex_saddles",
            Regime::Boundary => "boundary",
        }
    }
}

/// Quantities attached to the ray `(k₁t, k₂t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayParams {
    pub k1: u32,
    pub k2: u32,
    /// `k₂/k₁`
    pub epsilon: f64,
    /// `(k₁-k₂)/(k₁+k₂)`
    pub epsilon1: f64,
    /// `√(2ε²-1)`, real saddles only.
    pub b_hat: Option<f64>,
    /// `(1+ε₁)²-8ε₁`; `b(ε₁)` is its square root, imaginary when negative.
    pub b_eps1_squared: f64,
    /// `ε^λ/√(π(1-ε²)√(2ε²-1))`, real saddles only.
    pub c_const: Option<f64>,
    pub lambda: f64,
    pub regime: Regime,
}

impl RayParams {
    /// `|b(ε₁)|`.
    pub fn b_eps1_modulus(&self) -> f64 {
        libm::sqrt(self.b_eps1_squared.abs())
    }
}

/// Classify the ray with integer arithmetic: real saddles iff `2k₂² > k₁²`.
pub fn ray_params(k1: u32, k2: u32, lambda: UltraParam) -> Result<RayParams> {
    if !(k1 > k2 && k2 > 0) {
        return Err(Error::Domain { what: "ray needs k1 > k2 > 0", value: k2 as f64 });
    }
    let (a, b) = (2 * (k2 as u64).pow(2), (k1 as u64).pow(2));
    let regime = match a.cmp(&b) {
        core::cmp::Ordering::Greater => Regime::RealSaddles,
        core::cmp::Ordering::Less => Regime::ComplexSaddles,
        core::cmp::Ordering::Equal => Regime::Boundary,
    };
    let l = lambda.value();
    let eps = k2 as f64 / k1 as f64;
    let eps1 = (k1 - k2) as f64 / (k1 + k2) as f64;
    let disc = (a - b.min(a)) as f64 / b as f64;
    let (b_hat, c_const) = if regime == Regime::RealSaddles {
        let bh = libm::sqrt(disc);
        (Some(bh), Some(libm::pow(eps, l) / libm::sqrt(PI * (1.0 - eps * eps) * bh)))
    } else {
        (None, None)
    };
    Ok(RayParams {
        k1,
        k2,
        epsilon: eps,
        epsilon1: eps1,
        b_hat,
        b_eps1_squared: (1.0 + eps1) * (1.0 + eps1) - 8.0 * eps1,
        c_const,
        lambda: l,
        regime,
    })
}

/// `γ(λ) c/(2^{k₁t+1}√(k₁t)) ((1+b̂)/(ε-b̂))^{(k₁-k₂)t} ((1+2ε-b̂)/(1+ε))^{(k₁+k₂)t+2λ}`.
pub fn ray_leading(params: &RayParams, t: u32) -> Result<SignedLog> {
    let (Some(bh), Some(c), Regime::RealSaddles) = (params.b_hat, params.c_const, params.regime) else {
        return Err(Error::WrongRegime { k1: params.k1, k2: params.k2 });
    };
    let (k1, k2, t, e, l) = (params.k1 as f64, params.k2 as f64, t as f64, params.epsilon, params.lambda);
    let r1 = libm::log((1.0 + bh) / (e - bh));
    let r2 = libm::log((1.0 + 2.0 * e - bh) / (1.0 + e));
    let log = libm::log(c) - (k1 * t + 1.0) * LN_2 - 0.5 * libm::log(k1 * t)
        + (k1 - k2) * t * r1
        + ((k1 + k2) * t + 2.0 * l) * r2
        + (1.0 - 2.0 * l) * LN_2;
    Ok(SignedLog::new(1, log))
}

/// `d_{i,j}` from the alternate representation (without `γ(λ)`).
pub fn d_ij(lambda: UltraParam, i: usize, j: usize) -> SignedLog {
    crate::coeffs::alt_prefactor(lambda, i, j)
}

/// `(-1)^{(k₁-k₂)t+1} 2^{k₂t+2λ-1} (k₂/k₁)^λ k₁t`, the large-`t` form of `d_{k₁t,k₂t}`.
pub fn d_limit(lambda: UltraParam, k1: u32, k2: u32, t: u32) -> SignedLog {
    let l = lambda.value();
    let sign = if ((k1 - k2) * t) % 2 == 0 { -1 } else { 1 };
    SignedLog::new(sign, 0.0)
        * SignedLog::pow2((k2 * t) as f64 + 2.0 * l - 1.0)
        * SignedLog::from_real(k2 as f64 / k1 as f64).powf(l)
        * SignedLog::from_real((k1 * t) as f64)
}

/// One line of an asymptotics report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymRow {
    pub index: usize,
    pub exact: SignedLog,
    pub leading: SignedLog,
    /// `|exact - leading| / |exact|`, computed in log space.
    pub rel_err: f64,
}

fn rel_err(exact: SignedLog, leading: SignedLog) -> f64 {
    if exact.is_zero() {
        return if leading.is_zero() { 0.0 } else { f64::INFINITY };
    }
    ((leading / exact).to_real() - 1.0).abs()
}

/// Fixed-`j` report for the given `i` values. Exact values come from the
/// `i`-recurrence, which stays accurate to `i` in the thousands.
pub fn fixed_j_report(lambda: UltraParam, j: usize, is: &[usize], constant: FixedJConstant) -> Result<Vec<AsymRow>> {
    let imax = is.iter().copied().max().unwrap_or(0);
    let col = propagate_i(lambda, j, imax)?;
    Ok(is
        .iter()
        .map(|&i| {
            let exact = SignedLog::from_real(col[i]);
            let leading = SignedLog::from_real(leading_term(lambda, i, j, constant));
            AsymRow { index: i, exact, leading, rel_err: rel_err(exact, leading) }
        })
        .collect())
}

/// `|f_{i,j} - leading| i^{λ+3/2}` along a fixed column.
pub fn fixed_j_scaled_errors(lambda: UltraParam, j: usize, imin: usize, imax: usize) -> Result<Vec<(usize, f64)>> {
    let col = propagate_i(lambda, j, imax)?;
    let p = lambda.value() + 1.5;
    Ok((imin.max(1)..=imax)
        .map(|i| {
            let e = (col[i] - leading_term(lambda, i, j, FixedJConstant::Fitted)).abs();
            (i, e * libm::pow(i as f64, p))
        })
        .collect())
}

/// Largest distance from a sign change of `f_{·,j}` on `[imin, imax]` to the
/// nearest sign change of the leading term. Values below `1e-8` of the
/// envelope count as zeros and carry the previous sign.
pub fn sign_change_offset(lambda: UltraParam, j: usize, imin: usize, imax: usize) -> Result<usize> {
    let col = propagate_i(lambda, j, imax)?;
    let l = lambda.value();
    let k = kj_true(lambda, j).to_real() / libm::sqrt(PI);
    let changes = |vals: &mut dyn Iterator<Item = (usize, f64)>| {
        let mut out = Vec::new();
        let mut last = 0.0f64;
        for (i, v) in vals {
            let envelope = k / libm::pow(i as f64, l + 0.5);
            if v.abs() <= 1e-8 * envelope {
                continue;
            }
            if last != 0.0 && v.signum() != last {
                out.push(i);
            }
            last = v.signum();
        }
        out
    };
    let lo = imin.max(1);
    let exact = changes(&mut (lo..=imax).map(|i| (i, col[i])));
    let lead = changes(&mut (lo..=imax).map(|i| (i, leading_term(lambda, i, j, FixedJConstant::Fitted))));
    let mut worst = 0;
    for &c in &exact {
        let d = lead.iter().map(|&m| c.abs_diff(m)).min().unwrap_or(usize::MAX);
        worst = worst.max(d);
    }
    for &c in &lead {
        let d = exact.iter().map(|&m| c.abs_diff(m)).min().unwrap_or(usize::MAX);
        worst = worst.max(d);
    }
    Ok(worst)
}

/// Ray report for the given `t` values; exact values from the closed form.
pub fn ray_report(lambda: UltraParam, params: &RayParams, ts: &[u32]) -> Result<Vec<AsymRow>> {
    ts.iter()
        .map(|&t| {
            let leading = ray_leading(params, t)?;
            let (i, j) = ((params.k1 * t) as usize, (params.k2 * t) as usize);
            let exact = f_closed_auto(lambda, i, j)?.value;
            Ok(AsymRow { index: t as usize, exact, leading, rel_err: rel_err(exact, leading) })
        })
        .collect()
}
