//! Connection coefficients `u_{i,j}`, `f^{(λ)}_{i,j}` and `f^{(λ,μ)}_{i,j}`.

mod grid;

use alloc::vec;
use alloc::vec::Vec;

pub use grid::{CoefficientGrid, EntryFlag, GridFamily, Method};

use crate::error::{Error, Result};
use crate::orthopoly::{eval_orthonormal_all, orthonormal_p0, RecurrenceFamily, UltraParam};
use crate::quadrature::{
    gauss_gegenbauer, gauss_gegenbauer_refined, integrate, leading_ratios_extended, monic_all_extended, shift_to_unit,
    QuadratureRule,
};
use crate::specfun::{
    factorial_signed, gamma_signed, hyp2f1_series, Expansion, hyp2f1_terminating, poch_signed,
    HypValue, Precision, SignedLog,
};

/// `γ(λ) = 2^{1-2λ}`, the factor reconciling the hypergeometric representation
/// with the defining integral.
pub fn calibration_gamma(lambda: UltraParam) -> f64 {
    libm::exp2(1.0 - 2.0 * lambda.value())
}

/// Node count that integrates `f_{i,j}` exactly.
pub fn nodes_for(i: usize, j: usize) -> usize {
    (i + j) / 2 + 1
}

/// `∫_0^1 p̂_i(t) p̂_j(2t-1) (t(1-t))^{λ-1/2} dt` by an exact Gauss rule.
///
/// Entries near the diagonal are far smaller than the integrand, so the sum
/// runs in extended precision; see [`f_table_extended`].
pub fn f_quadrature(lambda: UltraParam, i: usize, j: usize) -> Result<f64> {
    if j > i {
        return Ok(0.0);
    }
    Ok(extended_table(Pairing::Doubled(lambda), i, j, Some((i, j)))?[i][j].to_f64())
}

/// `f^{(λ)}_{i,j}` for `i ≤ imax`, `j ≤ min(i, jmax)` to about 200 bits.
pub fn f_table_extended(lambda: UltraParam, imax: usize, jmax: usize) -> Result<Vec<Vec<Expansion>>> {
    extended_table(Pairing::Doubled(lambda), imax, jmax, None)
}

/// `f^{(λ,μ)}_{i,j}` for `i ≤ imax`, `j ≤ min(i, jmax)` to about 200 bits, up
/// to one common rounding in the factor `p̂^{(λ)}_0/p̂^{(μ)}_0`.
pub fn f_mixed_table_extended(lambda: UltraParam, mu: UltraParam, imax: usize, jmax: usize) -> Result<Vec<Vec<Expansion>>> {
    extended_table(Pairing::Mixed(lambda, mu), imax, jmax, None)
}

/// Relative size under which an extended quadrature sum counts as zero.
const RESOLVED_ZERO: f64 = 1e-50;

#[derive(Clone, Copy)]
enum Pairing {
    /// `p̂^{(λ)}_i(x) p̂^{(λ)}_j(2x-1)` on `[0,1]`.
    Doubled(UltraParam),
    /// `p̂^{(λ)}_i(t) p̂^{(μ)}_j(t)` against the `μ` weight.
    Mixed(UltraParam, UltraParam),
}

/// With `p̂_n = p̂_0 r_n p_n`, `p_n` monic and `p̂_0² · mass = 1`, every entry is
/// a normalized-weight sum of monic products times `r_i r_j` and one constant.
fn extended_table(
    pairing: Pairing,
    imax: usize,
    jmax: usize,
    only: Option<(usize, usize)>,
) -> Result<Vec<Vec<Expansion>>> {
    let (pl, ql) = match pairing {
        Pairing::Doubled(l) => (l, l),
        Pairing::Mixed(l, m) => (l, m),
    };
    let rule = gauss_gegenbauer_refined(ql, nodes_for(imax, jmax))?;
    let one = Expansion::new(1.0);
    let mut sums = vec![vec![Expansion::ZERO; jmax + 1]; imax + 1];
    let mut bulk = vec![vec![0.0f64; jmax + 1]; imax + 1];
    for (t, w) in rule.nodes.iter().zip(&rule.weights) {
        let x = match pairing {
            Pairing::Doubled(_) => (*t + one).ldexp(-1),
            Pairing::Mixed(..) => *t,
        };
        let p = monic_all_extended(pl, imax, x);
        let q = monic_all_extended(ql, jmax, *t);
        for i in 0..=imax {
            for j in 0..=jmax.min(i) {
                if only.is_some_and(|o| o != (i, j)) {
                    continue;
                }
                let term = *w * p[i] * q[j];
                sums[i][j] = sums[i][j] + term;
                bulk[i][j] += term.hi().abs();
            }
        }
    }
    let constant = match pairing {
        Pairing::Doubled(l) => libm::exp2(-2.0 * l.value()),
        Pairing::Mixed(l, m) => orthonormal_p0(l) / orthonormal_p0(m),
    };
    let rp = leading_ratios_extended(pl, imax);
    let rq = leading_ratios_extended(ql, jmax);
    Ok(sums
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, s)| {
                    // below the resolution of the extended sum: an exact zero
                    if s.hi().abs() <= RESOLVED_ZERO * bulk[i][j] {
                        return Expansion::ZERO;
                    }
                    (*s * rp[i] * rq[j]).mul_f64(constant)
                })
                .collect()
        })
        .collect())
}

/// `f_{i,j}` with a caller-supplied `[0,1]` rule of sufficient degree.
pub fn f_with_rule(lambda: UltraParam, rule: &QuadratureRule, i: usize, j: usize) -> f64 {
    debug_assert!(rule.exact_degree >= i + j);
    integrate(rule, |x| {
        eval_orthonormal_all(lambda, i, x)[i] * eval_orthonormal_all(lambda, j, 2.0 * x - 1.0)[j]
    })
}

/// A closed-form value with its cancellation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedValue {
    pub value: SignedLog,
    pub condition: f64,
    pub precision: Precision,
    /// Absolute rounding-error bound.
    pub error_bound: f64,
    pub reliable: bool,
}

impl ClosedValue {
    fn exact_zero() -> Self {
        ClosedValue {
            value: SignedLog::ZERO,
            condition: 1.0,
            precision: Precision::Standard,
            error_bound: 0.0,
            reliable: true,
        }
    }

    fn from_parts(prefactor: SignedLog, h: HypValue) -> Self {
        let error_bound = (prefactor.abs() * h.error_bound()).to_real();
        // an extended-precision sum that cancels exactly is a resolved zero
        let resolved_zero = h.precision == Precision::Extended && error_bound < 1e-40;
        ClosedValue {
            value: prefactor * h.value,
            condition: h.condition,
            precision: h.precision,
            error_bound,
            reliable: h.reliable || resolved_zero,
        }
    }

    pub fn to_real(&self) -> f64 {
        self.value.to_real()
    }
}

fn closed_prefactor(lambda: UltraParam, i: usize, j: usize) -> SignedLog {
    let l = lambda.value();
    let under = factorial_signed(i) * poch_signed(l + 1.0, i) * poch_signed(2.0 * l, i) * poch_signed(2.0 * l, j)
        / (factorial_signed(j) * poch_signed(l, i) * poch_signed(l, j) * poch_signed(l + 1.0, j));
    SignedLog::pow2(-(3.0 * j as f64 + 1.0)) * under.sqrt() * poch_signed(i as f64 + 2.0 * l, j)
        / (poch_signed(l + 0.5, j) * factorial_signed(i - j))
}

/// The hypergeometric representation without the calibration factor `γ(λ)`.
pub fn f_closed_uncalibrated(lambda: UltraParam, i: usize, j: usize, precision: Precision) -> Result<ClosedValue> {
    if j > i {
        return Ok(ClosedValue::exact_zero());
    }
    let l = lambda.value();
    let h = hyp2f1_terminating(i - j, (i + j) as f64 + 2.0 * l, 2.0 * j as f64 + 2.0 * l + 1.0, 0.5, precision)?;
    Ok(ClosedValue::from_parts(closed_prefactor(lambda, i, j), h))
}

/// `f^{(λ)}_{i,j}` from its terminating `2F1(-i+j, i+j+2λ; 2j+2λ+1; 1/2)` form.
pub fn f_closed(lambda: UltraParam, i: usize, j: usize, precision: Precision) -> Result<ClosedValue> {
    let mut v = f_closed_uncalibrated(lambda, i, j, precision)?;
    let g = calibration_gamma(lambda);
    v.value = v.value * SignedLog::from_real(g);
    v.error_bound *= g;
    Ok(v)
}

/// `f^{(λ)}_{i,j}` from the form `d_{i,j} 2F1(i-j+1, 1-i-j-2λ; 2; 1/2)`.
///
/// The form holds for `i > j` only; on the diagonal it is off by
/// `-(2^{2i+1}-1)` at `λ = 1/2`, so the diagonal falls back to [`f_closed`].
pub fn f_closed_alt(lambda: UltraParam, i: usize, j: usize, precision: Precision) -> Result<ClosedValue> {
    if j > i {
        return Ok(ClosedValue::exact_zero());
    }
    if i == j {
        return f_closed(lambda, i, j, precision);
    }
    let h = hyp2f1_series(
        (i - j + 1) as f64,
        1.0 - (i + j) as f64 - 2.0 * lambda.value(),
        2.0,
        0.5,
        precision,
    )?;
    let d = alt_prefactor(lambda, i, j) * SignedLog::from_real(calibration_gamma(lambda));
    Ok(ClosedValue::from_parts(d, h))
}

/// `d_{i,j} = (-1)^{i-j+1} 2^{j+2λ-1} √((i+λ)(j+λ) i! Γ(2λ+j) / (j! Γ(2λ+i)))`.
pub fn alt_prefactor(lambda: UltraParam, i: usize, j: usize) -> SignedLog {
    let l = lambda.value();
    let n = i - j;
    let under = SignedLog::from_real((i as f64 + l) * (j as f64 + l)) * poch_signed(j as f64 + 1.0, n)
        / poch_signed(2.0 * l + j as f64, n);
    let sign = if n % 2 == 0 { -1 } else { 1 };
    SignedLog::new(sign, 0.0) * SignedLog::pow2(j as f64 + 2.0 * l - 1.0) * under.sqrt()
}

fn auto<F: Fn(Precision) -> Result<ClosedValue>>(f: F) -> Result<ClosedValue> {
    let v = f(Precision::Standard)?;
    if v.reliable {
        Ok(v)
    } else {
        f(Precision::Extended)
    }
}

/// [`f_closed`] in standard precision, redone in extended precision when flagged.
pub fn f_closed_auto(lambda: UltraParam, i: usize, j: usize) -> Result<ClosedValue> {
    auto(|p| f_closed(lambda, i, j, p))
}

/// [`f_closed_alt`] in standard precision, redone in extended precision when flagged.
pub fn f_closed_alt_auto(lambda: UltraParam, i: usize, j: usize) -> Result<ClosedValue> {
    auto(|p| f_closed_alt(lambda, i, j, p))
}

/// Ingredients of `u_{i,j} = ∫ P_i(t) Q_j(αt+β) dσ(t)`.
#[derive(Debug, Clone)]
pub struct GeneralSetup {
    pub p: RecurrenceFamily,
    pub q: RecurrenceFamily,
    pub sigma: QuadratureRule,
    pub alpha: f64,
    pub beta: f64,
}

impl GeneralSetup {
    pub fn new(p: RecurrenceFamily, q: RecurrenceFamily, sigma: QuadratureRule, alpha: f64, beta: f64) -> Result<Self> {
        if alpha == 0.0 || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::Domain { what: "alpha must be finite and nonzero", value: alpha });
        }
        Ok(GeneralSetup { p, q, sigma, alpha, beta })
    }

    /// `P = Q` ultraspherical, `σ` the shifted weight on `[0,1]`, `α = 2`, `β = -1`.
    pub fn ultraspherical(lambda: UltraParam, nodes: usize) -> Result<Self> {
        let fam = RecurrenceFamily::ultraspherical(lambda);
        let sigma = shift_to_unit(&gauss_gegenbauer(lambda, nodes)?);
        GeneralSetup::new(fam.clone(), fam, sigma, 2.0, -1.0)
    }
}

/// `u_{i,j}` by quadrature against `σ`, with `P_0 = Q_0 = 1`.
pub fn u_general(setup: &GeneralSetup, i: usize, j: usize) -> Result<f64> {
    if setup.sigma.exact_degree < i + j {
        return Err(Error::DegreeTooLow { needed: i + j, available: setup.sigma.exact_degree });
    }
    Ok(integrate(&setup.sigma, |t| {
        setup.p.eval_all(i, t)[i] * setup.q.eval_all(j, setup.alpha * t + setup.beta)[j]
    }))
}

/// `∫_{-1}^1 p̂^{(λ)}_i(t) p̂^{(μ)}_j(t) (1-t²)^{μ-1/2} dt`.
pub fn f_mixed(lambda: UltraParam, mu: UltraParam, i: usize, j: usize) -> Result<f64> {
    if j > i {
        return Ok(0.0);
    }
    Ok(extended_table(Pairing::Mixed(lambda, mu), i, j, Some((i, j)))?[i][j].to_f64())
}

/// `(f_{i,i}, f_{i,i-1}, f_{i,i-2})` expanding `p̂^{(1/2)}_i` in `p̂^{(3/2)}`.
pub fn geronimus_triple(i: usize) -> Result<(f64, f64, f64)> {
    assert!(i >= 2, "the triple needs i >= 2");
    let (half, three) = (UltraParam::new(0.5)?, UltraParam::new(1.5)?);
    Ok((f_mixed(half, three, i, i)?, f_mixed(half, three, i, i - 1)?, f_mixed(half, three, i, i - 2)?))
}

/// `k_{i,j,λ} = Γ(λ+1)/(Γ(λ+1/2)√π) 2^{i+j+2λ+1} √((λ)_i(λ+1)_i/(i!(2λ)_i)) √((λ)_j(λ+1)_j/(j!(2λ)_j))`.
pub fn norm_constant(lambda: UltraParam, i: usize, j: usize) -> SignedLog {
    let l = lambda.value();
    let part = |n: usize| {
        (poch_signed(l, n) * poch_signed(l + 1.0, n) / (factorial_signed(n) * poch_signed(2.0 * l, n))).sqrt()
    };
    gamma_signed(l + 1.0).expect("λ > -1/2") / gamma_signed(l + 0.5).expect("λ > -1/2")
        / SignedLog::from_real(libm::sqrt(core::f64::consts::PI))
        * SignedLog::pow2((i + j) as f64 + 2.0 * l + 1.0)
        * part(i)
        * part(j)
}

/// Closed forms of `(f_{i,i}, f_{i,i-2})` for `(λ, μ) = (1/2, 3/2)`:
/// `2√(k_{i,i,1/2}/k_{i,i,3/2})` and `-(1/2)√(k_{i-2,i-2,3/2}/k_{i,i,1/2})`.
pub fn geronimus_closed(i: usize) -> (f64, f64) {
    assert!(i >= 2, "the triple needs i >= 2");
    let half = UltraParam::new(0.5).expect("valid");
    let three = UltraParam::new(1.5).expect("valid");
    let diag = 2.0 * (norm_constant(half, i, i) / norm_constant(three, i, i)).sqrt().to_real();
    let sub = -0.5 * (norm_constant(three, i - 2, i - 2) / norm_constant(half, i, i)).sqrt().to_real();
    (diag, sub)
}

/// Full `(imax+1) × (jmax+1)` table of `f^{(λ)}_{i,j}` by one method.
pub fn build_grid(lambda: UltraParam, imax: usize, jmax: usize, method: Method) -> Result<CoefficientGrid> {
    let family = GridFamily::Same { lambda: lambda.value() };
    let mut grid = CoefficientGrid::zeros(family, imax, jmax, method);
    match method {
        Method::Quadrature => {
            let table = f_table_extended(lambda, imax, jmax)?;
            for (i, row) in table.iter().enumerate() {
                for (j, v) in row.iter().enumerate().take(i + 1) {
                    grid.set(i, j, v.to_f64());
                }
            }
        }
        Method::Closed | Method::ClosedAlt => {
            for i in 0..=imax {
                for j in 0..=jmax.min(i) {
                    let v = if method == Method::Closed {
                        f_closed_auto(lambda, i, j)?
                    } else {
                        f_closed_alt_auto(lambda, i, j)?
                    };
                    grid.set(i, j, v.to_real());
                    if !v.reliable {
                        grid.set_flag(i, j, EntryFlag::Unreliable);
                    }
                }
            }
        }
        Method::RecurrenceI => {
            for j in 0..=jmax.min(imax) {
                let col = crate::spectral::propagate_i(lambda, j, imax)?;
                for (i, v) in col.into_iter().enumerate() {
                    grid.set(i, j, v);
                }
            }
        }
        Method::RecurrenceJ => {
            for i in 0..=imax {
                let row = crate::spectral::propagate_j(lambda, i, jmax)?;
                for (j, v) in row.into_iter().enumerate() {
                    grid.set(i, j, v);
                }
            }
        }
        Method::WaveStep => {
            let n = imax + jmax + 1;
            let start: Vec<Expansion> = f_table_extended(lambda, n - 1, 0)?.into_iter().map(|r| r[0]).collect();
            let sim = crate::spectral::simulate_ultraspherical(lambda, &start, jmax)?;
            for i in 0..=imax {
                for j in 0..=jmax {
                    grid.set(i, j, sim.get(i, j));
                    grid.set_flag(i, j, sim.flag(i, j));
                }
            }
            return Ok(grid);
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(x: f64) -> UltraParam {
        UltraParam::new(x).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn calibration_examples() {
        assert_eq!(calibration_gamma(lam(0.5)), 1.0);
        assert_eq!(calibration_gamma(lam(1.5)), 0.25);
        assert_eq!(calibration_gamma(lam(1.0)), 0.5);
    }

    #[test]
    fn quadrature_examples() {
        assert_eq!(f_quadrature(lam(1.3), 2, 5).unwrap(), 0.0);
        assert!(close(f_quadrature(lam(0.5), 1, 1).unwrap(), 0.25, 1e-14));
        assert!(close(f_quadrature(lam(1.0), 0, 0).unwrap(), 0.25, 1e-14));
        assert!(close(f_quadrature(lam(0.5), 1, 0).unwrap(), 3f64.sqrt() / 4.0, 1e-14));
        // f_{1,0} = √(2(λ+1)) 4^{-λ} / 2 at λ = 1
        assert!(close(f_quadrature(lam(1.0), 1, 0).unwrap(), 0.25, 1e-14));
    }

    #[test]
    fn closed_examples() {
        let p = Precision::Standard;
        assert!(close(f_closed(lam(0.5), 1, 1, p).unwrap().to_real(), 0.25, 1e-14));
        assert!(close(f_closed(lam(0.5), 1, 0, p).unwrap().to_real(), 3f64.sqrt() / 4.0, 1e-14));
        // the uncalibrated form is off by 1/γ away from λ = 1/2
        let raw = f_closed_uncalibrated(lam(1.5), 0, 0, p).unwrap().to_real();
        assert!(close(raw, 0.5, 1e-14));
        assert!(close(f_closed(lam(1.5), 0, 0, p).unwrap().to_real(), 0.125, 1e-14));
        assert!(f_closed(lam(2.0), 3, 4, p).unwrap().value.is_zero());
    }

    #[test]
    fn alternate_form_examples() {
        let p = Precision::Extended;
        assert!(close(f_closed_alt(lam(0.5), 1, 0, p).unwrap().to_real(), 3f64.sqrt() / 4.0, 1e-14));
        let a = f_closed_alt(lam(0.5), 3, 3, p).unwrap().to_real();
        let b = f_closed(lam(0.5), 3, 3, p).unwrap().to_real();
        assert!(close(a, b, 1e-14));
        let a = f_closed_alt(lam(2.0), 6, 2, p).unwrap().to_real();
        assert!(close(a, f_quadrature(lam(2.0), 6, 2).unwrap(), 1e-9));
    }

    #[test]
    fn exact_zero_resolves_in_extended_precision() {
        let v = f_closed(lam(0.5), 2, 0, Precision::Standard).unwrap();
        assert!(!v.reliable);
        let v = f_closed_auto(lam(0.5), 2, 0).unwrap();
        assert!(v.reliable && v.value.is_zero());
    }

    #[test]
    fn general_setup_examples() {
        let legendre = lam(0.5);
        let s = GeneralSetup::ultraspherical(legendre, 8).unwrap();
        assert!(close(u_general(&s, 0, 0).unwrap(), 1.0, 1e-14));
        let q = RecurrenceFamily::ultraspherical(legendre);
        let own = gauss_gegenbauer(legendre, 4).unwrap();
        let s2 = GeneralSetup::new(q.clone(), q, own, 1.0, 0.0).unwrap();
        assert!(u_general(&s2, 0, 1).unwrap().abs() < 1e-15);
        assert!(matches!(u_general(&s, 9, 9), Err(Error::DegreeTooLow { .. })));
        // u = f / p̂_0² for the ultraspherical setup
        let l = lam(1.7);
        let s = GeneralSetup::ultraspherical(l, 6).unwrap();
        let p0 = orthonormal_p0(l);
        assert!(close(u_general(&s, 2, 1).unwrap() * p0 * p0, f_quadrature(l, 2, 1).unwrap(), 1e-13));
        assert!(GeneralSetup::new(s.p.clone(), s.q.clone(), s.sigma.clone(), 0.0, 1.0).is_err());
    }

    #[test]
    fn mixed_examples() {
        for i in 0..6 {
            for j in 0..6 {
                let v = f_mixed(lam(1.2), lam(1.2), i, j).unwrap();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-13);
            }
        }
        assert!(f_mixed(lam(0.5), lam(1.5), 2, 1).unwrap().abs() < 1e-15);
    }

    #[test]
    fn geronimus_triple_reconstructs_and_matches_closed_form() {
        let (half, three) = (lam(0.5), lam(1.5));
        for i in 2..12 {
            let (a, b, c) = geronimus_triple(i).unwrap();
            assert!(b.abs() < 1e-14);
            let (da, dc) = geronimus_closed(i);
            assert!(close(a, da, 1e-12) && close(c, dc, 1e-12), "i={i}");
            for k in 0..20 {
                let t = libm::cos(core::f64::consts::PI * (k as f64 + 0.5) / 20.0);
                let q = eval_orthonormal_all(three, i, t);
                let want = eval_orthonormal_all(half, i, t)[i];
                assert!((a * q[i] + b * q[i - 1] + c * q[i - 2] - want).abs() < 1e-10);
            }
            // every other entry of the row vanishes
            for j in 0..i.saturating_sub(2) {
                assert!(f_mixed(half, three, i, j).unwrap().abs() < 1e-13);
            }
        }
    }

    #[test]
    fn grid_examples() {
        let g = build_grid(lam(0.5), 5, 5, Method::Quadrature).unwrap();
        assert!(close(g.get(0, 0), 0.5, 1e-14) && close(g.get(1, 1), 0.25, 1e-14));
        assert_eq!(g.get(0, 3), 0.0);
        let c = build_grid(lam(1.0), 12, 12, Method::Closed).unwrap();
        let q = build_grid(lam(1.0), 12, 12, Method::Quadrature).unwrap();
        for (i, j, v, _) in q.entries() {
            assert!((c.get(i, j) - v).abs() <= 1e-9 * v.abs().max(1e-6 / 4.0));
        }
    }
}
