//! Hypergeometric sums with cancellation tracking.

use super::eft::{compensated_sum, Expansion, ExtendedReal};
use super::SignedLog;
use crate::error::{Error, Result};

/// Working precision for alternating sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Precision {
    /// Plain binary64.
    Standard,
    /// Four-limb expansion arithmetic (about 200 bits).
    Extended,
}

impl Precision {
    pub fn epsilon(self) -> f64 {
        match self {
            Precision::Standard => f64::EPSILON / 2.0,
            Precision::Extended => 6.2e-61,
        }
    }
}

/// Results are flagged when `condition * epsilon` exceeds this.
pub const RELIABILITY_THRESHOLD: f64 = 1e-10;

/// Value of a hypergeometric sum and its cancellation diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypValue {
    pub value: SignedLog,
    /// `Σ|term|`.
    pub abs_sum: SignedLog,
    /// `Σ|term| / |Σ term|`, infinite for an exactly vanishing sum.
    pub condition: f64,
    pub precision: Precision,
    pub reliable: bool,
}

impl HypValue {
    /// Bound on the absolute rounding error of `value`.
    pub fn error_bound(&self) -> SignedLog {
        self.abs_sum * SignedLog::from_real(self.precision.epsilon())
    }
}

const RESCALE_AT: f64 = 1e250;
const RESCALE_BITS: i32 = 800;

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == libm::floor(x)
}

fn check_poles(lower: &[f64], terms: usize) -> Result<()> {
    for &c in lower {
        if is_nonpositive_integer(c) && ((-c) as usize) < terms {
            return Err(Error::PoleInDenominator { index: (-c) as usize });
        }
    }
    Ok(())
}

fn finish(sum: SignedLog, abs_sum: SignedLog, precision: Precision) -> HypValue {
    let condition = if sum.is_zero() {
        f64::INFINITY
    } else {
        libm::exp(abs_sum.log_mag - sum.log_mag)
    };
    HypValue {
        value: sum,
        abs_sum,
        condition,
        precision,
        reliable: condition * precision.epsilon() <= RELIABILITY_THRESHOLD,
    }
}

/// Sum `Σ_k Π(upper)_k / (Π(lower)_k k!) z^k`.
///
/// With `limit = Some(n)` the sum stops after term `n`; otherwise it runs until
/// three consecutive terms are negligible.
fn series(
    upper: &[f64],
    lower: &[f64],
    z: f64,
    limit: Option<usize>,
    precision: Precision,
) -> Result<HypValue> {
    const MAX_TERMS: usize = 100_000;
    let eps = precision.epsilon();
    let ln_scale = RESCALE_BITS as f64 * core::f64::consts::LN_2;
    let mut scale_log = 0.0;
    let mut abs_sum = 0.0f64;
    let mut quiet = 0;
    let last = limit.unwrap_or(MAX_TERMS);

    match precision {
        Precision::Standard => {
            let mut term = 1.0f64;
            let mut acc = ExtendedReal::ZERO;
            let mut k = 0;
            loop {
                acc = acc.add_f64(term);
                abs_sum += term.abs();
                if k == last || term == 0.0 {
                    break;
                }
                if limit.is_none() {
                    if term.abs() <= eps * acc.to_f64().abs() {
                        quiet += 1;
                        if quiet >= 3 {
                            break;
                        }
                    } else {
                        quiet = 0;
                    }
                }
                let kf = k as f64;
                let mut r = z / (kf + 1.0);
                for &u in upper {
                    r *= u + kf;
                }
                for &l in lower {
                    r /= l + kf;
                }
                term *= r;
                if term.abs() > RESCALE_AT {
                    term = libm::ldexp(term, -RESCALE_BITS);
                    acc = ExtendedReal {
                        hi: libm::ldexp(acc.hi, -RESCALE_BITS),
                        lo: libm::ldexp(acc.lo, -RESCALE_BITS),
                    };
                    abs_sum = libm::ldexp(abs_sum, -RESCALE_BITS);
                    scale_log += ln_scale;
                }
                k += 1;
            }
            if limit.is_none() && quiet < 3 {
                return Err(Error::NoConvergence { what: "hypergeometric series", iterations: MAX_TERMS });
            }
            let mut s = SignedLog::from_real(acc.to_f64());
            let mut a = SignedLog::from_real(abs_sum);
            s.log_mag += scale_log;
            a.log_mag += scale_log;
            Ok(finish(s, a, precision))
        }
        Precision::Extended => {
            let zx = Expansion::new(z);
            let mut term = Expansion::new(1.0);
            let mut sum = Expansion::ZERO;
            let mut k = 0;
            loop {
                sum = sum + term;
                abs_sum += term.hi().abs();
                if k == last || term.is_zero() {
                    break;
                }
                if limit.is_none() {
                    if term.hi().abs() <= eps * sum.hi().abs() {
                        quiet += 1;
                        if quiet >= 3 {
                            break;
                        }
                    } else {
                        quiet = 0;
                    }
                }
                let kf = k as f64;
                let mut num = zx;
                for &u in upper {
                    num = num * Expansion::sum_of(u, kf);
                }
                let mut den = Expansion::new(kf + 1.0);
                for &l in lower {
                    den = den * Expansion::sum_of(l, kf);
                }
                term = term * num / den;
                if term.hi().abs() > RESCALE_AT {
                    term = term.ldexp(-RESCALE_BITS);
                    sum = sum.ldexp(-RESCALE_BITS);
                    abs_sum = libm::ldexp(abs_sum, -RESCALE_BITS);
                    scale_log += ln_scale;
                }
                k += 1;
            }
            if limit.is_none() && quiet < 3 {
                return Err(Error::NoConvergence { what: "hypergeometric series", iterations: MAX_TERMS });
            }
            let mut s = sum.to_signed_log();
            let mut a = SignedLog::from_real(abs_sum);
            s.log_mag += scale_log;
            a.log_mag += scale_log;
            Ok(finish(s, a, precision))
        }
    }
}

/// Terminating `pFq(-m, upper; lower; z)`.
pub fn hyp_terminating(
    m: usize,
    upper: &[f64],
    lower: &[f64],
    z: f64,
    precision: Precision,
) -> Result<HypValue> {
    check_poles(lower, m)?;
    let mut all = alloc::vec::Vec::with_capacity(upper.len() + 1);
    all.push(-(m as f64));
    all.extend_from_slice(upper);
    series(&all, lower, z, Some(m), precision)
}

/// Terminating `2F1(-m, b; c; z)`.
pub fn hyp2f1_terminating(m: usize, b: f64, c: f64, z: f64, precision: Precision) -> Result<HypValue> {
    hyp_terminating(m, &[b], &[c], z, precision)
}

/// Terminating `4F3(-m, num; den; z)`.
pub fn hyp4f3_terminating(
    m: usize,
    num: [f64; 3],
    den: [f64; 3],
    z: f64,
    precision: Precision,
) -> Result<HypValue> {
    hyp_terminating(m, &num, &den, z, precision)
}

/// `2F1(a, b; c; z)` for `|z| < 1`, terminating when `a` or `b` is a nonpositive integer.
pub fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64, precision: Precision) -> Result<HypValue> {
    if !(z.abs() < 1.0) {
        return Err(Error::Domain { what: "hyp2f1_series |z|", value: z });
    }
    let limit = [a, b]
        .iter()
        .filter(|&&p| is_nonpositive_integer(p))
        .map(|&p| (-p) as usize)
        .min();
    let check = limit.unwrap_or(usize::MAX / 2);
    for (k, _) in (0..check.min(1 << 20)).enumerate() {
        if c + k as f64 == 0.0 {
            return Err(Error::PoleInDenominator { index: k });
        }
    }
    series(&[a, b], &[c], z, limit, precision)
}

/// `2F1(a, b; c; -1)` accurate to about `tol`.
///
/// Evaluated through `2F1(a,b;c;-1) = 2^{-a} 2F1(a, c-b; c; 1/2)`, whose terms
/// decay geometrically.
pub fn hyp2f1_at_minus_one(a: f64, b: f64, c: f64, tol: f64) -> Result<f64> {
    const MAX_TERMS: usize = 1_000_000;
    if is_nonpositive_integer(c) {
        return Err(Error::PoleInDenominator { index: (-c) as usize });
    }
    let b2 = c - b;
    let mut term = 1.0f64;
    let mut terms = alloc::vec![1.0f64];
    let mut quiet = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        term *= (a + kf) * (b2 + kf) / ((c + kf) * (kf + 1.0)) * 0.5;
        terms.push(term);
        if term == 0.0 {
            return Ok(libm::exp2(-a) * compensated_sum(terms));
        }
        let s = compensated_sum(terms.iter().copied());
        if term.abs() < tol * s.abs() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(libm::exp2(-a) * s);
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NoConvergence { what: "2F1 at -1", iterations: MAX_TERMS })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::poch_signed;
    use proptest::prelude::*;

    fn val(h: Result<HypValue>) -> f64 {
        h.unwrap().value.to_real()
    }

    #[test]
    fn small_examples() {
        for p in [Precision::Standard, Precision::Extended] {
            assert_eq!(val(hyp2f1_terminating(0, 5.0, 3.0, 0.7, p)), 1.0);
            assert!((val(hyp2f1_terminating(1, 2.0, 2.0, 0.5, p)) - 0.5).abs() < 1e-15);
            assert!((val(hyp2f1_terminating(2, 1.0, 3.0, 1.0, p)) - 0.5).abs() < 1e-15);
            assert_eq!(val(hyp4f3_terminating(0, [1.0, 2.0, 3.0], [4.0, 5.0, 6.0], 1.0, p)), 1.0);
            let (a, b, c, d, e, f) = (0.3, 1.7, 2.2, 3.1, 0.9, 4.4);
            let got = val(hyp4f3_terminating(1, [a, b, c], [d, e, f], 1.0, p));
            assert!((got - (1.0 - a * b * c / (d * e * f))).abs() < 1e-15);
        }
    }

    #[test]
    fn pole_is_reported() {
        assert_eq!(
            hyp2f1_terminating(5, 1.0, -2.0, 0.5, Precision::Standard).unwrap_err(),
            Error::PoleInDenominator { index: 2 }
        );
        // the pole lies past the last term
        assert!(hyp2f1_terminating(2, 1.0, -2.0, 0.5, Precision::Standard).is_ok());
    }

    #[test]
    fn exact_zero_is_flagged() {
        let h = hyp2f1_terminating(2, 3.0, 2.0, 0.5, Precision::Standard).unwrap();
        assert!(h.value.is_zero());
        assert!(!h.reliable);
    }

    #[test]
    fn extended_resolves_heavy_cancellation() {
        // Chu–Vandermonde at z = 1 with terms near 1e25
        let (m, b, c) = (60usize, 60.3, 1.7);
        let exact = poch_signed(c - b, m) / poch_signed(c, m);
        let std = hyp2f1_terminating(m, b, c, 1.0, Precision::Standard).unwrap();
        assert!(!std.reliable);
        let ext = hyp2f1_terminating(m, b, c, 1.0, Precision::Extended).unwrap();
        assert!(ext.reliable);
        assert_eq!(ext.value.sign, exact.sign);
        assert!((ext.value.log_mag - exact.log_mag).abs() < 1e-13);
    }

    #[test]
    fn minus_one_examples() {
        assert_eq!(hyp2f1_at_minus_one(0.0, 7.0, 9.0, 1e-15).unwrap(), 1.0);
        let ln2 = hyp2f1_at_minus_one(1.0, 1.0, 2.0, 1e-16).unwrap();
        assert!((ln2 - core::f64::consts::LN_2).abs() < 1e-14);
    }

    /// Partial sums at z = -1 accelerated by repeated averaging.
    fn euler_averaged(a: f64, b: f64, c: f64) -> f64 {
        let mut partial = std::vec::Vec::new();
        let mut t = 1.0;
        let mut s = 0.0;
        for k in 0..400 {
            s += t;
            partial.push(s);
            let kf = k as f64;
            t *= -(a + kf) * (b + kf) / ((c + kf) * (kf + 1.0));
        }
        for _ in 0..200 {
            partial = partial.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        }
        *partial.last().unwrap()
    }

    #[test]
    fn minus_one_matches_direct_series() {
        for (a, b, c) in [(0.5, 2.0, 3.5), (0.25, 3.5, 4.75), (1.5, 5.0, 7.5), (-0.25, 2.5, 3.25)] {
            let got = hyp2f1_at_minus_one(a, b, c, 1e-15).unwrap();
            let want = euler_averaged(a, b, c);
            assert!((got - want).abs() < 1e-12, "({a},{b},{c}) {got} {want}");
        }
    }

    #[test]
    fn convergent_series_matches_terminating() {
        let a = hyp2f1_series(-4.0, 2.5, 1.5, 0.5, Precision::Standard).unwrap();
        let b = hyp2f1_terminating(4, 2.5, 1.5, 0.5, Precision::Standard).unwrap();
        assert_eq!(a.value, b.value);
        // 2F1(1,1;2;z) = -ln(1-z)/z
        let h = hyp2f1_series(1.0, 1.0, 2.0, 0.5, Precision::Extended).unwrap();
        assert!((h.value.to_real() - 2.0 * core::f64::consts::LN_2).abs() < 1e-15);
    }

    fn f(m: usize, b: f64, c: f64, z: f64) -> f64 {
        hyp2f1_terminating(m, b, c, z, Precision::Extended).unwrap().value.to_real()
    }

    proptest! {
        #[test]
        fn chu_vandermonde(m in 0usize..=30, b in -10.0..10.0f64, c in 0.5..12.0f64) {
            let got = hyp2f1_terminating(m, b, c, 1.0, Precision::Extended).unwrap().value;
            let want = poch_signed(c - b, m) / poch_signed(c, m);
            prop_assert_eq!(got.sign, want.sign);
            if want.sign != 0 {
                prop_assert!((got.log_mag - want.log_mag).abs() < 1e-12);
            }
        }

        #[test]
        fn contiguous_relation(m in 1usize..25, b in 0.5..30.0f64, c in 0.5..30.0f64) {
            let a = -(m as f64);
            let t1 = 2.0 * b * (c - a) * (b - a - 1.0) * f(m + 1, b + 1.0, c, 0.5);
            let t2 = (b - a) * (b + a - 1.0) * (2.0 * c - b - a - 1.0) * f(m, b, c, 0.5);
            let t3 = 2.0 * a * (b - c) * (b - a + 1.0) * f(m - 1, b - 1.0, c, 0.5);
            let scale = t1.abs().max(t2.abs()).max(t3.abs());
            prop_assert!((t1 - t2 - t3).abs() <= 1e-10 * scale);
        }

        #[test]
        fn pfaff_reflection(m in 0usize..20, b in 0.25..15.0f64, c in 0.25..15.0f64, z in 0.0..1.0f64) {
            let c2 = b - c - m as f64 + 1.0;
            // keep the reflected denominator away from its poles
            prop_assume!((0..m).all(|k| (c2 + k as f64).abs() > 1e-3));
            let lhs = f(m, b, c, z);
            let ratio = (poch_signed(c - b, m) / poch_signed(c, m)).to_real();
            let rhs = ratio * f(m, b, c2, 1.0 - z);
            let scale = lhs.abs().max(rhs.abs()).max(1e-300);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * scale, "{} {}", lhs, rhs);
        }
    }
}
