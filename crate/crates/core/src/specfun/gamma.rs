use core::f64::consts::PI;

use super::SignedLog;
use crate::error::{Error, Result};

const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];

fn ln_gamma_lanczos(x: f64) -> f64 {
    let tmp = x + LANCZOS_G;
    let tmp = (x + 0.5) * libm::log(tmp) - tmp;
    let mut ser = 0.999_999_999_999_997_092;
    let mut y = x;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    tmp + libm::log(2.506_628_274_631_000_5 * ser / x)
}

/// Natural log of the Gamma function for positive arguments.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain { what: "ln_gamma", value: x });
    }
    if x == 1.0 || x == 2.0 {
        return Ok(0.0);
    }
    if x < 0.5 {
        // reflection: Γ(x)Γ(1−x) = π / sin(πx)
        return Ok(libm::log(PI / libm::sin(PI * x)) - ln_gamma_lanczos(1.0 - x));
    }
    Ok(ln_gamma_lanczos(x))
}

/// `Γ(x)` for positive `x` as a SignedLog (never overflows).
pub fn gamma_signed(x: f64) -> Result<SignedLog> {
    Ok(SignedLog::new(1, ln_gamma(x)?))
}

/// Pochhammer symbol `(a)_n = a(a+1)...(a+n-1)` in SignedLog form.
pub fn poch_signed(a: f64, n: usize) -> SignedLog {
    let mut sign: i8 = 1;
    let mut acc = 0.0;
    let mut prod = 1.0f64;
    for k in 0..n {
        let f = a + k as f64;
        if f == 0.0 {
            return SignedLog::ZERO;
        }
        prod *= f;
        if !(1e-200..=1e200).contains(&prod.abs()) {
            if prod < 0.0 {
                sign = -sign;
            }
            acc += libm::log(prod.abs());
            prod = 1.0;
        }
    }
    if prod < 0.0 {
        sign = -sign;
    }
    SignedLog::new(sign, acc + libm::log(prod.abs()))
}

/// `n!` in SignedLog form.
pub fn factorial_signed(n: usize) -> SignedLog {
    poch_signed(1.0, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn stirling(x: f64) -> f64 {
        let x2 = x * x;
        (x - 0.5) * libm::log(x) - x
            + 0.5 * libm::log(2.0 * PI)
            + (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * x2)) / x2) / x2) / x
    }

    #[test]
    fn small_values() {
        assert_eq!(ln_gamma(1.0).unwrap(), 0.0);
        assert_eq!(ln_gamma(2.0).unwrap(), 0.0);
        let half = ln_gamma(0.5).unwrap();
        assert!((half - 0.5 * libm::log(PI)).abs() < 1e-15);
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
    }

    /// Relative accuracy of `exp(got)` while the log is small enough for that to
    /// be representable, relative accuracy of the log itself beyond.
    fn within(got: f64, want: f64) -> bool {
        if want.abs() < 40.0 {
            (libm::exp(got - want) - 1.0).abs() < 1e-14
        } else {
            (got - want).abs() < 1e-14 * want.abs()
        }
    }

    #[test]
    fn gamma_at_integers_and_half_integers() {
        let mut fact = 1.0f64;
        for n in 1..30u32 {
            // Γ(n) = (n−1)!
            let g = ln_gamma(n as f64).unwrap();
            assert!(within(g, libm::log(fact)), "n={n}");
            // Γ(n+½) = (2n)!√π / (4^n n!) computed as a running product
            let mut h = PI.sqrt();
            for k in 0..n {
                h *= k as f64 + 0.5;
            }
            let g = ln_gamma(n as f64 + 0.5).unwrap();
            assert!(within(g, libm::log(h)), "n={n}+1/2");
            fact *= n as f64;
        }
    }

    #[test]
    fn large_arguments_against_stirling() {
        let mut x = 20.0;
        while x <= 1e4 {
            let got = ln_gamma(x).unwrap();
            let want = stirling(x);
            assert!((got - want).abs() <= 1e-14 * want.abs(), "x={x}");
            x *= 1.37;
        }
    }

    #[test]
    fn pochhammer_examples() {
        assert_eq!(poch_signed(7.3, 0), SignedLog::ONE);
        let p = poch_signed(1.0, 5);
        assert_eq!(p.sign, 1);
        assert!((p.log_mag - libm::log(120.0)).abs() < 1e-15);
        assert!(poch_signed(-3.0, 5).is_zero());
        let p = poch_signed(-3.0, 2);
        assert_eq!(p.sign, 1);
        assert!((p.log_mag - libm::log(6.0)).abs() < 1e-15);
        assert_eq!(poch_signed(-0.5, 3).sign, -1);
        assert_eq!(poch_signed(-2.5, 2).sign, 1);
    }

    #[test]
    fn pochhammer_survives_overflow() {
        let p = poch_signed(1.0, 3000);
        let want = ln_gamma(3001.0).unwrap();
        assert!((p.log_mag - want).abs() < 1e-13 * want);
    }

    proptest! {
        #[test]
        fn duplication_formula(x in 0.5..300.0f64) {
            // Γ(x)Γ(x+½) = 2^{1−2x} √π Γ(2x)
            let lhs = ln_gamma(x).unwrap() + ln_gamma(x + 0.5).unwrap();
            let rhs = (1.0 - 2.0 * x) * core::f64::consts::LN_2 + 0.5 * libm::log(PI) + ln_gamma(2.0 * x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-14 * lhs.abs().max(1.0));
        }

        #[test]
        fn recurrence(x in 0.01..1000.0f64) {
            let lhs = ln_gamma(x + 1.0).unwrap();
            let rhs = ln_gamma(x).unwrap() + libm::log(x);
            prop_assert!((lhs - rhs).abs() <= 2e-14 * lhs.abs().max(1.0));
        }

        #[test]
        fn poch_step(a in -20.0..20.0f64, n in 0usize..60) {
            let next = poch_signed(a, n + 1);
            let step = poch_signed(a, n) * SignedLog::from_real(a + n as f64);
            prop_assert_eq!(next.sign, step.sign);
            if next.sign != 0 {
                // summand scale: the log of each factor enters the total
                let scale: f64 = (0..=n).map(|k| libm::log((a + k as f64).abs()).abs()).sum::<f64>().max(1.0);
                prop_assert!((next.log_mag - step.log_mag).abs() <= 4.0 * f64::EPSILON * scale);
            }
        }
    }
}
