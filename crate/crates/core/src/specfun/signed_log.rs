use core::cmp::Ordering;
use core::ops::{Div, Mul, Neg};

/// A real number stored as a sign and the natural log of its magnitude.
///
/// Products and quotients never overflow; sums are supported but lose the
/// benefit once magnitudes differ wildly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedLog {
    pub sign: i8,
    pub log_mag: f64,
}

impl SignedLog {
    pub const ZERO: SignedLog = SignedLog { sign: 0, log_mag: f64::NEG_INFINITY };
    pub const ONE: SignedLog = SignedLog { sign: 1, log_mag: 0.0 };

    pub fn new(sign: i8, log_mag: f64) -> Self {
        if sign == 0 {
            Self::ZERO
        } else {
            SignedLog { sign: sign.signum(), log_mag }
        }
    }

    pub fn from_real(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else {
            SignedLog { sign: if x > 0.0 { 1 } else { -1 }, log_mag: libm::log(x.abs()) }
        }
    }

    /// `2^e` without rounding the exponent through `powf`.
    pub fn pow2(e: f64) -> Self {
        SignedLog { sign: 1, log_mag: e * core::f64::consts::LN_2 }
    }

    pub fn to_real(self) -> f64 {
        if self.sign == 0 {
            0.0
        } else {
            self.sign as f64 * libm::exp(self.log_mag)
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn abs(self) -> Self {
        if self.sign == 0 {
            self
        } else {
            SignedLog { sign: 1, log_mag: self.log_mag }
        }
    }

    pub fn recip(self) -> Self {
        assert!(self.sign != 0, "reciprocal of zero");
        SignedLog { sign: self.sign, log_mag: -self.log_mag }
    }

    /// Square root of a nonnegative value.
    pub fn sqrt(self) -> Self {
        assert!(self.sign >= 0, "square root of a negative SignedLog");
        if self.sign == 0 {
            self
        } else {
            SignedLog { sign: 1, log_mag: 0.5 * self.log_mag }
        }
    }

    pub fn powf(self, p: f64) -> Self {
        assert!(self.sign > 0, "real power of a nonpositive SignedLog");
        SignedLog { sign: 1, log_mag: p * self.log_mag }
    }

    /// Sum of two values, computed relative to the larger magnitude.
    pub fn add(self, other: Self) -> Self {
        if self.sign == 0 {
            return other;
        }
        if other.sign == 0 {
            return self;
        }
        let (big, small) = if self.log_mag >= other.log_mag { (self, other) } else { (other, self) };
        let r = libm::exp(small.log_mag - big.log_mag);
        let f = if big.sign == small.sign { 1.0 + r } else { 1.0 - r };
        if f == 0.0 {
            return Self::ZERO;
        }
        SignedLog { sign: big.sign, log_mag: big.log_mag + libm::log(f) }
    }

    /// Compare magnitudes.
    pub fn cmp_mag(self, other: Self) -> Ordering {
        match (self.sign == 0, other.sign == 0) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            _ => self.log_mag.partial_cmp(&other.log_mag).unwrap_or(Ordering::Equal),
        }
    }
}

impl Mul for SignedLog {
    type Output = SignedLog;
    fn mul(self, rhs: SignedLog) -> SignedLog {
        if self.sign == 0 || rhs.sign == 0 {
            return SignedLog::ZERO;
        }
        SignedLog { sign: self.sign * rhs.sign, log_mag: self.log_mag + rhs.log_mag }
    }
}

impl Div for SignedLog {
    type Output = SignedLog;
    fn div(self, rhs: SignedLog) -> SignedLog {
        self * rhs.recip()
    }
}

impl Neg for SignedLog {
    type Output = SignedLog;
    fn neg(self) -> SignedLog {
        SignedLog { sign: -self.sign, log_mag: self.log_mag }
    }
}

impl From<f64> for SignedLog {
    fn from(x: f64) -> Self {
        SignedLog::from_real(x)
    }
}
