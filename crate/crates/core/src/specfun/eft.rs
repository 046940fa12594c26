//! Error-free transformations and the two extended formats built on them.

use core::ops::{Add, Div, Mul, Neg, Sub};

use super::SignedLog;

/// `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// `a * b = p + e` exactly (barring underflow).
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

/// Double-double value `hi + lo`, used for compensated accumulation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ExtendedReal {
    pub hi: f64,
    pub lo: f64,
}

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal { hi: 0.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        ExtendedReal { hi: x, lo: 0.0 }
    }

    fn normalized(hi: f64, lo: f64) -> Self {
        let (s, e) = two_sum(hi, lo);
        ExtendedReal { hi: s, lo: e }
    }

    pub fn add_f64(self, x: f64) -> Self {
        let (s, e) = two_sum(self.hi, x);
        Self::normalized(s, e + self.lo)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;
    fn add(self, rhs: ExtendedReal) -> ExtendedReal {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = two_sum(s, e + t);
        ExtendedReal::normalized(s, e + f)
    }
}

impl Neg for ExtendedReal {
    type Output = ExtendedReal;
    fn neg(self) -> ExtendedReal {
        ExtendedReal { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for ExtendedReal {
    type Output = ExtendedReal;
    fn sub(self, rhs: ExtendedReal) -> ExtendedReal {
        self + (-rhs)
    }
}

impl Mul for ExtendedReal {
    type Output = ExtendedReal;
    fn mul(self, rhs: ExtendedReal) -> ExtendedReal {
        let (p, e) = two_prod(self.hi, rhs.hi);
        ExtendedReal::normalized(p, e + self.hi * rhs.lo + self.lo * rhs.hi)
    }
}

/// Compensated sum of a sequence, in the order given.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter().fold(ExtendedReal::ZERO, ExtendedReal::add_f64).to_f64()
}

const LIMBS: usize = 4;
const SCRATCH: usize = 24;

/// Four-limb floating-point expansion, about 200 bits of precision.
///
/// Limbs are ordered by decreasing magnitude and their exact sum is the value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Expansion {
    limbs: [f64; LIMBS],
}

fn insertion_sort_by_abs(v: &mut [f64]) {
    for k in 1..v.len() {
        let x = v[k];
        let mut m = k;
        while m > 0 && v[m - 1].abs() > x.abs() {
            v[m] = v[m - 1];
            m -= 1;
        }
        v[m] = x;
    }
}

fn compact(v: &mut [f64], len: usize) -> usize {
    let mut w = 0;
    for r in 0..len {
        if v[r] != 0.0 {
            v[w] = v[r];
            w += 1;
        }
    }
    w
}

/// Turn an arbitrary list of terms into four limbs carrying their sum.
fn renormalize(buf: &mut [f64], len: usize) -> [f64; LIMBS] {
    let mut out = [0.0; LIMBS];
    let mut len = compact(buf, len);
    for limb in out.iter_mut() {
        if len == 0 {
            break;
        }
        let mut prev = f64::NAN;
        for _ in 0..8 {
            insertion_sort_by_abs(&mut buf[..len]);
            for k in 1..len {
                let (s, e) = two_sum(buf[k - 1], buf[k]);
                buf[k] = s;
                buf[k - 1] = e;
            }
            len = compact(buf, len);
            if len == 0 || buf[len - 1] == prev {
                break;
            }
            prev = buf[len - 1];
        }
        if len == 0 {
            break;
        }
        *limb = buf[len - 1];
        len -= 1;
    }
    out
}

impl Expansion {
    pub const ZERO: Expansion = Expansion { limbs: [0.0; LIMBS] };

    pub fn new(x: f64) -> Self {
        Expansion { limbs: [x, 0.0, 0.0, 0.0] }
    }

    /// Exact `a + b` for two doubles.
    pub fn sum_of(a: f64, b: f64) -> Self {
        let (s, e) = two_sum(a, b);
        Expansion { limbs: [s, e, 0.0, 0.0] }
    }

    pub fn limbs(&self) -> [f64; LIMBS] {
        self.limbs
    }

    pub fn hi(&self) -> f64 {
        self.limbs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.limbs[0] == 0.0
    }

    pub fn to_f64(&self) -> f64 {
        let mut s = 0.0;
        for &l in self.limbs.iter().rev() {
            s += l;
        }
        s
    }

    pub fn abs(self) -> Self {
        if self.limbs[0] < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Multiply by `2^e`, exact unless the range is exceeded.
    pub fn ldexp(self, e: i32) -> Self {
        let mut limbs = self.limbs;
        for l in limbs.iter_mut() {
            *l = libm::ldexp(*l, e);
        }
        Expansion { limbs }
    }

    /// Square root by Newton's iteration from the double estimate.
    pub fn sqrt(self) -> Self {
        let hi = self.limbs[0];
        assert!(hi >= 0.0, "square root of a negative expansion");
        if hi == 0.0 {
            return Expansion::ZERO;
        }
        let mut x = Expansion::new(libm::sqrt(hi));
        for _ in 0..3 {
            x = (x + self / x).ldexp(-1);
        }
        x
    }

    pub fn to_signed_log(&self) -> SignedLog {
        let hi = self.limbs[0];
        if hi == 0.0 {
            return SignedLog::ZERO;
        }
        let tail = (self.limbs[1] + self.limbs[2] + self.limbs[3]) / hi;
        SignedLog::new(if hi > 0.0 { 1 } else { -1 }, libm::log(hi.abs()) + libm::log1p(tail))
    }

    /// Product with a double.
    pub fn mul_f64(self, b: f64) -> Self {
        let mut buf = [0.0; SCRATCH];
        let mut n = 0;
        for &a in &self.limbs {
            let (p, e) = two_prod(a, b);
            buf[n] = p;
            buf[n + 1] = e;
            n += 2;
        }
        Expansion { limbs: renormalize(&mut buf, n) }
    }
}

impl From<f64> for Expansion {
    fn from(x: f64) -> Self {
        Expansion::new(x)
    }
}

impl Add for Expansion {
    type Output = Expansion;
    fn add(self, rhs: Expansion) -> Expansion {
        let mut buf = [0.0; SCRATCH];
        buf[..LIMBS].copy_from_slice(&self.limbs);
        buf[LIMBS..2 * LIMBS].copy_from_slice(&rhs.limbs);
        Expansion { limbs: renormalize(&mut buf, 2 * LIMBS) }
    }
}

impl Neg for Expansion {
    type Output = Expansion;
    fn neg(self) -> Expansion {
        let mut limbs = self.limbs;
        for l in limbs.iter_mut() {
            *l = -*l;
        }
        Expansion { limbs }
    }
}

impl Sub for Expansion {
    type Output = Expansion;
    fn sub(self, rhs: Expansion) -> Expansion {
        self + (-rhs)
    }
}

impl Mul for Expansion {
    type Output = Expansion;
    fn mul(self, rhs: Expansion) -> Expansion {
        let mut buf = [0.0; SCRATCH];
        let mut n = 0;
        for i in 0..LIMBS {
            for j in 0..LIMBS - i {
                let (p, e) = two_prod(self.limbs[i], rhs.limbs[j]);
                buf[n] = p;
                buf[n + 1] = e;
                n += 2;
            }
        }
        Expansion { limbs: renormalize(&mut buf, n) }
    }
}

impl Div for Expansion {
    type Output = Expansion;
    fn div(self, rhs: Expansion) -> Expansion {
        let d = rhs.limbs[0];
        assert!(d != 0.0, "division of an expansion by zero");
        let mut q = [0.0; LIMBS + 1];
        let mut r = self;
        for qk in q.iter_mut() {
            *qk = r.limbs[0] / d;
            r = r - rhs.mul_f64(*qk);
        }
        let mut buf = [0.0; SCRATCH];
        buf[..LIMBS + 1].copy_from_slice(&q);
        Expansion { limbs: renormalize(&mut buf, LIMBS + 1) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn expansion_sqrt() {
        let two = Expansion::new(2.0);
        let r = two.sqrt();
        assert!((r * r - two).to_f64().abs() < 1e-60);
        assert_eq!(Expansion::new(9.0).sqrt().to_f64(), 3.0);
        assert!(Expansion::ZERO.sqrt().is_zero());
    }

    #[test]
    fn two_sum_and_prod_are_exact() {
        let (s, e) = two_sum(1.0, 1e-20);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-20);
        let x = 1.0 + f64::EPSILON;
        let (p, e) = two_prod(x, x);
        assert_eq!(p, 1.0 + 2.0 * f64::EPSILON);
        assert_eq!(e, f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let terms = [1.0, 1e-16, 1e-16, -1.0];
        assert_eq!(compensated_sum(terms), 2e-16);
        let x = ExtendedReal::new(1.0).add_f64(1e-20);
        assert_eq!(x.lo, 1e-20);
    }

    #[test]
    fn tiny_offset_survives() {
        let tiny = libm::ldexp(1.0, -150);
        let x = Expansion::new(1.0) + Expansion::new(tiny);
        let d = x - Expansion::new(1.0);
        assert_eq!(d.to_f64(), tiny);
    }

    #[test]
    fn alternating_binomials_cancel_exactly() {
        let m = 100;
        let mut c = Expansion::new(1.0);
        let mut s = Expansion::ZERO;
        for k in 0..=m {
            s = if k % 2 == 0 { s + c } else { s - c };
            c = c * Expansion::new((m - k) as f64) / Expansion::new((k + 1) as f64);
        }
        assert!(s.is_zero(), "residual {:?}", s);
    }

    #[test]
    fn third_times_three() {
        let third = Expansion::new(1.0) / Expansion::new(3.0);
        let r = third * Expansion::new(3.0) - Expansion::new(1.0);
        assert!(r.to_f64().abs() < 1e-60);
    }

    proptest! {
        #[test]
        fn division_inverts_multiplication(a in -1e10..1e10f64, b in 0.1..1e3f64, c in -1.0..1.0f64) {
            prop_assume!(a.abs() > 1e-3);
            let x = Expansion::new(a) + Expansion::new(c * 1e-20);
            let y = Expansion::new(b) / Expansion::new(7.0);
            let back = (x * y) / y;
            let err = (back - x).to_f64().abs() / a.abs();
            prop_assert!(err < 1e-58, "err {}", err);
        }

        #[test]
        fn pair_product_matches_expansion(a in -1e3..1e3f64, b in -1e3..1e3f64) {
            let p = ExtendedReal::new(a) * ExtendedReal::new(b);
            let q = Expansion::new(a) * Expansion::new(b);
            prop_assert_eq!(p.hi + p.lo, q.to_f64());
        }
    }
}
