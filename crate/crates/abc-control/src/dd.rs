//! Double-double arithmetic (~31 significant digits).
//!
//! The Mittag-Leffler Taylor series at moderately large negative
//! arguments cancels through terms as large as exp(|z|^(1/alpha));
//! plain f64 summation loses the result long before the asymptotic
//! expansion becomes usable. This module provides just enough
//! extended precision to bridge most of that range: Dekker/Knuth
//! error-free transforms, exp/ln, and a Stirling-based reciprocal
//! gamma. Everything is crate-internal.

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const LN2: Dd = Dd {
        hi: 0.6931471805599453,
        lo: 2.3190468138462996e-17,
    };
    pub const HALF_LN_2PI: Dd = Dd {
        hi: 0.9189385332046728,
        lo: -3.8782941580672414e-17,
    };

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Dd {
        Dd { hi, lo }
    }

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Dd {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            self.neg()
        } else {
            self
        }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s2, e2) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s2, e2 + f);
        Dd::new(hi, lo)
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn add_f64(self, other: f64) -> Dd {
        let (s, e) = two_sum(self.hi, other);
        let (hi, lo) = quick_two_sum(s, e + self.lo);
        Dd::new(hi, lo)
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + (self.hi * other.lo + self.lo * other.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd::new(hi, lo)
    }

    #[inline]
    pub fn mul_f64(self, other: f64) -> Dd {
        let (p, e) = two_prod(self.hi, other);
        let e = e + self.lo * other;
        let (hi, lo) = quick_two_sum(p, e);
        Dd::new(hi, lo)
    }

    #[inline]
    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul_f64(q1));
        let q2 = r.hi / other.hi;
        let r2 = r.sub(other.mul_f64(q2));
        let q3 = r2.hi / other.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd::new(s, e).add_f64(q3)
    }

    #[inline]
    pub fn recip(self) -> Dd {
        Dd::ONE.div(self)
    }

    #[inline]
    pub fn ldexp(self, e: i32) -> Dd {
        let f = pow2(e);
        Dd::new(self.hi * f, self.lo * f)
    }

    /// exp(self); |self| must stay below ~690 so 2^n scaling is finite.
    pub fn exp(self) -> Dd {
        if self.hi > 690.0 {
            return Dd::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let n = (self.hi / std::f64::consts::LN_2).round();
        let r = self.sub(Dd::LN2.mul_f64(n));
        // |r| <= ln2/2; 26 Taylor terms reach ~1e-38
        let mut sum = Dd::ONE;
        let mut term = Dd::ONE;
        for k in 1..=26 {
            term = term.mul(r).div(Dd::from_f64(k as f64));
            sum = sum.add(term);
        }
        sum.ldexp(n as i32)
    }

    /// ln(self) for self > 0.
    pub fn ln(self) -> Dd {
        debug_assert!(self.hi > 0.0);
        // scale into [1/sqrt(2), sqrt(2))
        let e = (self.hi.log2() + 0.5).floor() as i32;
        let m = self.ldexp(-e);
        // atanh series: ln m = 2 atanh((m-1)/(m+1)), |u| <= 0.1716
        let u = m.add_f64(-1.0).div(m.add_f64(1.0));
        let u2 = u.mul(u);
        let mut sum = Dd::ZERO;
        let mut p = u;
        for k in 0..24 {
            sum = sum.add(p.div(Dd::from_f64((2 * k + 1) as f64)));
            p = p.mul(u2);
        }
        sum.mul_f64(2.0).add(Dd::LN2.mul_f64(e as f64))
    }
}

#[inline]
fn pow2(e: i32) -> f64 {
    // exact powers of two, |e| can exceed the single-powi range
    if (-1022..=1023).contains(&e) {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else if e > 1023 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Stirling coefficients B_{2n} / (2n (2n-1)) as exact ratios.
const STIRLING_NUM_DEN: [(f64, f64); 13] = [
    (1.0, 12.0),
    (-1.0, 360.0),
    (1.0, 1260.0),
    (-1.0, 1680.0),
    (1.0, 1188.0),
    (-691.0, 360360.0),
    (1.0, 156.0),
    (-3617.0, 122400.0),
    (43867.0, 244188.0),
    (-174611.0, 125400.0),
    (854513.0, 63756.0),
    (-236364091.0, 1507080.0),
    (8553103.0, 3900.0),
];

const STIRLING_MIN: f64 = 32.0;

/// ln Γ(y) for y >= 32 via the Stirling series, ~1e-31 absolute.
pub(crate) fn lgamma_dd(y: Dd) -> Dd {
    debug_assert!(y.hi >= STIRLING_MIN);
    let ln_y = y.ln();
    let mut acc = y.add_f64(-0.5).mul(ln_y).sub(y).add(Dd::HALF_LN_2PI);
    let u = y.recip();
    let u2 = u.mul(u);
    let mut p = u;
    for &(num, den) in STIRLING_NUM_DEN.iter() {
        acc = acc.add(p.mul_f64(num).div(Dd::from_f64(den)));
        p = p.mul(u2);
    }
    acc
}

/// 1/Γ(x) in double-double for any real x with x <= ~170.
///
/// Downward recurrence 1/Γ(x) = (x)(x+1)...(x+m-1)/Γ(x+m) walks through
/// the poles without a reflection formula: a zero factor lands exactly
/// on them. Takes the argument in double-double because series callers
/// build αk+β beyond f64 exactness.
pub(crate) fn rgamma_dd(x: Dd) -> Dd {
    let m = if x.hi < STIRLING_MIN {
        (STIRLING_MIN - x.hi).ceil() as i64
    } else {
        0
    };
    let mut prod = Dd::ONE;
    for i in 0..m {
        prod = prod.mul(x.add_f64(i as f64));
    }
    if prod == Dd::ZERO {
        return Dd::ZERO;
    }
    prod.mul(lgamma_dd(x.add_f64(m as f64)).neg().exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: Dd, tol: f64) -> bool {
        let d = a.sub(b);
        let scale = b.abs().hi.max(1e-300);
        (d.hi / scale).abs() < tol
    }

    #[test]
    fn arithmetic_identities() {
        // dd keeps what f64 addition drops
        let a = Dd::from_f64(1e20).add_f64(1.0).add_f64(-1e20);
        assert_eq!(a.to_f64(), 1.0);
        // f64(0.1) + f64(0.2) differs from f64(0.3) by exactly 2^-55 + ...,
        // and dd resolves the difference instead of flushing it
        let d = Dd::from_f64(0.1).add(Dd::from_f64(0.2)).sub(Dd::from_f64(0.3));
        assert!((d.hi - 2.7755575615628914e-17).abs() < 1e-32);
        let c = Dd::from_f64(std::f64::consts::PI);
        assert!(close(c.mul(c.recip()), Dd::ONE, 1e-30));
        assert!(close(c.div(c), Dd::ONE, 1e-30));
    }

    #[test]
    fn exp_ln_reference_values() {
        assert!(close(
            Dd::from_f64(-10.25).exp(),
            Dd::new(3.535750085040998e-05, 1.323159849324113e-21),
            1e-29
        ));
        assert!(close(
            Dd::from_f64(3.5).exp(),
            Dd::new(33.11545195869231, 2.2435601403927554e-15),
            1e-29
        ));
        assert!(close(Dd::from_f64(2.0).ln(), Dd::LN2, 1e-30));
        assert!(close(
            Dd::from_f64(1e-3).ln(),
            Dd::new(-6.907755278982137, -2.1613487097372872e-16),
            1e-29
        ));
        assert!(close(
            Dd::from_f64(12345.678).ln(),
            Dd::new(9.421061321291832, -1.9085650743481053e-16),
            1e-29
        ));
        // round trip
        let x = Dd::from_f64(123.456);
        assert!(close(x.ln().exp(), x, 1e-29));
    }

    #[test]
    fn rgamma_reference_values() {
        let cases = [
            (10.0, Dd::new(2.7557319223985893e-06, -1.858393274046472e-22)),
            (0.5, Dd::new(0.5641895835477563, 7.66772980658294e-18)),
            (-0.5, Dd::new(-0.28209479177387814, -3.83386490329147e-18)),
            (4.2, Dd::new(0.12892097787148865, -8.407576323793908e-18)),
            (37.7, Dd::new(2.1525529803878727e-43, -1.7933406226701679e-59)),
            (140.25, Dd::new(3.0253598074357675e-240, 1.488663740812431e-256)),
        ];
        for (x, want) in cases {
            let got = rgamma_dd(Dd::from_f64(x));
            assert!(close(got, want, 1e-28), "rgamma_dd({x}) = {got:?}, want {want:?}");
        }
    }

    #[test]
    fn rgamma_poles_are_exact_zeros() {
        assert_eq!(rgamma_dd(Dd::from_f64(0.0)), Dd::ZERO);
        assert_eq!(rgamma_dd(Dd::from_f64(-1.0)), Dd::ZERO);
        assert_eq!(rgamma_dd(Dd::from_f64(-15.0)), Dd::ZERO);
    }
}
