//! Exact arithmetic for quadratic surds `(a + b sqrt(n)) / c`.
//!
//! Comparisons against rationals and between same-field surds are decided
//! by sign analysis and squaring; floors use dyadic refinement of
//! `sqrt(n)` with exact integer square roots. Values that are secretly
//! rational (perfect-square radicand, or `b = 0`) collapse to a canonical
//! rational form on construction, so the irrational branches below always
//! terminate.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::geometry::Scalar;

/// `(a + b sqrt(n)) / c` with integer parts, `c > 0`, radicand
/// canonicalised (small square factors extracted, perfect squares folded
/// into the rational part, `b = 0` iff the value is rational).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadSurd {
    a: BigInt,
    b: BigInt,
    n: BigInt,
    c: BigInt,
}

impl QuadSurd {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        n: impl Into<BigInt>,
        c: impl Into<BigInt>,
    ) -> Result<Self> {
        let (a, mut b, mut n, c) = (a.into(), b.into(), n.into(), c.into());
        if c.is_zero() {
            return Err(Error::invalid("surd denominator must be nonzero"));
        }
        if n.is_negative() {
            return Err(Error::invalid("surd radicand must be nonnegative"));
        }
        if !n.is_zero() && !b.is_zero() {
            // Extract small square factors so equal values share a form.
            let mut f = BigInt::from(2);
            let limit = BigInt::from(1000);
            while &f <= &limit {
                let f2 = &f * &f;
                while (&n % &f2).is_zero() {
                    n /= &f2;
                    b *= &f;
                }
                f += 1;
            }
            // A perfect-square remainder folds into the rational part.
            let root = n.sqrt();
            if &root * &root == n {
                return Ok(QuadSurd::rational_parts(a + b * root, c));
            }
            if n.is_one() {
                return Ok(QuadSurd::rational_parts(a + b, c));
            }
        }
        if b.is_zero() || n.is_zero() {
            return Ok(QuadSurd::rational_parts(a, c));
        }
        let mut s = QuadSurd { a, b, n, c };
        s.reduce();
        Ok(s)
    }

    fn rational_parts(a: BigInt, c: BigInt) -> Self {
        let mut s = QuadSurd { a, b: BigInt::zero(), n: BigInt::zero(), c };
        s.reduce();
        s
    }

    pub fn from_rational(r: &Scalar) -> Self {
        QuadSurd::rational_parts(r.numer().clone(), r.denom().clone())
    }

    fn reduce(&mut self) {
        if self.c.is_negative() {
            self.a = -&self.a;
            self.b = -&self.b;
            self.c = -&self.c;
        }
        let g = self.a.gcd(&self.b).gcd(&self.c);
        if !g.is_one() && !g.is_zero() {
            self.a /= &g;
            self.b /= &g;
            self.c /= &g;
        }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn to_rational(&self) -> Option<Scalar> {
        self.is_rational()
            .then(|| Scalar::new(self.a.clone(), self.c.clone()).expect("c nonzero"))
    }

    pub fn neg(&self) -> Self {
        QuadSurd { a: -&self.a, b: -&self.b, n: self.n.clone(), c: self.c.clone() }
    }

    pub fn add_rational(&self, r: &Scalar) -> Self {
        // (a + b sqrt(n))/c + u/v = ((av + uc) + bv sqrt(n)) / cv
        let (u, v) = (r.numer(), r.denom());
        let mut s = QuadSurd {
            a: &self.a * v + u * &self.c,
            b: &self.b * v,
            n: self.n.clone(),
            c: &self.c * v,
        };
        s.reduce();
        s
    }

    pub fn sub_rational(&self, r: &Scalar) -> Self {
        self.add_rational(&-r)
    }

    pub fn mul_int(&self, k: &BigInt) -> Self {
        if k.is_zero() {
            return QuadSurd::rational_parts(BigInt::zero(), BigInt::one());
        }
        let mut s = QuadSurd {
            a: &self.a * k,
            b: &self.b * k,
            n: self.n.clone(),
            c: self.c.clone(),
        };
        s.reduce();
        s
    }

    pub fn mul_rational(&self, r: &Scalar) -> Self {
        if r.is_zero() {
            return QuadSurd::rational_parts(BigInt::zero(), BigInt::one());
        }
        let mut s = QuadSurd {
            a: &self.a * r.numer(),
            b: &self.b * r.numer(),
            n: self.n.clone(),
            c: &self.c * r.denom(),
        };
        s.reduce();
        s
    }

    /// Product with a surd over the same radicand (either side may be
    /// rational). Errors on mismatched radicands.
    pub fn mul_same_field(&self, other: &QuadSurd) -> Result<Self> {
        if !self.b.is_zero() && !other.b.is_zero() && self.n != other.n {
            return Err(Error::invalid(format!(
                "surd radicands differ: {} vs {}",
                self.n, other.n
            )));
        }
        let n = if self.b.is_zero() { other.n.clone() } else { self.n.clone() };
        let a = &self.a * &other.a + &self.b * &other.b * &n;
        let b = &self.a * &other.b + &self.b * &other.a;
        if b.is_zero() {
            return Ok(QuadSurd::rational_parts(a, &self.c * &other.c));
        }
        let mut s = QuadSurd { a, b, n, c: &self.c * &other.c };
        s.reduce();
        Ok(s)
    }

    pub fn square(&self) -> Self {
        self.mul_same_field(self).expect("same radicand")
    }

    pub fn add_same_field(&self, other: &QuadSurd) -> Result<Self> {
        if !self.b.is_zero() && !other.b.is_zero() && self.n != other.n {
            return Err(Error::invalid(format!(
                "surd radicands differ: {} vs {}",
                self.n, other.n
            )));
        }
        let n = if self.b.is_zero() { other.n.clone() } else { self.n.clone() };
        let a = &self.a * &other.c + &other.a * &self.c;
        let b = &self.b * &other.c + &other.b * &self.c;
        if b.is_zero() {
            return Ok(QuadSurd::rational_parts(a, &self.c * &other.c));
        }
        let mut s = QuadSurd { a, b, n, c: &self.c * &other.c };
        s.reduce();
        Ok(s)
    }

    /// Exact sign of the value.
    pub fn sign(&self) -> Ordering {
        // c > 0, so the sign is that of a + b sqrt(n).
        if self.b.is_zero() {
            return self.a.cmp(&BigInt::zero());
        }
        if self.a.is_zero() {
            return self.b.cmp(&BigInt::zero());
        }
        match (self.a.is_positive(), self.b.is_positive()) {
            (true, true) => Ordering::Greater,
            (false, false) => Ordering::Less,
            (true, false) => {
                // a > 0 > b: sign of a^2 - b^2 n
                let lhs = &self.a * &self.a;
                let rhs = &self.b * &self.b * &self.n;
                lhs.cmp(&rhs)
            }
            (false, true) => {
                // a < 0 < b: sign of b^2 n - a^2
                let lhs = &self.b * &self.b * &self.n;
                let rhs = &self.a * &self.a;
                lhs.cmp(&rhs)
            }
        }
    }

    /// Exact comparison against a rational.
    pub fn cmp_rational(&self, r: &Scalar) -> Ordering {
        self.sub_rational(r).sign()
    }

    /// Exact comparison against a same-field surd.
    pub fn cmp_same_field(&self, other: &QuadSurd) -> Result<Ordering> {
        Ok(self.add_same_field(&other.neg())?.sign())
    }

    pub fn abs(&self) -> Self {
        if self.sign() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Exact floor via dyadic refinement of `sqrt(n)`. Terminates because
    /// irrational values (the only ones reaching the refinement loop)
    /// never sit on an integer.
    pub fn floor(&self) -> BigInt {
        if self.b.is_zero() {
            return Scalar::new(self.a.clone(), self.c.clone()).expect("c > 0").floor_int();
        }
        let mut bits = 16u32;
        loop {
            let (lo, hi) = self.dyadic_bounds(bits);
            let flo = lo.floor_int();
            let fhi = hi.floor_int();
            if flo == fhi {
                return flo;
            }
            bits *= 2;
        }
    }

    /// Rational bracket `lo <= value <= hi` with `hi - lo <= |b|/(c 2^bits)`.
    pub fn dyadic_bounds(&self, bits: u32) -> (Scalar, Scalar) {
        if self.b.is_zero() {
            let v = Scalar::new(self.a.clone(), self.c.clone()).expect("c > 0");
            return (v.clone(), v);
        }
        // sqrt(n) in [s/2^bits, (s+1)/2^bits] with s = isqrt(n 4^bits).
        let scaled = &self.n << (2 * bits);
        let s = scaled.sqrt();
        let pow = BigInt::one() << bits;
        let root_lo = Scalar::new(s.clone(), pow.clone()).expect("pow > 0");
        let root_hi = Scalar::new(s + 1, pow).expect("pow > 0");
        let a = Scalar::from_integer(self.a.clone());
        let b = Scalar::from_integer(self.b.clone());
        let c = Scalar::from_integer(self.c.clone());
        let v1 = (&a + &(&b * &root_lo)) / &c;
        let v2 = (&a + &(&b * &root_hi)) / &c;
        if v1 <= v2 {
            (v1, v2)
        } else {
            (v2, v1)
        }
    }

    pub fn to_f64(&self) -> f64 {
        let n = self.n.to_f64().unwrap_or(f64::NAN);
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        let c = self.c.to_f64().unwrap_or(f64::NAN);
        (a + b * n.sqrt()) / c
    }

    /// PQa-form components `(P, D, Q)` with value `(P + sqrt(D)) / Q`,
    /// for the continued-fraction recurrence. Requires an irrational value.
    pub(crate) fn pqa_parts(&self) -> (BigInt, BigInt, BigInt) {
        debug_assert!(!self.b.is_zero());
        let d = &self.b * &self.b * &self.n;
        if self.b.is_positive() {
            (self.a.clone(), d, self.c.clone())
        } else {
            // (a - sqrt(D))/c = (-a + sqrt(D))/(-c)
            (-&self.a, d, -&self.c)
        }
    }
}

impl fmt::Display for QuadSurd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}/{}", self.a, self.c)
        } else {
            write!(f, "({} + {}*sqrt({}))/{}", self.a, self.b, self.n, self.c)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::rat;

    fn sqrt2() -> QuadSurd {
        QuadSurd::new(0, 1, 2, 1).unwrap()
    }

    fn golden() -> QuadSurd {
        QuadSurd::new(1, 1, 5, 2).unwrap()
    }

    #[test]
    fn perfect_square_folds_to_rational() {
        let s = QuadSurd::new(1, 3, 4, 2).unwrap(); // (1 + 3*2)/2 = 7/2
        assert!(s.is_rational());
        assert_eq!(s.to_rational().unwrap(), rat(7, 2));
    }

    #[test]
    fn square_factor_extraction() {
        let a = QuadSurd::new(0, 1, 8, 1).unwrap(); // sqrt(8) = 2 sqrt(2)
        let b = QuadSurd::new(0, 2, 2, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sign_and_rational_comparison() {
        let s = sqrt2();
        assert_eq!(s.cmp_rational(&rat(7, 5)), Ordering::Greater); // 1.4 < sqrt2
        assert_eq!(s.cmp_rational(&rat(3, 2)), Ordering::Less);
        assert_eq!(s.cmp_rational(&rat(-1, 1)), Ordering::Greater);
        let neg = s.neg();
        assert_eq!(neg.sign(), Ordering::Less);
        assert_eq!(neg.cmp_rational(&rat(-3, 2)), Ordering::Greater);
        // Exact equality through a hidden square: sqrt(4)/2 = 1.
        let one = QuadSurd::new(0, 1, 4, 2).unwrap();
        assert_eq!(one.cmp_rational(&rat(1, 1)), Ordering::Equal);
    }

    #[test]
    fn floors() {
        assert_eq!(sqrt2().floor(), BigInt::from(1));
        assert_eq!(sqrt2().neg().floor(), BigInt::from(-2));
        assert_eq!(golden().floor(), BigInt::from(1));
        assert_eq!(golden().mul_int(&BigInt::from(10)).floor(), BigInt::from(16)); // 16.18
        assert_eq!(QuadSurd::new(7, 0, 0, 2).unwrap().floor(), BigInt::from(3));
    }

    #[test]
    fn arithmetic() {
        // golden^2 = golden + 1
        let g = golden();
        let lhs = g.square();
        let rhs = g.add_rational(&rat(1, 1));
        assert_eq!(lhs.cmp_same_field(&rhs).unwrap(), Ordering::Equal);
        assert_eq!(lhs, rhs);
        // (sqrt2)^2 = 2
        assert_eq!(sqrt2().square().to_rational().unwrap(), rat(2, 1));
        // (1 - sqrt2)(1 + sqrt2) = -1
        let m = QuadSurd::new(1, -1, 2, 1)
            .unwrap()
            .mul_same_field(&QuadSurd::new(1, 1, 2, 1).unwrap())
            .unwrap();
        assert_eq!(m.to_rational().unwrap(), rat(-1, 1));
    }

    #[test]
    fn mismatched_fields_rejected() {
        let s2 = sqrt2();
        let s3 = QuadSurd::new(0, 1, 3, 1).unwrap();
        assert!(s2.mul_same_field(&s3).is_err());
        assert!(s2.add_same_field(&s3).is_err());
        // Rational operands are compatible with any field.
        let r = QuadSurd::from_rational(&rat(1, 2));
        assert!(s2.mul_same_field(&r).is_ok());
        assert!(r.mul_same_field(&s3).is_ok());
    }

    #[test]
    fn dyadic_bounds_bracket() {
        let s = sqrt2();
        let (lo, hi) = s.dyadic_bounds(40);
        assert_eq!(s.cmp_rational(&lo), Ordering::Greater);
        assert_eq!(s.cmp_rational(&hi), Ordering::Less);
        assert!((&hi - &lo) < rat(1, 1_000_000));
    }
}
