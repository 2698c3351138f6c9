//! Scalar abstraction shared by kernels, point sets and verification.
//!
//! Every quantity that the verification pipeline touches is either floating
//! point or exact. The exact scalar is a rational number optionally extended
//! by a single quadratic surd, i.e. values a + b*sqrt(d) with a, b rational
//! and d a fixed nonnegative integer. That covers every exact coordinate
//! system used by the constructions in this crate (rationals, and the
//! quadratic fields needed by the icosahedron, the tetrahedron and the
//! root-pair families), while floats cover everything else.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

/// Shorthand: the rational p/q.
pub fn br(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Shorthand: the rational v/1.
pub fn bri(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Common interface of f32/f64 and the exact scalar.
///
/// Arithmetic is by value; exact implementations clone internally. `EXACT`
/// selects between exact zero tests and tolerance tests throughout the
/// verification code.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
    + Sum<Self>
{
    const EXACT: bool;

    fn from_rational(r: &BigRational) -> Self;
    fn from_int(v: i64) -> Self;
    fn to_f64(&self) -> f64;

    /// Exact zero test when `EXACT`, |x| <= tol otherwise.
    fn is_zero_within(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.to_f64().abs() <= tol
        }
    }

    /// Total order on the represented real values.
    fn cmp_real(&self, other: &Self) -> Ordering;

    fn ratio(p: i64, q: i64) -> Self {
        Self::from_rational(&br(p, q))
    }

    fn powu(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self.clone();
        }
        acc
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        (self.clone() - other.clone()).is_zero_within(tol)
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_rational(r: &BigRational) -> Self {
                r.to_f64().unwrap_or(f64::NAN) as $t
            }
            fn from_int(v: i64) -> Self {
                v as $t
            }
            fn to_f64(&self) -> f64 {
                *self as f64
            }
            fn cmp_real(&self, other: &Self) -> Ordering {
                self.partial_cmp(other).expect("NaN in scalar comparison")
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// Exact scalar a + b*sqrt(d).
///
/// Canonical form: b == 0 implies d == 0, so plain rationals compare equal
/// regardless of how they were produced. Arithmetic between two values with
/// different nonzero d is a programming error and panics; point sets that
/// would need two distinct surds are constructed in float mode instead.
#[derive(Clone, Debug)]
pub struct Quad {
    a: BigRational,
    b: BigRational,
    d: i64,
}

impl Quad {
    pub fn new(a: BigRational, b: BigRational, d: i64) -> Self {
        assert!(d >= 0, "surd index must be nonnegative");
        let mut q = Quad { a, b, d };
        q.canonicalize();
        q
    }

    pub fn rational(a: BigRational) -> Self {
        Quad { a, b: BigRational::zero(), d: 0 }
    }

    pub fn int(v: i64) -> Self {
        Quad::rational(bri(v))
    }

    /// sqrt(d) as an exact value.
    pub fn sqrt(d: i64) -> Self {
        Quad::new(BigRational::zero(), BigRational::one(), d)
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.a
    }

    pub fn surd_part(&self) -> &BigRational {
        &self.b
    }

    pub fn surd_index(&self) -> i64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The value as a rational, when it is one.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.b.is_zero() {
            Some(&self.a)
        } else {
            None
        }
    }

    fn canonicalize(&mut self) {
        if self.b.is_zero() {
            self.d = 0;
        } else if self.d == 0 {
            // b*sqrt(0) = 0
            self.b = BigRational::zero();
        } else {
            // Pull square factors out of d so equal values share one form.
            let mut d = self.d;
            let mut f = 2i64;
            let mut square = 1i64;
            while f * f <= d {
                while d % (f * f) == 0 {
                    d /= f * f;
                    square *= f;
                }
                f += 1;
            }
            if square > 1 {
                self.b *= bri(square);
                self.d = d;
            }
            if self.d == 1 {
                self.a += std::mem::replace(&mut self.b, BigRational::zero());
                self.d = 0;
            }
        }
    }

    fn common_d(&self, other: &Self) -> i64 {
        match (self.d, other.d) {
            (0, d) | (d, 0) => d,
            (d1, d2) if d1 == d2 => d1,
            (d1, d2) => panic!("mixed quadratic extensions: sqrt({d1}) vs sqrt({d2})"),
        }
    }

    /// Exact sign of the represented real value: -1, 0 or +1.
    pub fn sign(&self) -> i32 {
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // a and b*sqrt(d) have opposite signs: compare a^2 with b^2 d.
        let a2 = (&self.a) * (&self.a);
        let b2d = (&self.b) * (&self.b) * bri(self.d);
        match a2.cmp(&b2d) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }
}

fn rational_sign(r: &BigRational) -> i32 {
    if r.is_zero() {
        0
    } else if r.is_positive() {
        1
    } else {
        -1
    }
}

impl PartialEq for Quad {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && self.d == other.d
    }
}

impl Eq for Quad {}

impl Hash for Quad {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.a.hash(state);
        self.b.hash(state);
        self.d.hash(state);
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*sqrt({})", self.b, self.d)
        } else {
            write!(f, "{}+{}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl Add for Quad {
    type Output = Quad;
    fn add(self, rhs: Quad) -> Quad {
        let d = self.common_d(&rhs);
        Quad::new(self.a + rhs.a, self.b + rhs.b, d)
    }
}

impl Sub for Quad {
    type Output = Quad;
    fn sub(self, rhs: Quad) -> Quad {
        self + (-rhs)
    }
}

impl Neg for Quad {
    type Output = Quad;
    fn neg(self) -> Quad {
        Quad { a: -self.a, b: -self.b, d: self.d }
    }
}

impl Mul for Quad {
    type Output = Quad;
    fn mul(self, rhs: Quad) -> Quad {
        let d = self.common_d(&rhs);
        let a = (&self.a) * (&rhs.a) + (&self.b) * (&rhs.b) * bri(d);
        let b = (&self.a) * (&rhs.b) + (&self.b) * (&rhs.a);
        Quad::new(a, b, d)
    }
}

impl Div for Quad {
    type Output = Quad;
    fn div(self, rhs: Quad) -> Quad {
        let d = self.common_d(&rhs);
        let norm = (&rhs.a) * (&rhs.a) - (&rhs.b) * (&rhs.b) * bri(d);
        assert!(!norm.is_zero(), "division by zero (or zero-norm element) in Q(sqrt({d}))");
        let conj = Quad { a: rhs.a.clone(), b: -rhs.b.clone(), d };
        let num = self * conj;
        Quad::new(num.a / &norm, num.b / &norm, d)
    }
}

impl Zero for Quad {
    fn zero() -> Self {
        Quad::rational(BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }
}

impl One for Quad {
    fn one() -> Self {
        Quad::rational(BigRational::one())
    }
}

impl Sum for Quad {
    fn sum<I: Iterator<Item = Quad>>(iter: I) -> Quad {
        iter.fold(Quad::zero(), |acc, x| acc + x)
    }
}

impl Scalar for Quad {
    const EXACT: bool = true;

    fn from_rational(r: &BigRational) -> Self {
        Quad::rational(r.clone())
    }
    fn from_int(v: i64) -> Self {
        Quad::int(v)
    }
    fn to_f64(&self) -> f64 {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        if self.b.is_zero() {
            a
        } else {
            a + self.b.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
        }
    }
    fn cmp_real(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        match (self.clone() - other.clone()).sign() {
            s if s < 0 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        }
    }
}

/// Exact conversion of an f64 into a rational (f64 values are dyadic).
pub fn f64_to_rational(x: f64) -> Option<BigRational> {
    BigRational::from_f64(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_field_ops() {
        let phi = Quad::new(br(1, 2), br(1, 2), 5); // golden ratio
        let phi2 = phi.clone() * phi.clone();
        // phi^2 = phi + 1
        assert_eq!(phi2, phi.clone() + Quad::int(1));
        let inv = Quad::int(1) / phi.clone();
        // 1/phi = phi - 1
        assert_eq!(inv, phi.clone() - Quad::int(1));
        assert_eq!(phi.sign(), 1);
        assert_eq!((-phi).sign(), -1);
    }

    #[test]
    fn quad_canonical_square_factor() {
        // sqrt(8) = 2 sqrt(2), sqrt(9) = 3
        assert_eq!(Quad::sqrt(8), Quad::int(2) * Quad::sqrt(2));
        assert_eq!(Quad::sqrt(9), Quad::int(3));
        assert_eq!(Quad::sqrt(1), Quad::int(1));
    }

    #[test]
    fn quad_sign_mixed_terms() {
        // 3 - sqrt(5) > 0, 2 - sqrt(5) < 0
        assert_eq!((Quad::int(3) - Quad::sqrt(5)).sign(), 1);
        assert_eq!((Quad::int(2) - Quad::sqrt(5)).sign(), -1);
        assert_eq!((Quad::sqrt(5) - Quad::sqrt(5)).sign(), 0);
    }

    #[test]
    #[should_panic(expected = "mixed quadratic extensions")]
    fn quad_mixed_surds_panic() {
        let _ = Quad::sqrt(2) + Quad::sqrt(3);
    }
}
