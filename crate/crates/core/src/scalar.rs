//! Exact scalars: Gaussian rationals `a + b·i` with `a, b ∈ ℚ`, plus the
//! Gaussian-integer helpers used by fraction-free elimination.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An element of ℚ(i). Both parts are kept in lowest terms with positive
/// denominators (guaranteed by `BigRational`).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn from_int(n: i64) -> Self {
        Self::new(BigRational::from_integer(n.into()), BigRational::zero())
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(
            BigRational::new(num.into(), den.into()),
            BigRational::zero(),
        )
    }

    pub fn from_parts(re: (i64, i64), im: (i64, i64)) -> Self {
        Self::new(
            BigRational::new(re.0.into(), re.1.into()),
            BigRational::new(im.0.into(), im.1.into()),
        )
    }

    pub fn i() -> Self {
        Self::new(BigRational::zero(), BigRational::one())
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -self.im.clone())
    }

    /// Squared modulus `re² + im²`.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self::new(&self.re / &n, -&self.im / &n))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }

    /// Least common multiple of the two denominators.
    pub fn denom_lcm(&self) -> BigInt {
        self.re.denom().lcm(self.im.denom())
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::new(BigRational::one(), BigRational::zero())
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<BigRational> for GaussianRational {
    fn from(r: BigRational) -> Self {
        Self::new(r, BigRational::zero())
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl<'a> Div<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn div(self, rhs: &GaussianRational) -> GaussianRational {
        self * &rhs.inv().expect("division by zero Gaussian rational")
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for GaussianRational {
            type Output = GaussianRational;
            fn $m(self, rhs: GaussianRational) -> GaussianRational {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl SubAssign<&GaussianRational> for GaussianRational {
    fn sub_assign(&mut self, rhs: &GaussianRational) {
        self.re -= &rhs.re;
        self.im -= &rhs.im;
    }
}

impl MulAssign<&GaussianRational> for GaussianRational {
    fn mul_assign(&mut self, rhs: &GaussianRational) {
        *self = &*self * rhs;
    }
}

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-self.re.clone(), -self.im.clone())
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

/// Formats in the polynomial text grammar: `3/2`, `-i`, `(1/2 - 3*i)`.
impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return fmt_rational(&self.re, f);
        }
        let im_abs = self.im.abs();
        let im_sign = if self.im.is_negative() { "-" } else { "" };
        let write_im = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
            if im_abs.is_one() {
                write!(f, "i")
            } else {
                fmt_rational(&im_abs, f)?;
                write!(f, "*i")
            }
        };
        if self.re.is_zero() {
            write!(f, "{im_sign}")?;
            return write_im(f);
        }
        write!(f, "(")?;
        fmt_rational(&self.re, f)?;
        write!(f, " {} ", if self.im.is_negative() { "-" } else { "+" })?;
        write_im(f)?;
        write!(f, ")")
    }
}

impl fmt::Debug for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Gaussian integer used as the working entry type of fraction-free elimination.
pub type GaussInt = num_complex::Complex<BigInt>;

/// Integer gcd of all real and imaginary parts (always non-negative).
pub fn gauss_content<'a>(values: impl IntoIterator<Item = &'a GaussInt>) -> BigInt {
    let mut g = BigInt::zero();
    for v in values {
        g = g.gcd(&v.re);
        g = g.gcd(&v.im);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Clears denominators of a sparse vector of Gaussian rationals, returning
/// Gaussian integers spanning the same line.
pub fn clear_denominators<K: Clone>(entries: &[(K, GaussianRational)]) -> Vec<(K, GaussInt)> {
    let mut l = BigInt::one();
    for (_, c) in entries {
        l = l.lcm(&c.denom_lcm());
    }
    let lr = BigRational::from_integer(l);
    entries
        .iter()
        .map(|(k, c)| {
            let re = (&c.re * &lr).to_integer();
            let im = (&c.im * &lr).to_integer();
            (k.clone(), GaussInt::new(re, im))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        let a = GaussianRational::from_parts((1, 2), (3, 1));
        let b = GaussianRational::from_parts((-2, 3), (1, 5));
        let prod = &a * &b;
        assert_eq!(&prod / &b, a);
        assert_eq!(&(&a + &b) - &b, a);
        assert_eq!(&GaussianRational::i() * &GaussianRational::i(), GaussianRational::from_int(-1));
        assert!(GaussianRational::zero().inv().is_none());
    }

    #[test]
    fn canonical_denominators() {
        let a = GaussianRational::from_parts((2, -4), (6, 3));
        assert_eq!(a.re, BigRational::new((-1).into(), 2.into()));
        assert!(a.re.denom().is_positive());
        assert_eq!(a.im, BigRational::from_integer(2.into()));
    }

    #[test]
    fn display_forms() {
        assert_eq!(GaussianRational::from_ratio(3, 2).to_string(), "3/2");
        assert_eq!((-GaussianRational::i()).to_string(), "-i");
        assert_eq!(
            GaussianRational::from_parts((1, 2), (-3, 1)).to_string(),
            "(1/2 - 3*i)"
        );
    }

    #[test]
    fn clearing_denominators() {
        let v = vec![
            (0usize, GaussianRational::from_ratio(1, 2)),
            (3, GaussianRational::from_parts((0, 1), (2, 3))),
        ];
        let w = clear_denominators(&v);
        assert_eq!(w[0].1, GaussInt::new(3.into(), 0.into()));
        assert_eq!(w[1].1, GaussInt::new(0.into(), 4.into()));
    }
}
