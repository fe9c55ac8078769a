//! Coefficient scalars shared by the exact and floating pipelines.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

pub type Rat = BigRational;
pub type CRat = Complex<Rat>;
pub type C64 = Complex<f64>;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from(BigInt::from(n))
}

pub fn crat_real(r: Rat) -> CRat {
    CRat::new(r, Rat::zero())
}

pub fn crat(re: Rat, im: Rat) -> CRat {
    CRat::new(re, im)
}

/// Conversion that survives numerators and denominators far beyond the
/// f64 range: rescale by a power of two until the integer quotient fits
/// in 64 bits, divide exactly, then restore the exponent.
pub fn rat_to_f64(r: &Rat) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let shift = r.numer().bits() as i64 - r.denom().bits() as i64 - 64;
    let (num, den) = if shift >= 0 {
        (r.numer().clone(), r.denom() << shift as u64)
    } else {
        (r.numer() << (-shift) as u64, r.denom().clone())
    };
    let quot = (num / den).to_f64().unwrap_or(f64::NAN);
    quot * 2f64.powi(shift.clamp(i32::MIN as i64, i32::MAX as i64) as i32)
}

pub fn crat_to_c64(c: &CRat) -> C64 {
    C64::new(rat_to_f64(&c.re), rat_to_f64(&c.im))
}

/// Coefficient ring abstraction: the polynomial layer is written once and
/// instantiated with exact complex rationals or complex doubles.
pub trait Coeff: Clone + PartialEq + std::fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn from_rat(r: &Rat) -> Self;
    fn to_c64(&self) -> C64;
    fn imag_one() -> Self;

    fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    /// Relative remainder tolerance accepted when dividing out the chart
    /// denominator; `None` demands exact divisibility.
    fn division_tol() -> Option<f64> {
        None
    }
}

impl Coeff for CRat {
    fn zero() -> Self {
        CRat::new(Rat::zero(), Rat::zero())
    }
    fn one() -> Self {
        CRat::new(rat_int(1), Rat::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn conj(&self) -> Self {
        CRat::new(self.re.clone(), -self.im.clone())
    }
    fn from_rat(r: &Rat) -> Self {
        CRat::new(r.clone(), Rat::zero())
    }
    fn to_c64(&self) -> C64 {
        crat_to_c64(self)
    }
    fn imag_one() -> Self {
        CRat::new(Rat::zero(), rat_int(1))
    }
}

impl Coeff for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn one() -> Self {
        C64::new(1.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        C64::new(self.re, -self.im)
    }
    fn from_rat(r: &Rat) -> Self {
        C64::new(rat_to_f64(r), 0.0)
    }
    fn to_c64(&self) -> C64 {
        *self
    }
    fn imag_one() -> Self {
        C64::new(0.0, 1.0)
    }
    fn division_tol() -> Option<f64> {
        Some(1e-12)
    }
}
