//! Scalar abstraction shared by every module.
//!
//! All definiteness and chamber decisions are made with [`Rational`]
//! (`BigRational`). The same code also runs over `Rational64`, `f64` and
//! `f32`; the floating instantiations are meant for sweeps and plotting,
//! where a rounding error only moves a curve by a pixel.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Numeric type the library computes over.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + Send
    + Sync
    + 'static
{
    /// Nearest representable value to an exact rational.
    fn from_rational(r: &BigRational) -> Self;

    fn to_f64_lossy(&self) -> f64;

    /// Exact rational value. Floats convert from their binary expansion;
    /// non-finite floats panic.
    fn to_rational(&self) -> BigRational;

    /// `true` when `+ - * /` never round.
    fn is_exact() -> bool;

    /// Zero test used for pivots and rank decisions. Exact types compare
    /// with zero; floats use an absolute cutoff.
    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("every scalar type represents small integers")
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    fn half() -> Self {
        Self::ratio(1, 2)
    }

    fn two() -> Self {
        Self::from_int(2)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

/// Scalars whose arithmetic never rounds. Definiteness certificates are
/// only issued over these.
pub trait ExactScalar: Scalar + Eq + Ord + std::hash::Hash {}

impl Scalar for BigRational {
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn to_f64_lossy(&self) -> f64 {
        ratio_to_f64(self)
    }
    fn to_rational(&self) -> BigRational {
        self.clone()
    }
    fn is_exact() -> bool {
        true
    }
}

impl ExactScalar for BigRational {}

impl Scalar for Rational64 {
    fn from_rational(r: &BigRational) -> Self {
        let n = r.numer().to_i64().expect("numerator overflows i64");
        let d = r.denom().to_i64().expect("denominator overflows i64");
        Rational64::new(n, d)
    }
    fn to_f64_lossy(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
    fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(*self.numer()), BigInt::from(*self.denom()))
    }
    fn is_exact() -> bool {
        true
    }
}

impl ExactScalar for Rational64 {}

impl Scalar for f64 {
    fn from_rational(r: &BigRational) -> Self {
        ratio_to_f64(r)
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_float(*self).expect("finite float")
    }
    fn is_exact() -> bool {
        false
    }
    fn is_negligible(&self) -> bool {
        self.abs() < 1e-12
    }
}

impl Scalar for f32 {
    fn from_rational(r: &BigRational) -> Self {
        ratio_to_f64(r) as f32
    }
    fn to_f64_lossy(&self) -> f64 {
        f64::from(*self)
    }
    fn to_rational(&self) -> BigRational {
        BigRational::from_float(*self).expect("finite float")
    }
    fn is_exact() -> bool {
        false
    }
    fn is_negligible(&self) -> bool {
        self.abs() < 1e-6
    }
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    // Shift huge numerators/denominators down before converting so that
    // neither side saturates to infinity on its own.
    let n = r.numer();
    let d = r.denom();
    let nb = n.bits() as i64;
    let db = d.bits() as i64;
    let shift = (nb.max(db) - 60).max(0);
    let ns: BigInt = n >> shift as usize;
    let ds: BigInt = d >> shift as usize;
    match (ns.to_f64(), ds.to_f64()) {
        (Some(a), Some(b)) if b != 0.0 => a / b,
        _ => n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN),
    }
}

/// Parses `"p/q"`, `"p"` or `"-p/q"` into an exact rational.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str_radix(num, 10).ok()?;
    let d = BigInt::from_str_radix(den, 10).ok()?;
    if d.is_zero() {
        return None;
    }
    Some(BigRational::new(n, d))
}

/// `x` rounded up to the nearest integer.
pub fn ceil_int<T: Scalar>(x: &T) -> BigInt {
    x.to_rational().ceil().to_integer()
}

/// `x` rounded down to the nearest integer.
pub fn floor_int<T: Scalar>(x: &T) -> BigInt {
    x.to_rational().floor().to_integer()
}

/// Value in `R ∪ {-∞}`; the codomain of a Le Potier function.
#[derive(Clone, Debug, PartialEq)]
pub enum Extended<T> {
    NegInfinity,
    Finite(T),
}

impl<T: Scalar> Extended<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::NegInfinity => None,
        }
    }

    pub fn is_neg_infinity(&self) -> bool {
        matches!(self, Extended::NegInfinity)
    }

    /// `self < x` for a finite `x`.
    pub fn lt_finite(&self, x: &T) -> bool {
        match self {
            Extended::NegInfinity => true,
            Extended::Finite(v) => v < x,
        }
    }

    /// `self <= x` for a finite `x`.
    pub fn le_finite(&self, x: &T) -> bool {
        match self {
            Extended::NegInfinity => true,
            Extended::Finite(v) => v <= x,
        }
    }

    pub fn max(self, other: Self) -> Self {
        match (self, other) {
            (Extended::NegInfinity, o) => o,
            (s, Extended::NegInfinity) => s,
            (Extended::Finite(a), Extended::Finite(b)) => Extended::Finite(T::max_of(a, b)),
        }
    }

    pub fn min_with(self, x: &T) -> Self {
        match self {
            Extended::NegInfinity => Extended::NegInfinity,
            Extended::Finite(v) => Extended::Finite(T::min_of(v, x.clone())),
        }
    }

    pub fn map<U>(&self, f: impl FnOnce(&T) -> U) -> Extended<U> {
        match self {
            Extended::NegInfinity => Extended::NegInfinity,
            Extended::Finite(v) => Extended::Finite(f(v)),
        }
    }
}

impl<T: Scalar> PartialOrd for Extended<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Extended::NegInfinity, Extended::NegInfinity) => Some(Ordering::Equal),
            (Extended::NegInfinity, _) => Some(Ordering::Less),
            (_, Extended::NegInfinity) => Some(Ordering::Greater),
            (Extended::Finite(a), Extended::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl<T: Display> Display for Extended<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInfinity => f.write_str("-inf"),
            Extended::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// Slope in `R ∪ {+∞}`; rank-zero classes have infinite slope.
#[derive(Clone, Debug, PartialEq)]
pub enum Slope<T> {
    Finite(T),
    PosInfinity,
}

impl<T> Slope<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            Slope::Finite(v) => Some(v),
            Slope::PosInfinity => None,
        }
    }
}

impl<T: Display> Display for Slope<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slope::PosInfinity => f.write_str("+inf"),
            Slope::Finite(v) => write!(f, "{v}"),
        }
    }
}
