//! Numerical Chern characters `(ch0, ch1, ch2)` in `Knum ⊗ Q ≅ Q ⊕ NS_Q ⊕ Q`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{check_len, Error, Result};
use crate::lattice::SurfaceModel;
use crate::scalar::{Scalar, Slope};
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct ChernCharacter<T: Scalar = Rational> {
    pub ch0: T,
    pub ch1: Vec<T>,
    pub ch2: T,
}

impl<T: Scalar> ChernCharacter<T> {
    pub fn new(ch0: T, ch1: Vec<T>, ch2: T) -> Self {
        ChernCharacter { ch0, ch1, ch2 }
    }

    pub fn zero(rho: usize) -> Self {
        Self::new(T::zero(), vec![T::zero(); rho], T::zero())
    }

    /// Class of a skyscraper sheaf.
    pub fn point(rho: usize) -> Self {
        Self::new(T::zero(), vec![T::zero(); rho], T::one())
    }

    /// Class of the structure sheaf.
    pub fn structure_sheaf(rho: usize) -> Self {
        Self::new(T::one(), vec![T::zero(); rho], T::zero())
    }

    pub fn rho(&self) -> usize {
        self.ch1.len()
    }

    /// Flat coordinates `[ch0, ch1..., ch2]`.
    pub fn to_vec(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(self.rho() + 2);
        v.push(self.ch0.clone());
        v.extend(self.ch1.iter().cloned());
        v.push(self.ch2.clone());
        v
    }

    pub fn from_slice(v: &[T]) -> Result<Self> {
        if v.len() < 2 {
            return Err(Error::Dimension {
                expected: 2,
                found: v.len(),
            });
        }
        let n = v.len();
        Ok(Self::new(
            v[0].clone(),
            v[1..n - 1].to_vec(),
            v[n - 1].clone(),
        ))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.ch0.clone() + other.ch0.clone(),
            self.ch1
                .iter()
                .zip(&other.ch1)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
            self.ch2.clone() + other.ch2.clone(),
        )
    }

    pub fn scale(&self, k: &T) -> Self {
        Self::new(
            self.ch0.clone() * k.clone(),
            self.ch1.iter().map(|a| a.clone() * k.clone()).collect(),
            self.ch2.clone() * k.clone(),
        )
    }

    pub fn neg(&self) -> Self {
        self.scale(&-T::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl<T: Scalar> fmt::Display for ChernCharacter<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, [", self.ch0)?;
        for (i, c) in self.ch1.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "], {})", self.ch2)
    }
}

impl<T: Scalar> ChernCharacter<T> {
    /// `ch0 ∈ Z`, `ch1 ∈ Z^ρ`, `ch2 ∈ (1/d)Z`.
    pub fn is_integral(&self, chtwo_denominator: u64) -> bool {
        let int = |x: &T| x.to_rational().is_integer();
        let d = Rational::from_integer(BigInt::from(chtwo_denominator));
        int(&self.ch0) && self.ch1.iter().all(int) && (self.ch2.to_rational() * d).is_integer()
    }

    pub fn cast<U: Scalar>(&self) -> ChernCharacter<U> {
        let c = |x: &T| U::from_rational(&x.to_rational());
        ChernCharacter::new(c(&self.ch0), self.ch1.iter().map(c).collect(), c(&self.ch2))
    }
}

impl<T: Scalar> SurfaceModel<T> {
    pub fn check_character(&self, v: &ChernCharacter<T>) -> Result<()> {
        check_len(self.rank(), v.rho())
    }

    /// `ch · e^{−B}`.
    pub fn twist(&self, v: &ChernCharacter<T>, b: &[T]) -> Result<ChernCharacter<T>> {
        self.check_character(v)?;
        let b_ch1 = self.intersect(b, &v.ch1)?;
        let b2 = self.square(b)?;
        Ok(ChernCharacter::new(
            v.ch0.clone(),
            v.ch1
                .iter()
                .zip(b)
                .map(|(c, bi)| c.clone() - bi.clone() * v.ch0.clone())
                .collect(),
            v.ch2.clone() - b_ch1 + T::half() * b2 * v.ch0.clone(),
        ))
    }

    /// `(H·ch1) / (H²·ch0)`, `+∞` for torsion classes.
    pub fn mu_h(&self, h: &[T], v: &ChernCharacter<T>) -> Result<Slope<T>> {
        self.require_ample(h)?;
        self.check_character(v)?;
        if v.ch0 < T::zero() {
            return Err(Error::NegativeRank);
        }
        if v.ch0.is_zero() {
            return Ok(Slope::PosInfinity);
        }
        let h2 = self.square(h)?;
        Ok(Slope::Finite(
            self.intersect(h, &v.ch1)? / (h2 * v.ch0.clone()),
        ))
    }

    /// `(ch2 − B·ch1) / (H²·ch0)`.
    pub fn nu_hb(&self, h: &[T], b: &[T], v: &ChernCharacter<T>) -> Result<T> {
        self.require_ample(h)?;
        self.check_character(v)?;
        if v.ch0.is_zero() {
            return Err(Error::ZeroRank);
        }
        let h2 = self.square(h)?;
        Ok((v.ch2.clone() - self.intersect(b, &v.ch1)?) / (h2 * v.ch0.clone()))
    }

    /// `ch1² − 2·ch0·ch2`.
    pub fn q_bg_value(&self, v: &ChernCharacter<T>) -> Result<T> {
        self.check_character(v)?;
        Ok(self.square(&v.ch1)? - T::two() * v.ch0.clone() * v.ch2.clone())
    }

    /// `ch(a ⊗ b)`, using that `ch` is multiplicative.
    pub fn chern_product(
        &self,
        a: &ChernCharacter<T>,
        b: &ChernCharacter<T>,
    ) -> Result<ChernCharacter<T>> {
        self.check_character(a)?;
        self.check_character(b)?;
        Ok(ChernCharacter::new(
            a.ch0.clone() * b.ch0.clone(),
            a.ch1
                .iter()
                .zip(&b.ch1)
                .map(|(x, y)| a.ch0.clone() * y.clone() + b.ch0.clone() * x.clone())
                .collect(),
            a.ch0.clone() * b.ch2.clone()
                + self.intersect(&a.ch1, &b.ch1)?
                + a.ch2.clone() * b.ch0.clone(),
        ))
    }
}

/// Finite box for [`SurfaceModel::enumerate_integral_characters`].
#[derive(Clone, Debug, PartialEq)]
pub struct EnumerationBounds {
    /// Ranks `1..=r_max`.
    pub r_max: u64,
    /// Inclusive integer range per NS coordinate.
    pub c1_box: Vec<(i64, i64)>,
    /// Inclusive rational range for ch2.
    pub ch2_range: (Rational, Rational),
    /// Maximum number of box candidates before refusing to start.
    pub cap: u64,
}

pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

impl EnumerationBounds {
    pub fn new(r_max: u64, c1_box: Vec<(i64, i64)>, ch2_range: (Rational, Rational)) -> Self {
        EnumerationBounds {
            r_max,
            c1_box,
            ch2_range,
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }

    /// Integer numerators `k` with `k/d` in the ch2 range.
    fn ch2_numerators(&self, d: u64) -> (BigInt, BigInt) {
        let d = Rational::from_integer(BigInt::from(d));
        let lo = (self.ch2_range.0.clone() * d.clone()).ceil().to_integer();
        let hi = (self.ch2_range.1.clone() * d).floor().to_integer();
        (lo, hi)
    }

    /// Size of the full box `ranks × c1 × ch2`, before any filtering.
    pub fn candidate_count(&self, d: u64) -> BigInt {
        let (lo, hi) = self.ch2_numerators(d);
        let ch2 = if hi < lo { BigInt::zero() } else { hi - lo + 1 };
        let c1 = self.c1_box.iter().fold(BigInt::one(), |acc, &(a, b)| {
            acc * BigInt::from(if b < a { 0 } else { b - a + 1 })
        });
        BigInt::from(self.r_max) * c1 * ch2
    }

    /// Number of `(ch0, ch1)` blocks; shards are ranges of block indices.
    pub fn block_count(&self) -> u64 {
        self.c1_box
            .iter()
            .map(|&(a, b)| if b < a { 0 } else { (b - a + 1) as u64 })
            .product::<u64>()
            * self.r_max
    }
}

/// Deterministic stream of integral BG-feasible characters, ordered by ch0,
/// then ch1 lexicographically, then ch2.
#[derive(Clone, Debug)]
pub struct IntegralCharacters<T: Scalar = Rational> {
    gram: crate::linalg::Matrix<T>,
    box_: Vec<(i64, i64)>,
    d: u64,
    ch2_lo: BigInt,
    ch2_hi: BigInt,
    c1_count: u64,
    block: u64,
    block_end: u64,
    current: Option<(u64, Vec<i64>, BigInt, BigInt)>,
}

impl<T: Scalar> SurfaceModel<T> {
    pub fn enumerate_integral_characters(
        &self,
        bounds: &EnumerationBounds,
    ) -> Result<IntegralCharacters<T>> {
        check_len(self.rank(), bounds.c1_box.len())?;
        let d = self.chtwo_denominator();
        let count = bounds.candidate_count(d);
        if count > BigInt::from(bounds.cap) {
            return Err(Error::Budget(format!(
                "enumeration box has {count} candidates, cap is {}",
                bounds.cap
            )));
        }
        let (ch2_lo, ch2_hi) = bounds.ch2_numerators(d);
        let blocks = bounds.block_count();
        Ok(IntegralCharacters {
            gram: self.gram().clone(),
            box_: bounds.c1_box.clone(),
            d,
            ch2_lo,
            ch2_hi,
            c1_count: blocks.checked_div(bounds.r_max).unwrap_or(0),
            block: 0,
            block_end: blocks,
            current: None,
        })
    }
}

impl<T: Scalar> IntegralCharacters<T> {
    /// Restricts the stream to blocks `start..end`. Disjoint ranges give
    /// disjoint outputs whose concatenation in range order is the full stream.
    pub fn blocks(mut self, start: u64, end: u64) -> Self {
        self.block = start.min(self.block_end);
        self.block_end = end.min(self.block_end);
        self.current = None;
        self
    }

    pub fn block_count(&self) -> u64 {
        self.block_end
    }

    fn decode(&self, block: u64) -> (u64, Vec<i64>) {
        let r = block / self.c1_count + 1;
        let mut rest = block % self.c1_count;
        let mut c1 = vec![0; self.box_.len()];
        for i in (0..self.box_.len()).rev() {
            let (a, b) = self.box_[i];
            let w = (b - a + 1) as u64;
            c1[i] = a + (rest % w) as i64;
            rest /= w;
        }
        (r, c1)
    }

    /// Loads the next block with a nonempty ch2 range.
    fn advance_block(&mut self) -> bool {
        while self.block < self.block_end {
            let (r, c1) = self.decode(self.block);
            self.block += 1;
            let c1q: Vec<T> = c1.iter().map(|&x| T::from_int(x)).collect();
            let c1sq = self.gram.bilinear(&c1q, &c1q).to_rational();
            // Q_BG ≥ 0  ⇔  ch2 ≤ ch1²/(2r), i.e. k ≤ d·ch1²/(2r)
            let bg = (c1sq * Rational::from_integer(BigInt::from(self.d))
                / Rational::from_integer(BigInt::from(2 * r)))
            .floor()
            .to_integer();
            let hi = bg.min(self.ch2_hi.clone());
            if hi >= self.ch2_lo {
                self.current = Some((r, c1, self.ch2_lo.clone(), hi));
                return true;
            }
        }
        false
    }
}

impl<T: Scalar> Iterator for IntegralCharacters<T> {
    type Item = ChernCharacter<T>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if let Some((r, c1, k, hi)) = &mut self.current {
                if *k <= *hi {
                    let ch2 = Rational::new(k.clone(), BigInt::from(self.d));
                    let v = ChernCharacter::new(
                        T::from_int(*r as i64),
                        c1.iter().map(|&x| T::from_int(x)).collect(),
                        T::from_rational(&ch2),
                    );
                    *k += 1;
                    return Some(v);
                }
            }
            self.current = None;
            if !self.advance_block() {
                return None;
            }
        }
    }
}

/// Least common multiple of the denominators of some rationals.
pub(crate) fn denominator_lcm<'a>(xs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{ch, product, q, qv, rank_one};

    #[test]
    fn twist_examples() {
        let s = rank_one();
        let v = ch(1, &[1], q(1, 1));
        assert_eq!(s.twist(&v, &qv(&[0])).unwrap(), v);
        assert_eq!(s.twist(&v, &qv(&[1])).unwrap(), ch(1, &[0], q(0, 1)));
        let b = vec![q(3, 7)];
        let back = s.twist(&s.twist(&v, &b).unwrap(), &[q(-3, 7)]).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn slope_examples() {
        let s = rank_one();
        let h = qv(&[1]);
        assert_eq!(
            s.mu_h(&h, &ch(1, &[1], q(1, 1))).unwrap(),
            Slope::Finite(q(1, 1))
        );
        assert_eq!(
            s.mu_h(&h, &ch(0, &[1], q(0, 1))).unwrap(),
            Slope::PosInfinity
        );
        assert_eq!(
            s.mu_h(&h, &ch(2, &[0], q(0, 1))).unwrap(),
            Slope::Finite(q(0, 1))
        );
        assert_eq!(s.mu_h(&h, &ch(-1, &[0], q(0, 1))), Err(Error::NegativeRank));
    }

    #[test]
    fn nu_examples() {
        let s = rank_one();
        let h = qv(&[1]);
        let v = ch(1, &[1], q(1, 1));
        assert_eq!(s.nu_hb(&h, &qv(&[0]), &v).unwrap(), q(1, 2));
        assert_eq!(s.nu_hb(&h, &qv(&[1]), &v).unwrap(), q(-1, 2));
        assert_eq!(
            s.nu_hb(&h, &qv(&[0]), &ch(1, &[0], q(5, 3))).unwrap(),
            q(5, 6)
        );
        assert_eq!(
            s.nu_hb(&h, &qv(&[0]), &ch(0, &[1], q(0, 1))),
            Err(Error::ZeroRank)
        );
    }

    #[test]
    fn bogomolov_gieseker_examples() {
        let s = rank_one();
        assert_eq!(s.q_bg_value(&ChernCharacter::point(1)).unwrap(), q(0, 1));
        assert_eq!(s.q_bg_value(&ch(1, &[1], q(1, 1))).unwrap(), q(0, 1));
        assert_eq!(s.q_bg_value(&ch(1, &[0], q(1, 1))).unwrap(), q(-2, 1));
    }

    #[test]
    fn enumerator_filters_by_bogomolov_gieseker() {
        let s = rank_one();
        let b = EnumerationBounds::new(1, vec![(-1, 1)], (q(-2, 1), q(2, 1)));
        let all: Vec<_> = s.enumerate_integral_characters(&b).unwrap().collect();
        assert!(all.contains(&ch(1, &[1], q(1, 1))));
        assert!(!all.contains(&ch(1, &[0], q(1, 1))));
        assert!(all.iter().all(|v| s.q_bg_value(v).unwrap() >= q(0, 1)));
    }

    #[test]
    fn enumerator_count_matches_a_plain_loop() {
        let s = rank_one();
        let b = EnumerationBounds::new(1, vec![(-2, 2)], (q(-3, 1), q(3, 1)));
        let fast = s.enumerate_integral_characters(&b).unwrap().count();
        let mut slow = 0;
        for c in -2i64..=2 {
            for k in -6i64..=6 {
                // ch2 = k/2, Q_BG = 2c² − k
                if 2 * c * c - k >= 0 {
                    slow += 1;
                }
            }
        }
        assert_eq!(fast, slow);
    }

    #[test]
    fn empty_box_is_empty() {
        let s = rank_one();
        let b = EnumerationBounds::new(1, vec![(1, 0)], (q(0, 1), q(1, 1)));
        assert_eq!(s.enumerate_integral_characters(&b).unwrap().count(), 0);
        let b = EnumerationBounds::new(0, vec![(0, 1)], (q(0, 1), q(1, 1)));
        assert_eq!(s.enumerate_integral_characters(&b).unwrap().count(), 0);
    }

    #[test]
    fn enumerator_enforces_the_cap() {
        let s = product();
        let mut b = EnumerationBounds::new(10, vec![(-10, 10), (-10, 10)], (q(-10, 1), q(10, 1)));
        b.cap = 1000;
        assert!(matches!(
            s.enumerate_integral_characters(&b),
            Err(Error::Budget(_))
        ));
    }

    #[test]
    fn shards_concatenate_to_the_full_stream() {
        let s = product();
        let b = EnumerationBounds::new(2, vec![(-2, 2), (-1, 1)], (q(-2, 1), q(2, 1)));
        let full: Vec<_> = s.enumerate_integral_characters(&b).unwrap().collect();
        let n = b.block_count();
        let mut joined = Vec::new();
        for (a, z) in [(0, n / 3), (n / 3, n / 2), (n / 2, n)] {
            joined.extend(s.enumerate_integral_characters(&b).unwrap().blocks(a, z));
        }
        assert_eq!(full, joined);
    }

    #[test]
    fn integrality_flag() {
        assert!(ch(2, &[1], q(1, 2)).is_integral(2));
        assert!(!ch(2, &[1], q(1, 3)).is_integral(2));
    }

    #[test]
    fn chern_product_with_trivial_line_bundle_is_identity() {
        let p = product();
        let v = ch(3, &[1, -2], q(5, 2));
        let o = ChernCharacter::structure_sheaf(2);
        assert_eq!(p.chern_product(&o, &v).unwrap(), v);
    }
}
