//! Twisted Le Potier functions `Φ_{X,H,B}` behind pluggable providers.
//!
//! Every provider is capped by the Bogomolov–Gieseker bound
//! `½[(x − H·B/H²)² − B²/H²]`, and a provider that cannot answer says so
//! with [`Error::Unknown`] instead of guessing.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::chern::{denominator_lcm, ChernCharacter, EnumerationBounds, DEFAULT_ENUMERATION_CAP};
use crate::error::{check_len, Error, Result};
use crate::lattice::{SurfaceClass, SurfaceModel};
use crate::linalg::{dot, Matrix};
use crate::scalar::{Extended, Scalar};
use crate::Rational;

/// How a table is read between knots.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Interpolation {
    /// Value of the nearest knot on the left.
    Left,
    /// Value of the nearest knot on the right.
    Right,
    /// Larger of the two neighbouring knots; upper semicontinuous.
    UpperEnvelope,
}

impl Interpolation {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "left" => Interpolation::Left,
            "right" => Interpolation::Right,
            "upper_envelope" | "upper-envelope" => Interpolation::UpperEnvelope,
            _ => return None,
        })
    }
}

/// Knot table for one polarization `(H, B)`. Also answers for `λH` with
/// `λ > 0` through `Φ_{λH,B}(x) = Φ_{H,B}(λx)/λ²`.
#[derive(Clone, Debug)]
pub struct Tabulated<T: Scalar = Rational> {
    pub h: Vec<T>,
    pub b: Vec<T>,
    /// Strictly increasing in `x`.
    pub knots: Vec<(T, Extended<T>)>,
    pub rule: Interpolation,
}

/// Closed interval of a table on which Φ is bounded by `value`.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece<T> {
    pub lo: T,
    pub hi: T,
    pub value: Extended<T>,
}

impl<T: Scalar> Tabulated<T> {
    /// `λ` with `h = λ·self.h`, if there is a positive one and `b` matches.
    fn scale_for(&self, h: &[T], b: &[T]) -> Option<T> {
        if h.len() != self.h.len() || b != self.b.as_slice() {
            return None;
        }
        let i = self.h.iter().position(|x| !x.is_zero())?;
        let lambda = h[i].clone() / self.h[i].clone();
        if lambda <= T::zero() {
            return None;
        }
        let same = self
            .h
            .iter()
            .zip(h)
            .all(|(t, x)| (t.clone() * lambda.clone() - x.clone()).is_negligible());
        same.then_some(lambda)
    }

    /// Table value at `x` in the table's own coordinates.
    fn raw_value(&self, x: &T) -> Option<Extended<T>> {
        let n = self.knots.len();
        if n == 0 || *x < self.knots[0].0 || *x > self.knots[n - 1].0 {
            return None;
        }
        let at = |i: usize| self.knots[i].1.clone();
        if let Some(i) = self.knots.iter().position(|(k, _)| k == x) {
            return Some(match self.rule {
                Interpolation::UpperEnvelope => {
                    let mut v = at(i);
                    if i > 0 {
                        v = v.max(at(i - 1));
                    }
                    if i + 1 < n {
                        v = v.max(at(i + 1));
                    }
                    v
                }
                _ => at(i),
            });
        }
        let i = self.knots.iter().rposition(|(k, _)| k < x)?;
        Some(match self.rule {
            Interpolation::Left => at(i),
            Interpolation::Right => at(i + 1),
            Interpolation::UpperEnvelope => at(i).max(at(i + 1)),
        })
    }

    /// Pieces in the caller's coordinates for polarization `λ·self.h`.
    /// Each closed interval between consecutive knots carries the larger
    /// knot value, which bounds Φ there under every rule.
    fn pieces(&self, lambda: &T) -> Vec<Piece<T>> {
        let l2 = lambda.clone() * lambda.clone();
        let conv = |x: &T| x.clone() / lambda.clone();
        let val = |v: &Extended<T>| v.map(|y| y.clone() / l2.clone());
        if self.knots.len() == 1 {
            let (k, v) = &self.knots[0];
            return vec![Piece {
                lo: conv(k),
                hi: conv(k),
                value: val(v),
            }];
        }
        self.knots
            .windows(2)
            .map(|w| Piece {
                lo: conv(&w[0].0),
                hi: conv(&w[1].0),
                value: val(&w[0].1.clone().max(w[1].1.clone())),
            })
            .collect()
    }
}

/// Pullback data that lets a quotient surface ask its cover for Φ.
#[derive(Clone, Debug)]
pub struct CoverMap<T: Scalar = Rational> {
    pub group_order: u64,
    /// `ρ_cover × ρ_base`.
    pub pullback_ns: Matrix<T>,
    pub cover: Arc<SurfaceModel<T>>,
}

/// Rational points `C = a/q` with `q ≤ max_denominator` inside a box.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessBounds {
    pub max_denominator: u64,
    pub c_box: Vec<(Rational, Rational)>,
}

/// Where empirical envelopes take their characters from.
#[derive(Clone, Debug, PartialEq)]
pub enum CharacterSource {
    /// Every BG-feasible integral class in a box.
    Box(EnumerationBounds),
    /// Semi-homogeneous witnesses `r·e^C`; abelian surfaces only.
    Witnesses(WitnessBounds),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalEnvelope {
    pub source: CharacterSource,
    /// Characters with `|μ − x| ≤ bucket` contribute at `x`.
    pub bucket: Rational,
}

#[derive(Clone, Debug)]
pub enum LePotierProvider<T: Scalar = Rational> {
    /// `Φ = ½[(x − H·B/H²)² − B²/H²]`.
    QuadraticClosedForm,
    Tabulated(Tabulated<T>),
    /// `Φ_Y(H, B, x) = Φ_X(π*H, π*B, x)`.
    QuotientTransfer(CoverMap<T>),
    /// Heuristic lower estimate; exact only where every enumerated class is
    /// realized by a semistable sheaf.
    EmpiricalEnvelope(EmpiricalEnvelope),
}

impl<T: Scalar> LePotierProvider<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            LePotierProvider::QuadraticClosedForm => "quadratic_closed_form",
            LePotierProvider::Tabulated(_) => "tabulated",
            LePotierProvider::QuotientTransfer(_) => "quotient_transfer",
            LePotierProvider::EmpiricalEnvelope(_) => "empirical_envelope",
        }
    }

    /// `true` when values are theorems rather than estimates.
    pub fn is_certified(&self) -> bool {
        match self {
            LePotierProvider::EmpiricalEnvelope(_) => false,
            LePotierProvider::QuotientTransfer(m) => m.cover.lp_provider().is_certified(),
            _ => true,
        }
    }

    pub(crate) fn validate(&self, rho: usize, class: SurfaceClass) -> Result<()> {
        match self {
            LePotierProvider::QuadraticClosedForm => {
                if !class.admits_closed_form() {
                    return Err(Error::InvalidSurface(format!(
                        "closed-form Le Potier function needs an abelian or finite-Albanese \
                         type surface, got {class}"
                    )));
                }
            }
            LePotierProvider::Tabulated(t) => {
                check_len(rho, t.h.len())?;
                check_len(rho, t.b.len())?;
                if t.knots.is_empty() {
                    return Err(Error::InvalidSurface(
                        "tabulated provider has no knots".into(),
                    ));
                }
                if t.knots.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err(Error::InvalidSurface(
                        "tabulated knots must be strictly increasing".into(),
                    ));
                }
                if t.h.iter().all(|x| x.is_zero()) {
                    return Err(Error::InvalidSurface(
                        "tabulated polarization is zero".into(),
                    ));
                }
            }
            LePotierProvider::QuotientTransfer(m) => {
                if m.group_order == 0 {
                    return Err(Error::InvalidSurface("group order must be positive".into()));
                }
                if m.pullback_ns.rows() != m.cover.rank() || m.pullback_ns.cols() != rho {
                    return Err(Error::InvalidSurface(format!(
                        "pullback matrix must be {}×{rho}, got {}×{}",
                        m.cover.rank(),
                        m.pullback_ns.rows(),
                        m.pullback_ns.cols()
                    )));
                }
            }
            LePotierProvider::EmpiricalEnvelope(e) => {
                match &e.source {
                    CharacterSource::Box(b) => check_len(rho, b.c1_box.len())?,
                    CharacterSource::Witnesses(w) => {
                        check_len(rho, w.c_box.len())?;
                        if class != SurfaceClass::Abelian {
                            return Err(Error::InvalidSurface(
                                "witness characters need an abelian surface".into(),
                            ));
                        }
                    }
                }
                if e.bucket.is_negative() {
                    return Err(Error::InvalidSurface("bucket must be nonnegative".into()));
                }
            }
        }
        Ok(())
    }

    pub fn cast<U: Scalar>(&self) -> LePotierProvider<U> {
        let c = |x: &T| U::from_rational(&x.to_rational());
        match self {
            LePotierProvider::QuadraticClosedForm => LePotierProvider::QuadraticClosedForm,
            LePotierProvider::Tabulated(t) => LePotierProvider::Tabulated(Tabulated {
                h: t.h.iter().map(c).collect(),
                b: t.b.iter().map(c).collect(),
                knots: t.knots.iter().map(|(x, v)| (c(x), v.map(c))).collect(),
                rule: t.rule,
            }),
            LePotierProvider::QuotientTransfer(m) => LePotierProvider::QuotientTransfer(CoverMap {
                group_order: m.group_order,
                pullback_ns: m.pullback_ns.map(c),
                cover: Arc::new(m.cover.cast()),
            }),
            LePotierProvider::EmpiricalEnvelope(e) => {
                LePotierProvider::EmpiricalEnvelope(e.clone())
            }
        }
    }
}

/// Advances `a` through the box, last coordinate fastest. Returns `false`
/// after the final point.
fn odometer_step(a: &mut [i64], ranges: &[(i64, i64)]) -> bool {
    for i in (0..a.len()).rev() {
        if a[i] < ranges[i].1 {
            a[i] += 1;
            for j in i + 1..a.len() {
                a[j] = ranges[j].0;
            }
            return true;
        }
    }
    false
}

/// One flagged grid position of a continuity scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuityFlag<T> {
    pub x: T,
    /// `|Φ(x + step) − Φ(x)|`; `None` when one side is `−∞`.
    pub jump_size: Option<T>,
    pub is_jump: bool,
    /// Zero second difference centred at `x`.
    pub is_linear_segment: bool,
}

/// `lo, lo + step, …` up to and including `hi`.
pub fn grid_points<T: Scalar>(lo: &T, hi: &T, step: &T) -> Result<Vec<T>> {
    if *step <= T::zero() {
        return Err(Error::Precondition("step must be positive".into()));
    }
    if hi < lo {
        return Err(Error::Precondition("empty range".into()));
    }
    let n = ((hi.to_rational() - lo.to_rational()) / step.to_rational())
        .floor()
        .to_integer();
    let n = n
        .to_u64()
        .filter(|&n| n < 50_000_000)
        .ok_or_else(|| Error::Budget("grid too large".into()))?;
    Ok((0..=n)
        .map(|k| lo.clone() + step.clone() * T::from_rational(&Rational::from_integer(k.into())))
        .collect())
}

impl<T: Scalar> SurfaceModel<T> {
    /// `(H·B / H², B² / H²)`: vertex abscissa and offset of the BG parabola.
    pub(crate) fn parabola_data(&self, h: &[T], b: &[T]) -> Result<(T, T)> {
        self.require_ample(h)?;
        let h2 = self.square(h)?;
        Ok((self.intersect(h, b)? / h2.clone(), self.square(b)? / h2))
    }

    /// `½[(x − H·B/H²)² − B²/H²]`.
    pub fn upper_bound(&self, h: &[T], b: &[T], x: &T) -> Result<T> {
        let (c, b2) = self.parabola_data(h, b)?;
        let y = x.clone() - c;
        Ok(T::half() * (y.clone() * y - b2))
    }

    /// `Φ_{X,H,B}(x)` from the attached provider.
    pub fn phi(&self, h: &[T], b: &[T], x: &T) -> Result<Extended<T>> {
        self.check_divisor(b)?;
        let ub = self.upper_bound(h, b, x)?;
        let value = match self.lp_provider() {
            LePotierProvider::QuadraticClosedForm => Extended::Finite(ub.clone()),
            LePotierProvider::Tabulated(t) => {
                let lambda = t.scale_for(h, b).ok_or_else(|| {
                    Error::Unknown("table was built for a different polarization".into())
                })?;
                let raw = t
                    .raw_value(&(x.clone() * lambda.clone()))
                    .ok_or_else(|| Error::Unknown(format!("x = {x} is outside the table")))?;
                raw.map(|v| v.clone() / (lambda.clone() * lambda.clone()))
            }
            LePotierProvider::QuotientTransfer(m) => {
                let ph = m.pullback_ns.mul_vec(h);
                let pb = m.pullback_ns.mul_vec(b);
                m.cover.phi(&ph, &pb, x)?
            }
            LePotierProvider::EmpiricalEnvelope(e) => {
                let bucket = T::from_rational(&e.bucket);
                self.empirical_phi(h, b, x, &bucket, &e.source)?
            }
        };
        Ok(value.min_with(&ub))
    }

    /// Least `r ≥ 1` making `r·e^C` integral; returns `(r, r·C, r·C²/2)`.
    pub fn witness_character(&self, c: &[T]) -> Result<ChernCharacter<T>> {
        if self.class() != SurfaceClass::Abelian {
            return Err(Error::Precondition(
                "witness characters are only available on abelian surfaces".into(),
            ));
        }
        self.check_divisor(c)?;
        let half_c2 = T::half() * self.square(c)?;
        let cq: Vec<Rational> = c.iter().map(Scalar::to_rational).collect();
        let ch2_scaled =
            half_c2.to_rational() * Rational::from_integer(BigInt::from(self.chtwo_denominator()));
        let r = denominator_lcm(cq.iter().chain(std::iter::once(&ch2_scaled)));
        let r = T::from_rational(&Rational::from_integer(r));
        Ok(ChernCharacter::new(
            r.clone(),
            c.iter().map(|x| x.clone() * r.clone()).collect(),
            r * half_c2,
        ))
    }

    /// Witnesses `r·e^C` for every `C = a/q` in the box, in order of
    /// increasing `q` then lexicographic `a`. Each `C` appears once.
    pub fn witnesses(&self, bounds: &WitnessBounds) -> Result<Vec<ChernCharacter<T>>> {
        check_len(self.rank(), bounds.c_box.len())?;
        let mut estimate = BigInt::zero();
        for q in 1..=bounds.max_denominator {
            let qq = Rational::from_integer(q.into());
            estimate += bounds.c_box.iter().fold(BigInt::one(), |acc, (lo, hi)| {
                let a = (lo * &qq).ceil().to_integer();
                let b = (hi * &qq).floor().to_integer();
                acc * if b < a { BigInt::zero() } else { b - a + 1 }
            });
        }
        if estimate > BigInt::from(DEFAULT_ENUMERATION_CAP) {
            return Err(Error::Budget(format!("{estimate} witness candidates")));
        }
        let mut out = Vec::new();
        for q in 1..=bounds.max_denominator {
            let qq = Rational::from_integer(q.into());
            let ranges: Vec<(i64, i64)> = bounds
                .c_box
                .iter()
                .map(|(lo, hi)| {
                    let a = (lo * &qq).ceil().to_integer().to_i64().unwrap_or(i64::MAX);
                    let b = (hi * &qq).floor().to_integer().to_i64().unwrap_or(i64::MIN);
                    (a, b)
                })
                .collect();
            if ranges.iter().any(|(a, b)| b < a) {
                continue;
            }
            let mut a: Vec<i64> = ranges.iter().map(|r| r.0).collect();
            loop {
                let g = a.iter().fold(q as i64, |g, &x| g.gcd(&x));
                if g == 1 {
                    let c: Vec<T> = a
                        .iter()
                        .map(|&x| T::from_rational(&Rational::new(x.into(), (q as i64).into())))
                        .collect();
                    out.push(self.witness_character(&c)?);
                }
                if !odometer_step(&mut a, &ranges) {
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Characters drawn from a source, as a flat list.
    pub fn characters(&self, source: &CharacterSource) -> Result<Vec<ChernCharacter<T>>> {
        match source {
            CharacterSource::Box(b) => Ok(self.enumerate_integral_characters(b)?.collect()),
            CharacterSource::Witnesses(w) => self.witnesses(w),
        }
    }

    /// `max ν_{H,B}(v)` over characters with `|μ_H(v) − x| ≤ bucket`;
    /// `−∞` when none qualify.
    pub fn empirical_phi(
        &self,
        h: &[T],
        b: &[T],
        x: &T,
        bucket: &T,
        source: &CharacterSource,
    ) -> Result<Extended<T>> {
        self.require_ample(h)?;
        let chars = self.characters(source)?;
        self.envelope_at(h, b, x, bucket, &chars)
    }

    /// [`Self::empirical_phi`] over a precomputed character list.
    pub fn envelope_at(
        &self,
        h: &[T],
        b: &[T],
        x: &T,
        bucket: &T,
        chars: &[ChernCharacter<T>],
    ) -> Result<Extended<T>> {
        self.require_ample(h)?;
        let (hd, bd) = (self.dual(h)?, self.dual(b)?);
        let h2 = self.square(h)?;
        let mut best = Extended::NegInfinity;
        for v in chars {
            self.check_character(v)?;
            if v.ch0 <= T::zero() {
                continue;
            }
            let denom = h2.clone() * v.ch0.clone();
            let mu = dot(&hd, &v.ch1) / denom.clone();
            if (mu - x.clone()).abs() <= *bucket {
                let nu = (v.ch2.clone() - dot(&bd, &v.ch1)) / denom;
                best = best.max(Extended::Finite(nu));
            }
        }
        Ok(best)
    }

    /// Grid scan for jumps and linear pieces of Φ on `[x0, x1]`.
    ///
    /// A step is a jump when `|ΔΦ| > (L + 1)·step`, with `L` the largest
    /// slope of the BG parabola on the range, or when it enters or leaves
    /// `−∞`. A linear piece is a zero exact second difference.
    pub fn continuity_report(
        &self,
        h: &[T],
        b: &[T],
        range: (&T, &T),
        step: &T,
    ) -> Result<Vec<ContinuityFlag<T>>> {
        let xs = grid_points(range.0, range.1, step)?;
        let values: Vec<Extended<T>> = xs
            .iter()
            .map(|x| self.phi(h, b, x))
            .collect::<Result<_>>()?;
        let (c, _) = self.parabola_data(h, b)?;
        let lip = T::max_of(
            (range.0.clone() - c.clone()).abs(),
            (range.1.clone() - c).abs(),
        );
        let threshold = (lip + T::one()) * step.clone();

        let mut flags: Vec<ContinuityFlag<T>> = Vec::new();
        for i in 0..xs.len() {
            let mut jump = None;
            if i + 1 < xs.len() {
                jump = match (&values[i], &values[i + 1]) {
                    (Extended::Finite(a), Extended::Finite(b)) => {
                        let d = (b.clone() - a.clone()).abs();
                        (d > threshold).then_some(Some(d))
                    }
                    (Extended::NegInfinity, Extended::NegInfinity) => None,
                    _ => Some(None),
                };
            }
            let mut linear = false;
            if i > 0 && i + 1 < xs.len() {
                if let (Extended::Finite(a), Extended::Finite(m), Extended::Finite(z)) =
                    (&values[i - 1], &values[i], &values[i + 1])
                {
                    let second = a.clone() - T::two() * m.clone() + z.clone();
                    linear = second.is_negligible();
                }
            }
            if jump.is_some() || linear {
                flags.push(ContinuityFlag {
                    x: xs[i].clone(),
                    jump_size: jump.clone().flatten(),
                    is_jump: jump.is_some(),
                    is_linear_segment: linear,
                });
            }
        }
        Ok(flags)
    }

    /// Does `p(x) = (x − β₀)²/δ + α₀ − δ` dominate Φ everywhere? Answered
    /// exactly from provider data; `Err(Unknown)` if the provider cannot
    /// say.
    pub fn parabola_dominates_phi(
        &self,
        h: &[T],
        b: &[T],
        alpha0: &T,
        beta0: &T,
        delta: &T,
    ) -> Result<bool> {
        self.check_divisor(b)?;
        if *delta <= T::zero() {
            return Err(Error::Precondition("delta must be positive".into()));
        }
        match self.lp_provider() {
            LePotierProvider::QuadraticClosedForm | LePotierProvider::EmpiricalEnvelope(_) => {
                self.parabola_dominates_bound(h, b, alpha0, beta0, delta, None)
            }
            LePotierProvider::QuotientTransfer(m) => {
                let ph = m.pullback_ns.mul_vec(h);
                let pb = m.pullback_ns.mul_vec(b);
                m.cover
                    .parabola_dominates_phi(&ph, &pb, alpha0, beta0, delta)
            }
            LePotierProvider::Tabulated(t) => {
                let lambda = t.scale_for(h, b).ok_or_else(|| {
                    Error::Unknown("table was built for a different polarization".into())
                })?;
                let pieces = t.pieces(&lambda);
                let p = |x: &T| {
                    let y = x.clone() - beta0.clone();
                    y.clone() * y / delta.clone() + alpha0.clone() - delta.clone()
                };
                for piece in &pieces {
                    if let Extended::Finite(v) = &piece.value {
                        let at =
                            T::min_of(T::max_of(beta0.clone(), piece.lo.clone()), piece.hi.clone());
                        if p(&at) < *v {
                            return Ok(false);
                        }
                    }
                }
                let lo = pieces
                    .first()
                    .map(|p| p.lo.clone())
                    .expect("nonempty table");
                let hi = pieces.last().map(|p| p.hi.clone()).expect("nonempty table");
                self.parabola_dominates_bound(h, b, alpha0, beta0, delta, Some((lo, hi)))
            }
        }
    }

    /// `p ≥ ub` on the whole line, or only outside `[lo, hi]` when a gap is
    /// given.
    fn parabola_dominates_bound(
        &self,
        h: &[T],
        b: &[T],
        alpha0: &T,
        beta0: &T,
        delta: &T,
        gap: Option<(T, T)>,
    ) -> Result<bool> {
        if *delta >= T::two() {
            return Ok(false);
        }
        let (c, b2) = self.parabola_data(h, b)?;
        let g = |x: &T| {
            let y = x.clone() - beta0.clone();
            let z = x.clone() - c.clone();
            y.clone() * y / delta.clone() + alpha0.clone()
                - delta.clone()
                - T::half() * (z.clone() * z - b2.clone())
        };
        // g'(x) = 2(x − β₀)/δ − (x − c) vanishes at x*
        let two_over = T::two() / delta.clone();
        let xstar = (two_over.clone() * beta0.clone() - c.clone()) / (two_over - T::one());
        Ok(match gap {
            None => g(&xstar) >= T::zero(),
            Some((lo, hi)) => {
                g(&T::min_of(xstar.clone(), lo)) >= T::zero()
                    && g(&T::max_of(xstar, hi)) >= T::zero()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{ch, product, q, qv, rank_one};

    fn knot(x: Rational, v: Option<Rational>) -> (Rational, Extended<Rational>) {
        (x, v.map_or(Extended::NegInfinity, Extended::Finite))
    }

    #[test]
    fn closed_form_examples() {
        let s = rank_one();
        let h = qv(&[1]);
        assert_eq!(
            s.phi(&h, &qv(&[0]), &q(2, 1)).unwrap(),
            Extended::Finite(q(2, 1))
        );
        assert_eq!(
            s.phi(&h, &qv(&[1]), &q(1, 1)).unwrap(),
            Extended::Finite(q(-1, 2))
        );
        assert_eq!(s.upper_bound(&h, &qv(&[1]), &q(0, 1)).unwrap(), q(0, 1));
        assert_eq!(s.upper_bound(&h, &qv(&[1]), &q(1, 1)).unwrap(), q(-1, 2));
        assert_eq!(s.phi(&qv(&[-1]), &qv(&[0]), &q(0, 1)), Err(Error::NotAmple));
    }

    #[test]
    fn witness_examples() {
        let s = rank_one();
        assert_eq!(
            s.witness_character(&qv(&[1])).unwrap(),
            ch(1, &[1], q(1, 1))
        );
        assert_eq!(
            s.witness_character(&[q(1, 2)]).unwrap(),
            ChernCharacter::new(q(2, 1), vec![q(1, 1)], q(1, 2))
        );
        for c in [q(2, 3), q(-5, 7), q(3, 4)] {
            let w = s.witness_character(&[c]).unwrap();
            assert_eq!(s.q_bg_value(&w).unwrap(), q(0, 1));
            assert!(w.is_integral(2));
        }
    }

    #[test]
    fn witnesses_need_an_abelian_surface() {
        let s = crate::testing::curve_product();
        assert!(matches!(
            s.witness_character(&qv(&[1, 0])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn empirical_examples() {
        let s = rank_one();
        let h = qv(&[1]);
        let b = qv(&[0]);
        let src = CharacterSource::Witnesses(WitnessBounds {
            max_denominator: 4,
            c_box: vec![(q(-2, 1), q(2, 1))],
        });
        assert_eq!(
            s.empirical_phi(&h, &b, &q(1, 1), &q(0, 1), &src).unwrap(),
            Extended::Finite(q(1, 2))
        );
        assert_eq!(
            s.empirical_phi(&h, &b, &q(1, 2), &q(0, 1), &src).unwrap(),
            Extended::Finite(q(1, 8))
        );
        let empty =
            CharacterSource::Box(EnumerationBounds::new(0, vec![(0, 0)], (q(0, 1), q(0, 1))));
        assert_eq!(
            s.empirical_phi(&h, &b, &q(1, 1), &q(0, 1), &empty).unwrap(),
            Extended::NegInfinity
        );
    }

    #[test]
    fn witness_list_has_no_duplicates() {
        let s = rank_one();
        let w = s
            .witnesses(&WitnessBounds {
                max_denominator: 6,
                c_box: vec![(q(-1, 1), q(1, 1))],
            })
            .unwrap();
        for (i, a) in w.iter().enumerate() {
            assert!(w[i + 1..].iter().all(|b| b != a));
        }
        // Farey-type count of a/q in [-1,1] with q ≤ 6 in lowest terms
        let mut expected = 0;
        for qd in 1i64..=6 {
            for a in -qd..=qd {
                if a.gcd(&qd) == 1 {
                    expected += 1;
                }
            }
        }
        assert_eq!(w.len(), expected);
    }

    #[test]
    fn closed_form_has_empty_continuity_report() {
        let s = rank_one();
        let flags = s
            .continuity_report(&qv(&[1]), &qv(&[0]), (&q(-2, 1), &q(2, 1)), &q(1, 64))
            .unwrap();
        assert!(flags.is_empty());
    }

    fn tabulated_surface(
        knots: Vec<(Rational, Extended<Rational>)>,
        rule: Interpolation,
    ) -> SurfaceModel {
        let mut data = crate::testing::rank_one_data();
        data.class = SurfaceClass::General;
        data.lp_provider = LePotierProvider::Tabulated(Tabulated {
            h: qv(&[1]),
            b: qv(&[0]),
            knots,
            rule,
        });
        SurfaceModel::new(data).unwrap()
    }

    #[test]
    fn tabulated_drop_to_minus_infinity_is_one_jump() {
        let s = tabulated_surface(
            vec![
                knot(q(-1, 1), Some(q(1, 4))),
                knot(q(0, 1), None),
                knot(q(1, 1), None),
            ],
            Interpolation::Left,
        );
        let flags = s
            .continuity_report(&qv(&[1]), &qv(&[0]), (&q(-1, 1), &q(1, 1)), &q(1, 2))
            .unwrap();
        let jumps: Vec<_> = flags.iter().filter(|f| f.is_jump).collect();
        assert_eq!(jumps.len(), 1);
        assert_eq!(jumps[0].x, q(-1, 2));
        assert_eq!(jumps[0].jump_size, None);
    }

    #[test]
    fn tabulated_rules_and_caps() {
        let knots = vec![knot(q(0, 1), Some(q(-1, 1))), knot(q(1, 1), Some(q(1, 4)))];
        let left = tabulated_surface(knots.clone(), Interpolation::Left);
        let right = tabulated_surface(knots.clone(), Interpolation::Right);
        let env = tabulated_surface(knots, Interpolation::UpperEnvelope);
        let (h, b) = (qv(&[1]), qv(&[0]));
        let x = q(1, 2);
        assert_eq!(left.phi(&h, &b, &x).unwrap(), Extended::Finite(q(-1, 1)));
        // 1/4 is capped by ub(1/2) = 1/8
        assert_eq!(right.phi(&h, &b, &x).unwrap(), Extended::Finite(q(1, 8)));
        assert_eq!(env.phi(&h, &b, &x).unwrap(), Extended::Finite(q(1, 8)));
        assert_eq!(
            env.phi(&h, &b, &q(0, 1)).unwrap(),
            Extended::Finite(q(0, 1))
        );
        assert!(matches!(left.phi(&h, &b, &q(2, 1)), Err(Error::Unknown(_))));
        assert!(matches!(
            left.phi(&h, &qv(&[1]), &x),
            Err(Error::Unknown(_))
        ));
    }

    #[test]
    fn tabulated_rescales_with_the_polarization() {
        let s = tabulated_surface(
            vec![knot(q(0, 1), Some(q(-1, 1))), knot(q(2, 1), Some(q(-1, 1)))],
            Interpolation::Left,
        );
        // Φ_{2H}(x) = Φ_H(2x)/4
        assert_eq!(
            s.phi(&qv(&[2]), &qv(&[0]), &q(1, 2)).unwrap(),
            Extended::Finite(q(-1, 4))
        );
    }

    #[test]
    fn quotient_transfer_matches_cover() {
        let y = crate::testing::bielliptic(2);
        let h = qv(&[1, 1]);
        for x in [q(0, 1), q(1, 2), q(-1, 1), q(7, 3)] {
            let expect = x.clone() * x.clone() / q(2, 1);
            assert_eq!(
                y.phi(&h, &qv(&[0, 0]), &x).unwrap(),
                Extended::Finite(expect)
            );
        }
    }

    #[test]
    fn domination_matches_the_closed_form_condition() {
        let s = rank_one();
        let (h, b) = (qv(&[1]), qv(&[0]));
        assert!(s
            .parabola_dominates_phi(&h, &b, &q(1, 1), &q(0, 1), &q(9, 10))
            .unwrap());
        assert!(s
            .parabola_dominates_phi(&h, &b, &q(1, 1), &q(0, 1), &q(1, 1))
            .unwrap());
        assert!(!s
            .parabola_dominates_phi(&h, &b, &q(1, 1), &q(0, 1), &q(11, 10))
            .unwrap());
    }

    #[test]
    fn product_surface_phi_is_the_bound() {
        let p = product();
        let h = qv(&[1, 2]);
        let b = qv(&[1, -1]);
        let x = q(3, 5);
        assert_eq!(
            p.phi(&h, &b, &x).unwrap(),
            Extended::Finite(p.upper_bound(&h, &b, &x).unwrap())
        );
    }
}
