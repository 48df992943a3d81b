//! Geometric chamber membership, the numerical tilt torsion pair, and the
//! wall envelope of the point class.

use std::fmt;

use crate::charges::StabilityParams;
use crate::chern::ChernCharacter;
use crate::error::{Error, Result};
use crate::lattice::SurfaceModel;
use crate::lepotier::{grid_points, CharacterSource};
use crate::scalar::{Extended, Scalar, Slope};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Blocking {
    AmpleFailure,
    /// `α = Φ(β)` exactly.
    Boundary,
    BelowPhi,
    ProviderUnknown,
}

impl Blocking {
    pub fn as_str(self) -> &'static str {
        match self {
            Blocking::AmpleFailure => "ample_failure",
            Blocking::Boundary => "boundary",
            Blocking::BelowPhi => "below_phi",
            Blocking::ProviderUnknown => "provider_unknown",
        }
    }
}

impl fmt::Display for Blocking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChamberVerdict<T: Scalar = Rational> {
    pub inside: bool,
    /// `α − Φ(β)`; `None` when Φ is unknown, `−∞` or H is not ample.
    pub margin: Option<T>,
    pub phi: Option<Extended<T>>,
    pub blocking: Option<Blocking>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeartSide {
    TorsionT,
    FreeT,
    FreeF,
    NotApplicable,
}

impl HeartSide {
    pub fn as_str(self) -> &'static str {
        match self {
            HeartSide::TorsionT => "torsion_T",
            HeartSide::FreeT => "free_T",
            HeartSide::FreeF => "free_F",
            HeartSide::NotApplicable => "not_applicable",
        }
    }
}

/// A class pinning the point class to the real axis at `β = μ(v)` for all
/// `α ≤ ν(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WallSegment<T: Scalar = Rational> {
    pub class: ChernCharacter<T>,
    pub beta: T,
    pub alpha_max: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow<T: Scalar = Rational> {
    pub beta: T,
    /// `None` when the provider cannot answer at this β.
    pub phi: Option<Extended<T>>,
    pub upper_bound: T,
    pub envelope: Option<T>,
    pub nef_margin: T,
}

impl<T: Scalar> SurfaceModel<T> {
    /// Inside iff H is ample and `α > Φ(β)`.
    pub fn is_geometric(&self, p: &StabilityParams<T>) -> ChamberVerdict<T> {
        if p.b.len() != self.rank() || !self.is_ample(&p.h) {
            return ChamberVerdict {
                inside: false,
                margin: None,
                phi: None,
                blocking: Some(Blocking::AmpleFailure),
            };
        }
        let phi = match self.phi(&p.h, &p.b, &p.beta) {
            Ok(v) => v,
            Err(_) => {
                return ChamberVerdict {
                    inside: false,
                    margin: None,
                    phi: None,
                    blocking: Some(Blocking::ProviderUnknown),
                }
            }
        };
        let (inside, margin, blocking) = match &phi {
            Extended::NegInfinity => (true, None, None),
            Extended::Finite(v) => {
                let m = p.alpha.clone() - v.clone();
                let blocking = if m.is_zero() {
                    Some(Blocking::Boundary)
                } else if m < T::zero() {
                    Some(Blocking::BelowPhi)
                } else {
                    None
                };
                (blocking.is_none(), Some(m), blocking)
            }
        };
        ChamberVerdict {
            inside,
            margin,
            phi: Some(phi),
            blocking,
        }
    }

    /// Numerical side of the tilt torsion pair `(T_{H,β}, F_{H,β})`.
    pub fn classify_heart_side(
        &self,
        h: &[T],
        beta: &T,
        v: &ChernCharacter<T>,
    ) -> Result<HeartSide> {
        self.check_character(v)?;
        if v.ch0 < T::zero() {
            return Err(Error::NegativeRank);
        }
        if !self.is_ample(h) {
            return Ok(HeartSide::NotApplicable);
        }
        if v.ch0.is_zero() {
            return Ok(HeartSide::TorsionT);
        }
        let im = self.intersect(h, &v.ch1)? - beta.clone() * self.square(h)? * v.ch0.clone();
        Ok(if im > T::zero() {
            HeartSide::FreeT
        } else {
            HeartSide::FreeF
        })
    }

    /// `(μ(v), ν(v))` for every positive-rank class of the source, sorted
    /// by β and then by `alpha_max` descending.
    pub fn wall_envelope(
        &self,
        h: &[T],
        b: &[T],
        source: &CharacterSource,
    ) -> Result<Vec<WallSegment<T>>> {
        self.require_ample(h)?;
        self.check_divisor(b)?;
        let chars = self.characters(source)?;
        self.wall_segments(h, b, chars)
    }

    pub fn wall_segments(
        &self,
        h: &[T],
        b: &[T],
        chars: Vec<ChernCharacter<T>>,
    ) -> Result<Vec<WallSegment<T>>> {
        let mut out = Vec::new();
        for v in chars {
            if v.ch0 <= T::zero() || self.q_bg_value(&v)? < T::zero() {
                continue;
            }
            let Slope::Finite(beta) = self.mu_h(h, &v)? else {
                continue;
            };
            let alpha_max = self.nu_hb(h, b, &v)?;
            out.push(WallSegment {
                class: v,
                beta,
                alpha_max,
            });
        }
        out.sort_by(|x, y| {
            x.beta
                .partial_cmp(&y.beta)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then_with(|| {
                    y.alpha_max
                        .partial_cmp(&x.alpha_max)
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
        });
        Ok(out)
    }

    /// Per-β rows of Φ, the BG parabola, the empirical envelope and the nef
    /// margin on a grid.
    pub fn boundary_sweep(
        &self,
        h: &[T],
        b: &[T],
        beta_range: (&T, &T),
        step: &T,
        source: Option<&CharacterSource>,
    ) -> Result<Vec<SweepRow<T>>> {
        self.require_ample(h)?;
        let betas = grid_points(beta_range.0, beta_range.1, step)?;
        let segments = match source {
            Some(s) => self.wall_envelope(h, b, s)?,
            None => Vec::new(),
        };
        self.sweep_rows(h, b, &betas, &segments)
    }

    /// Sweep rows for given β values against precomputed wall segments.
    pub fn sweep_rows(
        &self,
        h: &[T],
        b: &[T],
        betas: &[T],
        segments: &[WallSegment<T>],
    ) -> Result<Vec<SweepRow<T>>> {
        let nef_margin = self.nef_margin(h)?;
        betas
            .iter()
            .map(|beta| {
                let envelope = segments
                    .iter()
                    .filter(|s| s.beta == *beta)
                    .map(|s| s.alpha_max.clone())
                    .reduce(T::max_of);
                Ok(SweepRow {
                    beta: beta.clone(),
                    phi: self.phi(h, b, beta).ok(),
                    upper_bound: self.upper_bound(h, b, beta)?,
                    envelope,
                    nef_margin: nef_margin.clone(),
                })
            })
            .collect()
    }
}

/// Highest `alpha_max` per distinct β, in β order.
pub fn upper_envelope<T: Scalar>(segments: &[WallSegment<T>]) -> Vec<(T, T)> {
    let mut out: Vec<(T, T)> = Vec::new();
    for s in segments {
        match out.last_mut() {
            Some((b, a)) if *b == s.beta => {
                if s.alpha_max > *a {
                    *a = s.alpha_max.clone();
                }
            }
            _ => out.push((s.beta.clone(), s.alpha_max.clone())),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lepotier::WitnessBounds;
    use crate::testing::{ch, product, q, qv, rank_one};

    fn p(alpha: Rational, beta: Rational) -> StabilityParams {
        StabilityParams::new(qv(&[1]), qv(&[0]), alpha, beta)
    }

    #[test]
    fn verdict_examples() {
        let s = rank_one();
        let v = s.is_geometric(&p(q(1, 4), q(0, 1)));
        assert!(v.inside);
        assert_eq!(v.margin, Some(q(1, 4)));
        let v = s.is_geometric(&p(q(0, 1), q(0, 1)));
        assert!(!v.inside);
        assert_eq!(v.blocking, Some(Blocking::Boundary));
        let v = s.is_geometric(&p(q(-1, 1), q(0, 1)));
        assert_eq!(v.blocking, Some(Blocking::BelowPhi));
        let prod = product();
        let v = prod.is_geometric(&StabilityParams::new(
            qv(&[0, 1]),
            qv(&[0, 0]),
            q(1, 1),
            q(0, 1),
        ));
        assert_eq!(v.blocking, Some(Blocking::AmpleFailure));
    }

    #[test]
    fn heart_side_examples() {
        let s = rank_one();
        let h = qv(&[1]);
        assert_eq!(
            s.classify_heart_side(&h, &q(0, 1), &ch(0, &[1], q(0, 1)))
                .unwrap(),
            HeartSide::TorsionT
        );
        assert_eq!(
            s.classify_heart_side(&h, &q(0, 1), &ch(1, &[1], q(1, 1)))
                .unwrap(),
            HeartSide::FreeT
        );
        assert_eq!(
            s.classify_heart_side(&h, &q(1, 1), &ch(1, &[1], q(1, 1)))
                .unwrap(),
            HeartSide::FreeF
        );
        assert_eq!(
            s.classify_heart_side(&h, &q(0, 1), &ch(-1, &[1], q(1, 1))),
            Err(Error::NegativeRank)
        );
    }

    fn witnesses(max_denominator: u64) -> CharacterSource {
        CharacterSource::Witnesses(WitnessBounds {
            max_denominator,
            c_box: vec![(q(-2, 1), q(2, 1))],
        })
    }

    #[test]
    fn envelope_examples() {
        let s = rank_one();
        let (h, b) = (qv(&[1]), qv(&[0]));
        let segs = s.wall_envelope(&h, &b, &witnesses(3)).unwrap();
        let env = upper_envelope(&segs);
        let at_one = env.iter().find(|(beta, _)| *beta == q(1, 1)).unwrap();
        assert_eq!(at_one.1, q(1, 2));
        assert!(env.iter().all(|(beta, _)| *beta != q(1, 5)));
        for sgm in &segs {
            assert!(sgm.alpha_max <= s.upper_bound(&h, &b, &sgm.beta).unwrap());
        }
        assert!(segs.windows(2).all(|w| w[0].beta <= w[1].beta));
    }

    #[test]
    fn sweep_columns() {
        let s = rank_one();
        let (h, b) = (qv(&[1]), qv(&[0]));
        let rows = s
            .boundary_sweep(&h, &b, (&q(-1, 1), &q(1, 1)), &q(1, 4), Some(&witnesses(4)))
            .unwrap();
        assert_eq!(rows.len(), 9);
        for r in &rows {
            assert_eq!(r.nef_margin, q(2, 1));
            let phi = r.phi.clone().unwrap();
            assert_eq!(
                phi,
                Extended::Finite(r.beta.clone() * r.beta.clone() / q(2, 1))
            );
            assert!(r
                .envelope
                .clone()
                .is_none_or(|e| phi >= Extended::Finite(e)));
        }
    }

    #[test]
    fn monotone_in_alpha() {
        let s = rank_one();
        let beta = q(3, 7);
        let phi = beta.clone() * beta.clone() / q(2, 1);
        assert!(!s.is_geometric(&p(phi.clone(), beta.clone())).inside);
        assert!(s.is_geometric(&p(phi + q(1, 1000), beta)).inside);
    }
}
