//! Normalized central charges `Z_{H,B,α,β}` and the tilt coordinates.
//!
//! `Z(v) = (α − iβ)H²ch0 + (B + iH)·ch1 − ch2`, so the point class goes to
//! `−1`. Only `a²` is ever stored for the tilt parameter `a`.

use crate::chern::ChernCharacter;
use crate::error::{check_len, Error, Result};
use crate::lattice::SurfaceModel;
use crate::linalg::{dot, Matrix};
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityParams<T: Scalar = Rational> {
    pub h: Vec<T>,
    pub b: Vec<T>,
    pub alpha: T,
    pub beta: T,
}

impl<T: Scalar> StabilityParams<T> {
    pub fn new(h: Vec<T>, b: Vec<T>, alpha: T, beta: T) -> Self {
        StabilityParams { h, b, alpha, beta }
    }

    pub fn with_alpha(&self, alpha: T) -> Self {
        StabilityParams {
            alpha,
            ..self.clone()
        }
    }

    pub fn cast<U: Scalar>(&self) -> StabilityParams<U> {
        let c = |x: &T| U::from_rational(&x.to_rational());
        StabilityParams {
            h: self.h.iter().map(c).collect(),
            b: self.b.iter().map(c).collect(),
            alpha: c(&self.alpha),
            beta: c(&self.beta),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TiltParams<T: Scalar = Rational> {
    pub a_squared: T,
    pub h: Vec<T>,
    pub b_tilt: Vec<T>,
}

/// A pair of linear functionals on `Knum ⊗ Q` in `(ch0, ch1, ch2)`
/// coordinates: `v ↦ (re·v, im·v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearCharge<T: Scalar = Rational> {
    pub re: Vec<T>,
    pub im: Vec<T>,
}

impl<T: Scalar> LinearCharge<T> {
    pub fn eval(&self, v: &[T]) -> (T, T) {
        (dot(&self.re, v), dot(&self.im, v))
    }

    pub fn eval_character(&self, v: &ChernCharacter<T>) -> (T, T) {
        self.eval(&v.to_vec())
    }

    pub fn scale(&self, k: &T) -> Self {
        LinearCharge {
            re: self.re.iter().map(|x| x.clone() * k.clone()).collect(),
            im: self.im.iter().map(|x| x.clone() * k.clone()).collect(),
        }
    }

    /// `Z ∘ M` for a linear map `M` given as a matrix.
    pub fn compose(&self, m: &Matrix<T>) -> Self {
        let mt = m.transpose();
        LinearCharge {
            re: mt.mul_vec(&self.re),
            im: mt.mul_vec(&self.im),
        }
    }

    /// Basis of `{v : Z(v) = 0}` plus a flag when the two rows are
    /// dependent.
    pub fn kernel(&self) -> Kernel<T> {
        let n = self.re.len();
        // Columns are reversed before row reduction so that ch0 and the
        // leading ch1 coordinates end up free.
        let rev = |row: &Vec<T>| row.iter().rev().cloned().collect::<Vec<_>>();
        let m = Matrix::from_rows(vec![rev(&self.re), rev(&self.im)]).expect("two equal rows");
        let rank = m.rank();
        let basis = m
            .nullspace()
            .into_iter()
            .map(|v| v.into_iter().rev().collect::<Vec<_>>())
            .rev()
            .collect::<Vec<_>>();
        debug_assert_eq!(basis.len(), n - rank);
        Kernel {
            basis,
            degenerate: rank < 2,
        }
    }
}

/// `ker Z ⊗ Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel<T: Scalar = Rational> {
    pub basis: Vec<Vec<T>>,
    /// `Re Z` and `Im Z` are linearly dependent here.
    pub degenerate: bool,
}

impl<T: Scalar> SurfaceModel<T> {
    fn check_params(&self, p: &StabilityParams<T>) -> Result<()> {
        check_len(self.rank(), p.h.len())?;
        check_len(self.rank(), p.b.len())
    }

    /// Coefficient rows of `Re Z` and `Im Z`.
    pub fn charge_functional(&self, p: &StabilityParams<T>) -> Result<LinearCharge<T>> {
        self.check_params(p)?;
        let h2 = self.square(&p.h)?;
        let mut re = vec![p.alpha.clone() * h2.clone()];
        re.extend(self.dual(&p.b)?);
        re.push(-T::one());
        let mut im = vec![-(p.beta.clone() * h2)];
        im.extend(self.dual(&p.h)?);
        im.push(T::zero());
        Ok(LinearCharge { re, im })
    }

    /// `(Re Z(v), Im Z(v))`.
    pub fn central_charge(&self, p: &StabilityParams<T>, v: &ChernCharacter<T>) -> Result<(T, T)> {
        self.require_ample(&p.h)?;
        self.check_character(v)?;
        Ok(self.charge_functional(p)?.eval_character(v))
    }

    pub fn kernel_basis(&self, p: &StabilityParams<T>) -> Result<Kernel<T>> {
        Ok(self.charge_functional(p)?.kernel())
    }

    /// `b = β − H·B/H²`, `a² = 2α − b² + B²/H²`, `B_tilt = B + bH`.
    pub fn normalized_to_tilt(&self, p: &StabilityParams<T>) -> Result<TiltParams<T>> {
        self.check_params(p)?;
        let (c, b2) = self.parabola_data(&p.h, &p.b)?;
        let b = p.beta.clone() - c;
        let a_squared = T::two() * p.alpha.clone() - b.clone() * b.clone() + b2;
        if a_squared <= T::zero() {
            return Err(Error::OutOfRange(format!(
                "a² = {a_squared} ≤ 0: α lies on or below the Bogomolov–Gieseker parabola"
            )));
        }
        Ok(TiltParams {
            a_squared,
            h: p.h.clone(),
            b_tilt: p
                .b
                .iter()
                .zip(&p.h)
                .map(|(bi, hi)| bi.clone() + b.clone() * hi.clone())
                .collect(),
        })
    }

    /// Inverse of [`Self::normalized_to_tilt`] for a chosen base `B`.
    pub fn tilt_to_normalized(
        &self,
        t: &TiltParams<T>,
        base_b: &[T],
    ) -> Result<StabilityParams<T>> {
        check_len(self.rank(), t.h.len())?;
        check_len(self.rank(), t.b_tilt.len())?;
        check_len(self.rank(), base_b.len())?;
        if t.a_squared <= T::zero() {
            return Err(Error::OutOfRange("a² must be positive".into()));
        }
        let (c, b2) = self.parabola_data(&t.h, base_b)?;
        let diff: Vec<T> = t
            .b_tilt
            .iter()
            .zip(base_b)
            .map(|(x, y)| x.clone() - y.clone())
            .collect();
        let i =
            t.h.iter()
                .position(|x| !x.is_zero())
                .ok_or(Error::NotAmple)?;
        let b = diff[i].clone() / t.h[i].clone();
        if diff
            .iter()
            .zip(&t.h)
            .any(|(d, h)| !(d.clone() - b.clone() * h.clone()).is_negligible())
        {
            return Err(Error::Precondition(
                "B_tilt − B must be a multiple of H".into(),
            ));
        }
        let alpha = (t.a_squared.clone() + b.clone() * b.clone() - b2) / T::two();
        Ok(StabilityParams {
            h: t.h.clone(),
            b: base_b.to_vec(),
            alpha,
            beta: b + c,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{ch, product, q, qv, rank_one};

    fn params(h: &[i64], b: &[i64], alpha: Rational, beta: Rational) -> StabilityParams {
        StabilityParams::new(qv(h), qv(b), alpha, beta)
    }

    #[test]
    fn charge_examples() {
        let s = rank_one();
        let p = params(&[1], &[0], q(1, 1), q(0, 1));
        assert_eq!(
            s.central_charge(&p, &ChernCharacter::point(1)).unwrap(),
            (q(-1, 1), q(0, 1))
        );
        assert_eq!(
            s.central_charge(&p, &ch(1, &[0], q(0, 1))).unwrap(),
            (q(2, 1), q(0, 1))
        );
        // Im vanishes exactly at β = μ
        let v = ch(2, &[1], q(0, 1));
        let p = params(&[1], &[0], q(1, 1), q(1, 2));
        assert_eq!(s.central_charge(&p, &v).unwrap().1, q(0, 1));
    }

    #[test]
    fn kernel_example() {
        let s = rank_one();
        let k = s
            .kernel_basis(&params(&[1], &[0], q(1, 1), q(0, 1)))
            .unwrap();
        assert_eq!(k.basis, vec![vec![q(1, 1), q(0, 1), q(2, 1)]]);
        assert!(!k.degenerate);
    }

    #[test]
    fn kernel_on_rank_two_has_two_vectors() {
        let p = product();
        let sp = params(&[1, 2], &[1, 0], q(3, 2), q(-1, 3));
        let k = p.kernel_basis(&sp).unwrap();
        assert_eq!(k.basis.len(), 2);
        let z = p.charge_functional(&sp).unwrap();
        for v in &k.basis {
            assert_eq!(z.eval(v), (q(0, 1), q(0, 1)));
        }
        let pt = ChernCharacter::point(2);
        assert_eq!(z.eval_character(&pt).0, q(-1, 1));
    }

    #[test]
    fn tilt_examples() {
        let s = rank_one();
        let p = params(&[1], &[0], q(1, 1), q(0, 1));
        let t = s.normalized_to_tilt(&p).unwrap();
        assert_eq!(t.a_squared, q(2, 1));
        assert_eq!(t.b_tilt, qv(&[0]));
        assert_eq!(s.tilt_to_normalized(&t, &qv(&[0])).unwrap(), p);

        let vertex = params(&[1], &[1], q(5, 1), q(1, 1));
        assert_eq!(s.normalized_to_tilt(&vertex).unwrap().b_tilt, qv(&[1]));

        let low = params(&[1], &[0], q(-1, 1), q(0, 1));
        assert!(matches!(
            s.normalized_to_tilt(&low),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn tilt_roundtrips_on_rank_two() {
        let p = product();
        let sp = params(&[2, 1], &[1, -1], q(7, 3), q(1, 5));
        let t = p.normalized_to_tilt(&sp).unwrap();
        assert_eq!(p.tilt_to_normalized(&t, &sp.b).unwrap(), sp);
        let bad = TiltParams {
            b_tilt: qv(&[5, 5]),
            ..t
        };
        assert!(matches!(
            p.tilt_to_normalized(&bad, &sp.b),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn degenerate_kernel_is_flagged() {
        // the ch2 column keeps real charges nondegenerate
        let z = LinearCharge {
            re: qv(&[1, 0, 0]),
            im: qv(&[2, 0, 0]),
        };
        let k = z.kernel();
        assert!(k.degenerate);
        assert_eq!(k.basis.len(), 2);
    }

    #[test]
    fn float_charge() {
        let s = rank_one().cast::<f64>();
        let p = StabilityParams::new(vec![1.0], vec![0.0], 1.0, 0.0);
        let v = ChernCharacter::new(1.0, vec![0.0], 0.0);
        assert_eq!(s.central_charge(&p, &v).unwrap(), (2.0, 0.0));
    }
}
