//! Néron–Severi lattice with its intersection form and polyhedral cone data.

use std::fmt;

use crate::error::{check_len, Error, Result};
use crate::lepotier::LePotierProvider;
use crate::linalg::{dot, Matrix};
use crate::scalar::Scalar;
use crate::Rational;

/// Coordinates of a divisor class in the chosen basis of NS.
pub type DivisorClass<T = Rational> = Vec<T>;

/// Geometric type of a surface. Decides which Le Potier providers are
/// meaningful for it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SurfaceClass {
    Abelian,
    FiniteAlbanese,
    FreeQuotientOfFiniteAlbanese,
    General,
}

impl SurfaceClass {
    /// Surfaces on which Φ equals its Bogomolov–Gieseker bound.
    pub fn admits_closed_form(self) -> bool {
        !matches!(self, SurfaceClass::General)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SurfaceClass::Abelian => "abelian",
            SurfaceClass::FiniteAlbanese => "finite_albanese",
            SurfaceClass::FreeQuotientOfFiniteAlbanese => "free_quotient_of_finite_albanese",
            SurfaceClass::General => "general",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "abelian" => SurfaceClass::Abelian,
            "finite_albanese" => SurfaceClass::FiniteAlbanese,
            "free_quotient_of_finite_albanese" => SurfaceClass::FreeQuotientOfFiniteAlbanese,
            "general" => SurfaceClass::General,
            _ => return None,
        })
    }
}

impl fmt::Display for SurfaceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Raw inputs for [`SurfaceModel::new`].
#[derive(Clone, Debug)]
pub struct SurfaceData<T: Scalar = Rational> {
    pub name: String,
    pub gram: Matrix<T>,
    pub nef_inequalities: Vec<DivisorClass<T>>,
    pub effective_generators: Vec<DivisorClass<T>>,
    pub chtwo_denominator: u64,
    pub class: SurfaceClass,
    pub lp_provider: LePotierProvider<T>,
}

/// A validated surface: NS lattice, cones and a Le Potier provider.
/// Immutable once built.
#[derive(Clone, Debug)]
pub struct SurfaceModel<T: Scalar = Rational> {
    name: String,
    gram: Matrix<T>,
    nef_inequalities: Vec<DivisorClass<T>>,
    effective_generators: Vec<DivisorClass<T>>,
    chtwo_denominator: u64,
    class: SurfaceClass,
    lp_provider: LePotierProvider<T>,
}

impl<T: Scalar> SurfaceModel<T> {
    pub fn new(data: SurfaceData<T>) -> Result<Self> {
        let gram = data.gram;
        if !gram.is_square() || gram.rows() == 0 {
            return Err(Error::InvalidSurface(
                "gram must be a nonempty square matrix".into(),
            ));
        }
        if !gram.is_symmetric() {
            return Err(Error::InvalidSurface("gram must be symmetric".into()));
        }
        let rho = gram.rows();
        let inertia = gram.inertia();
        if inertia.positive != 1 || inertia.negative != rho - 1 || inertia.zero != 0 {
            return Err(Error::Signature {
                positive: inertia.positive,
                negative: inertia.negative,
                zero: inertia.zero,
            });
        }
        if data.nef_inequalities.is_empty() {
            return Err(Error::InvalidSurface(
                "nef_inequalities must be nonempty".into(),
            ));
        }
        if data.effective_generators.is_empty() {
            return Err(Error::InvalidSurface(
                "effective_generators must be nonempty".into(),
            ));
        }
        for v in data
            .nef_inequalities
            .iter()
            .chain(&data.effective_generators)
        {
            check_len(rho, v.len())?;
        }
        if data.chtwo_denominator == 0 {
            return Err(Error::InvalidSurface(
                "chtwo_denominator must be positive".into(),
            ));
        }
        data.lp_provider.validate(rho, data.class)?;
        Ok(SurfaceModel {
            name: data.name,
            gram,
            nef_inequalities: data.nef_inequalities,
            effective_generators: data.effective_generators,
            chtwo_denominator: data.chtwo_denominator,
            class: data.class,
            lp_provider: data.lp_provider,
        })
    }

    /// Same lattice and cones with another provider.
    pub fn with_provider(&self, provider: LePotierProvider<T>) -> Result<Self> {
        provider.validate(self.rank(), self.class)?;
        Ok(SurfaceModel {
            lp_provider: provider,
            ..self.clone()
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Matrix<T> {
        &self.gram
    }

    pub fn nef_inequalities(&self) -> &[DivisorClass<T>] {
        &self.nef_inequalities
    }

    pub fn effective_generators(&self) -> &[DivisorClass<T>] {
        &self.effective_generators
    }

    pub fn chtwo_denominator(&self) -> u64 {
        self.chtwo_denominator
    }

    pub fn class(&self) -> SurfaceClass {
        self.class
    }

    pub fn lp_provider(&self) -> &LePotierProvider<T> {
        &self.lp_provider
    }

    pub fn check_divisor(&self, d: &[T]) -> Result<()> {
        check_len(self.rank(), d.len())
    }

    /// `D1ᵀ · gram · D2`.
    pub fn intersect(&self, d1: &[T], d2: &[T]) -> Result<T> {
        self.check_divisor(d1)?;
        self.check_divisor(d2)?;
        Ok(self.gram.bilinear(d1, d2))
    }

    pub fn square(&self, d: &[T]) -> Result<T> {
        self.intersect(d, d)
    }

    /// `gram · D`: the linear functional `x ↦ D·x` as a row.
    pub fn dual(&self, d: &[T]) -> Result<Vec<T>> {
        self.check_divisor(d)?;
        Ok(self.gram.mul_vec(d))
    }

    /// Strict dual inequalities plus `H² > 0`. Wrong-length input is simply
    /// not ample.
    pub fn is_ample(&self, h: &[T]) -> bool {
        if h.len() != self.rank() {
            return false;
        }
        let gh = self.gram.mul_vec(h);
        dot(h, &gh) > T::zero()
            && self
                .nef_inequalities
                .iter()
                .all(|c| dot(c, &gh) > T::zero())
    }

    /// `min_j H·C_j`; positive exactly when H is strictly inside the dual
    /// cone.
    pub fn nef_margin(&self, h: &[T]) -> Result<T> {
        let gh = self.dual(h)?;
        let mut it = self.nef_inequalities.iter().map(|c| dot(c, &gh));
        let first = it.next().expect("nef_inequalities is nonempty");
        Ok(it.fold(first, T::min_of))
    }

    /// `(H·c)² − H²·c²`, nonnegative by the Hodge index theorem.
    pub fn hodge_index_defect(&self, h: &[T], c: &[T]) -> Result<T> {
        self.check_divisor(c)?;
        if !self.is_ample(h) {
            return Err(Error::NotAmple);
        }
        let hc = self.intersect(h, c)?;
        Ok(hc.clone() * hc - self.square(h)? * self.square(c)?)
    }

    pub(crate) fn require_ample(&self, h: &[T]) -> Result<()> {
        self.check_divisor(h)?;
        if self.is_ample(h) {
            Ok(())
        } else {
            Err(Error::NotAmple)
        }
    }
}

impl<T: Scalar> SurfaceModel<T> {
    /// Converts every entry to another scalar type. The lattice was already
    /// validated, so no checks are repeated.
    pub fn cast<U: Scalar>(&self) -> SurfaceModel<U> {
        let conv = |v: &Vec<T>| {
            v.iter()
                .map(|x| U::from_rational(&x.to_rational()))
                .collect()
        };
        SurfaceModel {
            name: self.name.clone(),
            gram: self.gram.map(|x| U::from_rational(&x.to_rational())),
            nef_inequalities: self.nef_inequalities.iter().map(conv).collect(),
            effective_generators: self.effective_generators.iter().map(conv).collect(),
            chtwo_denominator: self.chtwo_denominator,
            class: self.class,
            lp_provider: self.lp_provider.cast(),
        }
    }
}
