//! Small fixtures shared by the unit tests.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::chern::ChernCharacter;
use crate::equivariant::QuotientDatum;
use crate::lattice::{SurfaceClass, SurfaceData, SurfaceModel};
use crate::lepotier::{CoverMap, LePotierProvider};
use crate::linalg::Matrix;
use crate::Rational;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qv(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| q(x, 1)).collect()
}

pub fn ch(ch0: i64, c1: &[i64], ch2: Rational) -> ChernCharacter {
    ChernCharacter::new(q(ch0, 1), qv(c1), ch2)
}

fn mat(rows: &[&[i64]]) -> Matrix<Rational> {
    Matrix::from_rows(rows.iter().map(|r| qv(r)).collect()).unwrap()
}

/// `gram = [[2]]`, abelian, closed form, `ch2 ∈ ½Z`.
pub fn rank_one_data() -> SurfaceData {
    SurfaceData {
        name: "rank_one".into(),
        gram: mat(&[&[2]]),
        nef_inequalities: vec![qv(&[1])],
        effective_generators: vec![qv(&[1])],
        chtwo_denominator: 2,
        class: SurfaceClass::Abelian,
        lp_provider: LePotierProvider::QuadraticClosedForm,
    }
}

pub fn rank_one() -> SurfaceModel {
    SurfaceModel::new(rank_one_data()).unwrap()
}

fn hyperbolic(name: &str, class: SurfaceClass) -> SurfaceModel {
    SurfaceModel::new(SurfaceData {
        name: name.into(),
        gram: mat(&[&[0, 1], &[1, 0]]),
        nef_inequalities: vec![qv(&[1, 0]), qv(&[0, 1])],
        effective_generators: vec![qv(&[1, 0]), qv(&[0, 1])],
        chtwo_denominator: 1,
        class,
        lp_provider: LePotierProvider::QuadraticClosedForm,
    })
    .unwrap()
}

/// `E × F`, hyperbolic plane.
pub fn product() -> SurfaceModel {
    hyperbolic("product", SurfaceClass::Abelian)
}

/// `C1 × C2` with higher-genus factors.
pub fn curve_product() -> SurfaceModel {
    hyperbolic("curve_product", SurfaceClass::FiniteAlbanese)
}

fn quotient_base(
    name: &str,
    order: i64,
    gram: Matrix<Rational>,
    p: Matrix<Rational>,
    nef: Vec<Vec<Rational>>,
) -> SurfaceModel {
    SurfaceModel::new(SurfaceData {
        name: name.into(),
        gram,
        nef_inequalities: nef.clone(),
        effective_generators: nef,
        chtwo_denominator: 1,
        class: SurfaceClass::FreeQuotientOfFiniteAlbanese,
        lp_provider: LePotierProvider::QuotientTransfer(CoverMap {
            group_order: order as u64,
            pullback_ns: p,
            cover: Arc::new(product()),
        }),
    })
    .unwrap()
}

/// `(E × F)/G` with trivial action on NS and `P = |G|·I`.
pub fn bielliptic(order: i64) -> SurfaceModel {
    quotient_base(
        "bielliptic",
        order,
        mat(&[&[0, order], &[order, 0]]),
        Matrix::identity(2).scale(&q(order, 1)),
        vec![qv(&[1, 0]), qv(&[0, 1])],
    )
}

pub fn bielliptic_datum(order: i64) -> QuotientDatum {
    let base = bielliptic(order);
    QuotientDatum::new(
        order as u64,
        Matrix::identity(2).scale(&q(order, 1)),
        Matrix::identity(2),
        Arc::new(product()),
        Arc::new(base),
        vec![Matrix::identity(2)],
    )
    .unwrap()
}

/// `Z/2` swapping the two factors of `E × E`-style NS data.
pub fn swap_datum() -> QuotientDatum {
    let p = mat(&[&[1], &[1]]);
    let base = quotient_base("swap", 2, mat(&[&[1]]), p.clone(), vec![qv(&[1])]);
    QuotientDatum::new(
        2,
        p,
        mat(&[&[1, 1]]),
        Arc::new(product()),
        Arc::new(base),
        vec![mat(&[&[0, 1], &[1, 0]])],
    )
    .unwrap()
}
