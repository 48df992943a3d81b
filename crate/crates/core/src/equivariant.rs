//! Free abelian quotients `π: X → Y = X/G` at the level of NS and Knum.

use std::sync::Arc;

use crate::charges::{LinearCharge, StabilityParams};
use crate::chern::ChernCharacter;
use crate::error::{check_len, Error, Result};
use crate::lattice::SurfaceModel;
use crate::lepotier::{CoverMap, LePotierProvider};
use crate::linalg::{dot, Matrix};
use crate::scalar::Scalar;
use crate::Rational;

/// Largest action group the constructor will close up.
const MAX_GROUP_IMAGE: usize = 4096;

#[derive(Clone, Debug)]
pub struct QuotientDatum<T: Scalar = Rational> {
    group_order: u64,
    /// `P: NS(Y) → NS(X)`, `ρ_X × ρ_Y`.
    pullback_ns: Matrix<T>,
    /// `F: NS(X) → NS(Y)`, `ρ_Y × ρ_X`.
    pushforward_ns: Matrix<T>,
    cover: Arc<SurfaceModel<T>>,
    base: Arc<SurfaceModel<T>>,
    action_ns: Vec<Matrix<T>>,
    /// Closure of `action_ns` under composition.
    action_image: Vec<Matrix<T>>,
}

impl<T: Scalar> QuotientDatum<T> {
    /// Validates `F·P = |G|·I`, `Pᵀ·gram_X·P = |G|·gram_Y`,
    /// `Fᵀ·gram_Y = gram_X·P`, `P·F = (|G|/|im|)·Σ_{g ∈ im} g`, and that each
    /// generator is an isometry permuting the cone data.
    pub fn new(
        group_order: u64,
        pullback_ns: Matrix<T>,
        pushforward_ns: Matrix<T>,
        cover: Arc<SurfaceModel<T>>,
        base: Arc<SurfaceModel<T>>,
        action_ns: Vec<Matrix<T>>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidQuotient(m));
        let (rx, ry) = (cover.rank(), base.rank());
        if group_order == 0 {
            return bad("group_order must be positive".into());
        }
        if (pullback_ns.rows(), pullback_ns.cols()) != (rx, ry) {
            return bad(format!("pullback_ns must be {rx}×{ry}"));
        }
        if (pushforward_ns.rows(), pushforward_ns.cols()) != (ry, rx) {
            return bad(format!("pushforward_ns must be {ry}×{rx}"));
        }
        let g = T::from_int(group_order as i64);
        let g_id = Matrix::identity(ry).scale(&g);
        if &pushforward_ns * &pullback_ns != g_id {
            return bad("F·P must equal |G|·I (projection formula)".into());
        }
        let pulled = &(&pullback_ns.transpose() * cover.gram()) * &pullback_ns;
        if pulled != base.gram().scale(&g) {
            return bad("Pᵀ·gram_X·P must equal |G|·gram_Y".into());
        }
        if &pushforward_ns.transpose() * base.gram() != cover.gram() * &pullback_ns {
            return bad("Fᵀ·gram_Y must equal gram_X·P".into());
        }
        for (i, a) in action_ns.iter().enumerate() {
            if (a.rows(), a.cols()) != (rx, rx) {
                return bad(format!("action matrix {i} must be {rx}×{rx}"));
            }
            if &(&a.transpose() * cover.gram()) * a != *cover.gram() {
                return bad(format!("action matrix {i} does not preserve gram_X"));
            }
            let permutes = |set: &[Vec<T>]| {
                set.iter()
                    .all(|v| set.iter().any(|w| positive_multiple(&a.mul_vec(v), w)))
            };
            if !permutes(cover.effective_generators()) {
                return bad(format!(
                    "action matrix {i} does not permute the effective generators"
                ));
            }
            // curves transform like classes, so the nef inequalities must be
            // permuted too
            if !permutes(cover.nef_inequalities()) {
                return bad(format!(
                    "action matrix {i} does not permute the nef inequalities"
                ));
            }
        }
        let image = close_group(rx, &action_ns)?;
        let mut sum = Matrix::zeros(rx, rx);
        for m in &image {
            sum = &sum + m;
        }
        let expected = sum.scale(&(g / T::from_int(image.len() as i64)));
        if &pullback_ns * &pushforward_ns != expected {
            return bad("P·F must equal the sum over G of the action".into());
        }
        Ok(QuotientDatum {
            group_order,
            pullback_ns,
            pushforward_ns,
            cover,
            base,
            action_ns,
            action_image: image,
        })
    }

    pub fn group_order(&self) -> u64 {
        self.group_order
    }

    fn order(&self) -> T {
        T::from_int(self.group_order as i64)
    }

    pub fn pullback_ns(&self) -> &Matrix<T> {
        &self.pullback_ns
    }

    pub fn pushforward_ns(&self) -> &Matrix<T> {
        &self.pushforward_ns
    }

    pub fn cover(&self) -> &Arc<SurfaceModel<T>> {
        &self.cover
    }

    pub fn base(&self) -> &Arc<SurfaceModel<T>> {
        &self.base
    }

    pub fn action_ns(&self) -> &[Matrix<T>] {
        &self.action_ns
    }

    /// Number of distinct NS matrices generated by the action.
    pub fn action_image_size(&self) -> usize {
        self.action_image.len()
    }

    /// Provider for the base that asks the cover.
    pub fn transfer_provider(&self) -> LePotierProvider<T> {
        LePotierProvider::QuotientTransfer(CoverMap {
            group_order: self.group_order,
            pullback_ns: self.pullback_ns.clone(),
            cover: self.cover.clone(),
        })
    }

    /// `π*` on Knum: `diag(1, P, |G|)`.
    pub fn pullback_knum(&self) -> Matrix<T> {
        let (rx, ry) = (self.cover.rank(), self.base.rank());
        let mut m = Matrix::zeros(rx + 2, ry + 2);
        m[(0, 0)] = T::one();
        for i in 0..rx {
            for j in 0..ry {
                m[(i + 1, j + 1)] = self.pullback_ns[(i, j)].clone();
            }
        }
        m[(rx + 1, ry + 1)] = self.order();
        m
    }

    /// `π_*` on Knum: `diag(|G|, F, 1)`.
    pub fn pushforward_knum(&self) -> Matrix<T> {
        let (rx, ry) = (self.cover.rank(), self.base.rank());
        let mut m = Matrix::zeros(ry + 2, rx + 2);
        m[(0, 0)] = self.order();
        for i in 0..ry {
            for j in 0..rx {
                m[(i + 1, j + 1)] = self.pushforward_ns[(i, j)].clone();
            }
        }
        m[(ry + 1, rx + 1)] = T::one();
        m
    }

    pub fn pullback_chern(&self, v: &ChernCharacter<T>) -> Result<ChernCharacter<T>> {
        self.base.check_character(v)?;
        Ok(ChernCharacter::new(
            v.ch0.clone(),
            self.pullback_ns.mul_vec(&v.ch1),
            self.order() * v.ch2.clone(),
        ))
    }

    pub fn pushforward_chern(&self, v: &ChernCharacter<T>) -> Result<ChernCharacter<T>> {
        self.cover.check_character(v)?;
        Ok(ChernCharacter::new(
            self.order() * v.ch0.clone(),
            self.pushforward_ns.mul_vec(&v.ch1),
            v.ch2.clone(),
        ))
    }

    pub fn pullback_divisor(&self, d: &[T]) -> Result<Vec<T>> {
        self.base.check_divisor(d)?;
        Ok(self.pullback_ns.mul_vec(d))
    }

    /// Parameters on X with the same `(α, β)` and pulled-back `H`, `B`.
    /// Their charge composed with `π*` is `|G|` times the original.
    pub fn pullback_params(&self, p: &StabilityParams<T>) -> Result<StabilityParams<T>> {
        Ok(StabilityParams::new(
            self.pullback_divisor(&p.h)?,
            self.pullback_divisor(&p.b)?,
            p.alpha.clone(),
            p.beta.clone(),
        ))
    }

    /// Every action generator fixes `H` and `B`.
    pub fn is_z_invariant(&self, p: &StabilityParams<T>) -> bool {
        if p.h.len() != self.cover.rank() || p.b.len() != self.cover.rank() {
            return false;
        }
        let gram = self.cover.gram();
        let gh = gram.mul_vec(&p.h);
        let gb = gram.mul_vec(&p.b);
        self.action_ns.iter().all(|a| {
            let at = a.transpose();
            at.mul_vec(&gh) == gh && at.mul_vec(&gb) == gb
        })
    }

    /// `Z_X ∘ π*` on Knum(Y), raw and renormalized.
    pub fn induce_central_charge(&self, p: &StabilityParams<T>) -> Result<InducedCharge<T>> {
        check_len(self.cover.rank(), p.h.len())?;
        check_len(self.cover.rank(), p.b.len())?;
        if !self.is_z_invariant(p) {
            return Err(Error::Precondition(
                "central charge is not G-invariant".into(),
            ));
        }
        let z = self.cover.charge_functional(p)?;
        let functional = z.compose(&self.pullback_knum());
        let inv = T::one() / self.order();
        let normalized = StabilityParams::new(
            self.pushforward_ns
                .mul_vec(&p.h)
                .into_iter()
                .map(|x| x * inv.clone())
                .collect(),
            self.pushforward_ns
                .mul_vec(&p.b)
                .into_iter()
                .map(|x| x * inv.clone())
                .collect(),
            p.alpha.clone(),
            p.beta.clone(),
        );
        let point = ChernCharacter::point(self.base.rank()).to_vec();
        let point_value = functional.eval(&point).0;
        Ok(InducedCharge {
            functional,
            normalized,
            point_value,
        })
    }

    /// `(Z_X ∘ π*) ∘ π_*` on Knum(X); equals `|G|·Z_X` for invariant `Z_X`.
    pub fn double_induction(&self, p: &StabilityParams<T>) -> Result<LinearCharge<T>> {
        let induced = self.induce_central_charge(p)?;
        Ok(induced.functional.compose(&self.pushforward_knum()))
    }

    /// Checks that the dual group acts trivially on Knum(Y): tensoring with
    /// a numerically trivial line bundle, `ch = (1, 0, 0)`, fixes a basis.
    pub fn ghat_action_on_knum(&self) -> GhatReport<T> {
        let n = self.base.rank() + 2;
        let line = ChernCharacter::structure_sheaf(self.base.rank());
        let mut columns = Vec::with_capacity(n);
        for i in 0..n {
            let mut e = vec![T::zero(); n];
            e[i] = T::one();
            let v = ChernCharacter::from_slice(&e).expect("basis vector has length ρ+2");
            let image = self
                .base
                .chern_product(&line, &v)
                .expect("dimensions agree by construction");
            columns.push(image.to_vec());
        }
        let matrix = Matrix::from_columns(&columns).expect("square");
        let identity = matrix == Matrix::identity(n);
        GhatReport { matrix, identity }
    }
}

/// Charge on Y obtained from X.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedCharge<T: Scalar = Rational> {
    /// `Z_X ∘ π*` itself.
    pub functional: LinearCharge<T>,
    /// The same charge divided by `|G|`, as normalized parameters on Y.
    pub normalized: StabilityParams<T>,
    /// Raw value on the point class of Y, `−|G|`.
    pub point_value: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GhatReport<T: Scalar = Rational> {
    pub matrix: Matrix<T>,
    pub identity: bool,
}

fn positive_multiple<T: Scalar>(a: &[T], b: &[T]) -> bool {
    // a = λb with λ > 0  ⇔  a, b parallel and a·b > 0
    let ab = dot(a, b);
    if ab <= T::zero() {
        return false;
    }
    let aa = dot(a, a);
    let bb = dot(b, b);
    (ab.clone() * ab - aa * bb).is_negligible()
}

fn close_group<T: Scalar>(n: usize, gens: &[Matrix<T>]) -> Result<Vec<Matrix<T>>> {
    let mut elems = vec![Matrix::identity(n)];
    let mut frontier = elems.clone();
    while let Some(m) = frontier.pop() {
        for g in gens {
            let p = g * &m;
            if !elems.contains(&p) {
                if elems.len() >= MAX_GROUP_IMAGE {
                    return Err(Error::InvalidQuotient(
                        "action generates more than 4096 matrices".into(),
                    ));
                }
                elems.push(p.clone());
                frontier.push(p);
            }
        }
    }
    Ok(elems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{bielliptic_datum, ch, q, qv, swap_datum};

    #[test]
    fn pullback_examples() {
        let d = bielliptic_datum(2);
        let o = ChernCharacter::structure_sheaf(2);
        assert_eq!(d.pullback_chern(&o).unwrap(), o);
        let pt = ChernCharacter::point(2);
        assert_eq!(d.pullback_chern(&pt).unwrap().ch2, q(2, 1));
        assert_eq!(d.pushforward_chern(&pt).unwrap(), pt);
    }

    #[test]
    fn pushforward_of_pullback_is_multiplication_by_order() {
        let d = bielliptic_datum(3);
        let o = ChernCharacter::structure_sheaf(2);
        let back = d.pushforward_chern(&d.pullback_chern(&o).unwrap()).unwrap();
        assert_eq!(back, ch(3, &[0, 0], q(0, 1)));
        let v = ch(2, &[1, -3], q(5, 2));
        let back = d.pushforward_chern(&d.pullback_chern(&v).unwrap()).unwrap();
        assert_eq!(back, v.scale(&q(3, 1)));
    }

    #[test]
    fn slope_and_nu_survive_pullback() {
        let d = bielliptic_datum(2);
        let (h, b) = (qv(&[1, 2]), qv(&[1, 0]));
        let v = ch(3, &[1, 2], q(1, 2));
        let pv = d.pullback_chern(&v).unwrap();
        let ph = d.pullback_divisor(&h).unwrap();
        let pb = d.pullback_divisor(&b).unwrap();
        assert_eq!(
            d.base().mu_h(&h, &v).unwrap(),
            d.cover().mu_h(&ph, &pv).unwrap()
        );
        assert_eq!(
            d.base().nu_hb(&h, &b, &v).unwrap(),
            d.cover().nu_hb(&ph, &pb, &pv).unwrap()
        );
    }

    #[test]
    fn induced_charge_sends_the_point_to_minus_order() {
        let d = bielliptic_datum(2);
        let py = StabilityParams::new(qv(&[1, 1]), qv(&[0, 1]), q(3, 2), q(1, 3));
        let px = d.pullback_params(&py).unwrap();
        let induced = d.induce_central_charge(&px).unwrap();
        assert_eq!(induced.point_value, q(-2, 1));
        assert_eq!(induced.normalized, py);
        let zy = d.base().charge_functional(&py).unwrap();
        assert_eq!(induced.functional, zy.scale(&q(2, 1)));
    }

    #[test]
    fn double_induction_rescales_by_order() {
        let d = bielliptic_datum(3);
        let px = d
            .pullback_params(&StabilityParams::new(
                qv(&[2, 1]),
                qv(&[1, 1]),
                q(5, 3),
                q(-1, 2),
            ))
            .unwrap();
        let z = d.cover().charge_functional(&px).unwrap();
        assert_eq!(d.double_induction(&px).unwrap(), z.scale(&q(3, 1)));
    }

    #[test]
    fn invariance_examples() {
        let d = swap_datum();
        let swapped = StabilityParams::new(qv(&[1, 2]), qv(&[0, 0]), q(1, 1), q(0, 1));
        assert!(!d.is_z_invariant(&swapped));
        let sym = StabilityParams::new(qv(&[1, 1]), qv(&[2, 2]), q(1, 1), q(0, 1));
        assert!(d.is_z_invariant(&sym));
        assert!(d.induce_central_charge(&swapped).is_err());
        let trivial = bielliptic_datum(2);
        assert!(trivial.is_z_invariant(&swapped));
        // the swap double induction still rescales by |G|
        let z = d.cover().charge_functional(&sym).unwrap();
        assert_eq!(d.double_induction(&sym).unwrap(), z.scale(&q(2, 1)));
    }

    #[test]
    fn ghat_action_is_identity() {
        let r = bielliptic_datum(2).ghat_action_on_knum();
        assert!(r.identity);
    }

    #[test]
    fn constructor_rejects_broken_projection_formula() {
        let d = bielliptic_datum(2);
        let bad_f = Matrix::identity(2).scale(&q(2, 1));
        let err = QuotientDatum::new(
            2,
            d.pullback_ns().clone(),
            bad_f,
            d.cover().clone(),
            d.base().clone(),
            vec![Matrix::identity(2)],
        )
        .unwrap_err();
        assert!(err.to_string().contains("F·P"));
    }

    #[test]
    fn constructor_rejects_non_isometries() {
        let d = bielliptic_datum(2);
        let stretch =
            Matrix::from_rows(vec![vec![q(2, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]).unwrap();
        assert!(QuotientDatum::new(
            2,
            d.pullback_ns().clone(),
            d.pushforward_ns().clone(),
            d.cover().clone(),
            d.base().clone(),
            vec![stretch],
        )
        .is_err());
    }
}
