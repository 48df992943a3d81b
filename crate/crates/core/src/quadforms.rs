//! Quadratic forms on `Knum ⊗ Q` used for the support property, with exact
//! definiteness checks and the δ, ε and `C_H` selectors.

use crate::charges::{Kernel, LinearCharge, StabilityParams};
use crate::chern::ChernCharacter;
use crate::error::{check_len, Error, Result};
use crate::lattice::SurfaceModel;
use crate::linalg::{linearly_independent, Matrix};
use crate::scalar::Scalar;
use crate::Rational;

/// Symmetric `(ρ+2)×(ρ+2)` matrix in `(ch0, ch1, ch2)` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadForm<T: Scalar = Rational> {
    matrix: Matrix<T>,
}

impl<T: Scalar> QuadForm<T> {
    pub fn new(matrix: Matrix<T>) -> Result<Self> {
        if !matrix.is_symmetric() {
            return Err(Error::Precondition(
                "quadratic form must be symmetric".into(),
            ));
        }
        Ok(QuadForm { matrix })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn eval(&self, v: &[T]) -> T {
        self.matrix.bilinear(v, v)
    }

    pub fn bilinear(&self, u: &[T], w: &[T]) -> T {
        self.matrix.bilinear(u, w)
    }

    pub fn eval_character(&self, v: &ChernCharacter<T>) -> T {
        self.eval(&v.to_vec())
    }

    pub fn add(&self, other: &Self) -> Self {
        QuadForm {
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn scale(&self, k: &T) -> Self {
        QuadForm {
            matrix: self.matrix.scale(k),
        }
    }

    /// Restriction `BᵀQB` to the span of `basis`.
    pub fn restrict(&self, basis: &[Vec<T>]) -> Result<Matrix<T>> {
        for b in basis {
            check_len(self.dim(), b.len())?;
        }
        if !linearly_independent(basis) {
            return Err(Error::Precondition("basis is linearly dependent".into()));
        }
        Ok(self.matrix.restrict(basis))
    }

    /// Leading principal minors of the restriction to `basis`.
    pub fn restricted_minors(&self, basis: &[Vec<T>]) -> Result<Vec<T>> {
        Ok(self.restrict(basis)?.leading_principal_minors())
    }

    /// Negative definiteness on `span(basis)`: the k-th leading minor of
    /// `BᵀQB` has sign `(−1)^k`.
    pub fn is_negative_definite_on(&self, basis: &[Vec<T>]) -> Result<bool> {
        let minors = self.restricted_minors(basis)?;
        Ok(minors_negative_definite(&minors))
    }

    /// Adds `k·(ℓ·v)²` to the form.
    fn add_square(&mut self, l: &[T], k: &T) {
        let n = self.dim();
        for i in 0..n {
            for j in 0..n {
                self.matrix[(i, j)] =
                    self.matrix[(i, j)].clone() + k.clone() * l[i].clone() * l[j].clone();
            }
        }
    }

    /// Adds `k·x_i·x_j` to the form, split symmetrically.
    fn add_product(&mut self, i: usize, j: usize, k: &T) {
        if i == j {
            self.matrix[(i, i)] = self.matrix[(i, i)].clone() + k.clone();
        } else {
            let half = T::half() * k.clone();
            self.matrix[(i, j)] = self.matrix[(i, j)].clone() + half.clone();
            self.matrix[(j, i)] = self.matrix[(j, i)].clone() + half;
        }
    }
}

pub fn minors_negative_definite<T: Scalar>(minors: &[T]) -> bool {
    minors.iter().enumerate().all(|(k, m)| {
        if k % 2 == 0 {
            *m < T::zero()
        } else {
            *m > T::zero()
        }
    })
}

/// `Q^{δ,ε} = Q_δ + ε·Q_BG`.
pub fn build_q_combined<T: Scalar>(
    q_delta: &QuadForm<T>,
    q_bg: &QuadForm<T>,
    epsilon: &T,
) -> Result<QuadForm<T>> {
    if *epsilon <= T::zero() {
        return Err(Error::Precondition("epsilon must be positive".into()));
    }
    if q_delta.dim() != q_bg.dim() {
        return Err(Error::Dimension {
            expected: q_delta.dim(),
            found: q_bg.dim(),
        });
    }
    Ok(q_delta.add(&q_bg.scale(epsilon)))
}

/// One maximizing point of `−D²` on the slice `H·D = 1` of the effective
/// cone.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateEntry<T: Scalar = Rational> {
    /// Indices of the effective generators spanning the face.
    pub face: Vec<usize>,
    pub point: Vec<T>,
    /// `−D²/(H·D)²` at the point.
    pub ratio: T,
}

/// Least `C ≥ 0` with `C·(H·D)² + D² ≥ 0` on the effective cone.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeConstant<T: Scalar = Rational> {
    pub value: T,
    pub certificate: Vec<CertificateEntry<T>>,
    /// `false` when the face budget ran out and a padded vertex bound was
    /// returned instead.
    pub certified: bool,
}

pub const DEFAULT_FACE_BUDGET: usize = 100_000;

/// Outcome of [`jh_form_inequality`].
#[derive(Clone, Debug, PartialEq)]
pub struct JhReport<T: Scalar = Rational> {
    pub lambda: T,
    pub proportional: bool,
    pub cross_term: T,
    /// `2Q(u, w) > 0`.
    pub cross_positive: bool,
    /// `Q(u + w) > Q(u)`.
    pub q_sum_exceeds: bool,
}

/// Checks the bilinear core of the Jordan–Hölder comparison lemmas for two
/// classes on one ray of `Z`.
pub fn jh_form_inequality<T: Scalar>(
    q: &QuadForm<T>,
    z: &LinearCharge<T>,
    u: &[T],
    w: &[T],
) -> Result<JhReport<T>> {
    check_len(q.dim(), u.len())?;
    check_len(q.dim(), w.len())?;
    let qu = q.eval(u);
    let qw = q.eval(w);
    if qu < T::zero() || qw < T::zero() {
        return Err(Error::Precondition(
            "Q(u) and Q(w) must be nonnegative".into(),
        ));
    }
    let (ur, ui) = z.eval(u);
    let (wr, wi) = z.eval(w);
    let lambda = if !wr.is_zero() {
        ur.clone() / wr.clone()
    } else if !wi.is_zero() {
        ui.clone() / wi.clone()
    } else {
        return Err(Error::Precondition("Z(w) = 0".into()));
    };
    if lambda <= T::zero()
        || !(ur - lambda.clone() * wr).is_negligible()
        || !(ui - lambda.clone() * wi).is_negligible()
    {
        return Err(Error::Precondition(
            "Z(u) is not a positive multiple of Z(w)".into(),
        ));
    }
    let x: Vec<T> = u
        .iter()
        .zip(w)
        .map(|(a, b)| a.clone() - lambda.clone() * b.clone())
        .collect();
    let proportional = x.iter().all(|c| c.is_negligible());
    if !proportional && q.eval(&x) >= T::zero() {
        return Err(Error::Precondition(
            "Q is not negative on ker Z at u − λw".into(),
        ));
    }
    let cross = q.bilinear(u, w);
    let sum: Vec<T> = u
        .iter()
        .zip(w)
        .map(|(a, b)| a.clone() + b.clone())
        .collect();
    Ok(JhReport {
        lambda,
        proportional,
        cross_positive: T::two() * cross.clone() > T::zero(),
        cross_term: cross,
        q_sum_exceeds: q.eval(&sum) > qu,
    })
}

/// Everything the support-property check produces for one `(α₀, β₀)`.
#[derive(Clone, Debug)]
pub struct SupportData<T: Scalar = Rational> {
    pub cone_constant: ConeConstant<T>,
    pub delta: T,
    pub epsilon: T,
    pub form: QuadForm<T>,
    pub kernel: Kernel<T>,
    pub minors: Vec<T>,
    pub negative_definite: bool,
}

impl<T: Scalar> SurfaceModel<T> {
    fn form_dim(&self) -> usize {
        self.rank() + 2
    }

    /// `Q_BG = ch1² − 2ch0ch2`.
    pub fn q_bg_form(&self) -> QuadForm<T> {
        let n = self.form_dim();
        let mut m = Matrix::zeros(n, n);
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                m[(i + 1, j + 1)] = self.gram()[(i, j)].clone();
            }
        }
        m[(0, n - 1)] = -T::one();
        m[(n - 1, 0)] = -T::one();
        QuadForm { matrix: m }
    }

    /// `ℓ(v) = H·ch1 − (H·B)ch0 = H·ch1^B`.
    fn twisted_h_row(&self, h: &[T], b: &[T]) -> Result<Vec<T>> {
        let mut l = vec![-self.intersect(h, b)?];
        l.extend(self.dual(h)?);
        l.push(T::zero());
        Ok(l)
    }

    /// `Δ = Q_BG + C_H·(H·ch1^B)²`.
    pub fn build_delta_form(&self, h: &[T], b: &[T], c_h: &T) -> Result<QuadForm<T>> {
        if *c_h < T::zero() {
            return Err(Error::Precondition("C_H must be nonnegative".into()));
        }
        let mut q = self.q_bg_form();
        q.add_square(&self.twisted_h_row(h, b)?, c_h);
        Ok(q)
    }

    /// `Q_δ = δ⁻¹(H·ch1 − β₀H²ch0)² − (H²ch0)(ch2 − B·ch1 − (α₀−δ)H²ch0)`.
    pub fn build_q_delta(
        &self,
        h: &[T],
        b: &[T],
        alpha0: &T,
        beta0: &T,
        delta: &T,
    ) -> Result<QuadForm<T>> {
        if *delta <= T::zero() {
            return Err(Error::Precondition("delta must be positive".into()));
        }
        self.check_divisor(b)?;
        let n = self.form_dim();
        let h2 = self.square(h)?;
        let mut l = vec![-(beta0.clone() * h2.clone())];
        l.extend(self.dual(h)?);
        l.push(T::zero());
        let mut q = QuadForm {
            matrix: Matrix::zeros(n, n),
        };
        q.add_square(&l, &(T::one() / delta.clone()));
        q.add_product(0, n - 1, &-h2.clone());
        for (i, gb) in self.dual(b)?.into_iter().enumerate() {
            q.add_product(0, i + 1, &(h2.clone() * gb));
        }
        let shift = alpha0.clone() - delta.clone();
        q.add_product(0, 0, &(shift * h2.clone() * h2));
        Ok(q)
    }

    /// `C_H` by exact enumeration of the faces of
    /// `P = {D ∈ Eff : H·D = 1}` with the default face budget.
    pub fn compute_c_h(&self, h: &[T]) -> Result<ConeConstant<T>> {
        self.compute_c_h_with_budget(h, DEFAULT_FACE_BUDGET)
    }

    pub fn compute_c_h_with_budget(&self, h: &[T], budget: usize) -> Result<ConeConstant<T>> {
        self.require_ample(h)?;
        let mut verts = Vec::new();
        for (i, g) in self.effective_generators().iter().enumerate() {
            let hg = self.intersect(h, g)?;
            if hg <= T::zero() {
                return Err(Error::Precondition(format!(
                    "effective generator {i} has H·g = {hg} ≤ 0: cone not pointed or H not \
                     positive on it"
                )));
            }
            verts.push(g.iter().map(|x| x.clone() / hg.clone()).collect::<Vec<T>>());
        }
        let f = |d: &[T]| -self.gram().bilinear(d, d);
        let max_size = self.rank().min(verts.len());
        let subsets = subset_count(verts.len(), max_size);

        if subsets.is_none_or(|c| c > budget) {
            let entries: Vec<CertificateEntry<T>> = verts
                .iter()
                .enumerate()
                .map(|(i, v)| CertificateEntry {
                    face: vec![i],
                    point: v.clone(),
                    ratio: f(v),
                })
                .collect();
            let best = entries
                .iter()
                .map(|e| e.ratio.clone())
                .fold(T::zero(), T::max_of);
            let certificate = entries.into_iter().filter(|e| e.ratio == best).collect();
            return Ok(ConeConstant {
                value: T::two() * best,
                certificate,
                certified: false,
            });
        }

        let mut entries: Vec<CertificateEntry<T>> = Vec::new();
        for size in 1..=max_size {
            for face in combinations(verts.len(), size) {
                if let Some(point) = self.face_stationary_point(&verts, &face) {
                    let ratio = f(&point);
                    entries.push(CertificateEntry { face, point, ratio });
                }
            }
        }
        let best = entries
            .iter()
            .map(|e| e.ratio.clone())
            .reduce(T::max_of)
            .expect("every vertex is a candidate");
        let mut certificate: Vec<CertificateEntry<T>> = Vec::new();
        for e in entries.into_iter().filter(|e| e.ratio == best) {
            if !certificate.iter().any(|c| c.point == e.point) {
                certificate.push(e);
            }
        }
        Ok(ConeConstant {
            value: T::max_of(best, T::zero()),
            certificate,
            certified: true,
        })
    }

    /// Critical point of `D²` on the affine hull of a face, if it exists,
    /// is unique and lies in the relative interior.
    fn face_stationary_point(&self, verts: &[Vec<T>], face: &[usize]) -> Option<Vec<T>> {
        let v0 = &verts[face[0]];
        if face.len() == 1 {
            return Some(v0.clone());
        }
        let edges: Vec<Vec<T>> = face[1..]
            .iter()
            .map(|&j| {
                verts[j]
                    .iter()
                    .zip(v0)
                    .map(|(a, b)| a.clone() - b.clone())
                    .collect()
            })
            .collect();
        if !linearly_independent(&edges) {
            return None;
        }
        let k = edges.len();
        let g = self.gram();
        let a = Matrix::from_fn(k, k, |i, j| g.bilinear(&edges[i], &edges[j]));
        let rhs: Vec<T> = edges.iter().map(|e| -g.bilinear(e, v0)).collect();
        let t = a.solve(&rhs)?;
        let t0 = t.iter().fold(T::one(), |acc, x| acc - x.clone());
        if t0 <= T::zero() || t.iter().any(|x| *x <= T::zero()) {
            return None;
        }
        let mut point = v0.clone();
        for (ti, e) in t.iter().zip(&edges) {
            for (p, x) in point.iter_mut().zip(e) {
                *p = p.clone() + ti.clone() * x.clone();
            }
        }
        Some(point)
    }

    /// A certified δ with `(x−β₀)²/δ + α₀ − δ ≥ Φ(x)` for all `x`.
    ///
    /// Above the BG parabola the admissible δ are `0 < δ ≤ δ*` where `δ*`
    /// is the smaller root of `2δ² − (4 + d² + 2m)δ + 4m`,
    /// `m = α₀ − ub(β₀)`, `d = β₀ − H·B/H²`; the answer is `9/10` of a
    /// rational lower approximation of `δ*`. Otherwise δ is halved until
    /// the provider certifies domination.
    pub fn choose_delta(&self, h: &[T], b: &[T], alpha0: &T, beta0: &T) -> Result<T> {
        self.require_ample(h)?;
        let phi = self.phi(h, b, beta0)?;
        if !phi.lt_finite(alpha0) {
            return Err(Error::Precondition(format!(
                "α₀ = {alpha0} must exceed Φ(β₀) = {phi}"
            )));
        }
        let margin = T::ratio(9, 10);
        let m = alpha0.clone() - self.upper_bound(h, b, beta0)?;
        if m > T::zero() {
            let (c, _) = self.parabola_data(h, b)?;
            let d = beta0.clone() - c;
            let delta = margin * delta_supremum(&m, &(d.clone() * d));
            if !self.parabola_dominates_ub(h, b, alpha0, beta0, &delta)? {
                return Err(Error::Certification(format!(
                    "δ = {delta} failed the domination check"
                )));
            }
            return Ok(delta);
        }
        let gap = match phi.finite() {
            Some(p) => T::min_of(alpha0.clone() - p.clone(), T::one()),
            None => T::one(),
        };
        let mut delta = margin * gap;
        for _ in 0..64 {
            if self.parabola_dominates_phi(h, b, alpha0, beta0, &delta)? {
                return Ok(delta);
            }
            delta = delta / T::two();
        }
        Err(Error::Certification(
            "no δ certified after 64 halvings".into(),
        ))
    }

    pub(crate) fn parabola_dominates_ub(
        &self,
        h: &[T],
        b: &[T],
        alpha0: &T,
        beta0: &T,
        delta: &T,
    ) -> Result<bool> {
        if *delta <= T::zero() || *delta >= T::two() {
            return Ok(false);
        }
        let (c, _) = self.parabola_data(h, b)?;
        let d = beta0.clone() - c;
        let m = alpha0.clone() - self.upper_bound(h, b, beta0)?;
        Ok(domination_lhs(delta, &(d.clone() * d)) <= m)
    }

    /// ε by halving from `δ⁻¹/(2·max(C_H, 1))` until `Q^{δ,ε}` is negative
    /// definite on `ker Z_{α₀,β₀}`.
    #[allow(clippy::too_many_arguments)]
    pub fn choose_epsilon(
        &self,
        h: &[T],
        b: &[T],
        alpha0: &T,
        beta0: &T,
        delta: &T,
        c_h: &T,
    ) -> Result<T> {
        let params = StabilityParams::new(h.to_vec(), b.to_vec(), alpha0.clone(), beta0.clone());
        let kernel = self.kernel_basis(&params)?;
        if kernel.degenerate {
            return Err(Error::Precondition("kernel of Z is degenerate".into()));
        }
        let q_delta = self.build_q_delta(h, b, alpha0, beta0, delta)?;
        let q_bg = self.q_bg_form();
        let mut eps = (T::one() / delta.clone()) / (T::two() * T::max_of(c_h.clone(), T::one()));
        for _ in 0..=64 {
            let q = build_q_combined(&q_delta, &q_bg, &eps)?;
            if q.is_negative_definite_on(&kernel.basis)? {
                return Ok(eps);
            }
            eps = eps / T::two();
        }
        Err(Error::Certification("no ε found in 64 halvings".into()))
    }

    /// Runs `C_H`, δ and ε selection and certifies `Q^{δ,ε}` on the kernel.
    pub fn support_property(&self, p: &StabilityParams<T>) -> Result<SupportData<T>> {
        let cone_constant = self.compute_c_h(&p.h)?;
        let delta = self.choose_delta(&p.h, &p.b, &p.alpha, &p.beta)?;
        let epsilon =
            self.choose_epsilon(&p.h, &p.b, &p.alpha, &p.beta, &delta, &cone_constant.value)?;
        self.support_property_with(p, cone_constant, delta, epsilon)
    }

    /// Certification for caller-chosen δ and ε.
    pub fn support_property_with(
        &self,
        p: &StabilityParams<T>,
        cone_constant: ConeConstant<T>,
        delta: T,
        epsilon: T,
    ) -> Result<SupportData<T>> {
        let q_delta = self.build_q_delta(&p.h, &p.b, &p.alpha, &p.beta, &delta)?;
        let form = build_q_combined(&q_delta, &self.q_bg_form(), &epsilon)?;
        let kernel = self.kernel_basis(p)?;
        let minors = form.restricted_minors(&kernel.basis)?;
        let negative_definite = !kernel.degenerate && minors_negative_definite(&minors);
        Ok(SupportData {
            cone_constant,
            delta,
            epsilon,
            form,
            kernel,
            minors,
            negative_definite,
        })
    }

    /// `Ψ_α: (ch0, ch1, ch2) ↦ (ch0, ch1, ch2 + (α − α₀)H²ch0)`.
    pub fn transport_alpha(&self, h: &[T], alpha0: &T, alpha: &T, v: &[T]) -> Result<Vec<T>> {
        check_len(self.form_dim(), v.len())?;
        let h2 = self.square(h)?;
        let mut out = v.to_vec();
        let n = out.len();
        out[n - 1] = out[n - 1].clone() + (alpha.clone() - alpha0.clone()) * h2 * v[0].clone();
        Ok(out)
    }

    /// `Ψ_a`: in B-twisted coordinates `ch2 ↦ ch2 + (a² − 1)(H²/2)ch0`.
    pub fn transport_a(&self, h: &[T], b: &[T], a_squared: &T, v: &[T]) -> Result<Vec<T>> {
        check_len(self.form_dim(), v.len())?;
        let h2 = self.square(h)?;
        let mut tw = self.twist(&ChernCharacter::from_slice(v)?, b)?;
        tw.ch2 = tw.ch2.clone() + (a_squared.clone() - T::one()) * T::half() * h2 * tw.ch0.clone();
        let neg_b: Vec<T> = b.iter().map(|x| -x.clone()).collect();
        Ok(self.twist(&tw, &neg_b)?.to_vec())
    }

    /// Normalized parameters whose kernel is the target of `Ψ_a`:
    /// `β = H·B/H²`, `α = (a² − B²/H²)/2`.
    pub fn tilt_kernel_params(
        &self,
        h: &[T],
        b: &[T],
        a_squared: &T,
    ) -> Result<StabilityParams<T>> {
        let (c, b2) = self.parabola_data(h, b)?;
        Ok(StabilityParams::new(
            h.to_vec(),
            b.to_vec(),
            (a_squared.clone() - b2) / T::two(),
            c,
        ))
    }
}

/// `h(δ) = δ(1 + d²/(2(2 − δ)))`, for `0 < δ < 2`.
fn domination_lhs<T: Scalar>(delta: &T, d2: &T) -> T {
    delta.clone() * (T::one() + d2.clone() / (T::two() * (T::two() - delta.clone())))
}

/// Largest admissible δ, or a rational lower approximation of it accurate
/// to `2⁻⁴⁸·min(m, 2)` when it is irrational.
fn delta_supremum<T: Scalar>(m: &T, d2: &T) -> T {
    let hi = T::min_of(m.clone(), T::two());
    if d2.is_zero() {
        return hi;
    }
    let mut lo = T::zero();
    let mut hi = hi;
    for _ in 0..48 {
        let mid = (lo.clone() + hi.clone()) * T::half();
        if mid < T::two() && domination_lhs(&mid, d2) <= *m {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `Σ_{k=1}^{max} C(n, k)`, or `None` on overflow.
fn subset_count(n: usize, max: usize) -> Option<usize> {
    let mut total: usize = 0;
    let mut c: usize = 1;
    for k in 1..=max {
        c = c.checked_mul(n + 1 - k)? / k;
        total = total.checked_add(c)?;
    }
    Some(total)
}

/// k-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testing::{ch, product, q, qv, rank_one};

    #[test]
    fn q_bg_matches_direct_formula() {
        let s = rank_one();
        let q_bg = s.q_bg_form();
        let v = ch(3, &[2], q(1, 2));
        assert_eq!(q_bg.eval_character(&v), s.q_bg_value(&v).unwrap());
        assert_eq!(q_bg.eval_character(&ChernCharacter::point(1)), q(0, 1));
    }

    #[test]
    fn delta_form_examples() {
        let s = rank_one();
        let (h, b) = (qv(&[1]), qv(&[0]));
        assert_eq!(s.build_delta_form(&h, &b, &q(0, 1)).unwrap(), s.q_bg_form());
        let d = s.build_delta_form(&h, &b, &q(1, 1)).unwrap();
        assert_eq!(d.eval_character(&ch(0, &[1], q(0, 1))), q(6, 1));
    }

    #[test]
    fn q_delta_examples() {
        let s = rank_one();
        let (h, b) = (qv(&[1]), qv(&[0]));
        let qd = s
            .build_q_delta(&h, &b, &q(1, 1), &q(0, 1), &q(1, 2))
            .unwrap();
        assert_eq!(qd.eval_character(&ChernCharacter::point(1)), q(0, 1));
        assert_eq!(qd.eval_character(&ch(1, &[1], q(1, 1))), q(8, 1));
        // kernel vector (1, 0, 2): −δ(H²ch0)² = −2
        assert_eq!(qd.eval(&[q(1, 1), q(0, 1), q(2, 1)]), q(-2, 1));
        assert!(s
            .build_q_delta(&h, &b, &q(1, 1), &q(0, 1), &q(0, 1))
            .is_err());
    }

    #[test]
    fn q_delta_on_kernel_with_twist() {
        let p = product();
        let (h, b) = (qv(&[1, 2]), qv(&[1, -1]));
        let (a0, b0, d) = (q(5, 2), q(1, 3), q(1, 4));
        let qd = p.build_q_delta(&h, &b, &a0, &b0, &d).unwrap();
        let k = p
            .kernel_basis(&StabilityParams::new(h.clone(), b.clone(), a0, b0))
            .unwrap();
        let h2 = p.square(&h).unwrap();
        for u in &k.basis {
            let x = h2.clone() * u[0].clone();
            assert_eq!(qd.eval(u), -(d.clone() * x.clone() * x));
        }
    }

    #[test]
    fn cone_constant_examples() {
        let s = rank_one();
        assert_eq!(s.compute_c_h(&qv(&[1])).unwrap().value, q(0, 1));
        let p = product();
        let c = p.compute_c_h(&qv(&[1, 1])).unwrap();
        assert_eq!(c.value, q(0, 1));
        assert!(c.certified);
    }

    #[test]
    fn cone_constant_rejects_generators_with_zero_degree() {
        let mut data = crate::testing::rank_one_data();
        data.gram =
            Matrix::from_rows(vec![vec![q(2, 1), q(0, 1)], vec![q(0, 1), q(-2, 1)]]).unwrap();
        data.nef_inequalities = vec![qv(&[1, 0])];
        data.effective_generators = vec![qv(&[0, 1]), qv(&[2, 1])];
        data.class = crate::lattice::SurfaceClass::General;
        data.lp_provider = crate::lepotier::LePotierProvider::EmpiricalEnvelope(
            crate::lepotier::EmpiricalEnvelope {
                source: crate::lepotier::CharacterSource::Box(
                    crate::chern::EnumerationBounds::new(
                        1,
                        vec![(0, 0), (0, 0)],
                        (q(0, 1), q(0, 1)),
                    ),
                ),
                bucket: q(0, 1),
            },
        );
        let s = SurfaceModel::new(data).unwrap();
        assert!(matches!(
            s.compute_c_h(&qv(&[1, 0])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn cone_constant_with_a_negative_curve() {
        // diag(2, −2): E = (0,1) has E² = −2, F = (1,1) is isotropic.
        let mut data = crate::testing::rank_one_data();
        data.gram =
            Matrix::from_rows(vec![vec![q(2, 1), q(0, 1)], vec![q(0, 1), q(-2, 1)]]).unwrap();
        data.nef_inequalities = vec![qv(&[0, 1]), qv(&[1, 1])];
        data.effective_generators = vec![qv(&[0, 1]), qv(&[1, 1])];
        data.class = crate::lattice::SurfaceClass::General;
        data.lp_provider = crate::lepotier::LePotierProvider::EmpiricalEnvelope(
            crate::lepotier::EmpiricalEnvelope {
                source: crate::lepotier::CharacterSource::Box(
                    crate::chern::EnumerationBounds::new(
                        1,
                        vec![(0, 0), (0, 0)],
                        (q(0, 1), q(0, 1)),
                    ),
                ),
                bucket: q(0, 1),
            },
        );
        let s = SurfaceModel::new(data).unwrap();
        let h = qv(&[2, -1]);
        let c = s.compute_c_h(&h).unwrap();
        assert!(c.certified);
        // E/(H·E) = (0, 1/2) gives −D² = 1/2, the maximum
        assert_eq!(c.value, q(1, 2));
        assert_eq!(c.certificate[0].point, vec![q(0, 1), q(1, 2)]);
        for a in 0..=10 {
            for bb in 0..=10 {
                if a + bb == 0 {
                    continue;
                }
                let d = vec![q(bb, 1), q(a + bb, 1)];
                let hd = s.intersect(&h, &d).unwrap();
                let lhs = c.value.clone() * hd.clone() * hd + s.square(&d).unwrap();
                assert!(lhs >= q(0, 1));
            }
        }
    }

    #[test]
    fn choose_delta_examples() {
        let s = rank_one();
        let (h, b) = (qv(&[1]), qv(&[0]));
        assert_eq!(
            s.choose_delta(&h, &b, &q(1, 1), &q(0, 1)).unwrap(),
            q(9, 10)
        );
        assert!(matches!(
            s.choose_delta(&h, &b, &q(0, 1), &q(0, 1)),
            Err(Error::Precondition(_))
        ));
        // off-vertex β₀: δ must satisfy h(δ) ≤ m
        let d = s.choose_delta(&h, &b, &q(2, 1), &q(1, 1)).unwrap();
        assert!(s
            .parabola_dominates_phi(&h, &b, &q(2, 1), &q(1, 1), &d)
            .unwrap());
        assert!(!s
            .parabola_dominates_phi(&h, &b, &q(2, 1), &q(1, 1), &(d * q(10, 9) * q(11, 10)))
            .unwrap());
    }

    #[test]
    fn choose_epsilon_returns_first_candidate_on_rank_one() {
        let s = rank_one();
        let (h, b) = (qv(&[1]), qv(&[0]));
        let (a0, b0) = (q(1, 1), q(0, 1));
        let delta = s.choose_delta(&h, &b, &a0, &b0).unwrap();
        let eps = s
            .choose_epsilon(&h, &b, &a0, &b0, &delta, &q(0, 1))
            .unwrap();
        assert_eq!(eps, (q(1, 1) / delta) / q(2, 1));
    }

    #[test]
    fn negative_definiteness_examples() {
        let s = rank_one();
        let minus_id = QuadForm::new(Matrix::identity(3).scale(&q(-1, 1))).unwrap();
        assert!(minus_id
            .is_negative_definite_on(&[qv(&[1, 2, 3]), qv(&[0, 1, 0])])
            .unwrap());
        assert!(!s
            .q_bg_form()
            .is_negative_definite_on(&[qv(&[0, 1, 0])])
            .unwrap());
        assert!(matches!(
            minus_id.is_negative_definite_on(&[qv(&[1, 0, 0]), qv(&[2, 0, 0])]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn transport_examples() {
        let s = rank_one();
        let h = qv(&[1]);
        let u = vec![q(1, 1), q(0, 1), q(2, 1)];
        assert_eq!(s.transport_alpha(&h, &q(1, 1), &q(1, 1), &u).unwrap(), u);
        let moved = s.transport_alpha(&h, &q(1, 1), &q(2, 1), &u).unwrap();
        assert_eq!(moved, vec![q(1, 1), q(0, 1), q(4, 1)]);
        let p2 = StabilityParams::new(h.clone(), qv(&[0]), q(2, 1), q(0, 1));
        assert_eq!(
            s.charge_functional(&p2).unwrap().eval(&moved),
            (q(0, 1), q(0, 1))
        );
        let b = qv(&[1]);
        assert_eq!(s.transport_a(&h, &b, &q(1, 1), &u).unwrap(), u);
    }

    #[test]
    fn transport_a_decreases_delta_on_hyperbolic_lattice() {
        let p = product();
        let (h, b) = (qv(&[1, 1]), qv(&[1, 0]));
        let a2 = q(3, 1);
        let c_h = p.compute_c_h(&h).unwrap().value;
        let delta = p.build_delta_form(&h, &b, &c_h).unwrap();
        let src = p.tilt_kernel_params(&h, &b, &q(1, 1)).unwrap();
        let dst = p.tilt_kernel_params(&h, &b, &a2).unwrap();
        let z_dst = p.charge_functional(&dst).unwrap();
        for u in p.kernel_basis(&src).unwrap().basis {
            let v = p.transport_a(&h, &b, &a2, &u).unwrap();
            assert_eq!(z_dst.eval(&v), (q(0, 1), q(0, 1)));
            // Δ drops by (a² − 1)H²ch0² = 2·2·ch0²
            let drop = q(4, 1) * u[0].clone() * u[0].clone();
            assert_eq!(delta.eval(&v), delta.eval(&u) - drop);
        }
    }

    #[test]
    fn jh_proportional_branch() {
        let s = rank_one();
        let z = s
            .charge_functional(&StabilityParams::new(qv(&[1]), qv(&[0]), q(1, 1), q(0, 1)))
            .unwrap();
        let q_bg = s.q_bg_form();
        let u = vec![q(1, 1), q(2, 1), q(1, 1)];
        assert!(q_bg.eval(&u) > q(0, 1));
        let r = jh_form_inequality(&q_bg, &z, &u, &u).unwrap();
        assert!(r.proportional && r.cross_positive && r.q_sum_exceeds);
    }

    #[test]
    fn jh_pair_from_a_witness() {
        let s = rank_one();
        let p = StabilityParams::new(qv(&[1]), qv(&[0]), q(1, 1), q(0, 1));
        let data = s.support_property(&p).unwrap();
        let z = s.charge_functional(&p).unwrap();
        // w = u + k/4 with k in ker Z, so Z(w) = Z(u)
        let u = s.witness_character(&qv(&[1])).unwrap().to_vec();
        let k = &data.kernel.basis[0];
        let w: Vec<Rational> = u
            .iter()
            .zip(k)
            .map(|(a, b)| a.clone() + b.clone() * q(1, 4))
            .collect();
        assert_eq!(data.form.eval(&u), q(128, 45));
        assert!(data.form.eval(&w) > q(0, 1));
        let r = jh_form_inequality(&data.form, &z, &u, &w).unwrap();
        assert_eq!(r.lambda, q(1, 1));
        assert!(!r.proportional && r.cross_positive && r.q_sum_exceeds);
    }

    #[test]
    fn combinations_and_counts() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(subset_count(4, 2), Some(10));
    }

    #[test]
    fn delta_supremum_solves_the_quadratic() {
        // m = 1, d² = 1: smaller root of 2δ² − 7δ + 4, ≈ 0.7192
        let d = delta_supremum(&q(1, 1), &q(1, 1));
        let v = domination_lhs(&d, &q(1, 1));
        assert!(v <= q(1, 1));
        let f = d.to_f64_lossy();
        assert!((f - (7.0 - 17f64.sqrt()) / 4.0).abs() < 1e-12);
    }
}
