//! Spectral frames `F = Q (I + sum_j beta_j P_j)` solving the linear problem
//! `D+ F = F pi+`, `D- F = -F pi+^dagger`, and the surfaces they define.
//!
//! The frame is quadratic in `lambda`: `F = Q (C0 + lambda C1 + lambda^2 C2)`
//! with `C0 = I - sum_{j<=k} P_j`, `C1 = P_k`, `C2 = sum_{j<k} P_j`, so
//! `d/dlambda` is taken on the coefficients and `lambda` stays a scalar.


use crate::algebra::Scalar;
use crate::defect::Defect;
use crate::error::{Error, Result};
use crate::forms::lambda_coefficients;
use crate::linalg::SuperMatrix;
use crate::model::ModelData;
use crate::superfield::{Dir, Superfield};

/// `beta_0 .. beta_k` by iterating the recurrence downwards from `beta_k = lambda - 1`.
pub fn solve_betas<S: Scalar>(lambda: &S, k: usize) -> Result<Vec<S>> {
    let lm1 = lambda.sub_ref(&S::one());
    let mut betas = vec![S::zero(); k + 1];
    betas[k] = lm1.clone();
    if k > 0 {
        betas[k - 1] = S::one().add_ref(&betas[k]).mul_ref(&lm1).add_ref(&betas[k]);
        for m in (1..k).rev() {
            betas[m - 1] = betas[m].clone();
        }
    }
    if let Some(j) = betas.iter().position(|b| *b == -S::one()) {
        return Err(Error::NonInvertibleAnsatz(j));
    }
    Ok(betas)
}

/// `beta_k = lambda - 1`, `beta_m = lambda^2 - 1` for `m < k`.
pub fn beta_closed_form<S: Scalar>(lambda: &S, k: usize) -> Vec<S> {
    let mut b = vec![lambda.mul_ref(lambda).sub_ref(&S::one()); k + 1];
    b[k] = lambda.sub_ref(&S::one());
    b
}

#[derive(Clone, Debug)]
pub struct SpectralFrame<S: Scalar> {
    pub k: usize,
    pub lambda: S,
    pub betas: Vec<S>,
    pub q: SuperMatrix<S>,
    pub c0: SuperMatrix<S>,
    pub c1: SuperMatrix<S>,
    pub c2: SuperMatrix<S>,
    pub frame: SuperMatrix<S>,
    pub frame_inv: SuperMatrix<S>,
}

fn sum_projectors<S: Scalar>(model: &ModelData<S>, upto: usize) -> Result<SuperMatrix<S>> {
    let n = model.dim();
    let mut acc = SuperMatrix::zero(model.context(), model.order(), n);
    for p in &model.projectors()[..upto] {
        acc = acc.try_add(p)?;
    }
    Ok(acc)
}

fn resolve_q<S: Scalar>(model: &ModelData<S>, q: Option<&SuperMatrix<S>>) -> Result<SuperMatrix<S>> {
    let id = SuperMatrix::identity(model.context(), model.order(), model.dim());
    match q {
        None => Ok(id),
        Some(q) => {
            if q.rows() != model.dim() || !q.is_square() {
                return Err(Error::DimensionMismatch(q.rows(), model.dim()));
            }
            if !q.dagger().try_mul(q)?.try_sub(&id)?.is_zero() {
                return Err(Error::NonUnitary);
            }
            Ok(q.clone())
        }
    }
}

/// Frame for sector `k` at a unit-circle `lambda`.
pub fn build_frame<S: Scalar>(
    model: &ModelData<S>,
    k: usize,
    lambda: &S,
    q: Option<&SuperMatrix<S>>,
) -> Result<SpectralFrame<S>> {
    let n = lambda.norm_sqr();
    if n != S::one() {
        return Err(Error::OffCircle(n.render()));
    }
    let betas = solve_betas(lambda, k)?;
    frame_with_betas(model, k, lambda, betas, q)
}

/// `F = Q (I + sum_j beta_j P_j)` for arbitrary `beta`s, with the analytic
/// inverse `(I - sum_j beta_j / (beta_j + 1) P_j) Q^dagger`. No unit-circle
/// check: used for off-circle and wrong-`beta` controls.
pub fn frame_with_betas<S: Scalar>(
    model: &ModelData<S>,
    k: usize,
    lambda: &S,
    betas: Vec<S>,
    q: Option<&SuperMatrix<S>>,
) -> Result<SpectralFrame<S>> {
    if k >= model.dim() {
        return Err(Error::IndexOutOfRange { index: k, len: model.dim() });
    }
    if betas.len() != k + 1 {
        return Err(Error::ShapeMismatch(format!("sector {k} needs {} betas, got {}", k + 1, betas.len())));
    }
    if let Some(j) = betas.iter().position(|b| *b == -S::one()) {
        return Err(Error::NonInvertibleAnsatz(j));
    }
    let q = resolve_q(model, q)?;
    let (ctx, order, n) = (model.context(), model.order(), model.dim());
    let id = SuperMatrix::identity(ctx, order, n);
    let c2 = sum_projectors(model, k)?;
    let c1 = model.projector(k).clone();
    let c0 = id.try_sub(&c2)?.try_sub(&c1)?;
    let mut core = id.clone();
    let mut inv_core = id;
    for (j, b) in betas.iter().enumerate() {
        let p = model.projector(j);
        core = core.try_add(&p.scale(b))?;
        let w = b.clone() / b.add_ref(&S::one());
        inv_core = inv_core.try_sub(&p.scale(&w))?;
    }
    let frame = q.try_mul(&core)?;
    let frame_inv = inv_core.try_mul(&q.dagger())?;
    Ok(SpectralFrame { k, lambda: lambda.clone(), betas, q, c0, c1, c2, frame, frame_inv })
}

impl<S: Scalar> SpectralFrame<S> {
    /// `Q (C0 + lambda C1 + lambda^2 C2)`.
    pub fn polynomial(&self) -> Result<SuperMatrix<S>> {
        let l = &self.lambda;
        let inner = self.c0.try_add(&self.c1.scale(l))?.try_add(&self.c2.scale(&l.mul_ref(l)))?;
        self.q.try_mul(&inner)
    }

    /// `dF/dlambda = Q (C1 + 2 lambda C2)`.
    pub fn lambda_derivative(&self) -> Result<SuperMatrix<S>> {
        let two_l = self.lambda.add_ref(&self.lambda);
        self.q.try_mul(&self.c1.try_add(&self.c2.scale(&two_l))?)
    }

    fn identity(&self) -> SuperMatrix<S> {
        SuperMatrix::identity(self.frame.get(0, 0).context(), self.frame.order(), self.frame.rows())
    }

    /// `F^dagger F - I`.
    pub fn unitarity_defect(&self) -> Result<SuperMatrix<S>> {
        self.frame.dagger().try_mul(&self.frame)?.try_sub(&self.identity())
    }

    /// `F^-1 F - I` and `F F^-1 - I`.
    pub fn inverse_defects(&self) -> Result<[Defect<S>; 2]> {
        let id = self.identity();
        Ok([
            Defect::matrix("inverse_left", self.frame_inv.try_mul(&self.frame)?.try_sub(&id)?),
            Defect::matrix("inverse_right", self.frame.try_mul(&self.frame_inv)?.try_sub(&id)?),
        ])
    }

    /// `det F` and a phase `c` in `{1, i, -1, -i}` with `det(c F) = 1`, when one exists.
    pub fn su_phase(&self) -> Result<(S, Option<S>)> {
        let exponent = 2 * self.k + 1;
        let mut det = (0..exponent).fold(S::one(), |acc, _| acc.mul_ref(&self.lambda));
        if self.q != self.identity() {
            det = det.mul_ref(&self.q.determinant()?.body_constant());
        }
        let n = self.frame.rows();
        let phases = [S::one(), S::i(), -S::one(), -S::i()];
        let phase = phases.into_iter().find(|c| {
            let cn = (0..n).fold(S::one(), |acc, _| acc.mul_ref(c));
            cn.mul_ref(&det) == S::one()
        });
        Ok((det, phase))
    }

    /// `det F - lambda^{2k+1} det Q`, computed by expansion (`N <= 6`).
    pub fn determinant_defect(&self) -> Result<Superfield<S>> {
        let (det, _) = self.su_phase()?;
        let ctx = self.frame.get(0, 0).context();
        self.frame.determinant()?.try_sub(&Superfield::constant(ctx, self.frame.order(), det))
    }
}

/// `(|lambda|^4 - 1) sum_{j<k} P_j + (|lambda|^2 - 1) P_k`, the predicted `F^dagger F - I`.
pub fn unitarity_prediction<S: Scalar>(model: &ModelData<S>, k: usize, lambda: &S) -> Result<SuperMatrix<S>> {
    let n2 = lambda.norm_sqr();
    let n4 = n2.mul_ref(&n2);
    sum_projectors(model, k)?
        .scale(&n4.sub_ref(&S::one()))
        .try_add(&model.projector(k).scale(&n2.sub_ref(&S::one())))
}

/// `D+ F - F pi+` and `D- F + F pi+^dagger` with `pi+ = (lambda - 1)[D+ P_k, P_k]`.
pub fn linear_problem_defects<S: Scalar>(frame: &SpectralFrame<S>, model: &ModelData<S>) -> Result<[Defect<S>; 2]> {
    let (_, pi) = lambda_coefficients(model.projector(frame.k), &frame.lambda)?;
    let f = &frame.frame;
    Ok([
        Defect::matrix("linear+", f.super_derivative(Dir::Plus)?.try_sub(&f.try_mul(&pi)?)?),
        Defect::matrix("linear-", f.super_derivative(Dir::Minus)?.try_add(&f.try_mul(&pi.dagger())?)?),
    ])
}

/// `{D+, D-} F`.
pub fn compatibility_defect<S: Scalar>(frame: &SpectralFrame<S>) -> Result<SuperMatrix<S>> {
    let f = &frame.frame;
    let pm = f.super_derivative(Dir::Minus)?.super_derivative(Dir::Plus)?;
    let mp = f.super_derivative(Dir::Plus)?.super_derivative(Dir::Minus)?;
    pm.try_add(&mp)
}

/// `Y_k = P_k + 2 sum_{j<k} P_j`.
pub fn sym_tafel_y<S: Scalar>(model: &ModelData<S>, k: usize) -> Result<SuperMatrix<S>> {
    sum_projectors(model, k)?.scale(&S::from_int(2)).try_add(model.projector(k))
}

/// `Y_k - lambda F^-1 dF/dlambda` and `Tr Y_k - (1 + 2k)`.
pub fn sym_tafel_defects<S: Scalar>(frame: &SpectralFrame<S>, model: &ModelData<S>) -> Result<[Defect<S>; 2]> {
    let y = sym_tafel_y(model, frame.k)?;
    let rhs = frame.frame_inv.try_mul(&frame.lambda_derivative()?)?.scale(&frame.lambda);
    let tr = y.trace()?;
    let expected = Superfield::constant(model.context(), model.order(), S::from_int(1 + 2 * frame.k as i64));
    Ok([Defect::matrix("sym_tafel", y.try_sub(&rhs)?), Defect::field("trace_y", tr.try_sub(&expected)?)])
}

/// `X_k = i ((1 + 2k)/N I - Y_k)`.
pub fn surface_x<S: Scalar>(model: &ModelData<S>, k: usize) -> Result<SuperMatrix<S>> {
    let n = model.dim();
    let c = S::from_int(1 + 2 * k as i64) / S::from_int(n as i64);
    let id = SuperMatrix::scalar_diag(model.context(), model.order(), n, c);
    Ok(id.try_sub(&sym_tafel_y(model, k)?)?.scale(&S::i()))
}

/// The first-order system of `X_k`, its su(N) membership, compatibility, and
/// `pi+^{-1,k} + 2 D+ Y_k`.
pub fn surface_defects<S: Scalar>(model: &ModelData<S>, k: usize) -> Result<Vec<Defect<S>>> {
    let p = model.projector(k);
    let x = surface_x(model, k)?;
    let i = S::i();
    let bp = p.super_derivative(Dir::Plus)?.commutator(p)?;
    let bm = p.super_derivative(Dir::Minus)?.commutator(p)?;
    let dxp = x.super_derivative(Dir::Plus)?;
    let dxm = x.super_derivative(Dir::Minus)?;
    let anti = dxm.super_derivative(Dir::Plus)?.try_add(&dxp.super_derivative(Dir::Minus)?)?;
    let (_, pi_minus_one) = lambda_coefficients(p, &-S::one())?;
    let y = sym_tafel_y(model, k)?;
    Ok(vec![
        Defect::matrix("x_plus", dxp.try_add(&bp.scale(&i))?),
        Defect::matrix("x_minus", dxm.try_sub(&bm.scale(&i))?),
        Defect::matrix("x_antihermitian", x.dagger().try_add(&x)?),
        Defect::field("x_trace", x.trace()?),
        Defect::matrix("x_compatibility", anti),
        Defect::matrix(
            "pi_y",
            pi_minus_one.try_add(&y.super_derivative(Dir::Plus)?.scale(&S::from_int(2)))?,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_traits::{One, Zero};

    use super::*;
    use crate::algebra::{gaussian, GeneratorTable};
    use crate::model::{eta_cp1_chain, veronese_chain};
    use crate::superfield::{BasePoint, SuperContext};
    use crate::Gq;

    fn ctx() -> Arc<SuperContext<Gq>> {
        SuperContext::new(GeneratorTable::with_eta_pairs(1), BasePoint::new(gaussian((1, 2), (1, 3))))
    }

    fn veronese(n: usize) -> ModelData<Gq> {
        let (p, e) = veronese_chain(&ctx(), n, n + 4);
        ModelData::from_chain(p, e).unwrap()
    }

    fn eta_cp1() -> ModelData<Gq> {
        let (p, e) = eta_cp1_chain(&ctx(), 6).unwrap();
        ModelData::from_chain(p, e).unwrap()
    }

    fn lambdas() -> Vec<Gq> {
        vec![gaussian((3, 5), (4, 5)), gaussian((5, 13), (12, 13)), -Gq::one(), Gq::one()]
    }

    #[test]
    fn beta_examples() {
        assert!(solve_betas(&Gq::one(), 3).unwrap().iter().all(Zero::is_zero));
        let b = solve_betas(&-Gq::one(), 2).unwrap();
        assert_eq!(b, vec![Gq::zero(), Gq::zero(), Gq::from_int(-2)]);
        let b = solve_betas(&gaussian::<Gq>((3, 5), (4, 5)), 1).unwrap();
        assert_eq!(b[1], gaussian((-2, 5), (4, 5)));
        assert_eq!(b[0], gaussian((-32, 25), (24, 25)));
        for l in lambdas() {
            for k in 0..4 {
                assert_eq!(solve_betas(&l, k).unwrap(), beta_closed_form(&l, k));
            }
        }
        assert!(matches!(solve_betas(&Gq::zero(), 0), Err(Error::NonInvertibleAnsatz(0))));
    }

    #[test]
    fn k_zero_minus_one_is_a_reflection() {
        let m = veronese(2);
        let f = build_frame(&m, 0, &-Gq::one(), None).unwrap();
        let id = SuperMatrix::identity(m.context(), m.order(), 2);
        assert_eq!(f.frame, id.try_sub(&m.projector(0).scale(&Gq::from_int(2))).unwrap());
        assert_eq!(f.polynomial().unwrap(), f.frame);
    }

    #[test]
    fn frames_certify_on_both_families() {
        for m in [veronese(3), eta_cp1()] {
            for k in 0..m.dim() {
                for l in lambdas() {
                    let f = build_frame(&m, k, &l, None).unwrap();
                    assert_eq!(f.polynomial().unwrap(), f.frame);
                    assert!(f.unitarity_defect().unwrap().is_zero());
                    for d in f.inverse_defects().unwrap() {
                        assert!(d.is_zero(), "{}", d.name);
                    }
                    for d in linear_problem_defects(&f, &m).unwrap() {
                        assert!(d.is_zero(), "{} k={k} l={l}", d.name);
                    }
                    assert!(compatibility_defect(&f).unwrap().is_zero());
                    for d in sym_tafel_defects(&f, &m).unwrap() {
                        assert!(d.is_zero(), "{}", d.name);
                    }
                    assert!(f.determinant_defect().unwrap().is_zero());
                }
                for d in surface_defects(&m, k).unwrap() {
                    assert!(d.is_zero(), "{} k={k}", d.name);
                }
            }
        }
    }

    #[test]
    fn sym_tafel_on_cp3() {
        let m = veronese(4);
        for k in [1, 2] {
            let f = build_frame(&m, k, &gaussian((3, 5), (4, 5)), None).unwrap();
            assert!(sym_tafel_defects(&f, &m).unwrap().iter().all(Defect::is_zero));
        }
        let f = build_frame(&m, 0, &gaussian((3, 5), (4, 5)), None).unwrap();
        let y = f.frame_inv.try_mul(&f.lambda_derivative().unwrap()).unwrap().scale(&f.lambda);
        assert_eq!(&y, m.projector(0));
    }

    #[test]
    fn off_circle_control_shows_the_predicted_defect() {
        let m = veronese(3);
        let two = Gq::from_int(2);
        assert!(matches!(build_frame(&m, 1, &two, None), Err(Error::OffCircle(_))));
        let f = frame_with_betas(&m, 1, &two, beta_closed_form(&two, 1), None).unwrap();
        let defect = f.unitarity_defect().unwrap();
        assert!(!defect.is_zero());
        assert_eq!(defect, unitarity_prediction(&m, 1, &two).unwrap());
    }

    #[test]
    fn swapped_betas_break_the_linear_problem() {
        let m = veronese(3);
        let l: Gq = gaussian((3, 5), (4, 5));
        let mut b = beta_closed_form(&l, 2);
        b.swap(0, 2);
        let f = frame_with_betas(&m, 2, &l, b, None).unwrap();
        assert!(linear_problem_defects(&f, &m).unwrap().iter().any(|d| !d.is_zero()));
    }

    #[test]
    fn gauge_matrix_and_su_phase() {
        let m = veronese(2);
        let c = m.context();
        let l: Gq = gaussian((3, 5), (4, 5));
        let q = SuperMatrix::constant(c, m.order(), 2, &[Gq::zero(), Gq::one(), Gq::one(), Gq::zero()]).unwrap();
        let f = build_frame(&m, 1, &Gq::i(), Some(&q)).unwrap();
        assert!(linear_problem_defects(&f, &m).unwrap().iter().all(Defect::is_zero));
        assert!(f.unitarity_defect().unwrap().is_zero());
        // det F = det Q * i^3 = i, and no c in {1, i, -1, -i} has c^2 = -i
        let (det, phase) = f.su_phase().unwrap();
        assert_eq!(det, Gq::i());
        assert_eq!(phase, None);
        let f = build_frame(&m, 0, &-Gq::one(), None).unwrap();
        let (det, phase) = f.su_phase().unwrap();
        assert_eq!(det, -Gq::one());
        assert_eq!(phase, Some(Gq::i()));
        let f = build_frame(&m, 0, &l, Some(&q)).unwrap();
        assert!(f.determinant_defect().unwrap().is_zero());
        let bad = SuperMatrix::scalar_diag(c, m.order(), 2, Gq::from_int(2));
        assert!(matches!(build_frame(&m, 0, &l, Some(&bad)), Err(Error::NonUnitary)));
    }
}
