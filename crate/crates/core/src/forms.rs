//! Matrix-valued 1- and 2-superforms on the (1|1) superplane.
//!
//! Basis 1-forms are `A± = dx± - i (dθ±) θ±` (even) and `Π± = i dθ±` (odd);
//! coefficients always sit to the right of the basis form, so a 1-form is
//! `α = A+ a+ + A- a- + Π+ π+ + Π- π-`. Wedge products of differentials
//! follow `ω ∧ η = (-1)^{deg ω deg η + par ω par η} η ∧ ω`: `dx` anticommute,
//! `dθ ∧ dx = -dx ∧ dθ`, and `dθ ∧ dθ` is symmetric (so `dθ± ∧ dθ± ≠ 0`).
//!
//! Two independent derivatives are provided: [`exterior_d`] transcribes the
//! closed formula on the reduced basis, while [`d_oracle`] expands into the
//! raw `(dx, dθ)` basis, differentiates from first principles and converts
//! back. They must agree.

use crate::algebra::Scalar;
use crate::defect::Defect;
use crate::error::{Error, Result};
use crate::linalg::SuperMatrix;
use crate::superfield::{Dir, Superfield, ThetaPart};

/// `α = A+ a+ + A- a- + Π+ π+ + Π- π-`.
#[derive(Clone, Debug)]
pub struct OneSuperform<S: Scalar> {
    pub a_plus: SuperMatrix<S>,
    pub a_minus: SuperMatrix<S>,
    pub pi_plus: SuperMatrix<S>,
    pub pi_minus: SuperMatrix<S>,
}

/// The reduced 2-form basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TwoBasis {
    ApAm,
    ApPp,
    ApPm,
    AmPp,
    AmPm,
    PpPp,
    PmPm,
    PpPm,
}

impl TwoBasis {
    pub const ALL: [TwoBasis; 8] = [
        TwoBasis::ApAm,
        TwoBasis::ApPp,
        TwoBasis::ApPm,
        TwoBasis::AmPp,
        TwoBasis::AmPm,
        TwoBasis::PpPp,
        TwoBasis::PmPm,
        TwoBasis::PpPm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TwoBasis::ApAm => "A+^A-",
            TwoBasis::ApPp => "A+^Pi+",
            TwoBasis::ApPm => "A+^Pi-",
            TwoBasis::AmPp => "A-^Pi+",
            TwoBasis::AmPm => "A-^Pi-",
            TwoBasis::PpPp => "Pi+^Pi+",
            TwoBasis::PmPm => "Pi-^Pi-",
            TwoBasis::PpPm => "Pi+^Pi-",
        }
    }
}

/// Coefficients on the reduced basis, indexed by [`TwoBasis`] order.
#[derive(Clone, Debug)]
pub struct TwoSuperform<S: Scalar> {
    pub coeffs: [SuperMatrix<S>; 8],
}

impl<S: Scalar> TwoSuperform<S> {
    pub fn get(&self, b: TwoBasis) -> &SuperMatrix<S> {
        &self.coeffs[b as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(SuperMatrix::is_zero)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let v: Vec<SuperMatrix<S>> =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.try_add(b)).collect::<Result<_>>()?;
        Ok(Self { coeffs: to_array(v) })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let v: Vec<SuperMatrix<S>> =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.try_sub(b)).collect::<Result<_>>()?;
        Ok(Self { coeffs: to_array(v) })
    }

    /// One named defect per basis element.
    pub fn defects(&self, prefix: &str) -> Vec<Defect<S>> {
        TwoBasis::ALL.iter().map(|&b| Defect::matrix(format!("{prefix}{}", b.name()), self.get(b).clone())).collect()
    }
}

fn to_array<T>(v: Vec<T>) -> [T; 8] {
    v.try_into().unwrap_or_else(|_| unreachable!("exactly eight coefficients"))
}

impl<S: Scalar> OneSuperform<S> {
    pub fn new(a_plus: SuperMatrix<S>, a_minus: SuperMatrix<S>, pi_plus: SuperMatrix<S>, pi_minus: SuperMatrix<S>) -> Self {
        Self { a_plus, a_minus, pi_plus, pi_minus }
    }

    /// `A+ a+ - A- a+^† + Π+ π+ - Π- π+^†`.
    pub fn su_n(a_plus: SuperMatrix<S>, pi_plus: SuperMatrix<S>) -> Self {
        let a_minus = -&a_plus.dagger();
        let pi_minus = -&pi_plus.dagger();
        Self { a_plus, a_minus, pi_plus, pi_minus }
    }

    /// `df = A+ d+f + A- d-f + Π+ D+f + Π- D-f`.
    pub fn exact(f: &SuperMatrix<S>) -> Result<Self> {
        Ok(Self {
            a_plus: f.x_derivative(Dir::Plus)?,
            a_minus: f.x_derivative(Dir::Minus)?,
            pi_plus: f.super_derivative(Dir::Plus)?,
            pi_minus: f.super_derivative(Dir::Minus)?,
        })
    }

    fn parts(&self) -> [&SuperMatrix<S>; 4] {
        [&self.a_plus, &self.a_minus, &self.pi_plus, &self.pi_minus]
    }

    pub fn is_zero(&self) -> bool {
        self.parts().iter().all(|m| m.is_zero())
    }

    /// `a- = -a+^†`, `π- = -π+^†` and all four coefficients traceless.
    pub fn is_su_n(&self) -> Result<bool> {
        if !self.a_minus.try_add(&self.a_plus.dagger())?.is_zero() {
            return Ok(false);
        }
        if !self.pi_minus.try_add(&self.pi_plus.dagger())?.is_zero() {
            return Ok(false);
        }
        for m in self.parts() {
            if !m.trace()?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `dα` from the closed formula on the reduced basis.
pub fn exterior_d<S: Scalar>(alpha: &OneSuperform<S>) -> Result<TwoSuperform<S>> {
    let i = S::i();
    let (ap, am, pp, pm) = (&alpha.a_plus, &alpha.a_minus, &alpha.pi_plus, &alpha.pi_minus);
    let dp = |m: &SuperMatrix<S>| m.x_derivative(Dir::Plus);
    let dm = |m: &SuperMatrix<S>| m.x_derivative(Dir::Minus);
    let sp = |m: &SuperMatrix<S>| m.super_derivative(Dir::Plus);
    let sm = |m: &SuperMatrix<S>| m.super_derivative(Dir::Minus);
    let neg = |m: SuperMatrix<S>| -&m;

    let ap_am = dp(am)?.try_sub(&dm(ap)?)?;
    let ap_pp = neg(sp(ap)?.try_sub(&dp(pp)?)?);
    let ap_pm = neg(sm(ap)?.try_sub(&dp(pm)?)?);
    let am_pp = neg(sp(am)?.try_sub(&dm(pp)?)?);
    let am_pm = neg(sm(am)?.try_sub(&dm(pm)?)?);
    let pp_pp = neg(ap.scale(&i).try_add(&sp(pp)?)?);
    let pm_pm = neg(am.scale(&i).try_add(&sm(pm)?)?);
    let pp_pm = neg(sp(pm)?.try_add(&sm(pp)?)?);
    Ok(TwoSuperform { coeffs: [ap_am, ap_pp, ap_pm, am_pp, am_pm, pp_pp, pm_pm, pp_pm] })
}

/// `α ∧ α`.
pub fn wedge_square<S: Scalar>(alpha: &OneSuperform<S>) -> Result<TwoSuperform<S>> {
    let (ap, am, pp, pm) = (&alpha.a_plus, &alpha.a_minus, &alpha.pi_plus, &alpha.pi_minus);
    let neg = |m: SuperMatrix<S>| -&m;
    Ok(TwoSuperform {
        coeffs: [
            ap.commutator(am)?,
            neg(pp.commutator(ap)?),
            neg(pm.commutator(ap)?),
            neg(pp.commutator(am)?),
            neg(pm.commutator(am)?),
            neg(pp.try_mul(pp)?),
            neg(pm.try_mul(pm)?),
            neg(pp.anticommutator(pm)?),
        ],
    })
}

/// `dα + α ∧ α`.
pub fn mc_defect<S: Scalar>(alpha: &OneSuperform<S>) -> Result<TwoSuperform<S>> {
    exterior_d(alpha)?.try_add(&wedge_square(alpha)?)
}

/// Residuals of the five component equations of `dα + α∧α = 0` for an
/// su(N)-shaped `α` determined by `a+` and `π+`.
pub fn mc_system_defects<S: Scalar>(a_plus: &SuperMatrix<S>, pi_plus: &SuperMatrix<S>) -> Result<[Defect<S>; 5]> {
    let ad = a_plus.dagger();
    let pd = pi_plus.dagger();
    let eq1 = a_plus
        .scale(&S::i())
        .try_add(&pi_plus.super_derivative(Dir::Plus)?)?
        .try_add(&pi_plus.try_mul(pi_plus)?)?;
    let eq2 = pi_plus
        .super_derivative(Dir::Minus)?
        .try_sub(&pd.super_derivative(Dir::Plus)?)?
        .try_sub(&pi_plus.anticommutator(&pd)?)?;
    let eq3 = ad
        .x_derivative(Dir::Plus)?
        .try_add(&a_plus.x_derivative(Dir::Minus)?)?
        .try_add(&a_plus.commutator(&ad)?)?;
    let eq4 = pi_plus
        .x_derivative(Dir::Plus)?
        .try_sub(&a_plus.super_derivative(Dir::Plus)?)?
        .try_add(&a_plus.commutator(pi_plus)?)?;
    let eq5 = pd
        .x_derivative(Dir::Plus)?
        .try_add(&a_plus.super_derivative(Dir::Minus)?)?
        .try_add(&a_plus.commutator(&pd)?)?;
    Ok([
        Defect::matrix("eq1", eq1),
        Defect::matrix("eq2", eq2),
        Defect::matrix("eq3", eq3),
        Defect::matrix("eq4", eq4),
        Defect::matrix("eq5", eq5),
    ])
}

/// A 1-form on the raw basis: `dx+ c + dx- c + dθ+ c + dθ- c`.
#[derive(Clone, Debug)]
pub struct RawOneForm<S: Scalar> {
    /// Coefficients of `dx+, dx-, dθ+, dθ-`.
    pub coeffs: [SuperMatrix<S>; 4],
}

/// Raw 2-form basis: `dx+dx-, dx+dθ+, dx+dθ-, dx-dθ+, dx-dθ-, dθ+dθ+, dθ-dθ-, dθ+dθ-`.
#[derive(Clone, Debug)]
pub struct RawTwoForm<S: Scalar> {
    pub coeffs: [SuperMatrix<S>; 8],
}

const XP: usize = 0;
const XM: usize = 1;
const TP: usize = 2;
const TM: usize = 3;

/// Canonical raw slot and sign of `dX^a ∧ dX^b`; `None` when it vanishes.
fn raw_slot(a: usize, b: usize) -> Option<(usize, bool)> {
    let x = |v: usize| v == XP || v == XM;
    match (a, b) {
        _ if a == b && x(a) => None,
        (XP, XM) => Some((0, false)),
        (XM, XP) => Some((0, true)),
        _ if x(a) && !x(b) => Some((mixed_slot(a, b), false)),
        _ if !x(a) && x(b) => Some((mixed_slot(b, a), true)),
        (TP, TP) => Some((5, false)),
        (TM, TM) => Some((6, false)),
        _ => Some((7, false)),
    }
}

fn mixed_slot(x: usize, t: usize) -> usize {
    match (x, t) {
        (XP, TP) => 1,
        (XP, TM) => 2,
        (XM, TP) => 3,
        _ => 4,
    }
}

/// Expands `α` onto `dx±, dθ±` using the definitions of `A±` and `Π±`.
pub fn to_raw<S: Scalar>(alpha: &OneSuperform<S>) -> RawOneForm<S> {
    let i = S::i();
    let theta = |m: &SuperMatrix<S>, dir| {
        let ctx = m.get(0, 0).context();
        Superfield::theta(ctx, m.order(), dir)
    };
    // A± c = dx± c + dθ± (-i θ± c);  Π± c = dθ± (i c)
    let dtp = alpha
        .a_plus
        .left_scale(&theta(&alpha.a_plus, Dir::Plus))
        .scale(&-i.clone())
        .try_add(&alpha.pi_plus.scale(&i))
        .expect("coefficients share a shape");
    let dtm = alpha
        .a_minus
        .left_scale(&theta(&alpha.a_minus, Dir::Minus))
        .scale(&-i.clone())
        .try_add(&alpha.pi_minus.scale(&i))
        .expect("coefficients share a shape");
    RawOneForm { coeffs: [alpha.a_plus.clone(), alpha.a_minus.clone(), dtp, dtm] }
}

/// First-principles `d` on the raw basis: `d(dX^a c) = -Σ_b dX^a ∧ dX^b ∂_b c`
/// with left derivatives `∂_b`.
pub fn raw_d<S: Scalar>(form: &RawOneForm<S>) -> Result<RawTwoForm<S>> {
    let proto = &form.coeffs[0];
    let ctx = proto.get(0, 0).context().clone();
    let (tp, tm) = (ctx.table.theta_plus(), ctx.table.theta_minus());
    let order = form.coeffs.iter().map(SuperMatrix::order).min().unwrap_or(0);
    if order == 0 {
        return Err(Error::OrderUnderflow { needed: 1, available: 0 });
    }
    let n = proto.rows();
    let mut out: Vec<SuperMatrix<S>> = (0..8).map(|_| SuperMatrix::zero(&ctx, order - 1, n)).collect();
    for (a, c) in form.coeffs.iter().enumerate() {
        for b in 0..4 {
            let Some((slot, flip)) = raw_slot(a, b) else { continue };
            let deriv = match b {
                XP => c.x_derivative(Dir::Plus)?,
                XM => c.x_derivative(Dir::Minus)?,
                TP => c.try_map(|f| f.berezin(tp))?,
                _ => c.try_map(|f| f.berezin(tm))?,
            };
            // overall sign: leading minus, flipped again by reordering
            out[slot] = if flip { out[slot].try_add(&deriv)? } else { out[slot].try_sub(&deriv)? };
        }
    }
    Ok(RawTwoForm { coeffs: to_array(out) })
}

/// Rewrites a raw 2-form on the reduced basis.
pub fn raw_to_reduced<S: Scalar>(raw: &RawTwoForm<S>) -> Result<TwoSuperform<S>> {
    let r = &raw.coeffs;
    let ctx = r[0].get(0, 0).context().clone();
    let order = r.iter().map(SuperMatrix::order).min().unwrap_or(0);
    let tp = Superfield::theta(&ctx, order, Dir::Plus);
    let tm = Superfield::theta(&ctx, order, Dir::Minus);
    let tptm = &tp * &tm;
    let minus_i = -S::i();
    let c_aa = r[0].clone();
    let c_ap_pp = r[1].scale(&minus_i);
    let c_ap_pm = r[2].scale(&minus_i).try_add(&c_aa.left_scale(&tm))?;
    let c_am_pp = r[3].scale(&minus_i).try_sub(&c_aa.left_scale(&tp))?;
    let c_am_pm = r[4].scale(&minus_i);
    let c_pp_pp = (-&r[5]).try_sub(&c_ap_pp.left_scale(&tp))?;
    let c_pm_pm = (-&r[6]).try_sub(&c_am_pm.left_scale(&tm))?;
    let c_pp_pm = (-&r[7])
        .try_add(&c_aa.left_scale(&tptm))?
        .try_sub(&c_ap_pm.left_scale(&tp))?
        .try_sub(&c_am_pp.left_scale(&tm))?;
    Ok(TwoSuperform { coeffs: [c_aa, c_ap_pp, c_ap_pm, c_am_pp, c_am_pm, c_pp_pp, c_pm_pm, c_pp_pm] })
}

/// Independent `dα`: raw expansion, first-principles `d`, conversion back.
pub fn d_oracle<S: Scalar>(alpha: &OneSuperform<S>) -> Result<TwoSuperform<S>> {
    raw_to_reduced(&raw_d(&to_raw(alpha))?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Predicates {
    pub is_su_n: bool,
    pub is_closed: bool,
}

/// su(N) shape, and closedness: for su(N) forms the conditions
/// `a+ = i D+ π+`, `D- π+ - D+ π+^† = 0`; otherwise `dα = 0` itself.
pub fn predicates<S: Scalar>(alpha: &OneSuperform<S>) -> Result<Predicates> {
    let is_su_n = alpha.is_su_n()?;
    let is_closed = if is_su_n {
        let pp = &alpha.pi_plus;
        let c1 = alpha.a_plus.try_sub(&pp.super_derivative(Dir::Plus)?.scale(&S::i()))?;
        let c2 = pp.super_derivative(Dir::Minus)?.try_sub(&pp.dagger().super_derivative(Dir::Plus)?)?;
        c1.is_zero() && c2.is_zero()
    } else {
        exterior_d(alpha)?.is_zero()
    };
    Ok(Predicates { is_su_n, is_closed })
}

/// Potential `f` with `df = α` for closed `α`, normalised by a zero
/// constant term of its theta-free part.
pub fn integrate_closed<S: Scalar>(alpha: &OneSuperform<S>) -> Result<SuperMatrix<S>> {
    if !exterior_d(alpha)?.is_zero() {
        return Err(Error::NotClosed);
    }
    let (rows, cols) = (alpha.a_plus.rows(), alpha.a_plus.cols());
    let mut entries = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            entries.push(integrate_entry(
                alpha.a_plus.get(r, c),
                alpha.a_minus.get(r, c),
                alpha.pi_plus.get(r, c),
                alpha.pi_minus.get(r, c),
            )?);
        }
    }
    SuperMatrix::from_entries(rows, cols, entries)
}

fn integrate_entry<S: Scalar>(
    a_plus: &Superfield<S>,
    a_minus: &Superfield<S>,
    pi_plus: &Superfield<S>,
    pi_minus: &Superfield<S>,
) -> Result<Superfield<S>> {
    let ctx = a_plus.context().clone();
    let order = [a_plus, a_minus, pi_plus, pi_minus].iter().map(|f| f.order()).min().unwrap_or(0);
    let i = S::i();
    // theta-free part: integrate d+ f1 = (a+)_1, d- f1 = (a-)_1 on the jet
    let ap = a_plus.extract_theta(ThetaPart::One);
    let am = a_minus.extract_theta(ThetaPart::One);
    let mut entries = Vec::new();
    for n in 1..=order + 1 {
        for j in 0..=n {
            let i_pow = n - j;
            let coeff = if i_pow >= 1 {
                ap.coefficient(i_pow - 1, j).scale(&(S::one() / S::from_int(i_pow as i64)))
            } else {
                am.coefficient(0, j - 1).scale(&(S::one() / S::from_int(j as i64)))
            };
            entries.push(((i_pow, j), coeff));
        }
    }
    let f1 = Superfield::from_coefficients(&ctx, order + 1, entries);
    // theta derivatives of f: ∂θ± f = i (π± - θ± a±)
    let th_p = Superfield::theta(&ctx, order, Dir::Plus);
    let th_m = Superfield::theta(&ctx, order, Dir::Minus);
    let dtp = pi_plus.try_sub(&th_p.try_mul(a_plus)?)?.scale(&i);
    let dtm = pi_minus.try_sub(&th_m.try_mul(a_minus)?)?.scale(&i);
    let g_p = dtp.extract_theta(ThetaPart::One);
    let g_pm = dtp.extract_theta(ThetaPart::Minus);
    let g_m = dtm.extract_theta(ThetaPart::One);
    let tptm = &th_p * &th_m;
    f1.try_add(&th_p.try_mul(&g_p)?)?.try_add(&th_m.try_mul(&g_m)?)?.try_add(&tptm.try_mul(&g_pm)?)
}

fn check_unit_circle<S: Scalar>(lambda: &S) -> Result<()> {
    let n = lambda.norm_sqr();
    if n != S::one() {
        return Err(Error::OffCircle(n.render()));
    }
    Ok(())
}

/// `[X, P]`.
fn bracket<S: Scalar>(x: &SuperMatrix<S>, p: &SuperMatrix<S>) -> Result<SuperMatrix<S>> {
    x.commutator(p)
}

/// `a+ = (λ-1)[d+P, P] - i(λ²-1)(D+P)²` and `π+ = (λ-1)[D+P, P]`.
pub fn lambda_coefficients<S: Scalar>(p: &SuperMatrix<S>, lambda: &S) -> Result<(SuperMatrix<S>, SuperMatrix<S>)> {
    check_unit_circle(lambda)?;
    let gamma = lambda.sub_ref(&S::one());
    let l2m1 = lambda.mul_ref(lambda).sub_ref(&S::one());
    let dp = p.super_derivative(Dir::Plus)?;
    let pi_plus = bracket(&dp, p)?.scale(&gamma);
    let a_plus = bracket(&p.x_derivative(Dir::Plus)?, p)?
        .scale(&gamma)
        .try_sub(&dp.try_mul(&dp)?.scale(&S::i().mul_ref(&l2m1)))?;
    Ok((a_plus, pi_plus))
}

/// The su(N)-valued 1-form of the λ-family for a solution projector `P`.
pub fn build_alpha_lambda<S: Scalar>(p: &SuperMatrix<S>, lambda: &S) -> Result<OneSuperform<S>> {
    let (a_plus, pi_plus) = lambda_coefficients(p, lambda)?;
    Ok(OneSuperform::su_n(a_plus, pi_plus))
}

/// `a+ - i(D+π+ + π+²)` for the λ-family; zero when `a+` is consistent with the first equation.
pub fn aplus_consistency<S: Scalar>(p: &SuperMatrix<S>, lambda: &S) -> Result<SuperMatrix<S>> {
    let (a_plus, pi_plus) = lambda_coefficients(p, lambda)?;
    let rhs = pi_plus.super_derivative(Dir::Plus)?.try_add(&pi_plus.try_mul(&pi_plus)?)?.scale(&S::i());
    a_plus.try_sub(&rhs)
}

/// `γ + γ^† + γ γ^†` for `γ = λ - 1`.
pub fn gamma_defect<S: Scalar>(lambda: &S) -> S {
    let g = lambda.sub_ref(&S::one());
    g.add_ref(&g.conj()).add_ref(&g.norm_sqr())
}

/// `α = -2[dP, P]` with frame `F = Q(2P - I)`, and the residuals certifying it.
#[derive(Clone, Debug)]
pub struct MinusOneFrame<S: Scalar> {
    pub alpha: OneSuperform<S>,
    pub frame: SuperMatrix<S>,
    pub frame_inv: SuperMatrix<S>,
    pub defects: Vec<Defect<S>>,
}

/// Builds the λ = -1 form and frame. `q` is a constant unitary (identity if `None`).
pub fn alpha_minus_one<S: Scalar>(p: &SuperMatrix<S>, q: Option<&SuperMatrix<S>>) -> Result<MinusOneFrame<S>> {
    let n = p.rows();
    let ctx = p.get(0, 0).context().clone();
    let order = p.order();
    let id = SuperMatrix::identity(&ctx, order, n);
    if !p.is_square() || !p.has_even_entries() {
        return Err(Error::NonProjector("needs a square matrix with even entries".into()));
    }
    if !p.try_mul(p)?.try_sub(p)?.is_zero() || !p.dagger().try_sub(p)?.is_zero() {
        return Err(Error::NonProjector("P^2 = P = P^dagger fails".into()));
    }
    let q = match q {
        Some(q) => q.clone(),
        None => id.clone(),
    };
    if !q.dagger().try_mul(&q)?.try_sub(&id)?.is_zero() {
        return Err(Error::NonUnitary);
    }
    let m2 = S::from_int(-2);
    let alpha = OneSuperform::new(
        bracket(&p.x_derivative(Dir::Plus)?, p)?.scale(&m2),
        bracket(&p.x_derivative(Dir::Minus)?, p)?.scale(&m2),
        bracket(&p.super_derivative(Dir::Plus)?, p)?.scale(&m2),
        bracket(&p.super_derivative(Dir::Minus)?, p)?.scale(&m2),
    );
    let refl = p.scale(&S::from_int(2)).try_sub(&id)?;
    let frame = q.try_mul(&refl)?;
    let frame_inv = refl.try_mul(&q.dagger())?;
    let df = OneSuperform::exact(&frame)?;
    let pull = |m: &SuperMatrix<S>| frame_inv.try_mul(m);
    let sign = if n % 2 == 1 { S::one() } else { -S::one() };
    let mut defects = vec![
        Defect::matrix("unitarity", frame.dagger().try_mul(&frame)?.try_sub(&id)?),
        Defect::matrix("inverse", frame_inv.try_mul(&frame)?.try_sub(&id)?),
        Defect::matrix("pullback_a+", pull(&df.a_plus)?.try_sub(&alpha.a_plus)?),
        Defect::matrix("pullback_a-", pull(&df.a_minus)?.try_sub(&alpha.a_minus)?),
        Defect::matrix("pullback_pi+", pull(&df.pi_plus)?.try_sub(&alpha.pi_plus)?),
        Defect::matrix("pullback_pi-", pull(&df.pi_minus)?.try_sub(&alpha.pi_minus)?),
    ];
    if n <= 6 {
        let det = refl.determinant()?;
        defects.push(Defect::field("det", det.try_sub(&Superfield::constant(&ctx, order, sign))?));
    }
    Ok(MinusOneFrame { alpha, frame, frame_inv, defects })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_traits::{One, Zero};

    use super::*;
    use crate::algebra::{gaussian, GeneratorTable};
    use crate::linalg::SuperVector;
    use crate::model::{eta_cp1_chain, veronese_chain, ModelData};
    use crate::superfield::{BasePoint, SuperContext};
    use crate::Gq;

    fn ctx() -> Arc<SuperContext<Gq>> {
        SuperContext::new(GeneratorTable::with_eta_pairs(1), BasePoint::new(gaussian((1, 2), (1, 3))))
    }

    fn lambdas() -> Vec<Gq> {
        vec![gaussian((3, 5), (4, 5)), gaussian((5, 13), (12, 13)), -Gq::one()]
    }

    fn zero_form(n: usize) -> OneSuperform<Gq> {
        let z = SuperMatrix::zero(&ctx(), 3, n);
        OneSuperform::new(z.clone(), z.clone(), z.clone(), z)
    }

    #[test]
    fn zero_form_examples() {
        let a = zero_form(2);
        assert!(exterior_d(&a).unwrap().is_zero());
        assert!(wedge_square(&a).unwrap().is_zero());
        assert!(d_oracle(&a).unwrap().is_zero());
        assert!(integrate_closed(&a).unwrap().is_zero());
    }

    #[test]
    fn constant_coefficients_leave_algebraic_terms() {
        let c = ctx();
        let k = SuperMatrix::constant(&c, 3, 1, &[gaussian((2, 1), (1, 1))]).unwrap();
        let z = SuperMatrix::zero(&c, 3, 1);
        let alpha = OneSuperform::new(k.scale(&Gq::i()), z.clone(), z.clone(), z);
        let d = exterior_d(&alpha).unwrap();
        // Π+∧Π+ coefficient is -(i a+)
        assert_eq!(d.get(TwoBasis::PpPp), &k.scale(&Gq::one()));
        assert_eq!(d_oracle(&alpha).unwrap().get(TwoBasis::PpPp), d.get(TwoBasis::PpPp));
        // dA+ = -d(i dθ+ θ+) = -i dθ+∧dθ+ = Π+∧Π+ ... times -i
        let a_only = OneSuperform::new(SuperMatrix::identity(&c, 3, 1), SuperMatrix::zero(&c, 3, 1), SuperMatrix::zero(&c, 3, 1), SuperMatrix::zero(&c, 3, 1));
        let d = d_oracle(&a_only).unwrap();
        assert_eq!(d.get(TwoBasis::PpPp), &SuperMatrix::scalar_diag(&c, 2, 1, -Gq::i()));
        assert_eq!(exterior_d(&a_only).unwrap().get(TwoBasis::PpPp), d.get(TwoBasis::PpPp));
    }

    #[test]
    fn scalar_forms_have_no_commutator_terms() {
        let c = ctx();
        let x = Superfield::coordinate_power(&c, 3, 1, 1);
        let alpha = OneSuperform::new(
            SuperMatrix::from_field(x.clone()),
            SuperMatrix::from_field(&x * &x),
            SuperMatrix::zero(&c, 3, 1),
            SuperMatrix::zero(&c, 3, 1),
        );
        assert!(wedge_square(&alpha).unwrap().get(TwoBasis::ApAm).is_zero());
    }

    #[test]
    fn nilpotent_pi_has_vanishing_square() {
        let c = ctx();
        let th = Superfield::theta(&c, 3, Dir::Plus);
        let z = Superfield::zero(&c, 3);
        // strictly upper-triangular odd matrix squares to zero
        let pi = SuperMatrix::from_entries(2, 2, vec![z.clone(), th, z.clone(), z.clone()]).unwrap();
        let zm = SuperMatrix::zero(&c, 3, 2);
        let alpha = OneSuperform::new(zm.clone(), zm.clone(), pi, zm);
        assert!(wedge_square(&alpha).unwrap().get(TwoBasis::PpPp).is_zero());
    }

    #[test]
    fn exact_forms_are_closed_and_integrate_back() {
        let c = ctx();
        let th = Superfield::theta(&c, 4, Dir::Plus);
        let eta = Superfield::generator(&c, 4, "eta-").unwrap();
        let f0 = &(&Superfield::coordinate_power(&c, 4, 2, 1) + &(&th * &eta)) + &Superfield::coordinate_power(&c, 4, 0, 3);
        let f = SuperMatrix::from_field(f0);
        let alpha = OneSuperform::exact(&f).unwrap();
        assert!(exterior_d(&alpha).unwrap().is_zero());
        assert!(predicates(&alpha).unwrap().is_closed);
        let g = integrate_closed(&alpha).unwrap();
        let diff = g.try_sub(&f).unwrap();
        // f is recovered up to a constant
        assert!(diff.x_derivative(Dir::Plus).unwrap().is_zero());
        assert!(diff.super_derivative(Dir::Plus).unwrap().is_zero());
        assert!(diff.super_derivative(Dir::Minus).unwrap().is_zero());
        let flat = OneSuperform::exact(&f).unwrap();
        let flat = OneSuperform::new(flat.a_plus.truncate(0), flat.a_minus.truncate(0), flat.pi_plus.truncate(0), flat.pi_minus.truncate(0));
        assert!(matches!(integrate_closed(&flat), Err(Error::OrderUnderflow { .. })));
    }

    #[test]
    fn generic_form_is_neither_su_n_nor_closed() {
        let c = ctx();
        let x = SuperMatrix::from_field(Superfield::coordinate_power(&c, 3, 1, 0));
        let z = SuperMatrix::zero(&c, 3, 1);
        let alpha = OneSuperform::new(x.clone(), x, z.clone(), z);
        assert_eq!(predicates(&alpha).unwrap(), Predicates { is_su_n: false, is_closed: false });
        assert!(matches!(integrate_closed(&alpha), Err(Error::NotClosed)));
    }

    #[test]
    fn gamma_identity_on_the_circle() {
        for l in lambdas() {
            assert!(gamma_defect(&l).is_zero());
        }
        assert!(!gamma_defect(&Gq::from_int(2)).is_zero());
    }

    fn models() -> Vec<ModelData<Gq>> {
        let c = ctx();
        let (p, e) = veronese_chain(&c, 2, 6);
        let (p3, e3) = veronese_chain(&c, 3, 7);
        let (pe, ee) = eta_cp1_chain(&c, 6).unwrap();
        vec![
            ModelData::from_chain(p, e).unwrap(),
            ModelData::from_chain(p3, e3).unwrap(),
            ModelData::from_chain(pe, ee).unwrap(),
        ]
    }

    #[test]
    fn lambda_family_examples() {
        let m = &models()[0];
        let p = m.projector(0);
        assert!(build_alpha_lambda(p, &Gq::one()).unwrap().is_zero());
        let a = build_alpha_lambda(p, &-Gq::one()).unwrap();
        let m1 = alpha_minus_one(p, None).unwrap();
        assert_eq!(a.a_plus, m1.alpha.a_plus);
        assert_eq!(a.pi_plus, m1.alpha.pi_plus);
        assert_eq!(a.a_minus, m1.alpha.a_minus);
        assert_eq!(a.pi_minus, m1.alpha.pi_minus);
        assert!(matches!(build_alpha_lambda(p, &Gq::from_int(2)), Err(Error::OffCircle(_))));
    }

    #[test]
    fn maurer_cartan_holds_for_the_lambda_family() {
        for m in models() {
            for p in m.projectors() {
                for l in lambdas() {
                    let alpha = build_alpha_lambda(p, &l).unwrap();
                    assert!(alpha.is_su_n().unwrap());
                    assert!(mc_defect(&alpha).unwrap().is_zero());
                    assert!(aplus_consistency(p, &l).unwrap().is_zero());
                    for d in mc_system_defects(&alpha.a_plus, &alpha.pi_plus).unwrap() {
                        assert!(d.is_zero(), "{}", d.name);
                    }
                    assert_eq!(exterior_d(&alpha).unwrap().coeffs.len(), 8);
                }
            }
        }
    }

    #[test]
    fn minus_one_frame_is_certified() {
        for m in models() {
            for p in m.projectors() {
                let f = alpha_minus_one(p, None).unwrap();
                for d in &f.defects {
                    assert!(d.is_zero(), "{}", d.name);
                }
            }
        }
        let c = ctx();
        let l: Gq = gaussian((3, 5), (4, 5));
        let q = SuperMatrix::constant(&c, 6, 2, &[Gq::zero(), l.clone(), Gq::one(), Gq::zero()]).unwrap();
        let m = &models()[0];
        let f = alpha_minus_one(m.projector(1), Some(&q)).unwrap();
        assert!(f.defects.iter().all(Defect::is_zero));
        let bad = SuperMatrix::constant(&c, 6, 2, &[Gq::from_int(2), Gq::zero(), Gq::zero(), Gq::one()]).unwrap();
        assert!(matches!(alpha_minus_one(m.projector(1), Some(&bad)), Err(Error::NonUnitary)));
    }

    #[test]
    fn non_solution_fails_maurer_cartan() {
        let c = ctx();
        let z = SuperVector::new(vec![
            Superfield::one(&c, 6),
            &Superfield::coordinate_power(&c, 6, 1, 0) + &Superfield::coordinate_power(&c, 6, 0, 1),
        ]);
        let p = z.outer_projector().unwrap();
        let alpha = build_alpha_lambda(&p, &gaussian((3, 5), (4, 5))).unwrap();
        assert!(!mc_defect(&alpha).unwrap().is_zero());
        assert!(mc_system_defects(&alpha.a_plus, &alpha.pi_plus).unwrap().iter().any(|d| !d.is_zero()));
    }

    mod props {
        use proptest::prelude::*;

        use super::*;
        use crate::algebra::{GrassmannElement, Monomial};

        /// Random entry of the requested parity at order 3.
        fn entry(odd: bool) -> impl Strategy<Value = Superfield<Gq>> {
            prop::collection::vec(((0usize..3, 0usize..3), 0u64..16, -3i64..=3, -3i64..=3), 0..4).prop_map(move |ts| {
                let c = ctx();
                let mut f = Superfield::zero(&c, 3);
                for ((i, j), m, re, im) in ts {
                    let m = if (m.count_ones() % 2 == 1) == odd { m } else { m ^ 1 };
                    let g = GrassmannElement::from_terms(c.table.clone(), vec![(Monomial(m), Gq::from_int(re) + Gq::i() * Gq::from_int(im))]);
                    f = &f + &Superfield::from_coefficients(&c, 3, [((i, j), g)]);
                }
                f
            })
        }

        fn matrix(odd: bool) -> impl Strategy<Value = SuperMatrix<Gq>> {
            prop::collection::vec(entry(odd), 4).prop_map(|e| SuperMatrix::from_entries(2, 2, e).unwrap())
        }

        fn form() -> impl Strategy<Value = OneSuperform<Gq>> {
            (matrix(false), matrix(false), matrix(true), matrix(true)).prop_map(|(a, b, c, d)| OneSuperform::new(a, b, c, d))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn exterior_d_matches_first_principles(alpha in form()) {
                let lhs = exterior_d(&alpha).unwrap();
                let rhs = d_oracle(&alpha).unwrap();
                for b in TwoBasis::ALL {
                    prop_assert_eq!(lhs.get(b), rhs.get(b), "{}", b.name());
                }
            }

            #[test]
            fn d_squared_vanishes(f in matrix(false)) {
                let alpha = OneSuperform::exact(&f).unwrap();
                prop_assert!(exterior_d(&alpha).unwrap().is_zero());
                let g = integrate_closed(&alpha).unwrap();
                let back = OneSuperform::exact(&g).unwrap();
                prop_assert_eq!(&back.a_plus, &alpha.a_plus);
                prop_assert_eq!(&back.a_minus, &alpha.a_minus);
                prop_assert_eq!(&back.pi_plus, &alpha.pi_plus);
                prop_assert_eq!(&back.pi_minus, &alpha.pi_minus);
            }
        }
    }
}
