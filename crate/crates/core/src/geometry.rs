//! First fundamental form of the surfaces `X_k`: the raw-basis `dX`, the
//! supermetric components, and closed forms for their theta-free parts.
//!
//! Inner products are `<A, B> = -1/2 Tr(AB)`. For a sector `j` the
//! theta-expansions `z_j = u_j + ...` and `eps_j = eps_j^f + i theta+ eps_j^b`
//! supply the bodies used by the closed forms; `|eps^f|^2` means
//! `(eps^f)^dagger eps^f`.

use std::collections::BTreeMap;

use crate::algebra::{GrassmannElement, Monomial, Parity, Scalar};
use crate::defect::Defect;
use crate::error::{Error, Result};
use crate::forms::{to_raw, OneSuperform};
use crate::linalg::{SuperMatrix, SuperVector};
use crate::model::{phi_plus, ModelData};
use crate::spectral::surface_x;
use crate::superfield::{Dir, Superfield, ThetaPart};

/// Coordinate labels of the supermetric.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Index {
    Plus,
    Minus,
    ThetaPlus,
    ThetaMinus,
}

impl Index {
    pub const ALL: [Index; 4] = [Index::Plus, Index::Minus, Index::ThetaPlus, Index::ThetaMinus];

    pub fn is_odd(self) -> bool {
        matches!(self, Index::ThetaPlus | Index::ThetaMinus)
    }

    pub fn name(self) -> &'static str {
        match self {
            Index::Plus => "+",
            Index::Minus => "-",
            Index::ThetaPlus => "th+",
            Index::ThetaMinus => "th-",
        }
    }
}

#[derive(Clone, Debug)]
pub struct MetricTable<S: Scalar> {
    pub phi_plus: SuperMatrix<S>,
    /// `m+ = i D+ phi+`.
    pub m_plus: SuperMatrix<S>,
    /// `rho+ = theta+ D+ phi+ + i phi+`.
    pub rho_plus: SuperMatrix<S>,
    g: BTreeMap<(Index, Index), Superfield<S>>,
}

impl<S: Scalar> MetricTable<S> {
    pub fn get(&self, a: Index, b: Index) -> &Superfield<S> {
        &self.g[&(a, b)]
    }

    pub fn components(&self) -> impl Iterator<Item = (&(Index, Index), &Superfield<S>)> {
        self.g.iter()
    }

    /// Raw-basis coefficients of `dX` on `dx+, dx-, dtheta+, dtheta-`.
    pub fn dx_coefficients(&self) -> [SuperMatrix<S>; 4] {
        [self.m_plus.clone(), -&self.m_plus.dagger(), self.rho_plus.clone(), self.rho_plus.dagger()]
    }

    /// `g_ab - g_ba` (even-even and mixed) and `g_ab + g_ba` (odd-odd).
    pub fn symmetry_defects(&self) -> Result<Vec<Defect<S>>> {
        let mut out = Vec::new();
        for (i, &a) in Index::ALL.iter().enumerate() {
            for &b in &Index::ALL[i + 1..] {
                let (gab, gba) = (self.get(a, b), self.get(b, a));
                let v = if a.is_odd() && b.is_odd() { gab.try_add(gba)? } else { gab.try_sub(gba)? };
                out.push(Defect::field(format!("g[{},{}]", a.name(), b.name()), v));
            }
        }
        Ok(out)
    }
}

/// Builds `m+`, `rho+` and all supermetric components for sector `k`.
pub fn metric_components<S: Scalar>(model: &ModelData<S>, k: usize) -> Result<MetricTable<S>> {
    if k >= model.dim() {
        return Err(Error::IndexOutOfRange { index: k, len: model.dim() });
    }
    let phi = phi_plus(model.projector(k))?;
    let dphi = phi.super_derivative(Dir::Plus)?;
    let m_plus = dphi.scale(&S::i());
    let theta = Superfield::theta(model.context(), dphi.order(), Dir::Plus);
    let rho_plus = dphi.left_scale(&theta).try_add(&phi.scale(&S::i()))?;
    let (md, rd) = (m_plus.dagger(), rho_plus.dagger());
    use Index::*;
    let mut g = BTreeMap::new();
    g.insert((Plus, Plus), m_plus.su_inner(&m_plus)?);
    g.insert((Minus, Minus), md.su_inner(&md)?);
    g.insert((Plus, Minus), m_plus.su_inner(&md)?);
    g.insert((ThetaPlus, ThetaMinus), rd.su_inner(&rho_plus)?);
    g.insert((Plus, ThetaPlus), m_plus.su_inner(&rho_plus)?);
    g.insert((Plus, ThetaMinus), m_plus.su_inner(&rd)?);
    g.insert((Minus, ThetaPlus), -&md.su_inner(&rho_plus)?);
    g.insert((Minus, ThetaMinus), md.su_inner(&rd)?);
    let filled: Vec<_> = g.iter().map(|(&(a, b), v)| ((b, a), if a.is_odd() && b.is_odd() { -v } else { v.clone() })).collect();
    for (key, v) in filled {
        g.entry(key).or_insert(v);
    }
    let zero = Superfield::zero(model.context(), g[&(Plus, Plus)].order());
    g.insert((ThetaPlus, ThetaPlus), zero.clone());
    g.insert((ThetaMinus, ThetaMinus), zero);
    Ok(MetricTable { phi_plus: phi, m_plus, rho_plus, g })
}

/// Raw `dX` coefficients against the first-principles expansion of `d X_k`.
pub fn dx_defects<S: Scalar>(model: &ModelData<S>, k: usize, table: &MetricTable<S>) -> Result<Vec<Defect<S>>> {
    let raw = to_raw(&OneSuperform::exact(&surface_x(model, k)?)?);
    let names = ["dX[dx+]", "dX[dx-]", "dX[dth+]", "dX[dth-]"];
    table
        .dx_coefficients()
        .iter()
        .zip(&raw.coeffs)
        .zip(names)
        .map(|((ours, theirs), name)| Ok(Defect::matrix(name, ours.try_sub(theirs)?)))
        .collect()
}

fn theta_free<S: Scalar>(m: &SuperMatrix<S>) -> SuperMatrix<S> {
    m.map(|f| f.extract_theta(ThetaPart::One))
}

/// `xi_0 = phi+|_{theta=0}` and `A- = (D- phi+)|_{theta=0}`.
pub fn xi_a_extracted<S: Scalar>(model: &ModelData<S>, j: usize) -> Result<(SuperMatrix<S>, SuperMatrix<S>)> {
    let phi = phi_plus(model.projector(j))?;
    Ok((theta_free(&phi), theta_free(&phi.super_derivative(Dir::Minus)?)))
}

/// `rho+ - D+(phi+ theta+)` and `rho+ - (i xi_0 - theta- A-)`.
pub fn rho_identity<S: Scalar>(model: &ModelData<S>, k: usize) -> Result<[Defect<S>; 2]> {
    let table = metric_components(model, k)?;
    let phi = &table.phi_plus;
    let ctx = model.context();
    let th_p = Superfield::theta(ctx, phi.order(), Dir::Plus);
    let first = phi.right_scale(&th_p).super_derivative(Dir::Plus)?;
    let (xi0, a_minus) = xi_a_extracted(model, k)?;
    let th_m = Superfield::theta(ctx, a_minus.order(), Dir::Minus);
    let second = xi0.scale(&S::i()).try_sub(&a_minus.left_scale(&th_m))?;
    Ok([
        Defect::matrix("rho_derivative", table.rho_plus.try_sub(&first)?),
        Defect::matrix("rho_expansion", table.rho_plus.try_sub(&second)?),
    ])
}

/// Theta-free bodies of sector data: `u_j`, `|u_j|^2`, its inverse and `eps_j^f`.
struct Bodies<S: Scalar> {
    u: Vec<SuperVector<S>>,
    norm: Vec<Superfield<S>>,
    inv: Vec<Superfield<S>>,
    eps_f: Vec<Superfield<S>>,
}

impl<S: Scalar> Bodies<S> {
    fn new(model: &ModelData<S>) -> Result<Self> {
        let n = model.dim();
        let u: Vec<_> = model.zs().iter().map(|z| z.map(|f| f.extract_theta(ThetaPart::One))).collect();
        for a in 0..n {
            for b in a + 1..n {
                if !u[a].inner(&u[b])?.is_zero() {
                    return Err(Error::Precondition(format!("u_{a} and u_{b} are not orthogonal")));
                }
            }
        }
        let norm = u.iter().map(SuperVector::norm_sqr).collect::<Result<Vec<_>>>()?;
        let inv = norm.iter().map(Superfield::invert_even).collect::<Result<Vec<_>>>()?;
        let eps_f = (0..=n).map(|j| model.epsilon(j).extract_theta(ThetaPart::One)).collect();
        Ok(Self { u, norm, inv, eps_f })
    }

    fn dim(&self) -> usize {
        self.u.len()
    }

    /// `|eps_j^f|^2 = (eps_j^f)^dagger eps_j^f`.
    fn eps_sq(&self, j: usize) -> Result<Superfield<S>> {
        self.eps_f[j].dagger().try_mul(&self.eps_f[j])
    }

    /// `|u_j|^2 / |u_{j-1}|^2` with `|u_{-1}|^2 = 1`.
    fn ratio(&self, j: usize) -> Result<Superfield<S>> {
        if j == 0 {
            Ok(self.norm[0].clone())
        } else {
            self.norm[j].try_mul(&self.inv[j - 1])
        }
    }

    /// `u_j u_j^dagger / |u_j|^2`.
    fn check_projector(&self, j: usize) -> Result<SuperMatrix<S>> {
        Ok(self.u[j].outer(&self.u[j]).right_scale(&self.inv[j]))
    }

    /// The two terms `|eps_{j+1}^f|^2 |u_{j+1}|^2/|u_j|^2` and `|eps_j^f|^2 |u_j|^2/|u_{j-1}|^2`,
    /// each zero at a boundary.
    fn weights(&self, j: usize) -> Result<(Superfield<S>, Superfield<S>)> {
        let ctx = self.eps_f[0].context();
        let order = self.eps_f[0].order();
        let upper = if j + 1 < self.dim() {
            self.eps_sq(j + 1)?.try_mul(&self.ratio(j + 1)?)?
        } else {
            Superfield::zero(ctx, order)
        };
        let lower = if j > 0 { self.eps_sq(j)?.try_mul(&self.ratio(j)?)? } else { Superfield::zero(ctx, order) };
        Ok((upper, lower))
    }
}

/// `P_check_k = u_k u_k^dagger / |u_k|^2` for every `k`.
pub fn check_projectors<S: Scalar>(model: &ModelData<S>) -> Result<Vec<SuperMatrix<S>>> {
    let b = Bodies::new(model)?;
    (0..b.dim()).map(|j| b.check_projector(j)).collect()
}

/// Closed forms of `xi_0^j` and `A-^j` in terms of the bodies `u` and `eps^f`.
pub fn xi_a_closed<S: Scalar>(model: &ModelData<S>, j: usize) -> Result<(SuperMatrix<S>, SuperMatrix<S>)> {
    if j >= model.dim() {
        return Err(Error::IndexOutOfRange { index: j, len: model.dim() });
    }
    let b = Bodies::new(model)?;
    let n = b.dim();
    let ctx = model.context();
    let order = b.eps_f[0].order();
    let mut xi = SuperMatrix::zero(ctx, order, n);
    if j + 1 < n {
        let t = b.u[j + 1].outer(&b.u[j]).left_scale(&b.eps_f[j + 1]).right_scale(&b.inv[j]);
        xi = xi.try_add(&t)?;
    }
    if j > 0 {
        let t = b.u[j].outer(&b.u[j - 1]).left_scale(&b.eps_f[j]).right_scale(&b.inv[j - 1]);
        xi = xi.try_add(&t)?;
    }
    let xi = xi.scale(&-S::i());
    let (upper, lower) = b.weights(j)?;
    let mut a = SuperMatrix::zero(ctx, order, n);
    if j + 1 < n {
        let d = b.check_projector(j)?.try_sub(&b.check_projector(j + 1)?)?;
        a = a.try_add(&d.left_scale(&upper))?;
    }
    if j > 0 {
        let d = b.check_projector(j - 1)?.try_sub(&b.check_projector(j)?)?;
        a = a.try_add(&d.left_scale(&lower))?;
    }
    Ok((xi, a.scale(&S::i())))
}

/// Extraction-based `xi_0^j`, `A-^j` minus their closed forms.
pub fn xi_a_defects<S: Scalar>(model: &ModelData<S>, j: usize) -> Result<[Defect<S>; 2]> {
    let (xi, a) = xi_a_extracted(model, j)?;
    let (xi_c, a_c) = xi_a_closed(model, j)?;
    Ok([Defect::matrix("xi0", xi.try_sub(&xi_c)?), Defect::matrix("a_minus", a.try_sub(&a_c)?)])
}

/// Closed form of `g_{th+ th-}^j`:
/// `-1/2 (w_up + w_low) + theta+ theta- |eps_j^f|^2 |eps_{j+1}^f|^2 |u_{j+1}|^2/|u_{j-1}|^2`.
/// Both weights square to zero because `eps^f` is odd, which is what makes
/// the theta+ theta- coefficient a single product.
pub fn g_theta_theta_closed<S: Scalar>(model: &ModelData<S>, j: usize) -> Result<Superfield<S>> {
    if j >= model.dim() {
        return Err(Error::IndexOutOfRange { index: j, len: model.dim() });
    }
    let b = Bodies::new(model)?;
    let (upper, lower) = b.weights(j)?;
    let half = S::one() / S::from_int(2);
    let body = upper.try_add(&lower)?.scale(&-half);
    let ctx = model.context();
    let order = body.order();
    let th = &Superfield::theta(ctx, order, Dir::Plus) * &Superfield::theta(ctx, order, Dir::Minus);
    let cross = upper.try_mul(&lower)?;
    body.try_add(&th.try_mul(&cross)?)
}

pub fn g_theta_theta_defect<S: Scalar>(model: &ModelData<S>, j: usize) -> Result<Defect<S>> {
    let table = metric_components(model, j)?;
    let closed = g_theta_theta_closed(model, j)?;
    Ok(Defect::field("g_theta_theta", table.get(Index::ThetaPlus, Index::ThetaMinus).try_sub(&closed)?))
}

/// Keeps only the Grassmann-free part of every jet coefficient.
fn grassmann_body<S: Scalar>(f: &Superfield<S>) -> Superfield<S> {
    let ctx = f.context();
    let entries = f.nonzero_coefficients().map(|(ij, t)| {
        let body: Vec<_> = t.iter().filter(|(m, _)| m.0 == 0).cloned().collect();
        (ij, GrassmannElement::from_terms(ctx.table.clone(), body))
    });
    Superfield::from_coefficients(ctx, f.order(), entries.collect::<Vec<_>>())
}

/// Substitutes `theta+ = c+ eta+ + c- eta-` into `g_{th+ th-}^j` and subtracts
/// `eta+ eta- / 2 ((|a_{j+1}^+|^2 - |a_{j+1}^-|^2) |b_{j+1}|^2/|b_j|^2 + (|a_j^+|^2 - |a_j^-|^2) |b_j|^2/|b_{j-1}|^2)`,
/// with `eps_k^f = a_k^+ eta+ + a_k^- eta-` and `b_k` the Grassmann body of `u_k`.
pub fn eta_reduction<S: Scalar>(model: &ModelData<S>, j: usize, c_plus: &S, c_minus: &S) -> Result<Defect<S>> {
    let ctx = model.context();
    let table = &ctx.table;
    let pairs = table.auxiliary_pairs();
    if pairs.len() != 1 {
        return Err(Error::UnsupportedReduction(format!("found {} auxiliary pairs", pairs.len())));
    }
    let (ep, em) = pairs[0];
    if j >= model.dim() {
        return Err(Error::IndexOutOfRange { index: j, len: model.dim() });
    }
    let g = metric_components(model, j)?.get(Index::ThetaPlus, Index::ThetaMinus).clone();
    let e = GrassmannElement::from_terms(
        table.clone(),
        vec![(Monomial::generator(ep), c_plus.clone()), (Monomial::generator(em), c_minus.clone())],
    );
    let substituted = g.substitute_theta(&e)?;

    let b = Bodies::new(model)?;
    let order = g.order();
    let eta_p = Superfield::grassmann(ctx, order, &GrassmannElement::generator(table.clone(), ep));
    let eta_m = Superfield::grassmann(ctx, order, &GrassmannElement::generator(table.clone(), em));
    // a_k^+ - a_k^- differences, then |b| ratios
    let split = |k: usize| -> Result<Superfield<S>> {
        let f = &b.eps_f[k];
        let (ap, am) = (f.berezin(ep)?, f.berezin(em)?);
        let rebuilt = ap.try_mul(&eta_p)?.try_add(&am.try_mul(&eta_m)?)?;
        if rebuilt != *f || !ap.has_parity(Parity::Even) || !am.has_parity(Parity::Even) {
            return Err(Error::Precondition(format!("eps_{k}^f is not a+ eta+ + a- eta-")));
        }
        ap.dagger().try_mul(&ap)?.try_sub(&am.dagger().try_mul(&am)?)
    };
    let bodies: Vec<Superfield<S>> = b.u.iter().map(|u| u.norm_sqr().map(|n| grassmann_body(&n))).collect::<Result<_>>()?;
    let body_ratio = |k: usize| -> Result<Superfield<S>> {
        if k == 0 {
            Ok(bodies[0].clone())
        } else {
            bodies[k].try_mul(&bodies[k - 1].invert_even()?)
        }
    };
    let n = b.dim();
    let mut sum = Superfield::zero(ctx, order);
    if j + 1 < n {
        sum = sum.try_add(&split(j + 1)?.try_mul(&body_ratio(j + 1)?)?)?;
    }
    if j > 0 {
        sum = sum.try_add(&split(j)?.try_mul(&body_ratio(j)?)?)?;
    }
    let half = S::one() / S::from_int(2);
    let closed = (&eta_p * &eta_m).try_mul(&sum)?.scale(&half);
    Ok(Defect::field("eta_reduction", substituted.try_sub(&closed)?))
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

    fn ctx_with(pairs: usize) -> Arc<SuperContext<Gq>> {
        SuperContext::new(GeneratorTable::with_eta_pairs(pairs), BasePoint::new(gaussian((1, 2), (1, 3))))
    }

    fn veronese(n: usize) -> ModelData<Gq> {
        let (p, e) = veronese_chain(&ctx_with(1), n, n + 4);
        ModelData::from_chain(p, e).unwrap()
    }

    fn eta_cp1() -> ModelData<Gq> {
        let (p, e) = eta_cp1_chain(&ctx_with(1), 6).unwrap();
        ModelData::from_chain(p, e).unwrap()
    }

    /// `psi_0 = (1, x+ + theta+ zeta)`, `eps_1 = -i zeta + theta+` for an odd constant `zeta`.
    fn dressed_cp1(ctx: &Arc<SuperContext<Gq>>, zeta: Superfield<Gq>) -> ModelData<Gq> {
        let order = 6;
        let th = Superfield::theta(ctx, order, Dir::Plus);
        let psi0 = SuperVector::new(vec![Superfield::one(ctx, order), &Superfield::coordinate_power(ctx, order, 1, 0) + &(&th * &zeta)]);
        let psi1 = SuperVector::new(vec![Superfield::zero(ctx, order), Superfield::one(ctx, order)]);
        let eps = &zeta.scale(&-Gq::i()) + &th;
        ModelData::from_chain(vec![psi0, psi1], vec![eps]).unwrap()
    }

    fn all_zero(ds: &[Defect<Gq>]) -> bool {
        ds.iter().all(Defect::is_zero)
    }

    #[test]
    fn metric_symmetry_and_dx_on_both_families() {
        for m in [veronese(3), eta_cp1()] {
            for k in 0..m.dim() {
                let t = metric_components(&m, k).unwrap();
                assert!(all_zero(&t.symmetry_defects().unwrap()));
                assert!(all_zero(&dx_defects(&m, k, &t).unwrap()));
                let rd = t.rho_plus.dagger();
                assert_eq!(t.get(Index::ThetaPlus, Index::ThetaMinus), &rd.su_inner(&t.rho_plus).unwrap());
                assert_eq!(t.get(Index::Plus, Index::ThetaPlus), t.get(Index::ThetaPlus, Index::Plus));
                assert!(all_zero(&rho_identity(&m, k).unwrap()));
            }
        }
    }

    #[test]
    fn constant_projector_has_zero_metric() {
        let c = ctx_with(1);
        let v = SuperVector::unit(&c, 4, 2, 0);
        let w = SuperVector::unit(&c, 4, 2, 1);
        let m = ModelData::from_chain_unchecked(vec![v, w], vec![Superfield::theta(&c, 4, Dir::Plus)]).unwrap();
        let t = metric_components(&m, 0).unwrap();
        assert!(t.components().all(|(_, g)| g.is_zero()));
        assert!(all_zero(&rho_identity(&m, 0).unwrap()));
    }

    #[test]
    fn closed_forms_on_eta_dressed_cp1() {
        let m = eta_cp1();
        let checks = check_projectors(&m).unwrap();
        for (a, pa) in checks.iter().enumerate() {
            assert_eq!(&pa.try_mul(pa).unwrap(), pa);
            for pb in &checks[a + 1..] {
                assert!(pa.try_mul(pb).unwrap().is_zero());
            }
        }
        for j in 0..2 {
            assert!(all_zero(&xi_a_defects(&m, j).unwrap()), "j={j}");
            let (xi, _) = xi_a_extracted(&m, j).unwrap();
            assert!(!xi.is_zero());
            assert!(g_theta_theta_defect(&m, j).unwrap().is_zero(), "j={j}");
            assert!(eta_reduction(&m, j, &Gq::one(), &Gq::zero()).unwrap().is_zero(), "j={j}");
            assert!(eta_reduction(&m, j, &gaussian((1, 2), (1, 1)), &gaussian((-3, 1), (0, 1))).unwrap().is_zero());
        }
        // only the eps_1 term survives at j = 0
        let closed = g_theta_theta_closed(&m, 0).unwrap();
        assert!(!closed.is_zero());
    }

    #[test]
    fn bosonic_embedding_closed_forms_vanish() {
        let m = veronese(3);
        for j in 0..3 {
            let (xi, a) = xi_a_extracted(&m, j).unwrap();
            assert!(xi.is_zero() && a.is_zero());
            let (xi, a) = xi_a_closed(&m, j).unwrap();
            assert!(xi.is_zero() && a.is_zero());
            assert!(g_theta_theta_closed(&m, j).unwrap().is_zero());
            assert!(g_theta_theta_defect(&m, j).unwrap().is_zero());
            assert!(eta_reduction(&m, j, &Gq::one(), &Gq::zero()).unwrap().is_zero());
        }
    }

    #[test]
    fn symmetric_reduction_cancels() {
        let c = ctx_with(1);
        let zeta = &Superfield::generator(&c, 6, "eta+").unwrap() + &Superfield::generator(&c, 6, "eta-").unwrap();
        let m = dressed_cp1(&c, zeta);
        for j in 0..2 {
            let t = metric_components(&m, j).unwrap();
            let g = t.get(Index::ThetaPlus, Index::ThetaMinus);
            let e = GrassmannElement::from_terms(c.table.clone(), vec![(Monomial::generator(c.table.index_of("eta+").unwrap()), Gq::one())]);
            assert!(g.substitute_theta(&e).unwrap().is_zero());
            assert!(eta_reduction(&m, j, &Gq::one(), &Gq::zero()).unwrap().is_zero());
            assert!(all_zero(&xi_a_defects(&m, j).unwrap()));
        }
    }

    #[test]
    fn reduction_needs_a_single_eta_pair() {
        let c = ctx_with(2);
        let m = dressed_cp1(&c, Superfield::generator(&c, 6, "eta+").unwrap());
        assert!(matches!(eta_reduction(&m, 0, &Gq::one(), &Gq::zero()), Err(Error::UnsupportedReduction(_))));
        // the general closed forms still apply
        assert!(all_zero(&xi_a_defects(&m, 0).unwrap()));
        assert!(g_theta_theta_defect(&m, 0).unwrap().is_zero());
    }
}
