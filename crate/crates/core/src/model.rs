//! Solutions built from holomorphic chains, and the identities they satisfy.
//!
//! A chain is a list of holomorphic vectors `psi_0 .. psi_{N-1}` with odd
//! scalars `eps_1 .. eps_{N-1}` such that `eps_j psi_j = D+ psi_{j-1}`
//! (`D+` the superderivative). Gram–Schmidt turns it into orthogonal
//! `z_0 .. z_{N-1}`, whose rank-one projectors `P_k` all solve the model.
//! The chain is an input: odd `eps_j` cannot be divided by, so it is
//! verified rather than solved for.
//!
//! Boundary conventions: `eps_0 = eps_N = 0` and `|z_{-1}|^2 = 1`.

use std::sync::Arc;

use crate::algebra::{Parity, Scalar};
use crate::defect::Defect;
use crate::error::{Error, Result};
use crate::linalg::{SuperMatrix, SuperVector};
use crate::superfield::{Dir, SuperContext, Superfield};

#[derive(Clone, Debug)]
pub struct ModelData<S: Scalar> {
    ctx: Arc<SuperContext<S>>,
    order: usize,
    psis: Vec<SuperVector<S>>,
    /// `epsilons[j - 1]` is `eps_j`.
    epsilons: Vec<Superfield<S>>,
    zs: Vec<SuperVector<S>>,
    norms: Vec<Superfield<S>>,
    inv_norms: Vec<Superfield<S>>,
    projectors: Vec<SuperMatrix<S>>,
}

fn check_shapes<S: Scalar>(psis: &[SuperVector<S>], epsilons: &[Superfield<S>]) -> Result<()> {
    let n = psis.len();
    if n == 0 {
        return Err(Error::ShapeMismatch("a chain needs at least one vector".into()));
    }
    if epsilons.len() + 1 != n {
        return Err(Error::ShapeMismatch(format!("{n} vectors need {} odd factors, got {}", n - 1, epsilons.len())));
    }
    for psi in psis {
        if psi.dim() != n {
            return Err(Error::DimensionMismatch(psi.dim(), n));
        }
    }
    for (j, e) in epsilons.iter().enumerate() {
        if !e.has_parity(Parity::Odd) {
            return Err(Error::Parity(format!("eps_{} must be odd", j + 1)));
        }
    }
    Ok(())
}

/// Residuals `eps_j psi_j - D+ psi_{j-1}`, `j = 1 .. N-1`, without the holomorphy check.
pub fn chain_law_defects<S: Scalar>(psis: &[SuperVector<S>], epsilons: &[Superfield<S>]) -> Result<Vec<Defect<S>>> {
    check_shapes(psis, epsilons)?;
    (1..psis.len())
        .map(|j| {
            let lhs = psis[j].left_scale(&epsilons[j - 1]);
            let rhs = psis[j - 1].super_derivative(Dir::Plus)?;
            Ok(Defect::vector(format!("chain[{j}]"), &lhs.try_sub(&rhs)?))
        })
        .collect()
}

/// Chain-law residuals, after checking that every input is holomorphic.
pub fn verify_chain<S: Scalar>(psis: &[SuperVector<S>], epsilons: &[Superfield<S>]) -> Result<Vec<Defect<S>>> {
    check_shapes(psis, epsilons)?;
    for (j, psi) in psis.iter().enumerate() {
        if !psi.is_holomorphic() {
            return Err(Error::NonHolomorphic(format!("psi_{j}")));
        }
    }
    for (j, e) in epsilons.iter().enumerate() {
        if !e.is_holomorphic() {
            return Err(Error::NonHolomorphic(format!("eps_{}", j + 1)));
        }
    }
    chain_law_defects(psis, epsilons)
}

/// Orthogonalised vectors `z_j = (I - sum_{k<j} P_k) psi_j` with `|z_j|^2` and its inverse.
pub fn gram_schmidt<S: Scalar>(
    psis: &[SuperVector<S>],
) -> Result<(Vec<SuperVector<S>>, Vec<Superfield<S>>, Vec<Superfield<S>>)> {
    let mut zs: Vec<SuperVector<S>> = Vec::with_capacity(psis.len());
    let mut norms = Vec::with_capacity(psis.len());
    let mut invs: Vec<Superfield<S>> = Vec::with_capacity(psis.len());
    for (j, psi) in psis.iter().enumerate() {
        let mut z = psi.clone();
        for (zk, inv) in zs.iter().zip(&invs) {
            let c = zk.inner(psi)?.try_mul(inv)?;
            z = z.try_sub(&zk.right_scale(&c))?;
        }
        let norm = z.norm_sqr()?;
        let inv = norm.invert_even().map_err(|e| match e {
            Error::SingularBody(_) => Error::DegenerateSeed(j),
            other => other,
        })?;
        zs.push(z);
        norms.push(norm);
        invs.push(inv);
    }
    Ok((zs, norms, invs))
}

impl<S: Scalar> ModelData<S> {
    /// Checks holomorphy and the chain law, then orthogonalises.
    pub fn from_chain(psis: Vec<SuperVector<S>>, epsilons: Vec<Superfield<S>>) -> Result<Self> {
        for (j, d) in verify_chain(&psis, &epsilons)?.iter().enumerate() {
            if !d.is_zero() {
                return Err(Error::ChainViolation(j + 1));
            }
        }
        Self::from_chain_unchecked(psis, epsilons)
    }

    /// Orthogonalises without verifying the chain; used for negative controls.
    pub fn from_chain_unchecked(psis: Vec<SuperVector<S>>, epsilons: Vec<Superfield<S>>) -> Result<Self> {
        check_shapes(&psis, &epsilons)?;
        let ctx = psis[0].get(0).context().clone();
        let order = psis.iter().map(SuperVector::order).min().unwrap_or(0);
        let (zs, norms, inv_norms) = gram_schmidt(&psis)?;
        let projectors = zs
            .iter()
            .zip(&inv_norms)
            .map(|(z, inv)| z.outer(z).right_scale(inv))
            .collect();
        Ok(Self { ctx, order, psis, epsilons, zs, norms, inv_norms, projectors })
    }

    pub fn dim(&self) -> usize {
        self.psis.len()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn context(&self) -> &Arc<SuperContext<S>> {
        &self.ctx
    }

    pub fn psis(&self) -> &[SuperVector<S>] {
        &self.psis
    }

    pub fn epsilons(&self) -> &[Superfield<S>] {
        &self.epsilons
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.dim() {
            return Err(Error::IndexOutOfRange { index: k, len: self.dim() });
        }
        Ok(())
    }

    /// `eps_j` for `0 <= j <= N`, zero at both ends.
    pub fn epsilon(&self, j: usize) -> Superfield<S> {
        if j == 0 || j >= self.dim() {
            Superfield::zero(&self.ctx, self.order)
        } else {
            self.epsilons[j - 1].clone()
        }
    }

    pub fn z(&self, k: usize) -> &SuperVector<S> {
        &self.zs[k]
    }

    pub fn zs(&self) -> &[SuperVector<S>] {
        &self.zs
    }

    /// `|z_k|^2`.
    pub fn norm(&self, k: usize) -> &Superfield<S> {
        &self.norms[k]
    }

    /// `|z_k|^{-2}`.
    pub fn inv_norm(&self, k: usize) -> &Superfield<S> {
        &self.inv_norms[k]
    }

    pub fn projector(&self, k: usize) -> &SuperMatrix<S> {
        &self.projectors[k]
    }

    pub fn projectors(&self) -> &[SuperMatrix<S>] {
        &self.projectors
    }

    /// `|z_k|^2 / |z_{k-1}|^2`, with `|z_{-1}|^2 = 1`.
    fn norm_ratio(&self, k: usize) -> Superfield<S> {
        if k == 0 {
            self.norms[0].clone()
        } else {
            &self.norms[k] * &self.inv_norms[k - 1]
        }
    }

    /// `|eps_{k+1}|^2 |z_{k+1}|^2 / |z_k|^2` for `-1 <= k <= N-1`; zero at both ends.
    fn a_term(&self, k: isize) -> Superfield<S> {
        if k < 0 || (k as usize) + 1 >= self.dim() {
            return Superfield::zero(&self.ctx, self.order);
        }
        let k = k as usize;
        let e = &self.epsilons[k];
        &(&e.dagger() * e) * &self.norm_ratio(k + 1)
    }

    /// `(L_k, Q_k)`.
    pub fn densities(&self, k: usize) -> Result<(Superfield<S>, Superfield<S>)> {
        self.check_index(k)?;
        let up = self.a_term(k as isize);
        let down = self.a_term(k as isize - 1);
        let two = S::from_int(2);
        Ok(((&up + &down).scale(&two), (&up - &down).scale(&two)))
    }

    /// Superderivative of `log |z_k|^2`.
    pub fn log_gradient(&self, k: usize, dir: Dir) -> Result<Superfield<S>> {
        self.check_index(k)?;
        self.inv_norms[k].try_mul(&self.norms[k].super_derivative(dir)?)
    }

    /// Residuals of `z_j` under `D+` (first relation) and `D-` (second), for all `j`.
    pub fn propz_defects(&self) -> Result<Vec<Defect<S>>> {
        let n = self.dim();
        let mut out = Vec::with_capacity(2 * n);
        for j in 0..n {
            let scaled = self.zs[j].right_scale(&self.inv_norms[j]);
            let lhs = scaled.super_derivative(Dir::Plus)?;
            let rhs = if j + 1 < n {
                self.zs[j + 1].right_scale(&self.inv_norms[j]).left_scale(&self.epsilons[j])
            } else {
                SuperVector::zero(&self.ctx, self.order, n)
            };
            out.push(Defect::vector(format!("propz+[{j}]"), &lhs.try_sub(&rhs)?));

            let lhs = self.zs[j].super_derivative(Dir::Minus)?;
            let rhs = if j > 0 {
                let coeff = &self.epsilons[j - 1].dagger() * &self.norm_ratio(j);
                self.zs[j - 1].left_scale(&coeff)
            } else {
                SuperVector::zero(&self.ctx, self.order, n)
            };
            out.push(Defect::vector(format!("propz-[{j}]"), &lhs.try_add(&rhs)?));
        }
        Ok(out)
    }

    /// `D- D+ log|z_k|^2 - Q_k/2` and `D- D+ log(|z_k|^2 |z_{k-1}|^4 ... |z_0|^4) - L_k/2`.
    pub fn density_log_identities(&self, k: usize) -> Result<[Defect<S>; 2]> {
        let (l, q) = self.densities(k)?;
        let half = S::from_ratio(1, 2);
        let g = self.log_gradient(k, Dir::Plus)?;
        let q_defect = g.super_derivative(Dir::Minus)?.try_sub(&q.scale(&half))?;
        let mut total = g;
        for i in 0..k {
            // |z_i|^4 contributes twice the log-gradient of |z_i|^2
            total = total.try_add(&self.log_gradient(i, Dir::Plus)?.scale(&S::from_int(2)))?;
        }
        let l_defect = total.super_derivative(Dir::Minus)?.try_sub(&l.scale(&half))?;
        Ok([Defect::field(format!("log_q[{k}]"), q_defect), Defect::field(format!("log_l[{k}]"), l_defect)])
    }

    /// `sum Q_k`, `sum D+ log|z_k|^2`, `sum D- log|z_k|^2`, and `xi+^k - xi-^k + N Q_k` for each `k`.
    pub fn sum_rules(&self) -> Result<Vec<Defect<S>>> {
        let n = self.dim();
        let qs: Vec<Superfield<S>> = (0..n).map(|k| self.densities(k).map(|d| d.1)).collect::<Result<_>>()?;
        let sum = |fs: &[Superfield<S>]| -> Result<Superfield<S>> {
            fs.iter().skip(1).try_fold(fs[0].clone(), |acc, f| acc.try_add(f))
        };
        let mut out = vec![Defect::field("sum_q", sum(&qs)?)];
        for (dir, name) in [(Dir::Plus, "sum_log+"), (Dir::Minus, "sum_log-")] {
            let grads: Vec<Superfield<S>> = (0..n).map(|k| self.log_gradient(k, dir)).collect::<Result<_>>()?;
            out.push(Defect::field(name, sum(&grads)?));
        }
        for k in 0..n {
            let mut xi = qs[k].scale(&S::from_int(n as i64));
            for i in 0..k {
                xi = xi.try_add(&qs[i].try_sub(&qs[k])?)?;
            }
            for i in k + 1..n {
                xi = xi.try_sub(&qs[k].try_sub(&qs[i])?)?;
            }
            out.push(Defect::field(format!("xi[{k}]"), xi));
        }
        Ok(out)
    }
}

/// `[D+ D- P, P]`; zero iff `P` solves the field equations.
pub fn el_defect<S: Scalar>(p: &SuperMatrix<S>) -> Result<SuperMatrix<S>> {
    p.super_derivative(Dir::Minus)?.super_derivative(Dir::Plus)?.commutator(p)
}

/// `phi+ = i [P, D+ P]`.
pub fn phi_plus<S: Scalar>(p: &SuperMatrix<S>) -> Result<SuperMatrix<S>> {
    Ok(p.commutator(&p.super_derivative(Dir::Plus)?)?.scale(&S::i()))
}

/// `D- phi+ - D+ phi+^dagger`; zero for solutions.
pub fn conservation_defect<S: Scalar>(p: &SuperMatrix<S>) -> Result<SuperMatrix<S>> {
    let phi = phi_plus(p)?;
    phi.super_derivative(Dir::Minus)?.try_sub(&phi.dagger().super_derivative(Dir::Plus)?)
}

fn falling_factorial<S: Scalar>(m: usize, j: usize) -> S {
    (0..j).fold(S::one(), |acc, r| acc * S::from_int((m - r) as i64))
}

/// The bosonic chain `psi_j = d+^j (1, x+, ..., x+^{n-1})` with `eps_j = theta+`.
pub fn veronese_chain<S: Scalar>(
    ctx: &Arc<SuperContext<S>>,
    n: usize,
    order: usize,
) -> (Vec<SuperVector<S>>, Vec<Superfield<S>>) {
    let psis = (0..n)
        .map(|j| {
            SuperVector::new(
                (0..n)
                    .map(|m| {
                        if m < j {
                            Superfield::zero(ctx, order)
                        } else {
                            Superfield::coordinate_power(ctx, order, m - j, 0).scale(&falling_factorial(m, j))
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    let eps = (1..n).map(|_| Superfield::theta(ctx, order, Dir::Plus)).collect();
    (psis, eps)
}

/// `psi_0 = (1, x+ + theta+ eta+)`, `eps_1 = -i eta+ + theta+`, `psi_1 = (0, 1)`.
pub fn eta_cp1_chain<S: Scalar>(
    ctx: &Arc<SuperContext<S>>,
    order: usize,
) -> Result<(Vec<SuperVector<S>>, Vec<Superfield<S>>)> {
    let eta = Superfield::generator(ctx, order, "eta+")?;
    let theta = Superfield::theta(ctx, order, Dir::Plus);
    let one = Superfield::one(ctx, order);
    let zero = Superfield::zero(ctx, order);
    let psi0 = SuperVector::new(vec![one.clone(), &Superfield::coordinate_power(ctx, order, 1, 0) + &(&theta * &eta)]);
    let psi1 = SuperVector::new(vec![zero, one]);
    let eps = &eta.scale(&-S::i()) + &theta;
    Ok((vec![psi0, psi1], vec![eps]))
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use num_traits::{One, Zero};

    use super::*;
    use crate::algebra::{gaussian, GeneratorTable, GrassmannElement, Monomial};
    use crate::superfield::BasePoint;
    use crate::Gq;

    fn ctx() -> Arc<SuperContext<Gq>> {
        SuperContext::new(GeneratorTable::with_eta_pairs(1), BasePoint::new(gaussian((1, 2), (1, 3))))
    }

    fn veronese(n: usize) -> ModelData<Gq> {
        let (psis, eps) = veronese_chain(&ctx(), n, n + 4);
        ModelData::from_chain(psis, eps).unwrap()
    }

    fn eta_cp1() -> ModelData<Gq> {
        let (psis, eps) = eta_cp1_chain(&ctx(), 6).unwrap();
        ModelData::from_chain(psis, eps).unwrap()
    }

    /// Broken projector: `(1, x+ + x-)` is not holomorphic.
    fn broken() -> ModelData<Gq> {
        let c = ctx();
        let d = 6;
        let psi0 = SuperVector::new(vec![
            Superfield::one(&c, d),
            &Superfield::coordinate_power(&c, d, 1, 0) + &Superfield::coordinate_power(&c, d, 0, 1),
        ]);
        let psi1 = SuperVector::unit(&c, d, 2, 1);
        ModelData::from_chain_unchecked(vec![psi0, psi1], vec![Superfield::theta(&c, d, Dir::Plus)]).unwrap()
    }

    fn all_zero(ds: &[Defect<Gq>]) -> bool {
        ds.iter().all(Defect::is_zero)
    }

    #[test]
    fn chain_examples() {
        let c = ctx();
        let (psis, eps) = veronese_chain(&c, 3, 7);
        assert!(all_zero(&verify_chain(&psis, &eps).unwrap()));
        let (psis, eps) = eta_cp1_chain(&c, 5).unwrap();
        assert!(all_zero(&verify_chain(&psis, &eps).unwrap()));
        // constant psi_0 with eps_1 = 0 is consistent for any psi_1
        let psis = vec![SuperVector::unit(&c, 3, 2, 0), SuperVector::unit(&c, 3, 2, 1)];
        let eps = vec![Superfield::zero(&c, 3)];
        assert!(all_zero(&verify_chain(&psis, &eps).unwrap()));
        // an even eps is rejected
        let eps = vec![Superfield::one(&c, 3)];
        assert!(matches!(verify_chain(&psis, &eps), Err(Error::Parity(_))));
        // x- dependence is rejected
        let bad = vec![SuperVector::new(vec![Superfield::one(&c, 3), Superfield::coordinate_power(&c, 3, 0, 1)]), psis[1].clone()];
        assert!(matches!(verify_chain(&bad, &[Superfield::zero(&c, 3)]), Err(Error::NonHolomorphic(_))));
        // a wrong factor violates the law
        let (psis, _) = veronese_chain(&c, 2, 4);
        let eps = vec![Superfield::theta(&c, 4, Dir::Plus).scale(&Gq::from_int(2))];
        assert!(matches!(ModelData::from_chain(psis, eps), Err(Error::ChainViolation(1))));
    }

    #[test]
    fn gram_schmidt_examples() {
        let c = ctx();
        let m = ModelData::from_chain(vec![SuperVector::unit(&c, 3, 1, 0)], vec![]).unwrap();
        assert_eq!(m.z(0), &m.psis()[0]);
        for m in [veronese(2), veronese(3), eta_cp1()] {
            for i in 0..m.dim() {
                for j in 0..m.dim() {
                    if i != j {
                        assert!(m.z(i).inner(m.z(j)).unwrap().is_zero(), "z_{i} . z_{j}");
                    }
                }
            }
        }
        let deg = vec![SuperVector::unit(&c, 3, 2, 0), SuperVector::unit(&c, 3, 2, 0)];
        assert!(matches!(gram_schmidt(&deg), Err(Error::DegenerateSeed(1))));
    }

    #[test]
    fn projectors_solve_the_model() {
        for m in [veronese(2), veronese(3), eta_cp1()] {
            for p in m.projectors() {
                assert!(el_defect(p).unwrap().is_zero());
                assert!(conservation_defect(p).unwrap().is_zero());
            }
        }
        let c = ctx();
        let k = SuperMatrix::constant(&c, 3, 2, &[Gq::one(), Gq::zero(), Gq::zero(), Gq::zero()]).unwrap();
        assert!(el_defect(&k).unwrap().is_zero());
        assert!(conservation_defect(&k).unwrap().is_zero());
    }

    #[test]
    fn negative_control_is_detected() {
        let m = broken();
        assert!(!el_defect(m.projector(0)).unwrap().is_zero());
        assert!(!conservation_defect(m.projector(0)).unwrap().is_zero());
        assert!(all_zero(&chain_law_defects(m.psis(), m.epsilons()).unwrap()));
    }

    #[test]
    fn propz_holds() {
        for m in [veronese(3), eta_cp1()] {
            assert!(all_zero(&m.propz_defects().unwrap()));
        }
    }

    /// Dense bosonic jet in (s, t) of `(1 + x+ x-)^{-2}`, expanded from the
    /// binomial series directly, independent of `invert_even`.
    fn bosonic_oracle(p: &Gq, order: usize) -> BTreeMap<(usize, usize), Gq> {
        type Poly = BTreeMap<(usize, usize), Gq>;
        let mul = |a: &Poly, b: &Poly| {
            let mut out = Poly::new();
            for (&(i1, j1), x) in a {
                for (&(i2, j2), y) in b {
                    if i1 + i2 + j1 + j2 <= order {
                        let e = out.entry((i1 + i2, j1 + j2)).or_insert_with(Gq::zero);
                        *e = e.clone() + x.clone() * y.clone();
                    }
                }
            }
            out
        };
        // 1 + (p + s)(conj p + t) = c (1 + u)
        let c = Gq::one() + p.clone() * p.conj();
        let mut u = Poly::new();
        u.insert((1, 0), p.conj() / c.clone());
        u.insert((0, 1), p.clone() / c.clone());
        u.insert((1, 1), Gq::one() / c.clone());
        let mut total = Poly::new();
        let mut power = Poly::from([((0, 0), Gq::one())]);
        for n in 0..=order {
            let k = Gq::from_int(if n % 2 == 0 { 1 } else { -1 } * (n as i64 + 1)) / (c.clone() * c.clone());
            for (key, v) in &power {
                let e = total.entry(*key).or_insert_with(Gq::zero);
                *e = e.clone() + v.clone() * k.clone();
            }
            power = mul(&power, &u);
        }
        total
    }

    #[test]
    fn cp1_topological_density_matches_bosonic_oracle() {
        let m = veronese(2);
        let c = m.context().clone();
        let (_, q0) = m.densities(0).unwrap();
        let oracle = bosonic_oracle(&c.base.plus, q0.order());
        // 2 theta- theta+ = -2 theta+ theta-
        let tpm = Monomial::from_indices(&[c.table.theta_plus(), c.table.theta_minus()]).unwrap().0;
        let entries = oracle.into_iter().map(|(ij, v)| {
            (ij, GrassmannElement::from_terms(c.table.clone(), vec![(tpm, v * Gq::from_int(-2))]))
        });
        let expected = Superfield::from_coefficients(&c, q0.order(), entries);
        assert_eq!(q0, expected);
    }

    #[test]
    fn density_boundary_cases() {
        let m = veronese(3);
        let (l0, q0) = m.densities(0).unwrap();
        assert_eq!(l0, q0);
        let (l2, q2) = m.densities(2).unwrap();
        assert_eq!(l2, -&q2);
        let one = ModelData::from_chain(vec![SuperVector::unit(&ctx(), 3, 1, 0)], vec![]).unwrap();
        assert!(one.densities(0).unwrap().1.is_zero());
        assert!(all_zero(&one.sum_rules().unwrap()));
        assert!(m.densities(3).is_err());
    }

    #[test]
    fn density_identities_hold() {
        for m in [veronese(3), eta_cp1()] {
            for k in 0..m.dim() {
                for d in m.density_log_identities(k).unwrap() {
                    assert!(d.is_zero(), "{} {:?}", d.name, d.leading_term());
                }
            }
            for d in m.sum_rules().unwrap() {
                assert!(d.is_zero(), "{} {:?}", d.name, d.leading_term());
            }
        }
    }

    #[test]
    fn negative_control_breaks_density_identities() {
        let m = broken();
        let bad = (0..2).any(|k| !all_zero(&m.density_log_identities(k).unwrap()));
        assert!(bad);
    }
}
