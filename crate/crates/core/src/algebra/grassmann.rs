use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use super::generators::{reorder_parity, GeneratorTable, Monomial};
use super::scalar::Scalar;
use crate::error::{Error, Result};

/// Z2 grading of a Grassmann (or super) quantity. Zero counts as even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
    Mixed,
}

impl Parity {
    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::Mixed => Parity::Mixed,
        }
    }

    /// Combined parity of a sum of quantities with parities `self` and `other`,
    /// where either may be zero (`None` stands for "no terms yet").
    pub(crate) fn join(acc: Option<Parity>, p: Parity) -> Option<Parity> {
        Some(match acc {
            None => p,
            Some(a) if a == p => a,
            Some(_) => Parity::Mixed,
        })
    }
}

/// Sparse canonical term list: sorted by monomial, no zero coefficients.
pub type Terms<S> = Vec<(Monomial, S)>;

pub(crate) mod terms {
    use super::*;

    pub fn normalize<S: Scalar>(mut raw: Terms<S>) -> Terms<S> {
        if raw.len() <= 1 {
            raw.retain(|(_, c)| !c.is_zero());
            return raw;
        }
        raw.sort_unstable_by_key(|(m, _)| *m);
        let mut out: Terms<S> = Vec::with_capacity(raw.len());
        for (m, c) in raw {
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => lc.add_assign_ref(&c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        out
    }

    pub fn add<S: Scalar>(a: &[(Monomial, S)], b: &[(Monomial, S)]) -> Terms<S> {
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = a[i].1.add_ref(&b[j].1);
                    if !c.is_zero() {
                        out.push((a[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        out
    }

    pub fn neg<S: Scalar>(a: &[(Monomial, S)]) -> Terms<S> {
        a.iter().map(|(m, c)| (*m, -c.clone())).collect()
    }

    pub fn scale<S: Scalar>(a: &[(Monomial, S)], k: &S) -> Terms<S> {
        if k.is_zero() {
            return Vec::new();
        }
        a.iter().map(|(m, c)| (*m, c.mul_ref(k))).collect()
    }

    /// Raw product terms of `a * b` appended to `out` (not normalised).
    #[inline]
    pub fn mul_into<S: Scalar>(out: &mut Terms<S>, a: &[(Monomial, S)], b: &[(Monomial, S)]) {
        for (ma, ca) in a {
            for (mb, cb) in b {
                if ma.0 & mb.0 != 0 {
                    continue;
                }
                let mut c = ca.mul_ref(cb);
                if reorder_parity(ma.0, mb.0) {
                    c.neg_mut();
                }
                out.push((Monomial(ma.0 | mb.0), c));
            }
        }
    }

    /// Adds the product `a * b` into the canonical list `acc` in place.
    /// Cancelled entries are left as explicit zeros; call [`prune`] afterwards.
    #[inline]
    pub fn mul_acc<S: Scalar>(acc: &mut Terms<S>, a: &[(Monomial, S)], b: &[(Monomial, S)]) {
        for (ma, ca) in a {
            for (mb, cb) in b {
                if ma.0 & mb.0 != 0 {
                    continue;
                }
                let mut c = ca.mul_ref(cb);
                if reorder_parity(ma.0, mb.0) {
                    c.neg_mut();
                }
                let m = Monomial(ma.0 | mb.0);
                match acc.binary_search_by_key(&m, |(k, _)| *k) {
                    Ok(i) => acc[i].1.add_assign_ref(&c),
                    Err(i) => acc.insert(i, (m, c)),
                }
            }
        }
    }

    pub fn prune<S: Scalar>(acc: &mut Terms<S>) {
        acc.retain(|(_, c)| !c.is_zero());
    }

    pub fn mul<S: Scalar>(a: &[(Monomial, S)], b: &[(Monomial, S)]) -> Terms<S> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        if let [(Monomial::ONE, k)] = a {
            return scale(b, k);
        }
        if let [(Monomial::ONE, k)] = b {
            return scale(a, k);
        }
        let mut out = Vec::with_capacity(a.len() * b.len());
        mul_into(&mut out, a, b);
        normalize(out)
    }

    pub fn dagger<S: Scalar>(table: &GeneratorTable, a: &[(Monomial, S)]) -> Terms<S> {
        let raw = a
            .iter()
            .map(|(m, c)| {
                let (dm, neg) = table.dagger_monomial(*m);
                let c = c.conj();
                (dm, if neg { -c } else { c })
            })
            .collect();
        normalize(raw)
    }

    /// Left Berezin derivative with respect to generator `g`.
    pub fn berezin<S: Scalar>(a: &[(Monomial, S)], g: usize) -> Terms<S> {
        let bit = 1u64 << g;
        a.iter()
            .filter(|(m, _)| m.0 & bit != 0)
            .map(|(m, c)| {
                let before = (m.0 & (bit - 1)).count_ones();
                let c = if before % 2 == 1 { -c.clone() } else { c.clone() };
                (Monomial(m.0 & !bit), c)
            })
            .collect()
    }

    pub fn parity<S>(a: &[(Monomial, S)]) -> Parity {
        a.iter()
            .fold(None, |acc, (m, _)| Parity::join(acc, if m.is_odd() { Parity::Odd } else { Parity::Even }))
            .unwrap_or(Parity::Even)
    }

    pub fn body<S: Scalar>(a: &[(Monomial, S)]) -> S {
        match a.first() {
            Some((Monomial::ONE, c)) => c.clone(),
            _ => S::zero(),
        }
    }

    /// Inverse of an element with nonzero body, via the terminating
    /// geometric series in its nilpotent soul. `None` if the body vanishes.
    pub fn invert<S: Scalar>(a: &[(Monomial, S)]) -> Option<Terms<S>> {
        let c = body(a);
        if c.is_zero() {
            return None;
        }
        let c_inv = S::one() / c;
        // a = c (1 + n),  a^-1 = c^-1 sum (-n)^k
        let minus_n: Terms<S> = a
            .iter()
            .filter(|(m, _)| *m != Monomial::ONE)
            .map(|(m, x)| (*m, -x.mul_ref(&c_inv)))
            .collect();
        let mut sum: Terms<S> = vec![(Monomial::ONE, S::one())];
        let mut power = sum.clone();
        loop {
            power = mul(&power, &minus_n);
            if power.is_empty() {
                break;
            }
            sum = add(&sum, &power);
        }
        Some(scale(&sum, &c_inv))
    }
}

/// Element of the finite exterior algebra over the generators of a
/// [`GeneratorTable`], with exact coefficients.
#[derive(Clone, PartialEq)]
pub struct GrassmannElement<S> {
    table: Arc<GeneratorTable>,
    terms: Terms<S>,
}

impl<S: Scalar> GrassmannElement<S> {
    pub fn zero(table: Arc<GeneratorTable>) -> Self {
        Self { table, terms: Vec::new() }
    }

    pub fn scalar(table: Arc<GeneratorTable>, c: S) -> Self {
        let terms = if c.is_zero() { Vec::new() } else { vec![(Monomial::ONE, c)] };
        Self { table, terms }
    }

    pub fn one(table: Arc<GeneratorTable>) -> Self {
        Self::scalar(table, S::one())
    }

    /// The single generator `g`.
    pub fn generator(table: Arc<GeneratorTable>, g: usize) -> Self {
        assert!(g < table.len(), "generator index out of range");
        Self { table, terms: vec![(Monomial::generator(g), S::one())] }
    }

    pub fn named(table: Arc<GeneratorTable>, name: &str) -> Result<Self> {
        let g = table.index_of(name)?;
        Ok(Self::generator(table, g))
    }

    /// `c * g_{i1} g_{i2} ...` in the given (not necessarily sorted) order.
    pub fn product_of(table: Arc<GeneratorTable>, c: S, indices: &[usize]) -> Self {
        match Monomial::from_indices(indices) {
            None => Self::zero(table),
            Some((m, neg)) => {
                let c = if neg { -c } else { c };
                Self::from_terms(table, vec![(m, c)])
            }
        }
    }

    pub fn from_terms(table: Arc<GeneratorTable>, terms: Terms<S>) -> Self {
        Self { table, terms: terms::normalize(terms) }
    }

    pub(crate) fn from_canonical(table: Arc<GeneratorTable>, terms: Terms<S>) -> Self {
        Self { table, terms }
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    pub fn terms(&self) -> &[(Monomial, S)] {
        &self.terms
    }

    pub fn into_terms(self) -> Terms<S> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: Monomial) -> S {
        self.terms
            .binary_search_by_key(&m, |(k, _)| *k)
            .map(|i| self.terms[i].1.clone())
            .unwrap_or_else(|_| S::zero())
    }

    /// Generator-free part.
    pub fn body(&self) -> S {
        terms::body(&self.terms)
    }

    fn check_table(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.table, &other.table) || self.table == other.table {
            Ok(())
        } else {
            Err(Error::TableMismatch)
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_table(other)?;
        Ok(Self::from_canonical(self.table.clone(), terms::add(&self.terms, &other.terms)))
    }

    /// Graded product with reordering signs.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_table(other)?;
        Ok(Self::from_canonical(self.table.clone(), terms::mul(&self.terms, &other.terms)))
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::from_canonical(self.table.clone(), terms::scale(&self.terms, k))
    }

    /// Conjugation with reversed factor order: `(ab)^dagger = b^dagger a^dagger`.
    pub fn dagger(&self) -> Self {
        Self::from_canonical(self.table.clone(), terms::dagger(&self.table, &self.terms))
    }

    /// Left Berezin derivative with respect to generator index `g`.
    pub fn berezin(&self, g: usize) -> Result<Self> {
        if g >= self.table.len() {
            return Err(Error::UnknownGenerator(format!("#{g}")));
        }
        Ok(Self::from_canonical(self.table.clone(), terms::berezin(&self.terms, g)))
    }

    pub fn berezin_named(&self, name: &str) -> Result<Self> {
        let g = self.table.index_of(name)?;
        self.berezin(g)
    }

    pub fn parity(&self) -> Parity {
        terms::parity(&self.terms)
    }

    pub fn inverse(&self) -> Result<Self> {
        terms::invert(&self.terms)
            .map(|t| Self::from_canonical(self.table.clone(), t))
            .ok_or_else(|| Error::SingularBody("Grassmann element with zero body".into()))
    }
}

impl<S: Scalar> fmt::Debug for GrassmannElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl<S: Scalar> fmt::Display for GrassmannElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| format!("({})*{}", c.render(), self.table.render_monomial(*m)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<S: Scalar> Add for &GrassmannElement<S> {
    type Output = GrassmannElement<S>;
    fn add(self, rhs: Self) -> GrassmannElement<S> {
        self.try_add(rhs).expect("generator tables must agree")
    }
}

impl<S: Scalar> Sub for &GrassmannElement<S> {
    type Output = GrassmannElement<S>;
    fn sub(self, rhs: Self) -> GrassmannElement<S> {
        self + &(-rhs)
    }
}

impl<S: Scalar> Neg for &GrassmannElement<S> {
    type Output = GrassmannElement<S>;
    fn neg(self) -> GrassmannElement<S> {
        GrassmannElement::from_canonical(self.table.clone(), terms::neg(&self.terms))
    }
}

impl<S: Scalar> Mul for &GrassmannElement<S> {
    type Output = GrassmannElement<S>;
    fn mul(self, rhs: Self) -> GrassmannElement<S> {
        self.try_mul(rhs).expect("generator tables must agree")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    use crate::algebra::scalar::gaussian;
    use crate::Gq;

    fn table() -> Arc<GeneratorTable> {
        Arc::new(GeneratorTable::with_eta_pairs(1))
    }

    fn g(t: &Arc<GeneratorTable>, name: &str) -> GrassmannElement<Gq> {
        GrassmannElement::named(t.clone(), name).unwrap()
    }

    #[test]
    fn anticommutation_and_nilpotency() {
        let t = table();
        let (tp, tm) = (g(&t, "theta+"), g(&t, "theta-"));
        assert!((&tp * &tp).is_zero());
        assert!((&(&tp * &tm) + &(&tm * &tp)).is_zero());
    }

    #[test]
    fn expand_product_of_shifted_units() {
        let t = table();
        let one = GrassmannElement::<Gq>::one(t.clone());
        let (tp, tm) = (g(&t, "theta+"), g(&t, "theta-"));
        let lhs = &(&one + &tp) * &(&one + &tm);
        // oracle: 1 + theta+ + theta- + theta+ theta-, each term already in canonical order
        let expected = &(&(&one + &tp) + &tm) + &(&tp * &tm);
        assert_eq!(lhs, expected);
        assert_eq!(lhs.coefficient(Monomial(0b11)), Gq::one());
    }

    #[test]
    fn dagger_examples() {
        let t = table();
        let (tp, tm) = (g(&t, "theta+"), g(&t, "theta-"));
        assert_eq!(tp.dagger(), tm);
        let prod = &tp * &tm;
        assert_eq!(prod.dagger(), prod);
        let c: Gq = gaussian((1, 2), (3, 4));
        let s = GrassmannElement::scalar(t.clone(), c.clone());
        assert_eq!(s.dagger(), GrassmannElement::scalar(t, c.conj()));
    }

    #[test]
    fn berezin_examples() {
        let t = table();
        let (tp, tm) = (g(&t, "theta+"), g(&t, "theta-"));
        let ip = t.theta_plus();
        assert_eq!((&tp * &tm).berezin(ip).unwrap(), tm);
        assert_eq!((&tm * &tp).berezin(ip).unwrap(), -&tm);
        assert!(tm.berezin(ip).unwrap().is_zero());
        assert!(tm.berezin(17).is_err());
        assert!(tm.berezin_named("chi").is_err());
    }

    #[test]
    fn parity_examples() {
        let t = table();
        let one = GrassmannElement::<Gq>::one(t.clone());
        let (tp, tm) = (g(&t, "theta+"), g(&t, "theta-"));
        assert_eq!((&one + &(&tp * &tm)).parity(), Parity::Even);
        assert_eq!(tp.parity(), Parity::Odd);
        assert_eq!((&one + &tp).parity(), Parity::Mixed);
    }

    #[test]
    fn table_mismatch_is_reported() {
        let a = GrassmannElement::<Gq>::one(table());
        let b = GrassmannElement::<Gq>::one(Arc::new(GeneratorTable::superspace()));
        assert_eq!(a.try_mul(&b), Err(Error::TableMismatch));
    }

    #[test]
    fn inverse_of_shifted_nilpotent() {
        let t = table();
        let one = GrassmannElement::<Gq>::one(t.clone());
        let n = &g(&t, "theta+") * &g(&t, "eta-");
        let x = &one + &n;
        assert_eq!(x.inverse().unwrap(), &one - &n);
        assert!(n.inverse().is_err());
    }
}
