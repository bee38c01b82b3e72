//! Superfields as truncated jets.
//!
//! A [`Superfield`] is the Taylor jet of a superspace function around a base
//! point `(p, conj p)`: a finite sum of `c_{ij} s^i t^j` with
//! `s = x+ - p`, `t = x- - conj p`, `i + j <= order`, and Grassmann-valued
//! coefficients `c_{ij}`. Products truncate to the smaller order, every
//! `x`-derivative lowers the order by one, and running out of order is an
//! error rather than a silent truncation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::algebra::{terms, GeneratorTable, GrassmannElement, Monomial, Parity, Scalar, Terms};
use crate::error::{Error, Result};

/// Expansion point `x+ = p`; `x-` is pinned to `conj p`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasePoint<S> {
    pub plus: S,
}

impl<S: Scalar> BasePoint<S> {
    pub fn new(plus: S) -> Self {
        Self { plus }
    }

    pub fn minus(&self) -> S {
        self.plus.conj()
    }
}

/// Shared generator table and base point for a family of superfields.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperContext<S> {
    pub table: Arc<GeneratorTable>,
    pub base: BasePoint<S>,
}

impl<S: Scalar> SuperContext<S> {
    pub fn new(table: GeneratorTable, base: BasePoint<S>) -> Arc<Self> {
        Arc::new(Self { table: Arc::new(table), base })
    }
}

/// Direction of a derivative: `+` acts on `(x+, theta+)`, `-` on `(x-, theta-)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dir {
    Plus,
    Minus,
}

/// A monomial in `(theta+, theta-)` for theta-expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaPart {
    One,
    Plus,
    Minus,
    PlusMinus,
}

#[inline]
fn tri_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

#[inline]
fn tri_idx(i: usize, j: usize) -> usize {
    let n = i + j;
    n * (n + 1) / 2 + j
}

/// All `(i, j)` with `i + j <= order`, by total degree then `j`.
fn tri_iter(order: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=order).flat_map(|n| (0..=n).map(move |j| (n - j, j)))
}

fn binomial<S: Scalar>(n: usize, k: usize) -> S {
    let mut acc = S::one();
    for m in 0..k {
        acc = acc * S::from_int((n - m) as i64) / S::from_int((m + 1) as i64);
    }
    acc
}

#[derive(Clone)]
pub struct Superfield<S> {
    ctx: Arc<SuperContext<S>>,
    order: usize,
    coeffs: Vec<Terms<S>>,
}

impl<S: Scalar> Superfield<S> {
    pub fn zero(ctx: &Arc<SuperContext<S>>, order: usize) -> Self {
        Self { ctx: ctx.clone(), order, coeffs: vec![Vec::new(); tri_len(order)] }
    }

    pub fn constant(ctx: &Arc<SuperContext<S>>, order: usize, c: S) -> Self {
        let mut f = Self::zero(ctx, order);
        if !c.is_zero() {
            f.coeffs[0] = vec![(Monomial::ONE, c)];
        }
        f
    }

    pub fn one(ctx: &Arc<SuperContext<S>>, order: usize) -> Self {
        Self::constant(ctx, order, S::one())
    }

    /// Constant (x-independent) Grassmann element.
    pub fn grassmann(ctx: &Arc<SuperContext<S>>, order: usize, g: &GrassmannElement<S>) -> Self {
        let mut f = Self::zero(ctx, order);
        f.coeffs[0] = g.terms().to_vec();
        f
    }

    /// The generator named `name`, as a constant superfield.
    pub fn generator(ctx: &Arc<SuperContext<S>>, order: usize, name: &str) -> Result<Self> {
        let g = ctx.table.index_of(name)?;
        let mut f = Self::zero(ctx, order);
        f.coeffs[0] = vec![(Monomial::generator(g), S::one())];
        Ok(f)
    }

    pub fn theta(ctx: &Arc<SuperContext<S>>, order: usize, dir: Dir) -> Self {
        let g = match dir {
            Dir::Plus => ctx.table.theta_plus(),
            Dir::Minus => ctx.table.theta_minus(),
        };
        let mut f = Self::zero(ctx, order);
        f.coeffs[0] = vec![(Monomial::generator(g), S::one())];
        f
    }

    /// `s^i t^j` (shifted coordinates).
    pub fn shifted_monomial(ctx: &Arc<SuperContext<S>>, order: usize, i: usize, j: usize) -> Self {
        let mut f = Self::zero(ctx, order);
        if i + j <= order {
            f.coeffs[tri_idx(i, j)] = vec![(Monomial::ONE, S::one())];
        }
        f
    }

    /// Jet of `x+^a x-^b` at the base point.
    pub fn coordinate_power(ctx: &Arc<SuperContext<S>>, order: usize, a: usize, b: usize) -> Self {
        let p = ctx.base.plus.clone();
        let q = ctx.base.minus();
        let mut f = Self::zero(ctx, order);
        for i in 0..=a {
            for j in 0..=b {
                if i + j > order {
                    continue;
                }
                let c = binomial::<S>(a, i) * pow(&p, a - i) * binomial::<S>(b, j) * pow(&q, b - j);
                if !c.is_zero() {
                    f.coeffs[tri_idx(i, j)] = vec![(Monomial::ONE, c)];
                }
            }
        }
        f
    }

    /// Builds a jet from explicit `(i, j, coefficient)` entries in `s, t`.
    pub fn from_coefficients(
        ctx: &Arc<SuperContext<S>>,
        order: usize,
        entries: impl IntoIterator<Item = ((usize, usize), GrassmannElement<S>)>,
    ) -> Self {
        let mut f = Self::zero(ctx, order);
        for ((i, j), g) in entries {
            if i + j <= order {
                let k = tri_idx(i, j);
                f.coeffs[k] = terms::add(&f.coeffs[k], g.terms());
            }
        }
        f
    }

    pub fn context(&self) -> &Arc<SuperContext<S>> {
        &self.ctx
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.ctx.table
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Grassmann coefficient of `s^i t^j`.
    pub fn coefficient(&self, i: usize, j: usize) -> GrassmannElement<S> {
        let t = if i + j <= self.order { self.coeffs[tri_idx(i, j)].clone() } else { Vec::new() };
        GrassmannElement::from_terms(self.ctx.table.clone(), t)
    }

    /// Nonzero coefficients as `((i, j), terms)`.
    pub fn nonzero_coefficients(&self) -> impl Iterator<Item = ((usize, usize), &[(Monomial, S)])> {
        tri_iter(self.order)
            .map(move |(i, j)| ((i, j), self.coeffs[tri_idx(i, j)].as_slice()))
            .filter(|(_, t)| !t.is_empty())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|t| t.is_empty())
    }

    /// Scalar part of the constant coefficient.
    pub fn body_constant(&self) -> S {
        terms::body(&self.coeffs[0])
    }

    pub fn parity(&self) -> Parity {
        self.coeffs
            .iter()
            .filter(|t| !t.is_empty())
            .fold(None, |acc, t| Parity::join(acc, terms::parity(t)))
            .unwrap_or(Parity::Even)
    }

    /// True when `f` is `Even` or `Odd` as required (zero satisfies both).
    pub fn has_parity(&self, p: Parity) -> bool {
        self.is_zero() || self.parity() == p
    }

    /// No `t` dependence and no `theta-` content.
    pub fn is_holomorphic(&self) -> bool {
        let tm = 1u64 << self.ctx.table.theta_minus();
        tri_iter(self.order).all(|(i, j)| {
            let c = &self.coeffs[tri_idx(i, j)];
            (j == 0 || c.is_empty()) && c.iter().all(|(m, _)| m.0 & tm == 0)
        })
    }

    /// Lexicographically first nonzero coefficient: `(i, j)`, monomial, value.
    pub fn leading_term(&self) -> Option<((usize, usize), Monomial, S)> {
        self.nonzero_coefficients().next().map(|(ij, t)| (ij, t[0].0, t[0].1.clone()))
    }

    /// The even part: monomials of even degree only.
    pub fn extract_even(&self) -> Self {
        self.map_coeffs(|t| t.iter().filter(|(m, _)| !m.is_odd()).cloned().collect())
    }

    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.order {
            return self.clone();
        }
        Self { ctx: self.ctx.clone(), order, coeffs: self.coeffs[..tri_len(order)].to_vec() }
    }

    fn same_context(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.ctx, &other.ctx) {
            return Ok(());
        }
        if self.ctx.table != other.ctx.table {
            return Err(Error::TableMismatch);
        }
        if self.ctx.base != other.ctx.base {
            return Err(Error::BaseMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let order = self.order.min(other.order);
        let coeffs = (0..tri_len(order)).map(|k| terms::add(&self.coeffs[k], &other.coeffs[k])).collect();
        Ok(Self { ctx: self.ctx.clone(), order, coeffs })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg_ref())
    }

    /// Truncated Cauchy product with graded Grassmann multiplication.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.same_context(other)?;
        let order = self.order.min(other.order);
        let mut out: Vec<Terms<S>> = vec![Vec::new(); tri_len(order)];
        let rhs: Vec<((usize, usize), &[(Monomial, S)])> =
            other.nonzero_coefficients().filter(|((i, j), _)| i + j <= order).collect();
        for ((i1, j1), a) in self.nonzero_coefficients() {
            if i1 + j1 > order {
                break;
            }
            let room = order - i1 - j1;
            for &((i2, j2), b) in &rhs {
                if i2 + j2 > room {
                    break;
                }
                terms::mul_acc(&mut out[tri_idx(i1 + i2, j1 + j2)], a, b);
            }
        }
        out.iter_mut().for_each(terms::prune);
        let coeffs = out;
        Ok(Self { ctx: self.ctx.clone(), order, coeffs })
    }

    fn neg_ref(&self) -> Self {
        self.map_coeffs(|t| terms::neg(t))
    }

    fn map_coeffs(&self, f: impl Fn(&[(Monomial, S)]) -> Terms<S>) -> Self {
        Self { ctx: self.ctx.clone(), order: self.order, coeffs: self.coeffs.iter().map(|t| f(t)).collect() }
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map_coeffs(|t| terms::scale(t, k))
    }

    /// `g * f` for a constant Grassmann element `g` on the left.
    pub fn left_mul_grassmann(&self, g: &GrassmannElement<S>) -> Self {
        self.map_coeffs(|t| terms::mul(g.terms(), t))
    }

    /// `f * g` for a constant Grassmann element `g` on the right.
    pub fn right_mul_grassmann(&self, g: &GrassmannElement<S>) -> Self {
        self.map_coeffs(|t| terms::mul(t, g.terms()))
    }

    /// Formal derivative in `x+` (`s`) or `x-` (`t`); lowers the order by one.
    pub fn x_derivative(&self, dir: Dir) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::OrderUnderflow { needed: 1, available: 0 });
        }
        let order = self.order - 1;
        let coeffs = tri_iter(order)
            .map(|(i, j)| {
                let (src, k) = match dir {
                    Dir::Plus => (tri_idx(i + 1, j), i + 1),
                    Dir::Minus => (tri_idx(i, j + 1), j + 1),
                };
                terms::scale(&self.coeffs[src], &S::from_int(k as i64))
            })
            .collect();
        Ok(Self { ctx: self.ctx.clone(), order, coeffs })
    }

    /// Left Berezin derivative with respect to generator `g`, coefficientwise.
    pub fn berezin(&self, g: usize) -> Result<Self> {
        if g >= self.ctx.table.len() {
            return Err(Error::UnknownGenerator(format!("#{g}")));
        }
        Ok(self.map_coeffs(|t| terms::berezin(t, g)))
    }

    fn theta_index(&self, dir: Dir) -> usize {
        match dir {
            Dir::Plus => self.ctx.table.theta_plus(),
            Dir::Minus => self.ctx.table.theta_minus(),
        }
    }

    /// Superderivative `-i d/dtheta + theta d/dx` in direction `dir`.
    pub fn super_derivative(&self, dir: Dir) -> Result<Self> {
        let dx = self.x_derivative(dir)?;
        let g = self.theta_index(dir);
        let bit = Monomial::generator(g);
        let minus_i = -S::i();
        let order = dx.order;
        let coeffs = (0..tri_len(order))
            .map(|k| {
                let b = terms::scale(&terms::berezin(&self.coeffs[k], g), &minus_i);
                let tx = terms::mul(&[(bit, S::one())], &dx.coeffs[k]);
                terms::add(&b, &tx)
            })
            .collect();
        Ok(Self { ctx: self.ctx.clone(), order, coeffs })
    }

    /// Conjugation: `x+ <-> x-` and Grassmann dagger on every coefficient.
    pub fn dagger(&self) -> Self {
        let table = &self.ctx.table;
        let coeffs = tri_iter(self.order).map(|(i, j)| terms::dagger(table, &self.coeffs[tri_idx(j, i)])).collect();
        Self { ctx: self.ctx.clone(), order: self.order, coeffs }
    }

    /// Two-sided inverse of an even superfield with nonzero body constant.
    pub fn invert_even(&self) -> Result<Self> {
        if !self.has_parity(Parity::Even) {
            return Err(Error::Parity("invert_even needs an even superfield".into()));
        }
        let g00 = terms::invert(&self.coeffs[0])
            .ok_or_else(|| Error::SingularBody("body constant of an even superfield is zero".into()))?;
        let minus_g00 = terms::neg(&g00);
        let mut out: Vec<Terms<S>> = vec![Vec::new(); tri_len(self.order)];
        out[0] = g00;
        // Even coefficients are central, so the recursion needs no ordering care.
        for (i, j) in tri_iter(self.order).skip(1) {
            let mut raw = Vec::new();
            for a in 0..=i {
                for b in 0..=j {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    let fab = &self.coeffs[tri_idx(a, b)];
                    if fab.is_empty() {
                        continue;
                    }
                    terms::mul_acc(&mut raw, fab, &out[tri_idx(i - a, j - b)]);
                }
            }
            let mut acc = raw;
            terms::prune(&mut acc);
            out[tri_idx(i, j)] = terms::mul(&minus_g00, &acc);
        }
        Ok(Self { ctx: self.ctx.clone(), order: self.order, coeffs: out })
    }

    /// `f^{-1} * superderivative(f)`: the superderivative of `log f`, never forming the log.
    pub fn log_derivative(&self, dir: Dir) -> Result<Self> {
        let inv = self.invert_even()?;
        let d = self.super_derivative(dir)?;
        inv.try_mul(&d)
    }

    /// Coefficient of a theta-monomial in `f = f1 + theta+ f+ + theta- f- + theta+ theta- f+-`
    /// (thetas written to the left), with any prefactor left in place.
    pub fn extract_theta(&self, part: ThetaPart) -> Self {
        let tp = 1u64 << self.ctx.table.theta_plus();
        let tm = 1u64 << self.ctx.table.theta_minus();
        let want = match part {
            ThetaPart::One => 0,
            ThetaPart::Plus => tp,
            ThetaPart::Minus => tm,
            ThetaPart::PlusMinus => tp | tm,
        };
        // theta-part prefix as an ordered product: theta+ then theta-
        let prefix = match part {
            ThetaPart::PlusMinus => Monomial::from_indices(&[self.ctx.table.theta_plus(), self.ctx.table.theta_minus()]),
            _ => Some((Monomial(want), false)),
        }
        .expect("theta prefix is square-free");
        self.map_coeffs(|t| {
            let raw = t
                .iter()
                .filter(|(m, _)| m.0 & (tp | tm) == want)
                .map(|(m, c)| {
                    let rest = Monomial(m.0 & !want);
                    // prefix * rest = sign * m  =>  c m = (c sign) prefix rest
                    let (_, neg) = Monomial(want).mul(rest).expect("disjoint");
                    let neg = neg ^ prefix.1;
                    (rest, if neg { -c.clone() } else { c.clone() })
                })
                .collect();
            terms::normalize(raw)
        })
    }

    /// Homomorphism `theta+ -> e`, `theta- -> e^dagger` for an odd theta-free `e`.
    pub fn substitute_theta(&self, e: &GrassmannElement<S>) -> Result<Self> {
        if e.table() != &self.ctx.table && **e.table() != *self.ctx.table {
            return Err(Error::TableMismatch);
        }
        if !(e.is_zero() || e.parity() == Parity::Odd) {
            return Err(Error::InvalidSubstitution("replacement for theta+ must be odd".into()));
        }
        let th = self.ctx.table.theta_mask();
        if e.terms().iter().any(|(m, _)| m.0 & th != 0) {
            return Err(Error::InvalidSubstitution("replacement for theta+ must not contain thetas".into()));
        }
        let ed = e.dagger();
        let eed = e.try_mul(&ed)?;
        let parts = [
            (ThetaPart::One, None),
            (ThetaPart::Plus, Some(e.terms())),
            (ThetaPart::Minus, Some(ed.terms())),
            (ThetaPart::PlusMinus, Some(eed.terms())),
        ];
        let mut acc = Self::zero(&self.ctx, self.order);
        for (part, image) in parts {
            let coeff = self.extract_theta(part);
            let term = match image {
                None => coeff,
                Some(img) => coeff.map_coeffs(|t| terms::mul(img, t)),
            };
            acc = acc.try_add(&term)?;
        }
        Ok(acc)
    }
}

fn pow<S: Scalar>(x: &S, n: usize) -> S {
    let mut acc = S::one();
    for _ in 0..n {
        acc = acc * x.clone();
    }
    acc
}

impl<S: Scalar> PartialEq for Superfield<S> {
    /// Equality of jets up to the smaller order.
    fn eq(&self, other: &Self) -> bool {
        match self.try_sub(other) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }
}

impl<S: Scalar> fmt::Debug for Superfield<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Superfield(order {}; {})", self.order, self)
    }
}

impl<S: Scalar> fmt::Display for Superfield<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let table = &self.ctx.table;
        let parts: Vec<String> = self
            .nonzero_coefficients()
            .flat_map(|((i, j), t)| {
                t.iter().map(move |(m, c)| format!("({}) s^{i} t^{j} {}", c.render(), table.render_monomial(*m)))
            })
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl<S: Scalar> Add for &Superfield<S> {
    type Output = Superfield<S>;
    fn add(self, rhs: Self) -> Superfield<S> {
        self.try_add(rhs).expect("superfields share a context")
    }
}

impl<S: Scalar> Sub for &Superfield<S> {
    type Output = Superfield<S>;
    fn sub(self, rhs: Self) -> Superfield<S> {
        self.try_sub(rhs).expect("superfields share a context")
    }
}

impl<S: Scalar> Mul for &Superfield<S> {
    type Output = Superfield<S>;
    fn mul(self, rhs: Self) -> Superfield<S> {
        self.try_mul(rhs).expect("superfields share a context")
    }
}

impl<S: Scalar> Neg for &Superfield<S> {
    type Output = Superfield<S>;
    fn neg(self) -> Superfield<S> {
        self.neg_ref()
    }
}
