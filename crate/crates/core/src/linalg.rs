//! Vectors and square or rectangular matrices with superfield entries.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::algebra::{Parity, Scalar};
use crate::error::{Error, Result};
use crate::superfield::{Dir, SuperContext, Superfield};

/// Column vector of superfields.
#[derive(Clone)]
pub struct SuperVector<S> {
    entries: Vec<Superfield<S>>,
}

impl<S: Scalar> SuperVector<S> {
    pub fn new(entries: Vec<Superfield<S>>) -> Self {
        Self { entries }
    }

    pub fn zero(ctx: &Arc<SuperContext<S>>, order: usize, n: usize) -> Self {
        Self { entries: vec![Superfield::zero(ctx, order); n] }
    }

    /// Unit coordinate vector `e_k`.
    pub fn unit(ctx: &Arc<SuperContext<S>>, order: usize, n: usize, k: usize) -> Self {
        let mut v = Self::zero(ctx, order, n);
        v.entries[k] = Superfield::one(ctx, order);
        v
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Superfield<S>] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &Superfield<S> {
        &self.entries[i]
    }

    pub fn order(&self) -> usize {
        self.entries.iter().map(Superfield::order).min().unwrap_or(usize::MAX)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Superfield::is_zero)
    }

    pub fn is_holomorphic(&self) -> bool {
        self.entries.iter().all(Superfield::is_holomorphic)
    }

    pub fn map(&self, f: impl Fn(&Superfield<S>) -> Superfield<S>) -> Self {
        Self { entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&Superfield<S>) -> Result<Superfield<S>>) -> Result<Self> {
        Ok(Self { entries: self.entries.iter().map(f).collect::<Result<_>>()? })
    }

    pub fn super_derivative(&self, dir: Dir) -> Result<Self> {
        self.try_map(|f| f.super_derivative(dir))
    }

    /// `f * v` with the superfield on the left of every entry.
    pub fn left_scale(&self, f: &Superfield<S>) -> Self {
        self.map(|e| f * e)
    }

    /// `v * f` with the superfield on the right of every entry.
    pub fn right_scale(&self, f: &Superfield<S>) -> Self {
        self.map(|e| e * f)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.try_add(b)).collect::<Result<_>>()?;
        Ok(Self { entries })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.try_sub(b)).collect::<Result<_>>()?;
        Ok(Self { entries })
    }

    /// Hermitian product `sum_i (v_i)^dagger w_i`.
    pub fn inner(&self, other: &Self) -> Result<Superfield<S>> {
        self.check_dim(other)?;
        let mut acc: Option<Superfield<S>> = None;
        for (a, b) in self.entries.iter().zip(&other.entries) {
            let term = a.dagger().try_mul(b)?;
            acc = Some(match acc {
                None => term,
                Some(s) => s.try_add(&term)?,
            });
        }
        acc.ok_or(Error::DimensionMismatch(0, 0))
    }

    /// `|v|^2`.
    pub fn norm_sqr(&self) -> Result<Superfield<S>> {
        self.inner(self)
    }

    /// Column matrix with the same entries.
    pub fn to_column(&self) -> SuperMatrix<S> {
        SuperMatrix { rows: self.dim(), cols: 1, entries: self.entries.clone() }
    }

    /// `v w^dagger`.
    pub fn outer(&self, other: &Self) -> SuperMatrix<S> {
        let wd: Vec<Superfield<S>> = other.entries.iter().map(Superfield::dagger).collect();
        let mut entries = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.entries {
            for b in &wd {
                entries.push(a * b);
            }
        }
        SuperMatrix { rows: self.dim(), cols: other.dim(), entries }
    }

    /// Rank-one projector `z z^dagger / |z|^2`.
    pub fn outer_projector(&self) -> Result<SuperMatrix<S>> {
        let inv = self.norm_sqr()?.invert_even()?;
        Ok(self.outer(self).map(|e| e * &inv))
    }
}

impl<S: Scalar> PartialEq for SuperVector<S> {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl<S: Scalar> fmt::Debug for SuperVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.entries).finish()
    }
}

/// Row-major matrix of superfields.
#[derive(Clone)]
pub struct SuperMatrix<S> {
    rows: usize,
    cols: usize,
    entries: Vec<Superfield<S>>,
}

impl<S: Scalar> SuperMatrix<S> {
    pub fn from_entries(rows: usize, cols: usize, entries: Vec<Superfield<S>>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> Superfield<S>) -> Self {
        let entries = (0..rows).flat_map(|i| (0..cols).map(move |j| (i, j))).map(|(i, j)| f(i, j)).collect();
        Self { rows, cols, entries }
    }

    pub fn zero(ctx: &Arc<SuperContext<S>>, order: usize, n: usize) -> Self {
        Self::from_fn(n, n, |_, _| Superfield::zero(ctx, order))
    }

    pub fn identity(ctx: &Arc<SuperContext<S>>, order: usize, n: usize) -> Self {
        Self::scalar_diag(ctx, order, n, S::one())
    }

    /// `c I`.
    pub fn scalar_diag(ctx: &Arc<SuperContext<S>>, order: usize, n: usize, c: S) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Superfield::constant(ctx, order, c.clone()) } else { Superfield::zero(ctx, order) })
    }

    /// Constant matrix from scalar entries (row-major).
    pub fn constant(ctx: &Arc<SuperContext<S>>, order: usize, n: usize, values: &[S]) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::ShapeMismatch(format!("{} values for a {n}x{n} matrix", values.len())));
        }
        Ok(Self::from_fn(n, n, |i, j| Superfield::constant(ctx, order, values[i * n + j].clone())))
    }

    /// `1x1` matrix holding a single superfield.
    pub fn from_field(f: Superfield<S>) -> Self {
        Self { rows: 1, cols: 1, entries: vec![f] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Superfield<S> {
        &self.entries[i * self.cols + j]
    }

    pub fn entries(&self) -> &[Superfield<S>] {
        &self.entries
    }

    pub fn order(&self) -> usize {
        self.entries.iter().map(Superfield::order).min().unwrap_or(usize::MAX)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Superfield::is_zero)
    }

    /// Every entry is even (zero counts as even).
    pub fn has_even_entries(&self) -> bool {
        self.entries.iter().all(|e| e.has_parity(Parity::Even))
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn parity(&self) -> Parity {
        self.entries
            .iter()
            .filter(|e| !e.is_zero())
            .fold(None, |acc, e| Parity::join(acc, e.parity()))
            .unwrap_or(Parity::Even)
    }

    /// First nonzero entry in row-major order, with its position.
    pub fn first_nonzero(&self) -> Option<((usize, usize), &Superfield<S>)> {
        self.entries
            .iter()
            .enumerate()
            .find(|(_, e)| !e.is_zero())
            .map(|(k, e)| ((k / self.cols, k % self.cols), e))
    }

    pub fn map(&self, f: impl Fn(&Superfield<S>) -> Superfield<S>) -> Self {
        Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn try_map(&self, f: impl Fn(&Superfield<S>) -> Result<Superfield<S>>) -> Result<Self> {
        Ok(Self { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect::<Result<_>>()? })
    }

    pub fn super_derivative(&self, dir: Dir) -> Result<Self> {
        self.try_map(|f| f.super_derivative(dir))
    }

    pub fn x_derivative(&self, dir: Dir) -> Result<Self> {
        self.try_map(|f| f.x_derivative(dir))
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map(|e| e.scale(k))
    }

    /// `f A`, the superfield multiplying every entry from the left.
    pub fn left_scale(&self, f: &Superfield<S>) -> Self {
        self.map(|e| f * e)
    }

    /// `A f`, the superfield multiplying every entry from the right.
    pub fn right_scale(&self, f: &Superfield<S>) -> Self {
        self.map(|e| e * f)
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|e| e.truncate(order))
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.try_add(b)).collect::<Result<_>>()?;
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.try_sub(b)).collect::<Result<_>>()?;
        Ok(Self { rows: self.rows, cols: self.cols, entries })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: Option<Superfield<S>> = None;
                for l in 0..self.cols {
                    let (a, b) = (self.get(i, l), other.get(l, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    let term = a.try_mul(b)?;
                    acc = Some(match acc {
                        None => term,
                        Some(s) => s.try_add(&term)?,
                    });
                }
                let entry = match acc {
                    Some(s) => s,
                    None => self.get(i, 0).try_mul(other.get(0, j))?,
                };
                entries.push(entry);
            }
        }
        Ok(Self { rows: self.rows, cols: other.cols, entries })
    }

    /// `A v`.
    pub fn apply(&self, v: &SuperVector<S>) -> Result<SuperVector<S>> {
        let col = self.try_mul(&v.to_column())?;
        Ok(SuperVector::new(col.entries))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).dagger())
    }

    pub fn trace(&self) -> Result<Superfield<S>> {
        if !self.is_square() || self.rows == 0 {
            return Err(Error::ShapeMismatch("trace needs a nonempty square matrix".into()));
        }
        let mut acc = self.get(0, 0).clone();
        for i in 1..self.rows {
            acc = acc.try_add(self.get(i, i))?;
        }
        Ok(acc)
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_add(&other.try_mul(self)?)
    }

    /// Leibniz determinant; factors of each term are taken in ascending column order.
    pub fn determinant(&self) -> Result<Superfield<S>> {
        if !self.is_square() || self.rows == 0 {
            return Err(Error::ShapeMismatch("determinant needs a nonempty square matrix".into()));
        }
        let n = self.rows;
        if n > 6 {
            return Err(Error::DimensionTooLarge(n));
        }
        if self.entries.iter().any(|e| !e.has_parity(Parity::Even)) {
            return Err(Error::Parity("determinant needs even entries".into()));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        let mut acc = Superfield::zero(self.get(0, 0).context(), self.order());
        permutations(&mut perm, 0, &mut |p, odd| {
            // product over columns c of A[p[c], c]
            let mut term = self.get(p[0], 0).clone();
            for (c, &r) in p.iter().enumerate().skip(1) {
                if term.is_zero() {
                    return Ok(());
                }
                term = term.try_mul(self.get(r, c))?;
            }
            acc = if odd { acc.try_sub(&term)? } else { acc.try_add(&term)? };
            Ok(())
        })?;
        Ok(acc)
    }

    /// `<A, B> = -1/2 Tr(AB)`.
    pub fn su_inner(&self, other: &Self) -> Result<Superfield<S>> {
        if !self.is_square() || !other.is_square() {
            return Err(Error::ShapeMismatch("su inner product needs square matrices".into()));
        }
        Ok(self.try_mul(other)?.trace()?.scale(&S::from_ratio(-1, 2)))
    }
}

/// Heap-free permutation walk; `odd` tracks the sign.
fn permutations(
    p: &mut Vec<usize>,
    start: usize,
    visit: &mut impl FnMut(&[usize], bool) -> Result<()>,
) -> Result<()> {
    fn go(p: &mut Vec<usize>, k: usize, odd: bool, visit: &mut impl FnMut(&[usize], bool) -> Result<()>) -> Result<()> {
        if k == p.len() {
            return visit(p, odd);
        }
        for i in k..p.len() {
            p.swap(k, i);
            go(p, k + 1, odd ^ (i != k), visit)?;
            p.swap(k, i);
        }
        Ok(())
    }
    go(p, start, false, visit)
}

impl<S: Scalar> PartialEq for SuperMatrix<S> {
    fn eq(&self, other: &Self) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols) && self.entries == other.entries
    }
}

impl<S: Scalar> fmt::Debug for SuperMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SuperMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                writeln!(f, "  ({i},{j}): {}", self.get(i, j))?;
            }
        }
        write!(f, "]")
    }
}

impl<S: Scalar> Add for &SuperMatrix<S> {
    type Output = SuperMatrix<S>;
    fn add(self, rhs: Self) -> SuperMatrix<S> {
        self.try_add(rhs).expect("matrix shapes agree")
    }
}

impl<S: Scalar> Sub for &SuperMatrix<S> {
    type Output = SuperMatrix<S>;
    fn sub(self, rhs: Self) -> SuperMatrix<S> {
        self.try_sub(rhs).expect("matrix shapes agree")
    }
}

impl<S: Scalar> Mul for &SuperMatrix<S> {
    type Output = SuperMatrix<S>;
    fn mul(self, rhs: Self) -> SuperMatrix<S> {
        self.try_mul(rhs).expect("matrix shapes agree")
    }
}

impl<S: Scalar> Neg for &SuperMatrix<S> {
    type Output = SuperMatrix<S>;
    fn neg(self) -> SuperMatrix<S> {
        self.map(|e| -e)
    }
}
