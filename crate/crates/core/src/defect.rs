//! Named residuals of identities and their leading nonzero terms.

use std::fmt;

use crate::algebra::Scalar;
use crate::linalg::{SuperMatrix, SuperVector};
use crate::superfield::Superfield;

/// A residual that certifies an identity when it is the zero jet.
#[derive(Clone, Debug)]
pub struct Defect<S: Scalar> {
    pub name: String,
    pub value: SuperMatrix<S>,
}

/// First nonzero coefficient of a defect: matrix entry (row-major), then jet
/// exponents `(i, j)` by total degree, then Grassmann monomial bitmask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeadingTerm {
    pub entry: (usize, usize),
    pub s_power: usize,
    pub t_power: usize,
    pub monomial: String,
    pub value: String,
}

impl fmt::Display for LeadingTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{},{}] s^{} t^{} {}: {}",
            self.entry.0, self.entry.1, self.s_power, self.t_power, self.monomial, self.value
        )
    }
}

impl<S: Scalar> Defect<S> {
    pub fn matrix(name: impl Into<String>, value: SuperMatrix<S>) -> Self {
        Self { name: name.into(), value }
    }

    pub fn field(name: impl Into<String>, value: Superfield<S>) -> Self {
        Self::matrix(name, SuperMatrix::from_field(value))
    }

    pub fn vector(name: impl Into<String>, value: &SuperVector<S>) -> Self {
        Self::matrix(name, value.to_column())
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn leading_term(&self) -> Option<LeadingTerm> {
        let (entry, field) = self.value.first_nonzero()?;
        let ((i, j), m, c) = field.leading_term()?;
        Some(LeadingTerm {
            entry,
            s_power: i,
            t_power: j,
            monomial: field.table().render_monomial(m),
            value: c.render(),
        })
    }
}
