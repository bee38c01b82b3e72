//! Model specification files.
//!
//! A spec is a JSON document. Every number that is not an exponent or a
//! size is an exact rational written as a string (`"-3/5"`), and complex
//! values are `[re, im]` string pairs, so files round-trip byte for byte.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{GeneratorTable, GrassmannElement, Scalar};
use crate::error::{Error, Result};
use crate::linalg::{SuperMatrix, SuperVector};
use crate::superfield::{BasePoint, SuperContext, Superfield};

pub const SCHEMA: &str = "supercpn-model/1";

/// `[re, im]` as exact rational strings.
pub type ComplexStr = [String; 2];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coefficient: ComplexStr,
    /// Generator names, multiplied left to right.
    #[serde(default)]
    pub grassmann_monomial: Vec<String>,
    /// Power of `x+`.
    #[serde(default)]
    pub x_power: usize,
    /// Power of `x-`; only non-holomorphic inputs use it.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub xm_power: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

/// A superfield as a sum of terms.
pub type FieldSpec = Vec<Term>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Reduction {
    pub c_plus: ComplexStr,
    pub c_minus: ComplexStr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub schema: String,
    pub name: String,
    pub n: usize,
    /// Dagger pairs; the first must be `["theta+", "theta-"]`.
    pub generators: Vec<[String; 2]>,
    pub base_point: ComplexStr,
    pub truncation_order: usize,
    /// `psi[j][m]` is component `m` of `psi_j`.
    pub psi: Vec<Vec<FieldSpec>>,
    /// `epsilon[j - 1]` is `eps_j`.
    pub epsilon: Vec<FieldSpec>,
    pub lambdas: Vec<ComplexStr>,
    /// Row-major `N x N` constant unitary.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Vec<ComplexStr>>,
    pub checks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<Reduction>,
}

impl ModelSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let spec: ModelSpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if spec.schema != SCHEMA {
            return Err(Error::Parse(format!("unsupported schema `{}` (expected `{SCHEMA}`)", spec.schema)));
        }
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serialises");
        s.push('\n');
        s
    }

    /// Resolves every exact value and shape; the result is ready to build.
    pub fn resolve<S: Scalar>(&self) -> Result<ResolvedSpec<S>> {
        let pairs: Vec<(&str, &str)> = self.generators.iter().map(|[a, b]| (a.as_str(), b.as_str())).collect();
        let table = GeneratorTable::from_pairs(&pairs)?;
        let base = parse_complex::<S>(&self.base_point)?;
        let ctx = SuperContext::new(table, BasePoint::new(base));
        let order = self.truncation_order;
        let n = self.n;
        if self.psi.len() != n {
            return Err(Error::ShapeMismatch(format!("N = {n} but {} psi vectors", self.psi.len())));
        }
        let psis = self
            .psi
            .iter()
            .map(|v| {
                if v.len() != n {
                    return Err(Error::DimensionMismatch(v.len(), n));
                }
                Ok(SuperVector::new(v.iter().map(|f| build_field(&ctx, order, f)).collect::<Result<_>>()?))
            })
            .collect::<Result<Vec<_>>>()?;
        let epsilons = self.epsilon.iter().map(|f| build_field(&ctx, order, f)).collect::<Result<Vec<_>>>()?;
        let lambdas = self.lambdas.iter().map(parse_complex).collect::<Result<Vec<S>>>()?;
        let q = match &self.q {
            None => None,
            Some(values) => {
                let vals = values.iter().map(parse_complex).collect::<Result<Vec<S>>>()?;
                Some(SuperMatrix::constant(&ctx, order, n, &vals)?)
            }
        };
        let reduction = match &self.reduction {
            None => None,
            Some(r) => Some((parse_complex(&r.c_plus)?, parse_complex(&r.c_minus)?)),
        };
        Ok(ResolvedSpec { ctx, psis, epsilons, lambdas, q, reduction })
    }
}

/// A spec with all values parsed into the engine's types.
pub struct ResolvedSpec<S: Scalar> {
    pub ctx: Arc<SuperContext<S>>,
    pub psis: Vec<SuperVector<S>>,
    pub epsilons: Vec<Superfield<S>>,
    pub lambdas: Vec<S>,
    pub q: Option<SuperMatrix<S>>,
    pub reduction: Option<(S, S)>,
}

pub fn parse_complex<S: Scalar>(c: &ComplexStr) -> Result<S> {
    S::parse_parts(&c[0], &c[1])
}

pub fn complex_str<S: Scalar>(c: &S) -> ComplexStr {
    let (re, im) = c.format_parts();
    [re, im]
}

fn build_field<S: Scalar>(ctx: &Arc<SuperContext<S>>, order: usize, terms: &FieldSpec) -> Result<Superfield<S>> {
    let mut f = Superfield::zero(ctx, order);
    for t in terms {
        let c = parse_complex::<S>(&t.coefficient)?;
        let idx = t.grassmann_monomial.iter().map(|g| ctx.table.index_of(g)).collect::<Result<Vec<_>>>()?;
        let g = GrassmannElement::product_of(ctx.table.clone(), c, &idx);
        let x = Superfield::coordinate_power(ctx, order, t.x_power, t.xm_power);
        f = f.try_add(&x.left_mul_grassmann(&g))?;
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::examples::example_spec;
    use crate::Gq;

    #[test]
    fn round_trip_is_byte_stable() {
        for name in ["veronese_cp2", "eta_cp1", "negative_control", "veronese_cp3"] {
            let text = example_spec(name).unwrap().to_json();
            let again = ModelSpec::parse(&text).unwrap().to_json();
            assert_eq!(text, again);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let mut spec = example_spec("eta_cp1").unwrap();
        spec.base_point = ["0.5".into(), "0".into()];
        assert!(matches!(spec.resolve::<Gq>(), Err(Error::Parse(_))));
        let mut spec = example_spec("eta_cp1").unwrap();
        spec.psi[0][1][0].grassmann_monomial = vec!["zeta".into()];
        assert!(matches!(spec.resolve::<Gq>(), Err(Error::UnknownGenerator(_))));
        let text = example_spec("eta_cp1").unwrap().to_json().replace(SCHEMA, "other/9");
        assert!(matches!(ModelSpec::parse(&text), Err(Error::Parse(_))));
        assert!(matches!(ModelSpec::parse("{"), Err(Error::Parse(_))));
    }
}
