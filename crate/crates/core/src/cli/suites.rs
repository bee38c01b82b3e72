//! Identity suites run by the verifier, one task per `(suite, k, lambda)`.

use crate::algebra::Scalar;
use crate::defect::Defect;
use crate::error::{Error, Result};
use crate::forms::{aplus_consistency, alpha_minus_one, build_alpha_lambda, gamma_defect, mc_defect, mc_system_defects};
use crate::geometry::{dx_defects, eta_reduction, g_theta_theta_defect, metric_components, rho_identity, xi_a_defects};
use crate::linalg::SuperMatrix;
use crate::model::{chain_law_defects, conservation_defect, el_defect, ModelData};
use crate::spectral::{
    beta_closed_form, build_frame, compatibility_defect, frame_with_betas, linear_problem_defects, solve_betas,
    surface_defects, sym_tafel_defects, unitarity_prediction,
};
use crate::superfield::Superfield;

use super::spec::ResolvedSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Chain,
    El,
    Conservation,
    Propz,
    Densities,
    SumRules,
    Mc,
    Spectral,
    SymTafel,
    Surface,
    Metric,
    Reduction,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Chain,
        Suite::El,
        Suite::Conservation,
        Suite::Propz,
        Suite::Densities,
        Suite::SumRules,
        Suite::Mc,
        Suite::Spectral,
        Suite::SymTafel,
        Suite::Surface,
        Suite::Metric,
        Suite::Reduction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Chain => "chain",
            Suite::El => "el",
            Suite::Conservation => "conservation",
            Suite::Propz => "propz",
            Suite::Densities => "densities",
            Suite::SumRules => "sum_rules",
            Suite::Mc => "mc",
            Suite::Spectral => "spectral",
            Suite::SymTafel => "sym_tafel",
            Suite::Surface => "surface",
            Suite::Metric => "metric",
            Suite::Reduction => "reduction",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .copied()
            .find(|s| s.name() == name.trim())
            .ok_or_else(|| Error::Parse(format!("unknown check `{name}`")))
    }

    fn per_sector(self) -> bool {
        !matches!(self, Suite::Chain | Suite::Propz | Suite::SumRules)
    }

    fn per_lambda(self) -> bool {
        matches!(self, Suite::Mc | Suite::Spectral | Suite::SymTafel)
    }
}

/// Spectral parameter of a task; `index` orders tasks, `usize::MAX` marks the off-circle control.
#[derive(Clone, Debug)]
pub struct LambdaTag<S> {
    pub index: usize,
    pub value: S,
}

pub const OFF_CIRCLE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct Task<S> {
    pub suite: Suite,
    pub k: Option<usize>,
    pub lambda: Option<LambdaTag<S>>,
}

impl<S> Task<S> {
    pub fn key(&self) -> (Suite, usize, usize) {
        (self.suite, self.k.unwrap_or(0), self.lambda.as_ref().map_or(0, |l| l.index))
    }
}

/// Expands the requested suites into tasks, sorted by key.
pub fn plan<S: Scalar>(suites: &[Suite], n: usize, lambdas: &[S]) -> Vec<Task<S>> {
    let mut out = Vec::new();
    let mut suites = suites.to_vec();
    suites.sort();
    suites.dedup();
    for s in suites {
        let ks: Vec<Option<usize>> = if s.per_sector() { (0..n).map(Some).collect() } else { vec![None] };
        for k in ks {
            if s.per_lambda() {
                for (index, value) in lambdas.iter().enumerate() {
                    out.push(Task { suite: s, k, lambda: Some(LambdaTag { index, value: value.clone() }) });
                }
                if s == Suite::Spectral {
                    out.push(Task { suite: s, k, lambda: Some(LambdaTag { index: OFF_CIRCLE, value: S::from_int(2) }) });
                }
            } else {
                out.push(Task { suite: s, k, lambda: None });
            }
        }
    }
    out
}

/// Outcome of one named identity: `None` when it holds exactly, otherwise
/// the leading nonzero term or a description of what went wrong.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub name: String,
    pub leading: Option<String>,
}

fn from_defects<S: Scalar>(ds: impl IntoIterator<Item = Defect<S>>) -> Vec<Finding> {
    ds.into_iter()
        .map(|d| Finding { name: d.name.clone(), leading: d.leading_term().map(|t| t.to_string()) })
        .collect()
}

fn assertion(name: &str, holds: bool, detail: impl FnOnce() -> String) -> Finding {
    Finding { name: name.to_string(), leading: if holds { None } else { Some(detail()) } }
}

pub fn run_task<S: Scalar>(model: &ModelData<S>, spec: &ResolvedSpec<S>, task: &Task<S>) -> Result<Vec<Finding>> {
    let k = task.k.unwrap_or(0);
    let lambda = task.lambda.as_ref().map(|l| l.value.clone()).unwrap_or_else(S::one);
    let q = spec.q.as_ref();
    let p = || model.projector(k);
    Ok(match task.suite {
        Suite::Chain => from_defects(chain_law_defects(model.psis(), model.epsilons())?),
        Suite::El => from_defects([Defect::matrix("el", el_defect(p())?)]),
        Suite::Conservation => from_defects([Defect::matrix("conservation", conservation_defect(p())?)]),
        Suite::Propz => from_defects(model.propz_defects()?),
        Suite::Densities => from_defects(model.density_log_identities(k)?),
        Suite::SumRules => from_defects(model.sum_rules()?),
        Suite::Mc => mc(model, k, &lambda, q)?,
        Suite::Spectral => {
            if task.lambda.as_ref().is_some_and(|l| l.index == OFF_CIRCLE) {
                off_circle(model, k, &lambda, q)?
            } else {
                spectral(model, k, &lambda, q)?
            }
        }
        Suite::SymTafel => from_defects(sym_tafel_defects(&build_frame(model, k, &lambda, q)?, model)?),
        Suite::Surface => from_defects(surface_defects(model, k)?),
        Suite::Metric => {
            let t = metric_components(model, k)?;
            let mut ds = t.symmetry_defects()?;
            ds.extend(dx_defects(model, k, &t)?);
            ds.extend(rho_identity(model, k)?);
            ds.extend(xi_a_defects(model, k)?);
            ds.push(g_theta_theta_defect(model, k)?);
            from_defects(ds)
        }
        Suite::Reduction => match &spec.reduction {
            Some((cp, cm)) => from_defects([eta_reduction(model, k, cp, cm)?]),
            None => return Err(Error::UnsupportedReduction("the spec has no reduction block".into())),
        },
    })
}

fn constant<S: Scalar>(model: &ModelData<S>, name: &str, v: S) -> Defect<S> {
    Defect::field(name, Superfield::constant(model.context(), model.order(), v))
}

fn mc<S: Scalar>(model: &ModelData<S>, k: usize, lambda: &S, q: Option<&SuperMatrix<S>>) -> Result<Vec<Finding>> {
    let p = model.projector(k);
    let alpha = build_alpha_lambda(p, lambda)?;
    let mut out = vec![assertion("su_n", alpha.is_su_n()?, || "alpha is not su(N)-valued".into())];
    let mut ds = vec![constant(model, "gamma", gamma_defect(lambda)), Defect::matrix("a_plus", aplus_consistency(p, lambda)?)];
    ds.extend(mc_defect(&alpha)?.defects("mc "));
    ds.extend(mc_system_defects(&alpha.a_plus, &alpha.pi_plus)?);
    if *lambda == -S::one() {
        ds.extend(alpha_minus_one(p, q)?.defects);
    }
    out.extend(from_defects(ds));
    Ok(out)
}

fn spectral<S: Scalar>(model: &ModelData<S>, k: usize, lambda: &S, q: Option<&SuperMatrix<S>>) -> Result<Vec<Finding>> {
    let betas = solve_betas(lambda, k)?;
    let closed = beta_closed_form(lambda, k);
    let mut out = vec![assertion("betas", betas == closed, || {
        format!("recurrence {:?} vs closed form {:?}", render(&betas), render(&closed))
    })];
    let f = build_frame(model, k, lambda, q)?;
    let mut ds = vec![
        Defect::matrix("polynomial", f.polynomial()?.try_sub(&f.frame)?),
        Defect::matrix("unitarity", f.unitarity_defect()?),
    ];
    ds.extend(f.inverse_defects()?);
    ds.extend(linear_problem_defects(&f, model)?);
    ds.push(Defect::matrix("compatibility", compatibility_defect(&f)?));
    if model.dim() <= 6 {
        ds.push(Defect::field("det", f.determinant_defect()?));
    }
    out.extend(from_defects(ds));
    let (det, phase) = f.su_phase()?;
    // recorded, never forced: a phase may not exist in the exact field
    out.push(Finding { name: format!("det={} su_phase={}", det.render(), phase.map_or("none".into(), |c| c.render())), leading: None });
    Ok(out)
}

fn off_circle<S: Scalar>(model: &ModelData<S>, k: usize, lambda: &S, q: Option<&SuperMatrix<S>>) -> Result<Vec<Finding>> {
    let f = frame_with_betas(model, k, lambda, beta_closed_form(lambda, k), q)?;
    let defect = f.unitarity_defect()?;
    let predicted = unitarity_prediction(model, k, lambda)?;
    let mut out = from_defects([Defect::matrix("off_circle_prediction", defect.try_sub(&predicted)?)]);
    out.push(assertion("off_circle_nonzero", !defect.is_zero(), || "unitarity defect vanished off the circle".into()));
    Ok(out)
}

fn render<S: Scalar>(v: &[S]) -> Vec<String> {
    v.iter().map(Scalar::render).collect()
}
