//! Built-in model specifications.

use crate::algebra::{THETA_MINUS, THETA_PLUS};
use crate::error::{Error, Result};

use super::spec::{ComplexStr, FieldSpec, ModelSpec, Reduction, Term, SCHEMA};
use super::suites::Suite;

fn c(re: &str, im: &str) -> ComplexStr {
    [re.to_string(), im.to_string()]
}

fn term(coefficient: ComplexStr, mono: &[&str], x_power: usize) -> Term {
    Term { coefficient, grassmann_monomial: mono.iter().map(|s| s.to_string()).collect(), x_power, xm_power: 0 }
}

fn theta_plus() -> FieldSpec {
    vec![term(c("1", "0"), &[THETA_PLUS], 0)]
}

fn theta_pair() -> [String; 2] {
    [THETA_PLUS.to_string(), THETA_MINUS.to_string()]
}

fn eta_pair() -> [String; 2] {
    ["eta+".to_string(), "eta-".to_string()]
}

fn default_lambdas() -> Vec<ComplexStr> {
    vec![c("3/5", "4/5"), c("5/13", "12/13"), c("-1", "0"), c("1", "0")]
}

fn all_checks(with_reduction: bool) -> Vec<String> {
    Suite::ALL
        .iter()
        .filter(|s| with_reduction || **s != Suite::Reduction)
        .map(|s| s.name().to_string())
        .collect()
}

/// `psi_j = d+^j (1, x+, ..., x+^n)`, `eps_j = theta+`: the bosonic embedding into CP^n.
pub fn veronese(n: usize) -> ModelSpec {
    let dim = n + 1;
    let psi = (0..dim)
        .map(|j| {
            (0..dim)
                .map(|m| {
                    if m < j {
                        vec![]
                    } else {
                        let ff: u128 = (0..j).map(|r| (m - r) as u128).product();
                        vec![term(c(&ff.to_string(), "0"), &[], m - j)]
                    }
                })
                .collect()
        })
        .collect();
    ModelSpec {
        schema: SCHEMA.to_string(),
        name: format!("veronese_cp{n}"),
        n: dim,
        generators: vec![theta_pair()],
        base_point: c("1/2", "1/3"),
        truncation_order: dim + 6,
        psi,
        epsilon: (1..dim).map(|_| theta_plus()).collect(),
        lambdas: default_lambdas(),
        q: None,
        checks: all_checks(false),
        reduction: None,
    }
}

/// `psi_0 = (1, x+ + theta+ eta+)`, `psi_1 = (0, 1)`, `eps_1 = -i eta+ + theta+`.
pub fn eta_cp1() -> ModelSpec {
    let one = vec![term(c("1", "0"), &[], 0)];
    let psi0 = vec![one.clone(), vec![term(c("1", "0"), &[], 1), term(c("1", "0"), &[THETA_PLUS, "eta+"], 0)]];
    let psi1 = vec![vec![], one];
    ModelSpec {
        schema: SCHEMA.to_string(),
        name: "eta_cp1".to_string(),
        n: 2,
        generators: vec![theta_pair(), eta_pair()],
        base_point: c("1/2", "1/3"),
        truncation_order: 8,
        psi: vec![psi0, psi1],
        epsilon: vec![vec![term(c("0", "-1"), &["eta+"], 0), term(c("1", "0"), &[THETA_PLUS], 0)]],
        lambdas: default_lambdas(),
        q: None,
        checks: all_checks(true),
        reduction: Some(Reduction { c_plus: c("1", "0"), c_minus: c("0", "0") }),
    }
}

/// `(1, x+ + x-)` with `(0, 1)`: the chain law holds but holomorphy does not.
pub fn negative_control() -> ModelSpec {
    let one = vec![term(c("1", "0"), &[], 0)];
    let mut xm = term(c("1", "0"), &[], 0);
    xm.xm_power = 1;
    let psi0 = vec![one.clone(), vec![term(c("1", "0"), &[], 1), xm]];
    ModelSpec {
        schema: SCHEMA.to_string(),
        name: "negative_control".to_string(),
        n: 2,
        generators: vec![theta_pair()],
        base_point: c("1/2", "1/3"),
        truncation_order: 8,
        psi: vec![psi0, vec![vec![], one]],
        epsilon: vec![theta_plus()],
        lambdas: vec![c("3/5", "4/5"), c("-1", "0")],
        q: None,
        checks: [Suite::Chain, Suite::El, Suite::Conservation, Suite::Mc].iter().map(|s| s.name().to_string()).collect(),
        reduction: None,
    }
}

/// `veronese_cp2`, `eta_cp1`, `negative_control`, or `veronese_cp<n>` for `n >= 1`.
pub fn example_spec(name: &str) -> Result<ModelSpec> {
    match name {
        "eta_cp1" => Ok(eta_cp1()),
        "negative_control" => Ok(negative_control()),
        _ => match name.strip_prefix("veronese_cp").and_then(|n| n.parse::<usize>().ok()) {
            Some(n) if (1..=8).contains(&n) => Ok(veronese(n)),
            _ => Err(Error::UnknownExample(name.to_string())),
        },
    }
}
