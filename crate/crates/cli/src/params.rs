use jpurn_core::coefficients::{validate_parameters, Parameters};
use jpurn_core::IntegerParameters;
use serde_json::{json, Value};

use crate::args::ParamArgs;
use crate::CliError;

/// The parameter form a run uses.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamSet {
    Real(Parameters<f64>),
    Integer(IntegerParameters),
}

impl ParamSet {
    pub fn to_json(&self) -> Value {
        match self {
            ParamSet::Real(p) => json!({ "alpha": p.alpha, "beta": p.beta, "gamma": p.gamma }),
            ParamSet::Integer(ip) => json!({ "M": ip.m, "N": ip.n, "gamma": ip.gamma }),
        }
    }

    pub fn integer(&self) -> Result<IntegerParameters, CliError> {
        match self {
            ParamSet::Integer(ip) => Ok(*ip),
            ParamSet::Real(_) => Err(CliError::InvalidParameters(
                "the urn model needs integer parameters --M --N --gamma".into(),
            )),
        }
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::InvalidParameters(msg.into())
}

/// Resolves the flag set into exactly one parameter form and validates it.
pub fn resolve(args: &ParamArgs) -> Result<ParamSet, CliError> {
    let real = args.alpha.is_some() || args.beta.is_some();
    let integer = args.big_m.is_some() || args.big_n.is_some();
    let gamma = args
        .gamma
        .as_deref()
        .ok_or_else(|| invalid("missing --gamma"))?;
    match (real, integer) {
        (true, true) => Err(invalid("give either --alpha/--beta or --M/--N, not both")),
        (false, false) => Err(invalid("missing parameters: --alpha --beta --gamma or --M --N --gamma")),
        (true, false) => {
            let (Some(alpha), Some(beta)) = (args.alpha, args.beta) else {
                return Err(invalid("--alpha and --beta must be given together"));
            };
            let gamma: f64 = gamma
                .parse()
                .map_err(|_| invalid(format!("--gamma {gamma:?} is not a number")))?;
            let p = Parameters::new(alpha, beta, gamma);
            let violations = validate_parameters(&p);
            if violations.is_empty() {
                Ok(ParamSet::Real(p))
            } else {
                Err(jpurn_core::Error::InvalidParameters(violations).into())
            }
        }
        (false, true) => {
            let (Some(m), Some(n)) = (args.big_m, args.big_n) else {
                return Err(invalid("--M and --N must be given together"));
            };
            let gamma: u64 = gamma
                .parse()
                .map_err(|_| invalid(format!("--gamma {gamma:?} must be a non-negative integer with --M/--N")))?;
            Ok(ParamSet::Integer(IntegerParameters::new(m, n, gamma)?))
        }
    }
}
