//! Reading parameter files and command-line value specs.

use std::fs;
use std::path::Path;

use statecap_core::cost::CostSpec;
use statecap_core::params::{parse_config, validate_params_with, ModelParams, Profile, RawParams};

use crate::CliError;

/// Reads a config file into raw fields without validating them.
pub fn load_raw(path: &Path) -> Result<RawParams, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    })?;
    parse_config(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn validate(raw: &RawParams, profile: Profile) -> Result<ModelParams, CliError> {
    validate_params_with(raw, profile)
        .map_err(|e| CliError::Input(format!("invalid parameters: {e}")))
}

pub fn load_params(path: &Path, profile: Profile) -> Result<ModelParams, CliError> {
    validate(&load_raw(path)?, profile)
}

/// Parses `quadratic:c=VALUE` or `tabulated:x0:y0,x1:y1,...`.
pub fn parse_cost(spec: &str) -> Result<CostSpec, CliError> {
    let bad = |why: &str| CliError::Input(format!("invalid cost {spec:?}: {why}"));
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| bad("expected quadratic:c=VALUE"))?;
    match kind {
        "quadratic" => {
            let value = rest
                .strip_prefix("c=")
                .ok_or_else(|| bad("expected c=VALUE"))?;
            let c: f64 = value
                .parse()
                .map_err(|_| bad("coefficient is not a number"))?;
            CostSpec::quadratic(c).map_err(|e| bad(&e.to_string()))
        }
        "tabulated" => {
            let knots = rest
                .split(',')
                .map(|pair| {
                    let (x, y) = pair.split_once(':').ok_or_else(|| bad("knots are x:y"))?;
                    let x: f64 = x.trim().parse().map_err(|_| bad("knot is not a number"))?;
                    let y: f64 = y.trim().parse().map_err(|_| bad("knot is not a number"))?;
                    Ok((x, y))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            CostSpec::tabulated(&knots).map_err(|e| bad(&e.to_string()))
        }
        _ => Err(bad("unknown cost kind")),
    }
}
