//! Model primitives and their validation.
//!
//! Every other module takes a [`ModelParams`], and the only way to build one
//! is through [`validate_params`] (or [`validate_params_with`]), so downstream
//! code can rely on the ordering assumptions between the conflict
//! probabilities.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Every named field of [`ModelParams`], in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Field {
    Alpha,
    Lambda,
    Epsilon,
    Delta,
    Rho,
    Mu,
    Omega,
    SigmaD,
    SigmaF,
    M,
    Tau1,
    TauMax,
}

impl Field {
    pub const ALL: [Field; 12] = [
        Field::Alpha,
        Field::Lambda,
        Field::Epsilon,
        Field::Delta,
        Field::Rho,
        Field::Mu,
        Field::Omega,
        Field::SigmaD,
        Field::SigmaF,
        Field::M,
        Field::Tau1,
        Field::TauMax,
    ];

    /// The lowercase key used in config files and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Field::Alpha => "alpha",
            Field::Lambda => "lambda",
            Field::Epsilon => "epsilon",
            Field::Delta => "delta",
            Field::Rho => "rho",
            Field::Mu => "mu",
            Field::Omega => "omega",
            Field::SigmaD => "sigma_d",
            Field::SigmaF => "sigma_f",
            Field::M => "m",
            Field::Tau1 => "tau1",
            Field::TauMax => "tau_max",
        }
    }

    /// Value used when the field is absent from the input.
    pub fn default_value(self) -> Option<f64> {
        match self {
            Field::M => Some(1.0),
            Field::Tau1 => Some(0.0),
            Field::TauMax => Some(1.0),
            _ => None,
        }
    }

    /// Whether the field is a probability or share constrained to `[0, 1]`.
    pub fn is_unit_interval(self) -> bool {
        !matches!(self, Field::M | Field::Tau1 | Field::TauMax)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown field: {0}")]
pub struct UnknownField(pub String);

impl FromStr for Field {
    type Err = UnknownField;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Field::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| UnknownField(s.to_string()))
    }
}

/// Unvalidated field map, as read from a config file or built by hand.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawParams {
    values: BTreeMap<Field, f64>,
}

impl RawParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, field: Field, value: f64) -> &mut Self {
        self.values.insert(field, value);
        self
    }

    pub fn with(mut self, field: Field, value: f64) -> Self {
        self.values.insert(field, value);
        self
    }

    pub fn get(&self, field: Field) -> Option<f64> {
        self.values.get(&field).copied()
    }

    pub fn remove(&mut self, field: Field) -> Option<f64> {
        self.values.remove(&field)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Field, f64)> + '_ {
        self.values.iter().map(|(k, v)| (*k, *v))
    }
}

impl FromIterator<(Field, f64)> for RawParams {
    fn from_iter<I: IntoIterator<Item = (Field, f64)>>(iter: I) -> Self {
        RawParams {
            values: iter.into_iter().collect(),
        }
    }
}

/// A single violated assumption.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Violation {
    #[error("missing field: {0}")]
    Missing(Field),
    #[error("{field} = {value} is out of range ({allowed})")]
    Range {
        field: Field,
        value: f64,
        allowed: &'static str,
    },
    /// The foreign power must be more likely to win while a civil war is going on.
    #[error("assumption violated: rho > mu (rho={rho}, mu={mu})")]
    RhoNotAboveMu { rho: f64, mu: f64 },
    /// The opposition must be more likely to win a civil war during an external conflict.
    #[error("assumption violated: omega > delta (omega={omega}, delta={delta})")]
    OmegaNotAboveDelta { omega: f64, delta: f64 },
    /// Peacetime turnover must exceed the foreign win probability without civil war.
    #[error("assumption violated: epsilon > mu (epsilon={epsilon}, mu={mu})")]
    EpsilonNotAboveMu { epsilon: f64, mu: f64 },
    /// The war-and-invasion lottery needs `1 - omega - rho >= 0`.
    #[error("assumption violated: omega + rho <= 1 (omega={omega}, rho={rho})")]
    LotteryOverflow { omega: f64, rho: f64 },
}

/// The complete list of violations found in one validation pass.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ValidationError {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Which set of ordering assumptions to enforce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Profile {
    /// All strict inequalities of the baseline game.
    #[default]
    Baseline,
    /// Constitutional-bargaining stage: `omega >= delta` is accepted with
    /// equality, everything else as in the baseline.
    Constitutional,
}

/// Validated model primitives. Immutable; build through [`validate_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    alpha: f64,
    lambda: f64,
    epsilon: f64,
    delta: f64,
    rho: f64,
    mu: f64,
    omega: f64,
    sigma_d: f64,
    sigma_f: f64,
    m: f64,
    tau1: f64,
    tau_max: f64,
}

/// Validates a raw field map under the baseline assumptions.
///
/// Validation is total: every violated bound is reported, not only the first.
pub fn validate_params(raw: &RawParams) -> Result<ModelParams, ValidationError> {
    validate_params_with(raw, Profile::Baseline)
}

pub fn validate_params_with(
    raw: &RawParams,
    profile: Profile,
) -> Result<ModelParams, ValidationError> {
    let mut violations = Vec::new();
    let mut read = |field: Field| -> f64 {
        match raw.get(field).or(field.default_value()) {
            Some(v) => v,
            None => {
                violations.push(Violation::Missing(field));
                f64::NAN
            }
        }
    };
    let p = ModelParams {
        alpha: read(Field::Alpha),
        lambda: read(Field::Lambda),
        epsilon: read(Field::Epsilon),
        delta: read(Field::Delta),
        rho: read(Field::Rho),
        mu: read(Field::Mu),
        omega: read(Field::Omega),
        sigma_d: read(Field::SigmaD),
        sigma_f: read(Field::SigmaF),
        m: read(Field::M),
        tau1: read(Field::Tau1),
        tau_max: read(Field::TauMax),
    };

    for field in Field::ALL {
        let v = p.get(field);
        if v.is_nan() && raw.get(field).is_none() && field.default_value().is_none() {
            continue; // already reported as missing
        }
        if field.is_unit_interval() && !(0.0..=1.0).contains(&v) {
            violations.push(Violation::Range {
                field,
                value: v,
                allowed: "[0, 1]",
            });
        }
    }
    if !(p.m.is_finite() && p.m > 0.0) {
        violations.push(Violation::Range {
            field: Field::M,
            value: p.m,
            allowed: "m > 0",
        });
    }
    if !(0.0..=1.0).contains(&p.tau_max) {
        violations.push(Violation::Range {
            field: Field::TauMax,
            value: p.tau_max,
            allowed: "tau_max <= 1",
        });
    }
    if !(p.tau1 >= 0.0 && p.tau1 <= p.tau_max) {
        violations.push(Violation::Range {
            field: Field::Tau1,
            value: p.tau1,
            allowed: "0 <= tau1 <= tau_max",
        });
    }

    // NaN comparisons are false, so missing fields never trip these.
    if p.rho <= p.mu {
        violations.push(Violation::RhoNotAboveMu {
            rho: p.rho,
            mu: p.mu,
        });
    }
    let omega_short = match profile {
        Profile::Baseline => p.omega <= p.delta,
        Profile::Constitutional => p.omega < p.delta,
    };
    if omega_short {
        violations.push(Violation::OmegaNotAboveDelta {
            omega: p.omega,
            delta: p.delta,
        });
    }
    if p.epsilon <= p.mu {
        violations.push(Violation::EpsilonNotAboveMu {
            epsilon: p.epsilon,
            mu: p.mu,
        });
    }
    if p.omega + p.rho > 1.0 {
        violations.push(Violation::LotteryOverflow {
            omega: p.omega,
            rho: p.rho,
        });
    }

    if violations.is_empty() {
        Ok(p)
    } else {
        Err(ValidationError { violations })
    }
}

impl ModelParams {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn sigma_d(&self) -> f64 {
        self.sigma_d
    }
    pub fn sigma_f(&self) -> f64 {
        self.sigma_f
    }
    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn tau1(&self) -> f64 {
        self.tau1
    }
    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn get(&self, field: Field) -> f64 {
        match field {
            Field::Alpha => self.alpha,
            Field::Lambda => self.lambda,
            Field::Epsilon => self.epsilon,
            Field::Delta => self.delta,
            Field::Rho => self.rho,
            Field::Mu => self.mu,
            Field::Omega => self.omega,
            Field::SigmaD => self.sigma_d,
            Field::SigmaF => self.sigma_f,
            Field::M => self.m,
            Field::Tau1 => self.tau1,
            Field::TauMax => self.tau_max,
        }
    }

    pub fn to_raw(&self) -> RawParams {
        Field::ALL.iter().map(|&f| (f, self.get(f))).collect()
    }

    /// Copy with one field replaced, revalidated under `profile`.
    pub fn with_field(
        &self,
        field: Field,
        value: f64,
        profile: Profile,
    ) -> Result<ModelParams, ValidationError> {
        validate_params_with(&self.to_raw().with(field, value), profile)
    }

    /// Copy with `sigma_d` replaced, skipping revalidation.
    ///
    /// `sigma_d` enters none of the ordering assumptions, so any value in
    /// `[0, 1]` keeps the params valid.
    pub(crate) fn with_sigma_d(&self, sigma_d: f64) -> ModelParams {
        debug_assert!((0.0..=1.0).contains(&sigma_d));
        ModelParams { sigma_d, ..*self }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key=value, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: {source}")]
    Unknown {
        line: usize,
        #[source]
        source: UnknownField,
    },
    #[error("line {line}: {key} is not a number: {value:?}")]
    Number {
        line: usize,
        key: String,
        value: String,
    },
    #[error("line {line}: duplicate field {key}")]
    Duplicate { line: usize, key: String },
}

/// Parses the flat `key=value` config format.
///
/// One field per line, `#` starts a comment, blank lines are ignored, keys
/// are the lowercase field names.
pub fn parse_config(text: &str) -> Result<RawParams, ConfigError> {
    let mut raw = RawParams::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line: line_no,
            text: line.to_string(),
        })?;
        let key = key.trim();
        let value = value.trim();
        let field: Field = key.parse().map_err(|source| ConfigError::Unknown {
            line: line_no,
            source,
        })?;
        let number: f64 = value.parse().map_err(|_| ConfigError::Number {
            line: line_no,
            key: key.to_string(),
            value: value.to_string(),
        })?;
        if raw.get(field).is_some() {
            return Err(ConfigError::Duplicate {
                line: line_no,
                key: key.to_string(),
            });
        }
        raw.set(field, number);
    }
    Ok(raw)
}

/// Renders params in the config format; `parse_config` reads it back exactly.
pub fn format_config(params: &ModelParams) -> String {
    let mut out = String::new();
    for f in Field::ALL {
        out.push_str(&format!("{}={:?}\n", f.name(), params.get(f)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map_raw() -> RawParams {
        [
            (Field::Alpha, 0.5),
            (Field::Lambda, 0.0),
            (Field::Epsilon, 0.3),
            (Field::Delta, 0.4),
            (Field::Rho, 0.5),
            (Field::Mu, 0.1),
            (Field::Omega, 0.5),
            (Field::SigmaD, 0.9),
            (Field::SigmaF, 0.1),
            (Field::M, 1.0),
            (Field::Tau1, 0.2),
        ]
        .into_iter()
        .collect()
    }

    #[test]
    fn accepts_figure_parameters() {
        let p = validate_params(&map_raw()).unwrap();
        assert_eq!(p.tau_max(), 1.0);
        assert_eq!(p.sigma_d(), 0.9);
    }

    #[test]
    fn rejects_rho_below_mu() {
        let err = validate_params(&map_raw().with(Field::Rho, 0.05)).unwrap_err();
        assert!(err
            .violations
            .iter()
            .any(|v| matches!(v, Violation::RhoNotAboveMu { .. })));
    }

    #[test]
    fn rejects_lottery_overflow() {
        let err = validate_params(&map_raw().with(Field::Omega, 0.7)).unwrap_err();
        assert_eq!(
            err.violations,
            vec![Violation::LotteryOverflow {
                omega: 0.7,
                rho: 0.5
            }]
        );
    }

    #[test]
    fn reports_every_violation_at_once() {
        let mut raw = map_raw()
            .with(Field::Rho, 0.05)
            .with(Field::Epsilon, 0.05)
            .with(Field::Delta, 0.6)
            .with(Field::Alpha, 1.5);
        raw.remove(Field::SigmaF);
        let err = validate_params(&raw).unwrap_err();
        let v = &err.violations;
        assert!(v.contains(&Violation::Missing(Field::SigmaF)));
        assert!(v.iter().any(|x| matches!(
            x,
            Violation::Range {
                field: Field::Alpha,
                ..
            }
        )));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::RhoNotAboveMu { .. })));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::OmegaNotAboveDelta { .. })));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::EpsilonNotAboveMu { .. })));
        assert_eq!(v.len(), 5);
    }

    #[test]
    fn missing_field_message() {
        let mut raw = map_raw();
        raw.remove(Field::Rho);
        let err = validate_params(&raw).unwrap_err();
        assert_eq!(err.to_string(), "missing field: rho");
    }

    #[test]
    fn defaults_fill_scale_and_capacity() {
        let mut raw = map_raw();
        raw.remove(Field::M);
        raw.remove(Field::Tau1);
        let p = validate_params(&raw).unwrap();
        assert_eq!((p.m(), p.tau1(), p.tau_max()), (1.0, 0.0, 1.0));
    }

    #[test]
    fn capacity_bounds() {
        let err = validate_params(&map_raw().with(Field::Tau1, 0.6).with(Field::TauMax, 0.5))
            .unwrap_err();
        assert!(matches!(
            err.violations[..],
            [Violation::Range {
                field: Field::Tau1,
                ..
            }]
        ));
        assert!(validate_params(&map_raw().with(Field::M, 0.0)).is_err());
        assert!(validate_params(&map_raw().with(Field::TauMax, 1.2)).is_err());
    }

    #[test]
    fn constitutional_profile_allows_equal_omega_delta() {
        let raw = map_raw().with(Field::Omega, 0.4);
        assert!(validate_params(&raw).is_err());
        assert!(validate_params_with(&raw, Profile::Constitutional).is_ok());
        let raw = map_raw().with(Field::Omega, 0.3);
        assert!(validate_params_with(&raw, Profile::Constitutional).is_err());
    }

    #[test]
    fn validation_is_idempotent() {
        let p = validate_params(&map_raw()).unwrap();
        assert_eq!(validate_params(&p.to_raw()).unwrap(), p);
    }

    #[test]
    fn config_round_trip() {
        let text = "# Figure 2 point\nalpha = 0.5\nlambda=0\nepsilon=0.3 # trailing\n\
                    delta=0.4\nrho=0.5\nmu=0.1\nomega=0.5\nsigma_d=0.9\nsigma_f=0.1\n\ntau1=0.2\n";
        let raw = parse_config(text).unwrap();
        let p = validate_params(&raw).unwrap();
        assert_eq!(p, validate_params(&map_raw()).unwrap());
        let again = validate_params(&parse_config(&format_config(&p)).unwrap()).unwrap();
        assert_eq!(again, p);
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            parse_config("alpha 0.5"),
            Err(ConfigError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_config("\nbeta=0.5"),
            Err(ConfigError::Unknown { line: 2, .. })
        ));
        assert!(matches!(
            parse_config("alpha=half"),
            Err(ConfigError::Number { .. })
        ));
        assert!(matches!(
            parse_config("alpha=0.1\nalpha=0.2"),
            Err(ConfigError::Duplicate { line: 2, .. })
        ));
    }
}
