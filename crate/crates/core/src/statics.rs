//! How turnover and investment respond to the risk of external conflict.
//!
//! [`classify`] assigns each parameter point to the regimes describing the
//! sign of `dphi/dalpha` and `dtau2*/dalpha`; [`finite_difference`] estimates
//! those derivatives numerically so the classification can be checked.

use std::fmt;

use thiserror::Error;

use crate::conflict::{civil_war_decision, TIE_TOLERANCE};
use crate::cost::CostSpec;
use crate::fiscal::solve_equilibrium;
use crate::params::{Field, ModelParams, Profile, ValidationError};

/// Two sides of the investment condition closer than this are treated as equal.
pub const EQUALITY_TOLERANCE: f64 = 1e-12;

/// Direction in which a higher conflict risk moves political turnover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TurnoverResponse {
    /// Civil war: turnover rises with `alpha`.
    TurnoverUp,
    /// Peace: turnover falls with `alpha`.
    TurnoverDown,
}

/// Sign of the investment response to a higher conflict risk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvestmentResponse {
    /// Civil war: investment falls.
    Case2A,
    /// Peace and `eps - mu > sd (eps - lambda mu)`: investment rises.
    Case2B1,
    /// Peace and equality: investment does not move.
    Case2B2,
    /// Peace and `eps - mu < sd (eps - lambda mu)`: investment falls.
    Case2B3,
}

/// Joint movement of turnover and investment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum JointResponse {
    /// More turnover, less investment.
    Case3A,
    /// Less turnover, more investment.
    Case3B1,
    /// Less turnover without more investment.
    Case3B2,
}

impl TurnoverResponse {
    pub fn label(self) -> &'static str {
        match self {
            TurnoverResponse::TurnoverUp => "1.A",
            TurnoverResponse::TurnoverDown => "1.B",
        }
    }
}

impl InvestmentResponse {
    pub fn label(self) -> &'static str {
        match self {
            InvestmentResponse::Case2A => "2.A",
            InvestmentResponse::Case2B1 => "2.B.1",
            InvestmentResponse::Case2B2 => "2.B.2",
            InvestmentResponse::Case2B3 => "2.B.3",
        }
    }
}

impl JointResponse {
    pub fn label(self) -> &'static str {
        match self {
            JointResponse::Case3A => "3.A",
            JointResponse::Case3B1 => "3.B.1",
            JointResponse::Case3B2 => "3.B.2",
        }
    }
}

macro_rules! display_label {
    ($($t:ty),*) => {$(
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.label())
            }
        }
    )*};
}
display_label!(TurnoverResponse, InvestmentResponse, JointResponse);

/// Points where a small perturbation could change the classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BoundaryFlags {
    /// `sigma_f` is within rounding of the civil-war threshold.
    pub near_war_threshold: bool,
    /// The two sides of the investment condition are within `1e-9` of each other.
    pub near_investment_boundary: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegimeClassification {
    pub prop1: TurnoverResponse,
    pub prop2: InvestmentResponse,
    pub prop3: JointResponse,
    pub boundary: BoundaryFlags,
}

/// `eps - mu - sd (eps - lambda mu)`: positive when peace-time investment
/// rises with `alpha`.
pub fn investment_gap(p: &ModelParams) -> f64 {
    (p.epsilon() - p.mu()) - p.sigma_d() * (p.epsilon() - p.lambda() * p.mu())
}

/// Classifies from a known civil-war decision.
pub fn classify_with(p: &ModelParams, war: bool, threshold: Option<f64>) -> RegimeClassification {
    let gap = investment_gap(p);
    let (prop1, prop2, prop3) = if war {
        (
            TurnoverResponse::TurnoverUp,
            InvestmentResponse::Case2A,
            JointResponse::Case3A,
        )
    } else if gap.abs() <= EQUALITY_TOLERANCE {
        (
            TurnoverResponse::TurnoverDown,
            InvestmentResponse::Case2B2,
            JointResponse::Case3B2,
        )
    } else if gap > 0.0 {
        (
            TurnoverResponse::TurnoverDown,
            InvestmentResponse::Case2B1,
            JointResponse::Case3B1,
        )
    } else {
        (
            TurnoverResponse::TurnoverDown,
            InvestmentResponse::Case2B3,
            JointResponse::Case3B2,
        )
    };
    let near_war_threshold =
        threshold.is_some_and(|t| (p.sigma_f() - t).abs() <= TIE_TOLERANCE * t.abs().max(1.0));
    RegimeClassification {
        prop1,
        prop2,
        prop3,
        boundary: BoundaryFlags {
            near_war_threshold,
            near_investment_boundary: gap.abs() <= 1e-9,
        },
    }
}

pub fn classify(p: &ModelParams) -> RegimeClassification {
    let d = civil_war_decision(p);
    classify_with(p, d.war, d.threshold)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Phi,
    Tau2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wrt {
    Alpha,
    Lambda,
    SigmaD,
}

impl Wrt {
    pub fn field(self) -> Field {
        match self {
            Wrt::Alpha => Field::Alpha,
            Wrt::Lambda => Field::Lambda,
            Wrt::SigmaD => Field::SigmaD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StaticsError {
    #[error("{field} = {value} with step {h} leaves [0, 1]")]
    DomainExit { field: Field, value: f64, h: f64 },
    #[error("step must be positive and finite, got {0}")]
    Step(f64),
    #[error("perturbed point is invalid: {0}")]
    Invalid(#[from] ValidationError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeEstimate {
    pub value: f64,
    /// Civil-war decision and solver flags agree at all three evaluation points.
    pub regime_stable: bool,
    /// The solver sat at the zero-investment corner at the centre point.
    pub corner: bool,
}

/// Default step for differencing with respect to a parameter at `x`.
pub fn default_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

/// Central-difference estimate of `d target / d wrt` at `p`.
pub fn finite_difference(
    p: &ModelParams,
    cost: &CostSpec,
    target: Target,
    wrt: Wrt,
    h: f64,
) -> Result<DerivativeEstimate, StaticsError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(StaticsError::Step(h));
    }
    let field = wrt.field();
    let x = p.get(field);
    if x - h < 0.0 || x + h > 1.0 {
        return Err(StaticsError::DomainExit { field, value: x, h });
    }
    // The differenced fields never enter the omega/delta ordering, so the
    // looser profile accepts exactly the neighbours of any valid point.
    let lo = p.with_field(field, x - h, Profile::Constitutional)?;
    let hi = p.with_field(field, x + h, Profile::Constitutional)?;
    let [rl, rc, rh] = [&lo, p, &hi].map(|q| solve_equilibrium(q, cost));
    let regime_stable = rl.war() == rc.war()
        && rh.war() == rc.war()
        && rl.flags() == rc.flags()
        && rh.flags() == rc.flags();
    let pick = |r: &crate::fiscal::EquilibriumResult| match target {
        Target::Phi => r.phi,
        Target::Tau2 => r.tau2_star(),
    };
    Ok(DerivativeEstimate {
        value: (pick(&rh) - pick(&rl)) / (2.0 * h),
        regime_stable,
        corner: rc.flags().corner,
    })
}
