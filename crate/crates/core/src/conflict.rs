//! The opposition's civil-war decision and political turnover.
//!
//! The opposition compares its expected period-2 utility with and without a
//! civil war. Both sides are affine in capacity with a common `(1 - tau2) m`
//! term, so the comparison reduces to `sigma_f * D > N` for the
//! threshold numerator `N` and denominator `D` below; when `D > 0` that is
//! `sigma_f > N / D`.

use thiserror::Error;

use crate::params::ModelParams;
use crate::policy::expected_utility_O1;

/// Capacity at which the direct comparison is evaluated; the sign of the
/// utility gap does not depend on it and the gap is largest here.
pub const REFERENCE_TAU2: f64 = 1.0;

/// Relative distance to the threshold below which a disagreement between
/// the two decision routes is attributed to rounding.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Utility gaps (per unit of income) at or below this count as indifference.
pub const INDIFFERENCE: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionMethod {
    ThresholdComparison,
    DirectUtilityComparison,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConflictDecision {
    /// Whether the opposition starts a civil war.
    pub war: bool,
    /// The threshold on `sigma_f`, when its denominator is positive.
    pub threshold: Option<f64>,
    pub method: DecisionMethod,
    /// Threshold comparison and direct comparison give the same answer
    /// (up to [`TIE_TOLERANCE`] around the threshold). Always true when the
    /// threshold is undefined.
    pub methods_agree: bool,
}

impl ConflictDecision {
    /// The civil-war indicator as a number, 0 or 1.
    pub fn gamma(&self) -> f64 {
        if self.war {
            1.0
        } else {
            0.0
        }
    }
}

/// Numerator and denominator of the threshold ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParts {
    pub numerator: f64,
    pub denominator: f64,
}

impl ThresholdParts {
    pub fn ratio(&self) -> Option<f64> {
        (self.denominator > 0.0).then(|| self.numerator / self.denominator)
    }
}

/// Net civil-war advantage of the opposition absent the external channel:
/// `alpha omega + (1 - alpha) delta - (1 - alpha) epsilon`.
fn domestic_edge(p: &ModelParams) -> f64 {
    let a = p.alpha();
    a * p.omega() + (1.0 - a) * p.delta() - (1.0 - a) * p.epsilon()
}

pub fn threshold_parts(p: &ModelParams) -> ThresholdParts {
    let ext = p.alpha() * (p.rho() - p.mu());
    let edge = domestic_edge(p);
    let sd = p.sigma_d();
    ThresholdParts {
        numerator: 2.0 * (ext * (sd - p.lambda()) - (1.0 - sd) * edge),
        denominator: ext * (1.0 - p.lambda() * sd) + (1.0 - sd) * edge,
    }
}

/// The threshold on `sigma_f` above which the opposition starts a civil war.
/// `None` when the denominator is not positive.
pub fn civil_war_threshold(p: &ModelParams) -> Option<f64> {
    threshold_parts(p).ratio()
}

/// Expected utility gap, war minus peace, for the opposition at `tau2`.
pub fn war_advantage(p: &ModelParams, tau2: f64) -> f64 {
    expected_utility_O1(p, tau2, true) - expected_utility_O1(p, tau2, false)
}

/// Decides whether the opposition starts a civil war.
///
/// The decision itself always comes from the direct utility comparison;
/// ties resolve to peace. When the threshold is defined it is reported and
/// checked against the direct route.
pub fn civil_war_decision(p: &ModelParams) -> ConflictDecision {
    let war = war_advantage(p, REFERENCE_TAU2) > INDIFFERENCE * p.m();
    match civil_war_threshold(p) {
        Some(t) => {
            let by_threshold = p.sigma_f() > t;
            let near_tie = (p.sigma_f() - t).abs() <= TIE_TOLERANCE * t.abs().max(1.0);
            ConflictDecision {
                war,
                threshold: Some(t),
                method: DecisionMethod::ThresholdComparison,
                methods_agree: by_threshold == war || near_tie,
            }
        }
        None => ConflictDecision {
            war,
            threshold: None,
            method: DecisionMethod::DirectUtilityComparison,
            methods_agree: true,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum ConflictError {
    #[error("threshold undefined: denominator {0} is not positive")]
    UndefinedThreshold(f64),
}

/// Partial derivatives of the threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivities {
    pub d_sigma_d: f64,
    pub d_lambda: f64,
    pub d_alpha: f64,
}

/// Closed-form derivatives of the threshold with respect to `sigma_d`,
/// `lambda` and `alpha`.
///
/// The sign of `d_sigma_d` is positive only when
/// `alpha (rho - mu)(1 + lambda) + 2 * edge > 0`; callers that rely on it
/// should check [`sigma_d_sensitivity_bracket`].
pub fn threshold_sensitivities(p: &ModelParams) -> Result<Sensitivities, ConflictError> {
    let den = threshold_parts(p).denominator;
    if den <= 0.0 {
        return Err(ConflictError::UndefinedThreshold(den));
    }
    let gap = p.rho() - p.mu();
    let ext = p.alpha() * gap;
    let edge = domestic_edge(p);
    let (sd, l) = (p.sigma_d(), p.lambda());
    let den2 = den * den;
    Ok(Sensitivities {
        d_sigma_d: 2.0 * ext * (1.0 - l) * sigma_d_sensitivity_bracket(p) / den2,
        d_lambda: -2.0 * ext * (1.0 - sd * sd) * (ext + edge) / den2,
        d_alpha: 2.0 * gap * (1.0 - l) * (p.delta() - p.epsilon()) * (1.0 - sd) * (1.0 + sd) / den2,
    })
}

/// `alpha (rho - mu)(1 + lambda) + 2 (alpha omega + (1 - alpha)(delta - epsilon))`.
pub fn sigma_d_sensitivity_bracket(p: &ModelParams) -> f64 {
    p.alpha() * (p.rho() - p.mu()) * (1.0 + p.lambda()) + 2.0 * domestic_edge(p)
}

/// Probability, from the incumbent's point of view, that someone else
/// governs in period 2.
pub fn turnover_probability(p: &ModelParams, war: bool) -> f64 {
    let a = p.alpha();
    if war {
        a * p.omega() + (1.0 - a) * p.delta() + a * p.rho()
    } else {
        a * p.mu() + (1.0 - a) * p.epsilon()
    }
}
