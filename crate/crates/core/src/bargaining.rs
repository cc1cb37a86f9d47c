//! Constitutional bargaining over period-2 cohesion.
//!
//! Before period 1 ends the incumbent offers a period-2 cohesion `sigma_d2`.
//! If the opposition accepts, it commits to peace and the offer governs
//! period-2 transfers; if it rejects, cohesion drops to zero and the
//! opposition is free to fight. The model assumes `epsilon = delta`.

use std::fmt;

use thiserror::Error;

use crate::cost::{latent_investment, CostSpec};
use crate::fiscal::{invest_for_marginal, marginal_benefit_split};
use crate::params::{Field, ModelParams, Profile, RawParams};
use crate::policy::{expected_period2_utility, Variant, Viewer};
use crate::statics::default_step;

/// Normalized acceptance slack at or above `-ACCEPT_TOLERANCE` counts as acceptance.
pub const ACCEPT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BargainingViolation {
    #[error("requires epsilon <= 1/2 (epsilon = {0})")]
    EpsilonAboveHalf(f64),
    #[error("requires epsilon = delta (epsilon = {epsilon}, delta = {delta})")]
    EpsilonNotDelta { epsilon: f64, delta: f64 },
    #[error("requires 1/2 > (1 - alpha) epsilon + alpha mu (1 + lambda) / 2 (left side = {0})")]
    OppositionTooStrong(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub struct BargainingAssumptionError {
    pub violations: Vec<BargainingViolation>,
}

impl fmt::Display for BargainingAssumptionError {
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

/// `(1 - alpha) epsilon + alpha mu (1 + lambda) / 2`: the opposition's
/// peace-time claim, which also sets the left side of the positivity condition.
fn peace_claim(p: &ModelParams) -> f64 {
    (1.0 - p.alpha()) * p.epsilon() + p.alpha() * p.mu() * (1.0 + p.lambda()) / 2.0
}

/// Bargaining assumptions that can be checked on the fields present in
/// `raw`, whether or not the point passes the baseline validation.
pub fn raw_bargaining_violations(raw: &RawParams) -> Vec<BargainingViolation> {
    let mut violations = Vec::new();
    let epsilon = raw.get(Field::Epsilon);
    if let Some(eps) = epsilon.filter(|&e| e > 0.5) {
        violations.push(BargainingViolation::EpsilonAboveHalf(eps));
    }
    if let (Some(epsilon), Some(delta)) = (epsilon, raw.get(Field::Delta)) {
        if epsilon != delta {
            violations.push(BargainingViolation::EpsilonNotDelta { epsilon, delta });
        }
    }
    let fields = [Field::Alpha, Field::Epsilon, Field::Mu, Field::Lambda].map(|f| raw.get(f));
    if let [Some(a), Some(eps), Some(mu), Some(lambda)] = fields {
        let claim = (1.0 - a) * eps + a * mu * (1.0 + lambda) / 2.0;
        if claim >= 0.5 {
            violations.push(BargainingViolation::OppositionTooStrong(claim));
        }
    }
    violations
}

/// Reports every violated bargaining assumption.
pub fn check_bargaining_assumptions(p: &ModelParams) -> Result<(), BargainingAssumptionError> {
    let violations = raw_bargaining_violations(&p.to_raw());
    if violations.is_empty() {
        Ok(())
    } else {
        Err(BargainingAssumptionError { violations })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// Positive cohesion offered and accepted.
    R4A,
    /// Zero cohesion offered and accepted.
    R4B,
    /// Zero cohesion offered and rejected; civil war follows.
    R4C,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::R4A, Regime::R4B, Regime::R4C];

    pub fn label(self) -> &'static str {
        match self {
            Regime::R4A => "4.A",
            Regime::R4B => "4.B",
            Regime::R4C => "4.C",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BargainingOutcome {
    pub regime: Regime,
    pub sigma_d2_star: f64,
    /// Left side of the acceptance condition, compared with 1/2.
    pub cond11_lhs: f64,
    /// Sides of the positivity condition `lhs < rhs`.
    pub cond12_lhs: f64,
    pub cond12_rhs: f64,
    pub accepted: bool,
}

/// `sigma_f / (2 + sigma_f)`: the former opposition's share under a foreign administration.
fn foreign_share(p: &ModelParams) -> f64 {
    p.sigma_f() / (2.0 + p.sigma_f())
}

/// The opposition's bargaining power from the external channel:
/// `alpha (rho - mu)(1 - lambda) sigma_f / (2 + sigma_f)`.
fn external_leverage(p: &ModelParams) -> f64 {
    p.alpha() * (p.rho() - p.mu()) * (1.0 - p.lambda()) * foreign_share(p)
}

/// Left side of the acceptance condition.
pub fn acceptance_condition_lhs(p: &ModelParams) -> f64 {
    let a = p.alpha();
    a * p.omega()
        + a * p.rho() * p.lambda()
        + a * p.mu() * (1.0 - p.lambda()) / 2.0
        + (1.0 - a) * p.delta()
        + external_leverage(p)
}

/// The binding offer: the smallest cohesion the opposition accepts, as a ratio.
pub fn binding_offer(p: &ModelParams) -> f64 {
    let a = p.alpha();
    let lev = external_leverage(p);
    let num = a * (p.omega() + (p.rho() - p.mu()) * p.lambda()) + lev;
    let den =
        1.0 - a * (p.omega() + p.mu() + p.rho() * p.lambda()) - 2.0 * (1.0 - a) * p.epsilon() - lev;
    num / den
}

/// Solves the bargaining stage. Assumes [`check_bargaining_assumptions`] passed.
pub fn bargaining_outcome(p: &ModelParams) -> BargainingOutcome {
    let lhs11 = acceptance_condition_lhs(p);
    let cond12_lhs = peace_claim(p);
    let cond12_rhs = lhs11;
    let (regime, sigma_d2_star, accepted) = if lhs11 > 0.5 {
        (Regime::R4C, 0.0, false)
    } else if cond12_lhs < cond12_rhs {
        let s = if lhs11 == 0.5 {
            1.0
        } else {
            binding_offer(p).clamp(0.0, 1.0)
        };
        (Regime::R4A, s, true)
    } else {
        (Regime::R4B, 0.0, true)
    };
    BargainingOutcome {
        regime,
        sigma_d2_star,
        cond11_lhs: lhs11,
        cond12_lhs,
        cond12_rhs,
        accepted,
    }
}

/// Opposition's value of accepting `offer` minus its value of rejecting
/// (zero cohesion and a civil war), at capacity `tau2`.
pub fn acceptance_slack(p: &ModelParams, offer: f64, tau2: f64) -> f64 {
    let inside = expected_period2_utility(
        Viewer::O1,
        &p.with_sigma_d(offer),
        tau2,
        false,
        Variant::Baseline,
    );
    let reservation = expected_period2_utility(
        Viewer::O1,
        &p.with_sigma_d(0.0),
        tau2,
        true,
        Variant::Baseline,
    );
    inside - reservation
}

/// Whether the opposition accepts `offer`. Indifference counts as acceptance;
/// the answer does not depend on `tau2 > 0`.
pub fn o1_accept_decision(p: &ModelParams, offer: f64, tau2: f64) -> bool {
    acceptance_slack(p, offer, tau2) / (tau2 * p.m()) >= -ACCEPT_TOLERANCE
}

/// Incumbent's period-2 value of an accepted offer `sigma2`, in closed form:
/// `(1 - t) m + 2 t m [1 - alpha mu (1 - lambda s) - (1 - alpha) eps (1 - s)] / (1 + s)`.
pub fn i1_offer_value(p: &ModelParams, sigma2: f64, tau2: f64) -> f64 {
    let (a, m) = (p.alpha(), p.m());
    let bracket =
        1.0 - a * p.mu() * (1.0 - p.lambda() * sigma2) - (1.0 - a) * p.epsilon() * (1.0 - sigma2);
    (1.0 - tau2) * m + 2.0 * tau2 * m * bracket / (1.0 + sigma2)
}

/// Incumbent's period-2 value after a rejection, in closed form:
/// `(1 - t) m + 2 t m alpha (1 - omega - rho) + 2 t m (1 - alpha)(1 - eps)`.
pub fn i1_reject_value(p: &ModelParams, tau2: f64) -> f64 {
    let (a, m) = (p.alpha(), p.m());
    (1.0 - tau2) * m
        + 2.0 * tau2 * m * a * (1.0 - p.omega() - p.rho())
        + 2.0 * tau2 * m * (1.0 - a) * (1.0 - p.epsilon())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prop5Case {
    /// Positive cohesion: more conflict risk does not raise investment.
    Case5A,
    /// Zero cohesion accepted: more conflict risk raises investment.
    Case5B,
    /// Rejection and civil war: more conflict risk lowers investment.
    Case5C,
    /// Zero cohesion accepted but the investment condition fails.
    Indeterminate,
}

impl Prop5Case {
    pub fn label(self) -> &'static str {
        match self {
            Prop5Case::Case5A => "5.A",
            Prop5Case::Case5B => "5.B",
            Prop5Case::Case5C => "5.C",
            Prop5Case::Indeterminate => "5.?",
        }
    }
}

impl fmt::Display for Prop5Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Investment response to `alpha` with the bargaining regime held fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeDerivative {
    /// Derivative of the bounded capacity `tau2*`.
    pub actual: f64,
    /// Derivative of `tau1 + x` for the unbounded investment target `x`,
    /// which keeps its sign at the zero-investment corner.
    pub latent: f64,
    /// Central difference (false: one-sided at the edge of `[0, 1]`).
    pub central: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prop5Report {
    pub case: Prop5Case,
    pub outcome: BargainingOutcome,
    pub derivative: RegimeDerivative,
}

/// Period-2 cohesion implied by `regime` at `p`.
fn regime_cohesion(p: &ModelParams, regime: Regime) -> f64 {
    match regime {
        Regime::R4A if acceptance_condition_lhs(p) == 0.5 => 1.0,
        Regime::R4A => binding_offer(p).clamp(0.0, 1.0),
        Regime::R4B | Regime::R4C => 0.0,
    }
}

/// Capacity chosen under `regime`, bounded and latent.
fn regime_tau2(p: &ModelParams, cost: &CostSpec, regime: Regime) -> (f64, f64) {
    let sigma2 = regime_cohesion(p, regime);
    let war = regime == Regime::R4C;
    if sigma2 == 1.0 {
        return (p.tau1(), p.tau1());
    }
    let y = marginal_benefit_split(p, war, sigma2);
    let actual = invest_for_marginal(p, cost, y).tau2;
    (actual, p.tau1() + latent_investment(cost, y))
}

/// `dtau2*/dalpha` under a fixed bargaining regime, by finite difference.
pub fn regime_derivative(p: &ModelParams, cost: &CostSpec, regime: Regime) -> RegimeDerivative {
    let a = p.alpha();
    let h = default_step(a);
    let at = |x: f64| {
        let q = p
            .with_field(Field::Alpha, x, Profile::Constitutional)
            .expect("alpha perturbation stays valid");
        regime_tau2(&q, cost, regime)
    };
    let (lo, hi, central) = if a - h < 0.0 {
        (a, a + h, false)
    } else if a + h > 1.0 {
        (a - h, a, false)
    } else {
        (a - h, a + h, true)
    };
    let (al, ll) = at(lo);
    let (ah, lh) = at(hi);
    let span = hi - lo;
    RegimeDerivative {
        actual: (ah - al) / span,
        latent: (lh - ll) / span,
        central,
    }
}

/// Classifies the investment response under bargaining.
pub fn classify_prop5(p: &ModelParams, cost: &CostSpec) -> Prop5Report {
    let outcome = bargaining_outcome(p);
    let case = match outcome.regime {
        Regime::R4A => Prop5Case::Case5A,
        Regime::R4B => {
            let s = outcome.sigma_d2_star;
            if p.epsilon() - p.mu() > s * (p.epsilon() - p.lambda() * p.mu()) {
                Prop5Case::Case5B
            } else {
                Prop5Case::Indeterminate
            }
        }
        Regime::R4C => Prop5Case::Case5C,
    };
    Prop5Report {
        case,
        outcome,
        derivative: regime_derivative(p, cost, outcome.regime),
    }
}
