//! Variant in which a victorious rebel opposition owes the loser nothing.
//!
//! When the opposition wins a civil war it rules in period 2 with zero
//! cohesion and keeps all transfers. Everything else, including the
//! peaceful branch, is as in the baseline game.

use crate::conflict::{
    threshold_parts, turnover_probability, ConflictDecision, DecisionMethod, ThresholdParts,
    INDIFFERENCE, REFERENCE_TAU2, TIE_TOLERANCE,
};
use crate::cost::CostSpec;
use crate::fiscal::{assemble, invest_for_marginal, optimal_tau2, EquilibriumResult};
use crate::params::ModelParams;
use crate::policy::{expected_period2_utility, Variant, Viewer};
use crate::statics::{classify_with, RegimeClassification};

/// `alpha omega + (1 - alpha) delta + alpha rho lambda`: probability that
/// the opposition takes power through a civil war.
fn rebel_takeover(p: &ModelParams) -> f64 {
    let a = p.alpha();
    a * p.omega() + (1.0 - a) * p.delta() + a * p.rho() * p.lambda()
}

/// Numerator and denominator of the variant threshold.
///
/// They differ from the baseline parts by `-2 sd X` and `+sd X` for the
/// takeover probability `X`, so both coincide with the baseline at `sd = 0`.
pub fn revolution_threshold_parts(p: &ModelParams) -> ThresholdParts {
    let base = threshold_parts(p);
    let shift = p.sigma_d() * rebel_takeover(p);
    ThresholdParts {
        numerator: base.numerator - 2.0 * shift,
        denominator: base.denominator + shift,
    }
}

/// The variant threshold on `sigma_f`; `None` when its denominator is not positive.
pub fn revolution_threshold(p: &ModelParams) -> Option<f64> {
    revolution_threshold_parts(p).ratio()
}

/// Opposition's expected utility gap, war minus peace, in the variant.
pub fn revolution_war_advantage(p: &ModelParams, tau2: f64) -> f64 {
    expected_period2_utility(Viewer::O1, p, tau2, true, Variant::Revolution)
        - expected_period2_utility(Viewer::O1, p, tau2, false, Variant::Revolution)
}

/// The opposition's civil-war decision in the variant, by direct comparison.
pub fn revolution_decision(p: &ModelParams) -> ConflictDecision {
    let war = revolution_war_advantage(p, REFERENCE_TAU2) > INDIFFERENCE * p.m();
    match revolution_threshold(p) {
        Some(t) => {
            let near_tie = (p.sigma_f() - t).abs() <= TIE_TOLERANCE * t.abs().max(1.0);
            ConflictDecision {
                war,
                threshold: Some(t),
                method: DecisionMethod::ThresholdComparison,
                methods_agree: (p.sigma_f() > t) == war || near_tie,
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

/// War-branch marginal benefit of capacity: `m [(1 - sd)/2 - phi_war]`.
pub fn revolution_war_marginal_benefit(p: &ModelParams) -> f64 {
    p.m() * ((1.0 - p.sigma_d()) / 2.0 - turnover_probability(p, true))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantResult {
    pub equilibrium: EquilibriumResult,
    pub classification: RegimeClassification,
}

impl VariantResult {
    pub fn sigma_f_bar_prime(&self) -> Option<f64> {
        self.equilibrium.sigma_f_bar()
    }
    pub fn gamma_prime(&self) -> f64 {
        self.equilibrium.gamma()
    }
    pub fn phi_prime(&self) -> f64 {
        self.equilibrium.phi
    }
    pub fn tau2_star_prime(&self) -> f64 {
        self.equilibrium.tau2_star()
    }
}

/// Solves the variant game end to end.
pub fn revolution_solve(p: &ModelParams, cost: &CostSpec) -> VariantResult {
    let decision = revolution_decision(p);
    let investment = if decision.war {
        invest_for_marginal(p, cost, revolution_war_marginal_benefit(p))
    } else {
        optimal_tau2(p, cost, false)
    };
    VariantResult {
        equilibrium: assemble(p, cost, decision, investment, Variant::Revolution),
        classification: classify_with(p, decision.war, decision.threshold),
    }
}
