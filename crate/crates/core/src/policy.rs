//! Period policies and the utilities built from them.
//!
//! Every government taxes at full capacity and pays out the whole budget as
//! transfers, split by the institutional sharing rule. The incumbent's own
//! group receives `r_inc`, the domestic opposition `r_opp`, and a foreign
//! administration keeps `r_f`.

use thiserror::Error;

use crate::cost::CostSpec;
use crate::params::ModelParams;

/// Relative tolerance for the budget identities.
pub const BUDGET_TOLERANCE: f64 = 1e-12;

/// Whose utility is being evaluated: the period-1 incumbent or its opposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Viewer {
    I1,
    O1,
}

/// Who governs in period 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OutcomeKind {
    IncumbentRetains,
    OppositionRules,
    /// The opposition took power through a civil war and owes the loser nothing.
    OppositionRulesPostRevolution,
    ForeignAdministration,
}

impl OutcomeKind {
    pub const ALL: [OutcomeKind; 4] = [
        OutcomeKind::IncumbentRetains,
        OutcomeKind::OppositionRules,
        OutcomeKind::OppositionRulesPostRevolution,
        OutcomeKind::ForeignAdministration,
    ];

    pub fn label(self) -> &'static str {
        match self {
            OutcomeKind::IncumbentRetains => "incumbent_retains",
            OutcomeKind::OppositionRules => "opposition_rules",
            OutcomeKind::OppositionRulesPostRevolution => "opposition_rules_post_revolution",
            OutcomeKind::ForeignAdministration => "foreign_administration",
        }
    }
}

/// Tax rate and per-member transfers of one period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyOutcome {
    pub t: f64,
    pub r_inc: f64,
    pub r_opp: f64,
    pub r_f: f64,
    /// Capacity investment paid this period (period 1 only).
    pub invest_cost: f64,
}

impl PolicyOutcome {
    /// `t m - C - (r_inc + r_opp)/2 - r_f`, relative to `max(t m, m)`.
    pub fn budget_residual(&self, m: f64) -> f64 {
        let revenue = self.t * m;
        let spent = self.invest_cost + 0.5 * (self.r_inc + self.r_opp) + self.r_f;
        (revenue - spent) / revenue.abs().max(m.abs())
    }

    pub fn balances(&self, m: f64) -> bool {
        self.budget_residual(m).abs() <= BUDGET_TOLERANCE
    }

    /// Transfer received by `viewer`'s group under `kind`.
    pub fn transfer_to(&self, viewer: Viewer, kind: OutcomeKind) -> f64 {
        match (kind, viewer) {
            (OutcomeKind::IncumbentRetains, Viewer::I1) => self.r_inc,
            (OutcomeKind::IncumbentRetains, Viewer::O1) => self.r_opp,
            (OutcomeKind::OppositionRules, Viewer::I1)
            | (OutcomeKind::OppositionRulesPostRevolution, Viewer::I1) => self.r_opp,
            (OutcomeKind::OppositionRules, Viewer::O1)
            | (OutcomeKind::OppositionRulesPostRevolution, Viewer::O1) => self.r_inc,
            // r_inc is the former incumbent's share, fixed at zero
            (OutcomeKind::ForeignAdministration, Viewer::I1) => self.r_inc,
            (OutcomeKind::ForeignAdministration, Viewer::O1) => self.r_opp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum PolicyError {
    #[error("investment cost {cost} exceeds period-1 revenue {revenue}")]
    InfeasibleInvestment { cost: f64, revenue: f64 },
}

/// Period-2 policy of the government `kind` with capacity `tau2`.
pub fn period2_policy(
    kind: OutcomeKind,
    tau2: f64,
    sigma_d: f64,
    sigma_f: f64,
    m: f64,
) -> PolicyOutcome {
    let revenue = tau2 * m;
    let (r_inc, r_opp, r_f) = match kind {
        OutcomeKind::IncumbentRetains | OutcomeKind::OppositionRules => {
            let r_inc = 2.0 * revenue / (1.0 + sigma_d);
            (r_inc, sigma_d * r_inc, 0.0)
        }
        OutcomeKind::OppositionRulesPostRevolution => (2.0 * revenue, 0.0, 0.0),
        OutcomeKind::ForeignAdministration => {
            let r_f = 2.0 * revenue / (2.0 + sigma_f);
            (0.0, sigma_f * r_f, r_f)
        }
    };
    PolicyOutcome {
        t: tau2,
        r_inc,
        r_opp,
        r_f,
        invest_cost: 0.0,
    }
}

/// Period-1 policy of the incumbent when it raises capacity from `tau1` to `tau2`.
pub fn period1_policy(
    tau1: f64,
    tau2: f64,
    sigma_d: f64,
    m: f64,
    cost: &CostSpec,
) -> Result<PolicyOutcome, PolicyError> {
    let invest_cost = cost.value(tau2 - tau1);
    let revenue = tau1 * m;
    if invest_cost > revenue {
        return Err(PolicyError::InfeasibleInvestment {
            cost: invest_cost,
            revenue,
        });
    }
    let r_inc = 2.0 * (revenue - invest_cost) / (1.0 + sigma_d);
    Ok(PolicyOutcome {
        t: tau1,
        r_inc,
        r_opp: sigma_d * r_inc,
        r_f: 0.0,
        invest_cost,
    })
}

/// Period-2 indirect utility of `viewer` under `kind`, with explicit institutions.
pub fn indirect_utility_at(
    viewer: Viewer,
    kind: OutcomeKind,
    tau2: f64,
    sigma_d: f64,
    sigma_f: f64,
    m: f64,
) -> f64 {
    let policy = period2_policy(kind, tau2, sigma_d, sigma_f, m);
    (1.0 - tau2) * m + policy.transfer_to(viewer, kind)
}

pub fn indirect_utility(viewer: Viewer, kind: OutcomeKind, tau2: f64, params: &ModelParams) -> f64 {
    indirect_utility_at(
        viewer,
        kind,
        tau2,
        params.sigma_d(),
        params.sigma_f(),
        params.m(),
    )
}

/// How a victorious rebel opposition shares transfers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// Institutions survive the civil war.
    #[default]
    Baseline,
    /// A successful revolution removes all transfers to the loser.
    Revolution,
}

/// One branch of the period-2 lottery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Branch {
    pub kind: OutcomeKind,
    pub prob: f64,
}

/// The two halves of the period-2 lottery: with an external conflict
/// (weight `alpha`) and without (weight `1 - alpha`).
#[derive(Debug, Clone, PartialEq)]
pub struct Lottery {
    pub interstate: [Branch; 3],
    pub domestic: [Branch; 2],
}

pub fn lottery(params: &ModelParams, war: bool, variant: Variant) -> Lottery {
    let (lambda, rho, mu) = (params.lambda(), params.rho(), params.mu());
    let rebels = match (war, variant) {
        (true, Variant::Revolution) => OutcomeKind::OppositionRulesPostRevolution,
        _ => OutcomeKind::OppositionRules,
    };
    let b = |kind, prob| Branch { kind, prob };
    if war {
        let (omega, delta) = (params.omega(), params.delta());
        Lottery {
            interstate: [
                b(rebels, omega + rho * lambda),
                b(OutcomeKind::IncumbentRetains, 1.0 - omega - rho),
                b(OutcomeKind::ForeignAdministration, rho * (1.0 - lambda)),
            ],
            domestic: [
                b(rebels, delta),
                b(OutcomeKind::IncumbentRetains, 1.0 - delta),
            ],
        }
    } else {
        let eps = params.epsilon();
        Lottery {
            interstate: [
                b(OutcomeKind::OppositionRules, mu * lambda),
                b(OutcomeKind::IncumbentRetains, 1.0 - mu),
                b(OutcomeKind::ForeignAdministration, mu * (1.0 - lambda)),
            ],
            domestic: [
                b(OutcomeKind::OppositionRules, eps),
                b(OutcomeKind::IncumbentRetains, 1.0 - eps),
            ],
        }
    }
}

/// Expected period-2 utility of `viewer` over the lottery.
pub fn expected_period2_utility(
    viewer: Viewer,
    params: &ModelParams,
    tau2: f64,
    war: bool,
    variant: Variant,
) -> f64 {
    let lot = lottery(params, war, variant);
    let w = |br: &Branch| br.prob * indirect_utility(viewer, br.kind, tau2, params);
    let ext: f64 = lot.interstate.iter().map(w).sum();
    let dom: f64 = lot.domestic.iter().map(w).sum();
    params.alpha() * ext + (1.0 - params.alpha()) * dom
}

/// The opposition's expected period-2 utility with or without a civil war.
#[allow(non_snake_case)]
pub fn expected_utility_O1(params: &ModelParams, tau2: f64, war: bool) -> f64 {
    expected_period2_utility(Viewer::O1, params, tau2, war, Variant::Baseline)
}

/// The incumbent's period-1 indirect utility after investing up to `tau2`.
pub fn period1_utility(
    params: &ModelParams,
    cost: &CostSpec,
    tau2: f64,
) -> Result<f64, PolicyError> {
    let p1 = period1_policy(params.tau1(), tau2, params.sigma_d(), params.m(), cost)?;
    Ok((1.0 - params.tau1()) * params.m() + p1.r_inc)
}

/// The incumbent's lifetime expected utility as seen from period 1.
#[allow(non_snake_case)]
pub fn expected_utility_I1(
    params: &ModelParams,
    cost: &CostSpec,
    tau2: f64,
    war: bool,
) -> Result<f64, PolicyError> {
    expected_utility_I1_variant(params, cost, tau2, war, Variant::Baseline)
}

#[allow(non_snake_case)]
pub fn expected_utility_I1_variant(
    params: &ModelParams,
    cost: &CostSpec,
    tau2: f64,
    war: bool,
    variant: Variant,
) -> Result<f64, PolicyError> {
    let first = period1_utility(params, cost, tau2)?;
    Ok(first + expected_period2_utility(Viewer::I1, params, tau2, war, variant))
}
