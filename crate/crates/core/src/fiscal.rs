//! The incumbent's investment in fiscal capacity and the composed solver.
//!
//! The incumbent's objective is concave in `tau2` (its period-2 part is
//! affine, the cost strictly convex), so the optimum is the first-order
//! point `tau1 + C'^{-1}(y)` for the marginal benefit `y`, or the nearest
//! bound when that point is infeasible.

use crate::conflict::{civil_war_decision, turnover_probability, ConflictDecision};
use crate::cost::{inverse_marginal, CostSpec};
use crate::params::ModelParams;
use crate::policy::{
    expected_period2_utility, expected_utility_I1_variant, period1_policy, period2_policy,
    OutcomeKind, PolicyOutcome, Variant, Viewer,
};

/// Which bounds decided the investment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveFlags {
    /// Marginal benefit of capacity is not positive: no investment.
    pub corner: bool,
    pub clamped_at_tau_max: bool,
    /// Period-1 revenue could not pay for the first-order investment.
    pub clamped_for_feasibility: bool,
}

impl SolveFlags {
    pub fn clamped(&self) -> bool {
        self.clamped_at_tau_max || self.clamped_for_feasibility
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvestmentSolution {
    pub tau2: f64,
    /// The first-order marginal benefit `y` with `C'(tau2 - tau1) = y` at an interior optimum.
    pub marginal_benefit: f64,
    pub flags: SolveFlags,
}

/// Marginal benefit of period-2 capacity when period-2 institutions share
/// `sigma_d2` (period 1 keeps `params.sigma_d()`).
pub(crate) fn marginal_benefit_split(params: &ModelParams, war: bool, sigma_d2: f64) -> f64 {
    let phi = turnover_probability(params, war);
    let foreign_win = if war { params.rho() } else { params.mu() };
    let bracket = -phi * (1.0 - sigma_d2)
        - params.alpha() * foreign_win * (1.0 - params.lambda()) * sigma_d2
        + (1.0 - sigma_d2) / 2.0;
    params.m() * ((1.0 + params.sigma_d()) / (1.0 + sigma_d2)) * bracket
}

/// `m [-phi (1 - sd) - alpha (gamma rho + (1 - gamma) mu)(1 - lambda) sd + (1 - sd)/2]`.
pub fn marginal_benefit(params: &ModelParams, war: bool) -> f64 {
    marginal_benefit_split(params, war, params.sigma_d())
}

/// Highest capacity the incumbent can reach: `tau_max`, or less if period-1
/// revenue `tau1 m` cannot cover the cost.
pub fn feasible_cap(params: &ModelParams, cost: &CostSpec) -> f64 {
    let tau1 = params.tau1();
    let budget = tau1 * params.m();
    let mut cap = (tau1 + cost.max_affordable(budget)).min(params.tau_max());
    while cap > tau1 && cost.value(cap - tau1) > budget {
        cap = f64::from_bits(cap.to_bits() - 1);
    }
    cap
}

/// Turns a marginal benefit into the bounded investment choice.
pub fn invest_for_marginal(params: &ModelParams, cost: &CostSpec, y: f64) -> InvestmentSolution {
    let tau1 = params.tau1();
    let mut flags = SolveFlags {
        corner: y <= 0.0,
        ..SolveFlags::default()
    };
    let mut tau2 = tau1 + inverse_marginal(cost, y);
    if tau2 > params.tau_max() {
        tau2 = params.tau_max();
        flags.clamped_at_tau_max = true;
    }
    let budget = tau1 * params.m();
    if cost.value(tau2 - tau1) > budget {
        tau2 = feasible_cap(params, cost);
        flags.clamped_for_feasibility = true;
    }
    InvestmentSolution {
        tau2,
        marginal_benefit: y,
        flags,
    }
}

/// Closed-form optimal period-2 capacity given the civil-war indicator.
pub fn optimal_tau2(params: &ModelParams, cost: &CostSpec, war: bool) -> InvestmentSolution {
    invest_for_marginal(params, cost, marginal_benefit(params, war))
}

/// Grid-search oracle for the investment problem: evaluates the incumbent's
/// expected utility on `tau1, tau1 + step, ...` up to the feasible cap (the
/// cap itself included) and returns the best point, lowest on ties.
pub fn brute_force_tau2(params: &ModelParams, cost: &CostSpec, war: bool, step: f64) -> f64 {
    brute_force_tau2_variant(params, cost, war, step, Variant::Baseline)
}

pub fn brute_force_tau2_variant(
    params: &ModelParams,
    cost: &CostSpec,
    war: bool,
    step: f64,
    variant: Variant,
) -> f64 {
    assert!(step > 0.0, "grid step must be positive");
    let tau1 = params.tau1();
    let cap = feasible_cap(params, cost);
    let objective = |tau2: f64| {
        expected_utility_I1_variant(params, cost, tau2, war, variant).unwrap_or(f64::NEG_INFINITY)
    };
    let mut best_tau = tau1;
    let mut best_val = objective(tau1);
    let mut k = 1u64;
    loop {
        let tau2 = tau1 + k as f64 * step;
        if tau2 >= cap {
            break;
        }
        let v = objective(tau2);
        if v > best_val {
            best_val = v;
            best_tau = tau2;
        }
        k += 1;
    }
    if cap > tau1 && objective(cap) > best_val {
        best_tau = cap;
    }
    best_tau
}

/// Everything the equilibrium pins down for one parameter point.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub decision: ConflictDecision,
    pub phi: f64,
    pub investment: InvestmentSolution,
    pub period1: PolicyOutcome,
    /// Period-2 policy under every possible government, at the chosen capacity.
    pub period2: Vec<(OutcomeKind, PolicyOutcome)>,
    pub eu_i1: f64,
    pub eu_o1: f64,
}

impl EquilibriumResult {
    pub fn war(&self) -> bool {
        self.decision.war
    }
    pub fn gamma(&self) -> f64 {
        self.decision.gamma()
    }
    pub fn sigma_f_bar(&self) -> Option<f64> {
        self.decision.threshold
    }
    pub fn tau2_star(&self) -> f64 {
        self.investment.tau2
    }
    pub fn flags(&self) -> SolveFlags {
        self.investment.flags
    }

    pub fn period2_policy(&self, kind: OutcomeKind) -> &PolicyOutcome {
        &self
            .period2
            .iter()
            .find(|(k, _)| *k == kind)
            .expect("all kinds are solved")
            .1
    }

    /// Every policy of the equilibrium, period 1 first.
    pub fn policies(&self) -> impl Iterator<Item = &PolicyOutcome> {
        std::iter::once(&self.period1).chain(self.period2.iter().map(|(_, p)| p))
    }
}

pub(crate) fn assemble(
    params: &ModelParams,
    cost: &CostSpec,
    decision: ConflictDecision,
    investment: InvestmentSolution,
    variant: Variant,
) -> EquilibriumResult {
    let tau2 = investment.tau2;
    let period1 = period1_policy(params.tau1(), tau2, params.sigma_d(), params.m(), cost)
        .expect("bounded investment is affordable");
    let period2 = OutcomeKind::ALL
        .iter()
        .map(|&k| {
            let p = period2_policy(k, tau2, params.sigma_d(), params.sigma_f(), params.m());
            (k, p)
        })
        .collect();
    let eu_i1 = expected_utility_I1_variant(params, cost, tau2, decision.war, variant)
        .expect("bounded investment is affordable");
    let eu_o1 = expected_period2_utility(Viewer::O1, params, tau2, decision.war, variant);
    EquilibriumResult {
        decision,
        phi: turnover_probability(params, decision.war),
        investment,
        period1,
        period2,
        eu_i1,
        eu_o1,
    }
}

/// Solves the game by backward induction: civil-war decision, turnover,
/// investment, then both periods' policies and expected utilities.
pub fn solve_equilibrium(params: &ModelParams, cost: &CostSpec) -> EquilibriumResult {
    let decision = civil_war_decision(params);
    let investment = optimal_tau2(params, cost, decision.war);
    assemble(params, cost, decision, investment, Variant::Baseline)
}
