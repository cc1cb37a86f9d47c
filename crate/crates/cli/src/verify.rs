//! Randomized verification of the model's properties.
//!
//! Every property is checked on each seeded draw and scores pass, fail or
//! skip (the draw is outside the property's scope). The report is a pure
//! function of the seed, the trial count and the variant.

use std::collections::BTreeMap;
use std::fmt::Write;

use rayon::prelude::*;
use statecap_core::bargaining::{
    acceptance_condition_lhs, acceptance_slack, bargaining_outcome, binding_offer,
    check_bargaining_assumptions, classify_prop5, i1_offer_value, i1_reject_value,
    o1_accept_decision, Prop5Case, Regime,
};
use statecap_core::conflict::{civil_war_decision, civil_war_threshold, war_advantage};
use statecap_core::fiscal::{
    brute_force_tau2, brute_force_tau2_variant, feasible_cap, optimal_tau2, solve_equilibrium,
    EquilibriumResult,
};
use statecap_core::params::{validate_params, Field, ModelParams, Profile};
use statecap_core::policy::{
    expected_period2_utility, expected_utility_I1, expected_utility_I1_variant, Variant, Viewer,
};
use statecap_core::revolution::{revolution_solve, revolution_threshold};
use statecap_core::statics::{
    classify, default_step, finite_difference, InvestmentResponse, JointResponse, Target,
    TurnoverResponse, Wrt,
};

use crate::report::variant_name;
use crate::sampling::{bargaining_draw, baseline_draw, Draw};
use crate::CliError;

/// Grid step of the brute-force investment oracle.
pub const ORACLE_STEP: f64 = 1e-4;
/// Allowed distance between the closed form and the oracle.
pub const ORACLE_TOLERANCE: f64 = 2e-4;

#[derive(Debug, Clone, PartialEq)]
pub enum Check {
    Pass,
    Fail(String),
    Skip,
}

fn ensure(ok: bool, detail: impl FnOnce() -> String) -> Check {
    if ok {
        Check::Pass
    } else {
        Check::Fail(detail())
    }
}

/// Which sampler feeds a property.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Baseline,
    Bargaining,
    Revolution,
}

pub struct Property {
    pub name: &'static str,
    pub suite: Suite,
    pub check: fn(&Draw) -> Check,
}

impl Property {
    pub fn run(&self, d: &Draw) -> Check {
        (self.check)(d)
    }
}

pub const PROPERTIES: &[Property] = &[
    Property {
        name: "params_validation_idempotent",
        suite: Suite::Baseline,
        check: validation_idempotent,
    },
    Property {
        name: "policy_budget_identities",
        suite: Suite::Baseline,
        check: budget_identities,
    },
    Property {
        name: "conflict_threshold_agreement",
        suite: Suite::Baseline,
        check: threshold_agreement,
    },
    Property {
        name: "conflict_capacity_invariance",
        suite: Suite::Baseline,
        check: capacity_invariance,
    },
    Property {
        name: "conflict_full_cohesion_anchor",
        suite: Suite::Baseline,
        check: full_cohesion_anchor,
    },
    Property {
        name: "fiscal_oracle_equivalence",
        suite: Suite::Baseline,
        check: oracle_equivalence,
    },
    Property {
        name: "fiscal_oracle_at_clamp",
        suite: Suite::Baseline,
        check: oracle_at_clamp,
    },
    Property {
        name: "fiscal_maximality",
        suite: Suite::Baseline,
        check: maximality,
    },
    Property {
        name: "fiscal_second_order",
        suite: Suite::Baseline,
        check: second_order,
    },
    Property {
        name: "fiscal_corner_consistency",
        suite: Suite::Baseline,
        check: corner_consistency,
    },
    Property {
        name: "statics_turnover_derivative",
        suite: Suite::Baseline,
        check: turnover_derivative,
    },
    Property {
        name: "statics_investment_sign",
        suite: Suite::Baseline,
        check: investment_sign,
    },
    Property {
        name: "statics_equality_point",
        suite: Suite::Baseline,
        check: equality_point,
    },
    Property {
        name: "statics_joint_consistency",
        suite: Suite::Baseline,
        check: joint_consistency,
    },
    Property {
        name: "bargaining_assumptions",
        suite: Suite::Bargaining,
        check: bargaining_assumptions,
    },
    Property {
        name: "bargaining_offer_binds",
        suite: Suite::Bargaining,
        check: offer_binds,
    },
    Property {
        name: "bargaining_incumbent_prefers_offer",
        suite: Suite::Bargaining,
        check: incumbent_prefers_offer,
    },
    Property {
        name: "bargaining_offer_monotone",
        suite: Suite::Bargaining,
        check: offer_monotone,
    },
    Property {
        name: "bargaining_risk_tightens_acceptance",
        suite: Suite::Bargaining,
        check: risk_tightens_acceptance,
    },
    Property {
        name: "bargaining_investment_sign",
        suite: Suite::Bargaining,
        check: bargaining_investment_sign,
    },
    Property {
        name: "revolution_threshold_order",
        suite: Suite::Revolution,
        check: revolution_order,
    },
    Property {
        name: "revolution_zero_cohesion_identity",
        suite: Suite::Revolution,
        check: zero_cohesion_identity,
    },
    Property {
        name: "revolution_threshold_agreement",
        suite: Suite::Revolution,
        check: revolution_agreement,
    },
    Property {
        name: "revolution_peace_identity",
        suite: Suite::Revolution,
        check: peace_identity,
    },
    Property {
        name: "revolution_war_derivative",
        suite: Suite::Revolution,
        check: revolution_war_derivative,
    },
    Property {
        name: "revolution_investment_sign",
        suite: Suite::Revolution,
        check: revolution_investment_sign,
    },
    Property {
        name: "revolution_oracle_equivalence",
        suite: Suite::Revolution,
        check: revolution_oracle,
    },
    Property {
        name: "revolution_budget_identities",
        suite: Suite::Revolution,
        check: revolution_budget,
    },
];

pub fn property(name: &str) -> Option<&'static Property> {
    PROPERTIES.iter().find(|p| p.name == name)
}

fn suites_for(variant: Variant) -> &'static [Suite] {
    match variant {
        Variant::Baseline => &[Suite::Baseline, Suite::Bargaining],
        Variant::Revolution => &[Suite::Revolution],
    }
}

/// The draw a suite sees on `trial`.
pub fn draw_for(suite: Suite, seed: u64, trial: u64) -> Draw {
    match suite {
        Suite::Baseline | Suite::Revolution => baseline_draw(seed, trial),
        Suite::Bargaining => bargaining_draw(seed, trial),
    }
}

fn m_over_c(d: &Draw) -> f64 {
    d.params.m() / d.c
}

fn is_interior(r: &EquilibriumResult) -> bool {
    let f = r.flags();
    !f.corner && !f.clamped()
}

fn validation_idempotent(d: &Draw) -> Check {
    let again = validate_params(&d.params.to_raw());
    ensure(again.as_ref() == Ok(&d.params), || {
        format!("revalidated to {again:?}")
    })
}

fn budget_identities(d: &Draw) -> Check {
    balanced(&solve_equilibrium(&d.params, &d.cost), d.params.m())
}

fn balanced(r: &EquilibriumResult, m: f64) -> Check {
    let broken = r.policies().find(|p| !p.balances(m));
    match broken {
        None => Check::Pass,
        Some(p) => Check::Fail(format!("residual {:?} in {p:?}", p.budget_residual(m))),
    }
}

fn threshold_agreement(d: &Draw) -> Check {
    let dec = civil_war_decision(&d.params);
    if dec.threshold.is_none() {
        return Check::Skip;
    }
    ensure(dec.methods_agree, || format!("decision {dec:?}"))
}

fn capacity_invariance(d: &Draw) -> Check {
    let p = &d.params;
    let reference = war_advantage(p, 1.0);
    if reference.abs() <= 1e-12 * p.m() {
        return Check::Skip;
    }
    let war = civil_war_decision(p).war;
    for tau2 in [0.1, 0.5, 0.9, 1.0] {
        if (war_advantage(p, tau2) > 0.0) != war {
            return Check::Fail(format!("sign flips at tau2={tau2}"));
        }
    }
    Check::Pass
}

fn full_cohesion_anchor(d: &Draw) -> Check {
    let q = d
        .params
        .with_field(Field::SigmaD, 1.0, Profile::Baseline)
        .expect("sigma_d = 1 is valid");
    match civil_war_threshold(&q) {
        Some(t) => ensure(
            (t - 2.0).abs() <= 1e-12 && !civil_war_decision(&q).war,
            || format!("threshold {t:?} at sigma_d=1"),
        ),
        None => Check::Fail("threshold undefined at sigma_d=1".into()),
    }
}

fn oracle_equivalence(d: &Draw) -> Check {
    let r = solve_equilibrium(&d.params, &d.cost);
    if r.flags().clamped() {
        return Check::Skip;
    }
    let oracle = brute_force_tau2(&d.params, &d.cost, r.war(), ORACLE_STEP);
    let gap = (r.tau2_star() - oracle).abs();
    ensure(gap <= ORACLE_TOLERANCE, || {
        format!("closed form {:?} vs oracle {oracle:?}", r.tau2_star())
    })
}

fn oracle_at_clamp(d: &Draw) -> Check {
    let r = solve_equilibrium(&d.params, &d.cost);
    if !r.flags().clamped() {
        return Check::Skip;
    }
    let oracle = brute_force_tau2(&d.params, &d.cost, r.war(), ORACLE_STEP);
    let gap = (r.tau2_star() - oracle).abs();
    ensure(gap <= ORACLE_TOLERANCE, || {
        format!("clamped {:?} vs oracle {oracle:?}", r.tau2_star())
    })
}

fn maximality(d: &Draw) -> Check {
    let p = &d.params;
    let r = solve_equilibrium(p, &d.cost);
    let step = 10.0 * ORACLE_STEP;
    let tau = r.tau2_star();
    if !is_interior(&r) || tau - step < p.tau1() || tau + step > feasible_cap(p, &d.cost) {
        return Check::Skip;
    }
    let f = |t: f64| expected_utility_I1(p, &d.cost, t, r.war()).expect("feasible");
    let (lo, mid, hi) = (f(tau - step), f(tau), f(tau + step));
    ensure(mid >= lo && mid >= hi, || {
        format!("objective {lo:?} / {mid:?} / {hi:?} around {tau:?}")
    })
}

fn second_order(d: &Draw) -> Check {
    let p = &d.params;
    let cap = feasible_cap(p, &d.cost);
    let span = cap - p.tau1();
    if span <= 1e-6 {
        return Check::Skip;
    }
    let war = civil_war_decision(p).war;
    let h = span / 4.0;
    let f = |k: f64| expected_utility_I1(p, &d.cost, p.tau1() + k * h, war).expect("feasible");
    let values: Vec<f64> = (0..5).map(|k| f(k as f64)).collect();
    for w in values.windows(3) {
        let second = w[0] - 2.0 * w[1] + w[2];
        if second > 1e-12 * p.m() {
            return Check::Fail(format!("second difference {second:?} with step {h:?}"));
        }
    }
    Check::Pass
}

fn corner_consistency(d: &Draw) -> Check {
    let p = &d.params;
    let r = solve_equilibrium(p, &d.cost);
    let flags = r.flags();
    if flags.clamped() {
        return Check::Skip;
    }
    let by_sign = r.investment.marginal_benefit <= 0.0;
    let stayed = r.tau2_star() == p.tau1();
    ensure(flags.corner == by_sign && flags.corner == stayed, || {
        format!(
            "corner={} marginal={:?} tau2={:?}",
            flags.corner,
            r.investment.marginal_benefit,
            r.tau2_star()
        )
    })
}

fn turnover_derivative(d: &Draw) -> Check {
    let p = &d.params;
    let h = default_step(p.alpha());
    let fd = match finite_difference(p, &d.cost, Target::Phi, Wrt::Alpha, h) {
        Ok(fd) if fd.regime_stable => fd,
        _ => return Check::Skip,
    };
    let war = civil_war_decision(p).war;
    let expected = if war {
        p.omega() - p.delta() + p.rho()
    } else {
        -(p.epsilon() - p.mu())
    };
    let up = classify(p).prop1 == TurnoverResponse::TurnoverUp;
    ensure(
        (fd.value - expected).abs() <= 1e-9 && (fd.value > 0.0) == up,
        || format!("dphi/dalpha {:?}, expected {expected:?}", fd.value),
    )
}

/// Interior `dtau2*/dalpha` from the first-order condition.
fn analytic_tau2_slope(p: &ModelParams, c: f64, war: bool) -> f64 {
    let sd = p.sigma_d();
    let inner = if war {
        -(p.omega() - p.delta() + p.rho()) * (1.0 - sd) - p.rho() * (1.0 - p.lambda()) * sd
    } else {
        (p.epsilon() - p.mu()) * (1.0 - sd) - p.mu() * (1.0 - p.lambda()) * sd
    };
    p.m() * inner / c
}

/// Finite-difference `dtau2*/dalpha` at an interior, regime-stable point.
fn interior_tau2_slope(d: &Draw) -> Option<f64> {
    let p = &d.params;
    let r = solve_equilibrium(p, &d.cost);
    if !is_interior(&r) {
        return None;
    }
    match finite_difference(
        p,
        &d.cost,
        Target::Tau2,
        Wrt::Alpha,
        default_step(p.alpha()),
    ) {
        Ok(fd) if fd.regime_stable => Some(fd.value),
        _ => None,
    }
}

fn investment_sign(d: &Draw) -> Check {
    let p = &d.params;
    let class = classify(p);
    if class.boundary.near_investment_boundary || class.boundary.near_war_threshold {
        return Check::Skip;
    }
    let Some(slope) = interior_tau2_slope(d) else {
        return Check::Skip;
    };
    let war = class.prop2 == InvestmentResponse::Case2A;
    let exact = analytic_tau2_slope(p, d.c, war);
    let sign_ok = match class.prop2 {
        InvestmentResponse::Case2B1 => slope > 0.0,
        InvestmentResponse::Case2A | InvestmentResponse::Case2B3 => slope < 0.0,
        InvestmentResponse::Case2B2 => slope.abs() <= 1e-8 * m_over_c(d),
    };
    ensure(
        sign_ok && (slope - exact).abs() <= 1e-6 * exact.abs().max(1.0),
        || {
            format!(
                "{} with dtau2/dalpha {slope:?}, analytic {exact:?}",
                class.prop2
            )
        },
    )
}

/// Moves epsilon onto `eps (1 - sd) = mu (1 - lambda sd)`, where peace-time
/// investment does not respond to `alpha`.
pub fn equality_point(d: &Draw) -> Check {
    let p = &d.params;
    let sd = p.sigma_d();
    let eps = p.mu() * (1.0 - p.lambda() * sd) / (1.0 - sd);
    let Ok(q) = p.with_field(Field::Epsilon, eps, Profile::Baseline) else {
        return Check::Skip;
    };
    let draw = Draw {
        params: q,
        ..d.clone()
    };
    if civil_war_decision(&q).war {
        return Check::Skip;
    }
    let Some(slope) = interior_tau2_slope(&draw) else {
        return Check::Skip;
    };
    ensure(slope.abs() <= 1e-8 * m_over_c(d), || {
        format!("dtau2/dalpha {slope:?} at epsilon={eps:?}")
    })
}

fn joint_consistency(d: &Draw) -> Check {
    let class = classify(&d.params);
    if class.boundary.near_investment_boundary || class.boundary.near_war_threshold {
        return Check::Skip;
    }
    let Some(slope) = interior_tau2_slope(d) else {
        return Check::Skip;
    };
    let ok = match class.prop3 {
        JointResponse::Case3A => class.prop1 == TurnoverResponse::TurnoverUp && slope < 0.0,
        JointResponse::Case3B1 => class.prop1 == TurnoverResponse::TurnoverDown && slope > 0.0,
        JointResponse::Case3B2 => {
            class.prop1 == TurnoverResponse::TurnoverDown && slope <= 1e-8 * m_over_c(d)
        }
    };
    ensure(ok, || {
        format!("{} / {} with slope {slope:?}", class.prop1, class.prop3)
    })
}

fn bargaining_assumptions(d: &Draw) -> Check {
    match check_bargaining_assumptions(&d.params) {
        Ok(()) => Check::Pass,
        Err(e) => Check::Fail(e.to_string()),
    }
}

fn offer_binds(d: &Draw) -> Check {
    let p = &d.params;
    let o = bargaining_outcome(p);
    if o.regime != Regime::R4A {
        return Check::Skip;
    }
    let s = o.sigma_d2_star;
    if !(0.0..=1.0).contains(&s) {
        return Check::Fail(format!("offer {s:?} outside [0, 1]"));
    }
    for tau2 in [0.25, 0.5, 1.0] {
        let slack = acceptance_slack(p, s, tau2);
        if slack.abs() > 1e-10 || !o1_accept_decision(p, s, tau2) {
            return Check::Fail(format!("slack {slack:?} at offer {s:?}, tau2={tau2}"));
        }
        if s >= 0.01 && o1_accept_decision(p, s - 0.01, tau2) {
            return Check::Fail(format!(
                "offer {:?} below the binding one accepted",
                s - 0.01
            ));
        }
    }
    Check::Pass
}

fn incumbent_prefers_offer(d: &Draw) -> Check {
    let p = &d.params;
    let o = bargaining_outcome(p);
    if o.regime != Regime::R4A {
        return Check::Skip;
    }
    let s = o.sigma_d2_star;
    let tau2 = 0.5;
    let offer = i1_offer_value(p, s, tau2);
    let reject = i1_reject_value(p, tau2);
    let by_lottery = expected_period2_utility(
        Viewer::I1,
        &p.with_field(Field::SigmaD, s, Profile::Constitutional)
            .expect("valid cohesion"),
        tau2,
        false,
        Variant::Baseline,
    );
    ensure(
        offer > reject && (offer - by_lottery).abs() <= 1e-12 * p.m(),
        || format!("offer value {offer:?}, reject value {reject:?}, lottery {by_lottery:?}"),
    )
}

fn perturbed(p: &ModelParams, field: Field, x: f64) -> Option<ModelParams> {
    p.with_field(field, x, Profile::Constitutional).ok()
}

fn offer_monotone(d: &Draw) -> Check {
    let p = &d.params;
    if bargaining_outcome(p).regime != Regime::R4A {
        return Check::Skip;
    }
    for field in [Field::Alpha, Field::SigmaF] {
        let x = p.get(field);
        let h = default_step(x);
        let (Some(lo), Some(hi)) = (perturbed(p, field, x - h), perturbed(p, field, x + h)) else {
            return Check::Skip;
        };
        let stable = [&lo, &hi]
            .iter()
            .all(|q| bargaining_outcome(q).regime == Regime::R4A);
        if !stable {
            return Check::Skip;
        }
        let slope = (binding_offer(&hi) - binding_offer(&lo)) / (2.0 * h);
        if slope.is_nan() || slope <= 0.0 {
            return Check::Fail(format!("d sigma_d2*/d {field} = {slope:?}"));
        }
    }
    Check::Pass
}

fn risk_tightens_acceptance(d: &Draw) -> Check {
    let p = &d.params;
    let a2 = p.alpha() + 0.05;
    let Some(q) = perturbed(p, Field::Alpha, a2) else {
        return Check::Skip;
    };
    let (l1, l2) = (acceptance_condition_lhs(p), acceptance_condition_lhs(&q));
    let holds = |l: f64| l <= 0.5;
    ensure(l2 >= l1 && (!holds(l2) || holds(l1)), || {
        format!("acceptance lhs {l1:?} at alpha, {l2:?} at alpha+0.05")
    })
}

fn bargaining_investment_sign(d: &Draw) -> Check {
    let p = &d.params;
    let report = classify_prop5(p, &d.cost);
    let h = default_step(p.alpha());
    let stable = [p.alpha() - h, p.alpha() + h]
        .iter()
        .filter_map(|&a| perturbed(p, Field::Alpha, a))
        .all(|q| bargaining_outcome(&q).regime == report.outcome.regime);
    if !stable {
        return Check::Skip;
    }
    let der = report.derivative;
    let ok = match report.case {
        Prop5Case::Case5A => der.actual <= 1e-9 * m_over_c(d) && der.latent <= 1e-9 * m_over_c(d),
        Prop5Case::Case5B => der.latent > 0.0,
        Prop5Case::Case5C => der.latent < 0.0,
        Prop5Case::Indeterminate => false,
    };
    ensure(ok, || format!("{} with derivative {der:?}", report.case))
}

fn revolution_order(d: &Draw) -> Check {
    let p = &d.params;
    match (revolution_threshold(p), civil_war_threshold(p)) {
        (Some(v), Some(b)) => ensure(v <= b + 1e-12 * b.abs().max(1.0), || {
            format!("variant threshold {v:?} above baseline {b:?}")
        }),
        _ => Check::Skip,
    }
}

fn zero_cohesion_identity(d: &Draw) -> Check {
    let q = d
        .params
        .with_field(Field::SigmaD, 0.0, Profile::Baseline)
        .expect("sigma_d = 0 is valid");
    let (v, b) = (revolution_threshold(&q), civil_war_threshold(&q));
    let thresholds_match = match (v, b) {
        (Some(v), Some(b)) => (v - b).abs() <= 1e-12,
        (None, None) => true,
        _ => false,
    };
    let rv = revolution_solve(&q, &d.cost).equilibrium;
    let rb = solve_equilibrium(&q, &d.cost);
    let same = rv.decision == rb.decision
        && rv.phi == rb.phi
        && rv.investment == rb.investment
        && rv.eu_i1 == rb.eu_i1
        && rv.eu_o1 == rb.eu_o1;
    ensure(thresholds_match && same, || {
        format!("thresholds {v:?} vs {b:?}; variant {rv:?} vs baseline {rb:?}")
    })
}

fn revolution_agreement(d: &Draw) -> Check {
    let v = revolution_solve(&d.params, &d.cost);
    if v.sigma_f_bar_prime().is_none() {
        return Check::Skip;
    }
    ensure(v.equilibrium.decision.methods_agree, || {
        format!("decision {:?}", v.equilibrium.decision)
    })
}

fn peace_identity(d: &Draw) -> Check {
    let v = revolution_solve(&d.params, &d.cost);
    if v.equilibrium.war() {
        return Check::Skip;
    }
    let b = optimal_tau2(&d.params, &d.cost, false);
    ensure(v.tau2_star_prime().to_bits() == b.tau2.to_bits(), || {
        format!("variant {:?} vs baseline {:?}", v.tau2_star_prime(), b.tau2)
    })
}

/// Finite-difference `dtau2*'/dalpha` in the variant, when regime-stable and interior.
fn revolution_tau2_slope(d: &Draw) -> Option<(f64, bool)> {
    let p = &d.params;
    let centre = revolution_solve(p, &d.cost).equilibrium;
    if !is_interior(&centre) {
        return None;
    }
    let h = default_step(p.alpha());
    let lo = revolution_solve(&perturbed(p, Field::Alpha, p.alpha() - h)?, &d.cost).equilibrium;
    let hi = revolution_solve(&perturbed(p, Field::Alpha, p.alpha() + h)?, &d.cost).equilibrium;
    let stable = [&lo, &hi]
        .iter()
        .all(|r| r.war() == centre.war() && r.flags() == centre.flags());
    stable.then(|| ((hi.tau2_star() - lo.tau2_star()) / (2.0 * h), centre.war()))
}

fn revolution_war_derivative(d: &Draw) -> Check {
    let p = &d.params;
    match revolution_tau2_slope(d) {
        Some((slope, true)) => {
            let exact = -p.m() * (p.omega() - p.delta() + p.rho()) / d.c;
            ensure(
                slope < 0.0 && (slope - exact).abs() <= 1e-6 * exact.abs().max(1.0),
                || format!("dtau2'/dalpha {slope:?}, analytic {exact:?}"),
            )
        }
        _ => Check::Skip,
    }
}

fn revolution_investment_sign(d: &Draw) -> Check {
    let class = revolution_solve(&d.params, &d.cost).classification;
    if class.boundary.near_investment_boundary || class.boundary.near_war_threshold {
        return Check::Skip;
    }
    let Some((slope, _)) = revolution_tau2_slope(d) else {
        return Check::Skip;
    };
    let ok = match class.prop2 {
        InvestmentResponse::Case2B1 => slope > 0.0,
        InvestmentResponse::Case2A | InvestmentResponse::Case2B3 => slope < 0.0,
        InvestmentResponse::Case2B2 => slope.abs() <= 1e-8 * m_over_c(d),
    };
    ensure(ok, || {
        format!("{} with dtau2'/dalpha {slope:?}", class.prop2)
    })
}

fn revolution_oracle(d: &Draw) -> Check {
    let p = &d.params;
    let v = revolution_solve(p, &d.cost).equilibrium;
    if v.flags().clamped() {
        return Check::Skip;
    }
    let oracle = brute_force_tau2_variant(p, &d.cost, v.war(), ORACLE_STEP, Variant::Revolution);
    // the closed form must also beat the oracle's best grid point
    let f = |t: f64| {
        expected_utility_I1_variant(p, &d.cost, t, v.war(), Variant::Revolution).expect("feasible")
    };
    ensure(
        (v.tau2_star() - oracle).abs() <= ORACLE_TOLERANCE && f(v.tau2_star()) >= f(oracle) - 1e-12,
        || format!("closed form {:?} vs oracle {oracle:?}", v.tau2_star()),
    )
}

fn revolution_budget(d: &Draw) -> Check {
    balanced(
        &revolution_solve(&d.params, &d.cost).equilibrium,
        d.params.m(),
    )
}

/// Regime labels a draw contributes to the frequency table.
fn regime_keys(suite: Suite, d: &Draw) -> Vec<String> {
    match suite {
        Suite::Baseline => {
            let c = classify(&d.params);
            vec![format!("prop2 {}", c.prop2), format!("prop3 {}", c.prop3)]
        }
        Suite::Bargaining => {
            let r = classify_prop5(&d.params, &d.cost);
            vec![
                format!("regime {}", r.outcome.regime),
                format!("prop5 {}", r.case),
            ]
        }
        Suite::Revolution => {
            let c = revolution_solve(&d.params, &d.cost).classification;
            vec![format!("prop2a {}", c.prop2), format!("prop3a {}", c.prop3)]
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub trial: u64,
    pub property: &'static str,
    pub detail: String,
    pub params: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub trials: u64,
    pub seed: u64,
    pub variant: Variant,
    pub tallies: Vec<(&'static str, Tally)>,
    pub counterexamples: Vec<Counterexample>,
    pub regimes: BTreeMap<String, usize>,
}

impl VerifyReport {
    pub fn failures(&self) -> usize {
        self.tallies.iter().map(|(_, t)| t.fail).sum()
    }

    pub fn tally(&self, name: &str) -> Option<&Tally> {
        self.tallies
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, t)| t)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "verify variant={} trials={} seed={}",
            variant_name(self.variant),
            self.trials,
            self.seed
        );
        let width = self.tallies.iter().map(|(n, _)| n.len()).max().unwrap_or(8);
        let _ = writeln!(
            out,
            "{:width$} {:>6} {:>6} {:>7}",
            "property", "pass", "fail", "skipped"
        );
        for (name, t) in &self.tallies {
            let _ = writeln!(
                out,
                "{name:width$} {:>6} {:>6} {:>7}",
                t.pass, t.fail, t.skipped
            );
        }
        let _ = writeln!(out, "regimes");
        for (k, n) in &self.regimes {
            let _ = writeln!(out, "  {k} {n}");
        }
        let _ = writeln!(out, "counterexamples {}", self.counterexamples.len());
        for c in &self.counterexamples {
            let _ = writeln!(
                out,
                "  trial={} property={} {} params: {}",
                c.trial, c.property, c.detail, c.params
            );
        }
        let _ = writeln!(
            out,
            "result {}",
            if self.failures() == 0 { "ok" } else { "FAILED" }
        );
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub trials: u64,
    pub seed: u64,
    pub variant: Variant,
    pub workers: usize,
}

struct TrialOutcome {
    checks: Vec<Check>,
    params: Vec<(Suite, String)>,
    regimes: Vec<String>,
}

fn run_trial(props: &[&'static Property], suites: &[Suite], seed: u64, trial: u64) -> TrialOutcome {
    let draws: Vec<(Suite, Draw)> = suites
        .iter()
        .map(|&s| (s, draw_for(s, seed, trial)))
        .collect();
    let of = |s: Suite| &draws.iter().find(|(k, _)| *k == s).expect("suite drawn").1;
    TrialOutcome {
        checks: props.iter().map(|p| p.run(of(p.suite))).collect(),
        params: draws.iter().map(|(s, d)| (*s, d.describe())).collect(),
        regimes: draws.iter().flat_map(|(s, d)| regime_keys(*s, d)).collect(),
    }
}

/// Runs every property of the variant's suites on `trials` seeded draws.
pub fn run_verify(cfg: &VerifyConfig) -> Result<VerifyReport, CliError> {
    let suites = suites_for(cfg.variant);
    let props: Vec<&'static Property> = PROPERTIES
        .iter()
        .filter(|p| suites.contains(&p.suite))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers.max(1))
        .build()
        .map_err(|e| CliError::Input(format!("cannot start worker pool: {e}")))?;
    let outcomes: Vec<TrialOutcome> = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(&props, suites, cfg.seed, t))
            .collect()
    });

    let mut tallies: Vec<(&'static str, Tally)> =
        props.iter().map(|p| (p.name, Tally::default())).collect();
    let mut counterexamples = Vec::new();
    let mut regimes = BTreeMap::new();
    for (trial, out) in (0..cfg.trials).zip(outcomes) {
        for ((prop, check), (_, tally)) in props.iter().zip(out.checks).zip(tallies.iter_mut()) {
            match check {
                Check::Pass => tally.pass += 1,
                Check::Skip => tally.skipped += 1,
                Check::Fail(detail) => {
                    tally.fail += 1;
                    let params = out
                        .params
                        .iter()
                        .find(|(s, _)| *s == prop.suite)
                        .map(|(_, text)| text.clone())
                        .unwrap_or_default();
                    counterexamples.push(Counterexample {
                        trial,
                        property: prop.name,
                        detail,
                        params,
                    });
                }
            }
        }
        for key in out.regimes {
            *regimes.entry(key).or_insert(0) += 1;
        }
    }
    Ok(VerifyReport {
        trials: cfg.trials,
        seed: cfg.seed,
        variant: cfg.variant,
        tallies,
        counterexamples,
        regimes,
    })
}
