//! Text reports for single-point solves and the bargaining stage.

use std::fmt::Write;

use statecap_core::bargaining::{
    check_bargaining_assumptions, classify_prop5, raw_bargaining_violations,
};
use statecap_core::cost::CostSpec;
use statecap_core::fiscal::{solve_equilibrium, EquilibriumResult};
use statecap_core::params::{validate_params_with, ModelParams, Profile, RawParams};
use statecap_core::policy::{OutcomeKind, PolicyOutcome, Variant};
use statecap_core::revolution::revolution_solve;
use statecap_core::statics::{classify, RegimeClassification};

use crate::CliError;

/// Equilibrium and regime labels for one point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSolution {
    pub equilibrium: EquilibriumResult,
    pub regimes: RegimeClassification,
}

pub fn solve_point(p: &ModelParams, cost: &CostSpec, variant: Variant) -> PointSolution {
    match variant {
        Variant::Baseline => PointSolution {
            equilibrium: solve_equilibrium(p, cost),
            regimes: classify(p),
        },
        Variant::Revolution => {
            let v = revolution_solve(p, cost);
            PointSolution {
                equilibrium: v.equilibrium,
                regimes: v.classification,
            }
        }
    }
}

pub fn variant_name(variant: Variant) -> &'static str {
    match variant {
        Variant::Baseline => "baseline",
        Variant::Revolution => "revolution",
    }
}

pub(crate) fn fixed6(x: f64) -> String {
    format!("{x:.6}")
}

/// Six decimals with trailing zeros removed: `0.206897`, `0`, `1`.
pub(crate) fn trimmed6(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn threshold_text(t: Option<f64>) -> String {
    t.map_or_else(|| "NA".to_string(), fixed6)
}

fn bit(b: bool) -> u8 {
    u8::from(b)
}

fn policy_line(out: &mut String, name: &str, p: &PolicyOutcome) {
    let _ = writeln!(
        out,
        "{name} t={} r_inc={} r_opp={} r_f={} invest_cost={}",
        fixed6(p.t),
        fixed6(p.r_inc),
        fixed6(p.r_opp),
        fixed6(p.r_f),
        fixed6(p.invest_cost)
    );
}

pub fn render_solve(p: &ModelParams, cost: &CostSpec, variant: Variant) -> String {
    let s = solve_point(p, cost, variant);
    let r = &s.equilibrium;
    let flags = r.flags();
    let mut out = String::new();
    let _ = writeln!(out, "variant={} cost={cost}", variant_name(variant));
    let _ = writeln!(
        out,
        "gamma={} phi={} tau2_star={} prop2={}",
        r.gamma(),
        fixed6(r.phi),
        fixed6(r.tau2_star()),
        s.regimes.prop2
    );
    let _ = writeln!(
        out,
        "sigma_f_bar={} sigma_f={} methods_agree={}",
        threshold_text(r.sigma_f_bar()),
        fixed6(p.sigma_f()),
        r.decision.methods_agree
    );
    let _ = writeln!(
        out,
        "prop1={} prop2={} prop3={}",
        s.regimes.prop1, s.regimes.prop2, s.regimes.prop3
    );
    let _ = writeln!(
        out,
        "marginal_benefit={} corner={} clamped_at_tau_max={} clamped_for_feasibility={}",
        fixed6(r.investment.marginal_benefit),
        bit(flags.corner),
        bit(flags.clamped_at_tau_max),
        bit(flags.clamped_for_feasibility)
    );
    policy_line(&mut out, "period1", &r.period1);
    for (kind, pol) in &r.period2 {
        if variant == Variant::Baseline && *kind == OutcomeKind::OppositionRulesPostRevolution {
            continue;
        }
        policy_line(&mut out, &format!("period2[{}]", kind.label()), pol);
    }
    let _ = writeln!(out, "eu_i1={} eu_o1={}", fixed6(r.eu_i1), fixed6(r.eu_o1));
    out
}

/// Validates a bargaining config, reporting baseline and bargaining
/// violations together.
pub fn validate_bargaining(raw: &RawParams) -> Result<ModelParams, CliError> {
    let mut problems: Vec<String> = Vec::new();
    let params = match validate_params_with(raw, Profile::Constitutional) {
        Ok(p) => Some(p),
        Err(e) => {
            problems.extend(e.violations.iter().map(|v| v.to_string()));
            None
        }
    };
    problems.extend(raw_bargaining_violations(raw).iter().map(|v| v.to_string()));
    match params {
        Some(p) if problems.is_empty() => Ok(p),
        _ => Err(CliError::Input(format!(
            "bargaining assumptions violated: {}",
            problems.join("; ")
        ))),
    }
}

pub fn render_bargain(p: &ModelParams, cost: &CostSpec) -> String {
    let mut out = String::new();
    let assumptions = match check_bargaining_assumptions(p) {
        Ok(()) => "ok".to_string(),
        Err(e) => e.to_string(),
    };
    let _ = writeln!(out, "assumptions {assumptions}");
    let r = classify_prop5(p, cost);
    let o = r.outcome;
    let _ = writeln!(
        out,
        "cond11_lhs={} cond12_lhs={} cond12_rhs={}",
        fixed6(o.cond11_lhs),
        fixed6(o.cond12_lhs),
        fixed6(o.cond12_rhs)
    );
    let _ = writeln!(
        out,
        "regime={} sigma_d2_star={} prop5={}",
        o.regime,
        trimmed6(o.sigma_d2_star),
        r.case
    );
    let _ = writeln!(out, "accepted={}", o.accepted);
    let _ = writeln!(
        out,
        "dtau2_dalpha={} latent={} difference={}",
        fixed6(r.derivative.actual),
        fixed6(r.derivative.latent),
        if r.derivative.central {
            "central"
        } else {
            "one-sided"
        }
    );
    out
}
