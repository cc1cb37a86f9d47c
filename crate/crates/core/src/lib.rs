//! Two-period model of external threat, civil war and fiscal capacity.
//!
//! An incumbent chooses period-2 fiscal capacity while facing an external
//! conflict and a domestic opposition that may start a civil war. The
//! modules follow the backward-induction order: policy at given capacity,
//! the opposition's conflict decision, the investment choice, comparative
//! statics, and two extensions (bargaining over cohesion and revolution).

pub mod bargaining;
pub mod conflict;
pub mod cost;
pub mod fiscal;
pub mod params;
pub mod policy;
pub mod revolution;
pub mod statics;

pub use conflict::{civil_war_decision, civil_war_threshold, ConflictDecision};
pub use cost::{CostError, CostSpec};
pub use fiscal::{solve_equilibrium, EquilibriumResult, SolveFlags};
pub use params::{validate_params, Field, ModelParams, Profile, RawParams, ValidationError};
