//! Seeded random parameter draws for the verification suites.
//!
//! Each trial gets its own ChaCha stream, so a draw depends only on the
//! seed and the trial index, never on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statecap_core::cost::CostSpec;
use statecap_core::params::{validate_params_with, Field, ModelParams, Profile, RawParams};

/// Minimum slack kept on every strict inequality and range bound.
pub const MARGIN: f64 = 0.01;

/// Stream offset separating bargaining draws from baseline draws.
const BARGAINING_STREAM: u64 = 1 << 63;

/// A sampled parameter point with its quadratic cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Draw {
    pub params: ModelParams,
    pub c: f64,
    pub cost: CostSpec,
}

impl Draw {
    /// Every field at full precision, for counterexample reports.
    pub fn describe(&self) -> String {
        let mut parts: Vec<String> = Field::ALL
            .iter()
            .map(|&f| format!("{}={:?}", f.name(), self.params.get(f)))
            .collect();
        parts.push(format!("c={:?}", self.c));
        parts.join(",")
    }
}

pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn prob(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(MARGIN..=1.0 - MARGIN)
}

fn finish(rng: &mut ChaCha8Rng, raw: RawParams, profile: Profile) -> Option<Draw> {
    let raw = raw
        .with(Field::M, rng.gen_range(0.5..=2.0))
        .with(Field::Tau1, rng.gen_range(0.02..=0.6));
    let c = rng.gen_range(0.5..=5.0);
    let params = validate_params_with(&raw, profile).ok()?;
    Some(Draw {
        params,
        c,
        cost: CostSpec::quadratic(c).expect("positive coefficient"),
    })
}

/// Rejection-samples a valid baseline point.
pub fn sample_baseline(rng: &mut ChaCha8Rng) -> Draw {
    loop {
        let (alpha, lambda, epsilon, delta) = (prob(rng), prob(rng), prob(rng), prob(rng));
        let (rho, mu, omega) = (prob(rng), prob(rng), prob(rng));
        let (sigma_d, sigma_f) = (prob(rng), prob(rng));
        let ok = rho >= mu + MARGIN
            && omega >= delta + MARGIN
            && epsilon >= mu + MARGIN
            && omega + rho <= 1.0 - MARGIN;
        if !ok {
            continue;
        }
        let raw: RawParams = [
            (Field::Alpha, alpha),
            (Field::Lambda, lambda),
            (Field::Epsilon, epsilon),
            (Field::Delta, delta),
            (Field::Rho, rho),
            (Field::Mu, mu),
            (Field::Omega, omega),
            (Field::SigmaD, sigma_d),
            (Field::SigmaF, sigma_f),
        ]
        .into_iter()
        .collect();
        if let Some(d) = finish(rng, raw, Profile::Baseline) {
            return d;
        }
    }
}

/// Rejection-samples a point satisfying the bargaining assumptions, with
/// period-1 cohesion zero.
pub fn sample_bargaining(rng: &mut ChaCha8Rng) -> Draw {
    loop {
        let epsilon = rng.gen_range(MARGIN..=0.5 - MARGIN);
        let (alpha, lambda, rho, mu, omega, sigma_f) = (
            prob(rng),
            prob(rng),
            prob(rng),
            prob(rng),
            prob(rng),
            prob(rng),
        );
        let claim = (1.0 - alpha) * epsilon + alpha * mu * (1.0 + lambda) / 2.0;
        let ok = rho >= mu + MARGIN
            && omega >= epsilon + MARGIN
            && epsilon >= mu + MARGIN
            && omega + rho <= 1.0 - MARGIN
            && claim <= 0.5 - MARGIN;
        if !ok {
            continue;
        }
        let raw: RawParams = [
            (Field::Alpha, alpha),
            (Field::Lambda, lambda),
            (Field::Epsilon, epsilon),
            (Field::Delta, epsilon),
            (Field::Rho, rho),
            (Field::Mu, mu),
            (Field::Omega, omega),
            (Field::SigmaD, 0.0),
            (Field::SigmaF, sigma_f),
        ]
        .into_iter()
        .collect();
        if let Some(d) = finish(rng, raw, Profile::Constitutional) {
            return d;
        }
    }
}

pub fn baseline_draw(seed: u64, trial: u64) -> Draw {
    sample_baseline(&mut trial_rng(seed, trial))
}

pub fn bargaining_draw(seed: u64, trial: u64) -> Draw {
    sample_bargaining(&mut trial_rng(seed, BARGAINING_STREAM | trial))
}
