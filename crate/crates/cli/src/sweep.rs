//! Two-dimensional parameter sweeps written as CSV regime maps.

use std::str::FromStr;

use rayon::prelude::*;
use statecap_core::cost::CostSpec;
use statecap_core::params::{validate_params, Field, RawParams};
use statecap_core::policy::Variant;

use crate::report::{fixed6, solve_point};
use crate::CliError;

pub const CSV_HEADER: &str =
    "axis1,axis2,gamma,sigma_f_bar,phi,tau2_star,prop1,prop2,prop3,corner,clamped,status";

/// One swept field: `field=start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub field: Field,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Axis {
    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 1e-9).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid value `i`, rounded to 12 decimals so accumulated steps land on
    /// the intended decimal grid.
    pub fn value(&self, i: usize) -> f64 {
        let raw = self.start + i as f64 * self.step;
        (raw * 1e12).round() / 1e12
    }

    fn check(&self) -> Result<(), String> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(format!("{}: step must be positive", self.field));
        }
        if !(self.start.is_finite() && self.stop.is_finite() && self.stop >= self.start) {
            return Err(format!("{}: need start <= stop", self.field));
        }
        let last = self.value(self.len() - 1);
        let in_range = |x: f64| match self.field {
            Field::M => x > 0.0,
            _ => (0.0..=1.0).contains(&x),
        };
        if !(in_range(self.start) && in_range(last)) {
            return Err(format!("{}: grid leaves the field's range", self.field));
        }
        Ok(())
    }
}

impl FromStr for Axis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || {
            CliError::Input(format!(
                "invalid axis {s:?}: expected field=start:stop:step"
            ))
        };
        let (name, range) = s.split_once('=').ok_or_else(bad)?;
        let field: Field = name
            .trim()
            .parse()
            .map_err(|e| CliError::Input(format!("invalid axis {s:?}: {e}")))?;
        let parts: Vec<f64> = range
            .split(':')
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad())?;
        let [start, stop, step] = parts[..] else {
            return Err(bad());
        };
        Ok(Axis {
            field,
            start,
            stop,
            step,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis1: Axis,
    pub axis2: Axis,
    /// Values for every non-swept field.
    pub fixed: RawParams,
    pub variant: Variant,
    pub cost: CostSpec,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.axis1.field == self.axis2.field {
            return Err(CliError::Input(format!(
                "axis fields must differ, both are {}",
                self.axis1.field
            )));
        }
        for axis in [&self.axis1, &self.axis2] {
            axis.check().map_err(CliError::Input)?;
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.axis1.len() * self.axis2.len()
    }

    /// CSV row for grid cell `(i, j)`.
    pub fn row(&self, i: usize, j: usize) -> String {
        let x = self.axis1.value(i);
        let y = self.axis2.value(j);
        let raw = self
            .fixed
            .clone()
            .with(self.axis1.field, x)
            .with(self.axis2.field, y);
        let head = format!("{},{}", fixed6(x), fixed6(y));
        match validate_params(&raw) {
            Ok(p) => format!(
                "{head},{}",
                point_columns(&solve_point(&p, &self.cost, self.variant))
            ),
            Err(_) => format!("{head},NA,NA,NA,NA,NA,NA,NA,NA,NA,invalid"),
        }
    }
}

/// Every column after the two axes for a solved point.
pub fn point_columns(s: &crate::report::PointSolution) -> String {
    let r = &s.equilibrium;
    let flags = r.flags();
    format!(
        "{},{},{},{},{},{},{},{},{},ok",
        r.gamma(),
        r.sigma_f_bar().map_or_else(|| "NA".to_string(), fixed6),
        fixed6(r.phi),
        fixed6(r.tau2_star()),
        s.regimes.prop1,
        s.regimes.prop2,
        s.regimes.prop3,
        u8::from(flags.corner),
        u8::from(flags.clamped()),
    )
}

/// Renders the whole sweep, rows in row-major order over `(axis1, axis2)`.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<String, CliError> {
    spec.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Input(format!("cannot start worker pool: {e}")))?;
    let n2 = spec.axis2.len();
    let rows: Vec<String> = pool.install(|| {
        (0..spec.rows())
            .into_par_iter()
            .map(|k| spec.row(k / n2, k % n2))
            .collect()
    });
    let mut out = String::with_capacity(rows.len() * 80);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}
