//! Investment cost functions.
//!
//! A cost `C(x)` of raising capacity by `x >= 0` must satisfy `C(0) = 0`,
//! `C'(0) = 0` and have a strictly increasing marginal. Two shapes are
//! supported: the quadratic `c x^2 / 2` and a tabulated piecewise-linear
//! marginal whose integral gives a piecewise-quadratic cost.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("quadratic cost coefficient must be positive and finite, got {0}")]
    Coefficient(f64),
    #[error("tabulated marginal cost needs at least two knots")]
    TooFewKnots,
    #[error("tabulated marginal cost must start at (0, 0), got ({0}, {1})")]
    Origin(f64, f64),
    #[error("marginal cost is not strictly increasing between knots {0} and {1}")]
    NonConvexCost(usize, usize),
}

/// Piecewise-linear marginal cost through `(x_i, C'(x_i))` knots.
///
/// Past the last knot the final segment is extended linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedCost {
    xs: Vec<f64>,
    marginals: Vec<f64>,
    /// `C(xs[i])`, accumulated with the trapezoid rule (exact for linear marginals).
    levels: Vec<f64>,
}

impl TabulatedCost {
    pub fn new(knots: &[(f64, f64)]) -> Result<Self, CostError> {
        if knots.len() < 2 {
            return Err(CostError::TooFewKnots);
        }
        let (x0, y0) = knots[0];
        if x0 != 0.0 || y0 != 0.0 {
            return Err(CostError::Origin(x0, y0));
        }
        for (i, w) in knots.windows(2).enumerate() {
            let ((xa, ya), (xb, yb)) = (w[0], w[1]);
            if !(xb > xa && yb > ya && xb.is_finite() && yb.is_finite()) {
                return Err(CostError::NonConvexCost(i, i + 1));
            }
        }
        let xs: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let marginals: Vec<f64> = knots.iter().map(|k| k.1).collect();
        let mut levels = vec![0.0];
        for i in 1..xs.len() {
            let area = 0.5 * (marginals[i - 1] + marginals[i]) * (xs[i] - xs[i - 1]);
            levels.push(levels[i - 1] + area);
        }
        Ok(TabulatedCost {
            xs,
            marginals,
            levels,
        })
    }

    fn segment(&self, x: f64) -> usize {
        let last = self.xs.len() - 2;
        match self.xs.iter().position(|&k| k > x) {
            Some(0) => 0,
            Some(i) => (i - 1).min(last),
            None => last,
        }
    }

    fn slope(&self, seg: usize) -> f64 {
        (self.marginals[seg + 1] - self.marginals[seg]) / (self.xs[seg + 1] - self.xs[seg])
    }

    fn marginal(&self, x: f64) -> f64 {
        let s = self.segment(x);
        self.marginals[s] + self.slope(s) * (x - self.xs[s])
    }

    fn value(&self, x: f64) -> f64 {
        let s = self.segment(x);
        let dx = x - self.xs[s];
        self.levels[s] + self.marginals[s] * dx + 0.5 * self.slope(s) * dx * dx
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.marginals.iter().copied())
    }
}

/// Strictly convex investment cost.
#[derive(Debug, Clone, PartialEq)]
pub enum CostSpec {
    /// `C(x) = c x^2 / 2`.
    Quadratic {
        c: f64,
    },
    Tabulated(TabulatedCost),
}

impl CostSpec {
    pub fn quadratic(c: f64) -> Result<Self, CostError> {
        if c.is_finite() && c > 0.0 {
            Ok(CostSpec::Quadratic { c })
        } else {
            Err(CostError::Coefficient(c))
        }
    }

    pub fn tabulated(knots: &[(f64, f64)]) -> Result<Self, CostError> {
        TabulatedCost::new(knots).map(CostSpec::Tabulated)
    }

    /// `C(x)` for `x >= 0`.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            CostSpec::Quadratic { c } => 0.5 * c * x * x,
            CostSpec::Tabulated(t) => t.value(x),
        }
    }

    /// `C'(x)`.
    pub fn marginal(&self, x: f64) -> f64 {
        match self {
            CostSpec::Quadratic { c } => c * x,
            CostSpec::Tabulated(t) => t.marginal(x),
        }
    }

    /// `C''(x)`; right derivative at knots.
    pub fn curvature(&self, x: f64) -> f64 {
        match self {
            CostSpec::Quadratic { c } => *c,
            CostSpec::Tabulated(t) => t.slope(t.segment(x)),
        }
    }

    /// Largest `x >= 0` with `C(x) <= budget`.
    pub fn max_affordable(&self, budget: f64) -> f64 {
        if budget <= 0.0 {
            return 0.0;
        }
        let mut x = match self {
            CostSpec::Quadratic { c } => (2.0 * budget / c).sqrt(),
            CostSpec::Tabulated(_) => {
                let mut hi = 1.0;
                while self.value(hi) < budget {
                    hi *= 2.0;
                }
                // keep C(lo) <= budget while the bracket shrinks to adjacent floats
                let mut lo = 0.0;
                loop {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break lo;
                    }
                    if self.value(mid) <= budget {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
            }
        };
        // Step down until rounding can no longer push C(x) past the budget.
        while self.value(x) > budget {
            x = prev_float(x);
        }
        x
    }
}

impl fmt::Display for CostSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostSpec::Quadratic { c } => write!(f, "quadratic:c={c}"),
            CostSpec::Tabulated(t) => {
                f.write_str("tabulated:")?;
                for (i, (x, y)) in t.knots().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}:{y}")?;
                }
                Ok(())
            }
        }
    }
}

/// Inverts the marginal cost: the investment `x >= 0` with `C'(x) = y`.
///
/// Non-positive `y` gives the corner `x = 0`.
pub fn inverse_marginal(cost: &CostSpec, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    match cost {
        CostSpec::Quadratic { c } => y / c,
        CostSpec::Tabulated(_) => {
            let mut hi = 1.0;
            while cost.marginal(hi) < y {
                hi *= 2.0;
            }
            bisect(0.0, hi, |x| cost.marginal(x) - y)
        }
    }
}

/// Unconstrained investment target: [`inverse_marginal`] for positive `y`,
/// linear extension through the origin with slope `1 / C''(0)` otherwise.
///
/// Equals `y / c` everywhere for the quadratic cost. Used to sign
/// comparative statics at points where the actual solution sits at the
/// zero-investment corner.
pub fn latent_investment(cost: &CostSpec, y: f64) -> f64 {
    if y > 0.0 {
        inverse_marginal(cost, y)
    } else {
        y / cost.curvature(0.0)
    }
}

/// Root of an increasing `f` on `[lo, hi]`, to `|f| <= 1e-12 max(1, scale)`
/// or until the bracket collapses to adjacent floats.
fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let scale = f(lo).abs().max(f(hi).abs()).max(1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let r = f(mid);
        if r.abs() <= 1e-12 * scale {
            return mid;
        }
        if mid <= lo || mid >= hi {
            break;
        }
        if r < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn prev_float(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        f64::from_bits(x.to_bits() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> CostSpec {
        CostSpec::tabulated(&[(0.0, 0.0), (0.25, 0.1), (0.5, 0.4), (1.0, 1.6)]).unwrap()
    }

    #[test]
    fn quadratic_inversion() {
        let two = CostSpec::quadratic(2.0).unwrap();
        assert_eq!(inverse_marginal(&two, 0.6), 0.3);
        let one = CostSpec::quadratic(1.0).unwrap();
        assert_eq!(inverse_marginal(&one, -0.1), 0.0);
        assert_eq!(inverse_marginal(&one, 0.262), 0.262);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(CostSpec::quadratic(0.0).is_err());
        assert!(CostSpec::quadratic(f64::NAN).is_err());
        assert_eq!(
            CostSpec::tabulated(&[(0.0, 0.0), (0.5, 0.3), (1.0, 0.3)]),
            Err(CostError::NonConvexCost(1, 2))
        );
        assert_eq!(
            CostSpec::tabulated(&[(0.0, 0.1), (1.0, 1.0)]),
            Err(CostError::Origin(0.0, 0.1))
        );
        assert_eq!(
            CostSpec::tabulated(&[(0.0, 0.0)]),
            Err(CostError::TooFewKnots)
        );
    }

    #[test]
    fn tabulated_matches_quadratic_when_linear() {
        let t = CostSpec::tabulated(&[(0.0, 0.0), (1.0, 3.0)]).unwrap();
        let q = CostSpec::quadratic(3.0).unwrap();
        for x in [0.0, 0.1, 0.7, 2.5] {
            assert!((t.value(x) - q.value(x)).abs() < 1e-15);
            assert!((t.marginal(x) - q.marginal(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn tabulated_value_integrates_marginal() {
        let t = table();
        // midpoint-rule quadrature, independent of the closed-form levels
        let n = 200_000;
        let x_end = 1.3;
        let dx = x_end / n as f64;
        let quad: f64 = (0..n).map(|i| t.marginal((i as f64 + 0.5) * dx) * dx).sum();
        assert!((quad - t.value(x_end)).abs() < 1e-9);
    }

    #[test]
    fn tabulated_inverse_residual() {
        let t = table();
        for y in [0.05, 0.1, 0.3, 1.0, 2.5, 7.0] {
            let x = inverse_marginal(&t, y);
            assert!((t.marginal(x) - y).abs() <= 1e-12 * y.max(1.0), "y={y}");
        }
    }

    #[test]
    fn affordable_bound_is_tight() {
        for cost in [CostSpec::quadratic(1.7).unwrap(), table()] {
            for budget in [0.0, 1e-6, 0.03, 0.2, 1.0] {
                let x = cost.max_affordable(budget);
                assert!(cost.value(x) <= budget);
                if budget > 0.0 {
                    assert!(cost.value(x * (1.0 + 1e-9) + 1e-12) > budget);
                }
            }
        }
    }

    #[test]
    fn latent_extension() {
        let q = CostSpec::quadratic(2.0).unwrap();
        assert_eq!(latent_investment(&q, -0.4), -0.2);
        assert_eq!(latent_investment(&q, 0.4), 0.2);
        let t = table();
        assert!((latent_investment(&t, -0.4) + 0.4 / 0.4).abs() < 1e-15);
    }

    #[test]
    fn display_forms() {
        assert_eq!(
            CostSpec::quadratic(2.0).unwrap().to_string(),
            "quadratic:c=2"
        );
        assert_eq!(
            CostSpec::tabulated(&[(0.0, 0.0), (1.0, 3.0)])
                .unwrap()
                .to_string(),
            "tabulated:0:0,1:3"
        );
    }
}
