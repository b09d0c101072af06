//! Target functions: the built-in test set and user expressions.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::expr::Expr;
use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::sths::Hpf;

type Eval = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A bivariate function on a rectangle with a Lipschitz constant.
#[derive(Clone)]
pub struct TargetFunction {
    pub name: String,
    eval: Eval,
    pub lipschitz: f64,
    pub domain: Rect,
    /// False when `lipschitz` comes from sampling rather than analysis.
    pub lipschitz_verified: bool,
}

impl fmt::Debug for TargetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFunction")
            .field("name", &self.name)
            .field("lipschitz", &self.lipschitz)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

pub fn f1(x: f64, y: f64) -> f64 {
    let (dx, dy) = (x - 0.5, y - 0.5);
    // atan2 keeps the petals continuous across x = 0.5
    let rho = dx.hypot(dy) / (1.0 + 0.3 * (5.0 * dy.atan2(dx)).sin());
    (-5.0 * rho * rho).exp()
}

pub fn f2(x: f64, y: f64) -> f64 {
    (6.0 * PI * x + 0.5 * y).sin() * (-10.0 * ((x - 0.4).powi(2) + (y - 0.3).powi(2))).exp()
        + (5.0 * PI * y + x).cos() * (-12.0 * ((x - 0.7).powi(2) + (y - 0.8).powi(2))).exp()
        + 0.1 * (3.0 * PI * x * y).sin()
}

pub fn f3(x: f64, y: f64) -> f64 {
    (3.0 * PI * x).sin() * ((1.0 - (y - 0.5).abs()) * 2.0 * PI).cos() * (x + y)
}

pub fn f4(x: f64, y: f64) -> f64 {
    let r2 = x * x + (y - 0.5).powi(2);
    (50.0 * r2.sqrt()).sin() * (-10.0 * r2).exp()
}

pub fn f5(x: f64, y: f64) -> f64 {
    (5.0 * PI * x).sin() * (5.0 * PI * y).cos()
        + 0.5 * (10.0 * PI * x * y).sin()
        + 0.2 * (15.0 * (x * x + y * y)).cos()
}

// Gradient-norm bounds on the unit square, from the triangle inequality over
// the summands (f1 from the polar form of its gradient).
const L1: f64 = 4.15;
const L2: f64 = 41.62;
const L3: f64 = 24.07;
const L4: f64 = 50.0;
const L5: f64 = 46.41;

/// Names accepted by [`TargetFunction::by_name`].
pub const BUILTIN_NAMES: [&str; 7] = ["f1", "f2", "f3", "f4", "f5", "ripple", "hpf"];

impl TargetFunction {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        lipschitz: f64,
        domain: Rect,
    ) -> Self {
        TargetFunction {
            name: name.into(),
            eval: Arc::new(f),
            lipschitz,
            domain,
            lipschitz_verified: true,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        (self.eval)(x, y)
    }

    pub fn by_name(name: &str) -> Option<Self> {
        let unit = Rect::unit();
        Some(match name {
            "f1" => Self::new("f1", f1, L1, unit),
            "f2" => Self::new("f2", f2, L2, unit),
            "f3" => Self::new("f3", f3, L3, unit),
            "f4" | "ripple" => Self::new(name, f4, L4, unit),
            "f5" => Self::new("f5", f5, L5, unit),
            "hpf" => {
                let h = Hpf::default();
                let (l, d) = (h.lipschitz_bound(), h.domain());
                Self::new("hpf", move |q, r| h.eval(q, r), l, d)
            }
            _ => return None,
        })
    }

    /// Parses `expr`; without `lipschitz` the constant is estimated and
    /// flagged as unverified.
    pub fn from_expr(expr: &str, lipschitz: Option<f64>, domain: Rect) -> Result<Self> {
        let e = Expr::parse(expr)?;
        let probe = e.clone();
        let mut t = Self::new(expr, move |x, y| e.eval(x, y), 1.0, domain);
        for (x, y) in [(domain.x_min, domain.y_min), (domain.x_max, domain.y_max)] {
            if !probe.eval(x, y).is_finite() {
                return Err(Error::Config(format!("'{expr}' is not finite at ({x}, {y})")));
            }
        }
        match lipschitz {
            Some(l) if l > 0.0 => t.lipschitz = l,
            Some(l) => return Err(Error::Config(format!("Lipschitz constant must be positive, got {l}"))),
            None => {
                t.lipschitz = estimate_lipschitz(&t, 200);
                t.lipschitz_verified = false;
            }
        }
        Ok(t)
    }
}

/// 1.5 times the largest finite-difference gradient norm on an `n x n` grid.
/// A heuristic: nothing guarantees it bounds the true constant.
pub fn estimate_lipschitz(f: &TargetFunction, n: usize) -> f64 {
    let d = f.domain;
    let (hx, hy) = ((d.x_max - d.x_min) / n as f64, (d.y_max - d.y_min) / n as f64);
    let mut best: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (x, y) = (d.x_min + i as f64 * hx, d.y_min + j as f64 * hy);
            let v = f.eval(x, y);
            let gx = (f.eval(x + hx, y) - v) / hx;
            let gy = (f.eval(x, y + hy) - v) / hy;
            let g = gx.hypot(gy);
            if g.is_finite() {
                best = best.max(g);
            }
        }
    }
    (1.5 * best).max(f64::EPSILON)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Largest central-difference gradient norm on a fine grid.
    fn numeric_gradient_max(f: fn(f64, f64) -> f64, n: usize) -> f64 {
        let h = 1e-6;
        let mut best: f64 = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
                let gx = (f(x + h, y) - f(x - h, y)) / (2.0 * h);
                let gy = (f(x, y + h) - f(x, y - h)) / (2.0 * h);
                best = best.max(gx.hypot(gy));
            }
        }
        best
    }

    #[test]
    fn lipschitz_constants_dominate_gradients() {
        for (f, l) in [(f1 as fn(f64, f64) -> f64, L1), (f2, L2), (f3, L3), (f5, L5)] {
            let g = numeric_gradient_max(f, 700);
            assert!(g <= l, "{g} > {l}");
        }
        // f4 peaks at the cone tip on the boundary; probe the radial slope there.
        let g = numeric_gradient_max(f4, 700);
        assert!(g <= L4 * 1.0001, "{g}");
        assert!((f4(1e-7, 0.5) / 1e-7 - 50.0).abs() < 1e-3);
    }

    #[test]
    fn f1_is_continuous_across_the_axis() {
        let a = f1(0.5 - 1e-12, 0.3);
        let b = f1(0.5 + 1e-12, 0.3);
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn registry() {
        for n in BUILTIN_NAMES {
            let t = TargetFunction::by_name(n).unwrap();
            let d = t.domain;
            assert!(t.eval(0.5 * (d.x_min + d.x_max), 0.5 * (d.y_min + d.y_max)).is_finite());
        }
        assert!(TargetFunction::by_name("nope").is_none());
    }

    #[test]
    fn expression_functions() {
        let t = TargetFunction::from_expr("x + y", Some(2f64.sqrt()), Rect::unit()).unwrap();
        assert_eq!(t.eval(0.25, 0.5), 0.75);
        let e = TargetFunction::from_expr("sin(3*x)*cos(2*y)", None, Rect::unit()).unwrap();
        assert!(!e.lipschitz_verified);
        assert!(e.lipschitz >= 3.0);
        assert!(TargetFunction::from_expr("log(x)", None, Rect::unit()).is_err());
    }
}
