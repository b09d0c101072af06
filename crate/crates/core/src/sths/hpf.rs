use serde::{Deserialize, Serialize};

use crate::geometry::Rect;

/// Single-unit hydropower function
/// `phi(q, r) = k q (head(r) - loss - r0 q^2)` with a concave quadratic
/// head curve `head(r) = h0 + h1 r - h2 r^2`. Discharge `q` in m^3/s,
/// volume `r` in hm^3, power in MW.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hpf {
    pub k: f64,
    pub h0: f64,
    pub h1: f64,
    pub h2: f64,
    pub loss: f64,
    pub r0: f64,
    pub q_min: f64,
    pub q_max: f64,
    pub r_min: f64,
    pub r_max: f64,
}

impl Default for Hpf {
    fn default() -> Self {
        Hpf {
            k: 0.0088,
            h0: 80.0,
            h1: 2.0,
            h2: 0.02,
            loss: 20.0,
            r0: 0.01,
            q_min: 5.0,
            q_max: 40.0,
            r_min: 10.0,
            r_max: 30.0,
        }
    }
}

impl Hpf {
    pub fn head(&self, r: f64) -> f64 {
        self.h0 + self.h1 * r - self.h2 * r * r
    }

    pub fn eval(&self, q: f64, r: f64) -> f64 {
        self.k * q * (self.head(r) - self.loss - self.r0 * q * q)
    }

    pub fn gradient(&self, q: f64, r: f64) -> [f64; 2] {
        [
            self.k * (self.head(r) - self.loss - 3.0 * self.r0 * q * q),
            self.k * q * (self.h1 - 2.0 * self.h2 * r),
        ]
    }

    pub fn domain(&self) -> Rect {
        Rect::new(self.q_min, self.q_max, self.r_min, self.r_max)
    }

    /// Upper bound on the gradient norm over the domain, combining the
    /// extreme partial derivatives. Each partial is monotone in each
    /// argument over the box, so its extremes sit at the corners, except
    /// that the head curve may peak inside the volume range.
    pub fn lipschitz_bound(&self) -> f64 {
        let mut rs = vec![self.r_min, self.r_max];
        if self.h2 > 0.0 {
            let peak = self.h1 / (2.0 * self.h2);
            if peak > self.r_min && peak < self.r_max {
                rs.push(peak);
            }
        }
        let (mut gq, mut gr): (f64, f64) = (0.0, 0.0);
        for &q in &[self.q_min, self.q_max] {
            for &r in &rs {
                let g = self.gradient(q, r);
                gq = gq.max(g[0].abs());
                gr = gr.max(g[1].abs());
            }
        }
        gq.hypot(gr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape() {
        let h = Hpf::default();
        let d = h.domain();
        let n = 60;
        let mut gmax: f64 = 0.0;
        for i in 0..=n {
            for j in 0..=n {
                let q = d.x_min + (d.x_max - d.x_min) * i as f64 / n as f64;
                let r = d.y_min + (d.y_max - d.y_min) * j as f64 / n as f64;
                let g = h.gradient(q, r);
                assert!(g[0] > 0.0 && g[1] > 0.0, "monotone at ({q}, {r})");
                gmax = gmax.max(g[0].hypot(g[1]));
                let e = 1e-6;
                let fd = (h.eval(q + e, r) - h.eval(q - e, r)) / (2.0 * e);
                assert!((fd - g[0]).abs() < 1e-6);
            }
        }
        assert!(gmax <= h.lipschitz_bound());
        assert!((h.lipschitz_bound() - 1.054).abs() < 1e-3);
        let (lo, hi) = (h.eval(5.0, 10.0), h.eval(40.0, 30.0));
        assert!(lo > 3.0 && lo < 4.0 && hi > 30.0 && hi < 31.0, "{lo} {hi}");
    }
}
