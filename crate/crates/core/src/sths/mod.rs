//! Short-term hydro scheduling model over a PWL power function.
//!
//! One reservoir, one reversible unit. Per period the unit either
//! generates (power read off the PWL function through the disjunction
//! block), pumps at a fixed rate, or idles.

mod hpf;

pub use hpf::Hpf;

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::milp::{add_gib_block, DisjunctionSpec, MilpModel, ObjSense, Sense};

/// Plant data. Volumes are in `volume_unit` cubic metres (hm^3 by
/// default), flows in m^3/s, power in MW.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Plant {
    pub r_init: f64,
    pub r_final_min: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub q_min: f64,
    pub q_max: f64,
    /// Pumped flow, negative.
    pub q_pump: f64,
    /// Power drawn while pumping, as a negative contribution to output.
    pub p_pump: f64,
    #[serde(default = "default_volume_unit")]
    pub volume_unit: f64,
    #[serde(default = "default_period")]
    pub period_seconds: f64,
}

fn default_volume_unit() -> f64 {
    1e6
}

fn default_period() -> f64 {
    3600.0
}

impl Default for Plant {
    fn default() -> Self {
        Plant {
            r_init: 20.0,
            r_final_min: 20.0,
            r_min: 10.0,
            r_max: 30.0,
            q_min: 5.0,
            q_max: 40.0,
            q_pump: -30.0,
            p_pump: -12.0,
            volume_unit: default_volume_unit(),
            period_seconds: default_period(),
        }
    }
}

impl Plant {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("plant file: {e}")))
    }

    /// Volume change per unit of net inflow over one period.
    pub fn balance_coef(&self) -> f64 {
        self.period_seconds / self.volume_unit
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub plant: Plant,
    pub price: Vec<f64>,
    pub inflow: Vec<f64>,
}

#[derive(Deserialize)]
struct Row {
    period: usize,
    price: f64,
    inflow: f64,
}

impl Scenario {
    pub fn periods(&self) -> usize {
        self.price.len()
    }

    /// Reads `period,price,inflow` rows (header required, any column order).
    pub fn from_csv(text: &str, plant: Plant) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|e| Error::parse(1, e.to_string()))?.clone();
        for col in ["period", "price", "inflow"] {
            if !headers.iter().any(|h| h == col) {
                return Err(Error::parse(1, format!("missing column '{col}'")));
            }
        }
        let mut rows: Vec<Row> = Vec::new();
        for (i, rec) in rdr.deserialize().enumerate() {
            rows.push(rec.map_err(|e| Error::parse(i + 2, e.to_string()))?);
        }
        rows.sort_by_key(|r| r.period);
        if rows.windows(2).any(|w| w[0].period == w[1].period) {
            return Err(Error::parse(1, "duplicate period"));
        }
        let s = Scenario {
            plant,
            price: rows.iter().map(|r| r.price).collect(),
            inflow: rows.iter().map(|r| r.inflow).collect(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn load(csv_path: impl AsRef<Path>, plant_path: impl AsRef<Path>) -> Result<Self> {
        let (c, p) = (csv_path.as_ref(), plant_path.as_ref());
        let text = std::fs::read_to_string(c).map_err(|e| Error::io(c, e))?;
        let plant_text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
        Scenario::from_csv(&text, Plant::from_toml(&plant_text)?)
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.plant;
        let bad = |m: &str| Err(Error::Validation(m.into()));
        if self.price.is_empty() {
            return bad("scenario has no periods");
        }
        if self.price.len() != self.inflow.len() {
            return bad("price and inflow series differ in length");
        }
        if !(p.r_min <= p.r_init && p.r_init <= p.r_max) {
            return bad("initial volume outside [r_min, r_max]");
        }
        if p.q_pump >= 0.0 {
            return bad("pumped flow must be negative");
        }
        if p.p_pump > 0.0 {
            return bad("pumping power enters the output with its sign and must be <= 0");
        }
        if p.q_min > p.q_max || p.r_min > p.r_max || p.volume_unit <= 0.0 || p.period_seconds <= 0.0 {
            return bad("inconsistent plant bounds");
        }
        Ok(())
    }
}

/// Whether the mesh's bounding box covers the operating box, up to a
/// relative tolerance.
fn check_domain(spec: &DisjunctionSpec, p: &Plant) -> Result<()> {
    if spec.points.iter().any(|x| x.len() != 2) {
        return Err(Error::DomainMismatch("the power function mesh must be planar".into()));
    }
    let lo = |k: usize| spec.points.iter().map(|x| x[k]).fold(f64::INFINITY, f64::min);
    let hi = |k: usize| spec.points.iter().map(|x| x[k]).fold(f64::NEG_INFINITY, f64::max);
    let tol = |a: f64, b: f64| 1e-9 * (1.0 + a.abs().max(b.abs()));
    let (q0, q1, r0, r1) = (lo(0), hi(0), lo(1), hi(1));
    if q0 > p.q_min + tol(q0, p.q_min) || q1 < p.q_max - tol(q1, p.q_max) || r0 > p.r_min + tol(r0, p.r_min) || r1 < p.r_max - tol(r1, p.r_max) {
        return Err(Error::DomainMismatch(format!(
            "mesh spans [{q0}, {q1}] x [{r0}, {r1}], plant needs [{}, {}] x [{}, {}]",
            p.q_min, p.q_max, p.r_min, p.r_max
        )));
    }
    Ok(())
}

/// Scheduling MILP over the PWL power function in `spec` (vertex
/// coordinates are `(q, r)`, vertex values the power).
pub fn build_sths(scenario: &Scenario, spec: &DisjunctionSpec) -> Result<MilpModel> {
    scenario.validate()?;
    let p = &scenario.plant;
    check_domain(spec, p)?;
    let n = spec.num_vertices();
    let t_max = scenario.periods();
    let c = p.balance_coef();
    let mut m = MilpModel::new(format!("sths_T{t_max}"));
    m.sense = ObjSense::Maximize;
    let r: Vec<usize> = (1..=t_max + 1).map(|t| m.add_continuous(format!("r_{t}"), p.r_min, p.r_max)).collect();
    m.add_constraint("init", vec![(r[0], 1.0)], Sense::Eq, p.r_init);
    for t in 0..t_max {
        let k = t + 1;
        let lam: Vec<usize> = (0..n).map(|v| m.add_continuous(format!("lam_{k}_{v}"), 0.0, 1.0)).collect();
        let g = m.add_binary(format!("g_{k}"));
        let u = m.add_binary(format!("u_{k}"));
        let pw = m.add_continuous(format!("p_{k}"), f64::NEG_INFINITY, f64::INFINITY);
        let q = m.add_continuous(format!("q_{k}"), p.q_pump.min(0.0), p.q_max);
        let weighted = |coord: &dyn Fn(usize) -> f64| -> Vec<(usize, f64)> {
            (0..n).map(|v| (lam[v], -coord(v))).collect()
        };
        let mut row = vec![(pw, 1.0), (u, -p.p_pump)];
        row.extend(weighted(&|v| spec.values[v]));
        m.add_constraint(format!("power_{k}"), row, Sense::Eq, 0.0);
        let mut row = vec![(q, 1.0), (u, -p.q_pump)];
        row.extend(weighted(&|v| spec.points[v][0]));
        m.add_constraint(format!("flow_{k}"), row, Sense::Eq, 0.0);
        // r_t - Σ λ v_r lies in [R_min, R_max] scaled by (1 - g_t).
        let mut row = vec![(r[t], 1.0), (g, p.r_min)];
        row.extend(weighted(&|v| spec.points[v][1]));
        m.add_constraint(format!("vol_lo_{k}"), row, Sense::Ge, p.r_min);
        let mut row = vec![(r[t], 1.0), (g, p.r_max)];
        row.extend(weighted(&|v| spec.points[v][1]));
        m.add_constraint(format!("vol_hi_{k}"), row, Sense::Le, p.r_max);
        let mut row: Vec<(usize, f64)> = lam.iter().map(|&j| (j, 1.0)).collect();
        row.push((g, -1.0));
        m.add_constraint(format!("conv_{k}"), row, Sense::Eq, 0.0);
        add_gib_block(&mut m, spec, &lam, Some(g), &format!("{k}_"))?;
        m.add_constraint(format!("mode_{k}"), vec![(g, 1.0), (u, 1.0)], Sense::Le, 1.0);
        m.add_constraint(
            format!("bal_{k}"),
            vec![(r[t + 1], 1.0), (r[t], -1.0), (q, c)],
            Sense::Eq,
            c * scenario.inflow[t],
        );
        m.objective.push((pw, scenario.price[t]));
    }
    m.add_constraint("final", vec![(r[t_max], 1.0)], Sense::Ge, p.r_final_min);
    Ok(m)
}

/// Per-period operating decisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub q: Vec<f64>,
    /// Volumes at the start of each period plus the final volume.
    pub r: Vec<f64>,
    pub p: Vec<f64>,
    pub g: Vec<bool>,
    pub u: Vec<bool>,
}

impl Schedule {
    /// Reads the schedule columns of a model built by [`build_sths`].
    pub fn from_solution(m: &MilpModel, x: &[f64], periods: usize) -> Result<Self> {
        let get = |name: String| -> Result<f64> {
            m.var(&name)
                .map(|j| x[j])
                .ok_or_else(|| Error::Validation(format!("solution has no column {name}")))
        };
        let mut s = Schedule { q: vec![], r: vec![], p: vec![], g: vec![], u: vec![] };
        for k in 1..=periods {
            s.q.push(get(format!("q_{k}"))?);
            s.p.push(get(format!("p_{k}"))?);
            s.g.push(get(format!("g_{k}"))? > 0.5);
            s.u.push(get(format!("u_{k}"))? > 0.5);
        }
        for k in 1..=periods + 1 {
            s.r.push(get(format!("r_{k}"))?);
        }
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub pwl_obj: f64,
    pub nl_obj: f64,
    pub rel_err: f64,
    pub avg_abs_hpf_err: f64,
    pub generating_periods: usize,
    /// Largest water-balance residual over all periods.
    pub balance_residual: f64,
}

/// Prices the schedule with its own power values and with the true power
/// function `phi` in generating periods.
pub fn evaluate_schedule(s: &Schedule, scenario: &Scenario, phi: &dyn Fn(f64, f64) -> f64) -> Evaluation {
    let p = &scenario.plant;
    let c = p.balance_coef();
    let t_max = scenario.periods();
    let mut pwl_obj = 0.0;
    let mut nl_obj = 0.0;
    let mut err = 0.0;
    let mut gen = 0;
    let mut residual: f64 = 0.0;
    for t in 0..t_max {
        pwl_obj += scenario.price[t] * s.p[t];
        let truth = if s.g[t] {
            let v = phi(s.q[t], s.r[t]);
            err += (s.p[t] - v).abs();
            gen += 1;
            v
        } else if s.u[t] {
            p.p_pump
        } else {
            0.0
        };
        nl_obj += scenario.price[t] * truth;
        if t + 1 < s.r.len() {
            residual = residual.max((s.r[t + 1] - s.r[t] - c * (scenario.inflow[t] - s.q[t])).abs());
        }
    }
    let rel_err = if nl_obj == 0.0 {
        if pwl_obj == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        (pwl_obj - nl_obj).abs() / nl_obj.abs()
    };
    Evaluation {
        pwl_obj,
        nl_obj,
        rel_err,
        avg_abs_hpf_err: if gen == 0 { 0.0 } else { err / gen as f64 },
        generating_periods: gen,
        balance_residual: residual,
    }
}
