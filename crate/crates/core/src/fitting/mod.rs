//! Piecewise-linear interpolation with a certified maximum error.
//!
//! Each round refines the triangulation until every angle exceeds the
//! configured bound (which caps the interpolant's gradient), samples each new
//! triangle densely enough that the sampled error plus a Lipschitz margin
//! bounds the true error, and either stops or inserts the worst sample.

pub mod expr;
pub mod functions;
mod report;

pub use functions::{estimate_lipschitz, TargetFunction, BUILTIN_NAMES};
pub use report::{convergence_svg, report_csv};

use std::collections::{HashMap, HashSet};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::metrics::{min_angle_deg, simplex_metrics};
use crate::geometry::ruppert::{refine_in_place, RefineOptions};
use crate::geometry::{Point2, Rect, Triangulation2D};
use crate::mesh::{grid_triangulation, DiagRule, SimplicialPartition};
use crate::sampling::mps_sample;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    pub eps: f64,
    /// Minimum-angle bound in degrees, in (0, 20).
    pub alpha_lb: f64,
    /// Share of the tolerance reserved for the Lipschitz margin, in (0, 0.5].
    pub theta: f64,
    pub seed: u64,
    pub max_iter: usize,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            eps: 0.1,
            alpha_lb: 18.0,
            theta: 0.5,
            seed: 0,
            max_iter: 100_000,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Config(format!("eps must be positive, got {}", self.eps)));
        }
        if !(self.alpha_lb > 0.0 && self.alpha_lb < 20.0) {
            return Err(Error::Config(format!("alpha_lb must lie in (0, 20), got {}", self.alpha_lb)));
        }
        if !(self.theta > 0.0 && self.theta <= 0.5) {
            return Err(Error::Config(format!("theta must lie in (0, 0.5], got {}", self.theta)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterRecord {
    pub iteration: usize,
    pub n_points: usize,
    pub n_triangles: usize,
    pub eps_hat_max: f64,
    /// Point added at the end of this iteration (none on the last).
    pub inserted: Option<Point2>,
    /// Samples drawn in this iteration (new triangles only).
    pub new_samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub records: Vec<IterRecord>,
    /// max over triangles of sampled error + (L + grad) * r.
    pub certified_bound: f64,
    /// Smallest covering radius used by any triangle of the final mesh.
    pub min_radius: f64,
    /// Largest ratio of interpolant gradient norm to L / sin(min angle)
    /// over every triangle sampled during the run.
    pub max_gradient_ratio: f64,
    pub total_samples: usize,
}

impl FitReport {
    pub fn final_eps_hat(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.eps_hat_max)
    }
}

#[derive(Debug, Clone)]
pub struct FitResult {
    pub pwl: SimplicialPartition,
    pub triangulation: Triangulation2D,
    pub report: FitReport,
}

/// Gradient of the affine interpolant over a simplex and its norm.
pub fn interpolant_gradient(verts: &[&[f64]], values: &[f64]) -> Result<(Vec<f64>, f64)> {
    simplex_metrics(verts)?;
    let d = verts.len() - 1;
    let m = DMatrix::from_fn(d, d, |r, c| verts[r + 1][c] - verts[0][c]);
    let rhs = DVector::from_fn(d, |r, _| values[r + 1] - values[0]);
    let g = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Degenerate("singular simplex".into()))?;
    let norm = g.norm();
    Ok((g.iter().copied().collect(), norm))
}

/// The two gradient bounds for interpolants of an L-Lipschitz function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientBounds {
    /// `L * ell_max / delta_min`.
    pub general: f64,
    /// `L / sin(alpha_min)`, triangles only.
    pub planar: Option<f64>,
}

pub fn lipschitz_bound_check(verts: &[&[f64]], lipschitz: f64) -> Result<GradientBounds> {
    let m = simplex_metrics(verts)?;
    Ok(GradientBounds {
        general: lipschitz * m.ell_max / m.delta_min,
        planar: m.alpha_min.map(|a| lipschitz / a.to_radians().sin()),
    })
}

fn mix(mut h: u64, v: u64) -> u64 {
    // splitmix64 finalizer over a running hash
    h ^= v.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(h << 6).wrapping_add(h >> 2);
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

fn triangle_seed(seed: u64, key: [usize; 3]) -> u64 {
    key.iter().fold(mix(0, seed), |h, &v| mix(h, v as u64))
}

/// Sampling outcome for one triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleEstimate {
    pub eps_hat: f64,
    pub grad_norm: f64,
    pub radius: f64,
    pub samples: usize,
    /// Worst and second-worst samples as (error, point).
    pub worst: [(f64, Point2); 2],
}

/// Samples one triangle with covering radius `theta * eps / (L + grad)`.
pub fn estimate_triangle(
    pts: [Point2; 3],
    vals: [f64; 3],
    f: &TargetFunction,
    cfg: &FitConfig,
    seed: u64,
) -> TriangleEstimate {
    let [a, b, c] = pts;
    let (e1, e2) = ([b[0] - a[0], b[1] - a[1]], [c[0] - a[0], c[1] - a[1]]);
    let det = e1[0] * e2[1] - e1[1] * e2[0];
    let (d1, d2) = (vals[1] - vals[0], vals[2] - vals[0]);
    let g = [(d1 * e2[1] - d2 * e1[1]) / det, (e1[0] * d2 - e2[0] * d1) / det];
    let grad_norm = g[0].hypot(g[1]);
    let radius = cfg.theta * cfg.eps / (f.lipschitz + grad_norm);
    let verts: [&[f64]; 3] = [&a, &b, &c];
    let s = mps_sample(&verts, radius, 0.5 * radius, seed);
    let mut worst = [(-1.0, a), (-1.0, a)];
    for p in s.points() {
        let fhat = vals[0] + g[0] * (p[0] - a[0]) + g[1] * (p[1] - a[1]);
        let err = (f.eval(p[0], p[1]) - fhat).abs();
        if err > worst[0].0 {
            worst[1] = worst[0];
            worst[0] = (err, [p[0], p[1]]);
        } else if err > worst[1].0 {
            worst[1] = (err, [p[0], p[1]]);
        }
    }
    TriangleEstimate {
        eps_hat: worst[0].0.max(0.0),
        grad_norm,
        radius,
        samples: s.len(),
        worst,
    }
}

/// Per-triangle estimates keyed by sorted vertex ids, so unchanged
/// triangles are never resampled.
#[derive(Debug, Default, Clone)]
pub struct ErrorEstimator {
    cache: HashMap<[usize; 3], TriangleEstimate>,
    pub max_gradient_ratio: f64,
}

/// Largest sampled error over the mesh, where it occurred, and the
/// estimates in triangle order.
#[derive(Debug, Clone)]
pub struct MeshEstimate {
    pub eps_hat_max: f64,
    pub p_max: Point2,
    pub per_triangle: Vec<TriangleEstimate>,
    pub new_samples: usize,
}

fn key_of(v: [usize; 3]) -> [usize; 3] {
    let mut k = v;
    k.sort_unstable();
    k
}

impl ErrorEstimator {
    pub fn estimate(
        &mut self,
        tri: &Triangulation2D,
        values: &[f64],
        f: &TargetFunction,
        cfg: &FitConfig,
    ) -> MeshEstimate {
        let mut live = HashSet::with_capacity(tri.num_triangles());
        let mut per_triangle = Vec::with_capacity(tri.num_triangles());
        let mut new_samples = 0;
        for t in tri.triangle_ids() {
            let v = tri.triangle(t);
            let key = key_of(v);
            live.insert(key);
            let est = match self.cache.get(&key) {
                Some(e) => *e,
                None => {
                    let pts = tri.corners_of(t);
                    let e = estimate_triangle(pts, v.map(|i| values[i]), f, cfg, triangle_seed(cfg.seed, key));
                    let angle = min_angle_deg(&pts[0], &pts[1], &pts[2]).to_radians();
                    self.max_gradient_ratio = self
                        .max_gradient_ratio
                        .max(e.grad_norm * angle.sin() / f.lipschitz);
                    new_samples += e.samples;
                    self.cache.insert(key, e);
                    e
                }
            };
            per_triangle.push(est);
        }
        self.cache.retain(|k, _| live.contains(k));
        let mut eps_hat_max = -1.0;
        let mut p_max = [f64::NAN; 2];
        for e in &per_triangle {
            if e.worst[0].0 > eps_hat_max {
                eps_hat_max = e.worst[0].0;
                p_max = e.worst[0].1;
            }
        }
        MeshEstimate {
            eps_hat_max: eps_hat_max.max(0.0),
            p_max,
            per_triangle,
            new_samples,
        }
    }
}

/// Sampled error of an existing planar partition.
pub fn estimate_error(p: &SimplicialPartition, f: &TargetFunction, cfg: &FitConfig) -> Result<MeshEstimate> {
    let tri = triangulation_of(p)?;
    Ok(ErrorEstimator::default().estimate(&tri, &p.values, f, cfg))
}

fn triangulation_of(p: &SimplicialPartition) -> Result<Triangulation2D> {
    if p.dim != 2 {
        return Err(Error::Validation(format!("expected a planar mesh, got d = {}", p.dim)));
    }
    let pts: Vec<Point2> = (0..p.num_vertices()).map(|v| p.point2(v)).collect();
    let tri = crate::geometry::delaunay(&pts)?;
    if tri.simplices().len() != p.num_simplices()
        || tri.simplices().iter().map(|s| s.to_vec()).collect::<HashSet<_>>()
            != p.simplices.iter().cloned().collect::<HashSet<_>>()
    {
        return Err(Error::Validation("mesh is not the Delaunay triangulation of its vertices".into()));
    }
    Ok(tri)
}

fn partial(tri: &Triangulation2D, values: &[f64], f: &TargetFunction, report: FitReport) -> FitResult {
    let mut pwl = SimplicialPartition::from_triangulation(tri, values.to_vec());
    pwl.provenance = format!("fit {}", f.name);
    FitResult {
        pwl,
        triangulation: tri.clone(),
        report,
    }
}

/// Fits `f` on its domain to absolute error `cfg.eps`.
pub fn fit(f: &TargetFunction, cfg: &FitConfig) -> Result<FitResult> {
    cfg.validate()?;
    if !(f.lipschitz > 0.0) {
        return Err(Error::Config(format!("Lipschitz constant must be positive, got {}", f.lipschitz)));
    }
    let mut tri = Triangulation2D::from_rect(f.domain)?;
    let mut values: Vec<f64> = tri.points().iter().map(|p| f.eval(p[0], p[1])).collect();
    let mut est = ErrorEstimator::default();
    let mut report = FitReport {
        records: Vec::new(),
        certified_bound: f64::INFINITY,
        min_radius: f64::INFINITY,
        max_gradient_ratio: 0.0,
        total_samples: 0,
    };
    let refine = RefineOptions {
        alpha_lb: cfg.alpha_lb,
        ..RefineOptions::default()
    };
    for iteration in 0.. {
        refine_in_place(&mut tri, refine)?;
        for p in &tri.points()[values.len()..] {
            values.push(f.eval(p[0], p[1]));
        }
        let m = est.estimate(&tri, &values, f, cfg);
        report.total_samples += m.new_samples;
        report.max_gradient_ratio = est.max_gradient_ratio;
        report.certified_bound = m
            .per_triangle
            .iter()
            .map(|e| e.eps_hat + (f.lipschitz + e.grad_norm) * e.radius)
            .fold(0.0, f64::max);
        report.min_radius = m.per_triangle.iter().map(|e| e.radius).fold(f64::INFINITY, f64::min);
        let mut record = IterRecord {
            iteration,
            n_points: tri.points().len(),
            n_triangles: tri.num_triangles(),
            eps_hat_max: m.eps_hat_max,
            inserted: None,
            new_samples: m.new_samples,
        };
        if m.eps_hat_max <= (1.0 - cfg.theta) * cfg.eps {
            report.records.push(record);
            return Ok(partial(&tri, &values, f, report));
        }
        if iteration >= cfg.max_iter {
            report.records.push(record);
            return Err(Error::MaxIterExceeded(Box::new(partial(&tri, &values, f, report))));
        }
        // Worst sample first; a near-duplicate of a vertex falls through to
        // the next candidate.
        let mut cands: Vec<(f64, usize, usize, Point2)> = m
            .per_triangle
            .iter()
            .enumerate()
            .flat_map(|(t, e)| (0..2).map(move |k| (e.worst[k].0, t, k, e.worst[k].1)))
            .filter(|c| c.0 >= 0.0)
            .collect();
        cands.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut inserted = None;
        for (_, _, _, p) in cands {
            match tri.insert(p) {
                Ok(_) => {
                    values.push(f.eval(p[0], p[1]));
                    inserted = Some(p);
                    break;
                }
                Err(Error::DuplicatePoint(..)) => continue,
                Err(e) => return Err(e),
            }
        }
        record.inserted = inserted;
        report.records.push(record);
        if inserted.is_none() {
            return Err(Error::MaxIterExceeded(Box::new(partial(&tri, &values, f, report))));
        }
    }
    unreachable!()
}

/// Largest `|f - fhat|` over the nodes of an `n x n` grid on the domain,
/// evaluated triangle by triangle.
pub fn audit(tri: &Triangulation2D, values: &[f64], f: &TargetFunction, n: usize) -> (f64, Point2) {
    let d = tri.domain();
    let (sx, sy) = ((d.x_max - d.x_min) / (n - 1) as f64, (d.y_max - d.y_min) / (n - 1) as f64);
    let node = |i: usize, j: usize| -> Point2 {
        let x = if i == n - 1 { d.x_max } else { d.x_min + i as f64 * sx };
        let y = if j == n - 1 { d.y_max } else { d.y_min + j as f64 * sy };
        [x, y]
    };
    let mut worst = (0.0, [d.x_min, d.y_min]);
    for t in tri.triangle_ids() {
        let [a, b, c] = tri.corners_of(t);
        let v = tri.triangle(t).map(|i| values[i]);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let lo_x = a[0].min(b[0]).min(c[0]);
        let hi_x = a[0].max(b[0]).max(c[0]);
        let lo_y = a[1].min(b[1]).min(c[1]);
        let hi_y = a[1].max(b[1]).max(c[1]);
        let i0 = ((lo_x - d.x_min) / sx).floor().max(0.0) as usize;
        let i1 = (((hi_x - d.x_min) / sx).ceil() as usize).min(n - 1);
        let j0 = ((lo_y - d.y_min) / sy).floor().max(0.0) as usize;
        let j1 = (((hi_y - d.y_min) / sy).ceil() as usize).min(n - 1);
        for i in i0..=i1 {
            for j in j0..=j1 {
                let p = node(i, j);
                let l1 = ((p[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (p[1] - a[1])) / det;
                let l2 = ((b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1])) / det;
                let l0 = 1.0 - l1 - l2;
                if l0 < -1e-12 || l1 < -1e-12 || l2 < -1e-12 {
                    continue;
                }
                let err = (f.eval(p[0], p[1]) - (l0 * v[0] + l1 * v[1] + l2 * v[2])).abs();
                if err > worst.0 {
                    worst = (err, p);
                }
            }
        }
    }
    worst
}

/// Same audit for a planar partition.
pub fn audit_partition(p: &SimplicialPartition, f: &TargetFunction, n: usize) -> Result<(f64, Point2)> {
    let tri = triangulation_of(p)?;
    Ok(audit(&tri, &p.values, f, n))
}

/// Audit of the `k x k` equidistant grid triangulation (random diagonals)
/// on an `n x n` node grid, without building the mesh explicitly.
pub fn audit_grid(f: &TargetFunction, k: usize, n: usize, seed: u64) -> f64 {
    let g = grid_triangulation(k, k, f.domain, DiagRule::Random, seed);
    let d = f.domain;
    let vals: Vec<f64> = g.points.iter().map(|p| f.eval(p[0], p[1])).collect();
    // rising[cell] tells which diagonal the generator chose.
    let rising: Vec<bool> = (0..k * k)
        .map(|c| {
            let s = &g.simplices[2 * c];
            let (i, j) = (c % k, c / k);
            s.contains(&((j + 1) * (k + 1) + i + 1)) && s.contains(&(j * (k + 1) + i))
        })
        .collect();
    let (w, h) = (d.x_max - d.x_min, d.y_max - d.y_min);
    let mut worst: f64 = 0.0;
    for a in 0..n {
        let x = d.x_min + w * a as f64 / (n - 1) as f64;
        let u = ((x - d.x_min) / w * k as f64).min(k as f64 - 1e-12);
        let i = (u.floor() as usize).min(k - 1);
        let s = u - i as f64;
        for b in 0..n {
            let y = d.y_min + h * b as f64 / (n - 1) as f64;
            let vv = ((y - d.y_min) / h * k as f64).min(k as f64 - 1e-12);
            let j = (vv.floor() as usize).min(k - 1);
            let t = vv - j as f64;
            let id = |ii: usize, jj: usize| vals[jj * (k + 1) + ii];
            let (f00, f10, f11, f01) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            let fhat = if rising[j * k + i] {
                if s >= t {
                    f00 + s * (f10 - f00) + t * (f11 - f10)
                } else {
                    f00 + t * (f01 - f00) + s * (f11 - f01)
                }
            } else if s + t <= 1.0 {
                f00 + s * (f10 - f00) + t * (f01 - f00)
            } else {
                f11 + (1.0 - s) * (f01 - f11) + (1.0 - t) * (f10 - f11)
            };
            worst = worst.max((f.eval(x, y) - fhat).abs());
        }
    }
    worst
}

/// Smallest `k` whose `k x k` random-diagonal grid passes [`audit_grid`] at
/// tolerance `eps`, scanning `k = 1, 2, ...` up to `k_max`.
pub fn grid_size_needed(f: &TargetFunction, eps: f64, n: usize, seed: u64, k_max: usize) -> Option<usize> {
    (1..=k_max).find(|&k| audit_grid(f, k, n, seed) <= eps)
}

/// Rectangle helper for callers building functions on custom domains.
pub fn domain(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Rect {
    Rect::new(x_min, x_max, y_min, y_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::random_delaunay;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gradient_examples() {
        let v: Vec<&[f64]> = vec![&[0., 0.], &[1., 0.], &[0., 1.]];
        let (g, n) = interpolant_gradient(&v, &[0., 1., 0.]).unwrap();
        assert_eq!((g[0], g[1], n), (1.0, 0.0, 1.0));
        let (g, _) = interpolant_gradient(&v, &[2., 2., 2.]).unwrap();
        assert_eq!(g, vec![0.0, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p: Vec<Vec<f64>> = (0..3).map(|_| vec![rng.gen(), rng.gen()]).collect();
        let r: Vec<&[f64]> = p.iter().map(|q| &q[..]).collect();
        let vals: Vec<f64> = p.iter().map(|q| 3.0 * q[0] - 2.0 * q[1] + 1.0).collect();
        let (g, _) = interpolant_gradient(&r, &vals).unwrap();
        assert!((g[0] - 3.0).abs() < 1e-9 && (g[1] + 2.0).abs() < 1e-9);
        let flat: Vec<&[f64]> = vec![&[0., 0.], &[1., 1.], &[2., 2.]];
        assert!(interpolant_gradient(&flat, &[0.; 3]).is_err());
    }

    #[test]
    fn gradient_bounds() {
        let apex = [0.5, 0.75f64.sqrt()];
        let eq: Vec<&[f64]> = vec![&[0., 0.], &[1., 0.], &apex];
        let b = lipschitz_bound_check(&eq, 1.0).unwrap();
        assert!((b.planar.unwrap() - 1.0 / 60f64.to_radians().sin()).abs() < 1e-12);
        let right: Vec<&[f64]> = vec![&[0., 0.], &[1., 0.], &[0., 1.]];
        let b = lipschitz_bound_check(&right, 2.0).unwrap();
        assert!((b.planar.unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-12);

        let l = 13f64.sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let p: Vec<Vec<f64>> = (0..3).map(|_| vec![rng.gen(), rng.gen()]).collect();
            let r: Vec<&[f64]> = p.iter().map(|q| &q[..]).collect();
            let Ok(b) = lipschitz_bound_check(&r, l) else { continue };
            let vals: Vec<f64> = p.iter().map(|q| (3.0 * q[0]).sin() * (2.0 * q[1]).cos()).collect();
            let (_, g) = interpolant_gradient(&r, &vals).unwrap();
            assert!(g <= b.general + 1e-9);
            assert!(g <= b.planar.unwrap() + 1e-9);
        }
    }

    #[test]
    fn affine_function_needs_no_insertions() {
        let f = TargetFunction::from_expr("x + y", Some(2f64.sqrt()), Rect::unit()).unwrap();
        let r = fit(&f, &FitConfig::default()).unwrap();
        assert_eq!(r.pwl.num_simplices(), 2);
        assert_eq!(r.report.records.len(), 1);
        assert!(r.report.final_eps_hat() < 1e-12);
    }

    #[test]
    fn affine_estimate_is_zero_on_any_mesh() {
        let f = TargetFunction::from_expr("2*x - y", Some(5f64.sqrt()), Rect::unit()).unwrap();
        let mut p = random_delaunay(15, 2, 3);
        p.values = p.points.iter().map(|q| 2.0 * q[0] - q[1]).collect();
        let m = estimate_error(&p, &f, &FitConfig::default()).unwrap();
        assert!(m.eps_hat_max < 1e-12);
    }

    #[test]
    fn estimate_is_sandwiched_by_dense_grid() {
        let l = 2.0 * 2f64.sqrt();
        let f = TargetFunction::new("sq", |x, y| x * x + y * y, l, Rect::unit());
        let mut p = crate::mesh::grid_triangulation(1, 1, Rect::unit(), DiagRule::Fixed, 0);
        p.values = p.points.iter().map(|q| q[0] * q[0] + q[1] * q[1]).collect();
        let cfg = FitConfig {
            eps: 0.5,
            ..FitConfig::default()
        };
        let m = estimate_error(&p, &f, &cfg).unwrap();
        let (oracle, _) = audit_partition(&p, &f, 500).unwrap();
        let margin = m
            .per_triangle
            .iter()
            .map(|e| (l + e.grad_norm) * e.radius)
            .fold(0.0, f64::max);
        assert!(m.eps_hat_max <= oracle + 1e-12);
        assert!(m.eps_hat_max >= oracle - margin);
    }

    #[test]
    fn incremental_matches_full_resample() {
        let f = TargetFunction::by_name("f1").unwrap();
        let cfg = FitConfig::default();
        let mut p = random_delaunay(20, 0, 8);
        p.values = p.points.iter().map(|q| f.eval(q[0], q[1])).collect();
        let tri = triangulation_of(&p).unwrap();
        let mut est = ErrorEstimator::default();
        let a = est.estimate(&tri, &p.values, &f, &cfg);
        let b = est.estimate(&tri, &p.values, &f, &cfg);
        assert_eq!(b.new_samples, 0);
        assert_eq!(a.eps_hat_max, b.eps_hat_max);
        let c = estimate_error(&p, &f, &cfg).unwrap();
        assert_eq!(a.eps_hat_max, c.eps_hat_max);
    }

    #[test]
    fn fit_is_certified_and_deterministic() {
        let f = TargetFunction::new(
            "bump",
            |x, y| (-8.0 * ((x - 0.3).powi(2) + (y - 0.6).powi(2))).exp(),
            8.0 * (0.5f64).exp().recip() / 2f64.sqrt() * 2.0,
            Rect::unit(),
        );
        let cfg = FitConfig {
            eps: 0.05,
            seed: 3,
            ..FitConfig::default()
        };
        let a = fit(&f, &cfg).unwrap();
        assert!(a.report.final_eps_hat() <= 0.025);
        assert!(a.report.certified_bound <= 0.05 + 1e-12);
        assert!(a.report.max_gradient_ratio <= 1.0 + 1e-9);
        let (err, _) = audit(&a.triangulation, &a.pwl.values, &f, 400);
        assert!(err <= 0.05);
        let b = fit(&f, &cfg).unwrap();
        assert_eq!(a.report, b.report);
        assert_eq!(a.pwl, b.pwl);
    }

    #[test]
    fn max_iter_returns_partial() {
        let f = TargetFunction::by_name("f4").unwrap();
        let cfg = FitConfig {
            max_iter: 3,
            ..FitConfig::default()
        };
        match fit(&f, &cfg) {
            Err(Error::MaxIterExceeded(p)) => {
                assert_eq!(p.report.records.len(), 4);
                p.pwl.validate().unwrap();
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_ranges() {
        let f = TargetFunction::by_name("f1").unwrap();
        for cfg in [
            FitConfig { eps: 0.0, ..FitConfig::default() },
            FitConfig { alpha_lb: 20.0, ..FitConfig::default() },
            FitConfig { theta: 0.6, ..FitConfig::default() },
        ] {
            assert!(matches!(fit(&f, &cfg), Err(Error::Config(_))));
        }
    }

    #[test]
    fn grid_audit_agrees_with_mesh_audit() {
        let f = TargetFunction::by_name("f3").unwrap();
        let k = 7;
        let mut g = grid_triangulation(k, k, Rect::unit(), DiagRule::Random, 5);
        g.values = g.points.iter().map(|q| f.eval(q[0], q[1])).collect();
        let fast = audit_grid(&f, k, 211, 5);
        // Mesh audit via generic point location.
        let mut slow: f64 = 0.0;
        for a in 0..211 {
            for b in 0..211 {
                let x = [a as f64 / 210.0, b as f64 / 210.0];
                slow = slow.max((f.eval(x[0], x[1]) - g.interpolate(&x).unwrap()).abs());
            }
        }
        assert!((fast - slow).abs() < 1e-9, "{fast} {slow}");
    }
}
