//! Simplicial partitions in any dimension, with vertex values.

mod generate;
mod io;

pub use generate::{
    b3_example, cube_partition, grid_triangulation, random_delaunay, random_partition, DiagRule,
};
pub use io::{load_mesh, mesh_from_json, mesh_to_json, save_mesh};

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::geometry::metrics::{barycentric, simplex_volume};
use crate::geometry::{orientation, signed_area, Point2, Sign, Triangulation2D};

/// A simplicial partition of a convex region, with a function value per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialPartition {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// Sorted vertex ids of each simplex.
    pub simplices: Vec<Vec<usize>>,
    pub provenance: String,
}

/// The family of vertex sets `S_i`, one per simplex.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SetSystem {
    pub num_vertices: usize,
    pub sets: Vec<Vec<usize>>,
}

impl SetSystem {
    pub fn new(num_vertices: usize, sets: Vec<Vec<usize>>) -> Self {
        let mut sets: Vec<Vec<usize>> = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        let mut seen = BTreeSet::new();
        sets.retain(|s| seen.insert(s.clone()));
        SetSystem { num_vertices, sets }
    }

    /// Per-vertex list of the sets containing it, in increasing order.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.num_vertices];
        for (i, s) in self.sets.iter().enumerate() {
            for &v in s {
                inc[v].push(i);
            }
        }
        inc
    }

    /// Whether some set contains all of `vs`.
    pub fn is_feasible(&self, vs: &[usize]) -> bool {
        self.sets
            .iter()
            .any(|s| vs.iter().all(|v| s.binary_search(v).is_ok()))
    }
}

impl SimplicialPartition {
    pub fn new(
        dim: usize,
        points: Vec<Vec<f64>>,
        values: Vec<f64>,
        simplices: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let p = SimplicialPartition {
            dim,
            points,
            values,
            simplices: simplices
                .into_iter()
                .map(|mut s| {
                    s.sort_unstable();
                    s
                })
                .collect(),
            provenance: String::new(),
        };
        p.validate()?;
        Ok(p)
    }

    /// Partition from a planar triangulation, with `values` per vertex.
    pub fn from_triangulation(tri: &Triangulation2D, values: Vec<f64>) -> Self {
        SimplicialPartition {
            dim: 2,
            points: tri.points().iter().map(|p| p.to_vec()).collect(),
            values,
            simplices: tri.simplices().into_iter().map(|s| s.to_vec()).collect(),
            provenance: String::new(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.points.len()
    }

    pub fn num_simplices(&self) -> usize {
        self.simplices.len()
    }

    pub fn to_set_system(&self) -> SetSystem {
        SetSystem {
            num_vertices: self.points.len(),
            sets: self.simplices.clone(),
        }
    }

    pub fn simplex_points(&self, s: usize) -> Vec<&[f64]> {
        self.simplices[s].iter().map(|&v| &self.points[v][..]).collect()
    }

    pub fn point2(&self, v: usize) -> Point2 {
        [self.points[v][0], self.points[v][1]]
    }

    pub fn volume(&self, s: usize) -> f64 {
        simplex_volume(&self.simplex_points(s))
    }

    /// Bounding box as per-axis (min, max).
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        (0..self.dim)
            .map(|k| {
                self.points.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                    (lo.min(p[k]), hi.max(p[k]))
                })
            })
            .collect()
    }

    /// Vertex pairs sharing a simplex (the edges of the partition).
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut set = BTreeSet::new();
        for s in &self.simplices {
            for i in 0..s.len() {
                for j in i + 1..s.len() {
                    set.insert([s[i], s[j]]);
                }
            }
        }
        set.into_iter().collect()
    }

    /// Simplex containing `x` and its barycentric coordinates.
    pub fn locate(&self, x: &[f64]) -> Option<(usize, Vec<f64>)> {
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for s in 0..self.simplices.len() {
            if let Some(b) = barycentric(&self.simplex_points(s), x) {
                let worst = b.iter().copied().fold(f64::INFINITY, f64::min);
                if worst >= 0.0 {
                    return Some((s, b));
                }
                if best.as_ref().is_none_or(|(_, _, w)| worst > *w) {
                    best = Some((s, b, worst));
                }
            }
        }
        best.filter(|(_, _, w)| *w >= -1e-9).map(|(s, b, _)| (s, b))
    }

    /// Value of the interpolant at `x`, or `None` outside the partition.
    pub fn interpolate(&self, x: &[f64]) -> Option<f64> {
        let (s, b) = self.locate(x)?;
        Some(
            self.simplices[s]
                .iter()
                .zip(&b)
                .map(|(&v, &l)| l * self.values[v])
                .sum(),
        )
    }

    /// Checks the partition invariants. Facet sharing is checked in any
    /// dimension and the volume sum against the convex hull for d <= 2; for
    /// d >= 3 overlap is probed by testing each simplex centroid against the
    /// others.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if d == 0 {
            return Err(Error::Validation("dimension must be at least 1".into()));
        }
        if self.values.len() != self.points.len() {
            return Err(Error::Validation(format!(
                "{} values for {} vertices",
                self.values.len(),
                self.points.len()
            )));
        }
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != d {
                return Err(Error::Validation(format!(
                    "vertex {i} has {} coordinates, expected {d}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) || !self.values[i].is_finite() {
                return Err(Error::Validation(format!("vertex {i} is not finite")));
            }
        }
        let mut used = vec![false; self.points.len()];
        for (i, s) in self.simplices.iter().enumerate() {
            if s.len() != d + 1 {
                return Err(Error::Validation(format!(
                    "simplex {i} has {} vertices, expected {}",
                    s.len(),
                    d + 1
                )));
            }
            if s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Validation(format!("simplex {i} repeats a vertex")));
            }
            for &v in s {
                if v >= self.points.len() {
                    return Err(Error::Validation(format!("simplex {i} references vertex {v}")));
                }
                used[v] = true;
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::Validation(format!("vertex {v} belongs to no simplex")));
        }
        if self.simplices.is_empty() {
            return Err(Error::Validation("no simplices".into()));
        }
        let mut total = 0.0;
        let scale = self.bounds().iter().map(|(lo, hi)| hi - lo).product::<f64>();
        for s in 0..self.simplices.len() {
            let v = self.volume(s);
            if !(v > 1e-12 * scale) {
                return Err(Error::Validation(format!("simplex {s} is degenerate")));
            }
            total += v;
        }
        // A partition of a convex region fills its convex hull.
        let hull = match d {
            1 => Some(scale),
            2 => Some(hull_area(&self.points)),
            _ => None,
        };
        if let Some(hull) = hull {
            if (total - hull).abs() > 1e-9 * hull {
                return Err(Error::Validation(format!(
                    "simplex volumes sum to {total}, convex hull measure is {hull}"
                )));
            }
        }
        // Each facet is shared by at most two simplices, lying on opposite sides.
        let mut facets: HashMap<Vec<usize>, Vec<(usize, usize)>> = HashMap::new();
        for (i, s) in self.simplices.iter().enumerate() {
            for k in 0..=d {
                let mut f = s.clone();
                let apex = f.remove(k);
                facets.entry(f).or_default().push((i, apex));
            }
        }
        for (f, owners) in &facets {
            if owners.len() > 2 {
                return Err(Error::Validation(format!(
                    "facet {f:?} is shared by {} simplices",
                    owners.len()
                )));
            }
            if owners.len() == 2 && d >= 1 {
                let side = |apex: usize| {
                    let mut pts: Vec<&[f64]> = f.iter().map(|&v| &self.points[v][..]).collect();
                    pts.push(&self.points[apex]);
                    signed_volume(&pts)
                };
                if side(owners[0].1) * side(owners[1].1) >= 0.0 {
                    return Err(Error::Validation(format!(
                        "simplices {} and {} overlap across facet {f:?}",
                        owners[0].0, owners[1].0
                    )));
                }
            }
        }
        if d >= 3 {
            for i in 0..self.simplices.len() {
                let pts = self.simplex_points(i);
                let c: Vec<f64> = (0..d)
                    .map(|k| pts.iter().map(|p| p[k]).sum::<f64>() / (d + 1) as f64)
                    .collect();
                for j in 0..self.simplices.len() {
                    if i == j {
                        continue;
                    }
                    if let Some(b) = barycentric(&self.simplex_points(j), &c) {
                        if b.iter().all(|&l| l > 1e-9) {
                            return Err(Error::Validation(format!(
                                "centroid of simplex {i} lies inside simplex {j}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Splits edge `{u, v}` at its midpoint `w`, replacing each simplex `S`
    /// that contains both by `S - u + w` and `S - v + w`. Returns `w`.
    pub fn split_edge(&mut self, u: usize, v: usize, value: f64) -> Result<usize> {
        let hits: Vec<usize> = (0..self.simplices.len())
            .filter(|&i| {
                let s = &self.simplices[i];
                s.binary_search(&u).is_ok() && s.binary_search(&v).is_ok()
            })
            .collect();
        if u == v || hits.is_empty() {
            return Err(Error::NotAnEdge(u, v));
        }
        let w = self.points.len();
        let mid: Vec<f64> = self.points[u]
            .iter()
            .zip(&self.points[v])
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        self.points.push(mid);
        self.values.push(value);
        for i in hits {
            let s = self.simplices[i].clone();
            let replace = |drop: usize| {
                let mut t: Vec<usize> = s.iter().copied().filter(|&x| x != drop).collect();
                t.push(w);
                t.sort_unstable();
                t
            };
            self.simplices[i] = replace(u);
            self.simplices.push(replace(v));
        }
        Ok(w)
    }

    /// Inserts the centroid of simplex `s`, replacing it by d+1 simplices.
    pub fn stellar_subdivide(&mut self, s: usize, value: f64) -> usize {
        let old = self.simplices[s].clone();
        let d = self.dim;
        let c: Vec<f64> = (0..d)
            .map(|k| old.iter().map(|&v| self.points[v][k]).sum::<f64>() / (d + 1) as f64)
            .collect();
        let w = self.points.len();
        self.points.push(c);
        self.values.push(value);
        for k in 0..=d {
            let mut t = old.clone();
            t[k] = w;
            t.sort_unstable();
            if k == 0 {
                self.simplices[s] = t;
            } else {
                self.simplices.push(t);
            }
        }
        w
    }
}

fn hull_area(points: &[Vec<f64>]) -> f64 {
    let mut p: Vec<Point2> = points.iter().map(|q| [q[0], q[1]]).collect();
    p.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    p.dedup();
    if p.len() < 3 {
        return 0.0;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point2>> =
            if pass == 0 { Box::new(p.iter()) } else { Box::new(p.iter().rev()) };
        for q in iter {
            while hull.len() >= start + 2
                && orientation(&hull[hull.len() - 2], &hull[hull.len() - 1], q) != Sign::Positive
            {
                hull.pop();
            }
            hull.push(*q);
        }
        hull.pop();
    }
    (0..hull.len())
        .map(|i| signed_area(&[0.0, 0.0], &hull[i], &hull[(i + 1) % hull.len()]))
        .sum()
}

fn signed_volume(pts: &[&[f64]]) -> f64 {
    let d = pts.len() - 1;
    let m = nalgebra::DMatrix::from_fn(d, d, |r, c| pts[c + 1][r] - pts[0][r]);
    m.determinant()
}
