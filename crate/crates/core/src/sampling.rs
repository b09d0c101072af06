//! Maximal Poisson-disk sampling of a simplex.
//!
//! A background grid with cell diameter `r_cover / sqrt(d)` is laid over the
//! simplex. Each active cell receives up to 30 dart throws; a dart is kept if
//! it lies in the simplex and farther than `r_min` from every earlier sample.
//! Cells whose part of the simplex is not yet covered are split into `2^d`
//! children. Children have diameter at most `r_cover - r_min` once
//! `r_min <= r_cover / 2`, so any point of a child either becomes a sample or
//! is within `r_min` of one, and that sample's ball then covers the child.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::metrics::barycentric;

const THROWS: usize = 30;
const MAX_DEPTH: usize = 5;

/// Sample points of one simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub dim: usize,
    pub r_cover: f64,
    pub r_min: f64,
    /// Flat coordinates, `dim` per point.
    pub coords: Vec<f64>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }
}

const MAX_DIM: usize = 8;

/// Uniform hash grid holding at most one sample per cell.
struct Hash {
    dim: usize,
    origin: [f64; MAX_DIM],
    side: f64,
    n: [usize; MAX_DIM],
    slot: Vec<u32>,
}

impl Hash {
    fn new(lo: &[f64], hi: &[f64], r_min: f64) -> Self {
        let dim = lo.len();
        // Diagonal below r_min: two separated samples never share a cell.
        let side = 0.999 * r_min / (dim as f64).sqrt();
        let mut n = [1; MAX_DIM];
        let mut origin = [0.0; MAX_DIM];
        for k in 0..dim {
            n[k] = (((hi[k] - lo[k]) / side).floor() as usize + 1).max(1);
            origin[k] = lo[k];
        }
        let total = n[..dim].iter().product();
        Hash {
            dim,
            origin,
            side,
            n,
            slot: vec![u32::MAX; total],
        }
    }

    fn cell(&self, x: &[f64]) -> [usize; MAX_DIM] {
        let mut c = [0; MAX_DIM];
        for k in 0..self.dim {
            c[k] = (((x[k] - self.origin[k]) / self.side).floor().max(0.0) as usize).min(self.n[k] - 1);
        }
        c
    }

    fn index(&self, c: &[usize]) -> usize {
        (0..self.dim).rev().fold(0, |acc, k| acc * self.n[k] + c[k])
    }

    fn insert(&mut self, x: &[f64], id: u32) {
        let c = self.cell(x);
        let i = self.index(&c);
        debug_assert_eq!(self.slot[i], u32::MAX);
        self.slot[i] = id;
    }

    /// Calls `f` for each sample in cells within `radius` of `x` (a superset
    /// of the samples within `radius`); stops early when `f` returns true.
    fn any_near(&self, x: &[f64], radius: f64, mut f: impl FnMut(u32) -> bool) -> bool {
        let reach = (radius / self.side).ceil() as isize;
        let c = self.cell(x);
        if self.dim == 2 {
            let i0 = (c[0] as isize - reach).max(0) as usize;
            let i1 = ((c[0] as isize + reach) as usize).min(self.n[0] - 1);
            let j0 = (c[1] as isize - reach).max(0) as usize;
            let j1 = ((c[1] as isize + reach) as usize).min(self.n[1] - 1);
            for j in j0..=j1 {
                let row = j * self.n[0];
                for s in &self.slot[row + i0..=row + i1] {
                    if *s != u32::MAX && f(*s) {
                        return true;
                    }
                }
            }
            return false;
        }
        let (mut lo, mut hi) = ([0; MAX_DIM], [0; MAX_DIM]);
        for k in 0..self.dim {
            lo[k] = (c[k] as isize - reach).max(0) as usize;
            hi[k] = ((c[k] as isize + reach) as usize).min(self.n[k] - 1);
        }
        let mut cur = lo;
        loop {
            let s = self.slot[self.index(&cur)];
            if s != u32::MAX && f(s) {
                return true;
            }
            let mut k = 0;
            loop {
                if k == self.dim {
                    return false;
                }
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    break;
                }
                cur[k] = lo[k];
                k += 1;
            }
        }
    }
}

struct Sampler<'a> {
    dim: usize,
    verts: &'a [&'a [f64]],
    r_cover: f64,
    r_min: f64,
    hash: Hash,
    coords: Vec<f64>,
    rng: ChaCha8Rng,
}

fn d2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl Sampler<'_> {
    fn sample(&self, i: u32) -> &[f64] {
        let i = i as usize;
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    fn is_free(&self, x: &[f64]) -> bool {
        let r2 = self.r_min * self.r_min;
        !self.hash.any_near(x, self.r_min, |s| d2(self.sample(s), x) <= r2)
    }

    fn add(&mut self, x: &[f64]) {
        let id = (self.coords.len() / self.dim) as u32;
        self.coords.extend_from_slice(x);
        self.hash.insert(x, id);
    }

    /// Whether one sample ball contains every point of `pts`.
    /// `pts` holds `dim` coordinates per point.
    fn single_ball_covers(&self, pts: &[f64]) -> bool {
        let r2 = self.r_cover * self.r_cover;
        if pts.is_empty() {
            return true;
        }
        self.hash.any_near(&pts[..self.dim], self.r_cover, |s| {
            let c = self.sample(s);
            pts.chunks_exact(self.dim).all(|p| d2(c, p) <= r2)
        })
    }

    fn inside(&self, x: &[f64]) -> bool {
        barycentric(self.verts, x).is_some_and(|b| b.iter().all(|&l| l >= 0.0))
    }
}

// ---- planar path: exact cell/triangle intersection polygons ----

/// Convex polygon with at most 8 vertices (a triangle clipped by a box).
#[derive(Clone, Copy)]
struct Poly {
    p: [[f64; 2]; 8],
    len: usize,
}

impl Poly {
    fn pts(&self) -> &[[f64; 2]] {
        &self.p[..self.len]
    }
}

fn clip(poly: &Poly, axis: usize, bound: f64, keep_below: bool) -> Poly {
    let inside = |p: &[f64; 2]| if keep_below { p[axis] <= bound } else { p[axis] >= bound };
    let mut out = Poly { p: [[0.0; 2]; 8], len: 0 };
    let pts = poly.pts();
    for i in 0..pts.len() {
        let a = pts[i];
        let b = pts[(i + 1) % pts.len()];
        let (ia, ib) = (inside(&a), inside(&b));
        if ia {
            out.p[out.len] = a;
            out.len += 1;
        }
        if ia != ib {
            let t = (bound - a[axis]) / (b[axis] - a[axis]);
            let mut p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
            p[axis] = bound;
            out.p[out.len] = p;
            out.len += 1;
        }
    }
    out
}

fn polygon_area(p: &[[f64; 2]]) -> f64 {
    (0..p.len())
        .map(|i| {
            let (a, b) = (p[i], p[(i + 1) % p.len()]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        .abs()
        * 0.5
}

fn random_in_polygon(p: &[[f64; 2]], areas: &[f64], total: f64, rng: &mut ChaCha8Rng) -> [f64; 2] {
    let mut pick = rng.gen::<f64>() * total;
    let mut k = 0;
    while k + 1 < areas.len() && pick > areas[k] {
        pick -= areas[k];
        k += 1;
    }
    let (a, b, c) = (p[0], p[k + 1], p[k + 2]);
    let (mut s, mut t) = (rng.gen::<f64>(), rng.gen::<f64>());
    if s + t > 1.0 {
        s = 1.0 - s;
        t = 1.0 - t;
    }
    [
        a[0] + s * (b[0] - a[0]) + t * (c[0] - a[0]),
        a[1] + s * (b[1] - a[1]) + t * (c[1] - a[1]),
    ]
}

fn sample_triangle(s: &mut Sampler, lo: [f64; 2], side: f64, n: [usize; 2]) {
    let mut tri = Poly { p: [[0.0; 2]; 8], len: 3 };
    for (k, v) in s.verts.iter().enumerate() {
        tri.p[k] = [v[0], v[1]];
    }
    let mut cells: Vec<(usize, usize)> = Vec::with_capacity(n[0] * n[1]);
    for j in 0..n[1] {
        for i in 0..n[0] {
            cells.push((i, j));
        }
    }
    cells.shuffle(&mut s.rng);
    let mut stack: Vec<([f64; 2], f64, usize)> = cells
        .into_iter()
        .map(|(i, j)| ([lo[0] + i as f64 * side, lo[1] + j as f64 * side], side, 0))
        .collect();
    stack.reverse();
    while let Some((c, w, depth)) = stack.pop() {
        let clipped = clip(&tri, 0, c[0], false);
        let clipped = clip(&clipped, 0, c[0] + w, true);
        let clipped = clip(&clipped, 1, c[1], false);
        let clipped = clip(&clipped, 1, c[1] + w, true);
        let poly = clipped.pts();
        if poly.len() < 3 {
            continue;
        }
        let mut areas = [0.0; 6];
        for k in 1..poly.len() - 1 {
            areas[k - 1] = polygon_area(&[poly[0], poly[k], poly[k + 1]]);
        }
        let areas = &areas[..poly.len() - 2];
        let total: f64 = areas.iter().sum();
        if total <= 1e-14 * w * w {
            continue;
        }
        if s.single_ball_covers(poly.as_flattened()) {
            continue;
        }
        let mut accepted = false;
        for _ in 0..THROWS {
            let x = random_in_polygon(poly, areas, total, &mut s.rng);
            if s.is_free(&x) {
                s.add(&x);
                accepted = true;
                break;
            }
        }
        let diam = w * std::f64::consts::SQRT_2;
        if accepted && diam <= s.r_cover {
            continue;
        }
        if !accepted && diam <= s.r_cover - s.r_min {
            // Any point of the cell is a sample or within r_min of one.
            let k = poly.len() as f64;
            let x = [
                poly.iter().map(|p| p[0]).sum::<f64>() / k,
                poly.iter().map(|p| p[1]).sum::<f64>() / k,
            ];
            if s.is_free(&x) {
                s.add(&x);
            }
            continue;
        }
        let h = 0.5 * w;
        for (dx, dy) in [(1.0, 1.0), (0.0, 1.0), (1.0, 0.0), (0.0, 0.0)] {
            stack.push(([c[0] + dx * h, c[1] + dy * h], h, depth + 1));
        }
    }
}

// ---- generic path for d != 2: rejection sampling, conservative tests ----

fn box_may_meet_simplex(verts: &[&[f64]], lo: &[f64], w: f64) -> bool {
    let d = lo.len();
    let corners: Vec<Vec<f64>> = (0..1usize << d)
        .map(|m| (0..d).map(|k| lo[k] + w * ((m >> k) & 1) as f64).collect())
        .collect();
    let Some(bary): Option<Vec<Vec<f64>>> =
        corners.iter().map(|c| barycentric(verts, c)).collect()
    else {
        return false;
    };
    // Separated when every corner lies beyond the same facet.
    (0..=d).all(|k| bary.iter().any(|b| b[k] >= 0.0))
}

fn sample_generic(s: &mut Sampler, lo: &[f64], side: f64, n: &[usize]) {
    let d = s.dim;
    let total: usize = n.iter().product();
    let mut cells: Vec<Vec<f64>> = (0..total)
        .map(|mut idx| {
            (0..d)
                .map(|k| {
                    let i = idx % n[k];
                    idx /= n[k];
                    lo[k] + i as f64 * side
                })
                .collect()
        })
        .collect();
    cells.shuffle(&mut s.rng);
    let mut stack: Vec<(Vec<f64>, f64, usize)> = cells.into_iter().map(|c| (c, side, 0)).rev().collect();
    let verts = s.verts;
    while let Some((c, w, depth)) = stack.pop() {
        if !box_may_meet_simplex(verts, &c, w) {
            continue;
        }
        let corners: Vec<f64> = (0..1usize << d)
            .flat_map(|m| { let c = &c; (0..d).map(move |k| c[k] + w * ((m >> k) & 1) as f64) })
            .collect();
        if s.single_ball_covers(&corners) {
            continue;
        }
        let diam = w * (d as f64).sqrt();
        let mut found_inside = false;
        let mut accepted = false;
        for _ in 0..THROWS {
            let x: Vec<f64> = (0..d).map(|k| c[k] + w * s.rng.gen::<f64>()).collect();
            if !s.inside(&x) {
                continue;
            }
            found_inside = true;
            if s.is_free(&x) {
                s.add(&x);
                accepted = true;
                break;
            }
        }
        if (accepted && diam <= s.r_cover) || (found_inside && !accepted && diam <= s.r_cover - s.r_min) {
            continue;
        }
        if depth >= MAX_DEPTH {
            continue;
        }
        let h = 0.5 * w;
        for m in 0..1usize << d {
            let child: Vec<f64> = (0..d).map(|k| c[k] + h * ((m >> k) & 1) as f64).collect();
            stack.push((child, h, depth + 1));
        }
    }
}

/// Samples the simplex `verts` (d+1 points in R^d) so that every point of it
/// lies within `r_cover` of a sample and samples are more than `r_min`
/// apart. Requires `0 < r_min <= r_cover / 2`.
pub fn mps_sample(verts: &[&[f64]], r_cover: f64, r_min: f64, seed: u64) -> SampleSet {
    let d = verts.len() - 1;
    assert!((1..=MAX_DIM).contains(&d), "dimension out of range");
    assert!(r_cover > 0.0 && r_min > 0.0 && r_min <= 0.5 * r_cover, "invalid sampling radii");
    let lo: Vec<f64> = (0..d)
        .map(|k| verts.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min))
        .collect();
    let hi: Vec<f64> = (0..d)
        .map(|k| verts.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let side = r_cover / d as f64;
    let n: Vec<usize> = (0..d)
        .map(|k| (((hi[k] - lo[k]) / side).ceil() as usize).max(1))
        .collect();
    let mut s = Sampler {
        dim: d,
        verts,
        r_cover,
        r_min,
        hash: Hash::new(&lo, &hi, r_min),
        coords: Vec::new(),
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    if d == 2 {
        sample_triangle(&mut s, [lo[0], lo[1]], side, [n[0], n[1]]);
    } else {
        sample_generic(&mut s, &lo, side, &n);
    }
    SampleSet {
        dim: d,
        r_cover,
        r_min,
        coords: s.coords,
    }
}

/// Largest distance from a node of an `n`-step barycentric grid over the
/// triangle to its nearest sample (test oracle for the covering radius).
pub fn covering_gap(verts: &[&[f64]], samples: &SampleSet, n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..=n {
        for j in 0..=n - i {
            let (a, b) = (i as f64 / n as f64, j as f64 / n as f64);
            let c = 1.0 - a - b;
            let x: Vec<f64> = (0..verts[0].len())
                .map(|k| a * verts[0][k] + b * verts[1][k] + c * verts[2][k])
                .collect();
            let near = samples
                .points()
                .map(|p| d2(p, &x))
                .fold(f64::INFINITY, f64::min)
                .sqrt();
            worst = worst.max(near);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> Vec<Vec<f64>> {
        vec![vec![0., 0.], vec![1., 0.], vec![0., 1.]]
    }

    fn refs(v: &[Vec<f64>]) -> Vec<&[f64]> {
        v.iter().map(|p| &p[..]).collect()
    }

    fn check(verts: &[&[f64]], s: &SampleSet) {
        for p in s.points() {
            let b = barycentric(verts, p).unwrap();
            assert!(b.iter().all(|&l| l >= -1e-12));
        }
        for i in 0..s.len() {
            for j in 0..i {
                assert!(d2(s.point(i), s.point(j)).sqrt() > s.r_min);
            }
        }
    }

    #[test]
    fn one_ball_suffices() {
        let t = tri();
        let s = mps_sample(&refs(&t), 2.0, 1.0, 0);
        assert_eq!(s.len(), 1);
        assert!(covering_gap(&refs(&t), &s, 50) <= 2.0);
    }

    #[test]
    fn fine_radius_covers() {
        let t = tri();
        let r = 0.1;
        let s = mps_sample(&refs(&t), r, r / 2.0, 11);
        check(&refs(&t), &s);
        assert!(s.len() as f64 >= 0.5 / (std::f64::consts::PI * r * r));
        assert!(covering_gap(&refs(&t), &s, 200) <= r);
    }

    #[test]
    fn deterministic() {
        let t = tri();
        let a = mps_sample(&refs(&t), 0.05, 0.025, 5);
        let b = mps_sample(&refs(&t), 0.05, 0.025, 5);
        assert_eq!(a, b);
        let c = mps_sample(&refs(&t), 0.05, 0.025, 6);
        assert_ne!(a, c);
    }

    #[test]
    fn packing_bound() {
        let t = tri();
        let r = 0.03;
        let s = mps_sample(&refs(&t), r, r / 2.0, 2);
        // disks of radius r_min/2 around samples are disjoint and lie in the
        // triangle grown by r_min/2
        let rho = s.r_min / 2.0;
        let grown = 0.5 + (2.0 + 2f64.sqrt()) * rho + std::f64::consts::PI * rho * rho;
        assert!((s.len() as f64) <= grown / (std::f64::consts::PI * rho * rho));
    }

    #[test]
    fn thin_triangle() {
        let t = vec![vec![0., 0.], vec![3., 0.01], vec![1.5, 0.05]];
        let s = mps_sample(&refs(&t), 0.02, 0.01, 8);
        check(&refs(&t), &s);
        assert!(covering_gap(&refs(&t), &s, 600) <= 0.02);
    }

    #[test]
    fn tetrahedron() {
        let t = vec![vec![0., 0., 0.], vec![1., 0., 0.], vec![0., 1., 0.], vec![0., 0., 1.]];
        let s = mps_sample(&refs(&t), 0.3, 0.15, 1);
        check(&refs(&t), &s);
        assert!(s.len() > 1);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]
            #[test]
            fn random_triangles_are_covered(
                a in (0.0..1.0f64, 0.0..1.0f64),
                b in (0.0..1.0f64, 0.0..1.0f64),
                c in (0.0..1.0f64, 0.0..1.0f64),
                r in 0.02..0.3f64,
                seed in 0u64..1000,
            ) {
                let t = vec![vec![a.0, a.1], vec![b.0, b.1], vec![c.0, c.1]];
                let area = ((b.0 - a.0) * (c.1 - a.1) - (c.0 - a.0) * (b.1 - a.1)).abs() / 2.0;
                prop_assume!(area > 1e-3);
                let s = mps_sample(&refs(&t), r, r / 2.0, seed);
                check(&refs(&t), &s);
                prop_assert!(covering_gap(&refs(&t), &s, 120) <= r);
            }
        }
    }
}
