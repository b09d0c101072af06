//! Ruppert's Delaunay refinement on a rectangle.
//!
//! Encroached hull subsegments are split at their midpoints first. Then the
//! skinniest remaining triangle gets its circumcenter inserted, unless that
//! circumcenter would encroach a subsegment, in which case the subsegment is
//! split instead.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::delaunay::Triangulation2D;
use super::metrics::{circumcenter, min_angle_deg};
use super::Point2;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct RefineOptions {
    /// Minimum-angle lower bound in degrees.
    pub alpha_lb: f64,
    /// Insertion cap.
    pub max_insertions: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions {
            alpha_lb: 18.0,
            max_insertions: 1_000_000,
        }
    }
}

#[derive(PartialEq)]
struct Skinny {
    angle: f64,
    tri: usize,
    verts: [usize; 3],
}

impl Eq for Skinny {}

impl PartialOrd for Skinny {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Skinny {
    // Max-heap on skinniness: smaller angle first, then lower triangle id.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .angle
            .total_cmp(&self.angle)
            .then_with(|| other.tri.cmp(&self.tri))
    }
}

fn encroaches(p: &Point2, a: &Point2, b: &Point2) -> bool {
    (p[0] - a[0]) * (p[0] - b[0]) + (p[1] - a[1]) * (p[1] - b[1]) < 0.0
}

struct Refiner<'a> {
    tri: &'a mut Triangulation2D,
    alpha: f64,
    heap: BinaryHeap<Skinny>,
    inserted: usize,
    cap: usize,
}

impl Refiner<'_> {
    fn push_if_skinny(&mut self, t: usize) {
        let [a, b, c] = self.tri.corners_of(t);
        let angle = min_angle_deg(&a, &b, &c);
        if angle <= self.alpha {
            self.heap.push(Skinny {
                angle,
                tri: t,
                verts: self.tri.triangle(t),
            });
        }
    }

    fn insert(&mut self, p: Point2) -> Result<()> {
        if self.inserted >= self.cap {
            return Err(Error::RefinementLimit(self.cap));
        }
        self.tri.insert(p)?;
        self.inserted += 1;
        for t in self.tri.last_created().to_vec() {
            self.push_if_skinny(t);
        }
        Ok(())
    }

    /// Hull subsegments encroached by the apex of their own triangle.
    fn encroached_segments(&self) -> Vec<[usize; 2]> {
        let mut out = Vec::new();
        for t in self.tri.triangle_ids() {
            let v = self.tri.triangle(t);
            for i in 0..3 {
                if self.tri.neighbors(t)[i].is_none() {
                    let (a, b) = (v[(i + 1) % 3], v[(i + 2) % 3]);
                    let pts = self.tri.points();
                    if encroaches(&pts[v[i]], &pts[a], &pts[b]) {
                        out.push([a, b]);
                    }
                }
            }
        }
        out
    }

    fn split(&mut self, seg: [usize; 2]) -> Result<()> {
        let (a, b) = (self.tri.point(seg[0]), self.tri.point(seg[1]));
        let mut m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        // Keep the midpoint exactly on the rectangle side.
        if a[0] == b[0] {
            m[0] = a[0];
        }
        if a[1] == b[1] {
            m[1] = a[1];
        }
        self.insert(m)?;
        self.split_encroached_cascade()
    }

    fn split_encroached_cascade(&mut self) -> Result<()> {
        loop {
            let segs = self.encroached_segments();
            if segs.is_empty() {
                return Ok(());
            }
            for s in segs {
                if self.is_segment(s) {
                    let (a, b) = (self.tri.point(s[0]), self.tri.point(s[1]));
                    let m = [
                        if a[0] == b[0] { a[0] } else { 0.5 * (a[0] + b[0]) },
                        if a[1] == b[1] { a[1] } else { 0.5 * (a[1] + b[1]) },
                    ];
                    self.insert(m)?;
                }
            }
        }
    }

    fn is_segment(&self, s: [usize; 2]) -> bool {
        self.tri.constrained_segments().binary_search(&s).is_ok()
    }

    fn run(&mut self) -> Result<()> {
        self.split_encroached_cascade()?;
        for t in self.tri.triangle_ids().collect::<Vec<_>>() {
            self.push_if_skinny(t);
        }
        while let Some(sk) = self.heap.pop() {
            if !self.tri.is_alive(sk.tri) || self.tri.triangle(sk.tri) != sk.verts {
                continue;
            }
            let [a, b, c] = self.tri.corners_of(sk.tri);
            let cc = circumcenter(&a, &b, &c);
            let segs = self.tri.constrained_segments();
            let pts = self.tri.points();
            let hit: Vec<[usize; 2]> = segs
                .iter()
                .copied()
                .filter(|s| encroaches(&cc, &pts[s[0]], &pts[s[1]]))
                .collect();
            let target = if hit.is_empty() && !self.tri.domain().contains(&cc) {
                // Only reachable through rounding: split the nearest subsegment.
                segs.iter()
                    .copied()
                    .min_by(|s, t| {
                        seg_dist2(&cc, &pts[s[0]], &pts[s[1]])
                            .total_cmp(&seg_dist2(&cc, &pts[t[0]], &pts[t[1]]))
                    })
                    .map(|s| vec![s])
                    .unwrap_or_default()
            } else {
                hit
            };
            if target.is_empty() {
                self.insert(cc)?;
            } else {
                for s in target {
                    if self.is_segment(s) {
                        self.split(s)?;
                    }
                }
                if self.tri.is_alive(sk.tri) && self.tri.triangle(sk.tri) == sk.verts {
                    self.heap.push(sk);
                }
            }
        }
        Ok(())
    }
}

fn seg_dist2(p: &Point2, a: &Point2, b: &Point2) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    (p[0] - a[0] - t * d[0]).powi(2) + (p[1] - a[1] - t * d[1]).powi(2)
}

/// Refines `tri` in place until every angle exceeds `opts.alpha_lb`.
/// Returns the number of inserted vertices.
pub fn refine_in_place(tri: &mut Triangulation2D, opts: RefineOptions) -> Result<usize> {
    if !(opts.alpha_lb > 0.0 && opts.alpha_lb < 20.0) {
        return Err(Error::Config(format!(
            "alpha_lb must lie in (0, 20) degrees, got {}",
            opts.alpha_lb
        )));
    }
    let mut r = Refiner {
        tri,
        alpha: opts.alpha_lb,
        heap: BinaryHeap::new(),
        inserted: 0,
        cap: opts.max_insertions,
    };
    r.run()?;
    Ok(r.inserted)
}

/// Refined copy of `tri` with every triangle angle above `alpha_lb` degrees.
pub fn refine_ruppert(tri: &Triangulation2D, alpha_lb: f64) -> Result<Triangulation2D> {
    let mut out = tri.clone();
    refine_in_place(
        &mut out,
        RefineOptions {
            alpha_lb,
            ..RefineOptions::default()
        },
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{delaunay, Rect};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn min_angle(t: &Triangulation2D) -> f64 {
        t.triangle_ids()
            .map(|id| {
                let [a, b, c] = t.corners_of(id);
                min_angle_deg(&a, &b, &c)
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn fine_mesh_is_unchanged() {
        let mut p = vec![[0., 0.], [1., 0.], [1., 1.], [0., 1.]];
        p.push([0.5, 0.5]);
        let t = delaunay(&p).unwrap();
        let r = refine_ruppert(&t, 15.0).unwrap();
        assert_eq!(r, t);
    }

    #[test]
    fn long_rectangle() {
        let t = Triangulation2D::from_rect(Rect::new(0.0, 10.0, 0.0, 1.0)).unwrap();
        let r = refine_ruppert(&t, 15.0).unwrap();
        assert!(min_angle(&r) > 15.0);
        assert!(r.is_delaunay());
        assert!((r.total_area() - 10.0).abs() < 1e-9 * 10.0);
        for v in 0..4 {
            assert_eq!(r.point(v), t.point(v));
        }
    }

    #[test]
    fn random_mesh_alpha_18() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut p = vec![[0., 0.], [1., 0.], [1., 1.], [0., 1.]];
        p.extend((0..20).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]));
        let t = delaunay(&p).unwrap();
        let r = refine_ruppert(&t, 18.0).unwrap();
        assert!(min_angle(&r) > 18.0);
        assert!(r.is_delaunay());
        assert!((r.total_area() - 1.0).abs() < 1e-9);
        assert_eq!(&r.points()[..24], &p[..]);
    }

    #[test]
    fn rejects_bad_alpha() {
        let t = Triangulation2D::from_rect(Rect::unit()).unwrap();
        assert!(refine_ruppert(&t, 25.0).is_err());
    }

    #[test]
    fn insertion_cap() {
        let t = Triangulation2D::from_rect(Rect::new(0.0, 100.0, 0.0, 1.0)).unwrap();
        let mut r = t.clone();
        let err = refine_in_place(
            &mut r,
            RefineOptions {
                alpha_lb: 19.0,
                max_insertions: 5,
            },
        );
        assert!(matches!(err, Err(Error::RefinementLimit(5))));
    }
}
