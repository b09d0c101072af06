//! Incremental Bowyer-Watson triangulation of a rectangle.
//!
//! The triangulation starts from the two triangles spanned by the rectangle
//! corners. Every later point is located by a straight walk and inserted by
//! re-triangulating its cavity (all triangles whose circumcircle strictly
//! contains it). Hull edges double as the constrained segments used by
//! refinement.

use super::predicates::{incircle, orientation, Sign};
use super::{dist2, signed_area, Point2, Rect};
use crate::error::{Error, Result};

pub(crate) const NONE: usize = usize::MAX;

/// Duplicate-point tolerance relative to the domain diagonal.
pub const MERGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
struct Tri {
    /// Counterclockwise vertex ids.
    v: [usize; 3],
    /// `n[i]` is the neighbor across the edge opposite `v[i]`.
    n: [usize; 3],
    alive: bool,
}

/// Delaunay triangulation of a rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation2D {
    points: Vec<Point2>,
    tris: Vec<Tri>,
    free: Vec<usize>,
    domain: Rect,
    last: usize,
    /// Triangles created by the most recent insertion.
    created: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
}

impl Triangulation2D {
    /// Two-triangle triangulation of `domain`; the corners get ids 0..4
    /// counterclockwise from the lower-left.
    pub fn from_rect(domain: Rect) -> Result<Self> {
        if !(domain.x_max > domain.x_min && domain.y_max > domain.y_min) {
            return Err(Error::DegenerateInput(format!("empty rectangle {domain:?}")));
        }
        let points = domain.corners().to_vec();
        Ok(Self::with_corners(points, domain, [0, 1, 2, 3]))
    }

    fn with_corners(points: Vec<Point2>, domain: Rect, c: [usize; 4]) -> Self {
        // Cocircular tie: the diagonal through the lowest-index corner wins.
        let lowest = (0..4).min_by_key(|&i| c[i]).unwrap();
        let (p, q, r, s) = (c[lowest], c[(lowest + 1) % 4], c[(lowest + 2) % 4], c[(lowest + 3) % 4]);
        let tris = vec![
            Tri {
                v: [p, q, r],
                n: [NONE, 1, NONE],
                alive: true,
            },
            Tri {
                v: [p, r, s],
                n: [NONE, NONE, 0],
                alive: true,
            },
        ];
        Triangulation2D {
            points,
            tris,
            free: Vec::new(),
            domain,
            last: 0,
            created: Vec::new(),
            stamp: vec![0; 2],
            epoch: 0,
        }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn point(&self, v: usize) -> Point2 {
        self.points[v]
    }

    pub fn domain(&self) -> Rect {
        self.domain
    }

    /// Ids of live triangles in increasing order.
    pub fn triangle_ids(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.tris.len()).filter(|&t| self.tris[t].alive)
    }

    pub fn num_triangles(&self) -> usize {
        self.tris.len() - self.free.len()
    }

    /// Counterclockwise vertex ids of triangle `t`.
    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.tris[t].v
    }

    pub fn is_alive(&self, t: usize) -> bool {
        t < self.tris.len() && self.tris[t].alive
    }

    /// Neighbors of `t`; entry `i` lies across the edge opposite vertex `i`.
    pub fn neighbors(&self, t: usize) -> [Option<usize>; 3] {
        self.tris[t].n.map(|n| (n != NONE).then_some(n))
    }

    pub fn corners_of(&self, t: usize) -> [Point2; 3] {
        self.tris[t].v.map(|v| self.points[v])
    }

    /// Live triangles as sorted vertex triples.
    pub fn simplices(&self) -> Vec<[usize; 3]> {
        self.triangle_ids()
            .map(|t| {
                let mut v = self.tris[t].v;
                v.sort_unstable();
                v
            })
            .collect()
    }

    /// Hull edges, oriented counterclockwise around the domain.
    pub fn constrained_segments(&self) -> Vec<[usize; 2]> {
        let mut out = Vec::new();
        for t in self.triangle_ids() {
            let tri = &self.tris[t];
            for i in 0..3 {
                if tri.n[i] == NONE {
                    out.push([tri.v[(i + 1) % 3], tri.v[(i + 2) % 3]]);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Triangles created by the latest [`insert`](Self::insert).
    pub fn last_created(&self) -> &[usize] {
        &self.created
    }

    fn contains(&self, t: usize, p: &Point2) -> bool {
        let [a, b, c] = self.corners_of(t);
        orientation(&a, &b, p) != Sign::Negative
            && orientation(&b, &c, p) != Sign::Negative
            && orientation(&c, &a, p) != Sign::Negative
    }

    /// Triangle containing `p` (boundary included), or `None` outside the domain.
    pub fn locate(&self, p: &Point2) -> Option<usize> {
        let mut t = if self.is_alive(self.last) {
            self.last
        } else {
            self.triangle_ids().next()?
        };
        let limit = 4 * self.tris.len() + 16;
        'walk: for _ in 0..limit {
            let tri = &self.tris[t];
            for i in 0..3 {
                let a = self.points[tri.v[(i + 1) % 3]];
                let b = self.points[tri.v[(i + 2) % 3]];
                if orientation(&a, &b, p) == Sign::Negative {
                    if tri.n[i] == NONE {
                        break 'walk;
                    }
                    t = tri.n[i];
                    continue 'walk;
                }
            }
            return Some(t);
        }
        // The walk can cycle on degenerate configurations; fall back to a scan.
        self.triangle_ids().find(|&t| self.contains(t, p))
    }

    fn alloc(&mut self, tri: Tri) -> usize {
        if let Some(t) = self.free.pop() {
            self.tris[t] = tri;
            t
        } else {
            self.tris.push(tri);
            self.stamp.push(0);
            self.tris.len() - 1
        }
    }

    /// Inserts `p` and returns its vertex id.
    pub fn insert(&mut self, p: Point2) -> Result<usize> {
        if !(p[0].is_finite() && p[1].is_finite()) {
            return Err(Error::DegenerateInput(format!("non-finite point {p:?}")));
        }
        let start = self.locate(&p).ok_or_else(|| {
            Error::DegenerateInput(format!("point {p:?} lies outside the domain {:?}", self.domain))
        })?;
        let tol2 = (MERGE_TOL * self.domain.diagonal()).powi(2);
        let new_id = self.points.len();

        self.epoch += 1;
        let epoch = self.epoch;
        let mut cavity = vec![start];
        self.stamp[start] = epoch;
        let mut k = 0;
        while k < cavity.len() {
            let t = cavity[k];
            k += 1;
            for i in 0..3 {
                let n = self.tris[t].n[i];
                if n == NONE || self.stamp[n] == epoch {
                    continue;
                }
                let [a, b, c] = self.corners_of(n);
                if incircle(&a, &b, &c, &p) == Sign::Positive {
                    self.stamp[n] = epoch;
                    cavity.push(n);
                }
            }
        }

        // Boundary of the cavity as (a, b, outside neighbor), counterclockwise.
        let mut boundary = Vec::with_capacity(cavity.len() + 2);
        for &t in &cavity {
            let tri = &self.tris[t];
            for &v in &tri.v {
                if dist2(&self.points[v], &p) <= tol2 {
                    return Err(Error::DuplicatePoint(v, new_id));
                }
            }
            for i in 0..3 {
                let n = tri.n[i];
                if n != NONE && self.stamp[n] == epoch {
                    continue;
                }
                let a = tri.v[(i + 1) % 3];
                let b = tri.v[(i + 2) % 3];
                if n == NONE && orientation(&self.points[a], &self.points[b], &p) == Sign::Zero {
                    // `p` splits this hull edge; no triangle is built on it.
                    continue;
                }
                boundary.push((a, b, n));
            }
        }

        self.points.push(p);
        for &t in &cavity {
            self.tris[t].alive = false;
            self.free.push(t);
        }
        self.created.clear();
        for &(a, b, n) in &boundary {
            let t = self.alloc(Tri {
                v: [a, b, new_id],
                n: [NONE, NONE, n],
                alive: true,
            });
            if n != NONE {
                let nt = &mut self.tris[n];
                for j in 0..3 {
                    if nt.v[(j + 1) % 3] == b && nt.v[(j + 2) % 3] == a {
                        nt.n[j] = t;
                    }
                }
            }
            self.created.push(t);
        }
        // Triangle (a, b, p) meets (b, c, p) across edge (b, p).
        for i in 0..self.created.len() {
            let t = self.created[i];
            let [a, b, _] = self.tris[t].v;
            for j in 0..self.created.len() {
                let s = self.created[j];
                let [sa, sb, _] = self.tris[s].v;
                if sa == b {
                    self.tris[t].n[0] = s;
                }
                if sb == a {
                    self.tris[t].n[1] = s;
                }
            }
        }
        self.last = *self.created.first().unwrap_or(&0);
        Ok(new_id)
    }

    /// Sum of triangle areas.
    pub fn total_area(&self) -> f64 {
        self.triangle_ids()
            .map(|t| {
                let [a, b, c] = self.corners_of(t);
                signed_area(&a, &b, &c)
            })
            .sum()
    }

    /// Brute-force empty-circumcircle check over all (triangle, vertex) pairs.
    pub fn is_delaunay(&self) -> bool {
        self.triangle_ids().all(|t| {
            let [a, b, c] = self.corners_of(t);
            self.points
                .iter()
                .all(|p| incircle(&a, &b, &c, p) != Sign::Positive)
        })
    }
}

/// Delaunay triangulation of `points`, whose bounding box corners must be
/// among them. Vertex ids follow the input order.
pub fn delaunay(points: &[Point2]) -> Result<Triangulation2D> {
    if points.len() < 3 {
        return Err(Error::DegenerateInput(format!("{} points", points.len())));
    }
    if let Some(p) = points.iter().find(|p| !(p[0].is_finite() && p[1].is_finite())) {
        return Err(Error::DegenerateInput(format!("non-finite point {p:?}")));
    }
    let domain = Rect::bounding(points).unwrap();
    if !(domain.x_max > domain.x_min && domain.y_max > domain.y_min) {
        return Err(Error::DegenerateInput("all points are collinear".into()));
    }
    let tol2 = (MERGE_TOL * domain.diagonal()).powi(2);
    let mut corner = [NONE; 4];
    for (k, c) in domain.corners().iter().enumerate() {
        for (i, p) in points.iter().enumerate() {
            if dist2(p, c) <= tol2 {
                if corner[k] != NONE {
                    return Err(Error::DuplicatePoint(corner[k], i));
                }
                corner[k] = i;
            }
        }
        if corner[k] == NONE {
            return Err(Error::DegenerateInput(format!(
                "bounding-box corner {c:?} is not among the input points"
            )));
        }
    }
    // Insert with the final ids: corners take their input slots, the others
    // are appended in order and relabelled afterwards.
    let mut tri = Triangulation2D::with_corners(domain.corners().to_vec(), domain, [0, 1, 2, 3]);
    let mut order = vec![NONE; points.len()];
    for (k, &i) in corner.iter().enumerate() {
        order[i] = k;
    }
    for (i, p) in points.iter().enumerate() {
        if order[i] == NONE {
            order[i] = match tri.insert(*p) {
                Ok(id) => id,
                Err(Error::DuplicatePoint(a, _)) => {
                    let orig = order.iter().position(|&o| o == a).unwrap();
                    return Err(Error::DuplicatePoint(orig, i));
                }
                Err(e) => return Err(e),
            };
        }
    }
    // internal id -> input index
    let mut inv = vec![0; points.len()];
    for (i, &o) in order.iter().enumerate() {
        inv[o] = i;
    }
    let mut relabelled = Triangulation2D::with_corners(points.to_vec(), domain, corner);
    relabelled.tris = tri
        .tris
        .iter()
        .map(|t| Tri {
            v: t.v.map(|v| inv[v]),
            n: t.n,
            alive: t.alive,
        })
        .collect();
    relabelled.free = tri.free;
    relabelled.stamp = tri.stamp;
    relabelled.last = tri.last;
    relabelled.epoch = tri.epoch;
    Ok(relabelled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_corners() -> Vec<Point2> {
        vec![[0., 0.], [1., 0.], [1., 1.], [0., 1.]]
    }

    fn check(t: &Triangulation2D) {
        assert!(t.is_delaunay());
        assert!((t.total_area() - t.domain().area()).abs() <= 1e-9 * t.domain().area());
        for id in t.triangle_ids() {
            let [a, b, c] = t.corners_of(id);
            assert_eq!(orientation(&a, &b, &c), Sign::Positive);
            for (i, n) in t.neighbors(id).iter().enumerate() {
                if let Some(n) = n {
                    assert!(t.neighbors(*n).contains(&Some(id)));
                    let e = [t.triangle(id)[(i + 1) % 3], t.triangle(id)[(i + 2) % 3]];
                    assert!(t.triangle(*n).contains(&e[0]) && t.triangle(*n).contains(&e[1]));
                }
            }
        }
    }

    #[test]
    fn rectangle_corners_give_two_triangles() {
        let t = delaunay(&unit_corners()).unwrap();
        assert_eq!(t.num_triangles(), 2);
        assert_eq!(t.constrained_segments().len(), 4);
        check(&t);
    }

    #[test]
    fn center_point_gives_fan() {
        let mut p = unit_corners();
        p.push([0.5, 0.5]);
        let t = delaunay(&p).unwrap();
        assert_eq!(t.num_triangles(), 4);
        assert!(t.simplices().iter().all(|s| s.contains(&4)));
        check(&t);
    }

    #[test]
    fn random_points_are_delaunay() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut p = unit_corners();
        p.extend((0..30).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]));
        let t = delaunay(&p).unwrap();
        check(&t);
        assert_eq!(t.points().len(), 34);
        // Euler: 2n - 2 - h triangles with h hull vertices.
        assert_eq!(t.num_triangles(), 2 * 34 - 2 - 4);
    }

    #[test]
    fn boundary_points_split_hull_edges() {
        let mut p = unit_corners();
        p.extend([[0.5, 0.0], [1.0, 0.25], [0.0, 0.75], [0.3, 1.0], [0.5, 0.5]]);
        let t = delaunay(&p).unwrap();
        check(&t);
        assert_eq!(t.constrained_segments().len(), 8);
    }

    #[test]
    fn grid_with_cocircular_points() {
        let mut p = unit_corners();
        for i in 0..=6 {
            for j in 0..=6 {
                let q = [i as f64 / 6.0, j as f64 / 6.0];
                if !p.contains(&q) {
                    p.push(q);
                }
            }
        }
        let t = delaunay(&p).unwrap();
        check(&t);
        assert_eq!(t.num_triangles(), 72);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            delaunay(&[[0., 0.], [1., 1.], [2., 2.]]),
            Err(Error::DegenerateInput(_))
        ));
        let mut p = unit_corners();
        p.push([0.25, 0.25]);
        p.push([0.25, 0.25 + 1e-14]);
        assert!(matches!(delaunay(&p), Err(Error::DuplicatePoint(4, 5))));
    }

    #[test]
    fn locate_outside_is_none() {
        let t = delaunay(&unit_corners()).unwrap();
        assert!(t.locate(&[2.0, 0.5]).is_none());
        assert!(t.locate(&[0.3, 0.6]).is_some());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]
            #[test]
            fn random_sets_stay_delaunay(pts in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 0..60)) {
                let mut p = unit_corners();
                for (x, y) in pts {
                    if p.iter().all(|q| dist2(q, &[x, y]) > 1e-20) {
                        p.push([x, y]);
                    }
                }
                let t = delaunay(&p).unwrap();
                prop_assert!(t.is_delaunay());
                prop_assert!((t.total_area() - 1.0).abs() < 1e-9);
            }
        }
    }
}
