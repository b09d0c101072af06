//! Mesh generators for experiments and tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SimplicialPartition;
use crate::geometry::{delaunay, Point2, Rect};

/// How each grid cell is cut into two triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagRule {
    /// Always the diagonal from lower-left to upper-right.
    Fixed,
    /// A fair coin per cell.
    Random,
}

/// `nx x ny` grid over `domain`, each cell cut along one diagonal.
/// Vertex `(i, j)` has id `j * (nx + 1) + i`; values are zero.
pub fn grid_triangulation(
    nx: usize,
    ny: usize,
    domain: Rect,
    rule: DiagRule,
    seed: u64,
) -> SimplicialPartition {
    assert!(nx >= 1 && ny >= 1, "grid needs at least one cell per axis");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            let x = domain.x_min + (domain.x_max - domain.x_min) * i as f64 / nx as f64;
            let y = domain.y_min + (domain.y_max - domain.y_min) * j as f64 / ny as f64;
            points.push(vec![x, y]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut simplices = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            let rising = match rule {
                DiagRule::Fixed => true,
                DiagRule::Random => rng.gen_bool(0.5),
            };
            if rising {
                simplices.push(sorted(vec![a, b, c]));
                simplices.push(sorted(vec![a, c, d]));
            } else {
                simplices.push(sorted(vec![a, b, d]));
                simplices.push(sorted(vec![b, c, d]));
            }
        }
    }
    let n = points.len();
    SimplicialPartition {
        dim: 2,
        points,
        values: vec![0.0; n],
        simplices,
        provenance: format!("grid {nx}x{ny}"),
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

/// Delaunay mesh of the unit square on its corners, `n_boundary` uniform
/// points on the perimeter and `n_interior` uniform interior points.
pub fn random_delaunay(n_interior: usize, n_boundary: usize, seed: u64) -> SimplicialPartition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<Point2> = Rect::unit().corners().to_vec();
    let fresh = |pts: &[Point2], p: &Point2| {
        pts.iter()
            .all(|q| (q[0] - p[0]).abs() + (q[1] - p[1]).abs() > 1e-3)
    };
    while pts.len() < 4 + n_boundary {
        let s: f64 = rng.gen_range(0.0..4.0);
        let t = s.fract();
        let p = match s as usize {
            0 => [t, 0.0],
            1 => [1.0, t],
            2 => [1.0 - t, 1.0],
            _ => [0.0, 1.0 - t],
        };
        if fresh(&pts, &p) {
            pts.push(p);
        }
    }
    while pts.len() < 4 + n_boundary + n_interior {
        let p = [rng.gen_range(0.02..0.98), rng.gen_range(0.02..0.98)];
        if fresh(&pts, &p) {
            pts.push(p);
        }
    }
    let tri = delaunay(&pts).expect("generated points are distinct and include the corners");
    let mut p = SimplicialPartition::from_triangulation(&tri, vec![0.0; pts.len()]);
    p.provenance = format!("random delaunay n={} seed={seed}", pts.len());
    p
}

/// Unit cube `[0,1]^d` cut into simplices: five tetrahedra for d = 3, the
/// Kuhn triangulation (d! simplices) otherwise. Vertex ids are bitmasks.
pub fn cube_partition(d: usize) -> SimplicialPartition {
    assert!(d >= 1);
    let points: Vec<Vec<f64>> = (0..1usize << d)
        .map(|m| (0..d).map(|k| ((m >> k) & 1) as f64).collect())
        .collect();
    let simplices = if d == 3 {
        vec![
            vec![0, 1, 2, 4],
            vec![1, 2, 3, 7],
            vec![1, 4, 5, 7],
            vec![2, 4, 6, 7],
            vec![1, 2, 4, 7],
        ]
    } else {
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..d).collect();
        permutations(&mut perm, 0, &mut |p| {
            let mut m = 0usize;
            let mut s = vec![0];
            for &k in p {
                m |= 1 << k;
                s.push(m);
            }
            out.push(sorted(s));
        });
        out.sort();
        out
    };
    let n = points.len();
    SimplicialPartition {
        dim: d,
        points,
        values: vec![0.0; n],
        simplices,
        provenance: format!("unit cube d={d}"),
    }
}

fn permutations(p: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permutations(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Random partition of `[0,1]^d` with `n_vertices` vertices, grown from
/// [`cube_partition`] by random edge bisections and stellar subdivisions.
pub fn random_partition(d: usize, n_vertices: usize, seed: u64) -> SimplicialPartition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = cube_partition(d);
    while p.num_vertices() < n_vertices {
        let s = rng.gen_range(0..p.num_simplices());
        if rng.gen_bool(0.5) {
            let mut ids = p.simplices[s].clone();
            ids.shuffle(&mut rng);
            p.split_edge(ids[0], ids[1], 0.0).expect("vertices of one simplex span an edge");
        } else {
            p.stellar_subdivide(s, 0.0);
        }
    }
    p.provenance = format!("random partition d={d} n={n_vertices} seed={seed}");
    p
}

/// The four-triangle example with a rank-3 conflict. Ids: u = 0, v1 = 1,
/// v2 = 2, v3 = 3, w = 4; simplices S1..S4 in order.
pub fn b3_example() -> SimplicialPartition {
    SimplicialPartition {
        dim: 2,
        points: vec![
            vec![1.3, 1.3],
            vec![1.0, 3.0],
            vec![3.0, 1.0],
            vec![0.0, 0.0],
            vec![3.3, 3.3],
        ],
        values: vec![0.0; 5],
        simplices: vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 4]],
        provenance: "four-triangle example".into(),
    }
}
