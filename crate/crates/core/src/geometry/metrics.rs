//! Shape measures of d-simplices.

use nalgebra::{DMatrix, DVector};

use super::Point2;
use crate::error::{Error, Result};

/// Shape measures entering the interpolant gradient bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexMetrics {
    /// Longest edge length.
    pub ell_max: f64,
    /// Shortest distance between two disjoint faces.
    pub delta_min: f64,
    /// Smallest interior angle in degrees (triangles only).
    pub alpha_min: Option<f64>,
    /// d-dimensional volume.
    pub volume: f64,
}

/// Relative volume below which a simplex counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Unsigned volume of the simplex spanned by `verts` (d+1 points in R^d).
pub fn simplex_volume(verts: &[&[f64]]) -> f64 {
    let d = verts.len() - 1;
    if d == 0 {
        return 1.0;
    }
    let m = DMatrix::from_fn(d, d, |r, c| verts[c + 1][r] - verts[0][r]);
    m.determinant().abs() / factorial(d)
}

/// Barycentric coordinates of `x` with respect to `verts`, or `None` when
/// the simplex is degenerate.
pub fn barycentric(verts: &[&[f64]], x: &[f64]) -> Option<Vec<f64>> {
    let d = verts.len() - 1;
    let m = DMatrix::from_fn(d, d, |r, c| verts[c + 1][r] - verts[0][r]);
    let rhs = DVector::from_fn(d, |r, _| x[r] - verts[0][r]);
    let sol = m.lu().solve(&rhs)?;
    let mut out = Vec::with_capacity(d + 1);
    out.push(1.0 - sol.iter().sum::<f64>());
    out.extend(sol.iter().copied());
    Some(out)
}

/// Smallest interior angle of triangle `abc`, in degrees.
pub fn min_angle_deg(a: &Point2, b: &Point2, c: &Point2) -> f64 {
    let angle = |p: &Point2, q: &Point2, r: &Point2| {
        let u = [q[0] - p[0], q[1] - p[1]];
        let v = [r[0] - p[0], r[1] - p[1]];
        let cross = u[0] * v[1] - u[1] * v[0];
        let dot = u[0] * v[0] + u[1] * v[1];
        cross.abs().atan2(dot)
    };
    let m = angle(a, b, c).min(angle(b, c, a)).min(angle(c, a, b));
    m.to_degrees()
}

/// Circumcenter of a non-degenerate triangle.
pub fn circumcenter(a: &Point2, b: &Point2, c: &Point2) -> Point2 {
    let (bx, by) = (b[0] - a[0], b[1] - a[1]);
    let (cx, cy) = (c[0] - a[0], c[1] - a[1]);
    let d = 2.0 * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    [
        a[0] + (cy * b2 - by * c2) / d,
        a[1] + (bx * c2 - cx * b2) / d,
    ]
}

/// Distance from the origin to the convex hull of `pts`.
///
/// The minimum-norm point of a polytope is the projection of the origin onto
/// the affine hull of one of its faces with strictly positive affine weights;
/// the candidate sets are few for the small point sets arising here, so all
/// are enumerated.
fn hull_distance_to_origin(pts: &[Vec<f64>]) -> f64 {
    let n = pts.len();
    let dim = pts[0].len();
    let mut best = f64::INFINITY;
    for mask in 1u32..(1u32 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if idx.len() > dim + 1 {
            continue;
        }
        let k = idx.len();
        if k == 1 {
            let p = &pts[idx[0]];
            best = best.min(p.iter().map(|x| x * x).sum::<f64>().sqrt());
            continue;
        }
        // Minimize |p0 + sum_j t_j (p_j - p0)|: normal equations G t = -A^T p0.
        let p0 = &pts[idx[0]];
        let a = DMatrix::from_fn(dim, k - 1, |r, c| pts[idx[c + 1]][r] - p0[r]);
        let g = a.transpose() * &a;
        let rhs = -(a.transpose() * DVector::from_column_slice(p0));
        let Some(t) = g.lu().solve(&rhs) else { continue };
        let w0 = 1.0 - t.iter().sum::<f64>();
        if w0 <= 0.0 || t.iter().any(|&x| x <= 0.0) {
            continue;
        }
        let q = DVector::from_column_slice(p0) + &a * &t;
        best = best.min(q.norm());
    }
    best
}

/// Shortest distance between two disjoint faces of a simplex.
///
/// The minimum is attained by a pair of complementary faces, so it suffices to
/// scan the bipartitions of the vertex set.
pub fn min_face_distance(verts: &[&[f64]]) -> f64 {
    let n = verts.len();
    let mut best = f64::INFINITY;
    // Each bipartition once: vertex 0 always on the first side.
    for mask in 0u32..(1u32 << (n - 1)) {
        let first: Vec<usize> = std::iter::once(0)
            .chain((1..n).filter(|i| mask & (1 << (i - 1)) != 0))
            .collect();
        let second: Vec<usize> = (1..n).filter(|i| mask & (1 << (i - 1)) == 0).collect();
        if second.is_empty() {
            continue;
        }
        let diffs: Vec<Vec<f64>> = first
            .iter()
            .flat_map(|&i| {
                second.iter().map(move |&j| {
                    verts[i]
                        .iter()
                        .zip(verts[j])
                        .map(|(a, b)| a - b)
                        .collect::<Vec<f64>>()
                })
            })
            .collect();
        best = best.min(hull_distance_to_origin(&diffs));
    }
    best
}

/// Computes [`SimplexMetrics`] for the simplex spanned by `verts`.
pub fn simplex_metrics(verts: &[&[f64]]) -> Result<SimplexMetrics> {
    let n = verts.len();
    if n < 2 {
        return Err(Error::Degenerate("a simplex needs at least two vertices".into()));
    }
    let d = n - 1;
    if verts.iter().any(|v| v.len() != d) {
        return Err(Error::Degenerate(format!(
            "{n} vertices do not span a simplex in R^{}",
            verts[0].len()
        )));
    }
    let mut ell_max: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            ell_max = ell_max.max(dist(verts[i], verts[j]));
        }
    }
    let volume = simplex_volume(verts);
    if !(volume > DEGENERACY_TOL * ell_max.powi(d as i32)) {
        return Err(Error::Degenerate(format!("volume {volume:e} below tolerance")));
    }
    let delta_min = min_face_distance(verts);
    let alpha_min = (d == 2).then(|| {
        min_angle_deg(
            &[verts[0][0], verts[0][1]],
            &[verts[1][0], verts[1][1]],
            &[verts[2][0], verts[2][1]],
        )
    });
    Ok(SimplexMetrics {
        ell_max,
        delta_min,
        alpha_min,
        volume,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(pts: &[[f64; 2]]) -> SimplexMetrics {
        let v: Vec<&[f64]> = pts.iter().map(|p| &p[..]).collect();
        simplex_metrics(&v).unwrap()
    }

    #[test]
    fn right_triangle() {
        let s = m(&[[0., 0.], [1., 0.], [0., 1.]]);
        assert!((s.ell_max - 2f64.sqrt()).abs() < 1e-12);
        assert!((s.delta_min - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((s.alpha_min.unwrap() - 45.0).abs() < 1e-9);
        assert!((s.volume - 0.5).abs() < 1e-12);
    }

    #[test]
    fn equilateral_triangle() {
        let s = m(&[[0., 0.], [1., 0.], [0.5, 3f64.sqrt() / 2.0]]);
        assert!((s.ell_max - 1.0).abs() < 1e-12);
        assert!((s.delta_min - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((s.alpha_min.unwrap() - 60.0).abs() < 1e-9);
    }

    #[test]
    fn degenerate_is_rejected() {
        let v: Vec<&[f64]> = vec![&[0., 0.], &[1., 1.], &[2., 2.]];
        assert!(matches!(simplex_metrics(&v), Err(Error::Degenerate(_))));
    }

    #[test]
    fn delta_min_matches_min_altitude_on_random_triangles() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let p: Vec<[f64; 2]> = (0..3).map(|_| [rng.gen(), rng.gen()]).collect();
            let area = 0.5
                * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                    - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]))
                    .abs();
            if area < 1e-4 {
                continue;
            }
            // Oracle: altitude from each vertex onto the line through the other two.
            let altitude = |i: usize| {
                let (a, b) = (p[(i + 1) % 3], p[(i + 2) % 3]);
                2.0 * area / ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
            };
            let oracle = altitude(0).min(altitude(1)).min(altitude(2));
            let s = m(&p);
            assert!((s.delta_min - oracle).abs() < 1e-9 * oracle.max(1.0));
        }
    }

    #[test]
    fn tetrahedron_face_distance() {
        // Regular tetrahedron with unit edges: opposite edges are 1/sqrt(2) apart,
        // altitudes are sqrt(2/3); the former is smaller.
        let v: Vec<Vec<f64>> = vec![
            vec![1., 1., 1.],
            vec![1., -1., -1.],
            vec![-1., 1., -1.],
            vec![-1., -1., 1.],
        ];
        let s = 1.0 / 8f64.sqrt();
        let v: Vec<Vec<f64>> = v.into_iter().map(|p| p.iter().map(|x| x * s).collect()).collect();
        let r: Vec<&[f64]> = v.iter().map(|p| &p[..]).collect();
        let met = simplex_metrics(&r).unwrap();
        assert!((met.ell_max - 1.0).abs() < 1e-12);
        assert!((met.delta_min - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        assert!((met.volume - 1.0 / (6.0 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn barycentric_roundtrip() {
        let v: Vec<&[f64]> = vec![&[0., 0.], &[2., 0.], &[0., 1.]];
        let b = barycentric(&v, &[0.5, 0.25]).unwrap();
        assert!((b[0] - 0.5).abs() < 1e-12 && (b[1] - 0.25).abs() < 1e-12 && (b[2] - 0.25).abs() < 1e-12);
    }
}
