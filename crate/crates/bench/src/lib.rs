//! Benchmark fixtures.

use pwlmilp::mesh::{grid_triangulation, random_delaunay, DiagRule};
use pwlmilp::sths::Hpf;
use pwlmilp::SimplicialPartition;

/// Random planar Delaunay mesh with `n` interior points.
pub fn planar(n: usize) -> SimplicialPartition {
    random_delaunay(n, 4, 7)
}

/// Power function sampled on a `k x k` grid.
pub fn hpf_grid(k: usize) -> SimplicialPartition {
    let h = Hpf::default();
    let mut p = grid_triangulation(k, k, h.domain(), DiagRule::Fixed, 0);
    p.values = p.points.iter().map(|x| h.eval(x[0], x[1])).collect();
    p
}
