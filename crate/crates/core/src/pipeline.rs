//! Mesh to formulation: conflicts, optional rank reduction, blocking and
//! coloring when the rank exceeds 2, biclique cover, disjunction spec.

use serde::{Deserialize, Serialize};

use crate::biclique::{cover_bicliques, BicliqueCover, CoverStrategy, ExactOptions, Graph};
use crate::blocking::{build_blocking_hypergraph, color_blocking, BlockingHypergraph, Coloring};
use crate::conflict::{build_conflict_hypergraph, reduce_rank, ConflictHypergraph, ReduceOptions, SplitRecord, ValueRule, DEFAULT_BUDGET};
use crate::error::Result;
use crate::milp::DisjunctionSpec;
use crate::mesh::SimplicialPartition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverMethod {
    Exact,
    /// Line cuts for the first `k` rounds (planar meshes only).
    Geom { k: usize, n_lines: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct PipelineOptions {
    pub reduce: bool,
    pub max_splits: usize,
    pub budget: u128,
    pub cover: CoverMethod,
    pub node_limit: u64,
    pub seed: u64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            reduce: true,
            max_splits: ReduceOptions::default().max_splits,
            budget: DEFAULT_BUDGET,
            cover: CoverMethod::Exact,
            node_limit: ExactOptions::default().node_limit,
            seed: 0,
        }
    }
}

/// The statistics written to `analysis.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub num_vertices: usize,
    pub num_simplices: usize,
    pub rank: usize,
    /// Conflicts of size 2.
    pub nu: usize,
    /// Conflicts of size 3 or more.
    pub mu: usize,
    /// Minimal blocking sets.
    pub beta: usize,
    /// Colors.
    pub q: usize,
    pub cover_size: usize,
    pub cover_proven: bool,
    pub splits: usize,
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    /// The input mesh, refined by any splits.
    pub mesh: SimplicialPartition,
    pub conflicts: ConflictHypergraph,
    pub splits: Vec<SplitRecord>,
    pub blocking: Option<BlockingHypergraph>,
    pub coloring: Option<Coloring>,
    pub cover: BicliqueCover,
    pub spec: DisjunctionSpec,
    pub analysis: Analysis,
}

pub fn analyze(p: &SimplicialPartition, budget: u128) -> Result<ConflictHypergraph> {
    build_conflict_hypergraph(&p.to_set_system(), p.dim + 1, budget)
}

pub fn run_pipeline(p: &SimplicialPartition, opts: &PipelineOptions) -> Result<PipelineOutput> {
    let (mesh, conflicts, splits) = if opts.reduce {
        let ro = ReduceOptions {
            max_splits: opts.max_splits,
            check_rebuild: false,
            budget: opts.budget,
        };
        reduce_rank(p, ValueRule::Preserve, ro)?
    } else {
        (p.clone(), analyze(p, opts.budget)?, Vec::new())
    };
    let sets = mesh.to_set_system();
    let rank = conflicts.rank();
    let high_rank = rank > 2;
    let (blocking, coloring) = if high_rank {
        let bh = build_blocking_hypergraph(&sets, &conflicts, opts.budget)?;
        let c = color_blocking(&bh);
        (Some(bh), Some(c))
    } else {
        (None, None)
    };
    let g = Graph::from_conflicts(&conflicts);
    let strategy = match opts.cover {
        CoverMethod::Geom { k, n_lines } if mesh.dim == 2 => CoverStrategy::GeomThenExact { mesh: &mesh, k, n_lines },
        _ => CoverStrategy::Exact,
    };
    let cover = cover_bicliques(&g, strategy, opts.seed, ExactOptions { node_limit: opts.node_limit })?;
    let spec = DisjunctionSpec::new(&mesh, cover.bicliques.clone(), coloring.clone(), high_rank);
    let by_size = conflicts.counts_by_size();
    let analysis = Analysis {
        num_vertices: mesh.num_vertices(),
        num_simplices: mesh.num_simplices(),
        rank,
        nu: by_size.get(&2).copied().unwrap_or(0),
        mu: by_size.range(3..).map(|(_, &c)| c).sum(),
        beta: blocking.as_ref().map_or(0, |b| b.edges.len()),
        q: coloring.as_ref().map_or(0, |c| c.q),
        cover_size: cover.len(),
        cover_proven: cover.proven,
        splits: splits.len(),
    };
    Ok(PipelineOutput {
        mesh,
        conflicts,
        splits,
        blocking,
        coloring,
        cover,
        spec,
        analysis,
    })
}
