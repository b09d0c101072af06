//! JSON mesh files: `{dim, vertices: [{x: [..], f: v}], simplices: [[ids]]}`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SimplicialPartition;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct MeshFile {
    dim: usize,
    vertices: Vec<VertexRecord>,
    simplices: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    provenance: String,
}

#[derive(Serialize, Deserialize)]
struct VertexRecord {
    x: Vec<f64>,
    f: f64,
}

/// Serializes a partition. Floats use the shortest representation that
/// parses back to the same bits.
pub fn mesh_to_json(p: &SimplicialPartition) -> String {
    let file = MeshFile {
        dim: p.dim,
        vertices: p
            .points
            .iter()
            .zip(&p.values)
            .map(|(x, &f)| VertexRecord { x: x.clone(), f })
            .collect(),
        simplices: p.simplices.clone(),
        provenance: p.provenance.clone(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("mesh serialization cannot fail");
    s.push('\n');
    s
}

/// Parses and validates a partition.
pub fn mesh_from_json(text: &str) -> Result<SimplicialPartition> {
    let file: MeshFile =
        serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
    let (points, values) = file.vertices.into_iter().map(|v| (v.x, v.f)).unzip();
    let simplices = file
        .simplices
        .into_iter()
        .map(|mut s| {
            s.sort_unstable();
            s
        })
        .collect();
    let p = SimplicialPartition {
        dim: file.dim,
        points,
        values,
        simplices,
        provenance: file.provenance,
    };
    p.validate()?;
    Ok(p)
}

pub fn save_mesh(p: &SimplicialPartition, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, mesh_to_json(p)).map_err(|e| Error::io(path, e))
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<SimplicialPartition> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    mesh_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{cube_partition, grid_triangulation, random_delaunay, DiagRule};
    use crate::geometry::Rect;

    #[test]
    fn roundtrip_is_bit_exact() {
        let mut p = random_delaunay(40, 6, 9);
        for (i, v) in p.values.iter_mut().enumerate() {
            *v = (i as f64).sqrt() * std::f64::consts::PI / 7.0;
        }
        let q = mesh_from_json(&mesh_to_json(&p)).unwrap();
        assert_eq!(p, q);
        for (a, b) in p.points.iter().flatten().zip(q.points.iter().flatten()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.json");
        let p = grid_triangulation(3, 2, Rect::unit(), DiagRule::Random, 4);
        save_mesh(&p, &path).unwrap();
        assert_eq!(load_mesh(&path).unwrap(), p);
    }

    #[test]
    fn cube_loads() {
        let text = mesh_to_json(&cube_partition(3));
        let p = mesh_from_json(&text).unwrap();
        assert_eq!(p.dim, 3);
        assert_eq!(p.num_simplices(), 5);
        let vol: f64 = (0..5).map(|s| p.volume(s)).sum();
        assert!((vol - 1.0).abs() < 1e-12);
    }

    #[test]
    fn short_simplex_fails_validation() {
        let text = r#"{"dim": 2, "vertices": [{"x": [0, 0], "f": 0}, {"x": [1, 0], "f": 0},
            {"x": [0, 1], "f": 0}], "simplices": [[0, 1]]}"#;
        assert!(matches!(mesh_from_json(text), Err(Error::Validation(_))));
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = "{\"dim\": 2,\n \"vertices\": [\n oops ]}";
        match mesh_from_json(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
