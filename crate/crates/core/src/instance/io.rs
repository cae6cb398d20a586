//! Reading and writing instances and clusterings.
//!
//! JSON is the canonical format. Points CSV files and tree edge lists are
//! converted into the same [`Instance`] model.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Candidates, Clustering, Instance};
use crate::error::{Error, Result};
use crate::metric::{DistanceMatrix, Point, Space, TreeGraph};

#[derive(Debug, Serialize, Deserialize)]
struct SpaceFile {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<(usize, usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum CandidatesFile {
    Keyword(String),
    List(Vec<Point>),
}

#[derive(Debug, Serialize, Deserialize)]
struct InstanceFile {
    #[serde(default)]
    label: String,
    space: SpaceFile,
    agents: Vec<Point>,
    candidates: CandidatesFile,
    k: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct ClusteringFile {
    centers: Vec<Point>,
}

fn space_from_file(file: SpaceFile) -> Result<Space> {
    match file.kind.as_str() {
        "line" => Ok(Space::Line),
        "euclidean" => {
            let dim = file
                .dim
                .ok_or_else(|| Error::validation("space.dim", "missing for a euclidean space"))?;
            Space::euclidean(dim)
        }
        "tree" => {
            let edges = file
                .edges
                .ok_or_else(|| Error::validation("space.edges", "missing for a tree space"))?;
            Ok(Space::tree(TreeGraph::from_edges(edges)?))
        }
        "matrix" => {
            let rows = file
                .matrix
                .ok_or_else(|| Error::validation("space.matrix", "missing for a matrix space"))?;
            Ok(Space::Matrix(DistanceMatrix::from_rows(rows)?))
        }
        other => Err(Error::validation(
            "space.kind",
            format!("unknown space kind `{other}`"),
        )),
    }
}

fn space_to_file(space: &Space) -> SpaceFile {
    let mut file = SpaceFile {
        kind: String::new(),
        dim: None,
        edges: None,
        matrix: None,
    };
    match space {
        Space::Line => file.kind = "line".into(),
        Space::Euclidean { dim } => {
            file.kind = "euclidean".into();
            file.dim = Some(*dim);
        }
        Space::Tree(t) => {
            file.kind = "tree".into();
            file.edges = Some(t.graph.edges().to_vec());
        }
        Space::Matrix(m) => {
            file.kind = "matrix".into();
            file.matrix = Some(m.rows());
        }
    }
    file
}

/// Parses the instance JSON schema.
pub fn instance_from_json(text: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let space = space_from_file(file.space)?;
    let candidates = match file.candidates {
        CandidatesFile::Keyword(s) if s == "line" => Candidates::ContinuousLine,
        CandidatesFile::Keyword(s) => {
            return Err(Error::validation(
                "candidates",
                format!("expected \"line\" or a list, got \"{s}\""),
            ))
        }
        CandidatesFile::List(list) => Candidates::Finite(list),
    };
    Instance::new(file.label, space, file.agents, candidates, file.k)
}

pub fn instance_to_json(inst: &Instance) -> Result<String> {
    let file = InstanceFile {
        label: inst.label.clone(),
        space: space_to_file(inst.space()),
        agents: inst.agents().to_vec(),
        candidates: match inst.candidates() {
            Candidates::ContinuousLine => CandidatesFile::Keyword("line".into()),
            Candidates::Finite(list) => CandidatesFile::List(list.clone()),
        },
        k: inst.k(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

/// Loads an instance from a JSON file.
pub fn load_instance(path: impl AsRef<Path>) -> Result<Instance> {
    instance_from_json(&fs::read_to_string(path)?)
}

pub fn save_instance(inst: &Instance, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, instance_to_json(inst)?)?;
    Ok(())
}

/// Parses numeric rows (comma or whitespace separated, optional header)
/// into coordinate vectors of a common dimension.
pub fn parse_points(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            fields.iter().map(|s| s.parse::<f64>()).collect();
        match parsed {
            Ok(row) => {
                if let Some(first) = rows.first() {
                    if first.len() != row.len() {
                        return Err(Error::Parse(format!(
                            "line {}: {} columns, expected {}",
                            lineno + 1,
                            row.len(),
                            first.len()
                        )));
                    }
                }
                if row.is_empty() {
                    continue;
                }
                rows.push(row);
            }
            // A non-numeric first data line is a header.
            Err(_) if rows.is_empty() && lineno == first_content_line(text) => continue,
            Err(e) => {
                return Err(Error::Parse(format!("line {}: {e}", lineno + 1)));
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("no data rows".into()));
    }
    Ok(rows)
}

fn first_content_line(text: &str) -> usize {
    text.lines()
        .position(|l| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .unwrap_or(0)
}

/// Builds a Euclidean instance (or a line instance for one column) from
/// points text, with the agent locations as candidates.
pub fn instance_from_points(text: &str, k: usize, label: impl Into<String>) -> Result<Instance> {
    let rows = parse_points(text)?;
    let dim = rows[0].len();
    let (space, agents): (Space, Vec<Point>) = if dim == 1 {
        (Space::Line, rows.into_iter().map(|r| Point::Coord(r[0])).collect())
    } else {
        (Space::euclidean(dim)?, rows.into_iter().map(Point::Vector).collect())
    };
    Instance::new(label, space, agents.clone(), Candidates::Finite(agents), k)
}

pub fn load_points_csv(path: impl AsRef<Path>, k: usize) -> Result<Instance> {
    let path = path.as_ref();
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    instance_from_points(&fs::read_to_string(path)?, k, label)
}

/// Builds a tree instance from an edge list. With `agents_at_every_vertex`
/// each vertex carries one agent; candidates are always all vertices.
pub fn instance_from_edge_list(
    text: &str,
    k: usize,
    agents_at_every_vertex: bool,
    agents: Vec<usize>,
    label: impl Into<String>,
) -> Result<Instance> {
    let tree = TreeGraph::parse_edge_list(text)?;
    let n = tree.vertex_count();
    let vertices: Vec<Point> = (0..n).map(Point::Vertex).collect();
    let agents = if agents_at_every_vertex {
        vertices.clone()
    } else {
        agents.into_iter().map(Point::Vertex).collect()
    };
    Instance::new(label, Space::tree(tree), agents, Candidates::Finite(vertices), k)
}

pub fn load_tree_edges(
    path: impl AsRef<Path>,
    k: usize,
    agents_at_every_vertex: bool,
) -> Result<Instance> {
    let path = path.as_ref();
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    instance_from_edge_list(&fs::read_to_string(path)?, k, agents_at_every_vertex, Vec::new(), label)
}

pub fn clustering_from_json(text: &str) -> Result<Clustering> {
    let file: ClusteringFile = serde_json::from_str(text)?;
    Ok(Clustering::new(file.centers))
}

pub fn clustering_to_json(y: &Clustering) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ClusteringFile {
        centers: y.centers.clone(),
    })?)
}

pub fn save_clustering(y: &Clustering, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, clustering_to_json(y)?)?;
    Ok(())
}

pub fn load_clustering(path: impl AsRef<Path>) -> Result<Clustering> {
    clustering_from_json(&fs::read_to_string(path)?)
}
