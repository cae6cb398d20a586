//! Metric spaces: the real line, weighted trees, Euclidean point sets and
//! explicit distance matrices.
//!
//! Points are addressed through [`Point`]. A line point carries its
//! coordinate, a Euclidean point its coordinate vector, and tree or matrix
//! points are vertex indices. A [`Space`] answers distance queries between
//! points that belong to it.

use std::collections::VecDeque;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance used for every floating comparison, scaled by the
/// magnitude of the compared quantities (see [`tolerance`]).
pub const TOL: f64 = 1e-9;

/// Tolerance for comparing quantities of magnitude `scale`.
#[inline]
pub fn tolerance(scale: f64) -> f64 {
    TOL * scale.abs().max(1.0)
}

/// `a > b` by more than the scaled tolerance.
#[inline]
pub fn strictly_greater(a: f64, b: f64) -> bool {
    a - b > tolerance(a.abs().max(b.abs()))
}

/// `a == b` up to the scaled tolerance.
#[inline]
pub fn approx_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= tolerance(a.abs().max(b.abs()))
}

/// Matrix triples are checked exhaustively up to this size, sampled above it.
pub const EXHAUSTIVE_TRIANGLE_LIMIT: usize = 500;
const SAMPLED_TRIPLES: usize = 100_000;

/// A location in a [`Space`].
///
/// Serialized untagged: vertices as integers, line coordinates as numbers,
/// Euclidean points as arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Vertex(usize),
    Coord(f64),
    Vector(Vec<f64>),
}

impl Point {
    /// Coordinates of a line or Euclidean point.
    pub fn coords(&self) -> Option<Vec<f64>> {
        match self {
            Point::Coord(x) => Some(vec![*x]),
            Point::Vector(v) => Some(v.clone()),
            Point::Vertex(_) => None,
        }
    }

    pub fn as_vertex(&self) -> Option<usize> {
        match self {
            Point::Vertex(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_coord(&self) -> Option<f64> {
        match self {
            Point::Coord(x) => Some(*x),
            _ => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Vertex(v) => write!(f, "v{v}"),
            Point::Coord(x) => write!(f, "{x}"),
            Point::Vector(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Discriminant of a [`Space`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceKind {
    Line,
    Tree,
    Euclidean { dim: usize },
    Matrix,
}

/// Dense square matrix of pairwise distances, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from rows. Only the shape is checked here; use
    /// [`validate_metric`] for the metric axioms.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::validation("matrix", "empty matrix"));
        }
        let mut data = Vec::with_capacity(size * size);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(Error::validation(
                    "matrix",
                    format!("row {i} has {} entries, expected {size}", row.len()),
                ));
            }
            data.extend(row);
        }
        Ok(Self { size, data })
    }

    /// Unit distances between all distinct vertices of `K_size`.
    pub fn complete_unit(size: usize) -> Self {
        let mut data = vec![1.0; size * size];
        for i in 0..size {
            data[i * size + i] = 0.0;
        }
        Self { size, data }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.size).map(|i| self.row(i).to_vec()).collect()
    }

    /// Parses a CSV holding the full matrix, one row per line.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record?;
            let row = record
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("matrix entry `{s}`: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Self::from_rows(rows)
    }
}

/// An undirected weighted tree on vertices `0..vertex_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl TreeGraph {
    /// Builds a tree, rejecting anything that is not a connected acyclic
    /// graph with non-negative finite weights.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::validation("edges", "tree needs at least one vertex"));
        }
        if edges.len() != vertex_count - 1 {
            return Err(Error::validation(
                "edges",
                format!(
                    "a tree on {vertex_count} vertices has {} edges, got {}",
                    vertex_count - 1,
                    edges.len()
                ),
            ));
        }
        let mut adjacency = vec![Vec::new(); vertex_count];
        for &(u, v, w) in &edges {
            if u >= vertex_count || v >= vertex_count {
                return Err(Error::validation(
                    "edges",
                    format!("edge ({u}, {v}) out of range"),
                ));
            }
            if u == v {
                return Err(Error::validation("edges", format!("self loop at {u}")));
            }
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::validation(
                    "edges",
                    format!("edge ({u}, {v}) has invalid weight {w}"),
                ));
            }
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        let tree = Self {
            vertex_count,
            edges,
            adjacency,
        };
        let reached = tree.bfs_order(0).len();
        if reached != vertex_count {
            return Err(Error::validation(
                "edges",
                format!("tree is disconnected ({reached} of {vertex_count} vertices reachable)"),
            ));
        }
        Ok(tree)
    }

    /// Builds a tree whose vertex count is the largest id plus one.
    pub fn from_edges(edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let vertex_count = edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(1);
        Self::new(vertex_count, edges)
    }

    /// Parses the plain-text edge list format: one `u v w` triple per line.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut edges = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected `u v w`, got `{line}`",
                    lineno + 1
                )));
            }
            let parse_id = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("line {}: `{s}`: {e}", lineno + 1)))
            };
            let w = fields[2]
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: `{}`: {e}", lineno + 1, fields[2])))?;
            edges.push((parse_id(fields[0])?, parse_id(fields[1])?, w));
        }
        Self::from_edges(edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    fn bfs_order(&self, root: usize) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count];
        let mut order = Vec::with_capacity(self.vertex_count);
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &(v, _) in &self.adjacency[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        order
    }

    /// Distances from `source` to every vertex along the unique paths.
    pub fn distances_from(&self, source: usize) -> Vec<f64> {
        let mut dist = vec![f64::NAN; self.vertex_count];
        dist[source] = 0.0;
        let mut stack = vec![source];
        while let Some(u) = stack.pop() {
            for &(v, w) in &self.adjacency[u] {
                if dist[v].is_nan() {
                    dist[v] = dist[u] + w;
                    stack.push(v);
                }
            }
        }
        dist
    }

    /// All-pairs distances, one traversal per source.
    pub fn apsp(&self) -> DistanceMatrix {
        let size = self.vertex_count;
        let mut data = Vec::with_capacity(size * size);
        for s in 0..size {
            data.extend(self.distances_from(s));
        }
        DistanceMatrix { size, data }
    }

    /// Parent pointers and levels (root has level 1) for the tree rooted at
    /// `root`.
    pub fn rooted(&self, root: usize) -> (Vec<Option<usize>>, Vec<usize>) {
        let mut parent = vec![None; self.vertex_count];
        let mut level = vec![0; self.vertex_count];
        level[root] = 1;
        for u in self.bfs_order(root) {
            for &(v, _) in &self.adjacency[u] {
                if v != root && level[v] == 0 {
                    level[v] = level[u] + 1;
                    parent[v] = Some(u);
                }
            }
        }
        (parent, level)
    }
}

/// A tree together with its precomputed distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeSpace {
    pub graph: TreeGraph,
    pub distances: DistanceMatrix,
}

impl TreeSpace {
    pub fn new(graph: TreeGraph) -> Self {
        let distances = graph.apsp();
        Self { graph, distances }
    }
}

/// A metric space.
#[derive(Debug, Clone, PartialEq)]
pub enum Space {
    Line,
    Euclidean { dim: usize },
    Tree(TreeSpace),
    Matrix(DistanceMatrix),
}

impl Space {
    pub fn tree(graph: TreeGraph) -> Self {
        Space::Tree(TreeSpace::new(graph))
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::validation("dim", "Euclidean dimension must be at least 1"));
        }
        Ok(Space::Euclidean { dim })
    }

    pub fn kind(&self) -> SpaceKind {
        match self {
            Space::Line => SpaceKind::Line,
            Space::Euclidean { dim } => SpaceKind::Euclidean { dim: *dim },
            Space::Tree(_) => SpaceKind::Tree,
            Space::Matrix(_) => SpaceKind::Matrix,
        }
    }

    /// Number of vertices for tree and matrix spaces.
    pub fn vertex_count(&self) -> Option<usize> {
        match self {
            Space::Tree(t) => Some(t.graph.vertex_count()),
            Space::Matrix(m) => Some(m.size()),
            _ => None,
        }
    }

    /// Checks that `p` addresses a location of this space, converting
    /// integer-valued line coordinates that were read as vertices.
    pub fn normalize(&self, p: Point) -> Result<Point> {
        match (self, p) {
            (Space::Line, Point::Vertex(v)) => Ok(Point::Coord(v as f64)),
            (Space::Line, Point::Coord(x)) if x.is_finite() => Ok(Point::Coord(x)),
            (Space::Euclidean { dim }, Point::Vector(v))
                if v.len() == *dim && v.iter().all(|x| x.is_finite()) =>
            {
                Ok(Point::Vector(v))
            }
            (Space::Tree(_) | Space::Matrix(_), Point::Vertex(v)) => {
                let size = self.vertex_count().unwrap_or(0);
                if v < size {
                    Ok(Point::Vertex(v))
                } else {
                    Err(Error::InvalidPoint(format!(
                        "vertex {v} out of range for a space with {size} vertices"
                    )))
                }
            }
            (space, p) => Err(Error::InvalidPoint(format!(
                "{p} is not a point of a {:?} space",
                space.kind()
            ))),
        }
    }

    pub fn check(&self, p: &Point) -> Result<()> {
        self.normalize(p.clone()).map(|_| ())
    }

    /// Checked distance between two points.
    pub fn distance(&self, a: &Point, b: &Point) -> Result<f64> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.dist(a, b))
    }

    /// Distance between two points already known to belong to this space.
    ///
    /// Panics on points of the wrong shape; use [`Space::distance`] for
    /// unvalidated input.
    #[inline]
    pub fn dist(&self, a: &Point, b: &Point) -> f64 {
        match (self, a, b) {
            (Space::Line, Point::Coord(x), Point::Coord(y)) => (x - y).abs(),
            (Space::Euclidean { .. }, Point::Vector(x), Point::Vector(y)) => euclidean(x, y),
            (Space::Tree(t), Point::Vertex(u), Point::Vertex(v)) => t.distances.get(*u, *v),
            (Space::Matrix(m), Point::Vertex(u), Point::Vertex(v)) => m.get(*u, *v),
            _ => panic!("points {a} and {b} do not belong to a {:?} space", self.kind()),
        }
    }

    /// `min_{y in set} d(p, y)`.
    pub fn distance_to_set(&self, p: &Point, set: &[Point]) -> Result<f64> {
        if set.is_empty() {
            return Err(Error::Precondition("distance to an empty set".into()));
        }
        self.check(p)?;
        for y in set {
            self.check(y)?;
        }
        Ok(self.dist_to_set(p, set))
    }

    /// Unchecked [`Space::distance_to_set`]; `+inf` for an empty set.
    #[inline]
    pub fn dist_to_set(&self, p: &Point, set: &[Point]) -> f64 {
        set.iter()
            .map(|y| self.dist(p, y))
            .fold(f64::INFINITY, f64::min)
    }

    /// Full pairwise distance matrix of a tree or matrix space.
    pub fn apsp(&self) -> Result<DistanceMatrix> {
        match self {
            Space::Tree(t) => Ok(t.distances.clone()),
            Space::Matrix(m) => Ok(m.clone()),
            _ => Err(Error::Unsupported(format!(
                "all-pairs distances need a tree or matrix space, got {:?}",
                self.kind()
            ))),
        }
    }
}

#[inline]
pub(crate) fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Outcome of [`validate_metric`].
#[derive(Debug, Clone, PartialEq)]
pub enum MetricReport {
    Ok {
        /// Number of triangle triples inspected (0 when the space is metric
        /// by construction).
        triples_checked: usize,
    },
    Violation(MetricViolation),
}

impl MetricReport {
    pub fn is_ok(&self) -> bool {
        matches!(self, MetricReport::Ok { .. })
    }
}

/// The first breach of a metric axiom that was found.
#[derive(Debug, Clone, PartialEq)]
pub enum MetricViolation {
    NonFinite { i: usize, j: usize },
    Negative { i: usize, j: usize },
    NonZeroDiagonal { i: usize },
    Asymmetric { i: usize, j: usize },
    /// `d(a, c) > d(a, b) + d(b, c)`.
    Triangle { a: usize, b: usize, c: usize },
}

impl fmt::Display for MetricViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricViolation::NonFinite { i, j } => write!(f, "d({i},{j}) is not finite"),
            MetricViolation::Negative { i, j } => write!(f, "d({i},{j}) is negative"),
            MetricViolation::NonZeroDiagonal { i } => write!(f, "d({i},{i}) is not zero"),
            MetricViolation::Asymmetric { i, j } => write!(f, "d({i},{j}) != d({j},{i})"),
            MetricViolation::Triangle { a, b, c } => {
                write!(f, "d({a},{c}) > d({a},{b}) + d({b},{c})")
            }
        }
    }
}

/// Checks the metric axioms of `space`.
///
/// Line, Euclidean and tree spaces are metric by construction. Matrices up
/// to [`EXHAUSTIVE_TRIANGLE_LIMIT`] points have every triple checked; larger
/// ones are checked on 10^5 triples drawn from a fixed-seed generator.
pub fn validate_metric(space: &Space) -> MetricReport {
    match space {
        Space::Matrix(m) => validate_matrix(m),
        _ => MetricReport::Ok { triples_checked: 0 },
    }
}

fn validate_matrix(m: &DistanceMatrix) -> MetricReport {
    let n = m.size();
    for i in 0..n {
        for j in 0..n {
            let d = m.get(i, j);
            if !d.is_finite() {
                return MetricReport::Violation(MetricViolation::NonFinite { i, j });
            }
            if d < 0.0 {
                return MetricReport::Violation(MetricViolation::Negative { i, j });
            }
        }
        if m.get(i, i).abs() > TOL {
            return MetricReport::Violation(MetricViolation::NonZeroDiagonal { i });
        }
        for j in 0..i {
            if !approx_eq(m.get(i, j), m.get(j, i)) {
                return MetricReport::Violation(MetricViolation::Asymmetric { i: j, j: i });
            }
        }
    }
    let breach = |a: usize, b: usize, c: usize| {
        let via = m.get(a, b) + m.get(b, c);
        strictly_greater(m.get(a, c), via)
    };
    if n <= EXHAUSTIVE_TRIANGLE_LIMIT {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if breach(a, b, c) {
                        return MetricReport::Violation(MetricViolation::Triangle { a, b, c });
                    }
                }
            }
        }
        MetricReport::Ok {
            triples_checked: n * n * n,
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..SAMPLED_TRIPLES {
            let (a, b, c) = (
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(0..n),
            );
            if breach(a, b, c) {
                return MetricReport::Violation(MetricViolation::Triangle { a, b, c });
            }
        }
        MetricReport::Ok {
            triples_checked: SAMPLED_TRIPLES,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path3() -> Space {
        Space::tree(TreeGraph::new(3, vec![(0, 1, 1.0), (1, 2, 1.0)]).unwrap())
    }

    #[test]
    fn line_distance() {
        let d = Space::Line
            .distance(&Point::Coord(3.0), &Point::Coord(7.5))
            .unwrap();
        assert_eq!(d, 4.5);
    }

    #[test]
    fn path_distance() {
        let d = path3()
            .distance(&Point::Vertex(0), &Point::Vertex(2))
            .unwrap();
        assert_eq!(d, 2.0);
    }

    #[test]
    fn k4_distance() {
        let k4 = Space::Matrix(DistanceMatrix::complete_unit(4));
        assert_eq!(k4.distance(&Point::Vertex(0), &Point::Vertex(3)).unwrap(), 1.0);
        let d = k4
            .distance_to_set(&Point::Vertex(2), &[Point::Vertex(0), Point::Vertex(1)])
            .unwrap();
        assert_eq!(d, 1.0);
    }

    #[test]
    fn out_of_range_vertex() {
        let err = path3().distance(&Point::Vertex(0), &Point::Vertex(3));
        assert!(matches!(err, Err(Error::InvalidPoint(_))));
        let err = Space::Line.distance(&Point::Coord(0.0), &Point::Vector(vec![1.0]));
        assert!(matches!(err, Err(Error::InvalidPoint(_))));
    }

    #[test]
    fn distance_to_set_cases() {
        let set = [Point::Coord(0.0), Point::Coord(5.0)];
        assert_eq!(Space::Line.distance_to_set(&Point::Coord(2.0), &set).unwrap(), 2.0);
        assert_eq!(Space::Line.distance_to_set(&Point::Coord(5.0), &set).unwrap(), 0.0);
        assert!(matches!(
            Space::Line.distance_to_set(&Point::Coord(5.0), &[]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn apsp_path_and_star() {
        let m = path3().apsp().unwrap();
        assert_eq!(m.rows(), vec![vec![0.0, 1.0, 2.0], vec![1.0, 0.0, 1.0], vec![2.0, 1.0, 0.0]]);
        let star = TreeGraph::new(3, vec![(0, 1, 2.0), (0, 2, 3.0)]).unwrap();
        assert_eq!(star.apsp().get(1, 2), 5.0);
        assert!(Space::Line.apsp().is_err());
    }

    #[test]
    fn tree_rejects_bad_graphs() {
        assert!(TreeGraph::new(3, vec![(0, 1, 1.0)]).is_err());
        assert!(TreeGraph::new(4, vec![(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0)]).is_err());
        assert!(TreeGraph::new(2, vec![(0, 1, -1.0)]).is_err());
        assert!(TreeGraph::new(2, vec![(0, 2, 1.0)]).is_err());
    }

    #[test]
    fn edge_list_parsing() {
        let t = TreeGraph::parse_edge_list("# star\n0 1 2\n\n0 2 3.5\n").unwrap();
        assert_eq!(t.vertex_count(), 3);
        assert_eq!(t.apsp().get(1, 2), 5.5);
        assert!(TreeGraph::parse_edge_list("0 1\n").is_err());
        assert!(TreeGraph::parse_edge_list("0 x 1\n").is_err());
    }

    #[test]
    fn matrix_csv() {
        let m = DistanceMatrix::from_csv("0,1,2\n1,0,1\n2,1,0\n").unwrap();
        assert_eq!(m.get(0, 2), 2.0);
        assert!(DistanceMatrix::from_csv("0,1\n1,0,3\n").is_err());
    }

    #[test]
    fn validation_reports() {
        assert!(validate_metric(&Space::Matrix(DistanceMatrix::complete_unit(4))).is_ok());
        let bad = DistanceMatrix::from_rows(vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ])
        .unwrap();
        assert_eq!(
            validate_metric(&Space::Matrix(bad)),
            MetricReport::Violation(MetricViolation::Triangle { a: 0, b: 1, c: 2 })
        );
        let asym =
            DistanceMatrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert!(matches!(
            validate_metric(&Space::Matrix(asym)),
            MetricReport::Violation(MetricViolation::Asymmetric { .. })
        ));
        let tree = path3();
        assert!(validate_metric(&Space::Matrix(tree.apsp().unwrap())).is_ok());
    }

    #[test]
    fn large_matrix_is_sampled() {
        let m = DistanceMatrix::complete_unit(EXHAUSTIVE_TRIANGLE_LIMIT + 1);
        assert_eq!(
            validate_metric(&Space::Matrix(m)),
            MetricReport::Ok { triples_checked: SAMPLED_TRIPLES }
        );
    }

    /// Sum of edge weights along the unique path, found by depth-first search
    /// that records the path explicitly.
    fn brute_path_length(t: &TreeGraph, from: usize, to: usize) -> f64 {
        fn walk(t: &TreeGraph, u: usize, prev: usize, to: usize, acc: f64) -> Option<f64> {
            if u == to {
                return Some(acc);
            }
            t.neighbors(u)
                .iter()
                .filter(|(v, _)| *v != prev)
                .find_map(|&(v, w)| walk(t, v, u, to, acc + w))
        }
        walk(t, from, usize::MAX, to, 0.0).unwrap()
    }

    fn arb_tree() -> impl Strategy<Value = TreeGraph> {
        (2usize..100).prop_flat_map(|n| {
            proptest::collection::vec((any::<prop::sample::Index>(), 0u32..20), n - 1).prop_map(
                move |parents| {
                    let edges = parents
                        .into_iter()
                        .enumerate()
                        .map(|(i, (p, w))| (p.index(i + 1), i + 1, w as f64 * 0.5))
                        .collect();
                    TreeGraph::new(n, edges).unwrap()
                },
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn tree_apsp_matches_path_sums(t in arb_tree()) {
            let m = t.apsp();
            let n = t.vertex_count();
            for a in (0..n).step_by(7) {
                for b in 0..n {
                    prop_assert!((m.get(a, b) - brute_path_length(&t, a, b)).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn euclidean_axioms(pts in proptest::collection::vec(proptest::collection::vec(-50.0f64..50.0, 3), 3)) {
            let s = Space::Euclidean { dim: 3 };
            let p: Vec<Point> = pts.into_iter().map(Point::Vector).collect();
            let (a, b, c) = (&p[0], &p[1], &p[2]);
            prop_assert!(s.dist(a, c) <= s.dist(a, b) + s.dist(b, c) + 1e-9);
            prop_assert_eq!(s.dist(a, b), s.dist(b, a));
            prop_assert_eq!(s.dist(a, a), 0.0);
        }

        #[test]
        fn distance_to_union_is_min(
            i in -10.0f64..10.0,
            y1 in proptest::collection::vec(-10.0f64..10.0, 1..5),
            y2 in proptest::collection::vec(-10.0f64..10.0, 1..5),
        ) {
            let p = Point::Coord(i);
            let a: Vec<Point> = y1.into_iter().map(Point::Coord).collect();
            let b: Vec<Point> = y2.into_iter().map(Point::Coord).collect();
            let union: Vec<Point> = a.iter().chain(&b).cloned().collect();
            let d = Space::Line.distance_to_set(&p, &union).unwrap();
            let m = Space::Line.distance_to_set(&p, &a).unwrap()
                .min(Space::Line.distance_to_set(&p, &b).unwrap());
            prop_assert_eq!(d, m);
        }
    }
}
