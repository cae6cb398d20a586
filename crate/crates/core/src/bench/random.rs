//! Random instances for the verification sweeps.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::instance::{Candidates, Instance};
use crate::metric::{DistanceMatrix, Point, Space, TreeGraph};

/// Agents on the line, either on a small integer grid (many ties) or
/// uniform reals. Centers may go anywhere on the line.
pub fn random_line(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Result<Instance> {
    let grid = rng.random_bool(0.5);
    let agents = (0..n)
        .map(|_| {
            Point::Coord(if grid {
                rng.random_range(0..20) as f64
            } else {
                rng.random_range(0.0..100.0)
            })
        })
        .collect();
    Instance::new("random-line", Space::Line, agents, Candidates::ContinuousLine, k)
}

/// A random recursive tree on `vertices` vertices with agents dropped on
/// uniformly random vertices. Every vertex is a candidate.
pub fn random_tree(rng: &mut ChaCha8Rng, vertices: usize, n: usize, k: usize) -> Result<Instance> {
    let integral = rng.random_bool(0.5);
    let edges = (1..vertices)
        .map(|v| {
            let w = if integral {
                rng.random_range(1..5) as f64
            } else {
                rng.random_range(0.1..5.0)
            };
            (rng.random_range(0..v), v, w)
        })
        .collect();
    let graph = TreeGraph::new(vertices, edges)?;
    let agents = (0..n).map(|_| Point::Vertex(rng.random_range(0..vertices))).collect();
    Instance::new(
        "random-tree",
        Space::tree(graph),
        agents,
        Candidates::Finite((0..vertices).map(Point::Vertex).collect()),
        k,
    )
}

/// Planar points, uniform or around a few random blobs. Candidates are the
/// agents.
pub fn random_euclidean(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Result<Instance> {
    let blobs: Vec<(f64, f64)> = (0..rng.random_range(1..5))
        .map(|_| (rng.random_range(0.0..50.0), rng.random_range(0.0..50.0)))
        .collect();
    let uniform = rng.random_bool(0.3);
    let agents: Vec<Point> = (0..n)
        .map(|_| {
            if uniform {
                Point::Vector(vec![rng.random_range(0.0..50.0), rng.random_range(0.0..50.0)])
            } else {
                let (cx, cy) = blobs[rng.random_range(0..blobs.len())];
                Point::Vector(vec![cx + rng.random_range(-3.0..3.0), cy + rng.random_range(-3.0..3.0)])
            }
        })
        .collect();
    Instance::new(
        "random-euclidean",
        Space::euclidean(2)?,
        agents.clone(),
        Candidates::Finite(agents),
        k,
    )
}

/// Shortest-path metric of a random connected weighted graph, one agent per
/// vertex, every vertex a candidate.
pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Result<Instance> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    let connect = |d: &mut Vec<Vec<f64>>, u: usize, v: usize, w: f64| {
        if w < d[u][v] {
            d[u][v] = w;
            d[v][u] = w;
        }
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let w = rng.random_range(1..10) as f64;
        let u = order[rng.random_range(0..i)];
        connect(&mut d, u, order[i], w);
    }
    let extra = rng.random_range(0..=2 * n);
    for _ in 0..extra {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if u != v {
            let w = rng.random_range(1..10) as f64;
            connect(&mut d, u, v, w);
        }
    }
    for m in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][m] + d[m][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let vertices: Vec<Point> = (0..n).map(Point::Vertex).collect();
    Instance::new(
        "random-matrix",
        Space::Matrix(DistanceMatrix::from_rows(d)?),
        vertices.clone(),
        Candidates::Finite(vertices),
        k,
    )
}

/// `k` centers drawn uniformly (with repetition) from the agent locations.
pub fn random_centers_on_agents(rng: &mut ChaCha8Rng, inst: &Instance) -> Vec<Point> {
    (0..inst.k())
        .map(|_| inst.agents()[rng.random_range(0..inst.n())].clone())
        .collect()
}

/// `k` distinct candidates drawn uniformly.
pub fn random_distinct_candidates(rng: &mut ChaCha8Rng, inst: &Instance) -> Vec<Point> {
    let cands = inst.candidate_points();
    let k = inst.k().min(cands.len());
    rand::seq::index::sample(rng, cands.len(), k)
        .into_iter()
        .map(|i| cands[i].clone())
        .collect()
}
