use super::{greedy_fill, LambdaParam};
use crate::error::{Error, Result};
use crate::instance::{Clustering, Instance};
use crate::metric::{Point, TreeGraph};

fn tree_of(inst: &Instance) -> Result<&TreeGraph> {
    match inst.space() {
        crate::metric::Space::Tree(t) => Ok(&t.graph),
        other => Err(Error::Unsupported(format!(
            "subtree cutting needs a tree, got {:?}",
            other.kind()
        ))),
    }
}

fn agents_per_vertex(inst: &Instance, vertices: usize) -> Vec<usize> {
    let mut count = vec![0; vertices];
    for a in inst.agents() {
        if let Some(v) = a.as_vertex() {
            count[v] += 1;
        }
    }
    count
}

/// Cuts subtrees bottom-up. Levels are visited from the deepest to the
/// root, vertices inside a level in ascending id. A vertex whose surviving
/// subtree holds at least `λ` agents becomes a center and its subtree is
/// deleted, as long as fewer than `k` centers exist. Missing centers are
/// then filled greedily.
pub fn alg_tree(inst: &Instance, lambda: LambdaParam, root: usize) -> Result<Clustering> {
    let tree = tree_of(inst)?;
    let size = tree.vertex_count();
    if root >= size {
        return Err(Error::Parameter(format!("root {root} is not a vertex (tree has {size})")));
    }
    if let Some(v) = (0..size).find(|&v| !inst.is_candidate(&Point::Vertex(v))) {
        return Err(Error::Precondition(format!(
            "every vertex must be a candidate, {v} is not"
        )));
    }
    let l = lambda.get();
    if l == 0 || l > inst.n() {
        return Err(Error::Parameter(format!("λ = {l} must lie in [1, n = {}]", inst.n())));
    }

    let (parent, level) = tree.rooted(root);
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| level[b].cmp(&level[a]).then(a.cmp(&b)));

    let count = agents_per_vertex(inst, size);
    // Agents in the surviving part of each subtree, pushed up to parents.
    let mut load = count.clone();
    let mut centers = Vec::new();
    for v in order {
        if load[v] >= l && centers.len() < inst.k() {
            centers.push(Point::Vertex(v));
            load[v] = 0;
        }
        if let Some(p) = parent[v] {
            load[p] += load[v];
        }
    }
    greedy_fill(inst, &mut centers);
    Ok(Clustering::new(centers))
}

/// Number of agents in each connected component left after deleting the
/// center vertices from the tree. Agents on a center are not counted.
pub fn component_loads(inst: &Instance, centers: &[Point]) -> Result<Vec<usize>> {
    let tree = tree_of(inst)?;
    let size = tree.vertex_count();
    let mut removed = vec![false; size];
    for c in centers {
        match c.as_vertex() {
            Some(v) if v < size => removed[v] = true,
            _ => return Err(Error::InvalidPoint(format!("{c} is not a vertex of the tree"))),
        }
    }
    let count = agents_per_vertex(inst, size);
    let mut seen = removed.clone();
    let mut loads = Vec::new();
    for start in 0..size {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut stack = vec![start];
        let mut total = 0;
        while let Some(u) = stack.pop() {
            total += count[u];
            for &(v, _) in tree.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        loads.push(total);
    }
    Ok(loads)
}
