use crate::error::{Error, Result};
use crate::instance::{Clustering, Instance};
use crate::metric::Point;

/// Prim's algorithm on the complete graph over agents, started at agent 0.
/// Returns `(parent, child)` pairs in the order children join the tree.
/// The closest outside agent joins next (lowest index on ties), attached to
/// the earliest tree agent achieving that distance.
pub fn minimum_spanning_tree(inst: &Instance) -> Vec<(usize, usize)> {
    let n = inst.n();
    let agents = inst.agents();
    let space = inst.space();
    let mut in_tree = vec![false; n];
    let mut key = vec![f64::INFINITY; n];
    let mut via = vec![0usize; n];
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    in_tree[0] = true;
    for v in 1..n {
        key[v] = space.dist(&agents[0], &agents[v]);
    }
    for _ in 1..n {
        let mut next = None;
        for v in (0..n).filter(|&v| !in_tree[v]) {
            match next {
                Some(u) if key[v] >= key[u] => {}
                _ => next = Some(v),
            }
        }
        let u = next.expect("an outside agent remains");
        in_tree[u] = true;
        edges.push((via[u], u));
        for v in (0..n).filter(|&v| !in_tree[v]) {
            let d = space.dist(&agents[u], &agents[v]);
            if d < key[v] {
                key[v] = d;
                via[v] = u;
            }
        }
    }
    edges
}

/// Centers on a vertex cover of a minimum spanning tree over the agents.
///
/// The tree is two-colored by depth parity from agent 0 and the smaller
/// class is used (the odd class when both have the same size). Remaining
/// centers go to agent locations that are not centers yet, in ascending
/// agent index. Needs `n/2 ≤ k ≤ n − 2`.
pub fn alg_mst_cover(inst: &Instance) -> Result<Clustering> {
    let (n, k) = (inst.n(), inst.k());
    if 2 * k < n || k + 2 > n {
        return Err(Error::Parameter(format!(
            "spanning-tree cover needs n/2 ≤ k ≤ n − 2, got n = {n}, k = {k}"
        )));
    }
    if let Some(i) = (0..n).find(|&i| !inst.is_candidate(&inst.agents()[i])) {
        return Err(Error::Precondition(format!(
            "agent {i}'s location is not a candidate"
        )));
    }
    let mut depth = vec![0usize; n];
    for (parent, child) in minimum_spanning_tree(inst) {
        depth[child] = depth[parent] + 1;
    }
    let (odd, even): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| depth[i] % 2 == 1);
    let cover = if even.len() < odd.len() { even } else { odd };

    let agents = inst.agents();
    let mut centers: Vec<Point> = cover.iter().map(|&i| agents[i].clone()).collect();
    for a in agents {
        if centers.len() == k {
            break;
        }
        if !centers.contains(a) {
            centers.push(a.clone());
        }
    }
    // Only reachable when agents share locations.
    super::greedy_fill(inst, &mut centers);
    Ok(Clustering::new(centers))
}
