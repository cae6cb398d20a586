use crate::error::{Error, Result};
use crate::instance::{Clustering, Instance};

pub const EXACT_MAX_AGENTS: usize = 10;
pub const EXACT_MAX_CANDIDATES: usize = 12;

/// A clustering minimizing `Σ_i d(i, Y)`, by scanning candidates when
/// `k = 1` and by enumerating candidate subsets for small instances. The
/// lexicographically smallest index set wins ties.
pub fn optimal_total_distance(inst: &Instance) -> Result<Clustering> {
    let cands = inst.candidate_points();
    let (n, k, m) = (inst.n(), inst.k(), cands.len());
    if k > 1 && (n > EXACT_MAX_AGENTS || m > EXACT_MAX_CANDIDATES) {
        return Err(Error::TooLarge(format!(
            "exact search needs k = 1, or n ≤ {EXACT_MAX_AGENTS} and at most \
             {EXACT_MAX_CANDIDATES} candidates (got n = {n}, {m} candidates, k = {k})"
        )));
    }
    let space = inst.space();
    let dist: Vec<Vec<f64>> = cands
        .iter()
        .map(|c| inst.agents().iter().map(|a| space.dist(a, c)).collect())
        .collect();

    let size = k.min(m);
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut combo: Vec<usize> = (0..size).collect();
    loop {
        let cost: f64 = (0..n)
            .map(|i| combo.iter().map(|&c| dist[c][i]).fold(f64::INFINITY, f64::min))
            .sum();
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, combo.clone()));
        }
        // Advance to the next combination in lexicographic order.
        let Some(pos) = (0..size).rev().find(|&p| combo[p] < m - size + p) else {
            break;
        };
        combo[pos] += 1;
        for p in pos + 1..size {
            combo[p] = combo[p - 1] + 1;
        }
    }
    let (_, picked) = best.expect("at least one combination");
    let mut centers: Vec<_> = picked.iter().map(|&c| cands[c].clone()).collect();
    // Fewer candidates than k: repeat the first pick.
    while centers.len() < k {
        centers.push(centers[0].clone());
    }
    Ok(Clustering::new(centers))
}
