use serde::{Deserialize, Serialize};

use super::greedy_fill;
use crate::error::{Error, Result};
use crate::instance::{Candidates, Clustering, Instance};
use crate::metric::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    /// An open center's ball reached more uncovered agents.
    Absorb,
    /// A candidate's ball gathered the quota and became a center.
    Open,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreedyEvent {
    pub delta: f64,
    pub kind: EventKind,
    pub center: Point,
    /// Agent indices covered by this event, ascending.
    pub removed: Vec<usize>,
}

/// The sequence of ball events, in the order they happened.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GreedyTrace {
    pub events: Vec<GreedyEvent>,
}

impl GreedyTrace {
    /// Centers in opening order.
    pub fn opened(&self) -> Vec<Point> {
        self.events
            .iter()
            .filter(|e| e.kind == EventKind::Open)
            .map(|e| e.center.clone())
            .collect()
    }
}

/// Runs the ball growth without filling: returns the centers that opened
/// on their own together with the trace.
pub fn greedy_natural_centers(inst: &Instance) -> Result<(Vec<Point>, GreedyTrace)> {
    let cands = match inst.candidates() {
        Candidates::Finite(list) => list,
        Candidates::ContinuousLine => {
            return Err(Error::Unsupported(
                "ball growth needs a finite candidate set; use the quantile procedure on the line"
                    .into(),
            ))
        }
    };
    let (n, m, quota) = (inst.n(), cands.len(), inst.quota());
    let space = inst.space();
    let dist: Vec<f64> = cands
        .iter()
        .flat_map(|c| inst.agents().iter().map(move |a| space.dist(c, a)))
        .collect();
    let d = |c: usize, i: usize| dist[c * n + i];

    let mut pairs: Vec<(usize, usize)> = (0..m).flat_map(|c| (0..n).map(move |i| (c, i))).collect();
    pairs.sort_by(|a, b| d(a.0, a.1).total_cmp(&d(b.0, b.1)).then(a.cmp(b)));

    let mut covered = vec![false; n];
    let mut uncovered = n;
    // Uncovered agents inside each candidate's current ball.
    let mut inside = vec![0usize; m];
    let mut opened: Vec<usize> = Vec::new();
    let mut rank: Vec<Option<usize>> = vec![None; m];
    let mut trace = GreedyTrace::default();

    let cover = |i: usize, delta: f64, covered: &mut Vec<bool>, inside: &mut Vec<usize>| {
        covered[i] = true;
        for (c, count) in inside.iter_mut().enumerate() {
            if d(c, i) <= delta {
                *count -= 1;
            }
        }
    };

    let mut p = 0;
    while uncovered > 0 && p < pairs.len() {
        let delta = d(pairs[p].0, pairs[p].1);
        let mut q = p;
        let mut touched = Vec::new();
        while q < pairs.len() && d(pairs[q].0, pairs[q].1) == delta {
            let (c, i) = pairs[q];
            if !covered[i] {
                inside[c] += 1;
                touched.push(c);
            }
            q += 1;
        }

        // Open centers absorb first, in the order they opened. Agents
        // closer than δ were absorbed at an earlier step, so only the pairs
        // at exactly δ matter.
        let mut grabs: Vec<(usize, usize)> = pairs[p..q]
            .iter()
            .filter_map(|&(c, i)| rank[c].map(|r| (r, i)))
            .collect();
        grabs.sort_unstable();
        for (r, i) in grabs {
            if covered[i] {
                continue;
            }
            cover(i, delta, &mut covered, &mut inside);
            uncovered -= 1;
            let c = opened[r];
            match trace.events.last_mut() {
                Some(e) if e.kind == EventKind::Absorb && e.delta == delta && e.center == cands[c] => {
                    e.removed.push(i)
                }
                _ => trace.events.push(GreedyEvent {
                    delta,
                    kind: EventKind::Absorb,
                    center: cands[c].clone(),
                    removed: vec![i],
                }),
            }
        }

        touched.sort_unstable();
        touched.dedup();
        for c in touched {
            if rank[c].is_some() || inside[c] < quota {
                continue;
            }
            let removed: Vec<usize> = (0..n).filter(|&i| !covered[i] && d(c, i) <= delta).collect();
            for &i in &removed {
                cover(i, delta, &mut covered, &mut inside);
            }
            uncovered -= removed.len();
            rank[c] = Some(opened.len());
            opened.push(c);
            trace.events.push(GreedyEvent {
                delta,
                kind: EventKind::Open,
                center: cands[c].clone(),
                removed,
            });
        }
        p = q;
    }
    let centers = opened.iter().map(|&c| cands[c].clone()).collect();
    Ok((centers, trace))
}

/// Grows a ball around every candidate at the same rate. A candidate opens
/// once its ball holds `⌈n/k⌉` uncovered agents, and open balls keep
/// swallowing agents as they grow. Missing centers are filled greedily.
pub fn alg_greedy_ball(inst: &Instance) -> Result<(Clustering, GreedyTrace)> {
    let (mut centers, trace) = greedy_natural_centers(inst)?;
    debug_assert!(centers.len() <= inst.k());
    greedy_fill(inst, &mut centers);
    Ok((Clustering::new(centers), trace))
}
