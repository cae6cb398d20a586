//! Constructive clustering procedures with core guarantees.
//!
//! | function | space | idea |
//! |---|---|---|
//! | [`alg_line`] | line | centers at every λ-th sorted agent |
//! | [`alg_tree`] | tree | bottom-up subtree cutting |
//! | [`alg_greedy_ball`] | any finite | growing balls that capture `⌈n/k⌉` agents |
//! | [`alg_mst_cover`] | any finite, large `k` | vertex cover of a spanning tree |
//! | [`alg_refined`] | any finite | greedy partition, then proportional budgets |
//! | [`optimal_total_distance`] | small instances | exhaustive minimum of total distance |
//!
//! When a procedure ends with fewer than `k` centers, the rest are chosen by
//! greedy 1-median additions ([`greedy_fill`]).

mod exact;
mod greedy;
mod line;
mod mst;
mod refined;
mod tree;

pub use exact::{optimal_total_distance, EXACT_MAX_AGENTS, EXACT_MAX_CANDIDATES};
pub use greedy::{alg_greedy_ball, greedy_natural_centers, EventKind, GreedyEvent, GreedyTrace};
pub use line::alg_line;
pub use mst::{alg_mst_cover, minimum_spanning_tree};
pub use refined::{alg_refined, proportional_budgets, RefinedObjective, RefinedPlan};
pub use tree::{alg_tree, component_loads};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::metric::{tolerance, Point};

/// Quantile step `λ` for the line and tree procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LambdaParam(usize);

impl LambdaParam {
    /// `1 ≤ λ ≤ n`.
    pub fn new(lambda: usize, n: usize) -> Result<Self> {
        if lambda == 0 || lambda > n {
            return Err(Error::Parameter(format!("λ = {lambda} must lie in [1, n = {n}]")));
        }
        Ok(Self(lambda))
    }

    /// `⌈n/k⌉`.
    pub fn quota(inst: &Instance) -> Self {
        Self(inst.quota())
    }

    /// `⌈n/(k+1)⌉`, the smaller step that trades β for α on the line.
    pub fn quota_plus_one(inst: &Instance) -> Self {
        Self(inst.n().div_ceil(inst.k() + 1))
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl std::fmt::Display for LambdaParam {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Adds candidates one at a time until there are `k` centers, each time
/// taking the one that lowers total agent distance the most (lowest
/// candidate index on ties). With no centers yet, the first pick is a
/// 1-median.
pub fn greedy_fill(inst: &Instance, centers: &mut Vec<Point>) {
    let cands = inst.candidate_points();
    let space = inst.space();
    let mut current = if centers.is_empty() {
        None
    } else {
        Some(inst.distances_to(centers))
    };
    while centers.len() < inst.k() {
        let mut best: Option<(f64, usize)> = None;
        for (c, p) in cands.iter().enumerate() {
            // Score = resulting total distance; lower is better.
            let score: f64 = inst
                .agents()
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let d = space.dist(a, p);
                    match &current {
                        Some(cur) => cur[i].min(d),
                        None => d,
                    }
                })
                .sum();
            match best {
                Some((b, _)) if score >= b - tolerance(b) => {}
                _ => best = Some((score, c)),
            }
        }
        let (_, pick) = best.expect("candidate set is non-empty");
        let p = cands[pick].clone();
        let cur = current.get_or_insert_with(|| vec![f64::INFINITY; inst.n()]);
        for (c, a) in cur.iter_mut().zip(inst.agents()) {
            *c = c.min(space.dist(a, &p));
        }
        centers.push(p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_k4, Candidates};
    use crate::metric::Space;

    #[test]
    fn lambda_bounds() {
        assert!(LambdaParam::new(0, 5).is_err());
        assert!(LambdaParam::new(6, 5).is_err());
        assert_eq!(LambdaParam::new(5, 5).unwrap().get(), 5);
    }

    #[test]
    fn lambda_choices() {
        let agents = (0..6).map(|x| Point::Coord(x as f64)).collect();
        let inst = Instance::new("l", Space::Line, agents, Candidates::ContinuousLine, 2).unwrap();
        assert_eq!(LambdaParam::quota(&inst).get(), 3);
        assert_eq!(LambdaParam::quota_plus_one(&inst).get(), 2);
    }

    #[test]
    fn fill_from_empty_is_median_first() {
        let agents: Vec<Point> = [0.0, 0.0, 10.0].iter().map(|x| Point::Coord(*x)).collect();
        let cands = [0.0, 1.0, 10.0].iter().map(|x| Point::Coord(*x)).collect();
        let inst = Instance::new("f", Space::Line, agents, Candidates::Finite(cands), 2).unwrap();
        let mut y = Vec::new();
        greedy_fill(&inst, &mut y);
        assert_eq!(y, vec![Point::Coord(0.0), Point::Coord(10.0)]);
    }

    #[test]
    fn fill_breaks_ties_by_index() {
        let inst = gen_k4();
        let mut y = vec![Point::Vertex(2)];
        greedy_fill(&inst, &mut y);
        assert_eq!(y, vec![Point::Vertex(2), Point::Vertex(0)]);
    }
}
