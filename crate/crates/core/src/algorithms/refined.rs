use serde::{Deserialize, Serialize};

use super::greedy_natural_centers;
use crate::baselines::{medoid_opt, ObjectiveKind};
use crate::error::Result;
use crate::instance::{Clustering, Instance};
use crate::metric::Point;

/// Objective optimized inside each preliminary cluster.
pub type RefinedObjective = ObjectiveKind;

/// How the refined procedure split the budget of `k` centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedPlan {
    /// Centers that opened on their own during ball growth.
    pub preliminary: Vec<Point>,
    /// Agent indices served by each preliminary center.
    pub clusters: Vec<Vec<usize>>,
    /// Centers granted to each cluster.
    pub budgets: Vec<usize>,
    /// Clusters that were rounded up.
    pub remainder: usize,
}

/// Splits `k` centers proportionally to cluster sizes.
///
/// Every cluster first gets `⌊|N_i|·k/n⌋`. The `r` leftover centers go one
/// each to the clusters with the largest remainders `|N_i| mod (n/k)`,
/// earlier clusters first on ties. Returns the budgets and `r`.
pub fn proportional_budgets(sizes: &[usize], k: usize) -> (Vec<usize>, usize) {
    let n: usize = sizes.iter().sum();
    let floors: Vec<usize> = sizes.iter().map(|s| s * k / n).collect();
    // Scaled by k so the remainders stay integral.
    let keys: Vec<usize> = sizes.iter().zip(&floors).map(|(s, f)| s * k - f * n).collect();
    let r = k - floors.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| keys[b].cmp(&keys[a]));
    let mut budgets = floors;
    for &i in &order[..r] {
        budgets[i] += 1;
    }
    (budgets, r)
}

/// Two stages. Ball growth supplies preliminary centers and every agent
/// joins its nearest one. Then each cluster receives a proportional share
/// of the `k` centers, placed by minimizing `obj` over that cluster's
/// agents with any candidate allowed.
pub fn alg_refined(inst: &Instance, obj: RefinedObjective) -> Result<(Clustering, RefinedPlan)> {
    obj.check(inst.space())?;
    let (preliminary, _) = greedy_natural_centers(inst)?;
    let mut clusters = vec![Vec::new(); preliminary.len()];
    for (i, j) in inst.assign(&preliminary).into_iter().enumerate() {
        clusters[j].push(i);
    }
    let sizes: Vec<usize> = clusters.iter().map(Vec::len).collect();
    let (budgets, remainder) = proportional_budgets(&sizes, inst.k());

    let mut centers = Vec::with_capacity(inst.k());
    for (members, &b) in clusters.iter().zip(&budgets) {
        if b > 0 {
            centers.extend(medoid_opt(inst, members, b, obj)?);
        }
    }
    Ok((
        Clustering::new(centers),
        RefinedPlan {
            preliminary,
            clusters,
            budgets,
            remainder,
        },
    ))
}
