//! Classic clustering baselines: k-means++ with Lloyd iterations, Lloyd
//! k-medians, and a candidate-restricted medoid optimizer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Clustering, Instance};
use crate::metric::{euclidean, tolerance, Point, Space, SpaceKind};

/// Per-agent cost used by an objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveKind {
    /// Squared Euclidean distance (k-means).
    KMeansSq,
    /// Manhattan distance (k-medians).
    KMediansL1,
    /// The space's own metric, centers restricted to candidates.
    MetricMedoid,
}

impl ObjectiveKind {
    /// Whether the objective is defined on `space`.
    pub fn check(self, space: &Space) -> Result<()> {
        match (self, space.kind()) {
            (ObjectiveKind::MetricMedoid, _) => Ok(()),
            (_, SpaceKind::Line | SpaceKind::Euclidean { .. }) => Ok(()),
            (obj, kind) => Err(Error::Unsupported(format!(
                "{obj:?} needs coordinates, but the space is {kind:?}"
            ))),
        }
    }

    /// Cost of serving `a` from `c`. Both points must belong to `space`.
    #[inline]
    pub fn cost(self, space: &Space, a: &Point, c: &Point) -> f64 {
        match (self, a, c) {
            (ObjectiveKind::MetricMedoid, _, _) => space.dist(a, c),
            (ObjectiveKind::KMeansSq, Point::Coord(x), Point::Coord(y)) => (x - y) * (x - y),
            (ObjectiveKind::KMeansSq, Point::Vector(x), Point::Vector(y)) => {
                x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum()
            }
            (ObjectiveKind::KMediansL1, Point::Coord(x), Point::Coord(y)) => (x - y).abs(),
            (ObjectiveKind::KMediansL1, Point::Vector(x), Point::Vector(y)) => l1(x, y),
            _ => panic!("objective {self:?} is not defined between {a} and {c}"),
        }
    }
}

#[inline]
fn l1(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(p, q)| (p - q).abs()).sum()
}

#[inline]
fn sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// Σ over agents of the cost to the nearest center.
pub fn social_cost(inst: &Instance, centers: &[Point], obj: ObjectiveKind) -> Result<f64> {
    obj.check(inst.space())?;
    if centers.is_empty() {
        return Err(Error::Precondition("social cost of an empty clustering".into()));
    }
    for c in centers {
        inst.space().check(c)?;
    }
    Ok(inst
        .agents()
        .iter()
        .map(|a| {
            centers
                .iter()
                .map(|c| obj.cost(inst.space(), a, c))
                .fold(f64::INFINITY, f64::min)
        })
        .sum())
}

/// Restart and termination settings shared by the Lloyd variants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LloydParams {
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    /// Stop once no centroid moves farther than this.
    pub tol: f64,
}

impl Default for LloydParams {
    fn default() -> Self {
        Self {
            seed: 0,
            restarts: 10,
            max_iter: 100,
            tol: 1e-6,
        }
    }
}

impl LloydParams {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

/// Result of the best restart.
#[derive(Debug, Clone, PartialEq)]
pub struct LloydOutcome {
    pub centers: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub objective: f64,
    /// Objective after every assignment step of the winning restart.
    pub trace: Vec<f64>,
    pub restart: usize,
}

impl LloydOutcome {
    /// Wraps the centers as points of `inst`'s space.
    pub fn to_clustering(&self, inst: &Instance) -> Result<Clustering> {
        self.centers
            .iter()
            .map(|c| inst.point_from_coords(c.clone()))
            .collect::<Result<Vec<_>>>()
            .map(Clustering::new)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Norm {
    SquaredEuclidean,
    Manhattan,
}

impl Norm {
    #[inline]
    fn cost(self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Norm::SquaredEuclidean => sq(x, y),
            Norm::Manhattan => l1(x, y),
        }
    }
}

/// k-means++ seeding followed by Lloyd iterations; best of
/// `params.restarts` runs by objective.
pub fn kmeans_pp(points: &[Vec<f64>], k: usize, params: &LloydParams) -> Result<LloydOutcome> {
    lloyd(points, k, params, Norm::SquaredEuclidean)
}

/// Lloyd iterations for the k-medians objective: Manhattan assignment and
/// coordinate-wise (lower) median updates.
pub fn lloyd_kmedians(points: &[Vec<f64>], k: usize, params: &LloydParams) -> Result<LloydOutcome> {
    lloyd(points, k, params, Norm::Manhattan)
}

fn lloyd(points: &[Vec<f64>], k: usize, params: &LloydParams, norm: Norm) -> Result<LloydOutcome> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::Parameter(format!("k = {k} must lie in [1, n = {n}]")));
    }
    let dim = points[0].len();
    if dim == 0 || points.iter().any(|p| p.len() != dim) {
        return Err(Error::Parameter("points must share a positive dimension".into()));
    }
    let restarts = params.restarts.max(1);
    let runs: Vec<LloydOutcome> = (0..restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            rng.set_stream(r as u64);
            single_run(points, k, params, norm, &mut rng, r)
        })
        .collect();
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if run.objective < runs[best].objective {
            best = i;
        }
    }
    Ok(runs.into_iter().nth(best).expect("at least one restart"))
}

fn seed_centers(points: &[Vec<f64>], k: usize, norm: Norm, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers = vec![points[rng.random_range(0..n)].clone()];
    let mut weight: Vec<f64> = points.iter().map(|p| norm.cost(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = weight.iter().sum();
        let pick = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, w) in weight.iter().enumerate() {
                if *w > 0.0 && u < *w {
                    chosen = i;
                    break;
                }
                u -= w;
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        centers.push(points[pick].clone());
        let c = centers.last().expect("just pushed");
        for (w, p) in weight.iter_mut().zip(points) {
            *w = w.min(norm.cost(p, c));
        }
    }
    centers
}

fn assign(points: &[Vec<f64>], centers: &[Vec<f64>], norm: Norm) -> (Vec<usize>, Vec<f64>) {
    points
        .iter()
        .map(|p| {
            let mut best = (0, f64::INFINITY);
            for (j, c) in centers.iter().enumerate() {
                let d = norm.cost(p, c);
                if d < best.1 {
                    best = (j, d);
                }
            }
            best
        })
        .unzip()
}

fn lower_median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

fn single_run(
    points: &[Vec<f64>],
    k: usize,
    params: &LloydParams,
    norm: Norm,
    rng: &mut ChaCha8Rng,
    restart: usize,
) -> LloydOutcome {
    let dim = points[0].len();
    let mut centers = seed_centers(points, k, norm, rng);
    let mut trace = Vec::new();
    for _ in 0..params.max_iter {
        let (assignment, costs) = assign(points, &centers, norm);
        trace.push(costs.iter().sum());

        let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (i, &j) in assignment.iter().enumerate() {
            members[j].push(i);
        }
        let mut next = centers.clone();
        for (j, m) in members.iter().enumerate() {
            if m.is_empty() {
                continue;
            }
            next[j] = match norm {
                Norm::SquaredEuclidean => {
                    let mut mean = vec![0.0; dim];
                    for &i in m {
                        for (acc, x) in mean.iter_mut().zip(&points[i]) {
                            *acc += x;
                        }
                    }
                    mean.iter_mut().for_each(|x| *x /= m.len() as f64);
                    mean
                }
                Norm::Manhattan => (0..dim)
                    .map(|d| {
                        let mut col: Vec<f64> = m.iter().map(|&i| points[i][d]).collect();
                        lower_median(&mut col)
                    })
                    .collect(),
            };
        }
        // Empty clusters move to the point farthest from its current center.
        let mut taken = vec![false; points.len()];
        for j in (0..k).filter(|&j| members[j].is_empty()) {
            let far = (0..points.len())
                .filter(|&i| !taken[i])
                .max_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(b.cmp(&a)));
            if let Some(i) = far {
                taken[i] = true;
                next[j] = points[i].clone();
            }
        }
        let moved = centers
            .iter()
            .zip(&next)
            .map(|(a, b)| euclidean(a, b))
            .fold(0.0, f64::max);
        centers = next;
        if moved < params.tol {
            break;
        }
    }
    let (assignment, costs) = assign(points, &centers, norm);
    let objective = costs.iter().sum();
    trace.push(objective);
    LloydOutcome {
        centers,
        assignment,
        objective,
        trace,
        restart,
    }
}

/// Picks `k_i` candidate centers minimizing `obj` summed over the agents in
/// `subset`.
///
/// One center is found by exhaustive scan. More centers are chosen by
/// greedy forward selection followed by best-improvement single swaps until
/// no swap lowers the cost. Ties go to the lowest candidate index.
pub fn medoid_opt(
    inst: &Instance,
    subset: &[usize],
    k_i: usize,
    obj: ObjectiveKind,
) -> Result<Vec<Point>> {
    obj.check(inst.space())?;
    if subset.is_empty() {
        return Err(Error::Precondition("medoid selection over no agents".into()));
    }
    if let Some(&bad) = subset.iter().find(|&&i| i >= inst.n()) {
        return Err(Error::Parameter(format!("agent index {bad} out of range")));
    }
    if k_i == 0 {
        return Ok(Vec::new());
    }
    let cands = inst.candidate_points();
    let space = inst.space();
    let m = cands.len();
    // cost[a * m + c]
    let cost: Vec<f64> = subset
        .par_iter()
        .flat_map_iter(|&i| {
            let a = &inst.agents()[i];
            cands.iter().map(move |c| obj.cost(space, a, c))
        })
        .collect();
    let rows = subset.len();
    let column_total = |c: usize| (0..rows).map(|a| cost[a * m + c]).sum::<f64>();

    let mut chosen: Vec<usize> = Vec::with_capacity(k_i);
    let mut best = vec![f64::INFINITY; rows];
    while chosen.len() < k_i {
        let totals: Vec<f64> = (0..m)
            .into_par_iter()
            .map(|c| {
                if best[0].is_infinite() {
                    column_total(c)
                } else {
                    (0..rows).map(|a| best[a].min(cost[a * m + c])).sum()
                }
            })
            .collect();
        let pick = argmin(&totals);
        chosen.push(pick);
        for (a, b) in best.iter_mut().enumerate() {
            *b = b.min(cost[a * m + pick]);
        }
    }
    if k_i >= 2 {
        swap_search(&cost, rows, m, &mut chosen);
    }
    Ok(chosen.into_iter().map(|c| cands[c].clone()).collect())
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v < values[best] - tolerance(values[best]) {
            best = i;
        }
    }
    best
}

fn swap_search(cost: &[f64], rows: usize, m: usize, chosen: &mut [usize]) {
    let k = chosen.len();
    for _ in 0..1000 {
        // Nearest and second-nearest chosen position per agent.
        let mut first = vec![(f64::INFINITY, 0usize); rows];
        let mut second = vec![f64::INFINITY; rows];
        for a in 0..rows {
            for (p, &c) in chosen.iter().enumerate() {
                let v = cost[a * m + c];
                if v < first[a].0 {
                    second[a] = first[a].0;
                    first[a] = (v, p);
                } else if v < second[a] {
                    second[a] = v;
                }
            }
        }
        let current: f64 = first.iter().map(|f| f.0).sum();
        let moves: Vec<(f64, usize, usize)> = (0..k)
            .into_par_iter()
            .map(|p| {
                let mut best = (f64::INFINITY, p, chosen[p]);
                for c in 0..m {
                    if chosen.contains(&c) {
                        continue;
                    }
                    let total: f64 = (0..rows)
                        .map(|a| {
                            let keep = if first[a].1 == p { second[a] } else { first[a].0 };
                            keep.min(cost[a * m + c])
                        })
                        .sum();
                    if total < best.0 {
                        best = (total, p, c);
                    }
                }
                best
            })
            .collect();
        let mut pick = moves[0];
        for mv in &moves[1..] {
            if mv.0 < pick.0 {
                pick = *mv;
            }
        }
        if pick.0 < current - tolerance(current) {
            chosen[pick.1] = pick.2;
        } else {
            break;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_kmedians_bad, Candidates};

    fn line(points: &[f64]) -> Vec<Vec<f64>> {
        points.iter().map(|x| vec![*x]).collect()
    }

    #[test]
    fn separated_pairs() {
        let pts = vec![vec![0.0, 0.0], vec![0.0, 2.0], vec![10.0, 0.0], vec![10.0, 2.0]];
        let out = kmeans_pp(&pts, 2, &LloydParams::default()).unwrap();
        let mut c = out.centers.clone();
        c.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(c, vec![vec![0.0, 1.0], vec![10.0, 1.0]]);
        assert_eq!(out.objective, 4.0);
    }

    #[test]
    fn single_cluster_is_mean() {
        let out = kmeans_pp(&line(&[1.0, 2.0, 6.0]), 1, &LloydParams::default()).unwrap();
        assert_eq!(out.centers, vec![vec![3.0]]);
    }

    #[test]
    fn k_equals_n_is_free() {
        let pts = line(&[0.0, 1.0, 5.0, 9.0]);
        assert_eq!(kmeans_pp(&pts, 4, &LloydParams::default()).unwrap().objective, 0.0);
        assert_eq!(lloyd_kmedians(&pts, 4, &LloydParams::default()).unwrap().objective, 0.0);
        assert!(kmeans_pp(&pts, 5, &LloydParams::default()).is_err());
    }

    #[test]
    fn kmedians_takes_median() {
        let out = lloyd_kmedians(&line(&[0.0, 0.0, 10.0]), 1, &LloydParams::default()).unwrap();
        assert_eq!(out.centers, vec![vec![0.0]]);
    }

    #[test]
    fn kmedians_trap_group_median() {
        let inst = gen_kmedians_bad(7).unwrap();
        let group: Vec<Vec<f64>> = inst
            .coordinates()
            .unwrap()
            .into_iter()
            .filter(|p| p[0] <= 2.0)
            .collect();
        let out = lloyd_kmedians(&group, 1, &LloydParams::default()).unwrap();
        assert_eq!(out.centers, vec![vec![1.0]]);
    }

    #[test]
    fn deterministic_per_seed() {
        let pts: Vec<Vec<f64>> = (0..50).map(|i| vec![(i * 37 % 17) as f64, (i % 7) as f64]).collect();
        let p = LloydParams::with_seed(3);
        assert_eq!(kmeans_pp(&pts, 4, &p).unwrap(), kmeans_pp(&pts, 4, &p).unwrap());
    }

    #[test]
    fn medoid_cases() {
        let agents: Vec<Point> = [0.0, 1.0, 2.0].iter().map(|x| Point::Coord(*x)).collect();
        let inst = Instance::new(
            "m",
            Space::Line,
            agents.clone(),
            Candidates::Finite(agents),
            1,
        )
        .unwrap();
        assert_eq!(
            medoid_opt(&inst, &[0, 1, 2], 1, ObjectiveKind::MetricMedoid).unwrap(),
            vec![Point::Coord(1.0)]
        );
        assert_eq!(
            medoid_opt(&inst, &[2], 1, ObjectiveKind::MetricMedoid).unwrap(),
            vec![Point::Coord(2.0)]
        );
        let all = medoid_opt(&inst, &[0, 1, 2], 3, ObjectiveKind::KMeansSq).unwrap();
        assert_eq!(social_cost(&inst, &all, ObjectiveKind::KMeansSq).unwrap(), 0.0);
        assert!(medoid_opt(&inst, &[], 1, ObjectiveKind::MetricMedoid).is_err());
    }

    #[test]
    fn social_cost_cases() {
        let inst = Instance::new(
            "s",
            Space::Line,
            vec![Point::Coord(0.0), Point::Coord(2.0)],
            Candidates::ContinuousLine,
            1,
        )
        .unwrap();
        let y = [Point::Coord(1.0)];
        assert_eq!(social_cost(&inst, &y, ObjectiveKind::KMeansSq).unwrap(), 2.0);
        assert_eq!(social_cost(&inst, &y, ObjectiveKind::KMediansL1).unwrap(), 2.0);
        let on = [Point::Coord(0.0), Point::Coord(2.0)];
        assert_eq!(social_cost(&inst, &on, ObjectiveKind::KMeansSq).unwrap(), 0.0);
    }

    #[test]
    fn objectives_need_coordinates() {
        let inst = crate::instance::gen_k4();
        assert!(social_cost(&inst, &[Point::Vertex(0)], ObjectiveKind::KMeansSq).is_err());
        assert!(social_cost(&inst, &[Point::Vertex(0)], ObjectiveKind::MetricMedoid).is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_points() -> impl Strategy<Value = Vec<Vec<f64>>> {
            proptest::collection::vec(proptest::collection::vec(-20.0f64..20.0, 2), 4..40)
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(24))]

            #[test]
            fn lloyd_trace_is_monotone(pts in arb_points(), k in 1usize..4, seed in 0u64..100) {
                let p = LloydParams { seed, restarts: 1, ..Default::default() };
                for out in [kmeans_pp(&pts, k, &p).unwrap(), lloyd_kmedians(&pts, k, &p).unwrap()] {
                    for w in out.trace.windows(2) {
                        prop_assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0), "{:?}", out.trace);
                    }
                }
            }

            #[test]
            fn more_restarts_never_worse(pts in arb_points(), k in 1usize..4, seed in 0u64..100) {
                let few = LloydParams { seed, restarts: 2, ..Default::default() };
                let many = LloydParams { seed, restarts: 6, ..Default::default() };
                prop_assert!(kmeans_pp(&pts, k, &many).unwrap().objective
                    <= kmeans_pp(&pts, k, &few).unwrap().objective);
            }

            #[test]
            fn single_medoid_matches_scan(
                xs in proptest::collection::vec(-20.0f64..20.0, 1..15),
                pick in proptest::collection::vec(any::<prop::sample::Index>(), 1..15),
            ) {
                let agents: Vec<Point> = xs.iter().map(|x| Point::Coord(*x)).collect();
                let inst = Instance::new("p", Space::Line, agents.clone(), Candidates::Finite(agents.clone()), 1).unwrap();
                let mut subset: Vec<usize> = pick.iter().map(|i| i.index(xs.len())).collect();
                subset.sort_unstable();
                subset.dedup();
                for obj in [ObjectiveKind::KMeansSq, ObjectiveKind::KMediansL1, ObjectiveKind::MetricMedoid] {
                    let got = medoid_opt(&inst, &subset, 1, obj).unwrap();
                    let cost_of = |c: &Point| subset.iter().map(|&i| obj.cost(inst.space(), &agents[i], c)).sum::<f64>();
                    let best = agents.iter().map(cost_of).fold(f64::INFINITY, f64::min);
                    prop_assert!((cost_of(&got[0]) - best).abs() <= 1e-9 * best.max(1.0));
                }
            }
        }
    }
}
