use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algorithms::{
    alg_greedy_ball, alg_line, alg_mst_cover, alg_refined, alg_tree, optimal_total_distance,
    LambdaParam,
};
use crate::audit::{max_blocking_size, min_beta};
use crate::baselines::{kmeans_pp, lloyd_kmedians, social_cost, LloydParams, ObjectiveKind};
use crate::error::{Error, Result};
use crate::instance::{
    gen_appendix_tree, gen_clique, gen_gaussian, gen_k4, gen_kmedians_bad, gen_line_alpha_lb,
    gen_line_beta_lb, load_instance, load_points_csv, load_tree_edges, Candidates, Clustering,
    GaussianParams, Instance, DEFAULT_PART_SPACING,
};
use crate::metric::SpaceKind;

/// How `λ` is chosen for the line and tree procedures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaChoice {
    /// `⌈n/k⌉`.
    Quota,
    /// `⌈n/(k+1)⌉`.
    QuotaPlusOne,
    Fixed(usize),
}

impl LambdaChoice {
    pub fn resolve(self, inst: &Instance) -> Result<LambdaParam> {
        match self {
            LambdaChoice::Quota => Ok(LambdaParam::quota(inst)),
            LambdaChoice::QuotaPlusOne => Ok(LambdaParam::quota_plus_one(inst)),
            LambdaChoice::Fixed(l) => LambdaParam::new(l, inst.n()),
        }
    }
}

/// A clustering procedure by name.
///
/// Names: `line`, `line-small` (λ = ⌈n/(k+1)⌉), `tree`, `greedy`, `mst`,
/// `refined-kmeans`, `refined-kmedians`, `refined-medoid`, `kmeans`,
/// `kmedians`, `optimal`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlgorithmSpec {
    Line(LambdaChoice),
    Tree(LambdaChoice),
    Greedy,
    Mst,
    Refined(ObjectiveKind),
    KMeans,
    KMedians,
    Optimal,
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "line" => AlgorithmSpec::Line(LambdaChoice::Quota),
            "line-small" => AlgorithmSpec::Line(LambdaChoice::QuotaPlusOne),
            "tree" => AlgorithmSpec::Tree(LambdaChoice::Quota),
            "greedy" => AlgorithmSpec::Greedy,
            "mst" => AlgorithmSpec::Mst,
            "refined" | "refined-kmeans" => AlgorithmSpec::Refined(ObjectiveKind::KMeansSq),
            "refined-kmedians" => AlgorithmSpec::Refined(ObjectiveKind::KMediansL1),
            "refined-medoid" => AlgorithmSpec::Refined(ObjectiveKind::MetricMedoid),
            "kmeans" => AlgorithmSpec::KMeans,
            "kmedians" => AlgorithmSpec::KMedians,
            "optimal" => AlgorithmSpec::Optimal,
            other => return Err(Error::Parse(format!("unknown algorithm `{other}`"))),
        })
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lambda = |l: &LambdaChoice| match l {
            LambdaChoice::Quota => String::new(),
            LambdaChoice::QuotaPlusOne => "-small".into(),
            LambdaChoice::Fixed(v) => format!("-l{v}"),
        };
        match self {
            AlgorithmSpec::Line(l) => write!(f, "line{}", lambda(l)),
            AlgorithmSpec::Tree(l) => write!(f, "tree{}", lambda(l)),
            AlgorithmSpec::Greedy => f.write_str("greedy"),
            AlgorithmSpec::Mst => f.write_str("mst"),
            AlgorithmSpec::Refined(ObjectiveKind::KMeansSq) => f.write_str("refined-kmeans"),
            AlgorithmSpec::Refined(ObjectiveKind::KMediansL1) => f.write_str("refined-kmedians"),
            AlgorithmSpec::Refined(ObjectiveKind::MetricMedoid) => f.write_str("refined-medoid"),
            AlgorithmSpec::KMeans => f.write_str("kmeans"),
            AlgorithmSpec::KMedians => f.write_str("kmedians"),
            AlgorithmSpec::Optimal => f.write_str("optimal"),
        }
    }
}

/// Finite-candidate procedures run on the agent locations when the instance
/// allows any point of the line.
fn finite(inst: &Instance) -> std::borrow::Cow<'_, Instance> {
    match inst.candidates() {
        Candidates::ContinuousLine => std::borrow::Cow::Owned(inst.with_agent_candidates()),
        Candidates::Finite(_) => std::borrow::Cow::Borrowed(inst),
    }
}

/// Runs one procedure. `seed` only matters for the Lloyd baselines.
pub fn run_algorithm(inst: &Instance, alg: AlgorithmSpec, seed: u64) -> Result<Clustering> {
    let lloyd = |f: fn(&[Vec<f64>], usize, &LloydParams) -> Result<crate::baselines::LloydOutcome>| {
        let points = inst.coordinates()?;
        f(&points, inst.k(), &LloydParams::with_seed(seed))?.to_clustering(inst)
    };
    match alg {
        AlgorithmSpec::Line(l) => alg_line(inst, l.resolve(inst)?),
        AlgorithmSpec::Tree(l) => alg_tree(inst, l.resolve(inst)?, 0),
        AlgorithmSpec::Greedy => Ok(alg_greedy_ball(&finite(inst))?.0),
        AlgorithmSpec::Mst => alg_mst_cover(&finite(inst)),
        AlgorithmSpec::Refined(obj) => Ok(alg_refined(&finite(inst), obj)?.0),
        AlgorithmSpec::KMeans => lloyd(kmeans_pp),
        AlgorithmSpec::KMedians => lloyd(lloyd_kmedians),
        AlgorithmSpec::Optimal => optimal_total_distance(inst),
    }
}

/// A data source for the comparison harness.
///
/// Names: `k4`, `clique:N`, `line-beta:K`, `line-alpha:C`, `appendix-tree`,
/// `kmedians-bad:M`, `gaussian` or `gaussian:N`, `points:PATH` (text or CSV
/// coordinates), `tree:PATH` (edge list, one agent per vertex),
/// `instance:PATH` (instance JSON).
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    K4,
    Clique(usize),
    LineBeta(usize),
    LineAlpha(usize),
    AppendixTree,
    KMediansBad(usize),
    Gaussian(GaussianParams),
    Points(PathBuf),
    TreeEdges(PathBuf),
    InstanceFile(PathBuf),
}

impl FromStr for DatasetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (s, None),
        };
        let int = |what: &str| -> Result<usize> {
            arg.ok_or_else(|| Error::Parse(format!("dataset `{name}` needs `{name}:{what}`")))?
                .parse()
                .map_err(|e| Error::Parse(format!("dataset `{s}`: {e}")))
        };
        let path = || -> Result<PathBuf> {
            arg.map(PathBuf::from)
                .ok_or_else(|| Error::Parse(format!("dataset `{name}` needs a path")))
        };
        Ok(match name {
            "k4" => DatasetSpec::K4,
            "clique" => DatasetSpec::Clique(int("N")?),
            "line-beta" => DatasetSpec::LineBeta(int("K")?),
            "line-alpha" => DatasetSpec::LineAlpha(int("C")?),
            "appendix-tree" => DatasetSpec::AppendixTree,
            "kmedians-bad" => DatasetSpec::KMediansBad(int("M")?),
            "gaussian" => {
                let mut p = GaussianParams::default();
                if arg.is_some() {
                    p.n = int("N")?;
                }
                DatasetSpec::Gaussian(p)
            }
            "points" => DatasetSpec::Points(path()?),
            "tree" => DatasetSpec::TreeEdges(path()?),
            "instance" => DatasetSpec::InstanceFile(path()?),
            other => return Err(Error::Parse(format!("unknown dataset `{other}`"))),
        })
    }
}

impl fmt::Display for DatasetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let stem = |p: &PathBuf| {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string())
        };
        match self {
            DatasetSpec::K4 => f.write_str("k4"),
            DatasetSpec::Clique(n) => write!(f, "clique{n}"),
            DatasetSpec::LineBeta(k) => write!(f, "line-beta{k}"),
            DatasetSpec::LineAlpha(c) => write!(f, "line-alpha{c}"),
            DatasetSpec::AppendixTree => f.write_str("appendix-tree"),
            DatasetSpec::KMediansBad(m) => write!(f, "kmedians-bad{m}"),
            DatasetSpec::Gaussian(p) => write!(f, "gaussian{}", p.n),
            DatasetSpec::Points(p) | DatasetSpec::TreeEdges(p) | DatasetSpec::InstanceFile(p) => {
                f.write_str(&stem(p))
            }
        }
    }
}

impl DatasetSpec {
    /// Builds the instance. `k` is applied afterwards by the harness.
    pub fn load(&self) -> Result<Instance> {
        match self {
            DatasetSpec::K4 => Ok(gen_k4()),
            DatasetSpec::Clique(n) => gen_clique(*n),
            DatasetSpec::LineBeta(k) => gen_line_beta_lb(*k),
            DatasetSpec::LineAlpha(c) => gen_line_alpha_lb(*c, DEFAULT_PART_SPACING),
            DatasetSpec::AppendixTree => Ok(gen_appendix_tree()),
            DatasetSpec::KMediansBad(m) => gen_kmedians_bad(*m),
            DatasetSpec::Gaussian(p) => gen_gaussian(p),
            DatasetSpec::Points(p) => load_points_csv(p, 1),
            DatasetSpec::TreeEdges(p) => load_tree_edges(p, 1, true),
            DatasetSpec::InstanceFile(p) => load_instance(p),
        }
    }
}

/// One audited run of one procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub dataset: String,
    pub algorithm: String,
    pub k: usize,
    /// `k·s_max/n` at `β = 1`.
    #[serde(with = "crate::serde_inf")]
    pub alpha_sup: f64,
    /// Smallest `β` at `α = 1`.
    #[serde(with = "crate::serde_inf")]
    pub beta_min: f64,
    /// Σ squared distances (squared Euclidean on coordinates, squared metric
    /// distance otherwise).
    #[serde(with = "crate::serde_inf")]
    pub social_cost_kmeans: f64,
    /// Σ Manhattan distances on coordinates, Σ metric distances otherwise.
    #[serde(with = "crate::serde_inf")]
    pub social_cost_kmedians: f64,
    pub wall_time_ms: f64,
    pub seed: u64,
    /// Set when the cell failed; the numeric fields are then NaN.
    #[serde(default)]
    pub error: String,
}

/// FNV-1a over the master seed and the row coordinates.
pub fn row_seed(master: u64, dataset: &str, algorithm: &str, k: usize) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: &[u8]| {
        for b in bytes {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    };
    eat(&master.to_le_bytes());
    eat(dataset.as_bytes());
    eat(algorithm.as_bytes());
    eat(&(k as u64).to_le_bytes());
    h
}

fn costs(inst: &Instance, centers: &[crate::metric::Point]) -> Result<(f64, f64)> {
    match inst.space().kind() {
        SpaceKind::Line | SpaceKind::Euclidean { .. } => Ok((
            social_cost(inst, centers, ObjectiveKind::KMeansSq)?,
            social_cost(inst, centers, ObjectiveKind::KMediansL1)?,
        )),
        _ => {
            let d = inst.distances_to(centers);
            Ok((d.iter().map(|x| x * x).sum(), d.iter().sum()))
        }
    }
}

/// Runs and audits one cell, returning the clustering alongside the row.
pub fn run_cell(
    inst: &Instance,
    dataset: &str,
    alg: AlgorithmSpec,
    master_seed: u64,
) -> (ExperimentRow, Option<Clustering>) {
    let algorithm = alg.to_string();
    let seed = row_seed(master_seed, dataset, &algorithm, inst.k());
    let start = Instant::now();
    let outcome = (|| -> Result<(Clustering, f64, f64, f64, f64)> {
        let y = run_algorithm(inst, alg, seed)?;
        let (s_max, _) = max_blocking_size(inst, &y.centers, 1.0)?;
        let (beta_min, _) = min_beta(inst, &y.centers, 1.0)?;
        let (km, kmed) = costs(inst, &y.centers)?;
        let alpha_sup = inst.k() as f64 * s_max as f64 / inst.n() as f64;
        Ok((y, alpha_sup, beta_min, km, kmed))
    })();
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    let mut row = ExperimentRow {
        dataset: dataset.to_string(),
        algorithm,
        k: inst.k(),
        alpha_sup: f64::NAN,
        beta_min: f64::NAN,
        social_cost_kmeans: f64::NAN,
        social_cost_kmedians: f64::NAN,
        wall_time_ms,
        seed,
        error: String::new(),
    };
    match outcome {
        Ok((y, a, b, km, kmed)) => {
            row.alpha_sup = a;
            row.beta_min = b;
            row.social_cost_kmeans = km;
            row.social_cost_kmedians = kmed;
            (row, Some(y))
        }
        Err(e) => {
            row.error = e.to_string();
            (row, None)
        }
    }
}

/// Every `(dataset, algorithm, k)` combination, audited. Cells that fail
/// keep their row with the error message; rows come back in input order.
pub fn run_comparison(
    datasets: &[DatasetSpec],
    algorithms: &[AlgorithmSpec],
    k_range: (usize, usize),
    seed: u64,
) -> Result<Vec<ExperimentRow>> {
    Ok(run_comparison_with_clusterings(datasets, algorithms, k_range, seed)?
        .into_iter()
        .map(|(row, _, _)| row)
        .collect())
}

/// Like [`run_comparison`], also returning each cell's instance and clustering.
pub fn run_comparison_with_clusterings(
    datasets: &[DatasetSpec],
    algorithms: &[AlgorithmSpec],
    k_range: (usize, usize),
    seed: u64,
) -> Result<Vec<(ExperimentRow, Instance, Option<Clustering>)>> {
    let (lo, hi) = k_range;
    if lo == 0 || lo > hi {
        return Err(Error::Parameter(format!("k range [{lo}, {hi}] is empty")));
    }
    let mut jobs = Vec::new();
    for ds in datasets {
        let base = ds.load()?;
        let label = ds.to_string();
        for k in lo..=hi {
            let inst = base.with_k(k)?;
            for &alg in algorithms {
                jobs.push((label.clone(), inst.clone(), alg));
            }
        }
    }
    Ok(jobs
        .into_par_iter()
        .map(|(label, inst, alg)| {
            let (row, y) = run_cell(&inst, &label, alg, seed);
            (row, inst, y)
        })
        .collect())
}

/// Head-to-head summary of two algorithms on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairSummary {
    pub dataset: String,
    pub first: String,
    pub second: String,
    /// k values where both cells succeeded.
    pub k_values: Vec<usize>,
    /// Count of k with `first.alpha_sup ≤ second.alpha_sup`.
    pub alpha_wins: usize,
    /// Count of k with `first.beta_min ≤ second.beta_min`.
    pub beta_wins: usize,
    /// Largest `first / second` k-means social cost ratio.
    pub max_cost_ratio: f64,
}

pub fn compare_pair(rows: &[ExperimentRow], dataset: &str, first: &str, second: &str) -> PairSummary {
    let find = |alg: &str, k: usize| {
        rows.iter()
            .find(|r| r.dataset == dataset && r.algorithm == alg && r.k == k && r.error.is_empty())
    };
    let mut ks: Vec<usize> = rows.iter().filter(|r| r.dataset == dataset).map(|r| r.k).collect();
    ks.sort_unstable();
    ks.dedup();
    let mut out = PairSummary {
        dataset: dataset.into(),
        first: first.into(),
        second: second.into(),
        k_values: Vec::new(),
        alpha_wins: 0,
        beta_wins: 0,
        max_cost_ratio: 0.0,
    };
    for k in ks {
        let (Some(a), Some(b)) = (find(first, k), find(second, k)) else {
            continue;
        };
        out.k_values.push(k);
        out.alpha_wins += usize::from(a.alpha_sup <= b.alpha_sup);
        out.beta_wins += usize::from(a.beta_min <= b.beta_min);
        let ratio = a.social_cost_kmeans / b.social_cost_kmeans;
        out.max_cost_ratio = out.max_cost_ratio.max(ratio);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for name in [
            "line", "line-small", "tree", "greedy", "mst", "refined-kmeans", "refined-kmedians",
            "refined-medoid", "kmeans", "kmedians", "optimal",
        ] {
            assert_eq!(name.parse::<AlgorithmSpec>().unwrap().to_string(), name);
        }
        assert!("nope".parse::<AlgorithmSpec>().is_err());
        assert_eq!("clique:6".parse::<DatasetSpec>().unwrap(), DatasetSpec::Clique(6));
        assert!("clique".parse::<DatasetSpec>().is_err());
        assert_eq!("gaussian:200".parse::<DatasetSpec>().unwrap().to_string(), "gaussian200");
    }

    #[test]
    fn single_cell() {
        let rows = run_comparison(&[DatasetSpec::K4], &[AlgorithmSpec::Greedy], (2, 2), 0).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].error.is_empty());
        assert!(rows[0].beta_min <= 5.0);
    }

    #[test]
    fn failures_stay_in_the_table() {
        let rows = run_comparison(&[DatasetSpec::K4], &[AlgorithmSpec::KMeans, AlgorithmSpec::Line(LambdaChoice::Quota)], (1, 2), 3)
            .unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| !r.error.is_empty() && r.beta_min.is_nan()));
    }

    #[test]
    fn rows_are_reproducible() {
        let ds = [DatasetSpec::Gaussian(GaussianParams { n: 120, ..Default::default() })];
        let algs = [AlgorithmSpec::KMeans, AlgorithmSpec::Refined(ObjectiveKind::KMeansSq)];
        let a = run_comparison(&ds, &algs, (3, 4), 9).unwrap();
        let b = run_comparison(&ds, &algs, (3, 4), 9).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!((x.alpha_sup, x.beta_min, x.seed), (y.alpha_sup, y.beta_min, y.seed));
            assert_eq!(x.social_cost_kmeans, y.social_cost_kmeans);
        }
    }

    #[test]
    fn seeds_differ_per_cell() {
        assert_ne!(row_seed(0, "a", "kmeans", 3), row_seed(0, "a", "kmeans", 4));
        assert_ne!(row_seed(0, "a", "kmeans", 3), row_seed(1, "a", "kmeans", 3));
        assert_eq!(row_seed(5, "d", "x", 2), row_seed(5, "d", "x", 2));
    }

    #[test]
    fn alpha_sup_is_the_membership_threshold() {
        let ds = [DatasetSpec::Gaussian(GaussianParams { n: 80, ..Default::default() }), DatasetSpec::Clique(8)];
        let algs = [AlgorithmSpec::Greedy, AlgorithmSpec::Refined(ObjectiveKind::MetricMedoid), AlgorithmSpec::Mst];
        let cells = run_comparison_with_clusterings(&ds, &algs, (4, 6), 2).unwrap();
        let mut checked = 0;
        for (row, inst, y) in &cells {
            let Some(y) = y else { continue };
            let eps = 1e-6 * row.alpha_sup.max(1.0);
            assert!(crate::audit::is_in_core(inst, &y.centers, row.alpha_sup + eps, 1.0).unwrap().0);
            let (s_max, _) = max_blocking_size(inst, &y.centers, 1.0).unwrap();
            if s_max >= inst.quota() {
                let below = (row.alpha_sup - eps).max(1.0);
                if below < row.alpha_sup {
                    assert!(!crate::audit::is_in_core(inst, &y.centers, below, 1.0).unwrap().0);
                }
                checked += 1;
            }
        }
        assert!(checked > 0);
    }
}
