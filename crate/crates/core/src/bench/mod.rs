//! Experiment harness: seeded comparisons, result tables, plots and the
//! bound-verification sweeps.

mod compare;
pub mod random;
mod svg;
mod table;
mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub use compare::{
    compare_pair, row_seed, run_algorithm, run_cell, run_comparison,
    run_comparison_with_clusterings, AlgorithmSpec, DatasetSpec, ExperimentRow, LambdaChoice,
    PairSummary,
};
pub use svg::{clusters_svg, render_clusters_svg};
pub use table::{emit_table, read_table, TableFormat, COLUMNS};
pub use verify::{
    blocking_sizes, verify_bounds, ClaimReport, SuiteReport, SuiteStatus, BOUND_TOL,
    CROSS_CHECK_MAX_AGENTS, SUITES,
};

use crate::error::{Error, Result};
use crate::metric::SpaceKind;

/// Contents of a bench config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub datasets: Vec<String>,
    pub algorithms: Vec<String>,
    pub k_range: [usize; 2],
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "yes")]
    pub plots: bool,
    /// Algorithm pairs summarized in the report.
    #[serde(default)]
    pub pairs: Vec<[String; 2]>,
}

fn yes() -> bool {
    true
}

impl BenchConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

fn file_safe(s: &str) -> String {
    s.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

fn fresh_run_dir(out: &Path, seed: u64) -> Result<PathBuf> {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    for attempt in 0.. {
        let name = if attempt == 0 {
            format!("run-{stamp}-s{seed}")
        } else {
            format!("run-{stamp}-s{seed}-{attempt}")
        };
        let dir = out.join(name);
        if !dir.exists() {
            std::fs::create_dir_all(&dir)?;
            return Ok(dir);
        }
    }
    unreachable!()
}

/// Runs the configured grid and writes `rows.csv`, `rows.json`,
/// `report.txt` and (for line and planar data) `plots/*.svg` into a new
/// directory under `out`. Returns that directory.
pub fn run_bench(config: &BenchConfig, out: impl AsRef<Path>) -> Result<PathBuf> {
    let datasets = config
        .datasets
        .iter()
        .map(|d| d.parse())
        .collect::<Result<Vec<DatasetSpec>>>()?;
    let algorithms = config
        .algorithms
        .iter()
        .map(|a| a.parse())
        .collect::<Result<Vec<AlgorithmSpec>>>()?;
    if datasets.is_empty() || algorithms.is_empty() {
        return Err(Error::Parameter("config needs at least one dataset and one algorithm".into()));
    }
    let [lo, hi] = config.k_range;
    let cells = run_comparison_with_clusterings(&datasets, &algorithms, (lo, hi), config.seed)?;
    let dir = fresh_run_dir(out.as_ref(), config.seed)?;
    let rows: Vec<ExperimentRow> = cells.iter().map(|(r, _, _)| r.clone()).collect();
    emit_table(&rows, dir.join("rows.csv"), TableFormat::Csv)?;
    emit_table(&rows, dir.join("rows.json"), TableFormat::Json)?;

    if config.plots {
        let plots = dir.join("plots");
        for (row, inst, y) in &cells {
            let drawable = matches!(inst.space().kind(), SpaceKind::Line | SpaceKind::Euclidean { dim: 2 });
            let Some(y) = y.as_ref().filter(|_| drawable) else {
                continue;
            };
            std::fs::create_dir_all(&plots)?;
            let name = format!("{}_{}_k{}.svg", file_safe(&row.dataset), file_safe(&row.algorithm), row.k);
            render_clusters_svg(inst, &y.centers, &inst.assign(&y.centers), plots.join(name))?;
        }
    }

    let mut report = String::new();
    let _ = writeln!(report, "seed {}  k in [{lo}, {hi}]", config.seed);
    let _ = writeln!(report, "{} cells, {} failed", rows.len(), rows.iter().filter(|r| !r.error.is_empty()).count());
    for r in rows.iter().filter(|r| !r.error.is_empty()) {
        let _ = writeln!(report, "  {} {} k={}: {}", r.dataset, r.algorithm, r.k, r.error);
    }
    for ds in &datasets {
        let label = ds.to_string();
        for [first, second] in &config.pairs {
            let first = first.parse::<AlgorithmSpec>()?.to_string();
            let second = second.parse::<AlgorithmSpec>()?.to_string();
            let s = compare_pair(&rows, &label, &first, &second);
            let _ = writeln!(
                report,
                "{label}: {first} vs {second} over {} k: alpha_sup not worse {} times, beta_min not worse {} times, worst k-means cost ratio {:.4}",
                s.k_values.len(),
                s.alpha_wins,
                s.beta_wins,
                s.max_cost_ratio
            );
        }
    }
    std::fs::write(dir.join("report.txt"), report)?;
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults() {
        let c = BenchConfig::from_json(r#"{"datasets":["k4"],"algorithms":["greedy"],"k_range":[2,2]}"#).unwrap();
        assert!(c.plots);
        assert_eq!(c.seed, 0);
        assert!(c.pairs.is_empty());
    }

    #[test]
    fn run_writes_layout() {
        let dir = tempfile::tempdir().unwrap();
        let config = BenchConfig {
            datasets: vec!["gaussian:60".into(), "k4".into()],
            algorithms: vec!["refined-kmeans".into(), "kmeans".into()],
            k_range: [2, 3],
            seed: 4,
            plots: true,
            pairs: vec![["refined-kmeans".into(), "kmeans".into()]],
        };
        let run = run_bench(&config, dir.path()).unwrap();
        let rows = read_table(run.join("rows.csv"), TableFormat::Csv).unwrap();
        assert_eq!(rows.len(), 8);
        let json = read_table(run.join("rows.json"), TableFormat::Json).unwrap();
        for (a, b) in rows.iter().zip(&json) {
            assert_eq!((&a.dataset, &a.algorithm, a.k, &a.error), (&b.dataset, &b.algorithm, b.k, &b.error));
            assert!(a.error.is_empty() || (a.beta_min.is_nan() && b.alpha_sup.is_nan()));
            assert!(a.error.is_empty() == (a.beta_min == b.beta_min));
        }
        assert_eq!(rows.iter().filter(|r| r.error.is_empty()).count(), 4);
        assert!(run.join("plots/gaussian60_refined-kmeans_k3.svg").exists());
        assert!(!run.join("plots/k4_kmeans_k2.svg").exists());
        let report = std::fs::read_to_string(run.join("report.txt")).unwrap();
        assert!(report.contains("gaussian60: refined-kmeans vs kmeans"), "{report}");
        let again = run_bench(&config, dir.path()).unwrap();
        assert_ne!(run, again);
    }

    #[test]
    fn bad_names_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = BenchConfig::from_json(r#"{"datasets":["k4"],"algorithms":["nope"],"k_range":[2,2]}"#).unwrap();
        assert!(run_bench(&config, dir.path()).is_err());
        config.algorithms = vec!["greedy".into()];
        config.k_range = [3, 2];
        assert!(run_bench(&config, dir.path()).is_err());
    }
}
