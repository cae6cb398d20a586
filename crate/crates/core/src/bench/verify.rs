//! Randomized and exhaustive sweeps checking the core guarantees and lower
//! bounds of the clustering procedures against the audit engine.

use std::path::PathBuf;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::compare::{compare_pair, run_comparison, AlgorithmSpec, DatasetSpec};
use super::random::{
    random_centers_on_agents, random_distinct_candidates, random_euclidean, random_line,
    random_matrix, random_tree,
};
use super::run_algorithm;
use crate::algorithms::{
    alg_greedy_ball, alg_line, alg_mst_cover, alg_tree, optimal_total_distance, LambdaParam,
};
use crate::audit::{is_in_core, max_blocking_size, min_beta, oracle_audit, AuditQuery};
use crate::baselines::{lloyd_kmedians, LloydParams, ObjectiveKind};
use crate::error::{Error, Result};
use crate::instance::{
    gen_appendix_tree, gen_clique, gen_k4, gen_kmedians_bad, gen_line_alpha_lb, gen_line_beta_lb,
    instance_to_json, load_points_csv, GaussianParams, Instance, DEFAULT_PART_SPACING,
};
use crate::metric::Point;

/// Absolute slack granted to every bound.
pub const BOUND_TOL: f64 = 1e-6;

/// Largest instance cross-checked against the exhaustive oracle.
pub const CROSS_CHECK_MAX_AGENTS: usize = 12;

/// Every suite, in the order `all` runs them.
pub const SUITES: [&str; 18] = [
    "thm2", "thm3", "thm4", "thm5", "thm6", "thm8", "thm9", "thm10", "thm11", "thm13", "thm14",
    "prop1", "k4-empty", "appendix-a", "appendix-b", "oracle", "gaussian", "mopsi",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SuiteStatus {
    Passed,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimReport {
    pub claim: String,
    pub trials: usize,
    pub passed: usize,
    /// Smallest slack seen; negative means a violation.
    pub worst_margin: f64,
    /// JSON replay data for the first violation.
    pub counterexample: Option<String>,
}

impl ClaimReport {
    pub fn ok(&self) -> bool {
        self.passed == self.trials
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub status: SuiteStatus,
    pub claims: Vec<ClaimReport>,
    pub elapsed_ms: f64,
    pub note: String,
}

impl SuiteReport {
    /// One line per claim, plus a header line for the suite.
    pub fn summary(&self) -> String {
        let mut s = format!("{} {} ({:.0} ms)", self.suite, status_word(self.status), self.elapsed_ms);
        if !self.note.is_empty() {
            s.push_str(&format!(" - {}", self.note));
        }
        for c in &self.claims {
            s.push_str(&format!(
                "\n  [{}] {}: {}/{} worst margin {}",
                if c.ok() { "ok" } else { "FAIL" },
                c.claim,
                c.passed,
                c.trials,
                fmt_margin(c.worst_margin)
            ));
        }
        s
    }
}

fn status_word(s: SuiteStatus) -> &'static str {
    match s {
        SuiteStatus::Passed => "PASSED",
        SuiteStatus::Failed => "FAILED",
        SuiteStatus::Skipped => "SKIPPED",
    }
}

fn fmt_margin(m: f64) -> String {
    if m.is_infinite() {
        if m > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{m:.6}")
    }
}

/// One observation for one claim.
struct Outcome {
    claim: usize,
    slack: f64,
    ok: bool,
    replay: Option<String>,
}

fn replay(inst: &Instance, centers: &[Point], detail: &str) -> String {
    let instance: serde_json::Value = instance_to_json(inst)
        .ok()
        .and_then(|s| serde_json::from_str(&s).ok())
        .unwrap_or(serde_json::Value::Null);
    serde_json::json!({ "detail": detail, "instance": instance, "centers": centers }).to_string()
}

fn upper(claim: usize, value: f64, bound: f64, inst: &Instance, centers: &[Point]) -> Outcome {
    let ok = value <= bound + BOUND_TOL;
    Outcome {
        claim,
        slack: bound - value,
        ok,
        replay: (!ok).then(|| replay(inst, centers, &format!("{value} exceeds {bound}"))),
    }
}

fn lower(claim: usize, value: f64, bound: f64, inst: &Instance, centers: &[Point]) -> Outcome {
    let ok = value >= bound - BOUND_TOL;
    Outcome {
        claim,
        slack: value - bound,
        ok,
        replay: (!ok).then(|| replay(inst, centers, &format!("{value} is below {bound}"))),
    }
}

fn holds(claim: usize, ok: bool, inst: &Instance, centers: &[Point], detail: &str) -> Outcome {
    Outcome {
        claim,
        slack: if ok { 0.0 } else { -1.0 },
        ok,
        replay: (!ok).then(|| replay(inst, centers, detail)),
    }
}

fn broken(claim: usize, err: &Error) -> Outcome {
    Outcome {
        claim,
        slack: f64::NEG_INFINITY,
        ok: false,
        replay: Some(serde_json::json!({ "error": err.to_string() }).to_string()),
    }
}

fn same(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-7 * a.abs().max(b.abs()).max(1.0)
}

/// Fast audits against the oracle when the instance is small enough.
fn cross_check(claim: usize, inst: &Instance, centers: &[Point]) -> Result<Option<Outcome>> {
    if inst.n() > CROSS_CHECK_MAX_AGENTS || inst.candidate_points().len() > 16 {
        return Ok(None);
    }
    let slow = oracle_audit(inst, centers, AuditQuery::both(1.0, 1.0))?;
    let (beta, _) = min_beta(inst, centers, 1.0)?;
    let (size, _) = max_blocking_size(inst, centers, 1.0)?;
    let ok = same(beta, slow.beta_min) && size == slow.s_max;
    let detail = format!(
        "fast (beta {beta}, size {size}) vs oracle (beta {}, size {})",
        slow.beta_min, slow.s_max
    );
    Ok(Some(holds(claim, ok, inst, centers, &detail)))
}

fn fold(names: &[&str], outcomes: Vec<Vec<Outcome>>) -> Vec<ClaimReport> {
    let mut reports: Vec<ClaimReport> = names
        .iter()
        .map(|n| ClaimReport {
            claim: n.to_string(),
            trials: 0,
            passed: 0,
            worst_margin: f64::INFINITY,
            counterexample: None,
        })
        .collect();
    for o in outcomes.into_iter().flatten() {
        let r = &mut reports[o.claim];
        r.trials += 1;
        r.passed += usize::from(o.ok);
        r.worst_margin = r.worst_margin.min(o.slack);
        if r.counterexample.is_none() {
            r.counterexample = o.replay;
        }
    }
    reports
}

/// Evaluates trials in parallel; results keep the trial order.
fn sweep<T: Sync>(
    trials: &[T],
    names: &[&str],
    eval: impl Fn(&T) -> Result<Vec<Outcome>> + Sync,
) -> Vec<ClaimReport> {
    let outcomes: Vec<Vec<Outcome>> = trials
        .par_iter()
        .map(|t| eval(t).unwrap_or_else(|e| vec![broken(0, &e)]))
        .collect();
    fold(names, outcomes)
}

fn suite_rng(seed: u64, suite: &str) -> ChaCha8Rng {
    let salt = super::compare::row_seed(seed, suite, "verify", 0);
    ChaCha8Rng::seed_from_u64(salt)
}

/// A Euclidean (even trials) or shortest-path metric (odd trials) instance
/// with `k ∈ [2, 10]` and candidates on the agents.
fn general_metric(rng: &mut ChaCha8Rng, t: usize) -> Result<Instance> {
    let k = rng.random_range(2..=10);
    if t.is_multiple_of(2) {
        let n = rng.random_range(k..=60);
        random_euclidean(rng, n, k)
    } else {
        let n = rng.random_range(k..=40);
        random_matrix(rng, n, k)
    }
}

/// A line instance on which both quantile steps fit.
fn line_instance(rng: &mut ChaCha8Rng, both_steps: bool) -> Result<Instance> {
    loop {
        let n = rng.random_range(2..=60);
        let k = rng.random_range(1..=n);
        let fits = |l: usize| l * (k - 1) <= n;
        if fits(n.div_ceil(k)) && (!both_steps || fits(n.div_ceil(k + 1))) {
            return random_line(rng, n, k);
        }
    }
}

fn tree_instance(rng: &mut ChaCha8Rng) -> Result<Instance> {
    let vertices = rng.random_range(2..=30);
    let n = rng.random_range(2..=60);
    let k = rng.random_range(1..=n.min(12));
    random_tree(rng, vertices, n, k)
}

fn quota_line(inst: &Instance) -> Result<Vec<Point>> {
    Ok(alg_line(inst, LambdaParam::quota(inst))?.centers)
}

fn quota_tree(inst: &Instance) -> Result<Vec<Point>> {
    Ok(alg_tree(inst, LambdaParam::quota(inst), 0)?.centers)
}

/// Runs one suite by name, or every suite for `all`.
pub fn verify_bounds(suite: &str, trials: Option<usize>, seed: u64) -> Result<Vec<SuiteReport>> {
    if suite == "all" {
        return SUITES.iter().map(|s| run_suite(s, trials, seed)).collect();
    }
    Ok(vec![run_suite(suite, trials, seed)?])
}

fn run_suite(suite: &str, trials: Option<usize>, seed: u64) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut rng = suite_rng(seed, suite);
    let count = |default: usize| trials.unwrap_or(default);
    let mut note = String::new();
    let claims = match suite {
        "thm5" => {
            let insts = (0..count(200))
                .map(|t| general_metric(&mut rng, t))
                .collect::<Result<Vec<_>>>()?;
            sweep(&insts, &["greedy: beta_min(α=1) ≤ 2⌈n/k⌉+1", "oracle agreement"], |inst| {
                let (y, _) = alg_greedy_ball(inst)?;
                let (b, _) = min_beta(inst, &y.centers, 1.0)?;
                let mut out = vec![upper(0, b, (2 * inst.quota() + 1) as f64, inst, &y.centers)];
                out.extend(cross_check(1, inst, &y.centers)?);
                Ok(out)
            })
        }
        "thm3" => {
            let insts = (0..count(200))
                .map(|_| line_instance(&mut rng, true))
                .collect::<Result<Vec<_>>>()?;
            sweep(
                &insts,
                &[
                    "line λ=⌈n/k⌉: beta_min ≤ ⌈n/k⌉−1",
                    "line λ=⌈n/(k+1)⌉: beta_min ≤ k",
                    "oracle agreement",
                ],
                |inst| {
                    let big = quota_line(inst)?;
                    let small = alg_line(inst, LambdaParam::quota_plus_one(inst))?.centers;
                    let b1 = min_beta(inst, &big, 1.0)?.0;
                    let b2 = min_beta(inst, &small, 1.0)?.0;
                    let mut out = vec![
                        upper(0, b1, (inst.quota() - 1) as f64, inst, &big),
                        upper(1, b2, inst.k() as f64, inst, &small),
                    ];
                    out.extend(cross_check(2, inst, &big)?);
                    out.extend(cross_check(2, inst, &small)?);
                    Ok(out)
                },
            )
        }
        "thm4" => {
            let insts = (0..count(200))
                .map(|_| tree_instance(&mut rng))
                .collect::<Result<Vec<_>>>()?;
            sweep(
                &insts,
                &[
                    "tree λ=⌈n/k⌉: beta_min ≤ ⌈n/k⌉−1",
                    "tree λ=⌈n/(k+1)⌉: beta_min ≤ k",
                    "oracle agreement",
                ],
                |inst| {
                    let big = quota_tree(inst)?;
                    let small = alg_tree(inst, LambdaParam::quota_plus_one(inst), 0)?.centers;
                    let b1 = min_beta(inst, &big, 1.0)?.0;
                    let b2 = min_beta(inst, &small, 1.0)?.0;
                    let mut out = vec![
                        upper(0, b1, (inst.quota() - 1) as f64, inst, &big),
                        upper(1, b2, inst.k() as f64, inst, &small),
                    ];
                    out.extend(cross_check(2, inst, &big)?);
                    out.extend(cross_check(2, inst, &small)?);
                    Ok(out)
                },
            )
        }
        "thm9" | "thm10" => {
            let line = suite == "thm9";
            let insts = (0..count(200))
                .map(|_| if line { line_instance(&mut rng, false) } else { tree_instance(&mut rng) })
                .collect::<Result<Vec<_>>>()?;
            let name = if line { "line λ=⌈n/k⌉: s_max(β=1) < 2n/k" } else { "tree λ=⌈n/k⌉: s_max(β=1) < 2n/k" };
            sweep(&insts, &[name, "oracle agreement"], |inst| {
                let y = if line { quota_line(inst)? } else { quota_tree(inst)? };
                let (s, _) = max_blocking_size(inst, &y, 1.0)?;
                let limit = 2.0 * inst.n() as f64 / inst.k() as f64;
                let ok = (s as f64) < limit;
                let mut out = vec![Outcome {
                    claim: 0,
                    slack: limit - s as f64,
                    ok,
                    replay: (!ok).then(|| replay(inst, &y, &format!("s_max {s} ≥ {limit}"))),
                }];
                out.extend(cross_check(1, inst, &y)?);
                Ok(out)
            })
        }
        "thm13" => {
            let mut insts = Vec::new();
            for t in 0..count(200) {
                insts.push(if t % 2 == 0 { line_instance(&mut rng, false)? } else { tree_instance(&mut rng)? });
            }
            let alphas = [1.1, 1.25, 1.5, 2.0];
            let names = [
                "α=1.1: in core at β=max{1,1/(α−1)}",
                "α=1.25: in core at β=max{1,1/(α−1)}",
                "α=1.5: in core at β=max{1,1/(α−1)}",
                "α=2: in core at β=max{1,1/(α−1)}",
            ];
            sweep(&insts, &names, |inst| {
                let y = match inst.space() {
                    crate::metric::Space::Line => quota_line(inst)?,
                    _ => quota_tree(inst)?,
                };
                alphas
                    .iter()
                    .enumerate()
                    .map(|(c, &alpha)| {
                        let beta = f64::max(1.0, 1.0 / (alpha - 1.0)) + BOUND_TOL;
                        let (ok, _) = is_in_core(inst, &y, alpha, beta)?;
                        Ok(holds(c, ok, inst, &y, &format!("blocked at α={alpha}, β={beta}")))
                    })
                    .collect()
            })
        }
        "thm14" => {
            let insts = (0..count(200))
                .map(|t| general_metric(&mut rng, t))
                .collect::<Result<Vec<_>>>()?;
            let alphas = [1.5, 2.0, 3.0];
            let names = [
                "α=1.5: greedy in core at β=max{4,2/(α−1)+3}",
                "α=2: greedy in core at β=max{4,2/(α−1)+3}",
                "α=3: greedy in core at β=max{4,2/(α−1)+3}",
            ];
            sweep(&insts, &names, |inst| {
                let (y, _) = alg_greedy_ball(inst)?;
                alphas
                    .iter()
                    .enumerate()
                    .map(|(c, &alpha)| {
                        let beta = f64::max(4.0, 2.0 / (alpha - 1.0) + 3.0) + BOUND_TOL;
                        let (ok, _) = is_in_core(inst, &y.centers, alpha, beta)?;
                        Ok(holds(c, ok, inst, &y.centers, &format!("blocked at α={alpha}, β={beta}")))
                    })
                    .collect()
            })
        }
        "thm6" => {
            let mut insts = Vec::new();
            for t in 0..count(100) {
                let n: usize = rng.random_range(4..=40);
                let k = rng.random_range(n.div_ceil(2)..=n - 2);
                insts.push(if t % 2 == 0 { random_euclidean(&mut rng, n, k)? } else { random_matrix(&mut rng, n, k)? });
            }
            sweep(&insts, &["spanning-tree cover: beta_min(α=1) ≤ 2", "oracle agreement"], |inst| {
                let y = alg_mst_cover(inst)?.centers;
                let b = min_beta(inst, &y, 1.0)?.0;
                let mut out = vec![upper(0, b, 2.0, inst, &y)];
                out.extend(cross_check(1, inst, &y)?);
                Ok(out)
            })
        }
        "prop1" => {
            let mut insts = Vec::new();
            for t in 0..count(50) {
                let n = rng.random_range(2..=8);
                let inst = match t % 3 {
                    0 => random_matrix(&mut rng, n, 1)?,
                    1 => random_euclidean(&mut rng, n, 1)?,
                    _ => random_line(&mut rng, n, 1)?.with_agent_candidates(),
                };
                insts.push(inst);
            }
            sweep(
                &insts,
                &["k=1 optimum in exact core", "k=n−1 optimum in exact core", "oracle agreement"],
                |inst| {
                    let mut out = Vec::new();
                    let mut ks = vec![1];
                    if inst.n() > 2 {
                        ks.push(inst.n() - 1);
                    }
                    for (c, k) in ks.into_iter().enumerate() {
                        let inst = inst.with_k(k)?;
                        let y = optimal_total_distance(&inst)?.centers;
                        let (fast, _) = is_in_core(&inst, &y, 1.0, 1.0)?;
                        let slow = oracle_audit(&inst, &y, AuditQuery::both(1.0, 1.0))?.in_core;
                        out.push(holds(c, fast, &inst, &y, "blocked at α=β=1"));
                        out.push(holds(2, fast == slow, &inst, &y, "oracle disagrees on membership"));
                        out.extend(cross_check(2, &inst, &y)?);
                    }
                    Ok(out)
                },
            )
        }
        "k4-empty" => {
            let inst = gen_k4();
            let pairs: Vec<Vec<Point>> = (0..4)
                .flat_map(|i| (i + 1..4).map(move |j| vec![Point::Vertex(i), Point::Vertex(j)]))
                .collect();
            sweep(
                &pairs,
                &["not in (1,1)-core", "in (1,2)-core", "in (1.01,1)-core", "oracle agreement"],
                |y| {
                    let mut out = vec![
                        holds(0, !is_in_core(&inst, y, 1.0, 1.0)?.0, &inst, y, "in the exact core"),
                        holds(1, is_in_core(&inst, y, 1.0, 2.0)?.0, &inst, y, "blocked at β=2"),
                        holds(2, is_in_core(&inst, y, 1.01, 1.0)?.0, &inst, y, "blocked at α=1.01"),
                    ];
                    out.extend(cross_check(3, &inst, y)?);
                    Ok(out)
                },
            )
        }
        "thm2" => {
            let inst = gen_line_beta_lb(6)?;
            let mut ys: Vec<Vec<Point>> = Vec::new();
            for alg in ["line", "line-small", "greedy", "refined-kmedians", "kmeans", "kmedians"] {
                ys.push(run_algorithm(&inst, alg.parse()?, seed)?.centers);
            }
            ys.extend((0..count(500)).map(|_| random_centers_on_agents(&mut rng, &inst)));
            sweep(&ys, &["beta_min(α=1) ≥ k/2 = 3"], |y| {
                Ok(vec![lower(0, min_beta(&inst, y, 1.0)?.0, 3.0, &inst, y)])
            })
        }
        "thm8" => {
            let c = 10;
            let inst = gen_line_alpha_lb(c, DEFAULT_PART_SPACING)?;
            let mut ys: Vec<Vec<Point>> = vec![quota_line(&inst)?];
            ys.extend((0..count(500)).map(|_| random_centers_on_agents(&mut rng, &inst)));
            let bound = (2 * c - 3) as f64;
            sweep(&ys, &["s_max(β=1) ≥ 2C−3 = 17", "alpha_sup ≥ 2 − 3/C"], |y| {
                let (s, _) = max_blocking_size(&inst, y, 1.0)?;
                let alpha = inst.k() as f64 * s as f64 / inst.n() as f64;
                Ok(vec![
                    lower(0, s as f64, bound, &inst, y),
                    lower(1, alpha, 2.0 - 3.0 / c as f64, &inst, y),
                ])
            })
        }
        "thm11" => {
            let inst = gen_clique(10)?;
            let mut ys: Vec<Vec<Point>> = Vec::new();
            for alg in ["greedy", "mst", "optimal", "refined-medoid"] {
                ys.push(run_algorithm(&inst, alg.parse()?, seed)?.centers);
            }
            ys.extend((0..count(200)).map(|_| random_centers_on_agents(&mut rng, &inst)));
            sweep(&ys, &["blocking coalition of size k=5 at β=1", "alpha_sup ≥ 2.5", "oracle agreement"], |y| {
                let (blocked, _) = is_in_core(&inst, y, 2.5, 1.0).map(|(ok, w)| (!ok, w))?;
                let (s, _) = max_blocking_size(&inst, y, 1.0)?;
                let mut out = vec![
                    holds(0, blocked, &inst, y, "no size-5 coalition blocks"),
                    lower(1, inst.k() as f64 * s as f64 / inst.n() as f64, 2.5, &inst, y),
                ];
                out.extend(cross_check(2, &inst, y)?);
                Ok(out)
            })
        }
        "appendix-b" => {
            let inst = gen_appendix_tree();
            let mut ys: Vec<Vec<Point>> = vec![quota_tree(&inst)?];
            ys.extend((0..count(1000)).map(|_| random_distinct_candidates(&mut rng, &inst)));
            sweep(&ys, &["beta_min(α=1) ≥ 14/13", "size-8 coalition blocks at β=1"], |y| {
                let b = min_beta(&inst, y, 1.0)?.0;
                let (s, _) = max_blocking_size(&inst, y, 1.0)?;
                Ok(vec![lower(0, b, 14.0 / 13.0, &inst, y), lower(1, s as f64, 8.0, &inst, y)])
            })
        }
        "appendix-a" => {
            let inst = gen_kmedians_bad(7)?;
            let points = inst.coordinates()?;
            let lloyd = lloyd_kmedians(&points, inst.k(), &LloydParams::with_seed(seed))?.to_clustering(&inst)?;
            let (greedy, _) = alg_greedy_ball(&inst.with_agent_candidates())?;
            let cases = vec![(0usize, lloyd.centers), (1, greedy.centers)];
            sweep(&cases, &["k-medians Lloyd: beta_min = inf", "greedy: beta_min ≤ 15"], |(c, y)| {
                let b = min_beta(&inst, y, 1.0)?.0;
                Ok(vec![if *c == 0 {
                    holds(0, b == f64::INFINITY, &inst, y, &format!("beta_min {b} is finite"))
                } else {
                    upper(1, b, 15.0, &inst, y)
                }])
            })
        }
        "oracle" => {
            let mut cases = Vec::new();
            for t in 0..count(1000) {
                let n = rng.random_range(2..=CROSS_CHECK_MAX_AGENTS);
                let k = rng.random_range(1..=n);
                let inst = match t % 4 {
                    0 => random_matrix(&mut rng, n, k)?,
                    1 => random_euclidean(&mut rng, n, k)?,
                    2 => random_line(&mut rng, n, k)?,
                    _ => {
                        let vertices = rng.random_range(2..=10);
                        random_tree(&mut rng, vertices, n, k)?
                    }
                };
                let y = random_centers_on_agents(&mut rng, &inst);
                let beta = rng.random_range(1.0..3.0);
                cases.push((inst, y, beta));
            }
            sweep(&cases, &["blocking sizes are downward closed", "oracle agreement"], |(inst, y, beta)| {
                let sizes = blocking_sizes(inst, y, *beta);
                let top = sizes.iter().rposition(|&b| b).map_or(0, |i| i + 1);
                let closed = sizes[..top].iter().all(|&b| b);
                let mut out = vec![holds(0, closed, inst, y, &format!("blocking sizes {sizes:?} at β={beta}"))];
                out.extend(cross_check(1, inst, y)?);
                Ok(out)
            })
        }
        "gaussian" => {
            let params = GaussianParams { seed, ..GaussianParams::default() };
            let ds = DatasetSpec::Gaussian(params);
            let algs = [AlgorithmSpec::Refined(ObjectiveKind::KMeansSq), AlgorithmSpec::KMeans];
            let rows = run_comparison(std::slice::from_ref(&ds), &algs, (8, 17), seed)?;
            let sum = compare_pair(&rows, &ds.to_string(), "refined-kmeans", "kmeans");
            let ks = sum.k_values.len();
            note = format!(
                "alpha wins {}/{ks}, beta wins {}/{ks}, worst cost ratio {:.3}",
                sum.alpha_wins, sum.beta_wins, sum.max_cost_ratio
            );
            let need = (7 * ks).div_ceil(10).max(1);
            let one = |claim: usize, slack: f64, ok: bool| Outcome { claim, slack, ok, replay: None };
            fold(
                &[
                    "refined alpha_sup ≤ kmeans++ on ≥ 70% of k",
                    "refined beta_min ≤ kmeans++ on ≥ 70% of k",
                    "social cost ratio ≤ 2",
                    "all cells succeeded",
                ],
                vec![vec![
                    one(0, sum.alpha_wins as f64 - need as f64, sum.alpha_wins >= need),
                    one(1, sum.beta_wins as f64 - need as f64, sum.beta_wins >= need),
                    one(2, 2.0 - sum.max_cost_ratio, sum.max_cost_ratio <= 2.0),
                    one(3, 0.0, ks == 10 && rows.iter().all(|r| r.error.is_empty())),
                ]],
            )
        }
        "mopsi" => {
            let path = std::env::var_os("COREFAIR_MOPSI")
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("data/mopsi.txt"));
            if !path.exists() {
                return Ok(SuiteReport {
                    suite: suite.into(),
                    status: SuiteStatus::Skipped,
                    claims: Vec::new(),
                    elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
                    note: format!("{} not found (set COREFAIR_MOPSI)", path.display()),
                });
            }
            let base = load_points_csv(&path, 1)?;
            let ks: Vec<usize> = (8..=17).filter(|&k| k <= base.n()).collect();
            let cells = ks
                .iter()
                .map(|&k| base.with_k(k))
                .collect::<Result<Vec<_>>>()?;
            note = "conditional on deviations restricted to agent locations".into();
            sweep(&cells, &["refined k-medians exactly fair (α=β=1)"], |inst| {
                let y = run_algorithm(inst, AlgorithmSpec::Refined(ObjectiveKind::KMediansL1), seed)?.centers;
                let (ok, _) = is_in_core(inst, &y, 1.0, 1.0 + BOUND_TOL)?;
                Ok(vec![holds(0, ok, inst, &y, "blocked at α=β=1")])
            })
        }
        other => {
            return Err(Error::Parameter(format!(
                "unknown suite `{other}`; expected one of {} or all",
                SUITES.join(", ")
            )))
        }
    };
    let status = if claims.iter().all(ClaimReport::ok) {
        SuiteStatus::Passed
    } else {
        SuiteStatus::Failed
    };
    Ok(SuiteReport {
        suite: suite.into(),
        status,
        claims,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        note,
    })
}

/// `out[s - 1]` says whether some coalition of exactly `s` agents blocks at
/// `β`, by enumeration over all subsets.
pub fn blocking_sizes(inst: &Instance, centers: &[Point], beta: f64) -> Vec<bool> {
    let n = inst.n();
    let space = inst.space();
    let to_y = inst.distances_to(centers);
    let mut out = vec![false; n];
    for y in crate::audit::candidate_deviations(inst, centers) {
        let to_dev: Vec<f64> = inst.agents().iter().map(|a| space.dist(a, &y)).collect();
        for mask in 1u32..(1u32 << n) {
            let (mut a, mut b) = (0.0, 0.0);
            for i in (0..n).filter(|i| mask & (1 << i) != 0) {
                a += to_y[i];
                b += to_dev[i];
            }
            if crate::metric::strictly_greater(a, beta * b) {
                out[mask.count_ones() as usize - 1] = true;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(verify_bounds("nope", None, 0).is_err());
    }

    #[test]
    fn k4_suite_passes() {
        let r = verify_bounds("k4-empty", None, 0).unwrap();
        assert_eq!(r[0].status, SuiteStatus::Passed, "{}", r[0].summary());
        assert_eq!(r[0].claims[0].trials, 6);
    }

    #[test]
    fn small_sweeps_pass() {
        for suite in ["thm5", "thm3", "thm4", "thm9", "thm10", "thm6"] {
            let r = verify_bounds(suite, Some(20), 1).unwrap();
            assert_eq!(r[0].status, SuiteStatus::Passed, "{}", r[0].summary());
        }
    }

    #[test]
    fn missing_dataset_skips() {
        std::env::set_var("COREFAIR_MOPSI", "/nonexistent/mopsi.txt");
        let r = verify_bounds("mopsi", None, 0).unwrap();
        assert_eq!(r[0].status, SuiteStatus::Skipped);
    }

    #[test]
    fn summary_mentions_claims() {
        let r = verify_bounds("appendix-a", None, 0).unwrap();
        let s = r[0].summary();
        assert!(s.contains("appendix-a"), "{s}");
        assert!(s.contains("beta_min = inf"), "{s}");
    }
}
