//! Core-membership audits.
//!
//! A clustering `Y` is blocked by a coalition `S` and a deviation `y′ ∉ Y`
//! when `β·Σ_{i∈S} d(i, y′) < Σ_{i∈S} d(i, Y)`. It lies in the `(α, β)`-core
//! when no coalition of size at least `αn/k` blocks it. Because any
//! blocking coalition contains a blocking sub-coalition of every smaller
//! size (take the agents with the largest gains), it is enough to look at
//! the single size [`coalition_size`].
//!
//! The comparison is strict with a scaled tolerance of `1e-9`, so a
//! clustering is in the core at exactly `β = beta_min`.
//!
//! Deviations are scanned independently and in parallel. Extremal values are
//! reduced deterministically, the smallest deviation index winning ties.

mod oracle;

pub use oracle::{oracle_audit, ORACLE_MAX_AGENTS, ORACLE_MAX_CANDIDATES};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Candidates, Instance};
use crate::metric::{strictly_greater, Point, TOL};

/// Which side of the `(α, β)` trade-off to fix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AuditQuery {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

impl AuditQuery {
    pub fn alpha(alpha: f64) -> Self {
        Self { alpha: Some(alpha), beta: None }
    }

    pub fn beta(beta: f64) -> Self {
        Self { alpha: None, beta: Some(beta) }
    }

    pub fn both(alpha: f64, beta: f64) -> Self {
        Self { alpha: Some(alpha), beta: Some(beta) }
    }

    /// Both parameters must be finite and at least 1.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta)] {
            if let Some(v) = v {
                if !(v.is_finite() && v >= 1.0) {
                    return Err(Error::validation(name, format!("{v} must be a finite number ≥ 1")));
                }
            }
        }
        Ok(())
    }

    fn alpha_or_one(&self) -> f64 {
        self.alpha.unwrap_or(1.0)
    }

    fn beta_or_one(&self) -> f64 {
        self.beta.unwrap_or(1.0)
    }
}

/// A coalition and the center it would rather share.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockingWitness {
    pub y_prime: Point,
    /// Agent indices, ascending.
    pub coalition: Vec<usize>,
    #[serde(rename = "sum_to_Y")]
    pub sum_to_y: f64,
    pub sum_to_y_prime: f64,
    /// `sum_to_Y / sum_to_y_prime`, `+∞` when only the denominator is zero.
    #[serde(with = "crate::serde_inf")]
    pub ratio: f64,
}

impl BlockingWitness {
    fn new(y_prime: Point, mut coalition: Vec<usize>, sum_to_y: f64, sum_to_y_prime: f64) -> Self {
        coalition.sort_unstable();
        Self {
            y_prime,
            coalition,
            sum_to_y,
            sum_to_y_prime,
            ratio: ratio(sum_to_y, sum_to_y_prime),
        }
    }

    /// Recomputes both sums from the instance.
    pub fn recompute(&self, inst: &Instance, centers: &[Point]) -> (f64, f64) {
        let agents = inst.agents();
        let space = inst.space();
        self.coalition.iter().fold((0.0, 0.0), |(a, b), &i| {
            (
                a + space.dist_to_set(&agents[i], centers),
                b + space.dist(&agents[i], &self.y_prime),
            )
        })
    }
}

pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Everything an audit reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditResult {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_query: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta_query: Option<f64>,
    /// Smallest `β` with the clustering in the `(α, β)`-core, at the queried
    /// `α` (1 when only `β` was given).
    #[serde(with = "crate::serde_inf")]
    pub beta_min: f64,
    /// Largest blocking coalition at the queried `β` (1 when only `α` was
    /// given); 0 when nothing of size `⌈n/k⌉` blocks.
    pub s_max: usize,
    /// `k·s_max/n`: the clustering is in the core exactly for `α > alpha_sup`.
    pub alpha_sup: f64,
    /// Membership at the queried `(α, β)`, missing values read as 1.
    pub in_core: bool,
    /// Witness for the quantity that was asked for: blocking coalition when
    /// both parameters are fixed, else the extremal coalition.
    pub witness: Option<BlockingWitness>,
    pub beta_witness: Option<BlockingWitness>,
    pub size_witness: Option<BlockingWitness>,
}

impl AuditResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `⌈αn/k⌉`, snapping to an integer when `αn/k` is within `1e-9` of one. A
/// value above `n` means no coalition is large enough to block.
pub fn coalition_size(inst: &Instance, alpha: f64) -> usize {
    let x = alpha * inst.n() as f64 / inst.k() as f64;
    let nearest = x.round();
    if (x - nearest).abs() <= TOL {
        nearest as usize
    } else {
        x.ceil() as usize
    }
}

/// Locations `y′` a coalition could deviate to.
///
/// Finite candidates closer than `1e-9` to a center are left out, as are
/// exact duplicates. On the continuous line the candidates are the agent
/// coordinates not occupied by a center. This loses nothing whenever the
/// best ratio exceeds 1: for a fixed coalition `S`, `Σ_{i∈S} |x_i − y|` is
/// minimized at a median of `S`, which is an agent coordinate, and a
/// deviation next to a center never beats that center by more than a
/// vanishing margin.
pub fn candidate_deviations(inst: &Instance, centers: &[Point]) -> Vec<Point> {
    let space = inst.space();
    let pool = match inst.candidates() {
        Candidates::Finite(list) => list.clone(),
        Candidates::ContinuousLine => inst.distinct_agent_locations(),
    };
    let mut out: Vec<Point> = Vec::new();
    for c in pool {
        let occupied = centers.iter().any(|y| space.dist(&c, y) <= TOL);
        if !occupied && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Distances the audits work from.
struct Profile {
    to_y: Vec<f64>,
    deviations: Vec<Point>,
}

impl Profile {
    fn new(inst: &Instance, centers: &[Point]) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::Precondition("cannot audit an empty clustering".into()));
        }
        for (i, c) in centers.iter().enumerate() {
            inst.space()
                .check(c)
                .map_err(|e| Error::validation(format!("centers[{i}]"), e.to_string()))?;
        }
        Ok(Self {
            to_y: inst.distances_to(centers),
            deviations: candidate_deviations(inst, centers),
        })
    }

    fn to_dev(&self, inst: &Instance, c: usize) -> Vec<f64> {
        let y = &self.deviations[c];
        inst.agents().iter().map(|a| inst.space().dist(a, y)).collect()
    }
}

/// Agent indices by descending `a_i − β·b_i`, ascending index on ties.
fn ranked(a: &[f64], b: &[f64], beta: f64) -> Vec<usize> {
    let gain: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - beta * y).collect();
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_by(|&i, &j| gain[j].total_cmp(&gain[i]).then(i.cmp(&j)));
    idx
}

fn sums(a: &[f64], b: &[f64], set: &[usize]) -> (f64, f64) {
    set.iter().fold((0.0, 0.0), |(x, y), &i| (x + a[i], y + b[i]))
}

fn blocks(sum_a: f64, sum_b: f64, beta: f64) -> bool {
    strictly_greater(sum_a, beta * sum_b)
}

/// Picks the entry with the largest key, the earliest one on ties.
fn best_by<T, K: PartialOrd + Copy>(items: Vec<T>, key: impl Fn(&T) -> K) -> Option<T> {
    let mut best: Option<T> = None;
    for item in items {
        match &best {
            Some(b) if key(&item) <= key(b) => {}
            _ => best = Some(item),
        }
    }
    best
}

/// Largest blocking coalition at `β` with its witness.
///
/// For each deviation the agents are ranked by `d(i, Y) − β·d(i, y′)` and
/// the longest blocking prefix is taken. Sizes below `⌈n/k⌉` report 0.
pub fn max_blocking_size(
    inst: &Instance,
    centers: &[Point],
    beta: f64,
) -> Result<(usize, Option<BlockingWitness>)> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::Parameter(format!("β = {beta} must be positive")));
    }
    let prof = Profile::new(inst, centers)?;
    let per_candidate: Vec<(usize, Option<BlockingWitness>)> = (0..prof.deviations.len())
        .into_par_iter()
        .map(|c| {
            let b = prof.to_dev(inst, c);
            let order = ranked(&prof.to_y, &b, beta);
            let (mut sa, mut sb) = (0.0, 0.0);
            let mut longest = (0, 0.0, 0.0);
            for (len, &i) in order.iter().enumerate() {
                sa += prof.to_y[i];
                sb += b[i];
                if blocks(sa, sb, beta) {
                    longest = (len + 1, sa, sb);
                }
            }
            let (len, sa, sb) = longest;
            let witness = (len > 0).then(|| {
                BlockingWitness::new(prof.deviations[c].clone(), order[..len].to_vec(), sa, sb)
            });
            (len, witness)
        })
        .collect();
    match best_by(per_candidate, |(len, _)| *len) {
        Some((len, w)) if len >= inst.quota() => Ok((len, w)),
        _ => Ok((0, None)),
    }
}

/// Smallest `β` keeping the clustering in the `(α, β)`-core, with the
/// coalition attaining it.
///
/// For every deviation the best ratio over coalitions of size
/// `s = ⌈αn/k⌉` comes from Dinkelbach iterations: take the top `s` agents
/// by `d(i, Y) − β_t·d(i, y′)`, set `β_{t+1}` to their ratio, and stop when
/// no coalition beats the current ratio. A deviation shared by at least `s`
/// agents with positive distance to `Y` gives `+∞`.
pub fn min_beta(inst: &Instance, centers: &[Point], alpha: f64) -> Result<(f64, Option<BlockingWitness>)> {
    let prof = Profile::new(inst, centers)?;
    let s = coalition_size(inst, alpha);
    if s > inst.n() || s == 0 {
        return Ok((0.0, None));
    }
    let a = &prof.to_y;
    let mut by_a: Vec<usize> = (0..a.len()).collect();
    by_a.sort_by(|&i, &j| a[j].total_cmp(&a[i]).then(i.cmp(&j)));
    let start = &by_a[..s];

    let per_candidate: Vec<(f64, Option<BlockingWitness>)> = (0..prof.deviations.len())
        .into_par_iter()
        .map(|c| {
            let b = prof.to_dev(inst, c);
            let y_prime = prof.deviations[c].clone();
            // Agents sitting on y′, farthest from Y first.
            let on_site: Vec<usize> = by_a.iter().copied().filter(|&i| b[i] == 0.0).collect();
            if on_site.len() >= s {
                let set = on_site[..s].to_vec();
                let (sa, sb) = sums(a, &b, &set);
                if sa > 0.0 {
                    return (f64::INFINITY, Some(BlockingWitness::new(y_prime, set, sa, sb)));
                }
            }
            let mut set = start.to_vec();
            let (mut sa, mut sb) = sums(a, &b, &set);
            let mut beta = ratio(sa, sb);
            for _ in 0..10_000 {
                if beta.is_infinite() {
                    break;
                }
                let next: Vec<usize> = ranked(a, &b, beta)[..s].to_vec();
                let (na, nb) = sums(a, &b, &next);
                if !blocks(na, nb, beta) {
                    break;
                }
                set = next;
                (sa, sb) = (na, nb);
                beta = ratio(sa, sb);
            }
            (beta, Some(BlockingWitness::new(y_prime, set, sa, sb)))
        })
        .collect();
    Ok(best_by(per_candidate, |(r, _)| *r).unwrap_or((0.0, None)))
}

/// Whether no coalition of size `≥ αn/k` blocks at `β`, with a blocking
/// witness of size exactly `⌈αn/k⌉` otherwise.
pub fn is_in_core(
    inst: &Instance,
    centers: &[Point],
    alpha: f64,
    beta: f64,
) -> Result<(bool, Option<BlockingWitness>)> {
    let prof = Profile::new(inst, centers)?;
    let s = coalition_size(inst, alpha);
    if s > inst.n() {
        return Ok((true, None));
    }
    let s = s.max(1);
    let found: Vec<Option<BlockingWitness>> = (0..prof.deviations.len())
        .into_par_iter()
        .map(|c| {
            let b = prof.to_dev(inst, c);
            let set = ranked(&prof.to_y, &b, beta)[..s].to_vec();
            let (sa, sb) = sums(&prof.to_y, &b, &set);
            blocks(sa, sb, beta).then(|| BlockingWitness::new(prof.deviations[c].clone(), set, sa, sb))
        })
        .collect();
    match found.into_iter().flatten().next() {
        Some(w) => Ok((false, Some(w))),
        None => Ok((true, None)),
    }
}

/// Runs every audit for one query.
pub fn audit(inst: &Instance, centers: &[Point], query: AuditQuery) -> Result<AuditResult> {
    query.validate()?;
    let (alpha, beta) = (query.alpha_or_one(), query.beta_or_one());
    let (beta_min, beta_witness) = min_beta(inst, centers, alpha)?;
    let (s_max, size_witness) = max_blocking_size(inst, centers, beta)?;
    let (in_core, blocking) = is_in_core(inst, centers, alpha, beta)?;
    let witness = match (query.alpha, query.beta) {
        (Some(_), Some(_)) => blocking,
        (None, Some(_)) => size_witness.clone(),
        _ => beta_witness.clone(),
    };
    Ok(AuditResult {
        alpha_query: query.alpha,
        beta_query: query.beta,
        beta_min,
        s_max,
        alpha_sup: inst.k() as f64 * s_max as f64 / inst.n() as f64,
        in_core,
        witness,
        beta_witness,
        size_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{gen_k4, gen_kmedians_bad, gen_line_beta_lb, Candidates};
    use crate::metric::Space;

    fn v(ids: &[usize]) -> Vec<Point> {
        ids.iter().map(|&i| Point::Vertex(i)).collect()
    }

    fn line(xs: &[f64], k: usize) -> Instance {
        let agents = xs.iter().map(|x| Point::Coord(*x)).collect();
        Instance::new("line", Space::Line, agents, Candidates::ContinuousLine, k).unwrap()
    }

    #[test]
    fn coalition_sizes() {
        let k4 = gen_k4();
        assert_eq!(coalition_size(&k4, 1.0), 2);
        assert_eq!(coalition_size(&k4, 1.0001), 3);
        let inst = line(&(0..50).map(f64::from).collect::<Vec<_>>(), 7);
        assert_eq!(coalition_size(&inst, 1.0), 8);
        // 1.1·4/2 = 2.2000000000000002 in floating point.
        assert_eq!(coalition_size(&k4, 1.1), 3);
        assert_eq!(coalition_size(&k4, 1.5), 3);
        assert_eq!(coalition_size(&k4, 2.5), 5);
    }

    #[test]
    fn deviation_sets() {
        assert_eq!(candidate_deviations(&gen_k4(), &v(&[0, 1])), v(&[2, 3]));
        let inst = line(&[1.0, 1.0, 2.0, 2.0, 3.0, 3.0], 2);
        assert_eq!(
            candidate_deviations(&inst, &[Point::Coord(1.0), Point::Coord(3.0)]),
            vec![Point::Coord(2.0)]
        );
        let k4 = gen_k4().with_k(4).unwrap();
        assert!(candidate_deviations(&k4, &v(&[0, 1, 2, 3])).is_empty());
        assert_eq!(min_beta(&k4, &v(&[0, 1, 2, 3]), 1.0).unwrap().0, 0.0);
    }

    #[test]
    fn k4_blocking_size() {
        let inst = gen_k4();
        let (s, w) = max_blocking_size(&inst, &v(&[0, 1]), 1.0).unwrap();
        let w = w.unwrap();
        assert_eq!(s, 2);
        assert_eq!((w.y_prime.clone(), w.coalition.clone()), (Point::Vertex(2), vec![2, 3]));
        assert_eq!((w.sum_to_y, w.sum_to_y_prime), (2.0, 1.0));
        assert_eq!(max_blocking_size(&inst, &v(&[0, 1]), 2.0).unwrap().0, 0);
    }

    #[test]
    fn nobody_can_improve_on_zero() {
        let inst = line(&[0.0, 0.0, 5.0, 5.0], 2);
        let y = [Point::Coord(0.0), Point::Coord(5.0)];
        assert_eq!(max_blocking_size(&inst, &y, 1.0).unwrap(), (0, None));
    }

    #[test]
    fn k4_beta() {
        let (b, w) = min_beta(&gen_k4(), &v(&[0, 1]), 1.0).unwrap();
        let w = w.unwrap();
        assert_eq!(b, 2.0);
        assert_eq!((w.y_prime, w.coalition), (Point::Vertex(2), vec![2, 3]));
    }

    #[test]
    fn line_beta_bound_instance() {
        let inst = gen_line_beta_lb(2).unwrap();
        let (b, w) = min_beta(&inst, &[Point::Coord(1.0), Point::Coord(3.0)], 1.0).unwrap();
        let w = w.unwrap();
        assert!((b - 2.0).abs() < 1e-12);
        assert_eq!(w.y_prime, Point::Coord(2.0));
        assert_eq!((w.sum_to_y, w.sum_to_y_prime), (2.0, 1.0));
    }

    #[test]
    fn kmedians_trap_is_unbounded() {
        let inst = gen_kmedians_bad(7).unwrap();
        let y = [Point::Coord(1.0), Point::Coord(1e6), Point::Coord(2e6)];
        let (b, w) = min_beta(&inst, &y, 1.0).unwrap();
        let w = w.unwrap();
        assert_eq!(b, f64::INFINITY);
        assert_eq!(w.y_prime, Point::Coord(0.0));
        assert_eq!(w.coalition.len(), 7);
        assert_eq!(w.sum_to_y_prime, 0.0);
    }

    #[test]
    fn k4_membership() {
        let inst = gen_k4();
        assert!(is_in_core(&inst, &v(&[0, 1]), 1.5, 1.0).unwrap().0);
        let (ok, w) = is_in_core(&inst, &v(&[0, 1]), 1.0, 1.0).unwrap();
        assert!(!ok);
        assert_eq!(w.unwrap().coalition.len(), 2);
        let all = inst.with_k(4).unwrap();
        assert!(is_in_core(&all, &v(&[0, 1, 2, 3]), 1.0, 1.0).unwrap().0);
    }

    #[test]
    fn json_shape() {
        let inst = gen_kmedians_bad(3).unwrap();
        let y = [Point::Coord(1.0), Point::Coord(1e6), Point::Coord(2e6)];
        let r = audit(&inst, &y, AuditQuery::alpha(1.0)).unwrap();
        let json: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(json["beta_min"], "inf");
        assert_eq!(json["alpha_query"], 1.0);
        assert!(json.get("beta_query").is_none());
        assert!(json["witness"]["sum_to_Y"].is_number());
        let back: AuditResult = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn rejects_bad_queries() {
        let inst = gen_k4();
        assert!(audit(&inst, &v(&[0, 1]), AuditQuery::alpha(0.5)).is_err());
        assert!(audit(&inst, &[], AuditQuery::alpha(1.0)).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_line() -> impl Strategy<Value = (Vec<f64>, Vec<f64>, usize)> {
            proptest::collection::vec(-10i32..10, 2..12).prop_flat_map(|xs| {
                let n = xs.len();
                let xs: Vec<f64> = xs.into_iter().map(f64::from).collect();
                (1..n).prop_flat_map(move |k| {
                    let xs = xs.clone();
                    (Just(xs), proptest::collection::vec(-10i32..10, k), Just(k))
                        .prop_map(|(xs, ys, k)| (xs, ys.into_iter().map(f64::from).collect(), k))
                })
            })
        }

        proptest! {
            #[test]
            fn top_s_maximizes_gain(
                a in proptest::collection::vec(0.0f64..10.0, 1..12),
                seed in proptest::collection::vec(0.0f64..10.0, 12),
                c in 0.0f64..4.0,
                s_seed in 0usize..100,
            ) {
                let n = a.len();
                let b = &seed[..n];
                let s = 1 + s_seed % n;
                let top: f64 = ranked(&a, b, c)[..s].iter().map(|&i| a[i] - c * b[i]).sum();
                let mut best = f64::NEG_INFINITY;
                for mask in 0u32..(1 << n) {
                    if mask.count_ones() as usize == s {
                        let v: f64 = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| a[i] - c * b[i]).sum();
                        best = best.max(v);
                    }
                }
                prop_assert!((top - best).abs() <= 1e-9 * best.abs().max(1.0));
            }

            #[test]
            fn monotone_in_both_parameters((xs, ys, k) in arb_line()) {
                let inst = line(&xs, k);
                let y: Vec<Point> = ys.iter().map(|x| Point::Coord(*x)).collect();
                let mut last = f64::INFINITY;
                for alpha in [1.0, 1.25, 1.5, 2.0, 3.0] {
                    let b = min_beta(&inst, &y, alpha).unwrap().0;
                    prop_assert!(b <= last + 1e-9 * b.abs().max(1.0));
                    last = b;
                }
                let mut last = usize::MAX;
                for beta in [1.0, 1.2, 1.5, 2.0, 4.0] {
                    let s = max_blocking_size(&inst, &y, beta).unwrap().0;
                    prop_assert!(s <= last);
                    last = s;
                }
            }

            #[test]
            fn larger_blocking_implies_smaller((xs, ys, k) in arb_line(), beta in 1.0f64..3.0) {
                let inst = line(&xs, k);
                let y: Vec<Point> = ys.iter().map(|x| Point::Coord(*x)).collect();
                let (s_max, _) = max_blocking_size(&inst, &y, beta).unwrap();
                if s_max > 0 {
                    for s in inst.quota()..=s_max {
                        let alpha = s as f64 * k as f64 / xs.len() as f64;
                        prop_assert!(!is_in_core(&inst, &y, alpha, beta).unwrap().0);
                    }
                }
                let beyond = (s_max.max(inst.quota() - 1) + 1) as f64 * k as f64 / xs.len() as f64;
                prop_assert!(is_in_core(&inst, &y, beyond, beta).unwrap().0);
            }

            #[test]
            fn in_core_exactly_at_beta_min((xs, ys, k) in arb_line()) {
                let inst = line(&xs, k);
                let y: Vec<Point> = ys.iter().map(|x| Point::Coord(*x)).collect();
                let (b, _) = min_beta(&inst, &y, 1.0).unwrap();
                if b.is_finite() {
                    prop_assert!(is_in_core(&inst, &y, 1.0, b.max(1.0)).unwrap().0);
                    if b > 1.0 + 1e-6 {
                        prop_assert!(!is_in_core(&inst, &y, 1.0, b * (1.0 - 1e-6)).unwrap().0);
                    }
                }
            }
        }
    }
}
