//! Brute-force audit over every coalition, for checking the fast paths on
//! small instances. Shares no selection logic with the parent module.

use super::{ratio, AuditQuery, AuditResult, BlockingWitness};
use crate::error::{Error, Result};
use crate::instance::{Candidates, Instance};
use crate::metric::{strictly_greater, Point};

pub const ORACLE_MAX_AGENTS: usize = 16;
pub const ORACLE_MAX_CANDIDATES: usize = 16;

fn members(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) != 0).collect()
}

/// Audit by enumerating all `2^n` coalitions for every deviation.
pub fn oracle_audit(inst: &Instance, centers: &[Point], query: AuditQuery) -> Result<AuditResult> {
    query.validate()?;
    let n = inst.n();
    let pool: Vec<Point> = match inst.candidates() {
        Candidates::Finite(list) => list.clone(),
        Candidates::ContinuousLine => {
            let mut xs: Vec<Point> = Vec::new();
            for a in inst.agents() {
                if !xs.contains(a) {
                    xs.push(a.clone());
                }
            }
            xs
        }
    };
    if n > ORACLE_MAX_AGENTS || pool.len() > ORACLE_MAX_CANDIDATES {
        return Err(Error::TooLarge(format!(
            "the oracle handles at most {ORACLE_MAX_AGENTS} agents and \
             {ORACLE_MAX_CANDIDATES} candidates (got {n} and {})",
            pool.len()
        )));
    }
    if centers.is_empty() {
        return Err(Error::Precondition("cannot audit an empty clustering".into()));
    }
    let space = inst.space();
    for c in centers {
        space.check(c)?;
    }
    let mut deviations: Vec<Point> = Vec::new();
    for p in pool {
        let min_to_center = centers.iter().map(|y| space.dist(&p, y)).fold(f64::INFINITY, f64::min);
        if min_to_center > 1e-9 && !deviations.contains(&p) {
            deviations.push(p);
        }
    }

    let alpha = query.alpha.unwrap_or(1.0);
    let beta = query.beta.unwrap_or(1.0);
    let k = inst.k();
    let size_for_alpha = {
        let exact = alpha * n as f64 / k as f64;
        if (exact - exact.round()).abs() <= 1e-9 {
            exact.round() as usize
        } else {
            exact.ceil() as usize
        }
    };
    let to_y: Vec<f64> = inst.agents().iter().map(|a| space.dist_to_set(a, centers)).collect();

    let mut beta_min = 0.0;
    let mut beta_witness = None;
    let mut s_max = 0;
    let mut size_witness = None;
    let mut blocking = None;
    for y in &deviations {
        let to_dev: Vec<f64> = inst.agents().iter().map(|a| space.dist(a, y)).collect();
        for mask in 1u32..(1u32 << n) {
            let size = mask.count_ones() as usize;
            let set = members(mask, n);
            let sa: f64 = set.iter().map(|&i| to_y[i]).sum();
            let sb: f64 = set.iter().map(|&i| to_dev[i]).sum();
            let witness = || BlockingWitness::new(y.clone(), set.clone(), sa, sb);
            if size == size_for_alpha {
                let r = ratio(sa, sb);
                if r > beta_min || beta_witness.is_none() {
                    beta_min = r;
                    beta_witness = Some(witness());
                }
            }
            let blocks = strictly_greater(sa, beta * sb);
            if blocks && size > s_max {
                s_max = size;
                size_witness = Some(witness());
            }
            if blocks && size >= size_for_alpha && blocking.is_none() {
                blocking = Some(witness());
            }
        }
    }
    if s_max < inst.quota() {
        s_max = 0;
        size_witness = None;
    }
    let witness = match (query.alpha, query.beta) {
        (Some(_), Some(_)) => blocking.clone(),
        (None, Some(_)) => size_witness.clone(),
        _ => beta_witness.clone(),
    };
    Ok(AuditResult {
        alpha_query: query.alpha,
        beta_query: query.beta,
        beta_min,
        s_max,
        alpha_sup: k as f64 * s_max as f64 / n as f64,
        in_core: blocking.is_none(),
        witness,
        beta_witness,
        size_witness,
    })
}
