use super::LambdaParam;
use crate::error::{Error, Result};
use crate::instance::{Clustering, Instance};
use crate::metric::{Point, SpaceKind};

/// Sorts the agents and places center `i` on the `λ·i`-th of them
/// (1-based). The last center sits on agent `min(λk, n)`.
pub fn alg_line(inst: &Instance, lambda: LambdaParam) -> Result<Clustering> {
    if inst.space().kind() != SpaceKind::Line {
        return Err(Error::Unsupported(format!(
            "the quantile procedure needs a line, got {:?}",
            inst.space().kind()
        )));
    }
    let (n, k, l) = (inst.n(), inst.k(), lambda.get());
    if l == 0 || l > n {
        return Err(Error::Parameter(format!("λ = {l} must lie in [1, n = {n}]")));
    }
    if l * (k - 1) > n {
        return Err(Error::Parameter(format!(
            "λ(k−1) = {} exceeds n = {n}; center index out of range",
            l * (k - 1)
        )));
    }
    let mut xs: Vec<f64> = inst.agents().iter().filter_map(Point::as_coord).collect();
    xs.sort_by(f64::total_cmp);
    let mut centers: Vec<Point> = (1..k).map(|i| Point::Coord(xs[l * i - 1])).collect();
    centers.push(Point::Coord(xs[(l * k).min(n) - 1]));
    Ok(Clustering::new(centers))
}
