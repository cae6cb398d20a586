//! Constructed instances: the unit clique, the two line lower-bound
//! families, the 50-vertex unit tree, the k-medians trap and the
//! three-component Gaussian mixture.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{Candidates, Instance};
use crate::error::{Error, Result};
use crate::metric::{DistanceMatrix, Point, Space, TreeGraph};

/// Distance separating the far groups of [`gen_kmedians_bad`].
pub const FAR: f64 = 1e6;

/// Default `K` for [`gen_line_alpha_lb`].
pub const DEFAULT_PART_SPACING: f64 = 1e6;

/// Complete unit graph on four vertices with one agent per vertex and
/// `k = 2`.
pub fn gen_k4() -> Instance {
    let mut inst = gen_clique(4).expect("K4 is a valid clique");
    inst.label = "k4".into();
    inst
}

/// Complete unit graph `K_n` with one agent per vertex and `k = n/2`.
pub fn gen_clique(n: usize) -> Result<Instance> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(Error::Parameter(format!("clique size must be even and >= 4, got {n}")));
    }
    let vertices: Vec<Point> = (0..n).map(Point::Vertex).collect();
    Instance::new(
        format!("clique-{n}"),
        Space::Matrix(DistanceMatrix::complete_unit(n)),
        vertices.clone(),
        Candidates::Finite(vertices),
        n / 2,
    )
}

/// `k` agents on each integer `1..=k+1` of the line, `n = k(k+1)`.
///
/// Any `k` centers leave some integer point uncovered, and the `k` agents
/// there plus one neighbour gain a factor of at least `k/2` by moving to it.
pub fn gen_line_beta_lb(k: usize) -> Result<Instance> {
    if k < 2 {
        return Err(Error::Parameter(format!("k must be at least 2, got {k}")));
    }
    let agents = (1..=k + 1)
        .flat_map(|x| std::iter::repeat_n(Point::Coord(x as f64), k))
        .collect();
    Instance::new(
        format!("line-beta-lb-k{k}"),
        Space::Line,
        agents,
        Candidates::ContinuousLine,
        k,
    )
}

/// `C` far-apart parts of `2C - 1` agents each: `C - 1` at `jK`, one at
/// `jK + 1` and `C - 1` at `jK + 2`, with `k = 2C - 1`.
pub fn gen_line_alpha_lb(c: usize, spacing: f64) -> Result<Instance> {
    if c < 3 {
        return Err(Error::Parameter(format!("C must be at least 3, got {c}")));
    }
    let span = 2.0 * (2 * c) as f64;
    if !(spacing.is_finite() && spacing > span) {
        return Err(Error::Parameter(format!(
            "part spacing K = {spacing} must be finite and well above the part width"
        )));
    }
    let mut agents = Vec::with_capacity(c * (2 * c - 1));
    for j in 1..=c {
        let base = j as f64 * spacing;
        agents.extend(std::iter::repeat_n(Point::Coord(base), c - 1));
        agents.push(Point::Coord(base + 1.0));
        agents.extend(std::iter::repeat_n(Point::Coord(base + 2.0), c - 1));
    }
    Instance::new(
        format!("line-alpha-lb-c{c}"),
        Space::Line,
        agents,
        Candidates::ContinuousLine,
        2 * c - 1,
    )
}

/// The 50-vertex unit-weight tree: a hub (vertex 0) with seven identical
/// branches, one agent per vertex, `k = 7`.
///
/// Branch `b` occupies vertices `1 + 7b ..= 7 + 7b`: a path of four
/// vertices hanging off the hub whose last vertex has three leaf children.
/// With vertex `v_i` numbered `i - 1`, the first branch gives the distance
/// sums `Σ d(·, v1) = 25` and `Σ d(·, v5) = 13` over `v1..v8`.
pub fn gen_appendix_tree() -> Instance {
    let mut edges = Vec::with_capacity(49);
    for b in 0..7 {
        let base = 1 + 7 * b;
        edges.push((0, base, 1.0));
        edges.push((base, base + 1, 1.0));
        edges.push((base + 1, base + 2, 1.0));
        edges.push((base + 2, base + 3, 1.0));
        for leaf in 4..7 {
            edges.push((base + 3, base + leaf, 1.0));
        }
    }
    let tree = TreeGraph::new(50, edges).expect("appendix tree is a tree");
    let vertices: Vec<Point> = (0..50).map(Point::Vertex).collect();
    Instance::new(
        "appendix-tree",
        Space::tree(tree),
        vertices.clone(),
        Candidates::Finite(vertices),
        7,
    )
    .expect("appendix tree instance is valid")
}

/// A line instance with `k = 3` on which per-group medians are infinitely
/// unfair: group A holds `m` agents at 0, one at 1 and `m` at 2; two far
/// groups of `(m - 1)/2` agents sit at `10^6` and `2·10^6`. Then `n = 3m` and
/// `⌈n/k⌉ = m`.
///
/// `m` must be odd and at least 3 so both far groups are non-empty and of
/// equal size.
pub fn gen_kmedians_bad(m: usize) -> Result<Instance> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::Parameter(format!(
            "m must be odd and at least 3 to keep ⌈n/k⌉ = m, got {m}"
        )));
    }
    let far = (m - 1) / 2;
    let mut agents = Vec::with_capacity(3 * m);
    agents.extend(std::iter::repeat_n(Point::Coord(0.0), m));
    agents.push(Point::Coord(1.0));
    agents.extend(std::iter::repeat_n(Point::Coord(2.0), m));
    agents.extend(std::iter::repeat_n(Point::Coord(FAR), far));
    agents.extend(std::iter::repeat_n(Point::Coord(2.0 * FAR), far));
    Instance::new(
        format!("kmedians-bad-m{m}"),
        Space::Line,
        agents,
        Candidates::ContinuousLine,
        3,
    )
}

/// Parameters of the planar Gaussian mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaussianParams {
    pub n: usize,
    pub weights: Vec<f64>,
    pub means: Vec<[f64; 2]>,
    /// Per-component isotropic standard deviation.
    pub scales: Vec<f64>,
    pub seed: u64,
    pub k: usize,
}

impl Default for GaussianParams {
    fn default() -> Self {
        Self {
            n: 1000,
            weights: vec![0.2, 0.3, 0.5],
            means: vec![[0.0, 0.0], [8.0, 0.0], [16.0, 0.0]],
            scales: vec![1.0, 1.0, 1.0],
            seed: 0,
            k: 10,
        }
    }
}

impl GaussianParams {
    fn validate(&self) -> Result<()> {
        let c = self.weights.len();
        if c == 0 || self.means.len() != c || self.scales.len() != c {
            return Err(Error::Parameter(
                "weights, means and scales must have the same non-zero length".into(),
            ));
        }
        if self.weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::Parameter("weights must be non-negative".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Parameter(format!("weights sum to {total}, not 1")));
        }
        if self.scales.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(Error::Parameter("scales must be non-negative".into()));
        }
        if self.n == 0 {
            return Err(Error::Parameter("n must be positive".into()));
        }
        Ok(())
    }
}

/// Draws the Gaussian mixture and returns the instance together with the
/// component of every point. Candidates are the agent locations.
pub fn gen_gaussian_labeled(params: &GaussianParams) -> Result<(Instance, Vec<usize>)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut agents = Vec::with_capacity(params.n);
    let mut labels = Vec::with_capacity(params.n);
    let last_positive = params
        .weights
        .iter()
        .rposition(|w| *w > 0.0)
        .expect("weights sum to one");
    for _ in 0..params.n {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut comp = last_positive;
        for (j, w) in params.weights.iter().enumerate() {
            acc += w;
            if *w > 0.0 && u < acc {
                comp = j;
                break;
            }
        }
        let zx: f64 = StandardNormal.sample(&mut rng);
        let zy: f64 = StandardNormal.sample(&mut rng);
        let [mx, my] = params.means[comp];
        let s = params.scales[comp];
        agents.push(Point::Vector(vec![mx + s * zx, my + s * zy]));
        labels.push(comp);
    }
    let inst = Instance::new(
        format!("gaussian-n{}-s{}", params.n, params.seed),
        Space::Euclidean { dim: 2 },
        agents.clone(),
        Candidates::Finite(agents),
        params.k.min(params.n),
    )?;
    Ok((inst, labels))
}

/// [`gen_gaussian_labeled`] without the labels.
pub fn gen_gaussian(params: &GaussianParams) -> Result<Instance> {
    gen_gaussian_labeled(params).map(|(inst, _)| inst)
}
