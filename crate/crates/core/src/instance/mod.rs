//! Problem data: agents, candidate centers and the number of centers `k`,
//! plus file IO and generators for the constructed instances.

mod generators;
mod io;

pub use generators::*;
pub use io::*;

use crate::error::{Error, Result};
use crate::metric::{validate_metric, Point, Space, SpaceKind, MetricReport};

/// Where centers may be placed.
#[derive(Debug, Clone, PartialEq)]
pub enum Candidates {
    /// Any real number (line spaces only).
    ContinuousLine,
    Finite(Vec<Point>),
}

/// A clustering problem: a multiset of agents, the feasible center
/// locations and the number of centers to open.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub label: String,
    space: Space,
    agents: Vec<Point>,
    candidates: Candidates,
    k: usize,
}

impl Instance {
    /// Validates and builds an instance. Matrix spaces are checked against
    /// the metric axioms.
    pub fn new(
        label: impl Into<String>,
        space: Space,
        agents: Vec<Point>,
        candidates: Candidates,
        k: usize,
    ) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::validation("agents", "at least one agent is required"));
        }
        if k == 0 || k > agents.len() {
            return Err(Error::validation(
                "k",
                format!("k = {k} must lie in [1, n = {}]", agents.len()),
            ));
        }
        let agents = agents
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                space
                    .normalize(p)
                    .map_err(|e| Error::validation(format!("agents[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        let candidates = match candidates {
            Candidates::ContinuousLine => {
                if space.kind() != SpaceKind::Line {
                    return Err(Error::validation(
                        "candidates",
                        "continuous candidates are only defined on the line",
                    ));
                }
                Candidates::ContinuousLine
            }
            Candidates::Finite(list) => {
                if list.is_empty() {
                    return Err(Error::validation("candidates", "candidate set is empty"));
                }
                Candidates::Finite(
                    list.into_iter()
                        .enumerate()
                        .map(|(i, p)| {
                            space.normalize(p).map_err(|e| {
                                Error::validation(format!("candidates[{i}]"), e.to_string())
                            })
                        })
                        .collect::<Result<Vec<_>>>()?,
                )
            }
        };
        if let MetricReport::Violation(v) = validate_metric(&space) {
            return Err(Error::NotMetric(v.to_string()));
        }
        Ok(Self {
            label: label.into(),
            space,
            agents,
            candidates,
            k,
        })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn agents(&self) -> &[Point] {
        &self.agents
    }

    pub fn candidates(&self) -> &Candidates {
        &self.candidates
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `⌈n/k⌉`, the smallest coalition entitled to a center.
    pub fn quota(&self) -> usize {
        self.n().div_ceil(self.k)
    }

    /// The same instance with a different number of centers.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.n() {
            return Err(Error::validation(
                "k",
                format!("k = {k} must lie in [1, n = {}]", self.n()),
            ));
        }
        Ok(Self { k, ..self.clone() })
    }

    /// The same instance with the candidate set replaced by the distinct
    /// agent locations.
    pub fn with_agent_candidates(&self) -> Self {
        Self {
            candidates: Candidates::Finite(self.distinct_agent_locations()),
            ..self.clone()
        }
    }

    /// Agent locations with exact duplicates removed, in first-seen order.
    pub fn distinct_agent_locations(&self) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for a in &self.agents {
            if !out.iter().any(|p| p == a) {
                out.push(a.clone());
            }
        }
        out
    }

    /// The finite candidate list; for continuous line candidates, the
    /// distinct agent coordinates.
    pub fn candidate_points(&self) -> Vec<Point> {
        match &self.candidates {
            Candidates::Finite(list) => list.clone(),
            Candidates::ContinuousLine => self.distinct_agent_locations(),
        }
    }

    /// Coordinates of line or Euclidean agents, one vector per agent.
    pub fn coordinates(&self) -> Result<Vec<Vec<f64>>> {
        match self.space.kind() {
            SpaceKind::Line | SpaceKind::Euclidean { .. } => {
                Ok(self.agents.iter().filter_map(Point::coords).collect())
            }
            kind => Err(Error::Unsupported(format!(
                "coordinates of a {kind:?} space"
            ))),
        }
    }

    /// Wraps raw coordinates as points of this instance's space.
    pub fn point_from_coords(&self, coords: Vec<f64>) -> Result<Point> {
        match self.space.kind() {
            SpaceKind::Line if coords.len() == 1 => Ok(Point::Coord(coords[0])),
            SpaceKind::Euclidean { dim } if coords.len() == dim => Ok(Point::Vector(coords)),
            kind => Err(Error::Unsupported(format!(
                "{}-dimensional coordinates in a {kind:?} space",
                coords.len()
            ))),
        }
    }

    /// Whether `p` is a feasible center location.
    pub fn is_candidate(&self, p: &Point) -> bool {
        match &self.candidates {
            Candidates::ContinuousLine => matches!(p, Point::Coord(_)),
            Candidates::Finite(list) => list.iter().any(|c| c == p),
        }
    }

    /// `d(i, Y)` for every agent.
    pub fn distances_to(&self, centers: &[Point]) -> Vec<f64> {
        self.agents
            .iter()
            .map(|a| self.space.dist_to_set(a, centers))
            .collect()
    }

    /// Index of the nearest center for every agent, ties to the lowest
    /// center index.
    pub fn assign(&self, centers: &[Point]) -> Vec<usize> {
        self.agents
            .iter()
            .map(|a| {
                let mut best = (f64::INFINITY, 0);
                for (j, c) in centers.iter().enumerate() {
                    let d = self.space.dist(a, c);
                    if d < best.0 {
                        best = (d, j);
                    }
                }
                best.1
            })
            .collect()
    }

    /// `Σ_i d(i, Y)`.
    pub fn total_distance(&self, centers: &[Point]) -> f64 {
        self.distances_to(centers).iter().sum()
    }
}

/// An ordered list of exactly `k` center locations. Duplicates are allowed.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub centers: Vec<Point>,
}

impl Clustering {
    pub fn new(centers: Vec<Point>) -> Self {
        Self { centers }
    }

    /// Checks the center count against `k` and every center against the
    /// space. Centers outside the candidate set are accepted, since
    /// centroid baselines place them anywhere.
    pub fn validate_for(&self, inst: &Instance) -> Result<Clustering> {
        if self.centers.len() != inst.k() {
            return Err(Error::validation(
                "centers",
                format!(
                    "clustering has {} centers but the instance asks for k = {}",
                    self.centers.len(),
                    inst.k()
                ),
            ));
        }
        let centers = self
            .centers
            .iter()
            .enumerate()
            .map(|(i, p)| {
                inst.space()
                    .normalize(p.clone())
                    .map_err(|e| Error::validation(format!("centers[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Clustering { centers })
    }

    /// Whether every center is a feasible candidate location.
    pub fn within_candidates(&self, inst: &Instance) -> bool {
        self.centers.iter().all(|c| inst.is_candidate(c))
    }
}
