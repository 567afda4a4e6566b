//! Finite metric spaces, metric oracles, and axiom validation.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite metric space: labelled points and a symmetric distance matrix.
///
/// Construction rejects malformed data (shape mismatch, NaN, infinite or
/// negative entries); it does *not* require the metric axioms to hold, so
/// that [`validate_metric`] can report violations on suspect input.
/// Immutable after construction and safe for concurrent reads.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFiniteSpace", into = "RawFiniteSpace")]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    n: usize,
    dist: Vec<f64>,
}

/// Wire format: `{"labels": [...], "dist": [[...], ...]}`.
#[derive(Serialize, Deserialize)]
struct RawFiniteSpace {
    labels: Vec<String>,
    dist: Vec<Vec<f64>>,
}

impl TryFrom<RawFiniteSpace> for FiniteMetricSpace {
    type Error = Error;
    fn try_from(raw: RawFiniteSpace) -> Result<Self> {
        FiniteMetricSpace::new(raw.labels, raw.dist)
    }
}

impl From<FiniteMetricSpace> for RawFiniteSpace {
    fn from(s: FiniteMetricSpace) -> Self {
        RawFiniteSpace { dist: s.matrix(), labels: s.labels }
    }
}

impl FiniteMetricSpace {
    pub fn new(labels: Vec<String>, dist: Vec<Vec<f64>>) -> Result<Self> {
        let n = labels.len();
        if dist.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "{} labels but {} matrix rows",
                n,
                dist.len()
            )));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in dist.iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i,
                    row.len(),
                    n
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidEntry { i, j, value: v });
                }
                flat.push(v);
            }
        }
        Ok(FiniteMetricSpace { labels, n, dist: flat })
    }

    /// Convenience constructor with labels `"0", "1", ...`.
    pub fn from_matrix(dist: Vec<Vec<f64>>) -> Result<Self> {
        let labels = (0..dist.len()).map(|i| i.to_string()).collect();
        Self::new(labels, dist)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Distance by label; `Err` on unknown labels.
    pub fn distance_by_label(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.dist(self.index_of(a)?, self.index_of(b)?))
    }

    pub fn matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.dist(i, j)).collect())
            .collect()
    }
}

/// One violated axiom instance, with its witnessing indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "axiom")]
pub enum AxiomViolation {
    NonzeroDiagonal { i: usize, value: f64 },
    Negative { i: usize, j: usize, value: f64 },
    Asymmetry { i: usize, j: usize, forward: f64, backward: f64 },
    /// `d(i,j) > d(i,k) + d(k,j)` by `excess` (already net of tolerance).
    TriangleExcess { i: usize, j: usize, k: usize, excess: f64 },
}

/// Outcome of [`validate_metric`]: a pass flag plus every violated axiom
/// instance found.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub tolerance: f64,
    pub violations: Vec<AxiomViolation>,
}

/// Check the four metric axioms on a finite space within an absolute
/// tolerance `tau_metric`.
pub fn validate_metric(space: &FiniteMetricSpace, tau_metric: f64) -> ValidationReport {
    let n = space.len();
    let mut violations = Vec::new();
    for i in 0..n {
        let v = space.dist(i, i);
        if v.abs() > tau_metric {
            violations.push(AxiomViolation::NonzeroDiagonal { i, value: v });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let f = space.dist(i, j);
            let b = space.dist(j, i);
            if f < -tau_metric {
                violations.push(AxiomViolation::Negative { i, j, value: f });
            }
            if (f - b).abs() > tau_metric {
                violations.push(AxiomViolation::Asymmetry { i, j, forward: f, backward: b });
            }
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let dij = space.dist(i, j);
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let excess = dij - space.dist(i, k) - space.dist(k, j) - tau_metric;
                if excess > 0.0 {
                    violations.push(AxiomViolation::TriangleExcess { i, j, k, excess });
                }
            }
        }
    }
    ValidationReport { pass: violations.is_empty(), tolerance: tau_metric, violations }
}

/// A pointed metric space given by a pure distance function on an abstract
/// carrier, plus a scale-conditioned sampler.
///
/// Implementations must keep `distance` pure (same inputs, same output) and
/// symmetric with a zero diagonal; `sample_at_scale(t, ..)` must return
/// points within `t · (1 + 1e-12)` of the base point. Samplers take the
/// randomness stream explicitly so there is no hidden shared state and
/// callers can hand each worker an independent stream.
pub trait MetricOracle: Sync {
    type Point: Clone + PartialEq + std::fmt::Debug + Send + Sync + Serialize;

    fn distance(&self, a: &Self::Point, b: &Self::Point) -> f64;

    fn base_point(&self) -> Self::Point;

    /// Draw a point of the closed ball `B(p, scale)`.
    fn sample_at_scale(&self, scale: f64, rng: &mut dyn RngCore) -> Self::Point;

    /// Deterministic probe points of `B(p, scale)`, always including the
    /// base point. Sampled scans evaluate these alongside random draws so
    /// that canonical extremal configurations (coordinate stars, equilateral
    /// triads) are examined at every scale, not merely approached.
    fn scale_probes(&self, _scale: f64) -> Vec<Self::Point> {
        vec![self.base_point()]
    }

    /// Exact metric midpoint of `a` and `b`, where the geometry provides
    /// one in closed form.
    fn midpoint_hint(&self, _a: &Self::Point, _b: &Self::Point) -> Option<Self::Point> {
        None
    }
}

/// Result of spot-checking oracle axioms on random samples.
#[derive(Clone, Debug, Serialize)]
pub struct SpotCheckReport {
    pub triples: usize,
    pub scale: f64,
    pub pass: bool,
    pub max_diagonal: f64,
    pub max_asymmetry: f64,
    /// Worst relative triangle excess: `(d(x,z) - d(x,y) - d(y,z)) / d(x,z)`.
    pub max_triangle_excess_rel: f64,
    /// Worst relative overshoot of `d(sample, p)` beyond the requested scale.
    pub max_ball_overshoot_rel: f64,
}

/// Spot-check symmetry, zero diagonal, the triangle inequality, and the
/// sampler's ball constraint on `triples` random draws at the given scale.
pub fn spot_check<O: MetricOracle>(
    oracle: &O,
    scale: f64,
    triples: usize,
    tau_rel: f64,
    rng: &mut dyn RngCore,
) -> SpotCheckReport {
    let p = oracle.base_point();
    let mut max_diag: f64 = 0.0;
    let mut max_asym: f64 = 0.0;
    let mut max_tri: f64 = f64::NEG_INFINITY;
    let mut max_ball: f64 = f64::NEG_INFINITY;
    for _ in 0..triples {
        let x = oracle.sample_at_scale(scale, rng);
        let y = oracle.sample_at_scale(scale, rng);
        let z = oracle.sample_at_scale(scale, rng);
        for q in [&x, &y, &z] {
            max_diag = max_diag.max(oracle.distance(q, q).abs());
            let dp = oracle.distance(q, &p);
            max_ball = max_ball.max((dp - scale) / scale.max(f64::MIN_POSITIVE));
        }
        let dxy = oracle.distance(&x, &y);
        let dyx = oracle.distance(&y, &x);
        max_asym = max_asym.max((dxy - dyx).abs());
        let dyz = oracle.distance(&y, &z);
        let dxz = oracle.distance(&x, &z);
        if dxz > 0.0 {
            max_tri = max_tri.max((dxz - dxy - dyz) / dxz);
        }
    }
    let pass = max_diag <= tau_rel && max_asym <= tau_rel && max_tri <= tau_rel && max_ball <= tau_rel;
    SpotCheckReport {
        triples,
        scale,
        pass,
        max_diagonal: max_diag,
        max_asymmetry: max_asym,
        max_triangle_excess_rel: max_tri,
        max_ball_overshoot_rel: max_ball,
    }
}
