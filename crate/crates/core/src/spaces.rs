//! Built-in pointed metric oracles with known curvature signatures, plus a
//! doubling-constant estimator.
//!
//! Each oracle fixes a carrier, a closed-form distance, a base point, a
//! ball sampler, deterministic scale probes, and (where the geometry has
//! one) an analytic midpoint. The test bed spans flat space (`euclidean`),
//! normed planes that fail Ptolemy (`l1`, `linf`), the two constant-curvature
//! models (`hyperbolic`, `sphere`), a metric tree (`tripod`), a snowflaked
//! line with no midpoints (`snowflake`), and arbitrary finite point clouds.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{validate_metric, FiniteMetricSpace, MetricOracle};
use crate::rng::unit_direction;

/// `arccosh(1 + z)` for `z >= 0`, accurate for small `z` (never forms
/// `1 + z` before the subtraction that would cancel).
pub(crate) fn acosh1p(z: f64) -> f64 {
    debug_assert!(z >= -1e-15, "acosh1p domain: {z}");
    let z = z.max(0.0);
    (z + (z * (z + 2.0)).sqrt()).ln_1p()
}

/// A parsed space specifier. CLI syntax, exactly:
/// `euclidean:<dim>`, `l1`, `linf`, `hyperbolic`, `sphere:<radius>`,
/// `tripod:<a>,<b>,<c>`, `snowflake:<alpha>`, `cloud:<path.json>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SpaceSpec {
    Euclidean { dim: usize },
    L1Plane,
    LinfPlane,
    HyperbolicPlane,
    Sphere { radius: f64 },
    Tripod { edges: [f64; 3] },
    Snowflake { alpha: f64 },
    Cloud { path: PathBuf },
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParameter(msg);
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        match (head, rest) {
            ("euclidean", Some(d)) => {
                let dim: usize = d.parse().map_err(|_| bad(format!("euclidean dim `{d}`")))?;
                if dim == 0 {
                    return Err(bad("euclidean dim must be >= 1".into()));
                }
                Ok(SpaceSpec::Euclidean { dim })
            }
            ("l1", None) => Ok(SpaceSpec::L1Plane),
            ("linf", None) => Ok(SpaceSpec::LinfPlane),
            ("hyperbolic", None) => Ok(SpaceSpec::HyperbolicPlane),
            ("sphere", Some(r)) => {
                let radius: f64 = r.parse().map_err(|_| bad(format!("sphere radius `{r}`")))?;
                Ok(SpaceSpec::Sphere { radius })
            }
            ("tripod", Some(e)) => {
                let parts: Vec<&str> = e.split(',').collect();
                if parts.len() != 3 {
                    return Err(bad(format!("tripod wants three edge lengths, got `{e}`")));
                }
                let mut edges = [0.0; 3];
                for (slot, p) in edges.iter_mut().zip(&parts) {
                    *slot = p.parse().map_err(|_| bad(format!("tripod edge `{p}`")))?;
                }
                Ok(SpaceSpec::Tripod { edges })
            }
            ("snowflake", Some(a)) => {
                let alpha: f64 = a.parse().map_err(|_| bad(format!("snowflake alpha `{a}`")))?;
                Ok(SpaceSpec::Snowflake { alpha })
            }
            ("cloud", Some(p)) => Ok(SpaceSpec::Cloud { path: PathBuf::from(p) }),
            _ => Err(bad(format!("unrecognized space specifier `{s}`"))),
        }
    }
}

impl std::fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpaceSpec::Euclidean { dim } => write!(f, "euclidean:{dim}"),
            SpaceSpec::L1Plane => write!(f, "l1"),
            SpaceSpec::LinfPlane => write!(f, "linf"),
            SpaceSpec::HyperbolicPlane => write!(f, "hyperbolic"),
            SpaceSpec::Sphere { radius } => write!(f, "sphere:{radius}"),
            SpaceSpec::Tripod { edges } => write!(f, "tripod:{},{},{}", edges[0], edges[1], edges[2]),
            SpaceSpec::Snowflake { alpha } => write!(f, "snowflake:{alpha}"),
            SpaceSpec::Cloud { path } => write!(f, "cloud:{}", path.display()),
        }
    }
}

/// Wire format for point clouds:
/// `{"metric": "euclidean"|"l1"|"linf"|"custom-matrix", "points": [[...],...], "base_point": i}`.
/// For `custom-matrix`, `points` holds the rows of the distance matrix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CloudJson {
    pub metric: String,
    pub points: Vec<Vec<f64>>,
    pub base_point: usize,
}

/// Where the tripod's marked point sits. The branch center is the
/// curvature-interesting choice and the default.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripodBase {
    Center,
    Leaf(usize),
}

/// A point of a built-in carrier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarrierPoint {
    /// Coordinates in a normed plane/line, the Poincaré disk, or the
    /// snowflaked line.
    Coords(Vec<f64>),
    /// Unit direction in R^3; the sphere point is `radius * direction`.
    Sphere([f64; 3]),
    /// Point on tripod edge `edge` at arc length `arm` from the center.
    Tripod { edge: usize, arm: f64 },
    /// Index into a finite point cloud.
    Cloud(usize),
}

#[derive(Clone, Debug)]
enum OracleKind {
    Euclidean { dim: usize },
    L1Plane,
    LinfPlane,
    HyperbolicPlane,
    Sphere { radius: f64 },
    Tripod { edges: [f64; 3], base: TripodBase },
    Snowflake { alpha: f64 },
    Cloud { space: FiniteMetricSpace, base: usize },
}

/// A built-in pointed metric oracle. See [`make_oracle`].
#[derive(Clone, Debug)]
pub struct BuiltinOracle {
    kind: OracleKind,
}

/// Build the oracle for a parsed specifier, validating its parameters.
/// `cloud:` specs read and validate the JSON file here.
pub fn make_oracle(spec: &SpaceSpec) -> Result<BuiltinOracle> {
    let kind = match spec {
        SpaceSpec::Euclidean { dim } => {
            if *dim == 0 {
                return Err(Error::InvalidParameter("euclidean dim must be >= 1".into()));
            }
            OracleKind::Euclidean { dim: *dim }
        }
        SpaceSpec::L1Plane => OracleKind::L1Plane,
        SpaceSpec::LinfPlane => OracleKind::LinfPlane,
        SpaceSpec::HyperbolicPlane => OracleKind::HyperbolicPlane,
        SpaceSpec::Sphere { radius } => {
            if !(radius.is_finite() && *radius > 0.0) {
                return Err(Error::InvalidParameter(format!("sphere radius {radius} must be > 0")));
            }
            OracleKind::Sphere { radius: *radius }
        }
        SpaceSpec::Tripod { edges } => {
            if edges.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
                return Err(Error::InvalidParameter(format!(
                    "tripod edges {edges:?} must all be > 0"
                )));
            }
            OracleKind::Tripod { edges: *edges, base: TripodBase::Center }
        }
        SpaceSpec::Snowflake { alpha } => {
            if !(alpha.is_finite() && *alpha > 0.0 && *alpha < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "snowflake alpha {alpha} must lie strictly inside (0,1)"
                )));
            }
            OracleKind::Snowflake { alpha: *alpha }
        }
        SpaceSpec::Cloud { path } => {
            let cloud = load_cloud(path)?;
            return BuiltinOracle::from_cloud(&cloud);
        }
    };
    Ok(BuiltinOracle { kind })
}

/// Load a cloud spec from an already-parsed JSON description.
pub fn oracle_from_cloud(cloud: &CloudJson) -> Result<BuiltinOracle> {
    BuiltinOracle::from_cloud(cloud)
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn hyperbolic_distance(u: &[f64], v: &[f64]) -> f64 {
    let du2: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    let nu2: f64 = u.iter().map(|x| x * x).sum();
    let nv2: f64 = v.iter().map(|x| x * x).sum();
    acosh1p(2.0 * du2 / ((1.0 - nu2) * (1.0 - nv2)))
}

/// Poincaré-disk radius of a point at hyperbolic distance `h` from the
/// origin: `tanh(h/2)`.
fn disk_radius(h: f64) -> f64 {
    (h / 2.0).tanh()
}

fn sphere_angle(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let cx = a[1] * b[2] - a[2] * b[1];
    let cy = a[2] * b[0] - a[0] * b[2];
    let cz = a[0] * b[1] - a[1] * b[0];
    let cross = (cx * cx + cy * cy + cz * cz).sqrt();
    cross.atan2(dot)
}

/// Unit sphere point at colatitude `theta` along `bearing` from the north
/// pole.
fn sphere_point(theta: f64, bearing: f64) -> [f64; 3] {
    [theta.sin() * bearing.cos(), theta.sin() * bearing.sin(), theta.cos()]
}

impl BuiltinOracle {
    fn from_cloud(cloud: &CloudJson) -> Result<Self> {
        let n = cloud.points.len();
        if n == 0 {
            return Err(Error::InvalidInput("cloud has no points".into()));
        }
        if cloud.base_point >= n {
            return Err(Error::InvalidParameter(format!(
                "base_point {} out of range for {} points",
                cloud.base_point, n
            )));
        }
        let matrix: Vec<Vec<f64>> = match cloud.metric.as_str() {
            "custom-matrix" => cloud.points.clone(),
            m @ ("euclidean" | "l1" | "linf") => {
                let dim = cloud.points[0].len();
                if cloud.points.iter().any(|p| p.len() != dim) {
                    return Err(Error::DimensionMismatch(
                        "cloud points have mixed dimensions".into(),
                    ));
                }
                let d = |a: &[f64], b: &[f64]| -> f64 {
                    match m {
                        "euclidean" => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt(),
                        "l1" => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
                        _ => a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max),
                    }
                };
                cloud
                    .points
                    .iter()
                    .map(|a| cloud.points.iter().map(|b| d(a, b)).collect())
                    .collect()
            }
            other => {
                return Err(Error::InvalidParameter(format!("unknown cloud metric `{other}`")))
            }
        };
        let space = FiniteMetricSpace::from_matrix(matrix)?;
        let report = validate_metric(&space, crate::defaults::TAU_METRIC);
        if !report.pass {
            return Err(Error::InvalidInput(format!(
                "cloud distances violate the metric axioms ({} instances); first: {:?}",
                report.violations.len(),
                report.violations[0]
            )));
        }
        Ok(BuiltinOracle { kind: OracleKind::Cloud { space, base: cloud.base_point } })
    }

    /// Finite space behind a cloud oracle, if this is one.
    pub fn cloud_space(&self) -> Option<(&FiniteMetricSpace, usize)> {
        match &self.kind {
            OracleKind::Cloud { space, base } => Some((space, *base)),
            _ => None,
        }
    }

    /// Move the tripod's marked point to a leaf (API-level override; the
    /// CLI always uses the center).
    pub fn with_tripod_base(mut self, base: TripodBase) -> Result<Self> {
        match &mut self.kind {
            OracleKind::Tripod { base: b, .. } => {
                if let TripodBase::Leaf(i) = base {
                    if i >= 3 {
                        return Err(Error::InvalidParameter(format!("tripod leaf {i} out of range")));
                    }
                }
                *b = base;
                Ok(self)
            }
            _ => Err(Error::InvalidParameter("not a tripod oracle".into())),
        }
    }

    /// True for the constant-curvature models whose finite-scale distances
    /// deviate quadratically from their blow-up limits (hyperbolic plane,
    /// sphere). Workflows widen stability and pass tolerances for these.
    pub fn is_curved_model(&self) -> bool {
        matches!(self.kind, OracleKind::HyperbolicPlane | OracleKind::Sphere { .. })
    }

    /// Whether this geometry provides closed-form midpoints. Midpoint
    /// verdicts run at a much tighter tolerance when it does.
    pub fn has_analytic_midpoint(&self) -> bool {
        !matches!(self.kind, OracleKind::Snowflake { .. } | OracleKind::Cloud { .. })
    }

    fn expect_coords<'a>(&self, p: &'a CarrierPoint) -> &'a [f64] {
        match p {
            CarrierPoint::Coords(c) => c,
            other => panic!("expected coordinate point for this carrier, got {other:?}"),
        }
    }

    /// Validate that a point belongs to this oracle's carrier.
    pub fn check_point(&self, p: &CarrierPoint) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidInput(msg));
        match (&self.kind, p) {
            (OracleKind::Euclidean { dim }, CarrierPoint::Coords(c)) => {
                if c.len() == *dim && c.iter().all(|x| x.is_finite()) {
                    Ok(())
                } else {
                    fail(format!("expected {dim} finite coordinates, got {c:?}"))
                }
            }
            (OracleKind::L1Plane | OracleKind::LinfPlane, CarrierPoint::Coords(c)) => {
                if c.len() == 2 && c.iter().all(|x| x.is_finite()) {
                    Ok(())
                } else {
                    fail(format!("expected 2 finite coordinates, got {c:?}"))
                }
            }
            (OracleKind::HyperbolicPlane, CarrierPoint::Coords(c)) => {
                if c.len() == 2 && norm2(c) < 1.0 {
                    Ok(())
                } else {
                    fail(format!("hyperbolic points live strictly inside the unit disk: {c:?}"))
                }
            }
            (OracleKind::Snowflake { .. }, CarrierPoint::Coords(c)) => {
                if c.len() == 1 && c[0].is_finite() {
                    Ok(())
                } else {
                    fail(format!("expected 1 finite coordinate, got {c:?}"))
                }
            }
            (OracleKind::Sphere { .. }, CarrierPoint::Sphere(d)) => {
                if (norm2(d) - 1.0).abs() < 1e-9 {
                    Ok(())
                } else {
                    fail(format!("sphere direction must be unit length: {d:?}"))
                }
            }
            (OracleKind::Tripod { edges, .. }, CarrierPoint::Tripod { edge, arm }) => {
                if *edge < 3 && *arm >= 0.0 && *arm <= edges[*edge] + 1e-12 {
                    Ok(())
                } else {
                    fail(format!("tripod point out of range: edge {edge}, arm {arm}"))
                }
            }
            (OracleKind::Cloud { space, .. }, CarrierPoint::Cloud(i)) => {
                if *i < space.len() {
                    Ok(())
                } else {
                    fail(format!("cloud index {i} out of range"))
                }
            }
            (_, other) => fail(format!("point {other:?} does not belong to this carrier")),
        }
    }

    /// Interpret a row of numbers from an explicit pool sequence as a
    /// carrier point: coordinates for the flat planes, disk, and snowflake;
    /// a unit 3-vector for the sphere (normalized here); `[edge, arm]` for
    /// the tripod; `[index]` for clouds.
    pub fn point_from_values(&self, vals: &[f64]) -> Result<CarrierPoint> {
        let point = match &self.kind {
            OracleKind::Euclidean { .. }
            | OracleKind::L1Plane
            | OracleKind::LinfPlane
            | OracleKind::HyperbolicPlane
            | OracleKind::Snowflake { .. } => CarrierPoint::Coords(vals.to_vec()),
            OracleKind::Sphere { .. } => {
                if vals.len() != 3 {
                    return Err(Error::DimensionMismatch(
                        "sphere points are unit 3-vectors".into(),
                    ));
                }
                let n = norm2(vals);
                if n < 1e-12 {
                    return Err(Error::InvalidInput("zero vector is not a sphere direction".into()));
                }
                CarrierPoint::Sphere([vals[0] / n, vals[1] / n, vals[2] / n])
            }
            OracleKind::Tripod { .. } => {
                if vals.len() != 2 {
                    return Err(Error::DimensionMismatch("tripod points are [edge, arm]".into()));
                }
                CarrierPoint::Tripod { edge: vals[0].round() as usize, arm: vals[1] }
            }
            OracleKind::Cloud { .. } => {
                if vals.len() != 1 {
                    return Err(Error::DimensionMismatch("cloud points are [index]".into()));
                }
                CarrierPoint::Cloud(vals[0].round() as usize)
            }
        };
        self.check_point(&point)?;
        Ok(point)
    }

    /// Point at metric distance `|direction| * t` from the base point, in
    /// the canonical direction encoded by `direction`. This is the radial
    /// generator pools use: for each built-in space the parametrization is
    /// exact, so `d(radial(v, t), p) = |v| * t` up to rounding.
    ///
    /// Encoding per space: coordinate vector (flat planes and euclidean);
    /// `[x, y]` giving the Euclidean direction and hyperbolic rate
    /// (hyperbolic); `[x, y]` giving the bearing and arc rate (sphere);
    /// `[edge, rate]` (tripod, with the leaf-based variant walking through
    /// the center as needed); `[c]` with coordinate `sign(c)(|c|t)^{1/alpha}`
    /// (snowflake). Clouds have no radial generator.
    pub fn radial_point(&self, direction: &[f64], t: f64) -> Result<CarrierPoint> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidParameter(format!("radial scale {t} must be >= 0")));
        }
        match &self.kind {
            OracleKind::Euclidean { dim } => {
                if direction.len() != *dim {
                    return Err(Error::DimensionMismatch(format!(
                        "radial direction has {} components, space has dim {dim}",
                        direction.len()
                    )));
                }
                Ok(CarrierPoint::Coords(direction.iter().map(|x| x * t).collect()))
            }
            OracleKind::L1Plane | OracleKind::LinfPlane => {
                if direction.len() != 2 {
                    return Err(Error::DimensionMismatch("planar direction needs 2 components".into()));
                }
                Ok(CarrierPoint::Coords(vec![direction[0] * t, direction[1] * t]))
            }
            OracleKind::HyperbolicPlane => {
                if direction.len() != 2 {
                    return Err(Error::DimensionMismatch("disk direction needs 2 components".into()));
                }
                let rate = norm2(direction);
                if rate == 0.0 {
                    return Ok(CarrierPoint::Coords(vec![0.0, 0.0]));
                }
                let r = disk_radius(rate * t);
                Ok(CarrierPoint::Coords(vec![
                    direction[0] / rate * r,
                    direction[1] / rate * r,
                ]))
            }
            OracleKind::Sphere { radius } => {
                if direction.len() != 2 {
                    return Err(Error::DimensionMismatch("sphere direction needs 2 components".into()));
                }
                let rate = norm2(direction);
                if rate == 0.0 {
                    return Ok(CarrierPoint::Sphere([0.0, 0.0, 1.0]));
                }
                let arc = rate * t;
                if arc > PI * radius + 1e-12 {
                    return Err(Error::InvalidParameter(format!(
                        "arc {arc} exceeds the antipodal distance {}",
                        PI * radius
                    )));
                }
                let bearing = direction[1].atan2(direction[0]);
                Ok(CarrierPoint::Sphere(sphere_point(arc / radius, bearing)))
            }
            OracleKind::Tripod { edges, base } => {
                if direction.len() != 2 {
                    return Err(Error::DimensionMismatch("tripod direction is [edge, rate]".into()));
                }
                let edge = direction[0].round() as usize;
                if edge >= 3 || (direction[0] - edge as f64).abs() > 1e-9 {
                    return Err(Error::InvalidParameter(format!(
                        "tripod edge selector {} must be 0, 1, or 2",
                        direction[0]
                    )));
                }
                let rate = direction[1];
                if rate < 0.0 {
                    return Err(Error::InvalidParameter("tripod rate must be >= 0".into()));
                }
                let dist = rate * t;
                match base {
                    TripodBase::Center => {
                        if dist > edges[edge] + 1e-12 {
                            return Err(Error::InvalidParameter(format!(
                                "arm {dist} exceeds edge length {}",
                                edges[edge]
                            )));
                        }
                        Ok(CarrierPoint::Tripod { edge, arm: dist.min(edges[edge]) })
                    }
                    TripodBase::Leaf(leaf) => {
                        // Walk from the leaf toward the center, spilling
                        // onto `edge` past it.
                        if dist <= edges[*leaf] {
                            Ok(CarrierPoint::Tripod { edge: *leaf, arm: edges[*leaf] - dist })
                        } else {
                            let spill = dist - edges[*leaf];
                            if edge == *leaf || spill > edges[edge] + 1e-12 {
                                return Err(Error::InvalidParameter(format!(
                                    "radial walk of length {dist} leaves the tripod"
                                )));
                            }
                            Ok(CarrierPoint::Tripod { edge, arm: spill.min(edges[edge]) })
                        }
                    }
                }
            }
            OracleKind::Snowflake { alpha } => {
                if direction.len() != 1 {
                    return Err(Error::DimensionMismatch("snowflake direction is 1-dimensional".into()));
                }
                let rate = direction[0];
                let coord = rate.signum() * (rate.abs() * t).powf(1.0 / alpha);
                Ok(CarrierPoint::Coords(vec![coord]))
            }
            OracleKind::Cloud { .. } => Err(Error::InvalidParameter(
                "point clouds have no radial generator; use explicit index sequences".into(),
            )),
        }
    }
}

impl MetricOracle for BuiltinOracle {
    type Point = CarrierPoint;

    fn distance(&self, a: &CarrierPoint, b: &CarrierPoint) -> f64 {
        match &self.kind {
            OracleKind::Euclidean { .. } => {
                let (x, y) = (self.expect_coords(a), self.expect_coords(b));
                x.iter().zip(y).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
            }
            OracleKind::L1Plane => {
                let (x, y) = (self.expect_coords(a), self.expect_coords(b));
                x.iter().zip(y).map(|(u, v)| (u - v).abs()).sum()
            }
            OracleKind::LinfPlane => {
                let (x, y) = (self.expect_coords(a), self.expect_coords(b));
                x.iter().zip(y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
            }
            OracleKind::HyperbolicPlane => {
                hyperbolic_distance(self.expect_coords(a), self.expect_coords(b))
            }
            OracleKind::Sphere { radius } => match (a, b) {
                (CarrierPoint::Sphere(u), CarrierPoint::Sphere(v)) => radius * sphere_angle(u, v),
                _ => panic!("expected sphere points"),
            },
            OracleKind::Tripod { .. } => match (a, b) {
                (
                    CarrierPoint::Tripod { edge: e1, arm: a1 },
                    CarrierPoint::Tripod { edge: e2, arm: a2 },
                ) => {
                    if e1 == e2 {
                        (a1 - a2).abs()
                    } else {
                        a1 + a2
                    }
                }
                _ => panic!("expected tripod points"),
            },
            OracleKind::Snowflake { alpha } => {
                let (x, y) = (self.expect_coords(a), self.expect_coords(b));
                (x[0] - y[0]).abs().powf(*alpha)
            }
            OracleKind::Cloud { space, .. } => match (a, b) {
                (CarrierPoint::Cloud(i), CarrierPoint::Cloud(j)) => space.dist(*i, *j),
                _ => panic!("expected cloud indices"),
            },
        }
    }

    fn base_point(&self) -> CarrierPoint {
        match &self.kind {
            OracleKind::Euclidean { dim } => CarrierPoint::Coords(vec![0.0; *dim]),
            OracleKind::L1Plane | OracleKind::LinfPlane | OracleKind::HyperbolicPlane => {
                CarrierPoint::Coords(vec![0.0, 0.0])
            }
            OracleKind::Sphere { .. } => CarrierPoint::Sphere([0.0, 0.0, 1.0]),
            OracleKind::Tripod { edges, base } => match base {
                TripodBase::Center => CarrierPoint::Tripod { edge: 0, arm: 0.0 },
                TripodBase::Leaf(i) => CarrierPoint::Tripod { edge: *i, arm: edges[*i] },
            },
            OracleKind::Snowflake { .. } => CarrierPoint::Coords(vec![0.0]),
            OracleKind::Cloud { base, .. } => CarrierPoint::Cloud(*base),
        }
    }

    fn sample_at_scale(&self, scale: f64, rng: &mut dyn RngCore) -> CarrierPoint {
        assert!(scale.is_finite() && scale > 0.0, "scale must be > 0, got {scale}");
        match &self.kind {
            OracleKind::Euclidean { dim } => {
                let dir = unit_direction(*dim, rng);
                let u: f64 = rng.gen();
                let r = scale * u.powf(1.0 / *dim as f64);
                CarrierPoint::Coords(dir.into_iter().map(|x| x * r).collect())
            }
            OracleKind::L1Plane => loop {
                let x = rng.gen_range(-scale..=scale);
                let y = rng.gen_range(-scale..=scale);
                if x.abs() + y.abs() <= scale {
                    return CarrierPoint::Coords(vec![x, y]);
                }
            },
            OracleKind::LinfPlane => {
                let x = rng.gen_range(-scale..=scale);
                let y = rng.gen_range(-scale..=scale);
                CarrierPoint::Coords(vec![x, y])
            }
            OracleKind::HyperbolicPlane => {
                // Radial inverse-CDF for the hyperbolic area element
                // sinh(h) dh on [0, scale]: h = acosh(1 + U (cosh(scale)-1)).
                let u: f64 = rng.gen();
                let coshm1 = 2.0 * (scale / 2.0).sinh().powi(2);
                let h = acosh1p(u * coshm1);
                let r = disk_radius(h);
                let theta = rng.gen_range(0.0..TAU);
                CarrierPoint::Coords(vec![r * theta.cos(), r * theta.sin()])
            }
            OracleKind::Sphere { radius } => {
                // Uniform on the geodesic cap of radius min(scale, pi R):
                // versine of the colatitude is uniform.
                let theta_max = (scale / radius).min(PI);
                let v = rng.gen::<f64>() * 2.0 * (theta_max / 2.0).sin().powi(2);
                let theta = 2.0 * (v / 2.0).sqrt().asin();
                let bearing = rng.gen_range(0.0..TAU);
                CarrierPoint::Sphere(sphere_point(theta, bearing))
            }
            OracleKind::Tripod { edges, base } => {
                // Uniform by arc length over the reachable part of the ball.
                let mut segments: Vec<(usize, f64, f64, bool)> = Vec::new();
                match base {
                    TripodBase::Center => {
                        for (e, len) in edges.iter().enumerate() {
                            segments.push((e, 0.0, scale.min(*len), false));
                        }
                    }
                    TripodBase::Leaf(leaf) => {
                        let reach = scale.min(edges[*leaf]);
                        segments.push((*leaf, edges[*leaf] - reach, edges[*leaf], false));
                        if scale > edges[*leaf] {
                            let spill = scale - edges[*leaf];
                            for (e, len) in edges.iter().enumerate() {
                                if e != *leaf {
                                    segments.push((e, 0.0, spill.min(*len), false));
                                }
                            }
                        }
                    }
                }
                let total: f64 = segments.iter().map(|(_, lo, hi, _)| hi - lo).sum();
                let mut u = rng.gen::<f64>() * total;
                for (e, lo, hi, _) in &segments {
                    let len = hi - lo;
                    if u <= len {
                        return CarrierPoint::Tripod { edge: *e, arm: lo + u };
                    }
                    u -= len;
                }
                let (e, lo, _, _) = segments[segments.len() - 1];
                CarrierPoint::Tripod { edge: e, arm: lo }
            }
            OracleKind::Snowflake { alpha } => {
                let reach = scale.powf(1.0 / alpha);
                CarrierPoint::Coords(vec![rng.gen_range(-reach..=reach)])
            }
            OracleKind::Cloud { space, base } => {
                let eligible: Vec<usize> =
                    (0..space.len()).filter(|&i| space.dist(i, *base) <= scale).collect();
                CarrierPoint::Cloud(eligible[rng.gen_range(0..eligible.len())])
            }
        }
    }

    fn scale_probes(&self, scale: f64) -> Vec<CarrierPoint> {
        let mut probes = vec![self.base_point()];
        match &self.kind {
            OracleKind::Euclidean { dim } => {
                for i in 0..*dim {
                    for sign in [1.0, -1.0] {
                        let mut c = vec![0.0; *dim];
                        c[i] = sign * scale;
                        probes.push(CarrierPoint::Coords(c));
                    }
                }
            }
            OracleKind::L1Plane => {
                for (x, y) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
                    probes.push(CarrierPoint::Coords(vec![x * scale, y * scale]));
                }
                let h = scale / 2.0;
                for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    probes.push(CarrierPoint::Coords(vec![sx * h, sy * h]));
                }
            }
            OracleKind::LinfPlane => {
                for (x, y) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0)] {
                    probes.push(CarrierPoint::Coords(vec![x * scale, y * scale]));
                }
                for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                    probes.push(CarrierPoint::Coords(vec![sx * scale, sy * scale]));
                }
            }
            OracleKind::HyperbolicPlane => {
                // Six compass directions: opposite pairs and equilateral
                // triads both appear among them.
                let r = disk_radius(scale);
                for k in 0..6 {
                    let theta = TAU * k as f64 / 6.0;
                    probes.push(CarrierPoint::Coords(vec![r * theta.cos(), r * theta.sin()]));
                }
            }
            OracleKind::Sphere { radius } => {
                let theta = (scale / radius).min(PI);
                for k in 0..6 {
                    let bearing = TAU * k as f64 / 6.0;
                    probes.push(CarrierPoint::Sphere(sphere_point(theta, bearing)));
                }
            }
            OracleKind::Tripod { edges, base } => match base {
                TripodBase::Center => {
                    for (e, len) in edges.iter().enumerate() {
                        probes.push(CarrierPoint::Tripod { edge: e, arm: scale.min(*len) });
                    }
                }
                TripodBase::Leaf(leaf) => {
                    let reach = scale.min(edges[*leaf]);
                    probes.push(CarrierPoint::Tripod { edge: *leaf, arm: edges[*leaf] - reach });
                    if scale > edges[*leaf] {
                        let spill = scale - edges[*leaf];
                        for (e, len) in edges.iter().enumerate() {
                            if e != *leaf {
                                probes.push(CarrierPoint::Tripod { edge: e, arm: spill.min(*len) });
                            }
                        }
                    }
                }
            },
            OracleKind::Snowflake { alpha } => {
                let reach = scale.powf(1.0 / alpha);
                let half_reach = (scale / 2.0).powf(1.0 / alpha);
                probes.push(CarrierPoint::Coords(vec![reach]));
                probes.push(CarrierPoint::Coords(vec![-reach]));
                probes.push(CarrierPoint::Coords(vec![half_reach]));
                probes.push(CarrierPoint::Coords(vec![-half_reach]));
            }
            OracleKind::Cloud { .. } => {}
        }
        probes
    }

    fn midpoint_hint(&self, a: &CarrierPoint, b: &CarrierPoint) -> Option<CarrierPoint> {
        match &self.kind {
            // Coordinate midpoints are metric midpoints in any normed plane.
            OracleKind::Euclidean { .. } | OracleKind::L1Plane | OracleKind::LinfPlane => {
                let (x, y) = (self.expect_coords(a), self.expect_coords(b));
                Some(CarrierPoint::Coords(
                    x.iter().zip(y).map(|(u, v)| (u + v) / 2.0).collect(),
                ))
            }
            OracleKind::HyperbolicPlane => {
                // Hyperboloid-model midpoint: embed, average, renormalize.
                let (u, v) = (self.expect_coords(a), self.expect_coords(b));
                let lift = |c: &[f64]| -> [f64; 3] {
                    let n2: f64 = c.iter().map(|x| x * x).sum();
                    let s = 1.0 - n2;
                    [(1.0 + n2) / s, 2.0 * c[0] / s, 2.0 * c[1] / s]
                };
                let (xu, xv) = (lift(u), lift(v));
                let sum = [xu[0] + xv[0], xu[1] + xv[1], xu[2] + xv[2]];
                let q = sum[0] * sum[0] - sum[1] * sum[1] - sum[2] * sum[2];
                if q <= 0.0 {
                    return None;
                }
                let s = q.sqrt();
                let m = [sum[0] / s, sum[1] / s, sum[2] / s];
                Some(CarrierPoint::Coords(vec![m[1] / (1.0 + m[0]), m[2] / (1.0 + m[0])]))
            }
            OracleKind::Sphere { .. } => match (a, b) {
                (CarrierPoint::Sphere(u), CarrierPoint::Sphere(v)) => {
                    let sum = [u[0] + v[0], u[1] + v[1], u[2] + v[2]];
                    let n = norm2(&sum);
                    if n < 1e-12 {
                        // Antipodal pair: any equator point is a midpoint;
                        // pick one deterministically, orthogonal to u.
                        let pick = if u[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
                        let dot = pick[0] * u[0] + pick[1] * u[1] + pick[2] * u[2];
                        let w = [pick[0] - dot * u[0], pick[1] - dot * u[1], pick[2] - dot * u[2]];
                        let wn = norm2(&w);
                        return Some(CarrierPoint::Sphere([w[0] / wn, w[1] / wn, w[2] / wn]));
                    }
                    Some(CarrierPoint::Sphere([sum[0] / n, sum[1] / n, sum[2] / n]))
                }
                _ => None,
            },
            OracleKind::Tripod { .. } => match (a, b) {
                (
                    CarrierPoint::Tripod { edge: e1, arm: a1 },
                    CarrierPoint::Tripod { edge: e2, arm: a2 },
                ) => {
                    if e1 == e2 {
                        Some(CarrierPoint::Tripod { edge: *e1, arm: (a1 + a2) / 2.0 })
                    } else {
                        // Path runs through the center; the midpoint sits on
                        // the longer arm's edge.
                        let half = (a1 + a2) / 2.0;
                        if *a1 >= half {
                            Some(CarrierPoint::Tripod { edge: *e1, arm: a1 - half })
                        } else {
                            Some(CarrierPoint::Tripod { edge: *e2, arm: a2 - half })
                        }
                    }
                }
                _ => None,
            },
            OracleKind::Snowflake { .. } | OracleKind::Cloud { .. } => None,
        }
    }
}

/// Result of the greedy net construction behind the doubling heuristic.
#[derive(Clone, Debug, Serialize)]
pub struct DoublingEstimate {
    pub scale: f64,
    pub budget: usize,
    /// Cardinality of a greedy (scale/2)-net over the sampled ball: a lower
    /// estimate of the covering number, order-of-magnitude only.
    pub net_size: usize,
}

/// Estimate the doubling behaviour of `B(p, scale)`: draw `budget` samples,
/// keep each one that is farther than `scale/2` from every kept point, and
/// report the net size. Deterministic given the stream; monotone
/// nondecreasing in `budget` for a fixed stream (draws are a prefix).
pub fn estimate_doubling_constant<O: MetricOracle>(
    oracle: &O,
    scale: f64,
    budget: usize,
    rng: &mut dyn RngCore,
) -> Result<DoublingEstimate> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidParameter(format!("scale {scale} must be > 0")));
    }
    if budget < 1 {
        return Err(Error::InvalidParameter("budget must be >= 1".into()));
    }
    let eps = scale / 2.0;
    let mut net: Vec<O::Point> = vec![oracle.base_point()];
    for _ in 0..budget {
        let s = oracle.sample_at_scale(scale, rng);
        if net.iter().all(|q| oracle.distance(q, &s) > eps) {
            net.push(s);
        }
    }
    Ok(DoublingEstimate { scale, budget, net_size: net.len() })
}

/// Read a cloud JSON file from disk.
pub fn load_cloud(path: &Path) -> Result<CloudJson> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::spot_check;
    use crate::rng::derive_rng;

    fn all_test_oracles() -> Vec<(&'static str, BuiltinOracle)> {
        let cloud = CloudJson {
            metric: "euclidean".into(),
            points: vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 2.0], vec![3.0, 1.0]],
            base_point: 0,
        };
        vec![
            ("euclidean:2", make_oracle(&"euclidean:2".parse().unwrap()).unwrap()),
            ("euclidean:1", make_oracle(&"euclidean:1".parse().unwrap()).unwrap()),
            ("l1", make_oracle(&SpaceSpec::L1Plane).unwrap()),
            ("linf", make_oracle(&SpaceSpec::LinfPlane).unwrap()),
            ("hyperbolic", make_oracle(&SpaceSpec::HyperbolicPlane).unwrap()),
            ("sphere:1", make_oracle(&SpaceSpec::Sphere { radius: 1.0 }).unwrap()),
            ("tripod:1,1,1", make_oracle(&SpaceSpec::Tripod { edges: [1.0, 1.0, 1.0] }).unwrap()),
            ("snowflake:0.5", make_oracle(&SpaceSpec::Snowflake { alpha: 0.5 }).unwrap()),
            ("cloud", oracle_from_cloud(&cloud).unwrap()),
        ]
    }

    #[test]
    fn spec_string_parsing() {
        assert_eq!("euclidean:3".parse::<SpaceSpec>().unwrap(), SpaceSpec::Euclidean { dim: 3 });
        assert_eq!("l1".parse::<SpaceSpec>().unwrap(), SpaceSpec::L1Plane);
        assert_eq!("linf".parse::<SpaceSpec>().unwrap(), SpaceSpec::LinfPlane);
        assert_eq!("hyperbolic".parse::<SpaceSpec>().unwrap(), SpaceSpec::HyperbolicPlane);
        assert_eq!("sphere:2.5".parse::<SpaceSpec>().unwrap(), SpaceSpec::Sphere { radius: 2.5 });
        assert_eq!(
            "tripod:1,2,0.5".parse::<SpaceSpec>().unwrap(),
            SpaceSpec::Tripod { edges: [1.0, 2.0, 0.5] }
        );
        assert_eq!(
            "snowflake:0.5".parse::<SpaceSpec>().unwrap(),
            SpaceSpec::Snowflake { alpha: 0.5 }
        );
        assert!(matches!("cloud:x.json".parse::<SpaceSpec>().unwrap(), SpaceSpec::Cloud { .. }));
        assert!("euclidean".parse::<SpaceSpec>().is_err());
        assert!("sphere:abc".parse::<SpaceSpec>().is_err());
        assert!("tripod:1,2".parse::<SpaceSpec>().is_err());
        assert!("mystery".parse::<SpaceSpec>().is_err());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(make_oracle(&SpaceSpec::Sphere { radius: 0.0 }).is_err());
        assert!(make_oracle(&SpaceSpec::Sphere { radius: -1.0 }).is_err());
        assert!(make_oracle(&SpaceSpec::Tripod { edges: [1.0, 0.0, 1.0] }).is_err());
        assert!(make_oracle(&SpaceSpec::Snowflake { alpha: 1.0 }).is_err());
        assert!(make_oracle(&SpaceSpec::Snowflake { alpha: 0.0 }).is_err());
    }

    #[test]
    fn distance_examples() {
        let hyp = make_oracle(&SpaceSpec::HyperbolicPlane).unwrap();
        let o = hyp.base_point();
        assert_eq!(hyp.distance(&o, &o), 0.0);

        let sph = make_oracle(&SpaceSpec::Sphere { radius: 1.0 }).unwrap();
        let n = CarrierPoint::Sphere([0.0, 0.0, 1.0]);
        let s = CarrierPoint::Sphere([0.0, 0.0, -1.0]);
        assert!((sph.distance(&n, &s) - PI).abs() < 1e-12);

        let tri = make_oracle(&SpaceSpec::Tripod { edges: [1.0, 1.0, 1.0] }).unwrap();
        let leaf0 = CarrierPoint::Tripod { edge: 0, arm: 1.0 };
        let leaf1 = CarrierPoint::Tripod { edge: 1, arm: 1.0 };
        assert_eq!(tri.distance(&leaf0, &leaf1), 2.0);

        let eu = make_oracle(&SpaceSpec::Euclidean { dim: 2 }).unwrap();
        let a = CarrierPoint::Coords(vec![0.0, 0.0]);
        let b = CarrierPoint::Coords(vec![3.0, 4.0]);
        assert_eq!(eu.distance(&a, &b), 5.0);

        let l1 = make_oracle(&SpaceSpec::L1Plane).unwrap();
        assert_eq!(l1.distance(&a, &b), 7.0);

        let sf = make_oracle(&SpaceSpec::Snowflake { alpha: 0.5 }).unwrap();
        let x = CarrierPoint::Coords(vec![4.0]);
        let z = CarrierPoint::Coords(vec![0.0]);
        assert_eq!(sf.distance(&x, &z), 2.0);
    }

    #[test]
    fn hyperbolic_distance_matches_closed_form() {
        // d(0, r e_1) = 2 artanh(r).
        let hyp = make_oracle(&SpaceSpec::HyperbolicPlane).unwrap();
        let o = hyp.base_point();
        for r in [0.1, 0.5, 0.9] {
            let q = CarrierPoint::Coords(vec![r, 0.0]);
            let expected = 2.0 * r.atanh();
            assert!((hyp.distance(&o, &q) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn builtin_oracles_pass_metric_spot_checks() {
        // 10^4 random triples per oracle within 1e-12 relative error.
        for (name, oracle) in all_test_oracles() {
            let mut rng = derive_rng(42, "spot", fnv(name));
            let report = spot_check(&oracle, 1.0, 10_000, 1e-12, &mut rng);
            assert!(report.pass, "{name}: {report:?}");
        }
    }

    #[test]
    fn samplers_respect_the_ball_constraint() {
        for (name, oracle) in all_test_oracles() {
            for scale in [0.01, 1.0, 5.0] {
                let mut rng = derive_rng(7, "ball", fnv(name));
                let p = oracle.base_point();
                for _ in 0..10_000 {
                    let q = oracle.sample_at_scale(scale, &mut rng);
                    let d = oracle.distance(&q, &p);
                    assert!(d <= scale * (1.0 + 1e-12), "{name} at scale {scale}: d = {d}");
                }
            }
        }
    }

    #[test]
    fn probes_stay_in_the_ball_and_include_base() {
        for (name, oracle) in all_test_oracles() {
            for scale in [0.125, 2.0] {
                let p = oracle.base_point();
                let probes = oracle.scale_probes(scale);
                assert_eq!(probes[0], p, "{name}");
                for q in &probes {
                    let d = oracle.distance(q, &p);
                    assert!(d <= scale * (1.0 + 1e-12), "{name}: probe at {d} > {scale}");
                }
            }
        }
    }

    #[test]
    fn radial_points_sit_at_exact_metric_distance() {
        let cases: Vec<(BuiltinOracle, Vec<f64>)> = vec![
            (make_oracle(&SpaceSpec::Euclidean { dim: 2 }).unwrap(), vec![3.0, 4.0]),
            (make_oracle(&SpaceSpec::L1Plane).unwrap(), vec![1.0, 2.0]),
            (make_oracle(&SpaceSpec::LinfPlane).unwrap(), vec![1.0, 2.0]),
            (make_oracle(&SpaceSpec::HyperbolicPlane).unwrap(), vec![0.6, 0.8]),
            (make_oracle(&SpaceSpec::Sphere { radius: 2.0 }).unwrap(), vec![0.0, 1.0]),
            (make_oracle(&SpaceSpec::Tripod { edges: [1.0, 1.0, 1.0] }).unwrap(), vec![1.0, 0.7]),
            (make_oracle(&SpaceSpec::Snowflake { alpha: 0.5 }).unwrap(), vec![1.5]),
        ];
        for (oracle, dir) in cases {
            let p = oracle.base_point();
            let rate = match dir.len() {
                1 => dir[0].abs(),
                _ => {
                    if matches!(oracle.kind, OracleKind::L1Plane) {
                        dir.iter().map(|x| x.abs()).sum()
                    } else if matches!(oracle.kind, OracleKind::LinfPlane) {
                        dir.iter().map(|x| x.abs()).fold(0.0, f64::max)
                    } else if matches!(oracle.kind, OracleKind::Tripod { .. }) {
                        dir[1]
                    } else {
                        norm2(&dir)
                    }
                }
            };
            for t in [0.001, 0.2] {
                let q = oracle.radial_point(&dir, t).unwrap();
                let d = oracle.distance(&q, &p);
                assert!(
                    (d - rate * t).abs() <= 1e-12 * (1.0 + rate * t),
                    "{:?}: got {d}, want {}",
                    oracle.kind,
                    rate * t
                );
            }
        }
    }

    #[test]
    fn leaf_based_tripod_sampler_stays_in_ball() {
        let oracle = make_oracle(&SpaceSpec::Tripod { edges: [1.0, 2.0, 0.5] })
            .unwrap()
            .with_tripod_base(TripodBase::Leaf(0))
            .unwrap();
        let p = oracle.base_point();
        assert_eq!(p, CarrierPoint::Tripod { edge: 0, arm: 1.0 });
        let mut rng = derive_rng(11, "leaf", 0);
        for scale in [0.3, 1.5, 4.0] {
            for _ in 0..2000 {
                let q = oracle.sample_at_scale(scale, &mut rng);
                assert!(oracle.distance(&q, &p) <= scale * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn doubling_single_point_carrier() {
        let cloud = CloudJson { metric: "custom-matrix".into(), points: vec![vec![0.0]], base_point: 0 };
        let oracle = oracle_from_cloud(&cloud).unwrap();
        let mut rng = derive_rng(0, "dbl", 0);
        let est = estimate_doubling_constant(&oracle, 1.0, 100, &mut rng).unwrap();
        assert_eq!(est.net_size, 1);
    }

    #[test]
    fn doubling_euclidean_line_is_small_and_monotone() {
        let oracle = make_oracle(&SpaceSpec::Euclidean { dim: 1 }).unwrap();
        for scale in [0.1, 1.0, 10.0] {
            let mut prev = 0;
            for budget in [100, 1_000, 10_000] {
                let mut rng = derive_rng(5, "dbl-line", 0);
                let est = estimate_doubling_constant(&oracle, scale, budget, &mut rng).unwrap();
                assert!(est.net_size <= 4, "net {} at scale {scale}", est.net_size);
                assert!(est.net_size >= prev, "monotone in budget");
                prev = est.net_size;
            }
        }
    }

    #[test]
    fn doubling_snowflake_is_bounded() {
        let oracle = make_oracle(&SpaceSpec::Snowflake { alpha: 0.5 }).unwrap();
        for scale in [0.25, 1.0, 4.0] {
            let mut rng = derive_rng(6, "dbl-snow", 0);
            let est = estimate_doubling_constant(&oracle, scale, 10_000, &mut rng).unwrap();
            assert!(est.net_size <= 8, "net {} at scale {scale}", est.net_size);
            assert!(est.net_size >= 3, "net {} at scale {scale}", est.net_size);
        }
    }

    #[test]
    fn doubling_is_deterministic_given_the_stream() {
        let oracle = make_oracle(&SpaceSpec::HyperbolicPlane).unwrap();
        let mut a = derive_rng(9, "dbl-det", 0);
        let mut b = derive_rng(9, "dbl-det", 0);
        let ea = estimate_doubling_constant(&oracle, 2.0, 5_000, &mut a).unwrap();
        let eb = estimate_doubling_constant(&oracle, 2.0, 5_000, &mut b).unwrap();
        assert_eq!(ea.net_size, eb.net_size);
    }

    #[test]
    fn cloud_rejects_nonmetric_custom_matrix() {
        let cloud = CloudJson {
            metric: "custom-matrix".into(),
            points: vec![
                vec![0.0, 1.0, 3.0],
                vec![1.0, 0.0, 1.0],
                vec![3.0, 1.0, 0.0],
            ],
            base_point: 0,
        };
        assert!(matches!(oracle_from_cloud(&cloud), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn midpoint_hints_are_metric_midpoints() {
        let mut rng = derive_rng(13, "mid", 0);
        for (name, oracle) in all_test_oracles() {
            if matches!(oracle.kind, OracleKind::Snowflake { .. } | OracleKind::Cloud { .. }) {
                continue;
            }
            for _ in 0..300 {
                let a = oracle.sample_at_scale(0.8, &mut rng);
                let b = oracle.sample_at_scale(0.8, &mut rng);
                let m = oracle.midpoint_hint(&a, &b).expect("hint");
                let dab = oracle.distance(&a, &b);
                let dam = oracle.distance(&a, &m);
                let dbm = oracle.distance(&b, &m);
                assert!(
                    (dam - dab / 2.0).abs() < 1e-9 + 1e-9 * dab,
                    "{name}: d(a,m)={dam}, d(a,b)/2={}",
                    dab / 2.0
                );
                assert!(
                    (dbm - dab / 2.0).abs() < 1e-9 + 1e-9 * dab,
                    "{name}: d(b,m)={dbm}, d(a,b)/2={}",
                    dab / 2.0
                );
            }
        }
    }

    fn fnv(s: &str) -> u64 {
        crate::rng::fnv1a64(s.as_bytes())
    }
}
