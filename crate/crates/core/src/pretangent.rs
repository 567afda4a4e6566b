//! Desk-scale approximation of pretangent spaces.
//!
//! A pretangent space at `p` is the blow-up limit of `(X, d)` along a
//! normalizing sequence `r_n ↓ 0`: sequences `x̃ = {x_n}` converging to `p`
//! acquire the pseudodistance `lim d(x_n, y_n) / r_n` wherever that limit
//! exists (mutual stability), a maximal pairwise-stable family is chosen,
//! and gluing zero-distance sequences (metric identification) produces a
//! genuine metric space.
//!
//! Finite windows stand in for infinite sequences, so every limit here is a
//! tail estimate with an explicit oscillation certificate, maximality is
//! greedy over the pool order (faithful to the non-uniqueness of maximal
//! families), and the quotient carries a post-hoc metric certificate
//! instead of a proof.

use serde::{Deserialize, Serialize};

use crate::defaults;
use crate::error::{CertificateFailure, Error, Result};
use crate::four_point::{scan_finite, FunctionalKind, QuadrupleDefectReport};
use crate::metric::{validate_metric, FiniteMetricSpace, MetricOracle};
use crate::spaces::{BuiltinOracle, CarrierPoint};

/// Finite window of a normalizing sequence: positive reals heading to zero,
/// evidenced by `r_N < r_1` and a nonincreasing tail over the last half.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormalizingSequence {
    values: Vec<f64>,
}

impl NormalizingSequence {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidParameter("normalizing window needs >= 2 entries".into()));
        }
        if values.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::InvalidParameter("normalizing values must be finite and > 0".into()));
        }
        let n = values.len();
        if values[n - 1] >= values[0] {
            return Err(Error::InvalidParameter(
                "normalizing window shows no decrease (r_N >= r_1)".into(),
            ));
        }
        let tail_start = n / 2;
        for i in tail_start..n - 1 {
            if values[i + 1] > values[i] {
                return Err(Error::InvalidParameter(format!(
                    "normalizing tail increases at position {} ({} -> {})",
                    i, values[i], values[i + 1]
                )));
            }
        }
        Ok(NormalizingSequence { values })
    }

    /// `r_n = 1/n`, `n = 1..=window`.
    pub fn one_over_n(window: usize) -> Result<Self> {
        Self::new((1..=window).map(|n| 1.0 / n as f64).collect())
    }

    pub fn geometric(start: f64, ratio: f64, window: usize) -> Result<Self> {
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidParameter(format!("geometric ratio {ratio} not in (0,1)")));
        }
        Self::new((0..window).map(|k| start * ratio.powi(k as i32)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Finite window of a point sequence in the oracle carrier.
#[derive(Clone, Debug, Serialize)]
pub struct PointSequence<P> {
    pub label: String,
    pub points: Vec<P>,
}

impl<P: Clone> PointSequence<P> {
    pub fn new(label: impl Into<String>, points: Vec<P>) -> Self {
        PointSequence { label: label.into(), points }
    }

    /// The constant sequence at the base point.
    pub fn constant(label: impl Into<String>, point: P, window: usize) -> Self {
        PointSequence { label: label.into(), points: vec![point; window] }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityStatus {
    Stable,
    Unstable,
    Undecided,
}

/// Tail certificate for the limit `d(x_n, y_n) / r_n`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StabilityEstimate {
    pub status: StabilityStatus,
    /// Tail mean of the quotients; the limit estimate when stable.
    pub limit: f64,
    /// Max minus min of the quotients over the tail window.
    pub oscillation: f64,
}

/// Stability thresholds: oscillation at or below `tau_stab` is stable,
/// above `tau_unstab` is unstable, between them undecided.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StabilityParams {
    pub tail_fraction: f64,
    pub tau_stab: f64,
    pub tau_unstab: f64,
}

impl Default for StabilityParams {
    fn default() -> Self {
        StabilityParams {
            tail_fraction: defaults::TAIL_FRACTION,
            tau_stab: defaults::TAU_STAB,
            tau_unstab: defaults::TAU_UNSTAB,
        }
    }
}

impl StabilityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_fraction > 0.0 && self.tail_fraction <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "tail_fraction {} not in (0,1]",
                self.tail_fraction
            )));
        }
        if self.tau_unstab < self.tau_stab {
            return Err(Error::InvalidParameter(format!(
                "tau_unstab {} below tau_stab {}",
                self.tau_unstab, self.tau_stab
            )));
        }
        Ok(())
    }
}

/// Estimate the mutual-stability limit of two sequences against a
/// normalizing sequence: quotients `d(x_n, y_n)/r_n` over the tail window,
/// tail mean as the limit, oscillation as the certificate.
pub fn estimate_mutual_limit<O: MetricOracle>(
    oracle: &O,
    x: &PointSequence<O::Point>,
    y: &PointSequence<O::Point>,
    r: &NormalizingSequence,
    params: &StabilityParams,
) -> Result<StabilityEstimate> {
    params.validate()?;
    let n = r.len();
    if x.len() != n || y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "window mismatch: |x|={}, |y|={}, |r|={}",
            x.len(),
            y.len(),
            n
        )));
    }
    let tail_len = ((params.tail_fraction * n as f64).ceil() as usize).clamp(1, n);
    let start = n - tail_len;
    let mut sum = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in start..n {
        let q = oracle.distance(&x.points[i], &y.points[i]) / r.values()[i];
        sum += q;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    let oscillation = hi - lo;
    let status = if oscillation <= params.tau_stab {
        StabilityStatus::Stable
    } else if oscillation > params.tau_unstab {
        StabilityStatus::Unstable
    } else {
        StabilityStatus::Undecided
    };
    Ok(StabilityEstimate { status, limit: sum / tail_len as f64, oscillation })
}

/// Why a pool sequence was left out of the family.
#[derive(Clone, Debug, Serialize)]
pub struct Rejection {
    pub pool_index: usize,
    /// Accepted pool index it first failed against.
    pub conflicting_with: usize,
    pub status: StabilityStatus,
    pub oscillation: f64,
}

/// Greedy family selection outcome: accepted pool indices (always starting
/// with the base sequence), the rejects with their first conflict, and the
/// pairwise limit matrix over the accepted sequences.
#[derive(Clone, Debug, Serialize)]
pub struct FamilySelection {
    pub accepted: Vec<usize>,
    pub rejected: Vec<Rejection>,
    /// `limits[i][j]` is the estimated limit between accepted sequences i
    /// and j (indices into `accepted`).
    pub limits: Vec<Vec<f64>>,
}

/// Greedily build a pairwise-stable family from the pool, in pool order.
///
/// `pool[0]` must be the constant sequence at the base point (it is always
/// accepted first). A sequence is accepted iff its stability estimate
/// against every previously accepted sequence is `Stable`; the result is
/// self-stable by construction and maximal within the pool — every rejected
/// sequence is unstable or undecided against some accepted one. Order
/// dependence is inherent: maximal families are not unique.
pub fn build_self_stable_family<O: MetricOracle>(
    oracle: &O,
    pool: &[PointSequence<O::Point>],
    r: &NormalizingSequence,
    params: &StabilityParams,
) -> Result<FamilySelection> {
    params.validate()?;
    if pool.is_empty() {
        return Err(Error::Precondition("pool must start with the base-point sequence".into()));
    }
    let p = oracle.base_point();
    let base = &pool[0];
    if base.len() != r.len() {
        return Err(Error::DimensionMismatch("pool window differs from normalizing window".into()));
    }
    if base.points.iter().any(|q| oracle.distance(q, &p) != 0.0) {
        return Err(Error::Precondition(
            "pool[0] must be the constant sequence at the base point".into(),
        ));
    }

    let mut accepted: Vec<usize> = vec![0];
    let mut rejected: Vec<Rejection> = Vec::new();
    // Rows of pairwise estimates between accepted sequences, grown as the
    // family grows.
    let mut limits: Vec<Vec<f64>> = vec![vec![0.0]];

    for cand in 1..pool.len() {
        let mut row = Vec::with_capacity(accepted.len());
        let mut conflict: Option<(usize, StabilityEstimate)> = None;
        for (slot, &acc) in accepted.iter().enumerate() {
            let est = estimate_mutual_limit(oracle, &pool[cand], &pool[acc], r, params)?;
            if est.status != StabilityStatus::Stable {
                conflict = Some((acc, est));
                break;
            }
            debug_assert_eq!(slot, row.len());
            row.push(est.limit);
        }
        match conflict {
            Some((acc, est)) => rejected.push(Rejection {
                pool_index: cand,
                conflicting_with: acc,
                status: est.status,
                oscillation: est.oscillation,
            }),
            None => {
                for (i, &lim) in row.iter().enumerate() {
                    limits[i].push(lim);
                }
                row.push(0.0);
                limits.push(row);
                accepted.push(cand);
            }
        }
    }
    Ok(FamilySelection { accepted, rejected, limits })
}

/// The quotient approximation: a finite metric space of sequence classes.
#[derive(Clone, Debug, Serialize)]
pub struct PretangentApproximation {
    pub quotient: FiniteMetricSpace,
    /// Accepted-sequence slot -> quotient point index (surjective).
    pub projection: Vec<usize>,
    pub tau_zero: f64,
    /// The class of the base sequence is present (always true by
    /// construction; recorded for the report).
    pub contains_base_class: bool,
}

/// Metric identification: glue accepted sequences at estimated distance
/// `<= tau_zero` (single linkage, since tolerance-closeness is not
/// transitive), set class distances to the mean of cross-class limits, and
/// certify the result.
///
/// The certificate requires the quotient to pass metric validation at
/// `3 * tau_zero` and every class distance to sit within `tau_zero` of the
/// underlying pairwise limits; a breach returns a diagnostic error naming
/// the witness.
#[allow(clippy::needless_range_loop)]
pub fn metric_identify(
    labels: &[String],
    limits: &[Vec<f64>],
    tau_zero: f64,
) -> Result<PretangentApproximation> {
    let n = labels.len();
    if n == 0 || limits.len() != n || limits.iter().any(|row| row.len() != n) {
        return Err(Error::DimensionMismatch(format!(
            "limit matrix must be {n}x{n} to match {n} labels"
        )));
    }
    if !(tau_zero.is_finite() && tau_zero >= 0.0) {
        return Err(Error::InvalidParameter(format!("tau_zero {tau_zero} must be >= 0")));
    }

    // Single-linkage union-find over the zero-distance relation.
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if limits[i][j] <= tau_zero {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                    parent[hi] = lo;
                }
            }
        }
    }

    // Quotient classes, ordered by their smallest member so the base class
    // comes first.
    let mut roots: Vec<usize> = Vec::new();
    let mut projection = vec![0usize; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        let slot = match roots.iter().position(|&q| q == r) {
            Some(s) => s,
            None => {
                roots.push(r);
                roots.len() - 1
            }
        };
        projection[i] = slot;
    }
    let k = roots.len();

    // Class distance: mean of cross-class pairwise limits.
    let mut dist = vec![vec![0.0f64; k]; k];
    for a in 0..k {
        for b in (a + 1)..k {
            let mut sum = 0.0;
            let mut count = 0usize;
            for i in 0..n {
                if projection[i] != a {
                    continue;
                }
                for j in 0..n {
                    if projection[j] == b {
                        sum += limits[i][j];
                        count += 1;
                    }
                }
            }
            let mean = sum / count as f64;
            dist[a][b] = mean;
            dist[b][a] = mean;
        }
    }

    let quotient_labels: Vec<String> = roots.iter().map(|&r| labels[r].clone()).collect();
    let quotient = FiniteMetricSpace::new(quotient_labels, dist)?;

    // Certificate 1: the quotient is a metric space within 3 * tau_zero.
    // Diagonal, symmetry, and nonnegativity hold by construction, so any
    // breach is a triangle violation.
    let report = validate_metric(&quotient, 3.0 * tau_zero);
    if let Some(v) = report.violations.first() {
        return Err(match v {
            crate::metric::AxiomViolation::TriangleExcess { i, j, k, excess } => Error::Certificate(
                CertificateFailure::TriangleExcess { i: *i, j: *j, k: *k, excess: *excess },
            ),
            other => Error::InvalidInput(format!("quotient failed basic axioms: {other:?}")),
        });
    }

    // Certificate 2: class distances reproduce the pairwise limits within
    // tau_zero (same-class pairs must sit within tau_zero of zero). Wide
    // single-linkage chains breach this and are reported, not silently kept.
    for i in 0..n {
        for j in (i + 1)..n {
            let rho = quotient.dist(projection[i], projection[j]);
            let drift = (rho - limits[i][j]).abs();
            if drift > tau_zero + 1e-15 {
                return Err(Error::Certificate(CertificateFailure::RepresentationDrift {
                    class_a: projection[i],
                    class_b: projection[j],
                    drift,
                }));
            }
        }
    }

    Ok(PretangentApproximation {
        quotient,
        projection,
        tau_zero,
        contains_base_class: true,
    })
}

/// Restrict a sequence window and the normalizing window to the given
/// strictly increasing index set (0-based positions).
pub fn restrict_to_subsequence<P: Clone>(
    x: &PointSequence<P>,
    r: &NormalizingSequence,
    indices: &[usize],
) -> Result<(PointSequence<P>, NormalizingSequence)> {
    if indices.is_empty() {
        return Err(Error::InvalidParameter("restriction index set is empty".into()));
    }
    if x.len() != r.len() {
        return Err(Error::DimensionMismatch("sequence and normalizing windows differ".into()));
    }
    for w in indices.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter("indices must be strictly increasing".into()));
        }
    }
    if *indices.last().unwrap() >= r.len() {
        return Err(Error::InvalidParameter(format!(
            "index {} outside the window of length {}",
            indices.last().unwrap(),
            r.len()
        )));
    }
    let points = indices.iter().map(|&i| x.points[i].clone()).collect();
    let values = indices.iter().map(|&i| r.values()[i]).collect();
    Ok((PointSequence { label: x.label.clone(), points }, NormalizingSequence::new(values)?))
}

/// Positions (0-based) of the even 1-based indices `n = 2, 4, ...`.
pub fn even_positions(window: usize) -> Vec<usize> {
    (1..window).step_by(2).collect()
}

/// Positions (0-based) of the odd 1-based indices `n = 1, 3, ...`.
pub fn odd_positions(window: usize) -> Vec<usize> {
    (0..window).step_by(2).collect()
}

/// The three four-point scans over a quotient space.
#[derive(Clone, Debug, Serialize)]
pub struct CurvatureVerdicts {
    pub quadrilateral: QuadrupleDefectReport,
    pub lebedeva_petrunin: QuadrupleDefectReport,
    pub ptolemy: QuadrupleDefectReport,
}

impl CurvatureVerdicts {
    pub fn all_passed(&self) -> bool {
        self.quadrilateral.verdict.passed()
            && self.lebedeva_petrunin.verdict.passed()
            && self.ptolemy.verdict.passed()
    }
}

/// Run all three four-point scans on the quotient of an approximation.
pub fn analyze_pretangent(
    approximation: &PretangentApproximation,
    tau_pass: f64,
) -> CurvatureVerdicts {
    CurvatureVerdicts {
        quadrilateral: scan_finite(&approximation.quotient, FunctionalKind::Quadrilateral, tau_pass),
        lebedeva_petrunin: scan_finite(
            &approximation.quotient,
            FunctionalKind::LebedevaPetrunin,
            tau_pass,
        ),
        ptolemy: scan_finite(&approximation.quotient, FunctionalKind::Ptolemy, tau_pass),
    }
}

/// Full pipeline outcome: the pool that was actually used (base sequence
/// prepended), the greedy selection, and the certified quotient.
#[derive(Clone, Debug, Serialize)]
pub struct PretangentBuild<P> {
    #[serde(skip)]
    pub pool: Vec<PointSequence<P>>,
    pub pool_labels: Vec<String>,
    pub selection: FamilySelection,
    pub approximation: PretangentApproximation,
}

/// Prepend the base sequence, build the greedy family, and identify.
pub fn construct_pretangent<O: MetricOracle>(
    oracle: &O,
    sequences: Vec<PointSequence<O::Point>>,
    r: &NormalizingSequence,
    params: &StabilityParams,
    tau_zero: f64,
) -> Result<PretangentBuild<O::Point>> {
    let mut pool = Vec::with_capacity(sequences.len() + 1);
    pool.push(PointSequence::constant("base", oracle.base_point(), r.len()));
    pool.extend(sequences);
    for s in &pool {
        if s.len() != r.len() {
            return Err(Error::DimensionMismatch(format!(
                "sequence `{}` has window {}, normalizing window is {}",
                s.label,
                s.len(),
                r.len()
            )));
        }
    }
    let selection = build_self_stable_family(oracle, &pool, r, params)?;
    let labels: Vec<String> =
        selection.accepted.iter().map(|&i| pool[i].label.clone()).collect();
    let approximation = metric_identify(&labels, &selection.limits, tau_zero)?;
    let pool_labels = pool.iter().map(|s| s.label.clone()).collect();
    Ok(PretangentBuild { pool, pool_labels, selection, approximation })
}

// ---------------------------------------------------------------------------
// Pool descriptions (JSON) and their realization against built-in oracles.
// ---------------------------------------------------------------------------

/// Wire format for sequence pools:
/// `{"normalizing": {"kind": ...}, "sequences": [{"label":..., "kind":...}]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoolSpec {
    pub normalizing: NormalizingSpec,
    pub sequences: Vec<SequenceSpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NormalizingSpec {
    OneOverN,
    Geometric { start: f64, ratio: f64 },
    Explicit { values: Vec<f64> },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SequenceSpec {
    /// `x_n` at metric distance `|direction| * r_n` from the base point;
    /// see the per-space direction encodings on the radial generator.
    Radial { label: String, direction: Vec<f64> },
    /// Explicit window of carrier points (must cover the whole window).
    Explicit { label: String, points: Vec<Vec<f64>> },
}

impl NormalizingSpec {
    pub fn realize(&self, window: usize) -> Result<NormalizingSequence> {
        match self {
            NormalizingSpec::OneOverN => NormalizingSequence::one_over_n(window),
            NormalizingSpec::Geometric { start, ratio } => {
                NormalizingSequence::geometric(*start, *ratio, window)
            }
            NormalizingSpec::Explicit { values } => {
                if values.len() < window {
                    return Err(Error::InvalidInput(format!(
                        "explicit normalizing sequence has {} values, window needs {}",
                        values.len(),
                        window
                    )));
                }
                NormalizingSequence::new(values[..window].to_vec())
            }
        }
    }
}

/// Realize a pool description against a built-in oracle at a given window.
pub fn realize_pool(
    oracle: &BuiltinOracle,
    spec: &PoolSpec,
    window: usize,
) -> Result<(NormalizingSequence, Vec<PointSequence<CarrierPoint>>)> {
    let r = spec.normalizing.realize(window)?;
    let mut sequences = Vec::with_capacity(spec.sequences.len());
    for s in &spec.sequences {
        match s {
            SequenceSpec::Radial { label, direction } => {
                let points = r
                    .values()
                    .iter()
                    .map(|&t| oracle.radial_point(direction, t))
                    .collect::<Result<Vec<_>>>()?;
                sequences.push(PointSequence::new(label.clone(), points));
            }
            SequenceSpec::Explicit { label, points } => {
                if points.len() < window {
                    return Err(Error::InvalidInput(format!(
                        "sequence `{label}` has {} points, window needs {window}",
                        points.len()
                    )));
                }
                let pts = points[..window]
                    .iter()
                    .map(|vals| oracle.point_from_values(vals))
                    .collect::<Result<Vec<_>>>()?;
                sequences.push(PointSequence::new(label.clone(), pts));
            }
        }
    }
    Ok((r, sequences))
}

/// The curated default pool for a space: radial directions that reach the
/// curvature-relevant configurations of each built-in geometry. Clouds get
/// an empty pool (their pretangent collapses to the base class).
pub fn curated_pool(spec: &crate::spaces::SpaceSpec) -> PoolSpec {
    use crate::spaces::SpaceSpec;
    let radial = |label: &str, direction: Vec<f64>| SequenceSpec::Radial {
        label: label.to_string(),
        direction,
    };
    let sequences = match spec {
        SpaceSpec::Euclidean { dim } => {
            if *dim == 1 {
                vec![
                    radial("zero", vec![0.0]),
                    radial("+1", vec![1.0]),
                    radial("-1", vec![-1.0]),
                    radial("+2", vec![2.0]),
                ]
            } else {
                let mut dirs = vec![
                    ("zero", vec![0.0, 0.0]),
                    ("e1", vec![1.0, 0.0]),
                    ("e2", vec![0.0, 1.0]),
                    ("e1+e2", vec![1.0, 1.0]),
                    ("2e1", vec![2.0, 0.0]),
                    ("2e2", vec![0.0, 2.0]),
                    ("2e1+e2", vec![2.0, 1.0]),
                    ("e1+2e2", vec![1.0, 2.0]),
                ];
                if *dim > 2 {
                    for d in dirs.iter_mut() {
                        d.1.resize(*dim, 0.0);
                    }
                }
                dirs.into_iter().map(|(l, v)| radial(l, v)).collect()
            }
        }
        SpaceSpec::L1Plane | SpaceSpec::LinfPlane => vec![
            radial("zero", vec![0.0, 0.0]),
            radial("e1", vec![1.0, 0.0]),
            radial("e2", vec![0.0, 1.0]),
            radial("-e1", vec![-1.0, 0.0]),
            radial("-e2", vec![0.0, -1.0]),
            radial("e1+e2", vec![1.0, 1.0]),
        ],
        SpaceSpec::HyperbolicPlane => vec![
            radial("zero", vec![0.0, 0.0]),
            radial("e1", vec![1.0, 0.0]),
            radial("e2", vec![0.0, 1.0]),
            radial("-e1", vec![-1.0, 0.0]),
            radial("diag", vec![1.0, 1.0]),
        ],
        SpaceSpec::Sphere { radius } => {
            // Keep the doubled arc below the antipodal distance at the
            // coarsest normalizing value.
            let rate = 1.0f64.min(*radius);
            vec![
                radial("zero", vec![0.0, 0.0]),
                radial("b0", vec![rate, 0.0]),
                radial("b90", vec![0.0, rate]),
                radial("b180", vec![-rate, 0.0]),
                radial("b0-double", vec![2.0 * rate, 0.0]),
            ]
        }
        SpaceSpec::Tripod { edges } => {
            // Rates scaled to the shortest edge so arms stay on the tripod
            // at the coarsest normalizing value.
            let rate = edges.iter().copied().fold(f64::INFINITY, f64::min);
            vec![
                radial("edge0", vec![0.0, rate]),
                radial("edge1", vec![1.0, rate]),
                radial("edge2", vec![2.0, rate]),
                radial("edge0-half", vec![0.0, rate / 2.0]),
            ]
        }
        SpaceSpec::Snowflake { .. } => vec![
            radial("+1", vec![1.0]),
            radial("-1", vec![-1.0]),
            radial("+half", vec![0.5]),
        ],
        SpaceSpec::Cloud { .. } => vec![],
    };
    PoolSpec { normalizing: NormalizingSpec::OneOverN, sequences }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::four_point::Verdict;
    use crate::spaces::{make_oracle, SpaceSpec};

    fn euclid2() -> BuiltinOracle {
        make_oracle(&SpaceSpec::Euclidean { dim: 2 }).unwrap()
    }

    fn euclid1() -> BuiltinOracle {
        make_oracle(&SpaceSpec::Euclidean { dim: 1 }).unwrap()
    }

    fn radial_seq(oracle: &BuiltinOracle, label: &str, v: &[f64], r: &NormalizingSequence) -> PointSequence<CarrierPoint> {
        let points = r.values().iter().map(|&t| oracle.radial_point(v, t).unwrap()).collect();
        PointSequence::new(label, points)
    }

    #[test]
    fn normalizing_sequence_validation() {
        assert!(NormalizingSequence::one_over_n(16).is_ok());
        assert!(NormalizingSequence::new(vec![1.0, 2.0]).is_err());
        assert!(NormalizingSequence::new(vec![1.0, 0.0]).is_err());
        assert!(NormalizingSequence::new(vec![1.0, 0.5, 0.6, 0.7]).is_err());
        // A bump in the first half is tolerated; the tail must decrease.
        assert!(NormalizingSequence::new(vec![1.0, 1.5, 0.5, 0.4]).is_ok());
    }

    #[test]
    fn identical_sequences_are_stable_at_zero() {
        let oracle = euclid2();
        let r = NormalizingSequence::one_over_n(64).unwrap();
        let x = radial_seq(&oracle, "x", &[1.0, 2.0], &r);
        let est = estimate_mutual_limit(&oracle, &x, &x, &r, &StabilityParams::default()).unwrap();
        assert_eq!(est.status, StabilityStatus::Stable);
        assert_eq!(est.limit, 0.0);
        assert_eq!(est.oscillation, 0.0);
    }

    #[test]
    fn radial_pairs_have_exact_limits() {
        let oracle = euclid2();
        let r = NormalizingSequence::one_over_n(128).unwrap();
        let v = [3.0, 0.0];
        let w = [0.0, 4.0];
        let x = radial_seq(&oracle, "v", &v, &r);
        let y = radial_seq(&oracle, "w", &w, &r);
        let est = estimate_mutual_limit(&oracle, &x, &y, &r, &StabilityParams::default()).unwrap();
        assert_eq!(est.status, StabilityStatus::Stable);
        assert!((est.limit - 5.0).abs() < 1e-12);
    }

    fn alternating_line_seq(oracle: &BuiltinOracle, r: &NormalizingSequence) -> PointSequence<CarrierPoint> {
        // x_n = (-1)^n / n with n starting at 1.
        let points = r
            .values()
            .iter()
            .enumerate()
            .map(|(i, &t)| {
                let sign = if (i + 1) % 2 == 0 { 1.0 } else { -1.0 };
                oracle.radial_point(&[sign], t).unwrap()
            })
            .collect();
        PointSequence::new("alt", points)
    }

    #[test]
    fn alternating_sequence_is_stable_against_base_but_unstable_against_radial() {
        let oracle = euclid1();
        let r = NormalizingSequence::one_over_n(64).unwrap();
        let alt = alternating_line_seq(&oracle, &r);
        let base = PointSequence::constant("base", oracle.base_point(), 64);
        let z = radial_seq(&oracle, "z", &[1.0], &r);

        let vs_base =
            estimate_mutual_limit(&oracle, &alt, &base, &r, &StabilityParams::default()).unwrap();
        assert_eq!(vs_base.status, StabilityStatus::Stable);
        assert!((vs_base.limit - 1.0).abs() < 1e-12);

        let vs_z = estimate_mutual_limit(&oracle, &alt, &z, &r, &StabilityParams::default()).unwrap();
        assert_eq!(vs_z.status, StabilityStatus::Unstable);
        assert!((vs_z.oscillation - 2.0).abs() < 1e-12);
    }

    #[test]
    fn family_base_only_pool() {
        let oracle = euclid2();
        let r = NormalizingSequence::one_over_n(32).unwrap();
        let pool = vec![PointSequence::constant("base", oracle.base_point(), 32)];
        let sel =
            build_self_stable_family(&oracle, &pool, &r, &StabilityParams::default()).unwrap();
        assert_eq!(sel.accepted, vec![0]);
        assert!(sel.rejected.is_empty());
    }

    #[test]
    fn family_accepts_all_radials_and_order_decides_conflicts() {
        let oracle = euclid1();
        let r = NormalizingSequence::one_over_n(64).unwrap();
        let base = PointSequence::constant("base", oracle.base_point(), 64);
        let alt = alternating_line_seq(&oracle, &r);
        let z = radial_seq(&oracle, "z", &[1.0], &r);

        // alt first: z is rejected against alt.
        let sel = build_self_stable_family(
            &oracle,
            &[base.clone(), alt.clone(), z.clone()],
            &r,
            &StabilityParams::default(),
        )
        .unwrap();
        assert_eq!(sel.accepted, vec![0, 1]);
        assert_eq!(sel.rejected.len(), 1);
        assert_eq!(sel.rejected[0].pool_index, 2);

        // z first: alt is rejected against z.
        let sel2 = build_self_stable_family(
            &oracle,
            &[base, z, alt],
            &r,
            &StabilityParams::default(),
        )
        .unwrap();
        assert_eq!(sel2.accepted, vec![0, 1]);
        assert_eq!(sel2.rejected[0].pool_index, 2);
    }

    #[test]
    fn family_rejects_pool_without_base() {
        let oracle = euclid1();
        let r = NormalizingSequence::one_over_n(16).unwrap();
        let z = radial_seq(&oracle, "z", &[1.0], &r);
        assert!(matches!(
            build_self_stable_family(&oracle, &[z], &r, &StabilityParams::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn identify_single_sequence_gives_one_point() {
        let approx = metric_identify(&["base".to_string()], &[vec![0.0]], 1e-6).unwrap();
        assert_eq!(approx.quotient.len(), 1);
        assert!(approx.contains_base_class);
        assert_eq!(approx.projection, vec![0]);
        // A one-point quotient passes every scan vacuously.
        let verdicts = analyze_pretangent(&approx, defaults::TAU_PASS);
        assert_eq!(verdicts.quadrilateral.verdict, Verdict::Vacuous);
        assert_eq!(verdicts.lebedeva_petrunin.verdict, Verdict::Vacuous);
        assert_eq!(verdicts.ptolemy.verdict, Verdict::Vacuous);
        assert!(verdicts.all_passed());
    }

    #[test]
    fn unit_square_pool_reconstructs_the_square() {
        let oracle = euclid2();
        let r = NormalizingSequence::one_over_n(defaults::WINDOW).unwrap();
        let dirs: [(&str, [f64; 2]); 4] =
            [("zero", [0.0, 0.0]), ("e1", [1.0, 0.0]), ("e2", [0.0, 1.0]), ("e1+e2", [1.0, 1.0])];
        let sequences: Vec<_> =
            dirs.iter().map(|(l, v)| radial_seq(&oracle, l, v, &r)).collect();
        let build = construct_pretangent(
            &oracle,
            sequences,
            &r,
            &StabilityParams::default(),
            defaults::TAU_ZERO,
        )
        .unwrap();
        // "zero" glues with the base class: 4 points remain.
        assert_eq!(build.approximation.quotient.len(), 4);
        let q = &build.approximation.quotient;
        let expect = |a: &str, b: &str, want: f64| {
            let got = q.distance_by_label(a, b).unwrap();
            assert!((got - want).abs() <= 1e-9, "{a}-{b}: {got} vs {want}");
        };
        expect("base", "e1", 1.0);
        expect("base", "e2", 1.0);
        expect("e1", "e2", 2f64.sqrt());
        expect("base", "e1+e2", 2f64.sqrt());
        expect("e1", "e1+e2", 1.0);
        expect("e2", "e1+e2", 1.0);

        let verdicts = analyze_pretangent(&build.approximation, defaults::TAU_PASS);
        assert!(verdicts.all_passed());
    }

    #[test]
    fn zero_distance_sequences_are_identified() {
        // Directly at the identification level, as estimated limits.
        let labels: Vec<String> = ["base", "a", "a-shadow"].iter().map(|s| s.to_string()).collect();
        let limits = vec![
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
        ];
        let approx = metric_identify(&labels, &limits, 1e-6).unwrap();
        assert_eq!(approx.quotient.len(), 2);
        assert_eq!(approx.projection, vec![0, 1, 1]);
    }

    #[test]
    fn certificate_catches_non_metric_limits() {
        // Limits violating the triangle inequality far beyond 3*tau_zero.
        let labels: Vec<String> = ["base", "a", "b"].iter().map(|s| s.to_string()).collect();
        let limits = vec![
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ];
        match metric_identify(&labels, &limits, 1e-6) {
            Err(Error::Certificate(CertificateFailure::TriangleExcess { i, j, k, excess })) => {
                assert_eq!((i, j, k), (0, 2, 1));
                assert!(excess > 0.9);
            }
            other => panic!("expected certificate failure, got {other:?}"),
        }
    }

    #[test]
    fn certificate_catches_representation_drift() {
        // A chain a-b, b-c glued by single linkage while d(a,c) is large.
        let labels: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let tau = 1e-3;
        let limits = vec![
            vec![0.0, 0.5e-3, 5.0e-3],
            vec![0.5e-3, 0.0, 0.5e-3],
            vec![5.0e-3, 0.5e-3, 0.0],
        ];
        match metric_identify(&labels, &limits, tau) {
            Err(Error::Certificate(CertificateFailure::RepresentationDrift { drift, .. })) => {
                assert!(drift > tau);
            }
            other => panic!("expected drift failure, got {other:?}"),
        }
    }

    #[test]
    fn restriction_preserves_stable_limits() {
        let oracle = euclid2();
        let n = 128;
        let r = NormalizingSequence::one_over_n(n).unwrap();
        let x = radial_seq(&oracle, "x", &[1.0, 0.0], &r);
        let y = radial_seq(&oracle, "y", &[0.0, 1.0], &r);
        let params = StabilityParams::default();
        let before = estimate_mutual_limit(&oracle, &x, &y, &r, &params).unwrap();

        for indices in [even_positions(n), odd_positions(n)] {
            let (x2, r2) = restrict_to_subsequence(&x, &r, &indices).unwrap();
            let (y2, _) = restrict_to_subsequence(&y, &r, &indices).unwrap();
            let after = estimate_mutual_limit(&oracle, &x2, &y2, &r2, &params).unwrap();
            assert_eq!(after.status, StabilityStatus::Stable);
            assert!((before.limit - after.limit).abs() <= 2.0 * params.tau_stab);
            assert!(after.oscillation <= before.oscillation + params.tau_stab);
        }
    }

    #[test]
    fn identity_restriction_changes_nothing() {
        let oracle = euclid2();
        let r = NormalizingSequence::one_over_n(32).unwrap();
        let x = radial_seq(&oracle, "x", &[1.0, 1.0], &r);
        let all: Vec<usize> = (0..32).collect();
        let (x2, r2) = restrict_to_subsequence(&x, &r, &all).unwrap();
        assert_eq!(x2.points, x.points);
        assert_eq!(r2.values(), r.values());
        assert!(matches!(
            restrict_to_subsequence(&x, &r, &[]),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn even_restriction_stabilizes_the_alternating_pair() {
        let oracle = euclid1();
        let n = 64;
        let r = NormalizingSequence::one_over_n(n).unwrap();
        let alt = alternating_line_seq(&oracle, &r);
        let z = radial_seq(&oracle, "z", &[1.0], &r);
        let params = StabilityParams::default();

        let before = estimate_mutual_limit(&oracle, &alt, &z, &r, &params).unwrap();
        assert_eq!(before.status, StabilityStatus::Unstable);

        let evens = even_positions(n);
        let (alt2, r2) = restrict_to_subsequence(&alt, &r, &evens).unwrap();
        let (z2, _) = restrict_to_subsequence(&z, &r, &evens).unwrap();
        let after = estimate_mutual_limit(&oracle, &alt2, &z2, &r2, &params).unwrap();
        assert_eq!(after.status, StabilityStatus::Stable);
        assert_eq!(after.limit, 0.0);
    }

    #[test]
    fn limit_triangle_inequality_holds_within_slack() {
        let oracle = euclid2();
        let r = NormalizingSequence::one_over_n(64).unwrap();
        let dirs = [[1.0, 0.0], [0.4, -1.2], [-0.7, 0.3], [2.0, 2.0], [0.0, 0.0]];
        let seqs: Vec<_> = dirs
            .iter()
            .enumerate()
            .map(|(i, v)| radial_seq(&oracle, &format!("s{i}"), v, &r))
            .collect();
        let params = StabilityParams::default();
        let lim = |a: usize, b: usize| {
            estimate_mutual_limit(&oracle, &seqs[a], &seqs[b], &r, &params).unwrap().limit
        };
        for a in 0..dirs.len() {
            for b in 0..dirs.len() {
                for c in 0..dirs.len() {
                    assert!(lim(a, b) <= lim(a, c) + lim(c, b) + 3.0 * params.tau_stab);
                }
            }
        }
    }

    #[test]
    fn tripod_quotient_fails_lp_and_passes_quadrilateral() {
        let spec = SpaceSpec::Tripod { edges: [1.0, 1.0, 1.0] };
        let oracle = make_oracle(&spec).unwrap();
        let pool = curated_pool(&spec);
        let (r, seqs) = realize_pool(&oracle, &pool, 128).unwrap();
        let build = construct_pretangent(
            &oracle,
            seqs,
            &r,
            &StabilityParams::default(),
            defaults::TAU_ZERO,
        )
        .unwrap();
        // base + three unit leaves + one half leaf = 5 classes.
        assert_eq!(build.approximation.quotient.len(), 5);
        let verdicts = analyze_pretangent(&build.approximation, defaults::TAU_PASS);
        assert_eq!(verdicts.quadrilateral.verdict, Verdict::Pass);
        assert_eq!(verdicts.ptolemy.verdict, Verdict::Pass);
        assert_eq!(verdicts.lebedeva_petrunin.verdict, Verdict::Fail);
        let min = verdicts.lebedeva_petrunin.min_defect.unwrap();
        assert!((min + 1.0).abs() <= 1e-9, "lp min {min}");
    }

    #[test]
    fn determinism_identical_pools_identical_quotients() {
        let spec = SpaceSpec::HyperbolicPlane;
        let oracle = make_oracle(&spec).unwrap();
        let pool = curated_pool(&spec);
        let params = StabilityParams {
            tau_stab: defaults::TAU_STAB_CURVED,
            tau_unstab: defaults::TAU_UNSTAB_CURVED,
            ..Default::default()
        };
        let build = |_: ()| {
            let (r, seqs) = realize_pool(&oracle, &pool, 256).unwrap();
            construct_pretangent(&oracle, seqs, &r, &params, defaults::TAU_STAB_CURVED).unwrap()
        };
        let a = build(());
        let b = build(());
        assert_eq!(a.approximation.quotient, b.approximation.quotient);
        assert_eq!(a.selection.accepted, b.selection.accepted);
    }

    #[test]
    fn quotients_pass_validation_at_declared_tolerance() {
        let spec = SpaceSpec::Euclidean { dim: 2 };
        let oracle = make_oracle(&spec).unwrap();
        let pool = curated_pool(&spec);
        let (r, seqs) = realize_pool(&oracle, &pool, defaults::WINDOW).unwrap();
        let build = construct_pretangent(
            &oracle,
            seqs,
            &r,
            &StabilityParams::default(),
            defaults::TAU_ZERO,
        )
        .unwrap();
        let report = validate_metric(&build.approximation.quotient, 3.0 * defaults::TAU_ZERO);
        assert!(report.pass);
    }

    #[test]
    fn pool_spec_round_trips_through_json() {
        let spec = curated_pool(&SpaceSpec::Euclidean { dim: 2 });
        let text = serde_json::to_string(&spec).unwrap();
        let back: PoolSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back.sequences.len(), spec.sequences.len());
        let oracle = euclid2();
        let (r, seqs) = realize_pool(&oracle, &back, 64).unwrap();
        assert_eq!(r.len(), 64);
        assert_eq!(seqs.len(), 8);
    }

    #[test]
    fn explicit_pool_sequences_are_validated() {
        let oracle = euclid2();
        let spec = PoolSpec {
            normalizing: NormalizingSpec::OneOverN,
            sequences: vec![SequenceSpec::Explicit {
                label: "short".into(),
                points: vec![vec![0.0, 0.0]; 3],
            }],
        };
        assert!(realize_pool(&oracle, &spec, 8).is_err());
    }
}
