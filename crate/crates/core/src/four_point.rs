//! The three macroscopic four-point inequalities and their scanners.
//!
//! Each functional is a signed defect: nonnegative on every quadruple means
//! the corresponding inequality holds.
//!
//! * `quadrilateral` — sum of the four squared sides minus the two squared
//!   diagonals; nonnegativity characterizes nonpositive curvature on
//!   geodesic spaces.
//! * `lebedeva_petrunin` — squared distances from an apex to a triple minus
//!   a third of the triple's squared perimeter terms; nonnegativity
//!   characterizes nonnegative curvature on complete geodesic spaces.
//! * `ptolemy` — cross products of distances minus the paired product.
//!
//! Scans minimize a defect over all quadruples of a finite space or a
//! sampled ball, factoring out each functional's symmetry group, with a
//! deterministic parallel reduction (lexicographically smallest witness
//! among ties, independent of worker count).

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::defaults::QUADRUPLE_EVAL_BUDGET;
use crate::error::{Error, Result};
use crate::metric::{FiniteMetricSpace, MetricOracle};

/// `d²(w,x) + d²(x,y) + d²(y,z) + d²(z,w) − d²(w,y) − d²(x,z)`.
/// Nonnegative iff the quadrilateral inequality holds for this ordering.
pub fn quadrilateral_defect<P, D: Fn(&P, &P) -> f64>(w: &P, x: &P, y: &P, z: &P, d: D) -> f64 {
    let sq = |a: &P, b: &P| {
        let v = d(a, b);
        v * v
    };
    sq(w, x) + sq(x, y) + sq(y, z) + sq(z, w) - sq(w, y) - sq(x, z)
}

/// `d²(w,x) + d²(w,y) + d²(w,z) − (d²(x,y) + d²(y,z) + d²(z,x)) / 3`
/// with apex `w`.
pub fn lp_defect<P, D: Fn(&P, &P) -> f64>(w: &P, x: &P, y: &P, z: &P, d: D) -> f64 {
    let sq = |a: &P, b: &P| {
        let v = d(a, b);
        v * v
    };
    sq(w, x) + sq(w, y) + sq(w, z) - (sq(x, y) + sq(y, z) + sq(z, x)) / 3.0
}

/// `d(x,u)d(y,v) + d(x,v)d(y,u) − d(x,y)d(u,v)`.
pub fn ptolemy_defect<P, D: Fn(&P, &P) -> f64>(x: &P, y: &P, u: &P, v: &P, d: D) -> f64 {
    d(x, u) * d(y, v) + d(x, v) * d(y, u) - d(x, y) * d(u, v)
}

/// Which four-point inequality a scan or report refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    Quadrilateral,
    LebedevaPetrunin,
    Ptolemy,
}

impl FunctionalKind {
    /// Argument orderings to examine per 4-combination, after factoring out
    /// the functional's symmetry group. Entries index into the sorted
    /// combination `(a,b,c,d)`.
    ///
    /// * quadrilateral: invariant under cyclic shifts and reversal, so only
    ///   the three pairings into diagonal pairs remain;
    /// * lebedeva_petrunin: apex choice times an unordered triple — four;
    /// * ptolemy: depends only on the pairing `{{x,y},{u,v}}` — three.
    pub fn orderings(self) -> &'static [[usize; 4]] {
        match self {
            FunctionalKind::Quadrilateral => &[[0, 1, 2, 3], [0, 2, 1, 3], [0, 1, 3, 2]],
            FunctionalKind::LebedevaPetrunin => {
                &[[0, 1, 2, 3], [1, 0, 2, 3], [2, 0, 1, 3], [3, 0, 1, 2]]
            }
            FunctionalKind::Ptolemy => &[[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]],
        }
    }

    /// Defect of one ordered quadruple, reading distances from a lookup.
    #[inline]
    pub fn defect_indexed(self, q: [usize; 4], d: &impl Fn(usize, usize) -> f64) -> f64 {
        let [w, x, y, z] = q;
        match self {
            FunctionalKind::Quadrilateral => {
                let sq = |a: usize, b: usize| {
                    let v = d(a, b);
                    v * v
                };
                sq(w, x) + sq(x, y) + sq(y, z) + sq(z, w) - sq(w, y) - sq(x, z)
            }
            FunctionalKind::LebedevaPetrunin => {
                let sq = |a: usize, b: usize| {
                    let v = d(a, b);
                    v * v
                };
                sq(w, x) + sq(w, y) + sq(w, z) - (sq(x, y) + sq(y, z) + sq(z, x)) / 3.0
            }
            // Roles here are (x, y, u, v).
            FunctionalKind::Ptolemy => d(w, y) * d(x, z) + d(w, z) * d(x, y) - d(w, x) * d(y, z),
        }
    }

    pub fn cli_name(self) -> &'static str {
        match self {
            FunctionalKind::Quadrilateral => "quad",
            FunctionalKind::LebedevaPetrunin => "lp",
            FunctionalKind::Ptolemy => "ptolemy",
        }
    }
}

/// Scan outcome verdict. `Vacuous` marks spaces with fewer than four points,
/// where every four-point condition holds by default.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Vacuous,
}

impl Verdict {
    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        matches!(self, Verdict::Pass | Verdict::Vacuous)
    }
}

/// How the quadruple space was traversed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum ScanMode {
    Exhaustive,
    Sampled { scale: f64, requested_samples: usize, truncated: bool },
}

/// Result of minimizing a four-point defect over a point set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuadrupleDefectReport {
    pub functional: FunctionalKind,
    pub verdict: Verdict,
    /// Global minimum over the quadruples examined; absent on vacuous scans.
    pub min_defect: Option<f64>,
    /// Argmin quadruple as indices into the scanned point set, in the
    /// functional's argument order; lexicographically smallest among ties.
    pub witness: Option<[usize; 4]>,
    /// Labels of the witness points, when the scanned set is labelled.
    pub witness_labels: Option<Vec<String>>,
    /// Ordered-quadruple evaluations performed.
    pub quadruples_examined: u64,
    pub mode: ScanMode,
    pub tolerance: f64,
}

/// A candidate minimum with its witness; ordered first by value, then by
/// witness tuple, so parallel reductions are associative and deterministic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct MinCandidate {
    pub value: f64,
    pub witness: [usize; 4],
}

impl MinCandidate {
    fn better_than(&self, other: &MinCandidate) -> bool {
        self.value < other.value || (self.value == other.value && self.witness < other.witness)
    }
}

pub(crate) fn fold_min(a: Option<MinCandidate>, b: Option<MinCandidate>) -> Option<MinCandidate> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.better_than(&x) { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Minimize `eval` over every ordering of every 4-combination of `0..n`.
/// Parallel over the leading index; the reduction is a total order on
/// `(value, witness)`, so the result is identical for any worker count.
pub(crate) fn min_over_all_quadruples(
    n: usize,
    orderings: &'static [[usize; 4]],
    eval: &(impl Fn([usize; 4]) -> f64 + Sync),
) -> Option<MinCandidate> {
    if n < 4 {
        return None;
    }
    (0..n - 3)
        .into_par_iter()
        .map(|a| {
            let mut best: Option<MinCandidate> = None;
            for b in (a + 1)..n {
                for c in (b + 1)..n {
                    for d in (c + 1)..n {
                        let combo = [a, b, c, d];
                        for ord in orderings {
                            let witness = [combo[ord[0]], combo[ord[1]], combo[ord[2]], combo[ord[3]]];
                            let cand = MinCandidate { value: eval(witness), witness };
                            best = fold_min(best, Some(cand));
                        }
                    }
                }
            }
            best
        })
        .reduce(|| None, fold_min)
}

/// Minimize `eval` over explicit combinations (used for probe sets and for
/// seeded random subsets under the evaluation budget).
pub(crate) fn min_over_combos(
    combos: &[[usize; 4]],
    orderings: &'static [[usize; 4]],
    eval: &(impl Fn([usize; 4]) -> f64 + Sync),
) -> Option<MinCandidate> {
    combos
        .par_iter()
        .map(|combo| {
            let mut best: Option<MinCandidate> = None;
            for ord in orderings {
                let witness = [combo[ord[0]], combo[ord[1]], combo[ord[2]], combo[ord[3]]];
                let cand = MinCandidate { value: eval(witness), witness };
                best = fold_min(best, Some(cand));
            }
            best
        })
        .reduce(|| None, fold_min)
}

pub(crate) fn combination_count(n: usize) -> u64 {
    if n < 4 {
        return 0;
    }
    let n = n as u64;
    n * (n - 1) * (n - 2) * (n - 3) / 24
}

fn vacuous_report(functional: FunctionalKind, mode: ScanMode, tolerance: f64) -> QuadrupleDefectReport {
    QuadrupleDefectReport {
        functional,
        verdict: Verdict::Vacuous,
        min_defect: None,
        witness: None,
        witness_labels: None,
        quadruples_examined: 0,
        mode,
        tolerance,
    }
}

/// Exhaustively scan a finite metric space for the minimum defect of one
/// functional. Spaces with fewer than four points produce a vacuous pass.
pub fn scan_finite(
    space: &FiniteMetricSpace,
    functional: FunctionalKind,
    tau_pass: f64,
) -> QuadrupleDefectReport {
    let n = space.len();
    if n < 4 {
        return vacuous_report(functional, ScanMode::Exhaustive, tau_pass);
    }
    let orderings = functional.orderings();
    let eval = |q: [usize; 4]| functional.defect_indexed(q, &|i, j| space.dist(i, j));
    let best = min_over_all_quadruples(n, orderings, &eval).expect("n >= 4");
    let labels = best.witness.iter().map(|&i| space.labels()[i].clone()).collect();
    QuadrupleDefectReport {
        functional,
        verdict: Verdict::from_pass(best.value >= -tau_pass),
        min_defect: Some(best.value),
        witness: Some(best.witness),
        witness_labels: Some(labels),
        quadruples_examined: combination_count(n) * orderings.len() as u64,
        mode: ScanMode::Exhaustive,
        tolerance: tau_pass,
    }
}

/// A sampled scan's report together with the points it examined (probe
/// points first, then random draws), so witnesses can be re-evaluated and
/// serialized by the caller.
#[derive(Clone, Debug, Serialize)]
pub struct SampledScan<P> {
    pub report: QuadrupleDefectReport,
    pub points: Vec<P>,
}

/// Draw the scan point set for a ball: deterministic probes first, then
/// `m` random draws from the given stream.
pub(crate) fn gather_sample<O: MetricOracle>(
    oracle: &O,
    scale: f64,
    m: usize,
    rng: &mut dyn RngCore,
) -> (Vec<O::Point>, usize) {
    let mut points = oracle.scale_probes(scale);
    let probe_count = points.len();
    points.reserve(m);
    for _ in 0..m {
        points.push(oracle.sample_at_scale(scale, rng));
    }
    (points, probe_count)
}

pub(crate) struct SubsetPlan {
    pub combos: Vec<[usize; 4]>,
    pub truncated: bool,
    pub evaluations: u64,
}

/// Decide which quadruples to examine for `n` points under `budget`
/// evaluations: everything when it fits, otherwise all quadruples among the
/// first `probe_count` points plus a seeded uniform subset of the rest.
pub(crate) fn plan_quadruples(
    n: usize,
    probe_count: usize,
    orderings: usize,
    budget: usize,
    rng: &mut dyn RngCore,
) -> SubsetPlan {
    let total = combination_count(n) * orderings as u64;
    if total <= budget as u64 {
        return SubsetPlan { combos: Vec::new(), truncated: false, evaluations: total };
    }
    let mut combos: Vec<[usize; 4]> = Vec::new();
    // Probe quadruples are always examined: they carry the deterministic
    // extremal configurations.
    for a in 0..probe_count.saturating_sub(3) {
        for b in (a + 1)..probe_count {
            for c in (b + 1)..probe_count {
                for d in (c + 1)..probe_count {
                    combos.push([a, b, c, d]);
                }
            }
        }
    }
    let random_combos = budget / orderings;
    for _ in 0..random_combos {
        let mut picks = [0usize; 4];
        let mut chosen = 0;
        while chosen < 4 {
            let cand = rng.gen_range(0..n);
            if !picks[..chosen].contains(&cand) {
                picks[chosen] = cand;
                chosen += 1;
            }
        }
        picks.sort_unstable();
        combos.push(picks);
    }
    let evaluations = combos.len() as u64 * orderings as u64;
    SubsetPlan { combos, truncated: true, evaluations }
}

/// Scan a sampled ball of a metric oracle. Deterministic given the stream:
/// the sample is probes plus `m` sequential draws, and above the evaluation
/// budget a seeded uniform subset of quadruples is used (recorded in the
/// report's mode).
pub fn scan_sampled<O: MetricOracle>(
    oracle: &O,
    scale: f64,
    m: usize,
    functional: FunctionalKind,
    tau_pass: f64,
    budget: usize,
    rng: &mut dyn RngCore,
) -> Result<SampledScan<O::Point>> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::InvalidParameter(format!("scale {scale} must be > 0")));
    }
    if m < 4 {
        return Err(Error::InvalidParameter(format!("need at least 4 samples, got {m}")));
    }
    let (points, probe_count) = gather_sample(oracle, scale, m, rng);
    let n = points.len();
    let dmat = pairwise_matrix(oracle, &points);
    let lookup = |i: usize, j: usize| dmat[i * n + j];
    let orderings = functional.orderings();
    let eval = |q: [usize; 4]| functional.defect_indexed(q, &lookup);

    let plan = plan_quadruples(n, probe_count, orderings.len(), budget, rng);
    let best = if plan.truncated {
        min_over_combos(&plan.combos, orderings, &eval)
    } else {
        min_over_all_quadruples(n, orderings, &eval)
    }
    .expect("sample has >= 4 points");

    let mode = ScanMode::Sampled { scale, requested_samples: m, truncated: plan.truncated };
    let report = QuadrupleDefectReport {
        functional,
        verdict: Verdict::from_pass(best.value >= -tau_pass),
        min_defect: Some(best.value),
        witness: Some(best.witness),
        witness_labels: None,
        quadruples_examined: plan.evaluations,
        mode,
        tolerance: tau_pass,
    };
    Ok(SampledScan { report, points })
}

pub(crate) fn pairwise_matrix<O: MetricOracle>(oracle: &O, points: &[O::Point]) -> Vec<f64> {
    let n = points.len();
    let mut dmat = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = oracle.distance(&points[i], &points[j]);
            dmat[i * n + j] = d;
            dmat[j * n + i] = d;
        }
    }
    dmat
}

/// Re-evaluate a report's witness against the point set it was produced
/// from. Used by tests and the CLI to certify that `min_defect` is real.
pub fn reevaluate_witness<O: MetricOracle>(
    oracle: &O,
    points: &[O::Point],
    report: &QuadrupleDefectReport,
) -> Option<f64> {
    let w = report.witness?;
    let d = |i: usize, j: usize| oracle.distance(&points[i], &points[j]);
    Some(report.functional.defect_indexed(w, &d))
}

/// Convenience: defect budget used when callers do not override it.
pub fn default_budget() -> usize {
    QUADRUPLE_EVAL_BUDGET
}
