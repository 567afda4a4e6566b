//! Normalized four-point functionals and their liminf estimation at the
//! base point.
//!
//! Each functional divides a four-point defect by the squared max distance
//! of the quadruple to the base point (`delta_p`), making it invariant
//! under metric scaling: `A1` normalizes the quadrilateral defect, `A2` the
//! Lebedeva–Petrunin defect, `A3` the Ptolemy defect. Their liminf as the
//! quadruple approaches `p` being nonnegative is the infinitesimal form of
//! the corresponding curvature condition, and is estimated here by
//! minimizing over sampled balls along a shrinking scale schedule.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::four_point::{
    combination_count, gather_sample, min_over_all_quadruples, min_over_combos, pairwise_matrix,
    plan_quadruples, FunctionalKind, Verdict,
};
use crate::metric::MetricOracle;
use crate::rng::derive_rng;

/// All three normalized functionals have homogeneity degree two: both the
/// defect and `delta_p^2` scale as the metric squared.
pub const HOMOGENEITY_DEGREE: u32 = 2;

/// `max_i d(x_i, p)`: the normalization scale of a tuple at the base point.
pub fn delta_p<P, D: Fn(&P, &P) -> f64>(points: &[&P], p: &P, d: D) -> f64 {
    points.iter().map(|x| d(x, p)).fold(0.0, f64::max)
}

/// A four-point defect normalized by `delta_p^2`, with the degenerate
/// convention: the value at a quadruple entirely at the base point is 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormalizedFunctional(pub FunctionalKind);

impl NormalizedFunctional {
    pub const A1: NormalizedFunctional = NormalizedFunctional(FunctionalKind::Quadrilateral);
    pub const A2: NormalizedFunctional = NormalizedFunctional(FunctionalKind::LebedevaPetrunin);
    pub const A3: NormalizedFunctional = NormalizedFunctional(FunctionalKind::Ptolemy);

    pub fn name(self) -> &'static str {
        match self.0 {
            FunctionalKind::Quadrilateral => "A1",
            FunctionalKind::LebedevaPetrunin => "A2",
            FunctionalKind::Ptolemy => "A3",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a1" => Ok(Self::A1),
            "a2" => Ok(Self::A2),
            "a3" => Ok(Self::A3),
            other => Err(Error::InvalidParameter(format!("unknown functional `{other}`"))),
        }
    }
}

impl Serialize for NormalizedFunctional {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(NormalizedFunctional::name(*self))
    }
}

impl<'de> Deserialize<'de> for NormalizedFunctional {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        NormalizedFunctional::from_name(&s).map_err(serde::de::Error::custom)
    }
}

/// Evaluate a normalized functional at an ordered quadruple.
///
/// `A1(w,x,y,z)` and `A2(w,x,y,z)` are the quadrilateral and
/// Lebedeva–Petrunin defects of `(w,x,y,z)` over `delta_p^2`. `A3(w,x,y,z)`
/// has numerator `d(x,w)d(y,z) + d(x,z)d(y,w) − d(x,y)d(w,z)` — the
/// argument roles are kept exactly as in its defining formula to avoid
/// silent relabeling against the raw Ptolemy defect.
///
/// Quadruples with `delta_p = 0` (all four points at distance 0 from `p`)
/// evaluate to exactly 0; mixed quadruples need no special case since
/// `delta_p > 0` there.
pub fn evaluate<P, D: Fn(&P, &P) -> f64>(
    functional: NormalizedFunctional,
    w: &P,
    x: &P,
    y: &P,
    z: &P,
    p: &P,
    d: D,
) -> f64 {
    let delta = delta_p(&[w, x, y, z], p, &d);
    if delta == 0.0 {
        return 0.0;
    }
    let defect = match functional.0 {
        FunctionalKind::Quadrilateral => crate::four_point::quadrilateral_defect(w, x, y, z, &d),
        FunctionalKind::LebedevaPetrunin => crate::four_point::lp_defect(w, x, y, z, &d),
        FunctionalKind::Ptolemy => {
            d(x, w) * d(y, z) + d(x, z) * d(y, w) - d(x, y) * d(w, z)
        }
    };
    defect / (delta * delta)
}

/// A user-pluggable normalized quadruple functional: a signed defect of an
/// ordered quadruple's pairwise distances, scanned as `defect / delta_p^2`
/// (the engine assumes homogeneity degree two, like the built-ins).
///
/// Implementations declare which argument orderings per sorted
/// 4-combination are distinct under their symmetry group.
pub trait DefectFunctional: Sync {
    fn name(&self) -> String;

    /// Orderings to examine per sorted combination `(a,b,c,d)`; entries are
    /// positions into the combination.
    fn orderings(&self) -> &'static [[usize; 4]];

    /// Raw defect of one ordered quadruple given a pairwise-distance lookup.
    fn defect<D: Fn(usize, usize) -> f64>(&self, q: [usize; 4], d: &D) -> f64;

    /// Rewrite a minimizing quadruple into the argument order reported to
    /// callers. Identity unless the scan convention differs from the
    /// reporting convention.
    fn witness_roles(&self, q: [usize; 4]) -> [usize; 4] {
        q
    }
}

impl DefectFunctional for NormalizedFunctional {
    fn name(&self) -> String {
        NormalizedFunctional::name(*self).to_string()
    }

    fn orderings(&self) -> &'static [[usize; 4]] {
        self.0.orderings()
    }

    fn defect<D: Fn(usize, usize) -> f64>(&self, q: [usize; 4], d: &D) -> f64 {
        self.0.defect_indexed(q, d)
    }

    /// Liminf witnesses read as `(w, x, y, z)` for [`evaluate`]. The scan
    /// enumerates the Ptolemy functional in its raw `(x, y, u, v)` roles,
    /// which map to `A3`'s argument order as `(w, x, y, z) = (u, x, y, v)`.
    fn witness_roles(&self, q: [usize; 4]) -> [usize; 4] {
        match self.0 {
            FunctionalKind::Ptolemy => [q[2], q[0], q[1], q[3]],
            _ => q,
        }
    }
}

/// Strictly decreasing positive radii plus a per-scale sample count.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScaleSchedule {
    radii: Vec<f64>,
    samples_per_scale: usize,
}

impl ScaleSchedule {
    pub fn new(radii: Vec<f64>, samples_per_scale: usize) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::InvalidParameter("schedule needs at least one scale".into()));
        }
        if samples_per_scale < 4 {
            return Err(Error::InvalidParameter("need at least 4 samples per scale".into()));
        }
        for &r in &radii {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "radii must be finite and positive, got {r}"
                )));
            }
        }
        for w in radii.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::InvalidParameter(format!(
                    "radii must be strictly decreasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(ScaleSchedule { radii, samples_per_scale })
    }

    /// `start, start*ratio, ..., K` terms.
    pub fn geometric(start: f64, ratio: f64, count: usize, samples_per_scale: usize) -> Result<Self> {
        if !(start.is_finite() && start > 0.0) {
            return Err(Error::InvalidParameter(format!("geometric start {start} must be > 0")));
        }
        if !(ratio > 0.0 && ratio < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "geometric ratio {ratio} must lie strictly inside (0,1)"
            )));
        }
        let radii = (0..count).map(|k| start * ratio.powi(k as i32)).collect();
        Self::new(radii, samples_per_scale)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn samples_per_scale(&self) -> usize {
        self.samples_per_scale
    }
}

/// Argmin quadruple at one scale, with the points themselves so the value
/// can be re-evaluated.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleWitness<P> {
    pub indices: [usize; 4],
    pub points: Vec<P>,
    pub value: f64,
}

/// Liminf estimate along a scale schedule: per-scale minima of a normalized
/// functional, the infimum over the tail window (last third of scales), and
/// the verdict against the tolerance.
#[derive(Clone, Debug, Serialize)]
pub struct LiminfEstimate<P> {
    pub functional: String,
    pub scales: Vec<f64>,
    pub samples_per_scale: usize,
    pub per_scale_min: Vec<f64>,
    pub witness_per_scale: Vec<ScaleWitness<P>>,
    /// Number of trailing scales whose minima feed `tail_inf`.
    pub tail_window: usize,
    pub tail_inf: f64,
    pub epsilon: f64,
    pub verdict: Verdict,
    /// True if any scale's quadruple enumeration was budget-truncated.
    pub truncated: bool,
}

/// Estimate `liminf` of a normalized functional as quadruples approach the
/// base point: for each scale `t_k`, minimize over quadruples of
/// (deterministic probes + `m` sampled points of `B(p, t_k)`), then take
/// the infimum over the last third of scales.
///
/// Verdict: pass iff `tail_inf >= -epsilon`.
///
/// Deterministic given the seed: the per-scale stream depends only on
/// `(seed, k)`, samples are drawn sequentially (so enlarging `m` extends
/// rather than reshuffles the draw), and reductions are order-independent.
pub fn estimate_liminf<O: MetricOracle>(
    functional: NormalizedFunctional,
    oracle: &O,
    schedule: &ScaleSchedule,
    seed: u64,
    epsilon: f64,
    budget: usize,
) -> LiminfEstimate<O::Point> {
    estimate_liminf_with(&functional, oracle, schedule, seed, epsilon, budget)
}

/// [`estimate_liminf`] for any [`DefectFunctional`] implementation.
pub fn estimate_liminf_with<O: MetricOracle, F: DefectFunctional>(
    functional: &F,
    oracle: &O,
    schedule: &ScaleSchedule,
    seed: u64,
    epsilon: f64,
    budget: usize,
) -> LiminfEstimate<O::Point> {
    let m = schedule.samples_per_scale();
    let orderings = functional.orderings();
    let mut per_scale_min = Vec::with_capacity(schedule.radii().len());
    let mut witnesses = Vec::with_capacity(schedule.radii().len());
    let mut truncated_any = false;

    for (k, &scale) in schedule.radii().iter().enumerate() {
        let mut rng = derive_rng(seed, "liminf.scale", k as u64);
        let (points, probe_count) = gather_sample(oracle, scale, m, &mut rng);
        let n = points.len();
        let dmat = pairwise_matrix(oracle, &points);
        let p = oracle.base_point();
        let d_to_p: Vec<f64> = points.iter().map(|q| oracle.distance(q, &p)).collect();
        let lookup = |i: usize, j: usize| dmat[i * n + j];
        let eval = |q: [usize; 4]| {
            let delta = q.iter().map(|&i| d_to_p[i]).fold(0.0, f64::max);
            if delta == 0.0 {
                return 0.0;
            }
            functional.defect(q, &lookup) / (delta * delta)
        };

        let total = combination_count(n) * orderings.len() as u64;
        let best = if total <= budget as u64 {
            min_over_all_quadruples(n, orderings, &eval)
        } else {
            truncated_any = true;
            let mut subset_rng = derive_rng(seed, "liminf.subset", k as u64);
            let plan = plan_quadruples(n, probe_count, orderings.len(), budget, &mut subset_rng);
            min_over_combos(&plan.combos, orderings, &eval)
        }
        .expect("schedule guarantees >= 4 points per scale");

        per_scale_min.push(best.value);
        let witness = functional.witness_roles(best.witness);
        witnesses.push(ScaleWitness {
            indices: witness,
            points: witness.iter().map(|&i| points[i].clone()).collect(),
            value: best.value,
        });
    }

    let k = per_scale_min.len();
    let tail_window = k.div_ceil(3);
    let tail_inf = per_scale_min[k - tail_window..].iter().copied().fold(f64::INFINITY, f64::min);
    LiminfEstimate {
        functional: functional.name(),
        scales: schedule.radii().to_vec(),
        samples_per_scale: m,
        per_scale_min,
        witness_per_scale: witnesses,
        tail_window,
        tail_inf,
        epsilon,
        verdict: Verdict::from_pass(tail_inf >= -epsilon),
        truncated: truncated_any,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{make_oracle, CarrierPoint, SpaceSpec};
    use proptest::prelude::*;

    #[allow(clippy::ptr_arg)] // P = Vec<f64> in the generic distance bound
    fn euclid(a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }

    #[test]
    fn delta_p_examples() {
        let p = vec![0.0, 0.0];
        assert_eq!(delta_p(&[&p, &p, &p, &p], &p, euclid), 0.0);

        let pts = [vec![1.0, 0.0], vec![0.0, 2.0], vec![0.0, 0.0], vec![3.0, 0.0]];
        let refs: Vec<&Vec<f64>> = pts.iter().collect();
        assert_eq!(delta_p(&refs, &p, euclid), 3.0);

        let x = vec![0.0, 0.7];
        assert_eq!(delta_p(&[&x], &p, euclid), 0.7);
    }

    #[test]
    fn degenerate_quadruple_evaluates_to_exact_zero() {
        let p = vec![0.0, 0.0];
        for f in [NormalizedFunctional::A1, NormalizedFunctional::A2, NormalizedFunctional::A3] {
            let v = evaluate(f, &p, &p, &p, &p, &p, euclid);
            assert_eq!(v, 0.0, "{}", f.name());
            assert_eq!(v.to_bits(), 0.0f64.to_bits());
        }
    }

    #[test]
    fn tripod_a2_is_minus_one_at_every_scale() {
        let oracle = make_oracle(&SpaceSpec::Tripod { edges: [1.0, 1.0, 1.0] }).unwrap();
        let p = oracle.base_point();
        let d = |a: &CarrierPoint, b: &CarrierPoint| oracle.distance(a, b);
        for t in [0.5, 0.25, 0.125, 1e-3, 0.3] {
            let leaves: Vec<CarrierPoint> =
                (0..3).map(|e| CarrierPoint::Tripod { edge: e, arm: t }).collect();
            let v = evaluate(NormalizedFunctional::A2, &p, &leaves[0], &leaves[1], &leaves[2], &p, d);
            assert!((v + 1.0).abs() <= 1e-12, "t={t}: {v}");
        }
    }

    #[test]
    fn a3_roles_match_its_defining_formula() {
        // A3(w,x,y,z) numerator is d(x,w)d(y,z) + d(x,z)d(y,w) - d(x,y)d(w,z).
        let (w, x, y, z) = (vec![0.1, 0.0], vec![0.0, 0.2], vec![0.3, 0.1], vec![0.2, 0.4]);
        let p = vec![0.0, 0.0];
        let num = euclid(&x, &w) * euclid(&y, &z) + euclid(&x, &z) * euclid(&y, &w)
            - euclid(&x, &y) * euclid(&w, &z);
        let refs: Vec<&Vec<f64>> = vec![&w, &x, &y, &z];
        let delta = delta_p(&refs, &p, euclid);
        let v = evaluate(NormalizedFunctional::A3, &w, &x, &y, &z, &p, euclid);
        assert!((v - num / (delta * delta)).abs() < 1e-15);
    }

    #[test]
    fn schedule_validation() {
        assert!(ScaleSchedule::new(vec![], 8).is_err());
        assert!(ScaleSchedule::new(vec![1.0, 1.0], 8).is_err());
        assert!(ScaleSchedule::new(vec![1.0, 0.5], 3).is_err());
        assert!(ScaleSchedule::new(vec![1.0, 0.5, 0.0], 8).is_err());
        assert!(ScaleSchedule::geometric(0.5, 1.5, 4, 8).is_err());
        let s = ScaleSchedule::geometric(0.5, 0.5, 3, 8).unwrap();
        assert_eq!(s.radii(), &[0.5, 0.25, 0.125]);
    }

    #[test]
    fn tripod_a2_liminf_fails_at_minus_one() {
        let oracle = make_oracle(&SpaceSpec::Tripod { edges: [1.0, 1.0, 1.0] }).unwrap();
        let schedule = ScaleSchedule::geometric(0.5, 0.5, 6, 16).unwrap();
        let est = estimate_liminf(NormalizedFunctional::A2, &oracle, &schedule, 7, 1e-6, 200_000);
        assert_eq!(est.verdict, Verdict::Fail);
        assert!(est.tail_inf <= -1.0 + 1e-6, "tail_inf {}", est.tail_inf);
        // The scale-invariant probe witness keeps every scale at -1.
        for (k, v) in est.per_scale_min.iter().enumerate() {
            assert!(*v <= -1.0 + 1e-9, "scale {k}: {v}");
        }
    }

    #[test]
    fn euclidean_liminf_passes_for_all_three() {
        let oracle = make_oracle(&SpaceSpec::Euclidean { dim: 2 }).unwrap();
        let schedule = ScaleSchedule::geometric(0.5, 0.5, 6, 24).unwrap();
        for f in [NormalizedFunctional::A1, NormalizedFunctional::A2, NormalizedFunctional::A3] {
            let est = estimate_liminf(f, &oracle, &schedule, 11, 1e-6, 200_000);
            assert_eq!(est.verdict, Verdict::Pass, "{}: tail {}", f.name(), est.tail_inf);
            assert!(est.tail_inf >= -1e-6);
        }
    }

    #[test]
    fn hyperbolic_a2_negative_at_coarse_scale_vanishing_at_fine() {
        let oracle = make_oracle(&SpaceSpec::HyperbolicPlane).unwrap();
        let schedule = ScaleSchedule::geometric(0.5, 0.5, 10, 60).unwrap();
        let est = estimate_liminf(NormalizedFunctional::A2, &oracle, &schedule, 3, 1e-3, 200_000);
        assert!(est.per_scale_min[0] <= -0.01, "coarse {}", est.per_scale_min[0]);
        assert!(est.per_scale_min[9] >= -1e-3, "fine {}", est.per_scale_min[9]);
        assert_eq!(est.verdict, Verdict::Pass, "tail {}", est.tail_inf);
    }

    #[test]
    fn l1_a3_liminf_fails_by_scale_invariance() {
        let oracle = make_oracle(&SpaceSpec::L1Plane).unwrap();
        let schedule = ScaleSchedule::geometric(0.5, 0.5, 6, 24).unwrap();
        let est = estimate_liminf(NormalizedFunctional::A3, &oracle, &schedule, 5, 1e-3, 200_000);
        assert_eq!(est.verdict, Verdict::Fail);
        assert!(est.tail_inf < -1e-3, "tail {}", est.tail_inf);
        // The diagonal probe square pins the minimum at -2 exactly.
        for v in &est.per_scale_min {
            assert!(*v <= -2.0 + 1e-9, "{v}");
        }
    }

    #[test]
    fn witnesses_reevaluate_to_their_minima() {
        // Witness tuples read directly as evaluate's (w, x, y, z), for all
        // three functionals (A3's scan roles are remapped).
        let oracle = make_oracle(&SpaceSpec::HyperbolicPlane).unwrap();
        let schedule = ScaleSchedule::geometric(1.0, 0.5, 4, 20).unwrap();
        let p = oracle.base_point();
        for f in [NormalizedFunctional::A1, NormalizedFunctional::A2, NormalizedFunctional::A3] {
            let est = estimate_liminf(f, &oracle, &schedule, 13, 1e-3, 200_000);
            for w in &est.witness_per_scale {
                let pts = &w.points;
                let v = evaluate(
                    f,
                    &pts[0],
                    &pts[1],
                    &pts[2],
                    &pts[3],
                    &p,
                    |a: &CarrierPoint, b: &CarrierPoint| oracle.distance(a, b),
                );
                assert!(
                    (v - w.value).abs() <= 1e-12 * w.value.abs().max(1.0),
                    "{}: {v} vs {}",
                    f.name(),
                    w.value
                );
            }
        }
    }

    #[test]
    fn enlarging_samples_never_raises_a_minimum() {
        // Below the truncation threshold the m-sample draw is a prefix of
        // the (m+k)-sample draw, so minima are monotone.
        let oracle = make_oracle(&SpaceSpec::HyperbolicPlane).unwrap();
        let seed = 21;
        let run = |m: usize| {
            let schedule = ScaleSchedule::geometric(0.5, 0.5, 4, m).unwrap();
            estimate_liminf(NormalizedFunctional::A2, &oracle, &schedule, seed, 1e-3, 200_000)
        };
        let small = run(10);
        let large = run(18);
        assert!(!small.truncated && !large.truncated);
        for (s, l) in small.per_scale_min.iter().zip(&large.per_scale_min) {
            assert!(l <= s, "larger sample raised the minimum: {l} > {s}");
        }
    }

    #[test]
    fn liminf_is_independent_of_worker_count() {
        let oracle = make_oracle(&SpaceSpec::L1Plane).unwrap();
        let schedule = ScaleSchedule::geometric(0.5, 0.5, 5, 40).unwrap();
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                estimate_liminf(NormalizedFunctional::A3, &oracle, &schedule, 17, 1e-3, 50_000)
            })
        };
        let a = run(1);
        let b = run(8);
        assert_eq!(a.per_scale_min.len(), b.per_scale_min.len());
        for (x, y) in a.per_scale_min.iter().zip(&b.per_scale_min) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        for (x, y) in a.witness_per_scale.iter().zip(&b.witness_per_scale) {
            assert_eq!(x.indices, y.indices);
        }
    }

    #[test]
    fn self_similar_probe_values_are_scale_independent() {
        // On self-similar oracles the deterministic probe configurations
        // give identical functional values at every scale.
        let cases: Vec<(SpaceSpec, NormalizedFunctional)> = vec![
            (SpaceSpec::Tripod { edges: [1.0, 1.0, 1.0] }, NormalizedFunctional::A2),
            (SpaceSpec::L1Plane, NormalizedFunctional::A3),
            (SpaceSpec::Euclidean { dim: 2 }, NormalizedFunctional::A1),
            (SpaceSpec::Snowflake { alpha: 0.5 }, NormalizedFunctional::A1),
        ];
        for (spec, f) in cases {
            let oracle = make_oracle(&spec).unwrap();
            let p = oracle.base_point();
            let d = |a: &CarrierPoint, b: &CarrierPoint| oracle.distance(a, b);
            let value_at = |t: f64| {
                let probes = oracle.scale_probes(t);
                let mut best = f64::INFINITY;
                let n = probes.len();
                for a in 0..n {
                    for b in (a + 1)..n {
                        for c in (b + 1)..n {
                            for e in (c + 1)..n {
                                let combo = [&probes[a], &probes[b], &probes[c], &probes[e]];
                                for ord in f.0.orderings() {
                                    let v = evaluate(
                                        f, combo[ord[0]], combo[ord[1]], combo[ord[2]],
                                        combo[ord[3]], &p, d,
                                    );
                                    best = best.min(v);
                                }
                            }
                        }
                    }
                }
                best
            };
            let v1 = value_at(0.5);
            let v2 = value_at(0.125);
            let v3 = value_at(0.03125);
            assert!((v1 - v2).abs() <= 1e-12 * v1.abs().max(1.0), "{spec:?}: {v1} vs {v2}");
            assert!((v1 - v3).abs() <= 1e-12 * v1.abs().max(1.0), "{spec:?}: {v1} vs {v3}");
        }
    }

    #[test]
    fn custom_functionals_plug_into_the_estimator() {
        // A doubled quadrilateral defect: minima must be exactly twice A1's.
        struct DoubledQuadrilateral;
        impl DefectFunctional for DoubledQuadrilateral {
            fn name(&self) -> String {
                "2*A1".into()
            }
            fn orderings(&self) -> &'static [[usize; 4]] {
                FunctionalKind::Quadrilateral.orderings()
            }
            fn defect<D: Fn(usize, usize) -> f64>(&self, q: [usize; 4], d: &D) -> f64 {
                2.0 * FunctionalKind::Quadrilateral.defect_indexed(q, d)
            }
        }

        let oracle = make_oracle(&SpaceSpec::HyperbolicPlane).unwrap();
        let schedule = ScaleSchedule::geometric(0.5, 0.5, 4, 16).unwrap();
        let base = estimate_liminf(NormalizedFunctional::A1, &oracle, &schedule, 9, 1e-3, 200_000);
        let doubled =
            estimate_liminf_with(&DoubledQuadrilateral, &oracle, &schedule, 9, 1e-3, 200_000);
        assert_eq!(doubled.functional, "2*A1");
        for (a, b) in base.per_scale_min.iter().zip(&doubled.per_scale_min) {
            assert!((b - 2.0 * a).abs() <= 1e-12 * b.abs().max(1.0), "{b} vs 2*{a}");
        }
    }

    proptest! {
        /// For nondegenerate quadruples, evaluate(A_i) * delta^2 recovers
        /// the raw defect.
        #[test]
        fn normalization_consistency(
            coords in prop::collection::vec(prop::array::uniform2(-5.0..5.0f64), 4),
        ) {
            let pts: Vec<Vec<f64>> = coords.iter().map(|c| c.to_vec()).collect();
            let p = vec![0.0, 0.0];
            let refs: Vec<&Vec<f64>> = pts.iter().collect();
            let delta = delta_p(&refs, &p, euclid);
            prop_assume!(delta > 1e-6);
            let d2 = delta * delta;
            let rel = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);

            let a1 = evaluate(NormalizedFunctional::A1, &pts[0], &pts[1], &pts[2], &pts[3], &p, euclid);
            let q = crate::four_point::quadrilateral_defect(&pts[0], &pts[1], &pts[2], &pts[3], euclid);
            prop_assert!(rel(a1 * d2, q));

            let a2 = evaluate(NormalizedFunctional::A2, &pts[0], &pts[1], &pts[2], &pts[3], &p, euclid);
            let l = crate::four_point::lp_defect(&pts[0], &pts[1], &pts[2], &pts[3], euclid);
            prop_assert!(rel(a2 * d2, l));

            let a3 = evaluate(NormalizedFunctional::A3, &pts[0], &pts[1], &pts[2], &pts[3], &p, euclid);
            let pt = crate::four_point::ptolemy_defect(&pts[1], &pts[2], &pts[0], &pts[3], euclid);
            prop_assert!(rel(a3 * d2, pt));
        }

        /// Scale invariance of the normalized functionals under d -> lambda d.
        #[test]
        fn normalized_scale_invariance(
            coords in prop::collection::vec(prop::array::uniform2(-5.0..5.0f64), 4),
            lambda in 0.1..10.0f64,
        ) {
            let pts: Vec<Vec<f64>> = coords.iter().map(|c| c.to_vec()).collect();
            let p = vec![0.0, 0.0];
            let refs: Vec<&Vec<f64>> = pts.iter().collect();
            prop_assume!(delta_p(&refs, &p, euclid) > 1e-6);
            let scaled = |a: &Vec<f64>, b: &Vec<f64>| lambda * euclid(a, b);
            for f in [NormalizedFunctional::A1, NormalizedFunctional::A2, NormalizedFunctional::A3] {
                let base = evaluate(f, &pts[0], &pts[1], &pts[2], &pts[3], &p, euclid);
                let scl = evaluate(f, &pts[0], &pts[1], &pts[2], &pts[3], &p, scaled);
                prop_assert!((base - scl).abs() <= 1e-11 * base.abs().max(1.0));
            }
        }
    }
}
