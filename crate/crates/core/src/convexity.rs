//! Midpoint convexity and Busemann convexity at the base point.
//!
//! Midpoint convexity asks for near-midpoints of every pair of sequences
//! converging to `p`, with deviations vanishing relative to the pair's
//! distance scale; it is the geodesicity hypothesis of the infinitesimal
//! curvature results. Busemann convexity at `p` strengthens it: a certified
//! midpoint sequence must also satisfy the midpoint-vs-third-point
//! inequality up to terms vanishing relative to the triple's scale.
//!
//! Verdicts here are evidence over the tested pairs, not proofs: a sampler
//! can exhibit a violating pair (a counterexample) or fail to find one.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::four_point::Verdict;
use crate::infinitesimal::delta_p;
use crate::metric::{FiniteMetricSpace, MetricOracle};
use crate::pretangent::PointSequence;
use crate::rng::derive_rng;

/// `(t)_+ = (|t| + t) / 2`.
pub fn positive_part(t: f64) -> f64 {
    (t.abs() + t) / 2.0
}

/// A normalized defect that may take the degenerate infinite value: when
/// the normalizing scale is zero but the tested point is not at the base
/// point, the defect is a sentinel `Infinite`, never a floating overflow,
/// so verdict logic can branch on it explicitly.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DefectValue {
    Finite(f64),
    Infinite,
}

impl DefectValue {
    pub fn is_finite(self) -> bool {
        matches!(self, DefectValue::Finite(_))
    }

    pub fn within(self, eps: f64) -> bool {
        match self {
            DefectValue::Finite(v) => v <= eps,
            DefectValue::Infinite => false,
        }
    }

    /// Total order with `Infinite` as the top element.
    fn le(self, other: DefectValue) -> bool {
        match (self, other) {
            (DefectValue::Finite(a), DefectValue::Finite(b)) => a <= b,
            (DefectValue::Finite(_), DefectValue::Infinite) => true,
            (DefectValue::Infinite, DefectValue::Finite(_)) => false,
            (DefectValue::Infinite, DefectValue::Infinite) => true,
        }
    }

    fn max(self, other: DefectValue) -> DefectValue {
        if self.le(other) {
            other
        } else {
            self
        }
    }
}

/// Midpoint defect of a candidate `z` for the pair `(x, y)` at one index:
/// the larger of the two normalized deviations
/// `|d(x,z) - d(x,y)/2| / delta_p(x,y)` and `|d(y,z) - d(x,y)/2| / delta_p(x,y)`.
///
/// Degenerate scale (`delta_p(x,y) = 0`, i.e. both endpoints at the base
/// point): `0` when `z` is also at the base point, `Infinite` otherwise.
pub fn midpoint_defect<P, D: Fn(&P, &P) -> f64>(
    x: &P,
    y: &P,
    z: &P,
    p: &P,
    d: D,
) -> DefectValue {
    let delta = delta_p(&[x, y], p, &d);
    if delta == 0.0 {
        return if d(z, p) == 0.0 { DefectValue::Finite(0.0) } else { DefectValue::Infinite };
    }
    let half = d(x, y) / 2.0;
    let dev = (d(x, z) - half).abs().max((d(y, z) - half).abs());
    DefectValue::Finite(dev / delta)
}

/// Evidence that a sequence converges to the base point: the last quarter
/// of the window must sit no higher than half of the first quarter's
/// maximum (or already at zero).
fn certify_converges_to_base<O: MetricOracle>(
    oracle: &O,
    seq: &PointSequence<O::Point>,
) -> Result<()> {
    let p = oracle.base_point();
    let n = seq.len();
    if n < 4 {
        return Err(Error::Precondition(format!(
            "sequence `{}` is too short to certify convergence",
            seq.label
        )));
    }
    let quarter = n.div_ceil(4);
    let head_max =
        seq.points[..quarter].iter().map(|q| oracle.distance(q, &p)).fold(0.0, f64::max);
    let tail_max =
        seq.points[n - quarter..].iter().map(|q| oracle.distance(q, &p)).fold(0.0, f64::max);
    if tail_max == 0.0 || tail_max <= head_max / 2.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "sequence `{}` shows no convergence to the base point (head max {head_max}, tail max {tail_max})",
            seq.label
        )))
    }
}

/// Per-index midpoint search outcome.
#[derive(Clone, Debug, Serialize)]
pub struct MidpointSearch<P> {
    /// The argmin candidate sequence.
    pub midpoints: Vec<P>,
    pub profile: Vec<DefectValue>,
    /// Max defect over the tail window.
    pub tail_max: DefectValue,
    pub epsilon: f64,
    pub verdict: Verdict,
    /// True when the oracle's analytic midpoint was available.
    pub used_analytic_hint: bool,
}

/// For each index, minimize the midpoint defect over candidates: the
/// oracle's analytic midpoint when available, else the base point plus
/// `budget` random draws from `B(p, 2 delta_p(x_n, y_n))` (any
/// near-midpoint lies within twice the pair's scale of `p` by the triangle
/// inequality).
///
/// Verdict `Pass` — midpoint-convexity evidence for this pair — iff the
/// tail max defect is at most `eps_mid`. Deterministic given the seed:
/// index `n` draws from the stream `(seed, n)`.
pub fn search_infinitesimal_midpoint<O: MetricOracle>(
    oracle: &O,
    x: &PointSequence<O::Point>,
    y: &PointSequence<O::Point>,
    budget: usize,
    seed: u64,
    eps_mid: f64,
    tail_fraction: f64,
) -> Result<MidpointSearch<O::Point>> {
    if budget == 0 {
        return Err(Error::InvalidParameter("midpoint search budget must be >= 1".into()));
    }
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::DimensionMismatch("sequence windows differ or are empty".into()));
    }
    certify_converges_to_base(oracle, x)?;
    certify_converges_to_base(oracle, y)?;

    let p = oracle.base_point();
    let n = x.len();
    let d = |a: &O::Point, b: &O::Point| oracle.distance(a, b);

    let per_index: Vec<(O::Point, DefectValue, bool)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (xi, yi) = (&x.points[i], &y.points[i]);
            let delta = delta_p(&[xi, yi], &p, d);
            let mut best_point = p.clone();
            let mut best = midpoint_defect(xi, yi, &best_point, &p, d);
            let mut used_hint = false;
            if let Some(hint) = oracle.midpoint_hint(xi, yi) {
                let v = midpoint_defect(xi, yi, &hint, &p, d);
                // The hint wins ties against the base point.
                if v.le(best) {
                    best = v;
                    best_point = hint;
                }
                used_hint = true;
            } else if delta > 0.0 {
                let mut rng = derive_rng(seed, "midpoint.search", i as u64);
                for _ in 0..budget {
                    let cand = oracle.sample_at_scale(2.0 * delta, &mut rng);
                    let v = midpoint_defect(xi, yi, &cand, &p, d);
                    if !best.le(v) {
                        best = v;
                        best_point = cand;
                    }
                }
            }
            (best_point, best, used_hint)
        })
        .collect();

    let midpoints: Vec<O::Point> = per_index.iter().map(|(m, _, _)| m.clone()).collect();
    let profile: Vec<DefectValue> = per_index.iter().map(|(_, v, _)| *v).collect();
    let used_analytic_hint = per_index.iter().any(|(_, _, h)| *h);

    let tail_len = ((tail_fraction * n as f64).ceil() as usize).clamp(1, n);
    let tail_max = profile[n - tail_len..]
        .iter()
        .fold(DefectValue::Finite(f64::NEG_INFINITY), |acc, v| acc.max(*v));
    Ok(MidpointSearch {
        midpoints,
        profile,
        tail_max,
        epsilon: eps_mid,
        verdict: Verdict::from_pass(tail_max.within(eps_mid)),
        used_analytic_hint,
    })
}

/// Busemann defect profile for a certified midpoint sequence.
#[derive(Clone, Debug, Serialize)]
pub struct BusemannProfile {
    pub profile: Vec<DefectValue>,
    pub tail_max: DefectValue,
    pub epsilon: f64,
    pub verdict: Verdict,
}

/// Per-index positive part of `d(m_n, y_n) - (d(x0_n, y_n) + d(x1_n, y_n))/2`,
/// normalized by `delta_p(x0_n, y_n, x1_n)`.
///
/// Preconditions: all four sequences converge to the base point, and `m`
/// must certify as an infinitesimal midpoint of `(x0, x1)` (midpoint-defect
/// tail at most `eps_mid`) — otherwise a precondition error is returned.
/// Verdict `Pass` — Busemann-convexity evidence at `p` — iff the tail max
/// is at most `eps_bus`.
#[allow(clippy::too_many_arguments)]
pub fn busemann_defect_profile<O: MetricOracle>(
    oracle: &O,
    x0: &PointSequence<O::Point>,
    x1: &PointSequence<O::Point>,
    y: &PointSequence<O::Point>,
    m: &PointSequence<O::Point>,
    eps_mid: f64,
    eps_bus: f64,
    tail_fraction: f64,
) -> Result<BusemannProfile> {
    let n = x0.len();
    if [x1.len(), y.len(), m.len()].iter().any(|&l| l != n) || n == 0 {
        return Err(Error::DimensionMismatch("sequence windows differ or are empty".into()));
    }
    for seq in [x0, x1, y, m] {
        certify_converges_to_base(oracle, seq)?;
    }
    let p = oracle.base_point();
    let d = |a: &O::Point, b: &O::Point| oracle.distance(a, b);
    let tail_len = ((tail_fraction * n as f64).ceil() as usize).clamp(1, n);

    // Certify the midpoint over the tail window.
    let mut mid_tail = DefectValue::Finite(f64::NEG_INFINITY);
    for i in n - tail_len..n {
        let v = midpoint_defect(&x0.points[i], &x1.points[i], &m.points[i], &p, d);
        mid_tail = mid_tail.max(v);
    }
    if !mid_tail.within(eps_mid) {
        return Err(Error::Precondition(format!(
            "`{}` is not a certified infinitesimal midpoint of `{}`,`{}` (tail defect {mid_tail:?} > {eps_mid})",
            m.label, x0.label, x1.label
        )));
    }

    let profile: Vec<DefectValue> = (0..n)
        .map(|i| {
            let delta = delta_p(&[&x0.points[i], &y.points[i], &x1.points[i]], &p, d);
            let gap = d(&m.points[i], &y.points[i])
                - 0.5 * (d(&x0.points[i], &y.points[i]) + d(&x1.points[i], &y.points[i]));
            if delta == 0.0 {
                if d(&m.points[i], &p) == 0.0 {
                    DefectValue::Finite(0.0)
                } else {
                    DefectValue::Infinite
                }
            } else {
                DefectValue::Finite(positive_part(gap) / delta)
            }
        })
        .collect();

    let tail_max = profile[n - tail_len..]
        .iter()
        .fold(DefectValue::Finite(f64::NEG_INFINITY), |acc, v| acc.max(*v));
    Ok(BusemannProfile {
        profile,
        tail_max,
        epsilon: eps_bus,
        verdict: Verdict::from_pass(tail_max.within(eps_bus)),
    })
}

/// A planted or discovered violation of the finite midpoint inequality.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteBusemannWitness {
    pub endpoints: (usize, usize),
    pub midpoint: usize,
    pub against: usize,
    /// `d(m, y) - (d(x0, y) + d(x1, y)) / 2`.
    pub violation: f64,
}

/// Report over all discrete-midpoint triples of a finite space.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteBusemannReport {
    pub verdict: Verdict,
    pub tolerance: f64,
    /// Discrete midpoint triples found (pairs with some `m` splitting them
    /// evenly within tolerance).
    pub midpoint_triples: usize,
    /// Total midpoint-against-point checks performed.
    pub checks: u64,
    /// Largest signed violation over all checks, if any check ran.
    pub max_violation: Option<f64>,
    pub witness: Option<FiniteBusemannWitness>,
}

/// Enumerate discrete midpoints — points `m` with
/// `|d(x0,m) - d(x0,x1)/2| <= tau` and `|d(x1,m) - d(x0,x1)/2| <= tau` —
/// and check `d(m,y) <= (d(x0,y) + d(x1,y))/2 + tau` against every `y`.
/// Spaces with no discrete midpoints pass vacuously.
pub fn check_finite_busemann(space: &FiniteMetricSpace, tau: f64) -> FiniteBusemannReport {
    let n = space.len();
    let mut midpoint_triples = 0usize;
    let mut checks = 0u64;
    let mut max_violation: Option<f64> = None;
    let mut witness: Option<FiniteBusemannWitness> = None;

    for x0 in 0..n {
        for x1 in (x0 + 1)..n {
            let half = space.dist(x0, x1) / 2.0;
            for m in 0..n {
                if (space.dist(x0, m) - half).abs() > tau || (space.dist(x1, m) - half).abs() > tau
                {
                    continue;
                }
                midpoint_triples += 1;
                for y in 0..n {
                    checks += 1;
                    let v = space.dist(m, y) - 0.5 * (space.dist(x0, y) + space.dist(x1, y));
                    let improved = match max_violation {
                        None => true,
                        Some(best) => v > best,
                    };
                    if improved {
                        max_violation = Some(v);
                        if v > tau {
                            witness = Some(FiniteBusemannWitness {
                                endpoints: (x0, x1),
                                midpoint: m,
                                against: y,
                                violation: v,
                            });
                        }
                    }
                }
            }
        }
    }

    let verdict = if midpoint_triples == 0 {
        Verdict::Vacuous
    } else {
        Verdict::from_pass(witness.is_none())
    };
    FiniteBusemannReport { verdict, tolerance: tau, midpoint_triples, checks, max_violation, witness }
}
