//! Distribution function, decreasing rearrangement, the maximal function
//! `x**`, Hardy–Littlewood–Pólya domination and measure-preserving transport.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::step::{dedup_sorted, Alpha, Piece, StepFunction};

/// `μ{s : |x(s)| > λ}`.
pub fn distribution(x: &StepFunction, lambda: f64) -> Result<f64> {
    if !(lambda >= 0.0) {
        return Err(Error::Domain(format!("distribution level must be >= 0, got {lambda}")));
    }
    Ok(x
        .pieces()
        .iter()
        .filter(|p| p.v.abs() > lambda)
        .map(Piece::len)
        .sum())
}

/// Source pieces of `|x|` in the order the rearrangement lays them out:
/// by decreasing absolute value, ties kept in source order.
fn layout_order(x: &StepFunction) -> Vec<Piece> {
    let mut ps: Vec<Piece> = x
        .pieces()
        .iter()
        .map(|p| Piece::new(p.t0, p.t1, p.v.abs()))
        .collect();
    ps.sort_by(|a, b| b.v.total_cmp(&a.v));
    ps
}

/// The decreasing rearrangement `x*`, packed against the origin.
pub fn rearrange(x: &StepFunction) -> StepFunction {
    let mut s = 0.0;
    let pieces = layout_order(x)
        .into_iter()
        .map(|p| {
            let t0 = s;
            s += p.len();
            Piece::new(t0, s, p.v)
        })
        .collect();
    StepFunction::from_sorted(x.alpha(), pieces)
}

pub fn equimeasurable(x: &StepFunction, y: &StepFunction) -> bool {
    rearrange(x).approx_eq(&rearrange(y), crate::step::CANON_TOL * 10.0)
}

/// One interval of a [`MaximalCurve`]: `x**(t) = level + mass / t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSegment {
    /// Cumulative correction `∫₀^{s_k} (x* − v_k)`, always nonnegative.
    pub mass: f64,
    /// The value `v_k` of `x*` on the interval.
    pub level: f64,
}

/// Exact representation of `x**(t) = (1/t) ∫₀ᵗ x*`.
///
/// On `(s_k, s_{k+1})` the curve equals `level_k + mass_k / t`; past the last
/// breakpoint it is `total / t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalCurve {
    pub alpha: Alpha,
    pub breakpoints: Vec<f64>,
    pub segments: Vec<CurveSegment>,
    /// `∫₀^∞ x*`.
    pub total: f64,
}

impl MaximalCurve {
    /// `x**(0+) = x*(0)`.
    pub fn at_zero(&self) -> f64 {
        self.segments.first().map_or(0.0, |s| s.level)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.at_zero();
        }
        let k = self.breakpoints.partition_point(|&s| s <= t);
        if k == 0 || k >= self.breakpoints.len() {
            return self.total / t;
        }
        let seg = self.segments[k - 1];
        seg.level + seg.mass / t
    }

    /// `∫₀ᵗ x*`.
    pub fn cumulative(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            self.eval(t) * t
        }
    }

    /// Segments on the union of the curve's breakpoints and `extra`, as
    /// `(t0, t1, segment)`; the last element runs to `alpha`.
    pub fn refined_segments(&self, extra: &[f64]) -> Vec<(f64, f64, CurveSegment)> {
        let end = self.alpha.as_f64();
        let mut bps = self.breakpoints.clone();
        bps.extend(extra.iter().copied().filter(|&t| t > 0.0 && t < end));
        bps.push(0.0);
        dedup_sorted(&mut bps);
        let mut out = Vec::with_capacity(bps.len());
        for (i, &t0) in bps.iter().enumerate() {
            let t1 = bps.get(i + 1).copied().unwrap_or(end);
            if t1 <= t0 {
                continue;
            }
            let probe = if t1.is_finite() { 0.5 * (t0 + t1) } else { t0 + 1.0 };
            out.push((t0, t1, self.segment_at(probe)));
        }
        out
    }

    fn segment_at(&self, t: f64) -> CurveSegment {
        let k = self.breakpoints.partition_point(|&s| s <= t);
        if k == 0 || k >= self.breakpoints.len() {
            CurveSegment {
                mass: self.total,
                level: 0.0,
            }
        } else {
            self.segments[k - 1]
        }
    }
}

pub fn maximal_curve(x: &StepFunction) -> MaximalCurve {
    let star = rearrange(x);
    let mut breakpoints = vec![0.0];
    let mut segments = Vec::with_capacity(star.pieces().len());
    let mut cum = 0.0;
    for p in star.pieces() {
        segments.push(CurveSegment {
            mass: cum - p.v * p.t0,
            level: p.v,
        });
        cum += p.v * p.len();
        breakpoints.push(p.t1);
    }
    MaximalCurve {
        alpha: x.alpha(),
        breakpoints,
        segments,
        total: cum,
    }
}

/// Default absolute slack for [`hlp_dominates`]: `1e-12 · max(1, ‖y**‖_∞)`.
pub fn default_hlp_tol(y: &StepFunction) -> f64 {
    1e-12 * 1f64.max(y.sup_abs())
}

/// `x ≺ y`, i.e. `x**(t) <= y**(t) + tol` for all `t > 0`.
///
/// On each interval of the common breakpoint refinement the difference
/// `(B₁ − B₂) + (A₁ − A₂)/t` is monotone, so the limit at `0+` and the
/// breakpoints decide the question; past the last breakpoint both curves
/// decay like `A/t` and the sign of the difference is already visible at it.
pub fn hlp_dominates(x: &StepFunction, y: &StepFunction, tol: f64) -> bool {
    hlp_violation(x, y, tol).is_none()
}

pub fn hlp_dominates_default(x: &StepFunction, y: &StepFunction) -> bool {
    hlp_dominates(x, y, default_hlp_tol(y))
}

/// First location where `x**` exceeds `y** + tol`, as `(t, x**(t) − y**(t))`.
/// `t = 0` stands for the limit at `0+`.
pub fn hlp_violation(x: &StepFunction, y: &StepFunction, tol: f64) -> Option<(f64, f64)> {
    let cx = maximal_curve(x);
    let cy = maximal_curve(y);
    let d0 = cx.at_zero() - cy.at_zero();
    if d0 > tol {
        return Some((0.0, d0));
    }
    let mut ts: Vec<f64> = cx.breakpoints.iter().chain(&cy.breakpoints).copied().collect();
    if x.alpha() == Alpha::Unit {
        ts.push(1.0);
    }
    dedup_sorted(&mut ts);
    ts.into_iter().filter(|&t| t > 0.0).find_map(|t| {
        let d = cx.eval(t) - cy.eval(t);
        (d > tol).then_some((t, d))
    })
}

/// Interval `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportPair {
    pub source: Interval,
    pub target: Interval,
}

/// Piecewise-translation map σ from `supp x` onto `supp x*` with
/// `x* ∘ σ = |x|`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TransportMap {
    pub pairs: Vec<TransportPair>,
}

impl TransportMap {
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|p| p.source == p.target)
    }

    /// Equal total lengths and pairwise disjoint intervals on each side.
    pub fn is_measure_preserving(&self) -> bool {
        let lengths_match = self
            .pairs
            .iter()
            .all(|p| (p.source.len() - p.target.len()).abs() <= 1e-12 * p.source.len().max(1.0));
        let disjoint = |side: fn(&TransportPair) -> Interval| {
            let mut ivs: Vec<Interval> = self.pairs.iter().map(side).collect();
            ivs.sort_by(|a, b| a.lo.total_cmp(&b.lo));
            ivs.windows(2).all(|w| w[0].hi <= w[1].lo)
        };
        lengths_match && disjoint(|p| p.source) && disjoint(|p| p.target)
    }

    /// `f ∘ σ` on the source intervals (zero elsewhere).
    pub fn pull_back(&self, f: &StepFunction) -> StepFunction {
        let mut pieces = Vec::new();
        for pair in &self.pairs {
            let shift = pair.source.lo - pair.target.lo;
            for p in f.restrict(pair.target.lo, pair.target.hi).pieces() {
                pieces.push(Piece::new(
                    (p.t0 + shift).max(pair.source.lo),
                    (p.t1 + shift).min(pair.source.hi),
                    p.v,
                ));
            }
        }
        pieces.sort_by(|a, b| a.t0.total_cmp(&b.t0));
        StepFunction::from_sorted(f.alpha(), pieces)
    }
}

/// Measure-preserving rearranging map: each piece of `x` is translated onto
/// the slot it occupies in `x*`. The zero function yields the empty map.
pub fn ryff_transport(x: &StepFunction) -> TransportMap {
    let mut s = 0.0;
    let pairs = layout_order(x)
        .into_iter()
        .map(|p| {
            let t0 = s;
            s += p.len();
            TransportPair {
                source: Interval { lo: p.t0, hi: p.t1 },
                target: Interval { lo: t0, hi: s },
            }
        })
        .collect();
    TransportMap { pairs }
}
