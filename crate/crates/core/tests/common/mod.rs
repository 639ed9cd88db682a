#![allow(dead_code)]

use proptest::prelude::*;
use rifs_core::step::{Alpha, Piece, StepFunction};
use rifs_core::weight::{WeightPiece, WeightSpec};

pub fn f(triples: &[(f64, f64, f64)]) -> StepFunction {
    StepFunction::from_triples(Alpha::Infinite, triples).unwrap()
}

pub fn chi(t0: f64, t1: f64) -> StepFunction {
    StepFunction::indicator(Alpha::Infinite, t0, t1, 1.0).unwrap()
}

pub fn sqrt_weight() -> WeightSpec {
    WeightSpec::power(1.0, -0.5)
}

/// `t^{-1/2}` with `c = 0` on `[a, b)`.
pub fn sqrt_weight_with_gap(a: f64, b: f64) -> WeightSpec {
    WeightSpec::new(vec![
        WeightPiece::new(0.0, a, 1.0, -0.5, 0.0),
        WeightPiece::new(a, b, 0.0, 0.0, 0.0),
        WeightPiece::new(b, f64::INFINITY, 1.0, -0.5, 0.0),
    ])
    .unwrap()
}

/// Piece layout `(gap, length, value)` with gaps and lengths on a 1/8 lattice
/// so breakpoints are exact binary fractions.
fn layout() -> impl Strategy<Value = Vec<(u32, u32, i32)>> {
    prop::collection::vec((0u32..6, 1u32..12, -16i32..=16), 1..7)
}

fn build(alpha: Alpha, parts: &[(u32, u32, i32)]) -> StepFunction {
    let mut t = 0.0;
    let mut pieces = Vec::new();
    for &(gap, len, v) in parts {
        t += gap as f64 / 8.0;
        let end = t + len as f64 / 8.0;
        pieces.push(Piece::new(t, end, v as f64 / 4.0));
        t = end;
    }
    if alpha == Alpha::Unit {
        let s = 1.0 / t.max(1.0);
        for p in &mut pieces {
            p.t0 *= s;
            p.t1 = (p.t1 * s).min(1.0);
        }
    }
    StepFunction::new(alpha, pieces).unwrap()
}

pub fn step_on(alpha: Alpha) -> impl Strategy<Value = StepFunction> {
    layout().prop_map(move |parts| build(alpha, &parts))
}

pub fn step() -> impl Strategy<Value = StepFunction> {
    step_on(Alpha::Infinite)
}

pub fn any_alpha_step() -> impl Strategy<Value = StepFunction> {
    prop_oneof![step_on(Alpha::Infinite), step_on(Alpha::Unit)]
}

/// `(1/t) ∫_0^t x*`, from sorted absolute piece values.
pub fn starstar_oracle(x: &StepFunction, t: f64) -> f64 {
    let mut parts: Vec<(f64, f64)> = x.pieces().iter().map(|p| (p.v.abs(), p.len())).collect();
    parts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut s, mut acc) = (0.0, 0.0);
    for (v, len) in parts {
        if s >= t {
            break;
        }
        acc += v * len.min(t - s);
        s += len;
    }
    acc / t
}

/// `(∫ |x|^p)^{1/p}` straight from the pieces.
pub fn lp_oracle(x: &StepFunction, p: f64) -> f64 {
    x.pieces().iter().map(|pc| pc.v.abs().powf(p) * pc.len()).sum::<f64>().powf(1.0 / p)
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
