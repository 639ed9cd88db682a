//! Finitely supported step functions on `[0, alpha)`.
//!
//! A [`StepFunction`] is a sorted list of disjoint half-open pieces carrying a
//! constant value; everything outside the pieces is zero. Values are kept in
//! canonical form: zero pieces are dropped and touching pieces with equal
//! values are merged, both up to [`CANON_TOL`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{close, Extended};

/// Relative tolerance used for merging breakpoints and values.
pub const CANON_TOL: f64 = 1e-12;

/// Length of the underlying interval `I = [0, alpha)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alpha {
    Unit,
    Infinite,
}

impl Alpha {
    pub fn as_f64(self) -> f64 {
        match self {
            Alpha::Unit => 1.0,
            Alpha::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Alpha::Infinite)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Unit => f.write_str("1"),
            Alpha::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Alpha {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Extended::deserialize(d)? {
            Extended::Finite(1.0) => Ok(Alpha::Unit),
            Extended::Infinite => Ok(Alpha::Infinite),
            Extended::Finite(v) => Err(serde::de::Error::custom(format!(
                "alpha must be \"1\" or \"inf\", got {v}"
            ))),
        }
    }
}

/// One constant piece `v` on `[t0, t1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub t0: f64,
    pub t1: f64,
    pub v: f64,
}

impl Piece {
    pub fn new(t0: f64, t1: f64, v: f64) -> Self {
        Piece { t0, t1, v }
    }

    pub fn len(&self) -> f64 {
        self.t1 - self.t0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawStep {
    alpha: Alpha,
    pieces: Vec<Piece>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStep", into = "RawStep")]
pub struct StepFunction {
    alpha: Alpha,
    pieces: Vec<Piece>,
}

impl TryFrom<RawStep> for StepFunction {
    type Error = Error;

    fn try_from(raw: RawStep) -> Result<Self> {
        StepFunction::new(raw.alpha, raw.pieces)
    }
}

impl From<StepFunction> for RawStep {
    fn from(f: StepFunction) -> Self {
        RawStep {
            alpha: f.alpha,
            pieces: f.pieces,
        }
    }
}

impl StepFunction {
    /// Validates and canonicalizes the pieces. Pieces may come in any order;
    /// overlaps beyond the merge tolerance are rejected.
    pub fn new(alpha: Alpha, mut pieces: Vec<Piece>) -> Result<Self> {
        for p in &pieces {
            if !(p.t0.is_finite() && p.t1.is_finite() && p.v.is_finite()) {
                return Err(Error::InvalidStepFunction(format!(
                    "piece [{}, {}) with value {} is not finite",
                    p.t0, p.t1, p.v
                )));
            }
            if p.t0 < 0.0 {
                return Err(Error::InvalidStepFunction(format!(
                    "piece starts at negative time {}",
                    p.t0
                )));
            }
            if p.t1 <= p.t0 {
                return Err(Error::InvalidStepFunction(format!(
                    "piece [{}, {}) is empty or reversed",
                    p.t0, p.t1
                )));
            }
            if p.t1 > alpha.as_f64() * (1.0 + CANON_TOL) {
                return Err(Error::InvalidStepFunction(format!(
                    "piece ends at {} beyond alpha = {}",
                    p.t1, alpha
                )));
            }
        }
        pieces.sort_by(|a, b| a.t0.total_cmp(&b.t0));
        for w in pieces.windows(2) {
            if w[0].t1 > w[1].t0 && !close(w[0].t1, w[1].t0, CANON_TOL) {
                return Err(Error::InvalidStepFunction(format!(
                    "pieces [{}, {}) and [{}, {}) overlap",
                    w[0].t0, w[0].t1, w[1].t0, w[1].t1
                )));
            }
        }
        Ok(Self::from_sorted(alpha, pieces))
    }

    /// Canonicalizes already validated, sorted, disjoint pieces.
    pub(crate) fn from_sorted(alpha: Alpha, pieces: Vec<Piece>) -> Self {
        let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
        for mut p in pieces {
            if p.v == 0.0 {
                continue;
            }
            if let Some(last) = out.last_mut() {
                if close(last.t1, p.t0, CANON_TOL) {
                    p.t0 = last.t1;
                    if close(last.v, p.v, CANON_TOL) {
                        last.t1 = p.t1;
                        continue;
                    }
                }
            }
            if p.t1 > p.t0 {
                out.push(p);
            }
        }
        if let Some(last) = out.last_mut() {
            if last.t1 > alpha.as_f64() {
                last.t1 = alpha.as_f64();
            }
        }
        StepFunction { alpha, pieces: out }
    }

    pub fn zero(alpha: Alpha) -> Self {
        StepFunction {
            alpha,
            pieces: Vec::new(),
        }
    }

    /// `v * χ_[t0, t1)`.
    pub fn indicator(alpha: Alpha, t0: f64, t1: f64, v: f64) -> Result<Self> {
        Self::new(alpha, vec![Piece::new(t0, t1, v)])
    }

    /// Piece list `(t0, t1, v)`, convenient for tests and examples.
    pub fn from_triples(alpha: Alpha, triples: &[(f64, f64, f64)]) -> Result<Self> {
        Self::new(
            alpha,
            triples.iter().map(|&(a, b, v)| Piece::new(a, b, v)).collect(),
        )
    }

    /// Step function taking `values[i]` on `[i*width, (i+1)*width)`.
    pub fn from_cells(alpha: Alpha, width: f64, values: &[f64]) -> Result<Self> {
        Self::new(
            alpha,
            values
                .iter()
                .enumerate()
                .map(|(i, &v)| Piece::new(i as f64 * width, (i + 1) as f64 * width, v))
                .collect(),
        )
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn support_measure(&self) -> f64 {
        self.pieces.iter().map(Piece::len).sum()
    }

    /// Right end of the last piece (0 for the zero function).
    pub fn support_end(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.t1)
    }

    pub fn sup_abs(&self) -> f64 {
        self.pieces.iter().fold(0.0, |m, p| m.max(p.v.abs()))
    }

    /// `∫ |x|`.
    pub fn l1(&self) -> f64 {
        self.pieces.iter().map(|p| p.len() * p.v.abs()).sum()
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let idx = self.pieces.partition_point(|p| p.t1 <= t);
        match self.pieces.get(idx) {
            Some(p) if p.t0 <= t => p.v,
            _ => 0.0,
        }
    }

    /// All piece endpoints, sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.pieces.iter().flat_map(|p| [p.t0, p.t1]).collect();
        dedup_sorted(&mut b);
        b
    }

    /// Piecewise comparison of canonical forms up to `tol` (relative).
    pub fn approx_eq(&self, other: &StepFunction, tol: f64) -> bool {
        self.alpha == other.alpha
            && self.pieces.len() == other.pieces.len()
            && self.pieces.iter().zip(&other.pieces).all(|(a, b)| {
                close(a.t0, b.t0, tol) && close(a.t1, b.t1, tol) && close(a.v, b.v, tol)
            })
    }

    /// Shifts the function right by `dt` (which may be negative as long as
    /// the support stays in `[0, alpha)`).
    pub fn translate(&self, dt: f64) -> Result<Self> {
        Self::new(
            self.alpha,
            self.pieces
                .iter()
                .map(|p| Piece::new(p.t0 + dt, p.t1 + dt, p.v))
                .collect(),
        )
    }

    /// Restriction to `[a, b)`, keeping positions.
    pub fn restrict(&self, a: f64, b: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .filter_map(|p| {
                let t0 = p.t0.max(a);
                let t1 = p.t1.min(b);
                (t1 > t0).then(|| Piece::new(t0, t1, p.v))
            })
            .collect();
        Self::from_sorted(self.alpha, pieces)
    }
}

/// Sorts, then collapses entries closer than [`CANON_TOL`].
pub(crate) fn dedup_sorted(v: &mut Vec<f64>) {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|b, a| close(*a, *b, CANON_TOL));
}

/// Operations accepted by [`combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CombineOp {
    Add,
    Scale,
    Abs,
    Max,
    Min,
}

/// Common refinement of several step functions: the cells between
/// consecutive breakpoints of the union, each with the value of every input.
pub fn refine(fs: &[&StepFunction]) -> Vec<(f64, f64, Vec<f64>)> {
    let mut bps: Vec<f64> = fs.iter().flat_map(|f| f.breakpoints()).collect();
    dedup_sorted(&mut bps);
    bps.windows(2)
        .filter_map(|w| {
            let mid = 0.5 * (w[0] + w[1]);
            let vals: Vec<f64> = fs.iter().map(|f| f.value_at(mid)).collect();
            vals.iter().any(|v| *v != 0.0).then_some((w[0], w[1], vals))
        })
        .collect()
}

fn pointwise(fs: &[&StepFunction], op: impl Fn(&[f64]) -> f64) -> Result<StepFunction> {
    let alpha = match fs.first() {
        Some(f) => f.alpha,
        None => return Err(Error::Domain("combine needs at least one argument".into())),
    };
    if fs.iter().any(|f| f.alpha != alpha) {
        return Err(Error::AlphaMismatch(
            "combined step functions live on different intervals".into(),
        ));
    }
    let pieces = refine(fs)
        .into_iter()
        .map(|(a, b, vals)| Piece::new(a, b, op(&vals)))
        .collect();
    Ok(StepFunction::from_sorted(alpha, pieces))
}

pub fn add(x: &StepFunction, y: &StepFunction) -> Result<StepFunction> {
    pointwise(&[x, y], |v| v[0] + v[1])
}

/// `x - y`.
pub fn sub(x: &StepFunction, y: &StepFunction) -> Result<StepFunction> {
    pointwise(&[x, y], |v| v[0] - v[1])
}

pub fn sum(fs: &[&StepFunction]) -> Result<StepFunction> {
    pointwise(fs, |v| v.iter().sum())
}

pub fn max(x: &StepFunction, y: &StepFunction) -> Result<StepFunction> {
    pointwise(&[x, y], |v| v[0].max(v[1]))
}

pub fn min(x: &StepFunction, y: &StepFunction) -> Result<StepFunction> {
    pointwise(&[x, y], |v| v[0].min(v[1]))
}

pub fn scale(x: &StepFunction, c: f64) -> Result<StepFunction> {
    if !c.is_finite() {
        return Err(Error::Domain(format!("scale factor {c} is not finite")));
    }
    Ok(StepFunction::from_sorted(
        x.alpha,
        x.pieces
            .iter()
            .map(|p| Piece::new(p.t0, p.t1, c * p.v))
            .collect(),
    ))
}

pub fn abs(x: &StepFunction) -> StepFunction {
    StepFunction::from_sorted(
        x.alpha,
        x.pieces
            .iter()
            .map(|p| Piece::new(p.t0, p.t1, p.v.abs()))
            .collect(),
    )
}

/// Linear combination `Σ cᵢ fᵢ`.
pub fn linear_combination(coeffs: &[f64], fs: &[StepFunction]) -> Result<StepFunction> {
    if coeffs.len() != fs.len() {
        return Err(Error::Domain(format!(
            "{} coefficients for {} functions",
            coeffs.len(),
            fs.len()
        )));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain("non-finite coefficient".into()));
    }
    let refs: Vec<&StepFunction> = fs.iter().collect();
    pointwise(&refs, |v| v.iter().zip(coeffs).map(|(x, c)| x * c).sum())
}

/// Dispatches one of the [`CombineOp`]s. `Scale` and `Abs` take a single
/// function; `Scale` additionally needs `factor`.
pub fn combine(op: CombineOp, args: &[&StepFunction], factor: Option<f64>) -> Result<StepFunction> {
    let arity = |n: usize| {
        if args.len() == n {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{op:?} takes {n} argument(s), got {}",
                args.len()
            )))
        }
    };
    match op {
        CombineOp::Add => {
            if args.is_empty() {
                return Err(Error::Domain("add needs arguments".into()));
            }
            sum(args)
        }
        CombineOp::Scale => {
            arity(1)?;
            let c = factor.ok_or_else(|| Error::Domain("scale needs a factor".into()))?;
            scale(args[0], c)
        }
        CombineOp::Abs => {
            arity(1)?;
            Ok(abs(args[0]))
        }
        CombineOp::Max => {
            arity(2)?;
            max(args[0], args[1])
        }
        CombineOp::Min => {
            arity(2)?;
            min(args[0], args[1])
        }
    }
}
