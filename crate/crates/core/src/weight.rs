//! Power-log weights `w(t) = c · t^a · (log(e + t))^b` on consecutive pieces,
//! with analytic or asymptotically controlled integrals `W`, `W_p` and
//! exact convergence verdicts for the improper ends.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{ext_f64, integrate, Extended};
use crate::step::{Alpha, CANON_TOL};

/// Relative tolerance for numeric integration of pieces with `b != 0`.
pub const WEIGHT_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightPiece {
    pub t0: f64,
    #[serde(with = "ext_f64")]
    pub t1: f64,
    pub c: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default)]
    pub b: f64,
}

impl WeightPiece {
    pub fn new(t0: f64, t1: f64, c: f64, a: f64, b: f64) -> Self {
        WeightPiece { t0, t1, c, a, b }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if self.c == 0.0 {
            return 0.0;
        }
        let mut v = self.c * t.powf(self.a);
        if self.b != 0.0 {
            v *= log_e(t).powf(self.b);
        }
        v
    }

    /// `∫_{lo}^{hi} t^shift · w(t) dt` restricted to this piece.
    fn integral(&self, lo: f64, hi: f64, shift: f64) -> Result<f64> {
        let lo = lo.max(self.t0);
        let hi = hi.min(self.t1);
        if hi <= lo {
            return Ok(0.0);
        }
        power_log_integral(self.c, self.a + shift, self.b, lo, hi)
    }

    fn is_zero(&self) -> bool {
        self.c == 0.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawWeight {
    pieces: Vec<WeightPiece>,
}

/// A nonnegative weight on `(0, alpha)` assembled from [`WeightPiece`]s that
/// partition the interval; `alpha` is the right end of the last piece.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawWeight", into = "RawWeight")]
pub struct WeightSpec {
    pieces: Vec<WeightPiece>,
}

impl TryFrom<RawWeight> for WeightSpec {
    type Error = Error;
    fn try_from(raw: RawWeight) -> Result<Self> {
        WeightSpec::new(raw.pieces)
    }
}

impl From<WeightSpec> for RawWeight {
    fn from(w: WeightSpec) -> Self {
        RawWeight { pieces: w.pieces }
    }
}

/// `log(e + t)`.
fn log_e(t: f64) -> f64 {
    (std::f64::consts::E + t).ln()
}

/// `ln(e + e^u)` without overflowing for large `u`.
fn log_e_exp(u: f64) -> f64 {
    if u > 1.0 {
        u + (1.0 - u).exp().ln_1p()
    } else {
        log_e(u.exp())
    }
}

/// Whether `∫ c t^a log(e+t)^b` diverges at `0` (when `lo == 0`) or at `∞`
/// (when `hi == ∞`).
fn diverges(c: f64, a: f64, b: f64, lo: f64, hi: f64) -> bool {
    if c == 0.0 {
        return false;
    }
    let at_zero = lo == 0.0 && a <= -1.0;
    let at_inf = hi == f64::INFINITY && (a > -1.0 || (a == -1.0 && b >= -1.0));
    at_zero || at_inf
}

/// `∫_{lo}^{hi} c t^a log(e+t)^b dt`, `0 <= lo < hi <= ∞`, returning `+∞`
/// exactly when the exponent rule says the integral diverges.
pub fn power_log_integral(c: f64, a: f64, b: f64, lo: f64, hi: f64) -> Result<f64> {
    if c == 0.0 || hi <= lo {
        return Ok(0.0);
    }
    if diverges(c, a, b, lo, hi) {
        return Ok(f64::INFINITY);
    }
    if b == 0.0 {
        return Ok(c * power_integral(a, lo, hi));
    }
    let mut total = 0.0;
    // Split at 1 so the origin and the tail get their own substitutions.
    if lo < 1.0 {
        let h = hi.min(1.0);
        total += if lo == 0.0 {
            // v = t^(a+1) removes the t^a singularity.
            let e = a + 1.0;
            integrate(|v: f64| log_e(v.powf(1.0 / e)).powf(b), 0.0, h.powf(e), WEIGHT_REL_TOL, 0.0)? / e
        } else {
            log_segment(a, b, lo.ln(), h.ln())?
        };
    }
    if hi > 1.0 {
        let l = lo.max(1.0);
        total += if hi.is_finite() {
            log_segment(a, b, l.ln(), hi.ln())?
        } else {
            log_tail(a, b, l.ln())?
        };
    }
    Ok(c * total)
}

fn power_integral(a: f64, lo: f64, hi: f64) -> f64 {
    if a == -1.0 {
        return (hi / lo).ln();
    }
    let e = a + 1.0;
    let top = if hi.is_finite() { hi.powf(e) } else { 0.0 };
    let bottom = if lo > 0.0 { lo.powf(e) } else { 0.0 };
    (top - bottom) / e
}

/// `∫ t^a log(e+t)^b dt` over `t ∈ [e^u0, e^u1]` in the variable `u = ln t`.
fn log_segment(a: f64, b: f64, u0: f64, u1: f64) -> Result<f64> {
    integrate(
        |u: f64| ((a + 1.0) * u).exp() * log_e_exp(u).powf(b),
        u0,
        u1,
        WEIGHT_REL_TOL,
        0.0,
    )
}

/// Convergent tail `∫_{e^u0}^∞ t^a log(e+t)^b dt` (`a < -1`, or `a = -1`
/// with `b < -1`): doubling windows in `u = ln t`, closed by the asymptotic
/// remainder `∫_U^∞ e^{(a+1)u} u^b du`.
fn log_tail(a: f64, b: f64, u0: f64) -> Result<f64> {
    let rate = a + 1.0;
    let mut total = 0.0;
    let mut lo = u0;
    let mut width = 1.0;
    loop {
        let hi = lo + width;
        let part = log_segment(a, b, lo, hi)?;
        total += part;
        lo = hi;
        width *= 2.0;
        let remainder = if rate == 0.0 {
            lo.powf(b + 1.0) / (-b - 1.0)
        } else {
            // e^{rate·U} U^b / |rate| bounds the remainder to first order.
            (rate * lo).exp() * lo.powf(b) / -rate
        };
        let settled = part.abs() <= 1e-14 * total.abs() || lo > 1e12;
        if remainder <= 1e-13 * total.abs() || (settled && lo > 40.0) {
            return Ok(total + remainder);
        }
        if !total.is_finite() {
            return Err(Error::Divergent("weight tail".into()));
        }
    }
}

impl WeightSpec {
    pub fn new(mut pieces: Vec<WeightPiece>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidWeight("weight has no pieces".into()));
        }
        pieces.sort_by(|a, b| a.t0.total_cmp(&b.t0));
        if pieces[0].t0 != 0.0 {
            return Err(Error::InvalidWeight(format!(
                "first piece must start at 0, starts at {}",
                pieces[0].t0
            )));
        }
        for p in &pieces {
            if !(p.c >= 0.0 && p.c.is_finite()) {
                return Err(Error::InvalidWeight(format!("coefficient {} must be finite and >= 0", p.c)));
            }
            if !(p.a.is_finite() && p.b.is_finite()) {
                return Err(Error::InvalidWeight("exponents must be finite".into()));
            }
            if !(p.t1 > p.t0) {
                return Err(Error::InvalidWeight(format!("piece [{}, {}) is empty", p.t0, p.t1)));
            }
        }
        for i in 1..pieces.len() {
            let prev = pieces[i - 1].t1;
            if !crate::num::close(prev, pieces[i].t0, CANON_TOL) {
                return Err(Error::InvalidWeight(format!(
                    "pieces must be contiguous: gap or overlap at {prev} / {}",
                    pieces[i].t0
                )));
            }
            pieces[i].t0 = prev;
        }
        let end = pieces.last().expect("nonempty").t1;
        if end != 1.0 && end != f64::INFINITY {
            return Err(Error::InvalidWeight(format!(
                "pieces must partition (0, 1) or (0, inf), last ends at {end}"
            )));
        }
        Ok(WeightSpec { pieces })
    }

    /// `c · t^a` on `(0, ∞)`.
    pub fn power(c: f64, a: f64) -> Self {
        WeightSpec {
            pieces: vec![WeightPiece::new(0.0, f64::INFINITY, c, a, 0.0)],
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::power(c, 0.0)
    }

    pub fn pieces(&self) -> &[WeightPiece] {
        &self.pieces
    }

    pub fn alpha(&self) -> Alpha {
        if self.end() == 1.0 {
            Alpha::Unit
        } else {
            Alpha::Infinite
        }
    }

    fn end(&self) -> f64 {
        self.pieces.last().expect("nonempty").t1
    }

    pub fn first_piece(&self) -> &WeightPiece {
        &self.pieces[0]
    }

    pub fn tail_piece(&self) -> &WeightPiece {
        self.pieces.last().expect("nonempty")
    }

    /// The weight seen on `(0, alpha)`: a weight on `(0, ∞)` may be cut down
    /// to `(0, 1)`, but not the other way round.
    pub fn restrict(&self, alpha: Alpha) -> Result<WeightSpec> {
        match (self.alpha(), alpha) {
            (a, b) if a == b => Ok(self.clone()),
            (Alpha::Infinite, Alpha::Unit) => {
                let mut pieces: Vec<WeightPiece> =
                    self.pieces.iter().copied().filter(|p| p.t0 < 1.0).collect();
                if let Some(last) = pieces.last_mut() {
                    last.t1 = 1.0;
                }
                WeightSpec::new(pieces)
            }
            _ => Err(Error::AlphaMismatch("weight on (0, 1) used on (0, inf)".into())),
        }
    }

    fn piece_at(&self, t: f64) -> &WeightPiece {
        let idx = self.pieces.partition_point(|p| p.t1 <= t);
        &self.pieces[idx.min(self.pieces.len() - 1)]
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.piece_at(t).eval(t)
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if t > 0.0 && t <= self.end() && t.is_finite() {
            Ok(())
        } else {
            Err(Error::Domain(format!("t = {t} outside (0, {}]", Extended::from_f64(self.end()).as_f64())))
        }
    }

    /// `∫_{lo}^{hi} t^shift w(t) dt` over the whole weight, possibly `+∞`.
    pub fn moment(&self, lo: f64, hi: f64, shift: f64) -> Result<f64> {
        let mut total = 0.0;
        for p in &self.pieces {
            if p.t1 <= lo || p.t0 >= hi {
                continue;
            }
            total += p.integral(lo, hi, shift)?;
            if total == f64::INFINITY {
                break;
            }
        }
        Ok(total)
    }

    /// Whether `W(t) < ∞` for `t > 0`: the first nonzero piece must be
    /// integrable at the origin.
    pub fn locally_integrable(&self) -> bool {
        let p = self.first_piece();
        p.is_zero() || p.a > -1.0
    }

    /// `W(t) = ∫₀ᵗ w`.
    pub fn big_w(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        let v = self.moment(0.0, t, 0.0)?;
        if v.is_infinite() {
            return Err(Error::Divergent(format!("W({t}) = inf: weight not integrable at 0")));
        }
        Ok(v)
    }

    /// `W(α)` (possibly `+∞`), decided by the tail exponent rule.
    pub fn big_w_total(&self) -> Result<f64> {
        self.moment(0.0, self.end(), 0.0)
    }

    /// `∫_s^α t^{-p} w(t) dt`, possibly `+∞`.
    pub fn tail_moment(&self, p: f64, s: f64) -> Result<f64> {
        self.moment(s, self.end(), -p)
    }

    /// `W_p(s) = s^p ∫_s^α t^{-p} w(t) dt`.
    pub fn big_w_p(&self, p: f64, s: f64) -> Result<f64> {
        if !(p > 0.0) {
            return Err(Error::Domain(format!("p must be > 0, got {p}")));
        }
        self.check_t(s)?;
        if s == self.end() {
            return Ok(0.0);
        }
        let j = self.tail_moment(p, s)?;
        if j.is_infinite() {
            return Err(Error::NotInDp(format!(
                "W_{p}({s}) diverges: tail exponent {} >= p - 1",
                self.tail_piece().a
            )));
        }
        Ok(s.powf(p) * j)
    }

    /// Whether `∫^α t^{-p} w` converges at the right end.
    pub fn tail_p_integrable(&self, p: f64) -> bool {
        let t = self.tail_piece();
        self.end().is_finite()
            || t.is_zero()
            || !diverges(t.c, t.a - p, t.b, t.t0.max(1.0), f64::INFINITY)
    }

    /// Membership in `D_p` on the weight's own interval.
    pub fn in_dp(&self, p: f64) -> bool {
        p > 0.0 && self.locally_integrable() && self.tail_p_integrable(p)
    }

    /// Describes why the weight fails `D_p`, if it does.
    pub fn dp_violation(&self, p: f64) -> Option<String> {
        if !(p > 0.0) {
            Some(format!("p = {p} must be positive"))
        } else if !self.locally_integrable() {
            Some(format!(
                "W(s) = inf: origin exponent {} <= -1",
                self.first_piece().a
            ))
        } else if !self.tail_p_integrable(p) {
            let t = self.tail_piece();
            Some(format!(
                "W_p(s) = inf: tail exponent a = {}, b = {} with a - p >= -1",
                t.a, t.b
            ))
        } else {
            None
        }
    }

    pub fn require_dp(&self, p: f64) -> Result<()> {
        match self.dp_violation(p) {
            Some(msg) => Err(Error::NotInDp(msg)),
            None => Ok(()),
        }
    }

    /// Index of a piece with `c = 0`, where `W` is flat.
    pub fn flat_piece(&self) -> Option<&WeightPiece> {
        self.pieces.iter().find(|p| p.is_zero())
    }
}

/// `weight_W(w, t)`.
pub fn weight_w(w: &WeightSpec, t: f64) -> Result<f64> {
    w.big_w(t)
}

/// `weight_Wp(w, p, s)`.
pub fn weight_wp(w: &WeightSpec, p: f64, s: f64) -> Result<f64> {
    w.big_w_p(p, s)
}

/// `in_D_p(w, p, alpha)`.
pub fn in_d_p(w: &WeightSpec, p: f64, alpha: Alpha) -> bool {
    w.restrict(alpha).map(|w| w.in_dp(p)).unwrap_or(false)
}
